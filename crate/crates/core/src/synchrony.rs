//! Structural synchrony: deciding and enumerating synchronization
//! partitions, building quotient networks, and spotting decoupled inputs.
//!
//! A partition `P` is a synchronization partition when the polydiagonal
//! `Δ_P` (coordinates equal within each class) is flow-invariant for every
//! Hill-like choice of regulatory functions. Under the SUM model that holds
//! iff, for every class `C` and every class `C_k`, the class-block row sums
//! of `W⁺` and `W⁻` are constant over the rows of `C`. Under MULT it holds
//! iff the class-block row sums of `M⁺` and `M⁻` are constant over each class
//! and so is the product of all nonzero weights of the row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrnError, Result};
use crate::model::{sign_symbol, GrnNetwork, ModelKind, Sign};
use crate::partition::{GenePartition, RefiningPartitions};
use crate::regulation::{Identity, RegulatoryFamily};

/// Default gene-count cap for exhaustive enumeration.
pub const DEFAULT_MAX_GENES: usize = 12;

/// Tolerances for constancy checks. Multiplicities are always compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute tolerance on weight row sums.
    pub weight_abs: f64,
    /// Relative tolerance on row weight products.
    pub product_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            weight_abs: 1e-9,
            product_rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self {
            weight_abs: tol,
            product_rel: tol,
        }
    }

    pub(crate) fn sums_close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.weight_abs
    }

    pub(crate) fn products_close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.product_rel * a.abs().max(b.abs())
    }
}

/// Why a partition fails. Genes are reported 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two genes of one class have different internal dynamics.
    InternalDynamics { class: Vec<usize>, genes: (usize, usize) },
    /// Class-block weight row sums differ over `class`.
    RowSum {
        sign: Sign,
        class: Vec<usize>,
        source: Vec<usize>,
        values: Vec<(usize, f64)>,
    },
    /// Class-block multiplicity row sums differ over `class`.
    MultiplicitySum {
        sign: Sign,
        class: Vec<usize>,
        source: Vec<usize>,
        values: Vec<(usize, u32)>,
    },
    /// Some genes of `class` receive input from `source` and others do not.
    InputSupport {
        sign: Sign,
        class: Vec<usize>,
        source: Vec<usize>,
        with_input: Vec<usize>,
        without_input: Vec<usize>,
    },
    /// Row products of nonzero weights differ over `class`.
    RowProduct { class: Vec<usize>, values: Vec<(usize, f64)> },
    /// Edges of one class block carry different per-edge regulatory parameters.
    EdgeParameter {
        sign: Sign,
        class: Vec<usize>,
        source: Vec<usize>,
        values: Vec<(usize, usize, Option<f64>)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynchronyVerdict {
    pub partition: GenePartition,
    pub model: ModelKind,
    pub is_synchrony: bool,
    pub witnesses: Vec<Witness>,
    /// False when the regulatory family is not Hill-like, in which case the
    /// structural verdict is a candidate to be confirmed numerically.
    pub theorem_guaranteed: bool,
}

/// Synchrony predicates over one network.
#[derive(Clone, Debug)]
pub struct SynchronyChecker<'a> {
    net: &'a GrnNetwork,
    tolerance: Tolerance,
    hill_like: bool,
    equivalence: GenePartition,
}

impl<'a> SynchronyChecker<'a> {
    pub fn new(net: &'a GrnNetwork) -> Self {
        Self {
            net,
            tolerance: Tolerance::default(),
            hill_like: true,
            equivalence: net.gene_equivalence_partition(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Records whether verdicts are backed by the structural theorems for `family`.
    pub fn with_family(mut self, family: &RegulatoryFamily) -> Self {
        self.hill_like = family.is_hill_like();
        self
    }

    pub fn network(&self) -> &GrnNetwork {
        self.net
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn check(&self, partition: &GenePartition, model: ModelKind) -> Result<SynchronyVerdict> {
        if partition.n() != self.net.n() {
            return Err(GrnError::InvalidPartition(format!(
                "partition covers {} genes but the network has {}",
                partition.n(),
                self.net.n()
            )));
        }
        if model == ModelKind::Prod {
            self.net.ensure_prod()?;
        }
        let mut witnesses = Vec::new();
        self.scan(partition.labels(), partition.num_classes(), model, Some(&mut witnesses), partition);
        Ok(SynchronyVerdict {
            partition: partition.clone(),
            model,
            is_synchrony: witnesses.is_empty(),
            witnesses,
            theorem_guaranteed: self.hill_like,
        })
    }

    pub fn sum(&self, partition: &GenePartition) -> Result<SynchronyVerdict> {
        self.check(partition, ModelKind::Sum)
    }

    pub fn mult(&self, partition: &GenePartition) -> Result<SynchronyVerdict> {
        self.check(partition, ModelKind::Mult)
    }

    /// Boolean-only check without witness bookkeeping.
    pub fn holds(&self, partition: &GenePartition, model: ModelKind) -> bool {
        self.scan(partition.labels(), partition.num_classes(), model, None, partition)
    }

    /// Every partition refining the gene equivalence partition that is a
    /// synchronization partition, in restricted-growth-string order.
    pub fn enumerate(&self, model: ModelKind, max_genes: usize) -> Result<Vec<GenePartition>> {
        let n = self.net.n();
        if n > max_genes {
            return Err(GrnError::SizeCap {
                what: "exhaustive synchrony enumeration",
                size: n as u128,
                cap: max_genes as u128,
                advice: "check individual partitions instead (predicate-only mode, --partition)",
            });
        }
        if model == ModelKind::Prod {
            self.net.ensure_prod()?;
        }
        const CHUNK: usize = 4096;
        let mut candidates = RefiningPartitions::new(&self.equivalence);
        let mut out = Vec::new();
        loop {
            let chunk: Vec<GenePartition> = candidates.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            let kept: Vec<GenePartition> = chunk
                .into_par_iter()
                .filter(|p| self.holds(p, model))
                .collect();
            out.extend(kept);
        }
        Ok(out)
    }

    /// Core predicate. With `witnesses` present every failure is recorded;
    /// otherwise the scan stops at the first one.
    fn scan(
        &self,
        labels: &[usize],
        m: usize,
        model: ModelKind,
        mut witnesses: Option<&mut Vec<Witness>>,
        partition: &GenePartition,
    ) -> bool {
        let net = self.net;
        let members = partition.classes();
        let one_based = |genes: &[usize]| genes.iter().map(|g| g + 1).collect::<Vec<_>>();
        let mut ok = true;
        macro_rules! fail {
            ($w:expr) => {{
                ok = false;
                match witnesses.as_deref_mut() {
                    Some(ws) => ws.push($w),
                    None => return false,
                }
            }};
        }

        for class in members {
            let rep = class[0];
            if let Some(&other) = class.iter().find(|&&g| net.internal()[g] != net.internal()[rep]) {
                fail!(Witness::InternalDynamics {
                    class: one_based(class),
                    genes: (rep + 1, other + 1),
                });
            }
        }
        if !ok {
            // Refinement of gene equivalence is a precondition for everything else.
            return false;
        }

        for sign in Sign::BOTH {
            let w = net.weights(sign);
            let mm = net.multiplicities(sign);
            let params = net.params(sign);
            for class in members.iter().filter(|c| c.len() > 1) {
                let profile = |i: usize| -> (Vec<f64>, Vec<u32>, Vec<bool>) {
                    let mut sums = vec![0.0; m];
                    let mut mults = vec![0u32; m];
                    let mut support = vec![false; m];
                    for (j, (&wij, &mij)) in w.row(i).iter().zip(mm.row(i)).enumerate() {
                        let k = labels[j];
                        sums[k] += wij;
                        mults[k] += mij;
                        support[k] |= wij > 0.0;
                    }
                    (sums, mults, support)
                };
                let profiles: Vec<_> = class.iter().map(|&i| profile(i)).collect();
                for k in 0..m {
                    let source = &members[k];
                    match model {
                        ModelKind::Sum => {
                            let first = profiles[0].0[k];
                            if profiles.iter().any(|p| !self.tolerance.sums_close(p.0[k], first)) {
                                fail!(Witness::RowSum {
                                    sign,
                                    class: one_based(class),
                                    source: one_based(source),
                                    values: class.iter().zip(&profiles).map(|(&g, p)| (g + 1, p.0[k])).collect(),
                                });
                            }
                        }
                        ModelKind::Mult | ModelKind::Prod => {
                            let first = profiles[0].1[k];
                            if profiles.iter().any(|p| p.1[k] != first) {
                                fail!(Witness::MultiplicitySum {
                                    sign,
                                    class: one_based(class),
                                    source: one_based(source),
                                    values: class.iter().zip(&profiles).map(|(&g, p)| (g + 1, p.1[k])).collect(),
                                });
                            }
                            let has = profiles[0].2[k];
                            if profiles.iter().any(|p| p.2[k] != has) {
                                let (with, without): (Vec<_>, Vec<_>) =
                                    class.iter().zip(&profiles).partition(|(_, p)| p.2[k]);
                                fail!(Witness::InputSupport {
                                    sign,
                                    class: one_based(class),
                                    source: one_based(source),
                                    with_input: with.into_iter().map(|(&g, _)| g + 1).collect(),
                                    without_input: without.into_iter().map(|(&g, _)| g + 1).collect(),
                                });
                            }
                        }
                    }
                }
            }

            // Every edge of one class block must share its per-edge parameter.
            for class in members {
                for (k, source) in members.iter().enumerate() {
                    let edges: Vec<(usize, usize, Option<f64>)> = class
                        .iter()
                        .flat_map(|&i| source.iter().map(move |&j| (i, j)))
                        .filter(|&(i, j)| w[(i, j)] > 0.0)
                        .map(|(i, j)| (i, j, params[(i, j)]))
                        .collect();
                    if edges.windows(2).any(|e| e[0].2 != e[1].2) {
                        let _ = k;
                        fail!(Witness::EdgeParameter {
                            sign,
                            class: one_based(class),
                            source: one_based(source),
                            values: edges.iter().map(|&(i, j, p)| (j + 1, i + 1, p)).collect(),
                        });
                    }
                }
            }
        }

        if model.is_multiplicative() {
            for class in members.iter().filter(|c| c.len() > 1) {
                let products: Vec<f64> = class.iter().map(|&i| net.row_weight_product(i)).collect();
                if products.iter().any(|&p| !self.tolerance.products_close(p, products[0])) {
                    fail!(Witness::RowProduct {
                        class: one_based(class),
                        values: class.iter().zip(&products).map(|(&g, &p)| (g + 1, p)).collect(),
                    });
                }
            }
        }
        ok
    }
}

pub fn is_sum_synchrony(net: &GrnNetwork, partition: &GenePartition) -> Result<SynchronyVerdict> {
    SynchronyChecker::new(net).sum(partition)
}

pub fn is_mult_synchrony(net: &GrnNetwork, partition: &GenePartition) -> Result<SynchronyVerdict> {
    SynchronyChecker::new(net).mult(partition)
}

pub fn enumerate_synchrony_partitions(net: &GrnNetwork, model: ModelKind) -> Result<Vec<GenePartition>> {
    SynchronyChecker::new(net).enumerate(model, DEFAULT_MAX_GENES)
}

/// A nonzero weight position of a quotient row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPosition {
    pub sign: Sign,
    /// 1-based source gene of the quotient.
    pub source: usize,
}

/// The product condition a MULT quotient row must satisfy: the product of
/// the weights at `positions` equals `product`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowProductConstraint {
    /// 1-based quotient gene.
    pub row: usize,
    pub product: f64,
    /// In scan order: activation sources ascending, then repression sources ascending.
    pub positions: Vec<WeightPosition>,
    /// Position carrying the full product in the canonical quotient; every
    /// other position holds weight one.
    pub canonical: WeightPosition,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientResult {
    pub partition: GenePartition,
    pub model: ModelKind,
    pub quotient: GrnNetwork,
    /// Gene → quotient gene (0-based).
    pub class_map: Vec<usize>,
    /// Empty for SUM quotients.
    pub weight_constraints: Vec<RowProductConstraint>,
}

fn require_synchrony(checker: &SynchronyChecker<'_>, partition: &GenePartition, model: ModelKind) -> Result<()> {
    let verdict = checker.check(partition, model)?;
    if verdict.is_synchrony {
        Ok(())
    } else {
        Err(GrnError::NotSynchrony {
            partition: partition.to_string(),
            model: model.to_string(),
            witnesses: verdict.witnesses,
        })
    }
}

/// Class-block data of the representative row of every class: weight sum,
/// multiplicity sum and the (shared) per-edge parameter.
fn collapse(net: &GrnNetwork, partition: &GenePartition, model: ModelKind) -> GrnNetwork {
    let m = partition.num_classes();
    let internal = (0..m).map(|c| net.internal()[partition.representative(c)]).collect();
    let mut q = GrnNetwork::new(internal);
    for sign in Sign::BOTH {
        for i in 0..m {
            let rep = partition.representative(i);
            for k in 0..m {
                let mut weight = 0.0;
                let mut mult = 0u32;
                let mut param = None;
                for &j in partition.class(k) {
                    let wij = net.weights(sign)[(rep, j)];
                    if wij > 0.0 {
                        weight += wij;
                        param = net.params(sign)[(rep, j)];
                    }
                    mult += net.multiplicities(sign)[(rep, j)];
                }
                if weight > 0.0 || mult > 0 {
                    q.set_edge(sign, k, i, weight, mult);
                    q.set_param(sign, k, i, param);
                }
            }
        }
    }
    if model.is_multiplicative() {
        for i in 0..m {
            let rep = partition.representative(i);
            let product = net.row_weight_product(rep);
            let mut first = true;
            for sign in Sign::BOTH {
                for k in 0..m {
                    if q.weights(sign)[(i, k)] > 0.0 {
                        q.weights_mut(sign)[(i, k)] = if first { product } else { 1.0 };
                        first = false;
                    }
                }
            }
        }
    }
    q
}

/// Quotient of a SUM synchronization partition: quotient weights are the
/// class-block row sums.
pub fn sum_quotient(net: &GrnNetwork, partition: &GenePartition) -> Result<QuotientResult> {
    sum_quotient_with(&SynchronyChecker::new(net), partition)
}

pub fn sum_quotient_with(checker: &SynchronyChecker<'_>, partition: &GenePartition) -> Result<QuotientResult> {
    require_synchrony(checker, partition, ModelKind::Sum)?;
    Ok(QuotientResult {
        partition: partition.clone(),
        model: ModelKind::Sum,
        quotient: collapse(checker.network(), partition, ModelKind::Sum),
        class_map: partition.labels().to_vec(),
        weight_constraints: Vec::new(),
    })
}

/// Canonical quotient of a MULT synchronization partition. Multiplicities
/// are class-block sums; in each row the first nonzero position in scan
/// order carries the full row weight product and the others weight one.
pub fn mult_quotient(net: &GrnNetwork, partition: &GenePartition) -> Result<QuotientResult> {
    mult_quotient_with(&SynchronyChecker::new(net), partition)
}

pub fn mult_quotient_with(checker: &SynchronyChecker<'_>, partition: &GenePartition) -> Result<QuotientResult> {
    require_synchrony(checker, partition, ModelKind::Mult)?;
    let quotient = collapse(checker.network(), partition, ModelKind::Mult);
    let m = quotient.n();
    let mut constraints = Vec::new();
    for i in 0..m {
        let positions: Vec<WeightPosition> = Sign::BOTH
            .iter()
            .flat_map(|&sign| (0..m).map(move |k| (sign, k)))
            .filter(|&(sign, k)| quotient.weights(sign)[(i, k)] > 0.0)
            .map(|(sign, k)| WeightPosition { sign, source: k + 1 })
            .collect();
        if let Some(&canonical) = positions.first() {
            constraints.push(RowProductConstraint {
                row: i + 1,
                product: checker.network().row_weight_product(partition.representative(i)),
                positions,
                canonical,
            });
        }
    }
    Ok(QuotientResult {
        partition: partition.clone(),
        model: ModelKind::Mult,
        quotient,
        class_map: partition.labels().to_vec(),
        weight_constraints: constraints,
    })
}

/// Quotient for any model.
pub fn quotient(checker: &SynchronyChecker<'_>, partition: &GenePartition, model: ModelKind) -> Result<QuotientResult> {
    match model {
        ModelKind::Sum => sum_quotient_with(checker, partition),
        ModelKind::Mult => mult_quotient_with(checker, partition),
        ModelKind::Prod => {
            checker.network().ensure_prod()?;
            let mut q = mult_quotient_with(checker, partition)?;
            q.model = ModelKind::Prod;
            Ok(q)
        }
    }
}

/// A quotient input that cancels to a constant drive because
/// `act + rep ≡ 1` and the activation and repression weights coincide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoupling {
    /// 1-based quotient gene receiving the cancelled input.
    pub target: usize,
    pub target_genes: Vec<usize>,
    /// 1-based quotient gene whose influence cancels.
    pub source: usize,
    pub source_genes: Vec<usize>,
    /// The constant drive replacing the input.
    pub drive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpuriousReport {
    /// False when the family does not satisfy `act + rep ≡ 1`.
    pub applicable: bool,
    pub decouplings: Vec<Decoupling>,
}

/// Finds every quotient input `(i, k)` with `q⁺_ik = q⁻_ik > 0` (and equal
/// per-edge parameters), whose contribution is constant under a family with
/// `act + rep ≡ 1`.
pub fn detect_spurious(
    net: &GrnNetwork,
    partition: &GenePartition,
    family: &RegulatoryFamily,
) -> Result<SpuriousReport> {
    let checker = SynchronyChecker::new(net);
    let result = sum_quotient_with(&checker, partition)?;
    if !family.declares(Identity::ActPlusRepIsOne) {
        return Ok(SpuriousReport {
            applicable: false,
            decouplings: Vec::new(),
        });
    }
    let q = &result.quotient;
    let tol = checker.tolerance();
    let one_based = |c: usize| partition.class(c).iter().map(|g| g + 1).collect::<Vec<_>>();
    let mut decouplings = Vec::new();
    for i in 0..q.n() {
        for k in 0..q.n() {
            let (plus, minus) = (q.w_plus()[(i, k)], q.w_minus()[(i, k)]);
            let same_param = q.params(Sign::Activation)[(i, k)] == q.params(Sign::Repression)[(i, k)];
            if plus > 0.0 && minus > 0.0 && tol.sums_close(plus, minus) && same_param {
                decouplings.push(Decoupling {
                    target: i + 1,
                    target_genes: one_based(i),
                    source: k + 1,
                    source_genes: one_based(k),
                    drive: plus,
                });
            }
        }
    }
    Ok(SpuriousReport {
        applicable: true,
        decouplings,
    })
}

impl Witness {
    /// One-line human description.
    pub fn describe(&self) -> String {
        let genes = |g: &[usize]| g.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        match self {
            Witness::InternalDynamics { class, genes: (a, b) } => {
                format!("class {{{}}}: genes {a} and {b} have different internal dynamics", genes(class))
            }
            Witness::RowSum { sign, class, source, values } => format!(
                "class {{{}}}: W{} row sums from {{{}}} differ: {:?}",
                genes(class),
                sign_symbol(*sign),
                genes(source),
                values
            ),
            Witness::MultiplicitySum { sign, class, source, values } => format!(
                "class {{{}}}: M{} row sums from {{{}}} differ: {:?}",
                genes(class),
                sign_symbol(*sign),
                genes(source),
                values
            ),
            Witness::InputSupport { sign, class, source, .. } => format!(
                "class {{{}}}: not every gene has {} input from {{{}}}",
                genes(class),
                sign_symbol(*sign),
                genes(source)
            ),
            Witness::RowProduct { class, values } => {
                format!("class {{{}}}: row weight products differ: {:?}", genes(class), values)
            }
            Witness::EdgeParameter { sign, class, source, .. } => format!(
                "class {{{}}}: {} edges from {{{}}} carry different parameters",
                genes(class),
                sign_symbol(*sign),
                genes(source)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::matrix::Matrix;
    use crate::model::InternalDynamics;

    fn p(text: &str, n: usize) -> GenePartition {
        GenePartition::parse(text, n).unwrap()
    }

    #[test]
    fn five_gene_example_sum() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let part = p("1,2,3|4,5", 5);
        let v = is_sum_synchrony(&net, &part).unwrap();
        assert!(v.is_synchrony, "{:?}", v.witnesses);
        assert!(v.witnesses.is_empty());
        // repression row sums from {4,5} into {1,2,3}: 4+5 = 5.5+3.5 = 0+9 = 9
        for i in 0..3 {
            assert_eq!(net.w_minus()[(i, 3)] + net.w_minus()[(i, 4)], 9.0);
        }
        let mv = is_mult_synchrony(&net, &part).unwrap();
        assert!(!mv.is_synchrony);
        assert!(!mv.witnesses.is_empty());
    }

    #[test]
    fn singleton_partition_is_always_synchrony() {
        for name in bundled::NAMES {
            let net = bundled::network(name).unwrap();
            let s = GenePartition::singletons(net.n());
            assert!(is_sum_synchrony(&net, &s).unwrap().is_synchrony, "{name}");
            assert!(is_mult_synchrony(&net, &s).unwrap().is_synchrony, "{name}");
        }
    }

    #[test]
    fn four_gene_mult_example() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let part = p("1,2|3|4", 4);
        let v = is_mult_synchrony(&net, &part).unwrap();
        assert!(v.is_synchrony, "{:?}", v.witnesses);
        assert_eq!(net.row_weight_product(0), 2.0 * 0.5 * 3.0 * 3.0);
        assert_eq!(net.row_weight_product(1), 1.0 * 9.0 * 1.0 * 1.0);
        let prod = SynchronyChecker::new(&net).check(&part, ModelKind::Prod).unwrap();
        assert!(prod.is_synchrony);
    }

    #[test]
    fn internal_dynamics_witness_first() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let v = is_sum_synchrony(&net, &p("1,2,3,4,5", 5)).unwrap();
        assert!(!v.is_synchrony);
        assert!(matches!(v.witnesses[0], Witness::InternalDynamics { .. }));
        assert_eq!(v.witnesses.len(), 1);
    }

    #[test]
    fn partition_size_mismatch_is_an_error() {
        let net = bundled::network("ex31-five-gene").unwrap();
        assert!(matches!(
            is_sum_synchrony(&net, &GenePartition::singletons(4)),
            Err(GrnError::InvalidPartition(_))
        ));
    }

    #[test]
    fn prod_rejects_higher_multiplicities() {
        let net = bundled::network("clock5").unwrap();
        let s = GenePartition::singletons(5);
        assert!(SynchronyChecker::new(&net).check(&s, ModelKind::Prod).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let all = enumerate_synchrony_partitions(&net, ModelKind::Sum).unwrap();
        assert!(all.contains(&p("1,2,3|4,5", 5)));
        assert_eq!(all.last().unwrap(), &GenePartition::singletons(5));

        let rep = bundled::network("repressilator3").unwrap();
        let all = enumerate_synchrony_partitions(&rep, ModelKind::Sum).unwrap();
        assert!(all.contains(&GenePartition::whole(3)));

        let clock = bundled::network("clock5").unwrap();
        let all = enumerate_synchrony_partitions(&clock, ModelKind::Mult).unwrap();
        assert_eq!(all, vec![GenePartition::singletons(5)]);
    }

    #[test]
    fn enumeration_size_cap() {
        let net = GrnNetwork::new(vec![InternalDynamics::one_dim(1.0); 13]);
        let err = enumerate_synchrony_partitions(&net, ModelKind::Sum).unwrap_err();
        assert!(matches!(err, GrnError::SizeCap { size: 13, cap: 12, .. }));
        assert!(err.to_string().contains("predicate-only"));
    }

    #[test]
    fn five_gene_quotient() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let q = sum_quotient(&net, &p("1,2,3|4,5", 5)).unwrap();
        assert_eq!(q.quotient.w_plus(), &Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]));
        assert_eq!(q.quotient.w_minus(), &Matrix::from_rows(&[vec![0.0, 9.0], vec![3.0, 0.0]]));
        assert_eq!(q.class_map, vec![0, 0, 0, 1, 1]);
        assert!(q.quotient.validate().is_empty());
        assert!(q.weight_constraints.is_empty());
    }

    #[test]
    fn activation_and_repression_meet_in_quotient() {
        let net = bundled::network("ex36-funny").unwrap();
        let q = sum_quotient(&net, &p("1,2|3", 3)).unwrap();
        assert_eq!(q.quotient.w_plus(), &Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        assert_eq!(q.quotient.w_minus(), &Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]));
    }

    #[test]
    fn singleton_sum_quotient_is_identity() {
        for name in bundled::NAMES {
            let net = bundled::network(name).unwrap();
            let q = sum_quotient(&net, &GenePartition::singletons(net.n())).unwrap();
            assert_eq!(q.quotient, net, "{name}");
        }
    }

    #[test]
    fn quotient_of_non_synchrony_carries_witnesses() {
        let net = bundled::network("ex31-five-gene").unwrap();
        match mult_quotient(&net, &p("1,2,3|4,5", 5)) {
            Err(GrnError::NotSynchrony { witnesses, .. }) => assert!(!witnesses.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn four_gene_mult_quotient() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let q = mult_quotient(&net, &p("1,2|3|4", 4)).unwrap();
        let qn = &q.quotient;
        assert_eq!(qn.m_plus(), &Matrix::from_rows(&[vec![2, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]));
        assert_eq!(qn.m_minus(), &Matrix::from_rows(&[vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]));
        assert_eq!(qn.w_plus()[(0, 0)], 9.0);
        assert_eq!(qn.w_minus()[(0, 1)], 1.0);
        assert_eq!(qn.w_minus()[(0, 2)], 1.0);
        assert_eq!(qn.w_minus()[(1, 0)], 2.0);
        assert_eq!(qn.w_minus()[(2, 0)], 3.0);
        assert_eq!(q.weight_constraints[0].product, 9.0);
        assert_eq!(q.weight_constraints[0].positions.len(), 3);
        assert_eq!(
            q.weight_constraints[0].canonical,
            WeightPosition { sign: Sign::Activation, source: 1 }
        );
        assert!(qn.validate().is_empty());
    }

    #[test]
    fn singleton_mult_quotient_preserves_structure() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let q = mult_quotient(&net, &GenePartition::singletons(4)).unwrap();
        assert_eq!(q.quotient.m_plus(), net.m_plus());
        assert_eq!(q.quotient.m_minus(), net.m_minus());
        assert_eq!(q.quotient.row_weight_products(), net.row_weight_products());
        // rows with a single input keep their weight
        assert_eq!(q.quotient.w_minus()[(2, 1)], 2.0);
    }

    #[test]
    fn spurious_detection() {
        let hill = RegulatoryFamily::default();
        let funny = bundled::network("ex36-funny").unwrap();
        let report = detect_spurious(&funny, &p("1,2|3", 3), &hill).unwrap();
        assert!(report.applicable);
        assert_eq!(report.decouplings.len(), 1);
        let d = &report.decouplings[0];
        assert_eq!((d.target, d.source), (2, 1));
        assert_eq!(d.target_genes, vec![3]);
        assert_eq!(d.source_genes, vec![1, 2]);
        assert_eq!(d.drive, 1.0);

        let ex31 = bundled::network("ex31-five-gene").unwrap();
        let report = detect_spurious(&ex31, &p("1,2,3|4,5", 5), &hill).unwrap();
        assert!(report.applicable && report.decouplings.is_empty());

        let circ = RegulatoryFamily::circadian(2.0, 1.0).unwrap();
        let report = detect_spurious(&funny, &p("1,2|3", 3), &circ).unwrap();
        assert!(!report.applicable && report.decouplings.is_empty());
    }

    #[test]
    fn no_repression_means_no_decoupling() {
        let mut net = GrnNetwork::new(vec![InternalDynamics::one_dim(1.0); 3]);
        net.set_edge(Sign::Activation, 0, 1, 1.0, 1);
        net.set_edge(Sign::Activation, 1, 2, 2.0, 1);
        net.set_edge(Sign::Activation, 2, 0, 1.0, 1);
        let report = detect_spurious(&net, &GenePartition::singletons(3), &RegulatoryFamily::default()).unwrap();
        assert!(report.decouplings.is_empty());
    }

    #[test]
    fn edge_parameters_must_agree_within_a_block() {
        let mut net = GrnNetwork::new(vec![InternalDynamics::one_dim(1.0); 3]);
        net.set_edge(Sign::Activation, 0, 1, 1.0, 1);
        net.set_edge(Sign::Activation, 0, 2, 1.0, 1);
        net.set_param(Sign::Activation, 0, 1, Some(2.0));
        net.set_param(Sign::Activation, 0, 2, Some(3.0));
        let v = is_sum_synchrony(&net, &p("1|2,3", 3)).unwrap();
        assert!(!v.is_synchrony);
        assert!(matches!(v.witnesses[0], Witness::EdgeParameter { .. }));
        net.set_param(Sign::Activation, 0, 2, Some(2.0));
        assert!(is_sum_synchrony(&net, &p("1|2,3", 3)).unwrap().is_synchrony);
        let q = sum_quotient(&net, &p("1|2,3", 3)).unwrap();
        assert_eq!(q.quotient.params(Sign::Activation)[(1, 0)], Some(2.0));
    }

    #[test]
    fn theorem_flag_follows_family() {
        let net = bundled::network("exotic4").unwrap();
        let s = p("1|2,3|4", 4);
        let circ = RegulatoryFamily::circadian(2.0, 1.0).unwrap();
        let v = SynchronyChecker::new(&net).with_family(&circ).mult(&s).unwrap();
        assert!(v.is_synchrony);
        assert!(!v.theorem_guaranteed);
        assert!(is_mult_synchrony(&net, &s).unwrap().theorem_guaranteed);
    }
}
