//! Lifts: larger networks admitting a given network as quotient.
//!
//! Lift genes are numbered consecutively by class: with class sizes
//! `(2, 1, 1)` genes 1 and 2 lift quotient gene 1, gene 3 lifts quotient
//! gene 2 and gene 4 lifts quotient gene 3.
//!
//! Under SUM every block row of `W±` must sum to the quotient weight
//! `q±_ik`. Under MULT every block row of `M±` must sum to `n±_ik` and the
//! product of the nonzero weights of each lift row must equal the product
//! of the nonzero weights of its quotient row.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GrnError, Result};
use crate::io::NetworkDocument;
use crate::matrix::Matrix;
use crate::model::{GrnNetwork, ModelKind, Sign};
use crate::partition::GenePartition;
use crate::synchrony::{SynchronyChecker, Tolerance, Witness};

/// Default cap on the number of multiplicity pairs an enumeration may yield.
pub const DEFAULT_MAX_LIFTS: u128 = 10_000_000;

/// Partition of the lift genes into consecutive classes.
pub fn lift_partition(class_sizes: &[usize]) -> Result<GenePartition> {
    let mut classes = Vec::with_capacity(class_sizes.len());
    let mut next = 0;
    for &s in class_sizes {
        classes.push((next..next + s).collect());
        next += s;
    }
    GenePartition::from_classes(next, classes)
}

fn check_sizes(quotient: &GrnNetwork, class_sizes: &[usize]) -> Result<()> {
    if class_sizes.len() != quotient.n() {
        return Err(GrnError::DimensionMismatch {
            expected: quotient.n(),
            actual: class_sizes.len(),
        });
    }
    if let Some(k) = class_sizes.iter().position(|&s| s == 0) {
        return Err(GrnError::Config(format!("class size {} is zero", k + 1)));
    }
    Ok(())
}

/// Binomial coefficient, saturating.
fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of compositions of `total` into `parts` nonnegative parts.
pub fn composition_count(total: u32, parts: usize) -> u128 {
    binomial(total as u128 + parts as u128 - 1, parts as u128 - 1)
}

/// All compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// One slot per (sign, lift row, quotient class): the block row that must
/// sum to the quotient entry.
#[derive(Clone, Debug)]
struct Slot {
    sign: Sign,
    row: usize,
    columns: std::ops::Range<usize>,
}

fn slots(quotient: &GrnNetwork, partition: &GenePartition) -> Vec<(Slot, usize)> {
    let mut out = Vec::new();
    for sign in Sign::BOTH {
        for row in 0..partition.n() {
            let i = partition.class_of(row);
            for k in 0..quotient.n() {
                let class = partition.class(k);
                out.push((
                    Slot {
                        sign,
                        row,
                        columns: class[0]..class[0] + class.len(),
                    },
                    i,
                ))
            }
        }
    }
    out
}

/// Mixed-radix counter over independent choices, last digit fastest.
#[derive(Clone, Debug)]
struct Odometer {
    radices: Vec<usize>,
    digits: Option<Vec<usize>>,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let digits = radices.iter().all(|&r| r > 0).then(|| vec![0; radices.len()]);
        Self { radices, digits }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.digits.clone()?;
        let digits = self.digits.as_mut().unwrap();
        let mut k = digits.len();
        loop {
            if k == 0 {
                self.digits = None;
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < self.radices[k] {
                break;
            }
            digits[k] = 0;
        }
        Some(current)
    }
}

/// Pair `(M⁺, M⁻)` of lift multiplicity matrices.
pub type MultiplicityPair = (Matrix<u32>, Matrix<u32>);

/// Streams every multiplicity pair compatible with the quotient, in
/// lexicographic order of the flattened `(M⁺, M⁻)`.
#[derive(Clone, Debug)]
pub struct MultLiftMultiplicities {
    n: usize,
    slots: Vec<Slot>,
    choices: Vec<Vec<Vec<u32>>>,
    odometer: Odometer,
    count: u128,
}

impl MultLiftMultiplicities {
    /// Total number of pairs the stream yields.
    pub fn count_total(&self) -> u128 {
        self.count
    }
}

impl Iterator for MultLiftMultiplicities {
    type Item = MultiplicityPair;

    fn next(&mut self) -> Option<MultiplicityPair> {
        let digits = self.odometer.next()?;
        let mut plus = Matrix::zeros(self.n);
        let mut minus = Matrix::zeros(self.n);
        for ((slot, choices), d) in self.slots.iter().zip(&self.choices).zip(digits) {
            let target = match slot.sign {
                Sign::Activation => &mut plus,
                Sign::Repression => &mut minus,
            };
            for (col, &v) in slot.columns.clone().zip(&choices[d]) {
                target[(slot.row, col)] = v;
            }
        }
        Some((plus, minus))
    }
}

/// Closed-form number of multiplicity pairs: the product over all block
/// rows of `C(n±_ik + s_k - 1, s_k - 1)`.
pub fn mult_lift_count(quotient: &GrnNetwork, class_sizes: &[usize]) -> Result<u128> {
    check_sizes(quotient, class_sizes)?;
    let mut count: u128 = 1;
    for sign in Sign::BOTH {
        let nq = quotient.multiplicities(sign);
        for i in 0..quotient.n() {
            for k in 0..quotient.n() {
                let per_row = composition_count(nq[(i, k)], class_sizes[k]);
                for _ in 0..class_sizes[i] {
                    count = count.saturating_mul(per_row);
                }
            }
        }
    }
    Ok(count)
}

pub fn enumerate_mult_lift_multiplicities(
    quotient: &GrnNetwork,
    class_sizes: &[usize],
    max_count: u128,
) -> Result<MultLiftMultiplicities> {
    let count = mult_lift_count(quotient, class_sizes)?;
    if count > max_count {
        return Err(GrnError::SizeCap {
            what: "multiplicity lift enumeration",
            size: count,
            cap: max_count,
            advice: "raise --max-count or reduce class sizes",
        });
    }
    let partition = lift_partition(class_sizes)?;
    let (slots, choices): (Vec<Slot>, Vec<Vec<Vec<u32>>>) = slots(quotient, &partition)
        .into_iter()
        .map(|(slot, i)| {
            let k = partition.class_of(slot.columns.start);
            let total = quotient.multiplicities(slot.sign)[(i, k)];
            let c = compositions(total, slot.columns.len());
            (slot, c)
        })
        .unzip();
    let odometer = Odometer::new(choices.iter().map(Vec::len).collect());
    Ok(MultLiftMultiplicities {
        n: partition.n(),
        slots,
        choices,
        odometer,
        count,
    })
}

/// Nonzero positions of the lift's weight matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportPattern {
    pub plus: Matrix<bool>,
    pub minus: Matrix<bool>,
}

impl SupportPattern {
    pub fn get(&self, sign: Sign) -> &Matrix<bool> {
        match sign {
            Sign::Activation => &self.plus,
            Sign::Repression => &self.minus,
        }
    }
}

/// Streams every SUM support pattern: each block row with `q±_ik > 0`
/// picks a nonempty subset of its columns, the others stay empty.
#[derive(Clone, Debug)]
pub struct SumSupports {
    n: usize,
    slots: Vec<Slot>,
    odometer: Odometer,
    count: u128,
}

impl SumSupports {
    pub fn count_total(&self) -> u128 {
        self.count
    }
}

impl Iterator for SumSupports {
    type Item = SupportPattern;

    fn next(&mut self) -> Option<SupportPattern> {
        let digits = self.odometer.next()?;
        let mut pattern = SupportPattern {
            plus: Matrix::filled(self.n, false),
            minus: Matrix::filled(self.n, false),
        };
        for (slot, d) in self.slots.iter().zip(digits) {
            let mask = d + 1;
            let target = match slot.sign {
                Sign::Activation => &mut pattern.plus,
                Sign::Repression => &mut pattern.minus,
            };
            for (bit, col) in slot.columns.clone().enumerate() {
                target[(slot.row, col)] = mask >> bit & 1 == 1;
            }
        }
        Some(pattern)
    }
}

pub fn enumerate_sum_supports(quotient: &GrnNetwork, class_sizes: &[usize], max_count: u128) -> Result<SumSupports> {
    check_sizes(quotient, class_sizes)?;
    let partition = lift_partition(class_sizes)?;
    let mut active = Vec::new();
    let mut radices = Vec::new();
    let mut count: u128 = 1;
    for (slot, i) in slots(quotient, &partition) {
        let k = partition.class_of(slot.columns.start);
        if quotient.weights(slot.sign)[(i, k)] > 0.0 {
            let width = slot.columns.len();
            if width >= usize::BITS as usize - 1 {
                count = u128::MAX;
                break;
            }
            let subsets = (1usize << width) - 1;
            count = count.saturating_mul(subsets as u128);
            radices.push(subsets);
            active.push(slot);
        }
    }
    if count > max_count {
        return Err(GrnError::SizeCap {
            what: "support pattern enumeration",
            size: count,
            cap: max_count,
            advice: "raise --max-count or reduce class sizes",
        });
    }
    Ok(SumSupports {
        n: partition.n(),
        slots: active,
        odometer: Odometer::new(radices),
        count,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SupportChoice {
    /// Every column of every required block row.
    Full,
    /// Only the first column of each required block row.
    FirstOnly,
    Explicit(SupportPattern),
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightFill {
    /// SUM: the block weight split equally; MULT: equal factors of the row product.
    Uniform,
    /// Positive draws rescaled to meet the constraints.
    Random,
    /// Weights given in full; they are checked, not adjusted.
    Explicit { plus: Matrix<f64>, minus: Matrix<f64> },
}

fn lift_skeleton(quotient: &GrnNetwork, partition: &GenePartition) -> GrnNetwork {
    let internal = partition
        .labels()
        .iter()
        .map(|&k| quotient.internal()[k])
        .collect();
    GrnNetwork::new(internal)
}

const RANDOM_RANGE: (f64, f64) = (0.1, 1.0);

fn draw<R: Rng>(rng: &mut R) -> f64 {
    // (0.1, 1]
    RANDOM_RANGE.1 - rng.gen::<f64>() * (RANDOM_RANGE.1 - RANDOM_RANGE.0)
}

/// Builds a SUM lift of `quotient` with the given class sizes.
pub fn build_sum_lift(
    quotient: &GrnNetwork,
    class_sizes: &[usize],
    support: &SupportChoice,
    fill: &WeightFill,
    seed: u64,
) -> Result<GrnNetwork> {
    quotient.ensure_valid()?;
    check_sizes(quotient, class_sizes)?;
    let partition = lift_partition(class_sizes)?;
    let n = partition.n();
    if let SupportChoice::Explicit(p) = support {
        if p.plus.n() != n || p.minus.n() != n {
            return Err(GrnError::DimensionMismatch {
                expected: n,
                actual: p.plus.n(),
            });
        }
    }
    if let WeightFill::Explicit { plus, minus } = fill {
        if plus.n() != n || minus.n() != n {
            return Err(GrnError::DimensionMismatch {
                expected: n,
                actual: plus.n(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lift = lift_skeleton(quotient, &partition);
    for (slot, i) in slots(quotient, &partition) {
        let k = partition.class_of(slot.columns.start);
        let q = quotient.weights(slot.sign)[(i, k)];
        let param = quotient.params(slot.sign)[(i, k)];
        let columns: Vec<usize> = match (fill, support) {
            (WeightFill::Explicit { plus, minus }, _) => {
                let w = if slot.sign == Sign::Activation { plus } else { minus };
                slot.columns.clone().filter(|&c| w[(slot.row, c)] != 0.0).collect()
            }
            (_, SupportChoice::Full) if q > 0.0 => slot.columns.clone().collect(),
            (_, SupportChoice::FirstOnly) if q > 0.0 => vec![slot.columns.start],
            (_, SupportChoice::Explicit(p)) => slot.columns.clone().filter(|&c| p.get(slot.sign)[(slot.row, c)]).collect(),
            _ => Vec::new(),
        };
        let where_ = || {
            format!(
                "W{} block row of gene {} from class {}",
                crate::model::sign_symbol(slot.sign),
                slot.row + 1,
                k + 1
            )
        };
        if q > 0.0 && columns.is_empty() {
            return Err(GrnError::Constraint(format!("{}: empty support but quotient weight {q}", where_())));
        }
        if q == 0.0 && !columns.is_empty() {
            return Err(GrnError::Constraint(format!("{}: quotient weight is zero but support is not empty", where_())));
        }
        if columns.is_empty() {
            continue;
        }
        let weights: Vec<f64> = match fill {
            WeightFill::Uniform => vec![q / columns.len() as f64; columns.len()],
            WeightFill::Random => {
                let raw: Vec<f64> = columns.iter().map(|_| draw(&mut rng)).collect();
                let total: f64 = raw.iter().sum();
                raw.iter().map(|r| r * q / total).collect()
            }
            WeightFill::Explicit { plus, minus } => {
                let w = if slot.sign == Sign::Activation { plus } else { minus };
                let ws: Vec<f64> = columns.iter().map(|&c| w[(slot.row, c)]).collect();
                let sum: f64 = ws.iter().sum();
                if !Tolerance::default().sums_close(sum, q) {
                    return Err(GrnError::Constraint(format!("{}: weights sum to {sum}, expected {q}", where_())));
                }
                ws
            }
        };
        for (&c, &w) in columns.iter().zip(&weights) {
            lift.set_edge(slot.sign, c, slot.row, w, 1);
            lift.set_param(slot.sign, c, slot.row, param);
        }
    }
    lift.ensure_valid()?;
    Ok(lift)
}

/// Builds a MULT lift of `quotient` carrying the multiplicities `mults`.
pub fn build_mult_lift(
    quotient: &GrnNetwork,
    class_sizes: &[usize],
    mults: &MultiplicityPair,
    fill: &WeightFill,
    seed: u64,
) -> Result<GrnNetwork> {
    quotient.ensure_valid()?;
    check_sizes(quotient, class_sizes)?;
    let partition = lift_partition(class_sizes)?;
    let n = partition.n();
    for m in [&mults.0, &mults.1] {
        if m.n() != n {
            return Err(GrnError::DimensionMismatch { expected: n, actual: m.n() });
        }
    }
    let mut lift = lift_skeleton(quotient, &partition);
    for (slot, i) in slots(quotient, &partition) {
        let k = partition.class_of(slot.columns.start);
        let m = if slot.sign == Sign::Activation { &mults.0 } else { &mults.1 };
        let sum: u32 = slot.columns.clone().map(|c| m[(slot.row, c)]).sum();
        let required = quotient.multiplicities(slot.sign)[(i, k)];
        if sum != required {
            return Err(GrnError::Constraint(format!(
                "M{} block row of gene {} from class {} sums to {sum}, expected {required}",
                crate::model::sign_symbol(slot.sign),
                slot.row + 1,
                k + 1
            )));
        }
        let param = quotient.params(slot.sign)[(i, k)];
        for c in slot.columns.clone().filter(|&c| m[(slot.row, c)] > 0) {
            lift.set_edge(slot.sign, c, slot.row, 1.0, m[(slot.row, c)]);
            lift.set_param(slot.sign, c, slot.row, param);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for row in 0..n {
        let positions: Vec<(Sign, usize)> = Sign::BOTH
            .iter()
            .flat_map(|&s| (0..n).map(move |c| (s, c)))
            .filter(|&(s, c)| lift.multiplicities(s)[(row, c)] > 0)
            .collect();
        if positions.is_empty() {
            continue;
        }
        let product = quotient.row_weight_product(partition.class_of(row));
        let k = positions.len() as f64;
        let values: Vec<f64> = match fill {
            WeightFill::Uniform => vec![product.powf(1.0 / k); positions.len()],
            WeightFill::Random => {
                let raw: Vec<f64> = positions.iter().map(|_| draw(&mut rng)).collect();
                let scale = (product / raw.iter().product::<f64>()).powf(1.0 / k);
                raw.iter().map(|r| r * scale).collect()
            }
            WeightFill::Explicit { plus, minus } => {
                let vals: Vec<f64> = positions
                    .iter()
                    .map(|&(s, c)| if s == Sign::Activation { plus[(row, c)] } else { minus[(row, c)] })
                    .collect();
                let got: f64 = vals.iter().product();
                if !Tolerance::default().products_close(got, product) {
                    return Err(GrnError::Constraint(format!(
                        "row {} weight product is {got}, expected {product}",
                        row + 1
                    )));
                }
                vals
            }
        };
        for (&(s, c), &w) in positions.iter().zip(&values) {
            lift.weights_mut(s)[(row, c)] = w;
        }
    }
    lift.ensure_valid()?;
    Ok(lift)
}

/// Per block row of the lift, the requirement it must meet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockConstraint {
    pub sign: Sign,
    /// 1-based lift gene.
    pub row: usize,
    /// 1-based quotient gene whose lift genes form the block columns.
    pub source_class: usize,
    /// 1-based lift genes of the block.
    pub columns: Vec<usize>,
    /// SUM: required weight sum of the block row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_sum: Option<f64>,
    /// MULT: required multiplicity sum of the block row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_sum: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowProductRequirement {
    /// 1-based lift gene.
    pub row: usize,
    pub product: f64,
}

/// Constraint system describing every lift of a quotient for given class sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftTemplate {
    pub model: ModelKind,
    pub class_sizes: Vec<usize>,
    pub partition: GenePartition,
    pub quotient: NetworkDocument,
    /// Block rows with a nonzero requirement; all other block rows are zero.
    pub blocks: Vec<BlockConstraint>,
    /// MULT only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_products: Vec<RowProductRequirement>,
    /// MULT only: number of multiplicity pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_choices: Option<String>,
}

impl LiftTemplate {
    pub fn new(quotient: &GrnNetwork, class_sizes: &[usize], model: ModelKind) -> Result<Self> {
        check_sizes(quotient, class_sizes)?;
        let partition = lift_partition(class_sizes)?;
        let mult = model.is_multiplicative();
        let mut blocks = Vec::new();
        for (slot, i) in slots(quotient, &partition) {
            let k = partition.class_of(slot.columns.start);
            let w = quotient.weights(slot.sign)[(i, k)];
            let m = quotient.multiplicities(slot.sign)[(i, k)];
            if (mult && m > 0) || (!mult && w > 0.0) {
                blocks.push(BlockConstraint {
                    sign: slot.sign,
                    row: slot.row + 1,
                    source_class: k + 1,
                    columns: slot.columns.clone().map(|c| c + 1).collect(),
                    weight_sum: (!mult).then_some(w),
                    multiplicity_sum: mult.then_some(m),
                });
            }
        }
        let row_products = if mult {
            (0..partition.n())
                .filter(|&r| quotient.has_inputs(partition.class_of(r)))
                .map(|r| RowProductRequirement {
                    row: r + 1,
                    product: quotient.row_weight_product(partition.class_of(r)),
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            model,
            class_sizes: class_sizes.to_vec(),
            partition,
            quotient: NetworkDocument::from_network(quotient, None),
            blocks,
            row_products,
            multiplicity_choices: mult.then(|| mult_lift_count(quotient, class_sizes).map(|c| c.to_string())).transpose()?,
        })
    }

    /// Whether `lift` meets every constraint of the template (weights for
    /// SUM; multiplicities and row products for MULT). Internal dynamics
    /// and parameters are not part of the template.
    pub fn admits(&self, lift: &GrnNetwork) -> bool {
        let n = self.partition.n();
        if lift.n() != n {
            return false;
        }
        let tol = Tolerance::default();
        let mult = self.model.is_multiplicative();
        let required = |sign: Sign, row: usize, k: usize| {
            self.blocks
                .iter()
                .find(|b| b.sign == sign && b.row == row + 1 && b.source_class == k + 1)
        };
        for sign in Sign::BOTH {
            for row in 0..n {
                for k in 0..self.partition.num_classes() {
                    let cols = self.partition.class(k);
                    let block = required(sign, row, k);
                    if mult {
                        let got: u32 = cols.iter().map(|&c| lift.multiplicities(sign)[(row, c)]).sum();
                        if got != block.and_then(|b| b.multiplicity_sum).unwrap_or(0) {
                            return false;
                        }
                    } else {
                        let got: f64 = cols.iter().map(|&c| lift.weights(sign)[(row, c)]).sum();
                        if !tol.sums_close(got, block.and_then(|b| b.weight_sum).unwrap_or(0.0)) {
                            return false;
                        }
                    }
                }
            }
        }
        if mult {
            for row in 0..n {
                let expected = self.row_products.iter().find(|r| r.row == row + 1).map_or(0.0, |r| r.product);
                if !tol.products_close(lift.row_weight_product(row), expected) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftCertificate {
    pub certified: bool,
    pub witnesses: Vec<Witness>,
    /// Mismatches between the induced quotient and the given one.
    pub mismatches: Vec<String>,
}

/// Checks that `partition` is a synchrony partition of `lift` and that the
/// induced quotient (class `k` ↦ quotient gene `k`) matches `quotient`:
/// exact weights under SUM, multiplicities and row products under MULT.
pub fn certify_lift(lift: &GrnNetwork, quotient: &GrnNetwork, partition: &GenePartition, model: ModelKind) -> LiftCertificate {
    let mut mismatches = Vec::new();
    if partition.n() != lift.n() || partition.num_classes() != quotient.n() {
        mismatches.push(format!(
            "shape: lift has {} genes, partition {} genes in {} classes, quotient {} genes",
            lift.n(),
            partition.n(),
            partition.num_classes(),
            quotient.n()
        ));
        return LiftCertificate {
            certified: false,
            witnesses: Vec::new(),
            mismatches,
        };
    }
    let checker = SynchronyChecker::new(lift);
    let verdict = match checker.check(partition, model) {
        Ok(v) => v,
        Err(e) => {
            mismatches.push(e.to_string());
            return LiftCertificate {
                certified: false,
                witnesses: Vec::new(),
                mismatches,
            };
        }
    };
    if !verdict.is_synchrony {
        return LiftCertificate {
            certified: false,
            witnesses: verdict.witnesses,
            mismatches,
        };
    }
    let induced = match crate::synchrony::quotient(&checker, partition, model) {
        Ok(q) => q.quotient,
        Err(e) => {
            mismatches.push(e.to_string());
            return LiftCertificate {
                certified: false,
                witnesses: Vec::new(),
                mismatches,
            };
        }
    };
    let tol = checker.tolerance();
    let m = quotient.n();
    for k in 0..m {
        if induced.internal()[k] != quotient.internal()[k] {
            mismatches.push(format!("gene {}: internal dynamics differ", k + 1));
        }
    }
    for sign in Sign::BOTH {
        let s = crate::model::sign_symbol(sign);
        for i in 0..m {
            for k in 0..m {
                if model.is_multiplicative() {
                    let (a, b) = (induced.multiplicities(sign)[(i, k)], quotient.multiplicities(sign)[(i, k)]);
                    if a != b {
                        mismatches.push(format!("N{s}[{},{}]: lift gives {a}, quotient has {b}", i + 1, k + 1));
                    }
                } else {
                    let (a, b) = (induced.weights(sign)[(i, k)], quotient.weights(sign)[(i, k)]);
                    if !tol.sums_close(a, b) {
                        mismatches.push(format!("Q{s}[{},{}]: lift gives {a}, quotient has {b}", i + 1, k + 1));
                    }
                }
                let present = quotient.weights(sign)[(i, k)] > 0.0;
                if present && induced.params(sign)[(i, k)] != quotient.params(sign)[(i, k)] {
                    mismatches.push(format!("{s} edge {} -> {}: parameters differ", k + 1, i + 1));
                }
            }
        }
    }
    if model.is_multiplicative() {
        for i in 0..m {
            let (a, b) = (induced.row_weight_product(i), quotient.row_weight_product(i));
            if !tol.products_close(a, b) {
                mismatches.push(format!("row {} weight product: lift gives {a}, quotient has {b}", i + 1));
            }
        }
    }
    LiftCertificate {
        certified: mismatches.is_empty(),
        witnesses: Vec::new(),
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::model::InternalDynamics;
    use crate::synchrony::{is_mult_synchrony, is_sum_synchrony, mult_quotient, sum_quotient};
    use proptest::prelude::*;

    fn one_gene_self_activation(mult: u32) -> GrnNetwork {
        let mut q = GrnNetwork::new(vec![InternalDynamics::one_dim(1.0)]);
        q.set_edge(Sign::Activation, 0, 0, 1.0, mult);
        q
    }

    #[test]
    fn compositions_in_order() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(compositions(3, 1), vec![vec![3]]);
        for (t, s) in [(0, 1), (2, 3), (4, 2), (5, 4)] {
            assert_eq!(compositions(t, s).len() as u128, composition_count(t, s));
        }
    }

    #[test]
    fn duplicated_single_multiplicity_gives_four() {
        let q = one_gene_self_activation(1);
        let all: Vec<_> = enumerate_mult_lift_multiplicities(&q, &[2], DEFAULT_MAX_LIFTS).unwrap().collect();
        assert_eq!(all.len(), 4);
        // brute force over 2x2 matrices with entries 0..=1 and both row sums one
        let mut brute = 0;
        for bits in 0u32..16 {
            let m: Vec<u32> = (0..4).map(|b| bits >> b & 1).collect();
            if m[0] + m[1] == 1 && m[2] + m[3] == 1 {
                brute += 1;
                let mat = Matrix::from_rows(&[vec![m[0], m[1]], vec![m[2], m[3]]]);
                assert!(all.iter().any(|(p, _)| p == &mat));
            }
        }
        assert_eq!(brute, 4);
        assert!(all.iter().all(|(_, minus)| minus == &Matrix::zeros(2)));
    }

    #[test]
    fn four_gene_quotient_lift_count() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let q = mult_quotient(&net, &GenePartition::parse("1,2|3|4", 4).unwrap()).unwrap().quotient;
        let sizes = [2, 1, 1];
        let pairs: Vec<_> = enumerate_mult_lift_multiplicities(&q, &sizes, DEFAULT_MAX_LIFTS).unwrap().collect();
        // M⁺ block rows: 3 compositions each, two rows; M⁻ blocks have a single choice
        // except rows 3 and 4 whose input from class 1 splits over two columns
        assert_eq!(pairs.len() as u128, mult_lift_count(&q, &sizes).unwrap());
        assert_eq!(pairs.len(), 9 * 2 * 2);
        let ones = Matrix::from_rows(&[vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0; 4], vec![0; 4]]);
        assert!(pairs.iter().any(|(p, m)| p == &ones && m == net.m_minus()));
        for w in pairs.windows(2) {
            let key = |p: &MultiplicityPair| [p.0.as_slice().to_vec(), p.1.as_slice().to_vec()].concat();
            assert!(key(&w[0]) < key(&w[1]));
        }
    }

    #[test]
    fn count_cap() {
        let q = one_gene_self_activation(6);
        let err = enumerate_mult_lift_multiplicities(&q, &[5], 100).unwrap_err();
        match err {
            GrnError::SizeCap { size, .. } => assert_eq!(size, 210u128.pow(5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn repressilator_duplication() {
        let rep = bundled::network("repressilator3").unwrap();
        let alpha = rep.w_minus()[(0, 2)];
        let lift = build_sum_lift(&rep, &[1, 1, 2], &SupportChoice::Full, &WeightFill::Uniform, 0).unwrap();
        assert_eq!(lift.w_minus()[(0, 2)], alpha / 2.0);
        assert_eq!(lift.w_minus()[(0, 3)], alpha / 2.0);
        assert_eq!(lift, bundled::network("repressilator4-lift").unwrap());
        let part = lift_partition(&[1, 1, 2]).unwrap();
        assert!(certify_lift(&lift, &rep, &part, ModelKind::Sum).certified);
    }

    #[test]
    fn unit_sizes_reproduce_quotient() {
        for name in ["ex31-five-gene", "ex36-funny", "repressilator3"] {
            let net = bundled::network(name).unwrap();
            let sizes = vec![1; net.n()];
            let lift = build_sum_lift(&net, &sizes, &SupportChoice::Full, &WeightFill::Uniform, 0).unwrap();
            assert_eq!(lift, net, "{name}");
        }
        let net = bundled::network("ex39-four-gene").unwrap();
        let sizes = vec![1; 4];
        let mults = (net.m_plus().clone(), net.m_minus().clone());
        let lift = build_mult_lift(&net, &sizes, &mults, &WeightFill::Uniform, 0).unwrap();
        assert_eq!(lift.m_plus(), net.m_plus());
        for (a, b) in lift.row_weight_products().iter().zip(net.row_weight_products()) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
        let explicit = WeightFill::Explicit {
            plus: net.w_plus().clone(),
            minus: net.w_minus().clone(),
        };
        assert_eq!(build_mult_lift(&net, &sizes, &mults, &explicit, 0).unwrap(), net);
    }

    #[test]
    fn five_gene_family_stays_synchronous() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let part = GenePartition::parse("1,2,3|4,5", 5).unwrap();
        let q = sum_quotient(&net, &part).unwrap().quotient;
        for seed in 0..20 {
            let lift = build_sum_lift(&q, &[3, 2], &SupportChoice::Full, &WeightFill::Random, seed).unwrap();
            assert!(is_sum_synchrony(&lift, &part).unwrap().is_synchrony);
            for r in 0..3 {
                assert!((lift.w_minus()[(r, 3)] + lift.w_minus()[(r, 4)] - 9.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_support_is_rejected() {
        let q = one_gene_self_activation(1);
        let pattern = SupportPattern {
            plus: Matrix::from_rows(&[vec![true, false], vec![false, false]]),
            minus: Matrix::filled(2, false),
        };
        let err = build_sum_lift(&q, &[2], &SupportChoice::Explicit(pattern), &WeightFill::Uniform, 0).unwrap_err();
        assert!(matches!(err, GrnError::Constraint(_)), "{err}");
    }

    #[test]
    fn supports_enumeration() {
        let q = one_gene_self_activation(1);
        let all: Vec<_> = enumerate_sum_supports(&q, &[2], 1000).unwrap().collect();
        assert_eq!(all.len(), 9);
        for s in &all {
            build_sum_lift(&q, &[2], &SupportChoice::Explicit(s.clone()), &WeightFill::Uniform, 0).unwrap();
        }
    }

    #[test]
    fn section_four_mult_lift() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let q = mult_quotient(&net, &GenePartition::parse("1,2|3|4", 4).unwrap()).unwrap().quotient;
        let part = lift_partition(&[2, 1, 1]).unwrap();
        assert!(certify_lift(&net, &q, &part, ModelKind::Mult).certified);
        let mults = (net.m_plus().clone(), net.m_minus().clone());
        for seed in 0..10 {
            let lift = build_mult_lift(&q, &[2, 1, 1], &mults, &WeightFill::Random, seed).unwrap();
            for r in 0..2 {
                assert!((lift.row_weight_product(r) / 9.0 - 1.0).abs() < 1e-12);
            }
            assert!(is_mult_synchrony(&lift, &part).unwrap().is_synchrony);
            assert!(certify_lift(&lift, &q, &part, ModelKind::Mult).certified);
        }
    }

    #[test]
    fn perturbed_lift_fails_with_witness() {
        let rep = bundled::network("repressilator3").unwrap();
        let mut lift = bundled::network("repressilator4-lift").unwrap();
        lift.weights_mut(Sign::Repression)[(2, 1)] += 0.1;
        let cert = certify_lift(&lift, &rep, &lift_partition(&[1, 1, 2]).unwrap(), ModelKind::Sum);
        assert!(!cert.certified);
        assert!(!cert.witnesses.is_empty());

        let mut lift = bundled::network("repressilator4-lift").unwrap();
        lift.weights_mut(Sign::Repression)[(1, 0)] += 0.1;
        let cert = certify_lift(&lift, &rep, &lift_partition(&[1, 1, 2]).unwrap(), ModelKind::Sum);
        assert!(!cert.certified && cert.witnesses.is_empty() && !cert.mismatches.is_empty());
    }

    #[test]
    fn template_describes_blocks() {
        let rep = bundled::network("repressilator3").unwrap();
        let t = LiftTemplate::new(&rep, &[1, 1, 2], ModelKind::Sum).unwrap();
        assert_eq!(t.blocks.len(), 4);
        let b = t.blocks.iter().find(|b| b.row == 1).unwrap();
        assert_eq!(b.columns, vec![3, 4]);
        assert!(t.admits(&bundled::network("repressilator4-lift").unwrap()));
        let json = serde_json::to_string(&t).unwrap();
        let back: LiftTemplate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    proptest! {
        #[test]
        fn built_lifts_certify(seed in 0u64..1000, sizes in proptest::collection::vec(1usize..3, 3)) {
            let net = bundled::network("ex39-four-gene").unwrap();
            let q = mult_quotient(&net, &GenePartition::parse("1,2|3|4", 4).unwrap()).unwrap().quotient;
            let part = lift_partition(&sizes).unwrap();
            let pairs: Vec<_> = enumerate_mult_lift_multiplicities(&q, &sizes, DEFAULT_MAX_LIFTS).unwrap().collect();
            let pick = &pairs[seed as usize % pairs.len()];
            let lift = build_mult_lift(&q, &sizes, pick, &WeightFill::Random, seed).unwrap();
            prop_assert!(certify_lift(&lift, &q, &part, ModelKind::Mult).certified);

            let sq = sum_quotient(&net, &GenePartition::singletons(4)).unwrap().quotient;
            let sum_sizes = [sizes[0], sizes[1], sizes[2], 1];
            let lift = build_sum_lift(&sq, &sum_sizes, &SupportChoice::Full, &WeightFill::Random, seed).unwrap();
            prop_assert!(certify_lift(&lift, &sq, &lift_partition(&sum_sizes).unwrap(), ModelKind::Sum).certified);
        }
    }
}
