//! Gene regulatory network data model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GrnError, Result};
use crate::matrix::Matrix;
use crate::partition::GenePartition;

/// Linear internal dynamics of one gene, plus an optional constant basal
/// transcription term entering the first coordinate.
///
/// Two genes have the same internal dynamics iff every field is bit-for-bit
/// equal; no tolerance is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalDynamics {
    /// mRNA/protein pair: `m' = -a m + basal + drive`, `p' = d m - c p`.
    TwoDim { a: f64, c: f64, d: f64, basal: f64 },
    /// Scalar concentration: `x' = -decay x + basal + drive`.
    OneDim { decay: f64, basal: f64 },
}

impl InternalDynamics {
    pub fn two_dim(a: f64, c: f64, d: f64) -> Self {
        Self::TwoDim { a, c, d, basal: 0.0 }
    }

    pub fn one_dim(decay: f64) -> Self {
        Self::OneDim { decay, basal: 0.0 }
    }

    pub fn with_basal(self, basal: f64) -> Self {
        match self {
            Self::TwoDim { a, c, d, .. } => Self::TwoDim { a, c, d, basal },
            Self::OneDim { decay, .. } => Self::OneDim { decay, basal },
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Self::TwoDim { .. } => NodeKind::Two,
            Self::OneDim { .. } => NodeKind::One,
        }
    }

    pub fn basal(&self) -> f64 {
        match *self {
            Self::TwoDim { basal, .. } | Self::OneDim { basal, .. } => basal,
        }
    }

    fn rates(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::TwoDim { a, c, d, .. } => vec![("a", a), ("c", c), ("d", d)],
            Self::OneDim { decay, .. } => vec![("decay", decay)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Two,
    One,
}

impl NodeKind {
    pub fn dim(self) -> usize {
        match self {
            NodeKind::Two => 2,
            NodeKind::One => 1,
        }
    }
}

/// How regulatory inputs are combined into a gene's drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sum,
    Mult,
    /// MULT with every nonzero multiplicity equal to one.
    Prod,
}

impl ModelKind {
    pub fn is_multiplicative(self) -> bool {
        matches!(self, ModelKind::Mult | ModelKind::Prod)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sum => "sum",
            ModelKind::Mult => "mult",
            ModelKind::Prod => "prod",
        })
    }
}

impl FromStr for ModelKind {
    type Err = GrnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(ModelKind::Sum),
            "mult" => Ok(ModelKind::Mult),
            "prod" => Ok(ModelKind::Prod),
            other => Err(GrnError::Format(format!("unknown model '{other}'"))),
        }
    }
}

/// Activation (`+`) or repression (`-`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Activation,
    Repression,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Activation, Sign::Repression];
}

/// A gene regulatory network.
///
/// Matrices are indexed `(target, source)`. Per-edge regulatory parameters
/// override the regulatory family's global parameter on that edge (Hill
/// threshold, circadian activation fold or repression parameter).
#[derive(Clone, Debug, PartialEq)]
pub struct GrnNetwork {
    internal: Vec<InternalDynamics>,
    w_plus: Matrix<f64>,
    w_minus: Matrix<f64>,
    m_plus: Matrix<u32>,
    m_minus: Matrix<u32>,
    param_plus: Matrix<Option<f64>>,
    param_minus: Matrix<Option<f64>>,
}

impl GrnNetwork {
    /// A network with the given genes and no edges.
    pub fn new(internal: Vec<InternalDynamics>) -> Self {
        let n = internal.len();
        Self {
            internal,
            w_plus: Matrix::zeros(n),
            w_minus: Matrix::zeros(n),
            m_plus: Matrix::zeros(n),
            m_minus: Matrix::zeros(n),
            param_plus: Matrix::filled(n, None),
            param_minus: Matrix::filled(n, None),
        }
    }

    pub fn from_matrices(
        internal: Vec<InternalDynamics>,
        w_plus: Matrix<f64>,
        w_minus: Matrix<f64>,
        m_plus: Matrix<u32>,
        m_minus: Matrix<u32>,
    ) -> Result<Self> {
        let n = internal.len();
        for actual in [w_plus.n(), w_minus.n(), m_plus.n(), m_minus.n()] {
            if actual != n {
                return Err(GrnError::DimensionMismatch { expected: n, actual });
            }
        }
        Ok(Self {
            internal,
            w_plus,
            w_minus,
            m_plus,
            m_minus,
            param_plus: Matrix::filled(n, None),
            param_minus: Matrix::filled(n, None),
        })
    }

    /// Weights only; every present edge gets multiplicity one.
    pub fn from_weights(
        internal: Vec<InternalDynamics>,
        w_plus: Matrix<f64>,
        w_minus: Matrix<f64>,
    ) -> Result<Self> {
        let m_plus = w_plus.map(|&w| u32::from(w != 0.0));
        let m_minus = w_minus.map(|&w| u32::from(w != 0.0));
        Self::from_matrices(internal, w_plus, w_minus, m_plus, m_minus)
    }

    /// Sets the edge `from → to` (0-based) of the given sign.
    pub fn set_edge(&mut self, sign: Sign, from: usize, to: usize, weight: f64, mult: u32) {
        match sign {
            Sign::Activation => {
                self.w_plus[(to, from)] = weight;
                self.m_plus[(to, from)] = mult;
            }
            Sign::Repression => {
                self.w_minus[(to, from)] = weight;
                self.m_minus[(to, from)] = mult;
            }
        }
    }

    pub fn set_param(&mut self, sign: Sign, from: usize, to: usize, param: Option<f64>) {
        match sign {
            Sign::Activation => self.param_plus[(to, from)] = param,
            Sign::Repression => self.param_minus[(to, from)] = param,
        }
    }

    pub fn n(&self) -> usize {
        self.internal.len()
    }

    pub fn internal(&self) -> &[InternalDynamics] {
        &self.internal
    }

    pub fn internal_mut(&mut self) -> &mut [InternalDynamics] {
        &mut self.internal
    }

    /// Node kind of the network; `None` for an empty or mixed network.
    pub fn node_kind(&self) -> Option<NodeKind> {
        let first = self.internal.first()?.kind();
        self.internal
            .iter()
            .all(|d| d.kind() == first)
            .then_some(first)
    }

    /// State coordinates per gene (2 for mRNA/protein, 1 for scalar).
    pub fn node_dim(&self) -> usize {
        self.node_kind().map_or(2, NodeKind::dim)
    }

    pub fn weights(&self, sign: Sign) -> &Matrix<f64> {
        match sign {
            Sign::Activation => &self.w_plus,
            Sign::Repression => &self.w_minus,
        }
    }

    pub fn weights_mut(&mut self, sign: Sign) -> &mut Matrix<f64> {
        match sign {
            Sign::Activation => &mut self.w_plus,
            Sign::Repression => &mut self.w_minus,
        }
    }

    pub fn multiplicities(&self, sign: Sign) -> &Matrix<u32> {
        match sign {
            Sign::Activation => &self.m_plus,
            Sign::Repression => &self.m_minus,
        }
    }

    pub fn multiplicities_mut(&mut self, sign: Sign) -> &mut Matrix<u32> {
        match sign {
            Sign::Activation => &mut self.m_plus,
            Sign::Repression => &mut self.m_minus,
        }
    }

    pub fn params(&self, sign: Sign) -> &Matrix<Option<f64>> {
        match sign {
            Sign::Activation => &self.param_plus,
            Sign::Repression => &self.param_minus,
        }
    }

    pub fn params_mut(&mut self, sign: Sign) -> &mut Matrix<Option<f64>> {
        match sign {
            Sign::Activation => &mut self.param_plus,
            Sign::Repression => &mut self.param_minus,
        }
    }

    pub fn w_plus(&self) -> &Matrix<f64> {
        &self.w_plus
    }

    pub fn w_minus(&self) -> &Matrix<f64> {
        &self.w_minus
    }

    pub fn m_plus(&self) -> &Matrix<u32> {
        &self.m_plus
    }

    pub fn m_minus(&self) -> &Matrix<u32> {
        &self.m_minus
    }

    /// Sources of gene `i` with a nonzero weight of the given sign.
    pub fn inputs(&self, sign: Sign, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.weights(sign)
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j)
    }

    pub fn has_inputs(&self, i: usize) -> bool {
        Sign::BOTH.iter().any(|&s| self.inputs(s, i).next().is_some())
    }

    /// Product of the nonzero entries of row `i` across both weight
    /// matrices; zero for a gene without inputs. This is the diagonal of the
    /// combined MULT weight matrix.
    pub fn row_weight_product(&self, i: usize) -> f64 {
        let mut any = false;
        let mut prod = 1.0;
        for sign in Sign::BOTH {
            for &w in self.weights(sign).row(i) {
                if w > 0.0 {
                    any = true;
                    prod *= w;
                }
            }
        }
        if any {
            prod
        } else {
            0.0
        }
    }

    /// `row_weight_product` for every gene.
    pub fn row_weight_products(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.row_weight_product(i)).collect()
    }

    /// Checks every structural invariant; empty iff the network is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GrnError::InvalidNetwork(v))
        }
    }

    /// PROD networks are MULT networks whose nonzero multiplicities all equal one.
    pub fn ensure_prod(&self) -> Result<()> {
        for sign in Sign::BOTH {
            if let Some((i, j, m)) = self.multiplicities(sign).entries().find(|(_, _, &m)| m > 1) {
                return Err(GrnError::Constraint(format!(
                    "PROD model requires unit multiplicities, but m{}[{},{}] = {m}",
                    sign_symbol(sign),
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Coarsest partition grouping genes with identical internal dynamics.
    pub fn gene_equivalence_partition(&self) -> GenePartition {
        GenePartition::from_labels(&self.internal)
    }
}

pub(crate) fn sign_symbol(sign: Sign) -> &'static str {
    match sign {
        Sign::Activation => "+",
        Sign::Repression => "-",
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    PositiveRate,
    NonNegativeBasal,
    HomogeneousKind,
    NonNegativeWeight,
    SupportConsistency,
    ParameterOnAbsentEdge,
    InvalidParameter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// `internal`, `w_plus`, `w_minus`, `m_plus`, `m_minus`, `param_plus` or `param_minus`.
    pub matrix: String,
    /// 1-based `(target, source)`, or `(gene, 0)` for internal dynamics.
    pub entry: Option<(usize, usize)>,
    pub rule: Rule,
    pub message: String,
}

fn matrix_name(prefix: &str, sign: Sign) -> String {
    match sign {
        Sign::Activation => format!("{prefix}_plus"),
        Sign::Repression => format!("{prefix}_minus"),
    }
}

pub fn validate(net: &GrnNetwork) -> Vec<Violation> {
    let mut out = Vec::new();
    let kind = net.internal.first().map(InternalDynamics::kind);
    for (g, dynamics) in net.internal.iter().enumerate() {
        for (name, rate) in dynamics.rates() {
            if !(rate.is_finite() && rate > 0.0) {
                out.push(Violation {
                    matrix: "internal".into(),
                    entry: Some((g + 1, 0)),
                    rule: Rule::PositiveRate,
                    message: format!("gene {}: rate {name} = {rate} must be positive", g + 1),
                });
            }
        }
        let basal = dynamics.basal();
        if !(basal.is_finite() && basal >= 0.0) {
            out.push(Violation {
                matrix: "internal".into(),
                entry: Some((g + 1, 0)),
                rule: Rule::NonNegativeBasal,
                message: format!("gene {}: basal = {basal} must be nonnegative", g + 1),
            });
        }
        if Some(dynamics.kind()) != kind {
            out.push(Violation {
                matrix: "internal".into(),
                entry: Some((g + 1, 0)),
                rule: Rule::HomogeneousKind,
                message: format!("gene {}: node dimension differs from gene 1", g + 1),
            });
        }
    }
    for sign in Sign::BOTH {
        let (w, m, p) = (net.weights(sign), net.multiplicities(sign), net.params(sign));
        for (i, j, &wij) in w.entries() {
            let mij = m[(i, j)];
            let at = Some((i + 1, j + 1));
            if !(wij.is_finite() && wij >= 0.0) {
                out.push(Violation {
                    matrix: matrix_name("w", sign),
                    entry: at,
                    rule: Rule::NonNegativeWeight,
                    message: format!("w{}[{},{}] = {wij} must be nonnegative", sign_symbol(sign), i + 1, j + 1),
                });
            }
            if (wij > 0.0) != (mij > 0) {
                out.push(Violation {
                    matrix: matrix_name("m", sign),
                    entry: at,
                    rule: Rule::SupportConsistency,
                    message: format!(
                        "w{s}[{i},{j}] = {wij} but m{s}[{i},{j}] = {mij}: supports must coincide",
                        s = sign_symbol(sign),
                        i = i + 1,
                        j = j + 1
                    ),
                });
            }
            if let Some(param) = p[(i, j)] {
                if wij <= 0.0 {
                    out.push(Violation {
                        matrix: matrix_name("param", sign),
                        entry: at,
                        rule: Rule::ParameterOnAbsentEdge,
                        message: format!("parameter given for absent edge {} -> {}", j + 1, i + 1),
                    });
                }
                if !(param.is_finite() && param >= 0.0) {
                    out.push(Violation {
                        matrix: matrix_name("param", sign),
                        entry: at,
                        rule: Rule::InvalidParameter,
                        message: format!("edge {} -> {}: parameter {param} must be finite and nonnegative", j + 1, i + 1),
                    });
                }
            }
        }
    }
    out
}
