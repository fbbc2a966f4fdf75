//! SUM and MULT vector fields.

use crate::error::{GrnError, Result};
use crate::model::{GrnNetwork, InternalDynamics, ModelKind, Sign};
use crate::regulation::RegulatoryFamily;

#[derive(Clone, Copy, Debug)]
struct Input {
    source: usize,
    sign: Sign,
    weight: f64,
    mult: u32,
    param: Option<f64>,
}

#[derive(Clone, Debug)]
struct Row {
    internal: InternalDynamics,
    inputs: Vec<Input>,
    /// Product of the nonzero weights of the row (MULT prefactor).
    weight_product: f64,
}

/// A network prepared for repeated evaluation of its vector field.
///
/// State layout: `[m1, p1, m2, p2, ...]` for two-dimensional nodes and
/// `[x1, x2, ...]` for one-dimensional ones. The regulatory input of gene
/// `j` is `p_j` or `x_j` respectively. Negative inputs are clamped to zero
/// before the regulatory functions are applied.
#[derive(Clone, Debug)]
pub struct VectorField {
    rows: Vec<Row>,
    dim: usize,
    model: ModelKind,
    family: RegulatoryFamily,
}

impl VectorField {
    pub fn new(net: &GrnNetwork, model: ModelKind, family: &RegulatoryFamily) -> Result<Self> {
        if model == ModelKind::Prod {
            net.ensure_prod()?;
        }
        family.validate()?;
        let n = net.n();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut inputs = Vec::new();
            for sign in Sign::BOTH {
                for j in 0..n {
                    let weight = net.weights(sign)[(i, j)];
                    if weight > 0.0 {
                        let param = net.params(sign)[(i, j)];
                        if let Some(theta) = param {
                            family.check_edge_param(sign, theta)?;
                        }
                        inputs.push(Input {
                            source: j,
                            sign,
                            weight,
                            mult: net.multiplicities(sign)[(i, j)],
                            param,
                        });
                    }
                }
            }
            rows.push(Row {
                internal: net.internal()[i],
                inputs,
                weight_product: net.row_weight_product(i),
            });
        }
        Ok(Self {
            rows,
            dim: net.node_dim(),
            model,
            family: family.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn node_dim(&self) -> usize {
        self.dim
    }

    pub fn state_len(&self) -> usize {
        self.rows.len() * self.dim
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    /// Value of the regulatory input variable of `gene`.
    pub fn input_of(&self, state: &[f64], gene: usize) -> f64 {
        state[gene * self.dim + self.dim - 1]
    }

    /// Regulatory drive entering the first coordinate of gene `i`.
    pub fn drive(&self, state: &[f64], i: usize) -> f64 {
        let row = &self.rows[i];
        let f = |inp: &Input| {
            self.family
                .eval_unchecked(inp.sign, self.input_of(state, inp.source), inp.param)
        };
        match self.model {
            ModelKind::Sum => row.inputs.iter().map(|inp| inp.weight * f(inp)).sum(),
            ModelKind::Mult | ModelKind::Prod => {
                if row.inputs.is_empty() {
                    return 0.0;
                }
                row.inputs
                    .iter()
                    .filter(|inp| inp.mult > 0)
                    .fold(row.weight_product, |acc, inp| acc * f(inp).powi(inp.mult as i32))
            }
        }
    }

    pub fn eval_into(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        let len = self.state_len();
        if state.len() != len {
            return Err(GrnError::DimensionMismatch {
                expected: len,
                actual: state.len(),
            });
        }
        if out.len() != len {
            return Err(GrnError::DimensionMismatch {
                expected: len,
                actual: out.len(),
            });
        }
        self.eval_unchecked(state, out);
        Ok(())
    }

    pub fn eval(&self, state: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.state_len()];
        self.eval_into(state, &mut out)?;
        Ok(out)
    }

    pub(crate) fn eval_unchecked(&self, state: &[f64], out: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            let drive = self.drive(state, i);
            match row.internal {
                InternalDynamics::TwoDim { a, c, d, basal } => {
                    let (m, p) = (state[2 * i], state[2 * i + 1]);
                    out[2 * i] = -a * m + basal + drive;
                    out[2 * i + 1] = d * m - c * p;
                }
                InternalDynamics::OneDim { decay, basal } => {
                    out[i] = -decay * state[i] + basal + drive;
                }
            }
        }
    }
}

/// One-shot evaluation of the vector field at `state`.
pub fn vector_field(
    net: &GrnNetwork,
    model: ModelKind,
    family: &RegulatoryFamily,
    state: &[f64],
) -> Result<Vec<f64>> {
    VectorField::new(net, model, family)?.eval(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use approx::assert_relative_eq;

    #[test]
    fn repressilator_drive_at_zero_repressor() {
        let net = bundled::network("repressilator3").unwrap();
        let InternalDynamics::TwoDim { basal, .. } = net.internal()[0] else {
            panic!()
        };
        let alpha = net.w_minus()[(0, 2)];
        // m1 = 0, p3 = 0: m1' = alpha rep(0) + alpha0
        let state = [0.0, 0.4, 1.0, 2.0, 0.7, 0.0];
        let f = vector_field(&net, ModelKind::Sum, &RegulatoryFamily::default(), &state).unwrap();
        assert_relative_eq!(f[0], alpha + basal, max_relative = 1e-15);
        // m2' = -m2 + alpha/(1+p1^2) + alpha0
        assert_relative_eq!(f[2], -1.0 + alpha / (1.0 + 0.16) + basal, max_relative = 1e-14);
    }

    #[test]
    fn two_input_product() {
        // gene 1 driven by w12 act(p2) w13 rep(p3)... in the product form with w12 w13 = 4
        let mut net = GrnNetwork::new(vec![InternalDynamics::two_dim(1.0, 1.0, 1.0); 3]);
        net.set_edge(Sign::Activation, 1, 0, 2.0, 2);
        net.set_edge(Sign::Repression, 2, 0, 2.0, 1);
        let vf = VectorField::new(&net, ModelKind::Mult, &RegulatoryFamily::default()).unwrap();
        let state = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        // 4 * (1/2)^2 * (1/2)
        assert_eq!(vf.drive(&state, 0), 0.5);
        let mut prod_net = net.clone();
        prod_net.multiplicities_mut(Sign::Activation)[(0, 1)] = 1;
        let vf = VectorField::new(&prod_net, ModelKind::Mult, &RegulatoryFamily::default()).unwrap();
        assert_eq!(vf.drive(&state, 0), 4.0 * 0.5 * 0.5);
        assert_eq!(vf.drive(&state, 1), 0.0);
    }

    #[test]
    fn no_inputs_leaves_linear_part() {
        let net = GrnNetwork::new(vec![InternalDynamics::two_dim(2.0, 3.0, 0.5)]);
        for model in [ModelKind::Sum, ModelKind::Mult] {
            let f = vector_field(&net, model, &RegulatoryFamily::default(), &[1.0, 2.0]).unwrap();
            assert_eq!(f, vec![-2.0, 0.5 - 6.0]);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let net = bundled::network("ex36-funny").unwrap();
        let err = vector_field(&net, ModelKind::Sum, &RegulatoryFamily::default(), &[0.0; 5]).unwrap_err();
        assert!(matches!(err, GrnError::DimensionMismatch { expected: 6, actual: 5 }));
    }

    #[test]
    fn prod_requires_unit_multiplicities() {
        let net = bundled::network("clock5").unwrap();
        let circ = RegulatoryFamily::circadian(2.0, 1.0).unwrap();
        assert!(VectorField::new(&net, ModelKind::Prod, &circ).is_err());
        assert!(VectorField::new(&net, ModelKind::Mult, &circ).is_ok());
    }

    #[test]
    fn one_dim_exotic_field() {
        let net = bundled::network("exotic4").unwrap();
        let circ = RegulatoryFamily::circadian(2.0, 1.0).unwrap();
        let x = [0.3, 1.2, 0.8, 2.0];
        let f = vector_field(&net, ModelKind::Mult, &circ, &x).unwrap();
        let act = |x: f64, a: f64| (1.0 + a * x) / (1.0 + x);
        let rep = |x: f64, b: f64| 1.0 / (1.0 + b * x);
        assert_relative_eq!(f[0], act(1.2, 3.0) * rep(0.8, 3.0) - 0.3, max_relative = 1e-14);
        assert_relative_eq!(f[1], act(0.3, 2.0) - 1.2, max_relative = 1e-14);
        assert_relative_eq!(f[3], rep(0.8, 1.0) - 2.0, max_relative = 1e-14);
    }
}
