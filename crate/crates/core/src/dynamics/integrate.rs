//! Fixed-step integration.

use log::warn;
use serde::{Deserialize, Serialize};

use super::field::VectorField;
use crate::error::{GrnError, Result};
use crate::model::{GrnNetwork, ModelKind};
use crate::regulation::RegulatoryFamily;

/// Largest admissible step.
pub const MAX_DT: f64 = 0.1;
/// Concentrations below this value trigger a warning.
pub const NEGATIVE_WARNING: f64 = -1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

impl std::str::FromStr for Integrator {
    type Err = GrnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Integrator::Rk4),
            "euler" => Ok(Integrator::Euler),
            other => Err(GrnError::Config(format!("unknown integrator '{other}' (rk4|euler)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: ModelKind,
    pub family: RegulatoryFamily,
    pub dt: f64,
    pub horizon: f64,
    pub integrator: Integrator,
    pub record_stride: usize,
}

impl SimConfig {
    pub fn new(model: ModelKind, family: RegulatoryFamily, horizon: f64) -> Self {
        Self {
            model,
            family,
            dt: 0.01,
            horizon,
            integrator: Integrator::Rk4,
            record_stride: 1,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(GrnError::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(GrnError::Config(format!("horizon = {} must be positive", self.horizon)));
        }
        if self.dt >= self.horizon {
            return Err(GrnError::Config(format!(
                "dt = {} must be smaller than the horizon {}",
                self.dt, self.horizon
            )));
        }
        if self.dt > MAX_DT {
            return Err(GrnError::Config(format!("dt = {} exceeds the stability guard {MAX_DT}", self.dt)));
        }
        if self.record_stride == 0 {
            return Err(GrnError::Config("record_stride must be at least 1".into()));
        }
        self.family.validate()
    }

    /// Number of steps; the horizon is rounded to a whole number of steps.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub node_dim: usize,
    /// Most negative concentration seen, when one fell below the warning level.
    pub min_negative: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Time series of one state coordinate.
    pub fn coordinate(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    /// Time series of the regulatory variable (`p_i` or `x_i`) of `gene`.
    pub fn output(&self, gene: usize) -> Vec<f64> {
        self.coordinate(gene * self.node_dim + self.node_dim - 1)
    }

    /// Column names: `m1,p1,...` or `x1,...`.
    pub fn header(&self) -> Vec<String> {
        let genes = self.states.first().map_or(0, |s| s.len() / self.node_dim.max(1));
        (1..=genes)
            .flat_map(|g| match self.node_dim {
                2 => vec![format!("m{g}"), format!("p{g}")],
                _ => vec![format!("x{g}")],
            })
            .collect()
    }
}

/// Advances a state by fixed steps, reusing scratch buffers.
#[derive(Clone, Debug)]
pub struct Stepper {
    field: VectorField,
    integrator: Integrator,
    dt: f64,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    pub fn new(field: VectorField, integrator: Integrator, dt: f64) -> Self {
        let len = field.state_len();
        Self {
            field,
            integrator,
            dt,
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
        }
    }

    pub fn from_config(net: &GrnNetwork, config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let field = VectorField::new(net, config.model, &config.family)?;
        Ok(Self::new(field, config.integrator, config.dt))
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&mut self, state: &mut [f64]) {
        let h = self.dt;
        let f = &self.field;
        match self.integrator {
            Integrator::Euler => {
                f.eval_unchecked(state, &mut self.k[0]);
                for (x, k) in state.iter_mut().zip(&self.k[0]) {
                    *x += h * k;
                }
            }
            Integrator::Rk4 => {
                let [k1, k2, k3, k4] = &mut self.k;
                let tmp = &mut self.tmp;
                f.eval_unchecked(state, k1);
                for ((t, x), k) in tmp.iter_mut().zip(state.iter()).zip(k1.iter()) {
                    *t = x + 0.5 * h * k;
                }
                f.eval_unchecked(tmp, k2);
                for ((t, x), k) in tmp.iter_mut().zip(state.iter()).zip(k2.iter()) {
                    *t = x + 0.5 * h * k;
                }
                f.eval_unchecked(tmp, k3);
                for ((t, x), k) in tmp.iter_mut().zip(state.iter()).zip(k3.iter()) {
                    *t = x + h * k;
                }
                f.eval_unchecked(tmp, k4);
                for (i, x) in state.iter_mut().enumerate() {
                    *x += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
    }
}

fn check_state(expected: usize, state: &[f64]) -> Result<()> {
    if state.len() != expected {
        return Err(GrnError::DimensionMismatch {
            expected,
            actual: state.len(),
        });
    }
    if state.iter().any(|x| !x.is_finite()) {
        return Err(GrnError::NonFinite { time: 0.0 });
    }
    Ok(())
}

/// Integrates and calls `observer(t, state)` at `t = 0` and after every
/// step. Returns the most negative concentration seen below the warning
/// level, if any.
pub fn integrate_with<F>(net: &GrnNetwork, config: &SimConfig, initial: &[f64], mut observer: F) -> Result<Option<f64>>
where
    F: FnMut(f64, &[f64]),
{
    let mut stepper = Stepper::from_config(net, config)?;
    check_state(stepper.field().state_len(), initial)?;
    let mut state = initial.to_vec();
    let mut min_negative: Option<f64> = None;
    observer(0.0, &state);
    for step in 1..=config.steps() {
        stepper.step(&mut state);
        let t = step as f64 * config.dt;
        if state.iter().any(|x| !x.is_finite()) {
            return Err(GrnError::NonFinite { time: t });
        }
        let low = state.iter().copied().fold(f64::INFINITY, f64::min);
        if low < NEGATIVE_WARNING && min_negative.map_or(true, |m| low < m) {
            if min_negative.is_none() {
                warn!("concentration {low:e} below zero at t = {t}; consider a smaller dt");
            }
            min_negative = Some(low);
        }
        observer(t, &state);
    }
    Ok(min_negative)
}

/// Integrates and records every `record_stride` steps; the final state is
/// always recorded.
pub fn integrate(net: &GrnNetwork, config: &SimConfig, initial: &[f64]) -> Result<Trajectory> {
    let steps = config.steps();
    let stride = config.record_stride.max(1);
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut states = Vec::with_capacity(steps / stride + 2);
    let mut k = 0usize;
    let min_negative = integrate_with(net, config, initial, |t, x| {
        if k % stride == 0 || k == steps {
            times.push(t);
            states.push(x.to_vec());
        }
        k += 1;
    })?;
    Ok(Trajectory {
        times,
        states,
        node_dim: net.node_dim(),
        min_negative,
    })
}
