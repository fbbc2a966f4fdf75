//! Activation/repression function families.
//!
//! Every family evaluates `act(p; θ)` and `rep(p; θ)` where `θ` is an
//! optional per-edge parameter overriding the family default:
//!
//! | family    | act                     | rep                    | θ on act | θ on rep |
//! |-----------|-------------------------|------------------------|----------|----------|
//! | hill      | pⁿ / (βⁿ + pⁿ)          | βⁿ / (βⁿ + pⁿ)         | β        | β        |
//! | circadian | (1 + a x) / (1 + x)     | 1 / (1 + b x)          | a        | b        |
//! | custom    | tabulated, linear       | tabulated, linear      | ignored  | ignored  |

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GrnError, Result};
use crate::model::Sign;

/// Algebraic identities a family may satisfy for all arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Identity {
    /// `act(p; θ) + rep(p; θ) = 1`
    ActPlusRepIsOne,
    /// `act(x; r) · rep(x; r) = rep(x; 1)`
    ActTimesRepIsRep1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFamily {
    pub name: String,
    /// Strictly increasing sample points, nonnegative.
    pub points: Vec<f64>,
    pub act: Vec<f64>,
    pub rep: Vec<f64>,
}

impl TabulatedFamily {
    fn validate(&self) -> Result<()> {
        let len = self.points.len();
        if len < 2 || self.act.len() != len || self.rep.len() != len {
            return Err(GrnError::Domain(format!(
                "custom family '{}': need at least two points and equal-length act/rep tables",
                self.name
            )));
        }
        if self.points[0] < 0.0 || self.points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GrnError::Domain(format!(
                "custom family '{}': points must be nonnegative and strictly increasing",
                self.name
            )));
        }
        if self.act.iter().chain(&self.rep).any(|v| !v.is_finite()) {
            return Err(GrnError::Domain(format!("custom family '{}': non-finite sample", self.name)));
        }
        Ok(())
    }

    fn interpolate(&self, table: &[f64], p: f64) -> f64 {
        let pts = &self.points;
        if p <= pts[0] {
            return table[0];
        }
        if p >= pts[pts.len() - 1] {
            return table[table.len() - 1];
        }
        let k = pts.partition_point(|&x| x <= p) - 1;
        let t = (p - pts[k]) / (pts[k + 1] - pts[k]);
        table[k] + t * (table[k + 1] - table[k])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum RegulatoryFamily {
    Hill { n: u32, beta: f64 },
    Circadian { a: f64, b: f64 },
    Custom(TabulatedFamily),
}

impl Default for RegulatoryFamily {
    fn default() -> Self {
        RegulatoryFamily::Hill { n: 2, beta: 1.0 }
    }
}

impl RegulatoryFamily {
    pub fn hill(n: u32, beta: f64) -> Result<Self> {
        let f = RegulatoryFamily::Hill { n, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn circadian(a: f64, b: f64) -> Result<Self> {
        let f = RegulatoryFamily::Circadian { a, b };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RegulatoryFamily::Hill { n, beta } => {
                if *n == 0 {
                    return Err(GrnError::Domain("hill exponent must be a positive integer".into()));
                }
                check_hill_beta(*beta)
            }
            RegulatoryFamily::Circadian { a, b } => {
                check_circadian(Sign::Activation, *a)?;
                check_circadian(Sign::Repression, *b)
            }
            RegulatoryFamily::Custom(t) => t.validate(),
        }
    }

    /// Checks a per-edge parameter override for an edge of the given sign.
    pub fn check_edge_param(&self, sign: Sign, param: f64) -> Result<()> {
        match self {
            RegulatoryFamily::Hill { .. } => check_hill_beta(param),
            // per-edge folds below one are admitted; they make act decreasing
            RegulatoryFamily::Circadian { .. } if param.is_finite() && param >= 0.0 => Ok(()),
            RegulatoryFamily::Circadian { .. } => Err(GrnError::Domain(format!(
                "circadian {} edge parameter {param} must be >= 0",
                if sign == Sign::Activation { "activation" } else { "repression" }
            ))),
            RegulatoryFamily::Custom(_) => Ok(()),
        }
    }

    /// Identities the family satisfies exactly.
    pub fn identities(&self) -> &'static [Identity] {
        match self {
            RegulatoryFamily::Hill { .. } => &[Identity::ActPlusRepIsOne],
            RegulatoryFamily::Circadian { .. } => &[Identity::ActTimesRepIsRep1],
            RegulatoryFamily::Custom(_) => &[],
        }
    }

    pub fn declares(&self, identity: Identity) -> bool {
        self.identities().contains(&identity)
    }

    /// Whether act runs 0→1 and rep 1→0, the setting in which structural
    /// synchrony conditions are both necessary and sufficient. Tabulated
    /// families cannot be certified and report false.
    pub fn is_hill_like(&self) -> bool {
        matches!(self, RegulatoryFamily::Hill { .. })
    }

    pub fn act(&self, p: f64, param: Option<f64>) -> Result<f64> {
        check_argument(p)?;
        if let Some(theta) = param {
            self.check_edge_param(Sign::Activation, theta)?;
        }
        Ok(self.act_unchecked(p, param))
    }

    pub fn rep(&self, p: f64, param: Option<f64>) -> Result<f64> {
        check_argument(p)?;
        if let Some(theta) = param {
            self.check_edge_param(Sign::Repression, theta)?;
        }
        Ok(self.rep_unchecked(p, param))
    }

    pub fn eval(&self, sign: Sign, p: f64, param: Option<f64>) -> Result<f64> {
        match sign {
            Sign::Activation => self.act(p, param),
            Sign::Repression => self.rep(p, param),
        }
    }

    /// Evaluation without argument checks; negative arguments are clamped to zero.
    pub(crate) fn eval_unchecked(&self, sign: Sign, p: f64, param: Option<f64>) -> f64 {
        match sign {
            Sign::Activation => self.act_unchecked(p, param),
            Sign::Repression => self.rep_unchecked(p, param),
        }
    }

    fn act_unchecked(&self, p: f64, param: Option<f64>) -> f64 {
        let p = p.max(0.0);
        match self {
            RegulatoryFamily::Hill { n, beta } => hill_pair(p, param.unwrap_or(*beta), *n).0,
            RegulatoryFamily::Circadian { a, .. } => {
                let a = param.unwrap_or(*a);
                (1.0 + a * p) / (1.0 + p)
            }
            RegulatoryFamily::Custom(t) => t.interpolate(&t.act, p),
        }
    }

    fn rep_unchecked(&self, p: f64, param: Option<f64>) -> f64 {
        let p = p.max(0.0);
        match self {
            RegulatoryFamily::Hill { n, beta } => hill_pair(p, param.unwrap_or(*beta), *n).1,
            RegulatoryFamily::Circadian { b, .. } => 1.0 / (1.0 + param.unwrap_or(*b) * p),
            RegulatoryFamily::Custom(t) => t.interpolate(&t.rep, p),
        }
    }

    /// Parses `hill:n=2,beta=1`, `circadian:a=3,b=1` or `custom:<file.json>`.
    /// Omitted keys take the defaults `n=2, beta=1` and `a=2, b=1`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let family = match kind.trim().to_ascii_lowercase().as_str() {
            "hill" => {
                let (mut n, mut beta) = (2u32, 1.0);
                for (key, value) in key_values(rest)? {
                    match key {
                        "n" => n = parse_value(key, value)?,
                        "beta" => beta = parse_value(key, value)?,
                        other => return Err(GrnError::Format(format!("hill: unknown key '{other}'"))),
                    }
                }
                RegulatoryFamily::Hill { n, beta }
            }
            "circadian" => {
                let (mut a, mut b) = (2.0, 1.0);
                for (key, value) in key_values(rest)? {
                    match key {
                        "a" => a = parse_value(key, value)?,
                        "b" => b = parse_value(key, value)?,
                        other => {
                            return Err(GrnError::Format(format!("circadian: unknown key '{other}'")))
                        }
                    }
                }
                RegulatoryFamily::Circadian { a, b }
            }
            "custom" => RegulatoryFamily::Custom(load_tabulated(rest.trim())?),
            other => return Err(GrnError::Format(format!("unknown regulatory family '{other}'"))),
        };
        family.validate()?;
        Ok(family)
    }
}

impl fmt::Display for RegulatoryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegulatoryFamily::Hill { n, beta } => write!(f, "hill:n={n},beta={beta}"),
            RegulatoryFamily::Circadian { a, b } => write!(f, "circadian:a={a},b={b}"),
            RegulatoryFamily::Custom(t) => write!(f, "custom:{}", t.name),
        }
    }
}

fn load_tabulated(path: &str) -> Result<TabulatedFamily> {
    if path.is_empty() {
        return Err(GrnError::Format("custom family needs a file: custom:<path>".into()));
    }
    let text = fs::read_to_string(Path::new(path))?;
    let t: TabulatedFamily = serde_json::from_str(&text)?;
    t.validate()?;
    Ok(t)
}

fn key_values(rest: &str) -> Result<Vec<(&str, &str)>> {
    rest.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| GrnError::Format(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| GrnError::Format(format!("invalid value '{value}' for '{key}'")))
}

fn check_argument(p: f64) -> Result<()> {
    if p.is_nan() || p < 0.0 {
        return Err(GrnError::Domain(format!("regulatory argument {p} must be nonnegative")));
    }
    Ok(())
}

fn check_hill_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(GrnError::Domain(format!("hill threshold {beta} must be positive")))
    }
}

fn check_circadian(sign: Sign, value: f64) -> Result<()> {
    let ok = match sign {
        Sign::Activation => value.is_finite() && value >= 1.0,
        Sign::Repression => value.is_finite() && value >= 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(GrnError::Domain(match sign {
            Sign::Activation => format!("circadian activation fold {value} must be >= 1"),
            Sign::Repression => format!("circadian repression parameter {value} must be >= 0"),
        }))
    }
}

/// `(act, rep)` of the Hill pair, computed from a shared denominator so
/// that the two sum to one up to rounding.
fn hill_pair(p: f64, beta: f64, n: u32) -> (f64, f64) {
    let pn = p.powi(n as i32);
    let bn = beta.powi(n as i32);
    if pn.is_infinite() {
        return (1.0, 0.0);
    }
    let denom = bn + pn;
    (pn / denom, bn / denom)
}

/// Sample points and parameter values over which identities are checked.
#[derive(Clone, Debug, Default)]
pub struct IdentityGrid {
    pub points: Vec<f64>,
    /// Per-edge parameter values; empty means "family defaults only".
    pub params: Vec<f64>,
}

impl IdentityGrid {
    /// `np` evenly spaced points on `[0, p_max]` and `nr` parameters on `[r_min, r_max]`.
    pub fn uniform(p_max: f64, np: usize, r_range: Option<(f64, f64, usize)>) -> Self {
        let lin = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
            if k <= 1 {
                return vec![lo];
            }
            (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
        };
        Self {
            points: lin(0.0, p_max, np),
            params: r_range.map(|(lo, hi, k)| lin(lo, hi, k)).unwrap_or_default(),
        }
    }
}

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// True iff `identity` holds at every grid point within 1e-12 (scaled by
/// the magnitude of the compared values when they exceed one).
pub fn check_identity(family: &RegulatoryFamily, identity: Identity, grid: &IdentityGrid) -> bool {
    let params: Vec<Option<f64>> = if grid.params.is_empty() {
        vec![None]
    } else {
        grid.params.iter().copied().map(Some).collect()
    };
    let close = |l: f64, r: f64| (l - r).abs() <= IDENTITY_TOLERANCE * l.abs().max(r.abs()).max(1.0);
    let holds = |p: f64, r: Option<f64>| -> Result<bool> {
        let act = family.act(p, r)?;
        let rep = family.rep(p, r)?;
        Ok(match identity {
            Identity::ActPlusRepIsOne => close(act + rep, 1.0),
            Identity::ActTimesRepIsRep1 => close(act * rep, family.rep(p, Some(1.0))?),
        })
    };
    grid.points
        .iter()
        .all(|&p| params.iter().all(|&r| holds(p, r).unwrap_or(false)))
}

/// Fold-change activators whose midpoint steepness is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldChange {
    /// `H(x) = a xⁿ / (bⁿ + xⁿ)`
    Hill,
    /// `C(x) = ((b + a x) / (b + x))ⁿ`
    Circadian,
}

impl FoldChange {
    pub fn value(self, x: f64, a: f64, b: f64, n: u32) -> f64 {
        match self {
            FoldChange::Hill => {
                let xn = x.powi(n as i32);
                a * xn / (b.powi(n as i32) + xn)
            }
            FoldChange::Circadian => ((b + a * x) / (b + x)).powi(n as i32),
        }
    }
}

/// Slope of the fold-change function at its midpoint `x = b`.
pub fn steepness_at_midpoint(kind: FoldChange, a: f64, b: f64, n: u32) -> Result<f64> {
    if !(a.is_finite() && a > 1.0) || !(b.is_finite() && b > 0.0) || n == 0 {
        return Err(GrnError::Domain(format!(
            "steepness needs a > 1, b > 0, n >= 1 (got a = {a}, b = {b}, n = {n})"
        )));
    }
    let n_f = f64::from(n);
    Ok(match kind {
        FoldChange::Hill => a * n_f / (4.0 * b),
        FoldChange::Circadian => (a - 1.0) / (4.0 * b) * ((a + 1.0) / 2.0).powi(n as i32 - 1) * n_f,
    })
}
