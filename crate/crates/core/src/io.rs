//! JSON network documents.
//!
//! ```json
//! {
//!   "n": 2,
//!   "dimension": "two",
//!   "internal": [{"a": 1, "c": 1, "d": 1}, {"a": 1, "c": 1, "d": 1}],
//!   "activation": [{"from": 1, "to": 2, "weight": 2.0, "mult": 1}],
//!   "repression": []
//! }
//! ```
//!
//! Gene indices are 1-based. Absent edges are zero. An edge may carry a
//! `param` overriding the regulatory family's parameter on that edge.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GrnError, Result};
use crate::model::{GrnNetwork, InternalDynamics, NodeKind, Sign};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    pub dimension: NodeKind,
    pub internal: Vec<RateRecord>,
    #[serde(default)]
    pub activation: Vec<EdgeRecord>,
    #[serde(default)]
    pub repression: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basal: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    #[serde(default = "one")]
    pub mult: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

fn one() -> u32 {
    1
}

impl NetworkDocument {
    pub fn into_network(self) -> Result<GrnNetwork> {
        if self.internal.len() != self.n {
            return Err(GrnError::Format(format!(
                "internal: expected {} rate records, found {}",
                self.n,
                self.internal.len()
            )));
        }
        let internal = self
            .internal
            .iter()
            .enumerate()
            .map(|(g, r)| rate_from_record(g, r, self.dimension))
            .collect::<Result<Vec<_>>>()?;
        let mut net = GrnNetwork::new(internal);
        for (sign, field, edges) in [
            (Sign::Activation, "activation", &self.activation),
            (Sign::Repression, "repression", &self.repression),
        ] {
            let mut seen = vec![false; self.n * self.n];
            for (k, e) in edges.iter().enumerate() {
                for (end, g) in [("from", e.from), ("to", e.to)] {
                    if g == 0 || g > self.n {
                        return Err(GrnError::Format(format!(
                            "{field}[{k}].{end}: gene {g} out of range 1..={}",
                            self.n
                        )));
                    }
                }
                let (from, to) = (e.from - 1, e.to - 1);
                let slot = &mut seen[to * self.n + from];
                if *slot {
                    return Err(GrnError::Format(format!(
                        "{field}[{k}]: duplicate edge {} -> {}",
                        e.from, e.to
                    )));
                }
                *slot = true;
                net.set_edge(sign, from, to, e.weight, e.mult);
                net.set_param(sign, from, to, e.param);
            }
        }
        Ok(net)
    }

    pub fn from_network(net: &GrnNetwork, name: Option<&str>) -> Self {
        let dimension = net.node_kind().unwrap_or(NodeKind::Two);
        let internal = net
            .internal()
            .iter()
            .map(|d| match *d {
                InternalDynamics::TwoDim { a, c, d, basal } => RateRecord {
                    a: Some(a),
                    c: Some(c),
                    d: Some(d),
                    basal: (basal != 0.0).then_some(basal),
                    ..Default::default()
                },
                InternalDynamics::OneDim { decay, basal } => RateRecord {
                    decay: Some(decay),
                    basal: (basal != 0.0).then_some(basal),
                    ..Default::default()
                },
            })
            .collect();
        let edges = |sign: Sign| {
            let (w, m, p) = (net.weights(sign), net.multiplicities(sign), net.params(sign));
            w.entries()
                .filter(|(i, j, &wij)| wij != 0.0 || m[(*i, *j)] != 0)
                .map(|(i, j, &wij)| EdgeRecord {
                    from: j + 1,
                    to: i + 1,
                    weight: wij,
                    mult: m[(i, j)],
                    param: p[(i, j)],
                })
                .collect()
        };
        Self {
            name: name.map(str::to_owned),
            description: None,
            n: net.n(),
            dimension,
            internal,
            activation: edges(Sign::Activation),
            repression: edges(Sign::Repression),
        }
    }
}

fn rate_from_record(g: usize, r: &RateRecord, kind: NodeKind) -> Result<InternalDynamics> {
    let missing = |field: &str| {
        GrnError::Format(format!("internal[{g}]: missing field '{field}' for dimension {kind:?}"))
    };
    let stray = |field: &str| {
        GrnError::Format(format!("internal[{g}]: field '{field}' not allowed for dimension {kind:?}"))
    };
    let basal = r.basal.unwrap_or(0.0);
    match kind {
        NodeKind::Two => {
            if r.decay.is_some() {
                return Err(stray("decay"));
            }
            Ok(InternalDynamics::TwoDim {
                a: r.a.ok_or_else(|| missing("a"))?,
                c: r.c.ok_or_else(|| missing("c"))?,
                d: r.d.ok_or_else(|| missing("d"))?,
                basal,
            })
        }
        NodeKind::One => {
            for (name, v) in [("a", r.a), ("c", r.c), ("d", r.d)] {
                if v.is_some() {
                    return Err(stray(name));
                }
            }
            Ok(InternalDynamics::OneDim {
                decay: r.decay.ok_or_else(|| missing("decay"))?,
                basal,
            })
        }
    }
}

pub fn network_from_json(text: &str) -> Result<GrnNetwork> {
    let doc: NetworkDocument = serde_json::from_str(text)?;
    doc.into_network()
}

pub fn network_to_json(net: &GrnNetwork, name: Option<&str>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkDocument::from_network(net, name))?)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<GrnNetwork> {
    network_from_json(&fs::read_to_string(path)?)
}

pub fn save_network(net: &GrnNetwork, name: Option<&str>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, network_to_json(net, name)? + "\n")?;
    Ok(())
}
