//! Example networks shipped with the crate as JSON documents.

use crate::error::{GrnError, Result};
use crate::io::NetworkDocument;
use crate::model::GrnNetwork;

pub const NAMES: [&str; 7] = [
    "repressilator3",
    "repressilator4-lift",
    "ex31-five-gene",
    "ex36-funny",
    "ex39-four-gene",
    "clock5",
    "exotic4",
];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "repressilator3" => include_str!("../data/repressilator3.json"),
        "repressilator4-lift" => include_str!("../data/repressilator4-lift.json"),
        "ex31-five-gene" => include_str!("../data/ex31-five-gene.json"),
        "ex36-funny" => include_str!("../data/ex36-funny.json"),
        "ex39-four-gene" => include_str!("../data/ex39-four-gene.json"),
        "clock5" => include_str!("../data/clock5.json"),
        "exotic4" => include_str!("../data/exotic4.json"),
        _ => return None,
    })
}

pub fn document(name: &str) -> Result<NetworkDocument> {
    let text = source(name).ok_or_else(|| {
        GrnError::Config(format!("unknown example '{name}'; known: {}", NAMES.join(", ")))
    })?;
    Ok(serde_json::from_str(text)?)
}

pub fn network(name: &str) -> Result<GrnNetwork> {
    document(name)?.into_network()
}

/// One-line description of a bundled example.
pub fn description(name: &str) -> Option<String> {
    document(name).ok().and_then(|d| d.description)
}
