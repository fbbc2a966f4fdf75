//! Numerical flow-invariance checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::{SimConfig, Stepper};
use crate::error::{GrnError, Result};
use crate::model::{GrnNetwork, ModelKind};
use crate::partition::GenePartition;
use crate::synchrony::QuotientResult;

/// Defect below which every trial must stay for an `invariant` verdict.
pub const INVARIANT_TOLERANCE: f64 = 1e-6;
/// Defect above which a single trial yields `not_invariant`.
pub const DRIFT_THRESHOLD: f64 = 1e-3;
/// Box from which synchronized initial coordinates are drawn.
pub const INITIAL_BOX: (f64, f64) = (0.0, 5.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceVerdict {
    Invariant,
    NotInvariant,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub partition: GenePartition,
    pub max_defect: f64,
    pub trials: usize,
    pub verdict: InvarianceVerdict,
    pub trial_defects: Vec<f64>,
}

/// Per-trial generator derived from a master seed.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

/// Random state in which all genes of a class share their coordinates.
pub fn synchronized_state<R: Rng>(partition: &GenePartition, node_dim: usize, rng: &mut R) -> Vec<f64> {
    let reduced = random_state(partition.num_classes(), node_dim, rng);
    expand_state(partition.labels(), node_dim, &reduced)
}

pub fn random_state<R: Rng>(genes: usize, node_dim: usize, rng: &mut R) -> Vec<f64> {
    (0..genes * node_dim)
        .map(|_| rng.gen_range(INITIAL_BOX.0..=INITIAL_BOX.1))
        .collect()
}

/// Full state whose gene `g` copies quotient gene `class_map[g]`.
pub fn expand_state(class_map: &[usize], node_dim: usize, reduced: &[f64]) -> Vec<f64> {
    class_map
        .iter()
        .flat_map(|&k| reduced[k * node_dim..(k + 1) * node_dim].iter().copied())
        .collect()
}

/// Largest coordinatewise spread within a class.
pub fn class_spread(partition: &GenePartition, node_dim: usize, state: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for class in partition.classes().iter().filter(|c| c.len() > 1) {
        for d in 0..node_dim {
            let (lo, hi) = class.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
                let v = state[g * node_dim + d];
                (lo.min(v), hi.max(v))
            });
            worst = worst.max(hi - lo);
        }
    }
    worst
}

fn check_partition(net: &GrnNetwork, partition: &GenePartition) -> Result<()> {
    if partition.n() != net.n() {
        return Err(GrnError::InvalidPartition(format!(
            "partition covers {} genes but the network has {}",
            partition.n(),
            net.n()
        )));
    }
    Ok(())
}

/// Integrates `trials` synchronized starts and reports the largest spread
/// within classes over time.
pub fn verify_invariance(
    net: &GrnNetwork,
    partition: &GenePartition,
    config: &SimConfig,
    trials: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    check_partition(net, partition)?;
    if trials == 0 {
        return Err(GrnError::Config("at least one trial is required".into()));
    }
    let stepper = Stepper::from_config(net, config)?;
    let dim = net.node_dim();
    let steps = config.steps();
    let trial_defects = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let mut stepper = stepper.clone();
            let mut state = synchronized_state(partition, dim, &mut trial_rng(seed, trial));
            let mut defect = 0.0f64;
            for step in 1..=steps {
                stepper.step(&mut state);
                let spread = class_spread(partition, dim, &state);
                if !spread.is_finite() {
                    return Err(GrnError::NonFinite {
                        time: step as f64 * config.dt,
                    });
                }
                defect = defect.max(spread);
            }
            Ok(defect)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_defect = trial_defects.iter().copied().fold(0.0, f64::max);
    let verdict = if max_defect <= INVARIANT_TOLERANCE {
        InvarianceVerdict::Invariant
    } else if max_defect > DRIFT_THRESHOLD {
        InvarianceVerdict::NotInvariant
    } else {
        InvarianceVerdict::Inconclusive
    };
    Ok(InvarianceReport {
        partition: partition.clone(),
        max_defect,
        trials,
        verdict,
        trial_defects,
    })
}

/// Integrates the network from synchronized starts alongside the quotient
/// from the matching reduced starts; returns the largest distance between
/// a gene's coordinates and those of its quotient gene.
pub fn compare_quotient_flow(
    net: &GrnNetwork,
    partition: &GenePartition,
    quotient: &QuotientResult,
    config: &SimConfig,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_partition(net, partition)?;
    if quotient.quotient.n() != partition.num_classes() {
        return Err(GrnError::DimensionMismatch {
            expected: partition.num_classes(),
            actual: quotient.quotient.n(),
        });
    }
    let full = Stepper::from_config(net, config)?;
    let mut quotient_config = config.clone();
    if quotient_config.model == ModelKind::Prod {
        // quotient multiplicities are class sums and may exceed one
        quotient_config.model = ModelKind::Mult;
    }
    let reduced = Stepper::from_config(&quotient.quotient, &quotient_config)?;
    let dim = net.node_dim();
    let class_map = partition.labels();
    let deviations = (0..trials.max(1))
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let (mut full, mut reduced) = (full.clone(), reduced.clone());
            let mut y = random_state(partition.num_classes(), dim, &mut trial_rng(seed, trial));
            let mut x = expand_state(class_map, dim, &y);
            let mut worst = 0.0f64;
            for step in 1..=config.steps() {
                full.step(&mut x);
                reduced.step(&mut y);
                let dev = expand_state(class_map, dim, &y)
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if !dev.is_finite() {
                    return Err(GrnError::NonFinite {
                        time: step as f64 * config.dt,
                    });
                }
                worst = worst.max(dev);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::regulation::RegulatoryFamily;
    use crate::synchrony::{mult_quotient, sum_quotient};

    fn p(text: &str, n: usize) -> GenePartition {
        GenePartition::parse(text, n).unwrap()
    }

    #[test]
    fn five_gene_partition_is_invariant() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let cfg = SimConfig::new(ModelKind::Sum, RegulatoryFamily::default(), 20.0);
        let report = verify_invariance(&net, &p("1,2,3|4,5", 5), &cfg, 4, 1).unwrap();
        assert_eq!(report.verdict, InvarianceVerdict::Invariant);
        assert_eq!(report.trials, 4);
        let report = verify_invariance(&net, &p("1,2|3|4,5", 5), &cfg, 4, 1).unwrap();
        assert_eq!(report.verdict, InvarianceVerdict::NotInvariant);
    }

    #[test]
    fn exotic_space_depends_on_family() {
        let net = bundled::network("exotic4").unwrap();
        let s = p("1,4|2,3", 4);
        let circ = SimConfig::new(ModelKind::Mult, RegulatoryFamily::circadian(2.0, 1.0).unwrap(), 20.0);
        assert_eq!(verify_invariance(&net, &s, &circ, 5, 3).unwrap().verdict, InvarianceVerdict::Invariant);
        let hill = SimConfig::new(ModelKind::Mult, RegulatoryFamily::default(), 20.0);
        assert_eq!(verify_invariance(&net, &s, &hill, 5, 3).unwrap().verdict, InvarianceVerdict::NotInvariant);
    }

    #[test]
    fn same_seed_same_report() {
        let net = bundled::network("ex31-five-gene").unwrap();
        let cfg = SimConfig::new(ModelKind::Sum, RegulatoryFamily::default(), 2.0);
        let part = p("1,2|3|4|5", 5);
        assert_eq!(
            verify_invariance(&net, &part, &cfg, 3, 9).unwrap(),
            verify_invariance(&net, &part, &cfg, 3, 9).unwrap()
        );
    }

    #[test]
    fn quotient_flows_agree() {
        let net = bundled::network("ex39-four-gene").unwrap();
        let part = p("1,2|3|4", 4);
        let q = mult_quotient(&net, &part).unwrap();
        let cfg = SimConfig::new(ModelKind::Mult, RegulatoryFamily::default(), 10.0);
        assert!(compare_quotient_flow(&net, &part, &q, &cfg, 2, 5).unwrap() <= 1e-8);

        let single = GenePartition::singletons(4);
        let q = sum_quotient(&net, &single).unwrap();
        let cfg = SimConfig::new(ModelKind::Sum, RegulatoryFamily::default(), 10.0);
        assert_eq!(compare_quotient_flow(&net, &single, &q, &cfg, 2, 5).unwrap(), 0.0);
    }

    #[test]
    fn spread_and_expansion() {
        let part = p("1,3|2", 3);
        let x = expand_state(part.labels(), 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(x, vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.0]);
        assert_eq!(class_spread(&part, 2, &x), 0.0);
        assert_eq!(class_spread(&part, 2, &[1.0, 2.0, 3.0, 4.0, 1.5, 2.0]), 0.5);
    }
}
