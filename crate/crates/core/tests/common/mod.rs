//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use grn_core::lift::{build_mult_lift, build_sum_lift, enumerate_mult_lift_multiplicities, lift_partition};
use grn_core::lift::{SupportChoice, WeightFill};
use grn_core::{GenePartition, GrnNetwork, InternalDynamics, Matrix, ModelKind, Sign};
use rand::seq::SliceRandom;
use rand::Rng;

const ORACLE_TOL: f64 = 1e-9;

/// `v = A e_C` for the indicator vector of `class`.
fn apply_to_indicator(a: &Matrix<f64>, class: &[usize]) -> Vec<f64> {
    (0..a.n()).map(|i| class.iter().map(|&j| a[(i, j)]).sum()).collect()
}

/// True iff `v` is constant on every class of `p`.
fn constant_on_classes(v: &[f64], p: &GenePartition, rel: bool) -> bool {
    p.classes().iter().all(|c| {
        c.iter().all(|&i| {
            let (a, b) = (v[i], v[c[0]]);
            let scale = if rel { a.abs().max(b.abs()) } else { 1.0 };
            (a - b).abs() <= ORACLE_TOL * scale
        })
    })
}

fn to_f64(m: &Matrix<u32>) -> Matrix<f64> {
    m.map(|&x| x as f64)
}

fn refines_equivalence(net: &GrnNetwork, p: &GenePartition) -> bool {
    p.refines(&net.gene_equivalence_partition())
}

/// Polydiagonal invariance of `Δ_P` under `W⁺` and `W⁻` as linear maps.
pub fn sum_oracle(net: &GrnNetwork, p: &GenePartition) -> bool {
    refines_equivalence(net, p)
        && [net.w_plus(), net.w_minus()].iter().all(|w| {
            p.classes()
                .iter()
                .all(|c| constant_on_classes(&apply_to_indicator(w, c), p, false))
        })
}

/// Joint invariance of `Δ_P` under `M⁺`, `M⁻` and the diagonal `W*`.
pub fn mult_oracle(net: &GrnNetwork, p: &GenePartition) -> bool {
    let n = net.n();
    let mut w_star = Matrix::zeros(n);
    for i in 0..n {
        w_star[(i, i)] = net.row_weight_product(i);
    }
    refines_equivalence(net, p)
        && [to_f64(net.m_plus()), to_f64(net.m_minus())].iter().all(|m| {
            p.classes()
                .iter()
                .all(|c| constant_on_classes(&apply_to_indicator(m, c), p, false))
        })
        && p.classes()
            .iter()
            .all(|c| constant_on_classes(&apply_to_indicator(&w_star, c), p, true))
}

/// Every partition of `0..n` refining `bound`, by brute force over label
/// vectors (independent of the library's enumerator).
pub fn partitions_refining(bound: &GenePartition) -> Vec<GenePartition> {
    let n = bound.n();
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(k: usize, labels: &mut Vec<usize>, n: usize, bound: &GenePartition, out: &mut Vec<GenePartition>) {
        if k == n {
            let p = GenePartition::from_labels(labels);
            if p.refines(bound) {
                out.push(p);
            }
            return;
        }
        let max = labels[..k].iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=max {
            labels[k] = l;
            rec(k + 1, labels, n, bound, out);
        }
    }
    rec(0, &mut labels, n, bound, &mut out);
    out
}

fn random_internal<R: Rng>(rng: &mut R, n: usize, two_dim: bool, kinds: usize) -> Vec<InternalDynamics> {
    let palette: Vec<InternalDynamics> = (0..kinds)
        .map(|_| {
            if two_dim {
                InternalDynamics::two_dim(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
            } else {
                InternalDynamics::one_dim(rng.gen_range(0.5..2.0))
            }
        })
        .collect();
    (0..n).map(|_| *palette.choose(rng).unwrap()).collect()
}

/// Random network with small integer weights and multiplicities, so that
/// coincidences of row sums and products are common.
pub fn random_discrete_network<R: Rng>(rng: &mut R, n: usize) -> GrnNetwork {
    let kinds = rng.gen_range(1..=2);
    let two_dim = rng.gen_bool(0.5);
    let mut net = GrnNetwork::new(random_internal(rng, n, two_dim, kinds));
    let density = rng.gen_range(0.15..0.5);
    for sign in Sign::BOTH {
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(density) {
                    let w = *[1.0, 1.0, 2.0, 3.0].choose(rng).unwrap();
                    net.set_edge(sign, j, i, w, rng.gen_range(1..=2));
                }
            }
        }
    }
    net
}

/// Random quotient with continuous weights and generic rates.
pub fn random_quotient<R: Rng>(rng: &mut R, m: usize, two_dim: bool) -> GrnNetwork {
    let mut q = GrnNetwork::new(random_internal(rng, m, two_dim, m));
    for sign in Sign::BOTH {
        for i in 0..m {
            for j in 0..m {
                if rng.gen_bool(0.45) {
                    q.set_edge(sign, j, i, rng.gen_range(0.3..3.0), rng.gen_range(1..=2));
                }
            }
        }
    }
    q
}

/// Random network with a known synchrony partition, built as a lift of a
/// random quotient. Returns the network and its class partition.
pub fn random_lift<R: Rng>(rng: &mut R, model: ModelKind, max_n: usize) -> (GrnNetwork, GenePartition) {
    loop {
        let m = rng.gen_range(2..=3);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
        let n: usize = sizes.iter().sum();
        if n > max_n || sizes.iter().all(|&s| s == 1) {
            continue;
        }
        let q = random_quotient(rng, m, true);
        let seed = rng.gen();
        let lift = match model {
            ModelKind::Sum => build_sum_lift(&q, &sizes, &SupportChoice::Full, &WeightFill::Random, seed),
            _ => {
                let pairs: Vec<_> = match enumerate_mult_lift_multiplicities(&q, &sizes, 100_000) {
                    Ok(it) => it.collect(),
                    Err(_) => continue,
                };
                let pick = pairs.choose(rng).unwrap();
                build_mult_lift(&q, &sizes, pick, &WeightFill::Random, seed)
            }
        };
        return (lift.unwrap(), lift_partition(&sizes).unwrap());
    }
}

/// Random network with continuous weights and thresholds, two-dimensional nodes.
pub fn random_generic_network<R: Rng>(rng: &mut R, n: usize) -> GrnNetwork {
    let kinds = rng.gen_range(1..=2);
    let mut net = GrnNetwork::new(random_internal(rng, n, true, kinds));
    for sign in Sign::BOTH {
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.4) {
                    net.set_edge(sign, j, i, rng.gen_range(0.5..3.0), rng.gen_range(1..=2));
                }
            }
        }
    }
    net
}
