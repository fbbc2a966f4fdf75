//! Scans repressilator parameters and reports which combinations oscillate.

use grn_core::dynamics::{detect_oscillation, integrate, SimConfig};
use grn_core::{GrnNetwork, InternalDynamics, ModelKind, RegulatoryFamily, Sign};

fn repressilator(alpha: f64, beta: f64) -> GrnNetwork {
    let gene = InternalDynamics::two_dim(1.0, beta, 1.0).with_basal(alpha * 1e-3);
    let mut net = GrnNetwork::new(vec![gene; 3]);
    for (from, to) in [(2, 0), (0, 1), (1, 2)] {
        net.set_edge(Sign::Repression, from, to, alpha, 1);
    }
    net
}

fn main() {
    let cfg = SimConfig::new(ModelKind::Sum, RegulatoryFamily::default(), 600.0).with_record_stride(10);
    for alpha in [5.0, 10.0, 50.0, 100.0, 216.0] {
        for beta in [0.2, 1.0, 2.0, 5.0] {
            let traj = integrate(&repressilator(alpha, beta), &cfg, &[1.0, 2.0, 0.5, 0.0, 0.2, 1.0]).unwrap();
            let r = detect_oscillation(&traj, 0, 0.5);
            println!("alpha={alpha} beta={beta} {r:?}");
        }
    }
}
