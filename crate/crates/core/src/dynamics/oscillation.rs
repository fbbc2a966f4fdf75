//! Peak-based detection of sustained oscillations.

use serde::{Deserialize, Serialize};

use super::integrate::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationCriteria {
    /// Minimum peak-to-trough amplitude after the transient.
    pub amplitude_threshold: f64,
    /// Maximum coefficient of variation of inter-peak spacing.
    pub max_spacing_cv: f64,
    /// Minimum number of full periods in the window.
    pub min_periods: usize,
    /// Last cycle amplitude over first cycle amplitude must reach this, so
    /// that slowly damped oscillations are not reported.
    pub min_sustain_ratio: f64,
}

impl Default for OscillationCriteria {
    fn default() -> Self {
        Self {
            amplitude_threshold: 1e-3,
            max_spacing_cv: 0.05,
            min_periods: 5,
            min_sustain_ratio: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub oscillating: bool,
    /// The window held too few peaks to decide.
    pub inconclusive: bool,
    /// Mean inter-peak spacing.
    pub period: Option<f64>,
    /// Peak-to-trough amplitude over the window.
    pub amplitude: f64,
    pub peaks: usize,
}

/// Decides whether `values` (sampled at `times`) oscillates after dropping
/// the first `transient_fraction` of the samples.
pub fn detect_oscillation_series(
    times: &[f64],
    values: &[f64],
    transient_fraction: f64,
    criteria: &OscillationCriteria,
) -> OscillationReport {
    let start = ((times.len() as f64) * transient_fraction.clamp(0.0, 1.0)).floor() as usize;
    let (t, v) = (&times[start.min(times.len())..], &values[start.min(values.len())..]);
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let amplitude = if v.is_empty() { 0.0 } else { hi - lo };
    let quiet = OscillationReport {
        oscillating: false,
        inconclusive: false,
        period: None,
        amplitude,
        peaks: 0,
    };
    if amplitude <= criteria.amplitude_threshold {
        return quiet;
    }
    // local maxima; plateaus count once, at their first sample
    let peaks: Vec<usize> = (1..v.len().saturating_sub(1))
        .filter(|&k| v[k] > v[k - 1] && v[k] >= v[k + 1])
        .collect();
    if peaks.len() < criteria.min_periods + 1 {
        return OscillationReport {
            inconclusive: true,
            peaks: peaks.len(),
            ..quiet
        };
    }
    let spacings: Vec<f64> = peaks.windows(2).map(|w| t[w[1]] - t[w[0]]).collect();
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let var = spacings.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / spacings.len() as f64;
    let cv = var.sqrt() / mean;
    let cycle_amplitude = |w: &[usize]| {
        let trough = v[w[0]..=w[1]].iter().copied().fold(f64::INFINITY, f64::min);
        v[w[0]].max(v[w[1]]) - trough
    };
    let first = cycle_amplitude(&peaks[0..2]);
    let last = cycle_amplitude(&peaks[peaks.len() - 2..]);
    let sustained = last >= criteria.min_sustain_ratio * first && last > criteria.amplitude_threshold;
    OscillationReport {
        oscillating: cv < criteria.max_spacing_cv && sustained,
        inconclusive: false,
        period: Some(mean),
        amplitude,
        peaks: peaks.len(),
    }
}

/// Oscillation test on the regulatory variable of `gene`.
pub fn detect_oscillation(trajectory: &Trajectory, gene: usize, transient_fraction: f64) -> OscillationReport {
    detect_oscillation_series(
        &trajectory.times,
        &trajectory.output(gene),
        transient_fraction,
        &OscillationCriteria::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, t_end: f64) -> (Vec<f64>, Vec<f64>) {
        let times: Vec<f64> = (0..=(t_end * 100.0) as usize).map(|k| k as f64 / 100.0).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        (times, values)
    }

    #[test]
    fn sine_is_detected_with_period() {
        let (t, v) = sampled(|t| 2.0 + (t * std::f64::consts::TAU / 3.0).sin(), 60.0);
        let r = detect_oscillation_series(&t, &v, 0.25, &OscillationCriteria::default());
        assert!(r.oscillating && !r.inconclusive);
        assert!((r.period.unwrap() - 3.0).abs() < 0.02);
        assert!((r.amplitude - 2.0).abs() < 1e-3);
    }

    #[test]
    fn decay_and_constants_are_quiet() {
        let crit = OscillationCriteria::default();
        let (t, v) = sampled(|t| (-t).exp(), 50.0);
        let r = detect_oscillation_series(&t, &v, 0.5, &crit);
        assert!(!r.oscillating && !r.inconclusive);
        let (t, v) = sampled(|_| 1.5, 50.0);
        let r = detect_oscillation_series(&t, &v, 0.5, &crit);
        assert!(!r.oscillating && r.amplitude == 0.0);
    }

    #[test]
    fn damped_oscillation_is_rejected() {
        let (t, v) = sampled(|t| (-0.1 * t).exp() * (t * 2.0).sin(), 60.0);
        let r = detect_oscillation_series(&t, &v, 0.1, &OscillationCriteria::default());
        assert!(!r.oscillating);
        assert!(!r.inconclusive);
    }

    #[test]
    fn short_window_is_inconclusive() {
        let (t, v) = sampled(|t| t.sin(), 15.0);
        let r = detect_oscillation_series(&t, &v, 0.0, &OscillationCriteria::default());
        assert!(r.inconclusive && !r.oscillating);
    }
}
