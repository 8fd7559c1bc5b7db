//! Burst landmarks extracted from sampled trajectories.

use crate::error::{Error, Result};

use super::Trajectory;

/// Timing and shape of an emission burst and of the dispersion minima.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstFeatures {
    pub t_delay: f64,
    pub peak_intensity: f64,
    pub fwhm: f64,
    pub t_min_pair_dispersion: f64,
    pub t_min_classical_dispersion: Option<f64>,
    /// Time at which the dipole phases are closest, i.e. the minimum of the
    /// classical phase dispersion.
    pub t_phase_convergence: Option<f64>,
}

/// Peak location, height and full width at half maximum of a sampled curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakShape {
    pub t_peak: f64,
    pub peak: f64,
    pub fwhm: f64,
}

/// Index of the earliest maximum.
pub fn earliest_argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Index of the earliest minimum.
pub fn earliest_argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Earliest argmax, peak value and FWHM by linear interpolation at half peak.
///
/// When the curve never drops below half maximum on one side of the peak, the
/// width is measured to the corresponding end of the sampled interval.
pub fn peak_shape(times: &[f64], intensity: &[f64]) -> Result<PeakShape> {
    if times.is_empty() || times.len() != intensity.len() {
        return Err(Error::FeatureExtraction(format!(
            "need equally long non-empty series, got {} times and {} values",
            times.len(),
            intensity.len()
        )));
    }
    let peak_idx = earliest_argmax(intensity).expect("non-empty");
    let peak = intensity[peak_idx];
    let floor = intensity.iter().copied().fold(f64::INFINITY, f64::min);
    if !(peak > 1e-12) || peak - floor <= 1e-12 * peak.abs().max(1.0) {
        return Err(Error::FeatureExtraction(format!(
            "intensity is flat (max {peak:.3e}, min {floor:.3e})"
        )));
    }
    let half = peak / 2.0;
    let crossing = |a: usize, b: usize| {
        let (ya, yb) = (intensity[a], intensity[b]);
        times[a] + (half - ya) / (yb - ya) * (times[b] - times[a])
    };
    let left = (0..peak_idx)
        .rev()
        .find(|&i| intensity[i] < half)
        .map_or(times[0], |i| crossing(i, i + 1));
    let right = (peak_idx + 1..intensity.len())
        .find(|&i| intensity[i] < half)
        .map_or(times[times.len() - 1], |i| crossing(i - 1, i));
    Ok(PeakShape {
        t_peak: times[peak_idx],
        peak,
        fwhm: right - left,
    })
}

/// Burst features of a master-equation trajectory, keyed on `intensity_op`.
pub fn extract_burst_features(traj: &Trajectory) -> Result<BurstFeatures> {
    if traj.records.is_empty() {
        return Err(Error::FeatureExtraction("empty trajectory".into()));
    }
    let times = traj.times();
    let intensity: Vec<f64> = traj.records.iter().map(|r| r.intensity_op).collect();
    let shape = peak_shape(&times, &intensity)?;

    let pair: Vec<f64> = traj
        .records
        .iter()
        .map(|r| r.pair_dispersion_mean)
        .collect();
    let t_min_pair_dispersion = times[earliest_argmin(&pair).expect("non-empty")];

    // Δ is absent where fewer than two phases are defined; those records are
    // skipped rather than treated as minima.
    let mut t_min_classical: Option<(f64, f64)> = None;
    for r in &traj.records {
        if let Some(delta) = r.classical_dispersion {
            if t_min_classical.is_none_or(|(_, best)| delta < best) {
                t_min_classical = Some((r.t, delta));
            }
        }
    }
    let t_min_classical_dispersion = t_min_classical.map(|(t, _)| t);

    Ok(BurstFeatures {
        t_delay: shape.t_peak,
        peak_intensity: shape.peak,
        fwhm: shape.fwhm,
        t_min_pair_dispersion,
        t_min_classical_dispersion,
        t_phase_convergence: t_min_classical_dispersion,
    })
}
