//! Periodicity test on the trailing part of a trajectory.
//!
//! The mean-subtracted intensity `|alpha|^2` on the trailing window is
//! autocorrelated (Pearson correlation between the window and its lagged
//! copy). The first local maximum after the first zero crossing whose height is
//! within 90% of the best maximum is taken as the dominant period.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};

/// Autocorrelation height that qualifies a signal as periodic.
pub const PERIODICITY_THRESHOLD: f64 = 0.95;
/// Fraction of the run analysed by default.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.25;

const MIN_WINDOW_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleReport {
    pub is_periodic: bool,
    /// Oscillation period (1/omega_r); zero when no peak was found.
    pub period: f64,
    /// Peak-to-peak `|alpha|^2` on the window.
    pub amplitude: f64,
    pub autocorrelation_peak: f64,
    pub analysis_window: (f64, f64),
    /// Window signal had (numerically) zero variance.
    pub degenerate: bool,
}

pub fn detect_limit_cycle(traj: &Trajectory, window_fraction: f64) -> Result<LimitCycleReport> {
    detect_periodicity(&traj.times, &traj.intensities(), window_fraction)
}

/// Periodicity test on a uniformly sampled signal.
pub fn detect_periodicity(
    times: &[f64],
    signal: &[f64],
    window_fraction: f64,
) -> Result<LimitCycleReport> {
    if times.len() != signal.len() {
        return Err(Error::invalid("signal", "times and values differ in length"));
    }
    if !(window_fraction > 0.0 && window_fraction <= 0.5) {
        return Err(Error::WindowTooShort {
            reason: format!(
                "window fraction {window_fraction} must lie in (0, 0.5] so the run spans at least twice the window"
            ),
        });
    }
    let n_total = times.len();
    let n_window = ((n_total as f64) * window_fraction).floor() as usize;
    if n_window < MIN_WINDOW_SAMPLES {
        return Err(Error::WindowTooShort {
            reason: format!("{n_window} samples in window, need at least {MIN_WINDOW_SAMPLES}"),
        });
    }
    let start = n_total - n_window;
    let t = &times[start..];
    let x = &signal[start..];
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;

    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let amplitude = hi - lo;
    let window = (t[0], t[t.len() - 1]);

    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let energy: f64 = centered.iter().map(|v| v * v).sum();
    let scale = mean.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    if amplitude <= 1e-12 * scale || energy == 0.0 {
        return Ok(LimitCycleReport {
            is_periodic: false,
            period: 0.0,
            amplitude,
            autocorrelation_peak: 0.0,
            analysis_window: window,
            degenerate: true,
        });
    }

    let acf = autocorrelation(&centered, centered.len() / 2);
    let Some(first_negative) = acf.iter().position(|&r| r < 0.0) else {
        return Ok(LimitCycleReport {
            is_periodic: false,
            period: 0.0,
            amplitude,
            autocorrelation_peak: 0.0,
            analysis_window: window,
            degenerate: false,
        });
    };

    let maxima: Vec<usize> = (first_negative.max(1)..acf.len().saturating_sub(1))
        .filter(|&l| acf[l] > 0.0 && acf[l] >= acf[l - 1] && acf[l] >= acf[l + 1])
        .collect();
    let best = maxima.iter().map(|&l| acf[l]).fold(f64::NEG_INFINITY, f64::max);
    let Some(&lag) = maxima.iter().find(|&&l| acf[l] >= 0.9 * best) else {
        return Ok(LimitCycleReport {
            is_periodic: false,
            period: 0.0,
            amplitude,
            autocorrelation_peak: 0.0,
            analysis_window: window,
            degenerate: false,
        });
    };

    let (y0, y1, y2) = (acf[lag - 1], acf[lag], acf[lag + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    let offset = if curvature < 0.0 {
        (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let peak = y1.clamp(-1.0, 1.0);
    Ok(LimitCycleReport {
        is_periodic: peak >= PERIODICITY_THRESHOLD,
        period: (lag as f64 + offset) * dt,
        amplitude,
        autocorrelation_peak: peak,
        analysis_window: window,
        degenerate: false,
    })
}

/// Pearson correlation of `x[..n-l]` with `x[l..]` for `l = 0..=max_lag`.
fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    (0..=max_lag)
        .map(|l| {
            let a = &x[..n - l];
            let b = &x[l..];
            let ab: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            let aa: f64 = a.iter().map(|p| p * p).sum();
            let bb: f64 = b.iter().map(|q| q * q).sum();
            if aa == 0.0 || bb == 0.0 {
                0.0
            } else {
                ab / (aa * bb).sqrt()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, t_end: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let n = (t_end / dt).round() as usize + 1;
        let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let y = t.iter().map(|&t| f(t)).collect();
        (t, y)
    }

    #[test]
    fn constant_signal_is_degenerate() {
        let (t, y) = sampled(|_| 0.3, 100.0, 0.01);
        let r = detect_periodicity(&t, &y, 0.25).unwrap();
        assert!(!r.is_periodic && r.degenerate);
    }

    #[test]
    fn cosine_period_recovered() {
        let period = 3.0;
        let (t, y) = sampled(
            |t| 0.1 + 0.01 * (2.0 * std::f64::consts::PI * t / period).cos(),
            200.0,
            0.01,
        );
        let r = detect_periodicity(&t, &y, 0.25).unwrap();
        assert!(r.is_periodic);
        assert!((r.period - period).abs() / period < 0.01, "{}", r.period);
        assert!((r.amplitude - 0.02).abs() < 1e-4);
        assert!(r.autocorrelation_peak > 0.99);
    }

    #[test]
    fn harmonic_content_keeps_fundamental() {
        let w = 2.0 * std::f64::consts::PI / 4.0;
        let (t, y) = sampled(|t| (w * t).cos() + 0.6 * (2.0 * w * t + 0.3).cos(), 200.0, 0.01);
        let r = detect_periodicity(&t, &y, 0.25).unwrap();
        assert!(r.is_periodic);
        assert!((r.period - 4.0).abs() < 0.04, "{}", r.period);
    }

    #[test]
    fn incommensurate_mixture_is_not_periodic() {
        let (t, y) = sampled(
            |t| (1.0 * t).sin() + (std::f64::consts::SQRT_2 * 2.3 * t).sin() + (0.37 * t).cos(),
            200.0,
            0.01,
        );
        let r = detect_periodicity(&t, &y, 0.25).unwrap();
        assert!(!r.is_periodic, "{r:?}");
    }

    #[test]
    fn window_checks() {
        let (t, y) = sampled(|t| t.sin(), 1.0, 0.1);
        assert!(matches!(
            detect_periodicity(&t, &y, 0.25),
            Err(Error::WindowTooShort { .. })
        ));
        let (t, y) = sampled(|t| t.sin(), 100.0, 0.01);
        assert!(detect_periodicity(&t, &y, 0.75).is_err());
    }
}
