use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{integrate_adaptive, SolverConfig};
use crate::stats::least_squares_fit;
use crate::systems::{ForcedOscillator, ForcedOscillatorParams};

const SAMPLE_SPACING: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecularFit {
    pub epsilon: f64,
    pub omega: f64,
    /// Slope of the line through the local maxima of `|y(t)|`.
    pub slope: f64,
    pub intercept: f64,
    /// `(t, |y(t)|)` at each local maximum.
    pub maxima: Vec<[f64; 2]>,
}

/// Integrates `ÿ + y = ε·sin(ωt)` from rest and fits a line to the local
/// maxima of `|y|`.
pub fn secular_envelope(epsilon: f64, omega: f64, t_end: f64) -> Result<SecularFit> {
    if !(epsilon >= 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("need epsilon >= 0 and t_end > 0".into()));
    }
    let params = ForcedOscillatorParams::new(epsilon, omega, 0.0)?;
    let sys = ForcedOscillator::new(params);
    let sol = integrate_adaptive(&sys, &[0.0, 0.0].into(), 0.0, t_end, &SolverConfig::tol(1e-10))?;
    let n = (t_end / SAMPLE_SPACING).floor() as usize;
    let mut amp = Vec::with_capacity(n + 1);
    let mut buf = [0.0; 2];
    for k in 0..=n {
        let t = (k as f64 * SAMPLE_SPACING).min(t_end);
        sol.eval_into(t, 0, &mut buf)?;
        amp.push((t, buf[0].abs()));
    }
    let maxima: Vec<[f64; 2]> = amp
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
        .map(|w| [w[1].0, w[1].1])
        .collect();
    if maxima.len() < 2 {
        if amp.iter().all(|a| a.1 == 0.0) {
            return Ok(SecularFit {
                epsilon,
                omega,
                slope: 0.0,
                intercept: 0.0,
                maxima,
            });
        }
        return Err(Error::InsufficientData("fewer than two local maxima".into()));
    }
    let ts: Vec<f64> = maxima.iter().map(|m| m[0]).collect();
    let vs: Vec<f64> = maxima.iter().map(|m| m[1]).collect();
    let (slope, intercept) = least_squares_fit(&ts, &vs)?;
    Ok(SecularFit {
        epsilon,
        omega,
        slope,
        intercept,
        maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unforced_is_flat() {
        let f = secular_envelope(0.0, 1.0, 50.0).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn resonant_growth() {
        let f = secular_envelope(0.01, 1.0, 200.0).unwrap();
        assert!((f.slope - 0.005).abs() < 0.0005, "{}", f.slope);
    }
}
