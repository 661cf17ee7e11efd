//! Largest Lyapunov exponent by two-trajectory renormalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{integrate_adaptive, SolverConfig};
use crate::systems::{norm2, OdeSystem, StateVector};

pub const DEFAULT_TRANSIENT: f64 = 5.0;
pub const DEFAULT_RENORM_INTERVAL: f64 = 0.5;
pub const DEFAULT_DELTA0: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    /// Renormalization intervals entering the average.
    pub intervals: usize,
    pub transient: f64,
    pub renorm_interval: f64,
    pub delta0: f64,
}

/// `(y, d)` where `y` is the reference trajectory and `y + d` the
/// perturbed one: `ḋ = f(y + d) − f(y)`. Carrying `d` directly keeps its
/// relative accuracy independent of the size of `y`.
struct PairSystem<'a, S> {
    system: &'a S,
}

impl<S: OdeSystem> OdeSystem for PairSystem<'_, S> {
    fn dimension(&self) -> usize {
        2 * self.system.dimension()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.system.dimension();
        let (base, diff) = y.split_at(n);
        let (dbase, ddiff) = dy.split_at_mut(n);
        self.system.rhs(t, base, dbase);
        let shifted: Vec<f64> = base.iter().zip(diff).map(|(a, b)| a + b).collect();
        self.system.rhs(t, &shifted, ddiff);
        for (o, b) in ddiff.iter_mut().zip(dbase.iter()) {
            *o -= b;
        }
    }
}

/// Estimates the largest exponent over `[transient, t_total]` after
/// discarding `[0, transient]`.
pub fn lyapunov_estimate<S: OdeSystem>(
    system: &S,
    y0: &StateVector,
    t_total: f64,
    renorm_interval: f64,
    delta0: f64,
) -> Result<LyapunovEstimate> {
    lyapunov_estimate_with_transient(system, y0, t_total, renorm_interval, delta0, DEFAULT_TRANSIENT)
}

pub fn lyapunov_estimate_with_transient<S: OdeSystem>(
    system: &S,
    y0: &StateVector,
    t_total: f64,
    renorm_interval: f64,
    delta0: f64,
    transient: f64,
) -> Result<LyapunovEstimate> {
    let n = system.dimension();
    if y0.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y0.dim() });
    }
    if !(renorm_interval > 0.0) || !(delta0 > 0.0) || !(transient >= 0.0) {
        return Err(Error::InvalidArgument("need renorm_interval > 0, delta0 > 0, transient >= 0".into()));
    }
    if !(t_total >= 20.0 * renorm_interval) || !(t_total - transient >= renorm_interval) {
        return Err(Error::InvalidArgument(format!(
            "t_total = {t_total} too short for interval {renorm_interval} after transient {transient}"
        )));
    }
    let pair = PairSystem { system };
    let config = SolverConfig::with_tolerances(1e-10, 1e-4 * delta0);
    let mut state: Vec<f64> = y0.as_slice().to_vec();
    let dir = delta0 / (n as f64).sqrt();
    state.extend(std::iter::repeat(dir).take(n));

    let mut t = 0.0;
    let mut sum = 0.0;
    let mut intervals = 0;
    let total_intervals = (t_total / renorm_interval).round() as usize;
    for k in 0..total_intervals {
        let t_next = (k + 1) as f64 * renorm_interval;
        let sol = integrate_adaptive(&pair, &StateVector::new(state)?, t, t_next, &config)?;
        state = sol.final_state().as_slice().to_vec();
        let growth = norm2(&state[n..]) / delta0;
        if !(growth > 0.0) || !growth.is_finite() {
            return Err(Error::Divergence { step: k, t: t_next });
        }
        if t >= transient {
            sum += growth.ln();
            intervals += 1;
        }
        for d in &mut state[n..] {
            *d /= growth;
        }
        t = t_next;
    }
    if intervals == 0 {
        return Err(Error::InsufficientData("no intervals after transient".into()));
    }
    Ok(LyapunovEstimate {
        lambda: sum / (intervals as f64 * renorm_interval),
        intervals,
        transient,
        renorm_interval,
        delta0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::LinearSystem;

    #[test]
    fn linear_decay() {
        let e = lyapunov_estimate(&LinearSystem::scalar(-1.0), &[1.0].into(), 50.0, 0.5, 1e-8).unwrap();
        assert!((e.lambda + 1.0).abs() < 0.05, "{e:?}");
        assert_eq!(e.intervals, 90);
    }

    #[test]
    fn harmonic_is_neutral() {
        let e = lyapunov_estimate(&LinearSystem::harmonic(), &[1.0, 0.0].into(), 100.0, 0.5, 1e-8).unwrap();
        assert!(e.lambda.abs() < 0.05, "{e:?}");
    }

    #[test]
    fn preconditions() {
        let sys = LinearSystem::scalar(-1.0);
        assert!(lyapunov_estimate(&sys, &[1.0].into(), 5.0, 0.5, 1e-8).is_err());
        assert!(lyapunov_estimate(&sys, &[1.0].into(), 50.0, 0.5, 0.0).is_err());
        assert!(lyapunov_estimate(&sys, &[1.0, 2.0].into(), 50.0, 0.5, 1e-8).is_err());
    }
}
