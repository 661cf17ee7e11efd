//! Separation of two persistently disturbed copies of one system.

use serde::{Deserialize, Serialize};

use super::disturbance::DisturbanceSpec;
use crate::error::{Error, Result};
use crate::integrators::{integrate_adaptive, DenseSolution, SolverConfig};
use crate::stats::least_squares_fit;
use crate::systems::{OdeSystem, StateVector};

pub const DEFAULT_SEPARATION_THRESHOLD: f64 = 1.0;
pub const SEPARATION_TOLERANCE: f64 = 1e-10;
/// Smallest ε the tolerance above resolves.
pub const EPSILON_FLOOR: f64 = 1e-9;

/// Both disturbed copies side by side, so they share one step sequence.
struct TwinSystem<'a, S> {
    system: &'a S,
    first: &'a DisturbanceSpec,
    second: &'a DisturbanceSpec,
}

impl<S: OdeSystem> OdeSystem for TwinSystem<'_, S> {
    fn dimension(&self) -> usize {
        2 * self.system.dimension()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.system.dimension();
        let mut v = vec![0.0; n];
        for (half, spec) in [(0, self.first), (1, self.second)] {
            let r = half * n..(half + 1) * n;
            self.system.rhs(t, &y[r.clone()], &mut dy[r.clone()]);
            if spec.epsilon != 0.0 {
                spec.unit_signal_into(t, &mut v);
                for (d, vi) in dy[r].iter_mut().zip(&v) {
                    *d += spec.epsilon * vi;
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub epsilons: [f64; 2],
    pub seeds: [u64; 2],
    /// First time with `‖y1 − y2‖∞ ≥ threshold`; `None` if not reached.
    pub time: Option<f64>,
    pub threshold: f64,
    pub horizon: f64,
    /// `(t, ‖y1 − y2‖∞)` on a uniform grid up to the crossing or horizon.
    pub curve: Vec<[f64; 2]>,
}

impl SeparationResult {
    /// The separation time, or `NotReached`.
    pub fn require_time(&self) -> Result<f64> {
        self.time.ok_or(Error::NotReached {
            threshold: self.threshold,
            horizon: self.horizon,
        })
    }
}

fn gap(sol: &DenseSolution, t: f64, n: usize, buf: &mut [f64]) -> Result<f64> {
    sol.eval_into(t, 0, buf)?;
    Ok((0..n).map(|i| (buf[i] - buf[n + i]).abs()).fold(0.0, f64::max))
}

/// Integrates both disturbed systems from `y0` up to `horizon` and returns
/// the first crossing of `threshold`. Crossings are detected at solver
/// nodes and located by bisection on the dense output.
pub fn separation_time<S: OdeSystem>(
    system: &S,
    y0: &StateVector,
    first: &DisturbanceSpec,
    second: &DisturbanceSpec,
    threshold: f64,
    horizon: f64,
) -> Result<SeparationResult> {
    let n = system.dimension();
    if y0.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y0.dim() });
    }
    for spec in [first, second] {
        if spec.dimension != n {
            return Err(Error::DimensionMismatch { expected: n, got: spec.dimension });
        }
    }
    if !(threshold > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument("threshold and horizon must be > 0".into()));
    }
    let twin = TwinSystem { system, first, second };
    let mut start = y0.as_slice().to_vec();
    start.extend_from_slice(y0.as_slice());
    let sol = integrate_adaptive(&twin, &StateVector::new(start)?, 0.0, horizon, &SolverConfig::tol(SEPARATION_TOLERANCE))?;

    let sk = sol.skeleton();
    let mut buf = vec![0.0; 2 * n];
    let node_gap = |i: usize| -> f64 {
        let s = sk.states[i].as_slice();
        (0..n).map(|j| (s[j] - s[n + j]).abs()).fold(0.0, f64::max)
    };
    let mut time = None;
    if node_gap(0) >= threshold {
        time = Some(0.0);
    } else if let Some(i) = (1..sk.len()).find(|&i| node_gap(i) >= threshold) {
        let (mut lo, mut hi) = (sk.times[i - 1], sk.times[i]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if gap(&sol, mid, n, &mut buf)? >= threshold {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        time = Some(hi);
    }

    let end = time.unwrap_or(horizon);
    let samples = 200;
    let mut curve = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = end * k as f64 / samples as f64;
        curve.push([t, gap(&sol, t, n, &mut buf)?]);
    }
    Ok(SeparationResult {
        epsilons: [first.epsilon, second.epsilon],
        seeds: [first.seed, second.seed],
        time,
        threshold,
        horizon,
        curve,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub epsilon: f64,
    /// Mean separation time over the seed pairs that separated.
    pub time: f64,
    pub times: Vec<f64>,
}

/// Least-squares fit `T ≈ slope·ln(1/ε) + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationScaling {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<ScalingPoint>,
    /// `(ε, seed pair)` runs that did not separate within the horizon.
    pub excluded: Vec<(f64, [u64; 2])>,
}

/// Fits `T` against `ln(1/ε)`. Rejects fewer than three distinct ε or a
/// range narrower than four decades.
pub fn fit_separation_scaling(epsilons: &[f64], times: &[f64]) -> Result<(f64, f64)> {
    check_epsilons(epsilons)?;
    let xs: Vec<f64> = epsilons.iter().map(|e| (1.0 / e).ln()).collect();
    least_squares_fit(&xs, times)
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidArgument("each epsilon must lie in (0, 1)".into()));
    }
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    if epsilons.len() < 3 || (hi / lo).log10() < 4.0 - 1e-9 {
        return Err(Error::InsufficientData(
            "need at least three epsilon values spanning at least four decades".into(),
        ));
    }
    Ok(())
}

/// Separation times for each ε, averaged over `seed_pairs`, regressed on
/// `ln(1/ε)`. Both copies use the shape of `template` with amplitude ε.
pub fn separation_scaling<S: OdeSystem + Sync>(
    system: &S,
    y0: &StateVector,
    template: &DisturbanceSpec,
    epsilons: &[f64],
    seed_pairs: &[[u64; 2]],
    threshold: f64,
    horizon: f64,
) -> Result<SeparationScaling> {
    use rayon::prelude::*;
    check_epsilons(epsilons)?;
    if seed_pairs.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed pair".into()));
    }
    let jobs: Vec<(f64, [u64; 2])> = epsilons
        .iter()
        .flat_map(|&e| seed_pairs.iter().map(move |&p| (e, p)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(eps, [s1, s2])| {
            let a = DisturbanceSpec::new(eps, template.kind, s1, template.dimension)?;
            let b = DisturbanceSpec::new(eps, template.kind, s2, template.dimension)?;
            Ok(separation_time(system, y0, &a, &b, threshold, horizon)?.time)
        })
        .collect::<Result<Vec<Option<f64>>>>()?;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (ei, &eps) in epsilons.iter().enumerate() {
        let mut times = Vec::new();
        for (pi, &pair) in seed_pairs.iter().enumerate() {
            match results[ei * seed_pairs.len() + pi] {
                Some(t) => times.push(t),
                None => excluded.push((eps, pair)),
            }
        }
        if !times.is_empty() {
            let time = times.iter().sum::<f64>() / times.len() as f64;
            points.push(ScalingPoint { epsilon: eps, time, times });
        }
    }
    let eps: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
    let ts: Vec<f64> = points.iter().map(|p| p.time).collect();
    let (slope, intercept) = fit_separation_scaling(&eps, &ts)?;
    Ok(SeparationScaling {
        slope,
        intercept,
        points,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::LinearSystem;

    #[test]
    fn identical_copies_never_separate() {
        let sys = LinearSystem::harmonic();
        let d = DisturbanceSpec::multi_sine(0.0, 1, 2).unwrap();
        let r = separation_time(&sys, &[1.0, 0.0].into(), &d, &d, 1e-12, 20.0).unwrap();
        assert!(r.time.is_none());
        assert!(r.curve.iter().all(|p| p[1] == 0.0));
        assert!(matches!(r.require_time(), Err(Error::NotReached { .. })));
    }

    #[test]
    fn synthetic_regression() {
        let eps = [1e-6, 1e-8, 1e-10, 1e-12];
        let ts: Vec<f64> = eps.iter().map(|e: &f64| (1.0 / e).ln() / 0.905).collect();
        let (m, _) = fit_separation_scaling(&eps, &ts).unwrap();
        assert!((m - 1.0 / 0.905).abs() < 1e-9);
        let doubled: Vec<f64> = ts.iter().map(|t| 2.0 * t).collect();
        let (m2, _) = fit_separation_scaling(&eps, &doubled).unwrap();
        assert!((m2 - 2.0 * m).abs() < 1e-9);
        assert!(fit_separation_scaling(&[1e-6, 1e-7, 1e-8], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn larger_threshold_never_earlier() {
        let sys = LinearSystem::new(crate::systems::Matrix::from_rows([[1.0, 0.0], [0.0, 1.0]]));
        let a = DisturbanceSpec::multi_sine(1e-6, 1, 2).unwrap();
        let b = DisturbanceSpec::multi_sine(1e-6, 2, 2).unwrap();
        let y0 = StateVector::from([0.5, -0.5]);
        let t1 = separation_time(&sys, &y0, &a, &b, 1e-3, 40.0).unwrap().time.unwrap();
        let t2 = separation_time(&sys, &y0, &a, &b, 1e-1, 40.0).unwrap().time.unwrap();
        assert!(t2 >= t1);
    }
}
