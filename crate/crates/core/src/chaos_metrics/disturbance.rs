//! Bounded persistent disturbances `v(t)` with `‖v(t)‖∞ ≤ 1`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{OdeSystem, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisturbanceKind {
    /// Equal-weight sum of sines with seed-drawn frequencies and phases.
    MultiSine,
    /// Piecewise-linear interpolation of seed-drawn knots in `[-1, 1]`.
    SeededPiecewise,
}

const SINE_TERMS: usize = 3;
const KNOT_SPACING: f64 = 0.25;

/// A disturbance `ε·v(t)`. `v` is fully determined by `(kind, seed, dimension)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub epsilon: f64,
    pub kind: DisturbanceKind,
    pub seed: u64,
    pub dimension: usize,
    /// Per component; used by `MultiSine`.
    pub frequencies: Vec<Vec<f64>>,
    /// Per component; used by `MultiSine`.
    pub phases: Vec<Vec<f64>>,
    /// Knot spacing in time; used by `SeededPiecewise`.
    pub knot_spacing: f64,
}

impl DisturbanceSpec {
    pub fn new(epsilon: f64, kind: DisturbanceKind, seed: u64, dimension: usize) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be finite and >= 0 (got {epsilon})")));
        }
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut frequencies = Vec::with_capacity(dimension);
        let mut phases = Vec::with_capacity(dimension);
        if kind == DisturbanceKind::MultiSine {
            for _ in 0..dimension {
                frequencies.push((0..SINE_TERMS).map(|_| rng.gen_range(0.5..3.0)).collect());
                phases.push((0..SINE_TERMS).map(|_| rng.gen_range(0.0..TAU)).collect());
            }
        }
        Ok(Self {
            epsilon,
            kind,
            seed,
            dimension,
            frequencies,
            phases,
            knot_spacing: KNOT_SPACING,
        })
    }

    pub fn multi_sine(epsilon: f64, seed: u64, dimension: usize) -> Result<Self> {
        Self::new(epsilon, DisturbanceKind::MultiSine, seed, dimension)
    }

    pub fn seeded_piecewise(epsilon: f64, seed: u64, dimension: usize) -> Result<Self> {
        Self::new(epsilon, DisturbanceKind::SeededPiecewise, seed, dimension)
    }

    /// Same signal shape with a different amplitude.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let mut out = Self::new(epsilon, self.kind, self.seed, self.dimension)?;
        out.frequencies.clone_from(&self.frequencies);
        out.phases.clone_from(&self.phases);
        out.knot_spacing = self.knot_spacing;
        Ok(out)
    }

    /// Writes `v(t)` (unscaled) into `out`.
    pub fn unit_signal_into(&self, t: f64, out: &mut [f64]) {
        match self.kind {
            DisturbanceKind::MultiSine => {
                for (i, o) in out.iter_mut().enumerate() {
                    let (f, p) = (&self.frequencies[i], &self.phases[i]);
                    let s: f64 = f.iter().zip(p).map(|(w, ph)| (w * t + ph).sin()).sum();
                    *o = (s / f.len() as f64).clamp(-1.0, 1.0);
                }
            }
            DisturbanceKind::SeededPiecewise => {
                let u = t / self.knot_spacing;
                let k = u.floor();
                let frac = u - k;
                for (i, o) in out.iter_mut().enumerate() {
                    let a = self.knot(i, k as i64);
                    let b = self.knot(i, k as i64 + 1);
                    *o = (a + frac * (b - a)).clamp(-1.0, 1.0);
                }
            }
        }
    }

    /// Knot value for `component` at knot index `k`, by random access into
    /// the seeded stream.
    fn knot(&self, component: usize, k: i64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(component as u64);
        rng.set_word_pos((k as i128 as u128).wrapping_mul(2) & ((1u128 << 68) - 1));
        rng.gen_range(-1.0..=1.0)
    }
}

/// `v(t)` with `‖v(t)‖∞ ≤ 1`; the amplitude `ε` is not applied.
pub fn disturbance_signal(spec: &DisturbanceSpec, t: f64, dimension: usize) -> Result<StateVector> {
    if dimension != spec.dimension {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension,
            got: dimension,
        });
    }
    let mut out = vec![0.0; dimension];
    spec.unit_signal_into(t, &mut out);
    StateVector::new(out)
}

/// `ẏ = f(t, y) + ε·v(t)`.
#[derive(Clone, Debug)]
pub struct DisturbedSystem<S> {
    pub system: S,
    pub disturbance: DisturbanceSpec,
}

impl<S: OdeSystem> DisturbedSystem<S> {
    pub fn new(system: S, disturbance: DisturbanceSpec) -> Result<Self> {
        if system.dimension() != disturbance.dimension {
            return Err(Error::DimensionMismatch {
                expected: system.dimension(),
                got: disturbance.dimension,
            });
        }
        Ok(Self { system, disturbance })
    }
}

impl<S: OdeSystem> OdeSystem for DisturbedSystem<S> {
    fn dimension(&self) -> usize {
        self.system.dimension()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.system.rhs(t, y, dy);
        let eps = self.disturbance.epsilon;
        if eps == 0.0 {
            return;
        }
        let mut v = vec![0.0; dy.len()];
        self.disturbance.unit_signal_into(t, &mut v);
        for (d, vi) in dy.iter_mut().zip(v) {
            *d += eps * vi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_and_deterministic() {
        for kind in [DisturbanceKind::MultiSine, DisturbanceKind::SeededPiecewise] {
            let a = DisturbanceSpec::new(1e-3, kind, 7, 3).unwrap();
            let b = DisturbanceSpec::new(1e-3, kind, 7, 3).unwrap();
            let c = DisturbanceSpec::new(1e-3, kind, 8, 3).unwrap();
            let mut differs = false;
            for i in 0..2000 {
                let t = -3.0 + i as f64 * 0.0137;
                let va = disturbance_signal(&a, t, 3).unwrap();
                assert!(va.norm_inf() <= 1.0);
                assert_eq!(va, disturbance_signal(&b, t, 3).unwrap());
                differs |= va != disturbance_signal(&c, t, 3).unwrap();
            }
            assert!(differs, "{kind:?}");
        }
    }

    #[test]
    fn piecewise_is_continuous() {
        let s = DisturbanceSpec::seeded_piecewise(1.0, 3, 2).unwrap();
        let k = 4.0 * s.knot_spacing;
        let l = disturbance_signal(&s, k - 1e-12, 2).unwrap();
        let r = disturbance_signal(&s, k, 2).unwrap();
        assert!(l.distance_inf(&r) < 1e-9);
    }

    #[test]
    fn multi_sine_has_small_time_average() {
        let s = DisturbanceSpec::multi_sine(1.0, 11, 3).unwrap();
        let n = 200_000;
        let dt = 1000.0 / n as f64;
        let mut acc = [0.0; 3];
        for i in 0..n {
            let v = disturbance_signal(&s, (i as f64 + 0.5) * dt, 3).unwrap();
            for j in 0..3 {
                acc[j] += v[j] * dt;
            }
        }
        for a in acc {
            assert!((a / 1000.0).abs() < 0.05);
        }
    }

    #[test]
    fn dimension_checks() {
        let s = DisturbanceSpec::multi_sine(1.0, 1, 3).unwrap();
        assert!(disturbance_signal(&s, 0.0, 2).is_err());
        assert!(DisturbanceSpec::multi_sine(-1.0, 1, 3).is_err());
        assert!(DisturbedSystem::new(crate::systems::LinearSystem::harmonic(), s).is_err());
    }
}
