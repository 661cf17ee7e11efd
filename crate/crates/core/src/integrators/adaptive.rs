//! Dormand–Prince 5(4) with an elementary step-size controller.

use serde::{Deserialize, Serialize};

use super::dense::{DenseSolution, InterpolantKind, SolutionSkeleton};
use crate::error::{Error, Result};
use crate::systems::{OdeSystem, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` selects it from the local curvature.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub safety: f64,
    pub step_shrink_floor: f64,
    pub step_grow_cap: f64,
    #[serde(default = "default_interpolant")]
    pub interpolant: InterpolantKind,
}

fn default_interpolant() -> InterpolantKind {
    InterpolantKind::MethodOrder
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::with_tolerances(1e-8, 1e-8)
    }
}

impl SolverConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_init: None,
            h_max: f64::INFINITY,
            safety: 0.9,
            step_shrink_floor: 0.2,
            step_grow_cap: 5.0,
            interpolant: default_interpolant(),
        }
    }

    pub fn tol(tol: f64) -> Self {
        Self::with_tolerances(tol, tol)
    }

    pub fn with_interpolant(mut self, kind: InterpolantKind) -> Self {
        self.interpolant = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return bad("rtol and atol must be > 0");
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad("safety must lie in (0, 1)");
        }
        if let Some(h) = self.h_init {
            if !(h > 0.0) {
                return bad("h_init must be > 0");
            }
        }
        if !(self.h_max > 0.0) {
            return bad("h_max must be > 0");
        }
        if !(self.step_shrink_floor > 0.0 && self.step_shrink_floor < 1.0)
            || !(self.step_grow_cap > 1.0)
        {
            return bad("need 0 < step_shrink_floor < 1 < step_grow_cap");
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dense-output weights of the quartic continuous extension.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const UNDERFLOW_FRACTION: f64 = 1e-14;
const MAX_NONFINITE_RETRIES: usize = 20;

fn wrms(v: &[f64], y0: &[f64], y1: &[f64], cfg: &SolverConfig) -> f64 {
    let n = v.len() as f64;
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = cfg.atol + cfg.rtol * a.abs().max(b.abs());
            (e / sc) * (e / sc)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<S: OdeSystem>(sys: &S, t0: f64, y0: &[f64], f0: &[f64], span: f64, cfg: &SolverConfig) -> f64 {
    let d0 = wrms(y0, y0, y0, cfg);
    let d1 = wrms(f0, y0, y0, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let f1 = sys.eval(t0 + h0, &y1);
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = wrms(&df, y0, y0, cfg) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `system` from `(t0, y0)` to `t_end` with adaptive steps.
///
/// Every accepted step satisfies the weighted RMS error test; the last
/// step is clipped to land on `t_end` exactly.
pub fn integrate_adaptive<S: OdeSystem>(
    system: &S,
    y0: &StateVector,
    t0: f64,
    t_end: f64,
    config: &SolverConfig,
) -> Result<DenseSolution> {
    config.validate()?;
    let n = system.dimension();
    if y0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y0.dim(),
        });
    }
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite t_end > t0 (got [{t0}, {t_end}])"
        )));
    }
    if !y0.is_finite() {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }

    let span = t_end - t0;
    let h_floor = UNDERFLOW_FRACTION * span;
    let mut y = y0.as_slice().to_vec();
    let mut f = system.eval(t0, &y);
    let mut t = t0;

    let mut sk = SolutionSkeleton {
        times: vec![t0],
        states: vec![y0.clone()],
        derivatives: vec![StateVector::new(f.clone())?],
        steps: 0,
        rejected_steps: 0,
    };

    let mut h = config
        .h_init
        .unwrap_or_else(|| initial_step(system, t0, &y, &f, span, config))
        .min(config.h_max)
        .min(span);

    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let mut nonfinite_retries = 0;
    let dense = config.interpolant == InterpolantKind::MethodOrder;
    let mut coefficients = Vec::new();

    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h < h_floor {
            return Err(Error::StepSizeUnderflow {
                t,
                h,
                partial: Box::new(finish(sk, coefficients, dense)),
            });
        }
        let t_new = if last { t_end } else { t + h };

        k[0].copy_from_slice(&f);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += h * A[s][j] * k[j][i];
                }
                stage[i] = acc;
            }
            if s == 6 {
                y_new.copy_from_slice(&stage);
                system.rhs(t_new, &stage, &mut k[6]);
            } else {
                system.rhs(t + C[s] * h, &stage, &mut k[s]);
            }
        }
        for i in 0..n {
            err_vec[i] = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        }
        let err = wrms(&err_vec, &y, &y_new, config);

        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            nonfinite_retries += 1;
            sk.rejected_steps += 1;
            if nonfinite_retries > MAX_NONFINITE_RETRIES {
                return Err(Error::Divergence {
                    step: sk.steps,
                    t,
                });
            }
            h *= config.step_shrink_floor;
            continue;
        }
        nonfinite_retries = 0;

        let factor = if err == 0.0 {
            config.step_grow_cap
        } else {
            (config.safety * err.powf(-0.2)).clamp(config.step_shrink_floor, config.step_grow_cap)
        };

        if err <= 1.0 {
            if dense {
                let c: Vec<f64> = (0..n).map(|i| h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>()).collect();
                coefficients.push(StateVector::new(c)?);
            }
            t = t_new;
            y.copy_from_slice(&y_new);
            f.copy_from_slice(&k[6]);
            sk.times.push(t);
            sk.states.push(StateVector::new(y.clone())?);
            sk.derivatives.push(StateVector::new(f.clone())?);
            sk.steps += 1;
            h = (h * factor).min(config.h_max);
        } else {
            sk.rejected_steps += 1;
            h *= factor.min(1.0);
        }
    }

    Ok(finish(sk, coefficients, dense))
}

fn finish(sk: SolutionSkeleton, coefficients: Vec<StateVector>, dense: bool) -> DenseSolution {
    if dense && sk.len() > 1 {
        DenseSolution::with_step_coefficients(sk, coefficients)
    } else {
        DenseSolution::from_skeleton(sk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::LinearSystem;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::tol(1e-8).validate().is_ok());
        assert!(SolverConfig::tol(0.0).validate().is_err());
        let mut c = SolverConfig::tol(1e-6);
        c.safety = 1.0;
        assert!(c.validate().is_err());
        c.safety = 0.9;
        c.h_init = Some(-1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn bad_arguments() {
        let sys = LinearSystem::scalar(-1.0);
        let cfg = SolverConfig::tol(1e-8);
        let y0 = StateVector::from([1.0]);
        assert!(integrate_adaptive(&sys, &y0, 1.0, 1.0, &cfg).is_err());
        assert!(integrate_adaptive(&sys, &StateVector::from([1.0, 2.0]), 0.0, 1.0, &cfg).is_err());
        assert!(integrate_adaptive(&sys, &StateVector::from([f64::NAN]), 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn derivatives_are_field_at_nodes() {
        let sys = LinearSystem::harmonic();
        let sol = integrate_adaptive(&sys, &[1.0, 0.0].into(), 0.0, 3.0, &SolverConfig::tol(1e-6)).unwrap();
        let sk = sol.skeleton();
        for i in 0..sk.len() {
            assert_eq!(sys.eval(sk.times[i], sk.states[i].as_slice()), sk.derivatives[i].as_slice());
        }
        assert_eq!(*sk.times.last().unwrap(), 3.0);
    }

    /// The quartic extension reproduces polynomials of degree 4 exactly.
    #[test]
    fn method_order_exact_on_quartic() {
        struct Quartic;
        impl OdeSystem for Quartic {
            fn dimension(&self) -> usize {
                1
            }
            fn rhs(&self, t: f64, _y: &[f64], dy: &mut [f64]) {
                dy[0] = 4.0 * t * t * t;
            }
        }
        let cfg = SolverConfig::tol(1e-3).with_interpolant(InterpolantKind::MethodOrder);
        let sol = integrate_adaptive(&Quartic, &[0.0].into(), 0.0, 2.0, &cfg).unwrap();
        assert_eq!(sol.kind(), InterpolantKind::MethodOrder);
        for i in 0..=40 {
            let t = i as f64 * 0.05;
            assert!((sol.eval(t, 0).unwrap()[0] - t.powi(4)).abs() < 1e-12);
            assert!((sol.eval(t, 1).unwrap()[0] - 4.0 * t.powi(3)).abs() < 1e-11);
        }
    }

    struct Blowup;
    impl OdeSystem for Blowup {
        fn dimension(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn finite_time_blowup_reports_partial_solution() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let r = integrate_adaptive(&Blowup, &[1.0].into(), 0.0, 2.0, &SolverConfig::tol(1e-8));
        match r {
            Err(Error::StepSizeUnderflow { t, partial, .. }) => {
                assert!(t < 1.001 && t > 0.99, "t = {t}");
                assert!(partial.t_end() <= t);
            }
            Err(Error::Divergence { t, .. }) => assert!(t < 1.001 && t > 0.99),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
