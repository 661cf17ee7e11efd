//! Residual (defect) of a dense solution: r(t) = Ẏ(t) − f(t, Y(t)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::DenseSolution;
use crate::systems::{norm2, OdeSystem, StateVector};

/// Sampled residual of a dense solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub residuals: Vec<StateVector>,
    /// Euclidean norm of each residual sample.
    pub norms: Vec<f64>,
    /// `norms[i] / max(1, ‖Y(times[i])‖₂)`.
    pub relative_norms: Vec<f64>,
    pub max_norm: f64,
    pub max_relative_norm: f64,
}

impl ResidualSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the largest absolute residual.
    pub fn argmax(&self) -> Option<f64> {
        argmax(&self.norms).map(|i| self.times[i])
    }
}

fn argmax(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b >= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

/// One residual sample: returns (r(t), ‖Y(t)‖₂). One field evaluation.
fn sample<S: OdeSystem>(
    solution: &DenseSolution,
    system: &S,
    t: f64,
    y: &mut [f64],
    dy: &mut [f64],
    f: &mut [f64],
) -> Result<(Vec<f64>, f64)> {
    solution.eval_into(t, 0, y)?;
    solution.eval_into(t, 1, dy)?;
    system.rhs(t, y, f);
    let r = dy.iter().zip(f.iter()).map(|(a, b)| a - b).collect();
    Ok((r, norm2(y)))
}

/// Residual at an explicit list of times.
pub fn residual_series_at<S: OdeSystem>(
    solution: &DenseSolution,
    system: &S,
    times: &[f64],
) -> Result<ResidualSeries> {
    let n = solution.dim();
    if system.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: system.dimension(),
        });
    }
    let (mut y, mut dy, mut f) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut residuals = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    let mut relative_norms = Vec::with_capacity(times.len());
    for &t in times {
        let (r, ynorm) = sample(solution, system, t, &mut y, &mut dy, &mut f)?;
        let nr = norm2(&r);
        norms.push(nr);
        relative_norms.push(nr / ynorm.max(1.0));
        residuals.push(StateVector::new(r)?);
    }
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let max_relative_norm = relative_norms.iter().copied().fold(0.0, f64::max);
    Ok(ResidualSeries {
        times: times.to_vec(),
        residuals,
        norms,
        relative_norms,
        max_norm,
        max_relative_norm,
    })
}

/// Residual at `n_samples` equally spaced times in `[t_from, t_to]`.
pub fn residual_series<S: OdeSystem>(
    solution: &DenseSolution,
    system: &S,
    t_from: f64,
    t_to: f64,
    n_samples: usize,
) -> Result<ResidualSeries> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("n_samples must be >= 2".into()));
    }
    if !(t_from <= t_to) {
        return Err(Error::InvalidArgument(format!("empty range [{t_from}, {t_to}]")));
    }
    for t in [t_from, t_to] {
        if t < solution.t_start() || t > solution.t_end() {
            return Err(Error::OutOfRange {
                t,
                start: solution.t_start(),
                end: solution.t_end(),
            });
        }
    }
    let step = (t_to - t_from) / (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples)
        .map(|i| if i + 1 == n_samples { t_to } else { t_from + i as f64 * step })
        .collect();
    residual_series_at(solution, system, &times)
}

/// Times `t_n + (j / samples_per_step)(t_{n+1} − t_n)`, `j = 0..samples_per_step`,
/// for every step, plus the final node. Doubling `samples_per_step` gives a
/// superset of the previous sample set.
pub fn per_step_sample_times(solution: &DenseSolution, samples_per_step: usize) -> Vec<f64> {
    let times = &solution.skeleton().times;
    let s = samples_per_step.max(1);
    let mut out = Vec::with_capacity((times.len() - 1) * s + 1);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        for j in 0..s {
            out.push(w[0] + h * (j as f64 / s as f64));
        }
    }
    out.push(*times.last().unwrap());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxResidual {
    pub value: f64,
    pub t: f64,
}

/// Maximum Euclidean residual over a uniform per-step sampling of the whole
/// span. With `relative`, each sample is divided by `max(1, ‖Y(t)‖₂)`.
pub fn max_residual<S: OdeSystem>(
    solution: &DenseSolution,
    system: &S,
    samples_per_step: usize,
    relative: bool,
) -> Result<MaxResidual> {
    if samples_per_step == 0 {
        return Err(Error::InvalidArgument("samples_per_step must be >= 1".into()));
    }
    let times = per_step_sample_times(solution, samples_per_step);
    let series = residual_series_at(solution, system, &times)?;
    let v = if relative { &series.relative_norms } else { &series.norms };
    let i = argmax(v).expect("at least one sample");
    Ok(MaxResidual {
        value: v[i],
        t: series.times[i],
    })
}
