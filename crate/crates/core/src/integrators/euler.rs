use super::dense::{DenseSolution, SolutionSkeleton};
use crate::error::{Error, Result};
use crate::systems::{OdeSystem, StateVector};

/// Fixed-step explicit Euler, `y_{n+1} = y_n + h f(t_n, y_n)`.
///
/// The step count is `(t_end - t0) / h` rounded to the nearest integer
/// (at least one); the last step is clipped to end on `t_end`. Dense output
/// is cubic Hermite through the stored field values.
pub fn integrate_euler_fixed<S: OdeSystem>(
    system: &S,
    y0: &StateVector,
    t0: f64,
    t_end: f64,
    h: f64,
) -> Result<DenseSolution> {
    let n = system.dimension();
    if y0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y0.dim(),
        });
    }
    if !(h > 0.0) || !(t_end > t0) {
        return Err(Error::InvalidArgument(format!(
            "need h > 0 and t_end > t0 (got h = {h}, [{t0}, {t_end}])"
        )));
    }
    let steps = (((t_end - t0) / h).round() as usize).max(1);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut derivatives = Vec::with_capacity(steps + 1);

    let mut y = y0.as_slice().to_vec();
    let mut f = system.eval(t0, &y);
    times.push(t0);
    states.push(y0.clone());
    derivatives.push(StateVector::new(f.clone())?);

    for k in 0..steps {
        let t = times[k];
        let t_next = if k + 1 == steps { t_end } else { t0 + (k + 1) as f64 * h };
        let dt = t_next - t;
        for (yi, fi) in y.iter_mut().zip(&f) {
            *yi += dt * fi;
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { step: k + 1, t: t_next });
        }
        system.rhs(t_next, &y, &mut f);
        times.push(t_next);
        states.push(StateVector::new(y.clone())?);
        derivatives.push(StateVector::new(f.clone())?);
    }

    Ok(DenseSolution::from_skeleton(SolutionSkeleton {
        times,
        states,
        derivatives,
        steps,
        rejected_steps: 0,
    }))
}
