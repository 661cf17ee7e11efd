use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{OdeSystem, StateVector};

/// The discrete output (t_n, y_n) of a stepper, together with f(t_n, y_n).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionSkeleton {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `derivatives[i]` is the field evaluated at `(times[i], states[i])`.
    pub derivatives: Vec<StateVector>,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl SolutionSkeleton {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, StateVector::dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolantKind {
    /// Piecewise cubic Hermite through values and derivatives at the nodes.
    /// C¹ globally; zero residual at nodes.
    CubicHermite,
    /// The stepper's own continuous extension (fourth order for
    /// Dormand–Prince). Also C¹ and exact at the nodes.
    MethodOrder,
}

/// A continuously evaluable solution built over a skeleton.
///
/// Immutable after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseSolution {
    skeleton: SolutionSkeleton,
    kind: InterpolantKind,
    /// Per-step correction vectors of the method-order interpolant.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    step_coefficients: Vec<StateVector>,
}

impl DenseSolution {
    pub(crate) fn from_skeleton(skeleton: SolutionSkeleton) -> Self {
        debug_assert!(skeleton.times.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(skeleton.times.len(), skeleton.states.len());
        debug_assert_eq!(skeleton.times.len(), skeleton.derivatives.len());
        Self {
            skeleton,
            kind: InterpolantKind::CubicHermite,
            step_coefficients: Vec::new(),
        }
    }

    /// Quartic continuous extension in nested form. `coefficients[n]`
    /// carries the step's stage combination; node values and slopes are
    /// still matched exactly.
    pub(crate) fn with_step_coefficients(skeleton: SolutionSkeleton, coefficients: Vec<StateVector>) -> Self {
        debug_assert_eq!(coefficients.len() + 1, skeleton.times.len());
        let mut out = Self::from_skeleton(skeleton);
        out.kind = InterpolantKind::MethodOrder;
        out.step_coefficients = coefficients;
        out
    }

    /// The same skeleton with cubic Hermite interpolation.
    pub fn to_hermite(&self) -> Self {
        Self::from_skeleton(self.skeleton.clone())
    }

    /// Builds a Hermite dense solution through `(times, states)` with node
    /// slopes taken from `system`.
    pub fn from_nodes<S: OdeSystem>(
        times: Vec<f64>,
        states: Vec<StateVector>,
        system: &S,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != states.len() {
            return Err(Error::InvalidArgument(
                "need at least two nodes and one state per time".into(),
            ));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        let derivatives = times
            .iter()
            .zip(&states)
            .map(|(&t, y)| StateVector::new(system.eval(t, y.as_slice())))
            .collect::<Result<Vec<_>>>()?;
        let steps = times.len() - 1;
        Ok(Self::from_skeleton(SolutionSkeleton {
            times,
            states,
            derivatives,
            steps,
            rejected_steps: 0,
        }))
    }

    /// Same skeleton, re-interpolated with node slopes from another field.
    ///
    /// Used to measure the residual of a skeleton against a modified
    /// equation: the interpolant must carry that equation's slopes.
    pub fn reinterpolate<S: OdeSystem>(&self, system: &S) -> Result<Self> {
        let mut out = Self::from_nodes(
            self.skeleton.times.clone(),
            self.skeleton.states.clone(),
            system,
        )?;
        out.skeleton.steps = self.skeleton.steps;
        out.skeleton.rejected_steps = self.skeleton.rejected_steps;
        Ok(out)
    }

    pub fn skeleton(&self) -> &SolutionSkeleton {
        &self.skeleton
    }

    pub fn kind(&self) -> InterpolantKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.skeleton.dim()
    }

    pub fn t_start(&self) -> f64 {
        self.skeleton.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.skeleton.times.last().expect("non-empty skeleton")
    }

    /// Final state of the skeleton.
    pub fn final_state(&self) -> &StateVector {
        self.skeleton.states.last().expect("non-empty skeleton")
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let (start, end) = (self.t_start(), self.t_end());
        if !(t >= start && t <= end) {
            return Err(Error::OutOfRange { t, start, end });
        }
        Ok(())
    }

    /// Index `n` with `times[n] <= t < times[n+1]` (or the last interval).
    fn interval(&self, t: f64) -> usize {
        let times = &self.skeleton.times;
        let n = times.partition_point(|&x| x <= t).saturating_sub(1);
        n.min(times.len() - 2)
    }

    /// Evaluates the interpolant (`derivative_order == 0`) or its time
    /// derivative (`derivative_order == 1`).
    pub fn eval(&self, t: f64, derivative_order: u8) -> Result<StateVector> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, derivative_order, &mut out)?;
        StateVector::new(out)
    }

    pub fn eval_into(&self, t: f64, derivative_order: u8, out: &mut [f64]) -> Result<()> {
        if derivative_order > 1 {
            return Err(Error::InvalidArgument(format!(
                "derivative order {derivative_order} not supported (0 or 1)"
            )));
        }
        self.check_range(t)?;
        let sk = &self.skeleton;
        if sk.times.len() == 1 {
            let src = if derivative_order == 0 { &sk.states[0] } else { &sk.derivatives[0] };
            out.copy_from_slice(src.as_slice());
            return Ok(());
        }
        let n = self.interval(t);
        for (node, tn) in [(n, sk.times[n]), (n + 1, sk.times[n + 1])] {
            if t == tn {
                let src = if derivative_order == 0 { &sk.states[node] } else { &sk.derivatives[node] };
                out.copy_from_slice(src.as_slice());
                return Ok(());
            }
        }
        let (t0, t1) = (sk.times[n], sk.times[n + 1]);
        let h = t1 - t0;
        let th = (t - t0) / h;
        let (y0, y1) = (sk.states[n].as_slice(), sk.states[n + 1].as_slice());
        let (d0, d1) = (sk.derivatives[n].as_slice(), sk.derivatives[n + 1].as_slice());
        match self.kind {
            InterpolantKind::CubicHermite => hermite(th, h, y0, y1, d0, d1, derivative_order, out),
            InterpolantKind::MethodOrder => {
                let c = self.step_coefficients[n].as_slice();
                let th1 = 1.0 - th;
                for i in 0..out.len() {
                    let r2 = y1[i] - y0[i];
                    let r3 = h * d0[i] - r2;
                    let r4 = r2 - h * d1[i] - r3;
                    let a = r4 + th1 * c[i];
                    let b = r3 + th * a;
                    let cc = r2 + th1 * b;
                    out[i] = if derivative_order == 0 {
                        y0[i] + th * cc
                    } else {
                        let da = -c[i];
                        let db = a + th * da;
                        let dc = -b + th1 * db;
                        (cc + th * dc) / h
                    };
                }
            }
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn hermite(th: f64, h: f64, y0: &[f64], y1: &[f64], d0: &[f64], d1: &[f64], order: u8, out: &mut [f64]) {
    let th2 = th * th;
    let th3 = th2 * th;
    if order == 0 {
        let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
        let h10 = th3 - 2.0 * th2 + th;
        let h01 = -2.0 * th3 + 3.0 * th2;
        let h11 = th3 - th2;
        for i in 0..out.len() {
            out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
        }
    } else {
        let g0 = (6.0 * th2 - 6.0 * th) / h;
        let g10 = 3.0 * th2 - 4.0 * th + 1.0;
        let g11 = 3.0 * th2 - 2.0 * th;
        for i in 0..out.len() {
            out[i] = g0 * (y0[i] - y1[i]) + g10 * d0[i] + g11 * d1[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::LinearSystem;

    fn decay_nodes() -> DenseSolution {
        let sys = LinearSystem::scalar(-1.0);
        let times = vec![0.0, 0.25, 0.5, 1.0];
        let states = times
            .iter()
            .map(|&t: &f64| StateVector::from([(-t).exp()]))
            .collect();
        DenseSolution::from_nodes(times, states, &sys).unwrap()
    }

    #[test]
    fn nodes_are_reproduced_exactly() {
        let d = decay_nodes();
        let sk = d.skeleton().clone();
        for i in 0..sk.len() {
            assert_eq!(d.eval(sk.times[i], 0).unwrap(), sk.states[i]);
            assert_eq!(d.eval(sk.times[i], 1).unwrap(), sk.derivatives[i]);
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let d = decay_nodes();
        assert!(matches!(d.eval(-0.1, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(d.eval(1.0 + 1e-12, 1), Err(Error::OutOfRange { .. })));
        assert!(d.eval(f64::NAN, 0).is_err());
        assert!(d.eval(0.5, 2).is_err());
    }

    #[test]
    fn continuity_across_nodes() {
        let d = decay_nodes();
        let t = 0.5;
        let eps = 1e-9;
        for order in 0..=1 {
            let l = d.eval(t - eps, order).unwrap()[0];
            let r = d.eval(t + eps, order).unwrap()[0];
            assert!((l - r).abs() < 1e-7, "order {order}: {l} vs {r}");
        }
    }

    #[test]
    fn rejects_non_increasing_times() {
        let sys = LinearSystem::scalar(-1.0);
        let s = vec![StateVector::from([1.0]); 2];
        assert!(DenseSolution::from_nodes(vec![1.0, 1.0], s, &sys).is_err());
    }
}
