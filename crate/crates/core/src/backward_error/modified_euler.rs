//! First-order modified equation of explicit Euler.

use serde::{Deserialize, Serialize};

use super::residual::max_residual;
use crate::error::{Error, Result};
use crate::integrators::integrate_euler_fixed;
use crate::systems::{Matrix, OdeSystem, StateVector};

/// Coefficient `c` in `f + c·h·J·f` that makes the Euler skeleton a
/// second-order accurate sample of the modified flow.
pub const DEFAULT_MODIFIED_EULER_COEFFICIENT: f64 = -0.5;

/// The field `y ↦ f(y) + c·h·J_f(y)·f(y)`.
#[derive(Clone, Debug)]
pub struct ModifiedEulerField<S> {
    system: S,
    h: f64,
    coefficient: f64,
}

/// Wraps `system` in its modified-Euler field. Requires a Jacobian.
pub fn modified_euler_rhs<S: OdeSystem>(system: S, h: f64, coefficient: f64) -> Result<ModifiedEulerField<S>> {
    if !system.has_jacobian() {
        return Err(Error::MissingJacobian);
    }
    if !h.is_finite() || !coefficient.is_finite() {
        return Err(Error::InvalidArgument("h and coefficient must be finite".into()));
    }
    Ok(ModifiedEulerField { system, h, coefficient })
}

impl<S: OdeSystem> ModifiedEulerField<S> {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn inner(&self) -> &S {
        &self.system
    }
}

impl<S: OdeSystem> OdeSystem for ModifiedEulerField<S> {
    fn dimension(&self) -> usize {
        self.system.dimension()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.system.rhs(t, y, dy);
        let scale = self.coefficient * self.h;
        if scale == 0.0 {
            return;
        }
        let j = self.system.jacobian(t, y).expect("checked at construction");
        let mut jf = vec![0.0; dy.len()];
        j.mul_vec(dy, &mut jf);
        for (d, c) in dy.iter_mut().zip(jf) {
            *d += scale * c;
        }
    }

    /// Jacobian of the unmodified field; the correction's own derivative
    /// is not needed by any consumer.
    fn has_jacobian(&self) -> bool {
        false
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Option<Matrix> {
        None
    }
}

/// One row of an Euler step-halving study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderStudyRow {
    pub h: f64,
    /// Max residual of the Hermite interpolant in the original field.
    pub original: f64,
    /// Max residual in the modified field, with the skeleton re-interpolated
    /// using the modified field's node slopes.
    pub modified: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderStudy {
    pub coefficient: f64,
    pub rows: Vec<OrderStudyRow>,
    /// Log-log slope of `original` against `h`.
    pub original_order: f64,
    /// Log-log slope of `modified` against `h`.
    pub modified_order: f64,
}

impl OrderStudy {
    /// True when the modified field raises the observed order by at least
    /// `margin` (0.7 is a robust choice for a one-order gain).
    pub fn raises_order(&self, margin: f64) -> bool {
        self.modified_order - self.original_order >= margin
    }
}

/// Runs explicit Euler at each `h` and compares residual orders in the
/// original and the modified field.
pub fn euler_order_study<S: OdeSystem + Clone>(
    system: &S,
    y0: &StateVector,
    t0: f64,
    t_end: f64,
    hs: &[f64],
    coefficient: f64,
    samples_per_step: usize,
) -> Result<OrderStudy> {
    if hs.len() < 2 {
        return Err(Error::InsufficientData("need at least two step sizes".into()));
    }
    let mut rows = Vec::with_capacity(hs.len());
    for &h in hs {
        let sol = integrate_euler_fixed(system, y0, t0, t_end, h)?;
        let original = max_residual(&sol, system, samples_per_step, false)?.value;
        let field = modified_euler_rhs(system.clone(), h, coefficient)?;
        let resol = sol.reinterpolate(&field)?;
        let modified = max_residual(&resol, &field, samples_per_step, false)?.value;
        rows.push(OrderStudyRow { h, original, modified });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let slope_of = |ys: Vec<f64>| crate::stats::least_squares_slope(&xs, &ys);
    let original_order = slope_of(rows.iter().map(|r| r.original.ln()).collect())?;
    let modified_order = slope_of(rows.iter().map(|r| r.modified.ln()).collect())?;
    Ok(OrderStudy {
        coefficient,
        rows,
        original_order,
        modified_order,
    })
}
