//! Modified equations and modified Hamiltonian of drift-kick-drift leapfrog
//! on Hénon–Heiles, through terms of order h⁴.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::LeapfrogRun;
use crate::systems::{hamiltonian_h0, henon_heiles_rhs, HamiltonianState};

/// Drift above this fraction of the reference energy marks spurious chaos.
pub const DEFAULT_SPURIOUS_FRACTION: f64 = 0.5;

/// Polynomial correction terms of the modified leapfrog equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KTerms {
    pub k1: f64,
    pub k2: f64,
    pub k4: f64,
    pub k5: f64,
    pub k7: f64,
    pub k8: f64,
    pub k10: f64,
    pub k11: f64,
}

impl KTerms {
    pub fn to_array(self) -> [f64; 8] {
        [self.k1, self.k2, self.k4, self.k5, self.k7, self.k8, self.k10, self.k11]
    }
}

pub fn k_terms(s: &HamiltonianState) -> KTerms {
    let HamiltonianState { p1, p2, q1, q2 } = *s;
    let (p1s, p2s, q1s, q2s) = (p1 * p1, p2 * p2, q1 * q1, q2 * q2);
    let (q1c, q2c) = (q1s * q1, q2s * q2);
    KTerms {
        k1: -2.0 * q1 + 5.0 * p1 * p2 - 24.0 * q1 * q2 - 20.0 * q1 * q2s - 24.0 * q2 * q1c - 8.0 * q1 * q2c
            + 5.0 * q1 * p1s
            - q1 * p2s
            - 20.0 * q1c
            + 6.0 * q2 * p1 * p2,
        k2: p1 * p2 - 2.0 * q1c - 2.0 * q1 * q2s - 6.0 * q1 * q2 - q1,
        k4: 2.0 * q2 * p1s - 10.0 * q2 * p2s + 24.0 * q1s * q2s + 40.0 * q2c + 12.0 * q1s * q1s - 20.0 * q2s * q2s
            + 40.0 * q1s * q2
            - 12.0 * q1 * p1 * p2
            + 24.0 * q1s
            - 24.0 * q2s
            - 5.0 * p1s
            + 5.0 * p2s
            + 4.0 * q2,
        k5: p1s - p2s - 6.0 * q1s + 6.0 * q2s - 2.0 * q2 - 4.0 * q1s * q2 - 4.0 * q2c,
        k7: 12.0 * q2 * q1 * p2 - 2.0 * p1 * q2s + 10.0 * p1 * q2 + 10.0 * q1s * p1 + 10.0 * q1 * p2 + p1,
        k8: 2.0 * q1 * p2 + 2.0 * p1 * q2 + p1,
        k10: -2.0 * q1s * p2 + 12.0 * q1 * p1 * q2 + 10.0 * q1 * p1 + 10.0 * q2s * p2 - 10.0 * q2 * p2 + p2,
        k11: 2.0 * q1 * p1 - 2.0 * q2 * p2 + p2,
    }
}

/// Modified leapfrog field, truncated after the h⁴ terms.
pub fn hh_modified_rhs(s: &HamiltonianState, h: f64) -> HamiltonianState {
    let base = henon_heiles_rhs(s);
    if h == 0.0 {
        return base;
    }
    let k = k_terms(s);
    let (h2, h4) = (h * h, h * h * h * h);
    HamiltonianState {
        p1: base.p1 + k.k2 * h2 / 6.0 + k.k1 * h4 / 60.0,
        p2: base.p2 + k.k5 * h2 / 12.0 - k.k4 * h4 / 120.0,
        q1: base.q1 - k.k8 * h2 / 12.0 - k.k7 * h4 / 120.0,
        q2: base.q2 - k.k11 * h2 / 12.0 - k.k10 * h4 / 120.0,
    }
}

pub fn h2_term(s: &HamiltonianState) -> f64 {
    let HamiltonianState { p1, p2, q1, q2 } = *s;
    let (p1s, p2s, q1s, q2s) = (p1 * p1, p2 * p2, q1 * q1, q2 * q2);
    -p1s * q2 / 12.0 - p1s / 24.0 - q1 * p2 * p1 / 6.0 + p2s * q2 / 12.0 - p2s / 24.0 + q1s * q1s / 12.0
        + q1s * q2s / 6.0
        + q2s * q2s / 12.0
        + q1s * q2 / 2.0
        - q2s * q2 / 6.0
        + q1s / 12.0
        + q2s / 12.0
}

pub fn h4_term(s: &HamiltonianState) -> f64 {
    let HamiltonianState { p1, p2, q1, q2 } = *s;
    let (p1s, p2s, q1s, q2s) = (p1 * p1, p2 * p2, q1 * q1, q2 * q2);
    q1s * q1s * q2 / 10.0 + q1s * q2s * q2 / 15.0 - q2s * q2s * q2 / 30.0 - p1s * q1s / 24.0 + p1s * q2s / 120.0
        - p1 * q2 * q1 * p2 / 10.0
        + p2s * q1s / 120.0
        - p2s * q2s / 24.0
        + q1s * q1s / 12.0
        + q1s * q2s / 6.0
        + q2s * q2s / 12.0
        - p1s * q2 / 24.0
        - q1 * p2 * p1 / 12.0
        + p2s * q2 / 24.0
        + q1s * q2 / 5.0
        - q2s * q2 / 15.0
        - p1s / 240.0
        - p2s / 240.0
        + q1s / 60.0
        + q2s / 60.0
}

fn check_order(order: u8) -> Result<()> {
    match order {
        0 | 2 | 4 => Ok(()),
        _ => Err(Error::InvalidArgument(format!("order must be 0, 2 or 4 (got {order})"))),
    }
}

/// `H0`, `H0 + h²H2` or `H0 + h²H2 + h⁴H4`.
pub fn modified_hamiltonian(s: &HamiltonianState, h: f64, order: u8) -> Result<f64> {
    check_order(order)?;
    let mut v = hamiltonian_h0(s);
    if order >= 2 {
        v += h * h * h2_term(s);
    }
    if order >= 4 {
        v += h * h * h * h * h4_term(s);
    }
    Ok(v)
}

/// `H̃` of a given order along a leapfrog run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModifiedHamiltonianSeries {
    pub order: u8,
    pub h: f64,
    pub values: Vec<f64>,
}

impl ModifiedHamiltonianSeries {
    pub fn from_run(run: &LeapfrogRun, order: u8) -> Result<Self> {
        check_order(order)?;
        let values = run
            .states
            .iter()
            .map(|s| modified_hamiltonian(s, run.h, order))
            .collect::<Result<_>>()?;
        Ok(Self { order, h: run.h, values })
    }

    /// `max_k |values[k] − values[0]|`.
    pub fn max_drift(&self) -> f64 {
        let v0 = self.values.first().copied().unwrap_or(0.0);
        self.values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDriftReport {
    pub h: f64,
    pub steps: usize,
    pub drift_order0: Option<f64>,
    pub drift_order2: Option<f64>,
    pub drift_order4: Option<f64>,
    /// Some state of the run was not finite; drifts cover the finite prefix.
    pub diverged: bool,
    pub initial_energy: f64,
    pub threshold_fraction: f64,
    pub spurious_chaos: bool,
}

impl EnergyDriftReport {
    pub fn drift(&self, order: u8) -> Option<f64> {
        match order {
            0 => self.drift_order0,
            2 => self.drift_order2,
            4 => self.drift_order4,
            _ => None,
        }
    }

    /// Drift of the highest order present.
    pub fn best_drift(&self) -> Option<f64> {
        self.drift_order4.or(self.drift_order2).or(self.drift_order0)
    }
}

/// Drift of each requested order of `H̃` along `run`, flagged against the
/// default spurious-chaos fraction of the initial `H0`.
pub fn energy_drift(run: &LeapfrogRun, orders: &[u8]) -> Result<EnergyDriftReport> {
    energy_drift_with_threshold(run, orders, DEFAULT_SPURIOUS_FRACTION)
}

pub fn energy_drift_with_threshold(run: &LeapfrogRun, orders: &[u8], fraction: f64) -> Result<EnergyDriftReport> {
    if run.states.is_empty() {
        return Err(Error::InsufficientData("empty leapfrog run".into()));
    }
    if orders.is_empty() {
        return Err(Error::InvalidArgument("no orders requested".into()));
    }
    for &o in orders {
        check_order(o)?;
    }
    let finite = run.states.iter().take_while(|s| s.is_finite()).count();
    let diverged = finite < run.states.len();
    let states = &run.states[..finite.max(1)];
    let drift_of = |order: u8| -> Option<f64> {
        if !orders.contains(&order) || finite == 0 {
            return None;
        }
        let v0 = modified_hamiltonian(&states[0], run.h, order).ok()?;
        Some(
            states
                .iter()
                .map(|s| (modified_hamiltonian(s, run.h, order).unwrap() - v0).abs())
                .fold(0.0, f64::max),
        )
    };
    let initial_energy = hamiltonian_h0(&run.states[0]);
    let mut report = EnergyDriftReport {
        h: run.h,
        steps: run.steps,
        drift_order0: drift_of(0),
        drift_order2: drift_of(2),
        drift_order4: drift_of(4),
        diverged,
        initial_energy,
        threshold_fraction: fraction,
        spurious_chaos: false,
    };
    report.spurious_chaos = initial_energy != 0.0 && detect_spurious_chaos(&report, initial_energy, fraction)?;
    Ok(report)
}

/// True when the highest-order drift exceeds `fraction·|reference_energy|`,
/// or when the run diverged.
pub fn detect_spurious_chaos(report: &EnergyDriftReport, reference_energy: f64, fraction: f64) -> Result<bool> {
    if reference_energy == 0.0 || !reference_energy.is_finite() {
        return Err(Error::InvalidArgument("reference energy must be finite and nonzero".into()));
    }
    if !(fraction > 0.0) {
        return Err(Error::InvalidArgument("threshold fraction must be > 0".into()));
    }
    if report.diverged {
        return Ok(true);
    }
    Ok(report.best_drift().is_some_and(|d| d > fraction * reference_energy.abs()))
}
