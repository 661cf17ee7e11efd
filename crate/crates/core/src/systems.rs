//! Concrete dynamical systems: Lorenz, Hénon–Heiles, the forced harmonic
//! oscillator, and constant-coefficient linear systems.
//!
//! Every system implements [`OdeSystem`], so integrators and the residual
//! machinery treat them uniformly. Lorenz and Hénon–Heiles are autonomous
//! and ignore `t`; the forced oscillator does not.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in state space.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("state dimension must be >= 1".into()));
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.0)
    }

    /// Max-norm distance to another state of the same dimension.
    pub fn distance_inf(&self, other: &StateVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<&[f64]> for StateVector {
    fn from(s: &[f64]) -> Self {
        Self(s.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for StateVector {
    fn from(a: [f64; N]) -> Self {
        Self(a.to_vec())
    }
}

impl Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dense row-major square matrix, used for Jacobians.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            n: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
}

/// Uniform interface over the systems in this crate.
pub trait OdeSystem {
    fn dimension(&self) -> usize;

    /// Writes f(t, y) into `dy`.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);

    fn has_jacobian(&self) -> bool {
        false
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Option<Matrix> {
        None
    }

    fn energy(&self, _y: &[f64]) -> Option<f64> {
        None
    }

    fn eval(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut dy = vec![0.0; self.dimension()];
        self.rhs(t, y, &mut dy);
        dy
    }
}

impl<S: OdeSystem + ?Sized> OdeSystem for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (**self).rhs(t, y, dy)
    }
    fn has_jacobian(&self) -> bool {
        (**self).has_jacobian()
    }
    fn jacobian(&self, t: f64, y: &[f64]) -> Option<Matrix> {
        (**self).jacobian(t, y)
    }
    fn energy(&self, y: &[f64]) -> Option<f64> {
        (**self).energy(y)
    }
}

// ---------------------------------------------------------------------------
// Lorenz

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

#[inline]
fn lorenz_field(y: &[f64], p: &LorenzParams, dy: &mut [f64]) {
    let (x, yy, z) = (y[0], y[1], y[2]);
    dy[0] = p.sigma * (yy - x);
    dy[1] = x * (p.rho - z) - yy;
    dy[2] = x * yy - p.beta * z;
}

pub fn lorenz_rhs(state: &StateVector, params: &LorenzParams) -> Result<StateVector> {
    state.expect_dim(3)?;
    let mut out = StateVector::zeros(3);
    lorenz_field(state.as_slice(), params, out.as_mut_slice());
    Ok(out)
}

pub fn lorenz_jacobian(state: &StateVector, params: &LorenzParams) -> Result<[[f64; 3]; 3]> {
    state.expect_dim(3)?;
    Ok(lorenz_jacobian_raw(state.as_slice(), params))
}

fn lorenz_jacobian_raw(y: &[f64], p: &LorenzParams) -> [[f64; 3]; 3] {
    let (x, yy, z) = (y[0], y[1], y[2]);
    [
        [-p.sigma, p.sigma, 0.0],
        [p.rho - z, -1.0, -x],
        [yy, x, -p.beta],
    ]
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Lorenz {
    pub params: LorenzParams,
}

impl Lorenz {
    pub fn new(params: LorenzParams) -> Self {
        Self { params }
    }
}

impl OdeSystem for Lorenz {
    fn dimension(&self) -> usize {
        3
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        lorenz_field(y, &self.params, dy);
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, _t: f64, y: &[f64]) -> Option<Matrix> {
        Some(Matrix::from_rows(lorenz_jacobian_raw(y, &self.params)))
    }
}

// ---------------------------------------------------------------------------
// Hénon–Heiles

/// Phase-space point of the Hénon–Heiles system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianState {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl HamiltonianState {
    pub const fn new(p1: f64, p2: f64, q1: f64, q2: f64) -> Self {
        Self { p1, p2, q1, q2 }
    }

    /// All four coordinates equal to 0.12, the standard starting point.
    pub const fn standard() -> Self {
        Self::new(0.12, 0.12, 0.12, 0.12)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p1, self.p2, self.q1, self.q2]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Potential gradient U_q = (q1 + 2 q1 q2, q2 + q1² − q2²).
#[inline]
pub fn henon_heiles_force(q1: f64, q2: f64) -> [f64; 2] {
    [q1 + 2.0 * q1 * q2, q2 + q1 * q1 - q2 * q2]
}

/// Time derivative (ṗ1, ṗ2, q̇1, q̇2), returned in the same layout as the state.
pub fn henon_heiles_rhs(s: &HamiltonianState) -> HamiltonianState {
    HamiltonianState {
        p1: -s.q1 - 2.0 * s.q1 * s.q2,
        p2: -s.q2 - s.q1 * s.q1 + s.q2 * s.q2,
        q1: s.p1,
        q2: s.p2,
    }
}

pub fn hamiltonian_h0(s: &HamiltonianState) -> f64 {
    0.5 * (s.p1 * s.p1 + s.p2 * s.p2 + s.q1 * s.q1 + s.q2 * s.q2) + s.q1 * s.q1 * s.q2
        - s.q2 * s.q2 * s.q2 / 3.0
}

/// Hénon–Heiles as a first-order system with state layout (p1, p2, q1, q2).
#[derive(Clone, Copy, Debug, Default)]
pub struct HenonHeiles;

impl OdeSystem for HenonHeiles {
    fn dimension(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let d = henon_heiles_rhs(&HamiltonianState::from_slice(y));
        dy.copy_from_slice(&d.to_array());
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, _t: f64, y: &[f64]) -> Option<Matrix> {
        let (q1, q2) = (y[2], y[3]);
        Some(Matrix::from_rows([
            [0.0, 0.0, -1.0 - 2.0 * q2, -2.0 * q1],
            [0.0, 0.0, -2.0 * q1, -1.0 + 2.0 * q2],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]))
    }

    fn energy(&self, y: &[f64]) -> Option<f64> {
        Some(hamiltonian_h0(&HamiltonianState::from_slice(y)))
    }
}

// ---------------------------------------------------------------------------
// Forced harmonic oscillator  ÿ + y = ε sin(ωt + φ)

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcedOscillatorParams {
    pub epsilon: f64,
    pub omega: f64,
    pub phase: f64,
}

impl ForcedOscillatorParams {
    pub fn new(epsilon: f64, omega: f64, phase: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !(omega > 0.0) || !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "forced oscillator needs epsilon >= 0 and omega > 0 (got {epsilon}, {omega})"
            )));
        }
        Ok(Self {
            epsilon,
            omega,
            phase,
        })
    }

    pub fn unforced() -> Self {
        Self {
            epsilon: 0.0,
            omega: 1.0,
            phase: 0.0,
        }
    }
}

#[inline]
fn oscillator_field(y: &[f64], t: f64, p: &ForcedOscillatorParams, dy: &mut [f64]) {
    dy[0] = y[1];
    dy[1] = -y[0] + p.epsilon * (p.omega * t + p.phase).sin();
}

pub fn forced_oscillator_rhs(
    state: &StateVector,
    t: f64,
    params: &ForcedOscillatorParams,
) -> Result<StateVector> {
    state.expect_dim(2)?;
    let mut out = StateVector::zeros(2);
    oscillator_field(state.as_slice(), t, params, out.as_mut_slice());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcedOscillator {
    pub params: ForcedOscillatorParams,
}

impl ForcedOscillator {
    pub fn new(params: ForcedOscillatorParams) -> Self {
        Self { params }
    }
}

impl OdeSystem for ForcedOscillator {
    fn dimension(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        oscillator_field(y, t, &self.params, dy);
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Option<Matrix> {
        Some(Matrix::from_rows([[0.0, 1.0], [-1.0, 0.0]]))
    }

    fn energy(&self, y: &[f64]) -> Option<f64> {
        Some(0.5 * (y[0] * y[0] + y[1] * y[1]))
    }
}

// ---------------------------------------------------------------------------
// ẏ = A y

/// Constant-coefficient linear system; covers decay, constant and
/// harmonic test problems.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    a: Matrix,
}

impl LinearSystem {
    pub fn new(a: Matrix) -> Self {
        Self { a }
    }

    /// ẏ = λ y in one dimension.
    pub fn scalar(lambda: f64) -> Self {
        Self::new(Matrix::from_rows([[lambda]]))
    }

    /// ẏ = 0 in `dim` dimensions.
    pub fn constant(dim: usize) -> Self {
        Self::new(Matrix::zeros(dim))
    }

    /// Unforced unit-frequency oscillator in first-order form.
    pub fn harmonic() -> Self {
        Self::new(Matrix::from_rows([[0.0, 1.0], [-1.0, 0.0]]))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
}

impl OdeSystem for LinearSystem {
    fn dimension(&self) -> usize {
        self.a.dim()
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.a.mul_vec(y, dy);
    }

    fn has_jacobian(&self) -> bool {
        true
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Option<Matrix> {
        Some(self.a.clone())
    }
}
