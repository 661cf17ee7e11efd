//! Störmer–Verlet leapfrog for Hénon–Heiles, in drift-kick-drift form and
//! in the staggered kick-drift form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{henon_heiles_force, HamiltonianState};

/// Synchronized leapfrog samples at `t_k = t0 + k h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeapfrogRun {
    pub h: f64,
    pub steps: usize,
    /// `steps + 1` states, starting with the initial state.
    pub states: Vec<HamiltonianState>,
    pub force_evaluations: usize,
}

impl LeapfrogRun {
    pub fn times(&self, t0: f64) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(move |k| t0 + k as f64 * self.h)
    }
}

/// One drift-kick-drift step. Negative `h` steps backwards.
#[inline]
pub fn leapfrog_dkd_step(s: &HamiltonianState, h: f64) -> HamiltonianState {
    let half = 0.5 * h;
    // drift with H_p = p
    let q1 = s.q1 + half * s.p1;
    let q2 = s.q2 + half * s.p2;
    // kick with H_q at the drifted position
    let [f1, f2] = henon_heiles_force(q1, q2);
    let p1 = s.p1 - h * f1;
    let p2 = s.p2 - h * f2;
    // drift
    HamiltonianState {
        p1,
        p2,
        q1: q1 + half * p1,
        q2: q2 + half * p2,
    }
}

fn check_args(h: f64, steps: usize) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step size must be > 0 (got {h})")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    Ok(())
}

pub fn leapfrog_dkd(state0: HamiltonianState, h: f64, steps: usize) -> Result<LeapfrogRun> {
    check_args(h, steps)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(state0);
    let mut s = state0;
    for k in 1..=steps {
        s = leapfrog_dkd_step(&s, h);
        if !s.is_finite() {
            return Err(Error::Divergence { step: k, t: k as f64 * h });
        }
        states.push(s);
    }
    Ok(LeapfrogRun {
        h,
        steps,
        states,
        force_evaluations: steps,
    })
}

/// Output of the kick-drift formulation: momenta `p_n` and the staggered
/// positions `Q_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KickDriftRun {
    pub h: f64,
    pub momenta: Vec<[f64; 2]>,
    pub positions: Vec<[f64; 2]>,
    pub force_evaluations: usize,
}

/// `p_{n+1} = p_n − h U_q(Q_n)`, `Q_{n+1} = Q_n + h p_{n+1}`.
///
/// Started from `Q_0 = q_0 + h p_0 / 2` this reproduces the momenta of
/// [`leapfrog_dkd`].
pub fn leapfrog_kick_drift(p0: [f64; 2], q0: [f64; 2], h: f64, steps: usize) -> Result<KickDriftRun> {
    check_args(h, steps)?;
    let mut momenta = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let (mut p, mut q) = (p0, q0);
    momenta.push(p);
    positions.push(q);
    let mut force_evaluations = 0;
    for k in 1..=steps {
        let f = henon_heiles_force(q[0], q[1]);
        force_evaluations += 1;
        p = [p[0] - h * f[0], p[1] - h * f[1]];
        q = [q[0] + h * p[0], q[1] + h * p[1]];
        if !(p.iter().chain(&q).all(|v| v.is_finite())) {
            return Err(Error::Divergence { step: k, t: k as f64 * h });
        }
        momenta.push(p);
        positions.push(q);
    }
    Ok(KickDriftRun {
        h,
        momenta,
        positions,
        force_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_fixed() {
        let run = leapfrog_dkd(HamiltonianState::default(), 0.3, 50).unwrap();
        assert_eq!(run.states.len(), 51);
        assert!(run.states.iter().all(|s| *s == HamiltonianState::default()));
        let kd = leapfrog_kick_drift([0.0; 2], [0.0; 2], 0.3, 50).unwrap();
        assert!(kd.momenta.iter().chain(&kd.positions).all(|v| *v == [0.0, 0.0]));
    }

    #[test]
    fn one_force_evaluation_per_step() {
        let kd = leapfrog_kick_drift([0.12; 2], [0.12; 2], 0.1, 37).unwrap();
        assert_eq!(kd.force_evaluations, 37);
        assert_eq!(leapfrog_dkd(HamiltonianState::standard(), 0.1, 37).unwrap().force_evaluations, 37);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(leapfrog_dkd(HamiltonianState::standard(), 0.0, 10).is_err());
        assert!(leapfrog_dkd(HamiltonianState::standard(), 0.1, 0).is_err());
        assert!(leapfrog_kick_drift([0.0; 2], [0.0; 2], -0.1, 1).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let r = leapfrog_dkd(HamiltonianState::new(0.0, 0.0, 0.0, 5.0), 1.0, 1000);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }
}
