//! Leapfrog on Hénon–Heiles conserves a modified Hamiltonian far better
//! than the original one, until the step size crosses into spurious chaos.

use bealab::backward_error::{energy_drift, modified_hamiltonian};
use bealab::integrators::leapfrog_dkd;
use bealab::systems::HamiltonianState;

fn main() -> bealab::Result<()> {
    let s0 = HamiltonianState::standard();
    for order in [0, 2, 4] {
        println!("H~ order {order} at start, h = 81/64: {:.8}", modified_hamiltonian(&s0, 81.0 / 64.0, order)?);
    }
    for h in [0.1, 1.175, 81.0 / 64.0, 79.0 / 64.0] {
        let run = leapfrog_dkd(s0, h, 16000)?;
        let r = energy_drift(&run, &[0, 2, 4])?;
        println!(
            "h {h:.6}: drift {:.3e} / {:.3e} / {:.3e}, spurious chaos: {}",
            r.drift_order0.unwrap(),
            r.drift_order2.unwrap(),
            r.drift_order4.unwrap(),
            r.spurious_chaos
        );
    }
    Ok(())
}
