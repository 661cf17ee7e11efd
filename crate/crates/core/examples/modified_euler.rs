//! Explicit Euler solves a modified equation one order more accurately
//! than the original one, for the right sign of the correction.

use bealab::backward_error::euler_order_study;
use bealab::systems::Lorenz;

fn main() -> bealab::Result<()> {
    let hs = [1e-3, 5e-4, 2.5e-4];
    for c in [-0.5, 0.5, 1.0] {
        let s = euler_order_study(&Lorenz::default(), &[1.0, 0.0, 0.0].into(), 0.0, 1.0, &hs, c, 8)?;
        println!("c = {c:+}: original order {:.3}, modified order {:.3}", s.original_order, s.modified_order);
        for r in &s.rows {
            println!("    h {:.2e}: {:.3e} -> {:.3e}", r.h, r.original, r.modified);
        }
    }
    Ok(())
}
