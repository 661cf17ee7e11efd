//! Resonant forcing grows the oscillator's amplitude linearly at eps/2 per
//! unit time; off resonance it stays bounded.

use bealab::chaos_metrics::secular_envelope;

fn main() -> bealab::Result<()> {
    let eps = 0.01;
    for omega in [1.0, 1.05, 2.0] {
        let f = secular_envelope(eps, omega, 500.0)?;
        println!("omega {omega}: envelope slope {:.4e} (eps/2 = {:.4e}), {} maxima", f.slope, eps / 2.0, f.maxima.len());
    }
    Ok(())
}
