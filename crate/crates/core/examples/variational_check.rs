//! Finite-difference first variation of the energy against the tension
//! pairing, for random compactly supported perturbations. The second column
//! repeats the pairing with the sign of the quadratic tension term flipped.
//!
//! cargo run --release --example variational_check -- [seed]

use qcharm::geometry;
use qcharm::jet::Jet;
use qcharm::variation::{energy_variation, energy_variation_with, Bump, PolyField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn flipped(j: &Jet) -> qcharm::Result<(f64, f64)> {
    let (t1, t2) = geometry::tension(j)?;
    let pre = (1.0 - j.z.norm_sqr()).powi(2) / 4.0;
    // pre·(Δu - N) = 2·pre·Δu - τ
    Ok((2.0 * pre * j.lap_f - t1, 2.0 * pre * j.lap_g - t2))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = PolyField::sample();
    println!(
        "{:>14} {:>14} {:>12} {:>12}",
        "dE/dt", "pairing", "rel. error", "flipped"
    );
    for _ in 0..10 {
        let bump = Bump::random(&mut rng, 0.7);
        let chk = energy_variation(&field, &bump, 1e-4, 400, 256)?;
        let alt = energy_variation_with(&field, &bump, 1e-4, 400, 256, flipped)?;
        println!(
            "{:>14.6e} {:>14.6e} {:>12.2e} {:>12.2e}",
            chk.finite_difference, chk.pairing, chk.relative_error, alt.relative_error
        );
    }
    Ok(())
}
