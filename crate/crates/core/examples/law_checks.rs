//! Runs every pointwise law suite and the finite-difference convergence
//! study of the tension identity.
//!
//! cargo run --release --example law_checks -- [seed]

use qcharm::laws::{fd_tension_identity_levels, observed_orders, run_all, LawConfig};
use qcharm::{BoundaryMap, ExtensionParams, FourierExtension};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1);
    for s in run_all(&LawConfig::default(), seed)? {
        let mark = if s.passed { "ok  " } else { "FAIL" };
        println!(
            "{mark} {:<36} max {:.3e} (tol {:.0e}, n = {})",
            s.name, s.max_residual, s.tolerance, s.samples
        );
    }

    let ext =
        FourierExtension::build(&BoundaryMap::perturbed(0.2, 1)?, ExtensionParams::default())?;
    let levels = [16, 32, 64, 128, 256];
    let errs = fd_tension_identity_levels(&ext, 0.8, &levels)?;
    let orders = observed_orders(&errs);
    for (k, (n, e)) in levels.iter().zip(&errs).enumerate() {
        let order = if k == 0 {
            String::new()
        } else {
            format!("order {:.3}", orders[k - 1])
        };
        println!("n_r = {n:<4} finite-difference residual {e:.3e} {order}");
    }
    Ok(())
}
