//! One Dirichlet solve with disk-automorphism boundary data, compared with the
//! exact isometry, with the residual history.
//!
//! cargo run --release --example dirichlet_solve -- 2.0 128 256

use std::time::Instant;

use num_complex::Complex64;
use qcharm::geometry::moebius;
use qcharm::{
    distance_field, solve_dirichlet, BoundaryMap, ExtensionParams, FieldGrid, FourierExtension,
    PolarGrid, SolverConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let radius: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(2.0);
    let n_r: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(128);
    let n_t: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(256);
    let (a, alpha) = (Complex64::new(0.3, 0.0), 0.5);

    let ext =
        FourierExtension::build(&BoundaryMap::moebius(a, alpha)?, ExtensionParams::default())?;
    let grid = PolarGrid::for_ball(radius, n_r, n_t)?;
    let phi = ext.sample_grid(grid)?;
    // the isometry shrunk toward the origin away from the boundary
    let init = FieldGrid::from_fn(grid, |z| {
        moebius(a, alpha, z) * (0.5 + 0.5 * z.norm() / grid.rho_max)
    });
    let cfg = SolverConfig::default();
    for (label, start) in [("from extension", &phi), ("from shrunk isometry", &init)] {
        let t0 = Instant::now();
        let res = solve_dirichlet(phi.boundary(), grid, &cfg, start)?;
        let elapsed = t0.elapsed();
        let exact = FieldGrid::from_fn(grid, |z| moebius(a, alpha, z));
        let d = distance_field(&res.field, &exact)?;
        println!(
            "{label}: {} sweeps in {elapsed:.2?}, residual {:.2e}, sup d to isometry {:.2e}",
            res.sweeps,
            res.final_residual(),
            d.sup
        );
        let hist: Vec<String> = res
            .residual_history
            .iter()
            .map(|r| format!("{r:.1e}"))
            .collect();
        println!("  residuals {}", hist.join(" "));
    }
    Ok(())
}
