//! The built-in boundary families: lift samples, monotonicity checks and a
//! rejected parameter choice. Writes a sampled lift and reads it back as CSV.
//!
//! cargo run --example boundary_families

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use qcharm::BoundaryMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let maps = [
        ("identity", BoundaryMap::identity()),
        ("rotation(0.7)", BoundaryMap::rotation(0.7)?),
        (
            "moebius(0.3-0.2i, 0.5)",
            BoundaryMap::moebius(Complex64::new(0.3, -0.2), 0.5)?,
        ),
        ("perturbed(0.2, 1)", BoundaryMap::perturbed(0.2, 1)?),
        ("perturbed(0.15, 3)", BoundaryMap::perturbed(0.15, 3)?),
    ];
    for (name, map) in &maps {
        let rep = map.validate(4096)?;
        let psi: Vec<String> = (0..4)
            .map(|k| format!("{:.4}", map.lift(TAU * k as f64 / 4.0)))
            .collect();
        println!(
            "{name:<24} psi at 0, pi/2, pi, 3pi/2 = [{}]  min step {:.2e}  passed {}",
            psi.join(", "),
            rep.min_forward_difference,
            rep.passed
        );
    }

    // εk >= 1 makes the lift stationary somewhere
    match BoundaryMap::perturbed(0.5, 2) {
        Ok(_) => println!("perturbed(0.5, 2) unexpectedly accepted"),
        Err(e) => println!("perturbed(0.5, 2) rejected: {e}"),
    }

    let path = std::env::temp_dir().join("qcharm_lift.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "t,psi")?;
    let source = &maps[4].1;
    for k in 0..256 {
        let t = TAU * k as f64 / 256.0;
        writeln!(f, "{t},{}", source.lift(t))?;
    }
    drop(f);
    let sampled = BoundaryMap::from_csv(&path)?;
    let worst = (0..1000)
        .map(|k| {
            let t = TAU * (k as f64 + 0.5) / 1000.0;
            (sampled.lift(t) - source.lift(t)).abs()
        })
        .fold(0.0, f64::max);
    println!(
        "CSV lift from {}: max interpolation error {worst:.2e}",
        path.display()
    );
    Ok(())
}
