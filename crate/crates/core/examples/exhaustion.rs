//! Compact exhaustion for a perturbed rotation or a disk automorphism,
//! printing the per-radius distances against the maximum-principle bound.
//!
//! cargo run --release --example exhaustion -- perturbed 0.2 1
//! cargo run --release --example exhaustion -- moebius 0.3 0.5

use num_complex::Complex64;
use qcharm::exhaustion::{run_exhaustion, ExhaustionConfig};
use qcharm::{BoundaryMap, ExtensionParams, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family = args.first().map(String::as_str).unwrap_or("perturbed");
    let p1: f64 = args
        .get(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(if family == "moebius" { 0.3 } else { 0.2 });
    let p2: f64 = args
        .get(2)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(if family == "moebius" { 0.5 } else { 1.0 });
    let map = match family {
        "moebius" => BoundaryMap::moebius(Complex64::new(p1, 0.0), p2)?,
        "perturbed" => BoundaryMap::perturbed(p1, p2 as u32)?,
        other => return Err(format!("unknown family {other}; use perturbed or moebius").into()),
    };

    let start = std::time::Instant::now();
    let run = run_exhaustion(
        &map,
        ExtensionParams::default(),
        &SolverConfig::default(),
        &ExhaustionConfig::default(),
    )?;
    let rep = &run.report;
    println!(
        "K estimate {:.6} at ({:.4}, {:.4})",
        rep.k_estimate.k_hat, rep.k_estimate.argmax_re, rep.k_estimate.argmax_im
    );
    match rep.lemma1_bound_factor2 {
        Some(b) => println!(
            "bound 2 atanh(K^2-1) = {b:.6}, without factor 2 = {:.6}",
            b / 2.0
        ),
        None => println!("K estimate is not below sqrt 2; no bound"),
    }
    for r in &rep.radii {
        println!(
            "R = {:<4} sup d = {:<12.4e} ring {:?}/{} sweeps {:<4} residual {:.2e} converged {}",
            r.radius,
            r.sup_distance.unwrap_or(f64::NAN),
            r.argmax_ring,
            r.n_r,
            r.sweeps,
            r.residual.unwrap_or(f64::NAN),
            r.converged
        );
    }
    for d in &rep.deltas {
        println!(
            "delta {} -> {}: {:.3e}",
            d.from_radius, d.to_radius, d.delta
        );
    }
    if let Some(qc) = &rep.qc {
        println!("{qc:?}");
    }
    println!(
        "certificate {:?} in {:.1?}",
        rep.certificate,
        start.elapsed()
    );
    Ok(())
}
