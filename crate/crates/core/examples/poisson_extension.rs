//! Fourier-series Poisson extension against direct trapezoid quadrature of
//! the Poisson integral, plus the distortion estimate on the evaluation disk.
//!
//! cargo run --release --example poisson_extension -- 0.2 1

use std::f64::consts::TAU;

use num_complex::Complex64;
use qcharm::{
    estimate_k, poisson_kernel, BoundaryMap, ExtensionParams, FourierExtension, PolarGrid,
};

fn direct(map: &BoundaryMap, z: Complex64, n: usize) -> Complex64 {
    let (rho, theta) = (z.norm(), z.arg());
    let sum: Complex64 = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            map.eval(t) * poisson_kernel(rho, theta - t).unwrap()
        })
        .sum();
    sum / n as f64
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let eps: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(0.2);
    let k: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let map = BoundaryMap::perturbed(eps, k)?;
    let params = ExtensionParams::default();
    let ext = FourierExtension::build(&map, params)?;
    println!(
        "N = {}, M = {}, tail bound {:.2e}, sum |a_n|^2 = {:.12}",
        params.samples,
        params.truncation,
        ext.tail_bound(),
        ext.parseval_sum()
    );
    for n in [-2, -1, 0, 1, 2, 3] {
        let a = ext.coefficient(n);
        println!("a_{n:<2} = {:+.6e} {:+.6e}i", a.re, a.im);
    }

    println!("{:>6} {:>6} {:>12}", "|z|", "arg", "|series - quad|");
    for &r in &[0.0, 0.5, 0.8, 0.9] {
        for &t in &[0.0, 1.0, 2.5] {
            let z = Complex64::from_polar(r, t);
            let err = (ext.value(z)? - direct(&map, z, 8192)).norm();
            println!("{r:>6} {t:>6} {err:>12.2e}");
        }
    }

    for n in [[64, 128], [128, 256], [256, 512]] {
        let est = estimate_k(&ext, PolarGrid::new(params.rho_eval, n[0], n[1])?)?;
        println!(
            "K estimate on {}x{}: {:.6} at ({:.4}, {:.4})",
            n[0], n[1], est.k_hat, est.argmax_re, est.argmax_im
        );
    }
    Ok(())
}
