//! First variation of the energy `E(u) = ∫ |∇u|²/(1-|u|²)² dx dy` against
//! the tension pairing.
//!
//! For `v` compactly supported inside the domain,
//! `dE(u + tv)/dt |₀ = -2 ∫ <τ(u), v>_γ (1-|z|²)^{-2} dx dy`
//! with `<a, b>_γ = 4(a·b)/(1-|u|²)²`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::jet::Jet;

/// `u = Σ c_{pq} z^p z̄^q` with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyField {
    pub terms: Vec<(u32, u32, Complex64)>,
}

fn pow(z: Complex64, n: u32) -> Complex64 {
    z.powu(n)
}

impl PolyField {
    pub fn new(terms: Vec<(u32, u32, Complex64)>) -> Self {
        Self { terms }
    }

    /// A non-harmonic sense-preserving field mapping `|z| <= 0.7` well inside the disk.
    pub fn sample() -> Self {
        Self::new(vec![
            (1, 0, Complex64::new(0.45, 0.0)),
            (0, 2, Complex64::new(0.15, 0.0)),
            (1, 1, Complex64::new(0.1, 0.0)),
            (2, 1, Complex64::new(0.0, 0.05)),
        ])
    }

    pub fn jet(&self, z: Complex64) -> Jet {
        let zb = z.conj();
        let zero = Complex64::new(0.0, 0.0);
        let (mut u, mut dz, mut dzb, mut dzzb) = (zero, zero, zero, zero);
        for &(p, q, c) in &self.terms {
            u += c * pow(z, p) * pow(zb, q);
            if p > 0 {
                dz += c * p as f64 * pow(z, p - 1) * pow(zb, q);
            }
            if q > 0 {
                dzb += c * q as f64 * pow(z, p) * pow(zb, q - 1);
            }
            if p > 0 && q > 0 {
                dzzb += c * (p * q) as f64 * pow(z, p - 1) * pow(zb, q - 1);
            }
        }
        Jet::from_partials(z, u, dz + dzb, Complex64::i() * (dz - dzb), dzzb * 4.0)
    }
}

/// `v(z) = A (1 - |z-z₀|²/s²)^k` on `|z-z₀| < s`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Complex64,
    pub radius: f64,
    pub amplitude: Complex64,
    pub power: i32,
}

impl Bump {
    /// Value and complex partials `(v, v_x, v_y)`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let d = z - self.center;
        let q = d.norm_sqr() / (self.radius * self.radius);
        let zero = Complex64::new(0.0, 0.0);
        if q >= 1.0 {
            return (zero, zero, zero);
        }
        let k = self.power;
        let v = self.amplitude * (1.0 - q).powi(k);
        let dv_dq = self.amplitude * (-(k as f64) * (1.0 - q).powi(k - 1));
        let s2 = self.radius * self.radius;
        (v, dv_dq * (2.0 * d.re / s2), dv_dq * (2.0 * d.im / s2))
    }

    /// Random bump supported in `|z| <= domain`.
    pub fn random(rng: &mut impl Rng, domain: f64) -> Self {
        let radius = rng.gen_range(0.1..0.3);
        let reach = domain - radius;
        let center =
            Complex64::from_polar(reach * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
        let amplitude = Complex64::from_polar(rng.gen_range(0.02..0.1), rng.gen_range(0.0..TAU));
        Self {
            center,
            radius,
            amplitude,
            power: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationCheck {
    /// `(E(u+tv) - E(u-tv)) / 2t`.
    pub finite_difference: f64,
    /// `-2 ∫ <τ, v>_γ (1-|z|²)^{-2}`.
    pub pairing: f64,
    pub relative_error: f64,
}

/// Quadrature over the bump's support: Simpson in the local radius, trapezoid in angle.
fn integrate_support(
    bump: &Bump,
    n_rho: usize,
    n_angle: usize,
    f: impl Fn(Complex64) -> Result<f64>,
) -> Result<f64> {
    let n = if n_rho.is_multiple_of(2) {
        n_rho
    } else {
        n_rho + 1
    };
    let h = bump.radius / n as f64;
    let mut total = 0.0;
    for i in 1..=n {
        let rho = h * i as f64;
        let w = if i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let mut ring = 0.0;
        for j in 0..n_angle {
            ring += f(bump.center + Complex64::from_polar(rho, TAU * j as f64 / n_angle as f64))?;
        }
        total += w * ring * rho * TAU / n_angle as f64;
    }
    Ok(total * h / 3.0)
}

fn lagrangian(u: Complex64, ux: Complex64, uy: Complex64) -> Result<f64> {
    let m = 1.0 - u.norm_sqr();
    if !(m > 0.0) {
        return Err(Error::TargetDegenerate(u.norm()));
    }
    Ok((ux.norm_sqr() + uy.norm_sqr()) / (m * m))
}

/// Central-difference derivative of the energy in the direction of `bump`,
/// compared with the tension pairing.
pub fn energy_variation(
    field: &PolyField,
    bump: &Bump,
    t: f64,
    n_rho: usize,
    n_angle: usize,
) -> Result<VariationCheck> {
    energy_variation_with(field, bump, t, n_rho, n_angle, geometry::tension)
}

/// [`energy_variation`] with the tension supplied by `tension`.
pub fn energy_variation_with(
    field: &PolyField,
    bump: &Bump,
    t: f64,
    n_rho: usize,
    n_angle: usize,
    tension: impl Fn(&Jet) -> Result<(f64, f64)>,
) -> Result<VariationCheck> {
    let fd = integrate_support(bump, n_rho, n_angle, |z| {
        let j = field.jet(z);
        let (v, vx, vy) = bump.eval(z);
        let plus = lagrangian(j.value + v * t, j.ux() + vx * t, j.uy() + vy * t)?;
        let minus = lagrangian(j.value - v * t, j.ux() - vx * t, j.uy() - vy * t)?;
        Ok((plus - minus) / (2.0 * t))
    })?;
    let pairing = integrate_support(bump, n_rho, n_angle, |z| {
        let j = field.jet(z);
        let (v, _, _) = bump.eval(z);
        let (t1, t2) = tension(&j)?;
        let m = 1.0 - j.value.norm_sqr();
        let inner = 4.0 * (t1 * v.re + t2 * v.im) / (m * m);
        Ok(-2.0 * inner / (1.0 - z.norm_sqr()).powi(2))
    })?;
    let relative_error = (fd - pairing).abs() / pairing.abs().max(f64::MIN_POSITIVE);
    Ok(VariationCheck {
        finite_difference: fd,
        pairing,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poly_field_derivatives() {
        let f = PolyField::sample();
        let z = Complex64::new(0.3, -0.2);
        let j = f.jet(z);
        let h = 1e-6;
        let fx = (f.jet(z + h).value - f.jet(z - h).value) / (2.0 * h);
        let fy =
            (f.jet(z + Complex64::i() * h).value - f.jet(z - Complex64::i() * h).value) / (2.0 * h);
        assert!((fx - j.ux()).norm() < 1e-9);
        assert!((fy - j.uy()).norm() < 1e-9);
        // Δ(z z̄) = 4, Δ(z² z̄) = 8z
        let lap = Complex64::new(0.1 * 4.0, 0.0) + Complex64::new(0.0, 0.05) * z * 8.0;
        assert!((j.laplacian() - lap).norm() < 1e-14);
    }

    #[test]
    fn bump_gradient() {
        let b = Bump {
            center: Complex64::new(0.1, 0.1),
            radius: 0.2,
            amplitude: Complex64::new(0.05, 0.02),
            power: 8,
        };
        let z = Complex64::new(0.15, 0.05);
        let (_, vx, vy) = b.eval(z);
        let h = 1e-6;
        let fx = (b.eval(z + h).0 - b.eval(z - h).0) / (2.0 * h);
        let fy = (b.eval(z + Complex64::i() * h).0 - b.eval(z - Complex64::i() * h).0) / (2.0 * h);
        assert!((fx - vx).norm() < 1e-8 && (fy - vy).norm() < 1e-8);
        assert_eq!(b.eval(Complex64::new(0.5, 0.5)).0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn variation_matches_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PolyField::sample();
        for _ in 0..3 {
            let b = Bump::random(&mut rng, 0.7);
            let chk = energy_variation(&f, &b, 1e-4, 200, 128).unwrap();
            assert!(chk.relative_error < 1e-4, "{chk:?}");
        }
    }
}
