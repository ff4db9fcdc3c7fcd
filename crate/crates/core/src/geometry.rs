//! Pointwise hyperbolic quantities of maps between Poincaré disks, the
//! algebra connecting them, and the bounds assembled from that algebra.
//!
//! Domain and target both carry `γ = 4(1-|z|²)^{-2}|dz|²`. For a jet at `z`
//! with value `u`, write `C = (1-|z|²)/(1-|u|²)`; then `e = C²(|∇f|²+|∇g|²)`
//! and `J = C²(f_x g_y - f_y g_x)`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldGrid, SpectralOps};
use crate::jet::Jet;

/// Tolerance for the "negative discriminant" sanity check in [`ehat_range`].
const DISCRIMINANT_SLACK: f64 = 1e-12;

fn target_margin(jet: &Jet) -> Result<f64> {
    let m = 1.0 - jet.value.norm_sqr();
    if !(m > 0.0) {
        return Err(Error::TargetDegenerate(jet.value.norm()));
    }
    Ok(m)
}

/// `C² = ((1-|z|²)/(1-|u|²))²`.
fn conformal_factor_sq(jet: &Jet) -> Result<f64> {
    let m = target_margin(jet)?;
    let c = (1.0 - jet.z.norm_sqr()) / m;
    Ok(c * c)
}

pub fn energy_density(jet: &Jet) -> Result<f64> {
    let (p, q, _) = jet.gram();
    Ok(conformal_factor_sq(jet)? * (p + q))
}

pub fn jacobian(jet: &Jet) -> Result<f64> {
    Ok(conformal_factor_sq(jet)? * jet.euclidean_det())
}

/// Tension field components `(τ¹, τ²)`:
///
/// `τ = ((1-|z|²)²/4) (Δ₀u + 2ū(u_x² + u_y²)/(1-|u|²))` in complex form, i.e.
/// `τ¹ = ((1-|z|²)²/4)(Δ₀f + (2/(1-|u|²))(f(|∇f|²-|∇g|²) + 2g<∇f,∇g>))` and
/// `τ² = ((1-|z|²)²/4)(Δ₀g + (2/(1-|u|²))(g(|∇g|²-|∇f|²) + 2f<∇f,∇g>))`.
///
/// The `+` sign is the one for which `τ = 0` is the Euler–Lagrange system of
/// [`total_energy`]; see `variational_pairing`.
pub fn tension(jet: &Jet) -> Result<(f64, f64)> {
    let m = target_margin(jet)?;
    let (p, q, b) = jet.gram();
    let (f, g) = (jet.value.re, jet.value.im);
    let pre = (1.0 - jet.z.norm_sqr()).powi(2) / 4.0;
    let k = 2.0 / m;
    let t1 = pre * (jet.lap_f + k * (f * (p - q) + 2.0 * g * b));
    let t2 = pre * (jet.lap_g + k * (g * (q - p) + 2.0 * f * b));
    Ok((t1, t2))
}

/// Hyperbolic length of the tension field, `2√((τ¹)²+(τ²)²)/(1-|u|²)`.
pub fn tension_norm(jet: &Jet) -> Result<f64> {
    let m = target_margin(jet)?;
    let (t1, t2) = tension(jet)?;
    Ok(2.0 * t1.hypot(t2) / m)
}

/// Complex distortion `(|∂u|+|∂̄u|)/(|∂u|-|∂̄u|)`; errors unless sense-preserving.
pub fn distortion(jet: &Jet) -> Result<f64> {
    let (a, b) = jet.wirtinger_moduli();
    if !(a > b) {
        return Err(Error::DegenerateOrientation {
            re: jet.z.re,
            im: jet.z.im,
            dz: a,
            dzbar: b,
        });
    }
    Ok((a + b) / (a - b))
}

/// Eigenvalues `(λ₋, λ₊)` of `A = C²[[|∇f|², <∇f,∇g>], [<∇f,∇g>, |∇g|²]]`,
/// i.e. `(e ∓ √(e²-4J²))/2`.
pub fn ehat_range(jet: &Jet) -> Result<(f64, f64)> {
    let e = energy_density(jet)?;
    let j = jacobian(jet)?;
    let disc = e * e - 4.0 * j * j;
    if disc < -DISCRIMINANT_SLACK * (1.0 + e * e) {
        return Err(Error::Internal(format!(
            "negative discriminant {disc:e} for e = {e}, J = {j}"
        )));
    }
    let s = disc.max(0.0).sqrt();
    let plus = (e + s) / 2.0;
    // λ₋ = J²/λ₊ avoids the cancellation in e - s
    let minus = if plus > 0.0 { j * j / plus } else { 0.0 };
    Ok((minus, plus))
}

/// Frame-dependent partial density
/// `C²(sin²θ|∇f|² + 2 sinθ cosθ <∇f,∇g> + cos²θ|∇g|²)`.
pub fn ehat_frame(jet: &Jet, theta: f64) -> Result<f64> {
    let c2 = conformal_factor_sq(jet)?;
    let (p, q, b) = jet.gram();
    let (s, c) = theta.sin_cos();
    Ok(c2 * (s * s * p + 2.0 * c * s * b + c * c * q))
}

/// Poincaré distance `2 atanh |(w₁-w₂)/(1-w̄₂w₁)|`.
pub fn hyperbolic_distance(w1: Complex64, w2: Complex64) -> Result<f64> {
    for w in [w1, w2] {
        if !(w.norm_sqr() < 1.0) {
            return Err(Error::TargetDegenerate(w.norm()));
        }
    }
    let num = (w1 - w2).norm();
    let den = (Complex64::new(1.0, 0.0) - w2.conj() * w1).norm();
    Ok(2.0 * (num / den).min(1.0).atanh())
}

/// Disk automorphism `z ↦ e^{iα}(z-a)/(1-āz)`.
pub fn moebius(a: Complex64, alpha: f64, z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, alpha) * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Both sides of `‖τ‖² = (e² - 4J²)|u|²` evaluated along independent paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensionIdentityCheck {
    /// `‖τ‖²` from the tension formula.
    pub tension_sq: f64,
    /// `(e² - 4J²)|u|²` from density and Jacobian.
    pub density_side: f64,
    /// `|tension_sq - density_side| / (1 + tension_sq)`.
    pub relative_residual: f64,
    /// `|C⁴(<∇f,∇g>² - |∇f|²|∇g|²) + J²| / (1 + J²)`.
    pub cross_term_residual: f64,
}

/// Two-path comparison for any jet; only Euclidean-harmonic jets make it vanish.
pub fn tension_identity_gap(jet: &Jet) -> Result<TensionIdentityCheck> {
    let tn = tension_norm(jet)?;
    let e = energy_density(jet)?;
    let j = jacobian(jet)?;
    let tension_sq = tn * tn;
    let density_side = (e * e - 4.0 * j * j) * jet.value.norm_sqr();
    let c2 = conformal_factor_sq(jet)?;
    let (p, q, b) = jet.gram();
    let cross = c2 * c2 * (b * b - p * q) + j * j;
    Ok(TensionIdentityCheck {
        tension_sq,
        density_side,
        relative_residual: (tension_sq - density_side).abs() / (1.0 + tension_sq),
        cross_term_residual: cross.abs() / (1.0 + j * j),
    })
}

/// [`tension_identity_gap`] restricted to Euclidean-harmonic jets, where the identity holds.
pub fn lemma2_residual(jet: &Jet) -> Result<TensionIdentityCheck> {
    if !jet.is_harmonic() {
        return Err(Error::NotHarmonic(jet.lap_f, jet.lap_g));
    }
    tension_identity_gap(jet)
}

/// The ratio `2J/e` next to the distortion, with the residual of `2J/e = 2D/(D²+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcPointwise {
    pub ratio: f64,
    pub distortion: f64,
    pub relation_residual: f64,
}

pub fn qc_pointwise(jet: &Jet) -> Result<QcPointwise> {
    let d = distortion(jet)?;
    let e = energy_density(jet)?;
    let j = jacobian(jet)?;
    let ratio = 2.0 * j / e;
    Ok(QcPointwise {
        ratio,
        distortion: d,
        relation_residual: (ratio - qc_ratio_from_distortion(d)).abs(),
    })
}

/// `2D/(D²+1)`, the value `2J/e` takes at distortion `D`.
pub fn qc_ratio_from_distortion(d: f64) -> f64 {
    2.0 * d / (d * d + 1.0)
}

/// `K² - 1` for `1 <= K < √2`.
pub fn condition_bound(k: f64) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quasiconformal constant must be >= 1, got {k}"
        )));
    }
    if k >= SQRT_2 {
        return Err(Error::HypothesisViolated(k));
    }
    Ok(k * k - 1.0)
}

/// `2√(e²-4J²)/(e - √(e²-4J²))`, the upper bound on `‖τ‖/λ₋` for harmonic jets.
/// Equals `D² - 1` at distortion `D`.
pub fn tension_ratio_bound(e: f64, j: f64) -> f64 {
    let s = (e * e - 4.0 * j * j).max(0.0).sqrt();
    2.0 * s / (e - s)
}

/// Maximum-principle distance bound `2 atanh c₀`.
pub fn distance_bound(c0: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c0) {
        return Err(Error::InvalidParameter(format!(
            "c0 must lie in [0, 1), got {c0}"
        )));
    }
    Ok(2.0 * c0.atanh())
}

/// The bound without the factor 2, `atanh c₀`.
pub fn distance_bound_unfactored(c0: f64) -> Result<f64> {
    Ok(distance_bound(c0)? / 2.0)
}

/// All pointwise quantities at one jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseGeometry {
    pub e: f64,
    pub jacobian: f64,
    pub tau: (f64, f64),
    pub tau_norm: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub distortion: Option<f64>,
}

impl PointwiseGeometry {
    pub fn at(jet: &Jet) -> Result<Self> {
        let (lambda_minus, lambda_plus) = ehat_range(jet)?;
        Ok(Self {
            e: energy_density(jet)?,
            jacobian: jacobian(jet)?,
            tau: tension(jet)?,
            tau_norm: tension_norm(jet)?,
            lambda_minus,
            lambda_plus,
            distortion: distortion(jet).ok(),
        })
    }
}

/// `E(u) = ∫ e(u) (1-|z|²)^{-2} dx dy` over the grid's disk, by trapezoid in
/// angle and Simpson (trapezoid for odd `n_r`) in radius.
pub fn total_energy(field: &FieldGrid) -> Result<f64> {
    let g = field.grid;
    if let Some(v) = field.values.iter().find(|v| !(v.norm_sqr() < 1.0)) {
        return Err(Error::TargetDegenerate(v.norm()));
    }
    let p = SpectralOps::new(g).partials(field);
    let ring_integral = |i: usize| -> f64 {
        let r = g.radius(i);
        let s: f64 = (0..g.n_t)
            .map(|j| {
                let idx = g.index(i, j);
                (p.ux[idx].norm_sqr() + p.uy[idx].norm_sqr())
                    / (1.0 - field.values[idx].norm_sqr()).powi(2)
            })
            .sum();
        s * r * std::f64::consts::TAU / g.n_t as f64
    };
    let vals: Vec<f64> = (0..=g.n_r).map(ring_integral).collect();
    Ok(radial_quadrature(&vals, g.h()))
}

/// Composite Simpson for an even number of panels, trapezoid otherwise.
pub(crate) fn radial_quadrature(vals: &[f64], h: f64) -> f64 {
    let n = vals.len() - 1;
    if n.is_multiple_of(2) {
        let mut s = vals[0] + vals[n];
        for (i, v) in vals.iter().enumerate().take(n).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * h / 3.0
    } else {
        let inner: f64 = vals[1..n].iter().sum();
        h * (inner + 0.5 * (vals[0] + vals[n]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jet(z: Complex64, u: Complex64, gf: [f64; 2], gg: [f64; 2]) -> Jet {
        Jet {
            z,
            value: u,
            grad_f: gf,
            grad_g: gg,
            lap_f: 0.0,
            lap_g: 0.0,
        }
    }

    #[test]
    fn identity_jet_quantities() {
        for z in [c(0.0, 0.0), c(0.3, -0.4), c(-0.9, 0.1)] {
            let j = Jet::identity(z);
            assert!((energy_density(&j).unwrap() - 2.0).abs() < 1e-14);
            assert!((jacobian(&j).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(tension(&j).unwrap(), (0.0, 0.0));
            assert_eq!(tension_norm(&j).unwrap(), 0.0);
            let (lm, lp) = ehat_range(&j).unwrap();
            assert!((lm - 1.0).abs() < 1e-7 && (lp - 1.0).abs() < 1e-7);
            assert!((lm * lp - 1.0).abs() < 1e-13);
            for k in 0..8 {
                assert!((ehat_frame(&j, k as f64).unwrap() - 1.0).abs() < 1e-14);
            }
            assert!((distortion(&j).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn energy_density_examples() {
        let zero = jet(c(0.2, 0.1), c(0.1, 0.0), [0.0, 0.0], [0.0, 0.0]);
        assert_eq!(energy_density(&zero).unwrap(), 0.0);
        let j = jet(c(0.0, 0.0), c(0.5, 0.0), [1.0, 0.0], [0.0, 0.0]);
        assert!((energy_density(&j).unwrap() - 16.0 / 9.0).abs() < 1e-14);
        let bad = jet(c(0.0, 0.0), c(1.0, 0.0), [1.0, 0.0], [0.0, 1.0]);
        assert!(matches!(
            energy_density(&bad),
            Err(Error::TargetDegenerate(_))
        ));
    }

    #[test]
    fn jacobian_examples() {
        let conj = jet(c(0.4, 0.0), c(0.4, 0.0), [1.0, 0.0], [0.0, -1.0]);
        assert!((jacobian(&conj).unwrap() + 1.0).abs() < 1e-14);
        let rank1 = jet(c(0.1, 0.2), c(0.3, 0.0), [1.0, 0.5], [0.0, 0.0]);
        assert_eq!(jacobian(&rank1).unwrap(), 0.0);
    }

    #[test]
    fn tension_examples() {
        // Φ(z) = z² at z = 0.3: conformal, hence harmonic
        let z = c(0.3, 0.0);
        let j = Jet::from_wirtinger(z, z * z, z * 2.0, c(0.0, 0.0));
        let (t1, t2) = tension(&j).unwrap();
        assert!(t1.abs() < 1e-15 && t2.abs() < 1e-15);

        let j = jet(c(0.0, 0.0), c(0.5, 0.0), [1.0, 0.0], [0.0, 0.0]);
        let (t1, t2) = tension(&j).unwrap();
        assert!((t1 - 1.0 / 3.0).abs() < 1e-15, "{t1}");
        assert_eq!(t2, 0.0);
        assert!((tension_norm(&j).unwrap() - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn tension_matches_complex_form() {
        let j = Jet {
            z: c(0.2, -0.3),
            value: c(0.4, 0.25),
            grad_f: [0.7, -0.2],
            grad_g: [0.3, 1.1],
            lap_f: 0.3,
            lap_g: -0.6,
        };
        let (t1, t2) = tension(&j).unwrap();
        let u = j.value;
        let n = u.conj() * (j.ux() * j.ux() + j.uy() * j.uy()) * (2.0 / (1.0 - u.norm_sqr()));
        let tau = (j.laplacian() + n) * ((1.0 - j.z.norm_sqr()).powi(2) / 4.0);
        assert!((tau.re - t1).abs() < 1e-15 && (tau.im - t2).abs() < 1e-15);
    }

    #[test]
    fn ehat_examples() {
        // unit conformal factors: z = 0, u = 0
        let j = jet(c(0.0, 0.0), c(0.0, 0.0), [2.0, 0.0], [0.0, 1.0]);
        assert!((energy_density(&j).unwrap() - 5.0).abs() < 1e-15);
        assert!((jacobian(&j).unwrap() - 2.0).abs() < 1e-15);
        let (lm, lp) = ehat_range(&j).unwrap();
        assert!((lm - 1.0).abs() < 1e-14 && (lp - 4.0).abs() < 1e-14);

        let rank1 = jet(c(0.0, 0.0), c(0.0, 0.0), [1.0, 0.0], [0.0, 0.0]);
        assert_eq!(ehat_range(&rank1).unwrap().0, 0.0);
        assert_eq!(ehat_frame(&rank1, 0.0).unwrap(), 0.0);
        assert!((ehat_frame(&rank1, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distortion_examples() {
        let re = jet(c(0.1, 0.0), c(0.1, 0.0), [1.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            distortion(&re),
            Err(Error::DegenerateOrientation { .. })
        ));
        // Φ(z) = z + 0.2 z̄
        let z = c(0.1, 0.2);
        let j = Jet::from_wirtinger(z, z + z.conj() * 0.2, c(1.0, 0.0), c(0.2, 0.0));
        assert!((distortion(&j).unwrap() - 1.5).abs() < 1e-14);
        let q = qc_pointwise(&j).unwrap();
        assert!((q.ratio - 12.0 / 13.0).abs() < 1e-14);
        assert!(q.relation_residual < 1e-14);
    }

    #[test]
    fn qc_ratio_values() {
        assert_eq!(qc_ratio_from_distortion(1.0), 1.0);
        assert!((qc_ratio_from_distortion(SQRT_2) - 2.0 * SQRT_2 / 3.0).abs() < 1e-15);
        assert!((qc_ratio_from_distortion(SQRT_2) - 0.942809).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_distance_examples() {
        assert!((hyperbolic_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap() - 3f64.ln()).abs() < 1e-15);
        let w = c(0.3, 0.6);
        assert_eq!(hyperbolic_distance(w, w).unwrap(), 0.0);
        assert!(hyperbolic_distance(c(1.0, 0.0), w).is_err());
    }

    #[test]
    fn hyperbolic_distance_geodesic_quadrature() {
        // ∫_{-0.3}^{0.3} 2/(1-x²) dx by composite Simpson
        let n = 2000;
        let h = 0.6 / n as f64;
        let f = |x: f64| 2.0 / (1.0 - x * x);
        let mut s = f(-0.3) + f(0.3);
        for k in 1..n {
            let x = -0.3 + k as f64 * h;
            s += if k % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
        }
        let oracle = s * h / 3.0;
        let d = hyperbolic_distance(c(0.3, 0.0), c(-0.3, 0.0)).unwrap();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 2.0 * (0.6f64 / 1.09).atanh()).abs() < 1e-15);
    }

    #[test]
    fn condition_and_distance_bounds() {
        assert_eq!(condition_bound(1.0).unwrap(), 0.0);
        assert!((condition_bound(1.2).unwrap() - 0.44).abs() < 1e-15);
        assert!((condition_bound(1.41).unwrap() - 0.9881).abs() < 1e-15);
        assert!(matches!(
            condition_bound(SQRT_2),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(condition_bound(0.9).is_err());

        assert_eq!(distance_bound(0.0).unwrap(), 0.0);
        assert!((distance_bound(0.44).unwrap() - 0.944462).abs() < 1e-6);
        assert!((distance_bound(0.44).unwrap() - (1.44f64 / 0.56).ln()).abs() < 1e-14);
        assert!(distance_bound(1.0).is_err());
        // series oracle: atanh c = Σ c^{2k+1}/(2k+1)
        let c0 = 0.9881f64;
        let series: f64 = (0..20000)
            .map(|k| c0.powi(2 * k + 1) / (2 * k + 1) as f64)
            .sum();
        let d = distance_bound(c0).unwrap();
        assert!((d - 2.0 * series).abs() < 1e-9);
        assert!((d - 5.1184).abs() < 1e-4);
        assert!((distance_bound_unfactored(c0).unwrap() - series).abs() < 1e-9);
    }

    #[test]
    fn tension_ratio_bound_at_sqrt2() {
        let d = SQRT_2;
        let a = 1.0;
        let b = (d - 1.0) / (d + 1.0);
        let j = Jet::from_wirtinger(c(0.1, 0.1), c(0.2, -0.1), c(a, 0.0), c(0.0, b));
        let e = energy_density(&j).unwrap();
        let jac = jacobian(&j).unwrap();
        assert!((tension_ratio_bound(e, jac) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tension_identity_conformal_jets() {
        let j = jet(c(0.0, 0.0), c(0.5, 0.0), [1.0, 0.0], [0.0, 1.0]);
        let r = lemma2_residual(&j).unwrap();
        assert_eq!(r.tension_sq, 0.0);
        assert!(r.density_side.abs() < 1e-14);
        let mut nh = j;
        nh.lap_f = 1e-3;
        assert!(matches!(lemma2_residual(&nh), Err(Error::NotHarmonic(..))));
    }

    #[test]
    fn total_energy_identity_disk() {
        let g = crate::grid::PolarGrid::new(0.5, 64, 64).unwrap();
        let f = FieldGrid::from_fn(g, |z| z);
        let e = total_energy(&f).unwrap();
        assert!((e - 2.0 * PI / 3.0).abs() < 1e-6, "{e}");
        let z = FieldGrid::constant(g, c(0.2, 0.1));
        assert_eq!(total_energy(&z).unwrap(), 0.0);
    }

    #[test]
    fn total_energy_identity_r09_against_quadrature_oracle() {
        // closed form 2π(1/(1-0.81) - 1), checked against an independent fine Simpson rule
        let closed = 2.0 * PI * (1.0 / 0.19 - 1.0);
        let n = 20000;
        let h = 0.9 / n as f64;
        let f = |r: f64| 2.0 * r / (1.0 - r * r).powi(2);
        let mut s = f(0.0) + f(0.9);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        let oracle = 2.0 * PI * s * h / 3.0;
        assert!((oracle - closed).abs() < 1e-9);
        let g = crate::grid::PolarGrid::new(0.9, 256, 64).unwrap();
        let e = total_energy(&FieldGrid::from_fn(g, |z| z)).unwrap();
        assert!((e - closed).abs() / closed < 1e-6, "{e} vs {closed}");
    }
}
