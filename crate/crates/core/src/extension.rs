//! Euclidean harmonic (Poisson) extension of a boundary map in spectral form.
//!
//! The Poisson integral of `φ` equals `Σ_{n≥0} a_n z^n + Σ_{n<0} a_n z̄^{|n|}`
//! where `a_n` are the Fourier coefficients of `φ`. Truncating at `|n| <= M`
//! gives exact first derivatives and identically zero Laplacians.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryMap;
use crate::error::{Error, Result};
use crate::geometry;
use crate::grid::{fmt_f64, FieldGrid, PolarGrid};
use crate::jet::Jet;

/// `P_ρ(θ) = (1-ρ²)/(1+ρ²-2ρ cos θ)`.
pub fn poisson_kernel(rho: f64, theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "Poisson kernel needs 0 <= rho < 1, got {rho}"
        )));
    }
    Ok((1.0 - rho * rho) / (1.0 + rho * rho - 2.0 * rho * theta.cos()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtensionParams {
    /// Boundary samples `N`.
    pub samples: usize,
    /// Truncation order `M`.
    pub truncation: usize,
    /// Largest `|z|` at which the extension may be evaluated.
    pub rho_eval: f64,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        Self {
            samples: 2048,
            truncation: 512,
            rho_eval: 0.995,
        }
    }
}

/// Metadata written next to exported extension grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionMeta {
    pub samples: usize,
    pub truncation: usize,
    pub rho_eval: f64,
    /// `Σ_{M<|n|≤N/2} |n||a_n| ρ_eval^{|n|-1}` from the resolved but discarded coefficients.
    pub tail_bound: f64,
    pub parseval_sum: f64,
}

#[derive(Debug, Clone)]
pub struct FourierExtension {
    /// `a_n` for `n = -M..=M`, stored at `n + M`.
    coeffs: Vec<Complex64>,
    truncation: usize,
    samples: usize,
    rho_eval: f64,
    tail_bound: f64,
}

impl FourierExtension {
    /// Samples `φ` at `N` equispaced angles and keeps `|n| <= M` of its DFT.
    pub fn build(map: &BoundaryMap, params: ExtensionParams) -> Result<Self> {
        let ExtensionParams {
            samples,
            truncation,
            rho_eval,
        } = params;
        if truncation == 0 || samples < 4 * truncation {
            return Err(Error::InvalidParameter(format!(
                "need N >= 4M with M >= 1, got N = {samples}, M = {truncation}"
            )));
        }
        if !(rho_eval > 0.0 && rho_eval < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_eval must lie in (0, 1), got {rho_eval}"
            )));
        }
        map.ensure_valid(samples.max(crate::boundary::MIN_VALIDATION_SAMPLES))?;

        let mut buf: Vec<Complex64> = (0..samples)
            .map(|j| map.eval(std::f64::consts::TAU * j as f64 / samples as f64))
            .collect();
        FftPlanner::new()
            .plan_fft_forward(samples)
            .process(&mut buf);
        let scale = 1.0 / samples as f64;
        let at = |n: i64| buf[n.rem_euclid(samples as i64) as usize] * scale;

        let m = truncation as i64;
        let coeffs: Vec<Complex64> = (-m..=m).map(at).collect();
        let half = (samples / 2) as i64;
        let mut tail_bound = 0.0;
        for n in (m + 1)..=half {
            let w = n as f64 * rho_eval.powi(n as i32 - 1);
            tail_bound += w * at(n).norm();
            if n != half {
                tail_bound += w * at(-n).norm();
            }
        }
        Ok(Self {
            coeffs,
            truncation,
            samples,
            rho_eval,
            tail_bound,
        })
    }

    /// Extension from explicit coefficients `a_{-M..=M}`; used for synthetic tests.
    pub fn from_coefficients(coeffs: Vec<Complex64>, rho_eval: f64) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidParameter(
                "coefficient vector must have odd length 2M+1".into(),
            ));
        }
        let truncation = coeffs.len() / 2;
        Ok(Self {
            coeffs,
            truncation,
            samples: 4 * truncation.max(1),
            rho_eval,
            tail_bound: 0.0,
        })
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        let m = self.truncation as i64;
        if n.abs() > m {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + m) as usize]
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn rho_eval(&self) -> f64 {
        self.rho_eval
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn meta(&self) -> ExtensionMeta {
        ExtensionMeta {
            samples: self.samples,
            truncation: self.truncation,
            rho_eval: self.rho_eval,
            tail_bound: self.tail_bound,
            parseval_sum: self.parseval_sum(),
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r > self.rho_eval * (1.0 + 1e-14) {
            return Err(Error::OutsideEvaluationRadius(r, self.rho_eval));
        }
        Ok(())
    }

    /// Value and Wirtinger derivatives at `z`.
    pub fn jet(&self, z: Complex64) -> Result<Jet> {
        self.check_radius(z.norm())?;
        let zb = z.conj();
        let one = Complex64::new(1.0, 0.0);
        let mut value = self.coefficient(0);
        let mut dz = Complex64::new(0.0, 0.0);
        let mut dzb = Complex64::new(0.0, 0.0);
        // pz = z^{n-1}, pzb = z̄^{n-1}
        let mut pz = one;
        let mut pzb = one;
        for n in 1..=self.truncation as i64 {
            let nf = n as f64;
            dz += self.coefficient(n) * pz * nf;
            dzb += self.coefficient(-n) * pzb * nf;
            pz *= z;
            pzb *= zb;
            value += self.coefficient(n) * pz + self.coefficient(-n) * pzb;
        }
        Ok(Jet::from_wirtinger(z, value, dz, dzb))
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z)?.value)
    }

    /// Per-ring `(value, ∂u, ∂̄u)` on a grid, via one inverse FFT per series
    /// after folding frequencies modulo `n_t`.
    fn ring_series(&self, grid: PolarGrid) -> Result<Vec<[Vec<Complex64>; 3]>> {
        self.check_radius(grid.rho_max)?;
        let n_t = grid.n_t;
        let ifft = FftPlanner::new().plan_fft_inverse(n_t);
        let m = self.truncation as i64;
        let zero = Complex64::new(0.0, 0.0);
        Ok((0..=grid.n_r)
            .into_par_iter()
            .map(|i| {
                let r = grid.radius(i);
                let mut val = vec![zero; n_t];
                let mut dz = vec![zero; n_t];
                let mut dzb = vec![zero; n_t];
                let slot = |k: i64| k.rem_euclid(n_t as i64) as usize;
                for n in -m..=m {
                    let a = self.coefficient(n);
                    val[slot(n)] += a * r.powi(n.abs() as i32);
                    if n >= 1 {
                        dz[slot(n - 1)] += a * (n as f64 * r.powi(n as i32 - 1));
                    } else if n <= -1 {
                        dzb[slot(n + 1)] += a * (-n as f64 * r.powi((-n) as i32 - 1));
                    }
                }
                ifft.process(&mut val);
                ifft.process(&mut dz);
                ifft.process(&mut dzb);
                [val, dz, dzb]
            })
            .collect())
    }

    /// Extension values at every grid node.
    pub fn sample_grid(&self, grid: PolarGrid) -> Result<FieldGrid> {
        let series = self.ring_series(grid)?;
        let mut values = Vec::with_capacity(grid.len());
        for s in &series {
            values.extend_from_slice(&s[0]);
        }
        Ok(FieldGrid { grid, values })
    }

    /// Analytic jets at every grid node, ring-major.
    pub fn grid_jets(&self, grid: PolarGrid) -> Result<Vec<Jet>> {
        let series = self.ring_series(grid)?;
        let mut jets = Vec::with_capacity(grid.len());
        for (i, [val, dz, dzb]) in series.iter().enumerate() {
            for j in 0..grid.n_t {
                jets.push(Jet::from_wirtinger(grid.node(i, j), val[j], dz[j], dzb[j]));
            }
        }
        Ok(jets)
    }

    /// Writes `r,t,f,g,e,J,D` rows for the extension on `grid`. `D` is empty
    /// where the jet is not sense-preserving.
    pub fn write_csv(&self, grid: PolarGrid, path: impl AsRef<Path>) -> Result<()> {
        let jets = self.grid_jets(grid)?;
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "t", "f", "g", "e", "J", "D"])?;
        for (idx, jet) in jets.iter().enumerate() {
            let (i, j) = (idx / grid.n_t, idx % grid.n_t);
            let e = geometry::energy_density(jet)
                .map(fmt_f64)
                .unwrap_or_default();
            let jac = geometry::jacobian(jet).map(fmt_f64).unwrap_or_default();
            let d = geometry::distortion(jet).map(fmt_f64).unwrap_or_default();
            w.write_record(&[
                fmt_f64(grid.radius(i)),
                fmt_f64(grid.angle(j)),
                fmt_f64(jet.value.re),
                fmt_f64(jet.value.im),
                e,
                jac,
                d,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Grid estimate of `sup D_Φ` with its provenance. Not a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub k_hat: f64,
    pub argmax_ring: usize,
    pub argmax_angle: usize,
    pub argmax_re: f64,
    pub argmax_im: f64,
    pub grid: PolarGrid,
}

/// Maximum distortion over all grid nodes. The first maximal node in
/// ring-major order is reported.
pub fn estimate_k(ext: &FourierExtension, grid: PolarGrid) -> Result<KEstimate> {
    let jets = ext.grid_jets(grid)?;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (idx, jet) in jets.iter().enumerate() {
        let d = geometry::distortion(jet)?;
        if d > best.0 {
            best = (d, idx);
        }
    }
    let (i, j) = (best.1 / grid.n_t, best.1 % grid.n_t);
    let z = grid.node(i, j);
    Ok(KEstimate {
        k_hat: best.0,
        argmax_ring: i,
        argmax_angle: j,
        argmax_re: z.re,
        argmax_im: z.im,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize, m: usize) -> ExtensionParams {
        ExtensionParams {
            samples: n,
            truncation: m,
            rho_eval: 0.995,
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(poisson_kernel(0.0, 1.234).unwrap(), 1.0);
        assert!((poisson_kernel(0.5, 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((poisson_kernel(0.5, PI).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(poisson_kernel(1.0, 0.0).is_err());
    }

    #[test]
    fn identity_coefficients() {
        let e = FourierExtension::build(&BoundaryMap::identity(), params(256, 64)).unwrap();
        assert!((e.coefficient(1) - 1.0).norm() < 1e-14);
        for n in -64..=64 {
            if n != 1 {
                assert!(e.coefficient(n).norm() < 1e-14, "{n}");
            }
        }
        let j = e.jet(c(0.3, 0.0)).unwrap();
        assert!((j.value - 0.3).norm() < 1e-14);
        assert!((j.grad_f[0] - 1.0).abs() < 1e-14 && j.grad_f[1].abs() < 1e-14);
        assert!(j.grad_g[0].abs() < 1e-14 && (j.grad_g[1] - 1.0).abs() < 1e-14);
        assert!(j.is_harmonic());
    }

    #[test]
    fn rotation_coefficients() {
        let alpha = 0.8;
        let e = FourierExtension::build(&BoundaryMap::rotation(alpha).unwrap(), params(256, 64))
            .unwrap();
        assert!((e.coefficient(1) - Complex64::from_polar(1.0, alpha)).norm() < 1e-14);
        assert!(e.coefficient(0).norm() < 1e-14);

        let e =
            FourierExtension::build(&BoundaryMap::rotation(FRAC_PI_2).unwrap(), params(256, 64))
                .unwrap();
        let j = e.jet(c(0.5, 0.0)).unwrap();
        assert!((j.value - c(0.0, 0.5)).norm() < 1e-14);
        let (a, b) = j.wirtinger_moduli();
        assert!((a - 1.0).abs() < 1e-14 && b < 1e-14);
    }

    #[test]
    fn mean_value_property() {
        let map = BoundaryMap::perturbed(0.3, 2).unwrap();
        let n = 512;
        let e = FourierExtension::build(&map, params(n, 128)).unwrap();
        let avg: Complex64 = (0..n)
            .map(|j| map.eval(std::f64::consts::TAU * j as f64 / n as f64))
            .sum::<Complex64>()
            / n as f64;
        assert!((e.value(c(0.0, 0.0)).unwrap() - avg).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(FourierExtension::build(&BoundaryMap::identity(), params(100, 64)).is_err());
        assert!(FourierExtension::build(&BoundaryMap::custom(|t| -t), params(256, 64)).is_err());
        let e = FourierExtension::build(&BoundaryMap::identity(), params(256, 64)).unwrap();
        assert!(matches!(
            e.jet(c(0.999, 0.0)),
            Err(Error::OutsideEvaluationRadius(..))
        ));
    }

    #[test]
    fn grid_jets_match_pointwise() {
        let map = BoundaryMap::moebius(c(0.2, 0.3), 0.4).unwrap();
        let e = FourierExtension::build(&map, params(512, 128)).unwrap();
        let g = PolarGrid::new(0.9, 8, 16).unwrap();
        let jets = e.grid_jets(g).unwrap();
        for (idx, jet) in jets.iter().enumerate() {
            let p = e.jet(jet.z).unwrap();
            assert!((p.value - jet.value).norm() < 1e-13);
            assert!((p.dz() - jet.dz()).norm() < 1e-12);
            assert!((p.dzbar() - jet.dzbar()).norm() < 1e-12, "{idx}");
        }
    }

    #[test]
    fn parseval_bound() {
        for map in [
            BoundaryMap::perturbed(0.5, 1).unwrap(),
            BoundaryMap::identity(),
        ] {
            let e = FourierExtension::build(&map, params(1024, 256)).unwrap();
            assert!(e.parseval_sum() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn holomorphic_extension_is_conformal() {
        let coeffs = vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.1, 0.0),
            c(0.6, 0.2),
            c(0.1, -0.05),
        ];
        let e = FourierExtension::from_coefficients(coeffs, 0.9).unwrap();
        for z in [c(0.1, 0.2), c(-0.5, 0.3), c(0.0, -0.8)] {
            let d = geometry::distortion(&e.jet(z).unwrap()).unwrap();
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_k_isometries() {
        let g = PolarGrid::new(0.99, 16, 32).unwrap();
        for map in [BoundaryMap::identity(), BoundaryMap::rotation(1.1).unwrap()] {
            let e = FourierExtension::build(&map, params(256, 64)).unwrap();
            let k = estimate_k(&e, g).unwrap();
            assert!((k.k_hat - 1.0).abs() < 1e-12);
        }
    }
}
