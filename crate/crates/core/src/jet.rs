//! First-order jets with Laplacians: the pointwise input to every geometric formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Value, Euclidean gradients and Euclidean Laplacians of a map `u = (f, g)`
/// between unit disks, taken at a source point `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub z: Complex64,
    pub value: Complex64,
    pub grad_f: [f64; 2],
    pub grad_g: [f64; 2],
    pub lap_f: f64,
    pub lap_g: f64,
}

impl Jet {
    /// Jet with zero Laplacians from value and Wirtinger derivatives `u_z`, `u_zbar`.
    pub fn from_wirtinger(z: Complex64, value: Complex64, dz: Complex64, dzbar: Complex64) -> Self {
        Self::from_partials(
            z,
            value,
            dz + dzbar,
            Complex64::i() * (dz - dzbar),
            Complex64::new(0.0, 0.0),
        )
    }

    /// Jet from complex partials `u_x`, `u_y` and complex Laplacian `Δu`.
    pub fn from_partials(
        z: Complex64,
        value: Complex64,
        ux: Complex64,
        uy: Complex64,
        lap: Complex64,
    ) -> Self {
        Self {
            z,
            value,
            grad_f: [ux.re, uy.re],
            grad_g: [ux.im, uy.im],
            lap_f: lap.re,
            lap_g: lap.im,
        }
    }

    /// Identity map at `z`.
    pub fn identity(z: Complex64) -> Self {
        Self::from_wirtinger(z, z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn ux(&self) -> Complex64 {
        Complex64::new(self.grad_f[0], self.grad_g[0])
    }

    pub fn uy(&self) -> Complex64 {
        Complex64::new(self.grad_f[1], self.grad_g[1])
    }

    pub fn laplacian(&self) -> Complex64 {
        Complex64::new(self.lap_f, self.lap_g)
    }

    /// `∂_z u = (u_x - i u_y) / 2`.
    pub fn dz(&self) -> Complex64 {
        (self.ux() - Complex64::i() * self.uy()) * 0.5
    }

    /// `∂_zbar u = (u_x + i u_y) / 2`.
    pub fn dzbar(&self) -> Complex64 {
        (self.ux() + Complex64::i() * self.uy()) * 0.5
    }

    /// `(|∂_z u|, |∂_zbar u|)`.
    pub fn wirtinger_moduli(&self) -> (f64, f64) {
        (self.dz().norm(), self.dzbar().norm())
    }

    pub fn is_harmonic(&self) -> bool {
        self.lap_f == 0.0 && self.lap_g == 0.0
    }

    /// Gram entries `(|∇f|², |∇g|², <∇f, ∇g>)`.
    pub fn gram(&self) -> (f64, f64, f64) {
        let [fx, fy] = self.grad_f;
        let [gx, gy] = self.grad_g;
        (fx * fx + fy * fy, gx * gx + gy * gy, fx * gx + fy * gy)
    }

    /// Euclidean Jacobian determinant `f_x g_y - f_y g_x`.
    pub fn euclidean_det(&self) -> f64 {
        self.grad_f[0] * self.grad_g[1] - self.grad_f[1] * self.grad_g[0]
    }

    /// Jet of `e^{iα} u`: post-composition with a rotation of the target disk.
    pub fn rotate_target(&self, alpha: f64) -> Self {
        let w = Complex64::from_polar(1.0, alpha);
        Self::from_partials(
            self.z,
            w * self.value,
            w * self.ux(),
            w * self.uy(),
            w * self.laplacian(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wirtinger_round_trip() {
        let z = Complex64::new(0.1, -0.2);
        let dz = Complex64::new(1.3, 0.4);
        let dzb = Complex64::new(-0.2, 0.1);
        let j = Jet::from_wirtinger(z, Complex64::new(0.3, 0.3), dz, dzb);
        assert!((j.dz() - dz).norm() < 1e-15);
        assert!((j.dzbar() - dzb).norm() < 1e-15);
        assert!(j.is_harmonic());
    }

    #[test]
    fn real_part_map_is_rank_one() {
        // Φ(z) = Re z
        let j = Jet {
            z: Complex64::new(0.2, 0.0),
            value: Complex64::new(0.2, 0.0),
            grad_f: [1.0, 0.0],
            grad_g: [0.0, 0.0],
            lap_f: 0.0,
            lap_g: 0.0,
        };
        let (a, b) = j.wirtinger_moduli();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert_eq!(j.euclidean_det(), 0.0);
    }
}
