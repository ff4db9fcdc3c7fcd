//! Polar grids on Euclidean disks, fields sampled on them, and the
//! discrete derivative operators used by the solver and the diagnostics.
//!
//! Angular derivatives are pseudo-spectral (FFT along each ring); radial
//! derivatives are second-order central differences. The origin is a single
//! node whose Laplacian is closed by averaging the first ring. Ring `i`
//! keeps only angular modes `|m| <= POLE_MODES_PER_RING * i` when
//! differentiating, which bounds round-off amplification near the pole.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Angular modes retained per ring index when differentiating.
pub const POLE_MODES_PER_RING: usize = 8;

/// Converts a hyperbolic radius to the Euclidean radius of the same ball centred at 0.
pub fn ball_radius(hyperbolic_radius: f64) -> Result<f64> {
    if !(hyperbolic_radius > 0.0) || !hyperbolic_radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {hyperbolic_radius}"
        )));
    }
    Ok((0.5 * hyperbolic_radius).tanh())
}

/// Nodes `r_i = rho_max·i/n_r` (`i = 0..=n_r`) by `t_j = 2πj/n_t`. Ring 0 is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub rho_max: f64,
    pub n_r: usize,
    pub n_t: usize,
}

impl PolarGrid {
    pub fn new(rho_max: f64, n_r: usize, n_t: usize) -> Result<Self> {
        if !(rho_max > 0.0 && rho_max < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_max must lie in (0, 1), got {rho_max}"
            )));
        }
        if n_r < 8 {
            return Err(Error::InvalidParameter(format!(
                "n_r must be at least 8, got {n_r}"
            )));
        }
        if n_t < 4 || !n_t.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n_t must be even and at least 4, got {n_t}"
            )));
        }
        Ok(Self { rho_max, n_r, n_t })
    }

    /// Grid realizing the hyperbolic ball `B_R(0)`.
    pub fn for_ball(hyperbolic_radius: f64, n_r: usize, n_t: usize) -> Result<Self> {
        Self::new(ball_radius(hyperbolic_radius)?, n_r, n_t)
    }

    /// Same disk, twice the nodes in each direction.
    pub fn refined(&self) -> Self {
        Self {
            rho_max: self.rho_max,
            n_r: 2 * self.n_r,
            n_t: 2 * self.n_t,
        }
    }

    /// Hyperbolic radius of the ball this grid covers.
    pub fn hyperbolic_radius(&self) -> f64 {
        2.0 * self.rho_max.atanh()
    }

    pub fn h(&self) -> f64 {
        self.rho_max / self.n_r as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.rho_max * i as f64 / self.n_r as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_t as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(i), self.angle(j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_t + j
    }

    /// Number of stored nodes, counting the origin once per angle.
    pub fn len(&self) -> usize {
        (self.n_r + 1) * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Angular frequency of FFT bin `k`; the Nyquist bin maps to `+n_t/2`.
    pub(crate) fn mode(&self, k: usize) -> i64 {
        let n = self.n_t as i64;
        let k = k as i64;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }
}

/// Values `u = f + i g` at every node of a [`PolarGrid`], ring-major.
/// Ring 0 stores the origin value repeated `n_t` times.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub grid: PolarGrid,
    pub values: Vec<Complex64>,
}

impl FieldGrid {
    pub fn from_fn(grid: PolarGrid, f: impl Fn(Complex64) -> Complex64 + Sync) -> Self {
        let origin = f(Complex64::new(0.0, 0.0));
        let mut values = vec![origin; grid.len()];
        values[grid.n_t..]
            .par_chunks_mut(grid.n_t)
            .enumerate()
            .for_each(|(k, row)| {
                let i = k + 1;
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(grid.node(i, j));
                }
            });
        Self { grid, values }
    }

    pub fn constant(grid: PolarGrid, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn ring(&self, i: usize) -> &[Complex64] {
        let n = self.grid.n_t;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn boundary(&self) -> &[Complex64] {
        self.ring(self.grid.n_r)
    }

    /// Largest `|u|` over all nodes.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes `r,t,f,g` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "t", "f", "g"])?;
        for i in 0..=self.grid.n_r {
            for j in 0..self.grid.n_t {
                let v = self.at(i, j);
                w.write_record(&[
                    fmt_f64(self.grid.radius(i)),
                    fmt_f64(self.grid.angle(j)),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Resamples onto another grid whose disk lies inside this one.
    /// Radial direction: 4-point Lagrange through neighbouring rings (reflected
    /// through the origin near `r = 0`); angular direction: trigonometric
    /// interpolation of each ring.
    pub fn resample(&self, target: PolarGrid) -> Result<FieldGrid> {
        if target.rho_max > self.grid.rho_max * (1.0 + 1e-12) {
            return Err(Error::GridMismatch(format!(
                "target radius {} exceeds source radius {}",
                target.rho_max, self.grid.rho_max
            )));
        }
        let sampler = RingSampler::new(self);
        Ok(FieldGrid::from_fn(target, |z| {
            sampler.sample(z.norm(), z.arg().rem_euclid(TAU))
        }))
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// Trigonometric-in-angle, Lagrange-in-radius interpolation of a field.
pub(crate) struct RingSampler<'a> {
    field: &'a FieldGrid,
    coeffs: Vec<Vec<Complex64>>,
}

impl<'a> RingSampler<'a> {
    pub(crate) fn new(field: &'a FieldGrid) -> Self {
        let g = field.grid;
        let fft = FftPlanner::new().plan_fft_forward(g.n_t);
        let scale = 1.0 / g.n_t as f64;
        let coeffs = (0..=g.n_r)
            .map(|i| {
                let mut buf = field.ring(i).to_vec();
                fft.process(&mut buf);
                buf.iter_mut().for_each(|c| *c *= scale);
                buf
            })
            .collect();
        Self { field, coeffs }
    }

    fn ring_value(&self, ring: isize, t: f64) -> Complex64 {
        let g = self.field.grid;
        let (i, t) = if ring < 0 {
            ((-ring) as usize, t + std::f64::consts::PI)
        } else {
            (ring as usize, t)
        };
        if i == 0 {
            return self.field.at(0, 0);
        }
        // exact node hit
        let s = t.rem_euclid(TAU) / TAU * g.n_t as f64;
        if (s - s.round()).abs() < 1e-9 {
            return self.field.at(i, (s.round() as usize) % g.n_t);
        }
        let c = &self.coeffs[i];
        let half = g.n_t / 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, ck) in c.iter().enumerate() {
            if k == half {
                acc += ck * (half as f64 * t).cos();
            } else {
                acc += ck * Complex64::from_polar(1.0, g.mode(k) as f64 * t);
            }
        }
        acc
    }

    pub(crate) fn sample(&self, r: f64, t: f64) -> Complex64 {
        let g = self.field.grid;
        let s = r / g.h();
        let n = g.n_r as isize;
        if (s - s.round()).abs() < 1e-9 && s.round() as isize <= n {
            return self.ring_value(s.round() as isize, t);
        }
        let base = (s.floor() as isize - 1).min(n - 3);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let ia = base + a;
            let mut w = 1.0;
            for b in 0..4 {
                if b != a {
                    let ib = base + b;
                    w *= (s - ib as f64) / ((ia - ib) as f64);
                }
            }
            acc += self.ring_value(ia, t) * w;
        }
        acc
    }
}

/// Ring index with its `u_x`, `u_y` and Laplacian.
type RingPartials = (usize, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>);

/// Complex partial derivatives of a field at every node.
#[derive(Debug, Clone)]
pub struct GridPartials {
    pub ux: Vec<Complex64>,
    pub uy: Vec<Complex64>,
    pub lap: Vec<Complex64>,
}

/// FFT plans and helpers for differentiating fields on one grid.
#[derive(Clone)]
pub struct SpectralOps {
    pub grid: PolarGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
}

impl SpectralOps {
    pub fn new(grid: PolarGrid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_t);
        let inverse = planner.plan_fft_inverse(grid.n_t);
        let cos_t = (0..grid.n_t).map(|j| grid.angle(j).cos()).collect();
        let sin_t = (0..grid.n_t).map(|j| grid.angle(j).sin()).collect();
        Self {
            grid,
            forward,
            inverse,
            cos_t,
            sin_t,
        }
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        let s = 1.0 / self.grid.n_t as f64;
        buf.iter_mut().for_each(|c| *c *= s);
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    /// `(u_t, u_tt)` on ring `i >= 1`, keeping modes `|m| <= POLE_MODES_PER_RING·i`.
    fn angular(&self, ring: &[Complex64], i: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = self.grid;
        let cap = (POLE_MODES_PER_RING * i) as i64;
        let mut d1 = vec![Complex64::new(0.0, 0.0); g.n_t];
        let mut d2 = vec![Complex64::new(0.0, 0.0); g.n_t];
        if ring.iter().all(|v| *v == ring[0]) {
            return (d1, d2);
        }
        let mut c = ring.to_vec();
        self.forward(&mut c);
        for k in 0..g.n_t {
            let m = g.mode(k);
            if m.abs() > cap {
                continue;
            }
            let mf = m as f64;
            if 2 * k != g.n_t {
                d1[k] = c[k] * Complex64::new(0.0, mf);
            }
            d2[k] = c[k] * (-mf * mf);
        }
        self.inverse(&mut d1);
        self.inverse(&mut d2);
        (d1, d2)
    }

    /// Partial derivatives at every node. Interior rings use central radial
    /// differences; the boundary ring uses second-order one-sided ones.
    pub fn partials(&self, field: &FieldGrid) -> GridPartials {
        let g = self.grid;
        assert_eq!(g, field.grid, "field grid does not match operator grid");
        let n_t = g.n_t;
        let h = g.h();
        let zero = Complex64::new(0.0, 0.0);
        let mut ux = vec![zero; g.len()];
        let mut uy = vec![zero; g.len()];
        let mut lap = vec![zero; g.len()];

        // origin
        let u0 = field.at(0, 0);
        let ring1 = field.ring(1);
        // offsets from u0 make constant rings give exact zeros
        let mean_offset: Complex64 = ring1.iter().map(|v| v - u0).sum::<Complex64>() / n_t as f64;
        let gx: Complex64 = ring1
            .iter()
            .zip(&self.cos_t)
            .map(|(v, c)| (v - u0) * c)
            .sum::<Complex64>()
            * (2.0 / (n_t as f64 * h));
        let gy: Complex64 = ring1
            .iter()
            .zip(&self.sin_t)
            .map(|(v, s)| (v - u0) * s)
            .sum::<Complex64>()
            * (2.0 / (n_t as f64 * h));
        let l0 = mean_offset * (4.0 / (h * h));
        for j in 0..n_t {
            ux[j] = gx;
            uy[j] = gy;
            lap[j] = l0;
        }

        let rows: Vec<RingPartials> = (1..=g.n_r)
            .into_par_iter()
            .map(|i| {
                let r = g.radius(i);
                let (ut, utt) = self.angular(field.ring(i), i);
                let mut rx = vec![zero; n_t];
                let mut ry = vec![zero; n_t];
                let mut rl = vec![zero; n_t];
                for j in 0..n_t {
                    let (ur, urr) = if i < g.n_r {
                        let up = field.at(i + 1, j);
                        let dn = field.at(i - 1, j);
                        let c = field.at(i, j);
                        ((up - dn) / (2.0 * h), ((up - c) - (c - dn)) / (h * h))
                    } else {
                        let c = field.at(i, j);
                        let d1 = field.at(i - 1, j);
                        let d2 = field.at(i - 2, j);
                        let d3 = field.at(i - 3, j);
                        (
                            ((c - d1) * 3.0 - (d1 - d2)) / (2.0 * h),
                            ((c - d1) * 2.0 - (d1 - d2) * 3.0 + (d2 - d3)) / (h * h),
                        )
                    };
                    let (ct, st) = (self.cos_t[j], self.sin_t[j]);
                    rx[j] = ur * ct - ut[j] * (st / r);
                    ry[j] = ur * st + ut[j] * (ct / r);
                    rl[j] = urr + ur / r + utt[j] / (r * r);
                }
                (i, rx, ry, rl)
            })
            .collect();
        for (i, rx, ry, rl) in rows {
            let s = i * n_t;
            ux[s..s + n_t].copy_from_slice(&rx);
            uy[s..s + n_t].copy_from_slice(&ry);
            lap[s..s + n_t].copy_from_slice(&rl);
        }
        GridPartials { ux, uy, lap }
    }

    /// Finite-difference jets at every node (ring-major, boundary ring included).
    pub fn jets(&self, field: &FieldGrid) -> Vec<Jet> {
        let p = self.partials(field);
        let g = self.grid;
        (0..g.len())
            .map(|idx| {
                let (i, j) = (idx / g.n_t, idx % g.n_t);
                Jet::from_partials(
                    g.node(i, j),
                    field.values[idx],
                    p.ux[idx],
                    p.uy[idx],
                    p.lap[idx],
                )
            })
            .collect()
    }
}

/// Writes `sweep,residual` rows.
pub fn write_residual_csv(path: impl AsRef<Path>, history: &[f64]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "sweep,residual")?;
    for (k, r) in history.iter().enumerate() {
        writeln!(f, "{k},{}", fmt_f64(*r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_radius_values() {
        assert!((ball_radius(2.0).unwrap() - 1f64.tanh()).abs() < 1e-15);
        assert!(ball_radius(1e-9).unwrap() < 1e-9);
        assert!(ball_radius(0.0).is_err());
        assert!(ball_radius(-1.0).is_err());
        let mut prev = 0.0;
        for k in 1..40 {
            let r = ball_radius(k as f64 * 0.5).unwrap();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
    }

    #[test]
    fn grid_invariants() {
        assert!(PolarGrid::new(1.0, 16, 32).is_err());
        assert!(PolarGrid::new(0.5, 4, 32).is_err());
        assert!(PolarGrid::new(0.5, 16, 31).is_err());
        let g = PolarGrid::new(0.5, 16, 32).unwrap();
        assert_eq!(g.len(), 17 * 32);
        assert_eq!(g.mode(16), 16);
        assert_eq!(g.mode(17), -15);
    }

    #[test]
    fn identity_partials_are_exact() {
        let g = PolarGrid::new(0.7, 32, 64).unwrap();
        let f = FieldGrid::from_fn(g, |z| z);
        let ops = SpectralOps::new(g);
        let p = ops.partials(&f);
        for idx in 0..g.len() {
            assert!((p.ux[idx] - 1.0).norm() < 1e-12, "{idx}");
            assert!((p.uy[idx] - Complex64::i()).norm() < 1e-12);
            assert!(p.lap[idx].norm() < 1e-9);
        }
    }

    #[test]
    fn quadratic_laplacian_second_order() {
        // u = |z|^2 has Δu = 4 everywhere; central differences are exact for r^2
        let g = PolarGrid::new(0.6, 16, 32).unwrap();
        let f = FieldGrid::from_fn(g, |z| Complex64::new(z.norm_sqr(), 0.0));
        let p = SpectralOps::new(g).partials(&f);
        for idx in 0..g.n_r * g.n_t {
            assert!((p.lap[idx].re - 4.0).abs() < 1e-9, "{idx} {}", p.lap[idx]);
        }
    }

    #[test]
    fn resample_reproduces_smooth_field() {
        let g = PolarGrid::new(0.8, 64, 64).unwrap();
        let u = |z: Complex64| z * 0.5 + z.conj() * z * 0.1 + Complex64::new(0.1, 0.0);
        let f = FieldGrid::from_fn(g, u);
        let target = PolarGrid::new(0.5, 24, 48).unwrap();
        let r = f.resample(target).unwrap();
        for i in 0..=target.n_r {
            for j in 0..target.n_t {
                assert!((r.at(i, j) - u(target.node(i, j))).norm() < 1e-7);
            }
        }
        assert!(f.resample(PolarGrid::new(0.9, 8, 8).unwrap()).is_err());
    }
}
