//! Dirichlet problem for hyperbolic-harmonic maps on a polar grid.
//!
//! Interior stationarity is the semilinear system `Δu = -2ū(u_x²+u_y²)/(1-|u|²)`
//! with the flat Laplacian. Each sweep lags the right side, solves the linear
//! Dirichlet problem exactly with a polar fast Poisson solver (FFT in angle,
//! one tridiagonal system per mode in radius) and blends the result with
//! damping `ω`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::grid::{FieldGrid, GridPartials, PolarGrid, SpectralOps};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Blend factor `ω ∈ (0, 1]`.
    pub damping: f64,
    /// Stop once the sup of `‖τ‖` over interior nodes is at most this.
    pub tol_residual: f64,
    /// Stop once the sup hyperbolic change per sweep falls below this while
    /// the residual is no longer decreasing.
    pub tol_change: f64,
    pub max_sweeps: usize,
    /// Reject iterates with `1-|u|²` below this at any node.
    pub epsilon_clamp: f64,
    /// Keep a copy of the iterate every `k` sweeps (0 disables).
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            damping: 0.6,
            tol_residual: 1e-8,
            tol_change: 1e-10,
            max_sweeps: 500,
            epsilon_clamp: 1e-12,
            snapshot_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        for (name, v) in [
            ("tol_residual", self.tol_residual),
            ("tol_change", self.tol_change),
            ("epsilon_clamp", self.epsilon_clamp),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter(
                "max_sweeps must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub field: FieldGrid,
    /// Residual before each sweep, then the final residual.
    pub residual_history: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// `(sweep, iterate)` pairs, including the initial field.
    pub snapshots: Vec<(usize, FieldGrid)>,
}

impl SolverResult {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

/// Exact solver for `Δu = F` in the interior with prescribed boundary ring,
/// using the same radial stencil and origin closure as [`SpectralOps`].
pub struct PolarPoisson {
    ops: SpectralOps,
}

impl PolarPoisson {
    pub fn new(grid: PolarGrid) -> Self {
        Self {
            ops: SpectralOps::new(grid),
        }
    }

    pub fn grid(&self) -> PolarGrid {
        self.ops.grid
    }

    /// `rhs` is indexed like a field; its boundary ring is ignored.
    pub fn solve(&self, rhs: &[Complex64], boundary: &[Complex64]) -> FieldGrid {
        let g = self.ops.grid;
        let (n_r, n_t) = (g.n_r, g.n_t);
        let h = g.h();
        let h2 = h * h;
        let zero = Complex64::new(0.0, 0.0);

        // spectral[i][k] for rings 1..=n_r (index i-1)
        let spectral: Vec<Vec<Complex64>> = (1..=n_r)
            .into_par_iter()
            .map(|i| {
                let mut buf = if i == n_r {
                    boundary.to_vec()
                } else {
                    rhs[i * n_t..(i + 1) * n_t].to_vec()
                };
                self.ops.forward(&mut buf);
                buf
            })
            .collect();
        let f0 = rhs[0];

        // columns[k][i] for i = 0..=n_r
        let columns: Vec<Vec<Complex64>> = (0..n_t)
            .into_par_iter()
            .map(|k| {
                let m = g.mode(k) as f64;
                let bk = spectral[n_r - 1][k];
                let mut col = vec![zero; n_r + 1];
                col[n_r] = bk;
                // rows i = first..n_r-1, tridiagonal (lo, diag, up)
                let first = if k == 0 { 0 } else { 1 };
                let len = n_r - first;
                let mut lo = vec![0.0; len];
                let mut di = vec![0.0; len];
                let mut up = vec![0.0; len];
                let mut b = vec![zero; len];
                for (row, i) in (first..n_r).enumerate() {
                    if i == 0 {
                        di[row] = -4.0 / h2;
                        up[row] = 4.0 / h2;
                        b[row] = f0;
                        continue;
                    }
                    let r = g.radius(i);
                    lo[row] = 1.0 / h2 - 1.0 / (2.0 * h * r);
                    up[row] = 1.0 / h2 + 1.0 / (2.0 * h * r);
                    di[row] = -2.0 / h2 - m * m / (r * r);
                    b[row] = spectral[i - 1][k];
                }
                let last = len - 1;
                b[last] -= bk * up[last];
                let x = thomas(&lo, &di, &up, &mut b);
                col[first..n_r].copy_from_slice(&x);
                col
            })
            .collect();

        let origin = columns[0][0];
        let mut values = vec![zero; g.len()];
        let rings: Vec<Vec<Complex64>> = (1..n_r)
            .into_par_iter()
            .map(|i| {
                let mut buf: Vec<Complex64> = (0..n_t).map(|k| columns[k][i]).collect();
                self.ops.inverse(&mut buf);
                buf
            })
            .collect();
        values[..n_t].fill(origin);
        for (i, ring) in rings.into_iter().enumerate() {
            let s = (i + 1) * n_t;
            values[s..s + n_t].copy_from_slice(&ring);
        }
        values[n_r * n_t..].copy_from_slice(boundary);
        FieldGrid { grid: g, values }
    }
}

/// Thomas algorithm; `lo[0]` and `up[n-1]` are unused.
fn thomas(lo: &[f64], di: &[f64], up: &[f64], b: &mut [Complex64]) -> Vec<Complex64> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut denom = di[0];
    c[0] = up[0] / denom;
    b[0] /= denom;
    for i in 1..n {
        denom = di[i] - lo[i] * c[i - 1];
        c[i] = up[i] / denom;
        let prev = b[i - 1];
        b[i] = (b[i] - prev * lo[i]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = b[i + 1];
        b[i] -= next * c[i];
    }
    b.to_vec()
}

/// `2ū(u_x²+u_y²)/(1-|u|²)` at every node.
fn nonlinearity(field: &FieldGrid, p: &GridPartials) -> Vec<Complex64> {
    field
        .values
        .par_iter()
        .zip(p.ux.par_iter().zip(p.uy.par_iter()))
        .map(|(u, (ux, uy))| u.conj() * (ux * ux + uy * uy) * (2.0 / (1.0 - u.norm_sqr())))
        .collect()
}

fn check_disk(field: &FieldGrid, eps: f64) -> Result<()> {
    let g = field.grid;
    for (idx, u) in field.values.iter().enumerate() {
        let margin = 1.0 - u.norm_sqr();
        if !(margin >= eps) {
            return Err(Error::BlowUp {
                ring: idx / g.n_t,
                angle: idx % g.n_t,
                margin,
            });
        }
    }
    Ok(())
}

fn residual_from(field: &FieldGrid, p: &GridPartials) -> Result<f64> {
    let g = field.grid;
    (0..g.n_r * g.n_t)
        .into_par_iter()
        .map(|idx| {
            let jet = Jet::from_partials(
                g.node(idx / g.n_t, idx % g.n_t),
                field.values[idx],
                p.ux[idx],
                p.uy[idx],
                p.lap[idx],
            );
            geometry::tension_norm(&jet)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Sup of `‖τ‖` over interior nodes (origin included, boundary ring excluded)
/// from finite-difference jets.
pub fn residual_sup(field: &FieldGrid) -> Result<f64> {
    residual_from(field, &SpectralOps::new(field.grid).partials(field))
}

/// Solves `τ(u) = 0` with `u = boundary` on the outer ring, starting at `init`.
pub fn solve_dirichlet(
    boundary: &[Complex64],
    grid: PolarGrid,
    config: &SolverConfig,
    init: &FieldGrid,
) -> Result<SolverResult> {
    config.validate()?;
    if init.grid != grid {
        return Err(Error::GridMismatch(format!(
            "initial field on {:?}, expected {:?}",
            init.grid, grid
        )));
    }
    if boundary.len() != grid.n_t {
        return Err(Error::GridMismatch(format!(
            "boundary has {} values, grid has {} angles",
            boundary.len(),
            grid.n_t
        )));
    }
    let mut u = init.clone();
    u.values[grid.n_r * grid.n_t..].copy_from_slice(boundary);
    let origin = u.values[0];
    u.values[1..grid.n_t].fill(origin);
    check_disk(&u, config.epsilon_clamp)?;

    let poisson = PolarPoisson::new(grid);
    let ops = &poisson.ops;
    let mut history = Vec::new();
    let mut snapshots = Vec::new();
    if config.snapshot_every > 0 {
        snapshots.push((0, u.clone()));
    }
    let omega = config.damping;
    let mut sweeps = 0;
    let mut stalled = false;
    loop {
        let p = ops.partials(&u);
        let res = residual_from(&u, &p)?;
        history.push(res);
        if res <= config.tol_residual || stalled || sweeps >= config.max_sweeps {
            break;
        }
        let rhs: Vec<Complex64> = nonlinearity(&u, &p).into_iter().map(|n| -n).collect();
        let target = poisson.solve(&rhs, boundary);
        let next: Vec<Complex64> = u
            .values
            .par_iter()
            .zip(target.values.par_iter())
            .map(|(a, b)| a * (1.0 - omega) + b * omega)
            .collect();
        let mut next = FieldGrid { grid, values: next };
        next.values[grid.n_r * grid.n_t..].copy_from_slice(boundary);
        check_disk(&next, config.epsilon_clamp)?;
        let change = u
            .values
            .par_iter()
            .zip(next.values.par_iter())
            .map(|(a, b)| geometry::hyperbolic_distance(*a, *b).unwrap_or(f64::INFINITY))
            .reduce(|| 0.0, f64::max);
        u = next;
        sweeps += 1;
        // small steps only count as a stall once the residual stops falling
        let n = history.len();
        stalled = change < config.tol_change && n >= 2 && history[n - 1] >= history[n - 2];
        if config.snapshot_every > 0 && sweeps % config.snapshot_every == 0 {
            snapshots.push((sweeps, u.clone()));
        }
    }
    let converged = *history.last().unwrap() <= config.tol_residual;
    Ok(SolverResult {
        field: u,
        residual_history: history,
        sweeps,
        converged,
        snapshots,
    })
}

/// Node-wise hyperbolic distance between two fields on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceField {
    pub values: Vec<f64>,
    pub sup: f64,
    pub argmax_ring: usize,
    pub argmax_angle: usize,
}

pub fn distance_field(u: &FieldGrid, phi: &FieldGrid) -> Result<DistanceField> {
    if u.grid != phi.grid {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            u.grid, phi.grid
        )));
    }
    let values: Vec<f64> = u
        .values
        .par_iter()
        .zip(phi.values.par_iter())
        .map(|(a, b)| geometry::hyperbolic_distance(*a, *b))
        .collect::<Result<_>>()?;
    let mut best = (0.0, 0usize);
    for (idx, d) in values.iter().enumerate() {
        if *d > best.0 {
            best = (*d, idx);
        }
    }
    let n_t = u.grid.n_t;
    Ok(DistanceField {
        sup: best.0,
        argmax_ring: best.1 / n_t,
        argmax_angle: best.1 % n_t,
        values,
    })
}
