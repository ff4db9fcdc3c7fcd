//! Compact exhaustion: hyperbolic-harmonic solves on increasing balls `B_R`
//! with the Euclidean harmonic extension `Φ` as boundary data, and the
//! measurements comparing each solution with `Φ` and with its predecessor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryMap, Family};
use crate::error::{Error, Result};
use crate::extension::{estimate_k, ExtensionMeta, ExtensionParams, FourierExtension, KEstimate};
use crate::geometry;
use crate::grid::{ball_radius, FieldGrid, PolarGrid, RingSampler, SpectralOps};
use crate::solver::{distance_field, solve_dirichlet, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExhaustionConfig {
    /// Strictly increasing hyperbolic radii.
    pub radii: Vec<f64>,
    /// Grid size `[n_r, n_t]` used for every radius without an override.
    pub grid: [usize; 2],
    /// Per-radius overrides; empty or one entry per radius.
    pub grids: Vec<[usize; 2]>,
    /// Grid on the disk `|z| <= rho_eval` for the distortion estimate.
    pub k_grid: [usize; 2],
    /// Hyperbolic radius of the compact on which consecutive solutions are compared.
    pub compact_radius: f64,
    /// Allowed slack as a fraction of the distance bound.
    pub slack_fraction: f64,
    /// Allowed slack never falls below this.
    pub slack_floor: f64,
    /// Compact-convergence distances below this count as converged noise.
    pub delta_floor: f64,
    /// Hyperbolic collar excluded from the quasiconformality diagnostics.
    pub inner_margin: f64,
    /// Re-solve the last radius on a refined grid for the stability verdict.
    pub refine_certificate: bool,
    /// Node pairs per radius for the triangle-inequality check.
    pub consistency_pairs: usize,
    /// Seed for the pair sampling; set by the caller, not read from configuration files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ExhaustionConfig {
    fn default() -> Self {
        Self {
            radii: vec![1.0, 2.0, 3.0, 4.0],
            grid: [128, 256],
            grids: Vec::new(),
            k_grid: [256, 512],
            compact_radius: 1.0,
            slack_fraction: 0.05,
            slack_floor: 1e-4,
            delta_floor: 1e-6,
            inner_margin: 1.0,
            refine_certificate: true,
            consistency_pairs: 100,
            seed: 1,
        }
    }
}

impl ExhaustionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::InvalidParameter("radii must not be empty".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0)) || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "radii must be positive and strictly increasing, got {:?}",
                self.radii
            )));
        }
        if !self.grids.is_empty() && self.grids.len() != self.radii.len() {
            return Err(Error::InvalidParameter(format!(
                "{} grid overrides for {} radii",
                self.grids.len(),
                self.radii.len()
            )));
        }
        if !(self.compact_radius > 0.0 && self.compact_radius <= self.radii[0]) {
            return Err(Error::InvalidParameter(format!(
                "compact radius must lie in (0, {}], got {}",
                self.radii[0], self.compact_radius
            )));
        }
        if self.inner_margin < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "inner margin must be at least 1, got {}",
                self.inner_margin
            )));
        }
        if !(self.slack_fraction >= 0.0 && self.slack_floor >= 0.0 && self.delta_floor >= 0.0) {
            return Err(Error::InvalidParameter(
                "slack and delta thresholds must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn grid_for(&self, k: usize) -> [usize; 2] {
        self.grids.get(k).copied().unwrap_or(self.grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    HypothesisNotMet,
    BoundsHold,
    BoundsViolated,
}

/// Triangle-inequality assembly `d(u(x),u(y)) <= 2 sup d + d(Φ(x),Φ(y))` on sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub pairs: usize,
    pub violations: usize,
    pub min_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusRecord {
    pub radius: f64,
    pub rho_max: f64,
    pub n_r: usize,
    pub n_t: usize,
    pub sup_distance: Option<f64>,
    pub argmax_ring: Option<usize>,
    pub argmax_angle: Option<usize>,
    /// Whether the maximizing node lies strictly inside the ball.
    pub argmax_interior: Option<bool>,
    pub sweeps: usize,
    pub residual: Option<f64>,
    pub converged: bool,
    /// `max(0, sup d - bound)`; absent without a bound.
    pub slack: Option<f64>,
    pub consistency: Option<ConsistencyCheck>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRecord {
    pub from_radius: f64,
    pub to_radius: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcSummary {
    pub sup_energy_density: f64,
    pub sup_distortion: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcCertificate {
    pub inner_margin: f64,
    pub coarse: QcSummary,
    pub refined: Option<QcSummary>,
    pub relative_change_energy: Option<f64>,
    pub relative_change_distortion: Option<f64>,
    /// Both suprema finite and within 5% of their refined values; absent without refinement.
    pub bounded: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    /// Family descriptor; absent for sampled or custom maps.
    pub boundary: Option<Family>,
    pub extension: ExtensionMeta,
    pub k_estimate: KEstimate,
    /// `K̂² - 1`, when `K̂ < √2`.
    pub condition_c0: Option<f64>,
    /// `2 tanh⁻¹(K̂² - 1)`.
    pub lemma1_bound_factor2: Option<f64>,
    /// `tanh⁻¹(K̂² - 1)`, reported alongside and never used for the verdict.
    pub final_bound_unfactored: Option<f64>,
    /// Whether `tanh⁻¹(K̂² - 1) < 1`, i.e. `K̂² < 1 + tanh 1`.
    pub unfactored_below_one: Option<bool>,
    pub slack_allowed: Option<f64>,
    pub radii: Vec<RadiusRecord>,
    pub compact_rho: f64,
    pub deltas: Vec<DeltaRecord>,
    pub deltas_decreasing: bool,
    pub qc: Option<QcCertificate>,
    pub certificate: Certificate,
}

/// Report plus the fields it was computed from.
#[derive(Debug, Clone)]
pub struct ExhaustionRun {
    pub report: ExhaustionReport,
    pub solutions: Vec<Option<FieldGrid>>,
    pub phi: Vec<FieldGrid>,
    pub residual_histories: Vec<Vec<f64>>,
}

/// `sup d(u_a, u_b)` on `|z| <= inner_rho`, over the nodes of whichever grid
/// has the coarser radial spacing; the other field is interpolated.
pub fn compact_convergence(u_a: &FieldGrid, u_b: &FieldGrid, inner_rho: f64) -> Result<f64> {
    for f in [u_a, u_b] {
        if inner_rho > f.grid.rho_max {
            return Err(Error::InvalidParameter(format!(
                "compact radius {inner_rho} exceeds grid radius {}",
                f.grid.rho_max
            )));
        }
    }
    let (nodes, other) = if u_b.grid.h() > u_a.grid.h() {
        (u_b, u_a)
    } else {
        (u_a, u_b)
    };
    let g = nodes.grid;
    let sampler = RingSampler::new(other);
    let mut sup: f64 = 0.0;
    for i in 0..=g.n_r {
        let r = g.radius(i);
        if r > inner_rho * (1.0 + 1e-14) {
            break;
        }
        for j in 0..g.n_t {
            let w = sampler.sample(r, g.angle(j));
            sup = sup.max(geometry::hyperbolic_distance(nodes.at(i, j), w)?);
        }
    }
    Ok(sup)
}

/// Suprema of `e(u)` and `D_u` over nodes at hyperbolic distance at least
/// `inner_margin` from the boundary of the ball the grid covers.
pub fn qc_summary(u: &FieldGrid, inner_margin: f64) -> Result<QcSummary> {
    if inner_margin < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "inner margin must be at least 1, got {inner_margin}"
        )));
    }
    let g = u.grid;
    let limit = g.hyperbolic_radius() - inner_margin;
    if limit < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ball of radius {} has no nodes at distance {inner_margin} from its boundary",
            g.hyperbolic_radius()
        )));
    }
    let jets = SpectralOps::new(g).jets(u);
    let mut out = QcSummary {
        sup_energy_density: 0.0,
        sup_distortion: 1.0,
        nodes: 0,
    };
    for i in 0..=g.n_r {
        if 2.0 * g.radius(i).atanh() > limit + 1e-12 {
            break;
        }
        let ring = if i == 0 { 0..1 } else { 0..g.n_t };
        for j in ring {
            let jet = &jets[g.index(i, j)];
            out.sup_energy_density = out.sup_energy_density.max(geometry::energy_density(jet)?);
            out.sup_distortion = out.sup_distortion.max(geometry::distortion(jet)?);
            out.nodes += 1;
        }
    }
    Ok(out)
}

/// Quasiconformality diagnostics on `u`, compared with a refined solve when given.
pub fn qc_certificate(
    u: &FieldGrid,
    refined: Option<&FieldGrid>,
    inner_margin: f64,
) -> Result<QcCertificate> {
    let coarse = qc_summary(u, inner_margin)?;
    let refined = refined.map(|f| qc_summary(f, inner_margin)).transpose()?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let change_e = refined.map(|r| rel(coarse.sup_energy_density, r.sup_energy_density));
    let change_d = refined.map(|r| rel(coarse.sup_distortion, r.sup_distortion));
    let bounded = match (change_e, change_d) {
        (Some(a), Some(b)) => Some(
            coarse.sup_energy_density.is_finite()
                && coarse.sup_distortion.is_finite()
                && a < 0.05
                && b < 0.05,
        ),
        _ => None,
    };
    Ok(QcCertificate {
        inner_margin,
        coarse,
        refined,
        relative_change_energy: change_e,
        relative_change_distortion: change_d,
        bounded,
    })
}

/// Checks `d(u(x),u(y)) <= d(u(x),Φ(x)) + d(Φ(x),Φ(y)) + d(Φ(y),u(y))` with
/// both end terms replaced by `sup_d`, on `pairs` random node pairs.
pub fn distance_consistency(
    u: &FieldGrid,
    phi: &FieldGrid,
    sup_d: f64,
    pairs: usize,
    seed: u64,
) -> Result<ConsistencyCheck> {
    if u.grid != phi.grid {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            u.grid, phi.grid
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u.values.len();
    let mut out = ConsistencyCheck {
        pairs,
        violations: 0,
        min_slack: f64::INFINITY,
    };
    for _ in 0..pairs {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let lhs = geometry::hyperbolic_distance(u.values[x], u.values[y])?;
        let rhs = 2.0 * sup_d + geometry::hyperbolic_distance(phi.values[x], phi.values[y])?;
        let slack = rhs - lhs;
        if slack < 0.0 {
            out.violations += 1;
        }
        out.min_slack = out.min_slack.min(slack);
    }
    Ok(out)
}

/// Over the last (up to) three deltas, each is below its predecessor or under `floor`.
pub fn deltas_decreasing(deltas: &[f64], floor: f64) -> bool {
    let start = deltas.len().saturating_sub(3);
    (start + 1..deltas.len()).all(|k| deltas[k] < deltas[k - 1] || deltas[k] < floor)
}

/// Warm start on `grid`: the previous solution inside its disk, `Φ` outside.
fn warm_start(prev: &FieldGrid, phi: &FieldGrid) -> FieldGrid {
    let g = phi.grid;
    let sampler = RingSampler::new(prev);
    let mut out = phi.clone();
    for i in 0..=g.n_r {
        let r = g.radius(i);
        if r > prev.grid.rho_max {
            break;
        }
        for j in 0..g.n_t {
            out.values[g.index(i, j)] = sampler.sample(r, g.angle(j));
        }
    }
    out
}

/// Runs the exhaustion for `map` over `config.radii`.
pub fn run_exhaustion(
    map: &BoundaryMap,
    extension: ExtensionParams,
    solver: &SolverConfig,
    config: &ExhaustionConfig,
) -> Result<ExhaustionRun> {
    config.validate()?;
    solver.validate()?;
    let ext = FourierExtension::build(map, extension)?;
    let k_estimate = estimate_k(
        &ext,
        PolarGrid::new(extension.rho_eval, config.k_grid[0], config.k_grid[1])?,
    )?;
    let k_hat = k_estimate.k_hat;
    let c0 = geometry::condition_bound(k_hat).ok();
    let bound = c0.map(geometry::distance_bound).transpose()?;
    let slack_allowed = bound.map(|b| (config.slack_fraction * b).max(config.slack_floor));

    let mut records = Vec::new();
    let mut solutions: Vec<Option<FieldGrid>> = Vec::new();
    let mut phis = Vec::new();
    let mut histories = Vec::new();
    let mut prev: Option<FieldGrid> = None;
    for (k, &radius) in config.radii.iter().enumerate() {
        let [n_r, n_t] = config.grid_for(k);
        let grid = PolarGrid::new(ball_radius(radius)?, n_r, n_t)?;
        let phi = ext.sample_grid(grid)?;
        let init = match &prev {
            Some(p) => warm_start(p, &phi),
            None => phi.clone(),
        };
        let mut rec = RadiusRecord {
            radius,
            rho_max: grid.rho_max,
            n_r,
            n_t,
            sup_distance: None,
            argmax_ring: None,
            argmax_angle: None,
            argmax_interior: None,
            sweeps: 0,
            residual: None,
            converged: false,
            slack: None,
            consistency: None,
            error: None,
        };
        match solve_dirichlet(phi.boundary(), grid, solver, &init) {
            Ok(res) => {
                let d = distance_field(&res.field, &phi)?;
                rec.sup_distance = Some(d.sup);
                rec.argmax_ring = Some(d.argmax_ring);
                rec.argmax_angle = Some(d.argmax_angle);
                rec.argmax_interior = Some(d.argmax_ring < n_r);
                rec.sweeps = res.sweeps;
                rec.residual = Some(res.final_residual());
                rec.converged = res.converged;
                rec.slack = bound.map(|b| (d.sup - b).max(0.0));
                rec.consistency = Some(distance_consistency(
                    &res.field,
                    &phi,
                    d.sup,
                    config.consistency_pairs,
                    config.seed.wrapping_add(k as u64),
                )?);
                histories.push(res.residual_history);
                prev = Some(res.field.clone());
                solutions.push(Some(res.field));
            }
            Err(e @ Error::BlowUp { .. }) => {
                rec.error = Some(e.to_string());
                histories.push(Vec::new());
                prev = None;
                solutions.push(None);
            }
            Err(e) => return Err(e),
        }
        records.push(rec);
        phis.push(phi);
    }

    let compact_rho = ball_radius(config.compact_radius)?;
    let mut deltas = Vec::new();
    for k in 1..solutions.len() {
        if let (Some(a), Some(b)) = (&solutions[k - 1], &solutions[k]) {
            deltas.push(DeltaRecord {
                from_radius: config.radii[k - 1],
                to_radius: config.radii[k],
                delta: compact_convergence(a, b, compact_rho)?,
            });
        }
    }
    let delta_values: Vec<f64> = deltas.iter().map(|d| d.delta).collect();
    let decreasing = deltas_decreasing(&delta_values, config.delta_floor);

    let last = solutions.len() - 1;
    let qc = match &solutions[last] {
        Some(u) if u.grid.hyperbolic_radius() >= config.inner_margin => {
            let refined = if config.refine_certificate {
                let fine = u.grid.refined();
                let phi_fine = ext.sample_grid(fine)?;
                let init = warm_start(u, &phi_fine);
                solve_dirichlet(phi_fine.boundary(), fine, solver, &init)
                    .ok()
                    .map(|r| r.field)
            } else {
                None
            };
            qc_certificate(u, refined.as_ref(), config.inner_margin).ok()
        }
        _ => None,
    };

    let all_ok = records.iter().all(|r| r.error.is_none() && r.converged);
    let certificate = match (bound, slack_allowed) {
        (Some(_), Some(allowed)) => {
            let within = records
                .iter()
                .all(|r| r.slack.is_some_and(|s| s <= allowed));
            if all_ok && within && decreasing {
                Certificate::BoundsHold
            } else {
                Certificate::BoundsViolated
            }
        }
        _ => Certificate::HypothesisNotMet,
    };
    let report = ExhaustionReport {
        boundary: map.family().cloned(),
        extension: ext.meta(),
        k_estimate,
        condition_c0: c0,
        lemma1_bound_factor2: bound,
        final_bound_unfactored: c0.map(geometry::distance_bound_unfactored).transpose()?,
        unfactored_below_one: c0.map(|c| c < 1f64.tanh()),
        slack_allowed,
        radii: records,
        compact_rho,
        deltas,
        deltas_decreasing: decreasing,
        qc,
        certificate,
    };
    Ok(ExhaustionRun {
        report,
        solutions,
        phi: phis,
        residual_histories: histories,
    })
}
