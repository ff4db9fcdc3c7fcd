//! Circle homeomorphisms `φ = e^{iψ}` represented by their lifted angle `ψ`.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum sample count accepted by [`BoundaryMap::validate`].
pub const MIN_VALIDATION_SAMPLES: usize = 16;

/// Descriptor of the built-in boundary families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Identity,
    Rotation {
        alpha: f64,
    },
    /// `t ↦ arg e^{iα}(e^{it} - a)/(1 - ā e^{it})`.
    Moebius {
        a_re: f64,
        a_im: f64,
        alpha: f64,
    },
    /// `ψ(t) = t + ε sin(k t)`.
    Perturbed {
        epsilon: f64,
        k: u32,
    },
}

#[derive(Clone)]
enum Lift {
    Family(Family),
    Sampled(SampledLift),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Monotone piecewise-linear lift through a table of `(t, ψ(t))` pairs,
/// extended by `ψ(t + 2π) = ψ(t) + 2π`.
#[derive(Debug, Clone, PartialEq)]
struct SampledLift {
    t: Vec<f64>,
    psi: Vec<f64>,
}

impl SampledLift {
    fn new(t: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        if t.len() != psi.len() || t.len() < 2 {
            return Err(Error::InvalidBoundaryMap(
                "sampled lift needs at least two (t, psi) pairs".into(),
            ));
        }
        if t[0] < 0.0 || *t.last().unwrap() >= TAU {
            return Err(Error::InvalidBoundaryMap(
                "sample angles must lie in [0, 2π)".into(),
            ));
        }
        for w in t.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidBoundaryMap(
                    "sample angles must be strictly increasing".into(),
                ));
            }
        }
        for w in psi.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidBoundaryMap(
                    "sampled lift is not strictly increasing".into(),
                ));
            }
        }
        if *psi.last().unwrap() >= psi[0] + TAU {
            return Err(Error::InvalidBoundaryMap(
                "sampled lift winds more than once".into(),
            ));
        }
        Ok(Self { t, psi })
    }

    fn eval(&self, t: f64) -> f64 {
        let turns = ((t - self.t[0]) / TAU).floor();
        let s = t - turns * TAU;
        let n = self.t.len();
        // s ∈ [t0, t0 + 2π)
        let idx = self.t.partition_point(|&x| x <= s);
        let (t0, p0, t1, p1) = if idx == n {
            (
                self.t[n - 1],
                self.psi[n - 1],
                self.t[0] + TAU,
                self.psi[0] + TAU,
            )
        } else {
            (
                self.t[idx - 1],
                self.psi[idx - 1],
                self.t[idx],
                self.psi[idx],
            )
        };
        let w = (s - t0) / (t1 - t0);
        p0 + w * (p1 - p0) + turns * TAU
    }
}

/// A circle homeomorphism given by its lift. Immutable after construction.
#[derive(Clone)]
pub struct BoundaryMap {
    lift: Lift,
}

impl fmt::Debug for BoundaryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lift {
            Lift::Family(fam) => write!(f, "BoundaryMap({fam:?})"),
            Lift::Sampled(s) => write!(f, "BoundaryMap(Sampled, {} points)", s.t.len()),
            Lift::Custom(_) => write!(f, "BoundaryMap(Custom)"),
        }
    }
}

/// Outcome of sampling a lift on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub min_forward_difference: f64,
    pub periodicity_defect: f64,
    pub passed: bool,
}

impl BoundaryMap {
    /// Builds a member of a built-in family, rejecting parameters that break
    /// monotonicity or leave the disk.
    pub fn from_family(family: Family) -> Result<Self> {
        match family {
            Family::Identity => {}
            Family::Rotation { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidParameter(
                        "rotation angle must be finite".into(),
                    ));
                }
            }
            Family::Moebius { a_re, a_im, alpha } => {
                let a = Complex64::new(a_re, a_im);
                if !(a.norm() < 1.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "moebius requires |a| < 1, got |a| = {}",
                        a.norm()
                    )));
                }
            }
            Family::Perturbed { epsilon, k } => {
                if k == 0 {
                    return Err(Error::InvalidParameter("perturbed requires k >= 1".into()));
                }
                if !(epsilon.abs() * f64::from(k) < 1.0) {
                    return Err(Error::InvalidBoundaryMap(format!(
                        "perturbed lift not monotone: |ε|·k = {} >= 1",
                        epsilon.abs() * f64::from(k)
                    )));
                }
            }
        }
        Ok(Self {
            lift: Lift::Family(family),
        })
    }

    pub fn identity() -> Self {
        Self {
            lift: Lift::Family(Family::Identity),
        }
    }

    pub fn rotation(alpha: f64) -> Result<Self> {
        Self::from_family(Family::Rotation { alpha })
    }

    pub fn moebius(a: Complex64, alpha: f64) -> Result<Self> {
        Self::from_family(Family::Moebius {
            a_re: a.re,
            a_im: a.im,
            alpha,
        })
    }

    pub fn perturbed(epsilon: f64, k: u32) -> Result<Self> {
        Self::from_family(Family::Perturbed { epsilon, k })
    }

    /// Piecewise-linear lift through `(t, ψ)` pairs with `t` strictly increasing in `[0, 2π)`.
    pub fn sampled(t: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        Ok(Self {
            lift: Lift::Sampled(SampledLift::new(t, psi)?),
        })
    }

    /// Arbitrary lift. Not validated here; see [`BoundaryMap::validate`].
    pub fn custom(lift: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            lift: Lift::Custom(Arc::new(lift)),
        }
    }

    /// Reads a headerless or headed two-column CSV of `(t, ψ(t))`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut t = Vec::new();
        let mut psi = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Io(format!(
                    "line {}: expected 2 columns, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => {
                    t.push(v[0]);
                    psi.push(v[1]);
                }
                // a header row
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Io(format!("line {}: {e}", line + 1))),
            }
        }
        Self::sampled(t, psi)
    }

    pub fn family(&self) -> Option<&Family> {
        match &self.lift {
            Lift::Family(f) => Some(f),
            _ => None,
        }
    }

    /// The lift `ψ(t)`.
    pub fn lift(&self, t: f64) -> f64 {
        match &self.lift {
            Lift::Family(Family::Identity) => t,
            Lift::Family(Family::Rotation { alpha }) => t + alpha,
            Lift::Family(Family::Moebius { a_re, a_im, alpha }) => {
                // e^{iα}(e^{it} - a)/(1 - ā e^{it}) = e^{i(α + t)} w / w̄ with w = 1 - a e^{-it};
                // Re w > 0, so the principal argument of w is already continuous in t.
                let a = Complex64::new(*a_re, *a_im);
                let w = Complex64::new(1.0, 0.0) - a * Complex64::from_polar(1.0, -t);
                alpha + t + 2.0 * w.arg()
            }
            Lift::Family(Family::Perturbed { epsilon, k }) => {
                t + epsilon * (f64::from(*k) * t).sin()
            }
            Lift::Sampled(s) => s.eval(t),
            Lift::Custom(f) => f(t),
        }
    }

    /// `φ(t) = (cos ψ(t), sin ψ(t))` as a unit complex number.
    pub fn eval(&self, t: f64) -> Complex64 {
        let psi = self.lift(t);
        Complex64::new(psi.cos(), psi.sin())
    }

    /// Samples the lift at `t_j = 2πj/n`, `j = 0..=n`.
    pub fn validate(&self, n_samples: usize) -> Result<ValidationReport> {
        if n_samples < MIN_VALIDATION_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "validation needs at least {MIN_VALIDATION_SAMPLES} samples, got {n_samples}"
            )));
        }
        let values: Vec<f64> = (0..=n_samples)
            .map(|j| self.lift(TAU * j as f64 / n_samples as f64))
            .collect();
        let min_forward_difference = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let periodicity_defect = (values[n_samples] - values[0] - TAU).abs();
        let passed = min_forward_difference > 0.0 && periodicity_defect < 1e-12;
        Ok(ValidationReport {
            samples: n_samples,
            min_forward_difference,
            periodicity_defect,
            passed,
        })
    }

    /// Validates and converts a failed report into an error.
    pub fn ensure_valid(&self, n_samples: usize) -> Result<ValidationReport> {
        let report = self.validate(n_samples)?;
        if report.passed {
            Ok(report)
        } else {
            Err(Error::InvalidBoundaryMap(format!(
                "min forward difference {:e}, periodicity defect {:e}",
                report.min_forward_difference, report.periodicity_defect
            )))
        }
    }

    /// The same map precomposed with the rotation `t ↦ t + c`.
    pub fn precompose_rotation(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::custom(move |t| inner.lift(t + c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_lift() {
        let m = BoundaryMap::identity();
        assert_eq!(m.lift(1.25), 1.25);
        let p = m.eval(PI / 2.0);
        assert!(p.re.abs() < 1e-16 && (p.im - 1.0).abs() < 1e-16);
    }

    #[test]
    fn rotation_by_pi() {
        let p = BoundaryMap::rotation(PI).unwrap().eval(0.0);
        assert!((p.re + 1.0).abs() < 1e-15 && p.im.abs() < 1e-15);
    }

    #[test]
    fn perturbed_at_zero() {
        let m = BoundaryMap::perturbed(0.1, 1).unwrap();
        assert_eq!(m.lift(0.0), 0.0);
        assert_eq!(m.eval(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn perturbed_degenerate_rejected() {
        assert!(matches!(
            BoundaryMap::perturbed(0.5, 2),
            Err(Error::InvalidBoundaryMap(_))
        ));
        assert!(BoundaryMap::perturbed(0.2, 0).is_err());
    }

    #[test]
    fn moebius_parameters() {
        assert!(BoundaryMap::moebius(Complex64::new(1.0, 0.0), 0.0).is_err());
        assert!(BoundaryMap::moebius(Complex64::new(0.6, 0.8), 0.0).is_err());
        let m = BoundaryMap::moebius(Complex64::new(0.3, 0.0), 0.0).unwrap();
        assert!(m.lift(0.0).abs() < 1e-15);
    }

    #[test]
    fn moebius_lift_matches_map() {
        let a = Complex64::new(0.4, -0.3);
        let alpha = 0.7;
        let m = BoundaryMap::moebius(a, alpha).unwrap();
        for j in 0..50 {
            let t = TAU * j as f64 / 50.0;
            let e = Complex64::from_polar(1.0, t);
            let direct = Complex64::from_polar(1.0, alpha) * (e - a)
                / (Complex64::new(1.0, 0.0) - a.conj() * e);
            assert!((m.eval(t) - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn validate_identity() {
        let r = BoundaryMap::identity().validate(64).unwrap();
        assert!(r.passed);
        assert!((r.min_forward_difference - TAU / 64.0).abs() < 1e-15);
    }

    #[test]
    fn validate_reversed_fails() {
        let r = BoundaryMap::custom(|t| -t).validate(64).unwrap();
        assert!(!r.passed);
        assert!(r.min_forward_difference < 0.0);
    }

    #[test]
    fn validate_needs_samples() {
        assert!(BoundaryMap::identity().validate(8).is_err());
    }

    #[test]
    fn validate_perturbed() {
        // ψ' = 1 + 0.6 cos 2t >= 0.4 so every forward difference exceeds 0.4·2π/n
        let r = BoundaryMap::perturbed(0.3, 2)
            .unwrap()
            .validate(256)
            .unwrap();
        assert!(r.passed);
        assert!(r.min_forward_difference > 0.4 * TAU / 256.0 * 0.99);
    }

    #[test]
    fn sampled_interpolation_and_wrap() {
        let m = BoundaryMap::sampled(vec![0.0, PI], vec![0.1, PI + 0.5]).unwrap();
        assert!((m.lift(PI / 2.0) - (0.1 + (PI + 0.4) / 2.0)).abs() < 1e-14);
        assert!((m.lift(TAU) - (0.1 + TAU)).abs() < 1e-14);
        assert!((m.lift(-PI) - (PI + 0.5 - TAU)).abs() < 1e-14);
        assert!(m.validate(128).unwrap().passed);
    }

    #[test]
    fn sampled_rejects_bad_tables() {
        assert!(BoundaryMap::sampled(vec![0.0, 1.0], vec![1.0, 0.5]).is_err());
        assert!(BoundaryMap::sampled(vec![0.0, 0.0], vec![0.0, 0.5]).is_err());
        assert!(BoundaryMap::sampled(vec![0.0, 7.0], vec![0.0, 0.5]).is_err());
        assert!(BoundaryMap::sampled(vec![0.0, 1.0], vec![0.0, 7.0]).is_err());
    }
}
