//! TOML run configuration.
//!
//! ```toml
//! seed = 1
//!
//! [boundary]
//! family = "perturbed"   # identity | rotation | moebius | perturbed | csv
//! epsilon = 0.2
//! k = 1
//!
//! [extension]
//! samples = 2048
//! truncation = 512
//! rho_eval = 0.995
//!
//! [exhaustion]
//! radii = [1.0, 2.0, 3.0, 4.0]
//! grid = [128, 256]
//!
//! [solver]
//! damping = 0.6
//!
//! [verify]
//! samples = 1000
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every section except `[boundary]` and `[exhaustion]` is optional, and
//! `[exhaustion]` must list `radii`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryMap, Family};
use crate::error::{Error, Result};
use crate::exhaustion::ExhaustionConfig;
use crate::extension::ExtensionParams;
use crate::laws::LawConfig;
use crate::solver::SolverConfig;

/// Boundary data: a built-in family or a two-column `t,psi` CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    Identity,
    Rotation { alpha: f64 },
    Moebius { a_re: f64, a_im: f64, alpha: f64 },
    Perturbed { epsilon: f64, k: u32 },
    Csv { path: PathBuf },
}

impl BoundarySpec {
    /// Builds the map; relative CSV paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<BoundaryMap> {
        match self {
            Self::Identity => BoundaryMap::from_family(Family::Identity),
            Self::Rotation { alpha } => {
                BoundaryMap::from_family(Family::Rotation { alpha: *alpha })
            }
            Self::Moebius { a_re, a_im, alpha } => BoundaryMap::from_family(Family::Moebius {
                a_re: *a_re,
                a_im: *a_im,
                alpha: *alpha,
            }),
            Self::Perturbed { epsilon, k } => BoundaryMap::from_family(Family::Perturbed {
                epsilon: *epsilon,
                k: *k,
            }),
            Self::Csv { path } => BoundaryMap::from_csv(base.join(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Solver snapshots every `k` sweeps for the single-ball solve (0 disables).
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_every: 0,
        }
    }
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub extension: ExtensionParams,
    pub exhaustion: ExhaustionConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: LawConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let has_radii = raw
            .get("exhaustion")
            .and_then(|v| v.as_table())
            .is_some_and(|t| t.contains_key("radii"));
        if raw.contains_key("exhaustion") && !has_radii {
            return Err(Error::Config(
                "missing field `radii` in section [exhaustion]".into(),
            ));
        }
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.exhaustion.seed = cfg.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        // CSV boundaries can only be checked once the base directory is known
        cfg.boundary_map()?;
        Ok(cfg)
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.exhaustion.seed = seed;
    }

    pub fn boundary_map(&self) -> Result<BoundaryMap> {
        self.boundary
            .build(&self.base_dir)
            .map_err(|e| Error::Config(format!("[boundary]: {e}")))
    }

    fn validate(&self) -> Result<()> {
        let section =
            |name: &str, r: Result<()>| r.map_err(|e| Error::Config(format!("[{name}]: {e}")));
        if !matches!(self.boundary, BoundarySpec::Csv { .. }) {
            section("boundary", self.boundary_map().map(|_| ()))?;
        }
        let ext = self.extension;
        section(
            "extension",
            if ext.truncation == 0 || ext.samples < 4 * ext.truncation {
                Err(Error::InvalidParameter(format!(
                    "need samples >= 4 * truncation, got {} and {}",
                    ext.samples, ext.truncation
                )))
            } else if !(ext.rho_eval > 0.0 && ext.rho_eval < 1.0) {
                Err(Error::InvalidParameter(format!(
                    "rho_eval must lie in (0, 1), got {}",
                    ext.rho_eval
                )))
            } else {
                Ok(())
            },
        )?;
        section("exhaustion", self.exhaustion.validate())?;
        let last = *self.exhaustion.radii.last().expect("validated non-empty");
        section(
            "exhaustion",
            if crate::grid::ball_radius(last)? > ext.rho_eval {
                Err(Error::InvalidParameter(format!(
                    "radius {last} needs the extension beyond rho_eval = {}",
                    ext.rho_eval
                )))
            } else {
                Ok(())
            },
        )?;
        section("solver", self.solver.validate())?;
        let v = &self.verify;
        section(
            "verify",
            match v.tolerance {
                Some(t) if !(t >= 0.0) => Err(Error::InvalidParameter(format!(
                    "tolerance must be >= 0, got {t}"
                ))),
                _ if v.angles == 0 => {
                    Err(Error::InvalidParameter("angles must be positive".into()))
                }
                _ => Ok(()),
            },
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[boundary]\nfamily = \"identity\"\n[exhaustion]\nradii = [1.0, 2.0]\n";

    #[test]
    fn minimal_config_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.exhaustion.radii, vec![1.0, 2.0]);
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
    }

    #[test]
    fn families_parse() {
        let cfg = RunConfig::parse(
            "seed = 7\n[boundary]\nfamily = \"moebius\"\na_re = 0.3\na_im = 0.0\nalpha = 0.5\n[exhaustion]\nradii = [1.0]\n",
        )
        .unwrap();
        assert_eq!(
            cfg.boundary,
            BoundarySpec::Moebius {
                a_re: 0.3,
                a_im: 0.0,
                alpha: 0.5
            }
        );
        assert_eq!(cfg.exhaustion.seed, 7);
    }

    #[test]
    fn missing_radii() {
        let err =
            RunConfig::parse("[boundary]\nfamily = \"identity\"\n[exhaustion]\ngrid = [32, 64]\n")
                .unwrap_err();
        assert!(err.to_string().contains("radii"), "{err}");
        let err = RunConfig::parse("[boundary]\nfamily = \"identity\"\n").unwrap_err();
        assert!(err.to_string().contains("exhaustion"), "{err}");
    }

    #[test]
    fn malformed_reports_line() {
        let err =
            RunConfig::parse("[boundary]\nfamily = \"identity\"\n[exhaustion]\nradii = [1.0,\n")
                .unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
        let err = RunConfig::parse(&format!("{MINIMAL}[solver]\ndampng = 0.5\n")).unwrap_err();
        assert!(err.to_string().contains("dampng"), "{err}");
    }

    #[test]
    fn invalid_sections_rejected() {
        let bad = "[boundary]\nfamily = \"perturbed\"\nepsilon = 0.6\nk = 2\n[exhaustion]\nradii = [1.0]\n";
        assert!(RunConfig::parse(bad)
            .unwrap_err()
            .to_string()
            .contains("[boundary]"));
        let bad = format!("{MINIMAL}[extension]\nsamples = 100\ntruncation = 64\n");
        assert!(RunConfig::parse(&bad)
            .unwrap_err()
            .to_string()
            .contains("[extension]"));
        let bad = "[boundary]\nfamily = \"identity\"\n[exhaustion]\nradii = [1.0, 7.0]\n";
        assert!(RunConfig::parse(bad).is_err());
        let bad = format!("{MINIMAL}[solver]\ndamping = 0.0\n");
        assert!(RunConfig::parse(&bad).is_err());
    }
}
