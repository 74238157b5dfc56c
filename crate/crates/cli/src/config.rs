//! Run configuration: JSON schema, `--set` overrides and hashing.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use chainlab::ensemble::{DisorderSpec, Distribution};
use chainlab::lattice::band_with_mass;
use chainlab::stats::CorrelationModel;
use chainlab::LatticeConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Displacement histories of individual realizations.
    TdTrajectories,
    /// Ensemble of `u_x(alpha x)` against the mean-field formula.
    TdMeanField,
    /// Ensemble of the front `u_x(alpha_s x + beta x^{1/3})`.
    TdMeanFront,
    /// Per-realization scattering coefficients over a frequency grid.
    FdTransmittance,
    /// Empirical `|T|^2` statistics against the diffusion-limit moments.
    FdMoments,
    /// As `fd-moments` with one half-space offset.
    FdNonmatched,
    /// Density of `|T|^2`.
    Density,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TdTrajectories => "td-trajectories",
            Scenario::TdMeanField => "td-mean-field",
            Scenario::TdMeanFront => "td-mean-front",
            Scenario::FdTransmittance => "fd-transmittance",
            Scenario::FdMoments => "fd-moments",
            Scenario::FdNonmatched => "fd-nonmatched",
            Scenario::Density => "density",
        }
    }
}

/// A sweep grid: explicit values, an evenly spaced range, or `count`
/// midpoints spanning the open propagative band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
    Band { band: usize },
}

impl Grid {
    /// Resolves the grid; `band` is the frequency band used by `Band` grids.
    pub fn resolve(&self, field: &str, band: Option<(f64, f64)>) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Grid::Values(v) => v.clone(),
            Grid::Linspace { start, stop, count } => match count {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
            Grid::Band { band: count } => {
                let (lo, hi) = band.ok_or_else(|| {
                    CliError::schema(field, "a band grid is only meaningful for frequencies")
                })?;
                (0..*count)
                    .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / *count as f64)
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::schema(field, "grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::schema(field, "grid values must be finite"));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::schema(field, "grid must be strictly increasing"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub correlation: CorrelationModel,
    #[serde(default)]
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Largest Verlet step.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Final time (trajectories only).
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Record every `stride`-th step (trajectories only).
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_first_site")]
    pub first_site: i64,
    #[serde(default = "default_last_site")]
    pub last_site: i64,
    /// Site of the unit initial displacement.
    #[serde(default)]
    pub source_site: i64,
    /// First perturbed site.
    #[serde(default = "default_section_start")]
    pub section_start: i64,
}

fn default_dt() -> f64 {
    0.02
}
fn default_t_max() -> f64 {
    40.0
}
fn default_stride() -> usize {
    10
}
fn default_first_site() -> i64 {
    -40
}
fn default_last_site() -> i64 {
    40
}
fn default_section_start() -> i64 {
    1
}
fn default_n_real() -> u64 {
    100
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            dt: default_dt(),
            t_max: default_t_max(),
            stride: default_stride(),
            first_site: default_first_site(),
            last_site: default_last_site(),
            source_site: 0,
            section_start: default_section_start(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub disorder: DisorderConfig,
    #[serde(default = "default_n_real")]
    pub n_real: u64,
    /// Frequencies (frequency-domain scenarios).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Grid>,
    /// Observation distance from the source (mean-field and mean-front).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    /// Slowness grid, `t = alpha x` (mean field).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Grid>,
    /// Front offsets, `t = alpha_s x + beta x^{1/3}` (mean front).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Grid>,
    /// Values of `|T|^2` (density).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Grid>,
    /// Values of `gamma L` (density).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_l: Option<Grid>,
    #[serde(default)]
    pub time: TimeConfig,
    /// Output directory; defaults to a subdirectory of `$CHAINLAB_OUT_DIR`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn disorder_spec(&self) -> Result<DisorderSpec, CliError> {
        let spec = DisorderSpec {
            sigma: self.lattice.sigma,
            distribution: self.disorder.distribution,
            correlation: self.disorder.correlation.clone(),
            length: self.lattice.length,
            master_seed: self.disorder.master_seed,
        };
        spec.validate()
            .map_err(|e| CliError::schema("disorder", e.to_string()))?;
        Ok(spec)
    }

    /// Band shared by the section and both half-spaces.
    pub fn common_band(&self) -> (f64, f64) {
        let l = &self.lattice;
        let (a, b) = band_with_mass(l.ks, 1.0);
        let (c, d) = band_with_mass(l.ks, 1.0 + l.left_offset);
        let (e, f) = band_with_mass(l.ks, 1.0 + l.right_offset);
        (a.max(c).max(e), b.min(d).min(f))
    }

    pub fn grid(&self, field: &'static str) -> Result<Vec<f64>, CliError> {
        let g = match field {
            "omega" => &self.omega,
            "alpha" => &self.alpha,
            "beta" => &self.beta,
            "tau" => &self.tau,
            "gamma_l" => &self.gamma_l,
            _ => unreachable!("unknown grid {field}"),
        };
        let g = g.as_ref().ok_or_else(|| {
            CliError::schema(
                field,
                format!("required by scenario {}", self.scenario.name()),
            )
        })?;
        g.resolve(field, (field == "omega").then(|| self.common_band()))
    }

    /// Canonical JSON of the fully defaulted config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses a config from JSON, reporting schema errors with their field path.
pub fn from_value(v: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        CliError::schema(
            if path == "." { "<root>" } else { &path },
            e.into_inner().to_string(),
        )
    })
}

/// Applies `key.sub=value` to a JSON document. `value` is read as JSON when
/// it parses, otherwise as a string. Only scalar fields can be set.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::schema(assignment, "overrides take the form key=value"))?;
    let value =
        serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    if value.is_object() || value.is_array() {
        return Err(CliError::schema(
            key,
            "only scalar fields can be overridden",
        ));
    }
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = doc;
    for (i, part) in parts.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| {
            CliError::schema(key, format!("`{}` is not an object", parts[..i].join(".")))
        })?;
        if i + 1 == parts.len() {
            if let Some(Value::Object(_) | Value::Array(_)) = obj.get(*part) {
                return Err(CliError::schema(
                    key,
                    "only scalar fields can be overridden",
                ));
            }
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "scenario": "fd-transmittance",
            "lattice": {"ks": 0.0, "length": 40, "sigma": 0.05},
            "n_real": 10,
            "omega": {"band": 5}
        })
    }

    #[test]
    fn parses_with_defaults() {
        let c = from_value(base()).unwrap();
        assert_eq!(c.scenario, Scenario::FdTransmittance);
        assert_eq!(c.disorder.distribution, Distribution::Uniform);
        assert_eq!(c.time.section_start, 1);
        let w = c.grid("omega").unwrap();
        assert_eq!(w.len(), 5);
        assert!(w[0] > 0.0 && w[4] < 2.0);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let mut v = base();
        v["lattice"]["sigma"] = json!("big");
        let e = from_value(v).unwrap_err();
        assert!(e.to_string().contains("lattice.sigma"), "{e}");
        let mut v = base();
        v["lattice"]["colour"] = json!(1);
        assert!(from_value(v).unwrap_err().to_string().contains("lattice"));
        let mut v = base();
        v["scenario"] = json!("fd-nothing");
        assert!(from_value(v).unwrap_err().to_string().contains("scenario"));
    }

    #[test]
    fn grids_must_increase() {
        assert!(Grid::Values(vec![]).resolve("omega", None).is_err());
        assert!(Grid::Values(vec![1.0, 1.0]).resolve("omega", None).is_err());
        assert!(Grid::Linspace {
            start: 2.0,
            stop: 1.0,
            count: 3
        }
        .resolve("alpha", None)
        .is_err());
        assert_eq!(
            Grid::Linspace {
                start: 1.0,
                stop: 2.0,
                count: 3
            }
            .resolve("alpha", None)
            .unwrap(),
            vec![1.0, 1.5, 2.0]
        );
        assert!(Grid::Band { band: 3 }.resolve("alpha", None).is_err());
    }

    #[test]
    fn overrides() {
        let mut v = base();
        apply_override(&mut v, "lattice.sigma=0.1").unwrap();
        apply_override(&mut v, "disorder.master_seed=9").unwrap();
        apply_override(&mut v, "disorder.distribution=two_point").unwrap();
        let c = from_value(v.clone()).unwrap();
        assert_eq!(c.lattice.sigma, 0.1);
        assert_eq!(c.disorder.master_seed, 9);
        assert_eq!(c.disorder.distribution, Distribution::TwoPoint);
        assert!(apply_override(&mut v, "lattice=3").is_err());
        assert!(apply_override(&mut v, "lattice.sigma").is_err());
        assert!(apply_override(&mut v, "n_real.x=1").is_err());
    }

    #[test]
    fn hash_tracks_every_parameter() {
        let a = from_value(base()).unwrap();
        assert_eq!(a.hash(), from_value(base()).unwrap().hash());
        assert_eq!(a.hash().len(), 64);
        let mut seen = vec![a.hash()];
        for set in [
            "lattice.sigma=0.06",
            "n_real=11",
            "disorder.master_seed=1",
            "time.dt=0.01",
            "lattice.left_offset=0.1",
        ] {
            let mut v = base();
            apply_override(&mut v, set).unwrap();
            let h = from_value(v).unwrap().hash();
            assert!(!seen.contains(&h), "{set}");
            seen.push(h);
        }
    }
}
