//! Random mass profiles and deterministic Monte Carlo campaigns.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::MassProfile;
use crate::stats::CorrelationModel;

/// Marginal law of the unit-variance innovations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    #[default]
    Uniform,
    /// `+-1` with probability 1/2 each.
    TwoPoint,
    /// Gaussian cut at `+-3` standard units and rescaled to unit variance.
    TruncatedGaussian,
}

const GAUSS_CUT: f64 = 3.0;

// variance of N(0, 1) conditioned on |z| <= GAUSS_CUT
fn truncated_gauss_variance() -> f64 {
    let a = GAUSS_CUT;
    let phi = (-0.5 * a * a).exp() / (2.0 * PI).sqrt();
    let mass = statrs::function::erf::erf(a / 2f64.sqrt());
    1.0 - 2.0 * a * phi / mass
}

impl Distribution {
    /// Largest absolute value of a unit-variance draw.
    pub fn bound(&self) -> f64 {
        match self {
            Distribution::Uniform => 3f64.sqrt(),
            Distribution::TwoPoint => 1.0,
            Distribution::TruncatedGaussian => GAUSS_CUT / truncated_gauss_variance().sqrt(),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
            Distribution::TwoPoint => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::TruncatedGaussian => {
                let scale = truncated_gauss_variance().sqrt();
                loop {
                    let z: f64 = StandardNormal.sample(rng);
                    if z.abs() <= GAUSS_CUT {
                        return z / scale;
                    }
                }
            }
        }
    }
}

/// Statistics of the perturbed section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub sigma: f64,
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub correlation: CorrelationModel,
    pub length: usize,
    pub master_seed: u64,
}

/// Geometric filters are cut where `rho^j < 1e-8`.
const GEOMETRIC_CUT: f64 = 1e-8;

impl DisorderSpec {
    pub fn new(sigma: f64, length: usize, master_seed: u64) -> Result<Self> {
        let s = DisorderSpec {
            sigma,
            distribution: Distribution::Uniform,
            correlation: CorrelationModel::Uncorrelated,
            length,
            master_seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_distribution(mut self, d: Distribution) -> Result<Self> {
        self.distribution = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_correlation(mut self, c: CorrelationModel) -> Result<Self> {
        self.correlation = c;
        self.validate()?;
        Ok(self)
    }

    /// Rejects combinations that could produce a non-positive mass.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("must be finite and >= 0, got {}", self.sigma),
            ));
        }
        if self.length < 1 {
            return Err(invalid("length", "must be at least 1"));
        }
        self.correlation.validate()?;
        let l1: f64 = self.filter().iter().map(|h| h.abs()).sum();
        let worst = self.sigma * self.distribution.bound() * l1;
        if worst >= 1.0 {
            return Err(invalid(
                "sigma",
                format!("perturbations can reach {worst:.4} in magnitude, so some mass could be non-positive"),
            ));
        }
        Ok(())
    }

    /// Moving-average weights `h_0..h_J` with `sum h_j^2 = 1` whose
    /// autocovariance `sum_j h_j h_{j+m}` reproduces the correlation model.
    pub fn filter(&self) -> Vec<f64> {
        let mut h = match &self.correlation {
            CorrelationModel::Uncorrelated => vec![1.0],
            CorrelationModel::Geometric { rho } => {
                // AR(1) impulse response
                let rho = *rho;
                if rho == 0.0 {
                    vec![1.0]
                } else {
                    let n = (GEOMETRIC_CUT.ln() / rho.abs().ln()).ceil() as usize + 1;
                    (0..n)
                        .map(|j| (1.0 - rho * rho).sqrt() * rho.powi(j as i32))
                        .collect()
                }
            }
            CorrelationModel::Tabulated { gamma } => {
                // symmetric square root of the spectral density, folded onto j >= 0
                let m = gamma.len();
                let span = 16 * m.max(2);
                let nk = 4096;
                let sq: Vec<f64> = (0..=nk)
                    .map(|i| {
                        self.correlation
                            .spectral_density(PI * i as f64 / nk as f64)
                            .max(0.0)
                            .sqrt()
                    })
                    .collect();
                // c_j = (1/pi) int_0^pi sqrt(S) cos(jk) dk by the trapezoid rule
                let c = |j: usize| {
                    let mut s = 0.0;
                    for (i, v) in sq.iter().enumerate() {
                        let w = if i == 0 || i == nk { 0.5 } else { 1.0 };
                        s += w * v * (j as f64 * PI * i as f64 / nk as f64).cos();
                    }
                    s / nk as f64
                };
                // two-sided filter c_{-J..J}, stored in order
                let half: Vec<f64> = (0..=span).map(c).collect();
                let mut full: Vec<f64> = half[1..].iter().rev().copied().collect();
                full.extend_from_slice(&half);
                full
            }
        };
        let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in h.iter_mut() {
            *v /= norm;
        }
        h
    }

    /// Profile of realization `index`: a deterministic function of
    /// `(master_seed, index)`.
    pub fn draw_profile(&self, index: u64) -> MassProfile {
        if self.sigma == 0.0 {
            return MassProfile::unperturbed(self.length);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index);
        let h = self.filter();
        let n = self.length + h.len() - 1;
        let xi: Vec<f64> = (0..n).map(|_| self.distribution.sample(&mut rng)).collect();
        let deltas = (0..self.length)
            .map(|x| {
                self.sigma
                    * h.iter()
                        .enumerate()
                        .map(|(j, hj)| hj * xi[x + j])
                        .sum::<f64>()
            })
            .collect();
        MassProfile::new(deltas)
    }
}

/// Free-function form of [`DisorderSpec::draw_profile`].
pub fn draw_profile(spec: &DisorderSpec, index: u64) -> MassProfile {
    spec.draw_profile(index)
}

/// Per-coordinate statistics over `n` realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub n: u64,
    pub coord: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation (denominator `n - 1`).
    pub std: Vec<f64>,
    /// `std / sqrt(n)`.
    pub stderr: Vec<f64>,
}

impl EnsembleSummary {
    /// Statistics of `rows[realization][coordinate]`, reduced in row order.
    pub fn from_rows(coord: &[f64], rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(invalid(
                "n_real",
                format!("at least 2 realizations are needed, got {n}"),
            ));
        }
        let m = coord.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Domain(format!(
                "realization {bad} returned {} values for {m} coordinates",
                rows[bad].len()
            )));
        }
        let mut mean = vec![0.0; m];
        for r in rows {
            for (a, v) in mean.iter_mut().zip(r) {
                *a += v;
            }
        }
        for a in mean.iter_mut() {
            *a /= n as f64;
        }
        let mut var = vec![0.0; m];
        for r in rows {
            for ((a, v), mu) in var.iter_mut().zip(r).zip(&mean) {
                *a += (v - mu) * (v - mu);
            }
        }
        let std: Vec<f64> = var.iter().map(|v| (v / (n - 1) as f64).sqrt()).collect();
        let stderr = std.iter().map(|s| s / (n as f64).sqrt()).collect();
        Ok(EnsembleSummary {
            n: n as u64,
            coord: coord.to_vec(),
            mean,
            std,
            stderr,
        })
    }
}

/// Evaluates `solver(index, profile)` for realizations `0..n_real` in
/// parallel and returns the rows in index order. The first failing index
/// aborts the campaign.
pub fn run_realizations<F>(spec: &DisorderSpec, n_real: u64, solver: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(u64, &MassProfile) -> Result<Vec<f64>> + Sync,
{
    spec.validate()?;
    let out: Vec<Result<Vec<f64>>> = (0..n_real)
        .into_par_iter()
        .map(|i| solver(i, &spec.draw_profile(i)))
        .collect();
    out.into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Realization {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Monte Carlo campaign: one value per coordinate per realization,
/// summarized in fixed index order, so the result does not depend on the
/// thread count.
pub fn run_campaign<F>(
    spec: &DisorderSpec,
    coord: &[f64],
    n_real: u64,
    solver: F,
) -> Result<EnsembleSummary>
where
    F: Fn(u64, &MassProfile) -> Result<Vec<f64>> + Sync,
{
    if n_real < 2 {
        return Err(invalid(
            "n_real",
            format!("at least 2 realizations are needed, got {n_real}"),
        ));
    }
    let rows = run_realizations(spec, n_real, solver)?;
    EnsembleSummary::from_rows(coord, &rows)
}
