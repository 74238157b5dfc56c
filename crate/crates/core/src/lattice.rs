//! Physical parameters, dispersion relation and stationary-phase frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, BandEdge, Error, Result};

/// Physical scenario: pinning, disordered section and half-space mass offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Pinning constant `Ks`.
    pub ks: f64,
    /// Number of perturbed sites `L`.
    pub length: usize,
    /// Standard deviation of the mass perturbations.
    pub sigma: f64,
    /// Mass offset of the left half-space (`x <= 0`).
    #[serde(default)]
    pub left_offset: f64,
    /// Mass offset of the right half-space (`x > L`).
    #[serde(default)]
    pub right_offset: f64,
}

impl LatticeConfig {
    pub fn new(ks: f64, length: usize, sigma: f64) -> Result<Self> {
        let c = LatticeConfig {
            ks,
            length,
            sigma,
            left_offset: 0.0,
            right_offset: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_offsets(mut self, left: f64, right: f64) -> Result<Self> {
        self.left_offset = left;
        self.right_offset = right;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ks >= 0.0 && self.ks.is_finite()) {
            return Err(invalid(
                "ks",
                format!("must be finite and >= 0, got {}", self.ks),
            ));
        }
        if self.length < 1 {
            return Err(invalid("length", "must be at least 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("must be finite and >= 0, got {}", self.sigma),
            ));
        }
        if !(1.0 + self.left_offset > 0.0) || !self.left_offset.is_finite() {
            return Err(invalid(
                "left_offset",
                format!("1 + offset must be positive, got {}", self.left_offset),
            ));
        }
        if !(1.0 + self.right_offset > 0.0) || !self.right_offset.is_finite() {
            return Err(invalid(
                "right_offset",
                format!("1 + offset must be positive, got {}", self.right_offset),
            ));
        }
        Ok(())
    }

    pub fn is_matched(&self) -> bool {
        self.left_offset == 0.0 && self.right_offset == 0.0
    }
}

/// Realized mass perturbations: `1 + deltas[j]` at site `start + j`, and the
/// half-space offsets on either side of the section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassProfile {
    pub deltas: Vec<f64>,
    pub left_offset: f64,
    pub right_offset: f64,
    /// First perturbed site. The frequency-domain solvers always place the
    /// section on `[1, L]`; only the time-domain solver uses this.
    pub start: i64,
}

impl MassProfile {
    pub fn new(deltas: Vec<f64>) -> Self {
        MassProfile {
            deltas,
            left_offset: 0.0,
            right_offset: 0.0,
            start: 1,
        }
    }

    pub fn unperturbed(length: usize) -> Self {
        Self::new(vec![0.0; length])
    }

    pub fn with_offsets(mut self, left: f64, right: f64) -> Self {
        self.left_offset = left;
        self.right_offset = right;
        self
    }

    pub fn with_start(mut self, start: i64) -> Self {
        self.start = start;
        self
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Last perturbed site.
    pub fn end(&self) -> i64 {
        self.start + self.deltas.len() as i64 - 1
    }

    /// Mass offset at an arbitrary site.
    pub fn delta_at(&self, x: i64) -> f64 {
        if x < self.start {
            self.left_offset
        } else if x > self.end() {
            self.right_offset
        } else {
            self.deltas[(x - self.start) as usize]
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (j, d) in self.deltas.iter().enumerate() {
            if !(1.0 + d > 0.0) {
                return Err(Error::NonPositiveMass {
                    site: self.start + j as i64,
                    mass: 1.0 + d,
                });
            }
        }
        if !(1.0 + self.left_offset > 0.0) {
            return Err(Error::NonPositiveMass {
                site: self.start - 1,
                mass: 1.0 + self.left_offset,
            });
        }
        if !(1.0 + self.right_offset > 0.0) {
            return Err(Error::NonPositiveMass {
                site: self.end() + 1,
                mass: 1.0 + self.right_offset,
            });
        }
        Ok(())
    }

    /// Same perturbations in reverse order.
    pub fn reversed(&self) -> Self {
        let mut d = self.deltas.clone();
        d.reverse();
        MassProfile {
            deltas: d,
            left_offset: self.right_offset,
            right_offset: self.left_offset,
            start: self.start,
        }
    }
}

/// Open propagative band `(sqrt(Ks), sqrt(Ks + 4))`.
pub fn band(ks: f64) -> (f64, f64) {
    (ks.sqrt(), (ks + 4.0).sqrt())
}

/// Band of a half-space whose masses are `1 + offset`.
pub fn band_with_mass(ks: f64, mass: f64) -> (f64, f64) {
    ((ks / mass).sqrt(), ((ks + 4.0) / mass).sqrt())
}

/// Checks that `omega` lies strictly inside the band of a medium with the given mass.
pub fn check_in_band(omega: f64, ks: f64, mass: f64) -> Result<()> {
    let (lo, hi) = band_with_mass(ks, mass);
    if omega.is_nan() || omega <= lo {
        return Err(Error::OutOfBand {
            omega,
            lo,
            hi,
            edge: BandEdge::Lower,
        });
    }
    if omega >= hi {
        return Err(Error::OutOfBand {
            omega,
            lo,
            hi,
            edge: BandEdge::Upper,
        });
    }
    Ok(())
}

/// `cos k` for a medium of mass `mass`: the left-hand side of the dispersion relation solved for `cos k`.
pub fn cos_wavenumber(omega: f64, ks: f64, mass: f64) -> f64 {
    (2.0 + ks - mass * omega * omega) / 2.0
}

/// Wavenumber in `[0, pi]` on the closed band of a medium with masses `mass`.
///
/// Frequencies outside the band are clamped to the nearest edge; this is the
/// limit evaluation used at band edges.
pub fn wavenumber_with_mass(omega: f64, ks: f64, mass: f64) -> f64 {
    let q = (mass * omega * omega - ks).max(0.0).sqrt() / 2.0;
    2.0 * q.min(1.0).asin()
}

/// Wavenumber of the unit-mass lattice on the closed band.
pub fn wavenumber(omega: f64, ks: f64) -> f64 {
    wavenumber_with_mass(omega, ks, 1.0)
}

/// Dispersion data at one in-band frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub omega: f64,
    pub k: f64,
    /// `k'(omega)`, the group slowness.
    pub dk: f64,
    pub d2k: f64,
    pub d3k: f64,
}

impl DispersionPoint {
    /// `2 cos k - 2 - Ks + omega^2`, zero up to rounding.
    pub fn residual(&self, ks: f64) -> f64 {
        2.0 * self.k.cos() - 2.0 - ks + self.omega * self.omega
    }
}

/// Wavenumber and its first three frequency derivatives for `omega` in the open band.
pub fn dispersion(omega: f64, ks: f64) -> Result<DispersionPoint> {
    check_in_band(omega, ks, 1.0)?;
    let w2 = omega * omega;
    let a = w2 - ks;
    let b = 4.0 + ks - w2;
    let ab = a * b;
    let sab = ab.sqrt();
    let ws4 = 4.0 * ks + ks * ks;
    let p = w2 * w2 - ws4;
    let k = 2.0 * (a.sqrt() / 2.0).asin();
    let dk = 2.0 * omega / sab;
    let d2k = 2.0 * p / (ab * sab);
    let d3k = 8.0 * omega * w2 / (ab * sab) - 6.0 * omega * p * (b - a) / (ab * ab * sab);
    Ok(DispersionPoint {
        omega,
        k,
        dk,
        d2k,
        d3k,
    })
}

/// Spectral amplitude `c(omega)` of the impulse response.
///
/// Zero outside the band. At a band edge where it diverges the value is
/// `f64::INFINITY`; callers test `is_infinite()` as the divergence flag.
/// For `Ks = 0` the removable singularity at `omega = 0` is resolved to 1.
pub fn spectral_amplitude(omega: f64, ks: f64) -> f64 {
    let w = omega.abs();
    let w2 = w * w;
    if ks == 0.0 {
        if w < 2.0 {
            return 2.0 / (4.0 - w2).sqrt();
        }
        return if w == 2.0 { f64::INFINITY } else { 0.0 };
    }
    let (lo, hi) = band(ks);
    if w == lo || w == hi {
        return f64::INFINITY;
    }
    if w < lo || w > hi {
        return 0.0;
    }
    2.0 * w / ((w2 - ks).sqrt() * (4.0 + ks - w2).sqrt())
}

/// Frequency and slowness of the wave front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontParams {
    pub omega_s: f64,
    pub alpha_s: f64,
}

pub fn front_params(ks: f64) -> FrontParams {
    let w4 = 4.0 * ks + ks * ks;
    let omega_s = w4.sqrt().sqrt();
    let alpha_s = 2.0_f64.sqrt() / (2.0 + ks - w4.sqrt()).sqrt();
    FrontParams { omega_s, alpha_s }
}

/// Frequencies whose group slowness equals a given `alpha`.
///
/// For `Ks = 0` there is a single root, stored in `plus`, and `minus` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPair {
    pub minus: Option<f64>,
    pub plus: f64,
}

pub fn stationary_frequencies(alpha: f64, ks: f64) -> Result<StationaryPair> {
    let fp = front_params(ks);
    if !(alpha > fp.alpha_s) {
        return Err(Error::NoStationaryPoint {
            alpha,
            alpha_s: fp.alpha_s,
        });
    }
    let a2 = alpha * alpha;
    if ks == 0.0 {
        let plus = 2.0 * (a2 - 1.0).sqrt() / alpha;
        return Ok(StationaryPair { minus: None, plus });
    }
    let disc = (a2 * a2 - (2.0 + ks) * a2 + 1.0).max(0.0).sqrt();
    let base = (1.0 + ks / 2.0) * a2 - 1.0;
    let plus = (2.0 / a2 * (base + disc)).sqrt();
    // base - disc cancels for large alpha; the product of the two roots is omega_s^4.
    let minus2 = (4.0 * ks + ks * ks) / (plus * plus);
    Ok(StationaryPair {
        minus: Some(minus2.sqrt()),
        plus,
    })
}
