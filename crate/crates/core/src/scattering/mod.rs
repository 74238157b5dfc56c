//! Exact time-harmonic scattering by the perturbed section.
//!
//! Two independent routes are provided: the backward transfer recursion for
//! the amplitudes `(alpha_x, beta_x)` ([`solve_matched_recursion`],
//! [`solve_nonmatched`], [`reflect_evanescent`]) and dense Green's-function
//! solves ([`solve_matched_toeplitz`], [`solve_nonmatched_green`]).
//!
//! Conventions: the section occupies sites `1..=L`, the incident wave is
//! `exp(i k0 x)` for `x <= 0`, the transmitted wave `T exp(i k1 x)` (or
//! `T lambda^x` when the right half-space is evanescent) for `x > L`.

mod green;
mod recursion;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{BandEdge, Error, Result};
use crate::lattice::{check_in_band, cos_wavenumber, wavenumber_with_mass, MassProfile};

pub use green::{solve_matched_toeplitz, solve_nonmatched_green, step_kernel};
pub use recursion::{
    reflect_evanescent, solve_matched_recursion, solve_nonmatched, transfer_amplitudes,
    TransferAmplitudes,
};

/// Wave regime of a half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HalfSpace {
    /// Propagating with wavenumber in `(0, pi)`.
    Propagating { k: f64 },
    /// Evanescent: the field decays as `lambda^x`, `lambda` in `(-1, 1)`.
    /// `lambda = exp(-kappa)` when `Q > 1` and `lambda = Q + sqrt(Q^2 - 1)` when `Q < -1`.
    Evanescent { lambda: f64 },
}

impl HalfSpace {
    fn new(omega: f64, ks: f64, offset: f64) -> Self {
        let q = cos_wavenumber(omega, ks, 1.0 + offset);
        if q > 1.0 {
            // lambda + 1/lambda = 2Q with 0 < lambda < 1
            let kappa = (q - 1.0 + ((q - 1.0) * (q + 1.0)).sqrt()).ln_1p();
            HalfSpace::Evanescent {
                lambda: (-kappa).exp(),
            }
        } else if q < -1.0 {
            HalfSpace::Evanescent {
                lambda: q + (q * q - 1.0).sqrt(),
            }
        } else {
            HalfSpace::Propagating {
                k: wavenumber_with_mass(omega, ks, 1.0 + offset),
            }
        }
    }

    pub fn wavenumber(&self) -> Option<f64> {
        match *self {
            HalfSpace::Propagating { k } => Some(k),
            HalfSpace::Evanescent { .. } => None,
        }
    }
}

/// One frequency, one realization.
#[derive(Debug, Clone)]
pub struct HarmonicSetup<'a> {
    pub omega: f64,
    pub ks: f64,
    pub profile: &'a MassProfile,
    /// Wavenumber in the section.
    pub k: f64,
    pub left: HalfSpace,
    pub right: HalfSpace,
}

impl<'a> HarmonicSetup<'a> {
    /// Section and left half-space must be propagative; the right half-space may be evanescent.
    pub fn new(omega: f64, ks: f64, profile: &'a MassProfile) -> Result<Self> {
        profile.validate()?;
        if profile.is_empty() {
            return Err(crate::error::invalid(
                "profile",
                "the perturbed section is empty",
            ));
        }
        check_in_band(omega, ks, 1.0)?;
        let left = HalfSpace::new(omega, ks, profile.left_offset);
        if let HalfSpace::Evanescent { .. } = left {
            let (lo, hi) = crate::lattice::band_with_mass(ks, 1.0 + profile.left_offset);
            let edge = if omega <= lo {
                BandEdge::Lower
            } else {
                BandEdge::Upper
            };
            return Err(Error::OutOfBand {
                omega,
                lo,
                hi,
                edge,
            });
        }
        let right = HalfSpace::new(omega, ks, profile.right_offset);
        let k = wavenumber_with_mass(omega, ks, 1.0);
        Ok(HarmonicSetup {
            omega,
            ks,
            profile,
            k,
            left,
            right,
        })
    }

    pub fn k0(&self) -> f64 {
        self.left
            .wavenumber()
            .expect("left half-space is propagative")
    }

    pub fn is_matched(&self) -> bool {
        self.profile.left_offset == 0.0 && self.profile.right_offset == 0.0
    }
}

/// Scattering coefficients and the field on the section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub t: Complex64,
    pub r: Complex64,
    /// `u_1 .. u_L`.
    pub interior: Vec<Complex64>,
    /// Departure from energy conservation (see [`flux_deficit`]).
    pub flux_deficit: f64,
    pub right: HalfSpace,
}

impl ScatteringResult {
    /// Transmittance `|T|^2`.
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }
}

/// `| |R|^2 + (sin k1 / sin k0) |T|^2 - 1 |` for a propagating right
/// half-space and `| |R| - 1 |` for an evanescent one.
pub fn flux_deficit(setup: &HarmonicSetup, t: Complex64, r: Complex64) -> f64 {
    match setup.right {
        HalfSpace::Propagating { k: k1 } => {
            let k0 = setup.k0();
            (r.norm_sqr() + k1.sin() / k0.sin() * t.norm_sqr() - 1.0).abs()
        }
        HalfSpace::Evanescent { .. } => (r.norm() - 1.0).abs(),
    }
}

/// Dispatches to the recursion route appropriate for the setup.
pub fn solve(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    match setup.right {
        HalfSpace::Evanescent { .. } => reflect_evanescent(setup),
        HalfSpace::Propagating { .. } if setup.is_matched() => solve_matched_recursion(setup),
        HalfSpace::Propagating { .. } => solve_nonmatched(setup),
    }
}
