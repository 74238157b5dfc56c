//! Transmittance statistics in the diffusion regime.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{check_in_band, dispersion, wavenumber_with_mass};
use crate::quadrature::{adaptive, gl20};
use crate::specfun::{legendre_conical_cosh, legendre_conical_cosh_grid, ln_phi_n};

/// Localization rate `sigma^2 omega^4 / (4 sin^2 k)` for independent perturbations.
pub fn gamma_iid(omega: f64, sigma: f64, ks: f64) -> Result<f64> {
    check_in_band(omega, ks, 1.0)?;
    let w2 = omega * omega;
    // 4 sin^2 k = (omega^2 - Ks)(4 + Ks - omega^2)
    Ok(sigma * sigma * w2 * w2 / ((w2 - ks) * (4.0 + ks - w2)))
}

/// Localization rate at the front frequency in closed form.
pub fn gamma_front(sigma: f64, ks: f64) -> f64 {
    let a = ks.sqrt();
    let b = (4.0 + ks).sqrt();
    sigma * sigma * a * b / ((b - a) * (b - a))
}

/// Localization length `1 / gamma`.
pub fn localization_length(omega: f64, sigma: f64, ks: f64) -> Result<f64> {
    Ok(1.0 / gamma_iid(omega, sigma, ks)?)
}

/// Normalized covariance `Gamma(j)` of the perturbation sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelationModel {
    #[default]
    Uncorrelated,
    /// `Gamma(j) = rho^|j|`.
    Geometric { rho: f64 },
    /// `Gamma(0..=J)`, zero beyond; `Gamma(0)` must be 1.
    Tabulated { gamma: Vec<f64> },
}

impl CorrelationModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationModel::Uncorrelated => Ok(()),
            CorrelationModel::Geometric { rho } => {
                if !(rho.abs() < 1.0) {
                    return Err(invalid(
                        "correlation.rho",
                        format!("must lie in (-1, 1), got {rho}"),
                    ));
                }
                Ok(())
            }
            CorrelationModel::Tabulated { gamma } => {
                if gamma.first() != Some(&1.0) {
                    return Err(invalid("correlation.gamma", "must start with Gamma(0) = 1"));
                }
                // Wiener–Khintchine: the spectral density may not go negative.
                for i in 0..=1024 {
                    let k = PI * i as f64 / 1024.0;
                    let v = self.spectral_density(k);
                    if v < -1e-12 {
                        return Err(invalid(
                            "correlation.gamma",
                            format!("spectral density is negative ({v:e}) at k = {k}"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// `Gamma(j)`.
    pub fn covariance(&self, j: usize) -> f64 {
        match self {
            CorrelationModel::Uncorrelated => (j == 0) as u8 as f64,
            CorrelationModel::Geometric { rho } => rho.powi(j as i32),
            CorrelationModel::Tabulated { gamma } => gamma.get(j).copied().unwrap_or(0.0),
        }
    }

    /// `Gamma(0) + 2 sum_{j>=1} cos(k j) Gamma(j)`.
    pub fn spectral_density(&self, k: f64) -> f64 {
        match self {
            CorrelationModel::Uncorrelated => 1.0,
            CorrelationModel::Geometric { rho } => {
                (1.0 - rho * rho) / (1.0 - 2.0 * rho * k.cos() + rho * rho)
            }
            CorrelationModel::Tabulated { gamma } => {
                gamma[0]
                    + 2.0
                        * gamma
                            .iter()
                            .enumerate()
                            .skip(1)
                            .map(|(j, g)| (k * j as f64).cos() * g)
                            .sum::<f64>()
            }
        }
    }
}

pub fn spectral_density(model: &CorrelationModel, k: f64) -> f64 {
    model.spectral_density(k)
}

/// Localization rate for correlated perturbations: `gamma_iid * Gamma_hat(2k)`.
pub fn gamma_correlated(omega: f64, sigma: f64, ks: f64, model: &CorrelationModel) -> Result<f64> {
    let g = gamma_iid(omega, sigma, ks)?;
    let k = dispersion(omega, ks)?.k;
    Ok(g * model.spectral_density(2.0 * k))
}

/// `E[|T|^{2n}]` for `n = 1..=N` at a given `gamma L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmittanceMoments {
    pub gamma_l: f64,
    /// `moments[n - 1] = E[|T|^{2n}]`.
    pub moments: Vec<f64>,
}

impl TransmittanceMoments {
    pub fn mean(&self) -> f64 {
        self.moments[0]
    }

    /// Standard deviation of `|T|^2`; needs at least two moments.
    pub fn std(&self) -> f64 {
        (self.moments[1] - self.moments[0] * self.moments[0])
            .max(0.0)
            .sqrt()
    }
}

// ln of 2 pi s sinh(pi s) / cosh^2(pi s)
fn ln_kernel(s: f64) -> f64 {
    let x = PI * s;
    let ln_tanh = if x > 20.0 {
        -2.0 * (-2.0 * x).exp()
    } else {
        x.tanh().ln()
    };
    let ln_sech = -x + 2f64.ln() - (-2.0 * x).exp().ln_1p();
    (2.0 * PI * s).ln() + ln_tanh + ln_sech
}

// Upper limit beyond which kernel * phi_n * exp(-g s^2) is below e^-46 of its peak.
fn kernel_range(n: usize, g: f64) -> f64 {
    let f = |s: f64| ln_kernel(s) + ln_phi_n(n, s) - g * s * s;
    let mut peak = f64::NEG_INFINITY;
    let mut s = 0.02;
    loop {
        let v = f(s);
        peak = peak.max(v);
        if v < peak - 46.0 && s > 1.0 {
            return s;
        }
        s += 0.05;
        if s > 2000.0 {
            return s;
        }
    }
}

/// `e^{-g/4} int_0^inf K(s) phi_n(s) e^{-g s^2} h(s) ds` with the moment kernel `K`.
fn kernel_integral<H: FnMut(f64) -> f64>(n: usize, g: f64, oscillation: f64, mut h: H) -> f64 {
    let smax = kernel_range(n, g);
    let panels = (smax * (1.0 + oscillation / 4.0)).ceil() as usize + 2;
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (ln_kernel(s) + ln_phi_n(n, s) - g * s * s).exp() * h(s)
    };
    (-g / 4.0).exp() * adaptive(f, 0.0, smax, panels, 1e-13)
}

/// `E[|T|^{2n}]` of the matched medium, any `n >= 1`.
pub fn moment_matched(n: usize, gamma_l: f64) -> f64 {
    assert!(n >= 1);
    kernel_integral(n, gamma_l, 0.0, |_| 1.0)
}

/// Transmittance moments `E[|T|^{2n}]`, `n = 1..=n_max`, of the matched medium.
pub fn moments_matched(n_max: usize, gamma_l: f64) -> Result<TransmittanceMoments> {
    if n_max == 0 || n_max > 20 {
        return Err(invalid("n_max", format!("must be in 1..=20, got {n_max}")));
    }
    if !(gamma_l >= 0.0 && gamma_l.is_finite()) {
        return Err(invalid(
            "gamma_l",
            format!("must be finite and >= 0, got {gamma_l}"),
        ));
    }
    let moments = (1..=n_max).map(|n| moment_matched(n, gamma_l)).collect();
    Ok(TransmittanceMoments { gamma_l, moments })
}

/// Wavenumbers of the section and of a half-space of mass `1 + offset`, both propagative.
fn wavenumbers(omega: f64, ks: f64, offset: f64) -> Result<(f64, f64)> {
    check_in_band(omega, ks, 1.0)?;
    check_in_band(omega, ks, 1.0 + offset)?;
    Ok((
        wavenumber_with_mass(omega, ks, 1.0),
        wavenumber_with_mass(omega, ks, 1.0 + offset),
    ))
}

/// `xi = acosh(eta)` with `eta = (1 - cos k cos q) / (sin k sin q)`.
fn interface_xi(k: f64, q: f64) -> f64 {
    // eta - 1 = 2 sin^2((k - q)/2) / (sin k sin q)
    let e = 2.0 * (0.5 * (k - q)).sin().powi(2) / (k.sin() * q.sin());
    (e + (e * (e + 2.0)).sqrt()).ln_1p()
}

/// Inputs of the non-matched formulas; `offset` is the mass offset of the
/// half-space that differs from the section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonMatched {
    pub omega: f64,
    pub ks: f64,
    /// `gamma L` for the section (use [`gamma_iid`] or [`gamma_correlated`]).
    pub gamma_l: f64,
    pub offset: f64,
}

impl NonMatched {
    pub fn iid(omega: f64, ks: f64, sigma: f64, length: usize, offset: f64) -> Result<Self> {
        let gamma_l = gamma_iid(omega, sigma, ks)? * length as f64;
        Ok(NonMatched {
            omega,
            ks,
            gamma_l,
            offset,
        })
    }
}

/// `E[|T|^{2n}]`, `n` in {1, 2}, when only the left half-space is offset.
///
/// Evaluated as the double series in the reflection ratio
/// `r = (1 - cos(k - k0)) / (1 - cos(k + k0))` over the matched moments,
/// truncated by a tail bound of `1e-10`. Both summation orders are formed and
/// must agree to `1e-9`.
pub fn moments_nonmatched_left(n: usize, p: &NonMatched) -> Result<f64> {
    if n != 1 && n != 2 {
        return Err(invalid("n", format!("must be 1 or 2, got {n}")));
    }
    let (k, k0) = wavenumbers(p.omega, p.ks, p.offset)?;
    let c = 2.0 * k0.sin().powi(2) / (1.0 - (k + k0).cos());
    let r = (1.0 - (k - k0).cos()) / (1.0 - (k + k0).cos());
    if !(r < 1.0) {
        return Err(Error::Domain(format!(
            "reflection ratio r = {r} is not below 1"
        )));
    }
    let weight = |m: usize| {
        if n == 1 {
            1.0
        } else {
            ((1 + m) * (1 + m)) as f64
        }
    };
    // smallest M with sum_{m > M} weight(m) r^m < 1e-10
    let mut tail: f64 = {
        // closed forms of sum_{m>=0} w(m) r^m
        if n == 1 {
            1.0 / (1.0 - r)
        } else {
            (1.0 + r) / (1.0 - r).powi(3)
        }
    };
    let mut big_m = 0usize;
    loop {
        tail -= weight(big_m) * r.powi(big_m as i32);
        if tail < 1e-10 || r == 0.0 {
            break;
        }
        big_m += 1;
        if big_m > 200 {
            return Err(Error::Domain(format!(
                "reflection ratio r = {r} needs more than 200 series terms"
            )));
        }
    }
    let mom: Vec<f64> = (0..=big_m)
        .map(|j| moment_matched(j + n, p.gamma_l))
        .collect();
    let mut binom = vec![vec![0.0f64; big_m + 1]; big_m + 1];
    for m in 0..=big_m {
        binom[m][0] = 1.0;
        for j in 1..=m {
            binom[m][j] = binom[m - 1][j - 1] + if j < m { binom[m - 1][j] } else { 0.0 };
        }
    }
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut by_m = 0.0;
    for m in 0..=big_m {
        let inner: f64 = (0..=m).map(|j| binom[m][j] * sign(j) * mom[j]).sum();
        by_m += weight(m) * r.powi(m as i32) * inner;
    }
    let mut by_n = 0.0;
    for j in 0..=big_m {
        let inner: f64 = (j..=big_m)
            .map(|m| binom[m][j] * weight(m) * r.powi(m as i32))
            .sum();
        by_n += sign(j) * mom[j] * inner;
    }
    if (by_m - by_n).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "series orders disagree: {by_m} vs {by_n} (r = {r}, {big_m} terms)"
        )));
    }
    Ok(c.powi(n as i32) * by_m)
}

/// `E[|T|^{2n}]` when only the right half-space is offset.
pub fn moments_nonmatched_right(n: usize, p: &NonMatched) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let (k, k1) = wavenumbers(p.omega, p.ks, p.offset)?;
    let xi = interface_xi(k, k1);
    let pre = (k.sin() / k1.sin()).powi(n as i32);
    Ok(pre * kernel_integral(n, p.gamma_l, xi, |s| legendre_conical_cosh(s, xi)))
}

/// Deterministic transmittance through an interface pair without disorder,
/// `2 sin^2 q / (1 - cos(k + q))` with `q` the offset half-space wavenumber
/// on the left, or `2 sin^2 k / (1 - cos(k + q))` on the right.
pub fn transmittance_unperturbed(omega: f64, ks: f64, offset: f64, left: bool) -> Result<f64> {
    let (k, q) = wavenumbers(omega, ks, offset)?;
    let num = if left { q.sin() } else { k.sin() };
    Ok(2.0 * num * num / (1.0 - (k + q).cos()))
}

// density in the variable xi, tau = sech^2(xi / 2):
//   q(xi) = e^{-g/4} sinh(xi) int_0^inf s tanh(pi s) P_s(cosh xi) P_s(cosh xi0) e^{-g s^2} ds
//
// The s-integrand is even and analytic in |Im s| < 1/2, so the trapezoid
// rule converges geometrically; the step keeps the error near e^{-37}.
fn density_xi(xi: f64, xi0: f64, g: f64) -> f64 {
    let smax = (36.0 / g).sqrt() + 1.0;
    let h = (2.5 / (0.4 * (xi + xi0) + 37.0)).min(0.05);
    let count = (smax / h).ceil() as usize + 1;
    let pa = legendre_conical_cosh_grid(h, count, xi);
    let pb = legendre_conical_cosh_grid(h, count, xi0);
    let mut sum = 0.0;
    for j in 1..count {
        let s = j as f64 * h;
        sum += s * (PI * s).tanh() * pa[j] * pb[j] * (-g * s * s).exp();
    }
    (-g / 4.0).exp() * xi.sinh() * sum * h
}

fn tau_to_xi(tau: f64) -> f64 {
    // 2/tau - 1 = cosh xi
    let e = 2.0 / tau - 2.0;
    (e + (e * (e + 2.0)).sqrt()).ln_1p()
}

/// Probability density of `|T|^2` at `tau` for a section started from transmittance `tau0`.
pub fn density(tau: f64, tau0: f64, gamma_l: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(invalid("tau", format!("must lie in (0, 1], got {tau}")));
    }
    if !(tau0 > 0.0 && tau0 <= 1.0) {
        return Err(invalid("tau0", format!("must lie in (0, 1], got {tau0}")));
    }
    if !(gamma_l > 0.0) {
        return Err(invalid(
            "gamma_l",
            "the density is a point mass at gamma_l = 0",
        ));
    }
    let xi = tau_to_xi(tau);
    if xi == 0.0 {
        // q(xi) / sinh(xi) at xi -> 0 with dtau = -(tau^2 / 2) sinh(xi) dxi
        let eps = 1e-6;
        return Ok(2.0 * density_xi(eps, tau_to_xi(tau0), gamma_l) / eps.sinh());
    }
    let q = density_xi(xi, tau_to_xi(tau0), gamma_l);
    Ok(2.0 * q / (tau * tau * xi.sinh()))
}

/// `(int p(tau) dtau, int tau p(tau) dtau)` by quadrature in `xi`.
pub fn density_mass_and_mean(tau0: f64, gamma_l: f64) -> Result<(f64, f64)> {
    if !(gamma_l > 0.0) {
        return Err(invalid("gamma_l", "must be positive"));
    }
    let xi0 = tau_to_xi(tau0);
    let xmax = xi0 + (4.0 * gamma_l * 34.0).sqrt() + 4.0;
    let panels = (2.0 * xmax).ceil() as usize;
    let rule = gl20();
    let mut mass = 0.0;
    let mut mean = 0.0;
    let h = xmax / panels as f64;
    for p in 0..panels {
        let c = h * (p as f64 + 0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let xi = c + 0.5 * h * x;
            let q = 0.5 * h * w * density_xi(xi, xi0, gamma_l);
            mass += q;
            mean += q / (0.5 * xi).cosh().powi(2);
        }
    }
    Ok((mass, mean))
}
