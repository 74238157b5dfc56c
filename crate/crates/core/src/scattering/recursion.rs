//! Backward transfer recursion for the amplitudes `(alpha_x, beta_x)`.

use num_complex::Complex64;

use super::{flux_deficit, HalfSpace, HarmonicSetup, ScatteringResult};
use crate::error::{invalid, Error, Result};

const RESCALE: f64 = 1e100;

/// Amplitudes produced by one backward sweep.
#[derive(Debug, Clone)]
pub struct TransferAmplitudes {
    /// `(alpha~_x, beta~_x)` for `x = 0..=L`, each scaled by `exp(-log_scale[x])`.
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub log_scale: Vec<f64>,
}

impl TransferAmplitudes {
    /// `|alpha~_x|^2 - |beta~_x|^2` with the scale restored.
    pub fn invariant(&self, x: usize) -> f64 {
        (self.alpha[x].norm_sqr() - self.beta[x].norm_sqr()) * (2.0 * self.log_scale[x]).exp()
    }
}

/// Runs the recursion from the terminal data at `x = L` down to `x = 0`.
///
/// ```text
/// alpha_{x-1} = alpha_x - i eps Delta_x (alpha_x + beta_x e^{-2ikx})
/// beta_{x-1}  = beta_x  + i eps Delta_x (alpha_x e^{2ikx} + beta_x)
/// ```
/// with `eps = omega^2 / (2 sin k)`.
pub fn transfer_amplitudes(
    omega: f64,
    k: f64,
    deltas: &[f64],
    alpha_l: Complex64,
    beta_l: Complex64,
) -> TransferAmplitudes {
    let l = deltas.len();
    let eps = omega * omega / (2.0 * k.sin());
    let mut alpha = vec![Complex64::new(0.0, 0.0); l + 1];
    let mut beta = alpha.clone();
    let mut log_scale = vec![0.0; l + 1];
    let (mut a, mut b, mut s) = (alpha_l, beta_l, 0.0);
    alpha[l] = a;
    beta[l] = b;
    let i = Complex64::i();
    for x in (1..=l).rev() {
        let d = deltas[x - 1];
        if d != 0.0 {
            let e = Complex64::cis(2.0 * k * x as f64);
            let c = i * (eps * d);
            let na = a - c * (a + b * e.conj());
            let nb = b + c * (a * e + b);
            a = na;
            b = nb;
        }
        if a.norm() > RESCALE {
            a /= RESCALE;
            b /= RESCALE;
            s += RESCALE.ln();
        }
        alpha[x - 1] = a;
        beta[x - 1] = b;
        log_scale[x - 1] = s;
    }
    TransferAmplitudes {
        alpha,
        beta,
        log_scale,
    }
}

// Terminal data for a right half-space with multiplier lambda per site:
//   alpha_L = e^{-ikL} lambda^L (lambda - e^{-ik}) / (2i sin k)
//   beta_L  = -e^{ikL} lambda^L (lambda - e^{ik}) / (2i sin k)
// The common factor lambda^L is omitted here.
fn terminal(k: f64, l: usize, lambda: Complex64) -> (Complex64, Complex64) {
    let den = Complex64::new(0.0, 2.0 * k.sin());
    let lf = l as f64;
    let a = Complex64::cis(-k * lf) * (lambda - Complex64::cis(-k)) / den;
    let b = -Complex64::cis(k * lf) * (lambda - Complex64::cis(k)) / den;
    (a, b)
}

// Interior field u_x = T (alpha~_x e^{ikx} + beta~_x e^{-ikx}), x = 1..=L, given
// T scaled as 1 / alpha~_0.
fn interior(k: f64, amp: &TransferAmplitudes, t_over_alpha0: Complex64) -> Vec<Complex64> {
    let l = amp.alpha.len() - 1;
    (1..=l)
        .map(|x| {
            let e = Complex64::cis(k * x as f64);
            let w = (amp.log_scale[x] - amp.log_scale[0]).exp();
            t_over_alpha0 * (amp.alpha[x] * e + amp.beta[x] * e.conj()) * w
        })
        .collect()
}

/// Matched medium: terminal data `(1, 0)`, `T = 1/alpha~_0`, `R = beta~_0/alpha~_0`.
pub fn solve_matched_recursion(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    if !setup.is_matched() {
        return Err(invalid(
            "profile",
            "the matched solver needs zero half-space offsets",
        ));
    }
    let one = Complex64::new(1.0, 0.0);
    let amp = transfer_amplitudes(
        setup.omega,
        setup.k,
        &setup.profile.deltas,
        one,
        Complex64::new(0.0, 0.0),
    );
    let a0 = amp.alpha[0];
    let t_scaled = one / a0;
    let t = t_scaled * (-amp.log_scale[0]).exp();
    let r = amp.beta[0] / a0;
    let interior = interior(setup.k, &amp, t_scaled);
    let flux_deficit = (r.norm_sqr() + t.norm_sqr() - 1.0).abs();
    Ok(ScatteringResult {
        t,
        r,
        interior,
        flux_deficit,
        right: setup.right,
    })
}

// Shared non-matched path; `lambda` is the per-site factor of the right half-space.
fn solve_with_right(setup: &HarmonicSetup, lambda: Complex64) -> Result<ScatteringResult> {
    let k = setup.k;
    let k0 = setup.k0();
    let l = setup.profile.len();
    let (al, bl) = terminal(k, l, lambda);
    let amp = transfer_amplitudes(setup.omega, k, &setup.profile.deltas, al, bl);
    let rt = amp.beta[0] / amp.alpha[0];
    let a = Complex64::cis(k0) - Complex64::cis(-k);
    let b = Complex64::cis(k0) - Complex64::cis(k);
    let den = Complex64::new(1.0, 0.0) + b.conj() / a.conj() * rt;
    if den.norm() < 1e-300 {
        return Err(Error::Singular {
            pivot_ratio: den.norm(),
        });
    }
    let r = -(a / a.conj()) * (b / a + rt) / den;
    let pre = -Complex64::new(0.0, 2.0 * k0.sin()) / a.conj() / den;
    let t_scaled = pre / amp.alpha[0];
    // lambda^L was left out of the terminal data: T picks up lambda^{-L},
    // the interior field does not depend on it.
    let lf = l as f64;
    let t = t_scaled
        * Complex64::from_polar(
            (-amp.log_scale[0] - lf * lambda.norm().ln()).exp(),
            -lf * lambda.arg(),
        );
    let interior = interior(k, &amp, t_scaled);
    let mut res = ScatteringResult {
        t,
        r,
        interior,
        flux_deficit: 0.0,
        right: setup.right,
    };
    res.flux_deficit = flux_deficit(setup, res.t, res.r);
    Ok(res)
}

/// General half-space offsets, propagating right half-space.
///
/// When exactly one offset vanishes the Green's-function route is evaluated
/// as well and the two transmission coefficients must agree to `1e-10`.
pub fn solve_nonmatched(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    let k1 = match setup.right {
        HalfSpace::Propagating { k } => k,
        HalfSpace::Evanescent { .. } => {
            return Err(invalid(
                "right_offset",
                "right half-space is evanescent; use reflect_evanescent",
            ))
        }
    };
    let res = solve_with_right(setup, Complex64::cis(k1))?;
    let (d0, d1) = (setup.profile.left_offset, setup.profile.right_offset);
    if (d0 == 0.0) != (d1 == 0.0) {
        let g = super::solve_nonmatched_green(setup)?;
        let scale = res.t.norm().max(1.0);
        if (g.t - res.t).norm() > 1e-10 * scale {
            return Err(Error::Domain(format!(
                "recursion and Green's-function transmission disagree: {} vs {}",
                res.t, g.t
            )));
        }
    }
    Ok(res)
}

/// Right half-space out of band: total reflection, `|R| = 1`.
pub fn reflect_evanescent(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    match setup.right {
        HalfSpace::Evanescent { lambda } => solve_with_right(setup, Complex64::new(lambda, 0.0)),
        HalfSpace::Propagating { .. } => {
            Err(invalid("right_offset", "right half-space is propagative"))
        }
    }
}
