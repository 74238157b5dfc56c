//! Leading-order field asymptotics: stationary-phase bulk, Airy front, and
//! their disorder-averaged counterparts.
//!
//! Sites are counted from the source, so `x` is the offset `x - x0 >= 1` and
//! the time is `alpha x` (bulk) or `alpha_s x + beta x^{1/3}` (front).

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{front_params, stationary_frequencies, wavenumber};
use crate::specfun::airy_ai;
use crate::stats::{gamma_front, gamma_iid};

/// Width of the excluded band around the caustic `alpha = alpha_s`.
pub const CAUSTIC_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Time `alpha x`.
    Bulk { alpha: f64 },
    /// Time `alpha_s x + beta x^{1/3}`.
    Front { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldQuery {
    pub x: i64,
    pub mode: Mode,
    pub ks: f64,
}

impl FieldQuery {
    pub fn bulk(x: i64, alpha: f64, ks: f64) -> Self {
        FieldQuery {
            x,
            mode: Mode::Bulk { alpha },
            ks,
        }
    }

    pub fn front(x: i64, beta: f64, ks: f64) -> Self {
        FieldQuery {
            x,
            mode: Mode::Front { beta },
            ks,
        }
    }

    /// Physical time of the query.
    pub fn time(&self) -> f64 {
        let x = self.x as f64;
        match self.mode {
            Mode::Bulk { alpha } => alpha * x,
            Mode::Front { beta } => front_params(self.ks).alpha_s * x + beta * x.cbrt(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.x < 1 {
            return Err(invalid("x", format!("must be at least 1, got {}", self.x)));
        }
        if !(self.ks >= 0.0 && self.ks.is_finite()) {
            return Err(invalid(
                "ks",
                format!("must be finite and >= 0, got {}", self.ks),
            ));
        }
        Ok(())
    }

    fn alpha(&self) -> Result<f64> {
        match self.mode {
            Mode::Bulk { alpha } => Ok(alpha),
            Mode::Front { .. } => Err(invalid(
                "mode",
                "a bulk formula was asked for a front query",
            )),
        }
    }
}

/// One stationary-phase contribution `amplitude * cos(phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Branch {
    pub fn value(&self) -> f64 {
        self.amplitude * self.phase.cos()
    }
}

/// Stationary-phase branches of the free field at `t = alpha x`.
///
/// `Ks = 0`: a single branch with amplitude `1/(sqrt(pi x) (alpha^2-1)^{1/4})`
/// and phase `pi/4 + 2(acos(1/alpha) - sqrt(alpha^2-1)) x`. `Ks > 0`: the two
/// roots `omega_alpha^{+-}` with amplitude
/// `sqrt 2 omega^{3/2} / sqrt(pi alpha |omega^4 - omega_s^4| x)` and phase
/// `+-pi/4 + (k(omega) - omega alpha) x`.
pub fn bulk_branches(q: &FieldQuery) -> Result<Vec<Branch>> {
    q.check()?;
    let alpha = q.alpha()?;
    let fp = front_params(q.ks);
    if (alpha - fp.alpha_s).abs() < CAUSTIC_GUARD {
        return Err(Error::NearCaustic {
            alpha,
            alpha_s: fp.alpha_s,
        });
    }
    let pair = stationary_frequencies(alpha, q.ks)?;
    let x = q.x as f64;
    if q.ks == 0.0 {
        let s = (alpha * alpha - 1.0).sqrt();
        return Ok(vec![Branch {
            omega: pair.plus,
            amplitude: 1.0 / ((PI * x).sqrt() * s.sqrt()),
            phase: FRAC_PI_4 + 2.0 * ((1.0 / alpha).acos() - s) * x,
        }]);
    }
    let ws4 = fp.omega_s.powi(4);
    let branch = |w: f64, sign: f64| Branch {
        omega: w,
        amplitude: 2f64.sqrt() * w.powf(1.5) / (PI * alpha * (w.powi(4) - ws4).abs() * x).sqrt(),
        phase: sign * FRAC_PI_4 + (wavenumber(w, q.ks) - w * alpha) * x,
    };
    let mut out = vec![branch(pair.plus, 1.0)];
    if let Some(m) = pair.minus {
        out.push(branch(m, -1.0));
    }
    Ok(out)
}

/// Free field at `t = alpha x`.
///
/// `alpha < alpha_s` gives [`Error::NoStationaryPoint`]: the field there is
/// below `1/sqrt(x)` and has no leading-order value. Within
/// [`CAUSTIC_GUARD`] of `alpha_s` the prefactor diverges and
/// [`Error::NearCaustic`] points to [`unperturbed_front`].
pub fn unperturbed_bulk(q: &FieldQuery) -> Result<f64> {
    Ok(bulk_branches(q)?.iter().map(Branch::value).sum())
}

/// Free field at `t = alpha_s x + beta x^{1/3}`.
///
/// `x^{-1/3} Ai(-2 beta)` for `Ks = 0`;
/// `2^{1/3} x^{-1/3} Ai(-2^{1/3} beta / alpha_s) cos((k(omega_s) - omega_s alpha_s) x - omega_s beta x^{1/3})`
/// for `Ks > 0`.
pub fn unperturbed_front(x: i64, beta: f64, ks: f64) -> Result<f64> {
    FieldQuery::front(x, beta, ks).check()?;
    let xf = x as f64;
    let c = xf.cbrt();
    if ks == 0.0 {
        return Ok(airy_ai(-2.0 * beta) / c);
    }
    let fp = front_params(ks);
    let r2 = 2f64.cbrt();
    let phase = (wavenumber(fp.omega_s, ks) - fp.omega_s * fp.alpha_s) * xf - fp.omega_s * beta * c;
    Ok(r2 / c * airy_ai(-r2 * beta / fp.alpha_s) * phase.cos())
}

fn check_disorder(x: i64, sigma: f64, length: usize) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid(
            "sigma",
            format!("must be finite and >= 0, got {sigma}"),
        ));
    }
    if x <= length as i64 {
        return Err(invalid(
            "x",
            format!("must lie beyond the section (x > L = {length}), got {x}"),
        ));
    }
    Ok(())
}

/// Mean field at `t = alpha x` behind a section of `length` i.i.d. masses:
/// every branch is damped by `exp(-gamma(omega_branch) L)`.
pub fn mean_bulk(q: &FieldQuery, sigma: f64, length: usize) -> Result<f64> {
    check_disorder(q.x, sigma, length)?;
    let mut sum = 0.0;
    for b in bulk_branches(q)? {
        let g = gamma_iid(b.omega, sigma, q.ks)?;
        sum += b.value() * (-g * length as f64).exp();
    }
    Ok(sum)
}

/// Mean front. Unchanged by disorder for `Ks = 0`; damped by
/// `exp(-gamma(omega_s) L)` for `Ks > 0`.
pub fn mean_front(x: i64, beta: f64, sigma: f64, length: usize, ks: f64) -> Result<f64> {
    check_disorder(x, sigma, length)?;
    let free = unperturbed_front(x, beta, ks)?;
    if ks == 0.0 {
        return Ok(free);
    }
    Ok(free * (-gamma_front(sigma, ks) * length as f64).exp())
}

/// One realization of the transmitted bulk field (`Ks = 0`):
/// amplitude damped by `exp(-gamma L / 2)` and phase shifted by
/// `sqrt(gamma) w`, where `w` is a sample of `N(0, L)`.
pub fn sample_transmitted_bulk(q: &FieldQuery, sigma: f64, length: usize, w: f64) -> Result<f64> {
    check_disorder(q.x, sigma, length)?;
    if q.ks != 0.0 {
        return Err(invalid(
            "ks",
            "the transmitted-field sample is available for Ks = 0 only",
        ));
    }
    let b = bulk_branches(q)?[0];
    let g = gamma_iid(b.omega, sigma, q.ks)?;
    Ok(b.amplitude * (b.phase + g.sqrt() * w).cos() * (-0.5 * g * length as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    #[test]
    fn bulk_tracks_bessel() {
        // relative to the envelope, since the cosine has zeros
        let alpha = 2.0;
        for x in 1995..2005 {
            let q = FieldQuery::bulk(x, alpha, 0.0);
            let env = bulk_branches(&q).unwrap()[0].amplitude;
            let exact = bessel_j(2 * x, 2.0 * alpha * x as f64);
            let err = (unperturbed_bulk(&q).unwrap() - exact).abs() / env;
            assert!(err < 0.02, "x={x} err={err}");
        }
    }

    #[test]
    fn front_tracks_bessel() {
        let x = 20_000i64;
        let xf = x as f64;
        for i in 0..=12 {
            let beta = -1.0 + 0.25 * i as f64;
            let t = xf + beta * xf.cbrt();
            let exact = bessel_j(2 * x, 2.0 * t);
            let scale = 0.54 / xf.cbrt(); // max |Ai| x^{-1/3}
            let err = (unperturbed_front(x, beta, 0.0).unwrap() - exact).abs() / scale;
            assert!(err < 0.05, "beta={beta} err={err}");
        }
    }

    #[test]
    fn front_at_zero_and_ahead() {
        let x = 1000;
        let ai0 = 0.355_028_053_887_817_2;
        assert!((unperturbed_front(x, 0.0, 0.0).unwrap() - ai0 / 10.0).abs() < 1e-15);
        assert!(unperturbed_front(x, -3.0, 0.0).unwrap().abs() <= 1e-3 / 10.0);
    }

    #[test]
    fn prefactor_decreases_with_alpha() {
        let amp = |a: f64| bulk_branches(&FieldQuery::bulk(100, a, 0.0)).unwrap()[0].amplitude;
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let a = 1.01 + 0.2 * i as f64;
            assert!(amp(a) < prev);
            prev = amp(a);
        }
    }

    #[test]
    fn errors_and_guards() {
        assert!(matches!(
            unperturbed_bulk(&FieldQuery::bulk(10, 0.5, 0.0)),
            Err(Error::NoStationaryPoint { .. })
        ));
        let a_s = front_params(1.1).alpha_s;
        assert!(matches!(
            unperturbed_bulk(&FieldQuery::bulk(10, a_s + 5e-4, 1.1)),
            Err(Error::NearCaustic { .. })
        ));
        assert!(matches!(
            unperturbed_bulk(&FieldQuery::bulk(10, a_s - 0.1, 1.1)),
            Err(Error::NoStationaryPoint { .. })
        ));
        assert!(unperturbed_bulk(&FieldQuery::bulk(10, a_s + 2e-3, 1.1)).is_ok());
        assert!(unperturbed_bulk(&FieldQuery::bulk(0, 2.0, 0.0)).is_err());
        assert!(mean_bulk(&FieldQuery::bulk(10, 2.0, 0.0), 0.1, 10).is_err());
        assert!(unperturbed_bulk(&FieldQuery::front(10, 0.0, 0.0)).is_err());
    }

    #[test]
    fn zero_disorder_is_bitwise_free() {
        for ks in [0.0, 0.3, 1.1] {
            let a = front_params(ks).alpha_s + 0.7;
            let q = FieldQuery::bulk(300, a, ks);
            assert_eq!(
                mean_bulk(&q, 0.0, 16).unwrap(),
                unperturbed_bulk(&q).unwrap()
            );
            assert_eq!(
                mean_front(300, 0.4, 0.0, 16, ks).unwrap(),
                unperturbed_front(300, 0.4, ks).unwrap()
            );
        }
        let q = FieldQuery::bulk(300, 1.7, 0.0);
        assert_eq!(
            sample_transmitted_bulk(&q, 0.0, 16, 0.0).unwrap(),
            unperturbed_bulk(&q).unwrap()
        );
    }

    #[test]
    fn damping_exponents() {
        let (sigma, l) = (0.15, 16usize);
        let alpha = 1.8;
        let q = FieldQuery::bulk(400, alpha, 0.0);
        let ratio = mean_bulk(&q, sigma, l).unwrap() / unperturbed_bulk(&q).unwrap();
        let want = (-sigma * sigma * (alpha * alpha - 1.0) * l as f64).exp();
        assert!((ratio - want).abs() < 1e-13);
        // Ks = 0 front ignores sigma
        assert_eq!(
            mean_front(400, 0.3, 0.5, l, 0.0).unwrap(),
            unperturbed_front(400, 0.3, 0.0).unwrap()
        );
    }

    #[test]
    fn gamma_single_source() {
        // gamma(omega_alpha^{+-}) = sigma^2 alpha^2 omega^2 / 4 and gamma(omega_s) closed form
        let sigma = 0.2;
        for ks in [0.0, 0.5, 1.1, 3.0] {
            let fp = front_params(ks);
            for da in [0.01, 0.3, 2.0] {
                let alpha = fp.alpha_s + da;
                for b in bulk_branches(&FieldQuery::bulk(50, alpha, ks)).unwrap() {
                    let g = gamma_iid(b.omega, sigma, ks).unwrap();
                    let want = sigma * sigma * alpha * alpha * b.omega * b.omega / 4.0;
                    assert!(
                        (g - want).abs() <= 1e-12 * want.max(1.0),
                        "ks={ks} alpha={alpha}"
                    );
                }
            }
            if ks > 0.0 {
                let g = gamma_iid(fp.omega_s, sigma, ks).unwrap();
                let want = sigma * sigma * fp.alpha_s * fp.alpha_s * fp.omega_s * fp.omega_s / 4.0;
                assert!((g - gamma_front(sigma, ks)).abs() < 1e-12);
                assert!((g - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn front_attenuation_vanishes_as_ks_to_zero() {
        let mut prev = f64::INFINITY;
        for ks in [1.0, 1e-1, 1e-2, 1e-4, 1e-6] {
            let g = gamma_front(0.15, ks);
            assert!(g < prev);
            prev = g;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn mean_bulk_decreases_with_length() {
        let q = FieldQuery::bulk(500, 2.2, 0.0);
        let mut prev = f64::INFINITY;
        for l in 1..100 {
            let v = mean_bulk(&q, 0.1, l).unwrap().abs();
            assert!(v < prev);
            prev = v;
        }
    }

    // Gauss–Hermite nodes and weights for int e^{-y^2} f(y) dy.
    fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let pim4 = PI.powf(-0.25);
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => {
                    (2.0 * n as f64 + 1.0).sqrt()
                        - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2
                        - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        (x, w)
    }

    #[test]
    fn phase_average_gives_mean_field() {
        let (y, wt) = gauss_hermite(80);
        assert!((wt.iter().sum::<f64>() - PI.sqrt()).abs() < 1e-12);
        let (sigma, l) = (0.15, 16usize);
        for alpha in [1.3, 2.0, 3.5] {
            let q = FieldQuery::bulk(200, alpha, 0.0);
            // w = sqrt(2 L) y for w ~ N(0, L)
            let s = (2.0 * l as f64).sqrt();
            let avg: f64 = y
                .iter()
                .zip(&wt)
                .map(|(yi, wi)| wi * sample_transmitted_bulk(&q, sigma, l, s * yi).unwrap())
                .sum::<f64>()
                / PI.sqrt();
            let want = mean_bulk(&q, sigma, l).unwrap();
            assert!((avg - want).abs() < 1e-12, "alpha={alpha}: {avg} vs {want}");
        }
    }

    #[test]
    fn fixed_w_is_phase_shift_only() {
        let q = FieldQuery::bulk(300, 1.6, 0.0);
        let env = bulk_branches(&q).unwrap()[0].amplitude
            * (-0.5 * gamma_iid(bulk_branches(&q).unwrap()[0].omega, 0.1, 0.0).unwrap() * 10.0)
                .exp();
        for w in [-3.0, 0.7, 5.0] {
            assert!(sample_transmitted_bulk(&q, 0.1, 10, w).unwrap().abs() <= env * (1.0 + 1e-15));
        }
    }

    #[test]
    fn front_and_bulk_match_in_overlap() {
        // Ks = 0, 1 << beta << x^{2/3}: alpha = 1 + beta x^{-2/3} close to 1
        let x = 100_000i64;
        let xf = x as f64;
        for beta in [3.5, 4.0, 5.0] {
            let alpha = 1.0 + beta / xf.powf(2.0 / 3.0);
            let q = FieldQuery::bulk(x, alpha, 0.0);
            let env = bulk_branches(&q).unwrap()[0].amplitude;
            let a = unperturbed_bulk(&q).unwrap();
            let b = unperturbed_front(x, beta, 0.0).unwrap();
            assert!((a - b).abs() < 0.05 * env, "beta={beta}: {a} vs {b}");
        }
    }
}
