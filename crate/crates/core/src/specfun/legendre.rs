//! Conical Legendre functions `P_{-1/2+is}` and the moment polynomials.

use std::f64::consts::PI;

use crate::quadrature::gl20;

/// `P_{-1/2+is}(eta)` for `eta >= 1`.
pub fn legendre_conical(s: f64, eta: f64) -> f64 {
    if eta <= 1.0 {
        return 1.0;
    }
    // acosh loses digits near 1; write eta - 1 explicitly.
    let e = eta - 1.0;
    let xi = (e + (e * (e + 2.0)).sqrt()).ln_1p();
    legendre_conical_cosh(s, xi)
}

/// `P_{-1/2+is}(cosh xi)` from the Mehler–Dirichlet integral
///
/// `(2/pi) int_0^xi cos(s t) / sqrt(2 (cosh xi - cosh t)) dt`,
///
/// with `t = xi sin(theta)` to remove the endpoint singularity.
pub fn legendre_conical_cosh(s: f64, xi: f64) -> f64 {
    if xi <= 0.0 {
        return 1.0;
    }
    let f = |th: f64| {
        let (sn, cs) = th.sin_cos();
        let t = xi * sn;
        let gap = xi * cs * cs / (1.0 + sn);
        let den = (4.0 * (0.5 * (xi + t)).sinh() * (0.5 * gap).sinh()).sqrt();
        if den == 0.0 {
            return (s * t).cos();
        }
        (s * t).cos() * xi * cs / den
    };
    let panels = 4 + (s * xi / 4.0).ceil() as usize + xi.ceil() as usize;
    2.0 / PI * gl20().composite(f, 0.0, 0.5 * PI, panels)
}

/// `P_{-1/2+is}(cosh xi)` for many `s` at once, sharing the angular nodes.
pub fn legendre_conical_cosh_many(s: &[f64], xi: f64) -> Vec<f64> {
    if xi <= 0.0 {
        return vec![1.0; s.len()];
    }
    let smax = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let panels = 4 + (smax * xi / 4.0).ceil() as usize + xi.ceil() as usize;
    let rule = gl20();
    let h = 0.5 * PI / panels as f64;
    let mut ts = Vec::with_capacity(panels * rule.nodes.len());
    let mut ws = Vec::with_capacity(ts.capacity());
    for p in 0..panels {
        let c = h * (p as f64 + 0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let th = c + 0.5 * h * x;
            let (sn, cs) = th.sin_cos();
            let t = xi * sn;
            let gap = xi * cs * cs / (1.0 + sn);
            let den = (4.0 * (0.5 * (xi + t)).sinh() * (0.5 * gap).sinh()).sqrt();
            let g = if den == 0.0 { 1.0 } else { xi * cs / den };
            ts.push(t);
            ws.push(0.5 * h * w * g);
        }
    }
    s.iter()
        .map(|&sv| {
            2.0 / PI
                * ts.iter()
                    .zip(&ws)
                    .map(|(t, w)| w * (sv * t).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// `P_{-1/2+is}(cosh xi)` on the uniform grid `s = j h`, `j = 0..count`.
///
/// The cosines are advanced by the Chebyshev recurrence, so the cost per
/// grid point is one multiply-add per angular node.
pub fn legendre_conical_cosh_grid(h: f64, count: usize, xi: f64) -> Vec<f64> {
    if xi <= 0.0 {
        return vec![1.0; count];
    }
    let smax = h * count as f64;
    let panels = 4 + (smax * xi / 4.0).ceil() as usize + xi.ceil() as usize;
    let rule = gl20();
    let dh = 0.5 * PI / panels as f64;
    let mut out = vec![0.0; count];
    for p in 0..panels {
        let c = dh * (p as f64 + 0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let th = c + 0.5 * dh * x;
            let (sn, cs) = th.sin_cos();
            let t = xi * sn;
            let gap = xi * cs * cs / (1.0 + sn);
            let den = (4.0 * (0.5 * (xi + t)).sinh() * (0.5 * gap).sinh()).sqrt();
            let g = if den == 0.0 { 1.0 } else { xi * cs / den };
            let wt = 0.5 * dh * w * g * 2.0 / PI;
            let step = h * t;
            let two_c = 2.0 * step.cos();
            let mut prev = step.cos(); // cos(-step)
            let mut cur = 1.0;
            for v in out.iter_mut() {
                *v += wt * cur;
                let next = two_c * cur - prev;
                prev = cur;
                cur = next;
            }
        }
    }
    out
}

/// `ln phi_n(s)` with `phi_n(s) = prod_{j=1}^{n-1} (s^2 + (j - 1/2)^2) / j^2`.
pub fn ln_phi_n(n: usize, s: f64) -> f64 {
    let s2 = s * s;
    (1..n)
        .map(|j| {
            let h = j as f64 - 0.5;
            (s2 + h * h).ln() - 2.0 * (j as f64).ln()
        })
        .sum()
}

pub fn phi_n(n: usize, s: f64) -> f64 {
    assert!(n >= 1, "phi_n is defined for n >= 1");
    if n <= 30 {
        let s2 = s * s;
        (1..n)
            .map(|j| {
                let h = j as f64 - 0.5;
                (s2 + h * h) / (j * j) as f64
            })
            .product()
    } else {
        ln_phi_n(n, s).exp()
    }
}
