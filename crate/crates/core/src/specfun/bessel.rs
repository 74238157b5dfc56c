//! Integer-order Bessel functions of the first kind.

use statrs::function::gamma::ln_gamma;

/// `J_n(x)` for integer order.
///
/// Ascending series for `|x| <= 12`, Miller's backward recurrence with the
/// `J_0 + 2 sum J_2m = 1` normalization otherwise.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let sign_n = if n < 0 && n % 2 != 0 { -1.0 } else { 1.0 };
    let n = n.unsigned_abs();
    let sign_x = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let v = if ax <= 12.0 {
        series(n, ax)
    } else {
        miller(n, ax)
    };
    sign_n * sign_x * v
}

fn series(n: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let h = 0.5 * x;
    let lead = n as f64 * h.ln() - ln_gamma(n as f64 + 1.0);
    if lead < -745.0 {
        return 0.0;
    }
    let mut term = lead.exp();
    let mut sum = term;
    let q = -h * h;
    let mut m = 1u64;
    loop {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && m > 2 {
            break;
        }
        m += 1;
        if m > 500 {
            break;
        }
    }
    sum
}

fn miller(n: u64, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let start = (top + 15.0 * top.cbrt() + 30.0).ceil() as u64;
    let start = start + (start % 2);
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut norm = 0.0_f64;
    let mut want = 0.0_f64;
    // j holds the unnormalized J_k at the top of each iteration.
    let mut k = start;
    loop {
        if k == n {
            want = j;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let jm1 = k as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        k -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    want / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // mpmath.besselj at 40 digits; the last entry from scipy.special.jv
    const REFERENCE: &[(i64, f64, f64)] = &[
        (0, 1.0, 0.76519768655796655),
        (1, 2.5, 0.49709410246427404),
        (2, 1.0, 0.11490348493190048),
        (5, 11.9, -0.094538171508384697),
        (0, 20.0, 0.16702466434058315),
        (3, 30.0, 0.12921122875972498),
        (40, 30.0, 0.00036120236088965853),
        (100, 50.0, 1.1159273690838093e-21),
        (100, 120.0, 0.075737179130010701),
        (800, 1000.0, -0.02987223375566259),
        (4000, 4000.0, 0.028178589480088136),
    ];

    #[test]
    fn matches_reference_values() {
        for &(n, x, want) in REFERENCE {
            let got = bessel_j(n, x);
            let err = (got - want).abs();
            let tol = if x <= 100.0 {
                1e-10_f64.max(1e-8 * want.abs())
            } else {
                1e-8 * want.abs()
            };
            assert!(err <= tol, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn ascending_series_oracle() {
        // 40 explicit terms of the Maclaurin series for J_2(1).
        let mut s = 0.0;
        let mut fact_m = 1.0;
        let mut fact_m2 = 2.0;
        for m in 0..40 {
            if m > 0 {
                fact_m *= m as f64;
                fact_m2 *= (m + 2) as f64;
            }
            s += (-1f64).powi(m) * 0.5f64.powi(2 * m + 2) / (fact_m * fact_m2);
        }
        assert!((bessel_j(2, 1.0) - s).abs() < 1e-12);
    }

    #[test]
    fn trivial_values_and_parity() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        for n in 0..8 {
            for &x in &[0.7, 5.0, 13.0, 44.0] {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((bessel_j(-n, x) - s * bessel_j(n, x)).abs() < 1e-15);
                assert!((bessel_j(n, -x) - s * bessel_j(n, x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn squared_sum_identity() {
        for &x in &[0.3, 4.0, 11.0, 15.0, 80.0, 600.0] {
            let mut s = bessel_j(0, x).powi(2);
            let mut m = 1;
            loop {
                let j = bessel_j(m, x);
                s += 2.0 * j * j;
                if m as f64 > x + 40.0 + 10.0 * x.cbrt() {
                    break;
                }
                m += 1;
            }
            assert!((s - 1.0).abs() < 1e-9, "x={x}: {s}");
        }
    }

    proptest! {
        #[test]
        fn three_term_recurrence(n in 1i64..300, x in 0.05..400.0f64) {
            let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
            let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
            prop_assert!((lhs - rhs).abs() < 1e-9, "n={} x={} lhs={} rhs={}", n, x, lhs, rhs);
        }
    }
}
