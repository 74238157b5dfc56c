//! Dense Green's-function (Lippmann–Schwinger) solves on the section.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{flux_deficit, HalfSpace, HarmonicSetup, ScatteringResult};
use crate::error::{invalid, Error, Result};

const PIVOT_FLOOR: f64 = 1e-14;

pub(super) fn lu_solve(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Result<DVector<Complex64>> {
    let lu = a.lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for d in u.diagonal().iter() {
        lo = lo.min(d.norm());
        hi = hi.max(d.norm());
    }
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(ratio >= PIVOT_FLOOR) {
        return Err(Error::Singular { pivot_ratio: ratio });
    }
    lu.solve(&b).ok_or(Error::Singular { pivot_ratio: ratio })
}

/// Matched medium via the free kernel `G(p, q) = z^{|p-q|} / (2i sin k)`, `z = e^{ik}`.
///
/// Solves `(I - G D) u = z^x` with `D = -omega^2 diag(Delta)`; then
/// `T = 1 + C sum z^{-q} D_q u_q` and `R = C sum z^q D_q u_q`.
pub fn solve_matched_toeplitz(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    if !setup.is_matched() {
        return Err(invalid(
            "profile",
            "the Toeplitz solver needs zero half-space offsets",
        ));
    }
    let (k, l) = (setup.k, setup.profile.len());
    let c = Complex64::new(0.0, 2.0 * k.sin()).inv();
    let d: Vec<f64> = setup
        .profile
        .deltas
        .iter()
        .map(|x| -setup.omega * setup.omega * x)
        .collect();
    let zp = |n: usize| Complex64::cis(k * n as f64);
    let a = DMatrix::from_fn(l, l, |p, q| {
        let g = c * zp(p.abs_diff(q));
        let id = if p == q { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - g * d[q]
    });
    let rhs = DVector::from_fn(l, |p, _| zp(p + 1));
    let u = lu_solve(a, rhs)?;
    let (mut st, mut sr) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for q in 0..l {
        let e = zp(q + 1);
        st += e.conj() * d[q] * u[q];
        sr += e * d[q] * u[q];
    }
    let t = 1.0 + c * st;
    let r = c * sr;
    let interior = u.iter().copied().collect();
    Ok(ScatteringResult {
        t,
        r,
        interior,
        flux_deficit: flux_deficit(setup, t, r),
        right: setup.right,
    })
}

/// Unperturbed step solutions on the section and their Casoratian.
struct Step {
    pl: Vec<Complex64>,
    pr: Vec<Complex64>,
    w: Complex64,
    /// incident field on the section is `c0 psi_R`, its reflection `r0`
    c0: Complex64,
    r0: Complex64,
    lambda: Complex64,
}

impl Step {
    fn new(setup: &HarmonicSetup) -> Self {
        let (k, l) = (setup.k, setup.profile.len() as i64);
        let k0 = setup.k0();
        let lambda = match setup.right {
            HalfSpace::Propagating { k } => Complex64::cis(k),
            HalfSpace::Evanescent { lambda } => Complex64::new(lambda, 0.0),
        };
        let z = |x: i64| Complex64::cis(k * x as f64);
        let two_i_sin = Complex64::new(0.0, 2.0 * k.sin());
        // psi_L = a z^x + b z^{-x} with psi_L(0) = 1, psi_L(1) = e^{-i k0}
        let al = (Complex64::cis(-k0) - z(-1)) / two_i_sin;
        let bl = 1.0 - al;
        // psi_R = c z^x + e z^{-x} with psi_R(L) = 1, psi_R(L+1) = lambda
        let ar = z(-l) * (lambda - z(-1)) / two_i_sin;
        let br = -z(l) * (lambda - z(1)) / two_i_sin;
        let psi_l = |x: i64| al * z(x) + bl * z(-x);
        let psi_r = |x: i64| ar * z(x) + br * z(-x);
        let w = psi_l(0) * psi_r(1) - psi_l(1) * psi_r(0);
        // c0 psi_R matched to e^{i k0 x} + r0 e^{-i k0 x} at x = 0, 1
        let c0 = Complex64::new(0.0, 2.0 * k0.sin()) / (psi_r(1) - Complex64::cis(-k0) * psi_r(0));
        let r0 = c0 * psi_r(0) - 1.0;
        Step {
            pl: (1..=l).map(psi_l).collect(),
            pr: (1..=l).map(psi_r).collect(),
            w,
            c0,
            r0,
            lambda,
        }
    }

    fn g(&self, p: usize, q: usize) -> Complex64 {
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        self.pl[a] * self.pr[b] / self.w
    }
}

/// Step Green's function `G(p, q)` on the section, `p, q = 1..=L` (0-based indices).
///
/// With only the left offset nonzero this is
/// `C z^{|p-q|} + C C2(k, k0) z^{p+q}`; with only the right one,
/// `C z^{|p-q|} + C C2(k, k1) z^{2L+2-p-q}`, where
/// `C2(a, b) = -(1 - e^{i(b-a)}) / (1 - e^{i(b+a)})`.
pub fn step_kernel(setup: &HarmonicSetup) -> DMatrix<Complex64> {
    let st = Step::new(setup);
    let l = setup.profile.len();
    DMatrix::from_fn(l, l, |p, q| st.g(p, q))
}

/// Arbitrary half-space offsets via the step Green's function
/// `G(p, q) = psi_L(min(p,q)) psi_R(max(p,q)) / W`.
///
/// `psi_L` is the unperturbed solution equal to `e^{-i k0 x}` for `x <= 0`,
/// `psi_R` the one equal to `lambda^{x-L}` for `x > L` (`lambda = e^{i k1}` or
/// the evanescent factor), `W` their Casoratian. The incident field on the
/// section is the step-only solution, proportional to `psi_R`.
pub fn solve_nonmatched_green(setup: &HarmonicSetup) -> Result<ScatteringResult> {
    let l = setup.profile.len();
    let st = Step::new(setup);
    let d: Vec<f64> = setup
        .profile
        .deltas
        .iter()
        .map(|x| -setup.omega * setup.omega * x)
        .collect();
    let a = DMatrix::from_fn(l, l, |p, q| {
        let id = if p == q { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - st.g(p, q) * d[q]
    });
    let rhs = DVector::from_fn(l, |p, _| st.c0 * st.pr[p]);
    let u = lu_solve(a, rhs)?;
    let (mut sl, mut sr) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for q in 0..l {
        sl += st.pl[q] * d[q] * u[q];
        sr += st.pr[q] * d[q] * u[q];
    }
    // field beyond L is (c0 + sl/W) lambda^{x-L}; report the coefficient of lambda^x
    let lf = l as f64;
    let unscale = Complex64::from_polar((-lf * st.lambda.norm().ln()).exp(), -lf * st.lambda.arg());
    let t = (st.c0 + sl / st.w) * unscale;
    let r = st.r0 + sr / st.w;
    let interior = u.iter().copied().collect();
    Ok(ScatteringResult {
        t,
        r,
        interior,
        flux_deficit: flux_deficit(setup, t, r),
        right: setup.right,
    })
}
