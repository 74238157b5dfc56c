//! Time integration of the lattice equations of motion
//!
//! `(1 + Delta_x) u_x'' = u_{x+1} - 2 u_x + u_{x-1} - Ks u_x`
//!
//! on the truncated domain `[-radius, radius]` with zero displacement outside.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeConfig, MassProfile};

/// Finitely supported initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub source_site: i64,
    /// `(site, value)` pairs; sites not listed are zero.
    pub displacements: Vec<(i64, f64)>,
    pub velocities: Vec<(i64, f64)>,
}

impl InitialCondition {
    fn support(&self) -> (i64, i64) {
        let mut lo = self.source_site;
        let mut hi = self.source_site;
        for &(x, _) in self.displacements.iter().chain(&self.velocities) {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }
}

/// Unit displacement at `x0`, at rest.
pub fn impulse(x0: i64) -> InitialCondition {
    InitialCondition {
        source_site: x0,
        displacements: vec![(x0, 1.0)],
        velocities: vec![],
    }
}

/// Which sites and time samples to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recording {
    pub first_site: i64,
    pub last_site: i64,
    /// Keep every `stride`-th step.
    pub stride: usize,
}

/// Sampled trajectories `values[i][j] = u_{first_site + j}(times[i])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub first_site: i64,
    pub last_site: i64,
    /// Step actually used; `t_max` is an integer number of steps.
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.first_site..=self.last_site
    }

    /// Time series at one site.
    pub fn site_series(&self, x: i64) -> Option<Vec<f64>> {
        if !self.sites().contains(&x) {
            return None;
        }
        let j = (x - self.first_site) as usize;
        Some(self.values.iter().map(|row| row[j]).collect())
    }

    pub fn last(&self) -> &[f64] {
        self.values.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Velocity-Verlet state on `[-radius, radius]`.
///
/// Only the sites that the initial data can have reached (cone of speed
/// `1/sqrt(min mass)` plus a margin) are updated; the rest stay exactly zero.
#[derive(Debug, Clone)]
pub struct Chain {
    radius: i64,
    ks: f64,
    inv_mass: Vec<f64>,
    mass: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    acc: Vec<f64>,
    time: f64,
    support: (i64, i64),
    speed: f64,
    prune: bool,
    target: Option<(i64, i64, f64)>,
}

/// Cone margin for pruning; the Airy tail ahead of the front at this
/// distance is far below double precision.
fn cone_margin(t: f64) -> f64 {
    20.0 + 8.0 * t.cbrt()
}

/// Largest domain radius a [`Chain`] will allocate (five arrays of
/// `2 * radius + 1` doubles, about 400 MB at the limit).
pub const MAX_RADIUS: i64 = 5_000_000;

/// Largest number of values a recorded trajectory may hold.
pub const MAX_RECORDED: usize = 100_000_000;

impl Chain {
    pub fn new(
        config: &LatticeConfig,
        profile: &MassProfile,
        init: &InitialCondition,
        radius: i64,
    ) -> Result<Self> {
        config.validate()?;
        profile.validate()?;
        if radius < 1 {
            return Err(invalid("radius", "must be positive"));
        }
        if radius > MAX_RADIUS {
            return Err(invalid(
                "radius",
                format!("{radius} exceeds the limit {MAX_RADIUS}; shorten the run"),
            ));
        }
        let n = (2 * radius + 1) as usize;
        let mass: Vec<f64> = (-radius..=radius)
            .map(|x| 1.0 + profile.delta_at(x))
            .collect();
        let min_mass = mass.iter().copied().fold(f64::INFINITY, f64::min);
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        for &(x, val) in &init.displacements {
            if x.abs() > radius {
                return Err(invalid(
                    "initial condition",
                    format!("site {x} is outside the domain"),
                ));
            }
            u[(x + radius) as usize] += val;
        }
        for &(x, val) in &init.velocities {
            if x.abs() > radius {
                return Err(invalid(
                    "initial condition",
                    format!("site {x} is outside the domain"),
                ));
            }
            v[(x + radius) as usize] += val;
        }
        let mut c = Chain {
            radius,
            ks: config.ks,
            inv_mass: mass.iter().map(|m| 1.0 / m).collect(),
            mass,
            u,
            v,
            acc: vec![0.0; n],
            time: 0.0,
            support: init.support(),
            speed: 1f64.max(1.0 / min_mass.sqrt()),
            prune: true,
            target: None,
        };
        let (lo, hi) = c.active(0.0);
        c.accelerate(lo, hi);
        Ok(c)
    }

    /// Disable cone pruning (every site is updated every step).
    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        let n = self.u.len();
        self.accelerate(0, n - 1);
        self
    }

    /// Only the sites that can still influence `first..=last` at time
    /// `t_end` are updated. Other sites hold stale values afterwards.
    pub fn with_target(mut self, first: i64, last: i64, t_end: f64) -> Self {
        self.target = Some((first, last, t_end));
        self
    }

    /// Steps of size at most `h` up to time `t`, the last one shortened to
    /// land on `t` exactly.
    pub fn advance_to(&mut self, t: f64, h: f64) {
        let steps = ((t - self.time) / h).ceil();
        if steps < 1.0 {
            return;
        }
        let h = (t - self.time) / steps;
        for _ in 0..steps as usize {
            self.step(h);
        }
        self.time = t;
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn displacement(&self, x: i64) -> f64 {
        if x.abs() > self.radius {
            0.0
        } else {
            self.u[(x + self.radius) as usize]
        }
    }

    pub fn velocity(&self, x: i64) -> f64 {
        if x.abs() > self.radius {
            0.0
        } else {
            self.v[(x + self.radius) as usize]
        }
    }

    // index range that may be nonzero at time t
    fn active(&self, t: f64) -> (usize, usize) {
        let n = self.u.len();
        if !self.prune {
            return (0, n - 1);
        }
        let reach = (self.speed * t + cone_margin(t)).ceil() as i64;
        let mut lo = (self.support.0 - reach + self.radius).max(0);
        let mut hi = (self.support.1 + reach + self.radius).min(n as i64 - 1);
        if let Some((first, last, t_end)) = self.target {
            let back = (self.speed * (t_end - t).max(0.0) + cone_margin(t_end)).ceil() as i64;
            lo = lo.max(first - back + self.radius);
            hi = hi.min(last + back + self.radius);
        }
        if lo > hi {
            return (1, 0);
        }
        (lo as usize, hi as usize)
    }

    fn accelerate(&mut self, lo: usize, hi: usize) {
        if lo > hi {
            return;
        }
        let n = self.u.len();
        let c = 2.0 + self.ks;
        let u = &self.u;
        let at = |i: usize| if i < n { u[i] } else { 0.0 };
        // edge sites see the fixed zero boundary
        let (a, b) = (lo.max(1), hi.min(n - 2));
        for i in [lo, hi] {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            self.acc[i] = (left + at(i + 1) - c * u[i]) * self.inv_mass[i];
        }
        if a <= b {
            let acc = &mut self.acc[a..=b];
            let inv = &self.inv_mass[a..=b];
            let (um, u0, up) = (&u[a - 1..b], &u[a..=b], &u[a + 1..=b + 1]);
            for ((((o, m), l), x), r) in acc.iter_mut().zip(inv).zip(um).zip(u0).zip(up) {
                *o = (l + r - c * x) * m;
            }
        }
    }

    /// One velocity-Verlet step of size `h`.
    pub fn step(&mut self, h: f64) {
        let (lo, hi) = self.active(self.time + h);
        if lo <= hi {
            let half = 0.5 * h;
            for ((u, v), a) in self.u[lo..=hi]
                .iter_mut()
                .zip(&mut self.v[lo..=hi])
                .zip(&self.acc[lo..=hi])
            {
                *v += half * a;
                *u += h * *v;
            }
            self.accelerate(lo, hi);
            for (v, a) in self.v[lo..=hi].iter_mut().zip(&self.acc[lo..=hi]) {
                *v += half * a;
            }
        }
        self.time += h;
    }

    /// Discrete energy
    /// `sum (1+Delta_x) v_x^2/2 + (u_{x+1}-u_x)^2/2 + Ks u_x^2/2`.
    pub fn energy(&self) -> f64 {
        let n = self.u.len();
        let mut e = 0.0;
        for i in 0..n {
            let right = if i + 1 < n { self.u[i + 1] } else { 0.0 };
            e += 0.5 * self.mass[i] * self.v[i] * self.v[i];
            e += 0.5 * (right - self.u[i]).powi(2) + 0.5 * self.ks * self.u[i] * self.u[i];
        }
        // bond to the fixed site on the left
        e + 0.5 * self.u[0] * self.u[0]
    }

    /// Energy of the modified Hamiltonian that velocity Verlet conserves
    /// exactly for linear forces: `E - (h^2/8) (K u)^T M^{-1} (K u)`.
    pub fn shadow_energy(&self, h: f64) -> f64 {
        let n = self.u.len();
        let mut corr = 0.0;
        for i in 0..n {
            // acc = -M^{-1} K u, so (Ku)^T M^{-1} (Ku) = sum m a^2
            corr += self.mass[i] * self.acc[i] * self.acc[i];
        }
        self.energy() - h * h / 8.0 * corr
    }
}

/// Smallest admissible domain radius for a run of length `t_max`.
pub fn required_radius(init: &InitialCondition, profile: &MassProfile, t_max: f64) -> i64 {
    let (lo, hi) = init.support();
    let min_mass = profile
        .deltas
        .iter()
        .chain([&profile.left_offset, &profile.right_offset])
        .map(|d| 1.0 + d)
        .fold(1.0, f64::min);
    let reach = (t_max / min_mass.sqrt()).ceil() as i64;
    lo.abs().max(hi.abs()) + reach + 10
}

/// Integrates to `t_max` with step at most `dt` and records the whole domain
/// at every step.
pub fn simulate(
    config: &LatticeConfig,
    profile: &MassProfile,
    init: &InitialCondition,
    t_max: f64,
    dt: f64,
    radius: i64,
) -> Result<TrajectoryRecord> {
    let rec = Recording {
        first_site: -radius,
        last_site: radius,
        stride: 1,
    };
    simulate_recorded(config, profile, init, t_max, dt, radius, rec)
}

/// As [`simulate`], keeping only the sites and steps selected by `rec`.
pub fn simulate_recorded(
    config: &LatticeConfig,
    profile: &MassProfile,
    init: &InitialCondition,
    t_max: f64,
    dt: f64,
    radius: i64,
    rec: Recording,
) -> Result<TrajectoryRecord> {
    let h = check_run(init, profile, t_max, dt, radius)?;
    if rec.first_site > rec.last_site || rec.stride == 0 {
        return Err(invalid("recording", "empty site window or zero stride"));
    }
    let steps = (t_max / h).round() as usize;
    let width = (rec.last_site - rec.first_site + 1) as usize;
    if (steps / rec.stride + 2).saturating_mul(width) > MAX_RECORDED {
        return Err(invalid(
            "recording",
            format!("more than {MAX_RECORDED} values; raise the stride or narrow the window"),
        ));
    }
    let mut chain = Chain::new(config, profile, init, radius)?;
    let snap = |c: &Chain| {
        (rec.first_site..=rec.last_site)
            .map(|x| c.displacement(x))
            .collect::<Vec<_>>()
    };
    let mut times = vec![0.0];
    let mut values = vec![snap(&chain)];
    for s in 1..=steps {
        chain.step(h);
        if s % rec.stride == 0 || s == steps {
            times.push(s as f64 * h);
            values.push(snap(&chain));
        }
    }
    Ok(TrajectoryRecord {
        first_site: rec.first_site,
        last_site: rec.last_site,
        dt: h,
        times,
        values,
    })
}

/// Field at a single time on the sites `first..=last`, without storing the history.
#[allow(clippy::too_many_arguments)]
pub fn field_at(
    config: &LatticeConfig,
    profile: &MassProfile,
    init: &InitialCondition,
    t: f64,
    dt: f64,
    radius: i64,
    first: i64,
    last: i64,
) -> Result<Vec<f64>> {
    let h = check_run(init, profile, t, dt, radius)?;
    let steps = (t / h).round() as usize;
    let mut chain = Chain::new(config, profile, init, radius)?;
    for _ in 0..steps {
        chain.step(h);
    }
    Ok((first..=last).map(|x| chain.displacement(x)).collect())
}

/// Field on `first..=last` at each of the increasing `times`, on the
/// smallest admissible domain. Steps are at most `dt` and land exactly on
/// every requested time.
pub fn sample_times(
    config: &LatticeConfig,
    profile: &MassProfile,
    init: &InitialCondition,
    times: &[f64],
    dt: f64,
    first: i64,
    last: i64,
) -> Result<Vec<Vec<f64>>> {
    let t_end = match times.last() {
        Some(t) => *t,
        None => return Ok(vec![]),
    };
    if times.windows(2).any(|w| w[1] < w[0]) || times[0] < 0.0 {
        return Err(invalid("times", "must be non-negative and increasing"));
    }
    if first > last {
        return Err(invalid("sites", "empty site window"));
    }
    check_run(init, profile, t_end, dt, i64::MAX)?;
    let radius = required_radius(init, profile, t_end)
        .max(first.abs())
        .max(last.abs());
    let mut c = Chain::new(config, profile, init, radius)?.with_target(first, last, t_end);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        c.advance_to(t, dt);
        out.push((first..=last).map(|x| c.displacement(x)).collect());
    }
    Ok(out)
}

// Validates the run and returns the step that lands exactly on t_max.
fn check_run(
    init: &InitialCondition,
    profile: &MassProfile,
    t_max: f64,
    dt: f64,
    radius: i64,
) -> Result<f64> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(invalid("dt", format!("must lie in (0, 0.1], got {dt}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(invalid(
            "t_max",
            format!("must be finite and >= 0, got {t_max}"),
        ));
    }
    profile.validate()?;
    let required = required_radius(init, profile, t_max);
    if radius < required {
        return Err(Error::Causality { radius, required });
    }
    let steps = (t_max / dt).ceil().max(1.0);
    Ok(if t_max == 0.0 { dt } else { t_max / steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(ks: f64) -> LatticeConfig {
        LatticeConfig::new(ks, 1, 0.0).unwrap()
    }

    fn random_profile(seed: u64, len: usize, sigma: f64) -> MassProfile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = 3f64.sqrt() * sigma;
        MassProfile::new((0..len).map(|_| rng.random_range(-a..a)).collect())
    }

    #[test]
    fn impulse_data() {
        for x0 in [0, 5, -3] {
            let ic = impulse(x0);
            assert_eq!(ic.displacements, vec![(x0, 1.0)]);
            assert!(ic.velocities.is_empty());
            let norm: f64 = ic
                .displacements
                .iter()
                .map(|(_, v)| v * v)
                .sum::<f64>()
                .sqrt();
            assert_eq!(norm, 1.0);
        }
    }

    #[test]
    fn initial_row_is_the_impulse() {
        let p = MassProfile::unperturbed(1);
        let rec = simulate(&cfg(0.0), &p, &impulse(0), 1.0, 0.01, 20).unwrap();
        for (x, v) in rec.sites().zip(&rec.values[0]) {
            assert_eq!(*v, if x == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn free_chain_is_bessel() {
        let p = MassProfile::unperturbed(1);
        let t = 10.0;
        let rec = simulate(&cfg(0.0), &p, &impulse(0), t, 1e-3, 40).unwrap();
        let last = rec.last();
        let mut worst: f64 = 0.0;
        for (x, v) in rec.sites().zip(last) {
            let n = (2 * x.abs()) as _;
            worst = worst.max((v - bessel_j(n, 2.0 * t)).abs());
        }
        assert!(worst <= 1e-6, "max error {worst}");
    }

    #[test]
    fn second_order_in_dt() {
        let p = random_profile(3, 12, 0.2);
        let run = |dt: f64| field_at(&cfg(0.4), &p, &impulse(-2), 8.0, dt, 40, -15, 20).unwrap();
        let (a, b, c) = (run(0.04), run(0.02), run(0.01));
        let d = |x: &[f64], y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let ratio = d(&a, &b) / d(&b, &c);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn shadow_energy_does_not_drift() {
        let p = random_profile(4, 20, 0.3);
        let h = 1e-2;
        let mut c = Chain::new(&cfg(1.1), &p, &impulse(0), 130).unwrap();
        let e0 = c.shadow_energy(h);
        let raw0 = c.energy();
        let mut worst_raw: f64 = 0.0;
        for _ in 0..10_000 {
            c.step(h);
            worst_raw = worst_raw.max((c.energy() - raw0).abs() / raw0);
        }
        assert!((c.shadow_energy(h) - e0).abs() <= 1e-6 * e0.abs());
        // the plain energy only oscillates at O(h^2)
        assert!(worst_raw < 1e-3);
    }

    #[test]
    fn pruning_is_invisible() {
        let p = random_profile(5, 15, 0.3).with_offsets(0.1, -0.2);
        let init = impulse(-4);
        let full = Chain::new(&cfg(0.7), &p, &init, 90)
            .unwrap()
            .without_pruning();
        let mut a = full.clone();
        let mut b = Chain::new(&cfg(0.7), &p, &init, 90).unwrap();
        for _ in 0..6000 {
            a.step(0.01);
            b.step(0.01);
        }
        for x in -90..=90 {
            assert!((a.displacement(x) - b.displacement(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_runs_are_refused() {
        let p = MassProfile::unperturbed(4);
        let init = impulse(0);
        let r = simulate_recorded(
            &cfg(0.0),
            &p,
            &init,
            1e9,
            0.1,
            required_radius(&init, &p, 1e9),
            Recording {
                first_site: 0,
                last_site: 0,
                stride: 1,
            },
        );
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
        let wide = Recording {
            first_site: -50_000,
            last_site: 50_000,
            stride: 1,
        };
        let r = simulate_recorded(&cfg(0.0), &p, &init, 200.0, 0.01, 50_000, wide);
        assert!(matches!(
            r,
            Err(Error::InvalidParameter {
                field: "recording",
                ..
            })
        ));
    }

    #[test]
    fn target_pruning_is_invisible() {
        let p = random_profile(8, 12, 0.3);
        let init = impulse(0);
        let t = 80.0;
        let r = required_radius(&init, &p, t);
        let full = Chain::new(&cfg(0.5), &p, &init, r)
            .unwrap()
            .without_pruning();
        let mut a = full.clone();
        let mut b = Chain::new(&cfg(0.5), &p, &init, r)
            .unwrap()
            .with_target(40, 45, t);
        a.advance_to(t, 0.02);
        b.advance_to(t, 0.02);
        assert_eq!(a.time(), b.time());
        assert!((a.time() - t).abs() < 1e-12);
        for x in 40..=45 {
            assert!((a.displacement(x) - b.displacement(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_times_match_field_at() {
        let p = random_profile(9, 8, 0.2);
        let cfg = cfg(0.3);
        let init = impulse(-2);
        let got = sample_times(&cfg, &p, &init, &[5.0, 12.5], 0.01, 3, 6).unwrap();
        for (t, row) in [5.0, 12.5].iter().zip(&got) {
            let want = field_at(&cfg, &p, &init, *t, 0.01, 40, 3, 6).unwrap();
            for (a, b) in row.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(sample_times(&cfg, &p, &init, &[2.0, 1.0], 0.01, 0, 1).is_err());
        assert!(sample_times(&cfg, &p, &init, &[2.0], 0.5, 0, 1).is_err());
    }

    #[test]
    fn radius_insensitive() {
        let p = random_profile(6, 10, 0.3);
        let init = impulse(-3);
        let r = required_radius(&init, &p, 30.0);
        let a = field_at(&cfg(0.2), &p, &init, 30.0, 0.01, r, -20, 20).unwrap();
        let b = field_at(&cfg(0.2), &p, &init, 30.0, 0.01, 2 * r, -20, 20).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn causality_left_of_section() {
        // the section cannot influence x <= 0 before the signal has been
        // there; the discrete front carries an Airy precursor of width d^{1/3}
        let x0 = -30;
        let d = (1 - x0) as f64;
        let t = d - 6.0 * d.cbrt();
        let p = random_profile(7, 10, 0.4);
        let free = MassProfile::unperturbed(10);
        let r = required_radius(&impulse(x0), &p, t);
        let a = field_at(&cfg(0.0), &p, &impulse(x0), t, 0.01, r, -60, 0).unwrap();
        let b = field_at(&cfg(0.0), &free, &impulse(x0), t, 0.01, r, -60, 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn cone_confinement() {
        let t = 60.0;
        for ks in [0.0, 1.1] {
            let speed = if ks == 0.0 {
                1.0
            } else {
                1.0 / crate::lattice::front_params(ks).alpha_s
            };
            let p = MassProfile::unperturbed(1);
            let r = required_radius(&impulse(0), &p, t);
            let u = field_at(&cfg(ks), &p, &impulse(0), t, 0.01, r, -r, r).unwrap();
            for (x, v) in (-r..=r).zip(&u) {
                let d = x.abs() as f64;
                if d > speed * t + 5.0 * d.cbrt() {
                    assert!(v.abs() <= 1e-3, "x={x} u={v}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_runs() {
        let p = MassProfile::unperturbed(5);
        assert!(matches!(
            simulate(&cfg(0.0), &p, &impulse(0), 50.0, 0.01, 30),
            Err(Error::Causality { required: 60, .. })
        ));
        assert!(simulate(&cfg(0.0), &p, &impulse(0), 5.0, 0.2, 30).is_err());
        let bad = MassProfile::new(vec![-1.5]);
        assert!(matches!(
            simulate(&cfg(0.0), &bad, &impulse(0), 5.0, 0.01, 30),
            Err(Error::NonPositiveMass { .. })
        ));
    }

    #[test]
    fn stride_and_window() {
        let p = MassProfile::unperturbed(3);
        let rec = Recording {
            first_site: -2,
            last_site: 4,
            stride: 10,
        };
        let tr = simulate_recorded(&cfg(0.0), &p, &impulse(0), 1.0, 0.01, 20, rec).unwrap();
        assert_eq!(tr.times.len(), 11);
        assert_eq!(tr.values[0].len(), 7);
        assert!((tr.times[10] - 1.0).abs() < 1e-12);
        assert_eq!(tr.site_series(0).unwrap().len(), 11);
    }
}
