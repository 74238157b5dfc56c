//! Scenario drivers: validate, compute, write CSVs and the manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use chainlab::asymptotics::{
    mean_bulk, mean_front, unperturbed_bulk, unperturbed_front, FieldQuery,
};
use chainlab::ensemble::{run_realizations, DisorderSpec, EnsembleSummary};
use chainlab::lattice::{front_params, MassProfile};
use chainlab::output::{self, MomentRow, ScatteringRow};
use chainlab::scattering::{solve, HalfSpace, HarmonicSetup};
use chainlab::stats::{
    density, gamma_correlated, moments_matched, moments_nonmatched_left, moments_nonmatched_right,
    NonMatched,
};
use chainlab::timedomain::{impulse, required_radius, sample_times, simulate_recorded, Recording};

use crate::config::{RunConfig, Scenario};
use crate::CliError;

/// Runs `cfg` into `out` and returns the names of the files written,
/// manifest last.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    cfg.lattice
        .validate()
        .map_err(|e| CliError::schema("lattice", e.to_string()))?;
    let spec = cfg.disorder_spec()?;
    let plan = plan(cfg)?;
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut files = plan.execute(cfg, &spec, out)?;
    let manifest = json!({
        "scenario": cfg.scenario.name(),
        "config_hash": cfg.hash(),
        "master_seed": cfg.disorder.master_seed,
        "versions": {"chainlab": chainlab::VERSION, "chainlab-cli": env!("CARGO_PKG_VERSION")},
        "files": files,
        "config": cfg,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(out.join("manifest.json"), text)
        .map_err(|e| CliError::Io(format!("manifest.json: {e}")))?;
    files.push("manifest.json".into());
    Ok(files)
}

/// Everything checked and resolved before the first solve.
enum Plan {
    Trajectories,
    TimeEnsemble {
        coord: Vec<f64>,
        times: Vec<f64>,
        x: i64,
    },
    Frequency {
        omegas: Vec<f64>,
    },
    Density {
        tau: Vec<f64>,
        gamma_l: Vec<f64>,
    },
}

fn need_ensemble(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.n_real < 2 {
        return Err(CliError::schema(
            "n_real",
            "ensemble scenarios need at least 2 realizations",
        ));
    }
    Ok(())
}

fn check_time(cfg: &RunConfig) -> Result<(), CliError> {
    let t = &cfg.time;
    if !(t.dt > 0.0 && t.dt <= 0.1) {
        return Err(CliError::schema(
            "time.dt",
            format!("must lie in (0, 0.1], got {}", t.dt),
        ));
    }
    Ok(())
}

fn plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    let l = &cfg.lattice;
    match cfg.scenario {
        Scenario::TdTrajectories => {
            check_time(cfg)?;
            let t = &cfg.time;
            if !(t.t_max >= 0.0 && t.t_max.is_finite()) {
                return Err(CliError::schema("time.t_max", "must be finite and >= 0"));
            }
            if t.first_site > t.last_site {
                return Err(CliError::schema(
                    "time.first_site",
                    "must not exceed time.last_site",
                ));
            }
            if t.stride == 0 {
                return Err(CliError::schema("time.stride", "must be at least 1"));
            }
            if cfg.n_real < 1 {
                return Err(CliError::schema("n_real", "must be at least 1"));
            }
            Ok(Plan::Trajectories)
        }
        Scenario::TdMeanField | Scenario::TdMeanFront => {
            need_ensemble(cfg)?;
            check_time(cfg)?;
            let x = cfg
                .x
                .ok_or_else(|| CliError::schema("x", "required by the time-domain ensembles"))?;
            if x <= l.length as i64 {
                return Err(CliError::schema(
                    "x",
                    format!("must lie beyond the section (x > {}), got {x}", l.length),
                ));
            }
            let xf = x as f64;
            let (coord, times): (Vec<f64>, Vec<f64>) = if cfg.scenario == Scenario::TdMeanField {
                let a = cfg.grid("alpha")?;
                if a[0] <= 0.0 {
                    return Err(CliError::schema("alpha", "slownesses must be positive"));
                }
                let t = a.iter().map(|a| a * xf).collect();
                (a, t)
            } else {
                let b = cfg.grid("beta")?;
                let a_s = front_params(l.ks).alpha_s;
                let t: Vec<f64> = b.iter().map(|b| a_s * xf + b * xf.cbrt()).collect();
                if t[0] < 0.0 {
                    return Err(CliError::schema("beta", "front times must be non-negative"));
                }
                (b, t)
            };
            Ok(Plan::TimeEnsemble { coord, times, x })
        }
        Scenario::FdTransmittance | Scenario::FdMoments | Scenario::FdNonmatched => {
            need_ensemble(cfg)?;
            match cfg.scenario {
                Scenario::FdMoments if !l.is_matched() => {
                    return Err(CliError::schema(
                        "lattice",
                        "fd-moments needs zero half-space offsets",
                    ))
                }
                Scenario::FdNonmatched if (l.left_offset != 0.0) == (l.right_offset != 0.0) => {
                    return Err(CliError::schema(
                        "lattice",
                        "fd-nonmatched needs exactly one nonzero offset",
                    ))
                }
                _ => {}
            }
            let omegas = cfg.grid("omega")?;
            let flat =
                MassProfile::unperturbed(l.length).with_offsets(l.left_offset, l.right_offset);
            for &w in &omegas {
                let s = HarmonicSetup::new(w, l.ks, &flat)
                    .map_err(|e| CliError::schema("omega", e.to_string()))?;
                if cfg.scenario != Scenario::FdTransmittance
                    && matches!(s.right, HalfSpace::Evanescent { .. })
                {
                    return Err(CliError::schema(
                        "omega",
                        format!("right half-space is evanescent at {w}"),
                    ));
                }
            }
            Ok(Plan::Frequency { omegas })
        }
        Scenario::Density => {
            let tau = cfg.grid("tau")?;
            if tau[0] <= 0.0 || *tau.last().unwrap() > 1.0 {
                return Err(CliError::schema("tau", "values must lie in (0, 1]"));
            }
            let gamma_l = cfg.grid("gamma_l")?;
            if gamma_l[0] <= 0.0 {
                return Err(CliError::schema("gamma_l", "values must be positive"));
            }
            Ok(Plan::Density { tau, gamma_l })
        }
    }
}

fn solver_err(e: chainlab::Error) -> CliError {
    CliError::Solver(e.to_string())
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    File::create(out.join(name))
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{name}: {e}")))
}

fn written(r: chainlab::Result<()>, name: &str) -> Result<String, CliError> {
    r.map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    Ok(name.to_owned())
}

// the drawn section placed between the configured half-spaces
fn place(cfg: &RunConfig, drawn: &MassProfile) -> MassProfile {
    drawn
        .clone()
        .with_offsets(cfg.lattice.left_offset, cfg.lattice.right_offset)
        .with_start(cfg.time.section_start)
}

/// Per-realization table `coord, r0000, r0001, ...`.
fn write_fan(
    out: &Path,
    coord: &[f64],
    rows: &[Vec<f64>],
    pick: impl Fn(&[f64], usize) -> f64,
) -> Result<String, CliError> {
    let mut header = vec!["coord".to_string()];
    header.extend((0..rows.len()).map(|i| format!("r{i:04}")));
    let table: Vec<Vec<f64>> = coord
        .iter()
        .enumerate()
        .map(|(j, c)| {
            std::iter::once(*c)
                .chain(rows.iter().map(|r| pick(r, j)))
                .collect()
        })
        .collect();
    written(
        output::write_table(create(out, "ensemble.csv")?, &header, &table),
        "ensemble.csv",
    )
}

fn write_summary(out: &Path, s: &EnsembleSummary) -> Result<String, CliError> {
    written(
        output::write_summary(create(out, "summary.csv")?, s),
        "summary.csv",
    )
}

impl Plan {
    fn execute(
        &self,
        cfg: &RunConfig,
        spec: &DisorderSpec,
        out: &Path,
    ) -> Result<Vec<String>, CliError> {
        let l = &cfg.lattice;
        let mut files = Vec::new();
        match self {
            Plan::Trajectories => {
                let t = &cfg.time;
                let init = impulse(t.source_site);
                let rec = Recording {
                    first_site: t.first_site,
                    last_site: t.last_site,
                    stride: t.stride,
                };
                let mut one =
                    |name: String, p: &MassProfile, index: Option<u64>| -> Result<(), CliError> {
                        let radius = required_radius(&init, p, t.t_max)
                            .max(t.first_site.abs())
                            .max(t.last_site.abs());
                        let tr = simulate_recorded(l, p, &init, t.t_max, t.dt, radius, rec)
                            .map_err(|e| match index {
                                Some(i) => CliError::Solver(format!("realization {i} failed: {e}")),
                                None => solver_err(e),
                            })?;
                        files.push(written(
                            output::write_trajectory(create(out, &name)?, &tr),
                            &name,
                        )?);
                        Ok(())
                    };
                let free = place(cfg, &MassProfile::unperturbed(l.length));
                one("trajectory_free.csv".into(), &free, None)?;
                for i in 0..cfg.n_real {
                    one(
                        format!("trajectory_r{i:04}.csv"),
                        &place(cfg, &spec.draw_profile(i)),
                        Some(i),
                    )?;
                }
            }
            Plan::TimeEnsemble { coord, times, x } => {
                let site = cfg.time.source_site + x;
                let init = impulse(cfg.time.source_site);
                let rows = run_realizations(spec, cfg.n_real, |_, drawn| {
                    let p = place(cfg, drawn);
                    Ok(sample_times(l, &p, &init, times, cfg.time.dt, site, site)?.concat())
                })
                .map_err(solver_err)?;
                let s = EnsembleSummary::from_rows(coord, &rows).map_err(solver_err)?;
                files.push(write_summary(out, &s)?);
                files.push(write_fan(out, coord, &rows, |r, j| r[j])?);
                let theory: Vec<Vec<f64>> = coord
                    .iter()
                    .map(|&c| {
                        let (mean, free) = if cfg.scenario == Scenario::TdMeanField {
                            let q = FieldQuery::bulk(*x, c, l.ks);
                            (mean_bulk(&q, l.sigma, l.length), unperturbed_bulk(&q))
                        } else {
                            (
                                mean_front(*x, c, l.sigma, l.length, l.ks),
                                unperturbed_front(*x, c, l.ks),
                            )
                        };
                        // the formulas are undefined near caustics and before the cone
                        vec![c, mean.unwrap_or(f64::NAN), free.unwrap_or(f64::NAN)]
                    })
                    .collect();
                let header = ["coord", "theory_mean", "theory_free"].map(String::from);
                files.push(written(
                    output::write_table(create(out, "theory.csv")?, &header, &theory),
                    "theory.csv",
                )?);
            }
            Plan::Frequency { omegas } => {
                let rows = run_realizations(spec, cfg.n_real, |_, drawn| {
                    let p = place(cfg, drawn);
                    let mut v = Vec::with_capacity(6 * omegas.len());
                    for &w in omegas {
                        let r = solve(&HarmonicSetup::new(w, l.ks, &p)?)?;
                        v.extend([
                            r.t.re,
                            r.t.im,
                            r.r.re,
                            r.r.im,
                            r.transmittance(),
                            r.flux_deficit,
                        ]);
                    }
                    Ok(v)
                })
                .map_err(solver_err)?;
                let trans: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| r.chunks(6).map(|c| c[4]).collect())
                    .collect();
                let s = EnsembleSummary::from_rows(omegas, &trans).map_err(solver_err)?;
                if cfg.scenario == Scenario::FdTransmittance {
                    let mut batch = Vec::with_capacity(rows.len() * omegas.len());
                    for (i, r) in rows.iter().enumerate() {
                        for (w, c) in omegas.iter().zip(r.chunks(6)) {
                            batch.push(ScatteringRow {
                                omega: *w,
                                t: Complex64::new(c[0], c[1]),
                                r: Complex64::new(c[2], c[3]),
                                trans2: c[4],
                                flux_deficit: c[5],
                                seed: cfg.disorder.master_seed,
                                realization: i as u64,
                            });
                        }
                    }
                    files.push(written(
                        output::write_scattering(create(out, "scattering.csv")?, &batch),
                        "scattering.csv",
                    )?);
                } else {
                    let mut table = Vec::with_capacity(omegas.len());
                    for (j, &w) in omegas.iter().enumerate() {
                        let g = gamma_correlated(w, l.sigma, l.ks, &cfg.disorder.correlation)
                            .map_err(solver_err)?
                            * l.length as f64;
                        let (m1, m2) = if cfg.scenario == Scenario::FdMoments {
                            let m = moments_matched(2, g).map_err(solver_err)?;
                            (m.moments[0], m.moments[1])
                        } else {
                            let left = l.left_offset != 0.0;
                            let p = NonMatched {
                                omega: w,
                                ks: l.ks,
                                gamma_l: g,
                                offset: if left { l.left_offset } else { l.right_offset },
                            };
                            let f = if left {
                                moments_nonmatched_left
                            } else {
                                moments_nonmatched_right
                            };
                            (f(1, &p).map_err(solver_err)?, f(2, &p).map_err(solver_err)?)
                        };
                        table.push(MomentRow {
                            omega: w,
                            gamma_l: g,
                            mean_t2: m1,
                            std_t2: (m2 - m1 * m1).max(0.0).sqrt(),
                            extra: vec![s.mean[j], s.std[j], s.stderr[j]],
                        });
                    }
                    let extra = ["mc_mean", "mc_std", "mc_stderr"];
                    files.push(written(
                        output::write_moments(create(out, "moments.csv")?, &extra, &table),
                        "moments.csv",
                    )?);
                }
                files.push(write_summary(out, &s)?);
            }
            Plan::Density { tau, gamma_l } => {
                let mut table = Vec::with_capacity(tau.len() * gamma_l.len());
                for &g in gamma_l {
                    for &t in tau {
                        table.push(vec![t, g, density(t, 1.0, g).map_err(solver_err)?]);
                    }
                }
                let header = ["tau", "gammaL", "density"].map(String::from);
                files.push(written(
                    output::write_table(create(out, "density.csv")?, &header, &table),
                    "density.csv",
                )?);
            }
        }
        Ok(files)
    }
}
