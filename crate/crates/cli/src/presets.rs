//! Figure presets. Each figure has one or more panels; a panel is a full
//! run config.

use serde_json::{json, Value};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub panels: Vec<(&'static str, Value)>,
}

fn trajectories(ks: f64) -> Value {
    json!({
        "scenario": "td-trajectories",
        "lattice": {"ks": ks, "length": 12, "sigma": 0.15},
        "disorder": {"master_seed": 1},
        "n_real": 51,
        "time": {"dt": 0.01, "t_max": 40.0, "stride": 50, "first_site": -40, "last_site": 40,
                 "source_site": 0, "section_start": 2}
    })
}

fn transmittance(ks: f64) -> Value {
    json!({
        "scenario": "fd-transmittance",
        "lattice": {"ks": ks, "length": 40, "sigma": 0.05},
        "disorder": {"master_seed": 3},
        "n_real": 200,
        "omega": {"band": 400}
    })
}

fn mean_field(ks: f64, length: usize, alpha: (f64, f64)) -> Value {
    json!({
        "scenario": "td-mean-field",
        "lattice": {"ks": ks, "length": length, "sigma": 0.15},
        "disorder": {"master_seed": 4},
        "n_real": 100,
        "x": 200,
        "alpha": {"start": alpha.0, "stop": alpha.1, "count": 801},
        "time": {"dt": 0.02}
    })
}

fn mean_front(ks: f64, length: usize) -> Value {
    json!({
        "scenario": "td-mean-front",
        "lattice": {"ks": ks, "length": length, "sigma": 0.15},
        "disorder": {"master_seed": 4},
        "n_real": 100,
        "x": 200,
        "beta": {"start": -3.0, "stop": 4.0, "count": 141},
        "time": {"dt": 0.02}
    })
}

fn moments(ks: f64) -> Value {
    json!({
        "scenario": "fd-moments",
        "lattice": {"ks": ks, "length": 40, "sigma": 0.05},
        "disorder": {"master_seed": 5},
        "n_real": 200,
        "omega": {"band": 200}
    })
}

fn nonmatched(left: f64, right: f64) -> Value {
    json!({
        "scenario": "fd-nonmatched",
        "lattice": {"ks": 0.02, "length": 40, "sigma": 0.05, "left_offset": left, "right_offset": right},
        "disorder": {"master_seed": 6},
        "n_real": 151,
        "omega": {"band": 200}
    })
}

pub fn all() -> Vec<Preset> {
    vec![
        Preset {
            name: "fig1",
            summary: "trajectories, Ks=0, L=12, sigma=0.15, 51 realizations, section on sites 2..13",
            panels: vec![("", trajectories(0.0))],
        },
        Preset {
            name: "fig2",
            summary: "trajectories, Ks=1.1, otherwise as fig1",
            panels: vec![("", trajectories(1.1))],
        },
        Preset {
            name: "fig3",
            summary: "per-realization |T|^2, sigma=0.05, L=40, 200 realizations; (a) Ks=0 (b) Ks=1",
            panels: vec![("a", transmittance(0.0)), ("b", transmittance(1.0))],
        },
        Preset {
            name: "fig4",
            summary: "mean field and mean front, sigma=0.15; (a,b) Ks=0, L=16 (c,d) Ks=1.1, L=8",
            panels: vec![
                ("a", mean_field(0.0, 16, (1.05, 3.0))),
                ("b", mean_front(0.0, 16)),
                ("c", mean_field(1.1, 8, (1.7, 3.5))),
                ("d", mean_front(1.1, 8)),
            ],
        },
        Preset {
            name: "fig5",
            summary: "E|T|^2 and Std|T|^2 vs theory, sigma=0.05, L=40, 200 realizations; (a) Ks=0.02 (b) Ks=1.01",
            panels: vec![("a", moments(0.02)), ("b", moments(1.01))],
        },
        Preset {
            name: "fig6",
            summary: "non-matched E|T|^2, Ks=0.02, sigma=0.05, L=40, 151 realizations; offsets (a) (0.1,0) (b) (-0.1,0) (c) (0,0.1) (d) (0,-0.1)",
            panels: vec![
                ("a", nonmatched(0.1, 0.0)),
                ("b", nonmatched(-0.1, 0.0)),
                ("c", nonmatched(0.0, 0.1)),
                ("d", nonmatched(0.0, -0.1)),
            ],
        },
    ]
}

/// Panels selected by `name`: a figure (`fig4`) or one panel (`fig4a`).
pub fn lookup(name: &str) -> Option<Vec<(String, Value)>> {
    for p in all() {
        if name == p.name {
            return Some(
                p.panels
                    .into_iter()
                    .map(|(s, v)| (format!("{}{s}", p.name), v))
                    .collect(),
            );
        }
        if let Some(suffix) = name.strip_prefix(p.name) {
            if let Some((s, v)) = p
                .panels
                .into_iter()
                .find(|(s, _)| !s.is_empty() && *s == suffix)
            {
                return Some(vec![(format!("{}{s}", p.name), v)]);
            }
        }
    }
    None
}
