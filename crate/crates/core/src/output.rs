//! CSV artifacts. Floats use the shortest decimal string that parses back to
//! the same `f64`, so files are locale-independent and byte-reproducible.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::ensemble::EnsembleSummary;
use crate::error::{Error, Result};
use crate::timedomain::TrajectoryRecord;

pub const SCATTERING_HEADER: [&str; 9] = [
    "omega",
    "re_T",
    "im_T",
    "re_R",
    "im_R",
    "trans2",
    "flux_deficit",
    "seed",
    "realization",
];
pub const MOMENTS_HEADER: [&str; 4] = ["omega", "gammaL", "mean_T2", "std_T2"];
pub const SUMMARY_HEADER: [&str; 5] = ["coord", "mean", "std", "stderr", "n"];

/// Shortest round-trip representation.
pub fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("csv: {e}"))
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// One frequency-domain solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRow {
    pub omega: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub trans2: f64,
    pub flux_deficit: f64,
    pub seed: u64,
    pub realization: u64,
}

/// One row of a moment curve; `extra` holds the optional trailing columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub omega: f64,
    pub gamma_l: f64,
    pub mean_t2: f64,
    pub std_t2: f64,
    pub extra: Vec<f64>,
}

/// Header `t,site_<n>...`, one row per time sample.
pub fn write_trajectory<W: Write>(w: W, rec: &TrajectoryRecord) -> Result<()> {
    let mut out = writer(w);
    let mut head = vec!["t".to_string()];
    head.extend(rec.sites().map(|x| format!("site_{x}")));
    out.write_record(&head).map_err(io)?;
    for (t, row) in rec.times.iter().zip(&rec.values) {
        let mut rec = vec![fmt_f64(*t)];
        rec.extend(row.iter().map(|v| fmt_f64(*v)));
        out.write_record(&rec).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_scattering<W: Write>(w: W, rows: &[ScatteringRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SCATTERING_HEADER).map_err(io)?;
    for r in rows {
        let rec = [
            fmt_f64(r.omega),
            fmt_f64(r.t.re),
            fmt_f64(r.t.im),
            fmt_f64(r.r.re),
            fmt_f64(r.r.im),
            fmt_f64(r.trans2),
            fmt_f64(r.flux_deficit),
            r.seed.to_string(),
            r.realization.to_string(),
        ];
        out.write_record(&rec).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// `omega,gammaL,mean_T2,std_T2` followed by the names in `extra`.
pub fn write_moments<W: Write>(w: W, extra: &[&str], rows: &[MomentRow]) -> Result<()> {
    let mut out = writer(w);
    let head: Vec<&str> = MOMENTS_HEADER
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect();
    out.write_record(&head).map_err(io)?;
    for r in rows {
        if r.extra.len() != extra.len() {
            return Err(Error::Domain(format!(
                "row has {} extra values for {} columns",
                r.extra.len(),
                extra.len()
            )));
        }
        let mut rec = vec![
            fmt_f64(r.omega),
            fmt_f64(r.gamma_l),
            fmt_f64(r.mean_t2),
            fmt_f64(r.std_t2),
        ];
        rec.extend(r.extra.iter().map(|v| fmt_f64(*v)));
        out.write_record(&rec).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_summary<W: Write>(w: W, s: &EnsembleSummary) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SUMMARY_HEADER).map_err(io)?;
    for i in 0..s.coord.len() {
        let rec = [
            fmt_f64(s.coord[i]),
            fmt_f64(s.mean[i]),
            fmt_f64(s.std[i]),
            fmt_f64(s.stderr[i]),
            s.n.to_string(),
        ];
        out.write_record(&rec).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Numeric table with named columns, e.g. per-realization curves.
pub fn write_table<W: Write>(w: W, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header).map_err(io)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Domain(format!(
                "row has {} values for {} columns",
                r.len(),
                header.len()
            )));
        }
        out.write_record(r.iter().map(|v| fmt_f64(*v)))
            .map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Header and numeric rows of a CSV file. Fails if the header does not start
/// with `expected` or if any cell is not a number.
pub fn read_table<R: Read>(r: R, expected: &[&str]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rd
        .headers()
        .map_err(io)?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.len() < expected.len() || header.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Domain(format!(
            "csv header {header:?} does not start with {expected:?}"
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(io)?;
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::Domain(format!("csv row {}: `{c}` is not a number", line + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn read_summary<R: Read>(r: R) -> Result<EnsembleSummary> {
    let (header, rows) = read_table(r, &SUMMARY_HEADER)?;
    if header.len() != SUMMARY_HEADER.len() {
        return Err(Error::Domain(format!(
            "summary csv has {} columns, expected 5",
            header.len()
        )));
    }
    let n = rows.first().map(|r| r[4] as u64).unwrap_or(0);
    if rows.iter().any(|r| r[4] != n as f64) {
        return Err(Error::Domain("summary csv has inconsistent n".into()));
    }
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<_>>();
    Ok(EnsembleSummary {
        n,
        coord: col(0),
        mean: col(1),
        std: col(2),
        stderr: col(3),
    })
}

pub fn read_trajectory<R: Read>(r: R) -> Result<TrajectoryRecord> {
    let (header, rows) = read_table(r, &["t"])?;
    let sites = header[1..]
        .iter()
        .map(|h| {
            h.strip_prefix("site_")
                .and_then(|s| s.parse::<i64>().ok())
                .ok_or_else(|| Error::Domain(format!("bad trajectory column `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (first, last) = match (sites.first(), sites.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::Domain("trajectory csv has no site columns".into())),
    };
    if sites.iter().zip(first..).any(|(s, want)| *s != want) {
        return Err(Error::Domain("trajectory sites are not contiguous".into()));
    }
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let dt = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    Ok(TrajectoryRecord {
        first_site: first,
        last_site: last,
        dt,
        times,
        values: rows.into_iter().map(|r| r[1..].to_vec()).collect(),
    })
}

pub fn read_scattering<R: Read>(r: R) -> Result<Vec<ScatteringRow>> {
    let (header, rows) = read_table(r, &SCATTERING_HEADER)?;
    if header.len() != SCATTERING_HEADER.len() {
        return Err(Error::Domain(format!(
            "scattering csv has {} columns, expected 9",
            header.len()
        )));
    }
    Ok(rows
        .iter()
        .map(|v| ScatteringRow {
            omega: v[0],
            t: Complex64::new(v[1], v[2]),
            r: Complex64::new(v[3], v[4]),
            trans2: v[5],
            flux_deficit: v[6],
            seed: v[7] as u64,
            realization: v[8] as u64,
        })
        .collect())
}

/// Rows of a moment CSV and the names of its extra columns.
pub fn read_moments<R: Read>(r: R) -> Result<(Vec<String>, Vec<MomentRow>)> {
    let (header, rows) = read_table(r, &MOMENTS_HEADER)?;
    let extra = header[4..].to_vec();
    let rows = rows
        .into_iter()
        .map(|v| MomentRow {
            omega: v[0],
            gamma_l: v[1],
            mean_t2: v[2],
            std_t2: v[3],
            extra: v[4..].to_vec(),
        })
        .collect();
    Ok((extra, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn to_string(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0");
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(-2.5e-300), "-2.5e-300");
        assert_eq!(fmt_f64(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn summary_layout() {
        let s = EnsembleSummary {
            n: 4,
            coord: vec![0.5, 1.0],
            mean: vec![1.0, 0.25],
            std: vec![0.0, 0.5],
            stderr: vec![0.0, 0.25],
        };
        let text = to_string(|b| write_summary(b, &s));
        assert_eq!(
            text,
            "coord,mean,std,stderr,n\n0.5,1.0,0.0,0.0,4\n1.0,0.25,0.5,0.25,4\n"
        );
        assert_eq!(read_summary(text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn trajectory_layout() {
        let rec = TrajectoryRecord {
            first_site: -1,
            last_site: 1,
            dt: 0.5,
            times: vec![0.0, 0.5],
            values: vec![vec![0.0, 1.0, 0.0], vec![0.125, 0.75, 0.125]],
        };
        let text = to_string(|b| write_trajectory(b, &rec));
        assert!(text.starts_with("t,site_-1,site_0,site_1\n0.0,0.0,1.0,0.0\n"));
        assert_eq!(read_trajectory(text.as_bytes()).unwrap(), rec);
    }

    #[test]
    fn scattering_layout() {
        let row = ScatteringRow {
            omega: 1.25,
            t: Complex64::new(0.5, -0.5),
            r: Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
            trans2: 0.5,
            flux_deficit: 1e-16,
            seed: 42,
            realization: 7,
        };
        let text = to_string(|b| write_scattering(b, &[row]));
        assert_eq!(
            text,
            "omega,re_T,im_T,re_R,im_R,trans2,flux_deficit,seed,realization\n\
             1.25,0.5,-0.5,0.0,0.7071067811865476,0.5,1e-16,42,7\n"
        );
        assert_eq!(read_scattering(text.as_bytes()).unwrap(), vec![row]);
    }

    #[test]
    fn moments_extra_columns() {
        let rows = vec![MomentRow {
            omega: 1.0,
            gamma_l: 0.5,
            mean_t2: 0.6,
            std_t2: 0.2,
            extra: vec![0.61, 0.01],
        }];
        let text = to_string(|b| write_moments(b, &["mc_mean", "mc_stderr"], &rows));
        assert!(text.starts_with("omega,gammaL,mean_T2,std_T2,mc_mean,mc_stderr\n"));
        let (extra, back) = read_moments(text.as_bytes()).unwrap();
        assert_eq!(extra, vec!["mc_mean", "mc_stderr"]);
        assert_eq!(back, rows);
        assert!(write_moments(Vec::new(), &["a"], &rows).is_err());
    }

    #[test]
    fn schema_mismatch_is_reported() {
        assert!(read_summary("coord,avg,std,stderr,n\n".as_bytes()).is_err());
        assert!(read_summary("coord,mean,std,stderr,n\n1,x,0,0,2\n".as_bytes()).is_err());
        assert!(read_trajectory("t,site_0,site_2\n0,1,2\n".as_bytes()).is_err());
        assert!(read_scattering("omega,re_T\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
