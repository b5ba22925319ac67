//! CSV and plotting artifacts for experiment reports.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64, so re-parsing a CSV gives back the exact
//! values held in memory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boxdim::{BoxDimEstimate, BoxDimPoint};
use crate::error::{invalid, Error, Result};
use crate::forms::ApproximatingFunction;
use crate::measure::{Estimate, ExperimentReport};
use crate::series::{power_log_series, SeriesTag};

/// Formats a real so that parsing it back gives the same f64.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn parse_real(s: &str, field: &str) -> Result<f64> {
    s.parse().map_err(|_| invalid!("column {field}: cannot parse {s:?} as a real"))
}

fn parse_int(s: &str, field: &str) -> Result<u64> {
    s.parse().map_err(|_| invalid!("column {field}: cannot parse {s:?} as an integer"))
}

fn csv_error(e: csv::Error) -> Error {
    invalid!("csv: {e}")
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn read_csv(text: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let got = r.headers().map_err(csv_error)?;
    if got.iter().ne(header.iter().copied()) {
        return Err(invalid!("unexpected csv header {:?}, expected {:?}", got, header));
    }
    r.records().map(|rec| rec.map_err(csv_error)).collect()
}

/// One estimate together with the report it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub name: String,
    pub seed: u64,
    pub estimate: Estimate,
}

const ESTIMATE_HEADER: [&str; 8] = ["name", "seed", "label", "at", "hits", "samples", "estimate", "stderr"];

/// Every estimate of every report, one row each.
pub fn estimates_csv(reports: &[ExperimentReport]) -> String {
    write_csv(
        &ESTIMATE_HEADER,
        reports.iter().flat_map(|r| {
            r.estimates.iter().map(move |e| {
                vec![
                    r.name.clone(),
                    r.seed.to_string(),
                    e.label.clone(),
                    fmt_real(e.at),
                    e.hits.to_string(),
                    e.samples.to_string(),
                    fmt_real(e.estimate),
                    fmt_real(e.stderr),
                ]
            })
        }),
    )
}

pub fn parse_estimates_csv(text: &str) -> Result<Vec<EstimateRow>> {
    read_csv(text, &ESTIMATE_HEADER)?
        .iter()
        .map(|r| {
            Ok(EstimateRow {
                name: r[0].to_string(),
                seed: parse_int(&r[1], "seed")?,
                estimate: Estimate {
                    label: r[2].to_string(),
                    at: parse_real(&r[3], "at")?,
                    hits: parse_int(&r[4], "hits")?,
                    samples: parse_int(&r[5], "samples")?,
                    estimate: parse_real(&r[6], "estimate")?,
                    stderr: parse_real(&r[7], "stderr")?,
                },
            })
        })
        .collect()
}

const POINT_HEADER: [&str; 7] = ["level", "delta", "q_lo", "q_hi", "count", "log2_inv_delta", "log2_count"];

/// `(δ, Q, N(δ))` rows of a box-counting run.
pub fn boxdim_points_csv(estimate: &BoxDimEstimate) -> String {
    write_csv(
        &POINT_HEADER,
        estimate.points.iter().map(|p| {
            vec![
                p.level.to_string(),
                fmt_real(p.delta),
                p.q_lo.to_string(),
                p.q_hi.to_string(),
                p.count.to_string(),
                fmt_real(p.log2_inv_delta),
                fmt_real(p.log2_count),
            ]
        }),
    )
}

pub fn parse_boxdim_points_csv(text: &str) -> Result<Vec<BoxDimPoint>> {
    read_csv(text, &POINT_HEADER)?
        .iter()
        .map(|r| {
            Ok(BoxDimPoint {
                level: parse_int(&r[0], "level")? as u32,
                delta: parse_real(&r[1], "delta")?,
                q_lo: parse_int(&r[2], "q_lo")?,
                q_hi: parse_int(&r[3], "q_hi")?,
                count: parse_int(&r[4], "count")?,
                log2_inv_delta: parse_real(&r[5], "log2_inv_delta")?,
                log2_count: parse_real(&r[6], "log2_count")?,
            })
        })
        .collect()
}

/// Anything `emit_plot_data` can draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    Experiment(ExperimentReport),
    BoxDim(BoxDimEstimate),
}

impl Report {
    pub fn family(&self) -> &str {
        match self {
            Report::Experiment(r) => &r.name,
            Report::BoxDim(_) => "boxdim",
        }
    }
}

/// Tidy CSV plus a gnuplot script that reads it by column name.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub family: String,
    pub csv: String,
    pub script: String,
}

fn param_usize(r: &ExperimentReport, key: &str) -> Option<usize> {
    r.params.get(key)?.as_u64().map(|v| v as usize)
}

/// Convergence of the series driving a dichotomy report, from its ψ.
fn regime(r: &ExperimentReport) -> String {
    let parsed = (|| {
        let m = param_usize(r, "m")?;
        let n = param_usize(r, "n")?;
        let psi: ApproximatingFunction = r.params.get("psi")?.as_str()?.parse().ok()?;
        let (tau, kappa) = psi.exponents()?;
        // Σ ψ(r)^n r^{m−n−1} off Γ, Σ ψ(r)^{m−1} on Γ.
        let (e, k) = if r.name == "gamma_dichotomy" {
            (-((m - 1) as f64) * tau, -((m - 1) as f64) * kappa)
        } else {
            (m as f64 - n as f64 - 1.0 - n as f64 * tau, -(n as f64) * kappa)
        };
        Some(power_log_series(e, k))
    })();
    match parsed {
        Some(SeriesTag::Convergent) => "convergent".into(),
        Some(SeriesTag::Divergent) => "divergent".into(),
        None => "unknown".into(),
    }
}

fn gnuplot(csv_name: &str, x: &str, y: &str, err: Option<&str>, logscale: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{x}'\nset ylabel '{y}'\n"));
    if logscale {
        s.push_str("set logscale x 2\n");
    }
    match err {
        Some(e) => s.push_str(&format!(
            "plot '{csv_name}' using (column('{x}')):(column('{y}')):(column('{e}')) with yerrorbars\n"
        )),
        None => s.push_str(&format!("plot '{csv_name}' using (column('{x}')):(column('{y}')) with linespoints\n")),
    }
    s
}

/// Builds the plot artifacts for reports of one family. `csv_name` is the
/// file name the script should read.
pub fn emit_plot_data(reports: &[Report], csv_name: &str) -> Result<PlotData> {
    let first = reports.first().ok_or_else(|| invalid!("no reports to plot"))?;
    let family = first.family().to_string();
    if let Some(other) = reports.iter().find(|r| r.family() != family) {
        return Err(invalid!("mixed report families: {family} and {}", other.family()));
    }
    let (csv, script) = match first {
        Report::BoxDim(_) => {
            let rows = reports.iter().flat_map(|r| match r {
                Report::BoxDim(b) => b
                    .points
                    .iter()
                    .map(|p| vec![fmt_real(p.log2_inv_delta), fmt_real(p.log2_count), p.q_hi.to_string()])
                    .collect::<Vec<_>>(),
                Report::Experiment(_) => unreachable!("family checked"),
            });
            (
                write_csv(&["log2_inv_delta", "log2_N", "Q"], rows),
                gnuplot(csv_name, "log2_inv_delta", "log2_N", None, false),
            )
        }
        Report::Experiment(e) if e.name.ends_with("dichotomy") => {
            let rows = reports.iter().flat_map(|r| match r {
                Report::Experiment(e) => {
                    let reg = regime(e);
                    e.estimates
                        .iter()
                        .map(|est| vec![fmt_real(est.at), fmt_real(est.estimate), fmt_real(est.stderr), reg.clone()])
                        .collect::<Vec<_>>()
                }
                Report::BoxDim(_) => unreachable!("family checked"),
            });
            (write_csv(&["N", "estimate", "stderr", "regime"], rows), gnuplot(csv_name, "N", "estimate", Some("stderr"), true))
        }
        Report::Experiment(e) => {
            let label = e.estimate().label.clone();
            let rows = reports.iter().flat_map(|r| match r {
                Report::Experiment(e) => e
                    .estimates
                    .iter()
                    .map(|est| vec![fmt_real(est.at), fmt_real(est.estimate), fmt_real(est.stderr)])
                    .collect::<Vec<_>>(),
                Report::BoxDim(_) => unreachable!("family checked"),
            });
            (
                write_csv(&[label.as_str(), "estimate", "stderr"], rows),
                gnuplot(csv_name, &label, "estimate", Some("stderr"), false),
            )
        }
    };
    Ok(PlotData { family, csv, script })
}

/// Writes `<stem>.csv` and `<stem>.gp` into `dir`.
pub fn write_plot_data(reports: &[Report], dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let gp_path = dir.join(format!("{stem}.gp"));
    let data = emit_plot_data(reports, &format!("{stem}.csv"))?;
    let io = |e: std::io::Error| invalid!("cannot write plot data: {e}");
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(&csv_path, data.csv).map_err(io)?;
    fs::write(&gp_path, data.script).map_err(io)?;
    Ok((csv_path, gp_path))
}
