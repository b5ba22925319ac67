use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use linforms::boxdim::{boxdim_estimate, coupled_schedule, Region};
use linforms::forms::{ApproximatingFunction, DimensionFunction, MatrixPoint, Omega, UbiquityConfig, Witness};
use linforms::manifold::{certify_a_membership, eta_embed, gamma_dichotomy, EmbeddingInput};
use linforms::measure::{estimate_delta_t, estimate_e_t, tail_dichotomy, ubiquity_density, Ball, ExperimentReport};
use linforms::output::{boxdim_points_csv, estimates_csv, fmt_real, write_plot_data, Report};
use linforms::search::{dirichlet_witness, height_obstruction, min_form, witnesses, SearchBudget};
use linforms::series::{as_fraction, build_omega, classify_series, dimension_formula, verdict};

use crate::config::{Command, Format, RunConfig};
use crate::CliError;

/// Printed lines plus the artifacts that `--out` writes.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub json: Value,
    pub csv: Option<String>,
}

/// JSON layout of experiment artifacts, read back by `plot-data`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub config: RunConfig,
    pub reports: Vec<Report>,
}

/// Reads `table:path` (two columns `r,value`, no header) or parses a
/// closed-form spec.
pub fn load_psi(spec: &str) -> Result<ApproximatingFunction, CliError> {
    if let Some(path) = spec.strip_prefix("table:") {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Io(format!("cannot read table {path}: {e}")))?;
        let mut points = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Config(format!("table {path}: {e}")))?;
            let get = |k: usize| -> Result<f64, CliError> {
                rec.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| CliError::Config(format!("table {path}: row {} needs two numbers", i + 1)))
            };
            points.push((get(0)?, get(1)?));
        }
        return Ok(ApproximatingFunction::table(points)?);
    }
    let psi: ApproximatingFunction = spec.parse()?;
    psi.validate()?;
    Ok(psi)
}

fn load_f(spec: &str) -> Result<DimensionFunction, CliError> {
    let f: DimensionFunction = spec.parse()?;
    f.validate()?;
    Ok(f)
}

fn fmt_q(q: &[i64]) -> String {
    let parts: Vec<String> = q.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn fmt_witness(w: &Witness) -> String {
    format!("witness {}, height {}, value {}", fmt_q(&w.q), w.height, w.value)
}

fn witnesses_csv(ws: &[Witness]) -> String {
    let mut s = String::from("q,height,value\n");
    for w in ws {
        let q: Vec<String> = w.q.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{},{},{}\n", q.join(" "), w.height, fmt_real(w.value)));
    }
    s
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serialises")
}

struct Ctx<'a> {
    c: &'a RunConfig,
}

impl Ctx<'_> {
    fn m(&self) -> usize {
        self.c.m.expect("validated")
    }
    fn n(&self) -> usize {
        self.c.n.expect("validated")
    }
    fn seed(&self) -> u64 {
        self.c.seed.expect("validated")
    }
    fn samples(&self) -> usize {
        self.c.samples.expect("validated")
    }
    fn schedule(&self) -> &[u64] {
        self.c.schedule.as_deref().expect("validated")
    }
    fn q(&self) -> u64 {
        self.c.q.expect("validated")
    }
    fn x(&self) -> Result<MatrixPoint, CliError> {
        Ok(MatrixPoint::new(self.m(), self.n(), self.c.x.clone().expect("validated"))?)
    }
    fn psi(&self) -> Result<ApproximatingFunction, CliError> {
        load_psi(self.c.psi.as_deref().expect("validated"))
    }
    fn f(&self) -> Result<DimensionFunction, CliError> {
        load_f(self.c.f.as_deref().expect("validated"))
    }
    fn t_values(&self) -> Result<Vec<u32>, CliError> {
        self.schedule()
            .iter()
            .map(|&t| u32::try_from(t).map_err(|_| CliError::Config(format!("field `schedule`: t = {t} too large"))))
            .collect()
    }
}

fn experiments(c: &RunConfig, reports: Vec<ExperimentReport>) -> Outcome {
    let lines = reports
        .iter()
        .flat_map(|r| {
            r.estimates.iter().map(move |e| {
                format!("{} {}={} estimate {:.6} ± {:.6} ({} / {})", r.name, e.label, e.at, e.estimate, e.stderr, e.hits, e.samples)
            })
        })
        .collect();
    let csv = estimates_csv(&reports);
    let file = ReportFile {
        command: c.command.name().to_string(),
        config: c.clone(),
        reports: reports.into_iter().map(Report::Experiment).collect(),
    };
    Outcome { lines, json: value(&file), csv: Some(csv) }
}

fn single(json: Value, lines: Vec<String>) -> Outcome {
    Outcome { lines, json, csv: None }
}

fn dispatch(c: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = Ctx { c };
    Ok(match c.command {
        Command::Search => {
            let x = ctx.x()?;
            let budget = SearchBudget::new(ctx.q());
            match &c.psi {
                None => {
                    let w = min_form(&x, &budget)?;
                    let line = format!("witness {}, value {}", fmt_q(&w.q), w.value);
                    Outcome { lines: vec![line], csv: Some(witnesses_csv(std::slice::from_ref(&w))), json: value(&w) }
                }
                Some(_) => {
                    let list = witnesses(&x, &ctx.psi()?, &budget)?;
                    let mut lines: Vec<String> = list.witnesses.iter().map(fmt_witness).collect();
                    lines.push(format!("{} witness(es){}", list.witnesses.len(), if list.truncated { ", truncated" } else { "" }));
                    Outcome { lines, csv: Some(witnesses_csv(&list.witnesses)), json: value(&list) }
                }
            }
        }
        Command::Dirichlet => {
            let x = ctx.x()?;
            let mut out = Vec::new();
            let mut lines = Vec::new();
            for t in ctx.t_values()? {
                let w = dirichlet_witness(&x, t)?;
                lines.push(format!("t={t} {}", fmt_witness(&w)));
                out.push(json!({ "t": t, "witness": w }));
            }
            single(Value::Array(out), lines)
        }
        Command::Obstruction => {
            let o = height_obstruction(&ctx.x()?, &ctx.psi()?)?;
            let line = format!("C2 = {}, no witnesses above height {}", o.c2, o.max_height);
            single(value(&o), vec![line])
        }
        Command::Series => {
            let (psi, f) = (ctx.psi()?, ctx.f()?);
            let series = classify_series(ctx.m(), ctx.n(), &f, &psi)?;
            let v = verdict(ctx.m(), ctx.n(), &f, &psi)?;
            let mut lines = vec![format!("{:?} / {}", series.tag, v.class.label())];
            if let Some(w) = &series.warning {
                lines.push(format!("warning: {w}"));
            }
            lines.push(format!("case: {:?}", v.justification.case));
            single(json!({ "series": series, "verdict": v }), lines)
        }
        Command::Dimension => {
            let d = dimension_formula(ctx.m(), ctx.n(), c.tau.expect("validated"))?;
            let line = match as_fraction(d, 1000) {
                Some((p, 1)) => format!("{p}"),
                Some((p, q)) => format!("{p}/{q} ≈ {d:.6}"),
                None => format!("{d:.6}"),
            };
            single(json!({ "dimension": d }), vec![line])
        }
        Command::Omega => {
            let horizon = c.horizon.unwrap_or(1 << 20);
            let o = build_omega(ctx.m(), ctx.n(), &ctx.f()?, &ctx.psi()?, horizon)?;
            let lines = vec![
                format!("{} blocks, last breakpoint {}", o.block_sums.len(), o.breakpoints.last().unwrap()),
                format!("modified sum {} > harmonic bound {}", o.modified_sum, o.harmonic_bound),
            ];
            single(value(&o), lines)
        }
        Command::DeltaT => {
            let psi = ctx.psi()?;
            let k = c.k.unwrap_or(2.0);
            let reports = ctx
                .t_values()?
                .into_iter()
                .map(|t| estimate_delta_t(ctx.m(), ctx.n(), &psi, t, k, ctx.samples(), ctx.seed()))
                .collect::<Result<Vec<_>, _>>()?;
            experiments(c, reports)
        }
        Command::ET => {
            let omega = Omega::identity();
            let reports = ctx
                .t_values()?
                .into_iter()
                .map(|t| estimate_e_t(ctx.m(), ctx.n(), &omega, t, ctx.samples(), ctx.seed()))
                .collect::<Result<Vec<_>, _>>()?;
            experiments(c, reports)
        }
        Command::Ubiquity => {
            let config = UbiquityConfig::new(ctx.m(), ctx.n(), Omega::identity())?;
            let ball = Ball::whole_cube(ctx.m() * ctx.n());
            let reports = ctx
                .t_values()?
                .into_iter()
                .map(|t| ubiquity_density(&config, &ball, t, ctx.samples(), ctx.seed()))
                .collect::<Result<Vec<_>, _>>()?;
            experiments(c, reports)
        }
        Command::Dichotomy => {
            let r = tail_dichotomy(ctx.m(), ctx.n(), &ctx.psi()?, ctx.schedule(), ctx.q(), ctx.samples(), ctx.seed())?;
            experiments(c, r)
        }
        Command::GammaDichotomy => {
            let r = gamma_dichotomy(ctx.m(), ctx.n(), &ctx.psi()?, ctx.schedule(), ctx.q(), ctx.samples(), ctx.seed())?;
            experiments(c, r)
        }
        Command::Boxdim => {
            let tau = c.tau.expect("validated");
            let levels = ctx
                .schedule()
                .iter()
                .map(|&l| u32::try_from(l).map_err(|_| CliError::Config(format!("field `schedule`: level {l} too large"))))
                .collect::<Result<Vec<_>, _>>()?;
            let region = if c.rank_one { Region::RankOne } else { Region::Cube };
            let est = boxdim_estimate(ctx.m(), ctx.n(), tau, &coupled_schedule(tau, levels), region)?;
            let mut lines: Vec<String> = est
                .points
                .iter()
                .map(|p| format!("level {} Q in [{}, {}] N = {}", p.level, p.q_lo, p.q_hi, p.count))
                .collect();
            lines.push(format!("slope {:.4} (target {:.4}, {})", est.slope, est.target, est.label));
            let csv = boxdim_points_csv(&est);
            let file = ReportFile { command: c.command.name().into(), config: c.clone(), reports: vec![Report::BoxDim(est)] };
            Outcome { lines, json: value(&file), csv: Some(csv) }
        }
        Command::Eta => {
            let input = EmbeddingInput::seeded(ctx.m(), ctx.n(), ctx.seed())?;
            let p = eta_embed(&input, ctx.n())?;
            let lines = vec![format!("minor defect {:e}, rank deficient: {}", p.defect, p.rank_deficient)];
            single(value(&p), lines)
        }
        Command::Certify => {
            let input = EmbeddingInput::seeded(ctx.m(), ctx.n(), ctx.seed())?;
            let p = eta_embed(&input, ctx.n())?;
            let cert = certify_a_membership(&p, &ctx.psi()?, ctx.q())?;
            let lines = vec![format!("member: {}, c = {}, {} base witness(es) checked", cert.member, cert.c, cert.checked.len())];
            single(json!({ "point": p, "certification": cert }), lines)
        }
        Command::PlotData => {
            let mut reports = Vec::new();
            for path in &c.inputs {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                let file: ReportFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{} is not a report file: {e}", path.display())))?;
                reports.extend(file.reports);
            }
            let dir = c.output.as_deref().expect("validated");
            let (csv, gp) = write_plot_data(&reports, dir, "plot")?;
            let lines = vec![format!("wrote {} and {}", csv.display(), gp.display())];
            return Ok(Outcome { lines, json: Value::Null, csv: None });
        }
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Validates, dispatches and writes the artifacts requested by the config.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let mut outcome = dispatch(config)?;
    if config.command == Command::PlotData {
        return Ok(outcome);
    }
    if let Some(out) = &config.output {
        let json_text = serde_json::to_string_pretty(&outcome.json).expect("json serialises") + "\n";
        let csv_text = || {
            outcome
                .csv
                .clone()
                .ok_or_else(|| CliError::Config(format!("{} has no csv output", config.command.name())))
        };
        match config.format {
            Format::Json => write(out, &json_text)?,
            Format::Csv => write(out, &csv_text()?)?,
            Format::Both => {
                let csv = csv_text()?;
                write(&out.with_extension("json"), &json_text)?;
                write(&out.with_extension("csv"), &csv)?;
            }
        }
        outcome.lines.push(format!("wrote {}", out.display()));
    }
    Ok(outcome)
}
