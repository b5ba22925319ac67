use std::fs;
use std::process::{Command, Output};

use linforms::output::parse_estimates_csv;
use linforms_cli::{Command as Sub, Format, ReportFile, RunConfig};
use proptest::prelude::*;

fn linforms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linforms")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn series_prints_tag_and_class() {
    let o = linforms(&["series", "--m", "3", "--n", "1", "--psi", "pow:1,2", "--f", "pow:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("Divergent / Full-Lebesgue"));
}

#[test]
fn dimension_prints_fraction() {
    let o = linforms(&["dimension", "--m", "2", "--n", "1", "--tau", "2"]);
    assert_eq!(stdout(&o).trim(), "5/3 ≈ 1.666667");
    let o = linforms(&["dimension", "--m", "3", "--n", "1", "--tau", "1.5"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn search_finds_exact_witness() {
    let o = linforms(&["search", "--m", "2", "--n", "1", "--X", "0.5,0.25", "--Q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "witness (1,-2), value 0");
}

#[test]
fn search_lists_psi_witnesses() {
    let o = linforms(&["search", "--m", "2", "--n", "1", "--X", "0.5,0.25", "--Q", "4", "--psi", "pow:0.01,1"]);
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().starts_with("witness (1,-2), height 2"), "{out}");
    assert!(out.contains("2 witness(es)"), "{out}");
}

#[test]
fn exit_codes() {
    let no_seed = linforms(&["measure", "dichotomy", "--m", "2", "--n", "1", "--psi", "pow:1,1", "--N", "2", "--Q", "8", "--samples", "10"]);
    assert_eq!(no_seed.status.code(), Some(2));
    assert!(stderr(&no_seed).contains("`seed`"));
    let budget = linforms(&["boxdim", "--m", "2", "--n", "1", "--tau", "2", "--levels", "10..13"]);
    assert_eq!(budget.status.code(), Some(3), "{}", stderr(&budget));
    let precondition = linforms(&["measure", "e-t", "--m", "1", "--n", "2", "--t", "4", "--samples", "10", "--seed", "1"]);
    assert_eq!(precondition.status.code(), Some(2));
    let missing = linforms(&["dimension", "--m", "2", "--n", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("`tau`"));
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"command": "dimension", "m": 2, "n": 1, "tua": 2}"#).unwrap();
    let o = linforms(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tua"));
    fs::write(&path, r#"{"command": "dimension", "m": "two", "n": 1, "tau": 2}"#).unwrap();
    let o = linforms(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(Sub::Dimension);
    c.m = Some(2);
    c.n = Some(1);
    c.tau = Some(2.0);
    let path = dir.path().join("dim.json");
    fs::write(&path, c.to_json()).unwrap();
    let o = linforms(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "5/3 ≈ 1.666667");
}

fn dichotomy_file(dir: &std::path::Path, name: &str, threads: &str) -> ReportFile {
    let out = dir.join(name);
    let o = linforms(&[
        "--threads", threads, "measure", "dichotomy", "--m", "2", "--n", "1", "--psi", "pow:1,1.5", "--N", "2,4,8",
        "--Q", "32", "--samples", "700", "--seed", "17", "--out", out.to_str().unwrap(), "--format", "both",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap()
}

#[test]
fn artifacts_round_trip_and_ignore_threads() {
    let dir = tempfile::tempdir().unwrap();
    let one = dichotomy_file(dir.path(), "one.json", "1");
    let four = dichotomy_file(dir.path(), "four.json", "4");
    let estimates = |f: &ReportFile| -> Vec<linforms::measure::Estimate> {
        f.reports
            .iter()
            .flat_map(|r| match r {
                linforms::output::Report::Experiment(e) => e.estimates.clone(),
                _ => panic!("experiment expected"),
            })
            .collect()
    };
    assert_eq!(estimates(&one), estimates(&four));
    let rows = parse_estimates_csv(&fs::read_to_string(dir.path().join("one.csv")).unwrap()).unwrap();
    let parsed: Vec<_> = rows.into_iter().map(|r| r.estimate).collect();
    assert_eq!(parsed, estimates(&one));

    let plot_dir = dir.path().join("plot");
    let o = linforms(&["plot-data", "--inputs", dir.path().join("one.json").to_str().unwrap(), "--out", plot_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(plot_dir.join("plot.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("N,estimate,stderr,regime"));
    assert_eq!(csv.lines().count(), 4);
    assert!(!csv.contains('\r'));
    assert!(fs::read_to_string(plot_dir.join("plot.gp")).unwrap().contains("plot.csv"));
}

#[test]
fn plot_data_rejects_mixed_families() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let b = dir.path().join("b.json");
    let o = linforms(&["measure", "dichotomy", "--m", "2", "--n", "1", "--psi", "pow:1,1", "--N", "2", "--Q", "8", "--samples", "20", "--seed", "1", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = linforms(&["boxdim", "--m", "2", "--n", "1", "--tau", "2", "--levels", "3..6", "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let inputs = format!("{},{}", d.display(), b.display());
    let o = linforms(&["plot-data", "--inputs", &inputs, "--out", dir.path().join("p").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = linforms(&["plot-data", "--inputs", b.to_str().unwrap(), "--out", dir.path().join("p").to_str().unwrap()]);
    let csv = fs::read_to_string(dir.path().join("p").join("plot.csv")).unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(csv.starts_with("log2_inv_delta,log2_N,Q\n"));
}

#[test]
fn table_psi_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let rows: String = (1..=64).map(|r| format!("{r},{}\n", 0.01 / r as f64)).collect();
    fs::write(&path, rows).unwrap();
    let spec = format!("table:{}", path.display());
    let o = linforms(&["search", "--m", "2", "--n", "1", "--X", "0.5,0.25", "--Q", "4", "--psi", &spec]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("witness (1,-2)"));
    let o = linforms(&["search", "--m", "2", "--n", "1", "--X", "0.5,0.25", "--Q", "4", "--psi", "table:/nonexistent.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifold_subcommands() {
    let o = linforms(&["manifold", "eta", "--m", "3", "--n", "4", "--seed", "2"]);
    assert!(stdout(&o).contains("rank deficient: true"), "{}", stderr(&o));
    let o = linforms(&["manifold", "certify", "--m", "3", "--n", "3", "--psi", "pow:1,3", "--Q", "12", "--seed", "4"]);
    assert!(stdout(&o).starts_with("member: true, c = 1"), "{}", stderr(&o));
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    let commands = prop::sample::select(vec![Sub::Search, Sub::Series, Sub::Dichotomy, Sub::Boxdim, Sub::GammaDichotomy]);
    (
        commands,
        prop::option::of(1usize..5),
        prop::option::of(1usize..4),
        prop::option::of(prop::collection::vec(-0.5f64..0.5, 0..6)),
        prop::option::of((0.01f64..10.0, 0.0f64..5.0).prop_map(|(c, t)| format!("pow:{c},{t}"))),
        prop::option::of(any::<f64>().prop_filter("finite", |v| v.is_finite())),
        prop::option::of(prop::collection::vec(1u64..100, 1..5)),
        prop::option::of(any::<u64>()),
        any::<bool>(),
        prop::sample::select(vec![Format::Json, Format::Csv, Format::Both]),
    )
        .prop_map(|(command, m, n, x, psi, tau, schedule, seed, rank_one, format)| {
            let mut c = RunConfig::new(command);
            c.m = m;
            c.n = n;
            c.x = x;
            c.psi = psi;
            c.tau = tau;
            c.schedule = schedule;
            c.seed = seed;
            c.rank_one = rank_one;
            c.format = format;
            c.output = seed.map(|s| format!("out/{s}.json").into());
            c
        })
}

proptest! {
    #[test]
    fn run_config_round_trips(c in arb_config()) {
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }
}
