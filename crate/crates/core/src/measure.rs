//! Monte Carlo estimates of the Lebesgue measure of neighbourhood unions:
//! `Δ(ψ,t)`, `Δ(ρ,t)`, `E(t)`, and the zero-full tail experiments.
//!
//! Samples are drawn in fixed batches; batch `b` uses the ChaCha8 stream
//! `b` of the master seed, so the counts do not depend on how batches are
//! scheduled across threads.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::band::scan_band;
use crate::error::{invalid, Error, Result};
use crate::forms::{ApproximatingFunction, MatrixPoint, Omega, UbiquityConfig, DISTANCE_CONVENTION};
use crate::search::max_witness_height;

/// Samples per random stream.
pub const BATCH: usize = 256;

/// Largest number of prefix vectors `(2·hi+1)^{m−1}` scanned per sample.
pub const PREFIX_BUDGET: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// What the estimate is indexed by, e.g. `"N"` or `"t"`.
    pub label: String,
    pub at: f64,
    pub hits: u64,
    pub samples: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(label: &str, at: f64, hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate {
            label: label.to_string(),
            at,
            hits,
            samples,
            estimate: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub samples: u64,
    pub estimates: Vec<Estimate>,
    pub convention: String,
    pub duration_secs: f64,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, seed: u64, samples: u64) -> Self {
        ExperimentReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            seed,
            samples,
            estimates: vec![],
            convention: DISTANCE_CONVENTION.to_string(),
            duration_secs: 0.0,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// The first estimate; every operation here reports at least one.
    pub fn estimate(&self) -> &Estimate {
        &self.estimates[0]
    }
}

/// One random stream per batch; results come back in sample order.
pub(crate) fn sample_batches<T: Send>(
    samples: usize,
    seed: u64,
    per_sample: impl Fn(&mut ChaCha8Rng) -> T + Sync,
) -> Vec<T> {
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BATCH.min(samples - b * BATCH);
            (0..len).map(|_| per_sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// Uniform point of the cube `[−1/2, 1/2)^{mn}`.
pub fn uniform_point(m: usize, n: usize, rng: &mut impl Rng) -> MatrixPoint {
    let entries = (0..m * n).map(|_| rng.gen::<f64>() - 0.5).collect();
    MatrixPoint::new(m, n, entries).expect("entries lie in the cube")
}

pub(crate) fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(invalid!("samples must be positive"));
    }
    Ok(())
}

pub(crate) fn check_prefix_budget(m: usize, hi: u64) -> Result<()> {
    let width = 2.0 * hi as f64 + 1.0;
    if width.powi(m as i32 - 1) > PREFIX_BUDGET as f64 {
        return Err(Error::BudgetExceeded(format!(
            "height {hi} with m = {m} needs {:.3e} prefixes per sample (limit {PREFIX_BUDGET})",
            width.powi(m as i32 - 1)
        )));
    }
    Ok(())
}

fn count(bits: &[bool]) -> u64 {
    bits.iter().filter(|&&b| b).count() as u64
}

/// Whether X lies in `⋃_{lo ≤ |q| ≤ hi} Δ(R_q, Ψ(|q|))`.
pub fn in_delta_union(x: &MatrixPoint, psi: &ApproximatingFunction, lo: u64, hi: u64) -> bool {
    let lo = lo.max(1);
    let mut sup = vec![0.0f64; hi as usize + 2];
    for h in (1..=hi as usize).rev() {
        sup[h] = sup[h + 1].max(psi.big_psi(h as f64));
    }
    let max_last = (hi * hi) as f64;
    scan_band(
        x,
        lo,
        hi,
        |h0, pn2| sup[h0.max(lo) as usize] * (pn2 + max_last).sqrt(),
        |c| {
            if c.value / c.norm2.sqrt() <= psi.big_psi(c.height as f64) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )
    .is_break()
}

/// Fraction of the cube in `⋃_{k^{t−1} ≤ |q| ≤ k^t} Δ(R_q, Ψ(|q|))`.
pub fn estimate_delta_t(
    m: usize,
    n: usize,
    psi: &ApproximatingFunction,
    t: u32,
    k: f64,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    check_samples(samples)?;
    psi.check_positive()?;
    if m == 0 || n == 0 || t == 0 || !(k > 1.0) {
        return Err(invalid!("need m, n, t >= 1 and k > 1"));
    }
    let start = Instant::now();
    let lo = k.powi(t as i32 - 1).ceil() as u64;
    let hi = k.powi(t as i32).floor() as u64;
    check_prefix_budget(m, hi)?;
    let hits = sample_batches(samples, seed, |rng| in_delta_union(&uniform_point(m, n, rng), psi, lo, hi));
    let mut report = ExperimentReport::new("delta_t", seed, samples as u64)
        .param("m", m)
        .param("n", n)
        .param("psi", psi.to_string())
        .param("t", t)
        .param("k", k)
        .param("q_min", lo)
        .param("q_max", hi);
    report.estimates.push(Estimate::new("t", t as f64, count(&hits), samples as u64));
    report.duration_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Whether X has some q with `|q|∞ ≤ hi` and `|qX|∞ < bound`.
pub(crate) fn has_small_form(x: &MatrixPoint, hi: u64, bound: f64) -> bool {
    scan_band(x, 1, hi, |_, _| bound, |c| if c.value < bound { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
        .is_break()
}

/// Fraction of X admitting q with `|q| < 2^t/ω(t)` and
/// `|qX|∞ < m·(2^t)^{1−m/n}`.
pub fn estimate_e_t(m: usize, n: usize, omega: &Omega, t: u32, samples: usize, seed: u64) -> Result<ExperimentReport> {
    check_samples(samples)?;
    if !(m > n) || n == 0 {
        return Err(Error::PreconditionNotMet(format!("E(t) needs m > n, got m={m}, n={n}")));
    }
    if t == 0 || t > 30 {
        return Err(invalid!("t must lie in 1..=30"));
    }
    let start = Instant::now();
    let cap = 2f64.powi(t as i32) / omega.eval(t as f64);
    // Heights strictly below the cap.
    let hi = if cap <= 1.0 { 0 } else { (cap.ceil() as u64) - 1 };
    let bound = crate::search::dirichlet_bound(m, n, t);
    let hits = if hi == 0 {
        vec![false; samples]
    } else {
        check_prefix_budget(m, hi)?;
        sample_batches(samples, seed, |rng| has_small_form(&uniform_point(m, n, rng), hi, bound))
    };
    let mut report = ExperimentReport::new("e_t", seed, samples as u64)
        .param("m", m)
        .param("n", n)
        .param("omega", serde_json::to_value(omega).expect("omega serialises"))
        .param("omega_t", omega.eval(t as f64))
        .param("t", t)
        .param("q_max", hi)
        .param("bound", bound);
    report.estimates.push(Estimate::new("t", t as f64, count(&hits), samples as u64));
    report.duration_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Sup-norm ball (a cube window) around `center` with half-side `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.center.len() != dim {
            return Err(invalid!("ball centre has {} coordinates, need {dim}", self.center.len()));
        }
        if !(self.radius > 0.0) {
            return Err(invalid!("ball radius must be positive"));
        }
        if self.center.iter().any(|&c| c - self.radius < -0.5 || c + self.radius > 0.5) {
            return Err(invalid!("ball leaves the unit cube"));
        }
        Ok(())
    }

    pub fn whole_cube(dim: usize) -> Self {
        Ball { center: vec![0.0; dim], radius: 0.5 }
    }
}

/// Whether X lies in `Δ(ρ,t) = ⋃_{k^{t−1} < |q| ≤ k^t} Δ(R_q, ρ(t))`.
pub fn in_ubiquity_union(x: &MatrixPoint, config: &UbiquityConfig, t: u32) -> bool {
    let (lo, hi) = ubiquity_band(config.k, t);
    let rho = config.rho(t as f64);
    let max_last = (hi * hi) as f64;
    scan_band(
        x,
        lo,
        hi,
        |_, pn2| rho * (pn2 + max_last).sqrt(),
        |c| if c.value <= rho * c.norm2.sqrt() { ControlFlow::Break(()) } else { ControlFlow::Continue(()) },
    )
    .is_break()
}

fn ubiquity_band(k: f64, t: u32) -> (u64, u64) {
    let lo = k.powi(t as i32 - 1).floor() as u64 + 1;
    let hi = k.powi(t as i32).floor() as u64;
    (lo, hi)
}

/// Density of `Δ(ρ,t)` in a ball.
pub fn ubiquity_density(
    config: &UbiquityConfig,
    ball: &Ball,
    t: u32,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    check_samples(samples)?;
    config.validate(t.max(8))?;
    let (m, n) = (config.m, config.n);
    ball.validate(m * n)?;
    if t == 0 {
        return Err(invalid!("t must be positive"));
    }
    let start = Instant::now();
    let (lo, hi) = ubiquity_band(config.k, t);
    check_prefix_budget(m, hi)?;
    let hits = sample_batches(samples, seed, |rng| {
        let entries = ball.center.iter().map(|&c| c + ball.radius * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        let x = MatrixPoint::new(m, n, entries).expect("ball lies in the cube");
        in_ubiquity_union(&x, config, t)
    });
    let mut report = ExperimentReport::new("ubiquity_density", seed, samples as u64)
        .param("m", m)
        .param("n", n)
        .param("k", config.k)
        .param("t", t)
        .param("rho", config.rho(t as f64))
        .param("q_min", lo)
        .param("q_max", hi)
        .param("ball_center", ball.center.clone())
        .param("ball_radius", ball.radius);
    report.estimates.push(Estimate::new("t", t as f64, count(&hits), samples as u64));
    report.duration_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Per-N fractions from the largest witness height of each sample.
pub(crate) fn tail_reports(
    name: &str,
    heights: &[Option<u64>],
    ns: &[u64],
    seed: u64,
    base: &ExperimentReport,
) -> Vec<ExperimentReport> {
    let samples = heights.len() as u64;
    ns.iter()
        .map(|&nn| {
            let hits = heights.iter().filter(|h| h.is_some_and(|h| h >= nn)).count() as u64;
            let mut r = ExperimentReport { name: name.to_string(), seed, samples, ..base.clone() };
            r.params.insert("N".into(), nn.into());
            r.estimates = vec![Estimate::new("N", nn as f64, hits, samples)];
            r
        })
        .collect()
}

pub(crate) fn check_schedule(ns: &[u64], q_cap: u64) -> Result<()> {
    if ns.is_empty() {
        return Err(invalid!("N schedule is empty"));
    }
    if ns.iter().any(|&nn| nn < 1 || nn > q_cap) {
        return Err(invalid!("every N must lie in 1..=Q"));
    }
    Ok(())
}

/// Fraction of X with a witness `|qX|∞ < ψ(|q|)` at some height
/// `N ≤ |q| ≤ Q`, one report per N.
pub fn tail_dichotomy(
    m: usize,
    n: usize,
    psi: &ApproximatingFunction,
    ns: &[u64],
    q_cap: u64,
    samples: usize,
    seed: u64,
) -> Result<Vec<ExperimentReport>> {
    check_samples(samples)?;
    if !(m > n) || n == 0 {
        return Err(Error::PreconditionNotMet(format!("tail dichotomy needs m > n, got m={m}, n={n}")));
    }
    psi.check_positive()?;
    check_schedule(ns, q_cap)?;
    check_prefix_budget(m, q_cap)?;
    let start = Instant::now();
    let lo = *ns.iter().min().unwrap();
    let heights = sample_batches(samples, seed, |rng| {
        max_witness_height(&uniform_point(m, n, rng), psi, lo, q_cap).expect("validated")
    });
    let base = ExperimentReport::new("tail_dichotomy", seed, samples as u64)
        .param("m", m)
        .param("n", n)
        .param("psi", psi.to_string())
        .param("q_max", q_cap);
    let mut reports = tail_reports("tail_dichotomy", &heights, ns, seed, &base);
    let secs = start.elapsed().as_secs_f64();
    reports.iter_mut().for_each(|r| r.duration_secs = secs);
    Ok(reports)
}

/// `Σ_{N ≤ r ≤ R} ψ(r)^n r^{m−n−1}`.
pub fn tail_sum(m: usize, n: usize, psi: &ApproximatingFunction, from: u64, to: u64) -> f64 {
    (from..=to).map(|r| psi.eval(r as f64).powi(n as i32) * (r as f64).powi(m as i32 - n as i32 - 1)).sum()
}
