//! Integer vectors making the forms `|qX|∞` small: truncated minimisation,
//! witness enumeration for ψ-approximability and the Dirichlet-type
//! guarantee.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forms::{ApproximatingFunction, MatrixPoint, Witness};
use crate::band::scan_band;
use crate::shell::{FirstMatch, Shell, Sink};

/// Truncation of "infinitely many q" to `0 < |q|∞ ≤ max_height`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_height: u64,
    pub max_witnesses: Option<usize>,
    /// Off selects the plain enumeration used as an oracle.
    pub pruning: bool,
}

impl SearchBudget {
    pub fn new(max_height: u64) -> Self {
        SearchBudget { max_height, max_witnesses: None, pruning: true }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_witnesses = Some(cap);
        self
    }

    pub fn without_pruning(mut self) -> Self {
        self.pruning = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_height < 1 {
            return Err(invalid!("search height bound must be at least 1"));
        }
        if self.max_witnesses == Some(0) {
            return Err(invalid!("witness cap must be at least 1"));
        }
        Ok(())
    }
}

/// Shells with fewer vectors than this are scanned on the calling thread.
const PARALLEL_SHELL_SIZE: u64 = 1 << 14;

fn shell_size(m: usize, h: u64) -> u64 {
    (2 * h + 1).saturating_pow(m as u32)
}

/// Leading-coordinate slabs `[a, a]` for `a = 0..=h`, or one slab for small shells.
fn slabs(m: usize, h: u64) -> Vec<(i64, i64)> {
    if m > 1 && shell_size(m, h) >= PARALLEL_SHELL_SIZE {
        (0..=h as i64).map(|a| (a, a)).collect()
    } else {
        vec![(0, h as i64)]
    }
}

#[derive(Clone)]
struct MinSink {
    best: Option<(f64, Vec<i64>)>,
}

impl MinSink {
    fn better(a: &(f64, Vec<i64>), b: &(f64, Vec<i64>)) -> bool {
        a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
    }

    fn merge(self, other: MinSink) -> MinSink {
        match (self.best, other.best) {
            (Some(a), Some(b)) => MinSink { best: Some(if MinSink::better(&b, &a) { b } else { a }) },
            (a, b) => MinSink { best: a.or(b) },
        }
    }
}

impl Sink for MinSink {
    fn bound(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0)
    }

    fn visit(&mut self, q: &[i64], value: f64) -> ControlFlow<()> {
        let replace = match &self.best {
            None => true,
            Some((v, bq)) => value < *v || (value == *v && q < bq.as_slice()),
        };
        if replace {
            self.best = Some((value, q.to_vec()));
        }
        ControlFlow::Continue(())
    }
}

/// `min{ |qX|∞ : 0 < |q|∞ ≤ Q }`, attained by the lexicographically smallest
/// minimiser among the representatives with positive leading coordinate.
pub fn min_form(x: &MatrixPoint, budget: &SearchBudget) -> Result<Witness> {
    budget.validate()?;
    let m = x.m();
    let mut sink = MinSink { best: None };
    for h in 1..=budget.max_height {
        let shell = Shell::new(x, h, budget.pruning);
        let parts = slabs(m, h);
        sink = if parts.len() == 1 {
            let mut s = sink;
            let _ = shell.scan(parts[0], &mut s);
            s
        } else {
            parts
                .par_iter()
                .map(|&slab| {
                    let mut s = sink.clone();
                    let _ = shell.scan(slab, &mut s);
                    s
                })
                .reduce(|| MinSink { best: None }, MinSink::merge)
                .merge(sink)
        };
    }
    let (_, q) = sink.best.expect("shell of height 1 is non-empty");
    Witness::new(q, x)
}

struct ThresholdSink {
    threshold: f64,
    height: u64,
    cap: usize,
    out: Vec<Witness>,
}

impl Sink for ThresholdSink {
    fn bound(&self) -> f64 {
        self.threshold
    }

    fn visit(&mut self, q: &[i64], value: f64) -> ControlFlow<()> {
        if value < self.threshold {
            self.out.push(Witness { q: q.to_vec(), height: self.height, value });
            if self.out.len() >= self.cap {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    }
}

/// Witnesses found within a search budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessList {
    pub witnesses: Vec<Witness>,
    /// Set when the cap stopped the enumeration early.
    pub truncated: bool,
}

/// All canonical q with `0 < |q|∞ ≤ Q` and `|qX|∞ < ψ(|q|∞)`, sorted by
/// height then lexicographically.
pub fn witnesses(x: &MatrixPoint, psi: &ApproximatingFunction, budget: &SearchBudget) -> Result<WitnessList> {
    budget.validate()?;
    psi.check_positive()?;
    let cap = budget.max_witnesses.map_or(usize::MAX, |c| c.saturating_add(1));
    let mut out: Vec<Witness> = Vec::new();
    for h in 1..=budget.max_height {
        let threshold = psi.eval(h as f64);
        let shell = Shell::new(x, h, budget.pruning);
        let remaining = cap - out.len();
        let found: Vec<Witness> = slabs(x.m(), h)
            .par_iter()
            .map(|&slab| {
                let mut s = ThresholdSink { threshold, height: h, cap: remaining, out: vec![] };
                let _ = shell.scan(slab, &mut s);
                s.out
            })
            .flatten()
            .collect();
        out.extend(found);
        if out.len() >= cap {
            break;
        }
    }
    let truncated = budget.max_witnesses.is_some_and(|c| out.len() > c);
    if let Some(c) = budget.max_witnesses {
        out.truncate(c);
    }
    Ok(WitnessList { witnesses: out, truncated })
}

/// Largest height `h` in `[lo, hi]` carrying a witness `|qX|∞ < ψ(h)`.
///
/// Walks the whole band once, which costs `O(hi^{m−1})` per call, and is the
/// per-sample primitive behind the tail experiments.
pub fn max_witness_height(x: &MatrixPoint, psi: &ApproximatingFunction, lo: u64, hi: u64) -> Result<Option<u64>> {
    psi.check_positive()?;
    if hi < 1 {
        return Err(invalid!("height bound must be at least 1"));
    }
    let lo = lo.max(1);
    // Suffix maxima of ψ make the interval bound valid for any ψ.
    let mut sup = vec![0.0f64; hi as usize + 2];
    for h in (1..=hi as usize).rev() {
        sup[h] = sup[h + 1].max(psi.eval(h as f64));
    }
    let mut best: Option<u64> = None;
    let _ = scan_band(
        x,
        lo,
        hi,
        |h0, _| sup[(h0.max(lo)) as usize],
        |c| {
            if best.is_none_or(|b| c.height > b) && c.value < psi.eval(c.height as f64) {
                best = Some(c.height);
            }
            ControlFlow::Continue(())
        },
    );
    Ok(best)
}

/// `m·(2^t)^{1−m/n}`.
pub fn dirichlet_bound(m: usize, n: usize, t: u32) -> f64 {
    m as f64 * 2f64.powi(t as i32).powf(1.0 - m as f64 / n as f64)
}

/// First q in height-then-lexicographic order with `|q|∞ ≤ 2^t` and
/// `|qX|∞ < m·(2^t)^{1−m/n}`. Such a q always exists; failing to find one
/// is reported as a theorem violation.
pub fn dirichlet_witness(x: &MatrixPoint, t: u32) -> Result<Witness> {
    if t < 1 || t > 30 {
        return Err(invalid!("t must lie in 1..=30, got {t}"));
    }
    let bound = dirichlet_bound(x.m(), x.n(), t);
    let q = first_below(x, 1..=(1u64 << t), |_| bound)
        .ok_or_else(|| Error::TheoremViolation(format!("no q with |q| <= 2^{t} and |qX| < {bound}")))?;
    Witness::new(q, x)
}

/// First canonical q, scanning the given heights in order, with
/// `|qX|∞ < bound(h)`.
pub(crate) fn first_below(
    x: &MatrixPoint,
    heights: impl IntoIterator<Item = u64>,
    bound: impl Fn(u64) -> f64,
) -> Option<Vec<i64>> {
    for h in heights {
        let b = bound(h);
        let mut sink = FirstMatch { bound: b, accept: |_: &[i64], v: f64| v < b, found: None };
        let _ = Shell::new(x, h, true).scan_all(&mut sink);
        if sink.found.is_some() {
            return sink.found;
        }
    }
    None
}

/// Height bound past which an invertible square X has no witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    /// `max_k Σ_i |(X^{-1})_{ik}|`; bounds `|vX^{-1}|∞ ≤ C₂|v|∞`.
    pub c2: f64,
    /// Largest h with `ψ(h) ≥ 1/C₂`, or 0.
    pub max_height: u64,
}

/// Threshold for treating `det X` as zero.
pub const SINGULAR_TOL: f64 = 1e-12;

/// For square invertible X, any witness q satisfies
/// `1 ≤ |q| = |(qX)X^{-1}| ≤ C₂·ψ(|q|)`, so heights with `ψ(h) < 1/C₂`
/// carry no witnesses.
pub fn height_obstruction(x: &MatrixPoint, psi: &ApproximatingFunction) -> Result<Obstruction> {
    if x.m() != x.n() {
        return Err(invalid!("height obstruction needs a square matrix, got {}x{}", x.m(), x.n()));
    }
    psi.validate()?;
    let a = x.to_nalgebra();
    let det = a.determinant();
    if !(det.abs() > SINGULAR_TOL) {
        return Err(Error::Singular(format!("|det X| = {:e}", det.abs())));
    }
    let inv = a.try_inverse().ok_or_else(|| Error::Singular("inversion failed".into()))?;
    let c2 = inv
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let target = 1.0 / c2;
    let ok = |h: u64| psi.eval(h as f64) >= target;
    if !ok(1) {
        return Ok(Obstruction { c2, max_height: 0 });
    }
    // Exponential then binary search on the monotone predicate.
    let mut lo = 1u64;
    let mut hi = 2u64;
    while ok(hi) {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| Error::BudgetExceeded("obstruction height overflows u64".into()))?;
        if hi > 1 << 52 {
            return Err(Error::BudgetExceeded("obstruction height exceeds 2^52".into()));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Obstruction { c2, max_height: lo })
}
