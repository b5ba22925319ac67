//! Box counting for unions of resonant-set neighbourhoods.
//!
//! The cube `[−1/2, 1/2]^{mn}` is cut into boxes of side `δ = 2^{−ℓ}`. A box
//! is counted when its interior meets `Δ(R_q, Ψ(|q|))`. With the Euclidean
//! column convention the neighbourhood is the product over columns of the
//! slab `|q·y| ≤ Ψ(|q|)·|q|₂`, and an axis box with centre `c` meets the
//! open slab iff `|q·c| < Ψ(|q|)·|q|₂ + (δ/2)·Σ|q_i|` (interval hull of the
//! linear form over the box). Box centres are dyadic, so `q·c` is exact.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forms::{euclidean_norm, height, ApproximatingFunction};
use crate::series::{dimension_formula, least_squares_slope};

/// Boxes of side `2^{−level}` in dimension `dim`, optionally restricted to
/// the boxes whose centres lie in a window `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub level: u32,
    pub dim: usize,
    pub window: Option<Vec<(f64, f64)>>,
    /// For 2×2 matrices, count only boxes that meet the rank ≤ 1 variety
    /// `det X = 0`.
    #[serde(default)]
    pub rank_one: bool,
}

impl GridSpec {
    pub fn new(level: u32, dim: usize) -> Result<Self> {
        let g = GridSpec { level, dim, window: None, rank_one: false };
        g.validate()?;
        Ok(g)
    }

    pub fn with_window(mut self, window: Vec<(f64, f64)>) -> Result<Self> {
        self.window = Some(window);
        self.validate()?;
        Ok(self)
    }

    /// Restricts the count to boxes meeting `det X = 0` (dimension 4 only).
    pub fn with_rank_one(mut self) -> Result<Self> {
        self.rank_one = true;
        self.validate()?;
        Ok(self)
    }

    pub fn delta(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    pub fn side(&self) -> usize {
        1usize << self.level
    }

    pub fn validate(&self) -> Result<()> {
        if self.level < 1 || self.level > 24 {
            return Err(invalid!("grid level must lie in 1..=24, got {}", self.level));
        }
        if self.dim < 1 {
            return Err(invalid!("grid dimension must be positive"));
        }
        if self.rank_one && self.dim != 4 {
            return Err(invalid!("the rank-one restriction needs a 2x2 grid, got dimension {}", self.dim));
        }
        if let Some(w) = &self.window {
            if w.len() != self.dim {
                return Err(invalid!("window has {} intervals, grid has dimension {}", w.len(), self.dim));
            }
            if w.iter().any(|&(a, b)| !(a <= b) || a < -0.5 || b > 0.5) {
                return Err(invalid!("window must be a non-empty box inside the unit cube"));
            }
        }
        Ok(())
    }

    /// Index range `[lo, hi)` of boxes along `axis` with centres in the window.
    fn axis_range(&self, axis: usize) -> (usize, usize) {
        let side = self.side();
        match &self.window {
            None => (0, side),
            Some(w) => {
                let (a, b) = w[axis];
                let d = self.delta();
                // Centre of box i is −1/2 + (i + 1/2)δ.
                let lo = ((a + 0.5) / d - 0.5).ceil().max(0.0) as usize;
                let hi = (((b + 0.5) / d - 0.5).floor() as i64 + 1).clamp(0, side as i64) as usize;
                (lo.min(hi), hi)
            }
        }
    }
}

#[inline]
fn center(i: usize, delta: f64) -> f64 {
    -0.5 + (i as f64 + 0.5) * delta
}

/// The slab `|q·y| < reach` in one column, `reach = Ψ|q|₂ + (δ/2)Σ|q_i|`.
#[derive(Clone, Debug)]
struct Slab {
    q: Vec<i64>,
    reach: f64,
}

impl Slab {
    fn new(q: &[i64], big_psi: f64, delta: f64) -> Self {
        let l1: f64 = q.iter().map(|v| v.unsigned_abs() as f64).sum();
        Slab { q: q.to_vec(), reach: big_psi * euclidean_norm(q) + 0.5 * delta * l1 }
    }

    #[inline]
    fn hits(&self, partial: f64, last: usize, delta: f64) -> bool {
        let k = self.q.len() - 1;
        (partial + self.q[k] as f64 * center(last, delta)).abs() < self.reach
    }

    /// Indices `b` in `[lo, hi)` of the last axis with `|partial + q_last·c_b| < reach`.
    fn last_axis(&self, partial: f64, lo: usize, hi: usize, delta: f64) -> Option<(usize, usize)> {
        if lo >= hi {
            return None;
        }
        let ql = self.q[self.q.len() - 1] as f64;
        if ql == 0.0 {
            return (partial.abs() < self.reach).then_some((lo, hi));
        }
        let (a, b) = ((-self.reach - partial) / ql, (self.reach - partial) / ql);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        // c_b = −1/2 + (b + 1/2)δ, solved for b then nudged to the exact predicate.
        let to_idx = |c: f64| (c + 0.5) / delta - 0.5;
        // Clamped in f64 first so that far-away slabs cannot overflow the cast.
        let clamp = |v: f64| v.clamp(lo as f64 - 1.0, hi as f64) as i64;
        let mut s = clamp(to_idx(a).floor() + 1.0).max(lo as i64);
        let mut e = clamp(to_idx(b).ceil() - 1.0).min(hi as i64 - 1);
        while s > lo as i64 && self.hits(partial, (s - 1) as usize, delta) {
            s -= 1;
        }
        while s <= e && !self.hits(partial, s as usize, delta) {
            s += 1;
        }
        while e < hi as i64 - 1 && e >= s && self.hits(partial, (e + 1) as usize, delta) {
            e += 1;
        }
        while e >= s && !self.hits(partial, e as usize, delta) {
            e -= 1;
        }
        (s <= e).then(|| (s as usize, e as usize + 1))
    }
}

/// Bit set over the boxes of one column grid (`side^m` boxes).
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)] }
    }

    fn fill(&mut self, start: usize, end: usize) {
        if start >= end {
            return;
        }
        let (sw, ew) = (start / 64, (end - 1) / 64);
        let first = !0u64 << (start % 64);
        let last = !0u64 >> (63 - (end - 1) % 64);
        if sw == ew {
            self.words[sw] |= first & last;
        } else {
            self.words[sw] |= first;
            self.words[sw + 1..ew].iter_mut().for_each(|w| *w = !0);
            self.words[ew] |= last;
        }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Odometer step over index ranges; false once every index has wrapped.
fn advance(idx: &mut [usize], ranges: &[(usize, usize)]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < ranges[k].1 {
            return true;
        }
        idx[k] = ranges[k].0;
    }
    false
}

/// Axis ranges of one column inside the grid window.
fn column_ranges(grid: &GridSpec, col: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m).map(|i| grid.axis_range(col * m + i)).collect()
}

/// Rasterises the union of slabs into a bit set over one column grid
/// (row-major, last axis fastest), restricted to the given axis ranges.
fn rasterize(slabs: &[Slab], m: usize, side: usize, ranges: &[(usize, usize)], delta: f64) -> Bits {
    let mut bits = Bits::new(side.pow(m as u32));
    let (llo, lhi) = ranges[m - 1];
    let prefix = &ranges[..m - 1];
    if prefix.iter().any(|r| r.0 >= r.1) {
        return bits;
    }
    for slab in slabs {
        let mut idx: Vec<usize> = prefix.iter().map(|r| r.0).collect();
        loop {
            let mut partial = 0.0;
            let mut base = 0usize;
            for (i, &b) in idx.iter().enumerate() {
                partial += slab.q[i] as f64 * center(b, delta);
                base = base * side + b;
            }
            base *= side;
            if let Some((s, e)) = slab.last_axis(partial, llo, lhi, delta) {
                bits.fill(base + s, base + e);
            }
            if !advance(&mut idx, prefix) {
                break;
            }
        }
    }
    bits
}

/// Number of boxes of one column grid meeting the slab union, computed one
/// leading-axis plane at a time to keep the working set small.
fn count_union_single_column(slabs: &[Slab], m: usize, grid: &GridSpec) -> u64 {
    let side = grid.side();
    let delta = grid.delta();
    let ranges = column_ranges(grid, 0, m);
    if m <= 2 {
        return rasterize(slabs, m, side, &ranges, delta).count();
    }
    // m = 3: planes b1 = const, each a 2-D problem with a shifted partial sum.
    let (lo0, hi0) = ranges[0];
    (lo0..hi0)
        .into_par_iter()
        .map(|b1| {
            let c1 = center(b1, delta);
            let mut bits = Bits::new(side * side);
            let (lo1, hi1) = ranges[1];
            let (lo2, hi2) = ranges[2];
            for slab in slabs {
                let p1 = slab.q[0] as f64 * c1;
                for b2 in lo1..hi1 {
                    let partial = p1 + slab.q[1] as f64 * center(b2, delta);
                    if let Some((s, e)) = slab.last_axis(partial, lo2, hi2, delta) {
                        bits.fill(b2 * side + s, b2 * side + e);
                    }
                }
            }
            bits.count()
        })
        .sum()
}

/// Boxes meeting `Δ(R_q, Ψ(|q|))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCount {
    pub boxes: u64,
    /// Boxes of a single column grid meeting the slab; `boxes = per_column^n`.
    pub per_column: u64,
    /// `boxes · Ψ(|q|)^{(m−1)n}`.
    pub constant: f64,
}

/// Number of grid boxes of side δ meeting `Δ(R_q, Ψ(|q|))` in `I^{mn}`.
pub fn cover_count(q: &[i64], n: usize, psi: &ApproximatingFunction, grid: &GridSpec) -> Result<CoverCount> {
    let m = q.len();
    if m == 0 || q.iter().all(|&v| v == 0) {
        return Err(invalid!("q must be non-zero"));
    }
    if n == 0 || grid.dim != m * n {
        return Err(invalid!("grid dimension {} does not match m*n = {}", grid.dim, m * n));
    }
    if grid.window.is_some() {
        return Err(Error::Unsupported("cover_count counts over the whole cube".into()));
    }
    if (grid.side() as f64).powi(m as i32) > (1u64 << 32) as f64 {
        return Err(Error::BudgetExceeded(format!("column grid 2^{}^{m} too large", grid.level)));
    }
    psi.check_positive()?;
    let big = psi.big_psi(height(q) as f64);
    let slab = Slab::new(q, big, grid.delta());
    let per_column = count_union_single_column(std::slice::from_ref(&slab), m, grid);
    let boxes = per_column.pow(n as u32);
    let constant = boxes as f64 * big.powi(((m - 1) * n) as i32);
    Ok(CoverCount { boxes, per_column, constant })
}

/// Canonical q with `lo ≤ |q|∞ ≤ hi`.
fn band_vectors(m: usize, lo: u64, hi: u64) -> Vec<Vec<i64>> {
    let hi = hi as i64;
    let side = (2 * hi + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(m as u32) {
        let mut rem = idx;
        let mut q = vec![0i64; m];
        for c in q.iter_mut().rev() {
            *c = (rem % side) as i64 - hi;
            rem /= side;
        }
        let h = height(&q);
        if h >= lo && h <= hi as u64 && crate::forms::is_canonical(&q) {
            out.push(q);
        }
    }
    out
}

fn check_box_limits(m: usize, n: usize, q_hi: u64, grid: &GridSpec) -> Result<()> {
    // Largest level per shape; the bounds keep a single run within minutes.
    let max_level = match (m, n) {
        (2, 1) => 12,
        (3, 1) => 10,
        (2, 2) => 8,
        _ => return Err(Error::Unsupported(format!("box counting supports (m,n) in {{(2,1),(3,1),(2,2)}}, got ({m},{n})"))),
    };
    if grid.dim != m * n {
        return Err(invalid!("grid dimension {} does not match m*n = {}", grid.dim, m * n));
    }
    if grid.level > max_level {
        return Err(Error::BudgetExceeded(format!("delta = 2^-{} below 2^-{max_level} for ({m},{n})", grid.level)));
    }
    if q_hi > 512 {
        return Err(Error::BudgetExceeded(format!("Q = {q_hi} exceeds 512")));
    }
    if q_hi < 1 {
        return Err(invalid!("Q must be at least 1"));
    }
    Ok(())
}

/// Number of boxes meeting `⋃_{q_lo ≤ |q| ≤ q_hi} Δ(R_q, Ψ(|q|))` for
/// `ψ(r) = r^{−τ}`.
pub fn band_box_count(m: usize, n: usize, tau: f64, q_lo: u64, q_hi: u64, grid: &GridSpec) -> Result<u64> {
    grid.validate()?;
    check_box_limits(m, n, q_hi, grid)?;
    let psi = ApproximatingFunction::Power { c: 1.0, tau };
    psi.check_positive()?;
    let delta = grid.delta();
    let slabs: Vec<Slab> = band_vectors(m, q_lo.max(1), q_hi)
        .iter()
        .map(|q| Slab::new(q, psi.big_psi(height(q) as f64), delta))
        .collect();
    if slabs.is_empty() {
        return Ok(0);
    }
    if n == 1 {
        return Ok(count_union_single_column(&slabs, m, grid));
    }
    Ok(count_union_two_columns(&slabs, grid))
}

/// `N(δ)` for the union over all `0 < |q| ≤ Q`.
pub fn truncated_box_count(m: usize, n: usize, tau: f64, q_max: u64, grid: &GridSpec) -> Result<u64> {
    band_box_count(m, n, tau, 1, q_max, grid)
}

/// m = 2, n = 2: `N = Σ_{b₁} |⋃_{q : b₁ ∈ S(q)} S(q)|` over first-column
/// boxes `b₁`, grouping `b₁` by the set of slabs containing it.
fn count_union_two_columns(slabs: &[Slab], grid: &GridSpec) -> u64 {
    let side = grid.side();
    let delta = grid.delta();
    let r1 = column_ranges(grid, 0, 2);
    let r2 = column_ranges(grid, 1, 2);
    let second: Vec<Bits> = slabs.iter().map(|s| rasterize(std::slice::from_ref(s), 2, side, &r2, delta)).collect();
    let first: Vec<Bits> = slabs.iter().map(|s| rasterize(std::slice::from_ref(s), 2, side, &r1, delta)).collect();
    let words = slabs.len().div_ceil(64);
    let mut groups: HashMap<Vec<u64>, Vec<(usize, usize)>> = HashMap::new();
    for a in r1[0].0..r1[0].1 {
        for b in r1[1].0..r1[1].1 {
            let cell = a * side + b;
            let mut sig = vec![0u64; words];
            for (k, f) in first.iter().enumerate() {
                if f.get(cell) {
                    sig[k / 64] |= 1 << (k % 64);
                }
            }
            if sig.iter().any(|&w| w != 0) {
                groups.entry(sig).or_default().push((a, b));
            }
        }
    }
    let groups: Vec<(Vec<u64>, Vec<(usize, usize)>)> = groups.into_iter().collect();
    groups
        .par_iter()
        .map(|(sig, cells)| {
            let mut acc = Bits::new(side * side);
            for (k, s) in second.iter().enumerate() {
                if sig[k / 64] >> (k % 64) & 1 == 1 {
                    for (w, v) in acc.words.iter_mut().zip(&s.words) {
                        *w |= v;
                    }
                }
            }
            if !grid.rank_one {
                return acc.count() * cells.len() as u64;
            }
            let mut total = 0u64;
            for &(a, b) in cells {
                for c in r2[0].0..r2[0].1 {
                    for d in r2[1].0..r2[1].1 {
                        if acc.get(c * side + d) && meets_rank_one([a, b, c, d], delta) {
                            total += 1;
                        }
                    }
                }
            }
            total
        })
        .sum()
}

/// Whether the closed box with index `[x11, x21, x12, x22]` meets
/// `x11·x22 − x21·x12 = 0`. The determinant is a difference of products of
/// independent coordinates, so interval arithmetic gives its exact range,
/// and the box is connected.
fn meets_rank_one(idx: [usize; 4], delta: f64) -> bool {
    let iv = |i: usize| {
        let c = center(i, delta);
        (c - 0.5 * delta, c + 0.5 * delta)
    };
    let mul = |(a, b): (f64, f64), (c, d): (f64, f64)| {
        let p = [a * c, a * d, b * c, b * d];
        (p.iter().cloned().fold(f64::INFINITY, f64::min), p.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let (p_lo, p_hi) = mul(iv(idx[0]), iv(idx[3]));
    let (r_lo, r_hi) = mul(iv(idx[1]), iv(idx[2]));
    p_lo - r_hi <= 0.0 && 0.0 <= p_hi - r_lo
}

/// One scale of a box-counting schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub level: u32,
    pub q_lo: u64,
    pub q_hi: u64,
}

/// Couples the height band to the scale: `Q = ⌈2^{ℓ/(τ+1)}⌉` so that
/// `Ψ(Q) ≈ δ`, with heights `Q·2^{−1/(τ+1)} < |q| ≤ Q`, i.e. the heights
/// whose `Ψ` lies within a factor 2 of `Ψ(Q)`. Smaller heights have
/// neighbourhoods much wider than δ and saturate the count.
pub fn coupled_schedule(tau: f64, levels: impl IntoIterator<Item = u32>) -> Vec<ScaleEntry> {
    let ratio = 2f64.powf(1.0 / (tau + 1.0));
    levels
        .into_iter()
        .map(|level| {
            let q_hi = (2f64.powf(level as f64 / (tau + 1.0)) - 1e-9).ceil().max(1.0) as u64;
            let q_lo = (q_hi as f64 / ratio).floor() as u64 + 1;
            ScaleEntry { level, q_lo: q_lo.min(q_hi), q_hi }
        })
        .collect()
}

/// Part of the cube over which boxes are counted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Cube,
    /// Boxes whose centres lie in the given axis intervals.
    Window(Vec<(f64, f64)>),
    /// 2×2 only: boxes that also meet `det X = 0`.
    RankOne,
}

impl Region {
    fn apply(&self, grid: GridSpec) -> Result<GridSpec> {
        match self {
            Region::Cube => Ok(grid),
            Region::Window(w) => grid.with_window(w.clone()),
            Region::RankOne => grid.with_rank_one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimPoint {
    pub level: u32,
    pub delta: f64,
    pub q_lo: u64,
    pub q_hi: u64,
    pub count: u64,
    pub log2_inv_delta: f64,
    pub log2_count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimEstimate {
    pub m: usize,
    pub n: usize,
    pub tau: f64,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub target: f64,
    pub points: Vec<BoxDimPoint>,
    pub region: Region,
    pub label: String,
}

/// Least-squares slope of `log₂ N(δ)` against `log₂(1/δ)` along a schedule.
pub fn boxdim_estimate(
    m: usize,
    n: usize,
    tau: f64,
    schedule: &[ScaleEntry],
    region: Region,
) -> Result<BoxDimEstimate> {
    if schedule.len() < 4 {
        return Err(invalid!("schedule needs at least 4 scales, got {}", schedule.len()));
    }
    let mut levels: Vec<u32> = schedule.iter().map(|e| e.level).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() != schedule.len() {
        return Err(invalid!("schedule repeats a scale"));
    }
    if schedule.iter().any(|e| e.q_lo > e.q_hi) {
        return Err(invalid!("schedule has an empty height band"));
    }
    let target = dimension_formula(m, n, tau)?;
    let mut points = Vec::with_capacity(schedule.len());
    for e in schedule {
        let grid = region.apply(GridSpec::new(e.level, m * n)?)?;
        let count = band_box_count(m, n, tau, e.q_lo, e.q_hi, &grid)?;
        if count == 0 {
            return Err(invalid!("no boxes counted at level {}", e.level));
        }
        points.push(BoxDimPoint {
            level: e.level,
            delta: grid.delta(),
            q_lo: e.q_lo,
            q_hi: e.q_hi,
            count,
            log2_inv_delta: e.level as f64,
            log2_count: (count as f64).log2(),
        });
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.log2_inv_delta, p.log2_count)).collect();
    let slope = least_squares_slope(&xy).ok_or_else(|| invalid!("degenerate schedule"))?;
    let k = xy.len() as f64;
    let intercept = xy.iter().map(|p| p.1).sum::<f64>() / k - slope * xy.iter().map(|p| p.0).sum::<f64>() / k;
    let residuals = xy.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    Ok(BoxDimEstimate {
        m,
        n,
        tau,
        slope,
        intercept,
        residuals,
        target,
        points,
        region,
        label: "box-dimension proxy".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi_with_big_psi_at_one(v: f64) -> ApproximatingFunction {
        ApproximatingFunction::Power { c: v, tau: 1.0 }
    }

    #[test]
    fn axis_slab_example() {
        let g = GridSpec::new(2, 2).unwrap();
        let c = cover_count(&[1, 0], 1, &psi_with_big_psi_at_one(0.25), &g).unwrap();
        assert_eq!(c.boxes, 8);
        let c = cover_count(&[1, 0], 1, &psi_with_big_psi_at_one(1.0), &GridSpec::new(5, 2).unwrap()).unwrap();
        assert_eq!(c.boxes, 1024);
    }

    #[test]
    fn bits_fill_ranges() {
        let mut b = Bits::new(200);
        b.fill(3, 3);
        b.fill(60, 130);
        b.fill(199, 200);
        assert_eq!(b.count(), 71);
        assert!(b.get(60) && b.get(129) && !b.get(130) && b.get(199));
    }

    #[test]
    fn schedule_shape() {
        let s = coupled_schedule(2.0, 4..=6);
        assert_eq!(s[0], ScaleEntry { level: 4, q_lo: 3, q_hi: 3 });
        assert_eq!(s[2], ScaleEntry { level: 6, q_lo: 4, q_hi: 4 });
        assert_eq!(coupled_schedule(3.0, [1])[0], ScaleEntry { level: 1, q_lo: 2, q_hi: 2 });
        assert!(boxdim_estimate(2, 1, 2.0, &s, Region::Cube).is_err());
    }

    #[test]
    fn limits() {
        let g = GridSpec::new(13, 2).unwrap();
        assert!(matches!(truncated_box_count(2, 1, 1.0, 4, &g), Err(Error::BudgetExceeded(_))));
        let g = GridSpec::new(4, 2).unwrap();
        assert!(matches!(truncated_box_count(2, 1, 1.0, 600, &g), Err(Error::BudgetExceeded(_))));
        let g = GridSpec::new(4, 3).unwrap();
        assert!(matches!(truncated_box_count(1, 3, 1.0, 4, &g), Err(Error::Unsupported(_))));
        assert!(GridSpec::new(0, 2).is_err());
        assert!(GridSpec::new(3, 2).unwrap().with_window(vec![(0.0, 0.6), (0.0, 0.1)]).is_err());
    }

    #[test]
    fn window_restricts_count() {
        let g = GridSpec::new(4, 2).unwrap();
        let full = truncated_box_count(2, 1, 2.0, 3, &g).unwrap();
        let half = truncated_box_count(2, 1, 2.0, 3, &g.clone().with_window(vec![(0.0, 0.5), (-0.5, 0.5)]).unwrap()).unwrap();
        assert!(half <= full && half > 0);
    }
}
