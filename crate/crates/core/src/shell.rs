//! Depth-first enumeration of the height-h shell `{q : |q|∞ = h}`, one
//! representative per `{q, −q}` pair, in lexicographic order.
//!
//! Coordinates are fixed one at a time. With pruning on, a branch is cut
//! when even the best completion of the partial column sums exceeds the
//! sink's current bound, and the last coordinate is solved as an interval
//! instead of being scanned. Every reported value is recomputed with the
//! same summation order as [`crate::forms::form_value`].

use std::ops::ControlFlow;

use crate::forms::MatrixPoint;

/// Receives candidates from a shell scan.
pub(crate) trait Sink {
    /// Inclusive pruning threshold: the scan may skip any q whose form value
    /// provably exceeds this. `f64::INFINITY` disables pruning.
    fn bound(&self) -> f64;
    fn visit(&mut self, q: &[i64], value: f64) -> ControlFlow<()>;
}

pub(crate) struct Shell<'a> {
    x: &'a MatrixPoint,
    h: i64,
    prune: bool,
    /// `suffix[k*n + j] = h·Σ_{i≥k} |x_ij|`.
    suffix: Vec<f64>,
    slack: f64,
}

impl<'a> Shell<'a> {
    pub(crate) fn new(x: &'a MatrixPoint, h: u64, prune: bool) -> Self {
        let (m, n) = (x.m(), x.n());
        let h = h as i64;
        let mut suffix = vec![0.0; (m + 1) * n];
        for k in (0..m).rev() {
            for j in 0..n {
                suffix[k * n + j] = suffix[(k + 1) * n + j] + x.get(k, j).abs();
            }
        }
        let hf = h as f64;
        suffix.iter_mut().for_each(|v| *v *= hf);
        // Rounding in the partial sums is far below this for |q| ≤ 2^20.
        let slack = 1e-10 * (1.0 + hf);
        Shell { x, h, prune, suffix, slack }
    }

    /// Scans the shell with the leading coordinate restricted to `lead`
    /// (intersected with `[0, h]`).
    pub(crate) fn scan(&self, lead: (i64, i64), sink: &mut impl Sink) -> ControlFlow<()> {
        let (m, n) = (self.x.m(), self.x.n());
        let mut q = vec![0i64; m];
        let mut sums = vec![0.0f64; (m + 1) * n];
        self.level(0, true, false, lead, &mut q, &mut sums, sink)
    }

    pub(crate) fn scan_all(&self, sink: &mut impl Sink) -> ControlFlow<()> {
        self.scan((0, self.h), sink)
    }

    #[allow(clippy::too_many_arguments)]
    fn level(
        &self,
        k: usize,
        all_zero: bool,
        hit: bool,
        lead: (i64, i64),
        q: &mut [i64],
        sums: &mut [f64],
        sink: &mut impl Sink,
    ) -> ControlFlow<()> {
        let (m, n) = (self.x.m(), self.x.n());
        let h = self.h;
        let last = k + 1 == m;
        let (mut lo, mut hi) = if all_zero { (if last { 1 } else { 0 }, h) } else { (-h, h) };
        if k == 0 {
            lo = lo.max(lead.0);
            hi = hi.min(lead.1);
        }
        if lo > hi {
            return ControlFlow::Continue(());
        }
        if self.prune {
            let b = sink.bound() + self.slack;
            let base = &sums[k * n..(k + 1) * n];
            if base.iter().zip(&self.suffix[k * n..(k + 1) * n]).any(|(s, r)| s.abs() - r > b) {
                return ControlFlow::Continue(());
            }
            if last {
                return self.solve_last(k, lo, hi, hit, q, sums, sink);
            }
        }
        if last {
            for v in lo..=hi {
                if !hit && v.abs() != h {
                    continue;
                }
                q[k] = v;
                let value = self.leaf_value(k, v, sums);
                sink.visit(q, value)?;
            }
            q[k] = 0;
            return ControlFlow::Continue(());
        }
        for v in lo..=hi {
            q[k] = v;
            let vf = v as f64;
            for j in 0..n {
                sums[(k + 1) * n + j] = sums[k * n + j] + vf * self.x.get(k, j);
            }
            self.level(k + 1, all_zero && v == 0, hit || v.abs() == h, lead, q, sums, sink)?;
        }
        q[k] = 0;
        ControlFlow::Continue(())
    }

    #[inline]
    fn leaf_value(&self, k: usize, v: i64, sums: &[f64]) -> f64 {
        let n = self.x.n();
        let vf = v as f64;
        let mut value = 0.0f64;
        for j in 0..n {
            value = value.max((sums[k * n + j] + vf * self.x.get(k, j)).abs());
        }
        value
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_last(
        &self,
        k: usize,
        lo: i64,
        hi: i64,
        hit: bool,
        q: &mut [i64],
        sums: &[f64],
        sink: &mut impl Sink,
    ) -> ControlFlow<()> {
        let n = self.x.n();
        let b = sink.bound() + self.slack;
        let (mut flo, mut fhi) = (lo as f64, hi as f64);
        if b.is_finite() {
            for j in 0..n {
                let s = sums[k * n + j];
                let xj = self.x.get(k, j);
                if xj == 0.0 {
                    if s.abs() > b {
                        return ControlFlow::Continue(());
                    }
                    continue;
                }
                let (a, c) = ((-b - s) / xj, (b - s) / xj);
                let (a, c) = if a <= c { (a, c) } else { (c, a) };
                flo = flo.max(a.ceil() - 1.0);
                fhi = fhi.min(c.floor() + 1.0);
                if flo > fhi {
                    return ControlFlow::Continue(());
                }
            }
        }
        let (clo, chi) = (flo.max(lo as f64) as i64, fhi.min(hi as f64) as i64);
        let h = self.h;
        if !hit {
            for v in [-h, h] {
                if v >= clo && v <= chi {
                    q[k] = v;
                    let value = self.leaf_value(k, v, sums);
                    sink.visit(q, value)?;
                }
            }
        } else {
            for v in clo..=chi {
                q[k] = v;
                let value = self.leaf_value(k, v, sums);
                sink.visit(q, value)?;
            }
        }
        q[k] = 0;
        ControlFlow::Continue(())
    }
}

/// Sink driven by closures: a fixed pruning bound and an acceptance test.
/// Stops at the first accepted vector.
pub(crate) struct FirstMatch<F: FnMut(&[i64], f64) -> bool> {
    pub bound: f64,
    pub accept: F,
    pub found: Option<Vec<i64>>,
}

impl<F: FnMut(&[i64], f64) -> bool> Sink for FirstMatch<F> {
    fn bound(&self) -> f64 {
        self.bound
    }

    fn visit(&mut self, q: &[i64], value: f64) -> ControlFlow<()> {
        if (self.accept)(q, value) {
            self.found = Some(q.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}
