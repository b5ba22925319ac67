//! Enumeration of the height band `lo ≤ |q|∞ ≤ hi` for membership tests
//! whose threshold varies with q.
//!
//! The first `m−1` coordinates run over the box (leading coordinate
//! non-negative, so each `±q` pair is seen at least once). The last
//! coordinate is solved as an interval from an upper bound on the
//! threshold, then every candidate is checked exactly by the caller.
//! Cost per point is `O(hi^{m−1})`.

use std::ops::ControlFlow;

use crate::forms::MatrixPoint;

pub(crate) struct Candidate<'a> {
    #[cfg_attr(not(test), allow(dead_code))]
    pub q: &'a [i64],
    pub height: u64,
    /// `|q|₂²`.
    pub norm2: f64,
    /// `|qX|∞`, summed in coordinate order.
    pub value: f64,
}

/// Calls `visit` for every q in the band whose form value does not exceed
/// `bound(h0, prefix_norm2)`, where `h0` is the height of the first `m−1`
/// coordinates and `prefix_norm2` their squared Euclidean norm. The bound
/// must dominate the caller's acceptance threshold for every completion.
/// Vectors above the bound may also be visited.
pub(crate) fn scan_band(
    x: &MatrixPoint,
    lo: u64,
    hi: u64,
    bound: impl Fn(u64, f64) -> f64,
    mut visit: impl FnMut(&Candidate) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let (m, n) = (x.m(), x.n());
    let lo = lo.max(1) as i64;
    let hi = hi as i64;
    if hi < lo {
        return ControlFlow::Continue(());
    }
    let last: Vec<f64> = (0..n).map(|j| x.get(m - 1, j)).collect();
    let slack = 1e-10 * (1.0 + hi as f64);
    let mut q = vec![0i64; m];
    let mut sums = vec![0.0f64; n];
    // Odometer over the prefix, leading coordinate in [0, hi].
    if m > 1 {
        q[0] = 0;
        for c in q.iter_mut().take(m - 1).skip(1) {
            *c = -hi;
        }
    }
    loop {
        let prefix = &q[..m - 1];
        let h0 = prefix.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as i64;
        let pn2: f64 = prefix.iter().map(|&v| (v as f64) * (v as f64)).sum();
        let zero_prefix = h0 == 0;
        for (j, s) in sums.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &qi) in prefix.iter().enumerate() {
                acc += qi as f64 * x.get(i, j);
            }
            *s = acc;
        }
        let b = bound(h0 as u64, pn2) + slack;
        let (mut flo, mut fhi) = (if zero_prefix { 1.0 } else { -hi as f64 }, hi as f64);
        let mut empty = b < 0.0;
        if b.is_finite() {
            for j in 0..n {
                let (s, xj) = (sums[j], last[j]);
                if xj == 0.0 {
                    if s.abs() > b {
                        empty = true;
                        break;
                    }
                    continue;
                }
                let (a, c) = ((-b - s) / xj, (b - s) / xj);
                let (a, c) = if a <= c { (a, c) } else { (c, a) };
                flo = flo.max(a.ceil() - 1.0);
                fhi = fhi.min(c.floor() + 1.0);
                if flo > fhi {
                    empty = true;
                    break;
                }
            }
        }
        if !empty {
            let (clo, chi) = (flo as i64, fhi as i64);
            for v in clo..=chi {
                let h = h0.max(v.abs());
                if h < lo || (zero_prefix && v == 0) {
                    continue;
                }
                q[m - 1] = v;
                let vf = v as f64;
                let mut value = 0.0f64;
                for j in 0..n {
                    value = value.max((sums[j] + vf * last[j]).abs());
                }
                let cand = Candidate { q: &q, height: h as u64, norm2: pn2 + vf * vf, value };
                visit(&cand)?;
            }
            q[m - 1] = 0;
        }
        // Advance the odometer.
        let mut k = m - 1;
        loop {
            if k == 0 {
                return ControlFlow::Continue(());
            }
            k -= 1;
            if q[k] < hi {
                q[k] += 1;
                break;
            }
            q[k] = if k == 0 { 0 } else { -hi };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{canonical, form_value, height};
    use std::collections::BTreeSet;

    #[test]
    fn unbounded_scan_covers_band() {
        let x = MatrixPoint::from_columns(&[vec![0.1, -0.2, 0.3], vec![0.05, 0.4, -0.45]]).unwrap();
        let mut seen = BTreeSet::new();
        let _ = scan_band(&x, 2, 3, |_, _| f64::INFINITY, |c| {
            assert_eq!(c.value, form_value(c.q, &x).unwrap());
            assert_eq!(c.height, height(c.q));
            seen.insert(canonical(c.q.to_vec()));
            ControlFlow::Continue(())
        });
        let expected = ((7usize.pow(3) - 1) - (3usize.pow(3) - 1)) / 2;
        assert_eq!(seen.len(), expected);
        assert!(seen.iter().all(|q| (2..=3).contains(&height(q))));
    }

    #[test]
    fn bounded_scan_keeps_small_values() {
        let x = MatrixPoint::new(2, 1, vec![0.31, -0.17]).unwrap();
        let b = 0.02;
        let mut got = BTreeSet::new();
        let _ = scan_band(&x, 1, 40, |_, _| b, |c| {
            if c.value <= b {
                got.insert(canonical(c.q.to_vec()));
            }
            ControlFlow::Continue(())
        });
        let mut want = BTreeSet::new();
        for a in -40i64..=40 {
            for c in -40i64..=40 {
                if (a, c) != (0, 0) && form_value(&[a, c], &x).unwrap() <= b {
                    want.insert(canonical(vec![a, c]));
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn single_form() {
        let x = MatrixPoint::new(1, 1, vec![0.25]).unwrap();
        let mut got = vec![];
        let _ = scan_band(&x, 1, 5, |_, _| f64::INFINITY, |c| {
            got.push(c.q[0]);
            ControlFlow::Continue(())
        });
        assert_eq!(got, vec![1, 2, 3, 4, 5]);
    }
}
