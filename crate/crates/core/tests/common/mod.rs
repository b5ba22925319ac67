//! Independent oracles shared by the integration tests: brute-force
//! enumeration and exact-row quadrature.
#![allow(dead_code)]

use linforms::forms::{ApproximatingFunction, MatrixPoint};
use rayon::prelude::*;

/// Every canonical q with `0 < |q|∞ ≤ q_max`, by odometer over the full box.
pub fn brute_vectors(m: usize, q_max: i64) -> Vec<Vec<i64>> {
    let side = 2 * q_max + 1;
    let total = side.pow(m as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut q = vec![0i64; m];
        for c in q.iter_mut() {
            *c = rem % side - q_max;
            rem /= side;
        }
        if let Some(&lead) = q.iter().find(|&&v| v != 0) {
            if lead > 0 {
                out.push(q);
            }
        }
    }
    out
}

pub fn value(q: &[i64], x: &MatrixPoint) -> f64 {
    (0..x.n()).map(|j| (0..x.m()).map(|i| q[i] as f64 * x.get(i, j)).sum::<f64>().abs()).fold(0.0, f64::max)
}

pub fn hgt(q: &[i64]) -> u64 {
    q.iter().map(|v| v.unsigned_abs()).max().unwrap()
}

pub fn naive_min(x: &MatrixPoint, q_max: i64) -> (Vec<i64>, f64) {
    let mut vs = brute_vectors(x.m(), q_max);
    vs.sort();
    let mut best: Option<(Vec<i64>, f64)> = None;
    for q in vs {
        let v = value(&q, x);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((q, v));
        }
    }
    best.unwrap()
}

pub fn naive_witnesses(x: &MatrixPoint, psi: &ApproximatingFunction, q_max: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> =
        brute_vectors(x.m(), q_max).into_iter().filter(|q| value(q, x) < psi.eval(hgt(q) as f64)).collect();
    out.sort_by(|a, b| hgt(a).cmp(&hgt(b)).then(a.cmp(b)));
    out
}

/// Integer vectors in `[-hi, hi]^m` (both signs; duplicates are harmless in a union).
pub fn all_vectors(m: usize, lo: u64, hi: u64) -> Vec<Vec<i64>> {
    let hi = hi as i64;
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out.into_iter().flat_map(|p: Vec<i64>| (-hi..=hi).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out.retain(|q| {
        let h = q.iter().map(|v| v.unsigned_abs()).max().unwrap();
        h >= lo && h as i64 <= hi
    });
    out
}

/// Length of `⋃ (a_i, b_i) ∩ [lo, hi]`.
pub fn union_length(mut iv: Vec<(f64, f64)>, lo: f64, hi: f64) -> f64 {
    iv.retain(|&(a, b)| b > lo && a < hi && b > a);
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        let (a, b) = (a.max(lo), b.min(hi));
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = cur {
        total += cb - ca;
    }
    total
}

/// Fraction of the box `[lo, hi]^m` covered by `⋃_q {y : |q·y| < w(q)}`.
/// Midpoint rule over the first m−1 coordinates, exact in the last.
pub fn slab_union_quadrature(m: usize, qs: &[Vec<i64>], w: impl Fn(&[i64]) -> f64 + Sync, lo: f64, hi: f64, grid: usize) -> f64 {
    let side = hi - lo;
    let h = side / grid as f64;
    let cells = grid.pow(m as u32 - 1);
    let widths: Vec<f64> = qs.iter().map(|q| w(q)).collect();
    let covered: f64 = (0..cells)
        .into_par_iter()
        .map(|mut idx| {
            let mut y = vec![0.0; m - 1];
            for c in y.iter_mut() {
                *c = lo + (idx % grid) as f64 * h + 0.5 * h;
                idx /= grid;
            }
            let mut ivs = Vec::new();
            for (q, &wq) in qs.iter().zip(&widths) {
                let s: f64 = (0..m - 1).map(|i| q[i] as f64 * y[i]).sum();
                let ql = q[m - 1] as f64;
                if ql == 0.0 {
                    if s.abs() < wq {
                        return side;
                    }
                    continue;
                }
                let (a, b) = ((-wq - s) / ql, (wq - s) / ql);
                ivs.push((a.min(b), a.max(b)));
            }
            union_length(ivs, lo, hi)
        })
        .sum();
    covered / (cells as f64 * side)
}

pub fn norm2(q: &[i64]) -> f64 {
    q.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()
}

pub fn hgt_f(q: &[i64]) -> f64 {
    q.iter().map(|v| v.unsigned_abs()).max().unwrap() as f64
}

