use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Outcome of a numeric k-regularity check `u(k^{t+1}) ≤ λ·u(k^t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub regular: bool,
    /// Largest ratio observed on `[t0, horizon)`; the reported λ.
    pub lambda: f64,
    /// Smallest t from which every observed ratio stays below 1.
    pub t0: u32,
    /// `ratios[t] = u(k^{t+1}) / u(k^t)` for `t = 0..horizon`.
    pub ratios: Vec<f64>,
}

/// Numerically checks that `u` is k-regular over `t ≤ horizon`.
///
/// The check passes when, from some `t0` on, every ratio is below one and
/// the tail ratios are not creeping up towards one (the gap `1 − ratio` at
/// the horizon is at least 3/4 of the gap at mid-horizon).
pub fn is_k_regular(u: impl Fn(f64) -> f64, k: f64, horizon: u32) -> Result<Regularity> {
    if !(k > 1.0) {
        return Err(invalid!("k must exceed 1, got {k}"));
    }
    if horizon < 4 {
        return Err(invalid!("horizon must be at least 4, got {horizon}"));
    }
    let samples: Vec<f64> = (0..=horizon).map(|t| u(k.powi(t as i32))).collect();
    if let Some((t, v)) = samples.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(invalid!("u(k^{t}) = {v} is not positive"));
    }
    let ratios: Vec<f64> = samples.windows(2).map(|w| w[1] / w[0]).collect();
    let last_bad = ratios.iter().rposition(|&r| r >= 1.0);
    let t0 = last_bad.map_or(0, |i| i + 1) as u32;
    if t0 as usize >= ratios.len() {
        return Ok(Regularity { regular: false, lambda: ratios[ratios.len() - 1], t0, ratios });
    }
    let tail = &ratios[t0 as usize..];
    let lambda = tail.iter().copied().fold(f64::MIN, f64::max);
    let gap_end = 1.0 - ratios[ratios.len() - 1];
    let mid = (t0 as usize + ratios.len() - 1) / 2;
    let gap_mid = 1.0 - ratios[mid];
    let creeping = gap_end < 0.75 * gap_mid;
    Ok(Regularity { regular: lambda < 1.0 && !creeping, lambda, t0, ratios })
}
