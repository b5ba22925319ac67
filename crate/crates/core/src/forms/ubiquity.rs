use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The increasing function ω used to build the ubiquity function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Omega {
    /// `ω(t) = scale·t^exponent`.
    Power { scale: f64, exponent: f64 },
    /// `ω(r) = i^{1/n}` on the block `(r_{i−1}, r_i]`, with `ω = 1` up to
    /// `r_0`; past the last breakpoint ω keeps stepping as if a new block
    /// had started.
    Step { breakpoints: Vec<f64>, n: u32 },
    /// Piecewise-linear through increasing `(t, ω(t))` knots, clamped.
    Table { points: Vec<(f64, f64)> },
}

impl Omega {
    pub fn identity() -> Self {
        Omega::Power { scale: 1.0, exponent: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Omega::Power { scale, exponent } => scale * t.powf(*exponent),
            Omega::Step { breakpoints, n } => {
                let block = breakpoints.iter().skip(1).take_while(|&&b| b < t).count() + 1;
                let block = if breakpoints.first().is_some_and(|&r0| t <= r0) { 1 } else { block };
                (block as f64).powf(1.0 / *n as f64)
            }
            Omega::Table { points } => {
                if t <= points[0].0 {
                    return points[0].1;
                }
                let idx = points.partition_point(|p| p.0 < t);
                if idx >= points.len() {
                    return points[points.len() - 1].1;
                }
                let (t1, v1) = points[idx];
                let (t0, v0) = points[idx - 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn validate_shape(&self) -> Result<()> {
        match self {
            Omega::Power { scale, exponent } => {
                if !(*scale > 0.0) || !(*exponent > 0.0) {
                    return Err(invalid!("omega power family needs scale > 0 and exponent > 0"));
                }
            }
            Omega::Step { breakpoints, n } => {
                if *n == 0 || breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid!("omega step family needs n >= 1 and increasing breakpoints"));
                }
            }
            Omega::Table { points } => {
                if points.len() < 2
                    || points.windows(2).any(|w| !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1))
                    || !(points[0].1 > 0.0)
                {
                    return Err(invalid!("omega table must be positive and strictly increasing"));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the locally ubiquitous system built from the resonant sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UbiquityConfig {
    pub m: usize,
    pub n: usize,
    /// Base of the dyadic-style height bands `k^{t−1} ≤ |q| ≤ k^t`.
    pub k: f64,
    /// Density constant κ ∈ (0, 1).
    pub kappa: f64,
    pub omega: Omega,
    /// Constant C > 1 in the growth condition `ω(2t) < C·ω(t)`.
    pub growth: f64,
}

impl UbiquityConfig {
    pub fn new(m: usize, n: usize, omega: Omega) -> Result<Self> {
        let cfg = UbiquityConfig { m, n, k: 2.0, kappa: 0.5, omega, growth: 4.0 };
        cfg.validate(64)?;
        Ok(cfg)
    }

    /// Dimension of the resonant sets, `(m−1)n`.
    pub fn gamma(&self) -> usize {
        (self.m - 1) * self.n
    }

    /// Ambient dimension `mn`.
    pub fn delta(&self) -> usize {
        self.m * self.n
    }

    /// `ρ(t) = m·(k^t)^{−m/n}·ω(t)`.
    pub fn rho(&self, t: f64) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        m * self.k.powf(t).powf(-m / n) * self.omega.eval(t)
    }

    /// Checks the invariants on `t = 1..=horizon`: ω increasing and
    /// unbounded-looking, `ω(2t) < C·ω(t)` on the upper half of the range.
    pub fn validate(&self, horizon: u32) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(invalid!("m and n must be positive"));
        }
        if !(self.k > 1.0) {
            return Err(invalid!("k must exceed 1"));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(invalid!("kappa must lie in (0, 1)"));
        }
        if !(self.growth > 1.0) {
            return Err(invalid!("growth constant C must exceed 1"));
        }
        if self.gamma() >= self.delta() {
            return Err(invalid!("resonant dimension must be below ambient dimension"));
        }
        self.omega.validate_shape()?;
        let vals: Vec<f64> = (1..=horizon).map(|t| self.omega.eval(t as f64)).collect();
        if vals.windows(2).any(|w| w[1] < w[0]) || !(vals[vals.len() - 1] > vals[0]) {
            return Err(invalid!("omega must be increasing"));
        }
        for t in horizon / 2..=horizon {
            let t = t as f64;
            if !(self.omega.eval(2.0 * t) < self.growth * self.omega.eval(t)) {
                return Err(invalid!("omega(2t) < C omega(t) fails at t = {t}"));
            }
        }
        Ok(())
    }
}
