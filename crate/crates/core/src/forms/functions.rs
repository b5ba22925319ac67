//! Parametric families for the approximating function ψ and the dimension
//! function f.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Exponents closer than this are treated as equal when deciding the
/// behaviour of `r^e (log 1/r)^k` near zero.
pub const EXPONENT_TOL: f64 = 1e-9;

/// An approximating function ψ.
///
/// * `Power`: `ψ(r) = c·r^(−τ)`
/// * `PowerLog`: `ψ(r) = c·r^(−τ)·(log(e + r))^(−κ)`
/// * `Table`: explicit `(r, ψ(r))` pairs, linearly interpolated between
///   knots and clamped to the end values outside the table.
///
/// Variants are public so that lab experiments can use functions outside
/// the approximating-function class (e.g. `ψ(r) = m·r`); everything that
/// relies on monotonicity calls [`ApproximatingFunction::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ApproximatingFunction {
    Power { c: f64, tau: f64 },
    PowerLog { c: f64, tau: f64, kappa: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl ApproximatingFunction {
    pub fn power(c: f64, tau: f64) -> Result<Self> {
        let f = ApproximatingFunction::Power { c, tau };
        f.validate()?;
        Ok(f)
    }

    pub fn power_log(c: f64, tau: f64, kappa: f64) -> Result<Self> {
        let f = ApproximatingFunction::PowerLog { c, tau, kappa };
        f.validate()?;
        Ok(f)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let f = ApproximatingFunction::Table { points };
        f.validate()?;
        Ok(f)
    }

    /// Checks the approximating-function invariants: positive, non-increasing
    /// and tending to zero (decided from the parameters for power families).
    pub fn validate(&self) -> Result<()> {
        match *self {
            ApproximatingFunction::Power { c, tau } => {
                check_positive_param(c)?;
                if !tau.is_finite() || tau <= 0.0 {
                    return Err(invalid!("pow: need tau > 0 for psi -> 0, got {tau}"));
                }
            }
            ApproximatingFunction::PowerLog { c, tau, kappa } => {
                check_positive_param(c)?;
                if !tau.is_finite() || !kappa.is_finite() {
                    return Err(invalid!("powlog: non-finite parameter"));
                }
                if tau < 0.0 || (tau == 0.0 && kappa <= 0.0) {
                    return Err(invalid!(
                        "powlog: need tau > 0, or tau = 0 and kappa > 0 (got tau={tau}, kappa={kappa})"
                    ));
                }
                // d/dr log ψ = −τ/r − κ/((e+r) log(e+r)) must stay ≤ 0 on r ≥ 1.
                if kappa < 0.0 {
                    let bad = (0..=2000)
                        .map(|i| 1.0 + i as f64 * 0.5)
                        .any(|r| tau / r < -kappa / ((std::f64::consts::E + r) * (std::f64::consts::E + r).ln()));
                    if bad {
                        return Err(invalid!("powlog: psi is not decreasing for tau={tau}, kappa={kappa}"));
                    }
                }
            }
            ApproximatingFunction::Table { ref points } => {
                if points.is_empty() {
                    return Err(invalid!("table: no points"));
                }
                for w in points.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(invalid!("table: arguments must be strictly increasing"));
                    }
                    if w[1].1 > w[0].1 {
                        return Err(invalid!("table: values must be non-increasing"));
                    }
                }
                if points.iter().any(|&(r, v)| !(v > 0.0) || !r.is_finite() || !v.is_finite()) {
                    return Err(invalid!("table: values must be positive and finite"));
                }
                if points.len() >= 2 && points[0].1 == points[points.len() - 1].1 {
                    return Err(invalid!("table: constant table does not tend to zero"));
                }
            }
        }
        Ok(())
    }

    /// Only positivity and finiteness; used by experiments that accept
    /// functions outside the approximating class.
    pub fn check_positive(&self) -> Result<()> {
        match *self {
            ApproximatingFunction::Power { c, tau } => {
                check_positive_param(c)?;
                if !tau.is_finite() {
                    return Err(invalid!("pow: non-finite tau"));
                }
                Ok(())
            }
            ApproximatingFunction::PowerLog { c, tau, kappa } => {
                check_positive_param(c)?;
                if !tau.is_finite() || !kappa.is_finite() {
                    return Err(invalid!("powlog: non-finite parameter"));
                }
                Ok(())
            }
            ApproximatingFunction::Table { .. } => self.validate(),
        }
    }

    /// ψ(r).
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ApproximatingFunction::Power { c, tau } => c * r.powf(-tau),
            ApproximatingFunction::PowerLog { c, tau, kappa } => {
                c * r.powf(-tau) * (std::f64::consts::E + r).ln().powf(-kappa)
            }
            ApproximatingFunction::Table { ref points } => interpolate(points, r),
        }
    }

    /// Ψ(r) = ψ(r)/r.
    pub fn big_psi(&self, r: f64) -> f64 {
        self.eval(r) / r
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, ApproximatingFunction::Table { .. })
    }

    /// `(τ, κ)` for the closed-form families (`κ = 0` for pure powers).
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match *self {
            ApproximatingFunction::Power { tau, .. } => Some((tau, 0.0)),
            ApproximatingFunction::PowerLog { tau, kappa, .. } => Some((tau, kappa)),
            ApproximatingFunction::Table { .. } => None,
        }
    }

    /// The same function multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            ApproximatingFunction::Power { c, tau } => ApproximatingFunction::Power { c: c * factor, tau },
            ApproximatingFunction::PowerLog { c, tau, kappa } => {
                ApproximatingFunction::PowerLog { c: c * factor, tau, kappa }
            }
            ApproximatingFunction::Table { ref points } => ApproximatingFunction::Table {
                points: points.iter().map(|&(r, v)| (r, v * factor)).collect(),
            },
        }
    }

    /// Largest table argument, if any.
    pub fn table_horizon(&self) -> Option<f64> {
        match self {
            ApproximatingFunction::Table { points } => points.last().map(|p| p.0),
            _ => None,
        }
    }
}

fn check_positive_param(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid!("need c > 0, got {c}"));
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], r: f64) -> f64 {
    let first = points[0];
    if r <= first.0 {
        return first.1;
    }
    let idx = points.partition_point(|p| p.0 < r);
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (r1, v1) = points[idx];
    if r1 == r {
        return v1;
    }
    let (r0, v0) = points[idx - 1];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

impl fmt::Display for ApproximatingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproximatingFunction::Power { c, tau } => write!(f, "pow:{c},{tau}"),
            ApproximatingFunction::PowerLog { c, tau, kappa } => write!(f, "powlog:{c},{tau},{kappa}"),
            ApproximatingFunction::Table { points } => write!(f, "table:<{} points>", points.len()),
        }
    }
}

fn parse_params(body: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> = body.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| invalid!("{what}: {e}"))?;
    if vals.len() != expected {
        return Err(invalid!("{what}: expected {expected} parameters, got {}", vals.len()));
    }
    Ok(vals)
}

/// Parses `pow:c,tau` and `powlog:c,tau,kappa`. Table specs (`table:path`)
/// need file access and are resolved by the caller.
///
/// Parsing does not validate; call [`ApproximatingFunction::validate`] where
/// the approximating-function invariants are required.
impl FromStr for ApproximatingFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s.split_once(':').ok_or_else(|| invalid!("psi spec '{s}' lacks a family tag"))?;
        match tag {
            "pow" => {
                let p = parse_params(body, 2, "pow")?;
                Ok(ApproximatingFunction::Power { c: p[0], tau: p[1] })
            }
            "powlog" => {
                let p = parse_params(body, 3, "powlog")?;
                Ok(ApproximatingFunction::PowerLog { c: p[0], tau: p[1], kappa: p[2] })
            }
            "table" => Err(Error::Unsupported(format!("table spec '{body}' must be loaded from a file"))),
            other => Err(invalid!("unknown psi family '{other}'")),
        }
    }
}

/// Behaviour of `r^e·(log 1/r)^k` as `r → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledBehaviour {
    pub exponent: f64,
    pub log_exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitAtZero {
    Zero,
    Constant,
    Infinite,
}

impl ScaledBehaviour {
    fn exponent_sign(&self) -> i8 {
        if self.exponent.abs() <= EXPONENT_TOL {
            0
        } else if self.exponent > 0.0 {
            1
        } else {
            -1
        }
    }

    fn log_sign(&self) -> i8 {
        if self.log_exponent.abs() <= EXPONENT_TOL {
            0
        } else if self.log_exponent > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Strictly increasing in r on some interval (0, r₀).
    pub fn increasing(&self) -> bool {
        match self.exponent_sign() {
            1 => true,
            0 => self.log_sign() < 0,
            _ => false,
        }
    }

    /// Strictly decreasing in r on some interval (0, r₀).
    pub fn decreasing(&self) -> bool {
        match self.exponent_sign() {
            -1 => true,
            0 => self.log_sign() > 0,
            _ => false,
        }
    }

    pub fn constant(&self) -> bool {
        self.exponent_sign() == 0 && self.log_sign() == 0
    }

    /// Every member of the family is eventually monotonic near zero.
    pub fn monotonic(&self) -> bool {
        self.increasing() || self.decreasing() || self.constant()
    }

    pub fn limit_at_zero(&self) -> LimitAtZero {
        match (self.exponent_sign(), self.log_sign()) {
            (1, _) => LimitAtZero::Zero,
            (-1, _) => LimitAtZero::Infinite,
            (_, 1) => LimitAtZero::Infinite,
            (_, -1) => LimitAtZero::Zero,
            _ => LimitAtZero::Constant,
        }
    }
}

/// A dimension function f.
///
/// * `Power`: `f(r) = r^s`
/// * `PowerLog`: `f(r) = r^s·(log 1/r)^κ` for small r. Numerically the log
///   factor is `max(log 1/r, 1)^κ`, which agrees with the family on
///   `r ≤ 1/e` and keeps f continuous and finite for larger arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DimensionFunction {
    Power { s: f64 },
    PowerLog { s: f64, kappa: f64 },
}

impl DimensionFunction {
    pub fn power(s: f64) -> Result<Self> {
        let f = DimensionFunction::Power { s };
        f.validate()?;
        Ok(f)
    }

    pub fn power_log(s: f64, kappa: f64) -> Result<Self> {
        let f = DimensionFunction::PowerLog { s, kappa };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let (s, kappa) = self.exponents();
        if !s.is_finite() || !kappa.is_finite() || s < 0.0 {
            return Err(invalid!("dimension function needs finite s >= 0, got s={s}, kappa={kappa}"));
        }
        // f must increase to 0 at 0.
        if !self.scaled(0.0).increasing() {
            return Err(invalid!("f(r) = r^{s} (log 1/r)^{kappa} is not increasing to 0 near 0"));
        }
        Ok(())
    }

    /// `(s, κ)`.
    pub fn exponents(&self) -> (f64, f64) {
        match *self {
            DimensionFunction::Power { s } => (s, 0.0),
            DimensionFunction::PowerLog { s, kappa } => (s, kappa),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            DimensionFunction::Power { s } => r.powf(s),
            DimensionFunction::PowerLog { s, kappa } => r.powf(s) * (1.0 / r).ln().max(1.0).powf(kappa),
        }
    }

    /// Behaviour of `r^(−a)·f(r)` near zero.
    pub fn scaled(&self, a: f64) -> ScaledBehaviour {
        let (s, kappa) = self.exponents();
        ScaledBehaviour { exponent: s - a, log_exponent: kappa }
    }

    /// Numeric check that f is increasing on the given sorted grid of
    /// arguments in (0, 1/e].
    pub fn increasing_on(&self, grid: &[f64]) -> bool {
        grid.windows(2).all(|w| self.eval(w[0]) < self.eval(w[1]))
    }
}

impl fmt::Display for DimensionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimensionFunction::Power { s } => write!(f, "pow:{s}"),
            DimensionFunction::PowerLog { s, kappa } => write!(f, "powlog:{s},{kappa}"),
        }
    }
}

impl FromStr for DimensionFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s.split_once(':').ok_or_else(|| invalid!("f spec '{s}' lacks a family tag"))?;
        match tag {
            "pow" => {
                let p = parse_params(body, 1, "pow")?;
                Ok(DimensionFunction::Power { s: p[0] })
            }
            "powlog" => {
                let p = parse_params(body, 2, "powlog")?;
                Ok(DimensionFunction::PowerLog { s: p[0], kappa: p[1] })
            }
            other => Err(invalid!("unknown f family '{other}'")),
        }
    }
}
