use crate::error::{invalid, Result};

use super::functions::ApproximatingFunction;
use super::matrix::{euclidean_norm, height, MatrixPoint};

/// Name of the distance convention recorded in every experiment report.
pub const DISTANCE_CONVENTION: &str = "column-euclidean-sup: dist(X,R_q) = max_j |q.x_j| / |q|_2";

/// `q·x` accumulated in coordinate order. All code paths that compare form
/// values use this summation order so results agree bit for bit.
#[inline]
pub(crate) fn dot(q: &[i64], col: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&qi, &xi) in q.iter().zip(col) {
        s += qi as f64 * xi;
    }
    s
}

#[inline]
pub(crate) fn form_value_unchecked(q: &[i64], x: &MatrixPoint) -> f64 {
    x.columns().fold(0.0_f64, |acc, col| acc.max(dot(q, col).abs()))
}

fn check(q: &[i64], x: &MatrixPoint) -> Result<()> {
    if q.len() != x.m() {
        return Err(invalid!("q has length {} but X has m = {}", q.len(), x.m()));
    }
    if q.iter().all(|&v| v == 0) {
        return Err(invalid!("q must be non-zero"));
    }
    Ok(())
}

/// `|qX|∞ = max_j |q·x^{(j)}|`.
pub fn form_value(q: &[i64], x: &MatrixPoint) -> Result<f64> {
    check(q, x)?;
    Ok(form_value_unchecked(q, x))
}

/// Distance from X to the resonant set `R_q = {Y : qY = 0}`: the per-column
/// Euclidean distance to the hyperplane `q·y = 0`, maximised over columns.
pub fn resonant_distance(x: &MatrixPoint, q: &[i64]) -> Result<f64> {
    check(q, x)?;
    Ok(form_value_unchecked(q, x) / euclidean_norm(q))
}

/// Whether X lies in `Δ(R_q, Ψ(|q|))`, i.e. `dist(X, R_q) ≤ ψ(|q|)/|q|`.
pub fn in_delta_neighborhood(x: &MatrixPoint, q: &[i64], psi: &ApproximatingFunction) -> Result<bool> {
    let d = resonant_distance(x, q)?;
    Ok(d <= psi.big_psi(height(q) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> MatrixPoint {
        MatrixPoint::new(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn form_value_examples() {
        assert_eq!(form_value(&[1, -2], &col(&[0.5, 0.25])).unwrap(), 0.0);
        let x = MatrixPoint::from_columns(&[vec![0.3, -0.4], vec![0.1, 0.2]]).unwrap();
        assert!((form_value(&[1, 1], &x).unwrap() - 0.3).abs() < 1e-15);
        assert!((form_value(&[3, 1], &col(&[0.2, -0.1])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn form_value_errors() {
        assert!(form_value(&[0, 0], &col(&[0.1, 0.2])).is_err());
        assert!(form_value(&[1, 2, 3], &col(&[0.1, 0.2])).is_err());
    }

    #[test]
    fn resonant_distance_examples() {
        assert_eq!(resonant_distance(&col(&[0.5, 0.25]), &[1, -2]).unwrap(), 0.0);
        assert!((resonant_distance(&col(&[0.3, 0.1]), &[1, 0]).unwrap() - 0.3).abs() < 1e-15);
        assert!((resonant_distance(&col(&[0.1, 0.05]), &[3, 4]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn delta_neighborhood_examples() {
        let on = col(&[0.5, 0.25]);
        let tiny = ApproximatingFunction::power(1e-9, 5.0).unwrap();
        assert!(in_delta_neighborhood(&on, &[1, -2], &tiny).unwrap());

        let x = col(&[0.3, 0.0]);
        let psi = ApproximatingFunction::power(1.0, 1.0).unwrap();
        assert!(in_delta_neighborhood(&x, &[1, 0], &psi).unwrap());
        let psi = ApproximatingFunction::power(0.1, 1.0).unwrap();
        assert!(!in_delta_neighborhood(&x, &[1, 0], &psi).unwrap());
    }
}
