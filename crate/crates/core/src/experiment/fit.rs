//! Least-squares fit of `p(θ) = a + b·cos θ + c·sin θ`.

use serde::{Deserialize, Serialize};

use super::{expected_fringe_amplitude, DetectionRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub offset: f64,
    /// `√(b² + c²)`.
    pub amplitude: f64,
    /// `atan2(−c, b)`, so that `p = offset + amplitude·cos(θ + phase)`.
    pub phase: f64,
    pub rms_residual: f64,
    pub points: usize,
}

impl FringeFit {
    pub fn eval(&self, theta: f64) -> f64 {
        self.offset + self.amplitude * (theta + self.phase).cos()
    }
}

/// A fit for one α row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha: f64,
    /// `sin²(α/2)/2`.
    pub expected_amplitude: f64,
    #[serde(flatten)]
    pub fit: FringeFit,
}

const DISTINCT_TOL: f64 = 1e-9;

fn distinct_on_circle(thetas: &[f64]) -> usize {
    let mut reps: Vec<f64> = Vec::new();
    for &t in thetas {
        let w = t.rem_euclid(std::f64::consts::TAU);
        let seen = reps.iter().any(|&r| {
            let d = (w - r).abs();
            d.min(std::f64::consts::TAU - d) < DISTINCT_TOL
        });
        if !seen {
            reps.push(w);
        }
    }
    reps.len()
}

/// Solves a 3×3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Fits `(θ, p)` pairs through the normal equations.
pub fn fit_cosine(points: &[(f64, f64)]) -> Result<FringeFit> {
    let distinct = distinct_on_circle(&points.iter().map(|p| p.0).collect::<Vec<_>>());
    if distinct < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 distinct phases, got {distinct}"
        )));
    }
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for &(theta, p) in points {
        let row = [1.0, theta.cos(), theta.sin()];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * p;
        }
    }
    let [a, b, c] =
        solve3(xtx, xty).ok_or_else(|| Error::DegenerateFit("singular normal equations".into()))?;

    let sq: f64 = points
        .iter()
        .map(|&(t, p)| (p - (a + b * t.cos() + c * t.sin())).powi(2))
        .sum();
    let amplitude = b.hypot(c);
    let phase = if amplitude == 0.0 { 0.0 } else { (-c).atan2(b) };
    Ok(FringeFit {
        offset: a,
        amplitude,
        phase,
        rms_residual: (sq / points.len() as f64).sqrt(),
        points: points.len(),
    })
}

/// Groups sweep records by α (in first-seen order) and fits each row.
pub fn fit_fringes(records: &[DetectionRecord]) -> Result<Vec<AlphaFit>> {
    let mut rows: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for r in records {
        match rows.iter_mut().find(|(a, _)| *a == r.alpha) {
            Some((_, pts)) => pts.push((r.theta, r.p)),
            None => rows.push((r.alpha, vec![(r.theta, r.p)])),
        }
    }
    rows.into_iter()
        .map(|(alpha, pts)| {
            Ok(AlphaFit {
                alpha,
                expected_amplitude: expected_fringe_amplitude(alpha),
                fit: fit_cosine(&pts)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn wave_fringe() {
        let pts: Vec<_> = grid(17)
            .into_iter()
            .map(|t| (t, (1.0 + t.cos()) / 2.0))
            .collect();
        let f = fit_cosine(&pts).unwrap();
        assert!((f.offset - 0.5).abs() < 1e-12);
        assert!((f.amplitude - 0.5).abs() < 1e-12);
        assert!(f.phase.abs() < 1e-12);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn flat_data() {
        let pts: Vec<_> = grid(9).into_iter().map(|t| (t, 0.0)).collect();
        let f = fit_cosine(&pts).unwrap();
        assert_eq!((f.offset, f.amplitude, f.phase), (0.0, 0.0, 0.0));
    }

    #[test]
    fn half_wave_amplitude() {
        let s2 = (PI / 4.0).sin().powi(2);
        let pts: Vec<_> = grid(17)
            .into_iter()
            .map(|t| (t, s2 * (t / 2.0).cos().powi(2)))
            .collect();
        assert!((fit_cosine(&pts).unwrap().amplitude - 0.25).abs() < 1e-12);
    }

    #[test]
    fn recovers_shifted_cosine() {
        let (a, amp, phase): (f64, f64, f64) = (0.3, 0.2, -1.1);
        let pts: Vec<_> = [0.1, 0.9, 2.0, 3.3, 4.1, 5.9]
            .iter()
            .map(|&t| (t, a + amp * (t + phase).cos()))
            .collect();
        let f = fit_cosine(&pts).unwrap();
        assert!((f.offset - a).abs() < 1e-12);
        assert!((f.amplitude - amp).abs() < 1e-12);
        assert!((f.phase - phase).abs() < 1e-12);
        assert!((f.eval(1.234) - (a + amp * (1.234 + phase).cos())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            fit_cosine(&[(0.0, 1.0), (1.0, 0.5)]),
            Err(Error::DegenerateFit(_))
        ));
        // 0 and 2π coincide on the circle
        assert!(matches!(
            fit_cosine(&[(0.0, 1.0), (TAU, 1.0), (1.0, 0.5), (1.0, 0.4)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_cosine(&[(0.0, 1.0), (TAU, 1.0), (1.0, 0.5), (2.0, 0.4)]).is_ok());
    }
}
