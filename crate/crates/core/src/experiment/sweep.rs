use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{detection_probability, run_circuit, DelayedChoiceConfig, Level};
use crate::channels::DephaseSpec;
use crate::error::{Error, Result};
use crate::spinmodel::SpinSystem;

/// One point of a fringe sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub alpha: f64,
    pub theta: f64,
    pub level: Level,
    /// `Tr(Δρ·|10⟩⟨10|)` at trace-normalized Δρ.
    pub p: f64,
}

/// Evaluates the grid `alphas × thetas`, α-major.
///
/// Points run in parallel; the output order is fixed by the grid.
pub fn run_sweep(
    alphas: &[f64],
    thetas: &[f64],
    level: Level,
    dephase: DephaseSpec,
    sys: &SpinSystem,
) -> Result<Vec<DetectionRecord>> {
    if alphas.is_empty() || thetas.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep grids must be non-empty".into(),
        ));
    }
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| thetas.iter().map(move |&t| (a, t)))
        .collect();
    grid.par_iter()
        .map(|&(alpha, theta)| {
            let cfg = DelayedChoiceConfig::new(alpha, theta, level, dephase)?;
            let p = detection_probability(&run_circuit(&cfg, sys)?)?;
            Ok(DetectionRecord {
                alpha,
                theta,
                level,
                p,
            })
        })
        .collect()
}

/// Adds seeded i.i.d. Gaussian noise to `p`, clamped to `[0, 1]`.
pub fn add_detection_noise(records: &mut [DetectionRecord], sigma: f64, seed: u64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in records {
        r.p = (r.p + normal.sample(&mut rng)).clamp(0.0, 1.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn particle_row_is_flat() {
        let thetas: Vec<f64> = (0..8).map(|k| k as f64 * PI / 4.0).collect();
        let recs = run_sweep(
            &[0.0],
            &thetas,
            Level::Gate,
            DephaseSpec::ideal(),
            &SpinSystem::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 8);
        assert!(recs.iter().all(|r| r.p.abs() < 1e-15));
    }

    #[test]
    fn wave_row_follows_cos_squared() {
        let recs = run_sweep(
            &[PI],
            &[0.0, PI / 2.0, PI],
            Level::Gate,
            DephaseSpec::ideal(),
            &SpinSystem::default(),
        )
        .unwrap();
        let p: Vec<f64> = recs.iter().map(|r| r.p).collect();
        for (got, want) in p.iter().zip([1.0, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_order_and_size() {
        let alphas = [0.0, 1.0, 2.0];
        let thetas = [0.0, 0.5, 1.0, 1.5];
        let recs = run_sweep(
            &alphas,
            &thetas,
            Level::Pulse,
            DephaseSpec::ideal(),
            &SpinSystem::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 12);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.alpha, alphas[i / 4]);
            assert_eq!(r.theta, thetas[i % 4]);
        }
        assert!(run_sweep(
            &[],
            &thetas,
            Level::Gate,
            DephaseSpec::ideal(),
            &SpinSystem::default()
        )
        .is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let base = run_sweep(
            &[1.0],
            &[0.0, 1.0, 2.0],
            Level::Gate,
            DephaseSpec::ideal(),
            &SpinSystem::default(),
        )
        .unwrap();
        let mut a = base.clone();
        let mut b = base.clone();
        add_detection_noise(&mut a, 0.02, 7).unwrap();
        add_detection_noise(&mut b, 0.02, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, base);
        assert!(a.iter().all(|r| (0.0..=1.0).contains(&r.p)));
        let mut c = base.clone();
        add_detection_noise(&mut c, 0.0, 7).unwrap();
        assert_eq!(c, base);
        assert!(add_detection_noise(&mut c, -1.0, 7).is_err());
    }
}
