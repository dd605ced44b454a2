//! Non-unitary dynamics: the ancilla σz measurement and its gradient emulation.
//!
//! A strong σz measurement of the ancilla, averaged over outcomes, is the
//! dephasing map `Δρ ↦ Π₀ΔρΠ₀ + Π₁ΔρΠ₁` with `Π_k = |k⟩⟨k|_A ⊗ I_S`.
//!
//! On an ensemble the same map is produced by two identical z-gradient
//! pulses with a `π_x` on ¹³C between them. A gradient imprints a
//! position-dependent phase `φ` on ¹H and `r·φ` on ¹³C (`r = γ_C/γ_H`). We
//! model the spatial average by `N` equally spaced phases `φ_k = 2πk/N`:
//!
//! ```text
//! Δρ' = (1/N) Σ_k  G(φ_k)·X_S·G(φ_k) · Δρ · (G(φ_k)·X_S·G(φ_k))†
//! G(φ) = Rz_A(φ) ⊗ Rz_S(r·φ),   X_S = exp(−i(π/2)σx) on ¹³C
//! ```
//!
//! Since `σx·Rz(a) = Rz(−a)·σx`, the ¹³C gradient phases cancel and each
//! term is `Rz_A(2φ_k) ⊗ X_S`. Ancilla coherences pick up `e^{±2iφ_k}`,
//! whose average vanishes for every `N ≥ 3`. The refocusing pulse itself is
//! a real rotation left in the state; [`measure`] reports both the raw
//! output and the view with `X_S` undone.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numcore::{c, kron, rx, rz, ComplexMatrix};
use crate::pulselang::{event_unitary, PulseEvent, PulseSequence};
use crate::spinmodel::{DeviationMatrix, Spin, SpinSystem, DEFAULT_GAMMA_RATIO};

/// Default number of gradient phase samples.
pub const DEFAULT_GRADIENT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephaseMode {
    Ideal,
    Gradient { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DephaseSpec {
    pub mode: DephaseMode,
    /// Apply `π_x` to ¹³C between the two gradients.
    pub refocus: bool,
    /// `γ_C/γ_H`, scaling the ¹³C gradient phase.
    pub gamma_ratio: f64,
}

impl DephaseSpec {
    pub fn ideal() -> Self {
        Self {
            mode: DephaseMode::Ideal,
            refocus: true,
            gamma_ratio: DEFAULT_GAMMA_RATIO,
        }
    }

    pub fn gradient(samples: usize) -> Result<Self> {
        let spec = Self {
            mode: DephaseMode::Gradient { samples },
            ..Self::ideal()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_refocus(mut self, refocus: bool) -> Self {
        self.refocus = refocus;
        self
    }

    pub fn with_gamma_ratio(mut self, gamma_ratio: f64) -> Self {
        self.gamma_ratio = gamma_ratio;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let DephaseMode::Gradient { samples } = self.mode {
            if samples < 2 {
                return Err(Error::InvalidParameter(format!(
                    "gradient emulation needs at least 2 samples, got {samples}"
                )));
            }
        }
        if !self.gamma_ratio.is_finite() {
            return Err(Error::InvalidParameter("gamma ratio must be finite".into()));
        }
        Ok(())
    }
}

impl Default for DephaseSpec {
    fn default() -> Self {
        Self::ideal()
    }
}

/// `Π₀ΔρΠ₀ + Π₁ΔρΠ₁`: zeroes the 2×2 blocks coupling ancilla `|0⟩` and `|1⟩`.
pub fn ancilla_z_dephase(d: &DeviationMatrix) -> DeviationMatrix {
    let m = d.matrix();
    let out = ComplexMatrix::from_fn(4, |r, col| {
        if r / 2 == col / 2 {
            m.get(r, col)
        } else {
            c(0.0, 0.0)
        }
    })
    .expect("dim 4");
    DeviationMatrix::with_label(out, d.normalization())
}

/// The refocusing `π_x` on ¹³C.
pub fn refocus_unitary() -> ComplexMatrix {
    Spin::S.embed(&rx(std::f64::consts::PI)).expect("dim 2")
}

/// Gradient phase `Rz_A(φ) ⊗ Rz_S(r·φ)`.
pub fn gradient_unitary(phi: f64, gamma_ratio: f64) -> ComplexMatrix {
    kron(&rz(phi), &rz(gamma_ratio * phi)).expect("dim 2")
}

/// The measurement block as a pulse program: `grad z`, `refocus C`, `grad z`.
pub fn measurement_block_sequence(refocus: bool) -> PulseSequence {
    let mut events = vec![PulseEvent::GradientZ];
    if refocus {
        events.push(PulseEvent::RefocusPiX { target: Spin::S });
    }
    events.push(PulseEvent::GradientZ);
    PulseSequence::new("ancilla_z_measurement", events)
}

fn pairwise_sum(terms: &[ComplexMatrix]) -> ComplexMatrix {
    match terms {
        [single] => single.clone(),
        _ => {
            let (left, right) = terms.split_at(terms.len() / 2);
            &pairwise_sum(left) + &pairwise_sum(right)
        }
    }
}

/// Evolves `d` through a sequence that may contain gradients.
///
/// Every `grad z` in one sample `k` imprints the same phase `φ_k = 2πk/N`
/// (a spin keeps its position between gradients); the output is the average
/// over the `N` samples, summed in a fixed pairwise order.
pub fn evolve_with_gradients(
    d: &DeviationMatrix,
    seq: &PulseSequence,
    sys: &SpinSystem,
    samples: usize,
    gamma_ratio: f64,
) -> Result<DeviationMatrix> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "gradient emulation needs at least 2 samples, got {samples}"
        )));
    }
    // unitary events are shared by all samples
    let fixed: Vec<Option<ComplexMatrix>> = seq
        .events
        .iter()
        .map(|e| match e {
            PulseEvent::GradientZ => Ok(None),
            other => event_unitary(other, sys).map(Some),
        })
        .collect::<Result<_>>()?;

    let terms: Vec<ComplexMatrix> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let grad = gradient_unitary(phi, gamma_ratio);
            let u = fixed
                .iter()
                .fold(ComplexMatrix::identity(4).unwrap(), |acc, e| {
                    e.as_ref().unwrap_or(&grad) * &acc
                });
            d.matrix().conjugate_by(&u).expect("dim 4")
        })
        .collect();

    let avg = pairwise_sum(&terms).scale(c(1.0 / samples as f64, 0.0));
    Ok(DeviationMatrix::with_label(avg, d.normalization()))
}

/// Raw output of the gradient measurement block (refocusing pulse included).
pub fn gradient_measurement_block(
    d: &DeviationMatrix,
    spec: &DephaseSpec,
) -> Result<DeviationMatrix> {
    spec.validate()?;
    let DephaseMode::Gradient { samples } = spec.mode else {
        return Err(Error::InvalidParameter(
            "gradient measurement block needs a gradient dephase spec".into(),
        ));
    };
    let seq = measurement_block_sequence(spec.refocus);
    evolve_with_gradients(d, &seq, &SpinSystem::default(), samples, spec.gamma_ratio)
}

/// Both views of a measurement block.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutput {
    /// State as it leaves the block.
    pub raw: DeviationMatrix,
    /// `raw` with the refocusing `π_x` on ¹³C undone, if one was applied.
    pub corrected: DeviationMatrix,
}

/// Runs the measurement block described by `spec`.
pub fn measure(d: &DeviationMatrix, spec: &DephaseSpec) -> Result<MeasurementOutput> {
    spec.validate()?;
    match spec.mode {
        DephaseMode::Ideal => {
            let out = ancilla_z_dephase(d);
            Ok(MeasurementOutput {
                raw: out.clone(),
                corrected: out,
            })
        }
        DephaseMode::Gradient { .. } => {
            let raw = gradient_measurement_block(d, spec)?;
            let corrected = if spec.refocus {
                raw.evolve(&refocus_unitary().dagger())?
            } else {
                raw.clone()
            };
            Ok(MeasurementOutput { raw, corrected })
        }
    }
}

/// Max magnitude over the two off-diagonal ancilla blocks.
pub fn ancilla_coherence(d: &DeviationMatrix) -> f64 {
    let m = d.matrix();
    (0..4)
        .flat_map(|r| (0..4).map(move |col| (r, col)))
        .filter(|(r, col)| r / 2 != col / 2)
        .map(|(r, col)| m.get(r, col).norm())
        .fold(0.0, f64::max)
}
