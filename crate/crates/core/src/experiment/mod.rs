//! The delayed-choice protocol.
//!
//! Starting from the pseudo-pure `|00⟩`, the circuit applies
//!
//! 1. `R_y^A(α)`: the ancilla becomes `cos(α/2)|0⟩ + sin(α/2)|1⟩`, a
//!    second beam splitter that is "absent" with amplitude `cos(α/2)` and
//!    "present" with amplitude `sin(α/2)`;
//! 2. `(π/2)_y^S`: the first beam splitter, `(|0⟩+|1⟩)/√2` on the paths;
//! 3. `R_z^S(θ)`: the phase shift between the arms;
//! 4. the controlled-Hadamard: the second beam splitter, quantum-controlled;
//! 5. an ancilla σz measurement (dephasing).
//!
//! Before step 5 the state is, up to the global phase `e^{−iθ/2}`,
//!
//! ```text
//! |ψ⟩ = cos(α/2)|0⟩_A|particle⟩_S + sin(α/2)|1⟩_A|wave⟩_S
//! |particle⟩ = (|0⟩ + e^{iθ}|1⟩)/√2
//! |wave⟩     = e^{iθ/2}(cos(θ/2)|0⟩ − i·sin(θ/2)|1⟩)
//! ```
//!
//! and after it the deviation matrix is block diagonal,
//! `cos²(α/2)|0⟩⟨0|⊗|particle⟩⟨particle| + sin²(α/2)|1⟩⟨1|⊗|wave⟩⟨wave|`.
//!
//! The fringe signal is the population `⟨10|Δρ|10⟩ = sin²(α/2)·cos²(θ/2)`,
//! flat in θ for a pure particle (`α = 0`) and a full cosine for a pure
//! wave (`α = π`). Literature calls `|10⟩` "the initial state" even though
//! the preparation is `|00⟩`; we follow the `|10⟩` projector as written.

mod fit;
mod sweep;

use std::f64::consts::{PI, TAU};

pub use fit::{fit_cosine, fit_fringes, AlphaFit, FringeFit};
pub use sweep::{add_detection_noise, run_sweep, DetectionRecord};

use crate::channels::{measure, DephaseSpec};
use crate::error::{Error, Result};
use crate::numcore::{c, cis, gates, kron, pauli, Complex64, ComplexMatrix};
use crate::pulselang::{compile_gate, sequence_unitary, GateName, PulseSequence};
use crate::spinmodel::{observable_trace, pseudo_pure, DeviationMatrix, Ket, SpinSystem};

/// How gates are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Ideal gate matrices.
    Gate,
    /// Compiled pulse sequences.
    Pulse,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Gate => "gate",
            Level::Pulse => "pulse",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gate" => Ok(Level::Gate),
            "pulse" => Ok(Level::Pulse),
            other => Err(Error::InvalidParameter(format!(
                "unknown level '{other}' (expected gate or pulse)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DelayedChoiceConfig {
    /// Ancilla preparation angle in `[0, π]`.
    pub alpha: f64,
    /// Interferometer phase in `[0, 2π]`.
    pub theta: f64,
    pub level: Level,
    pub dephase: DephaseSpec,
}

const ANGLE_SLACK: f64 = 1e-12;

impl DelayedChoiceConfig {
    pub fn new(alpha: f64, theta: f64, level: Level, dephase: DephaseSpec) -> Result<Self> {
        let cfg = Self {
            alpha,
            theta,
            level,
            dephase,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn gate(alpha: f64, theta: f64) -> Result<Self> {
        Self::new(alpha, theta, Level::Gate, DephaseSpec::ideal())
    }

    pub fn validate(&self) -> Result<()> {
        check_angles(self.alpha, self.theta)?;
        self.dephase.validate()
    }
}

fn check_angles(alpha: f64, theta: f64) -> Result<()> {
    if !(alpha.is_finite() && (-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&alpha)) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, pi], got {alpha}"
        )));
    }
    if !(theta.is_finite() && (-ANGLE_SLACK..=TAU + ANGLE_SLACK).contains(&theta)) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 2pi], got {theta}"
        )));
    }
    Ok(())
}

/// `(|0⟩ + e^{iθ}|1⟩)/√2`.
pub fn particle_ket(theta: f64) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(h, 0.0), cis(theta) * h]
}

/// `e^{iθ/2}(cos(θ/2)|0⟩ − i·sin(θ/2)|1⟩)`.
pub fn wave_ket(theta: f64) -> [Complex64; 2] {
    let g = cis(theta / 2.0);
    let (s, co) = (theta / 2.0).sin_cos();
    [g * co, g * c(0.0, -s)]
}

/// The entangled particle/wave superposition produced by the circuit.
pub fn ideal_final_state(alpha: f64, theta: f64) -> Ket {
    let (sa, ca) = (alpha / 2.0).sin_cos();
    let p = particle_ket(theta);
    let w = wave_ket(theta);
    Ket([ca * p[0], ca * p[1], sa * w[0], sa * w[1]]).normalized()
}

/// Closed-form dephased deviation matrix (trace 1).
pub fn expected_dephased_deviation(alpha: f64, theta: f64) -> DeviationMatrix {
    let (sa, ca) = (alpha / 2.0).sin_cos();
    let p = particle_ket(theta);
    let w = wave_ket(theta);
    let particle = ComplexMatrix::outer(&p, &p).unwrap();
    let wave = ComplexMatrix::outer(&w, &w).unwrap();
    let m = &kron(&pauli::projector(0), &particle.scale(c(ca * ca, 0.0))).unwrap()
        + &kron(&pauli::projector(1), &wave.scale(c(sa * sa, 0.0))).unwrap();
    DeviationMatrix::projector_normalized(m).expect("convex mix of projectors")
}

/// Gates of the interference stage, in time order.
pub fn circuit_gates(alpha: f64, theta: f64) -> [GateName; 4] {
    [
        GateName::RyA(alpha),
        GateName::PseudoHS,
        GateName::RzS(theta),
        GateName::ChAs,
    ]
}

/// Full pulse program of the interference stage followed by the measurement block.
pub fn circuit_sequence(alpha: f64, theta: f64, refocus: bool, sys: &SpinSystem) -> PulseSequence {
    let body = circuit_gates(alpha, theta)
        .iter()
        .fold(PulseSequence::new("delayed_choice", vec![]), |acc, g| {
            acc.then(&compile_gate(*g, sys))
        });
    body.then(&crate::channels::measurement_block_sequence(refocus))
}

/// Unitary of the interference stage (before measurement).
pub fn circuit_unitary(
    alpha: f64,
    theta: f64,
    level: Level,
    sys: &SpinSystem,
) -> Result<ComplexMatrix> {
    circuit_gates(alpha, theta)
        .iter()
        .try_fold(gates::identity(), |acc, g| {
            let u = match level {
                Level::Gate => g.ideal_unitary(),
                Level::Pulse => sequence_unitary(&compile_gate(*g, sys), sys)?,
            };
            u.matmul(&acc)
        })
}

/// Pure state right before the measurement block.
pub fn prepared_state(alpha: f64, theta: f64, level: Level, sys: &SpinSystem) -> Result<Ket> {
    check_angles(alpha, theta)?;
    Ket::basis(0, 0).evolve(&circuit_unitary(alpha, theta, level, sys)?)
}

/// Runs the protocol and returns the post-measurement deviation matrix
/// (refocusing rotation undone).
pub fn run_circuit(cfg: &DelayedChoiceConfig, sys: &SpinSystem) -> Result<DeviationMatrix> {
    cfg.validate()?;
    let initial = pseudo_pure(&Ket::basis(0, 0))?;
    let u = circuit_unitary(cfg.alpha, cfg.theta, cfg.level, sys)?;
    let before = initial.evolve(&u)?;
    Ok(measure(&before, &cfg.dephase)?.corrected)
}

/// The fringe observable `|10⟩⟨10|`.
pub fn detection_projector() -> ComplexMatrix {
    Ket::basis(1, 0).projector()
}

/// `Tr(Δρ·|10⟩⟨10|)`.
pub fn detection_probability(d: &DeviationMatrix) -> Result<f64> {
    observable_trace(d, &detection_projector())
}

/// `sin²(α/2)·cos²(θ/2)`.
pub fn detection_closed_form(alpha: f64, theta: f64) -> f64 {
    (alpha / 2.0).sin().powi(2) * (theta / 2.0).cos().powi(2)
}

/// Fringe amplitude law `sin²(α/2)/2`.
pub fn expected_fringe_amplitude(alpha: f64) -> f64 {
    (alpha / 2.0).sin().powi(2) / 2.0
}
