//! Gate-to-pulse compiler.
//!
//! The CNOT (control ¹H, target ¹³C) is the nine-event liquid-state sequence
//!
//! ```text
//! (π/2)_y^C  U(1/2J)  (π/2)_x^C  (π/2)_−y^C  (π/2)_−x^C  (π/2)_y^C
//! (π/2)_−y^H  (π/2)_x^H  (π/2)_y^H
//! ```
//!
//! Multiplying the closed-form event matrices gives
//!
//! ```text
//! U_pulse = e^{−iπ/4} · CNOT · (I ⊗ σz)
//! ```
//!
//! i.e. the sequence is a CNOT only up to a σz on the target applied before
//! it. Its global-phase distance to the textbook CNOT is 1. Circuits that
//! embed it therefore cancel the frame with a `z 180°` pulse on ¹³C
//! (`−i·σz`) ahead of the sequence; see [`GateName::ChAs`].

use std::f64::consts::PI;

use super::{Axis, PulseEvent, PulseSequence};
use crate::numcore::{gates, on_ancilla, on_system, pauli, rx, ry, rz, ComplexMatrix};
use crate::spinmodel::{Spin, SpinSystem};

/// Global phase of the nine-pulse CNOT relative to `CNOT·(I⊗σz)`.
pub const PULSE_CNOT_PHASE: f64 = -PI / 4.0;

/// The diagonal frame `I ⊗ σz` separating the pulse CNOT from the textbook one.
pub fn pulse_cnot_frame() -> ComplexMatrix {
    on_system(&pauli::z()).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateName {
    /// CNOT, control A, target S.
    CnotAs,
    /// Controlled-Hadamard, control A, target S.
    ChAs,
    /// `(π/2)_y` on S.
    PseudoHS,
    /// y rotation of the ancilla by the given angle (radians).
    RyA(f64),
    /// z rotation of the system by the given angle (radians).
    RzS(f64),
    /// `π_x` on S.
    PiXS,
}

impl GateName {
    /// The ideal unitary this gate stands for.
    ///
    /// For [`GateName::CnotAs`] this is the textbook CNOT, which the pulse
    /// sequence matches only modulo [`pulse_cnot_frame`].
    pub fn ideal_unitary(&self) -> ComplexMatrix {
        match *self {
            GateName::CnotAs => gates::cnot(),
            GateName::ChAs => gates::controlled_hadamard(),
            GateName::PseudoHS => on_system(&ry(PI / 2.0)).unwrap(),
            GateName::RyA(alpha) => on_ancilla(&ry(alpha)).unwrap(),
            GateName::RzS(theta) => on_system(&rz(theta)).unwrap(),
            GateName::PiXS => on_system(&rx(PI)).unwrap(),
        }
    }

    /// Unitary implemented by the compiled pulse sequence, up to global phase.
    pub fn pulse_class_unitary(&self) -> ComplexMatrix {
        match self {
            GateName::CnotAs => &gates::cnot() * &pulse_cnot_frame(),
            other => other.ideal_unitary(),
        }
    }
}

fn rot(target: Spin, axis: Axis, angle_deg: f64) -> PulseEvent {
    PulseEvent::Rotation {
        target,
        axis,
        angle_deg,
    }
}

fn cnot_events() -> Vec<PulseEvent> {
    use Axis::*;
    use Spin::*;
    vec![
        rot(S, Y, 90.0),
        PulseEvent::JEvolution { half_periods: 1 },
        rot(S, X, 90.0),
        rot(S, MinusY, 90.0),
        rot(S, MinusX, 90.0),
        rot(S, Y, 90.0),
        rot(A, MinusY, 90.0),
        rot(A, X, 90.0),
        rot(A, Y, 90.0),
    ]
}

/// Compiles a named gate to a pulse sequence.
///
/// The controlled-Hadamard is `R_y^S(−45°) · CNOT · R_y^S(45°)`, with the
/// pulse CNOT's σz frame cancelled by a leading `z 180°` on ¹³C. The result
/// equals `diag-block(I, H)` up to a global phase.
pub fn compile_gate(g: GateName, _sys: &SpinSystem) -> PulseSequence {
    let (name, events) = match g {
        GateName::CnotAs => ("cnot_as", cnot_events()),
        GateName::ChAs => {
            let mut events = vec![rot(Spin::S, Axis::Y, 45.0), rot(Spin::S, Axis::Z, 180.0)];
            events.extend(cnot_events());
            events.push(rot(Spin::S, Axis::Y, -45.0));
            ("ch_as", events)
        }
        GateName::PseudoHS => ("pseudo_h_s", vec![rot(Spin::S, Axis::Y, 90.0)]),
        GateName::RyA(alpha) => (
            "ry_a",
            vec![PulseEvent::rotation_rad(Spin::A, Axis::Y, alpha)],
        ),
        GateName::RzS(theta) => (
            "rz_s",
            vec![PulseEvent::rotation_rad(Spin::S, Axis::Z, theta)],
        ),
        GateName::PiXS => ("pi_x_s", vec![PulseEvent::RefocusPiX { target: Spin::S }]),
    };
    PulseSequence::new(name, events)
}

#[cfg(test)]
fn ch_reference_product() -> ComplexMatrix {
    let pre = on_system(&ry(PI / 4.0)).unwrap();
    let post = on_system(&ry(-PI / 4.0)).unwrap();
    &(&post * &gates::cnot()) * &pre
}
