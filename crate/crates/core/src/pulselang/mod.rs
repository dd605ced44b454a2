//! Pulse programs: a small line-oriented language for radio-frequency
//! sequences, a compiler from named gates, and unitary semantics.
//!
//! Angles follow the NMR convention: a rotation by `β` about `n̂` enacts
//! `exp(−i(β/2)·n̂·σ⃗)` on the addressed spin, so `(π/2)_−y` is axis `−y`,
//! angle 90°. Free evolution under the scalar coupling is measured in whole
//! multiples of `1/(2J)`, which keeps its diagonal phases exact.

mod compile;
mod parse;
mod verify;

use std::f64::consts::PI;
use std::fmt;

pub use compile::{compile_gate, pulse_cnot_frame, GateName, PULSE_CNOT_PHASE};
pub use parse::{parse_sequence, ParseError, ParseErrorKind};
pub use verify::{verify_sequence, VerificationReport};

use crate::error::{Error, Result};
use crate::numcore::{cis, gates, rotation, ComplexMatrix};
use crate::spinmodel::{Spin, SpinSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    MinusX,
    Y,
    MinusY,
    Z,
}

impl Axis {
    pub fn vector(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::MinusX => [-1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::MinusY => [0.0, -1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::MinusX => "-x",
            Axis::Y => "y",
            Axis::MinusY => "-y",
            Axis::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseEvent {
    Rotation {
        target: Spin,
        axis: Axis,
        angle_deg: f64,
    },
    /// Free evolution for `half_periods · 1/(2J)`.
    JEvolution { half_periods: u32 },
    /// Linear z-gradient. Not a unitary; see [`crate::channels`].
    GradientZ,
    /// `π_x` on the target spin.
    RefocusPiX { target: Spin },
}

/// Largest magnitude accepted for a rotation angle, in degrees.
pub const MAX_ANGLE_DEG: f64 = 360.0;

impl PulseEvent {
    /// Checked rotation; the angle must lie in `(−360, 360]` degrees.
    pub fn rotation(target: Spin, axis: Axis, angle_deg: f64) -> Result<Self> {
        if !angle_in_range(angle_deg) {
            return Err(Error::InvalidParameter(format!(
                "rotation angle {angle_deg} deg outside (-360, 360]"
            )));
        }
        Ok(PulseEvent::Rotation {
            target,
            axis,
            angle_deg,
        })
    }

    /// Rotation by an arbitrary angle in radians, folded into `(−360°, 360°]`
    /// modulo 720° (the spinor period), which leaves the unitary unchanged.
    pub fn rotation_rad(target: Spin, axis: Axis, angle_rad: f64) -> Self {
        let mut deg = angle_rad.to_degrees().rem_euclid(720.0);
        if deg > MAX_ANGLE_DEG {
            deg -= 720.0;
        }
        PulseEvent::Rotation {
            target,
            axis,
            angle_deg: deg,
        }
    }

    pub fn j_evolution(half_periods: u32) -> Result<Self> {
        if half_periods == 0 {
            return Err(Error::InvalidParameter(
                "J evolution needs a positive duration".into(),
            ));
        }
        Ok(PulseEvent::JEvolution { half_periods })
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, PulseEvent::GradientZ)
    }

    /// Duration in seconds for J evolutions, zero for ideal (hard) pulses.
    pub fn duration(&self, sys: &SpinSystem) -> f64 {
        match self {
            PulseEvent::JEvolution { half_periods } => {
                *half_periods as f64 * sys.half_coupling_period()
            }
            _ => 0.0,
        }
    }
}

pub(crate) fn angle_in_range(deg: f64) -> bool {
    deg.is_finite() && deg > -MAX_ANGLE_DEG && deg <= MAX_ANGLE_DEG
}

impl fmt::Display for PulseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Rotation {
                target,
                axis,
                angle_deg,
            } => write!(
                f,
                "rot {} {} {}",
                target.nucleus(),
                axis.mnemonic(),
                angle_deg
            ),
            PulseEvent::JEvolution { half_periods } => write!(f, "jevolve {half_periods}/2J"),
            PulseEvent::GradientZ => write!(f, "grad z"),
            PulseEvent::RefocusPiX { target } => write!(f, "refocus {}", target.nucleus()),
        }
    }
}

/// Events in time order: the first event acts first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub name: String,
    pub events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new(name: impl Into<String>, events: Vec<PulseEvent>) -> Self {
        Self {
            name: name.into(),
            events,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Appends all events of `other`.
    pub fn then(mut self, other: &PulseSequence) -> Self {
        self.events.extend_from_slice(&other.events);
        self
    }

    /// Total free-evolution time in seconds.
    pub fn duration(&self, sys: &SpinSystem) -> f64 {
        self.events.iter().map(|e| e.duration(sys)).sum()
    }

    /// Source text in the pulse-file grammar; reparses to the same events.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("# {}\n", self.name));
        }
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

/// Unitary of a single event in the `A ⊗ S` basis.
pub fn event_unitary(e: &PulseEvent, _sys: &SpinSystem) -> Result<ComplexMatrix> {
    match *e {
        PulseEvent::Rotation {
            target,
            axis,
            angle_deg,
        } => target.embed(&rotation(axis.vector(), angle_deg.to_radians())),
        PulseEvent::JEvolution { half_periods } => {
            // exp(−i·(πJ/2)·σz⊗σz·k/(2J)) = exp(−i·kπ/4·σz⊗σz)
            let phase = half_periods as f64 * PI / 4.0;
            ComplexMatrix::diag(&[cis(-phase), cis(phase), cis(phase), cis(-phase)])
        }
        PulseEvent::RefocusPiX { target } => target.embed(&rotation([1.0, 0.0, 0.0], PI)),
        PulseEvent::GradientZ => Err(Error::NonUnitaryEvent(e.to_string())),
    }
}

/// `U_n ⋯ U_1` for events `1..n` in time order.
pub fn sequence_unitary(seq: &PulseSequence, sys: &SpinSystem) -> Result<ComplexMatrix> {
    seq.events.iter().try_fold(gates::identity(), |acc, e| {
        event_unitary(e, sys)?.matmul(&acc)
    })
}
