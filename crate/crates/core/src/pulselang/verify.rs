use std::fmt;

use serde::Serialize;

use super::{sequence_unitary, PulseSequence};
use crate::error::{Error, Result};
use crate::numcore::{
    best_global_phase, frame_distance, gp_distance, ComplexMatrix, VALIDATION_TOL,
};
use crate::spinmodel::SpinSystem;

/// Outcome of checking a pulse sequence against a target unitary.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub sequence: String,
    pub events: usize,
    /// `1 − |Tr(U†V)|/4`; the pass criterion.
    pub gp_distance: f64,
    /// `arg Tr(target†·U)`: the sequence equals `e^{iφ}·target` at best fit.
    /// Reported as 0 when the trace vanishes and the phase is undefined.
    pub global_phase: f64,
    /// Distance modulo a diagonal frame applied before the target.
    pub frame_distance: f64,
    /// Phases of that frame, relative to `|00⟩`.
    pub frame_phases: Vec<f64>,
    /// `|⟨i|U|j⟩|²`, row `i`, column `j`.
    pub transition_probabilities: [[f64; 4]; 4],
    pub tolerance: f64,
    pub passed: bool,
}

/// Multiplies out `seq` and compares it with `target` up to global phase.
pub fn verify_sequence(
    seq: &PulseSequence,
    target: &ComplexMatrix,
    sys: &SpinSystem,
    tol: f64,
) -> Result<VerificationReport> {
    if target.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: target.dim(),
        });
    }
    let err = target.unitarity_error();
    if err > VALIDATION_TOL {
        return Err(Error::NotUnitary(err));
    }
    let u = sequence_unitary(seq, sys)?;
    let distance = gp_distance(&u, target)?;
    let (frame, frame_phases) = frame_distance(&u, target)?;
    let transition_probabilities =
        std::array::from_fn(|i| std::array::from_fn(|j| u.get(i, j).norm_sqr()));
    Ok(VerificationReport {
        sequence: seq.name.clone(),
        events: seq.len(),
        gp_distance: distance,
        global_phase: if distance > 1.0 - VALIDATION_TOL {
            0.0
        } else {
            best_global_phase(target, &u)?
        },
        frame_distance: frame,
        frame_phases,
        transition_probabilities,
        tolerance: tol,
        passed: distance <= tol,
    })
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.sequence.is_empty() {
            "<unnamed>"
        } else {
            &self.sequence
        };
        writeln!(f, "sequence        {name} ({} events)", self.events)?;
        writeln!(f, "gp_distance     {:.3e}", self.gp_distance)?;
        writeln!(f, "global_phase    {:+.6} rad", self.global_phase)?;
        write!(f, "frame_distance  {:.3e}  phases [", self.frame_distance)?;
        for (k, p) in self.frame_phases.iter().enumerate() {
            let sep = if k == 0 { "" } else { ", " };
            write!(f, "{sep}{p:+.4}")?;
        }
        writeln!(f, "]")?;
        writeln!(f, "|<i|U|j>|^2     |00>     |01>     |10>     |11>")?;
        for (i, row) in self.transition_probabilities.iter().enumerate() {
            write!(f, "  <{:02b}|       ", i)?;
            for p in row {
                write!(f, "{p:8.5} ")?;
            }
            writeln!(f)?;
        }
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        writeln!(f, "result          {verdict} (tol {:.1e})", self.tolerance)
    }
}
