//! The two-spin ensemble: ¹H ancilla (A) and ¹³C system (S).
//!
//! A liquid-state sample sits in the high-temperature regime
//! `ρ = I/4 + ε·Δρ'`, where all coherent dynamics live in the deviation part.
//! [`DeviationMatrix`] stores `Δρ` in projector normalization (`Tr Δρ = 1`),
//! so a pseudo-pure state is literally `|ψ⟩⟨ψ|`. The identity shift is
//! applied only in [`full_density`], as `ρ = I/4 + ε(Δρ − I/4)`.
//!
//! Overall normalization of the post-measurement deviation matrix is a
//! convention; every observable in this crate is reported at trace 1.

use crate::error::{Error, Result};
use crate::numcore::{c, hermitian_check, kron, pauli, Complex64, ComplexMatrix, DEFAULT_TOL};

/// Default scalar coupling for ¹³C-labelled chloroform, in Hz.
pub const DEFAULT_J_HZ: f64 = 215.1;
/// Default ensemble polarization scale `ε = ħω_L / 4k_BT`.
pub const DEFAULT_EPSILON: f64 = 1e-5;
/// Default gyromagnetic ratio `γ_C/γ_H`.
pub const DEFAULT_GAMMA_RATIO: f64 = 0.2514;

const MAX_EPSILON: f64 = 0.01;

/// The spin labels. `A` is the ¹H ancilla, `S` the ¹³C system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Spin {
    A,
    S,
}

impl Spin {
    /// Nucleus symbol used in pulse files.
    pub fn nucleus(self) -> &'static str {
        match self {
            Spin::A => "H",
            Spin::S => "C",
        }
    }

    /// Lifts a single-spin operator onto the two-spin space.
    pub fn embed(self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            Spin::A => kron(m, &pauli::identity()),
            Spin::S => kron(&pauli::identity(), m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpinSystem {
    j_coupling: f64,
    epsilon: f64,
}

impl SpinSystem {
    pub fn new(j_coupling: f64, epsilon: f64) -> Result<Self> {
        if !(j_coupling.is_finite() && j_coupling > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "J coupling must be positive, got {j_coupling}"
            )));
        }
        if !(epsilon.is_finite() && (0.0..MAX_EPSILON).contains(&epsilon)) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, {MAX_EPSILON}), got {epsilon}"
            )));
        }
        Ok(Self {
            j_coupling,
            epsilon,
        })
    }

    pub fn j_coupling(&self) -> f64 {
        self.j_coupling
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Wall-clock length of `U(1/2J)` in seconds.
    pub fn half_coupling_period(&self) -> f64 {
        1.0 / (2.0 * self.j_coupling)
    }
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self {
            j_coupling: DEFAULT_J_HZ,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// A two-spin ket in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (ancilla first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket(pub [Complex64; 4]);

impl Ket {
    /// Computational basis state `|a s⟩`.
    pub fn basis(a: usize, s: usize) -> Self {
        let mut v = [Complex64::default(); 4];
        v[2 * a + s] = c(1.0, 0.0);
        Ket(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Ket(self.0.map(|z| z / n))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.0, &self.0).expect("dim 4")
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Ket> {
        let v = u.apply(&self.0)?;
        Ok(Ket([v[0], v[1], v[2], v[3]]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `Tr Δρ = 1` and `Δρ ≥ 0`; transforms like a density matrix.
    ProjectorNormalized,
    /// Hermitian only, no trace or sign constraint.
    Raw,
}

/// A Hermitian 4×4 deviation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMatrix {
    delta: ComplexMatrix,
    normalization: Normalization,
}

impl DeviationMatrix {
    /// Validates trace 1, Hermiticity and positivity (all at `1e−10`).
    pub fn projector_normalized(delta: ComplexMatrix) -> Result<Self> {
        Self::check_dim(&delta)?;
        Self::check_hermitian(&delta)?;
        let tr = delta.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = delta.min_eigenvalue();
        if min < -DEFAULT_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            delta,
            normalization: Normalization::ProjectorNormalized,
        })
    }

    pub fn raw(delta: ComplexMatrix) -> Result<Self> {
        Self::check_dim(&delta)?;
        Self::check_hermitian(&delta)?;
        Ok(Self {
            delta,
            normalization: Normalization::Raw,
        })
    }

    /// Picks the strongest normalization label the matrix satisfies.
    pub fn classify(delta: ComplexMatrix) -> Result<Self> {
        match Self::projector_normalized(delta.clone()) {
            Ok(d) => Ok(d),
            Err(Error::InvalidTrace(_) | Error::NotPositive(_)) => Self::raw(delta),
            Err(e) => Err(e),
        }
    }

    /// For maps already known to preserve the label (unitary conjugation,
    /// dephasing, convex mixing).
    pub(crate) fn with_label(delta: ComplexMatrix, normalization: Normalization) -> Self {
        debug_assert_eq!(delta.dim(), 4);
        Self {
            delta,
            normalization,
        }
    }

    fn check_dim(delta: &ComplexMatrix) -> Result<()> {
        if delta.dim() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: delta.dim(),
            });
        }
        Ok(())
    }

    fn check_hermitian(delta: &ComplexMatrix) -> Result<()> {
        if !hermitian_check(delta, DEFAULT_TOL) {
            return Err(Error::NotHermitian(delta.hermiticity_error()));
        }
        Ok(())
    }

    /// The maximally mixed pseudo-state `I/4`.
    pub fn maximally_mixed() -> Self {
        Self::with_label(
            ComplexMatrix::identity(4).unwrap().scale(c(0.25, 0.0)),
            Normalization::ProjectorNormalized,
        )
    }

    /// Thermal-equilibrium deviation `σz^H ⊗ I + γ·I ⊗ σz^C` (raw, traceless).
    ///
    /// `gamma_ratio` is `γ_C/γ_H`; [`DEFAULT_GAMMA_RATIO`] for ¹³C/¹H.
    pub fn thermal_equilibrium(gamma_ratio: f64) -> Self {
        let zh = kron(&pauli::z(), &pauli::identity()).unwrap();
        let zc = kron(&pauli::identity(), &pauli::z()).unwrap();
        Self::with_label(&zh + &zc.scale(c(gamma_ratio, 0.0)), Normalization::Raw)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.delta
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn trace(&self) -> f64 {
        self.delta.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.delta.min_eigenvalue()
    }

    /// `U Δρ U†`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self::with_label(
            self.delta.conjugate_by(u)?,
            self.normalization,
        ))
    }

    /// Populations `⟨k|Δρ|k⟩`.
    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.delta.get(k, k).re)
    }
}

/// `|ψ⟩⟨ψ|` for a normalized ket.
pub fn pseudo_pure(ket: &Ket) -> Result<DeviationMatrix> {
    let norm = ket.norm();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(DeviationMatrix::with_label(
        ket.projector(),
        Normalization::ProjectorNormalized,
    ))
}

/// Full ensemble density `I/4 + ε(Δρ − I/4)`.
pub fn full_density(sys: &SpinSystem, d: &DeviationMatrix) -> Result<ComplexMatrix> {
    if d.normalization != Normalization::ProjectorNormalized {
        return Err(Error::InvalidParameter(
            "full density needs a projector-normalized deviation matrix".into(),
        ));
    }
    let quarter = ComplexMatrix::identity(4)?.scale(c(0.25, 0.0));
    let shifted = &d.delta - &quarter;
    let rho = &quarter + &shifted.scale(c(sys.epsilon, 0.0));
    let min = rho.min_eigenvalue();
    if min < -DEFAULT_TOL {
        return Err(Error::NotPositive(min));
    }
    Ok(rho)
}

/// `Re Tr(Δρ · obs)` for a Hermitian observable.
pub fn observable_trace(d: &DeviationMatrix, obs: &ComplexMatrix) -> Result<f64> {
    if obs.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: obs.dim(),
        });
    }
    if !hermitian_check(obs, DEFAULT_TOL) {
        return Err(Error::NotHermitian(obs.hermiticity_error()));
    }
    let value = d.delta.matmul(obs)?.trace();
    if value.im.abs() >= DEFAULT_TOL {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}
