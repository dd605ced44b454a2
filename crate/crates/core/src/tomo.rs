//! Two-qubit state tomography by linear inversion.
//!
//! Any Hermitian trace-1 4×4 matrix expands as
//! `Δρ = (I + Σ_P ⟨P⟩·P)/4` over the fifteen non-identity Pauli products
//! `P = σᵢ ⊗ σⱼ`, with `⟨P⟩ = Tr(Δρ·P)`. Labels put the ancilla letter
//! first, so `"ZI"` is `σz^A ⊗ I^S`.
//!
//! Readout pulses are not simulated; expectations come straight from Δρ.
//! Noisy data may reconstruct to a non-positive matrix. That is reported
//! through [`DeviationMatrix::min_eigenvalue`] and the `Raw` label, never
//! silently repaired.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numcore::{c, kron, pauli, ComplexMatrix, DEFAULT_TOL};
use crate::spinmodel::DeviationMatrix;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn single(letter: usize) -> ComplexMatrix {
    match letter {
        0 => pauli::identity(),
        1 => pauli::x(),
        2 => pauli::y(),
        _ => pauli::z(),
    }
}

/// The fifteen labels in fixed order `IX, IY, IZ, XI, …, ZZ`.
pub fn pauli_labels() -> [String; 15] {
    std::array::from_fn(|k| {
        let idx = k + 1;
        format!("{}{}", LETTERS[idx / 4], LETTERS[idx % 4])
    })
}

/// `σᵢ ⊗ σⱼ` for a two-letter label such as `"XZ"`.
pub fn pauli_operator(label: &str) -> Result<ComplexMatrix> {
    let idx = label_index(label)?;
    kron(&single((idx + 1) / 4), &single((idx + 1) % 4))
}

fn label_index(label: &str) -> Result<usize> {
    let up = label.to_ascii_uppercase();
    let mut chars = up.chars();
    let (Some(a), Some(b), None) = (chars.next(), chars.next(), chars.next()) else {
        return Err(Error::InvalidParameter(format!(
            "bad Pauli label '{label}'"
        )));
    };
    let pos = |ch| LETTERS.iter().position(|&l| l == ch);
    match (pos(a), pos(b)) {
        (Some(0), Some(0)) => Err(Error::InvalidParameter(
            "the identity 'II' is fixed by the trace, not measured".into(),
        )),
        (Some(i), Some(j)) => Ok(i * 4 + j - 1),
        _ => Err(Error::InvalidParameter(format!(
            "bad Pauli label '{label}'"
        ))),
    }
}

/// Expectation values of the fifteen non-identity Pauli products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliExpectations {
    values: [f64; 15],
}

const RANGE_SLACK: f64 = 1e-9;

impl PauliExpectations {
    /// Values in [`pauli_labels`] order; each must lie in `[−1, 1]`.
    pub fn new(values: [f64; 15]) -> Result<Self> {
        if let Some(v) = values
            .iter()
            .find(|v| !(v.is_finite() && v.abs() <= 1.0 + RANGE_SLACK))
        {
            return Err(Error::InvalidParameter(format!(
                "Pauli expectation {v} outside [-1, 1]"
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros() -> Self {
        Self { values: [0.0; 15] }
    }

    pub fn values(&self) -> &[f64; 15] {
        &self.values
    }

    pub fn get(&self, label: &str) -> Result<f64> {
        Ok(self.values[label_index(label)?])
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        pauli_labels().into_iter().zip(self.values).collect()
    }

    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        if map.len() != 15 {
            return Err(Error::InvalidParameter(format!(
                "expected 15 Pauli expectations, got {}",
                map.len()
            )));
        }
        let mut values = [f64::NAN; 15];
        for (label, &v) in map {
            values[label_index(label)?] = v;
        }
        Self::new(values)
    }
}

impl Serialize for PauliExpectations {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliExpectations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        Self::from_map(&map).map_err(serde::de::Error::custom)
    }
}

/// `⟨P⟩ = Tr(Δρ·P)` for all fifteen products.
pub fn measure_expectations(d: &DeviationMatrix) -> Result<PauliExpectations> {
    let mut values = [0.0; 15];
    for (k, label) in pauli_labels().iter().enumerate() {
        let v = d.matrix().matmul(&pauli_operator(label)?)?.trace();
        if v.im.abs() > DEFAULT_TOL {
            return Err(Error::ComplexExpectation(v.im));
        }
        values[k] = v.re;
    }
    PauliExpectations::new(values)
}

/// `Δρ = (I + Σ ⟨P⟩·P)/4`.
///
/// Hermitian with trace 1 for any input; labelled `Raw` when not positive.
pub fn reconstruct(e: &PauliExpectations) -> Result<DeviationMatrix> {
    let mut m = ComplexMatrix::identity(4)?;
    for (label, v) in pauli_labels().iter().zip(e.values) {
        m = &m + &pauli_operator(label)?.scale(c(v, 0.0));
    }
    DeviationMatrix::classify(m.scale(c(0.25, 0.0)))
}

/// Adds seeded Gaussian noise of width `sigma`, clamped to `[−1, 1]`.
pub fn perturb(e: &PauliExpectations, sigma: f64, seed: u64) -> Result<PauliExpectations> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(*e);
    }
    let normal = Normal::new(0.0, sigma).map_err(|err| Error::InvalidParameter(err.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = e
        .values
        .map(|v| (v + normal.sample(&mut rng)).clamp(-1.0, 1.0));
    Ok(PauliExpectations { values })
}
