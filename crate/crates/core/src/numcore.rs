//! Dense complex matrices for one and two spin-1/2 systems.
//!
//! Everything here is closed form: rotations are written as
//! `cos(β/2)·I − i·sin(β/2)·n̂·σ⃗`, never via a numerical exponential.
//! Two-spin operators use the tensor order `A ⊗ S`, ancilla first.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix2, Matrix4};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute per-entry tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance used to accept a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// Tolerance used when validating caller-provided unitaries.
pub(crate) const VALIDATION_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// A square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, values: &[f64]) -> Result<Self> {
        Self::new(dim, values.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |_, _| Complex64::default())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(
            dim,
            |r, col| if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) },
        )
    }

    pub fn diag(values: &[Complex64]) -> Result<Self> {
        Self::from_fn(values.len(), |r, col| {
            if r == col {
                values[r]
            } else {
                Complex64::default()
            }
        })
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                got: b.len(),
            });
        }
        Self::from_fn(a.len(), |r, col| a[r] * b[col].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        Self {
            dim: d,
            entries: (0..d * d).map(|k| self.get(k % d, k / d).conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let d = self.dim;
        let mut entries = vec![Complex64::default(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a == Complex64::default() {
                    continue;
                }
                for col in 0..d {
                    entries[r * d + col] += a * other.get(k, col);
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.dagger())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        matches!(self.max_abs_diff(other), Ok(d) if d <= tol)
    }

    /// `max |U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = &self.dagger() * self;
        let id = Self::identity(self.dim).expect("dim already validated");
        prod.max_abs_diff(&id).expect("same dim")
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger()).expect("same dim")
    }

    /// Real parts of the eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = |r: usize, col: usize| (self.get(r, col) + self.get(col, r).conj()) * 0.5;
        let mut vals: Vec<f64> = match self.dim {
            2 => Matrix2::from_fn(herm)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
            _ => Matrix4::from_fn(herm)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
        };
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Vectors `self · v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|k| self.get(r, k) * v[k]).sum())
            .collect())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for col in 0..self.dim {
                let z = self.get(r, col);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for the checked form.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product `a ⊗ b` of two single-spin operators.
///
/// The first factor acts on the ancilla (¹H), the second on the system (¹³C),
/// so basis index `2·a + s` labels `|a s⟩`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: m.dim,
            });
        }
    }
    ComplexMatrix::from_fn(4, |r, col| a.get(r / 2, col / 2) * b.get(r % 2, col % 2))
}

/// Operator acting on the ancilla only: `m ⊗ I`.
pub fn on_ancilla(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron(m, &pauli::identity())
}

/// Operator acting on the system only: `I ⊗ m`.
pub fn on_system(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron(&pauli::identity(), m)
}

fn validate_unitary(u: &ComplexMatrix) -> Result<()> {
    let err = u.unitarity_error();
    if err > VALIDATION_TOL {
        return Err(Error::NotUnitary(err));
    }
    Ok(())
}

/// Global-phase-insensitive distance `1 − |Tr(u†v)|/dim`.
///
/// Zero exactly when `u = e^{iφ}v`; one when the two are trace-orthogonal.
pub fn gp_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    u.same_dim(v)?;
    validate_unitary(u)?;
    validate_unitary(v)?;
    let overlap = u.dagger().matmul(v)?.trace().norm() / u.dim as f64;
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}

/// Phase `φ` maximizing the overlap of `e^{iφ}u` with `v`, i.e. `arg Tr(u†v)`.
pub fn best_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    Ok(u.dagger().matmul(v)?.trace().arg())
}

/// Distance modulo a diagonal phase frame: `1 − Σᵢ|(v†u)ᵢᵢ|/dim`.
///
/// Zero exactly when `u = v·D` for some diagonal unitary `D`. Also returns
/// the phases of `D` (relative to its first entry).
pub fn frame_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, Vec<f64>)> {
    u.same_dim(v)?;
    validate_unitary(u)?;
    validate_unitary(v)?;
    let w = v.dagger().matmul(u)?;
    let diag: Vec<Complex64> = (0..w.dim).map(|i| w.get(i, i)).collect();
    let weight: f64 = diag.iter().map(|z| z.norm()).sum::<f64>() / w.dim as f64;
    let reference = diag[0].arg();
    let phases = diag
        .iter()
        .map(|z| wrap_phase(z.arg() - reference))
        .collect();
    Ok(((1.0 - weight).clamp(0.0, 1.0), phases))
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::PI;
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI + 1e-15 {
        PI
    } else {
        y
    }
}

/// `true` iff `max |m − m†| ≤ tol`.
pub fn hermitian_check(m: &ComplexMatrix, tol: f64) -> bool {
    m.hermiticity_error() <= tol
}

/// Single-spin Pauli matrices.
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2).unwrap()
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Projector `|k⟩⟨k|` for `k ∈ {0, 1}`.
    pub fn projector(k: usize) -> ComplexMatrix {
        let mut v = [0.0; 4];
        v[k * 3] = 1.0;
        ComplexMatrix::from_real(2, &v).unwrap()
    }
}

/// `exp(−i(β/2)·n̂·σ⃗)` for a unit axis `n̂ = (nx, ny, nz)`.
pub fn rotation(axis: [f64; 3], angle: f64) -> ComplexMatrix {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    let [nx, ny, nz] = axis.map(|a| a / norm);
    let (s, co) = (angle / 2.0).sin_cos();
    ComplexMatrix::new(
        2,
        vec![
            c(co, -s * nz),
            c(-s * ny, -s * nx),
            c(s * ny, -s * nx),
            c(co, s * nz),
        ],
    )
    .unwrap()
}

pub fn rx(angle: f64) -> ComplexMatrix {
    rotation([1.0, 0.0, 0.0], angle)
}

pub fn ry(angle: f64) -> ComplexMatrix {
    rotation([0.0, 1.0, 0.0], angle)
}

pub fn rz(angle: f64) -> ComplexMatrix {
    rotation([0.0, 0.0, 1.0], angle)
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, &[h, h, h, -h]).unwrap()
}

/// Ideal two-spin gates in the `A ⊗ S` basis.
pub mod gates {
    use super::{hadamard, pauli, Complex64, ComplexMatrix};

    fn controlled(target: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, |r, col| match (r / 2, col / 2) {
            (0, 0) if r == col => Complex64::new(1.0, 0.0),
            (1, 1) => target.get(r % 2, col % 2),
            _ => Complex64::default(),
        })
        .unwrap()
    }

    /// CNOT with the ancilla as control and the system as target.
    pub fn cnot() -> ComplexMatrix {
        controlled(&pauli::x())
    }

    /// Controlled-Hadamard `diag-block(I₂, H)`.
    pub fn controlled_hadamard() -> ComplexMatrix {
        controlled(&hadamard())
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(4).unwrap()
    }
}
