#![allow(dead_code)]

use qdchoice::numcore::{c, Complex64, ComplexMatrix};
use qdchoice::spinmodel::{DeviationMatrix, Ket};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Hermitian, trace 1, not necessarily positive.
pub fn random_hermitian_trace_one<R: Rng>(rng: &mut R) -> DeviationMatrix {
    let diag: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let upper: [Complex64; 6] =
        std::array::from_fn(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let shift = (1.0 - diag.iter().sum::<f64>()) / 4.0;
    // row-major index of (r, col), r < col, among the six upper entries
    let pair = |r: usize, col: usize| r * (7 - r) / 2 + col - r - 1;
    let m = ComplexMatrix::from_fn(4, |r, col| match r.cmp(&col) {
        std::cmp::Ordering::Equal => c(diag[r] + shift, 0.0),
        std::cmp::Ordering::Less => upper[pair(r, col)],
        std::cmp::Ordering::Greater => upper[pair(col, r)].conj(),
    })
    .unwrap();
    DeviationMatrix::raw(m).unwrap()
}

/// Haar-distributed two-qubit ket.
pub fn random_ket<R: Rng>(rng: &mut R) -> Ket {
    let mut v = [c(0.0, 0.0); 4];
    for z in &mut v {
        *z = c(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    Ket(v).normalized()
}
