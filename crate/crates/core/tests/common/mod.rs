//! Helpers shared by the integration tests.

#![allow(dead_code)]

use entangle_core::linalg::kron;
use entangle_core::states::{make_state, Field, StateSpec};
use entangle_core::{ComplexMatrix, DensityMatrix, C64};

/// Unitary from the Gram–Schmidt orthonormalization of the columns of a
/// matrix filled from `xs` (`2·d²` reals, re/im interleaved, row-major).
pub fn unitary(d: usize, xs: &[f64]) -> ComplexMatrix {
    assert_eq!(xs.len(), 2 * d * d);
    let m = ComplexMatrix::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        C64::new(xs[k], xs[k + 1])
    });
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = m.column(j);
        // Keep the matrix well conditioned whatever the draw.
        v[j] += C64::new(3.0, 0.0);
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `U_A ⊗ U_B` from `2(d_A² + d_B²)` reals.
pub fn local_unitary(da: usize, db: usize, xs: &[f64]) -> ComplexMatrix {
    let (a, b) = xs.split_at(2 * da * da);
    kron(&unitary(da, a), &unitary(db, b))
}

pub fn random_mixed(dims: (usize, usize), field: Field, seed: u64) -> DensityMatrix {
    make_state(&StateSpec::RandomMixed { dims, field, seed }).unwrap()
}

pub fn random_pure(dims: (usize, usize), seed: u64) -> DensityMatrix {
    make_state(&StateSpec::RandomPure { dims, field: Field::Complex, seed }).unwrap()
}

/// Von Neumann entropy in bits.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.spectrum()
        .unwrap()
        .eigenvalues
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.log2())
        .sum()
}
