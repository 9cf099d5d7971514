//! Named states and seeded random ensembles.
//!
//! Qubit ordering: the leftmost ket symbol is subsystem A and the most
//! significant bit of the computational index. An `n`-qubit state is split
//! as `(2, 2^(n-1))`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, Subsystem, C64, ZERO};

/// Largest register handled by the named multi-qubit families.
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleMeasure {
    /// `ρ = GG†/Tr(GG†)` with `G` a square Ginibre matrix.
    HilbertSchmidt,
    /// `|ψ⟩⟨ψ|` with `ψ` a normalized Gaussian vector.
    HaarPure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    /// 1: (|00⟩+|11⟩)/√2, 2: (|00⟩−|11⟩)/√2, 3: (|10⟩+|01⟩)/√2, 4: (|01⟩−|10⟩)/√2
    Bell(u8),
    Ghz(usize),
    W(usize),
    /// Three-qubit marginal of `|W₄⟩` after losing one particle.
    WLike3,
    /// `α|W_n⟩ + e^{iφ}√(1−α²)|GHZ_n⟩`
    Superposition { n: usize, alpha: f64, phase: f64 },
    /// `√λ|00⟩ + √(1−λ)|11⟩`
    SchmidtPure(f64),
    /// `w|Ψ⁻⟩⟨Ψ⁻| + (1−w)I/4`
    Werner(f64),
    RandomPure { dims: (usize, usize), field: Field, seed: u64 },
    RandomMixed { dims: (usize, usize), field: Field, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub count: usize,
    pub seed: u64,
    pub field: Field,
    pub measure: EnsembleMeasure,
    pub dims: (usize, usize),
}

fn basis(n_qubits: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 1 << n_qubits];
    v[index] = C64::new(1.0, 0.0);
    v
}

fn check_qubits(n: usize) -> Result<()> {
    if (2..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "qubit count {n} outside 2..={MAX_QUBITS}"
        )))
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} = {x} outside [0, 1]")))
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`
pub fn ghz_vector(n: usize) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![ZERO; 1 << n];
    v[0] = C64::new(s, 0.0);
    v[(1 << n) - 1] = C64::new(s, 0.0);
    v
}

/// Uniform superposition of the `n` single-excitation basis states.
pub fn w_vector(n: usize) -> Vec<C64> {
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; 1 << n];
    for k in 0..n {
        v[1 << k] = amp;
    }
    v
}

fn split(n: usize) -> (usize, usize) {
    (2, 1 << (n - 1))
}

fn bell_vector(index: u8) -> Result<Vec<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (C64::new(s, 0.0), C64::new(-s, 0.0));
    Ok(match index {
        1 => vec![a, ZERO, ZERO, a],
        2 => vec![a, ZERO, ZERO, b],
        3 => vec![ZERO, a, a, ZERO],
        4 => vec![ZERO, a, b, ZERO],
        _ => return Err(Error::InvalidSpec(format!("Bell index {index} outside 1..=4"))),
    })
}

/// Builds the density matrix for a named state family.
pub fn make_state(spec: &StateSpec) -> Result<DensityMatrix> {
    match *spec {
        StateSpec::Bell(index) => DensityMatrix::from_pure(&bell_vector(index)?, 2, 2),
        StateSpec::Ghz(n) => {
            check_qubits(n)?;
            let (da, db) = split(n);
            DensityMatrix::from_pure(&ghz_vector(n), da, db)
        }
        StateSpec::W(n) => {
            check_qubits(n)?;
            let (da, db) = split(n);
            DensityMatrix::from_pure(&w_vector(n), da, db)
        }
        StateSpec::WLike3 => {
            let w4 = DensityMatrix::from_pure(&w_vector(4), 8, 2)?;
            w4.partial_trace(Subsystem::B)?.with_split(2, 4)
        }
        StateSpec::Superposition { n, alpha, phase } => {
            check_qubits(n)?;
            check_unit("alpha", alpha)?;
            if !phase.is_finite() {
                return Err(Error::InvalidSpec("non-finite phase".into()));
            }
            let beta = C64::from_polar((1.0 - alpha * alpha).max(0.0).sqrt(), phase);
            let v: Vec<C64> = w_vector(n)
                .iter()
                .zip(ghz_vector(n))
                .map(|(w, g)| w * alpha + g * beta)
                .collect();
            let (da, db) = split(n);
            DensityMatrix::from_pure(&v, da, db)
        }
        StateSpec::SchmidtPure(lambda) => {
            check_unit("lambda", lambda)?;
            let mut v = basis(2, 0);
            v[0] = C64::new(lambda.sqrt(), 0.0);
            v[3] = C64::new((1.0 - lambda).sqrt(), 0.0);
            DensityMatrix::from_pure(&v, 2, 2)
        }
        StateSpec::Werner(w) => {
            check_unit("w", w)?;
            let singlet = ComplexMatrix::outer(&bell_vector(4)?);
            let mixed = ComplexMatrix::identity(4).scale_real((1.0 - w) / 4.0);
            DensityMatrix::from_computed(&(&singlet.scale_real(w) + &mixed), 2, 2)
        }
        StateSpec::RandomPure { dims, field, seed } => ensemble_state(
            &EnsembleSpec {
                count: 1,
                seed,
                field,
                measure: EnsembleMeasure::HaarPure,
                dims,
            },
            0,
        ),
        StateSpec::RandomMixed { dims, field, seed } => ensemble_state(
            &EnsembleSpec {
                count: 1,
                seed,
                field,
                measure: EnsembleMeasure::HilbertSchmidt,
                dims,
            },
            0,
        ),
    }
}

/// Generator for the `index`-th member of an ensemble: a ChaCha stream
/// keyed by `(seed, index)`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(field: Field, rng: &mut ChaCha20Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    match field {
        Field::Real => C64::new(re, 0.0),
        Field::Complex => C64::new(re, StandardNormal.sample(rng)),
    }
}

/// The `index`-th state of an ensemble; depends only on `(seed, index)`.
pub fn ensemble_state(spec: &EnsembleSpec, index: usize) -> Result<DensityMatrix> {
    let (da, db) = spec.dims;
    let d = da * db;
    if d == 0 {
        return Err(Error::InvalidSpec("zero dimension".into()));
    }
    let mut rng = stream_rng(spec.seed, index as u64);
    match spec.measure {
        EnsembleMeasure::HaarPure => {
            let v: Vec<C64> = (0..d).map(|_| gaussian(spec.field, &mut rng)).collect();
            DensityMatrix::from_pure(&v, da, db)
        }
        EnsembleMeasure::HilbertSchmidt => {
            let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(spec.field, &mut rng));
            let m = &g * &g.adjoint();
            let tr = m.trace().re;
            DensityMatrix::from_computed(&m.scale_real(1.0 / tr), da, db)
        }
    }
}

/// Lazily generated ensemble, in index order.
pub fn sample_ensemble(spec: EnsembleSpec) -> impl ExactSizeIterator<Item = Result<DensityMatrix>> {
    (0..spec.count).map(move |k| ensemble_state(&spec, k))
}

/// `Tr(ρ²)`, in `[1/d, 1]`.
pub fn reduced_purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
