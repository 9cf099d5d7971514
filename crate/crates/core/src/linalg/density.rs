use super::eigen::{hermitian_eig, hermitian_eigenvalues, Spectrum};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// One side of a bipartite split. A is the leftmost ket factor and the most
/// significant index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, positive semidefinite, unit-trace matrix on `C^{d_A} ⊗ C^{d_B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    mat: ComplexMatrix,
}

fn check_split(mat: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let size = mat.rows();
    if !mat.is_square() || dim_a == 0 || dim_b == 0 || dim_a * dim_b != size {
        return Err(Error::BadSplit { dim_a, dim_b, size });
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates and wraps `mat` without modifying any entry.
    pub fn new(mat: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        check_split(&mat, dim_a, dim_b)?;
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&mat)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    /// Symmetrizes and renormalizes a computed matrix before validation;
    /// for results of products that carry rounding drift.
    pub fn from_computed(mat: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        check_split(mat, dim_a, dim_b)?;
        let dev = mat.hermitian_deviation();
        if dev > 1e-9 {
            return Err(Error::NonHermitian(dev));
        }
        let h = mat.hermitize();
        let tr = h.trace().re;
        if !(tr > 0.0) || (tr - 1.0).abs() > 1e-9 {
            return Err(Error::BadTrace(tr));
        }
        Self::new(h.scale_real(1.0 / tr), dim_a, dim_b)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero amplitude vector.
    pub fn from_pure(amplitudes: &[C64], dim_a: usize, dim_b: usize) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidSpec("zero or non-finite state vector".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Self::from_computed(&ComplexMatrix::outer(&psi), dim_a, dim_b)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// `ρ_A ⊗ ρ_B`, each factor treated as a single system.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        let m = super::matrix::kron(&a.mat, &b.mat);
        Self::from_computed(&m, a.dim(), b.dim())
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum
    /// to one, and all states must share the same split.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidSpec("empty mixture".into()))?
            .1;
        let (da, db) = first.dims();
        let mut acc = ComplexMatrix::zeros(da * db, da * db);
        for &(w, rho) in parts {
            if rho.dims() != (da, db) || !(w >= 0.0) {
                return Err(Error::InvalidSpec("incompatible mixture component".into()));
            }
            acc = &acc + &rho.mat.scale_real(w);
        }
        Self::from_computed(&acc, da, db)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Same matrix viewed under a different bipartite split.
    pub fn with_split(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        check_split(&self.mat, dim_a, dim_b)?;
        Ok(Self {
            dim_a,
            dim_b,
            mat: self.mat.clone(),
        })
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eig(&self.mat)
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// `U ρ U†` for a unitary of matching dimension.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} unitary on dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::from_computed(&u.conjugate(&self.mat), self.dim_a, self.dim_b)
    }

    /// Traces out `traced`; the result is a single-system state `(d, 1)`.
    pub fn partial_trace(&self, traced: Subsystem) -> Result<Self> {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = &self.mat;
        let out = match traced {
            Subsystem::B => ComplexMatrix::from_fn(da, da, |i, j| {
                (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
            }),
            Subsystem::A => ComplexMatrix::from_fn(db, db, |i, j| {
                (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
            }),
        };
        let d = out.rows();
        Self::from_computed(&out, d, 1)
    }

    /// Transposes the indices of `subsystem`.
    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix {
        partial_transpose(&self.mat, self.dim_a, self.dim_b, subsystem)
    }
}

/// Partial transpose of an arbitrary `(d_A·d_B)`-square matrix. Applying it
/// twice returns the input exactly.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    subsystem: Subsystem,
) -> ComplexMatrix {
    let n = dim_a * dim_b;
    assert_eq!(m.rows(), n);
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / dim_b, r % dim_b);
        let (j, l) = (c / dim_b, c % dim_b);
        match subsystem {
            Subsystem::B => m[(i * dim_b + l, j * dim_b + k)],
            Subsystem::A => m[(j * dim_b + k, i * dim_b + l)],
        }
    })
}
