//! Cyclic Jacobi eigensolvers for small Hermitian and real symmetric
//! matrices, and spectral matrix functions built on them.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Tolerance on `|m - m†|` accepted by [`hermitian_eig`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm (relative to `max(1, ‖m‖_F)`) at which a
/// Jacobi sweep loop stops.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero before square roots
/// and logarithms.
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix: eigenvalues in descending
/// order, eigenvectors as orthonormal columns in matching order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V f(Λ) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k])
                .sum::<C64>()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Jacobi rotation parameters `(t, c, s)` annihilating the off-diagonal
/// entry of `[[app, b], [b, aqq]]` with `b > 0`.
#[inline]
fn rotation(app: f64, aqq: f64, b: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c)
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_INPUT_TOL {
        return Err(Error::NonHermitian(dev));
    }
    let n = m.rows();
    let mut a = m.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * m.frobenius_norm().max(1.0);

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off < threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let bn = b.norm();
                if bn < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = (b / bn).conj();
                let (c, s) = rotation(a[(p, p)].re, a[(q, q)].re, bn);
                // G = diag(1, phase) · [[c, s], [-s, c]]
                let g00 = C64::new(c, 0.0);
                let g01 = C64::new(s, 0.0);
                let g10 = phase * -s;
                let g11 = phase * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g00 + akq * g10;
                    a[(k, q)] = akp * g01 + akq * g11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
                    a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g00 + vkq * g10;
                    v[(k, q)] = vkp * g01 + vkq * g11;
                }
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off >= threshold {
        return Err(Error::NoConvergence {
            iterations: JACOBI_MAX_SWEEPS,
            residual: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep their Jacobi order
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(m).map(|s| s.eigenvalues)
}

/// Applies a real function to a Hermitian matrix through its spectrum.
/// Fails with [`Error::DomainError`] when `f` is not finite at an
/// eigenvalue.
pub fn spectral_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    for &l in &spec.eigenvalues {
        if !f(l).is_finite() {
            return Err(Error::DomainError(l));
        }
    }
    Ok(spec.reconstruct_with(f))
}

/// Clamps PSD drift: values in `[-PSD_CLAMP, 0)` become 0, more negative
/// values are a domain error.
pub fn clamp_psd(l: f64) -> Result<f64> {
    if l >= 0.0 {
        Ok(l)
    } else if l >= -PSD_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::DomainError(l))
    }
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    let clamped = spec
        .eigenvalues
        .iter()
        .map(|&l| clamp_psd(l))
        .collect::<Result<Vec<_>>>()?;
    let spec = Spectrum {
        eigenvalues: clamped,
        eigenvectors: spec.eigenvectors,
    };
    Ok(spec.reconstruct_with(f64::sqrt))
}

/// Base-2 logarithm of a positive definite matrix.
pub fn log2_pd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    for &l in &spec.eigenvalues {
        if clamp_psd(l)? <= 0.0 {
            return Err(Error::DomainError(l));
        }
    }
    Ok(spec.reconstruct_with(f64::log2))
}

/// Eigen-decomposition of a real symmetric `N×N` array by cyclic Jacobi.
/// Eigenvalues descending; eigenvectors are the columns of the returned
/// array.
pub fn symmetric_eig<const N: usize>(m: &[[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut a = *m;
    for i in 0..N {
        for j in (i + 1)..N {
            let s = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = s;
            a[j][i] = s;
        }
    }
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..N {
            for j in (i + 1)..N {
                off += 2.0 * a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let sign = apq.signum();
                let (c, s) = rotation(a[p][p], a[q][q], apq.abs());
                let s = s * sign;
                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = std::array::from_fn(|k| a[order[k]][order[k]]);
    let vectors = std::array::from_fn(|r| std::array::from_fn(|c| v[r][order[c]]));
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{pauli, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&g + &g.adjoint()).scale_real(0.5)
    }

    fn assert_orthonormal(v: &ComplexMatrix, tol: f64) {
        let g = &v.adjoint() * v;
        assert!(g.max_abs_diff(&ComplexMatrix::identity(v.rows())) <= tol);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let s = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_z_is_already_diagonal() {
        let [_, _, sz] = pauli();
        let s = hermitian_eig(&sz).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, -1.0]);
        assert_eq!(s.eigenvectors.column(0), vec![ONE, ZERO]);
        assert_eq!(s.eigenvectors.column(1), vec![ZERO, ONE]);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 6, 9, 16] {
            for _ in 0..10 {
                let m = random_hermitian(n, &mut rng);
                let s = hermitian_eig(&m).unwrap();
                assert!(s.reconstruct().max_abs_diff(&m) <= 1e-9);
                assert_orthonormal(&s.eigenvectors, 1e-10);
                assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
                let tr: f64 = s.eigenvalues.iter().sum();
                assert!((tr - m.trace().re).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        // U diag(1,1,0.5,0.5) U† with a random unitary from a Hermitian eigenbasis
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = hermitian_eig(&random_hermitian(4, &mut rng)).unwrap().eigenvectors;
        let d = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.5, 0.5]);
        let m = basis.conjugate(&d).hermitize();
        let s = hermitian_eig(&m).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([1.0, 1.0, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(s.reconstruct().max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn spectral_functions() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(sqrt_psd(&i2).unwrap(), i2);
        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        let l = log2_pd(&half).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[-1.0, -1.0])) < 1e-15);
        let singular = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(log2_pd(&singular), Err(Error::DomainError(_))));
        let negative = ComplexMatrix::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(sqrt_psd(&negative), Err(Error::DomainError(_))));
        let drift = ComplexMatrix::from_real_diagonal(&[1.0, -1e-12]);
        assert!(sqrt_psd(&drift).is_ok());
        assert!(matches!(
            spectral_fn(&singular, f64::ln),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn sqrt_squares_back_on_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_hermitian(4, &mut rng);
            let m = &g * &g.adjoint();
            let r = sqrt_psd(&m).unwrap();
            assert!((&r * &r).max_abs_diff(&m) <= 1e-9);
        }
    }

    #[test]
    fn real_symmetric_jacobi() {
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
        let (vals, vecs) = symmetric_eig(&m);
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] + 1.0).abs() < 1e-14);
        for k in 0..3 {
            for i in 0..3 {
                let mv: f64 = (0..3).map(|j| m[i][j] * vecs[j][k]).sum();
                assert!((mv - vals[k] * vecs[i][k]).abs() < 1e-13);
            }
        }
    }
}
