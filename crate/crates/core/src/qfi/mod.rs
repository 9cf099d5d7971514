//! Quantum Fisher information for collective spin rotations of `n` qubits.
//!
//! For `ρ = Σ p_i |i⟩⟨i|` and generators `J_x, J_y, J_z` the symmetric
//! matrix
//!
//! ```text
//! C_kl = Σ_{i≠j} (p_i − p_j)²/(p_i + p_j) · [⟨i|J_k|j⟩⟨j|J_l|i⟩ + ⟨i|J_l|j⟩⟨j|J_k|i⟩]
//! ```
//!
//! gives the QFI `nᵀ C n` for rotations about the unit axis `n`; its largest
//! eigenvalue divided by `N` is the mean QFI per particle.

mod optimize;

pub use optimize::{
    batch_optimize, euler_rotation, grid_angles, optimize_qfi, rotate_locally, EulerAngles,
    EulerAxes, OptimizeConfig, OptimizeResult,
};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, pauli, symmetric_eig, ComplexMatrix, DensityMatrix, Spectrum};

/// Pairs whose populations sum to less than this contribute nothing.
pub const PAIR_CUTOFF: f64 = 1e-12;

/// Collective spin operators `J_α = ½ Σ_k σ_α^{(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomenta {
    pub n_qubits: usize,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
}

impl AngularMomenta {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "need at least one qubit");
        let id = ComplexMatrix::identity(2);
        let collective = |s: &ComplexMatrix| {
            let d = 1 << n_qubits;
            let mut acc = ComplexMatrix::zeros(d, d);
            for k in 0..n_qubits {
                let factors: Vec<&ComplexMatrix> =
                    (0..n_qubits).map(|m| if m == k { s } else { &id }).collect();
                acc = &acc + &kron_all(factors);
            }
            acc.scale_real(0.5)
        };
        let [sx, sy, sz] = pauli();
        Self {
            n_qubits,
            jx: collective(&sx),
            jy: collective(&sy),
            jz: collective(&sz),
        }
    }

    pub fn as_array(&self) -> [&ComplexMatrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiResult {
    pub c_matrix: [[f64; 3]; 3],
    pub lambda_max: f64,
    /// `lambda_max / N`
    pub mean_qfi: f64,
    /// Unit axis attaining `lambda_max`.
    pub best_direction: [f64; 3],
}

/// `Q_ab = Σ_{i≠j} w_ij · 2 Re(⟨i|O_a|j⟩⟨j|O_b|i⟩)` for Hermitian `O_a`,
/// with `w_ij = (p_i − p_j)²/(p_i + p_j)`.
pub(crate) fn fisher_matrix(spec: &Spectrum, ops: &[&ComplexMatrix]) -> Vec<Vec<f64>> {
    let v = &spec.eigenvectors;
    let vd = v.adjoint();
    let rotated: Vec<ComplexMatrix> = ops.iter().map(|o| &(&vd * *o) * v).collect();
    let p = &spec.eigenvalues;
    let d = p.len();
    let mut weights = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let s = p[i] + p[j];
            if i != j && s > PAIR_CUTOFF {
                let w = (p[i] - p[j]).powi(2) / s;
                if w > 0.0 {
                    weights.push((i, j, w));
                }
            }
        }
    }
    let m = ops.len();
    let mut q = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in a..m {
            let mut acc = 0.0;
            for &(i, j, w) in &weights {
                acc += w * 2.0 * (rotated[a][(i, j)] * rotated[b][(j, i)]).re;
            }
            q[a][b] = acc;
            q[b][a] = acc;
        }
    }
    q
}

pub(crate) fn result_from_c(c: [[f64; 3]; 3], n_particles: usize) -> QfiResult {
    let (vals, vecs) = symmetric_eig(&c);
    let lambda_max = vals[0].max(0.0);
    QfiResult {
        c_matrix: c,
        lambda_max,
        mean_qfi: lambda_max / n_particles as f64,
        best_direction: [vecs[0][0], vecs[1][0], vecs[2][0]],
    }
}

/// Fisher matrix, its top eigenpair and the mean QFI per particle.
pub fn qfi(rho: &DensityMatrix, n_particles: usize) -> Result<QfiResult> {
    if n_particles == 0 || n_particles > 16 || rho.dim() != 1 << n_particles {
        let (dim_a, dim_b) = rho.dims();
        return Err(Error::DimError {
            op: "qfi",
            expected: "dimension 2^n",
            dim_a,
            dim_b,
        });
    }
    let j = AngularMomenta::new(n_particles);
    let spec = rho.spectrum()?;
    let q = fisher_matrix(&spec, &j.as_array());
    let mut c = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            c[k][l] = q[k][l];
        }
    }
    Ok(result_from_c(c, n_particles))
}

/// Cramér–Rao phase uncertainty `1/√(N_m F)`.
pub fn phase_bound(fisher: f64, n_measurements: u64) -> Result<f64> {
    if !(fisher > 0.0) || !fisher.is_finite() {
        return Err(Error::NonPositiveF(fisher));
    }
    if n_measurements == 0 {
        return Err(Error::InvalidSpec("n_measurements must be at least 1".into()));
    }
    Ok(1.0 / (n_measurements as f64 * fisher).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, I};
    use crate::states::{make_state, StateSpec};

    #[test]
    fn spin_commutator() {
        for n in 1..=3 {
            let j = AngularMomenta::new(n);
            let comm = &(&j.jx * &j.jy) - &(&j.jy * &j.jx);
            assert!(comm.max_abs_diff(&j.jz.scale(I)) < 1e-12);
            assert!(j.jx.is_hermitian(0.0));
        }
    }

    #[test]
    fn ghz_reaches_heisenberg_limit() {
        for n in 2..=4 {
            let r = qfi(&make_state(&StateSpec::Ghz(n)).unwrap(), n).unwrap();
            assert!((r.mean_qfi - n as f64).abs() < 1e-9, "{n}: {}", r.mean_qfi);
            if n > 2 {
                assert!(r.best_direction[2].abs() > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn w3_value() {
        let r = qfi(&make_state(&StateSpec::W(3)).unwrap(), 3).unwrap();
        assert!((r.mean_qfi - 7.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn product_state_shot_noise() {
        let r = qfi(&make_state(&StateSpec::SchmidtPure(1.0)).unwrap(), 2).unwrap();
        assert!((r.mean_qfi - 1.0).abs() < 1e-12);
        let mixed = qfi(&DensityMatrix::maximally_mixed(2, 2), 2).unwrap();
        assert_eq!(mixed.mean_qfi, 0.0);
    }

    #[test]
    fn pure_state_variance_formula() {
        let amps = [C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.4, 0.0), C64::new(0.1, -0.6)];
        let rho = DensityMatrix::from_pure(&amps, 2, 2).unwrap();
        let r = qfi(&rho, 2).unwrap();
        let j = AngularMomenta::new(2);
        let m = rho.matrix();
        for (k, jk) in j.as_array().iter().enumerate() {
            let mean = m.trace_product(jk).re;
            let sq = m.trace_product(&(*jk * *jk)).re;
            assert!((r.c_matrix[k][k] - 4.0 * (sq - mean * mean)).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_bound_values() {
        assert_eq!(phase_bound(4.0, 1).unwrap(), 0.5);
        assert!((phase_bound(1.0, 100).unwrap() - 0.1).abs() < 1e-15);
        assert!((phase_bound(9.0, 4).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(phase_bound(0.0, 1), Err(Error::NonPositiveF(_))));
        assert!(matches!(phase_bound(-1.0, 1), Err(Error::NonPositiveF(_))));
    }

    #[test]
    fn rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(2, 3);
        assert!(matches!(qfi(&rho, 2), Err(Error::DimError { .. })));
        assert!(qfi(&DensityMatrix::maximally_mixed(2, 2), 3).is_err());
    }
}
