//! Entanglement measures for two-qubit and qubit-qutrit states.
//!
//! Closed-form measures (concurrence, negativity and friends) are exact up
//! to eigensolver rounding. The relative entropy of entanglement is an
//! iterative estimate; see [`ree()`].

mod ree;

pub use ree::{ree, ReeConfig, ReeResult};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, pauli, sqrt_psd, DensityMatrix, Subsystem};

/// `max(0, x)`: the measures are defined with this floor.
fn clamp_unit(x: f64) -> f64 {
    x.max(0.0)
}

fn require_two_qubit(rho: &DensityMatrix, op: &'static str) -> Result<()> {
    match rho.dims() {
        (2, 2) => Ok(()),
        (dim_a, dim_b) => Err(Error::DimError {
            op,
            expected: "2x2",
            dim_a,
            dim_b,
        }),
    }
}

fn require_ppt_dims(rho: &DensityMatrix, op: &'static str) -> Result<()> {
    match rho.dims() {
        (2, 2) | (2, 3) => Ok(()),
        (dim_a, dim_b) => Err(Error::DimError {
            op,
            expected: "2x2 or 2x3",
            dim_a,
            dim_b,
        }),
    }
}

/// Descending `λ_i` such that `C = max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn concurrence_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubit(rho, "concurrence")?;
    let sy = &pauli()[1];
    let yy = kron(sy, sy);
    let m = rho.matrix();
    let root = sqrt_psd(m)?;
    let tilde = yy.conjugate(&m.conj());
    let r = &(&root * &tilde) * &root;
    let ev = hermitian_eigenvalues(&r.hermitize())?;
    let mut out = [0.0; 4];
    for (o, e) in out.iter_mut().zip(ev) {
        *o = e.max(0.0).sqrt();
    }
    Ok(out)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let l = concurrence_lambdas(rho)?;
    Ok(clamp_unit(l[0] - l[1] - l[2] - l[3]).min(1.0))
}

/// Which second eigenvalue enters the maximal-concurrence formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConcurrenceVariant {
    /// `λ₁ − λ₃ − 2√(λ₂λ₄)`; agrees with a numerical search over the
    /// unitary orbit.
    #[default]
    Lambda3,
    /// `λ₁ − λ₂ − 2√(λ₂λ₄)`
    Lambda2,
}

/// Largest concurrence over all states with the spectrum of `rho`.
pub fn max_concurrence(rho: &DensityMatrix) -> Result<f64> {
    max_concurrence_with(rho, ConcurrenceVariant::default())
}

pub fn max_concurrence_with(rho: &DensityMatrix, variant: ConcurrenceVariant) -> Result<f64> {
    require_two_qubit(rho, "max_concurrence")?;
    let ev = hermitian_eigenvalues(rho.matrix())?;
    Ok(max_concurrence_from_spectrum(&[ev[0], ev[1], ev[2], ev[3]], variant))
}

/// Same as [`max_concurrence_with`] for an explicit spectrum (any order).
pub fn max_concurrence_from_spectrum(spectrum: &[f64; 4], variant: ConcurrenceVariant) -> f64 {
    let mut l = spectrum.map(|x| x.max(0.0));
    l.sort_by(|a, b| b.total_cmp(a));
    let second = match variant {
        ConcurrenceVariant::Lambda3 => l[2],
        ConcurrenceVariant::Lambda2 => l[1],
    };
    clamp_unit(l[0] - second - 2.0 * (l[1] * l[3]).sqrt()).min(1.0)
}

/// Eigenvalues of `ρ^{T_B}`, descending.
pub fn partial_transpose_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&rho.partial_transpose(Subsystem::B))
}

/// `max(0, −2μ_min)` with `μ_min` the smallest eigenvalue of `ρ^{T_B}`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    require_ppt_dims(rho, "negativity")?;
    let mu_min = *partial_transpose_spectrum(rho)?.last().expect("nonempty");
    Ok(clamp_unit(-2.0 * mu_min).min(1.0))
}

/// Twice the sum of all negative partial-transpose eigenvalues in absolute
/// value; differs from [`negativity`] only when several are negative.
pub fn negativity_trace_norm(rho: &DensityMatrix) -> Result<f64> {
    require_ppt_dims(rho, "negativity_trace_norm")?;
    let s: f64 = partial_transpose_spectrum(rho)?
        .into_iter()
        .filter(|&x| x < 0.0)
        .map(|x| -x)
        .sum();
    Ok(clamp_unit(2.0 * s))
}

pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(log_negativity_from(negativity(rho)?))
}

/// `log₂(2N + 1)`
pub fn log_negativity_from(n: f64) -> f64 {
    (2.0 * n + 1.0).log2()
}

/// `|min(0, μ_min)|` over the partial-transpose spectrum.
pub fn neg_eig_measure(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho, "neg_eig_measure")?;
    let mu_min = *partial_transpose_spectrum(rho)?.last().expect("nonempty");
    Ok(clamp_unit(-mu_min))
}

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    h(x) + h(1.0 - x)
}

/// Entanglement of formation from a concurrence value.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    clamp_unit(binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

/// All applicable measures of one state. Entries that do not apply to the
/// state's dimensions, or were not requested, are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureRecord {
    pub concurrence: Option<f64>,
    pub c_max: Option<f64>,
    pub negativity: Option<f64>,
    pub negativity_trace_norm: Option<f64>,
    pub log_negativity: Option<f64>,
    pub neg_eig_measure: Option<f64>,
    pub eof: Option<f64>,
    pub ree: Option<f64>,
    pub ree_gap: Option<f64>,
    pub ree_converged: Option<bool>,
    /// Mean QFI and its local-unitary extrema, filled in from optimizer output.
    pub mean_qfi: Option<f64>,
    pub mqfi_max: Option<f64>,
    pub mqfi_min: Option<f64>,
}

/// Every measure that applies to `rho`; REE is skipped when `ree_cfg` is
/// `None`.
pub fn measure_all(rho: &DensityMatrix, ree_cfg: Option<&ReeConfig>) -> Result<MeasureRecord> {
    require_ppt_dims(rho, "measure_all")?;
    let n = negativity(rho)?;
    let mut rec = MeasureRecord {
        negativity: Some(n),
        negativity_trace_norm: Some(negativity_trace_norm(rho)?),
        log_negativity: Some(log_negativity_from(n)),
        ..MeasureRecord::default()
    };
    if rho.dims() == (2, 2) {
        let c = concurrence(rho)?;
        rec.concurrence = Some(c);
        rec.c_max = Some(max_concurrence(rho)?);
        rec.neg_eig_measure = Some(neg_eig_measure(rho)?);
        rec.eof = Some(eof_from_concurrence(c));
    }
    if let Some(cfg) = ree_cfg {
        let r = ree(rho, cfg)?;
        rec.ree = Some(r.value);
        rec.ree_gap = Some(r.gap.max(0.0));
        rec.ree_converged = Some(r.converged);
    }
    Ok(rec)
}
