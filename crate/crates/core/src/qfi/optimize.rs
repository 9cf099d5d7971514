//! Grid search for the largest and smallest mean QFI over local unitaries
//! `U_1 ⊗ U_2` on a two-qubit state, each `U_k` an Euler rotation.
//!
//! Rotating the state is equivalent to rotating the generators:
//! `U†σ_kU = Σ_l R_kl σ_l` with `R ∈ SO(3)`. The Fisher matrix of the six
//! local Paulis is computed once per state, after which every grid point
//! costs a `3×6` congruence and a `3×3` eigenvalue problem.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};
use std::str::FromStr;

use rayon::prelude::*;

use super::{fisher_matrix, qfi, result_from_c};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, ComplexMatrix, DensityMatrix, I};

/// Middle axis of the rotation `U_x(α) U_m(β) U_x(γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EulerAxes {
    #[default]
    Xzx,
    Xyx,
}

impl FromStr for EulerAxes {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xzx" => Ok(Self::Xzx),
            "xyx" => Ok(Self::Xyx),
            _ => Err(Error::InvalidSpec(format!("unknown Euler axes {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// `exp(−iθσ/2) = cos(θ/2) I − i sin(θ/2) σ`
fn axis_rotation(sigma: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    &ComplexMatrix::identity(2).scale_real(c) - &sigma.scale(I * s)
}

/// `U_x(α) U_m(β) U_x(γ)` with `m` the middle axis.
pub fn euler_rotation(angles: EulerAngles, axes: EulerAxes) -> ComplexMatrix {
    let [sx, sy, sz] = pauli();
    let mid = match axes {
        EulerAxes::Xzx => &sz,
        EulerAxes::Xyx => &sy,
    };
    let a = axis_rotation(&sx, angles.alpha);
    let b = axis_rotation(mid, angles.beta);
    let g = axis_rotation(&sx, angles.gamma);
    &(&a * &b) * &g
}

/// `(U_1 ⊗ U_2) ρ (U_1 ⊗ U_2)†`
pub fn rotate_locally(rho: &DensityMatrix, angles: &[EulerAngles; 2], axes: EulerAxes) -> Result<DensityMatrix> {
    let u = kron(&euler_rotation(angles[0], axes), &euler_rotation(angles[1], axes));
    rho.conjugate_by(&u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    pub step: f64,
    pub refine_step: f64,
    /// Refine when the coarse maximum beats the original by less than this
    /// fraction of it; `0` disables refinement.
    pub refine_threshold: f64,
    pub axes: EulerAxes,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            step: FRAC_PI_2,
            refine_step: FRAC_PI_3,
            refine_threshold: 0.01,
            axes: EulerAxes::Xzx,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= TAU) {
            return Err(Error::InvalidSpec("step must lie in (0, 2π]".into()));
        }
        if !(self.refine_step > 0.0 && self.refine_step <= self.step) {
            return Err(Error::InvalidSpec("refine_step must lie in (0, step]".into()));
        }
        if !(self.refine_threshold >= 0.0) {
            return Err(Error::InvalidSpec("refine_threshold must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub original: f64,
    pub maximized: f64,
    pub minimized: f64,
    pub max_angles: [EulerAngles; 2],
    pub min_angles: [EulerAngles; 2],
    /// Whether the finer second grid was searched.
    pub refined: bool,
}

/// `{k·step : k ≥ 0, k·step < 2π}`
pub fn grid_angles(step: f64) -> Vec<f64> {
    let count = ((TAU / step) - 1e-9).ceil().max(1.0) as usize;
    (0..count).map(|k| k as f64 * step).collect()
}

/// `R_kl = ½ Tr(σ_l U† σ_k U)`
fn rotation_matrix(u: &ComplexMatrix) -> [[f64; 3]; 3] {
    let s = pauli();
    let ud = u.adjoint();
    let mut r = [[0.0; 3]; 3];
    for k in 0..3 {
        let conj = &(&ud * &s[k]) * u;
        for l in 0..3 {
            r[k][l] = 0.5 * conj.trace_product(&s[l]).re;
        }
    }
    r
}

struct Prepared {
    /// Fisher matrix of `σ_l ⊗ I` (0..3) and `I ⊗ σ_l` (3..6).
    k: [[f64; 6]; 6],
}

impl Prepared {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let s = pauli();
        let id = ComplexMatrix::identity(2);
        let ops: Vec<ComplexMatrix> = (0..6)
            .map(|a| if a < 3 { kron(&s[a], &id) } else { kron(&id, &s[a - 3]) })
            .collect();
        let refs: Vec<&ComplexMatrix> = ops.iter().collect();
        let q = fisher_matrix(&rho.spectrum()?, &refs);
        let mut k = [[0.0; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                k[a][b] = q[a][b];
            }
        }
        Ok(Self { k })
    }

    /// Mean QFI (per qubit) of the state rotated by the pair with
    /// generator-rotation matrices `r1`, `r2`.
    fn mean_qfi(&self, r1: &[[f64; 3]; 3], r2: &[[f64; 3]; 3]) -> f64 {
        let t = |k: usize, a: usize| if a < 3 { r1[k][a] } else { r2[k][a - 3] };
        let mut tk = [[0.0; 6]; 3];
        for k in 0..3 {
            for b in 0..6 {
                tk[k][b] = (0..6).map(|a| t(k, a) * self.k[a][b]).sum();
            }
        }
        let mut c = [[0.0; 3]; 3];
        for k in 0..3 {
            for l in k..3 {
                let v = 0.25 * (0..6).map(|b| tk[k][b] * t(l, b)).sum::<f64>();
                c[k][l] = v;
                c[l][k] = v;
            }
        }
        result_from_c(c, 2).mean_qfi
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    index: usize,
}

impl Best {
    /// Larger value wins; equal values keep the lower grid index.
    fn merge_max(self, other: Best) -> Best {
        if other.value > self.value || (other.value == self.value && other.index < self.index) {
            other
        } else {
            self
        }
    }

    fn merge_min(self, other: Best) -> Best {
        if other.value < self.value || (other.value == self.value && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

struct GridOutcome {
    max: Best,
    min: Best,
    triples: Vec<EulerAngles>,
}

fn search_grid(prep: &Prepared, step: f64, axes: EulerAxes, parallel: bool) -> GridOutcome {
    let angles = grid_angles(step);
    let g = angles.len();
    let mut triples = Vec::with_capacity(g * g * g);
    for &a in &angles {
        for &b in &angles {
            for &c in &angles {
                triples.push(EulerAngles::new(a, b, c));
            }
        }
    }
    let rots: Vec<[[f64; 3]; 3]> = triples
        .iter()
        .map(|&t| rotation_matrix(&euler_rotation(t, axes)))
        .collect();
    let m = triples.len();
    let row = |i: usize| -> (Best, Best) {
        let mut max = Best { value: f64::NEG_INFINITY, index: usize::MAX };
        let mut min = Best { value: f64::INFINITY, index: usize::MAX };
        for (j, r2) in rots.iter().enumerate() {
            let cand = Best { value: prep.mean_qfi(&rots[i], r2), index: i * m + j };
            max = max.merge_max(cand);
            min = min.merge_min(cand);
        }
        (max, min)
    };
    let init = (
        Best { value: f64::NEG_INFINITY, index: usize::MAX },
        Best { value: f64::INFINITY, index: usize::MAX },
    );
    let (max, min) = if parallel {
        (0..m)
            .into_par_iter()
            .map(row)
            .reduce(|| init, |x, y| (x.0.merge_max(y.0), x.1.merge_min(y.1)))
    } else {
        (0..m).map(row).fold(init, |x, y| (x.0.merge_max(y.0), x.1.merge_min(y.1)))
    };
    GridOutcome { max, min, triples }
}

fn angles_at(outcome: &GridOutcome, index: usize) -> [EulerAngles; 2] {
    let m = outcome.triples.len();
    [outcome.triples[index / m], outcome.triples[index % m]]
}

fn optimize_impl(rho: &DensityMatrix, cfg: &OptimizeConfig, parallel: bool) -> Result<OptimizeResult> {
    if rho.dims() != (2, 2) {
        let (dim_a, dim_b) = rho.dims();
        return Err(Error::DimError {
            op: "optimize_qfi",
            expected: "2x2",
            dim_a,
            dim_b,
        });
    }
    cfg.validate()?;
    let original = qfi(rho, 2)?.mean_qfi;
    let prep = Prepared::new(rho)?;
    let identity = [EulerAngles::default(); 2];
    let mut out = OptimizeResult {
        original,
        maximized: original,
        minimized: original,
        max_angles: identity,
        min_angles: identity,
        refined: false,
    };
    let absorb = |grid: &GridOutcome, out: &mut OptimizeResult| {
        if grid.max.value > out.maximized {
            out.maximized = grid.max.value;
            out.max_angles = angles_at(grid, grid.max.index);
        }
        if grid.min.value < out.minimized {
            out.minimized = grid.min.value;
            out.min_angles = angles_at(grid, grid.min.index);
        }
    };
    let coarse = search_grid(&prep, cfg.step, cfg.axes, parallel);
    absorb(&coarse, &mut out);
    if out.maximized - original < cfg.refine_threshold * original && cfg.refine_step < cfg.step {
        let fine = search_grid(&prep, cfg.refine_step, cfg.axes, parallel);
        absorb(&fine, &mut out);
        out.refined = true;
    }
    Ok(out)
}

/// Extremal mean QFI over the local-unitary grid, with the identity
/// rotation as the reference point.
pub fn optimize_qfi(rho: &DensityMatrix, cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    optimize_impl(rho, cfg, true)
}

/// [`optimize_qfi`] over many states, parallel across states; output order
/// matches input order.
pub fn batch_optimize(states: &[DensityMatrix], cfg: &OptimizeConfig) -> Result<Vec<OptimizeResult>> {
    states.par_iter().map(|rho| optimize_impl(rho, cfg, false)).collect()
}
