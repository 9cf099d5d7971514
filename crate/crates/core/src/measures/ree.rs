//! Relative entropy of entanglement by Frank–Wolfe over the separable set.
//!
//! The iterate `σ` is kept as an explicit convex combination of pure
//! product states `|a⟩⟨a| ⊗ |b⟩⟨b|`. Each step calls a linear minimization
//! oracle over product vectors (alternating smallest-eigenvector updates
//! with random restarts) and moves weight from the worst active atom to
//! the oracle atom (pairwise step) with an exact line search. After every
//! step the active atoms' weights and vectors are polished jointly by
//! L-BFGS, which keeps `σ` a product mixture while removing most of the
//! zig-zagging of plain Frank–Wolfe. The returned value is `S(ρ‖σ)` at a
//! separable `σ`, so it is an upper bound; the Frank–Wolfe gap bounds its
//! distance from the minimum.

use std::f64::consts::LN_2;

use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_vec, ComplexMatrix, DensityMatrix, C64, ZERO};
use crate::states::stream_rng;

/// L-BFGS iterations spent polishing the active set after each step.
const CORRECTIVE_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReeConfig {
    pub max_iterations: usize,
    pub gap_tolerance: f64,
    /// Weight of `I/d` mixed into `σ` before every logarithm.
    pub support_epsilon: f64,
    pub oracle_restarts: usize,
    /// Stream key for oracle restarts; batch callers use the state index.
    pub seed: u64,
}

impl Default for ReeConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            gap_tolerance: 1e-4,
            support_epsilon: 1e-9,
            oracle_restarts: 8,
            seed: 0,
        }
    }
}

impl ReeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tolerance > 0.0) {
            return Err(Error::InvalidSpec("gap_tolerance must be positive".into()));
        }
        if !(self.support_epsilon > 0.0 && self.support_epsilon <= 1e-6) {
            return Err(Error::InvalidSpec("support_epsilon must lie in (0, 1e-6]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReeResult {
    /// Upper bound on the REE in bits, clamped to `≥ 0`.
    pub value: f64,
    /// Frank–Wolfe duality gap at the returned iterate.
    pub gap: f64,
    pub iterations: usize,
    /// False when the gap stayed above tolerance after the iteration budget.
    pub converged: bool,
    /// Closest separable state found, as `(weight, |a⟩, |b⟩)` terms.
    pub decomposition: Vec<(f64, Vec<C64>, Vec<C64>)>,
}

impl ReeResult {
    /// Convenience for callers that treat non-convergence as an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                residual: self.gap,
            })
        }
    }
}

struct Atom {
    a: Vec<C64>,
    b: Vec<C64>,
    psi: Vec<C64>,
    weight: f64,
}

impl Atom {
    fn new(a: Vec<C64>, b: Vec<C64>, weight: f64) -> Self {
        let psi = kron_vec(&a, &b);
        Self { a, b, psi, weight }
    }
}

fn expectation(g: &ComplexMatrix, psi: &[C64]) -> f64 {
    let n = psi.len();
    let mut acc = ZERO;
    for i in 0..n {
        let mut row = ZERO;
        for j in 0..n {
            row += g[(i, j)] * psi[j];
        }
        acc += psi[i].conj() * row;
    }
    acc.re
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// `(ln x − ln y)/(x − y)`, continuous at `x = y`.
fn log_divided_difference(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let t = (hi - lo) / lo;
    if t > 1e-8 {
        t.ln_1p() / (hi - lo)
    } else {
        (1.0 - 0.5 * t) / lo
    }
}

struct Objective<'a> {
    rho: &'a ComplexMatrix,
    rho_log_rho: f64,
    eps: f64,
    dim_a: usize,
    dim_b: usize,
}

impl Objective<'_> {
    fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn sigma(&self, atoms: &[Atom]) -> ComplexMatrix {
        let d = self.dim();
        let mut s = ComplexMatrix::zeros(d, d);
        for atom in atoms {
            for i in 0..d {
                let pi = atom.psi[i] * atom.weight;
                if pi == ZERO {
                    continue;
                }
                for j in 0..d {
                    s[(i, j)] += pi * atom.psi[j].conj();
                }
            }
        }
        s
    }

    /// Objective value and gradient at `σ` (before regularization).
    fn evaluate(&self, sigma: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
        let d = self.dim();
        let floor = self.eps / d as f64;
        let reg = ComplexMatrix::from_fn(d, d, |i, j| {
            let mut z = sigma[(i, j)] * (1.0 - self.eps);
            if i == j {
                z += floor;
            }
            z
        });
        let spec = hermitian_eig(&reg.hermitize())?;
        let v = &spec.eigenvectors;
        let mu: Vec<f64> = spec.eigenvalues.iter().map(|&m| m.max(0.5 * floor)).collect();
        let r = &(&v.adjoint() * self.rho) * v;
        let mut value = self.rho_log_rho;
        for k in 0..d {
            value -= r[(k, k)].re * mu[k].log2();
        }
        let scale = -(1.0 - self.eps) / LN_2;
        let inner = ComplexMatrix::from_fn(d, d, |k, l| {
            r[(k, l)] * (scale * log_divided_difference(mu[k], mu[l]))
        });
        let grad = (&(v * &inner) * &v.adjoint()).hermitize();
        Ok((value, grad))
    }

    /// `⟨b|G|b⟩` over subsystem B, a `d_A × d_A` matrix.
    fn contract_b(&self, g: &ComplexMatrix, b: &[C64]) -> ComplexMatrix {
        let db = self.dim_b;
        ComplexMatrix::from_fn(self.dim_a, self.dim_a, |i, j| {
            let mut acc = ZERO;
            for k in 0..db {
                for l in 0..db {
                    acc += b[k].conj() * g[(i * db + k, j * db + l)] * b[l];
                }
            }
            acc
        })
    }

    /// `⟨a|G|a⟩` over subsystem A, a `d_B × d_B` matrix.
    fn contract_a(&self, g: &ComplexMatrix, a: &[C64]) -> ComplexMatrix {
        let db = self.dim_b;
        ComplexMatrix::from_fn(db, db, |k, l| {
            let mut acc = ZERO;
            for i in 0..self.dim_a {
                for j in 0..self.dim_a {
                    acc += a[i].conj() * g[(i * db + k, j * db + l)] * a[j];
                }
            }
            acc
        })
    }
}

fn smallest_eigenvector(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let spec = hermitian_eig(&m.hermitize())?;
    let last = m.rows() - 1;
    Ok((spec.eigenvalues[last], spec.eigenvectors.column(last)))
}

fn random_vector(n: usize, rng: &mut ChaCha20Rng) -> Vec<C64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    normalize(&mut v);
    v
}

/// Product vector `|a⟩|b⟩` approximately minimizing `⟨ab|G|ab⟩`.
fn product_oracle(
    obj: &Objective,
    g: &ComplexMatrix,
    starts: &[Vec<C64>],
) -> Result<(f64, Vec<C64>, Vec<C64>)> {
    let mut best: Option<(f64, Vec<C64>, Vec<C64>)> = None;
    for start in starts {
        let mut b = start.clone();
        let mut a;
        let mut value = f64::INFINITY;
        let mut iter = 0;
        loop {
            let (_, a_new) = smallest_eigenvector(&obj.contract_b(g, &b))?;
            a = a_new;
            let (val, b_new) = smallest_eigenvector(&obj.contract_a(g, &a))?;
            b = b_new;
            iter += 1;
            let improved = value - val;
            value = val;
            if improved <= 1e-15 * (1.0 + val.abs()) || iter >= 100 {
                break;
            }
        }
        if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
            best = Some((value, a, b));
        }
    }
    Ok(best.expect("at least one oracle start"))
}

/// Starting B-vectors: the B factor of the dominant product component of
/// the lowest eigenvector of `G`, the previous oracle answer, then random.
fn oracle_starts(
    obj: &Objective,
    g: &ComplexMatrix,
    warm: Option<&Vec<C64>>,
    restarts: usize,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<Vec<C64>>> {
    let (da, db) = (obj.dim_a, obj.dim_b);
    let (_, low) = smallest_eigenvector(g)?;
    // Ψ†Ψ for Ψ[i][k] = low[i·d_B + k]
    let gram = ComplexMatrix::from_fn(db, db, |k, l| {
        (0..da).map(|i| low[i * db + k].conj() * low[i * db + l]).sum()
    });
    let spec = hermitian_eig(&gram.hermitize())?;
    let mut starts = vec![spec.eigenvectors.column(0).iter().map(|z| z.conj()).collect()];
    if let Some(w) = warm {
        starts.push(w.clone());
    }
    for _ in 0..restarts {
        starts.push(random_vector(db, rng));
    }
    Ok(starts)
}

/// Packs atoms as `[t_k…, (Re a_k, Im a_k, Re b_k, Im b_k)…]` with
/// `w_k = t_k² / Σ t²`.
fn pack(atoms: &[Atom]) -> Vec<f64> {
    let mut x: Vec<f64> = atoms.iter().map(|at| at.weight.sqrt()).collect();
    for at in atoms {
        for z in at.a.iter().chain(&at.b) {
            x.push(z.re);
            x.push(z.im);
        }
    }
    x
}

fn unpack(x: &[f64], k: usize, da: usize, db: usize) -> Vec<Atom> {
    let s: f64 = x[..k].iter().map(|t| t * t).sum();
    let mut off = k;
    let mut read = |n: usize| {
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(x[off + 2 * i], x[off + 2 * i + 1])).collect();
        off += 2 * n;
        normalize(&mut v);
        v
    };
    (0..k)
        .map(|i| {
            let a = read(da);
            let b = read(db);
            Atom::new(a, b, x[i] * x[i] / s)
        })
        .collect()
}

fn norm_of(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Objective and gradient in the packed coordinates.
fn packed_value_grad(obj: &Objective, x: &[f64], k: usize) -> Result<(f64, Vec<f64>)> {
    let (da, db) = (obj.dim_a, obj.dim_b);
    let atoms = unpack(x, k, da, db);
    let (value, g) = obj.evaluate(&obj.sigma(&atoms))?;
    let scores: Vec<f64> = atoms.iter().map(|at| expectation(&g, &at.psi)).collect();
    let mean: f64 = atoms.iter().zip(&scores).map(|(at, s)| at.weight * s).sum();
    let s: f64 = x[..k].iter().map(|t| t * t).sum();
    let mut grad = vec![0.0; x.len()];
    for i in 0..k {
        grad[i] = 2.0 * x[i] / s * (scores[i] - mean);
    }
    let mut off = k;
    for (at, &score) in atoms.iter().zip(&scores) {
        for (vec, m) in [(&at.a, obj.contract_b(&g, &at.b)), (&at.b, obj.contract_a(&g, &at.a))] {
            let n = vec.len();
            let raw = norm_of(&x[off..off + 2 * n]);
            let mv = m.mul_vec(vec);
            for j in 0..n {
                let d = (mv[j] - vec[j] * score) * (2.0 * at.weight / raw);
                grad[off + 2 * j] = d.re;
                grad[off + 2 * j + 1] = d.im;
            }
            off += 2 * n;
        }
    }
    Ok((value, grad))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Polishes weights and vectors of the active atoms with L-BFGS and
/// Armijo backtracking. Never increases the objective.
fn corrective(obj: &Objective, atoms: &mut Vec<Atom>, max_iter: usize) -> Result<()> {
    const HISTORY: usize = 8;
    let k = atoms.len();
    let mut x = pack(atoms);
    let (mut f, mut g) = packed_value_grad(obj, &x, k)?;
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = Default::default();
    let mut stalls = 0;
    for _ in 0..max_iter {
        if norm_of(&g) < 1e-12 {
            break;
        }
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match hist.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1e-2 / norm_of(&g).max(1e-12),
        };
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            hist.clear();
            dir = g.iter().map(|v| -v * 1e-2 / norm_of(&g)).collect();
            slope = dot(&g, &dir);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (fn_, gn) = packed_value_grad(obj, &xn, k)?;
            if fn_.is_finite() && fn_ <= f + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else { break };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == HISTORY {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        let decrease = f - fn_;
        x = xn;
        f = fn_;
        g = gn;
        if decrease <= 1e-15 * (1.0 + f.abs()) {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    *atoms = unpack(&x, k, obj.dim_a, obj.dim_b);
    Ok(())
}

fn basis_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Minimizer of the convex `φ(γ) = f(σ + γ(P_s − P_v))` on `[0, γ_max]`,
/// by safeguarded regula falsi on `φ'`.
fn line_search(
    obj: &Objective,
    sigma: &ComplexMatrix,
    dir: &ComplexMatrix,
    slope0: f64,
    gamma_max: f64,
) -> Result<f64> {
    let slope = |gamma: f64| -> Result<f64> {
        let point = sigma + &dir.scale_real(gamma);
        let (_, g) = obj.evaluate(&point)?;
        Ok(g.trace_product(dir).re)
    };
    let mut hi = gamma_max;
    let mut d_hi = slope(hi)?;
    if d_hi <= 0.0 {
        return Ok(gamma_max);
    }
    let mut lo = 0.0;
    let mut d_lo = slope0;
    let mut side = 0i8;
    for it in 0..80 {
        if hi - lo <= 1e-15 * gamma_max {
            break;
        }
        let secant = (lo * d_hi - hi * d_lo) / (d_hi - d_lo);
        let width = hi - lo;
        let mid = if it % 3 == 2 || !(secant > lo + 1e-3 * width && secant < hi - 1e-3 * width) {
            0.5 * (lo + hi)
        } else {
            secant
        };
        let d_mid = slope(mid)?;
        if d_mid.abs() <= 1e-13 * slope0.abs() {
            return Ok(mid);
        }
        if d_mid < 0.0 {
            lo = mid;
            d_lo = d_mid;
            if side == -1 {
                d_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            d_hi = d_mid;
            if side == 1 {
                d_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative entropy of entanglement (base 2) for `2×2` and `2×3` states.
pub fn ree(rho: &DensityMatrix, cfg: &ReeConfig) -> Result<ReeResult> {
    let (da, db) = rho.dims();
    if !(da == 2 && (db == 2 || db == 3)) {
        return Err(Error::DimError {
            op: "ree",
            expected: "2x2 or 2x3",
            dim_a: da,
            dim_b: db,
        });
    }
    cfg.validate()?;
    let d = da * db;
    let rho_log_rho: f64 = rho
        .spectrum()?
        .eigenvalues
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum();
    let obj = Objective {
        rho: rho.matrix(),
        rho_log_rho,
        eps: cfg.support_epsilon,
        dim_a: da,
        dim_b: db,
    };
    let mut rng = stream_rng(cfg.seed, 0);

    let mut atoms: Vec<Atom> = (0..da)
        .flat_map(|i| (0..db).map(move |k| (i, k)))
        .map(|(i, k)| Atom::new(basis_vector(da, i), basis_vector(db, k), 1.0 / d as f64))
        .collect();
    let mut warm: Option<Vec<C64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let (mut value, mut gap);

    loop {
        let sigma = obj.sigma(&atoms);
        let (val, g) = obj.evaluate(&sigma)?;
        value = val;
        let starts = oracle_starts(&obj, &g, warm.as_ref(), cfg.oracle_restarts, &mut rng)?;
        let (g_s, a, b) = product_oracle(&obj, &g, &starts)?;
        let scores: Vec<f64> = atoms.iter().map(|at| expectation(&g, &at.psi)).collect();
        let g_sigma: f64 = atoms.iter().zip(&scores).map(|(at, s)| at.weight * s).sum();
        gap = g_sigma - g_s;
        if gap <= cfg.gap_tolerance {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;
        warm = Some(b.clone());

        let away = scores
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .expect("active set is never empty");
        let slope0 = g_s - scores[away];
        if slope0 >= 0.0 {
            // the oracle atom is no better than every active atom
            break;
        }
        let target = Atom::new(a, b, 0.0);
        let dir = &ComplexMatrix::outer(&target.psi) - &ComplexMatrix::outer(&atoms[away].psi);
        let gamma_max = atoms[away].weight;
        let gamma = line_search(&obj, &sigma, &dir, slope0, gamma_max)?;

        atoms[away].weight -= gamma;
        let existing = atoms.iter().position(|at| {
            let overlap: C64 = at.psi.iter().zip(&target.psi).map(|(x, y)| x.conj() * y).sum();
            overlap.norm_sqr() > 1.0 - 1e-14
        });
        match existing {
            Some(i) => atoms[i].weight += gamma,
            None => atoms.push(Atom { weight: gamma, ..target }),
        }
        if gamma >= gamma_max {
            atoms[away].weight = 0.0;
        }
        atoms.retain(|at| at.weight > 1e-16);
        corrective(&obj, &mut atoms, CORRECTIVE_ITERATIONS)?;
        atoms.retain(|at| at.weight > 1e-14);
        let total: f64 = atoms.iter().map(|at| at.weight).sum();
        for at in atoms.iter_mut() {
            at.weight /= total;
        }
    }

    Ok(ReeResult {
        value: value.max(0.0),
        gap,
        iterations,
        converged,
        decomposition: atoms.into_iter().map(|at| (at.weight, at.a, at.b)).collect(),
    })
}
