//! Single-qubit Kraus channels applied independently to every qubit.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, DensityMatrix, C64, I, ZERO};
use crate::measures::{self, ReeConfig};
use crate::qfi;
use crate::states::{make_state, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// Amplitude damping.
    Adc,
    /// Amplitude amplification.
    Aac,
    /// Depolarizing.
    Dpc,
    /// Phase damping.
    Pdc,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [Self::Adc, Self::Aac, Self::Dpc, Self::Pdc];

    pub fn name(self) -> &'static str {
        match self {
            Self::Adc => "adc",
            Self::Aac => "aac",
            Self::Dpc => "dpc",
            Self::Pdc => "pdc",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown channel {s:?}")))
    }
}

/// A channel kind at a fixed strength, with its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub kind: ChannelKind,
    pub p: f64,
    pub operators: Vec<ComplexMatrix>,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kraus set for `kind` at strength `p`.
pub fn kraus_set(kind: ChannelKind, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadStrength(p));
    }
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let operators = match kind {
        ChannelKind::Adc => vec![
            ComplexMatrix::from_rows(&[[re(1.0), ZERO], [ZERO, re(sq)]]),
            ComplexMatrix::from_rows(&[[ZERO, re(sp)], [ZERO, ZERO]]),
        ],
        ChannelKind::Aac => vec![
            ComplexMatrix::from_rows(&[[re(sq), ZERO], [ZERO, re(1.0)]]),
            ComplexMatrix::from_rows(&[[ZERO, ZERO], [re(sp), ZERO]]),
        ],
        ChannelKind::Dpc => {
            let k0 = (1.0 - 0.75 * p).sqrt();
            let h = sp / 2.0;
            vec![
                ComplexMatrix::from_rows(&[[re(k0), ZERO], [ZERO, re(k0)]]),
                ComplexMatrix::from_rows(&[[ZERO, re(h)], [re(h), ZERO]]),
                ComplexMatrix::from_rows(&[[ZERO, -I * h], [I * h, ZERO]]),
                ComplexMatrix::from_rows(&[[re(h), ZERO], [ZERO, re(-h)]]),
            ]
        }
        ChannelKind::Pdc => vec![
            ComplexMatrix::from_rows(&[[re(sp), ZERO], [ZERO, ZERO]]),
            ComplexMatrix::from_rows(&[[ZERO, ZERO], [ZERO, re(sp)]]),
            ComplexMatrix::from_rows(&[[re(sq), ZERO], [ZERO, re(sq)]]),
        ],
    };
    Ok(KrausChannel { kind, p, operators })
}

impl KrausChannel {
    /// `Σ K†K`, which is the identity for a trace-preserving channel.
    pub fn completeness(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| &acc + &(&k.adjoint() * k))
    }
}

/// Applies `channel` to each of the `n_qubits` qubits of `rho`:
/// `ρ' = Σ (K_{i₁}⊗…⊗K_{iₙ}) ρ (K_{i₁}⊗…⊗K_{iₙ})†`.
pub fn apply(channel: &KrausChannel, rho: &DensityMatrix, n_qubits: usize) -> Result<DensityMatrix> {
    let expected = 1usize.checked_shl(n_qubits as u32).unwrap_or(0);
    let (da, db) = rho.dims();
    // qubit registers only: a qutrit factor can never satisfy d = 2^n with
    // power-of-two subsystem sizes
    if rho.dim() != expected || !da.is_power_of_two() || !db.is_power_of_two() {
        return Err(Error::DimMismatch {
            expected,
            found: rho.dim(),
            qubits: n_qubits,
        });
    }
    let k = channel.operators.len();
    let terms = k.pow(n_qubits as u32);
    let mut acc = ComplexMatrix::zeros(expected, expected);
    let mut picks = Vec::with_capacity(n_qubits);
    for t in 0..terms {
        picks.clear();
        let mut rest = t;
        for _ in 0..n_qubits {
            picks.push(&channel.operators[rest % k]);
            rest /= k;
        }
        picks.reverse();
        let op = kron_all(picks.iter().copied());
        acc = &acc + &op.conjugate(rho.matrix());
    }
    DensityMatrix::from_computed(&acc, da, db)
}

/// Quantity tracked by a channel sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepQuantity {
    MeanQfi,
    Concurrence,
    Negativity,
    Ree,
}

impl FromStr for SweepQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean_qfi" => Ok(Self::MeanQfi),
            "concurrence" => Ok(Self::Concurrence),
            "negativity" => Ok(Self::Negativity),
            "ree" => Ok(Self::Ree),
            _ => Err(Error::InvalidSpec(format!("unknown quantity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub state: StateSpec,
    pub channel: ChannelKind,
    pub p_grid: Vec<f64>,
    pub quantity: SweepQuantity,
}

/// `k` evenly spaced strengths from 0 to 1 inclusive (`k ≥ 2`), with the
/// endpoints exact.
pub fn uniform_grid(k: usize) -> Vec<f64> {
    assert!(k >= 2, "a sweep grid needs at least two points");
    (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
}

fn qubit_count(rho: &DensityMatrix) -> Result<usize> {
    let d = rho.dim();
    if d.is_power_of_two() && d >= 2 {
        Ok(d.trailing_zeros() as usize)
    } else {
        Err(Error::DimMismatch {
            expected: d.next_power_of_two(),
            found: d,
            qubits: d.next_power_of_two().trailing_zeros() as usize,
        })
    }
}

fn evaluate(quantity: SweepQuantity, rho: &DensityMatrix, n: usize) -> Result<f64> {
    match quantity {
        SweepQuantity::MeanQfi => Ok(qfi::qfi(rho, n)?.mean_qfi),
        SweepQuantity::Concurrence => measures::concurrence(rho),
        SweepQuantity::Negativity => measures::negativity(rho),
        SweepQuantity::Ree => Ok(measures::ree(rho, &ReeConfig::default())?.value),
    }
}

/// Evaluates `quantity` on the channel output at every grid strength.
/// Rows come back in grid order whatever the evaluation order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<(f64, f64)>> {
    let grid = &spec.p_grid;
    if grid.is_empty()
        || grid.iter().any(|p| !(0.0..=1.0).contains(p))
        || grid.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::InvalidSpec(
            "strength grid must be nonempty, ascending and within [0, 1]".into(),
        ));
    }
    let rho = make_state(&spec.state)?;
    let n = qubit_count(&rho)?;
    grid.par_iter()
        .map(|&p| {
            let ch = kraus_set(spec.channel, p)?;
            let out = apply(&ch, &rho, n)?;
            Ok((p, evaluate(spec.quantity, &out, n)?))
        })
        .collect()
}
