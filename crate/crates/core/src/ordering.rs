//! Ordering of states under pairs of measures.
//!
//! Two states are compared measure by measure, giving a pattern such as
//! `C<,N>,E<`. A census counts patterns over all unordered pairs of an
//! ensemble; each pattern is stored with its first strict relation as `<`,
//! so a pattern and its mirror image share one class. A per-state census
//! compares two measures on the same state instead.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::MeasureRecord;

/// Default tolerance for closed-form measures.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureName {
    Concurrence,
    MaxConcurrence,
    Negativity,
    LogNegativity,
    NegEig,
    Eof,
    Ree,
    MeanQfi,
    MqfiMax,
    MqfiMin,
}

impl MeasureName {
    pub const ALL: [MeasureName; 10] = [
        Self::Concurrence,
        Self::MaxConcurrence,
        Self::Negativity,
        Self::LogNegativity,
        Self::NegEig,
        Self::Eof,
        Self::Ree,
        Self::MeanQfi,
        Self::MqfiMax,
        Self::MqfiMin,
    ];

    /// Label used in pattern strings.
    pub fn short(self) -> &'static str {
        match self {
            Self::Concurrence => "C",
            Self::MaxConcurrence => "Cmax",
            Self::Negativity => "N",
            Self::LogNegativity => "EN",
            Self::NegEig => "NE",
            Self::Eof => "EF",
            Self::Ree => "E",
            Self::MeanQfi => "F",
            Self::MqfiMax => "FMAX",
            Self::MqfiMin => "FMIN",
        }
    }

    /// Column name in measurement and optimizer CSV files.
    pub fn column(self) -> &'static str {
        match self {
            Self::Concurrence => "concurrence",
            Self::MaxConcurrence => "c_max",
            Self::Negativity => "negativity",
            Self::LogNegativity => "log_negativity",
            Self::NegEig => "neg_eig",
            Self::Eof => "eof",
            Self::Ree => "ree",
            Self::MeanQfi => "qfi",
            Self::MqfiMax => "mqfi_max",
            Self::MqfiMin => "mqfi_min",
        }
    }

    pub fn value(self, rec: &MeasureRecord) -> Option<f64> {
        match self {
            Self::Concurrence => rec.concurrence,
            Self::MaxConcurrence => rec.c_max,
            Self::Negativity => rec.negativity,
            Self::LogNegativity => rec.log_negativity,
            Self::NegEig => rec.neg_eig_measure,
            Self::Eof => rec.eof,
            Self::Ree => rec.ree,
            Self::MeanQfi => rec.mean_qfi,
            Self::MqfiMax => rec.mqfi_max,
            Self::MqfiMin => rec.mqfi_min,
        }
    }

    fn require(self, rec: &MeasureRecord) -> Result<f64> {
        self.value(rec)
            .ok_or_else(|| Error::MissingMeasure(self.column().to_string()))
    }

    /// Tolerance for comparing `a` and `b`; estimated measures widen it by
    /// their reported error.
    fn tolerance(self, a: &MeasureRecord, b: &MeasureRecord, tol: f64) -> f64 {
        match self {
            Self::Ree => {
                let gap = a.ree_gap.unwrap_or(0.0).max(b.ree_gap.unwrap_or(0.0));
                tol.max(2.0 * gap)
            }
            _ => tol,
        }
    }
}

impl fmt::Display for MeasureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for MeasureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|m| m.short().eq_ignore_ascii_case(t) || m.column().eq_ignore_ascii_case(t))
            .or(match t.to_ascii_lowercase().as_str() {
                "neg_eig_measure" => Some(Self::NegEig),
                "mean_qfi" => Some(Self::MeanQfi),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidSpec(format!("unknown measure {s:?}")))
    }
}

/// Parses a comma-separated measure list such as `C,N,E`.
pub fn parse_measures(list: &str) -> Result<Vec<MeasureName>> {
    let out: Vec<MeasureName> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::InvalidSpec("empty measure list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl Relation {
    /// `Equal` iff `|a − b| ≤ tol`.
    pub fn compare(a: f64, b: f64, tol: f64) -> Self {
        if (a - b).abs() <= tol {
            Self::Equal
        } else if a < b {
            Self::Less
        } else {
            Self::Greater
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Self::Less => Self::Greater,
            Self::Equal => Self::Equal,
            Self::Greater => Self::Less,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Self::Less => '<',
            Self::Equal => '=',
            Self::Greater => '>',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderingClass {
    pub pattern: Vec<(MeasureName, Relation)>,
}

impl OrderingClass {
    pub fn flipped(&self) -> Self {
        Self {
            pattern: self.pattern.iter().map(|&(m, r)| (m, r.flip())).collect(),
        }
    }

    /// The representative of `{self, mirror}` whose first strict relation is `<`.
    pub fn canonical(&self) -> Self {
        match self.pattern.iter().map(|p| p.1).find(|&r| r != Relation::Equal) {
            Some(Relation::Greater) => self.flipped(),
            _ => self.clone(),
        }
    }

    /// True when every measure orders the pair the same way (or all tie).
    pub fn is_consistent(&self) -> bool {
        let strict: Vec<Relation> = self
            .pattern
            .iter()
            .map(|p| p.1)
            .filter(|&r| r != Relation::Equal)
            .collect();
        strict.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, r)) in self.pattern.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}{}", m.short(), r.symbol())?;
        }
        Ok(())
    }
}

/// Relation of `rec1` to `rec2` under each measure, in the given order.
pub fn classify_pair(
    rec1: &MeasureRecord,
    rec2: &MeasureRecord,
    measures: &[MeasureName],
    tol: f64,
) -> Result<OrderingClass> {
    let pattern = measures
        .iter()
        .map(|&m| {
            let (a, b) = (m.require(rec1)?, m.require(rec2)?);
            Ok((m, Relation::compare(a, b, m.tolerance(rec1, rec2, tol))))
        })
        .collect::<Result<_>>()?;
    Ok(OrderingClass { pattern })
}

/// Canonical class counts over all `n(n−1)/2` unordered pairs.
pub fn census(
    records: &[MeasureRecord],
    measures: &[MeasureName],
    tol: f64,
) -> Result<BTreeMap<OrderingClass, usize>> {
    for rec in records {
        for &m in measures {
            m.require(rec)?;
        }
    }
    let n = records.len();
    let merge = |mut a: BTreeMap<OrderingClass, usize>, b: BTreeMap<OrderingClass, usize>| {
        for (k, v) in b {
            *a.entry(k).or_insert(0) += v;
        }
        a
    };
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local = BTreeMap::new();
            for j in i + 1..n {
                let class = classify_pair(&records[i], &records[j], measures, tol)
                    .expect("measures checked above")
                    .canonical();
                *local.entry(class).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, merge);
    Ok(counts)
}

/// Comparison of two measures `x`, `y` on the same state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateClass {
    BothZero,
    OnlyFirstPositive,
    OnlySecondPositive,
    Less,
    Equal,
    Greater,
}

impl StateClass {
    pub const ALL: [StateClass; 6] = [
        Self::BothZero,
        Self::OnlyFirstPositive,
        Self::OnlySecondPositive,
        Self::Less,
        Self::Equal,
        Self::Greater,
    ];

    /// Label such as `F>0,C=0` or `F<C`.
    pub fn label(self, x: MeasureName, y: MeasureName) -> String {
        let (x, y) = (x.short(), y.short());
        match self {
            Self::BothZero => format!("{x}=0,{y}=0"),
            Self::OnlyFirstPositive => format!("{x}>0,{y}=0"),
            Self::OnlySecondPositive => format!("{x}=0,{y}>0"),
            Self::Less => format!("{x}<{y}"),
            Self::Equal => format!("{x}={y}"),
            Self::Greater => format!("{x}>{y}"),
        }
    }
}

/// Values at or below `tol` count as zero; otherwise `x` and `y` are compared
/// with the same tolerance.
pub fn classify_state(rec: &MeasureRecord, x: MeasureName, y: MeasureName, tol: f64) -> Result<StateClass> {
    let (a, b) = (x.require(rec)?, y.require(rec)?);
    let tol_x = x.tolerance(rec, rec, tol);
    let tol_y = y.tolerance(rec, rec, tol);
    Ok(match (a > tol_x, b > tol_y) {
        (false, false) => StateClass::BothZero,
        (true, false) => StateClass::OnlyFirstPositive,
        (false, true) => StateClass::OnlySecondPositive,
        (true, true) => match Relation::compare(a, b, tol_x.max(tol_y)) {
            Relation::Less => StateClass::Less,
            Relation::Equal => StateClass::Equal,
            Relation::Greater => StateClass::Greater,
        },
    })
}

pub fn state_census(
    records: &[MeasureRecord],
    x: MeasureName,
    y: MeasureName,
    tol: f64,
) -> Result<BTreeMap<StateClass, usize>> {
    let mut out = BTreeMap::new();
    for rec in records {
        *out.entry(classify_state(rec, x, y, tol)?).or_insert(0) += 1;
    }
    Ok(out)
}

/// Extreme points of a scatter plot per x-bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterBounds {
    /// Point with the smallest `y` in each nonempty bin, by increasing `x`.
    pub lower: Vec<(f64, f64)>,
    /// Point with the largest `y` in each nonempty bin.
    pub upper: Vec<(f64, f64)>,
}

pub fn scatter_points(records: &[MeasureRecord], x: MeasureName, y: MeasureName) -> Result<Vec<(f64, f64)>> {
    records.iter().map(|r| Ok((x.require(r)?, y.require(r)?))).collect()
}

/// Splits the x-range into `bins` equal bins and keeps the extreme points
/// of each.
pub fn scatter_bounds(
    records: &[MeasureRecord],
    x: MeasureName,
    y: MeasureName,
    bins: usize,
) -> Result<ScatterBounds> {
    let pts = scatter_points(records, x, y)?;
    Ok(envelope(&pts, bins))
}

/// Lowest and highest point of one bin.
type BinExtremes = ((f64, f64), (f64, f64));

pub fn envelope(points: &[(f64, f64)], bins: usize) -> ScatterBounds {
    let bins = bins.max(1);
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut slots: Vec<Option<BinExtremes>> = vec![None; bins];
    for &p in points {
        let k = if width > 0.0 {
            (((p.0 - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        let slot = &mut slots[k];
        *slot = Some(match *slot {
            None => (p, p),
            Some((mn, mx)) => (
                if p.1 < mn.1 { p } else { mn },
                if p.1 > mx.1 { p } else { mx },
            ),
        });
    }
    let kept: Vec<_> = slots.into_iter().flatten().collect();
    ScatterBounds {
        lower: kept.iter().map(|s| s.0).collect(),
        upper: kept.iter().map(|s| s.1).collect(),
    }
}
