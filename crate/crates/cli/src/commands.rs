//! Command implementations. Each writes exactly one output file and
//! reports how many states failed to converge, if any.

use std::f64::consts::PI;
use std::path::Path;

use entangle_core::channels::{sweep, uniform_grid, ChannelKind, SweepQuantity, SweepSpec};
use entangle_core::measures::{measure_all, MeasureRecord, ReeConfig};
use entangle_core::ordering::{self, parse_measures, MeasureName, StateClass};
use entangle_core::qfi::{batch_optimize, qfi, EulerAngles, EulerAxes, OptimizeConfig};
use entangle_core::states::{sample_ensemble, EnsembleMeasure, EnsembleSpec, Field, StateSpec};
use rayon::prelude::*;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::io::{self, fmt_f64, StateRecord};
use crate::svg;

/// Number of states whose REE estimate did not converge.
pub type Unconverged = usize;

pub fn run(cmd: &Command) -> CliResult<Unconverged> {
    match cmd {
        Command::Sample(a) => sample(a).map(|_| 0),
        Command::Measure(a) => measure(a),
        Command::Optimize(a) => optimize(a).map(|_| 0),
        Command::Sweep(a) => sweep_cmd(a).map(|_| 0),
        Command::SuperpositionScan(a) => scan(a).map(|_| 0),
        Command::Census(a) => census(a).map(|_| 0),
        Command::Scatter(a) => scatter(a).map(|_| 0),
        Command::Replay(_) => Err(CliError::Usage("replay cannot be nested".into())),
    }
}

pub fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("dims must look like 2x2 or 2x3, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 || a * b > 16 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Radians from forms such as `pi/2`, `2pi/3`, `2*pi/3`, `pi` or `0.5`.
pub fn parse_angle(s: &str) -> CliResult<f64> {
    let bad = || CliError::Usage(format!("cannot read angle {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if let Some(idx) = t.find("pi") {
        let num = t[..idx].trim_end_matches('*');
        let factor: f64 = if num.is_empty() { 1.0 } else { num.parse().map_err(|_| bad())? };
        let rest = &t[idx + 2..];
        let den: f64 = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/').ok_or_else(bad)?.parse().map_err(|_| bad())?
        };
        let v = factor * PI / den;
        return if v.is_finite() && v > 0.0 { Ok(v) } else { Err(bad()) };
    }
    t.parse().ok().filter(|v: &f64| v.is_finite() && *v > 0.0).ok_or_else(bad)
}

pub fn parse_state_name(s: &str) -> CliResult<StateSpec> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || CliError::Usage(format!("unknown state {s:?}"));
    let count = |rest: &str| -> CliResult<usize> {
        let n: usize = rest.parse().map_err(|_| bad())?;
        if (2..=entangle_core::states::MAX_QUBITS).contains(&n) {
            Ok(n)
        } else {
            Err(bad())
        }
    };
    if t == "wlike3" {
        Ok(StateSpec::WLike3)
    } else if t == "bell" {
        Ok(StateSpec::Bell(1))
    } else if let Some(k) = t.strip_prefix("bell") {
        match k.parse::<u8>() {
            Ok(k @ 1..=4) => Ok(StateSpec::Bell(k)),
            _ => Err(bad()),
        }
    } else if let Some(n) = t.strip_prefix("ghz") {
        Ok(StateSpec::Ghz(count(n)?))
    } else if let Some(n) = t.strip_prefix('w') {
        Ok(StateSpec::W(count(n)?))
    } else {
        Err(bad())
    }
}

fn sample(a: &SampleArgs) -> CliResult<()> {
    let dims = parse_dims(&a.dims)?;
    let spec = EnsembleSpec {
        count: a.count,
        seed: a.seed,
        field: match a.field {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        },
        measure: match a.measure {
            EnsembleArg::Hs => EnsembleMeasure::HilbertSchmidt,
            EnsembleArg::Pure => EnsembleMeasure::HaarPure,
        },
        dims,
    };
    let records = sample_ensemble(spec)
        .enumerate()
        .map(|(k, rho)| Ok(StateRecord::from_state(k as u64, &rho?)))
        .collect::<CliResult<Vec<_>>>()?;
    io::write_states(&a.out, &records)
}

const MEASURE_COLUMNS: [MeasureName; 7] = [
    MeasureName::Concurrence,
    MeasureName::MaxConcurrence,
    MeasureName::Negativity,
    MeasureName::LogNegativity,
    MeasureName::NegEig,
    MeasureName::Eof,
    MeasureName::Ree,
];

fn measure(a: &MeasureArgs) -> CliResult<Unconverged> {
    let selected: Vec<MeasureName> = if a.measures.trim().eq_ignore_ascii_case("all") {
        MEASURE_COLUMNS.to_vec()
    } else {
        let list = parse_measures(&a.measures).map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(m) = list.iter().find(|m| !MEASURE_COLUMNS.contains(m)) {
            return Err(CliError::Usage(format!("{} is not a measurement column", m.column())));
        }
        list
    };
    let want = |m: MeasureName| selected.contains(&m);
    let states = io::read_states(&a.input)?;
    let base = ReeConfig {
        gap_tolerance: a.ree_tol,
        max_iterations: a.ree_max_iter,
        ..ReeConfig::default()
    };
    base.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let records: Vec<MeasureRecord> = states
        .par_iter()
        .map(|(id, rho)| {
            let cfg = ReeConfig { seed: *id, ..base };
            let full = measure_all(rho, want(MeasureName::Ree).then_some(&cfg))
                .map_err(|e| CliError::Data(format!("state {id}: {e}")))?;
            let keep = |m: MeasureName, v: Option<f64>| if want(m) { v } else { None };
            Ok(MeasureRecord {
                concurrence: keep(MeasureName::Concurrence, full.concurrence),
                c_max: keep(MeasureName::MaxConcurrence, full.c_max),
                negativity: keep(MeasureName::Negativity, full.negativity),
                log_negativity: keep(MeasureName::LogNegativity, full.log_negativity),
                neg_eig_measure: keep(MeasureName::NegEig, full.neg_eig_measure),
                eof: keep(MeasureName::Eof, full.eof),
                ..full
            })
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<Vec<String>> = states
        .iter()
        .zip(&records)
        .map(|((id, _), r)| io::measure_row(*id, r))
        .collect();
    io::write_csv(&a.out, &io::MEASURE_HEADER, &rows)?;
    Ok(records.iter().filter(|r| r.ree_converged == Some(false)).count())
}

fn optimize(a: &OptimizeArgs) -> CliResult<()> {
    let cfg = OptimizeConfig {
        step: parse_angle(&a.step)?,
        refine_step: parse_angle(&a.refine)?,
        refine_threshold: a.refine_threshold,
        axes: match a.axes {
            AxesArg::Xzx => EulerAxes::Xzx,
            AxesArg::Xyx => EulerAxes::Xyx,
        },
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let states = io::read_states(&a.input)?;
    let rhos: Vec<_> = states.iter().map(|(_, r)| r.clone()).collect();
    let results = batch_optimize(&rhos, &cfg)?;
    let mut header = vec!["state_id".to_string(), "qfi".into(), "mqfi_max".into(), "mqfi_min".into()];
    for kind in ["max", "min"] {
        for q in 1..=2 {
            for angle in ["alpha", "beta", "gamma"] {
                header.push(format!("{kind}_{angle}{q}"));
            }
        }
    }
    let angle_cells = |pair: &[EulerAngles; 2]| {
        pair.iter()
            .flat_map(|e| [e.alpha, e.beta, e.gamma])
            .map(fmt_f64)
            .collect::<Vec<_>>()
    };
    let rows: Vec<Vec<String>> = states
        .iter()
        .zip(&results)
        .map(|((id, _), r)| {
            let mut row = vec![id.to_string(), fmt_f64(r.original), fmt_f64(r.maximized), fmt_f64(r.minimized)];
            row.extend(angle_cells(&r.max_angles));
            row.extend(angle_cells(&r.min_angles));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    io::write_csv(&a.out, &header, &rows)
}

fn sweep_cmd(a: &SweepArgs) -> CliResult<()> {
    let state = parse_state_name(&a.state)?;
    let channel: ChannelKind = a.channel.parse().map_err(|e: entangle_core::Error| CliError::Usage(e.to_string()))?;
    let quantity: SweepQuantity = a.quantity.parse().map_err(|e: entangle_core::Error| CliError::Usage(e.to_string()))?;
    if a.p_steps < 2 {
        return Err(CliError::Usage("--p-steps must be at least 2".into()));
    }
    let spec = SweepSpec {
        state,
        channel,
        p_grid: uniform_grid(a.p_steps),
        quantity,
    };
    let rows: Vec<Vec<String>> = sweep(&spec)?
        .into_iter()
        .map(|(p, v)| vec![fmt_f64(p), fmt_f64(v)])
        .collect();
    io::write_csv(&a.out, &["p", "value"], &rows)
}

/// `(α, mean QFI)` on `k` evenly spaced α in `[0, 1]`.
pub fn superposition_scan(n: usize, k: usize, phase: f64) -> CliResult<Vec<(f64, f64)>> {
    if !(2..=5).contains(&n) {
        return Err(CliError::Usage(format!("--n must lie in 2..=5, got {n}")));
    }
    if k < 2 {
        return Err(CliError::Usage("--alpha-steps must be at least 2".into()));
    }
    if !phase.is_finite() {
        return Err(CliError::Usage("--phase must be finite".into()));
    }
    uniform_grid(k)
        .into_par_iter()
        .map(|alpha| {
            let rho = entangle_core::states::make_state(&StateSpec::Superposition { n, alpha, phase })?;
            Ok((alpha, qfi(&rho, n)?.mean_qfi))
        })
        .collect()
}

fn scan(a: &ScanArgs) -> CliResult<()> {
    let rows: Vec<Vec<String>> = superposition_scan(a.n, a.alpha_steps, a.phase)?
        .into_iter()
        .map(|(x, v)| vec![fmt_f64(x), fmt_f64(v)])
        .collect();
    io::write_csv(&a.out, &["alpha", "mean_qfi"], &rows)
}

fn census(a: &CensusArgs) -> CliResult<()> {
    let measures = parse_measures(&a.measures).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(a.tol >= 0.0) {
        return Err(CliError::Usage("--tol must be nonnegative".into()));
    }
    let records: Vec<MeasureRecord> = io::read_records(&a.input, a.mqfi.as_deref())?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let rows: Vec<Vec<String>> = match a.mode {
        CensusMode::Pair => {
            let counts = ordering::census(&records, &measures, a.tol)?;
            let n = records.len();
            let total = (n * n.saturating_sub(1) / 2).max(1) as f64;
            counts
                .into_iter()
                .map(|(class, c)| vec![class.to_string(), c.to_string(), fmt_f64(c as f64 / total)])
                .collect()
        }
        CensusMode::State => {
            let [x, y] = measures[..] else {
                return Err(CliError::Usage("--mode state needs exactly two measures".into()));
            };
            let counts = ordering::state_census(&records, x, y, a.tol)?;
            let total = records.len().max(1) as f64;
            StateClass::ALL
                .into_iter()
                .map(|class| {
                    let c = counts.get(&class).copied().unwrap_or(0);
                    vec![class.label(x, y), c.to_string(), fmt_f64(c as f64 / total)]
                })
                .collect()
        }
    };
    io::write_csv(&a.out, &["pattern", "count", "frequency"], &rows)
}

fn column_measure(name: &str) -> CliResult<MeasureName> {
    name.parse()
        .map_err(|_| CliError::Data(format!("unknown column {name:?}")))
}

fn scatter(a: &ScatterArgs) -> CliResult<()> {
    let (x, y) = (column_measure(&a.x)?, column_measure(&a.y)?);
    let records = io::read_records(&a.input, a.mqfi.as_deref())?;
    let header = io::Table::read(&a.input)?.header;
    let available = |m: MeasureName| {
        header.iter().any(|h| h == m.column())
            || (a.mqfi.is_some() && matches!(m, MeasureName::MeanQfi | MeasureName::MqfiMax | MeasureName::MqfiMin))
    };
    for m in [x, y] {
        if !available(m) {
            return Err(CliError::Data(format!("missing column {:?}", m.column())));
        }
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|(_, r)| Some((x.value(r)?, y.value(r)?)))
        .collect();
    let doc = svg::scatter(&points, x.column(), y.column());
    write_text(&a.out, &doc)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!((parse_angle("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("2*pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("-1").is_err());
        assert!(parse_angle("pi/").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn dims() {
        assert_eq!(parse_dims("2x3").unwrap(), (2, 3));
        assert!(parse_dims("2by2").is_err());
        assert!(parse_dims("0x2").is_err());
    }

    #[test]
    fn state_names() {
        assert_eq!(parse_state_name("ghz3").unwrap(), StateSpec::Ghz(3));
        assert_eq!(parse_state_name("W3").unwrap(), StateSpec::W(3));
        assert_eq!(parse_state_name("wlike3").unwrap(), StateSpec::WLike3);
        assert_eq!(parse_state_name("bell").unwrap(), StateSpec::Bell(1));
        assert_eq!(parse_state_name("bell4").unwrap(), StateSpec::Bell(4));
        assert!(parse_state_name("bell5").is_err());
        assert!(parse_state_name("ghz9").is_err());
        assert!(parse_state_name("cat").is_err());
    }
}
