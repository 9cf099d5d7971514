//! The `entangle` command-line tool.
//!
//! States travel as JSONL, results as CSV and plots as SVG. Every output
//! file gets a `<output>.manifest.json` recording the resolved command, so
//! `entangle replay` can regenerate it and compare checksums.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command, ReplayArgs};
use error::{CliError, CliResult};
use manifest::{unix_ms, FileDigest, RunManifest};

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs:?} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Runs `cmd`, then records its manifest. Outputs are still written and
/// recorded when some REE estimates fail to converge.
fn execute(mut cmd: Command, argv: Vec<String>, jobs: Option<usize>) -> CliResult<()> {
    cmd.absolutize_paths();
    let started = unix_ms();
    let unconverged = with_pool(jobs, || commands::run(&cmd))??;
    let finished = unix_ms();
    let output = cmd.out_mut().expect("every non-replay command has an output").clone();
    let m = RunManifest {
        command: cmd.name().to_string(),
        argv,
        seed: cmd.seed(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms: started,
        finished_unix_ms: finished,
        inputs: cmd.inputs().into_iter().map(FileDigest::of).collect::<CliResult<_>>()?,
        output: FileDigest::of(&output)?,
        config: cmd,
    };
    m.write()?;
    if unconverged > 0 {
        return Err(CliError::NonConvergence(unconverged));
    }
    Ok(())
}

fn replay(a: &ReplayArgs, jobs: Option<usize>) -> CliResult<()> {
    let m = RunManifest::read(&a.manifest)?;
    for input in &m.inputs {
        let now = FileDigest::of(&input.path)?;
        if now.sha256 != input.sha256 {
            return Err(CliError::Data(format!("input {} changed since the recorded run", input.path.display())));
        }
    }
    let mut cmd = m.config.clone();
    let mut target = m.output.path.clone().into_os_string();
    target.push(".replay");
    let target = std::path::PathBuf::from(target);
    *cmd.out_mut().ok_or_else(|| CliError::Data("manifest records a replay".into()))? = target.clone();
    let outcome = with_pool(jobs, || commands::run(&cmd))?;
    let digest = FileDigest::of(&target);
    if !a.keep {
        let _ = std::fs::remove_file(&target);
    }
    match outcome {
        Ok(_) | Err(CliError::NonConvergence(_)) => {}
        Err(e) => return Err(e),
    }
    let digest = digest?;
    if digest.sha256 != m.output.sha256 {
        return Err(CliError::Data(format!(
            "checksum mismatch for {}: recorded {}, replayed {}",
            m.output.path.display(),
            m.output.sha256,
            digest.sha256
        )));
    }
    println!("{}  {}", digest.sha256, m.output.path.display());
    Ok(())
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let argv: Vec<String> = argv.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    let result = match cli.command {
        Command::Replay(ref a) => replay(a, cli.jobs),
        cmd => execute(cmd, argv, cli.jobs),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("entangle: {e}");
            e.exit_code()
        }
    }
}
