//! Binary plumbing for the orbit toolkit: argument/config resolution, the
//! versioned record schema, the worker pool, scan checkpoints, and command
//! dispatch. Everything here is deterministic for a fixed configuration —
//! worker count and checkpoint interruptions never change the byte stream.

pub mod checkpoint;
pub mod config;
pub mod pool;
pub mod records;
pub mod run;

use std::io::Write;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, config, or checkpoint: the caller can fix and retry.
    #[error("{0}")]
    Input(String),
    /// A broken invariant or io failure that is not the caller's fault.
    #[error("{0:#}")]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 4,
        }
    }
}

pub fn execute(cli: config::Cli) -> Result<run::RunStatus, CliError> {
    let cfg = config::resolve(cli)?;
    let mut writer: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| {
                CliError::Input(format!("cannot open {} for writing: {e}", path.display()))
            })?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    };
    let status = run::run(&cfg, &mut *writer)?;
    writer
        .flush()
        .map_err(|e| CliError::Internal(anyhow::Error::new(e).context("flushing output")))?;
    Ok(status)
}
