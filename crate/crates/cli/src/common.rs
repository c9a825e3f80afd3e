use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cliffsynth::fsutil::write_atomic;
use cliffsynth::moveset::{MoveSet, MoveSetConfig};
use serde::Serialize;

use crate::config::Echo;
use crate::error::CliError;

pub const EFFECTIVE_CONFIG: &str = "effective_config.json";

/// Per-run context shared by all subcommands.
pub struct Ctx {
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Ctx {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Writes a file in the output directory atomically.
    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("creating output directory {}", self.out_dir.display()))?;
        let path = self.path(name);
        write_atomic(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn echo<T: Serialize>(&self, command: &str, options: &T) -> Result<()> {
        let echo = Echo { command, seed: self.seed, options };
        let mut text = serde_json::to_string_pretty(&echo)?;
        text.push('\n');
        self.write(EFFECTIVE_CONFIG, text.as_bytes())?;
        Ok(())
    }
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    CliError::Usage(msg.into()).into()
}

pub fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > cliffsynth::MAX_QUBITS {
        return Err(usage(format!("--n must be in 1..={}, got {n}", cliffsynth::MAX_QUBITS)));
    }
    Ok(())
}

/// The move set from a JSON description, or all-to-all with a named scheme.
pub fn build_moveset(n: usize, weights: &str, moveset: Option<&Path>) -> Result<MoveSet> {
    check_n(n)?;
    let cfg = match moveset {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading move set {}", path.display()))?;
            let cfg = MoveSetConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            if cfg.n != n {
                return Err(usage(format!("{} describes n={}, expected n={n}", path.display(), cfg.n)));
            }
            cfg
        }
        None => MoveSetConfig::new(n, weights),
    };
    Ok(cfg.build()?)
}
