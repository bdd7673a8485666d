//! Run-directory layout. All files of one run are written here, from one
//! thread, after the computation has finished.
//!
//! ```text
//! <out>/report.json
//! <out>/config.toml        merged configuration actually used
//! <out>/series/*.csv
//! <out>/plots/*.csv        long-format plot data
//! <out>/snapshots/*.mzk1   only when requested
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::{Experiment, RunConfig};
use crate::experiments::RunOutput;
use crate::plot::emit_plot_data;

/// Environment variable naming the default output root.
pub const OUT_ROOT_VAR: &str = "MZK_OUT_ROOT";

/// `--out` wins, then the config's `out`, then `$MZK_OUT_ROOT/<experiment>`,
/// then `mzk-runs/<experiment>`.
pub fn output_dir(flag: Option<&Path>, cfg: &RunConfig, experiment: Experiment, env_root: Option<PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.out {
        return p.clone();
    }
    env_root.unwrap_or_else(|| PathBuf::from("mzk-runs")).join(experiment.name())
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn write_run(dir: &Path, cfg: &RunConfig, run: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir.join("series")).with_context(|| format!("creating {}", dir.display()))?;
    fs::create_dir_all(dir.join("plots"))?;
    write(&dir.join("report.json"), run.report.to_json().as_bytes())?;
    write(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    for (name, text) in &run.series {
        write(&dir.join("series").join(name), text.as_bytes())?;
    }
    for (name, text) in emit_plot_data(&run.report) {
        write(&dir.join("plots").join(format!("{name}.csv")), text.as_bytes())?;
    }
    if !run.snapshots.is_empty() {
        fs::create_dir_all(dir.join("snapshots"))?;
        for (name, bytes) in &run.snapshots {
            write(&dir.join("snapshots").join(name), bytes)?;
        }
    }
    Ok(())
}
