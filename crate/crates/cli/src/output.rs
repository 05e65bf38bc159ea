//! CSV output with a reproducibility preamble.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::ExperimentConfig;

/// Opens `path` and writes the metadata comment block. The header alone is
/// enough to rebuild the file: it embeds the full config, its hash, the seed,
/// and the worker count actually used.
pub fn open_csv(path: &Path, cfg: &ExperimentConfig, threads: usize) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
        }
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# config_sha256={}", cfg.sha256())?;
    writeln!(w, "# seed={}", cfg.seed)?;
    writeln!(w, "# threads={threads}")?;
    writeln!(w, "# config={}", cfg.canonical_json())?;
    Ok(csv::WriterBuilder::new().from_writer(w))
}

/// Renders a float with enough digits to round-trip, '.' decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
