//! `g,n,k,dim` Betti tables.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use stratops::strata::{BettiTable, CompactBettiTable};

#[derive(Deserialize)]
struct Row {
    g: u32,
    n: usize,
    k: usize,
    dim: i64,
}

fn rows(path: &Path) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["g", "n", "k", "dim"] {
        bail!("{}: header must be g,n,k,dim", path.display());
    }
    let mut out = Vec::new();
    for (i, r) in reader.deserialize().enumerate() {
        let row: Row = r.with_context(|| format!("{}: malformed row {}", path.display(), i + 2))?;
        if row.dim < 0 {
            bail!("{}: row {} has negative dimension {}", path.display(), i + 2, row.dim);
        }
        out.push(row);
    }
    Ok(out)
}

/// Adds the rows of `path` to `t`.
pub fn ingest_betti_into(mut t: BettiTable, path: &Path) -> Result<BettiTable> {
    for r in rows(path)? {
        t.insert(r.g, r.n, r.k, r.dim as u64).with_context(|| format!("{}", path.display()))?;
    }
    Ok(t)
}

pub fn ingest_compact_betti(path: &Path) -> Result<CompactBettiTable> {
    let mut t = CompactBettiTable::new();
    for r in rows(path)? {
        t.insert(r.g, r.n, r.k, r.dim as u64).with_context(|| format!("{}", path.display()))?;
    }
    Ok(t)
}
