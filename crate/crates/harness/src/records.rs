//! CSV row types. Rows are sorted before writing so output never depends on
//! evaluation order.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// One solve: a (level, lambda) entry of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub level: usize,
    pub lambda: f64,
    pub p: usize,
    pub dofs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub l2_error: f64,
    pub shift_min: f64,
    pub shift_max: f64,
    /// Wall time of the solve; zero when timing is disabled.
    pub seconds: f64,
}

impl RunRecord {
    fn key(&self) -> (usize, u64, usize) {
        (self.p, self.lambda.to_bits(), self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigRecord {
    pub xi: f64,
    pub p: usize,
    pub formulation: String,
    pub max_imag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRecord {
    pub level: usize,
    pub points: usize,
    pub max_phi: f64,
    pub max_stationarity: f64,
    pub fallbacks: usize,
    pub shift_min: f64,
    pub shift_max: f64,
}

pub fn sort_runs(rows: &mut [RunRecord]) {
    rows.sort_by(|a, b| {
        a.p.cmp(&b.p)
            .then(a.lambda.total_cmp(&b.lambda))
            .then(a.level.cmp(&b.level))
    });
    debug_assert!(rows.windows(2).all(|w| w[0].key() != w[1].key()));
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    for row in rows {
        w.serialize(row).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .map(|row| row.with_context(|| format!("parsing {}", path.display())))
        .collect()
}
