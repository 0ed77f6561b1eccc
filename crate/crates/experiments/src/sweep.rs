//! Gridded experiment results and their CSV form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tgho_core::output::format_float;
use tgho_core::Regime;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Hex sha256 of the resolved experiment description.
    pub config_hash: String,
    pub code_version: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new<T: Serialize>(resolved: &T, seed: Option<u64>) -> Self {
        let bytes = serde_json::to_vec(resolved).expect("experiment descriptions serialize");
        Self {
            config_hash: hex::encode(Sha256::digest(&bytes)),
            code_version: CODE_VERSION.to_string(),
            seed,
        }
    }

    /// Trailing `#` line of every CSV file.
    pub fn comment(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!(
            "# config_sha256={} version={} seed={seed}",
            self.config_hash, self.code_version
        )
    }
}

/// Values on the Cartesian product of the axes, first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub experiment: String,
    pub regime: Option<Regime>,
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    /// One row of column values per grid point.
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn grid_len(axes: &[Axis]) -> usize {
        axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis coordinates of grid point `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        grid_point(&self.axes, index)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn is_consistent(&self) -> bool {
        self.rows.len() == Self::grid_len(&self.axes)
            && self.rows.iter().all(|r| r.len() == self.columns.len())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(|a| a.name.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .coordinates(i)
                .into_iter()
                .chain(row.iter().copied())
                .map(format_float)
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        writeln!(out, "{}", self.provenance.comment())
    }
}

pub fn grid_point(axes: &[Axis], mut index: usize) -> Vec<f64> {
    let mut out = vec![0.0; axes.len()];
    for (slot, axis) in axes.iter().enumerate().rev() {
        let len = axis.values.len();
        out[slot] = axis.values[index % len];
        index /= len;
    }
    out
}
