//! Condensed view of a set of experiment results.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::SweepResult;

/// One acceptance criterion's verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {} {}: {}", self.id, self.name, self.detail)
    }
}

/// Largest finite value of a column and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub column: String,
    pub value: f64,
    pub at: Vec<(String, f64)>,
}

/// A ratio with its statistical error at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub at: Vec<(String, f64)>,
    pub ratio: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub config_hash: String,
    pub grid_points: usize,
    pub peak: Option<Peak>,
    pub ratios: Vec<RatioPoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiments: Vec<ExperimentSummary>,
    pub checks: Vec<CheckLine>,
}

const PEAK_COLUMNS: [&str; 2] = ["R_sym", "R_q_sym"];

fn labelled(r: &SweepResult, i: usize) -> Vec<(String, f64)> {
    r.axes.iter().map(|a| a.name.clone()).zip(r.coordinates(i)).collect()
}

fn summarize_one(r: &SweepResult) -> ExperimentSummary {
    let peak = PEAK_COLUMNS.iter().find_map(|&c| {
        let col = r.column(c)?;
        let (i, &value) = col
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        Some(Peak {
            column: c.to_string(),
            value,
            at: labelled(r, i),
        })
    });
    let ratios = match (r.column("R"), r.column("R_err")) {
        (Some(rs), Some(errs)) => rs
            .into_iter()
            .zip(errs)
            .enumerate()
            .map(|(i, (ratio, stderr))| RatioPoint {
                at: labelled(r, i),
                ratio,
                stderr,
            })
            .collect(),
        _ => Vec::new(),
    };
    ExperimentSummary {
        experiment: r.experiment.clone(),
        config_hash: r.provenance.config_hash.clone(),
        grid_points: r.rows.len(),
        peak,
        ratios,
    }
}

/// Summaries in input order. Identical repeats collapse to one entry; two
/// results of one experiment with different config hashes are an error.
pub fn summarize(results: &[SweepResult], checks: &[CheckLine]) -> Result<Summary> {
    let mut experiments: Vec<ExperimentSummary> = Vec::new();
    for r in results {
        if let Some(prev) = experiments.iter().find(|e| e.experiment == r.experiment) {
            if prev.config_hash != r.provenance.config_hash {
                return Err(Error::Merge(format!(
                    "{} appears with config hashes {} and {}",
                    r.experiment, prev.config_hash, r.provenance.config_hash
                )));
            }
            continue;
        }
        experiments.push(summarize_one(r));
    }
    Ok(Summary {
        experiments,
        checks: checks.to_vec(),
    })
}

fn coords(at: &[(String, f64)]) -> String {
    at.iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.experiments.is_empty() && self.checks.is_empty() {
            s.push_str("no results\n");
        }
        for e in &self.experiments {
            let _ = writeln!(
                s,
                "{} ({} points, config {})",
                e.experiment,
                e.grid_points,
                &e.config_hash[..12.min(e.config_hash.len())]
            );
            if let Some(p) = &e.peak {
                let _ = writeln!(s, "  peak {} = {:.6} at {}", p.column, p.value, coords(&p.at));
            }
            for r in &e.ratios {
                let _ = writeln!(s, "  R = {:.4} +- {:.4} at {}", r.ratio, r.stderr, coords(&r.at));
            }
        }
        for c in &self.checks {
            let _ = writeln!(s, "{}", c.line());
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }

    /// Write `summary.json` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::output(dir, e))?;
        for (name, body) in [("summary.json", self.to_json()), ("summary.txt", self.to_text())] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::output(&path, e))?;
        }
        Ok(())
    }
}
