//! Named experiments with pinned physical parameters, plus the free-form
//! `custom` run.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tgho_core::config::{Config, MdSection};
use tgho_core::md::{self, FkRectification, MdConfig, MdResult};
use tgho_core::output::format_float;
use tgho_core::quadrature::DEFAULT_POINTS;
use tgho_core::transport::{compute_m, currents, effective_diode, rectification, CurrentReport};
use tgho_core::{Model, QuadratureSpec, Regime};

use crate::error::{Error, Result};
use crate::models;
use crate::sweep::{grid_point, Axis, Provenance, SweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentName {
    #[serde(rename = "fig3_contour")]
    Fig3Contour,
    #[serde(rename = "fig4_M_elements")]
    Fig4MElements,
    #[serde(rename = "fig5_gradient_map")]
    Fig5GradientMap,
    #[serde(rename = "fig6_quantum_diagonal")]
    Fig6QuantumDiagonal,
    #[serde(rename = "lengthdep_NB")]
    LengthdepNb,
    #[serde(rename = "lengthdep_NI")]
    LengthdepNi,
    #[serde(rename = "fig7_fk_sweep")]
    Fig7FkSweep,
    #[serde(rename = "custom")]
    Custom,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 8] = [
        ExperimentName::Fig3Contour,
        ExperimentName::Fig4MElements,
        ExperimentName::Fig5GradientMap,
        ExperimentName::Fig6QuantumDiagonal,
        ExperimentName::LengthdepNb,
        ExperimentName::LengthdepNi,
        ExperimentName::Fig7FkSweep,
        ExperimentName::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Fig3Contour => "fig3_contour",
            ExperimentName::Fig4MElements => "fig4_M_elements",
            ExperimentName::Fig5GradientMap => "fig5_gradient_map",
            ExperimentName::Fig6QuantumDiagonal => "fig6_quantum_diagonal",
            ExperimentName::LengthdepNb => "lengthdep_NB",
            ExperimentName::LengthdepNi => "lengthdep_NI",
            ExperimentName::Fig7FkSweep => "fig7_fk_sweep",
            ExperimentName::Custom => "custom",
        }
    }

    /// Regimes the experiment accepts; the first is the default.
    fn regimes(self) -> &'static [Regime] {
        use Regime::*;
        match self {
            ExperimentName::Fig4MElements | ExperimentName::Fig7FkSweep => &[Classical],
            ExperimentName::Fig6QuantumDiagonal => &[Quantum],
            _ => &[Classical, Quantum],
        }
    }

    /// Sweep axes the experiment exposes.
    fn axes(self) -> &'static [&'static str] {
        match self {
            ExperimentName::Fig3Contour | ExperimentName::Fig4MElements => &["k_left", "k_right"],
            ExperimentName::Fig5GradientMap => &["delta_t_hot", "delta_t_cold"],
            ExperimentName::Fig6QuantumDiagonal => &["delta_t"],
            ExperimentName::LengthdepNb => &["n_b"],
            ExperimentName::LengthdepNi => &["n_i"],
            ExperimentName::Fig7FkSweep => &["v_left"],
            ExperimentName::Custom => &[],
        }
    }

    fn is_md(self) -> bool {
        self == ExperimentName::Fig7FkSweep
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|n| n.as_str()).collect();
                Error::InvalidOverride(format!(
                    "unknown experiment `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// `steps` equally spaced values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub const fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        let mut v: Vec<f64> = (0..self.steps).map(|i| self.min + h * i as f64).collect();
        v[self.steps - 1] = self.max;
        v
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.steps == 0 || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidOverride(format!(
                "{name}: needs finite bounds and at least one step"
            )));
        }
        Ok(())
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntRange {
    pub min: usize,
    pub max: usize,
}

impl IntRange {
    pub fn values(&self) -> Vec<f64> {
        (self.min..=self.max).map(|v| v as f64).collect()
    }
}

/// Default axes and fixed parameters of the named experiments.
pub mod defaults {
    use super::{Grid, IntRange};

    pub const K_RANGE: Grid = Grid::new(0.1, 2.0, 20);
    pub const DELTA_T: Grid = Grid::new(0.0, 10.0, 21);
    pub const N_B: IntRange = IntRange { min: 2, max: 10 };
    pub const N_I: IntRange = IntRange { min: 1, max: 40 };
    pub const V_LEFT: Grid = Grid::new(0.0, 2.0, 5);
    /// Interior length of the `N_B` sweep and zone size of the `N_I` sweep.
    pub const LENGTHDEP_N_I: usize = 1;
    pub const LENGTHDEP_N_B: usize = 2;
    /// Chain spacing, and hence FK period, of the FK sweep.
    pub const FK_PERIOD: f64 = 12.0;
}

/// Optional changes to a named experiment. Only the swept axes, numerical
/// resolution and MD settings can be changed; anything else needs `custom`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_left: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_right: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t_hot: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t_cold: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_b: Option<IntRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_i: Option<IntRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_left: Option<Grid>,
    /// Trapezoid nodes of every spectral integral.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// FK period (and chain spacing) of the FK sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub md: Option<MdSection>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::Core(tgho_core::Error::Config(e.to_string())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Core(tgho_core::Error::Config(format!("{}: {e}", path.display())))
        })?;
        Self::from_toml(&text)
    }

    fn given_axes(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("k_left", self.k_left.is_some()),
            ("k_right", self.k_right.is_some()),
            ("delta_t_hot", self.delta_t_hot.is_some()),
            ("delta_t_cold", self.delta_t_cold.is_some()),
            ("delta_t", self.delta_t.is_some()),
            ("n_b", self.n_b.is_some()),
            ("n_i", self.n_i.is_some()),
            ("v_left", self.v_left.is_some()),
        ];
        for (name, given) in flags {
            if given {
                out.push(name);
            }
        }
        out
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub regime: Option<Regime>,
    pub overrides: Overrides,
    pub seed: Option<u64>,
    /// Full model description, required by `custom` only.
    pub custom: Option<Config>,
}

impl ExperimentSpec {
    pub fn named(name: ExperimentName) -> Self {
        Self {
            name,
            regime: None,
            overrides: Overrides::default(),
            seed: None,
            custom: None,
        }
    }

    pub fn custom(config: Config) -> Self {
        Self {
            custom: Some(config),
            ..Self::named(ExperimentName::Custom)
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = Some(regime);
        self
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Check the overrides against the experiment and fill in defaults.
    pub fn resolve(&self) -> Result<Resolved> {
        let name = self.name;
        let o = &self.overrides;
        let allowed = name.axes();
        if let Some(bad) = o.given_axes().into_iter().find(|a| !allowed.contains(a)) {
            return Err(Error::InvalidOverride(format!(
                "{name} does not sweep `{bad}` (axes: {})",
                if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
            )));
        }
        if o.period.is_some() && !name.is_md() {
            return Err(Error::InvalidOverride(format!("{name} has no FK period")));
        }
        if o.md.is_some() && !name.is_md() {
            return Err(Error::InvalidOverride(format!(
                "{name} is a spectral calculation; MD settings apply to fig7_fk_sweep or custom"
            )));
        }
        if o.points.is_some() && (name.is_md() || name == ExperimentName::Custom) {
            return Err(Error::InvalidOverride(format!(
                "{name}: set the quadrature in the model config instead of `points`"
            )));
        }
        let regime = match self.regime {
            None => name.regimes()[0],
            Some(r) if name.regimes().contains(&r) => r,
            Some(r) => {
                return Err(Error::InvalidOverride(format!("{name} does not support the {r} regime")))
            }
        };
        if name == ExperimentName::Custom && self.custom.is_none() {
            return Err(Error::InvalidOverride("custom needs a full model config".into()));
        }
        if name != ExperimentName::Custom && self.custom.is_some() {
            return Err(Error::InvalidOverride(format!(
                "{name} has pinned parameters; use `custom` for a full model"
            )));
        }
        let grid = |g: Option<Grid>, d: Grid, axis: &str| -> Result<Axis> {
            let g = g.unwrap_or(d);
            g.check(axis)?;
            Ok(Axis::new(axis, g.values()))
        };
        let axes = match name {
            ExperimentName::Fig3Contour | ExperimentName::Fig4MElements => vec![
                grid(o.k_left, defaults::K_RANGE, "k_left")?,
                grid(o.k_right, defaults::K_RANGE, "k_right")?,
            ],
            ExperimentName::Fig5GradientMap => vec![
                grid(o.delta_t_hot, defaults::DELTA_T, "delta_t_hot")?,
                grid(o.delta_t_cold, defaults::DELTA_T, "delta_t_cold")?,
            ],
            ExperimentName::Fig6QuantumDiagonal => vec![grid(o.delta_t, defaults::DELTA_T, "delta_t")?],
            ExperimentName::LengthdepNb => {
                let r = o.n_b.unwrap_or(defaults::N_B);
                if r.min < 1 || r.min > r.max {
                    return Err(Error::InvalidOverride("n_b: need 1 <= min <= max".into()));
                }
                vec![Axis::new("n_b", r.values())]
            }
            ExperimentName::LengthdepNi => {
                let r = o.n_i.unwrap_or(defaults::N_I);
                if r.min > r.max {
                    return Err(Error::InvalidOverride("n_i: need min <= max".into()));
                }
                vec![Axis::new("n_i", r.values())]
            }
            ExperimentName::Fig7FkSweep => vec![grid(o.v_left, defaults::V_LEFT, "v_left")?],
            ExperimentName::Custom => vec![],
        };
        let points = o.points.unwrap_or(DEFAULT_POINTS);
        if points < 3 {
            return Err(Error::InvalidOverride("points must be at least 3".into()));
        }
        let period = match name {
            ExperimentName::Fig7FkSweep => {
                let p = o.period.unwrap_or(defaults::FK_PERIOD);
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::InvalidOverride("period must be positive".into()));
                }
                Some(p)
            }
            _ => None,
        };
        let md = match (name, &self.custom) {
            (ExperimentName::Fig7FkSweep, _) => {
                let cfg = md_from_section(o.md.clone().unwrap_or_default(), self.seed)?;
                cfg.check(5).map_err(Error::Core)?;
                Some(cfg)
            }
            (ExperimentName::Custom, Some(c)) if c.md.is_some() || c.fk.is_some() => {
                let n = c.chain_spec()?.n;
                let mut cfg = c.md_config(n)?;
                if let Some(s) = self.seed {
                    cfg.base_seed = s;
                }
                Some(cfg)
            }
            _ => None,
        };
        Ok(Resolved {
            experiment: name,
            regime,
            axes,
            points: (!name.is_md() && name != ExperimentName::Custom).then_some(points),
            period,
            md,
            custom: self.custom.clone(),
        })
    }
}

fn md_from_section(s: MdSection, seed: Option<u64>) -> Result<MdConfig> {
    let d = MdConfig::default();
    let measure_bond = match s.measure_bond {
        Some(0) => return Err(Error::InvalidOverride("md.measure_bond: bead labels start at 1".into())),
        Some(b) => Some(b - 1),
        None => None,
    };
    Ok(MdConfig {
        dt: s.dt.unwrap_or(d.dt),
        equilibration_steps: s.equilibration_steps.unwrap_or(d.equilibration_steps),
        production_steps: s.production_steps.unwrap_or(d.production_steps),
        realizations: s.realizations.unwrap_or(d.realizations),
        base_seed: seed.or(s.base_seed).unwrap_or(d.base_seed),
        measure_bond,
        windows: s.windows.unwrap_or(d.windows),
        dump_every: s.dump_every,
    })
}

/// Fully specified experiment; its JSON form is what the config hash covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: ExperimentName,
    pub regime: Regime,
    pub axes: Vec<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub md: Option<MdConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<Config>,
}

impl Resolved {
    pub fn provenance(&self) -> Provenance {
        Provenance::new(self, self.md.as_ref().map(|m| m.base_seed))
    }
}

/// A result plus any auxiliary CSV files, as `(file name, contents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: SweepResult,
    pub extra_files: Vec<(String, String)>,
}

impl Outcome {
    /// Write `<experiment>.csv` and the auxiliary files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::output(dir, e))?;
        let main = dir.join(format!("{}.csv", self.result.experiment));
        let mut buf = Vec::new();
        self.result.write_csv(&mut buf).expect("writing to memory");
        std::fs::write(&main, buf).map_err(|e| Error::output(&main, e))?;
        let mut written = vec![main];
        for (name, body) in &self.extra_files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::output(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub const RECTIFICATION_COLUMNS: [&str; 7] =
    ["J", "J_rev", "delta_J", "R", "R_sym", "quad_rel_error", "conservation"];

fn rectification_row(report: &CurrentReport) -> Vec<f64> {
    let ratio = report.ratio.expect("two-direction report");
    vec![
        report.total_forward(),
        report.total_reverse().unwrap_or(f64::NAN),
        report.delta.unwrap_or(f64::NAN),
        ratio.value(),
        ratio.symmetric(),
        report.relative_error(),
        report.conservation_residual(),
    ]
}

fn quad(model: &Model, points: usize) -> QuadratureSpec {
    QuadratureSpec::with_points(model.chain(), points)
}

/// Evaluate `f` on every grid point in parallel, keeping grid order.
fn sweep<F>(axes: &[Axis], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    (0..SweepResult::grid_len(axes))
        .into_par_iter()
        .map(|i| f(&grid_point(axes, i)))
        .collect()
}

pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    let resolved = spec.resolve()?;
    run_resolved(&resolved)
}

pub fn run_resolved(r: &Resolved) -> Result<Outcome> {
    let points = r.points.unwrap_or(DEFAULT_POINTS);
    let regime = r.regime;
    let rect = |model: Model| -> Result<Vec<f64>> {
        Ok(rectification_row(&rectification(&model, &quad(&model, points), regime)?))
    };
    let mut extra_files = Vec::new();
    let (columns, rows): (Vec<&str>, Vec<Vec<f64>>) = match r.experiment {
        ExperimentName::Fig3Contour => (
            RECTIFICATION_COLUMNS.to_vec(),
            sweep(&r.axes, |p| rect(models::fig3(p[0], p[1])))?,
        ),
        ExperimentName::Fig4MElements => (
            vec!["M_14", "M_25", "M_15", "M_24", "M_14_minus_M_25"],
            sweep(&r.axes, |p| {
                let model = models::fig3(p[0], p[1]);
                let m = compute_m(&model, &quad(&model, points))?;
                let (m14, m25) = (m.get(0, 3), m.get(1, 4));
                Ok(vec![m14, m25, m.get(0, 4), m.get(1, 3), m14 - m25])
            })?,
        ),
        ExperimentName::Fig5GradientMap => (
            RECTIFICATION_COLUMNS.to_vec(),
            sweep(&r.axes, |p| rect(models::fig5(p[0], p[1])))?,
        ),
        ExperimentName::Fig6QuantumDiagonal => (
            vec![
                "J_q",
                "J_q_rev",
                "delta_J_q",
                "R_q",
                "R_q_sym",
                "quad_rel_error",
                "J_c",
                "delta_J_c",
                "rel_delta_J_c",
                "conservation",
            ],
            sweep(&r.axes, |p| {
                let model = models::fig5(p[0], p[0]);
                let q = quad(&model, points);
                let qu = rectification(&model, &q, Regime::Quantum)?;
                let cl = rectification(&model, &q, Regime::Classical)?;
                let mut row = rectification_row(&qu);
                row.pop();
                let dc = cl.delta.expect("two-direction report");
                row.extend([
                    cl.total_forward(),
                    dc,
                    dc.abs() / cl.total_forward().abs(),
                    qu.conservation_residual().max(cl.conservation_residual()),
                ]);
                Ok(row)
            })?,
        ),
        ExperimentName::LengthdepNb => (
            RECTIFICATION_COLUMNS.to_vec(),
            sweep(&r.axes, |p| rect(models::lengthdep(p[0] as usize, defaults::LENGTHDEP_N_I)?))?,
        ),
        ExperimentName::LengthdepNi => (
            RECTIFICATION_COLUMNS.to_vec(),
            sweep(&r.axes, |p| rect(models::lengthdep(defaults::LENGTHDEP_N_B, p[0] as usize)?))?,
        ),
        ExperimentName::Fig7FkSweep => {
            let md = r.md.as_ref().expect("resolved MD settings");
            let period = r.period.expect("resolved period");
            let chain = models::fig7_chain(period);
            let mut rows = Vec::new();
            let mut runs = Vec::new();
            for &v_left in &r.axes[0].values {
                let fk = models::fig7_potential(v_left, period);
                let out = models::fig7_run(&chain, &fk, md)?;
                rows.push(fk_row(&out));
                runs.push((v_left, out));
            }
            let prov = r.provenance();
            extra_files.push((
                "fig7_fk_sweep_realizations.csv".into(),
                realizations_csv(&runs, &prov),
            ));
            extra_files.push(("fig7_fk_sweep_windows.csv".into(), windows_csv(&runs, &prov)));
            if md.dump_every.is_some() {
                extra_files.push((
                    "fig7_fk_sweep_trajectory.csv".into(),
                    trajectory_csv(&runs, &prov),
                ));
            }
            (FK_COLUMNS.to_vec(), rows)
        }
        ExperimentName::Custom => return run_custom(r),
    };
    Ok(Outcome {
        result: SweepResult {
            experiment: r.experiment.to_string(),
            regime: Some(r.regime),
            axes: r.axes.clone(),
            columns: columns.into_iter().map(String::from).collect(),
            rows,
            provenance: r.provenance(),
        },
        extra_files,
    })
}

pub const FK_COLUMNS: [&str; 7] = ["J", "J_err", "J_rev", "J_rev_err", "R", "R_err", "R_sym"];

fn fk_row(out: &FkRectification) -> Vec<f64> {
    let r = out.ratio;
    vec![
        out.forward.mean_current,
        out.forward.stderr,
        out.reverse.mean_current,
        out.reverse.stderr,
        r,
        out.ratio_stderr,
        r.max(1.0 / r),
    ]
}

fn with_comment(mut body: String, prov: &Provenance) -> String {
    body.push_str(&prov.comment());
    body.push('\n');
    body
}

fn directions(out: &FkRectification) -> [(&'static str, &MdResult); 2] {
    [("forward", &out.forward), ("reverse", &out.reverse)]
}

fn realizations_csv(runs: &[(f64, FkRectification)], prov: &Provenance) -> String {
    let mut s = String::from("v_left,direction,realization,stream,current\n");
    for (v, out) in runs {
        for (dir, res) in directions(out) {
            for (i, (j, stream)) in res.per_realization.iter().zip(&res.meta.streams).enumerate() {
                s += &format!("{},{dir},{i},{stream},{}\n", format_float(*v), format_float(*j));
            }
        }
    }
    with_comment(s, prov)
}

fn windows_csv(runs: &[(f64, FkRectification)], prov: &Provenance) -> String {
    let mut s = String::from("v_left,direction,window,mean_current\n");
    for (v, out) in runs {
        for (dir, res) in directions(out) {
            for (w, m) in res.window_means.iter().enumerate() {
                s += &format!("{},{dir},{w},{}\n", format_float(*v), format_float(*m));
            }
        }
    }
    with_comment(s, prov)
}

fn trajectory_rows(s: &mut String, prefix: &str, res: &MdResult) {
    for f in &res.trajectory {
        for (b, (u, v)) in f.positions.iter().zip(&f.velocities).enumerate() {
            *s += &format!("{prefix}{},{},{},{}\n", f.step, b + 1, format_float(*u), format_float(*v));
        }
    }
}

fn trajectory_csv(runs: &[(f64, FkRectification)], prov: &Provenance) -> String {
    let mut s = String::from("v_left,direction,step,bead,position,velocity\n");
    for (v, out) in runs {
        for (dir, res) in directions(out) {
            trajectory_rows(&mut s, &format!("{},{dir},", format_float(*v)), res);
        }
    }
    with_comment(s, prov)
}

fn run_custom(r: &Resolved) -> Result<Outcome> {
    let cfg = r.custom.as_ref().expect("custom config");
    let model = cfg.model()?;
    let q = cfg.quadrature_spec(model.chain())?;
    let prov = r.provenance();
    let mut extra_files = Vec::new();

    let m = compute_m(&model, &q)?;
    let mut buf = Vec::new();
    m.write_csv(&mut buf).expect("writing to memory");
    extra_files.push(("custom_M.csv".into(), with_comment(String::from_utf8(buf).unwrap(), &prov)));

    // Layouts without a defined reversal still get forward currents.
    let report = match rectification(&model, &q, r.regime) {
        Err(tgho_core::Error::Layout(_)) => currents(&model, &q, r.regime)?,
        other => other?,
    };
    let mut buf = Vec::new();
    report.write_csv(&mut buf).expect("writing to memory");
    extra_files.push((
        "custom_currents.csv".into(),
        with_comment(String::from_utf8(buf).unwrap(), &prov),
    ));

    let mut columns: Vec<String> = RECTIFICATION_COLUMNS.iter().map(|c| c.to_string()).collect();
    let mut row = match report.ratio {
        Some(_) => rectification_row(&report),
        None => vec![
            report.total_forward(),
            f64::NAN,
            f64::NAN,
            f64::NAN,
            f64::NAN,
            report.relative_error(),
            report.conservation_residual(),
        ],
    };

    if let Some(eff) = cfg.effective_spec(model.baths()) {
        let b = model.baths();
        let t_hot = b.temperatures[b.hot[0]];
        let t_cold = b.temperatures[b.cold[0]];
        let e = effective_diode(model.chain(), &eff, t_hot, t_cold, &q, r.regime)?;
        columns.extend(["eff_J", "eff_J_rev", "eff_delta_J"].map(String::from));
        row.extend([
            e.total_forward(),
            e.total_reverse().unwrap_or(f64::NAN),
            e.delta.unwrap_or(f64::NAN),
        ]);
    }

    if let Some(mdc) = &r.md {
        let fk = cfg.fk_spec(model.chain())?;
        let res = md::run(&model, fk.as_ref(), mdc)?;
        columns.extend(["J_md", "J_md_err"].map(String::from));
        row.extend([res.mean_current, res.stderr]);
        let mut s = format!(
            "realization,stream,current_bond_{}_{}\n",
            res.bond + 1,
            res.bond + 2
        );
        for (i, (j, stream)) in res.per_realization.iter().zip(&res.meta.streams).enumerate() {
            s += &format!("{i},{stream},{}\n", format_float(*j));
        }
        extra_files.push(("custom_md_realizations.csv".into(), with_comment(s, &prov)));
        let mut s = String::from("bond_left,bond_right,current,stderr\n");
        for (b, e) in res.bond_currents.iter().enumerate() {
            s += &format!("{},{},{},{}\n", b + 1, b + 2, format_float(e.mean), format_float(e.stderr));
        }
        extra_files.push(("custom_md_bonds.csv".into(), with_comment(s, &prov)));
        if mdc.dump_every.is_some() {
            let mut s = String::from("step,bead,position,velocity\n");
            trajectory_rows(&mut s, "", &res);
            extra_files.push(("custom_md_trajectory.csv".into(), with_comment(s, &prov)));
        }
    }

    Ok(Outcome {
        result: SweepResult {
            experiment: ExperimentName::Custom.to_string(),
            regime: Some(r.regime),
            axes: vec![],
            columns,
            rows: vec![row],
            provenance: prov,
        },
        extra_files,
    })
}

/// Green's-function elements between thermostated beads on `frequencies`
/// equally spaced points of the configured spectral window, as CSV with
/// 1-based bead labels. Free chains skip `omega = 0`, where `G` is singular.
pub fn dump_green(cfg: &Config, frequencies: usize) -> Result<String> {
    if frequencies < 2 {
        return Err(Error::InvalidOverride("dump-green needs at least 2 frequencies".into()));
    }
    let model = cfg.model()?;
    let q = cfg.quadrature_spec(model.chain())?;
    #[derive(Serialize)]
    struct Dump<'a> {
        dump_green: &'a Config,
        frequencies: usize,
    }
    let prov = Provenance::new(&Dump { dump_green: cfg, frequencies }, None);
    let first = usize::from(model.chain().is_free());
    let mut s = String::from("omega,l,m,re,im\n");
    for i in first..frequencies {
        let omega = q.omega_max * i as f64 / (frequencies - 1) as f64;
        let g = tgho_core::greens::green_elements(&model, omega)?;
        for (l, m, v) in g.values {
            s += &format!(
                "{},{},{},{},{}\n",
                format_float(omega),
                l + 1,
                m + 1,
                format_float(v.re),
                format_float(v.im)
            );
        }
    }
    Ok(with_comment(s, &prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ExperimentName::ALL {
            assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
        }
        assert!("fig8".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn grid_values_hit_endpoints() {
        let v = Grid::new(0.1, 2.0, 20).values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[19], 2.0);
        assert_eq!(Grid::new(3.0, 5.0, 1).values(), vec![3.0]);
    }

    #[test]
    fn foreign_axis_is_rejected() {
        let o = Overrides {
            delta_t: Some(Grid::new(0.0, 1.0, 3)),
            ..Overrides::default()
        };
        let spec = ExperimentSpec::named(ExperimentName::Fig3Contour).with_overrides(o);
        assert!(matches!(spec.resolve(), Err(Error::InvalidOverride(_))));
    }

    #[test]
    fn unsupported_regime_is_rejected() {
        let spec = ExperimentSpec::named(ExperimentName::Fig6QuantumDiagonal).with_regime(Regime::Classical);
        assert!(matches!(spec.resolve(), Err(Error::InvalidOverride(_))));
        let spec = ExperimentSpec::named(ExperimentName::Fig7FkSweep).with_regime(Regime::Quantum);
        assert!(matches!(spec.resolve(), Err(Error::InvalidOverride(_))));
    }

    #[test]
    fn custom_needs_a_model() {
        let spec = ExperimentSpec::named(ExperimentName::Custom);
        assert!(matches!(spec.resolve(), Err(Error::InvalidOverride(_))));
    }

    #[test]
    fn unknown_override_keys_fail_to_parse() {
        assert!(Overrides::from_toml("points = 100\n").is_ok());
        assert!(Overrides::from_toml("pionts = 100\n").is_err());
        assert!(Overrides::from_toml("[k_left]\nmin = 0.1\nmax = 1\nsteps = 2\nstep = 3\n").is_err());
    }

    #[test]
    fn seed_reaches_md_and_hash() {
        let a = ExperimentSpec::named(ExperimentName::Fig7FkSweep).with_seed(5).resolve().unwrap();
        let b = ExperimentSpec::named(ExperimentName::Fig7FkSweep).with_seed(6).resolve().unwrap();
        assert_eq!(a.md.as_ref().unwrap().base_seed, 5);
        assert_ne!(a.provenance().config_hash, b.provenance().config_hash);
        assert_eq!(a.provenance().seed, Some(5));
    }

    #[test]
    fn defaults_resolve_for_every_named_experiment() {
        for n in ExperimentName::ALL.into_iter().filter(|&n| n != ExperimentName::Custom) {
            let r = ExperimentSpec::named(n).resolve().unwrap();
            assert!(!r.axes.is_empty(), "{n}");
        }
    }
}
