//! Chain geometry, bath layout and the temperature-reversal convention.
//!
//! Bead indices are 0-based in the Rust API. Config files and CSV outputs use
//! 1-based bead labels so they read like the usual `T_1 .. T_N` notation.
//!
//! Spring `k[i]` connects bead `i - 1` to bead `i`; `k[0]` ties the first bead
//! to the left wall and `k[N]` ties the last bead to the right wall.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry and force field of an `N`-bead chain between two fixed walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub masses: Vec<f64>,
    /// `N + 1` interparticle force constants, walls included.
    pub springs: Vec<f64>,
    /// Onsite harmonic trap constants.
    pub pinning: Vec<f64>,
    /// Equilibrium bead spacing `a`.
    pub spacing: f64,
}

impl ChainSpec {
    /// Unit masses, no pinning, unit spacing.
    pub fn from_springs(springs: Vec<f64>) -> Self {
        let n = springs.len().saturating_sub(1);
        Self {
            n,
            masses: vec![1.0; n],
            springs,
            pinning: vec![0.0; n],
            spacing: 1.0,
        }
    }

    pub fn uniform(n: usize, k: f64) -> Self {
        Self::from_springs(vec![k; n + 1])
    }

    pub fn with_masses(mut self, masses: Vec<f64>) -> Self {
        self.masses = masses;
        self
    }

    pub fn with_pinning(mut self, pinning: Vec<f64>) -> Self {
        self.pinning = pinning;
        self
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        self
    }

    /// Diagonal of the stiffness matrix, `k_{i-1} + k_i + pin_i`.
    pub fn stiffness_diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.springs[i] + self.springs[i + 1] + self.pinning[i])
            .collect()
    }

    /// Largest local frequency scale `max_i sqrt((k_{i-1} + k_i + pin_i) / m_i)`.
    pub fn largest_frequency(&self) -> f64 {
        self.stiffness_diagonal()
            .iter()
            .zip(&self.masses)
            .map(|(d, m)| (d / m).sqrt())
            .fold(0.0, f64::max)
    }

    /// A chain with no wall springs and no pinning keeps a rigid translation
    /// mode, so its stiffness matrix is singular at zero frequency.
    pub fn is_free(&self) -> bool {
        self.springs[0] == 0.0
            && self.springs[self.n] == 0.0
            && self.pinning.iter().all(|&p| p == 0.0)
    }

    /// Mirror image of the chain (bead `i` becomes bead `N - 1 - i`).
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.masses.reverse();
        out.springs.reverse();
        out.pinning.reverse();
        out
    }

    fn check(&self, out: &mut Vec<Violation>) {
        if self.n == 0 {
            out.push(Violation::NoBeads);
            return;
        }
        let lengths = [
            ("masses", self.n, self.masses.len()),
            ("springs", self.n + 1, self.springs.len()),
            ("pinning", self.n, self.pinning.len()),
        ];
        let mut shapes_ok = true;
        for (field, expected, found) in lengths {
            if expected != found {
                out.push(Violation::LengthMismatch {
                    field,
                    expected,
                    found,
                });
                shapes_ok = false;
            }
        }
        for (i, &m) in self.masses.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                out.push(Violation::NonPositiveMass { bead: i, value: m });
            }
        }
        for (field, values) in [("springs", &self.springs), ("pinning", &self.pinning)] {
            for (i, &v) in values.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    out.push(Violation::NegativeConstant {
                        field,
                        index: i,
                        value: v,
                    });
                }
            }
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            out.push(Violation::NonPositiveSpacing(self.spacing));
        }
        if shapes_ok && out.is_empty() && !self.is_mechanically_stable() {
            out.push(Violation::Unstable);
        }
    }

    /// Positive definiteness of the stiffness matrix via its LDL^T pivots.
    /// A free chain is accepted when it is connected (one rigid mode only).
    fn is_mechanically_stable(&self) -> bool {
        if self.is_free() {
            return self.springs[1..self.n].iter().all(|&k| k > 0.0);
        }
        let diag = self.stiffness_diagonal();
        let scale = diag.iter().cloned().fold(0.0, f64::max);
        let mut pivot = diag[0];
        if pivot <= 1e-12 * scale {
            return false;
        }
        for i in 1..self.n {
            let k = self.springs[i];
            pivot = diag[i] - k * k / pivot;
            if pivot <= 1e-12 * scale {
                return false;
            }
        }
        true
    }
}

/// Per-bead Langevin couplings plus the hot/cold partition of thermostated beads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Friction `gamma_i`; zero marks an interior, unthermostated bead.
    pub frictions: Vec<f64>,
    /// Bath temperature per bead, meaningful only where `gamma_i > 0`.
    pub temperatures: Vec<f64>,
    pub hot: Vec<usize>,
    pub cold: Vec<usize>,
}

impl BathSpec {
    /// `n_hot` hot beads on the left edge and `n_cold` cold beads on the right
    /// edge, all with the same friction. Temperatures start at zero.
    pub fn edges(n: usize, n_hot: usize, n_cold: usize, gamma: f64) -> Self {
        let mut frictions = vec![0.0; n];
        let hot: Vec<usize> = (0..n_hot.min(n)).collect();
        let cold: Vec<usize> = (n.saturating_sub(n_cold)..n).collect();
        for &i in hot.iter().chain(&cold) {
            frictions[i] = gamma;
        }
        Self {
            frictions,
            temperatures: vec![0.0; n],
            hot,
            cold,
        }
    }

    /// Assign temperatures bead by bead to the thermostated beads in index order.
    pub fn with_bath_temperatures(mut self, temps: &[f64]) -> Self {
        let beads = self.thermostated();
        for (&bead, &t) in beads.iter().zip(temps) {
            self.temperatures[bead] = t;
        }
        self
    }

    pub fn with_temperatures(mut self, temps: Vec<f64>) -> Self {
        self.temperatures = temps;
        self
    }

    /// Thermostated beads (`gamma_i > 0`) in ascending order.
    pub fn thermostated(&self) -> Vec<usize> {
        (0..self.frictions.len())
            .filter(|&i| self.frictions[i] > 0.0)
            .collect()
    }

    /// Temperatures of the thermostated beads, in index order.
    pub fn bath_temperatures(&self) -> Vec<f64> {
        self.thermostated()
            .into_iter()
            .map(|i| self.temperatures[i])
            .collect()
    }

    /// All hot baths share one temperature and all cold baths share another.
    pub fn is_single_affinity(&self) -> bool {
        let uniform = |set: &[usize]| {
            set.windows(2)
                .all(|w| self.temperatures[w[0]] == self.temperatures[w[1]])
        };
        uniform(&self.hot) && uniform(&self.cold)
    }

    /// The mirror map `i -> N - 1 - i` sends the hot set onto the cold set.
    pub fn is_mirror_layout(&self) -> bool {
        let n = self.frictions.len();
        let mut mirrored: Vec<usize> = self.hot.iter().map(|&i| n - 1 - i).collect();
        let mut cold = self.cold.clone();
        mirrored.sort_unstable();
        cold.sort_unstable();
        mirrored == cold
    }

    fn check(&self, n: usize, out: &mut Vec<Violation>) {
        let lengths = [
            ("frictions", n, self.frictions.len()),
            ("temperatures", n, self.temperatures.len()),
        ];
        let mut shapes_ok = true;
        for (field, expected, found) in lengths {
            if expected != found {
                out.push(Violation::LengthMismatch {
                    field,
                    expected,
                    found,
                });
                shapes_ok = false;
            }
        }
        for (i, &g) in self.frictions.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                out.push(Violation::NegativeConstant {
                    field: "frictions",
                    index: i,
                    value: g,
                });
            }
        }
        for (i, &t) in self.temperatures.iter().enumerate() {
            if !(t.is_finite() && t >= 0.0) {
                out.push(Violation::NegativeTemperature { bead: i, value: t });
            }
        }
        if self.hot.is_empty() {
            out.push(Violation::EmptyHotSet);
        }
        if self.cold.is_empty() {
            out.push(Violation::EmptyColdSet);
        }
        if !shapes_ok {
            return;
        }
        let mut seen = vec![0u8; n];
        for (mark, set) in [(1u8, &self.hot), (2u8, &self.cold)] {
            for &i in set.iter() {
                if i >= n {
                    out.push(Violation::IndexOutOfRange { bead: i, n });
                    continue;
                }
                if seen[i] & mark != 0 {
                    out.push(Violation::Duplicate { bead: i });
                }
                if seen[i] != 0 && seen[i] != mark {
                    out.push(Violation::Overlap { bead: i });
                }
                seen[i] |= mark;
                if self.frictions[i] <= 0.0 {
                    out.push(Violation::NotThermostated { bead: i });
                }
            }
        }
        for i in 0..n {
            if self.frictions[i] > 0.0 && seen[i] == 0 {
                out.push(Violation::Unassigned { bead: i });
            }
        }
    }
}

/// A single invariant violation found by [`validate`]. Bead numbers are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoBeads,
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    NonPositiveMass {
        bead: usize,
        value: f64,
    },
    NegativeConstant {
        field: &'static str,
        index: usize,
        value: f64,
    },
    NonPositiveSpacing(f64),
    Unstable,
    NegativeTemperature {
        bead: usize,
        value: f64,
    },
    EmptyHotSet,
    EmptyColdSet,
    IndexOutOfRange {
        bead: usize,
        n: usize,
    },
    Duplicate {
        bead: usize,
    },
    Overlap {
        bead: usize,
    },
    NotThermostated {
        bead: usize,
    },
    Unassigned {
        bead: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBeads => write!(f, "chain has no beads"),
            Violation::LengthMismatch {
                field,
                expected,
                found,
            } => write!(f, "{field}: expected {expected} entries, found {found}"),
            Violation::NonPositiveMass { bead, value } => {
                write!(f, "mass of bead {} must be positive (got {value})", bead + 1)
            }
            Violation::NegativeConstant {
                field,
                index,
                value,
            } => write!(f, "{field}[{index}] must be finite and >= 0 (got {value})"),
            Violation::NonPositiveSpacing(a) => write!(f, "spacing must be positive (got {a})"),
            Violation::Unstable => write!(
                f,
                "stiffness matrix is not positive definite (mechanically unstable chain)"
            ),
            Violation::NegativeTemperature { bead, value } => write!(
                f,
                "temperature of bead {} must be finite and >= 0 (got {value})",
                bead + 1
            ),
            Violation::EmptyHotSet => write!(f, "hot set is empty"),
            Violation::EmptyColdSet => write!(f, "cold set is empty"),
            Violation::IndexOutOfRange { bead, n } => {
                write!(f, "bead {} is outside the chain of {n} beads", bead + 1)
            }
            Violation::Duplicate { bead } => write!(f, "bead {} listed twice", bead + 1),
            Violation::Overlap { bead } => {
                write!(f, "bead {} is in both the hot and cold sets", bead + 1)
            }
            Violation::NotThermostated { bead } => write!(
                f,
                "bead {} is in a bath set but has zero friction",
                bead + 1
            ),
            Violation::Unassigned { bead } => write!(
                f,
                "bead {} is thermostated but in neither the hot nor the cold set",
                bead + 1
            ),
        }
    }
}

/// Every violation found while validating a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid model ({} problems)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// A chain together with its baths, known to satisfy every invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    chain: ChainSpec,
    baths: BathSpec,
}

impl Model {
    pub fn new(chain: ChainSpec, baths: BathSpec) -> Result<Self, ValidationReport> {
        validate(chain, baths)
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn baths(&self) -> &BathSpec {
        &self.baths
    }

    pub fn n(&self) -> usize {
        self.chain.n
    }

    pub fn thermostated(&self) -> Vec<usize> {
        self.baths.thermostated()
    }

    pub fn into_parts(self) -> (ChainSpec, BathSpec) {
        (self.chain, self.baths)
    }

    /// Same structure, new temperature vector.
    pub fn with_temperatures(&self, temperatures: Vec<f64>) -> Result<Self, ValidationReport> {
        let baths = BathSpec {
            temperatures,
            ..self.baths.clone()
        };
        validate(self.chain.clone(), baths)
    }

    /// Same structure, new frictions (hot/cold sets are kept).
    pub fn with_frictions(&self, frictions: Vec<f64>) -> Result<Self, ValidationReport> {
        let baths = BathSpec {
            frictions,
            ..self.baths.clone()
        };
        validate(self.chain.clone(), baths)
    }

    /// The model with its temperature bias reversed.
    ///
    /// When the mirror map sends the hot set onto the cold set, the bead
    /// temperatures are mirrored (`T_i <-> T_{N+1-i}`). Otherwise a single
    /// affinity layout swaps the hot and cold temperatures. Any other layout
    /// has no well-defined reversal.
    pub fn reversed(&self) -> Result<Self> {
        let baths = if self.baths.is_mirror_layout() {
            reverse_temperatures(&self.baths)
        } else if self.baths.is_single_affinity() {
            swap_affinity(&self.baths)
        } else {
            return Err(Error::Layout(
                "temperature reversal needs a mirror-symmetric hot/cold layout \
                 or a single affinity"
                    .into(),
            ));
        };
        Ok(Self {
            chain: self.chain.clone(),
            baths,
        })
    }
}

/// Check every invariant of the chain and its baths, reporting all violations.
pub fn validate(chain: ChainSpec, baths: BathSpec) -> Result<Model, ValidationReport> {
    let mut violations = Vec::new();
    chain.check(&mut violations);
    if chain.n > 0 {
        baths.check(chain.n, &mut violations);
    }
    if violations.is_empty() {
        Ok(Model { chain, baths })
    } else {
        Err(ValidationReport { violations })
    }
}

/// Mirror the temperature profile, `T_i <-> T_{N+1-i}`. Frictions and the
/// hot/cold sets are untouched, so applying this twice restores the input.
pub fn reverse_temperatures(baths: &BathSpec) -> BathSpec {
    let mut out = baths.clone();
    out.temperatures.reverse();
    out
}

/// Exchange the hot and cold temperatures of a single-affinity layout.
/// Only the first bead of each set is consulted.
pub fn swap_affinity(baths: &BathSpec) -> BathSpec {
    let mut out = baths.clone();
    let (Some(&h), Some(&c)) = (baths.hot.first(), baths.cold.first()) else {
        return out;
    };
    let (t_hot, t_cold) = (baths.temperatures[h], baths.temperatures[c]);
    for &i in &baths.hot {
        out.temperatures[i] = t_cold;
    }
    for &i in &baths.cold {
        out.temperatures[i] = t_hot;
    }
    out
}

/// `n_b` equally spaced temperatures from `t_top` down to `t_bottom`
/// (endpoints included). A single bead sits at the midpoint.
pub fn linear_gradient_profile(t_top: f64, t_bottom: f64, n_b: usize) -> Result<Vec<f64>> {
    match n_b {
        0 => Err(Error::InvalidArgument(
            "a temperature profile needs at least one bead".into(),
        )),
        1 => Ok(vec![0.5 * (t_top + t_bottom)]),
        _ => {
            let step = (t_bottom - t_top) / (n_b - 1) as f64;
            let mut out: Vec<f64> = (0..n_b).map(|i| t_top + step * i as f64).collect();
            out[n_b - 1] = t_bottom;
            Ok(out)
        }
    }
}

/// Frictions that depend linearly on the temperature of the attached bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveFrictionSpec {
    pub base_frictions: Vec<f64>,
    /// Slope `lambda` of the friction-temperature relation.
    pub slope: f64,
}

impl EffectiveFrictionSpec {
    /// Friction of `bead` when its bath is the hot (`+`) or cold (`-`) one of
    /// a bias `t_hot - t_cold`: `gamma +- lambda (t_hot - t_cold)`.
    pub fn friction(&self, bead: usize, attached_is_hot: bool, t_hot: f64, t_cold: f64) -> f64 {
        let shift = self.slope * (t_hot - t_cold);
        if attached_is_hot {
            self.base_frictions[bead] + shift
        } else {
            self.base_frictions[bead] - shift
        }
    }
}
