//! Landauer-type heat currents between Langevin baths.
//!
//! For thermostated beads `l != m` the bath-to-bath transmission is
//!
//! ```text
//! M_lm = (gamma_l gamma_m / pi) Int_{-inf}^{inf} dw w^2 |G_lm(w)|^2
//! ```
//!
//! and the classical current out of bath `l` is `J_l = sum_m M_lm (T_l - T_m)`.
//! The quantum current replaces `T` by the mean oscillator energy
//! `w n(w, T)` inside the integral, with `n` the Bose function.
//! Integrands are even in `w`, so every integral is twice its half-line value.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::GreenSolver;
use crate::model::{BathSpec, ChainSpec, EffectiveFrictionSpec, Model};
use crate::output::format_float;
use crate::quadrature::{integrate_with, Integral, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Classical,
    Quantum,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Classical => "classical",
            Regime::Quantum => "quantum",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Regime::Classical),
            "quantum" => Ok(Regime::Quantum),
            other => Err(Error::InvalidArgument(format!("unknown regime `{other}`"))),
        }
    }
}

/// Bose-Einstein occupation `1 / (exp(w/T) - 1)`; zero at `T = 0` and for
/// `w / T > 700`.
pub fn bose(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = omega / temperature;
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Mean thermal energy `w n(w, T)` of a mode, with its `w -> 0` limit `T`.
/// Replacing it by `T` gives the classical current.
pub fn mode_energy(omega: f64, temperature: f64) -> f64 {
    if omega == 0.0 {
        temperature
    } else {
        omega * bose(omega, temperature)
    }
}

/// Thermostated pairs `l < m` with the solver slot of column `m`.
fn bath_pairs(beads: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (slot, &m) in beads.iter().enumerate() {
        for &l in beads.iter().take_while(|&&l| l < m) {
            out.push((l, m, slot));
        }
    }
    out
}

/// Integrate `w^2 |G_lm|^2` over every thermostated pair (`regime = None`),
/// or `w^2 |G_lm|^2 (E_l - E_m)` per temperature vector, where `E` is the
/// classical or quantum mode energy of each bath.
fn pair_integrals(
    model: &Model,
    quad: &QuadratureSpec,
    temperatures: &[Vec<f64>],
    regime: Option<Regime>,
) -> Result<(Vec<(usize, usize, usize)>, Integral)> {
    quad.check(model.chain())?;
    let beads = model.thermostated();
    let pairs = bath_pairs(&beads);
    let n_pairs = pairs.len();
    let n_out = n_pairs * temperatures.len().max(1);
    let origin_regular = !model.chain().is_free();
    let integral = integrate_with(
        quad,
        origin_regular,
        n_out,
        || (GreenSolver::new(model, beads.clone()), vec![0.0; model.n()]),
        |(solver, energy), omega, out| {
            solver.solve(omega)?;
            let w2 = omega * omega;
            match regime {
                None => {
                    for (p, &(l, _, slot)) in pairs.iter().enumerate() {
                        out[p] = w2 * solver.element(l, slot).norm_sqr();
                    }
                }
                Some(regime) => {
                    for (d, temps) in temperatures.iter().enumerate() {
                        for &b in &beads {
                            energy[b] = match regime {
                                Regime::Classical => temps[b],
                                Regime::Quantum => mode_energy(omega, temps[b]),
                            };
                        }
                        for (p, &(l, m, slot)) in pairs.iter().enumerate() {
                            let s = w2 * solver.element(l, slot).norm_sqr();
                            out[d * n_pairs + p] = s * (energy[l] - energy[m]);
                        }
                    }
                }
            }
            Ok(())
        },
    )?;
    Ok((pairs, integral))
}

fn prefactor(baths: &BathSpec, l: usize, m: usize) -> f64 {
    2.0 * baths.frictions[l] * baths.frictions[m] / PI
}

/// Symmetric matrix of bath-to-bath transmission coefficients `M_lm`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    n: usize,
    beads: Vec<usize>,
    values: Vec<f64>,
    errors: Vec<f64>,
    quad: QuadratureSpec,
}

impl TransmissionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beads(&self) -> &[usize] {
        &self.beads
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// `M_lm` (0-based); zero on the diagonal and for unthermostated beads.
    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.values[l * self.n + m]
    }

    /// Richardson (or Gauss-Kronrod) error estimate of `M_lm`.
    pub fn error(&self, l: usize, m: usize) -> f64 {
        self.errors[l * self.n + m]
    }

    /// `(l, m, M_lm)` for every ordered thermostated pair `l != m`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.beads.iter().flat_map(move |&l| {
            self.beads
                .iter()
                .filter(move |&&m| m != l)
                .map(move |&m| (l, m, self.get(l, m)))
        })
    }

    /// CSV dump with 1-based bead labels: `l,m,M_lm,error`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "l,m,M_lm,error")?;
        for (l, m, v) in self.entries() {
            writeln!(
                out,
                "{},{},{},{}",
                l + 1,
                m + 1,
                format_float(v),
                format_float(self.error(l, m))
            )?;
        }
        Ok(())
    }
}

/// `M_lm` for all thermostated pairs of the model.
pub fn compute_m(model: &Model, quad: &QuadratureSpec) -> Result<TransmissionMatrix> {
    let (pairs, integral) = pair_integrals(model, quad, &[], None)?;
    let n = model.n();
    let mut values = vec![0.0; n * n];
    let mut errors = vec![0.0; n * n];
    for (p, &(l, m, _)) in pairs.iter().enumerate() {
        let c = prefactor(model.baths(), l, m);
        let (v, e) = (c * integral.values[p], c * integral.errors[p]);
        values[l * n + m] = v;
        values[m * n + l] = v;
        errors[l * n + m] = e;
        errors[m * n + l] = e;
    }
    Ok(TransmissionMatrix {
        n,
        beads: model.thermostated(),
        values,
        errors,
        quad: quad.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathCurrent {
    pub bead: usize,
    /// Energy per unit time flowing from the bath into its bead.
    pub current: f64,
    pub error: f64,
}

/// Currents for one temperature configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Currents {
    pub per_bath: Vec<BathCurrent>,
    /// Total input power of the hot set.
    pub total: f64,
    /// Sum over the cold set; equals `-total` in a steady state.
    pub cold_total: f64,
    /// Quadrature error estimate of `total`.
    pub error: f64,
}

impl Currents {
    fn from_per_bath(per_bath: Vec<BathCurrent>, baths: &BathSpec) -> Self {
        let sum = |set: &[usize]| -> (f64, f64) {
            per_bath
                .iter()
                .filter(|c| set.contains(&c.bead))
                .fold((0.0, 0.0), |(j, e), c| (j + c.current, e + c.error))
        };
        let (total, error) = sum(&baths.hot);
        let (cold_total, _) = sum(&baths.cold);
        Self {
            per_bath,
            total,
            cold_total,
            error,
        }
    }

    pub fn get(&self, bead: usize) -> Option<f64> {
        self.per_bath
            .iter()
            .find(|c| c.bead == bead)
            .map(|c| c.current)
    }

    /// `|sum_l J_l| / sum_l |J_l|` over all baths (0 when nothing flows).
    pub fn conservation_residual(&self) -> f64 {
        let net: f64 = self.per_bath.iter().map(|c| c.current).sum();
        let scale: f64 = self.per_bath.iter().map(|c| c.current.abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            net.abs() / scale
        }
    }
}

/// Rectification ratio `|J / J~|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Ratio {
    Finite(f64),
    /// The reverse current vanishes while the forward one does not.
    Unbounded,
    /// Neither direction carries current.
    Undefined,
}

impl Ratio {
    /// Relative floor below which a current counts as zero.
    pub const FLOOR: f64 = 1e-13;

    pub fn new(forward: f64, reverse: f64) -> Self {
        let scale = forward.abs().max(reverse.abs());
        if scale <= f64::MIN_POSITIVE {
            Ratio::Undefined
        } else if reverse.abs() <= Self::FLOOR * scale {
            Ratio::Unbounded
        } else {
            Ratio::Finite((forward / reverse).abs())
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Ratio::Finite(r) => r,
            Ratio::Unbounded => f64::INFINITY,
            Ratio::Undefined => f64::NAN,
        }
    }

    /// `max(R, 1/R)`, independent of which direction carries more heat.
    pub fn symmetric(self) -> f64 {
        match self {
            Ratio::Finite(r) if r > 0.0 => r.max(1.0 / r),
            Ratio::Finite(_) | Ratio::Unbounded => f64::INFINITY,
            Ratio::Undefined => f64::NAN,
        }
    }
}

/// Per-bath and total currents, with the reverse direction once computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentReport {
    pub regime: Regime,
    pub forward: Currents,
    pub reverse: Option<Currents>,
    /// `J + J~`.
    pub delta: Option<f64>,
    pub ratio: Option<Ratio>,
}

impl CurrentReport {
    fn forward_only(regime: Regime, forward: Currents) -> Self {
        Self {
            regime,
            forward,
            reverse: None,
            delta: None,
            ratio: None,
        }
    }

    fn with_reverse(regime: Regime, forward: Currents, reverse: Currents) -> Self {
        let delta = forward.total + reverse.total;
        let ratio = Ratio::new(forward.total, reverse.total);
        Self {
            regime,
            forward,
            reverse: Some(reverse),
            delta: Some(delta),
            ratio: Some(ratio),
        }
    }

    pub fn total_forward(&self) -> f64 {
        self.forward.total
    }

    pub fn total_reverse(&self) -> Option<f64> {
        self.reverse.as_ref().map(|r| r.total)
    }

    /// Largest conservation residual over the computed directions.
    pub fn conservation_residual(&self) -> f64 {
        let rev = self
            .reverse
            .as_ref()
            .map_or(0.0, Currents::conservation_residual);
        self.forward.conservation_residual().max(rev)
    }

    /// Relative quadrature error of the ratio (sum of the relative errors of
    /// both totals); zero for a forward-only report.
    pub fn relative_error(&self) -> f64 {
        let rel = |c: &Currents| {
            if c.total == 0.0 {
                0.0
            } else {
                (c.error / c.total).abs()
            }
        };
        rel(&self.forward) + self.reverse.as_ref().map_or(0.0, rel)
    }

    /// CSV dump, 1-based bath labels:
    /// `direction,bath,J_l,total,delta,ratio`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "direction,bath,J_l,total,delta,ratio")?;
        let delta = self.delta.map_or(String::new(), format_float);
        let ratio = self.ratio.map_or(String::new(), |r| format_float(r.value()));
        let mut rows = vec![("forward", &self.forward)];
        if let Some(rev) = &self.reverse {
            rows.push(("reverse", rev));
        }
        for (direction, currents) in rows {
            for c in &currents.per_bath {
                writeln!(
                    out,
                    "{direction},{},{},{},{delta},{ratio}",
                    c.bead + 1,
                    format_float(c.current),
                    format_float(currents.total)
                )?;
            }
        }
        Ok(())
    }
}

/// `J_l = sum_m M_lm (T_l - T_m)` for every bath.
pub fn classical_currents(m: &TransmissionMatrix, baths: &BathSpec) -> CurrentReport {
    CurrentReport::forward_only(Regime::Classical, apply_matrix(m, baths))
}

fn apply_matrix(m: &TransmissionMatrix, baths: &BathSpec) -> Currents {
    let t = &baths.temperatures;
    let per_bath = m
        .beads()
        .iter()
        .map(|&l| {
            let (mut current, mut error) = (0.0, 0.0);
            for &k in m.beads().iter().filter(|&&k| k != l) {
                current += m.get(l, k) * (t[l] - t[k]);
                error += m.error(l, k) * (t[l] - t[k]).abs();
            }
            BathCurrent {
                bead: l,
                current,
                error,
            }
        })
        .collect();
    Currents::from_per_bath(per_bath, baths)
}

/// Quantum currents for each temperature vector, sharing one pass over the grid.
fn quantum_passes(model: &Model, quad: &QuadratureSpec, temps: &[Vec<f64>]) -> Result<Vec<Currents>> {
    let (pairs, integral) = pair_integrals(model, quad, temps, Some(Regime::Quantum))?;
    let n = model.n();
    let n_pairs = pairs.len();
    let beads = model.thermostated();
    Ok(temps
        .iter()
        .enumerate()
        .map(|(d, temps)| {
            let mut current = vec![0.0; n];
            let mut error = vec![0.0; n];
            for (p, &(l, m, _)) in pairs.iter().enumerate() {
                let c = prefactor(model.baths(), l, m);
                let q = c * integral.values[d * n_pairs + p];
                let e = c * integral.errors[d * n_pairs + p];
                current[l] += q;
                current[m] -= q;
                error[l] += e;
                error[m] += e;
            }
            let per_bath = beads
                .iter()
                .map(|&b| BathCurrent {
                    bead: b,
                    current: current[b],
                    error: error[b],
                })
                .collect();
            let baths = BathSpec {
                temperatures: temps.clone(),
                ..model.baths().clone()
            };
            Currents::from_per_bath(per_bath, &baths)
        })
        .collect())
}

/// Quantum currents `J_l = sum_m (gamma_l gamma_m / pi) Int w^3 |G_lm|^2 [n_l - n_m]`.
pub fn quantum_currents(model: &Model, quad: &QuadratureSpec) -> Result<CurrentReport> {
    let temps = vec![model.baths().temperatures.clone()];
    let forward = quantum_passes(model, quad, &temps)?.remove(0);
    Ok(CurrentReport::forward_only(Regime::Quantum, forward))
}

/// Forward currents in either regime.
pub fn currents(model: &Model, quad: &QuadratureSpec, regime: Regime) -> Result<CurrentReport> {
    match regime {
        Regime::Classical => Ok(classical_currents(&compute_m(model, quad)?, model.baths())),
        Regime::Quantum => quantum_currents(model, quad),
    }
}

/// Forward and reversed currents, `Delta J = J + J~` and `R = |J / J~|`.
///
/// The reversed run keeps the hot set of the forward run, so `J~` is the
/// power entering through the originally hot baths. See [`Model::reversed`]
/// for how the temperatures are exchanged.
pub fn rectification(model: &Model, quad: &QuadratureSpec, regime: Regime) -> Result<CurrentReport> {
    let reversed = model.reversed()?;
    match regime {
        Regime::Classical => {
            let m = compute_m(model, quad)?;
            let forward = apply_matrix(&m, model.baths());
            let reverse = apply_matrix(&m, reversed.baths());
            Ok(CurrentReport::with_reverse(regime, forward, reverse))
        }
        Regime::Quantum => {
            let temps = vec![
                model.baths().temperatures.clone(),
                reversed.baths().temperatures.clone(),
            ];
            let mut both = quantum_passes(model, quad, &temps)?;
            let reverse = both.pop().expect("two passes");
            let forward = both.pop().expect("two passes");
            Ok(CurrentReport::with_reverse(regime, forward, reverse))
        }
    }
}

/// Number of beads per thermostated zone when the hot set is the first `N_B`
/// beads and the cold set the last `N_B`.
pub fn zone_size(baths: &BathSpec) -> Result<usize> {
    let n = baths.frictions.len();
    let nb = baths.hot.len();
    let mut hot = baths.hot.clone();
    let mut cold = baths.cold.clone();
    hot.sort_unstable();
    cold.sort_unstable();
    if nb == 0
        || baths.cold.len() != nb
        || 2 * nb > n
        || hot != (0..nb).collect::<Vec<_>>()
        || cold != (n - nb..n).collect::<Vec<_>>()
    {
        return Err(Error::Layout(
            "closed form needs hot beads 1..N_B and cold beads N-N_B+1..N".into(),
        ));
    }
    Ok(nb)
}

/// Classical `Delta J` from transmission coefficients alone:
///
/// ```text
/// Delta J = sum_i sum_{j != i} [(T_i - T_j) + (T_{N+1-i} - T_{N+1-j})] M_{i,N+1-j}
/// ```
///
/// For `N_B = 2` this is `[(T_1 - T_2) - (T_4 - T_5)] (M_14 - M_25)` on five beads.
pub fn delta_j_closed_form(m: &TransmissionMatrix, baths: &BathSpec) -> Result<f64> {
    let nb = zone_size(baths)?;
    let n = m.n();
    let t = &baths.temperatures;
    let mut delta = 0.0;
    for i in 0..nb {
        for j in (0..nb).filter(|&j| j != i) {
            let bias = (t[i] - t[j]) + (t[n - 1 - i] - t[n - 1 - j]);
            delta += bias * m.get(i, n - 1 - j);
        }
    }
    Ok(delta)
}

/// Harmonic diode whose end frictions depend on the attached bath temperature.
///
/// Only beads 1 and N are thermostated. In the forward run bead 1 sits at
/// `t_hot` with `gamma_1 + lambda (t_hot - t_cold)` and bead N at `t_cold` with
/// `gamma_N - lambda (t_hot - t_cold)`; the reverse run swaps the baths and the
/// friction shifts with them. Each direction gets its own Green's function.
pub fn effective_diode(
    chain: &ChainSpec,
    eff: &EffectiveFrictionSpec,
    t_hot: f64,
    t_cold: f64,
    quad: &QuadratureSpec,
    regime: Regime,
) -> Result<CurrentReport> {
    let n = chain.n;
    if n < 2 || eff.base_frictions.len() != n {
        return Err(Error::Layout(format!(
            "effective diode needs {n} base frictions on a chain of at least 2 beads"
        )));
    }
    let ends_only = eff
        .base_frictions
        .iter()
        .enumerate()
        .all(|(i, &g)| if i == 0 || i == n - 1 { g > 0.0 } else { g == 0.0 });
    if !ends_only {
        return Err(Error::Layout(
            "effective diode needs thermostats on beads 1 and N only".into(),
        ));
    }
    let build = |left_hot: bool| -> Result<Model> {
        let (t_left, t_right) = if left_hot {
            (t_hot, t_cold)
        } else {
            (t_cold, t_hot)
        };
        let mut frictions = vec![0.0; n];
        frictions[0] = eff.friction(0, left_hot, t_hot, t_cold);
        frictions[n - 1] = eff.friction(n - 1, !left_hot, t_hot, t_cold);
        for bead in [0, n - 1] {
            if !(frictions[bead] > 0.0) {
                return Err(Error::NonPositiveFriction {
                    bead: bead + 1,
                    gamma: frictions[bead],
                });
            }
        }
        let mut temperatures = vec![0.0; n];
        temperatures[0] = t_left;
        temperatures[n - 1] = t_right;
        let baths = BathSpec {
            frictions,
            temperatures,
            hot: vec![0],
            cold: vec![n - 1],
        };
        Ok(Model::new(chain.clone(), baths)?)
    };
    let forward_model = build(true)?;
    let reverse_model = build(false)?;
    let forward = currents(&forward_model, quad, regime)?.forward;
    let reverse = currents(&reverse_model, quad, regime)?.forward;
    Ok(CurrentReport::with_reverse(regime, forward, reverse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChainSpec;

    fn five_bead(springs: [f64; 6], temps: [f64; 4]) -> Model {
        Model::new(
            ChainSpec::from_springs(springs.to_vec()),
            BathSpec::edges(5, 2, 2, 1.0).with_bath_temperatures(&temps),
        )
        .unwrap()
    }

    fn quad(model: &Model) -> QuadratureSpec {
        QuadratureSpec::with_points(model.chain(), 20_001)
    }

    #[test]
    fn bose_function_limits() {
        assert_eq!(bose(1.0, 0.0), 0.0);
        assert_eq!(bose(800.0, 1.0), 0.0);
        assert!((bose(1.0, 1.0) - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-15);
        assert_eq!(mode_energy(0.0, 2.5), 2.5);
        // w n(w) -> T - w/2 for w << T
        assert!((mode_energy(1e-6, 2.0) - (2.0 - 0.5e-6)).abs() < 1e-12);
    }

    #[test]
    fn zero_friction_bead_transmits_nothing() {
        let model = five_bead([2.0, 2.0, 1.0, 1.0, 0.1, 0.1], [1.0, 0.5, 0.2, 0.1]);
        let m = compute_m(&model, &quad(&model)).unwrap();
        for b in 0..5 {
            assert_eq!(m.get(2, b), 0.0);
            assert_eq!(m.get(b, 2), 0.0);
        }
        assert!(m.get(0, 3) > 0.0);
    }

    #[test]
    fn m_is_symmetric_and_nonnegative() {
        let model = five_bead([0.4, 1.3, 0.8, 1.9, 0.2, 1.1], [1.0, 0.5, 0.2, 0.1]);
        let m = compute_m(&model, &quad(&model)).unwrap();
        for (l, k, v) in m.entries() {
            assert!(v >= 0.0);
            assert_eq!(v, m.get(k, l));
        }
    }

    #[test]
    fn equilibrium_carries_no_current() {
        let model = five_bead([2.0, 2.0, 1.0, 1.0, 0.1, 0.1], [0.7; 4]);
        let q = quad(&model);
        let c = classical_currents(&compute_m(&model, &q).unwrap(), model.baths());
        assert!(c.forward.per_bath.iter().all(|b| b.current == 0.0));
        let qc = quantum_currents(&model, &q).unwrap();
        assert!(qc.forward.per_bath.iter().all(|b| b.current.abs() < 1e-15));
    }

    #[test]
    fn classical_total_matches_four_term_expansion() {
        let t = [1.0, 0.5, 0.2, 0.1];
        let model = five_bead([2.0, 2.0, 1.0, 1.0, 0.1, 0.1], t);
        let m = compute_m(&model, &quad(&model)).unwrap();
        let report = classical_currents(&m, model.baths());
        let (t1, t2, t4, t5) = (t[0], t[1], t[2], t[3]);
        let expect = (t1 - t4) * m.get(0, 3)
            + (t2 - t5) * m.get(1, 4)
            + (t1 - t5) * m.get(0, 4)
            + (t2 - t4) * m.get(1, 3);
        assert!((report.total_forward() - expect).abs() < 1e-14 * expect.abs());
        assert!((report.forward.cold_total + report.forward.total).abs() < 1e-14);
    }

    #[test]
    fn doubling_bias_doubles_currents() {
        let model = five_bead([0.5, 1.5, 1.0, 0.7, 0.3, 0.9], [1.0, 0.6, 0.3, 0.1]);
        let m = compute_m(&model, &quad(&model)).unwrap();
        let base = classical_currents(&m, model.baths());
        let doubled = model
            .with_temperatures(model.baths().temperatures.iter().map(|t| 2.0 * t).collect())
            .unwrap();
        let twice = classical_currents(&m, doubled.baths());
        for (a, b) in base.forward.per_bath.iter().zip(&twice.forward.per_bath) {
            assert!((2.0 * a.current - b.current).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_needs_edge_zones() {
        let model = Model::new(
            ChainSpec::uniform(5, 1.0),
            BathSpec {
                frictions: vec![1.0, 0.0, 1.0, 1.0, 1.0],
                temperatures: vec![1.0, 0.0, 0.8, 0.3, 0.1],
                hot: vec![0, 2],
                cold: vec![3, 4],
            },
        )
        .unwrap();
        let m = compute_m(&model, &quad(&model)).unwrap();
        assert!(matches!(delta_j_closed_form(&m, model.baths()), Err(Error::Layout(_))));
    }

    #[test]
    fn equal_gradients_cancel_closed_form() {
        let model = five_bead([2.0, 2.0, 1.0, 1.0, 0.1, 0.1], [10.0, 7.0, 3.0, 0.0]);
        let m = compute_m(&model, &quad(&model)).unwrap();
        assert_eq!(delta_j_closed_form(&m, model.baths()).unwrap(), 0.0);
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(Ratio::new(1.0, -0.5), Ratio::Finite(2.0));
        assert_eq!(Ratio::new(1.0, 0.0), Ratio::Unbounded);
        assert_eq!(Ratio::new(0.0, 0.0), Ratio::Undefined);
        assert_eq!(Ratio::Finite(0.5).symmetric(), 2.0);
        assert!(Ratio::Unbounded.symmetric().is_infinite());
    }

    #[test]
    fn effective_diode_rejects_nonpositive_friction() {
        let chain = ChainSpec::uniform(4, 1.0);
        let eff = EffectiveFrictionSpec {
            base_frictions: vec![0.2, 0.0, 0.0, 0.5],
            slope: 1.0,
        };
        let q = QuadratureSpec::with_points(&chain, 2001);
        let err = effective_diode(&chain, &eff, 1.5, 1.0, &q, Regime::Classical).unwrap_err();
        assert!(matches!(err, Error::NonPositiveFriction { .. }));
        let eff = EffectiveFrictionSpec {
            base_frictions: vec![0.2, 0.1, 0.0, 0.5],
            slope: 0.0,
        };
        let err = effective_diode(&chain, &eff, 1.5, 1.0, &q, Regime::Classical).unwrap_err();
        assert!(matches!(err, Error::Layout(_)));
    }

    #[test]
    fn effective_diode_without_slope_is_symmetric() {
        let chain = ChainSpec::from_springs(vec![0.3, 1.0, 2.0, 0.5]);
        let eff = EffectiveFrictionSpec {
            base_frictions: vec![0.4, 0.0, 1.7],
            slope: 0.0,
        };
        let q = QuadratureSpec::with_points(&chain, 20_001);
        let r = effective_diode(&chain, &eff, 2.0, 0.5, &q, Regime::Classical).unwrap();
        assert_eq!(r.delta, Some(0.0));
    }

    #[test]
    fn report_csv_has_one_row_per_bath_and_direction() {
        let model = five_bead([2.0, 2.0, 1.0, 1.0, 0.1, 0.1], [1.0, 0.5, 0.2, 0.1]);
        let r = rectification(&model, &quad(&model), Regime::Classical).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "direction,bath,J_l,total,delta,ratio");
        assert_eq!(lines.len(), 9);
        assert!(lines[5].starts_with("reverse,1,"));
    }
}
