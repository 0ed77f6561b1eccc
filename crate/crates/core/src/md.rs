//! Classical Langevin molecular dynamics for harmonic and Frenkel-Kontorova
//! chains.
//!
//! Coordinates are displacements `u_i = x_i - i a` from the lattice sites, so
//! the harmonic force on bead `i` is `-k_{i-1}(u_i - u_{i-1}) + k_i(u_{i+1} - u_i)`
//! with `u_{-1} = u_N = 0` at the walls.
//!
//! Each step uses the Brunger-Brooks-Karplus (BBK) splitting with an
//! independent random force in each half-kick:
//!
//! ```text
//! v'      = v_n (1 - gamma dt / 2m) + dt / 2m (F_n + R_a)
//! u_{n+1} = u_n + dt v'
//! v_{n+1} = (v' + dt / 2m (F_{n+1} + R_b)) / (1 + gamma dt / 2m)
//! ```
//!
//! with `R_a, R_b ~ N(0, 4 gamma T / dt)`. The impulse per step then has
//! variance `2 gamma T dt`, and a free particle samples `<v^2> = T / m`
//! exactly for any `dt`. Beads with `gamma = 0` reduce to velocity Verlet.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BathSpec, ChainSpec, Model};

/// Onsite potential `V_i cos(2 pi u_i / a + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkPotentialSpec {
    pub amplitudes: Vec<f64>,
    pub period: f64,
    /// Constant phase of the cosine; zero puts a maximum at every lattice site.
    #[serde(default)]
    pub phase: f64,
}

impl FkPotentialSpec {
    pub fn new(amplitudes: Vec<f64>, period: f64) -> Self {
        Self {
            amplitudes,
            period,
            phase: 0.0,
        }
    }

    /// `v_left` on the first `n_left` beads and `v_right` on the rest.
    pub fn split(n: usize, n_left: usize, v_left: f64, v_right: f64, period: f64) -> Self {
        let amplitudes = (0..n)
            .map(|i| if i < n_left { v_left } else { v_right })
            .collect();
        Self::new(amplitudes, period)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.amplitudes.len() != n {
            return Err(Error::InvalidArgument(format!(
                "FK amplitudes: expected {n} values, found {}",
                self.amplitudes.len()
            )));
        }
        if let Some(v) = self.amplitudes.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "FK amplitudes must be finite and nonnegative, found {v}"
            )));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "FK period must be positive, found {}",
                self.period
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidArgument("FK phase must be finite".into()));
        }
        Ok(())
    }

    fn wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }
}

fn default_dt() -> f64 {
    0.005
}
fn default_equilibration() -> u64 {
    2_000_000
}
fn default_production() -> u64 {
    10_000_000
}
fn default_realizations() -> usize {
    16
}
fn default_windows() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_equilibration")]
    pub equilibration_steps: u64,
    #[serde(default = "default_production")]
    pub production_steps: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Left bead of the bond whose current is reported (0-based); `None` picks
    /// the central bond.
    #[serde(default)]
    pub measure_bond: Option<usize>,
    /// Number of consecutive windows for the stationarity diagnostic.
    #[serde(default = "default_windows")]
    pub windows: usize,
    /// Keep every `n`-th production frame of realization 0.
    #[serde(default)]
    pub dump_every: Option<u64>,
}

impl Default for MdConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            equilibration_steps: default_equilibration(),
            production_steps: default_production(),
            realizations: default_realizations(),
            base_seed: 0,
            measure_bond: None,
            windows: default_windows(),
            dump_every: None,
        }
    }
}

impl MdConfig {
    pub fn check(&self, n: usize) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, found {}", self.dt)));
        }
        if self.production_steps == 0 {
            return Err(Error::InvalidArgument("production_steps must be at least 1".into()));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidArgument("realizations must be at least 1".into()));
        }
        if self.windows == 0 || self.windows as u64 > self.production_steps {
            return Err(Error::InvalidArgument(
                "windows must be between 1 and production_steps".into(),
            ));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("current measurement needs two beads".into()));
        }
        if let Some(b) = self.measure_bond {
            if b + 1 >= n {
                return Err(Error::InvalidArgument(format!(
                    "measure_bond ({}, {}) is outside a {n}-bead chain",
                    b + 1,
                    b + 2
                )));
            }
        }
        if self.dump_every == Some(0) {
            return Err(Error::InvalidArgument("dump_every must be positive".into()));
        }
        Ok(())
    }

    /// Left bead of the measured bond for an `n`-bead chain.
    pub fn bond(&self, n: usize) -> usize {
        self.measure_bond.unwrap_or((n - 1) / 2)
    }
}

/// Positions, velocities and the forces at the current positions.
#[derive(Debug, Clone, PartialEq)]
pub struct MdState {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    forces: Vec<f64>,
    pub step: u64,
}

impl MdState {
    pub fn new(
        chain: &ChainSpec,
        fk: Option<&FkPotentialSpec>,
        positions: Vec<f64>,
        velocities: Vec<f64>,
    ) -> Self {
        let mut forces = vec![0.0; chain.n];
        force(chain, fk, &positions, &mut forces);
        Self {
            positions,
            velocities,
            forces,
            step: 0,
        }
    }

    /// All beads at their lattice sites and at rest.
    pub fn at_rest(chain: &ChainSpec, fk: Option<&FkPotentialSpec>) -> Self {
        let n = chain.n;
        Self::new(chain, fk, vec![0.0; n], vec![0.0; n])
    }

    pub fn forces(&self) -> &[f64] {
        &self.forces
    }
}

/// Total force on every bead at displacements `u`, written into `out`.
pub fn force(chain: &ChainSpec, fk: Option<&FkPotentialSpec>, u: &[f64], out: &mut [f64]) {
    let n = chain.n;
    let k = &chain.springs;
    for i in 0..n {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        let right = if i + 1 == n { 0.0 } else { u[i + 1] };
        out[i] = -k[i] * (u[i] - left) + k[i + 1] * (right - u[i]) - chain.pinning[i] * u[i];
    }
    if let Some(fk) = fk {
        let q = fk.wavenumber();
        for i in 0..n {
            out[i] += fk.amplitudes[i] * q * (q * u[i] + fk.phase).sin();
        }
    }
}

/// Total mechanical energy (kinetic, springs, pinning and FK).
pub fn energy(chain: &ChainSpec, fk: Option<&FkPotentialSpec>, u: &[f64], v: &[f64]) -> f64 {
    let n = chain.n;
    let k = &chain.springs;
    let mut e = 0.0;
    for i in 0..n {
        e += 0.5 * chain.masses[i] * v[i] * v[i] + 0.5 * chain.pinning[i] * u[i] * u[i];
    }
    e += 0.5 * k[0] * u[0] * u[0] + 0.5 * k[n] * u[n - 1] * u[n - 1];
    for i in 1..n {
        let d = u[i] - u[i - 1];
        e += 0.5 * k[i] * d * d;
    }
    if let Some(fk) = fk {
        let q = fk.wavenumber();
        for i in 0..n {
            e += fk.amplitudes[i] * (q * u[i] + fk.phase).cos();
        }
    }
    e
}

/// Standard deviation `sqrt(4 gamma_i T_i / dt)` of each half-kick's random force.
fn noise_amplitudes(baths: &BathSpec, dt: f64) -> Vec<f64> {
    baths
        .frictions
        .iter()
        .zip(&baths.temperatures)
        .map(|(&g, &t)| if g > 0.0 { (4.0 * g * t / dt).sqrt() } else { 0.0 })
        .collect()
}

#[inline]
fn kick<R: Rng>(amp: f64, rng: &mut R) -> f64 {
    if amp > 0.0 {
        amp * rng.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    }
}

/// Per-run constants of the integrator.
struct Integrator<'a> {
    chain: &'a ChainSpec,
    fk: Option<&'a FkPotentialSpec>,
    dt: f64,
    /// `dt / 2m`
    half: Vec<f64>,
    /// `gamma dt / 2m`
    damp: Vec<f64>,
    amp: Vec<f64>,
}

impl<'a> Integrator<'a> {
    fn new(chain: &'a ChainSpec, fk: Option<&'a FkPotentialSpec>, baths: &BathSpec, dt: f64) -> Self {
        let half: Vec<f64> = chain.masses.iter().map(|m| 0.5 * dt / m).collect();
        let damp = half.iter().zip(&baths.frictions).map(|(h, g)| h * g).collect();
        Self {
            chain,
            fk,
            dt,
            half,
            damp,
            amp: noise_amplitudes(baths, dt),
        }
    }

    fn step<R: Rng>(&self, s: &mut MdState, rng: &mut R) -> Result<()> {
        let n = self.chain.n;
        for i in 0..n {
            let r = kick(self.amp[i], rng);
            s.velocities[i] = s.velocities[i] * (1.0 - self.damp[i]) + self.half[i] * (s.forces[i] + r);
            s.positions[i] += self.dt * s.velocities[i];
        }
        force(self.chain, self.fk, &s.positions, &mut s.forces);
        let mut finite = true;
        for i in 0..n {
            let r = kick(self.amp[i], rng);
            s.velocities[i] =
                (s.velocities[i] + self.half[i] * (s.forces[i] + r)) / (1.0 + self.damp[i]);
            finite &= s.velocities[i].is_finite() && s.positions[i].is_finite();
        }
        s.step += 1;
        if finite {
            Ok(())
        } else {
            Err(Error::IntegrationBlowup { step: s.step })
        }
    }
}

/// Advance `state` by one BBK step.
pub fn bbk_step<R: Rng>(
    state: &mut MdState,
    chain: &ChainSpec,
    fk: Option<&FkPotentialSpec>,
    baths: &BathSpec,
    dt: f64,
    rng: &mut R,
) -> Result<()> {
    Integrator::new(chain, fk, baths, dt).step(state, rng)
}

/// Instantaneous energy flux from bead `b` to bead `b + 1` through spring
/// `k_{b+1}`: `-(k/2)(v_b + v_{b+1})(u_{b+1} - u_b)`.
#[inline]
pub fn bond_power(chain: &ChainSpec, b: usize, u: &[f64], v: &[f64]) -> f64 {
    -0.5 * chain.springs[b + 1] * (v[b] + v[b + 1]) * (u[b + 1] - u[b])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub step: u64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

/// Time average of the bond current over a window of frames.
pub fn measure_current(window: &[Frame], chain: &ChainSpec, bond: usize) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if bond + 1 >= chain.n {
        return Err(Error::InvalidArgument(format!(
            "bond ({}, {}) is outside a {}-bead chain",
            bond + 1,
            bond + 2,
            chain.n
        )));
    }
    let sum: f64 = window
        .iter()
        .map(|f| bond_power(chain, bond, &f.positions, &f.velocities))
        .sum();
    Ok(sum / window.len() as f64)
}

/// Mean and standard error of the mean of independent samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }

    /// `|mean - target| <= k * stderr`
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub dt: f64,
    pub equilibration_steps: u64,
    pub production_steps: u64,
    pub base_seed: u64,
    /// RNG stream id of each realization.
    pub streams: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdResult {
    /// Left bead of the measured bond (0-based).
    pub bond: usize,
    pub mean_current: f64,
    pub stderr: f64,
    pub per_realization: Vec<f64>,
    /// Current through every interior bond `(b, b + 1)`.
    pub bond_currents: Vec<Estimate>,
    /// `<v_i^2>` per bead.
    pub velocity_variance: Vec<Estimate>,
    /// Realization-averaged current of the measured bond in consecutive
    /// production windows.
    pub window_means: Vec<f64>,
    pub meta: TrajectoryMeta,
    /// Thinned production frames of realization 0, if requested.
    pub trajectory: Vec<Frame>,
}

impl MdResult {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean_current,
            stderr: self.stderr,
        }
    }
}

struct Realization {
    bonds: Vec<f64>,
    v2: Vec<f64>,
    windows: Vec<f64>,
    frames: Vec<Frame>,
}

fn run_one(
    chain: &ChainSpec,
    fk: Option<&FkPotentialSpec>,
    baths: &BathSpec,
    md: &MdConfig,
    bond: usize,
    stream: u64,
    dump: bool,
) -> Result<Realization> {
    let n = chain.n;
    let mut rng = ChaCha8Rng::seed_from_u64(md.base_seed);
    rng.set_stream(stream);
    let integ = Integrator::new(chain, fk, baths, md.dt);
    let mut s = MdState::at_rest(chain, fk);
    for _ in 0..md.equilibration_steps {
        integ.step(&mut s, &mut rng)?;
    }
    let mut bonds = vec![0.0; n - 1];
    let mut v2 = vec![0.0; n];
    let mut windows = vec![0.0; md.windows];
    let mut frames = Vec::new();
    let per_window = md.production_steps / md.windows as u64;
    let mut window_sum = 0.0;
    let mut window_count = 0u64;
    let mut w = 0;
    for t in 0..md.production_steps {
        integ.step(&mut s, &mut rng)?;
        let (u, v) = (&s.positions, &s.velocities);
        for (b, acc) in bonds.iter_mut().enumerate() {
            *acc += bond_power(chain, b, u, v);
        }
        for (acc, vi) in v2.iter_mut().zip(v) {
            *acc += vi * vi;
        }
        window_sum += bond_power(chain, bond, u, v);
        window_count += 1;
        if window_count == per_window && w + 1 < md.windows {
            windows[w] = window_sum / window_count as f64;
            w += 1;
            window_sum = 0.0;
            window_count = 0;
        }
        if dump && md.dump_every.is_some_and(|e| t % e == 0) {
            frames.push(Frame {
                step: s.step,
                positions: u.clone(),
                velocities: v.clone(),
            });
        }
    }
    windows[w] = window_sum / window_count as f64;
    let steps = md.production_steps as f64;
    bonds.iter_mut().chain(v2.iter_mut()).for_each(|x| *x /= steps);
    Ok(Realization {
        bonds,
        v2,
        windows,
        frames,
    })
}

fn run_streams(
    model: &Model,
    fk: Option<&FkPotentialSpec>,
    md: &MdConfig,
    first_stream: u64,
) -> Result<MdResult> {
    let chain = model.chain();
    let n = chain.n;
    md.check(n)?;
    if let Some(fk) = fk {
        fk.check(n)?;
    }
    let bond = md.bond(n);
    let streams: Vec<u64> = (0..md.realizations as u64).map(|r| first_stream + r).collect();
    let runs = streams
        .par_iter()
        .enumerate()
        .map(|(r, &stream)| run_one(chain, fk, model.baths(), md, bond, stream, r == 0))
        .collect::<Result<Vec<_>>>()?;

    let column = |f: &dyn Fn(&Realization) -> f64| -> Vec<f64> { runs.iter().map(f).collect() };
    let per_realization = column(&|r| r.bonds[bond]);
    let main = Estimate::from_samples(&per_realization);
    let bond_currents = (0..n - 1)
        .map(|b| Estimate::from_samples(&column(&|r| r.bonds[b])))
        .collect();
    let velocity_variance = (0..n)
        .map(|i| Estimate::from_samples(&column(&|r| r.v2[i])))
        .collect();
    let window_means = (0..md.windows)
        .map(|w| column(&|r| r.windows[w]).iter().sum::<f64>() / runs.len() as f64)
        .collect();
    let trajectory = runs.into_iter().next().map(|r| r.frames).unwrap_or_default();
    Ok(MdResult {
        bond,
        mean_current: main.mean,
        stderr: main.stderr,
        per_realization,
        bond_currents,
        velocity_variance,
        window_means,
        meta: TrajectoryMeta {
            dt: md.dt,
            equilibration_steps: md.equilibration_steps,
            production_steps: md.production_steps,
            base_seed: md.base_seed,
            streams,
        },
        trajectory,
    })
}

/// Steady-state MD of `model`, realizations in parallel. Realization `r` uses
/// `ChaCha8Rng::seed_from_u64(base_seed)` on stream `r`.
pub fn run(model: &Model, fk: Option<&FkPotentialSpec>, md: &MdConfig) -> Result<MdResult> {
    run_streams(model, fk, md, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkRectification {
    pub forward: MdResult,
    pub reverse: MdResult,
    /// `|J / J~|`
    pub ratio: f64,
    /// First-order propagated standard error of `ratio`.
    pub ratio_stderr: f64,
}

/// Forward (hot bead 1, cold bead N) and reverse MD runs of a chain
/// thermostated only at its two ends. The reverse run uses RNG streams
/// `realizations .. 2 realizations`.
pub fn run_fk_rectification(
    chain: &ChainSpec,
    fk: Option<&FkPotentialSpec>,
    gamma: f64,
    t_hot: f64,
    t_cold: f64,
    md: &MdConfig,
) -> Result<FkRectification> {
    let n = chain.n;
    if n < 2 {
        return Err(Error::InvalidArgument("an end-to-end diode needs two beads".into()));
    }
    let baths = BathSpec::edges(n, 1, 1, gamma);
    let mut temps = vec![0.0; n];
    temps[0] = t_hot;
    temps[n - 1] = t_cold;
    let forward_model = Model::new(chain.clone(), baths.with_temperatures(temps))?;
    let reverse_model = forward_model.reversed()?;
    let forward = run_streams(&forward_model, fk, md, 0)?;
    let reverse = run_streams(&reverse_model, fk, md, md.realizations as u64)?;
    let (jf, jr) = (forward.mean_current, reverse.mean_current);
    let ratio = (jf / jr).abs();
    let ratio_stderr = ratio * ((forward.stderr / jf).powi(2) + (reverse.stderr / jr).powi(2)).sqrt();
    Ok(FkRectification {
        forward,
        reverse,
        ratio,
        ratio_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(n: usize) -> BathSpec {
        BathSpec::edges(n, 1, 1, 0.0)
    }

    #[test]
    fn equilibrium_has_no_force() {
        let chain = ChainSpec::from_springs(vec![1.0, 0.5, 2.0, 1.0]);
        let mut f = vec![1.0; 3];
        force(&chain, None, &[0.0; 3], &mut f);
        assert_eq!(f, vec![0.0; 3]);
    }

    #[test]
    fn single_bead_hooke() {
        let chain = ChainSpec::uniform(1, 1.0);
        let mut f = [0.0];
        force(&chain, None, &[0.3], &mut f);
        assert!((f[0] + 0.6).abs() < 1e-15);
    }

    #[test]
    fn fk_quarter_period_force() {
        let chain = ChainSpec::uniform(1, 0.0).with_pinning(vec![0.0]);
        let fk = FkPotentialSpec::new(vec![0.7], 2.0);
        let mut f = [0.0];
        force(&chain, Some(&fk), &[0.5], &mut f);
        assert!((f[0].abs() - 2.0 * PI * 0.7 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn force_is_minus_energy_gradient() {
        let chain = ChainSpec::from_springs(vec![1.0, 0.3, 2.0, 0.7])
            .with_pinning(vec![0.2, 0.0, 0.5])
            .with_spacing(1.5);
        let mut fk = FkPotentialSpec::new(vec![0.4, 1.0, 0.1], 1.5);
        fk.phase = 0.3;
        let u = [0.11, -0.27, 0.4];
        let mut f = [0.0; 3];
        force(&chain, Some(&fk), &u, &mut f);
        let h = 1e-6;
        for i in 0..3 {
            let (mut up, mut dn) = (u, u);
            up[i] += h;
            dn[i] -= h;
            let grad = (energy(&chain, Some(&fk), &up, &[0.0; 3])
                - energy(&chain, Some(&fk), &dn, &[0.0; 3]))
                / (2.0 * h);
            assert!((f[i] + grad).abs() < 1e-7, "bead {i}: {} vs {}", f[i], -grad);
        }
    }

    #[test]
    fn zero_temperature_relaxes() {
        let chain = ChainSpec::uniform(4, 1.0);
        let baths = BathSpec::edges(4, 2, 2, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = MdState::new(&chain, None, vec![0.5, -0.2, 0.1, 0.3], vec![1.0, 0.0, -1.0, 0.5]);
        let e0 = energy(&chain, None, &s.positions, &s.velocities);
        for _ in 0..20_000 {
            bbk_step(&mut s, &chain, None, &baths, 0.01, &mut rng).unwrap();
        }
        let e1 = energy(&chain, None, &s.positions, &s.velocities);
        assert!(e1 < 1e-6 * e0, "{e0} -> {e1}");
    }

    #[test]
    fn blowup_is_reported_with_step() {
        let chain = ChainSpec::uniform(2, 1.0);
        let baths = quiet(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = MdState::new(&chain, None, vec![1.0, 0.0], vec![0.0; 2]);
        let mut err = None;
        for _ in 0..10_000 {
            if let Err(e) = bbk_step(&mut s, &chain, None, &baths, 5.0, &mut rng) {
                err = Some(e);
                break;
            }
        }
        match err {
            Some(Error::IntegrationBlowup { step }) => assert!(step > 1),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn empty_window_is_an_error() {
        let chain = ChainSpec::uniform(3, 1.0);
        assert!(matches!(measure_current(&[], &chain, 0), Err(Error::EmptyWindow)));
    }

    #[test]
    fn bond_power_sign_follows_pushing() {
        // bead 0 moving right into a compressed spring pushes energy rightwards
        let chain = ChainSpec::uniform(2, 1.0);
        let frame = Frame {
            step: 0,
            positions: vec![0.1, 0.0],
            velocities: vec![1.0, 0.0],
        };
        assert!(measure_current(&[frame], &chain, 0).unwrap() > 0.0);
    }

    #[test]
    fn config_rejects_bad_values() {
        let ok = MdConfig::default();
        assert!(ok.check(5).is_ok());
        assert_eq!(ok.bond(5), 2);
        for bad in [
            MdConfig { dt: 0.0, ..ok.clone() },
            MdConfig { production_steps: 0, ..ok.clone() },
            MdConfig { realizations: 0, ..ok.clone() },
            MdConfig { measure_bond: Some(4), ..ok.clone() },
        ] {
            assert!(bad.check(5).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let chain = ChainSpec::uniform(3, 1.0);
        let baths = BathSpec::edges(3, 1, 1, 1.0).with_bath_temperatures(&[1.0, 0.1]);
        let model = Model::new(chain, baths).unwrap();
        let md = MdConfig {
            equilibration_steps: 1000,
            production_steps: 5000,
            realizations: 3,
            base_seed: 9,
            dump_every: Some(1000),
            ..MdConfig::default()
        };
        let a = run(&model, None, &md).unwrap();
        let b = run(&model, None, &md).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trajectory.len(), 5);
        assert_eq!(a.meta.streams, vec![0, 1, 2]);
        let other = run(&model, None, &MdConfig { base_seed: 10, ..md }).unwrap();
        assert_ne!(a.per_realization, other.per_realization);
    }
}
