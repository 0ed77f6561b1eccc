//! Spectral quadrature on `[0, omega_max]`.
//!
//! All transport integrands are even in frequency, so integrals over the real
//! line are evaluated as twice the half-line integral by the callers.
//!
//! Reductions are deterministic: the trapezoid grid is cut into fixed-size
//! chunks, each chunk is summed pairwise, and the chunk sums are combined
//! pairwise in grid order. The result does not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// Multiple of the largest chain frequency the cutoff must reach.
pub const CUTOFF_FACTOR: f64 = 10.0;
pub const DEFAULT_POINTS: usize = 200_000;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Trapezoid,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub omega_max: f64,
    /// Grid nodes on `[0, omega_max]` (trapezoid scheme).
    pub points: usize,
    pub scheme: Scheme,
    /// Relative tolerance of the adaptive scheme.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Refinement budget of the adaptive scheme, in subintervals.
    #[serde(default = "default_max_intervals")]
    pub max_intervals: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_intervals() -> usize {
    20_000
}

impl QuadratureSpec {
    /// Dense trapezoid grid reaching ten times the largest chain frequency.
    pub fn for_chain(chain: &ChainSpec) -> Self {
        Self::with_points(chain, DEFAULT_POINTS)
    }

    pub fn with_points(chain: &ChainSpec, points: usize) -> Self {
        Self {
            omega_max: CUTOFF_FACTOR * chain.largest_frequency(),
            points,
            scheme: Scheme::Trapezoid,
            tolerance: default_tolerance(),
            max_intervals: default_max_intervals(),
        }
    }

    pub fn adaptive(chain: &ChainSpec, tolerance: f64) -> Self {
        Self {
            scheme: Scheme::Adaptive,
            tolerance,
            ..Self::for_chain(chain)
        }
    }

    pub fn check(&self, chain: &ChainSpec) -> Result<()> {
        let needed = CUTOFF_FACTOR * chain.largest_frequency();
        if !(self.omega_max.is_finite() && self.omega_max > 0.0) {
            return Err(Error::Quadrature(format!(
                "omega_max must be positive (got {})",
                self.omega_max
            )));
        }
        if self.omega_max < needed * (1.0 - 1e-12) {
            return Err(Error::Quadrature(format!(
                "omega_max = {} is below {CUTOFF_FACTOR} x the largest chain frequency ({needed})",
                self.omega_max
            )));
        }
        match self.scheme {
            Scheme::Trapezoid if self.points < 3 => Err(Error::Quadrature(format!(
                "trapezoid grid needs at least 3 points (got {})",
                self.points
            ))),
            Scheme::Adaptive if !(self.tolerance > 0.0) || self.max_intervals == 0 => Err(
                Error::Quadrature("adaptive scheme needs a positive tolerance and budget".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn step(&self) -> f64 {
        self.omega_max / (self.points - 1) as f64
    }
}

/// Vector of integrals with a per-component error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Integrate the `n_out`-component integrand `f` over `[0, omega_max]`.
///
/// `origin_regular` tells whether `f` may be evaluated at `omega = 0`. When it
/// may not, the trapezoid scheme replaces the origin value by the even-function
/// extrapolation `(4 f(h) - f(2h)) / 3`; the adaptive scheme never touches the
/// endpoints.
pub fn integrate<F>(spec: &QuadratureSpec, origin_regular: bool, n_out: usize, f: F) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]) -> Result<()> + Sync,
{
    integrate_with(spec, origin_regular, n_out, || (), |_, x, out| f(x, out))
}

/// [`integrate`] with a per-worker scratch state built by `init`.
pub fn integrate_with<S, I, F>(
    spec: &QuadratureSpec,
    origin_regular: bool,
    n_out: usize,
    init: I,
    f: F,
) -> Result<Integral>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, f64, &mut [f64]) -> Result<()> + Sync,
{
    match spec.scheme {
        Scheme::Trapezoid => trapezoid(spec, origin_regular, n_out, &init, &f),
        Scheme::Adaptive => adaptive(spec, n_out, &init, &f),
    }
}

struct TrapezoidWeights {
    h: f64,
    last: usize,
    last_even: usize,
}

impl TrapezoidWeights {
    fn new(points: usize, h: f64) -> Self {
        let last = points - 1;
        let last_even = last - last % 2;
        Self { h, last, last_even }
    }

    fn fine(&self, j: usize) -> f64 {
        if j == 0 || j == self.last {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Trapezoid with step `2h` on even nodes; an odd leftover interval is
    /// closed with the fine rule so both rules span the same range.
    fn coarse(&self, j: usize) -> f64 {
        let mut w = if j > self.last_even || j % 2 == 1 {
            0.0
        } else if j == 0 || j == self.last_even {
            self.h
        } else {
            2.0 * self.h
        };
        if self.last_even != self.last && (j == self.last_even || j == self.last) {
            w += 0.5 * self.h;
        }
        w
    }
}

fn trapezoid<S, I, F>(
    spec: &QuadratureSpec,
    origin_regular: bool,
    n_out: usize,
    init: &I,
    f: &F,
) -> Result<Integral>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, f64, &mut [f64]) -> Result<()> + Sync,
{
    let points = spec.points;
    let h = spec.step();
    let weights = TrapezoidWeights::new(points, h);
    let first = usize::from(!origin_regular);
    let n_chunks = (points - first).div_ceil(CHUNK);

    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = first + c * CHUNK;
            let end = (start + CHUNK).min(points);
            let len = end - start;
            let mut samples = vec![0.0; n_out * len];
            let mut row = vec![0.0; n_out];
            let mut state = init();
            for (local, j) in (start..end).enumerate() {
                row.iter_mut().for_each(|v| *v = 0.0);
                f(&mut state, j as f64 * h, &mut row)?;
                for (k, &v) in row.iter().enumerate() {
                    samples[k * len + local] = v;
                }
            }
            let mut fine = Vec::with_capacity(n_out);
            let mut coarse = Vec::with_capacity(n_out);
            let mut terms = vec![0.0; len];
            for k in 0..n_out {
                let column = &samples[k * len..(k + 1) * len];
                for (local, t) in terms.iter_mut().enumerate() {
                    *t = weights.fine(start + local) * column[local];
                }
                fine.push(pairwise_sum(&terms));
                for (local, t) in terms.iter_mut().enumerate() {
                    *t = weights.coarse(start + local) * column[local];
                }
                coarse.push(pairwise_sum(&terms));
            }
            Ok((fine, coarse))
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(n_out);
    let mut errors = Vec::with_capacity(n_out);
    let mut origin = vec![0.0; n_out];
    if !origin_regular {
        let mut f1 = vec![0.0; n_out];
        let mut f2 = vec![0.0; n_out];
        let mut state = init();
        f(&mut state, h, &mut f1)?;
        f(&mut state, 2.0 * h, &mut f2)?;
        for k in 0..n_out {
            origin[k] = (4.0 * f1[k] - f2[k]) / 3.0;
        }
    }
    let mut column = vec![0.0; n_chunks];
    for k in 0..n_out {
        column.iter_mut().zip(&partials).for_each(|(c, p)| *c = p.0[k]);
        let fine = pairwise_sum(&column) + weights.fine(0) * origin[k];
        column.iter_mut().zip(&partials).for_each(|(c, p)| *c = p.1[k]);
        let coarse = pairwise_sum(&column) + weights.coarse(0) * origin[k];
        values.push(fine);
        errors.push((fine - coarse).abs() / 3.0);
    }
    Ok(Integral { values, errors })
}

/// Pairwise (cascade) summation in slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]; index 7 is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    kronrod: Vec<f64>,
    error: f64,
}

fn gauss_kronrod<S, I, F>(a: f64, b: f64, n_out: usize, init: &I, f: &F) -> Result<Panel>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, f64, &mut [f64]) -> Result<()> + Sync,
{
    let mut state = init();
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; n_out];
    let mut gauss = vec![0.0; n_out];
    let mut row = vec![0.0; n_out];
    let mut eval = |x: f64, wk: f64, wg: Option<f64>, row: &mut Vec<f64>| -> Result<()> {
        row.iter_mut().for_each(|v| *v = 0.0);
        f(&mut state, x, row)?;
        for k in 0..n_out {
            kronrod[k] += wk * row[k];
            if let Some(wg) = wg {
                gauss[k] += wg * row[k];
            }
        }
        Ok(())
    };
    eval(centre, WGK[7], Some(WG[3]), &mut row)?;
    for i in 0..7 {
        let wg = (i % 2 == 1).then(|| WG[i / 2]);
        let dx = half * XGK[i];
        eval(centre - dx, WGK[i], wg, &mut row)?;
        eval(centre + dx, WGK[i], wg, &mut row)?;
    }
    let mut error: f64 = 0.0;
    for k in 0..n_out {
        kronrod[k] *= half;
        gauss[k] *= half;
        error = error.max((kronrod[k] - gauss[k]).abs());
    }
    Ok(Panel {
        a,
        b,
        kronrod,
        error,
    })
}

fn adaptive<S, I, F>(spec: &QuadratureSpec, n_out: usize, init: &I, f: &F) -> Result<Integral>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, f64, &mut [f64]) -> Result<()> + Sync,
{
    // Start from a uniform partition so narrow resonances are not missed.
    const INITIAL: usize = 64;
    let width = spec.omega_max / INITIAL as f64;
    let mut panels: Vec<Panel> = (0..INITIAL)
        .into_par_iter()
        .map(|i| gauss_kronrod(i as f64 * width, (i + 1) as f64 * width, n_out, init, f))
        .collect::<Result<_>>()?;

    loop {
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        let scale = (0..n_out)
            .map(|k| panels.iter().map(|p| p.kronrod[k]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if total_error <= spec.tolerance * scale || total_error == 0.0 {
            break;
        }
        if panels.len() >= spec.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                budget: spec.max_intervals,
                error: if scale > 0.0 {
                    total_error / scale
                } else {
                    f64::INFINITY
                },
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (left, right) = rayon::join(
            || gauss_kronrod(a, mid, n_out, init, f),
            || gauss_kronrod(mid, b, n_out, init, f),
        );
        panels.push(left?);
        panels.push(right?);
    }

    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut column = vec![0.0; panels.len()];
    let mut values = Vec::with_capacity(n_out);
    let mut errors = Vec::with_capacity(n_out);
    for k in 0..n_out {
        column
            .iter_mut()
            .zip(&panels)
            .for_each(|(c, p)| *c = p.kronrod[k]);
        values.push(pairwise_sum(&column));
        errors.push(panels.iter().map(|p| p.error).sum());
    }
    Ok(Integral { values, errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(omega_max: f64, points: usize, scheme: Scheme) -> QuadratureSpec {
        QuadratureSpec {
            omega_max,
            points,
            scheme,
            tolerance: 1e-12,
            max_intervals: 5000,
        }
    }

    #[test]
    fn trapezoid_integrates_gaussian_tail() {
        // Integral of exp(-x^2) on [0, 8] is sqrt(pi)/2 up to erfc(8).
        let exact = std::f64::consts::PI.sqrt() / 2.0;
        let s = spec(8.0, 4001, Scheme::Trapezoid);
        let out = integrate(&s, true, 2, |x, out| {
            out[0] = (-x * x).exp();
            out[1] = 2.0 * out[0];
            Ok(())
        })
        .unwrap();
        assert!((out.values[0] - exact).abs() < 1e-13);
        assert!((out.values[1] - 2.0 * exact).abs() < 1e-13);
    }

    #[test]
    fn richardson_estimate_tracks_true_error() {
        // x^2 on [0, 1]: trapezoid error is h^2/6 exactly.
        for points in [11, 12] {
            let s = spec(1.0, points, Scheme::Trapezoid);
            let out = integrate(&s, true, 1, |x, o| {
                o[0] = x * x;
                Ok(())
            })
            .unwrap();
            let true_err = (out.values[0] - 1.0 / 3.0).abs();
            let est = out.errors[0];
            assert!(true_err > 0.0);
            assert!(est > 0.2 * true_err && est < 5.0 * true_err, "{est} vs {true_err}");
        }
    }

    #[test]
    fn singular_origin_uses_even_extrapolation() {
        let s = spec(3.0, 3001, Scheme::Trapezoid);
        let regular = integrate(&s, true, 1, |x, o| {
            o[0] = 1.0 / (1.0 + x * x);
            Ok(())
        })
        .unwrap();
        let skipped = integrate(&s, false, 1, |x, o| {
            assert!(x > 0.0);
            o[0] = 1.0 / (1.0 + x * x);
            Ok(())
        })
        .unwrap();
        assert!((regular.values[0] - skipped.values[0]).abs() < 1e-10);
        assert!((regular.values[0] - 3f64.atan()).abs() < 1e-6);
    }

    #[test]
    fn gauss_kronrod_is_exact_for_polynomials() {
        let panel = gauss_kronrod(-1.0, 1.0, 2, &|| (), &|_: &mut (), x: f64, o: &mut [f64]| {
            o[0] = x.powi(12);
            o[1] = x.powi(22);
            Ok(())
        })
        .unwrap();
        assert!((panel.kronrod[0] - 2.0 / 13.0).abs() < 1e-14);
        assert!((panel.kronrod[1] - 2.0 / 23.0).abs() < 1e-14);
        // Gauss-7 is exact through degree 13, so the estimate vanishes for x^12.
        let p12 = gauss_kronrod(-1.0, 1.0, 1, &|| (), &|_: &mut (), x: f64, o: &mut [f64]| {
            o[0] = x.powi(12);
            Ok(())
        })
        .unwrap();
        assert!(p12.error < 1e-14);
    }

    #[test]
    fn adaptive_resolves_narrow_lorentzian() {
        let width = 1e-3;
        let centre = 1.234;
        let s = spec(5.0, 3, Scheme::Adaptive);
        let out = integrate(&s, true, 1, |x, o| {
            o[0] = width / ((x - centre).powi(2) + width * width);
            Ok(())
        })
        .unwrap();
        let exact = ((5.0 - centre) / width).atan() + (centre / width).atan();
        assert!((out.values[0] - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn adaptive_budget_exhaustion_is_an_error() {
        let mut s = spec(1.0, 3, Scheme::Adaptive);
        s.max_intervals = 70;
        let err = integrate(&s, true, 1, |x, o| {
            o[0] = (x - 0.5).abs().sqrt() * (1000.0 * x).sin();
            Ok(())
        })
        .unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { budget: 70, .. }));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_exact_values() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn cutoff_below_ten_times_largest_frequency_is_rejected() {
        let chain = ChainSpec::uniform(3, 1.0);
        let mut q = QuadratureSpec::for_chain(&chain);
        assert!(q.check(&chain).is_ok());
        q.omega_max *= 0.9;
        assert!(q.check(&chain).is_err());
    }
}
