//! Frequency-domain Green's functions of the damped chain.
//!
//! The inverse Green's matrix is the complex-symmetric tridiagonal
//!
//! ```text
//! G^{-1}(w)_ii     = -m_i w^2 + i gamma_i w + k_{i-1} + k_i + pin_i
//! G^{-1}(w)_{i,i+1} = -k_i
//! ```
//!
//! Production code factors it once per frequency (no pivoting, `O(N)`) and
//! back-substitutes only the columns that belong to thermostated beads.
//! [`dense`] holds a pivoted LU used to evaluate minors numerically when
//! checking the closed forms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Model;

/// `G^{-1}(omega)` stored as its diagonal and (symmetric) off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseGreenMatrix {
    pub omega: f64,
    pub diagonal: Vec<Complex64>,
    /// Entry `(i, i+1) = (i+1, i)`, i.e. `-k_{i+1}` in 0-based spring labels.
    pub off_diagonal: Vec<f64>,
}

impl InverseGreenMatrix {
    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match row.abs_diff(col) {
            0 => self.diagonal[row],
            1 => Complex64::from(self.off_diagonal[row.min(col)]),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> dense::Matrix {
        let n = self.n();
        let mut m = dense::Matrix::zeros(n);
        for r in 0..n {
            for c in r.saturating_sub(1)..(r + 2).min(n) {
                m[(r, c)] = self.get(r, c);
            }
        }
        m
    }
}

/// Diagonal entry of `G^{-1}` for `bead` at frequency `omega`.
pub fn diagonal_entry(model: &Model, bead: usize, omega: f64) -> Complex64 {
    let chain = model.chain();
    let gamma = model.baths().frictions[bead];
    Complex64::new(
        -chain.masses[bead] * omega * omega
            + chain.springs[bead]
            + chain.springs[bead + 1]
            + chain.pinning[bead],
        gamma * omega,
    )
}

pub fn build_inverse_green(model: &Model, omega: f64) -> InverseGreenMatrix {
    let n = model.n();
    let springs = &model.chain().springs;
    InverseGreenMatrix {
        omega,
        diagonal: (0..n).map(|i| diagonal_entry(model, i, omega)).collect(),
        off_diagonal: (1..n).map(|i| -springs[i]).collect(),
    }
}

/// LU factors of a complex-symmetric tridiagonal matrix, without pivoting.
#[derive(Debug, Clone, Default)]
pub struct TridiagonalLu {
    pivots: Vec<Complex64>,
    multipliers: Vec<Complex64>,
    off: Vec<f64>,
}

impl TridiagonalLu {
    /// Factor in place, reusing buffers.
    pub fn factor(&mut self, matrix: &InverseGreenMatrix) -> Result<()> {
        let n = matrix.n();
        self.pivots.clear();
        self.multipliers.clear();
        self.off.clear();
        self.off.extend_from_slice(&matrix.off_diagonal);
        let scale = matrix
            .diagonal
            .iter()
            .map(|d| d.norm())
            .chain(matrix.off_diagonal.iter().map(|b| b.abs()))
            .fold(0.0, f64::max);
        let tiny = 1e-300_f64.max(1e-15 * scale);
        let singular = || Error::Singular {
            omega: matrix.omega,
        };
        let mut pivot = matrix.diagonal[0];
        if pivot.norm() <= tiny {
            return Err(singular());
        }
        self.pivots.push(pivot);
        for i in 1..n {
            let b = matrix.off_diagonal[i - 1];
            let l = b / pivot;
            pivot = matrix.diagonal[i] - l * b;
            if !(pivot.norm() > tiny) {
                return Err(singular());
            }
            self.multipliers.push(l);
            self.pivots.push(pivot);
        }
        Ok(())
    }

    pub fn determinant(&self) -> Complex64 {
        self.pivots.iter().product()
    }

    /// Column `col` of the inverse, written into `out` (length `N`).
    pub fn solve_unit(&self, col: usize, out: &mut [Complex64]) {
        let n = self.pivots.len();
        let zero = Complex64::new(0.0, 0.0);
        out[..col].iter_mut().for_each(|x| *x = zero);
        out[col] = Complex64::new(1.0, 0.0);
        for i in col + 1..n {
            out[i] = -self.multipliers[i - 1] * out[i - 1];
        }
        out[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            out[i] = (out[i] - self.off[i] * out[i + 1]) / self.pivots[i];
        }
    }
}

/// Reusable per-thread workspace computing Green's-function columns.
#[derive(Debug, Clone)]
pub struct GreenSolver<'a> {
    model: &'a Model,
    columns: Vec<usize>,
    lu: TridiagonalLu,
    matrix: InverseGreenMatrix,
    buffer: Vec<Complex64>,
}

impl<'a> GreenSolver<'a> {
    /// Solver for the columns of the given beads.
    pub fn new(model: &'a Model, columns: Vec<usize>) -> Self {
        let n = model.n();
        Self {
            model,
            buffer: vec![Complex64::new(0.0, 0.0); n * columns.len()],
            columns,
            lu: TridiagonalLu::default(),
            matrix: build_inverse_green(model, 0.0),
        }
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// Factor `G^{-1}(omega)` and solve for every requested column.
    pub fn solve(&mut self, omega: f64) -> Result<()> {
        self.matrix.omega = omega;
        for i in 0..self.model.n() {
            self.matrix.diagonal[i] = diagonal_entry(self.model, i, omega);
        }
        self.lu.factor(&self.matrix)?;
        let n = self.model.n();
        for (slot, &col) in self.columns.iter().enumerate() {
            self.lu
                .solve_unit(col, &mut self.buffer[slot * n..(slot + 1) * n]);
        }
        Ok(())
    }

    /// `G_{row, columns[slot]}` from the last [`solve`](Self::solve).
    pub fn element(&self, row: usize, slot: usize) -> Complex64 {
        self.buffer[slot * self.model.n() + row]
    }

    pub fn determinant(&self) -> Complex64 {
        self.lu.determinant()
    }
}

/// Green's-function elements between thermostated beads at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenElements {
    pub omega: f64,
    /// `(l, m, G_lm)` for thermostated `l <= m`.
    pub values: Vec<(usize, usize, Complex64)>,
}

impl GreenElements {
    /// `G_lm`, using the symmetry `G_lm = G_ml`.
    pub fn get(&self, l: usize, m: usize) -> Option<Complex64> {
        let (a, b) = if l <= m { (l, m) } else { (m, l) };
        self.values
            .iter()
            .find(|(x, y, _)| *x == a && *y == b)
            .map(|(_, _, g)| *g)
    }
}

pub fn green_elements(model: &Model, omega: f64) -> Result<GreenElements> {
    let beads = model.thermostated();
    let mut solver = GreenSolver::new(model, beads.clone());
    solver.solve(omega)?;
    let mut values = Vec::new();
    for (slot, &m) in beads.iter().enumerate() {
        for &l in beads.iter().filter(|&&l| l <= m) {
            values.push((l, m, solver.element(l, slot)));
        }
    }
    Ok(GreenElements { omega, values })
}

/// Closed-form determinant of the minor `C_{row,col}` (row `row` and column
/// `col` deleted from `G^{-1}`) for the four corner pairs linking the first
/// two beads to the last two. Indices are 0-based; either order is accepted.
///
/// With `z_1`, `z_N` the first and last diagonal entries and
/// `P = prod_{i=2}^{N-2} (-k_i)` (1-based springs):
///
/// ```text
/// det C_{1,N}   =  k_1 k_{N-1} P
/// det C_{1,N-1} = -k_1 P z_N
/// det C_{2,N}   = -k_{N-1} P z_1
/// det C_{2,N-1} =  P z_1 z_N
/// ```
///
/// The signs follow the cofactor convention `G_lm det(G^{-1}) = (-1)^{l+m} det C_lm`.
pub fn analytic_minor(model: &Model, omega: f64, row: usize, col: usize) -> Result<Complex64> {
    let n = model.n();
    let (a, b) = if row <= col { (row, col) } else { (col, row) };
    if n < 3 || a > 1 || b + 2 < n {
        return Err(Error::UnsupportedMinor {
            row: row + 1,
            col: col + 1,
        });
    }
    let k = &model.chain().springs;
    let interior: f64 = (2..=n - 2).map(|i| -k[i]).product();
    let z_first = diagonal_entry(model, 0, omega);
    let z_last = diagonal_entry(model, n - 1, omega);
    let value = match (a, n - 1 - b) {
        (0, 0) => Complex64::from(k[1] * k[n - 1] * interior),
        (0, 1) => -k[1] * interior * z_last,
        (1, 0) => -k[n - 1] * interior * z_first,
        (1, 1) => interior * z_first * z_last,
        _ => unreachable!(),
    };
    Ok(value)
}

/// One row of a [`general_minor_check`] report (0-based pair).
#[derive(Debug, Clone, PartialEq)]
pub struct MinorComparison {
    pub row: usize,
    pub col: usize,
    pub analytic: Complex64,
    pub numerical: Complex64,
    /// `| |analytic| - |numerical| | / |numerical|`.
    pub magnitude_error: f64,
    /// `|analytic - numerical| / |numerical|`, which also checks the sign.
    pub signed_error: f64,
}

/// Compare the corner-pair closed forms with minors evaluated by dense LU.
///
/// Requires `N >= 5`, thermostats exactly on beads `1, 2, N-1, N`, and one
/// common friction on those beads.
pub fn general_minor_check(model: &Model, omega: f64) -> Result<Vec<MinorComparison>> {
    let n = model.n();
    if n < 5 {
        return Err(Error::Layout(format!("minor check needs N >= 5 (got {n})")));
    }
    let expected = vec![0, 1, n - 2, n - 1];
    if model.thermostated() != expected {
        return Err(Error::Layout(
            "minor check needs thermostats exactly on beads 1, 2, N-1, N".into(),
        ));
    }
    let g = &model.baths().frictions;
    if expected.iter().any(|&i| g[i] != g[0]) {
        return Err(Error::Layout(
            "minor check needs one common friction on the thermostated beads".into(),
        ));
    }
    let full = build_inverse_green(model, omega).to_dense();
    [(0, n - 1), (0, n - 2), (1, n - 1), (1, n - 2)]
        .into_iter()
        .map(|(row, col)| {
            let analytic = analytic_minor(model, omega, row, col)?;
            let numerical = full.minor(row, col).determinant();
            let scale = numerical.norm();
            Ok(MinorComparison {
                row,
                col,
                analytic,
                numerical,
                magnitude_error: (analytic.norm() - scale).abs() / scale,
                signed_error: (analytic - numerical).norm() / scale,
            })
        })
        .collect()
}

/// Small dense complex matrices with a partially pivoted LU determinant.
pub mod dense {
    use std::ops::{Index, IndexMut};

    use num_complex::Complex64;

    #[derive(Debug, Clone, PartialEq)]
    pub struct Matrix {
        n: usize,
        data: Vec<Complex64>,
    }

    impl Matrix {
        pub fn zeros(n: usize) -> Self {
            Self {
                n,
                data: vec![Complex64::new(0.0, 0.0); n * n],
            }
        }

        pub fn n(&self) -> usize {
            self.n
        }

        /// The matrix with row `row` and column `col` removed.
        pub fn minor(&self, row: usize, col: usize) -> Self {
            let mut out = Self::zeros(self.n - 1);
            for (r_out, r) in (0..self.n).filter(|&r| r != row).enumerate() {
                for (c_out, c) in (0..self.n).filter(|&c| c != col).enumerate() {
                    out[(r_out, c_out)] = self[(r, c)];
                }
            }
            out
        }

        pub fn determinant(&self) -> Complex64 {
            let n = self.n;
            let mut a = self.data.clone();
            let mut det = Complex64::new(1.0, 0.0);
            for k in 0..n {
                let p = (k..n)
                    .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                    .unwrap_or(k);
                if a[p * n + k].norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                if p != k {
                    for c in 0..n {
                        a.swap(k * n + c, p * n + c);
                    }
                    det = -det;
                }
                let pivot = a[k * n + k];
                det *= pivot;
                for r in k + 1..n {
                    let f = a[r * n + k] / pivot;
                    if f.norm() == 0.0 {
                        continue;
                    }
                    for c in k + 1..n {
                        let t = a[k * n + c];
                        a[r * n + c] -= f * t;
                    }
                }
            }
            det
        }
    }

    impl Index<(usize, usize)> for Matrix {
        type Output = Complex64;
        fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
            &self.data[r * self.n + c]
        }
    }

    impl IndexMut<(usize, usize)> for Matrix {
        fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
            &mut self.data[r * self.n + c]
        }
    }
}
