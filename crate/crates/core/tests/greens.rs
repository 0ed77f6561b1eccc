use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use tgho_core::greens::{analytic_minor, build_inverse_green, general_minor_check, green_elements, GreenSolver};
use tgho_core::{BathSpec, ChainSpec, Model};

fn dense(model: &Model, omega: f64) -> DMatrix<Complex64> {
    let g = build_inverse_green(model, omega);
    let n = model.n();
    DMatrix::from_fn(n, n, |r, c| g.get(r, c))
}

fn minor(m: &DMatrix<Complex64>, row: usize, col: usize) -> DMatrix<Complex64> {
    m.clone().remove_row(row).remove_column(col)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn four_bath(springs: Vec<f64>, gamma: f64) -> Model {
    let n = springs.len() - 1;
    let baths = BathSpec::edges(n, 2, 2, gamma).with_bath_temperatures(&[1.0, 0.5, 0.2, 0.1]);
    Model::new(ChainSpec::from_springs(springs), baths).unwrap()
}

fn random_model() -> impl Strategy<Value = Model> {
    (3usize..=12)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(0.2f64..3.0, n),
                prop::collection::vec(0.05f64..2.5, n + 1),
                prop::collection::vec(0.0f64..1.0, n),
                prop::collection::vec(0.1f64..2.0, n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(n, masses, springs, pinning, gammas, bath)| {
            let mut frictions = vec![0.0; n];
            frictions[0] = gammas[0];
            frictions[n - 1] = gammas[n - 1];
            for i in 1..n - 1 {
                if bath[i] {
                    frictions[i] = gammas[i];
                }
            }
            let thermostated: Vec<usize> = (0..n).filter(|&i| frictions[i] > 0.0).collect();
            let (hot, cold) = thermostated.split_at(thermostated.len() / 2);
            let baths = BathSpec {
                frictions,
                temperatures: vec![1.0; n],
                hot: hot.to_vec(),
                cold: cold.to_vec(),
            };
            let chain = ChainSpec::from_springs(springs)
                .with_masses(masses)
                .with_pinning(pinning);
            Model::new(chain, baths).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tridiagonal_solve_matches_dense_inverse(model in random_model(), omega in 0.01f64..5.0) {
        let inv = dense(&model, omega).try_inverse().unwrap();
        let cols: Vec<usize> = (0..model.n()).collect();
        let mut solver = GreenSolver::new(&model, cols.clone());
        solver.solve(omega).unwrap();
        let scale = inv.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (slot, &c) in cols.iter().enumerate() {
            for r in 0..model.n() {
                let err = (solver.element(r, slot) - inv[(r, c)]).norm();
                prop_assert!(err <= 1e-12 * scale, "G[{r},{c}] off by {err:e}");
            }
        }
    }

    #[test]
    fn cofactor_identity_holds(model in random_model(), omega in 0.01f64..5.0) {
        let full = dense(&model, omega);
        let det = full.determinant();
        let n = model.n();
        let mut solver = GreenSolver::new(&model, (0..n).collect());
        solver.solve(omega).unwrap();
        prop_assert!(rel(solver.determinant(), det) < 1e-10);
        for l in 0..n {
            for m in 0..n {
                let sign = if (l + m) % 2 == 0 { 1.0 } else { -1.0 };
                let cof = minor(&full, l, m).determinant() * sign;
                let lhs = solver.element(l, m) * det;
                prop_assert!(rel(lhs, cof) < 1e-9, "({l},{m}): {lhs} vs {cof}");
            }
        }
    }

    #[test]
    fn inverse_green_matrix_is_complex_symmetric(model in random_model(), omega in -5.0f64..5.0) {
        let m = dense(&model, omega);
        prop_assert_eq!(m.transpose(), m.clone());
        for r in 0..model.n() {
            for c in 0..model.n() {
                if r.abs_diff(c) > 1 {
                    prop_assert_eq!(m[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn green_elements_are_symmetric_and_even(model in random_model(), omega in 0.01f64..5.0) {
        let plus = green_elements(&model, omega).unwrap();
        let minus = green_elements(&model, -omega).unwrap();
        let beads = model.thermostated();
        for &l in &beads {
            for &m in &beads {
                let g = plus.get(l, m).unwrap();
                prop_assert!((g.norm() - plus.get(m, l).unwrap().norm()).abs() <= 1e-14 * g.norm());
                let gm = minus.get(l, m).unwrap();
                prop_assert!((gm - g.conj()).norm() <= 1e-12 * g.norm());
            }
        }
    }

    #[test]
    fn corner_minors_match_dense_for_random_chains(
        springs in prop::collection::vec(0.05f64..3.0, 9),
        gamma in 0.1f64..2.0,
        omega in 0.0f64..6.0,
    ) {
        let model = four_bath(springs, gamma);
        for row in general_minor_check(&model, omega).unwrap() {
            prop_assert!(row.magnitude_error < 1e-10, "{row:?}");
            prop_assert!(row.signed_error < 1e-10, "{row:?}");
        }
    }

    #[test]
    fn interior_springs_do_not_change_minor_ratio(
        interior in prop::collection::vec(0.1f64..3.0, 4),
        k0 in 0.1f64..3.0,
        k1 in 0.1f64..3.0,
        omega in 0.01f64..4.0,
    ) {
        // k_0 = k_N and k_1 = k_{N-1} on an 8-bead chain
        let mut springs = vec![k0, k1];
        springs.extend(&interior);
        springs.push(1.0);
        springs.push(k1);
        springs.push(k0);
        let model = four_bath(springs.clone(), 1.0);
        let ratio = |m: &Model| {
            let n = m.n();
            analytic_minor(m, omega, 0, n - 2).unwrap().norm()
                / analytic_minor(m, omega, 1, n - 1).unwrap().norm()
        };
        let mut symmetric = springs;
        for s in &mut symmetric[2..7] {
            *s = 1.0;
        }
        let reference = ratio(&four_bath(symmetric, 1.0));
        prop_assert!((ratio(&model) - reference).abs() <= 1e-12 * reference);
    }
}

#[test]
fn five_bead_minors_at_many_frequencies() {
    let model = four_bath(vec![0.3, 1.7, 1.0, 0.6, 0.9, 2.2], 1.0);
    let full_at = |w: f64| dense(&model, w);
    for i in 0..1000 {
        let omega = 5.0 * i as f64 / 999.0;
        let full = full_at(omega);
        for (l, m) in [(0, 4), (0, 3), (1, 4), (1, 3)] {
            let sign = if (l + m) % 2 == 0 { 1.0 } else { -1.0 };
            let oracle = minor(&full, l, m).determinant() * sign;
            let closed = analytic_minor(&model, omega, l, m).unwrap() * sign;
            assert!(rel(closed, oracle) < 1e-10, "w={omega} ({l},{m})");
        }
    }
}

#[test]
fn uniform_chain_corner_minor_is_power_of_k() {
    for n in 5..=9 {
        let k = 0.7;
        let model = four_bath(vec![k; n + 1], 1.0);
        let corner = analytic_minor(&model, 1.3, 0, n - 1).unwrap();
        let magnitude = k.powi(n as i32 - 1);
        assert!((corner.norm() - magnitude).abs() < 1e-14);
        // signed value carries (-1)^(N-1) relative to the unsigned form
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        assert!((corner.re - sign * magnitude).abs() < 1e-14);
    }
}
