use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tgho_core::md::{self, bbk_step, energy, FkPotentialSpec, MdConfig, MdState};
use tgho_core::transport::currents;
use tgho_core::{BathSpec, ChainSpec, Model, QuadratureSpec, Regime};

fn short(realizations: usize, production: u64, seed: u64) -> MdConfig {
    MdConfig {
        equilibration_steps: 100_000,
        production_steps: production,
        realizations,
        base_seed: seed,
        ..MdConfig::default()
    }
}

#[test]
fn frictionless_run_conserves_energy() {
    let chain = ChainSpec::from_springs(vec![1.0, 2.0, 0.5, 1.5, 1.0, 0.3]);
    let baths = BathSpec::edges(5, 1, 1, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u0 = vec![0.3, -0.1, 0.25, 0.0, -0.2];
    let v0 = vec![0.0, 0.4, -0.3, 0.2, 0.1];
    let mut s = MdState::new(&chain, None, u0, v0);
    let e0 = energy(&chain, None, &s.positions, &s.velocities);
    let mut worst = 0.0f64;
    for step in 0..1_000_000u64 {
        bbk_step(&mut s, &chain, None, &baths, 0.005, &mut rng).unwrap();
        if step % 1000 == 0 {
            let e = energy(&chain, None, &s.positions, &s.velocities);
            worst = worst.max(((e - e0) / e0).abs());
        }
    }
    let e1 = energy(&chain, None, &s.positions, &s.velocities);
    worst = worst.max(((e1 - e0) / e0).abs());
    assert!(worst < 1e-4, "relative drift {worst:e}");
}

#[test]
fn frictionless_fk_run_conserves_energy() {
    let chain = ChainSpec::from_springs(vec![0.1, 0.1, 0.1, 1.0, 1.0, 1.0]);
    let fk = FkPotentialSpec::split(5, 2, 0.5, 1.0, 1.0);
    let baths = BathSpec::edges(5, 1, 1, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = MdState::new(&chain, Some(&fk), vec![0.1; 5], vec![0.5, 0.0, -0.5, 0.2, 0.0]);
    let e0 = energy(&chain, Some(&fk), &s.positions, &s.velocities);
    let kinetic_scale = 0.5 * (0.25 + 0.25 + 0.04);
    for _ in 0..200_000 {
        bbk_step(&mut s, &chain, Some(&fk), &baths, 0.005, &mut rng).unwrap();
    }
    let e1 = energy(&chain, Some(&fk), &s.positions, &s.velocities);
    assert!((e1 - e0).abs() < 1e-3 * kinetic_scale, "{e0} -> {e1}");
}

#[test]
fn equilibrium_obeys_equipartition() {
    let chain = ChainSpec::from_springs(vec![1.0, 0.5, 2.0, 1.0, 0.7, 1.0]).with_masses(vec![1.0, 2.0, 0.5, 1.5, 1.0]);
    let t = 0.6;
    let baths = BathSpec::edges(5, 2, 1, 1.0).with_bath_temperatures(&[t; 3]);
    let model = Model::new(chain.clone(), baths).unwrap();
    let r = md::run(&model, None, &short(32, 1_000_000, 12)).unwrap();
    for (i, est) in r.velocity_variance.iter().enumerate() {
        let expected = t / chain.masses[i];
        assert!(est.within(expected, 2.0), "bead {}: <v^2> = {} +- {}, expected {expected}", i + 1, est.mean, est.stderr);
    }
    for (b, est) in r.bond_currents.iter().enumerate() {
        assert!(est.within(0.0, 2.0), "bond {}: {} +- {}", b + 1, est.mean, est.stderr);
    }
}

#[test]
fn harmonic_current_matches_landauer() {
    let chain = ChainSpec::from_springs(vec![1.5, 1.5, 1.0, 1.0, 0.3, 0.3]);
    let baths = BathSpec::edges(5, 2, 2, 1.0).with_bath_temperatures(&[1.0, 0.5, 0.2, 0.1]);
    let model = Model::new(chain, baths).unwrap();
    let landauer = currents(&model, &QuadratureSpec::for_chain(model.chain()), Regime::Classical)
        .unwrap()
        .total_forward();
    let r = md::run(&model, None, &short(8, 1_000_000, 5)).unwrap();
    let tol = (0.05 * landauer.abs()).max(2.0 * r.stderr);
    assert!((r.mean_current - landauer).abs() <= tol, "MD {} +- {} vs Landauer {landauer}", r.mean_current, r.stderr);
    // steady-state continuity through the unthermostated bead 3
    let (a, b) = (r.bond_currents[1], r.bond_currents[2]);
    let joint = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= 2.0 * joint, "{a:?} vs {b:?}");
    assert!(r.window_means.iter().all(|w| w.is_finite()));
}

#[test]
fn symmetric_fk_chain_does_not_rectify() {
    let chain = ChainSpec::uniform(5, 1.0);
    let fk = FkPotentialSpec::split(5, 2, 1.0, 1.0, 1.0);
    let out = md::run_fk_rectification(&chain, Some(&fk), 1.0, 1.0, 0.1, &short(8, 500_000, 21)).unwrap();
    assert!(out.forward.mean_current > 0.0 && out.reverse.mean_current < 0.0);
    assert!((out.ratio - 1.0).abs() <= 2.0 * out.ratio_stderr, "R = {} +- {}", out.ratio, out.ratio_stderr);
}
