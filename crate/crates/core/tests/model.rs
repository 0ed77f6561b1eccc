use proptest::prelude::*;
use tgho_core::model::{linear_gradient_profile, reverse_temperatures};
use tgho_core::{BathSpec, ChainSpec, Model};

proptest! {
    #[test]
    fn reversal_is_an_involution(temps in prop::collection::vec(0.0f64..10.0, 1..20)) {
        let n = temps.len();
        let baths = BathSpec::edges(n, 1, 1, 1.0).with_temperatures(temps);
        let twice = reverse_temperatures(&reverse_temperatures(&baths));
        prop_assert_eq!(twice, baths);
    }

    #[test]
    fn gradient_endpoints_are_exact(top in -5.0f64..5.0, bottom in -5.0f64..5.0, nb in 2usize..50) {
        let p = linear_gradient_profile(top, bottom, nb).unwrap();
        prop_assert_eq!(p.len(), nb);
        prop_assert_eq!(p[0], top);
        prop_assert_eq!(p[nb - 1], bottom);
    }

    #[test]
    fn mirror_layouts_reverse_by_mirroring(nb in 1usize..5, ni in 0usize..4, temps in prop::collection::vec(0.0f64..5.0, 8)) {
        let n = 2 * nb + ni;
        let baths = BathSpec::edges(n, nb, nb, 1.0).with_bath_temperatures(&temps[..2 * nb]);
        let model = Model::new(ChainSpec::uniform(n, 1.0), baths.clone()).unwrap();
        let rev = model.reversed().unwrap();
        for i in 0..n {
            prop_assert_eq!(rev.baths().temperatures[i], baths.temperatures[n - 1 - i]);
        }
        prop_assert_eq!(rev.reversed().unwrap(), model);
    }
}

#[test]
fn named_parameter_sets_validate() {
    let fig3 = BathSpec::edges(5, 2, 2, 1.0).with_bath_temperatures(&[1.0, 0.5, 0.2, 0.1]);
    assert!(Model::new(ChainSpec::from_springs(vec![0.1, 0.1, 1.0, 1.0, 2.0, 2.0]), fig3).is_ok());
    let fig6 = BathSpec::edges(5, 2, 2, 1.0).with_bath_temperatures(&[10.0, 7.5, 2.5, 0.0]);
    assert!(Model::new(ChainSpec::from_springs(vec![2.0, 2.0, 1.0, 1.0, 0.1, 0.1]), fig6).is_ok());
    let (nb, ni) = (4, 20);
    let n = 2 * nb + ni;
    let mut temps = linear_gradient_profile(1.0, 0.5, nb).unwrap();
    temps.extend(linear_gradient_profile(0.2, 0.1, nb).unwrap());
    let mut springs = vec![1.0; n + 1];
    for k in &mut springs[n + 1 - nb..] {
        *k = 0.1;
    }
    let lengthdep = BathSpec::edges(n, nb, nb, 1.0).with_bath_temperatures(&temps);
    assert!(Model::new(ChainSpec::from_springs(springs), lengthdep).is_ok());
}
