use floquet_tls::dissipator::{evolve_interaction, evolve_schrodinger, stationary_state, total_generator};
use floquet_tls::floquet::propagator;
use floquet_tls::random::{random_heatpump_baths, random_params, rng};
use floquet_tls::spectroscopy::mollow_spectrum;
use floquet_tls::thermo::{spohn_with_stationary, stationary_currents, stationary_power, von_neumann_entropy};
use floquet_tls::transitions::transition_ops;
use floquet_tls::{Basis, BathSpec, Channel, DensityMatrix, DressedBasis, Generator};
use proptest::prelude::*;

fn generator(seed: u64, vacuum: bool) -> Generator {
    let mut r = rng(seed);
    let p = random_params(&mut r);
    let baths: Vec<BathSpec> = if vacuum {
        vec![BathSpec::vacuum("e", 0.3).unwrap()]
    } else {
        random_heatpump_baths(&mut r).to_vec()
    };
    total_generator(&DressedBasis::new(&p).unwrap(), &baths).unwrap()
}

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (0.0..0.999f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th, ph)| [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_stays_physical(seed in any::<u64>(), vacuum in any::<bool>(), r in bloch(), t in 0.0..200.0f64) {
        let gen = generator(seed, vacuum);
        let rho0 = DensityMatrix::from_bloch(r, Basis::Dressed).unwrap();
        for rho in [evolve_interaction(&gen, &rho0, t).unwrap(), evolve_schrodinger(&gen, &rho0, t).unwrap()] {
            let (herm, trace, neg) = rho.defects();
            prop_assert!(herm <= 1e-12 && trace <= 1e-12 && neg <= 1e-10, "{herm} {trace} {neg}");
        }
    }

    #[test]
    fn stationary_state_is_fixed_point(seed in any::<u64>(), vacuum in any::<bool>(), t in 0.0..50.0f64) {
        let gen = generator(seed, vacuum);
        let st = stationary_state(&gen).unwrap();
        let later = evolve_interaction(&gen, &st, t).unwrap();
        prop_assert!(later.matrix().max_abs_diff(st.matrix()) < 1e-10);
    }

    #[test]
    fn spohn_and_second_law(seed in any::<u64>(), r in bloch()) {
        let gen = generator(seed, false);
        let st = stationary_state(&gen).unwrap();
        let rho = DensityMatrix::from_bloch(r, Basis::Dressed).unwrap();
        prop_assert!(spohn_with_stationary(&gen.superop, &rho, &st).unwrap() <= 1e-10);
        let currents = stationary_currents(&gen).unwrap();
        let sigma: f64 = currents.iter().map(|(l, j)| -j / gen.bath(l).unwrap().temperature).sum();
        prop_assert!(sigma >= -1e-10);
        let total: f64 = currents.iter().map(|c| c.1).sum();
        prop_assert!((stationary_power(&currents) + total).abs() <= 1e-12 * (1.0 + total.abs()));
    }

    #[test]
    fn propagator_is_unitary(seed in any::<u64>(), t in -100.0..100.0f64) {
        let p = random_params(&mut rng(seed));
        prop_assert!(propagator(&p, t).unitarity_defect() < 1e-12);
    }

    #[test]
    fn transition_operators_conjugate_in_pairs(seed in any::<u64>()) {
        let b = DressedBasis::new(&random_params(&mut rng(seed))).unwrap();
        for ch in [Channel::Sigma1, Channel::Sigma3] {
            let set = transition_ops(&b, ch).unwrap();
            for op in set.ops() {
                let c = set.get(-op.harmonic, -op.rabi_index).unwrap();
                prop_assert_eq!(c.matrix, op.matrix.dagger());
                prop_assert!(op.commutation_defect(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_is_bounded(r in bloch()) {
        let s = von_neumann_entropy(&DensityMatrix::from_bloch(r, Basis::Lab).unwrap()).unwrap();
        prop_assert!((-1e-12..=std::f64::consts::LN_2 + 1e-12).contains(&s));
    }

    #[test]
    fn spectrum_weights_are_positive(seed in any::<u64>(), a in 0.01..2.0f64) {
        let s = mollow_spectrum(&random_params(&mut rng(seed)), a).unwrap();
        prop_assert!(s.elastic_weight >= 0.0);
        for l in &s.lines {
            prop_assert!(l.weight >= 0.0 && l.width > 0.0);
        }
    }
}
