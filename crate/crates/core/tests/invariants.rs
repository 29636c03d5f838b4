use cat_teleport::protocols::parity::{parity_oracle, ParityModel};
use cat_teleport::protocols::states::{build_ecs, ChannelSpec, EcsSpec};
use cat_teleport::protocols::teleport::{teleport_ecs, Engine, TeleportOptions};
use cat_teleport::{
    concurrence_closed_form, concurrence_pure, success_prob_closed_form, Bipartition, BeamSplitter, ChannelSign,
    CoherentSuperposition, Complex64, FockState, PartitionKind,
};
use proptest::prelude::*;

fn complex(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex64::new(re, im))
}

fn nonzero_pair() -> impl Strategy<Value = (Complex64, Complex64)> {
    (complex(1.0), complex(1.0)).prop_filter("nonzero", |(a, b)| a.norm() + b.norm() > 1e-3)
}

fn superposition(modes: usize) -> impl Strategy<Value = CoherentSuperposition> {
    prop::collection::vec((complex(1.0), prop::collection::vec(complex(1.0), modes)), 1..=4)
        .prop_filter_map("degenerate", move |terms| CoherentSuperposition::new(modes, terms).ok()?.normalize().ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_optics_preserve_the_norm(s in superposition(3), phi in -3.2f64..3.2) {
        let t = s.balanced_bs(0, 2).unwrap().raw_bs(1, 0).unwrap().phase_shift(1, phi).unwrap();
        prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-10);
        let back = s.balanced_bs(1, 2).unwrap().balanced_bs(1, 2).unwrap();
        prop_assert!((back.overlap(&s).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_beam_splitter_is_unitary(re in 0.0f64..1.2, im in -1.2f64..1.2, cutoff in 2usize..8) {
        let (a, _) = FockState::coherent(Complex64::new(re, im), cutoff).unwrap();
        let s = a.tensor(&FockState::coherent(Complex64::new(im, re), cutoff).unwrap().0).normalize().unwrap();
        for variant in [BeamSplitter::Raw, BeamSplitter::Balanced] {
            let t = s.apply_two_mode_bs(0, 1, variant).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_is_bounded_and_symmetric(s in superposition(3), side in 0usize..3) {
        let p = Bipartition::new(&[side], 3).unwrap();
        let a = concurrence_pure(&s, &p).unwrap();
        let b = concurrence_pure(&s, &p.swapped()).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn minus_channel_succeeds_half_the_time((ep, em) in nonzero_pair(), alpha in 0.2f64..2.5, phase in -3.2f64..3.2) {
        let input = EcsSpec::new(ep, em, Complex64::from_polar(alpha, phase), 2).unwrap();
        let channel = ChannelSpec::for_input(ChannelSign::Minus, &input).unwrap();
        let r = teleport_ecs(&input, &channel, Engine::Analytic, &TeleportOptions::default()).unwrap();
        prop_assert!((r.success_probability - 0.5).abs() < 1e-9);
        prop_assert!(r.total_probability() > 1.0 - 1e-9 && r.total_probability() < 1.0 + 1e-9);
        prop_assert!(r.outcomes.iter().all(|o| o.n == 0 || o.m == 0));
    }

    #[test]
    fn closed_forms_stay_in_the_unit_interval(alpha in 0.0f64..4.0) {
        for sign in [ChannelSign::Plus, ChannelSign::Minus] {
            prop_assert!((0.0..=0.5 + 1e-15).contains(&success_prob_closed_form(sign, alpha)));
            for kind in [PartitionKind::First, PartitionKind::Second, PartitionKind::Third] {
                let v = concurrence_closed_form(sign, kind, alpha);
                prop_assert!((0.0..=1.0).contains(&v), "{sign} {kind} {alpha}: {v}");
            }
        }
    }

    #[test]
    fn even_and_odd_inputs_are_orthogonal(alpha in 0.1f64..2.0) {
        let a = Complex64::new(alpha, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let even = build_ecs(&EcsSpec::new(one, one, a, 2).unwrap()).unwrap();
        let odd = build_ecs(&EcsSpec::new(one, -one, a, 2).unwrap()).unwrap();
        prop_assert!(even.overlap(&odd).unwrap().norm() < 1e-12);
    }

    #[test]
    fn parity_branches_partition_the_field(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let (field, _) = FockState::coherent(Complex64::new(re, im), 40).unwrap();
        let m = parity_oracle(&field, &ParityModel::canonical(1.3).unwrap()).unwrap();
        prop_assert!((m.even.probability + m.odd.probability - 1.0).abs() < 1e-12);
        let x = (-2.0 * (re * re + im * im)).exp();
        prop_assert!((m.even.probability - (1.0 + x) / 2.0).abs() < 1e-9);
    }
}
