use num_rational::BigRational;
use proptest::prelude::*;

use resonance_core::poly::ratio;
use resonance_core::radial::{GeneralSolver, RadialPotential, VolterraConfig};
use resonance_core::variational::{comparison_bound, variational_J, variational_refinement, RadialDiscretization};
use resonance_core::wronskian::wronskian_enclosure;
use resonance_core::yukawa_interior::{u_int_trace, AlphaValues};
use resonance_core::{Enclosure, Sign};

fn kappa(num: i64) -> BigRational {
    ratio(num, 10_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn below_first_zero_is_certified_positive(num in 1i64..16_762) {
        let s = wronskian_enclosure(&kappa(num)).unwrap();
        prop_assert_eq!(s.sign, Sign::Positive);
    }

    #[test]
    fn interior_partial_sums_nest(num in 1i64..30_000) {
        let a = AlphaValues::by_recurrence(&kappa(num), 20);
        let traces: Vec<_> = (1..=5).filter_map(|k| u_int_trace(&a, k).ok()).collect();
        prop_assert!(!traces.is_empty());
        for w in traces.windows(2) {
            prop_assert!(w[1].value.is_subset_of(&w[0].value));
            prop_assert!(w[1].derivative.is_subset_of(&w[0].derivative));
        }
    }

    #[test]
    fn volterra_sign_matches_certified(num in 1_000i64..25_000) {
        let solver = GeneralSolver::new(&RadialPotential::Yukawa, 3, VolterraConfig { density: 256, ..Default::default() }).unwrap();
        let k = num as f64 / 10_000.0;
        let w = solver.wronskian(k).unwrap().value;
        match wronskian_enclosure(&kappa(num)).unwrap().sign {
            Sign::Positive => prop_assert!(w > 0.0),
            Sign::Negative => prop_assert!(w < 0.0),
            Sign::Indeterminate => {}
        }
    }

    #[test]
    fn volterra_wronskian_scales(c in 0.25f64..4.0, k in 0.1f64..3.0) {
        let cfg = VolterraConfig { density: 128, ..Default::default() };
        let base = GeneralSolver::new(&RadialPotential::Yukawa, 3, cfg).unwrap();
        let scaled = GeneralSolver::new(&RadialPotential::scaled(c, RadialPotential::Yukawa).unwrap(), 3, cfg).unwrap();
        let a = base.wronskian(k).unwrap().value;
        let b = scaled.wronskian(k / c).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn variational_is_linear_in_scale(c in 0.1f64..10.0) {
        let d = RadialDiscretization::standard(3, 64).unwrap();
        let j = variational_J(&RadialPotential::Yukawa, 3, &d).unwrap().j_estimate;
        let jc = variational_J(&RadialPotential::scaled(c, RadialPotential::Yukawa).unwrap(), 3, &d).unwrap().j_estimate;
        prop_assert!((jc / (c * j) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn refinement_never_lowers_j(cells in 8usize..96, n in 3u32..7) {
        let d = RadialDiscretization::standard(n, cells).unwrap();
        let hist = variational_refinement(&RadialPotential::Exponential, n, &d, 3).unwrap().refinement_history;
        for w in hist.windows(2) {
            prop_assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn comparison_bound_is_rounded_down(lo in 0.1f64..10.0, width in 0.0f64..1.0, c0 in 1e-3f64..1e3) {
        let b = comparison_bound(Enclosure::new(lo, lo + width), c0).unwrap();
        prop_assert!(b.mul_add(c0, -lo) <= 0.0);
        prop_assert!(b >= (lo / c0).next_down());
    }
}
