use certiroot::{
    dilate_box, isolate, test_c0, test_jc, test_jc_strict, test_mk, AlignedBox, Dilation, Dyadic, FunctionSystem,
    Interval, IntervalVector, Roi, RoundingContext, SolverConfig,
};
use proptest::prelude::*;

fn circle_line() -> FunctionSystem {
    FunctionSystem::parse("vars x,y; f1 = x^2 + y^2 - 1; f2 = x - y").unwrap()
}

fn sine_parabola() -> FunctionSystem {
    FunctionSystem::parse("vars x,y; f1 = sin(x) - y; f2 = x^2 - y - 1/2").unwrap()
}

fn roi4() -> Roi {
    Roi::new(vec![Dyadic::from_i64(-2), Dyadic::from_i64(-2)], Dyadic::from_i64(4)).unwrap()
}

fn cell() -> impl Strategy<Value = AlignedBox> {
    (0u32..=9).prop_flat_map(|depth| {
        proptest::collection::vec(0u64..1 << depth, 2).prop_map(move |c| AlignedBox::new(depth, c))
    })
}

fn point_in(v: &[f64], b: &IntervalVector) -> bool {
    v.iter().zip(b.iter()).all(|(x, s)| {
        let (lo, hi) = s.to_f64_pair();
        lo <= *x && *x <= hi
    })
}

fn strictly_outside(v: &[f64], b: &IntervalVector, eps: f64) -> bool {
    v.iter().zip(b.iter()).any(|(x, s)| {
        let (lo, hi) = s.to_f64_pair();
        *x < lo - eps || *x > hi + eps
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn jc_implies_strict_jc(c in cell()) {
        let ctx = RoundingContext::default();
        for sys in [circle_line(), sine_parabola()] {
            let b = c.realize(&roi4());
            if test_jc(&sys, &b, &ctx).success {
                prop_assert!(test_jc_strict(&sys, &b, &ctx).success);
            }
        }
    }

    #[test]
    fn success_persists_at_higher_precision(c in cell(), extra in 1u32..4) {
        let low = RoundingContext::default();
        let high = low.with_precision(low.precision_bits * (1 + extra));
        for sys in [circle_line(), sine_parabola()] {
            let b = c.realize(&roi4());
            if test_c0(&sys, &b, &low).success {
                prop_assert!(test_c0(&sys, &b, &high).success);
            }
            if test_jc(&sys, &b, &low).success {
                prop_assert!(test_jc(&sys, &b, &high).success);
            }
            if test_mk(&sys, &b, &low).success {
                prop_assert!(test_mk(&sys, &b, &high).success);
            }
        }
    }

    #[test]
    fn circle_line_predicates_agree_with_roots(c in cell()) {
        let ctx = RoundingContext::default();
        let sys = circle_line();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let roots = [[h, h], [-h, -h]];
        let b = c.realize(&roi4());
        if test_c0(&sys, &b, &ctx).success {
            prop_assert!(roots.iter().all(|r| !point_in(r, &b)));
        }
        if test_mk(&sys, &b, &ctx).success {
            let b2 = dilate_box(&b, Dilation::Two);
            prop_assert!(roots.iter().any(|r| point_in(r, &b2)));
        }
        if test_jc(&sys, &b, &ctx).success {
            let b3 = dilate_box(&b, Dilation::Three);
            prop_assert!(roots.iter().filter(|r| !strictly_outside(*r, &b3, 1e-9)).count() <= 1);
        }
    }

    #[test]
    fn isolation_output_is_disjoint_and_deterministic(
        lo in (-8i64..=4, -8i64..=4),
        shift in 0i64..=2,
    ) {
        let sys = circle_line();
        let w = Dyadic::pow2(shift);
        let roi = Roi::new(vec![Dyadic::from_i64(lo.0), Dyadic::from_i64(lo.1)], w).unwrap();
        let cfg = SolverConfig { stats_enabled: true, ..SolverConfig::default() };
        let mut a = isolate(&sys, &roi, &cfg).unwrap();
        let mut b = isolate(&sys, &roi, &cfg).unwrap();
        a.stats.wall_time = Default::default();
        b.stats.wall_time = Default::default();
        prop_assert_eq!(&a.boxes, &b.boxes);
        prop_assert_eq!(&a.stats, &b.stats);
        let doubled = dilate_box(&roi.to_box(), Dilation::Two);
        for (i, x) in a.boxes.iter().enumerate() {
            prop_assert!(x.region.iter().zip(doubled.iter()).all(|(s, t)| t.lo() <= s.lo() && s.hi() <= t.hi()));
            for y in &a.boxes[i + 1..] {
                let meet = x.region.iter().zip(y.region.iter()).all(|(s, t): (&Interval, &Interval)| s.lo() < t.hi() && t.lo() < s.hi());
                prop_assert!(!meet);
            }
        }
    }
}
