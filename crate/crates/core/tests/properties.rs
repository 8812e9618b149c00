use flint_core::cfrac::{convergents, expand_rational, CFExpansion};
use flint_core::criteria::{
    classify_sequence, classify_series, implied_mu_bound_with, MuBounds, Observation, Strength, VerdictKind,
};
use flint_core::mpcore::sine_bound_slacks;
use flint_core::series::{partial_sum, spikes, spikes_exhaustive, term, SeriesParams};
use flint_core::{sin_of_integer, Ball, Mag};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn ratio(n: u32, d: u32) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn params() -> impl Strategy<Value = SeriesParams> {
    (1u32..400, 1u32..8, 1u32..200, 1u32..8)
        .prop_map(|(un, ud, vn, vd)| SeriesParams::new(ratio(un, ud), ratio(vn, vd)).unwrap())
}

/// Nested bounds `outer ⊇ inner`, both inside `[2, 40]`.
fn nested_bounds() -> impl Strategy<Value = (MuBounds, MuBounds)> {
    prop::collection::vec(0u32..3800, 4).prop_map(|mut v| {
        v.sort_unstable();
        let r = |k: u32| ratio(200 + k, 100);
        (
            MuBounds::new(r(v[0]), r(v[3])).unwrap(),
            MuBounds::new(r(v[1]), r(v[2])).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shrinking_bounds_keeps_definite_verdicts(p in params(), (outer, inner) in nested_bounds()) {
        for classify in [classify_sequence, classify_series] {
            let wide = classify(&p, &outer).kind;
            if wide != VerdictKind::Unknown {
                prop_assert_eq!(classify(&p, &inner).kind, wide);
            }
        }
    }

    #[test]
    fn series_convergence_implies_terms_vanish(p in params(), (b, _) in nested_bounds()) {
        if classify_series(&p, &b).kind == VerdictKind::SeriesConverges {
            prop_assert_eq!(classify_sequence(&p, &b).kind, VerdictKind::SequenceToZero);
        }
    }

    #[test]
    fn boundary_upper_is_unknown(p in params(), lo in 0u32..100) {
        let c = flint_core::criteria::sequence_threshold(&p);
        let lower = ratio(200 + lo, 100);
        prop_assume!(lower <= c);
        let b = MuBounds::new(lower, c).unwrap();
        prop_assert_eq!(classify_sequence(&p, &b).kind, VerdictKind::Unknown);
    }

    #[test]
    fn implied_bound_round_trip(p in params()) {
        let defaults = MuBounds::default();
        let implied = implied_mu_bound_with(&p, Observation::SequenceConverges, &defaults);
        let upper = implied.value.clone().min(defaults.upper().clone());
        match MuBounds::new(defaults.lower().clone(), upper) {
            Ok(b) => {
                prop_assert_ne!(implied.strength, Strength::Contradictory);
                prop_assert_ne!(classify_sequence(&p, &b).kind, VerdictKind::SequenceDiverges);
            }
            Err(_) => prop_assert_eq!(implied.strength, Strength::Contradictory),
        }
    }

    #[test]
    fn quotients_fold_back(num in 1i64..1_000_000, den in 1i64..100_000) {
        let x = BigRational::new(num.into(), den.into());
        let cf = expand_rational(&x, 64);
        prop_assert_eq!(cf.fold(), Some(x.clone()));
        let rebuilt = CFExpansion::from_quotients(cf.partial_quotients().to_vec()).unwrap();
        let last = convergents(&rebuilt).pop().unwrap();
        prop_assert_eq!(last.to_ratio(), x);
    }

    #[test]
    fn sine_stable_across_digits(n in 1u64..u64::MAX, d in 5u32..40) {
        let n = BigUint::from(n);
        let lo = sin_of_integer(&n, d).unwrap();
        let hi = sin_of_integer(&n, d + 25).unwrap();
        prop_assert_eq!(hi.value.round_sig(d), Some(lo.rounded));
        prop_assert!(lo.value.overlaps(&hi.value));
    }

    #[test]
    fn sine_bounds_hold(k in -(1i64 << 52)..(1i64 << 52), shift in 0i64..40) {
        // |x| <= 1 < π/2
        let x = Ball::dyadic(BigInt::from(k), -52 - shift);
        let s = sine_bound_slacks(&x, 25).unwrap();
        prop_assert!(s.certified_nonnegative(Mag::pow2(-80)));
    }

    #[test]
    fn terms_are_positive_and_consistent(n in 1u64..1_000_000, p in params()) {
        let t = term(&BigUint::from(n), &p, 8).unwrap();
        prop_assert!(t.term.is_positive());
        let t2 = term(&BigUint::from(n), &p, 20).unwrap();
        prop_assert_eq!(t2.term.round_sig(8), Some(t.rounded));
    }
}

#[test]
fn spikes_match_exhaustive_scan() {
    let fh = SeriesParams::flint_hills();
    for t in [ratio(1, 10), ratio(1, 2), ratio(1, 1), ratio(3, 1), ratio(20, 1)] {
        let guided = spikes(10_000, &fh, &t).unwrap();
        let brute = spikes_exhaustive(10_000, &fh, &t).unwrap();
        assert!(guided.failures.is_empty());
        let g: Vec<_> = guided.spikes.iter().map(|s| s.n.clone()).collect();
        let b: Vec<_> = brute.spikes.iter().map(|s| s.n.clone()).collect();
        assert_eq!(g, b, "threshold {t}");
    }
    let p = SeriesParams::new(ratio(5, 2), ratio(2, 1)).unwrap();
    let g = spikes(10_000, &p, &ratio(1, 2)).unwrap();
    let b = spikes_exhaustive(10_000, &p, &ratio(1, 2)).unwrap();
    assert_eq!(g.spikes.len(), b.spikes.len());
}

#[test]
fn spike_records_carry_reductions() {
    let r = spikes(100_000, &SeriesParams::flint_hills(), &ratio(1, 1)).unwrap();
    let ns: Vec<String> = r.spikes.iter().map(|s| s.n.to_string()).collect();
    assert_eq!(ns, ["1", "3", "22", "355"]);
    let s355 = &r.spikes[3];
    assert_eq!(s355.m, BigUint::from(113u32));
    assert_eq!(s355.rounded.to_string(), "24.59818122");
}

#[test]
fn partial_sums_nest_and_grow() {
    let fh = SeriesParams::flint_hills();
    let a = partial_sum(1000, &fh, 12).unwrap();
    // S(1000) = 30.1747901658768020709872034255
    assert_eq!(a.sum.to_decimal(12).to_string(), "30.1747901659");
    let b = partial_sum(1000, &fh, 20).unwrap();
    assert!(a.sum.contains(&b.sum));
    let c = partial_sum(1001, &fh, 12).unwrap();
    assert_eq!(
        c.sum.cmp_ratio(&a.sum.bounds().1),
        Some(std::cmp::Ordering::Greater)
    );
}
