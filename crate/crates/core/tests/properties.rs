use proptest::prelude::*;

use recon_core::analysis::sliding::sliding_integral;
use recon_core::construct::{greedy_quantizer, union_test_set, FnTarget, SmoothTarget, Target};
use recon_core::dyadic::Dyadic;
use recon_core::interval::{IntervalSet, Window};
use recon_core::numeric::integrate_composite;
use recon_core::profile::Profile;
use recon_core::random::{sample, GridSet, Level, RandomLevels};
use recon_core::verify::{
    interval_counterexample, monotonicity_report_exact, scan_pairs, translation_values, Axis,
    MeasureVector,
};

fn dyadic_set(max_len: usize) -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((-256i128..256, 1i128..64), 0..max_len).prop_map(|v| {
        IntervalSet::normalize(
            v.into_iter()
                .map(|(lo, len)| (Dyadic::new(lo, 4), Dyadic::new(lo + len, 4))),
        )
    })
}

fn logistic_like() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2f64..6.0, -0.5f64..0.5, 0.05f64..0.45)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greedy_prefix_discrepancy((rate, shift, floor) in logistic_like(), k in 2u32..9, probes in prop::collection::vec(0.0f64..1.0, 16)) {
        let n = 1u64 << k;
        let phi = move |x: f64| floor + (1.0 - 2.0 * floor) / (1.0 + (-rate * (x - shift)).exp());
        let t = FnTarget(phi);
        let q = greedy_quantizer(&t, n).unwrap();
        let cum = q.set.cumulative();
        let disc = |a: f64, b: f64| cum.below_f64(b) - cum.below_f64(a) - integrate_composite(phi, a, b, 32);
        prop_assert!(disc(0.0, 1.0).abs() < 1e-9);
        for b in probes {
            prop_assert!(disc(0.0, b).abs() <= 4.0 / n as f64 + 1e-12);
        }
        prop_assert!(q.set.hull().map_or(true, |(lo, hi)| lo >= Dyadic::ZERO && hi <= Dyadic::ONE));
    }

    #[test]
    fn logistic_target_integral_matches_quadrature(rate in 0.1f64..4.0, a in -6.0f64..6.0, w in 0.01f64..3.0) {
        let t = SmoothTarget::logistic(rate).unwrap();
        let q = integrate_composite(|x| t.phi(x), a, a + w, 64);
        prop_assert!((t.integral(a, a + w) - q).abs() < 1e-10);
    }

    #[test]
    fn boolean_measures_add_up(a in dyadic_set(8), b in dyadic_set(8)) {
        let i = a.intersect(&b).measure();
        prop_assert_eq!(a.union(&b).measure(), a.measure() + b.measure() - i);
        prop_assert_eq!(a.symmdiff(&b).measure(), a.measure() + b.measure() - i - i);
        prop_assert_eq!(a.difference(&b).measure(), a.measure() - i);
    }

    #[test]
    fn interval_set_json_round_trip(a in dyadic_set(10)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<IntervalSet>(&text).unwrap(), a);
    }

    #[test]
    fn exact_measures_match_sliding_integral(t in dyadic_set(10), xs in prop::collection::vec(-4i128..4 * 16, 1..12)) {
        let e = IntervalSet::normalize([(Dyadic::ZERO, Dyadic::ONE)]);
        let shifts: Vec<Dyadic> = xs.iter().map(|&x| Dyadic::new(x, 4)).collect();
        let exact = translation_values(&e, &t, &shifts);
        let w = Window::from_ints(-32, 32).unwrap();
        let bs: Vec<f64> = shifts.iter().map(|s| s.to_f64()).collect();
        let ind = Profile::indicator(0.0, 1.0, 1.0).unwrap();
        let slid = sliding_integral(&ind, &t, &w, 1.0, &bs).unwrap();
        for (a, b) in exact.iter().zip(&slid) {
            prop_assert!((a.to_f64() - b).abs() < 1e-9);
        }
    }

    #[test]
    fn pair_scan_ignores_order(vals in prop::collection::vec(prop::collection::vec(0i128..6, 2), 2..30), seed in any::<u64>()) {
        let vs: Vec<MeasureVector> = vals.iter().map(|v| {
            let e: Vec<Dyadic> = v.iter().map(|&x| Dyadic::new(x, 3)).collect();
            MeasureVector { values: e.iter().map(|x| x.to_f64()).collect(), errors: vec![0.0; 2], exact: Some(e) }
        }).collect();
        let mut shuffled = vs.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let (a, b) = (scan_pairs(&vs), scan_pairs(&shuffled));
        prop_assert_eq!(a.min_separation, b.min_separation);
        prop_assert_eq!(a.collisions, b.collisions);
        let mut brute = 0;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                if vals[i] == vals[j] { brute += 1; }
            }
        }
        prop_assert_eq!(a.collisions, brute);
    }

    #[test]
    fn counterexamples_reverify(a in dyadic_set(20), b in dyadic_set(20), tol_exp in 6i32..12) {
        let w = Window::from_ints(-20, 20).unwrap();
        let tol = 10f64.powi(-tol_exp);
        let c = interval_counterexample(&a, &b, &w, 1.0, tol).unwrap();
        let (ca, cb) = (a.cumulative(), b.cumulative());
        let m = |s: &recon_core::interval::Cumulative, i: [f64; 2]| s.below_f64(i[1]) - s.below_f64(i[0]);
        prop_assert!((m(&ca, c.first) - m(&ca, c.second)).abs() <= tol);
        prop_assert!((m(&cb, c.first) - m(&cb, c.second)).abs() <= tol);
        prop_assert!(c.first[1] - c.first[0] > 1.0 && c.second[1] - c.second[0] > 1.0);
        prop_assert!(c.separation >= 100.0 * tol);
    }

    #[test]
    fn grid_sets_round_trip(k1 in 2u32..5, extra in 1u32..4, seed in any::<u64>(), dim in 1usize..3) {
        let n1 = 1u64 << k1;
        let levels = vec![Level { n: n1, g: n1 / 2, p: 0.5 }, Level { n: n1 << extra, g: n1, p: 0.25 }];
        let lv = RandomLevels::new(dim, vec![0; dim], vec![1; dim], levels).unwrap();
        let g = sample(&lv, seed);
        prop_assert_eq!(&g, &sample(&lv, seed));
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        prop_assert_eq!(GridSet::read_binary(&buf[..]).unwrap(), g.clone());
        for s in &g.selections {
            let q = lv.levels[s.level].n / lv.levels[s.level].g;
            // no coarse cell holds more than ⌊p (n/g)^d⌋ cubes
            let mut per_cell = std::collections::HashMap::new();
            for &c in &s.cubes {
                let fine = lv.levels[s.level].n;
                let mut key = 0u64;
                let mut rest = c;
                for _ in 0..dim {
                    key = key * fine + (rest % fine) / q;
                    rest /= fine;
                }
                *per_cell.entry(key).or_insert(0u64) += 1;
            }
            prop_assert!(per_cell.values().all(|&m| m <= lv.max_count(s.level)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn union_test_sets_are_monotone(len_num in 2i128..8, rho_exp in 3u32..5) {
        let len = Dyadic::new(len_num, 2);
        let rho = Dyadic::new(1, rho_exp);
        let w = Window::from_ints(0, 8).unwrap();
        let t = union_test_set(&[len], &w, rho).unwrap();
        let e = IntervalSet::normalize([(Dyadic::ZERO, len)]);
        let hi = Dyadic::from_int(8) - len - Dyadic::ONE;
        let xs = Axis::range(Dyadic::ZERO, hi, rho).unwrap().values();
        let r = monotonicity_report_exact(&translation_values(&e, &t.set, &xs));
        prop_assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}
