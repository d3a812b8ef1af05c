use num_traits::ToPrimitive;
use proptest::prelude::*;

use exceedance::counting::{count_terminal, pmf, pmf_any_order, ComparisonSpec};
use exceedance::exactmath::ExactProb;
use exceedance::inference::{attained_level, p_value, run_test, Alternative};
use exceedance::montecarlo::{
    draw_system, observed_l_of, rank_position_frequencies, simulate_pmf, six_sigma_tolerance,
    SourceDistribution,
};
use exceedance::paths::{all_paths, format_path, parse_path, LatticePath, Step};

fn finite_sample(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0e3..1.0e3f64, len)
}

proptest! {
    #[test]
    fn statistic_depends_only_on_ranks(
        x in finite_sample(1..=9),
        y in finite_sample(1..=9),
        slope in 0.01..50.0f64,
        shift in -100.0..100.0f64,
        k_seed in 0usize..100,
    ) {
        let k = 1 + k_seed % x.len().min(y.len());
        let base = observed_l_of(&x, &y, k);
        prop_assume!(base.is_ok());
        let affine = |v: &f64| slope * v + shift;
        let squash = |v: &f64| (v / 1.0e3).atan();
        for transform in [&affine as &dyn Fn(&f64) -> f64, &squash] {
            let xt: Vec<f64> = x.iter().map(transform).collect();
            let yt: Vec<f64> = y.iter().map(transform).collect();
            prop_assume!(observed_l_of(&xt, &yt, k).is_ok());
            for alt in [Alternative::Less, Alternative::Greater, Alternative::TwoSided] {
                let a = run_test(&x, &y, k, alt).unwrap();
                let b = run_test(&xt, &yt, k, alt).unwrap();
                prop_assert_eq!(a.observed_l, b.observed_l);
                prop_assert_eq!(a.p_value, b.p_value);
            }
        }
    }

    #[test]
    fn path_text_round_trips(steps in prop::collection::vec(any::<bool>(), 1..40)) {
        let path = LatticePath::new(steps.iter().map(|&b| if b { Step::East } else { Step::North }).collect());
        prop_assert_eq!(parse_path(&format_path(&path)).unwrap(), path);
    }

    #[test]
    fn reflection_identity_for_terminal_counts(x in 0u64..8, y in 0u64..8, l in 0u64..9) {
        let mirrored = match x.max(y).checked_sub(l) {
            Some(r) => count_terminal(y, x, r),
            None => 0u32.into(),
        };
        prop_assert_eq!(count_terminal(x, y, l), mirrored);
    }

    #[test]
    fn swapped_sizes_are_the_mirror_distribution(m in 1usize..10, n in 1usize..10, k_seed in 0usize..10) {
        let k = 1 + k_seed % m.min(n);
        let direct = pmf_any_order(m, n, k).unwrap();
        let swapped = pmf_any_order(n, m, k).unwrap();
        for l in 0..=k {
            prop_assert_eq!(direct.prob(l), swapped.prob(k - l));
        }
    }
}

#[test]
fn swapped_labels_match_simulation_of_the_swapped_experiment() {
    // Six X values against four Y values.
    let table = pmf_any_order(6, 4, 4).unwrap();
    let trials = 200_000u64;
    let mut counts = [0u64; 5];
    for seed in 0..trials {
        let s = draw_system(SourceDistribution::Uniform, 6, 4, seed);
        counts[observed_l_of(s.x_values(), s.y_values(), 4).unwrap()] += 1;
    }
    for (l, p) in table.probs().iter().enumerate() {
        let freq = counts[l] as f64 / trials as f64;
        assert!((freq - p.to_f64()).abs() <= six_sigma_tolerance(p, trials), "l={l}");
    }
}

#[test]
fn simulation_agrees_with_exact_pmf_for_every_source() {
    let spec = ComparisonSpec::new(4, 6, 4).unwrap();
    let exact = pmf(&spec).unwrap();
    let trials = 1_000_000;
    for (i, dist) in SourceDistribution::ALL.into_iter().enumerate() {
        let sim = simulate_pmf(&spec, dist, trials, 77 + i as u64).unwrap();
        assert!(sim.max_abs_deviation(exact.probs()) < 0.005, "{dist}");
        for (l, p) in exact.probs().iter().enumerate() {
            let tol = six_sigma_tolerance(p, trials);
            assert!((sim.frequency(l) - p.to_f64()).abs() <= tol, "{dist} l={l}");
        }
    }
}

#[test]
fn simulation_small_specs_within_stated_tolerance() {
    let cases = [
        ((2, 2, 1), SourceDistribution::Uniform, 0.003),
        ((2, 3, 2), SourceDistribution::Exponential, 0.003),
    ];
    for ((m, n, k), dist, tol) in cases {
        let spec = ComparisonSpec::new(m, n, k).unwrap();
        let exact = pmf(&spec).unwrap();
        let sim = simulate_pmf(&spec, dist, 1_000_000, 42).unwrap();
        assert!(sim.max_abs_deviation(exact.probs()) < tol, "{spec:?}");
    }
}

#[test]
fn every_index_equally_likely_to_be_the_minimum() {
    let trials = 1_000_000;
    let p = ExactProb::new(1u32.into(), 5u32.into()).unwrap();
    let tol = six_sigma_tolerance(&p, trials);
    for dist in [SourceDistribution::Normal, SourceDistribution::Pareto] {
        let freqs = rank_position_frequencies(dist, 5, 1, trials, 5);
        for (j, f) in freqs.iter().enumerate() {
            assert!((f - 0.2).abs() <= tol, "{dist} index {j}: {f}");
        }
    }
    let freqs = rank_position_frequencies(SourceDistribution::Uniform, 5, 3, trials, 6);
    assert!(freqs.iter().all(|f| (f - 0.2).abs() <= tol));
}

#[test]
fn greater_test_holds_its_level_under_the_null() {
    let spec = ComparisonSpec::new(5, 7, 4).unwrap();
    let table = pmf(&spec).unwrap();
    let alpha = 0.05;
    let level = attained_level(&table, alpha, Alternative::Greater);
    assert!(level.to_f64() <= alpha);

    let pairs = 100_000u64;
    let mut rejections = 0u64;
    for seed in 0..pairs {
        let s = draw_system(SourceDistribution::Uniform, 5, 7, seed);
        let l = observed_l_of(s.x_values(), s.y_values(), 4).unwrap();
        if p_value(&table, l, Alternative::Greater).to_f64() <= alpha {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / pairs as f64;
    let sigma = (alpha * (1.0 - alpha) / pairs as f64).sqrt();
    assert!(rate <= alpha + 6.0 * sigma, "rejection rate {rate}");
    let exact = level.as_rational().to_f64().unwrap();
    let tol = six_sigma_tolerance(&level, pairs);
    assert!((rate - exact).abs() <= tol, "rate {rate} vs attained level {exact}");
}

#[test]
fn walk_ends_at_size_difference() {
    for m in 1..=5usize {
        for n in m..=(11 - m) {
            for path in all_paths(m, n) {
                let walk = path.to_walk();
                assert_eq!(walk.final_position(), m as i64 - n as i64);
            }
        }
    }
}
