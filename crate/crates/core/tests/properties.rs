use betting_ope::bounds::{fan_lower, log1p_quad_lower};
use betting_ope::env::{maxent_fit, sample_stream, MaxEntSpec, Moment};
use betting_ope::{
    argmax_quadratic, exact_log_wealth, mirror_sample, region, running_intersection, scalar_bet,
    Bet, Config, ConfidenceSequence, DoublyHedgedCs, HedgedCs, LogSample, ProcessKind,
    QuadObjective, RegionKind, ScalarCs,
};
use proptest::prelude::*;

fn cfg(w_max: f64) -> Config {
    Config::new(0.05, w_max).unwrap()
}

fn sample_strategy(w_max: f64) -> impl Strategy<Value = LogSample> {
    prop_oneof![
        (0.0..=w_max, 0.0..=1.0f64).prop_map(|(w, r)| LogSample::new(w, r)),
        (prop::sample::select(vec![0.0, 0.5, 2.0, w_max]), prop::bool::ANY)
            .prop_map(|(w, r)| LogSample::new(w, f64::from(u8::from(r)))),
    ]
}

fn stream(w_max: f64, max_len: usize) -> impl Strategy<Value = Vec<LogSample>> {
    prop::collection::vec(sample_strategy(w_max), 1..max_len)
}

/// Runs the hedged process, recording the bets in force before each sample.
fn run_with_bets(
    kind: ProcessKind,
    c: Config,
    samples: &[LogSample],
) -> (HedgedCs, Vec<Bet>, Vec<Bet>) {
    let mut cs = HedgedCs::new(kind, c).unwrap();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for s in samples {
        plus.push(cs.plus().bet());
        minus.push(cs.minus().bet());
        cs.push(s).unwrap();
    }
    (cs, plus, minus)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quadratic_log_bound_is_sound(x in -0.5..1e3f64) {
        prop_assert!(log1p_quad_lower(x).unwrap() <= x.ln_1p() + 1e-12);
    }

    #[test]
    fn fan_bound_is_sound(lam in 0.0..0.999f64, xi in -1.0..1e3f64) {
        prop_assert!(fan_lower(lam, xi).unwrap() <= (lam * xi).ln_1p() + 1e-12);
    }

    #[test]
    fn qp_solution_is_feasible_and_beats_vertices(
        l in prop::array::uniform3(-5.0..5.0f64),
        b in prop::array::uniform2(-50.0..50.0f64),
        w_max in 1.5..200.0f64,
        which in 0usize..3,
    ) {
        let a = [[l[0] * l[0], l[0] * l[1]], [l[0] * l[1], l[1] * l[1] + l[2] * l[2]]];
        let obj = QuadObjective::new(a, b).unwrap();
        let kind = [RegionKind::C, RegionKind::Cq, RegionKind::G][which];
        let reg = region(kind, &cfg(w_max)).unwrap();
        let sol = argmax_quadratic(&obj, &reg);
        prop_assert!(reg.contains(sol.bet.as_array(), 1e-9));
        let best = obj.value(sol.bet.as_array());
        for &p in reg.vertices() {
            prop_assert!(best >= obj.value(p) - 1e-9 * (1.0 + obj.value(p).abs()));
        }
        for t in 0..=20 {
            for &(p, q) in reg.edges().collect::<Vec<_>>().iter() {
                let s = f64::from(t) / 20.0;
                let x = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
                prop_assert!(best >= obj.value(x) - 1e-9 * (1.0 + obj.value(x).abs()));
            }
        }
    }

    #[test]
    fn exact_wealth_dominates_certified_bound(samples in stream(50.0, 200)) {
        let c = cfg(50.0);
        let kind = ProcessKind::Plain;
        let (cs, plus, minus) = run_with_bets(kind, c, &samples);
        let mirrored: Vec<_> = samples.iter().map(|s| mirror_sample(s, kind).unwrap()).collect();
        for i in 0..=100 {
            let v = f64::from(i) / 100.0;
            let ep = exact_log_wealth(&plus, &samples, v, kind).unwrap();
            let em = exact_log_wealth(&minus, &mirrored, 1.0 - v, kind).unwrap();
            prop_assert!(ep >= cs.plus().stats().log_wealth_lower_bound(v) - 1e-9);
            prop_assert!(em >= cs.minus().stats().log_wealth_lower_bound(1.0 - v) - 1e-9);
        }
    }

    #[test]
    fn bets_stay_in_the_common_region(samples in stream(100.0, 150)) {
        let c = cfg(100.0);
        let reg = region(RegionKind::C, &c).unwrap();
        let (_, plus, minus) = run_with_bets(ProcessKind::Plain, c, &samples);
        for b in plus.iter().chain(&minus) {
            prop_assert!(reg.contains(b.as_array(), 1e-9), "{b:?}");
        }
    }

    #[test]
    fn mirrored_stream_reflects_the_interval(samples in stream(20.0, 150)) {
        let c = cfg(20.0);
        let mirrored: Vec<_> = samples
            .iter()
            .map(|s| mirror_sample(s, ProcessKind::Plain).unwrap())
            .collect();
        let mut a = HedgedCs::new(ProcessKind::Plain, c).unwrap();
        let mut b = HedgedCs::new(ProcessKind::Plain, c).unwrap();
        for (s, m) in samples.iter().zip(&mirrored) {
            let ia = a.push(s).unwrap();
            let ib = b.push(m).unwrap();
            prop_assert!((ia.lo - (1.0 - ib.hi)).abs() < 1e-9);
            prop_assert!((ia.hi - (1.0 - ib.lo)).abs() < 1e-9);
        }
    }

    #[test]
    fn lower_endpoints_never_decrease(samples in stream(100.0, 300)) {
        let c = cfg(100.0);
        let mut cs = HedgedCs::new(ProcessKind::Plain, c).unwrap();
        let mut prev = cs.current();
        for s in &samples {
            let iv = cs.push(s).unwrap();
            prop_assert!(iv.lo >= prev.lo && iv.hi <= prev.hi);
            prev = iv;
        }
        let run = running_intersection(
            betting_ope::two_sided_cs(&samples, ProcessKind::Plain, c).unwrap(),
        );
        for pair in run.windows(2) {
            prop_assert!(pair[1].lo >= pair[0].lo && pair[1].hi <= pair[0].hi);
        }
    }

    #[test]
    fn scalar_bet_maximizes_fan_objective(s in 0.0..500.0f64, s2 in 1e-3..5e4f64) {
        let f = |l: f64| l * s + ((-l).ln_1p() + l) * s2;
        let lam = scalar_bet(s, s2);
        // Ternary search on the concave objective.
        let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-6);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f(m1) < f(m2) { lo = m1 } else { hi = m2 }
        }
        let oracle = f(0.5 * (lo + hi));
        prop_assert!(f(lam) >= oracle - 1e-9 * (1.0 + oracle.abs()));
    }

    #[test]
    fn scalar_interval_is_nested(samples in stream(100.0, 300)) {
        let mut cs = ScalarCs::new(cfg(100.0));
        let mut prev = cs.current();
        for s in &samples {
            let iv = cs.push(s).unwrap();
            prop_assert!(iv.lo >= prev.lo && iv.hi <= prev.hi);
            prev = iv;
        }
    }

    #[test]
    fn maxent_matches_moments(m2 in 1.5..60.0f64, v in 0.02..0.98f64) {
        let spec = MaxEntSpec::standard(m2, v);
        let d = maxent_fit(&spec).unwrap();
        let total: f64 = d.probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(d.probs.iter().all(|&p| p >= 0.0));
        for &(m, target) in &spec.moments {
            let got = d.expectation(|w, r| m.eval(w, r));
            prop_assert!((got - target).abs() < 1e-8, "{} {} vs {}", m.label(), got, target);
        }
        prop_assert!((d.value() - v).abs() < 1e-8);
        prop_assert!(spec.moments.iter().any(|(m, _)| *m == Moment::WR));
    }

    #[test]
    fn streams_are_determined_by_seed(seed in any::<u64>(), n in 0usize..500) {
        let d = maxent_fit(&MaxEntSpec::standard(10.0, 0.3)).unwrap();
        prop_assert_eq!(sample_stream(&d, seed, n).unwrap(), sample_stream(&d, seed, n).unwrap());
    }

    #[test]
    fn doubly_hedged_within_ln4_of_components(
        samples in prop::collection::vec(
            (0.0..=10.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64),
            1..150,
        )
    ) {
        let c = cfg(10.0);
        let mut dh = DoublyHedgedCs::new(c).unwrap();
        for (w, r, qt, qb) in samples {
            // Keep c attainable: q_bar is an average of q over actions weighted
            // by a policy putting at least w/w_max on the taken action.
            let qb = qb * (1.0 - w / 10.0) + qt * w / 10.0;
            let cv = betting_ope::control_variate(w, qt, qb).unwrap();
            dh.push(&LogSample::with_cv(w, r, cv)).unwrap();
        }
        for i in 0..=100 {
            let v = f64::from(i) / 100.0;
            let best = dh
                .plain()
                .log_wealth_lower_bound(v)
                .max(dh.predictor().log_wealth_lower_bound(v));
            prop_assert!(dh.log_wealth_lower_bound(v) >= best - 4f64.ln() - 1e-12);
        }
    }
}
