use nuca_core::analysis::{counting_bound, BoundKind};
use nuca_core::constructions::wrap_distribution;
use nuca_core::recurrence::{factor_occurrences, shortest_unique_pattern, Occurrences};
use nuca_core::{
    Alphabet, Automaton, Configuration, Distribution, Domain, LocalRule, Neighborhood, RuleSet,
    State,
};
use proptest::prelude::*;

fn ruleset(tables: Vec<Vec<State>>, r: i64) -> RuleSet {
    let a = Alphabet::binary();
    let arity = 2 * r as usize + 1;
    let names = (0..tables.len()).map(|k| format!("r{k}")).collect();
    let rules = tables
        .into_iter()
        .map(|t| LocalRule::from_table(a.clone(), arity, t).unwrap())
        .collect();
    RuleSet::new(a, Neighborhood::line_range(-r, r).unwrap(), rules, names).unwrap()
}

fn ep() -> impl Strategy<Value = Distribution> {
    (
        prop::collection::vec(0u32..2, 1..4),
        prop::collection::vec(0u32..2, 1..5),
        prop::collection::vec(0u32..2, 1..4),
        -5i64..5,
    )
        .prop_map(|(l, m, r, at)| Distribution::eventually_periodic(l, m, r, at))
}

/// Shortest, then leftmost, factor seen exactly once in a long materialized
/// stretch around the middle.
fn unique_by_scan(d: &Distribution) -> Option<(i64, Vec<u32>)> {
    let Distribution::EventuallyPeriodic { middle, middle_start, .. } = d else {
        unreachable!()
    };
    let (i, j) = (*middle_start, middle_start + middle.len() as i64 - 1);
    let margin = 60;
    let text = d.window(i - margin, j + margin).unwrap();
    for len in 1..=30usize {
        for x in i - len as i64 + 1..=j {
            let start = (x - (i - margin)) as usize;
            let p = &text[start..start + len];
            let count = text.windows(len).filter(|w| *w == p).count();
            if count == 1 {
                return Some((x, p.to_vec()));
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclic_update_matches_the_unrolled_line(
        t in prop::collection::vec(prop::collection::vec(0u32..2, 8), 2),
        w in prop::collection::vec(0u32..2, 3..10),
        c in prop::collection::vec(0u32..2, 10),
    ) {
        let m = w.len();
        let c = c[..m].to_vec();
        let rules = ruleset(t, 1);
        let cyclic = Automaton::new(rules.clone(), Distribution::cyclic(w.clone())).unwrap();
        let line = Automaton::new(rules, Distribution::ExplicitWindow { window: w, start: 0, default: 0 }).unwrap();
        let Configuration::Cyclic { word: out } = cyclic.apply_cyclic(&Configuration::Cyclic { word: c.clone() }).unwrap() else {
            unreachable!()
        };
        let unrolled = Configuration::ExplicitWindow { window: c, start: 0, default: 0 };
        let inner = line.apply_window(&unrolled, &Domain::interval(1, m as i64 - 2)).unwrap();
        prop_assert_eq!(&out[1..m - 1], inner.states());
    }

    #[test]
    fn wraps_reproduce_theta_and_close_on_the_suffix(d in ep(), n in 1usize..4) {
        let Ok(wrap) = wrap_distribution(&d, n, 40) else { return Ok(()); };
        let word = wrap.line_word();
        for (k, &v) in word.iter().enumerate() {
            prop_assert_eq!(v, d.at(wrap.start + k as i64).unwrap());
        }
        let u = d.window(wrap.start - n as i64, wrap.start - 1).unwrap();
        prop_assert_eq!(&word[wrap.m - n..], &u[..]);
        prop_assert!(wrap.occurrence > wrap.end);
    }

    #[test]
    fn unique_patterns_match_a_window_scan(d in ep()) {
        let expected = unique_by_scan(&d);
        match shortest_unique_pattern(&d) {
            Ok(u) => {
                prop_assert_eq!(Some((u.position, u.pattern.clone())), expected);
                prop_assert_eq!(factor_occurrences(&d, &u.pattern).unwrap(), Occurrences::Finite(vec![u.position]));
            }
            Err(_) => prop_assert_eq!(expected, None),
        }
    }
}

/// `(s^n - 1)^k < s^(kn - 2r)` evaluated in floating point logs.
fn holds_1d(s: u64, n: u64, r: u64, k: u64) -> bool {
    let lhs = k as f64 * ((s.pow(n as u32) - 1) as f64).log2();
    let rhs = (k * n).saturating_sub(2 * r) as f64 * (s as f64).log2();
    lhs < rhs - 1e-9
}

#[test]
fn counting_bounds_are_least() {
    for s in 2..5u64 {
        for n in 1..4u64 {
            for r in 1..4u64 {
                for kind in [BoundKind::MooreD, BoundKind::Myhill1D] {
                    let k = counting_bound(kind, 1, s, n, r).unwrap();
                    assert!(!holds_1d(s, n, r, k - 1), "{kind:?} {s} {n} {r}");
                    assert!((k..=k + 10).all(|j| holds_1d(s, n, r, j)), "{kind:?} {s} {n} {r}");
                }
            }
        }
    }
}
