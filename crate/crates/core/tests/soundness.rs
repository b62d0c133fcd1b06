use proptest::prelude::*;
use sedf_core::groups::{enumerate_abelian_groups, GroupSpec};
use sedf_core::numtheory::factorize;
use sedf_core::rules::{
    empty_divisor_window, evaluate, replay_witness, run_battery, GaussLattice, Outcome, RuleConfig, RuleId,
    Scope, Witness,
};
use sedf_core::sedf::{is_sedf, search_sedf, Params, SearchOptions, SearchOutcome};

fn candidates(v_max: u64, m_min: u64) -> Vec<Params> {
    let mut out = Vec::new();
    for v in 2..=v_max {
        for m in m_min..=v {
            for k in 2..=v / m {
                if let Some(l) = Params::derived_lambda(v, m, k) {
                    out.push(Params::new(v, m, k, l));
                }
            }
        }
    }
    out
}

#[test]
fn rules_agree_with_exhaustive_search() {
    let cfg = RuleConfig::default();
    for p in candidates(24, 2) {
        for g in enumerate_abelian_groups(p.v) {
            let report = run_battery(&p, &Scope::Group(g.clone()), &cfg).unwrap();
            let opts = SearchOptions { budget: u64::MAX, ..SearchOptions::default() };
            let found = search_sedf(&g, p.m, p.k, p.lambda, opts);
            match found.outcome {
                SearchOutcome::Found(fam) => {
                    assert!(is_sedf(&fam, p.lambda));
                    assert_ne!(report.overall, Outcome::RuledOut, "{p} in {g} exists");
                }
                SearchOutcome::Exhausted => {
                    if p.m >= 3 {
                        assert_eq!(report.overall, Outcome::RuledOut, "{p} in {g}");
                    }
                }
                SearchOutcome::BudgetExceeded => assert!(p.m == 2, "{p} in {g} over budget"),
            }
        }
    }
}

#[test]
fn every_witness_replays() {
    for lattice in [GaussLattice::RingOfIntegers, GaussLattice::Published] {
        let cfg = RuleConfig { lattice, ..RuleConfig::default() };
        for p in candidates(1200, 3) {
            let r = run_battery(&p, &Scope::AllAbelian, &cfg).unwrap();
            for v in &r.verdicts {
                if v.outcome == Outcome::RuledOut {
                    let w = v.witness.as_ref().expect("witness");
                    assert!(replay_witness(&p, None, w), "{p}: {w}");
                }
            }
            for gr in &r.groups {
                for v in &gr.verdicts {
                    if v.outcome == Outcome::RuledOut {
                        let w = v.witness.as_ref().expect("witness");
                        assert!(replay_witness(&p, Some(&gr.group), w), "{p} in {}: {w}", gr.group);
                    }
                }
            }
        }
    }
}

#[test]
fn small_candidates_all_excluded() {
    let cfg = RuleConfig::default();
    for p in candidates(50, 3) {
        let r = run_battery(&p, &Scope::AllAbelian, &cfg).unwrap();
        assert_eq!(r.overall, Outcome::RuledOut, "{p}");
    }
}

#[test]
fn tampered_witness_is_rejected() {
    let p = Params::new(3381, 23, 130, 110);
    let g = GroupSpec::cyclic(3381);
    let v = evaluate(RuleId::ExponentIdeal, &p, Some(&g), &RuleConfig::default());
    let Some(Witness::ExponentIdeal { d, lambda_prime, t, lower, upper }) = v.witness else {
        panic!("no witness");
    };
    assert!(replay_witness(&p, Some(&g), &Witness::ExponentIdeal { d, lambda_prime, t, lower, upper }));
    let bad = Witness::ExponentIdeal { d: 3, lambda_prime, t: 1, lower, upper };
    assert!(!replay_witness(&p, Some(&g), &bad));
    let other = Params::new(3381, 23, 130, 55);
    assert!(!replay_witness(&other, Some(&g), &Witness::ExponentIdeal { d, lambda_prime, t, lower, upper }));
}

proptest! {
    // If d leaves the window empty, a multiple d' with the same prime count
    // whose top lies below sqrt(lambda') does too.
    #[test]
    fn exponent_ideal_monotone(v in 2u64..20_000, d in 3u64..2_000, mult in 1u64..20, lp in 1u64..2_000) {
        let d2 = d * mult;
        let t = factorize(d).unwrap().num_primes();
        let t2 = factorize(d2).unwrap().num_primes();
        let top2 = (1u64 << (t2 - 1)) * v / d2;
        if empty_divisor_window(v, d, lp).is_some() && t == t2 && top2 * top2 < lp {
            prop_assert!(empty_divisor_window(v, d2, lp).is_some());
        }
    }

    // Without a divisor in range the window is reported empty, and
    // conversely.
    #[test]
    fn window_matches_naive(v in 2u64..5_000, d in 3u64..500, lp in 1u64..500) {
        let t = factorize(d).unwrap().num_primes() as u32;
        let top = (1u64 << (t - 1)) * v / d;
        let naive = (1..=lp).any(|c| lp % c == 0 && c * c >= lp && c <= top);
        prop_assert_eq!(empty_divisor_window(v, d, lp).is_none(), naive);
    }
}

