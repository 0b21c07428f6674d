mod common;

use mtt_workbench::analysis::{find_rho, Importance};
use mtt_workbench::constructions::{expand_to_consistent, fv_to_att, nondeleting_nf, nonerasing_nf};
use mtt_workbench::difftest::{equivalent_up_to, DiffOutcome, DiffReport};
use mtt_workbench::dynfv::{check_dynamic_fv, dynfv_pipeline};
use mtt_workbench::format::{parse_mtt, print_mtt};
use mtt_workbench::samples;
use mtt_workbench::syntax::parse_tree;
use mtt_workbench::tree::all_trees;
use mtt_workbench::{Mtt, Pipeline};
use proptest::prelude::*;

use common::{important_by_substitution, rewrite_att};

/// Builds a right-hand side from a stream of choices. Rank-1 states take
/// one argument; calls are only allowed below `a`.
fn rhs(choices: &mut impl Iterator<Item = u8>, depth: usize, params: usize, calls: bool) -> String {
    let c = choices.next().unwrap_or(0);
    let mut leaves = vec!["e".to_string()];
    if params > 0 {
        leaves.push("y1".into());
    }
    if calls {
        leaves.push("q0[x1]".into());
    }
    if depth == 0 {
        return leaves[c as usize % leaves.len()].clone();
    }
    let inner = 3 + usize::from(calls) * 2;
    match c as usize % (leaves.len() + inner) {
        0 => format!("f({},{})", rhs(choices, depth - 1, params, calls), rhs(choices, depth - 1, params, calls)),
        1 | 2 => format!("g({})", rhs(choices, depth - 1, params, calls)),
        3 if calls => format!("q1[x1]({})", rhs(choices, depth - 1, params, calls)),
        4 if calls => format!("q2[x1]({})", rhs(choices, depth - 1, params, calls)),
        k => leaves[(k - inner) % leaves.len()].clone(),
    }
}

fn random_mtt(seed: &[u8]) -> Mtt {
    let mut it = seed.iter().copied().cycle();
    let mut text = String::from(
        "mtt random { input { a/1 e/0 } output { f/2 g/1 e/0 } states { q0/0 q1/1 q2/1 } initial q0\n",
    );
    // Most rules keep their parameter, so that many samples are nondeleting.
    let keep = |r: String, params: usize, c: u8| {
        if params == 0 || r.contains("y1") || c % 5 == 0 {
            r
        } else if let Some(i) = r.rfind('e') {
            format!("{}y1{}", &r[..i], &r[i + 1..])
        } else {
            format!("f({r},y1)")
        }
    };
    for (q, params) in [("q0", 0), ("q1", 1), ("q2", 1)] {
        let lhs = |s: &str| if params == 0 { format!("{q} {s}") } else { format!("{q} {s}(y1)") };
        let ra = rhs(&mut it, 3, params, true);
        let ra = keep(ra, params, it.next().unwrap_or(0));
        let re = rhs(&mut it, 2, params, false);
        let re = keep(re, params, it.next().unwrap_or(0));
        text.push_str(&format!(" rule {} -> {ra}\n", lhs("a(x1)")));
        text.push_str(&format!(" rule {} -> {re}\n", lhs("e")));
    }
    text.push('}');
    parse_mtt(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn assert_equal(p1: &Pipeline, p2: &Pipeline, bound: usize, what: &str) -> Result<(), TestCaseError> {
    let r = equivalent_up_to(p1, p2, bound).unwrap();
    prop_assert!(r.is_equal(), "{what}: {r}");
    Ok(())
}

fn counterexample(r: &DiffReport) -> Option<String> {
    match &r.outcome {
        DiffOutcome::Counterexample { input, .. } => Some(input.to_string()),
        _ => None,
    }
}

fn monadic_pool() -> Vec<Pipeline> {
    let twin = samples::twin_args();
    let mut pool = vec![Pipeline::single(twin.clone()), dynfv_pipeline(&twin).unwrap()];
    for seed in [[1u8, 7, 3, 9], [2, 2, 5, 0], [4, 8, 1, 6]] {
        let m = random_mtt(&seed);
        pool.push(Pipeline::single(m));
    }
    pool
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructions_preserve_random_mtts(seed in proptest::collection::vec(any::<u8>(), 8..40)) {
        let m = random_mtt(&seed);
        let src = Pipeline::single(m.clone());
        let nd = nondeleting_nf(&m).unwrap();
        assert_equal(&src, &nd.pipeline(), 5, "nondeleting_nf")?;
        if let Some(rho) = find_rho(&m).unwrap_or(None) {
            assert_equal(&src, &Pipeline::single(expand_to_consistent(&m, &rho).unwrap()), 5, "expand")?;
            assert_equal(&src, &Pipeline::single(fv_to_att(&m, &rho).unwrap()), 5, "fv_to_att")?;
            prop_assert!(check_dynamic_fv(&m, None, 6).unwrap().passed());
        }
        if m.is_nondeleting() {
            assert_equal(&src, &nonerasing_nf(&m).unwrap().pipeline(), 5, "nonerasing_nf")?;
            if check_dynamic_fv(&m, None, 5).unwrap().passed() {
                assert_equal(&src, &dynfv_pipeline(&m).unwrap(), 5, "dynfv pipeline")?;
            }
        }
    }

    #[test]
    fn importance_agrees_with_substitution(seed in proptest::collection::vec(any::<u8>(), 8..40)) {
        let m = random_mtt(&seed);
        let imp = Importance::new(&m).unwrap();
        for (q, sigma, r) in m.rules() {
            for v in r.node_set() {
                let fast = imp.is_important(q.name(), sigma.name(), &v).unwrap();
                let slow = important_by_substitution(&m, q.name(), sigma.name(), &v, 5);
                prop_assert_eq!(fast, slow, "({}, {}) at {} in\n{}", q, sigma, v, print_mtt(&m));
            }
        }
    }

    #[test]
    fn att_evaluation_agrees_with_rewriting(k in 0usize..4, index in 0usize..2000) {
        let atts = samples::all_atts();
        let a = &atts[k % atts.len()];
        let trees = all_trees(a.input(), 8).unwrap();
        let s = &trees[index % trees.len()];
        match a.evaluate(s) {
            Ok(t) => prop_assert_eq!(Some(t), rewrite_att(a, s, 100_000)),
            Err(_) => prop_assert!(rewrite_att(a, s, 10_000).is_none()),
        }
    }

    #[test]
    fn trees_print_and_parse_back(k in 0usize..5, index in 0usize..5000) {
        let ms = samples::all_mtts();
        let m = &ms[k];
        let trees = all_trees(m.input(), 7).unwrap();
        let s = &trees[index % trees.len()];
        prop_assert_eq!(&parse_tree(&s.to_string(), m.input()).unwrap(), s);
    }

    #[test]
    fn difftest_is_symmetric_and_monotone(i in 0usize..5, j in 0usize..5, b in 1usize..6, extra in 0usize..3) {
        let pool = monadic_pool();
        let (p1, p2) = (&pool[i], &pool[j]);
        let r12 = equivalent_up_to(p1, p2, b).unwrap();
        let r21 = equivalent_up_to(p2, p1, b).unwrap();
        prop_assert_eq!(r12.is_equal(), r21.is_equal());
        prop_assert_eq!(counterexample(&r12), counterexample(&r21));
        if let Some(c) = counterexample(&r12) {
            let later = equivalent_up_to(p1, p2, b + extra).unwrap();
            prop_assert_eq!(counterexample(&later), Some(c));
        }
    }

    #[test]
    fn dynamic_check_is_monotone_in_the_bound(seed in proptest::collection::vec(any::<u8>(), 8..40), b in 1usize..6) {
        let m = random_mtt(&seed);
        if !m.is_nondeleting() {
            return Ok(());
        }
        let small = check_dynamic_fv(&m, None, b).unwrap();
        let large = check_dynamic_fv(&m, None, b + 2).unwrap();
        if large.passed() {
            prop_assert!(small.passed());
        }
        if let Some(v) = small.violation() {
            prop_assert_eq!(large.violation(), Some(v));
        }
    }
}
