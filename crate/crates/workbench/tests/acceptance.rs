//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use mtt_workbench::analysis::{check_fv, find_rho, is_consistent, Importance};
use mtt_workbench::att::{AttrKind, Instance};
use mtt_workbench::constructions::{
    att_to_consistent_mtt, bottom_symbol, expand_to_consistent, fv_to_att, nondeleting_nf, nonerasing_nf, omega,
    omega_direct, trel_mtt_product,
};
use mtt_workbench::difftest::{equivalent_up_to, DiffOutcome};
use mtt_workbench::dynfv::{
    build_dynfv_att, build_state_annotating_trel, call_trees, check_dynamic_fv, dynfv_pipeline, equivalence_gadget,
    evaluate_argument, param_attr_name, restricted_copy, CallTreeSet,
};
use mtt_workbench::format::{parse_arhs, parse_mtt, parse_rhs};
use mtt_workbench::mtt::Rhs;
use mtt_workbench::samples;
use mtt_workbench::syntax::parse_tree;
use mtt_workbench::tree::all_trees;
use mtt_workbench::{Att, Mtt, ParamRenaming, Path, Pipeline, Tree};

use common::{important_by_substitution, monadic, repeat, rewrite_att};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn tree(m: &Mtt, s: &str) -> Tree {
    parse_tree(s, m.input()).unwrap_or_else(|e| panic!("{e}: {s}"))
}

fn equal_up_to(p1: &Pipeline, p2: &Pipeline, bound: usize, what: &str) -> Outcome {
    let r = equivalent_up_to(p1, p2, bound).map_err(|e| format!("{what}: {e}"))?;
    ensure!(r.is_equal(), "{what}: {r}");
    Ok(())
}

fn single(s: impl Into<mtt_workbench::Stage>) -> Pipeline {
    Pipeline::single(s)
}

/// abcd on `#(aⁿ(e))` gives `aⁿ(bⁿ(cⁿ(dⁿ(e))))`.
fn abcd_semantics() -> Outcome {
    let m = samples::abcd();
    for n in 0..=6 {
        let mut prefix = repeat("#", 1);
        prefix.extend(repeat("a", n));
        let s = tree(&m, &monadic(&prefix, "e"));
        let mut out = repeat("a", n);
        for sym in ["b", "c", "d"] {
            out.extend(repeat(sym, n));
        }
        let want = monadic(&out, "e");
        let got = m.translate(&s).to_string();
        ensure!(got == want, "n={n}: {got} != {want}");
    }
    Ok(())
}

/// Expected rules of the padded abcd MTT, with `BOT` for the dummy label.
const PADDED_ABCD_RULES: [(&str, &str, &str); 5] = [
    ("q0", "#", "q1[x1](q2[x1](BOT,e),BOT)"),
    ("q1", "a", "a(q1[x1](b(y1),BOT))"),
    ("q2", "a", "c(q2[x1](BOT,d(y2)))"),
    ("q1", "e", "y1"),
    ("q2", "e", "y2"),
];

fn expansion_golden() -> Outcome {
    let m = samples::abcd();
    let mut rho = ParamRenaming::new();
    rho.set("q1", 1, 1);
    rho.set("q2", 1, 2);
    let e = expand_to_consistent(&m, &rho).map_err(|e| e.to_string())?;
    let bot = bottom_symbol(m.output()).map_err(|e| e.to_string())?;
    for (q, sigma, text) in PADDED_ABCD_RULES {
        let want = parse_rhs(&text.replace("BOT", bot.name()), e.output(), e.states()).map_err(|e| e.to_string())?;
        ensure!(e.rhs(q, sigma) == Some(&want), "rule ({q},{sigma}) is {:?}", e.rhs(q, sigma));
    }
    ensure!(e.states().iter().all(|q| q.rank() == 2 || q.name() == "q0"), "ranks {}", e.states());
    ensure!(is_consistent(&e).map_err(|e| e.to_string())?.is_none(), "padded abcd is inconsistent");
    let v = is_consistent(&m).map_err(|e| e.to_string())?;
    ensure!(v.is_some(), "abcd reported consistent");
    let v = v.unwrap();
    ensure!(v.symbol == "#", "witness {v}");
    Ok(())
}

fn worked_example() -> Outcome {
    let mc = samples::deleting();
    let nf = nondeleting_nf(&mc).map_err(|e| e.to_string())?;
    let b = &nf.lookahead;
    ensure!(b.rule("e", &[]).map(|(p, _)| p) == Some("p1"), "e");
    ensure!(b.rule("e'", &[]).map(|(p, _)| p) == Some("p2"), "e'");
    for p in ["p1", "p2", "p3"] {
        for p2 in ["p1", "p2", "p3"] {
            let (st, sym) = b.rule("sigma", &[p, p2]).ok_or(format!("sigma({p},{p2})"))?;
            ensure!(st == "p3" && sym.name() == format!("[sigma,{p},{p2}]"), "sigma({p},{p2}) -> {st} {sym}");
        }
    }
    let c = &nf.core;
    let r = |t: &str| parse_rhs(t, c.output(), c.states()).unwrap();
    let r1 = r(r#""q.{1}"[x1]("q2.{1}"[x2]("q1.{}"[x1]))"#);
    let r2 = r(r#""q.{1}"[x1]("q2.{}"[x2])"#);
    let r3 = r(r#""q.{}"[x1]"#);
    let cases = [
        ("p1", "p1", &r1),
        ("p1", "p2", &r1),
        ("p1", "p3", &r2),
        ("p2", "p1", &r3),
        ("p2", "p2", &r3),
        ("p2", "p3", &r3),
        ("p3", "p1", &r3),
        ("p3", "p2", &r3),
        ("p3", "p3", &r3),
    ];
    for (p, p2, want) in cases {
        let got = c.rhs("q0.{}", &format!("[sigma,{p},{p2}]"));
        ensure!(got == Some(want), "r for [sigma,{p},{p2}]: {got:?}");
    }
    // The remaining rules are `(_,{}) -> #` and `(_,{1})(y1) -> y1`.
    for (q, sigma, rhs) in c.rules() {
        if q.name() == "q0.{}" && sigma.rank() == 2 {
            continue;
        }
        let want = if q.rank() == 0 { "#" } else { "y1" };
        ensure!(rhs.to_string() == want, "({q},{sigma}) -> {rhs}");
    }
    let ones = ParamRenaming::from_fn(c, |_, _| 1);
    ensure!(check_fv(c, &ones).map_err(|e| e.to_string())?.is_none(), "core is not FV with rho = 1");
    equal_up_to(&nf.pipeline(), &single(mc), 7, "normal form vs deleting")
}

fn att_of_worked_example() -> Outcome {
    let nf = nondeleting_nf(&samples::deleting()).map_err(|e| e.to_string())?;
    let a = fv_to_att(&nf.core, nf.renaming.as_ref().unwrap()).map_err(|e| e.to_string())?;
    for sym in ["[sigma,p1,p1]", "[sigma,p1,p2]"] {
        let want = |t: &str| parse_arhs(t, a.output(), a.syn(), a.inh()).unwrap();
        ensure!(a.syn_rule(sym, "q0.{}") == Some(&want(r#""q.{1}"(pi 1)"#)), "{sym} q0");
        ensure!(a.inh_rule(sym, "y1", 1) == Some(&want(r#""q2.{1}"(pi 2)"#)), "{sym} y1(pi 1)");
        ensure!(a.inh_rule(sym, "y1", 2) == Some(&want(r#""q1.{}"(pi 1)"#)), "{sym} y1(pi 2)");
    }
    ensure!(a.is_circular().is_none(), "the normal-form ATT is circular");
    let s = parse_tree(r#""[sigma,p2,p1]"(e',e)"#, a.input()).map_err(|e| e.to_string())?;
    let g = a.full_dependency_graph(&s);
    ensure!(g.edge_count() > 0, "empty graph");
    ensure!(g.shortest_cycle().is_none(), "cycle on [sigma,p2,p1](e',e)");
    Ok(())
}

const TWIN_ARGS_ATT_RULES: [(&str, &str, usize, &str); 12] = [
    ("[a,{q0}]", "q0", 0, "f(q1(pi 1),q1(pi 1))"),
    ("[a,{q0}]", "<q1,1>", 1, "q2(pi 1)"),
    ("[a,{q0}]", "<q3,1>", 1, "e"),
    ("[a,{q1,q2,q3}]", "q1", 0, "a(q1(pi 1))"),
    ("[a,{q1,q2,q3}]", "q2", 0, "a(a(q2(pi 1)))"),
    ("[a,{q1,q2,q3}]", "q3", 0, "a(q3(pi 1))"),
    ("[a,{q1,q2,q3}]", "<q1,1>", 1, r#"b("<q1,1>"(pi))"#),
    ("[a,{q1,q2,q3}]", "<q3,1>", 1, r#"a("<q3,1>"(pi))"#),
    ("[e,{q0}]", "q0", 0, "e"),
    // A state below a leaf reads its argument straight from `pi`.
    ("[e,{q1,q2,q3}]", "q1", 0, r#""<q1,1>"(pi)"#),
    ("[e,{q1,q2,q3}]", "q2", 0, "e"),
    ("[e,{q1,q2,q3}]", "q3", 0, r#""<q3,1>"(pi)"#),
];

fn dynamic_golden() -> Outcome {
    let m = samples::twin_args();
    ensure!(find_rho(&m).map_err(|e| e.to_string())?.is_none(), "twin_args has a renaming");
    let v = check_dynamic_fv(&m, None, 8).map_err(|e| e.to_string())?;
    ensure!(v.passed(), "{v}");
    let a = build_dynfv_att(&m).map_err(|e| e.to_string())?;
    for (sym, attr, child, text) in TWIN_ARGS_ATT_RULES {
        let want = parse_arhs(text, a.output(), a.syn(), a.inh()).map_err(|e| e.to_string())?;
        let got = if child == 0 { a.syn_rule(sym, attr) } else { a.inh_rule(sym, attr, child) };
        ensure!(got == Some(&want), "{sym} {attr}({child}): {got:?}");
    }
    // Every rule not listed is a dummy.
    let listed: Vec<(&str, &str, usize)> = TWIN_ARGS_ATT_RULES.iter().map(|r| (r.0, r.1, r.2)).collect();
    for sym in a.input().iter() {
        for s in a.syn() {
            if !listed.contains(&(sym.name(), s.as_str(), 0)) {
                ensure!(a.syn_rule(sym.name(), s).unwrap().to_string() == "e", "{sym} {s}");
            }
        }
        for i in 1..=sym.rank() {
            for b in a.inh() {
                if !listed.contains(&(sym.name(), b.as_str(), i)) {
                    ensure!(a.inh_rule(sym.name(), b, i).unwrap().to_string() == "e", "{sym} {b}({i})");
                }
            }
        }
    }
    let p = dynfv_pipeline(&m).map_err(|e| e.to_string())?;
    equal_up_to(&p, &single(m.clone()), 7, "dynfv pipeline vs twin_args")?;
    for n in 1..=4 {
        let s = tree(&m, &monadic(&repeat("a", n), "e"));
        let mut t = repeat("a", n - 1);
        t.extend(repeat("b", n - 1));
        t.extend(repeat("a", 2 * n - 2));
        let t = monadic(&t, "e");
        let got = p.apply(&s).map_err(|e| e.to_string())?.to_string();
        ensure!(got == format!("f({t},{t})"), "a^{n}(e): {got}");
    }
    Ok(())
}

fn conclusions_counterexample() -> Outcome {
    let m = samples::binary_blowup();
    let v = check_dynamic_fv(&m, None, 4).map_err(|e| e.to_string())?;
    let w = v.violation().ok_or(format!("no violation: {v}"))?;
    ensure!(w.source.size() <= 4, "violation on {}", w.source);
    ensure!(w.state == "q", "state {}", w.state);
    ensure!(w.first_value != w.second_value, "equal values {}", w.first_value);
    // Below #(aⁿ(e)) the leaf call of q receives n+1 distinct arguments.
    for n in 1..=4 {
        let mut prefix = repeat("#", 1);
        prefix.extend(repeat("a", n));
        let s = tree(&m, &monadic(&prefix, "e"));
        let leaf = Path::new(vec![1; n + 1]);
        let ct = call_trees(&m, &s, &leaf, "q").map_err(|e| e.to_string())?;
        let su = s.subtree(&leaf).unwrap();
        let mut values: Vec<Tree> =
            ct.trees.iter().filter_map(|t| evaluate_argument(&m, &t.children()[0], su)).collect();
        values.sort();
        values.dedup();
        ensure!(values.len() == n + 1, "n={n}: {} distinct arguments", values.len());
    }
    Ok(())
}

fn gadget() -> Outcome {
    for p in [single(samples::abcd()), single(samples::twin_args()), dynfv_pipeline(&samples::twin_args()).unwrap()] {
        let (la, g) = equivalence_gadget(&p, &p).map_err(|e| e.to_string())?;
        let v = check_dynamic_fv(&g, Some(&la), 6).map_err(|e| e.to_string())?;
        ensure!(v.passed(), "gadget of a pipeline with itself: {v}");
    }
    let m1 = parse_mtt(
        "mtt copy { input { a/1 e/0 } output { a/1 delta/2 e/0 } states { q/0 } initial q
         rule q a(x1) -> a(q[x1]) rule q e -> e }",
    )
    .unwrap();
    let m2 = parse_mtt(
        "mtt late { input { a/1 e/0 } output { a/1 delta/2 e/0 } states { q/0 r/0 s/0 } initial q
         rule q a(x1) -> a(r[x1]) rule q e -> e
         rule r a(x1) -> a(s[x1]) rule r e -> e
         rule s a(x1) -> a(s[x1]) rule s e -> delta(e,e) }",
    )
    .unwrap();
    let (p1, p2) = (single(m1), single(m2));
    let diff = equivalent_up_to(&p1, &p2, 4).map_err(|e| e.to_string())?;
    let DiffOutcome::Counterexample { input, out1, out2 } = diff.outcome else {
        return Err(format!("expected a difference: {diff}"));
    };
    ensure!(input.size() <= 4, "first difference at {input}");
    let (la, g) = equivalence_gadget(&p1, &p2).map_err(|e| e.to_string())?;
    let v = check_dynamic_fv(&g, Some(&la), input.size() + 1).map_err(|e| e.to_string())?;
    let w = v.violation().ok_or(format!("no violation: {v}"))?;
    let wrapped = Tree::build(g.input(), "a", vec![input.clone()]).unwrap();
    ensure!(w.source == wrapped, "violation on {} instead of {wrapped}", w.source);
    ensure!(w.node == Path::new(vec![1]) && w.state == "q'", "at {} in {}", w.node, w.state);
    let values = [w.first_value.to_string(), w.second_value.to_string()];
    ensure!(
        values == [out1.to_string(), out2.to_string()] || values == [out2.to_string(), out1.to_string()],
        "values {values:?} vs {out1} and {out2}"
    );
    Ok(())
}

fn importance_oracle() -> Outcome {
    let mut positions = 0;
    for m in samples::all_mtts() {
        let imp = Importance::new(&m).map_err(|e| e.to_string())?;
        for (q, sigma, rhs) in m.rules() {
            for v in rhs.node_set() {
                let fast = imp.is_important(q.name(), sigma.name(), &v).map_err(|e| e.to_string())?;
                let slow = important_by_substitution(&m, q.name(), sigma.name(), &v, 5);
                ensure!(fast == slow, "{}: ({q},{sigma}) at {v}: {fast} vs oracle {slow}", m.name());
                positions += 1;
            }
        }
    }
    ensure!(positions >= 90, "only {positions} positions");
    Ok(())
}

fn att_oracle(atts: &[Att]) -> Outcome {
    for a in atts {
        for s in all_trees(a.input(), 5).unwrap() {
            match a.evaluate(&s) {
                Ok(t) => {
                    let r = rewrite_att(a, &s, 100_000);
                    ensure!(r.as_ref() == Some(&t), "{} on {s}: {t} vs {r:?}", a.name());
                }
                Err(_) => ensure!(rewrite_att(a, &s, 10_000).is_none(), "{} on {s} rewrites", a.name()),
            }
        }
    }
    Ok(())
}

fn constructions_preserve_semantics() -> Outcome {
    let b = 6;
    let mut counts = [0usize; 9];
    for m in samples::all_mtts() {
        let src = single(m.clone());
        let nd = nondeleting_nf(&m).map_err(|e| format!("{}: {e}", m.name()))?;
        equal_up_to(&src, &nd.pipeline(), b, &format!("nondeleting_nf({})", m.name()))?;
        counts[0] += 1;
        // The nondeleting core with its renaming is FV, so it feeds the FV constructions.
        let mut fv: Vec<(Mtt, ParamRenaming, Vec<mtt_workbench::Stage>)> = Vec::new();
        if let Some(rho) = find_rho(&m).ok().flatten() {
            fv.push((m.clone(), rho, Vec::new()));
        }
        if let Some(rho) = nd.renaming.clone() {
            if check_fv(&nd.core, &rho).ok().flatten().is_none() {
                fv.push((nd.core.clone(), rho, vec![nd.lookahead.clone().into()]));
            }
        }
        for (core, rho, pre) in fv {
            let with = |s: mtt_workbench::Stage| {
                let mut v = pre.clone();
                v.push(s);
                Pipeline::new(v).unwrap()
            };
            let e = expand_to_consistent(&core, &rho).map_err(|e| e.to_string())?;
            equal_up_to(&src, &with(e.clone().into()), b, &format!("expand({})", core.name()))?;
            let o = omega(&e).map_err(|e| e.to_string())?;
            equal_up_to(&src, &with(o.into()), b, &format!("omega({})", core.name()))?;
            let od = omega_direct(&core, &rho).map_err(|e| e.to_string())?;
            equal_up_to(&src, &with(od.into()), b, &format!("omega_direct({})", core.name()))?;
            let f = fv_to_att(&core, &rho).map_err(|e| e.to_string())?;
            equal_up_to(&src, &with(f.clone().into()), b, &format!("fv_to_att({})", core.name()))?;
            let back = att_to_consistent_mtt(&f).map_err(|e| e.to_string())?;
            equal_up_to(&src, &with(back.into()), b, &format!("att_to_consistent_mtt({})", core.name()))?;
            for c in [1, 2, 3, 4, 5] {
                counts[c] += 1;
            }
        }
        if m.is_nondeleting() {
            let ne = nonerasing_nf(&m).map_err(|e| e.to_string())?;
            equal_up_to(&src, &ne.pipeline(), b, &format!("nonerasing_nf({})", m.name()))?;
            counts[6] += 1;
            let e = build_state_annotating_trel(&m);
            let p = trel_mtt_product(&e, &restricted_copy(&m)).map_err(|e| e.to_string())?;
            equal_up_to(&src, &single(p), b, &format!("trel_mtt_product({})", m.name()))?;
            counts[7] += 1;
            // The construction is only meant to preserve MTTs with the dynamic property.
            if check_dynamic_fv(&m, None, b).map_err(|e| e.to_string())?.passed() {
                let d = dynfv_pipeline(&m).map_err(|e| e.to_string())?;
                equal_up_to(&src, &d, b, &format!("dynfv pipeline({})", m.name()))?;
                counts[8] += 1;
            }
        }
    }
    for a in samples::noncircular_atts() {
        let back = att_to_consistent_mtt(&a).map_err(|e| e.to_string())?;
        equal_up_to(&single(a.clone()), &single(back), b, &format!("att_to_consistent_mtt({})", a.name()))?;
        counts[5] += 1;
    }
    ensure!(counts.iter().all(|&c| c > 0), "some construction never ran: {counts:?}");
    Ok(())
}

fn fv_implies_dynamic_fv() -> Outcome {
    let mut checked = 0;
    for m in samples::all_mtts() {
        if let Some(_rho) = find_rho(&m).ok().flatten() {
            let v = check_dynamic_fv(&m, None, 8).map_err(|e| e.to_string())?;
            ensure!(v.passed(), "{}: {v}", m.name());
            checked += 1;
        }
        let nd = nondeleting_nf(&m).map_err(|e| e.to_string())?;
        if let Some(rho) = &nd.renaming {
            if check_fv(&nd.core, rho).ok().flatten().is_none() {
                let la = single(nd.lookahead.clone());
                let v = check_dynamic_fv(&nd.core, Some(&la), 8).map_err(|e| e.to_string())?;
                ensure!(v.passed(), "{}: {v}", nd.core.name());
                checked += 1;
            }
        }
    }
    ensure!(checked >= 2, "only {checked} FV transducers");
    Ok(())
}

/// Along a dependency path from `<q1,j>` to `q2` at a node, the `j`-th
/// argument of any `q1` call is smaller than any value of `q2` there.
fn size_monotonicity() -> Outcome {
    for source in [samples::twin_args(), samples::abcd()] {
        let nf = nonerasing_nf(&source).map_err(|e| e.to_string())?;
        let m = nf.core;
        let e = build_state_annotating_trel(&m);
        let a = build_dynfv_att(&m).map_err(|e| e.to_string())?;
        let mut checked = 0;
        for s in all_trees(source.input(), 6).unwrap() {
            let s0 = nf.lookahead.apply(&s).0;
            let image = e.apply(&s0);
            for u in s0.node_set() {
                let su = s0.subtree(&u).unwrap();
                let g = a.full_dependency_graph(image.subtree(&u).unwrap());
                let ct: Vec<CallTreeSet> =
                    m.states().iter().map(|q| call_trees(&m, &s0, &u, q.name()).unwrap()).collect();
                for (k1, q1) in m.states().iter().enumerate() {
                    for j in 1..=q1.rank() {
                        let from =
                            Instance { kind: AttrKind::Inh, attr: param_attr_name(q1.name(), j).into(), node: Path::root() };
                        for (k2, q2) in m.states().iter().enumerate() {
                            let to = Instance { kind: AttrKind::Syn, attr: q2.name().into(), node: Path::root() };
                            if !g.has_path(&from, &to) {
                                continue;
                            }
                            for t1 in &ct[k1].trees {
                                for t2 in &ct[k2].trees {
                                    let l: Rhs = m.evaluate_hole_calls(&t1.children()[j - 1], su);
                                    let r: Rhs = m.evaluate_hole_calls(t2, su);
                                    ensure!(l.size() < r.size(), "{s0} at {u}: <{q1},{j}> -> {q2}");
                                    checked += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        ensure!(checked > 0, "{}: nothing checked", m.name());
    }
    Ok(())
}

fn property_suites() -> Outcome {
    importance_oracle()?;
    let mut atts = samples::all_atts();
    let m = samples::abcd();
    atts.push(fv_to_att(&m, &find_rho(&m).unwrap().unwrap()).unwrap());
    atts.push(build_dynfv_att(&samples::twin_args()).unwrap());
    att_oracle(&atts)?;
    constructions_preserve_semantics()?;
    fv_implies_dynamic_fv()?;
    size_monotonicity()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("abcd translation of #(a^n(e)), n = 0..6", abcd_semantics),
        ("padded consistent MTT of abcd, consistency verdicts", expansion_golden),
        ("nondeleting normal form of the consistent deleting MTT", worked_example),
        ("ATT of the normal form: rules, non-circularity, acyclic graph", att_of_worked_example),
        ("twin-argument MTT: no renaming, dynamic check, its ATT and pipeline", dynamic_golden),
        ("binary blow-up MTT violates the dynamic check", conclusions_counterexample),
        ("equivalence gadget", gadget),
        ("oracle and property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(()) => println!("criterion {}: PASS  {name} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
