//! The dynamic argument check: call trees at a node, the bounded search
//! for differing arguments, and the state-annotating ATT construction.

use mtt_workbench::dynfv::{build_dynfv_att, call_trees, check_dynamic_fv, dynfv_pipeline, evaluate_argument};
use mtt_workbench::format::{print_att, print_trel};
use mtt_workbench::samples;
use mtt_workbench::syntax::parse_tree;
use mtt_workbench::Path;

fn main() {
    let m = samples::twin_args();
    let s = parse_tree("a(a(e))", m.input()).unwrap();
    let u: Path = "1".parse().unwrap();
    let ct = call_trees(&m, &s, &u, "q1").unwrap();
    let su = s.subtree(&u).unwrap();
    for t in &ct.trees {
        let arg = evaluate_argument(&m, &t.children()[0], su).unwrap();
        println!("call {t} at {u}: argument evaluates to {arg}");
    }
    println!("{}: {}", m.name(), check_dynamic_fv(&m, None, 8).unwrap());

    let p = dynfv_pipeline(&m).unwrap();
    print!("{}", print_trel(match &p.stages()[0] {
        mtt_workbench::Stage::Trel(t) => t,
        _ => unreachable!(),
    }));
    print!("{}", print_att(&build_dynfv_att(&m).unwrap()));
    for n in 1..=4 {
        let s = parse_tree(&format!("{}e{}", "a(".repeat(n), ")".repeat(n)), m.input()).unwrap();
        println!("{s} -> {}", p.apply(&s).unwrap());
    }

    let b = samples::binary_blowup();
    println!("{}: {}", b.name(), check_dynamic_fv(&b, None, 5).unwrap());
}
