//! Evaluating an MTT, an ATT and a relabeling pipeline on input trees.

use mtt_workbench::format::parse_documents;
use mtt_workbench::samples;
use mtt_workbench::syntax::parse_tree;
use mtt_workbench::Pipeline;

fn main() {
    let m = samples::abcd();
    for n in 0..4 {
        let text = format!("#({}e{})", "a(".repeat(n), ")".repeat(n));
        let s = parse_tree(&text, m.input()).unwrap();
        println!("{} {s} = {}", m.name(), m.translate(&s));
    }

    // A state applied to a subtree gives a tree with parameter leaves.
    let s = parse_tree("a(a(e))", m.input()).unwrap();
    println!("q1 on {s} = {}", m.state_semantics("q1", &s));

    let a = samples::abcd_att();
    let s = parse_tree("#(a(a(e)))", a.input()).unwrap();
    println!("{} {s} = {}", a.name(), a.evaluate(&s).unwrap());

    // Files may hold several documents; they run left to right.
    let docs = parse_documents(
        "brel mark { input { a/1 e/0 } output { a/1 b/1 e/0 } states { even odd }
           rule e -> even : e
           rule a(even) -> odd : b
           rule a(odd) -> even : a }
         mtt count { input { a/1 b/1 e/0 } output { s/1 z/0 } states { q/0 } initial q
           rule q a(x1) -> q[x1]
           rule q b(x1) -> s(q[x1])
           rule q e -> z }",
    )
    .unwrap();
    let p = Pipeline::new(docs).unwrap();
    let s = parse_tree("a(a(a(a(a(e)))))", p.input()).unwrap();
    println!("odd-position count of {s} = {}", p.apply(&s).unwrap());
}
