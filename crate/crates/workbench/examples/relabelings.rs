//! Bottom-up and top-down relabelings, and folding a top-down relabeling
//! into the MTT that reads its output.

use mtt_workbench::constructions::trel_mtt_product;
use mtt_workbench::difftest::equivalent_up_to;
use mtt_workbench::format::{parse_brel, parse_mtt, parse_trel, print_mtt};
use mtt_workbench::syntax::parse_tree;
use mtt_workbench::Pipeline;

fn main() {
    // Marks each node with the parity of its depth.
    let depth = parse_trel(
        "trel depth { input { f/2 e/0 } output { f0/2 f1/2 e0/0 e1/0 } states { even odd } initial even
           rule even f -> f0(odd,odd)
           rule odd f -> f1(even,even)
           rule even e -> e0
           rule odd e -> e1 }",
    )
    .unwrap();
    // Marks each node with whether its subtree is a single leaf.
    let leafy = parse_brel(
        "brel leafy { input { f/2 e/0 } output { f/2 h/2 e/0 } states { leaf inner }
           rule e -> leaf : e
           rule f(leaf,leaf) -> inner : h
           rule f(leaf,inner) -> inner : f
           rule f(inner,leaf) -> inner : f
           rule f(inner,inner) -> inner : f }",
    )
    .unwrap();
    let s = parse_tree("f(f(e,e),e)", depth.input()).unwrap();
    println!("{} -> {}", s, depth.apply(&s));
    println!("{} -> {}", s, leafy.apply(&s).0);

    let m = parse_mtt(
        "mtt odd_leaves { input { f0/2 f1/2 e0/0 e1/0 } output { c/2 x/0 n/0 } states { q/0 } initial q
           rule q f0(x1,x2) -> c(q[x1],q[x2])
           rule q f1(x1,x2) -> c(q[x1],q[x2])
           rule q e0 -> n
           rule q e1 -> x }",
    )
    .unwrap();
    let product = trel_mtt_product(&depth, &m).unwrap();
    print!("{}", print_mtt(&product));
    let two = Pipeline::new(vec![depth.into(), m.into()]).unwrap();
    println!("{}", equivalent_up_to(&two, &Pipeline::single(product), 7).unwrap());
}
