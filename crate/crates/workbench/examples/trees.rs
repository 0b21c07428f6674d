//! Ranked alphabets, parsing, enumeration and second-order substitution.

use mtt_workbench::syntax::parse_tree;
use mtt_workbench::tree::{all_trees, enumerate_trees, SecondOrderSubstitution};
use mtt_workbench::{RankedAlphabet, Symbol, Tree};

fn main() {
    let sigma = RankedAlphabet::from_pairs(&[("f", 2), ("g", 1), ("e", 0)]).unwrap();
    let s = parse_tree("f(g(e),e)", &sigma).unwrap();
    println!("{s}: size {}, height {}", s.size(), s.height());
    for (u, t) in s.preorder() {
        println!("  {u}: {}", t.label());
    }

    for n in 1..=7 {
        println!("trees with at most {n} nodes: {}", all_trees(&sigma, n).unwrap().len());
    }
    let first: Vec<String> = enumerate_trees(&sigma, 4).unwrap().take(6).map(|t| t.to_string()).collect();
    println!("first in enumeration order: {}", first.join(" "));

    // Replace every g(t) by f(t,t): g becomes a one-parameter context.
    let g = Symbol::new("g", 1);
    let ctx = Tree::build(&sigma, "f", vec![Tree::param(1), Tree::param(1)]).unwrap();
    let sub = SecondOrderSubstitution::new().with(g, ctx).unwrap();
    println!("{s} with g(y1) := f(y1,y1) is {}", s.subst_second_order(&sub));
}
