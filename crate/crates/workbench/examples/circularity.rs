//! ATT circularity: the global test, a witness cycle, and the
//! dependency graph exported as DOT.

use mtt_workbench::att::format_cycle;
use mtt_workbench::samples;
use mtt_workbench::syntax::parse_tree;

fn main() {
    for a in samples::all_atts() {
        match a.is_circular() {
            Some(w) => println!("{}: circular on {}: {}", a.name(), w.input, format_cycle(&w.cycle)),
            None => println!("{}: noncircular", a.name()),
        }
    }

    let a = samples::loop_att();
    let s = parse_tree("a(e)", a.input()).unwrap();
    print!("{}", a.dependency_graph(&s).to_dot());
    println!("evaluation: {:?}", a.evaluate(&s).map(|t| t.to_string()));

    let a = samples::abcd_att();
    let s = parse_tree("#(a(a(e)))", a.input()).unwrap();
    let g = a.full_dependency_graph(&s);
    println!("{} on {s}: {} edges, acyclic = {}", a.name(), g.edge_count(), g.shortest_cycle().is_none());
}
