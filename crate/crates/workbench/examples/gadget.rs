//! Reducing pipeline equivalence to the dynamic argument check.

use mtt_workbench::dynfv::{check_dynamic_fv, equivalence_gadget};
use mtt_workbench::format::{parse_mtt, print_mtt};
use mtt_workbench::samples;
use mtt_workbench::Pipeline;

fn main() {
    let p = Pipeline::single(samples::abcd());
    let (la, g) = equivalence_gadget(&p, &p).unwrap();
    println!("abcd with itself: {}", check_dynamic_fv(&g, Some(&la), 6).unwrap());

    let copy = parse_mtt(
        "mtt copy { input { a/1 e/0 } output { a/1 e/0 } states { q/0 } initial q
           rule q a(x1) -> a(q[x1]) rule q e -> e }",
    )
    .unwrap();
    let shorter = parse_mtt(
        "mtt shorter { input { a/1 e/0 } output { a/1 e/0 } states { q/0 r/0 } initial q
           rule q a(x1) -> a(r[x1]) rule q e -> e
           rule r a(x1) -> r[x1] rule r e -> e }",
    )
    .unwrap();
    let (la, g) = equivalence_gadget(&Pipeline::single(copy), &Pipeline::single(shorter)).unwrap();
    print!("{}", print_mtt(&g));
    println!("copy vs shorter: {}", check_dynamic_fv(&g, Some(&la), 5).unwrap());
}
