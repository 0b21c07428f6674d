//! Static analyses of MTT rules: importance, consistency, parameter
//! renamings, permanence and deletion.

use mtt_workbench::analysis::{deletion_witness, find_rho, is_consistent, is_permanent, occurrence_profiles, Importance};
use mtt_workbench::format::{print_mtt, print_rho};
use mtt_workbench::samples;

fn main() {
    let m = samples::abcd_padded();
    print!("{}", print_mtt(&m));

    let profiles = occurrence_profiles(&m).unwrap();
    for i in 0..profiles.len() {
        println!("profile p{}: {}", i + 1, profiles.describe(i));
    }

    let imp = Importance::new(&m).unwrap();
    let rhs = m.rhs("q0", "#").unwrap();
    for v in rhs.node_set() {
        let label = rhs.get(&v).unwrap().label();
        println!("rule (q0,#) node {v} {label}: important = {}", imp.is_important("q0", "#", &v).unwrap());
    }
    println!("y1 of q1 permanent: {}", is_permanent(&m, "q1", 1).unwrap());
    println!("y2 of q1 permanent: {}", is_permanent(&m, "q1", 2).unwrap());

    let a = samples::abcd();
    match is_consistent(&a).unwrap() {
        Some(v) => println!("{} is not consistent: {v}", a.name()),
        None => println!("{} is consistent", a.name()),
    }
    if let Some(rho) = find_rho(&a).unwrap() {
        print!("{} is FV with\n{}", a.name(), print_rho(&rho));
    }
    println!("twin_args renaming: {:?}", find_rho(&samples::twin_args()).unwrap().map(|r| print_rho(&r)));
    if let Some(w) = deletion_witness(&samples::deleting()) {
        println!("deleting: {w}");
    }
}
