//! From an MTT with a parameter renaming to a consistent MTT, to an ATT,
//! and back.

use mtt_workbench::analysis::find_rho;
use mtt_workbench::constructions::{att_to_consistent_mtt, expand_to_consistent, fv_to_att, omega_direct};
use mtt_workbench::difftest::equivalent_up_to;
use mtt_workbench::format::{print_att, print_mtt};
use mtt_workbench::samples;
use mtt_workbench::Pipeline;

fn main() {
    let m = samples::abcd();
    let rho = find_rho(&m).unwrap().expect("abcd has a renaming");

    let e = expand_to_consistent(&m, &rho).unwrap();
    print!("{}", print_mtt(&e));

    let a = fv_to_att(&m, &rho).unwrap();
    print!("{}", print_att(&a));

    let direct = omega_direct(&m, &rho).unwrap();
    println!("direct construction: {} inherited attributes", direct.inh().len());

    let back = att_to_consistent_mtt(&a).unwrap();
    print!("{}", print_mtt(&back));

    let src = Pipeline::single(m);
    for (name, p) in [
        ("padded", Pipeline::single(e)),
        ("att", Pipeline::single(a)),
        ("direct", Pipeline::single(direct)),
        ("back", Pipeline::single(back)),
    ] {
        println!("{name}: {}", equivalent_up_to(&src, &p, 8).unwrap());
    }
}
