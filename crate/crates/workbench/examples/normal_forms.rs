//! Look-ahead normal forms: removing deleted parameters and bare
//! parameter right-hand sides.

use mtt_workbench::analysis::check_fv;
use mtt_workbench::constructions::{nondeleting_nf, nonerasing_nf};
use mtt_workbench::difftest::equivalent_up_to;
use mtt_workbench::format::{print_brel, print_mtt, print_rho};
use mtt_workbench::samples;
use mtt_workbench::Pipeline;

fn main() {
    let m = samples::deleting();
    let nf = nondeleting_nf(&m).unwrap();
    print!("{}", print_brel(&nf.lookahead));
    print!("{}", print_mtt(&nf.core));
    let rho = nf.renaming.as_ref().unwrap();
    print!("renaming of the core:\n{}", print_rho(rho));
    println!("core FV: {}", check_fv(&nf.core, rho).unwrap().is_none());
    println!("{}", equivalent_up_to(&Pipeline::single(m), &nf.pipeline(), 7).unwrap());

    let m = samples::abcd();
    let ne = nonerasing_nf(&m).unwrap();
    println!("nonerasing core of {}: nonerasing = {}", m.name(), ne.core.is_nonerasing());
    println!("{}", equivalent_up_to(&Pipeline::single(m), &ne.pipeline(), 7).unwrap());
}
