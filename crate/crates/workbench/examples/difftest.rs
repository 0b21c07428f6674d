//! Bounded equivalence testing of two pipelines.

use mtt_workbench::constructions::nondeleting_nf;
use mtt_workbench::difftest::equivalent_up_to;
use mtt_workbench::samples;
use mtt_workbench::Pipeline;

fn main() {
    let a = Pipeline::single(samples::abcd());
    let padded = Pipeline::single(samples::abcd_padded());
    let blowup = Pipeline::single(samples::binary_blowup());
    let nf = nondeleting_nf(&samples::abcd_padded()).unwrap().pipeline();

    for bound in [4, 8] {
        println!("abcd vs abcd_padded: {}", equivalent_up_to(&a, &padded, bound).unwrap());
    }
    println!("abcd_padded vs its normal form: {}", equivalent_up_to(&padded, &nf, 8).unwrap());
    let r = equivalent_up_to(&a, &blowup, 6).unwrap();
    println!("abcd vs binary_blowup: {r} (after {} inputs)", r.tested);
    match equivalent_up_to(&a, &Pipeline::single(samples::twin_args()), 3) {
        Ok(r) => println!("{r}"),
        Err(e) => println!("abcd vs twin_args: {e}"),
    }
}
