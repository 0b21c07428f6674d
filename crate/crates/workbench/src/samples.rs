//! Reference transducers used throughout tests and examples.

use crate::att::Att;
use crate::format::{parse_att, parse_mtt};
use crate::mtt::Mtt;

pub const ABCD_MTT: &str = include_str!("../samples/abcd.mtt");
pub const ABCD_PADDED_MTT: &str = include_str!("../samples/abcd_padded.mtt");
pub const DELETING_MTT: &str = include_str!("../samples/deleting.mtt");
pub const TWIN_ARGS_MTT: &str = include_str!("../samples/twin_args.mtt");
pub const BINARY_BLOWUP_MTT: &str = include_str!("../samples/binary_blowup.mtt");
pub const CHAIN_ATT: &str = include_str!("../samples/chain.att");
pub const LOOP_ATT: &str = include_str!("../samples/loop.att");
pub const MIRROR_ATT: &str = include_str!("../samples/mirror.att");
pub const ABCD_ATT: &str = include_str!("../samples/abcd.att");

fn mtt(text: &str) -> Mtt {
    parse_mtt(text).unwrap_or_else(|e| panic!("bundled sample does not parse: {e}"))
}

fn att(text: &str) -> Att {
    parse_att(text).unwrap_or_else(|e| panic!("bundled sample does not parse: {e}"))
}

/// `#(a^n(e))` to `a^n(b^n(c^n(d^n(e))))`, one parameter per state.
pub fn abcd() -> Mtt {
    mtt(ABCD_MTT)
}

/// The same translation with two parameters per state, padded so it is consistent.
pub fn abcd_padded() -> Mtt {
    mtt(ABCD_PADDED_MTT)
}

/// Consistent MTT whose states delete parameters depending on the input.
pub fn deleting() -> Mtt {
    mtt(DELETING_MTT)
}

/// Two calls of q1 receive syntactically different but always equal arguments.
pub fn twin_args() -> Mtt {
    mtt(TWIN_ARGS_MTT)
}

/// Monadic input to full binary output; q sees ever more distinct arguments.
pub fn binary_blowup() -> Mtt {
    mtt(BINARY_BLOWUP_MTT)
}

pub fn chain_att() -> Att {
    att(CHAIN_ATT)
}

pub fn loop_att() -> Att {
    att(LOOP_ATT)
}

pub fn mirror_att() -> Att {
    att(MIRROR_ATT)
}

pub fn abcd_att() -> Att {
    att(ABCD_ATT)
}

pub fn all_mtts() -> Vec<Mtt> {
    vec![abcd(), abcd_padded(), deleting(), twin_args(), binary_blowup()]
}

pub fn all_atts() -> Vec<Att> {
    vec![chain_att(), loop_att(), mirror_att(), abcd_att()]
}

/// Non-circular ATTs only.
pub fn noncircular_atts() -> Vec<Att> {
    vec![chain_att(), mirror_att(), abcd_att()]
}
