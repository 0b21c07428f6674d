//! Text formats for MTTs, ATTs, relabelings and parameter renamings.

use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use crate::analysis::ParamRenaming;
use crate::att::{Att, AttParts, AttValidationReport, AttrLabel, AttrTree, SymbolRules};
use crate::mtt::{Mtt, MttParts, Rhs, RhsLabel, ValidationReport, HOLE};
use crate::relabel::{Brel, BrelRule, RelabelError, Stage, Trel, TrelRule};
use crate::syntax::{arity_error, quote_name, Cursor, ParseError, Tok};
use crate::tree::{reserved_index, RankedAlphabet, Symbol, Term};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid MTT: {0}")]
    Invalid(ValidationReport),
    #[error("invalid ATT: {0}")]
    InvalidAtt(AttValidationReport),
    #[error("invalid relabeling: {0}")]
    Relabel(RelabelError),
    #[error("expected {expected}, found {found}")]
    Kind { expected: &'static str, found: &'static str },
    #[error("{0}")]
    Rho(String),
}

/// One parsed document of a (possibly multi-document) file.
pub fn parse_documents(text: &str) -> Result<Vec<Stage>, FormatError> {
    let mut c = Cursor::new(text)?;
    let mut out = Vec::new();
    while !c.at_eof() {
        out.push(document(&mut c)?);
    }
    if out.is_empty() {
        return Err(c.err("no transducer in input")?);
    }
    Ok(out)
}

fn document(c: &mut Cursor) -> Result<Stage, FormatError> {
    if c.is_keyword("mtt") {
        Ok(Stage::Mtt(mtt_doc(c)?))
    } else if c.is_keyword("att") {
        Ok(Stage::Att(att_doc(c)?))
    } else if c.is_keyword("brel") {
        Ok(Stage::Brel(brel_doc(c)?))
    } else if c.is_keyword("trel") {
        Ok(Stage::Trel(trel_doc(c)?))
    } else {
        Err(c.err(format!("expected mtt, att, brel or trel, found {}", c.peek()))?)
    }
}

fn single(text: &str) -> Result<Stage, FormatError> {
    let mut c = Cursor::new(text)?;
    let d = document(&mut c)?;
    if !c.at_eof() {
        return Err(c.err(format!("trailing input: {}", c.peek()))?);
    }
    Ok(d)
}

fn kind_error(expected: &'static str, found: &Stage) -> FormatError {
    FormatError::Kind { expected, found: found.kind() }
}

pub fn parse_mtt(text: &str) -> Result<Mtt, FormatError> {
    match single(text)? {
        Stage::Mtt(m) => Ok(m),
        other => Err(kind_error("mtt", &other)),
    }
}

pub fn parse_att(text: &str) -> Result<Att, FormatError> {
    match single(text)? {
        Stage::Att(a) => Ok(a),
        other => Err(kind_error("att", &other)),
    }
}

pub fn parse_brel(text: &str) -> Result<Brel, FormatError> {
    match single(text)? {
        Stage::Brel(b) => Ok(b),
        other => Err(kind_error("brel", &other)),
    }
}

pub fn parse_trel(text: &str) -> Result<Trel, FormatError> {
    match single(text)? {
        Stage::Trel(t) => Ok(t),
        other => Err(kind_error("trel", &other)),
    }
}

/// Optional document name before `{`.
fn doc_header(c: &mut Cursor, kw: &str) -> Result<String, ParseError> {
    c.keyword(kw)?;
    let name = if *c.peek() == Tok::LBrace { kw.to_string() } else { c.name()? };
    c.expect(Tok::LBrace)?;
    Ok(name)
}

struct Sections {
    input: Option<RankedAlphabet>,
    output: Option<RankedAlphabet>,
}

impl Sections {
    fn new() -> Self {
        Sections { input: None, output: None }
    }

    /// Parses `input {…}` or `output {…}` if present.
    fn try_alphabet(&mut self, c: &mut Cursor) -> Result<bool, ParseError> {
        if c.is_keyword("input") {
            c.bump();
            self.input = Some(c.alphabet_block()?);
            Ok(true)
        } else if c.is_keyword("output") {
            c.bump();
            self.output = Some(c.alphabet_block()?);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn both(&self, c: &Cursor) -> Result<(&RankedAlphabet, &RankedAlphabet), ParseError> {
        match (&self.input, &self.output) {
            (Some(i), Some(o)) => Ok((i, o)),
            _ => c.err("input and output alphabets must be declared before rules"),
        }
    }
}

fn mtt_doc(c: &mut Cursor) -> Result<Mtt, FormatError> {
    let name = doc_header(c, "mtt")?;
    let mut sec = Sections::new();
    let mut states: Option<RankedAlphabet> = None;
    let mut initial: Option<String> = None;
    let mut rules = IndexMap::new();
    loop {
        if c.eat(&Tok::RBrace) {
            break;
        }
        if sec.try_alphabet(c)? {
            continue;
        }
        if c.is_keyword("states") {
            c.bump();
            states = Some(c.alphabet_block()?);
        } else if c.is_keyword("initial") {
            c.bump();
            initial = Some(c.name()?);
        } else if c.is_keyword("rule") {
            c.bump();
            let (input, output) = sec.both(c)?;
            let Some(states) = &states else {
                return Err(c.err("states must be declared before rules")?);
            };
            let pos = c.pos();
            let (key, rhs) = mtt_rule(c, input, output, states)?;
            if rules.insert(key.clone(), rhs).is_some() {
                return Err(c.invalid(pos, format!("duplicate rule ({},{})", key.0, key.1))?);
            }
        } else {
            return Err(c.err(format!("unexpected {} in mtt", c.peek()))?);
        }
    }
    let (input, output) = sec.both(c)?;
    let parts = MttParts {
        name,
        input: input.clone(),
        output: output.clone(),
        states: states.ok_or_else(|| c.err::<()>("missing states").unwrap_err())?,
        initial: initial.ok_or_else(|| c.err::<()>("missing initial state").unwrap_err())?,
        rules,
    };
    Mtt::new(parts).map_err(FormatError::Invalid)
}

fn var_list(c: &mut Cursor, prefix: char, n: usize) -> Result<(), ParseError> {
    c.expect(Tok::LParen)?;
    for i in 1..=n {
        if i > 1 {
            c.expect(Tok::Comma)?;
        }
        let pos = c.pos();
        let v = c.name()?;
        if reserved_index(&v, prefix) != Some(i) {
            return c.invalid(pos, format!("expected {prefix}{i}, found {v}"));
        }
    }
    c.expect(Tok::RParen)
}

fn mtt_rule(
    c: &mut Cursor,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    states: &RankedAlphabet,
) -> Result<((String, String), Rhs), ParseError> {
    let pos = c.pos();
    let qn = c.name()?;
    let q = states.get(&qn).ok_or(ParseError::UnknownSymbol { pos, name: qn.clone() })?;
    let pos = c.pos();
    let sn = c.name()?;
    let sigma = input.get(&sn).ok_or(ParseError::UnknownSymbol { pos, name: sn.clone() })?;
    if sigma.rank() > 0 {
        var_list(c, 'x', sigma.rank())?;
    } else if *c.peek() == Tok::LParen && *c.peek_at(1) == Tok::RParen {
        c.bump();
        c.bump();
    }
    if q.rank() > 0 {
        var_list(c, 'y', q.rank())?;
    }
    c.expect(Tok::Arrow)?;
    let rhs = rhs_term(c, output, states)?;
    Ok(((qn, sn), rhs))
}

fn rhs_args(c: &mut Cursor, output: &RankedAlphabet, states: &RankedAlphabet) -> Result<Vec<Rhs>, ParseError> {
    let mut v = Vec::new();
    if c.eat(&Tok::LParen) {
        if c.eat(&Tok::RParen) {
            return Ok(v);
        }
        loop {
            v.push(rhs_term(c, output, states)?);
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(Tok::Comma)?;
        }
    }
    Ok(v)
}

/// Parses a right-hand side; `pub` for tests and tools that build rules.
pub fn rhs_term(c: &mut Cursor, output: &RankedAlphabet, states: &RankedAlphabet) -> Result<Rhs, ParseError> {
    let pos = c.pos();
    let tok = c.bump();
    let (name, quoted) = match tok {
        Tok::Name(n) => (n, false),
        Tok::Quoted(n) => (n, true),
        t => return Err(ParseError::Syntax { pos, msg: format!("expected a right-hand side, found {t}") }),
    };
    if !quoted {
        if let Some(j) = reserved_index(&name, 'y') {
            return Ok(crate::mtt::rhs_param(j));
        }
    }
    if c.eat(&Tok::LBracket) {
        let vpos = c.pos();
        let v = c.name()?;
        let i = if v == "x" {
            HOLE
        } else {
            reserved_index(&v, 'x').ok_or(ParseError::Syntax { pos: vpos, msg: format!("expected x<i>, found {v}") })?
        };
        c.expect(Tok::RBracket)?;
        let q = states.get(&name).ok_or(ParseError::UnknownSymbol { pos, name: name.clone() })?;
        let args = rhs_args(c, output, states)?;
        return Rhs::new(RhsLabel::Call(q, i), args).map_err(|e| arity_error(pos, e));
    }
    let sym = output.get(&name).ok_or(ParseError::UnknownSymbol { pos, name: name.clone() })?;
    let args = rhs_args(c, output, states)?;
    Rhs::new(RhsLabel::Out(sym), args).map_err(|e| arity_error(pos, e))
}

/// Parses one right-hand side from text.
pub fn parse_rhs(text: &str, output: &RankedAlphabet, states: &RankedAlphabet) -> Result<Rhs, ParseError> {
    let mut c = Cursor::new(text)?;
    let r = rhs_term(&mut c, output, states)?;
    if !c.at_eof() {
        return c.err(format!("trailing input: {}", c.peek()));
    }
    Ok(r)
}

/// `pi`, `pi 2` or `pi2` inside parentheses; returns the child index.
fn pi_ref(c: &mut Cursor) -> Result<Option<usize>, ParseError> {
    let pos = c.pos();
    let tok = c.name()?;
    let idx = if tok == "pi" {
        if *c.peek() == Tok::RParen {
            None
        } else {
            Some(c.number()?)
        }
    } else if let Some(rest) = tok.strip_prefix("pi").filter(|r| r.bytes().all(|b| b.is_ascii_digit())) {
        Some(rest.parse().map_err(|_| ParseError::Syntax { pos, msg: "bad child index".into() })?)
    } else {
        return Err(ParseError::Syntax { pos, msg: format!("expected pi, found {tok}") });
    };
    c.expect(Tok::RParen)?;
    Ok(idx)
}

fn is_pi(t: &Tok) -> bool {
    matches!(t, Tok::Name(n) if n == "pi" || n.strip_prefix("pi").is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())))
}

fn att_doc(c: &mut Cursor) -> Result<Att, FormatError> {
    let name = doc_header(c, "att")?;
    let mut sec = Sections::new();
    let mut syn = Vec::new();
    let mut inh = Vec::new();
    let mut root = None;
    let mut rules: IndexMap<String, SymbolRules> = IndexMap::new();
    loop {
        if c.eat(&Tok::RBrace) {
            break;
        }
        if sec.try_alphabet(c)? {
            continue;
        }
        if c.is_keyword("syn") {
            c.bump();
            syn = c.name_block()?;
        } else if c.is_keyword("inh") {
            c.bump();
            inh = c.name_block()?;
        } else if c.is_keyword("root") {
            c.bump();
            root = Some(c.name()?);
        } else if c.is_keyword("at") {
            c.bump();
            let (input, output) = sec.both(c)?;
            let pos = c.pos();
            let sn = c.name()?;
            let sigma = input.get(&sn).ok_or(ParseError::UnknownSymbol { pos, name: sn.clone() })?;
            if c.eat(&Tok::Slash) {
                let kpos = c.pos();
                let k = c.number()?;
                if k != sigma.rank() {
                    return Err(c.invalid(kpos, format!("{sn} has rank {}, not {k}", sigma.rank()))?);
                }
            }
            c.expect(Tok::LBrace)?;
            let entry = rules.entry(sn.clone()).or_default();
            while !c.eat(&Tok::RBrace) {
                let lpos = c.pos();
                let attr = c.name()?;
                c.expect(Tok::LParen)?;
                let idx = pi_ref(c)?;
                c.expect(Tok::Arrow)?;
                let rhs = arhs_term(c, output, &syn, &inh)?;
                c.eat(&Tok::Semi);
                let dup = match idx {
                    None => entry.syn.insert(attr.clone(), rhs).is_some(),
                    Some(i) => entry.inh.insert((attr.clone(), i), rhs).is_some(),
                };
                if dup {
                    return Err(c.invalid(lpos, format!("duplicate rule for {attr} at {sn}"))?);
                }
            }
        } else {
            return Err(c.err(format!("unexpected {} in att", c.peek()))?);
        }
    }
    let (input, output) = sec.both(c)?;
    let parts = AttParts {
        name,
        input: input.clone(),
        output: output.clone(),
        syn,
        inh,
        root: root.ok_or_else(|| c.err::<()>("missing root attribute").unwrap_err())?,
        rules,
    };
    Att::new(parts).map_err(FormatError::InvalidAtt)
}

fn arhs_term(c: &mut Cursor, output: &RankedAlphabet, syn: &[String], inh: &[String]) -> Result<AttrTree, ParseError> {
    let pos = c.pos();
    let name = c.name()?;
    if *c.peek() == Tok::LParen && is_pi(c.peek_at(1)) {
        c.bump();
        let idx = pi_ref(c)?.unwrap_or(0);
        let label = if syn.contains(&name) {
            AttrLabel::Syn(name.as_str().into(), idx)
        } else if inh.contains(&name) {
            AttrLabel::Inh(name.as_str().into(), idx)
        } else {
            return Err(ParseError::UnknownSymbol { pos, name });
        };
        return Ok(Term::leaf(label).expect("attribute leaves have no children"));
    }
    let sym = output.get(&name).ok_or(ParseError::UnknownSymbol { pos, name: name.clone() })?;
    let mut kids = Vec::new();
    if c.eat(&Tok::LParen) {
        if !c.eat(&Tok::RParen) {
            loop {
                kids.push(arhs_term(c, output, syn, inh)?);
                if c.eat(&Tok::RParen) {
                    break;
                }
                c.expect(Tok::Comma)?;
            }
        }
    }
    AttrTree::new(AttrLabel::Out(sym), kids).map_err(|e| arity_error(pos, e))
}

/// Parses one attribute right-hand side from text.
pub fn parse_arhs(text: &str, output: &RankedAlphabet, syn: &[String], inh: &[String]) -> Result<AttrTree, ParseError> {
    let mut c = Cursor::new(text)?;
    let r = arhs_term(&mut c, output, syn, inh)?;
    if !c.at_eof() {
        return c.err(format!("trailing input: {}", c.peek()));
    }
    Ok(r)
}

fn state_list(c: &mut Cursor) -> Result<Vec<String>, ParseError> {
    let mut v = Vec::new();
    if c.eat(&Tok::LParen) {
        if c.eat(&Tok::RParen) {
            return Ok(v);
        }
        loop {
            v.push(c.name()?);
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(Tok::Comma)?;
        }
    }
    Ok(v)
}

fn brel_doc(c: &mut Cursor) -> Result<Brel, FormatError> {
    let name = doc_header(c, "brel")?;
    let mut sec = Sections::new();
    let mut states = Vec::new();
    let mut rules = Vec::new();
    loop {
        if c.eat(&Tok::RBrace) {
            break;
        }
        if sec.try_alphabet(c)? {
            continue;
        }
        if c.is_keyword("states") {
            c.bump();
            states = c.name_block()?;
        } else if c.is_keyword("rule") {
            c.bump();
            let symbol = c.name()?;
            let children = state_list(c)?;
            c.expect(Tok::Arrow)?;
            let state = c.name()?;
            c.expect(Tok::Colon)?;
            let output = c.name()?;
            rules.push(BrelRule { symbol, children, state, output });
        } else {
            return Err(c.err(format!("unexpected {} in brel", c.peek()))?);
        }
    }
    let (input, output) = sec.both(c)?;
    Brel::new(name, input.clone(), output.clone(), states, rules).map_err(FormatError::Relabel)
}

fn trel_doc(c: &mut Cursor) -> Result<Trel, FormatError> {
    let name = doc_header(c, "trel")?;
    let mut sec = Sections::new();
    let mut states = Vec::new();
    let mut initial = None;
    let mut rules = Vec::new();
    loop {
        if c.eat(&Tok::RBrace) {
            break;
        }
        if sec.try_alphabet(c)? {
            continue;
        }
        if c.is_keyword("states") {
            c.bump();
            states = c.name_block()?;
        } else if c.is_keyword("initial") {
            c.bump();
            initial = Some(c.name()?);
        } else if c.is_keyword("rule") {
            c.bump();
            let state = c.name()?;
            let symbol = c.name()?;
            c.expect(Tok::Arrow)?;
            let output = c.name()?;
            let children = state_list(c)?;
            rules.push(TrelRule { state, symbol, output, children });
        } else {
            return Err(c.err(format!("unexpected {} in trel", c.peek()))?);
        }
    }
    let (input, output) = sec.both(c)?;
    let initial = initial.ok_or_else(|| c.err::<()>("missing initial state").unwrap_err())?;
    Trel::new(name, input.clone(), output.clone(), states, &initial, rules).map_err(FormatError::Relabel)
}

fn names_block(names: impl Iterator<Item = String>) -> String {
    names.map(|n| quote_name(&n)).collect::<Vec<_>>().join(" ")
}

fn write_vars(s: &mut String, prefix: char, n: usize) {
    if n > 0 {
        let v: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        let _ = write!(s, "({})", v.join(","));
    }
}

pub fn print_mtt(m: &Mtt) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mtt {} {{", quote_name(m.name()));
    let _ = writeln!(s, "  input {{ {} }}", m.input());
    let _ = writeln!(s, "  output {{ {} }}", m.output());
    let _ = writeln!(s, "  states {{ {} }}", m.states());
    let _ = writeln!(s, "  initial {}", quote_name(m.initial().name()));
    for (q, sigma, rhs) in m.rules() {
        let _ = write!(s, "  rule {} {}", q, sigma);
        write_vars(&mut s, 'x', sigma.rank());
        write_vars(&mut s, 'y', q.rank());
        let _ = writeln!(s, " -> {rhs}");
    }
    s.push_str("}\n");
    s
}

pub fn print_att(a: &Att) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "att {} {{", quote_name(a.name()));
    let _ = writeln!(s, "  input {{ {} }}", a.input());
    let _ = writeln!(s, "  output {{ {} }}", a.output());
    let _ = writeln!(s, "  syn {{ {} }}", names_block(a.syn().iter().cloned()));
    let _ = writeln!(s, "  inh {{ {} }}", names_block(a.inh().iter().cloned()));
    let _ = writeln!(s, "  root {}", quote_name(a.root()));
    for sigma in a.input().iter() {
        let _ = writeln!(s, "  at {}/{} {{", sigma, sigma.rank());
        for attr in a.syn() {
            let rhs = a.syn_rule(sigma.name(), attr).expect("total");
            let _ = writeln!(s, "    {}(pi) -> {rhs};", quote_name(attr));
        }
        for i in 1..=sigma.rank() {
            for attr in a.inh() {
                let rhs = a.inh_rule(sigma.name(), attr, i).expect("total");
                let _ = writeln!(s, "    {}(pi {i}) -> {rhs};", quote_name(attr));
            }
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

pub fn print_brel(b: &Brel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "brel {} {{", quote_name(b.name()));
    let _ = writeln!(s, "  input {{ {} }}", b.input());
    let _ = writeln!(s, "  output {{ {} }}", b.output());
    let _ = writeln!(s, "  states {{ {} }}", names_block(b.states().map(String::from)));
    for r in b.rules() {
        let _ = write!(s, "  rule {}", quote_name(&r.symbol));
        if !r.children.is_empty() {
            let _ = write!(s, "({})", r.children.iter().map(|c| quote_name(c)).collect::<Vec<_>>().join(","));
        }
        let _ = writeln!(s, " -> {} : {}", quote_name(&r.state), quote_name(&r.output));
    }
    s.push_str("}\n");
    s
}

pub fn print_trel(t: &Trel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trel {} {{", quote_name(t.name()));
    let _ = writeln!(s, "  input {{ {} }}", t.input());
    let _ = writeln!(s, "  output {{ {} }}", t.output());
    let _ = writeln!(s, "  states {{ {} }}", names_block(t.states().map(String::from)));
    let _ = writeln!(s, "  initial {}", quote_name(t.initial()));
    for r in t.rules() {
        let _ = write!(s, "  rule {} {} -> {}", quote_name(&r.state), quote_name(&r.symbol), quote_name(&r.output));
        if !r.children.is_empty() {
            let _ = write!(s, "({})", r.children.iter().map(|c| quote_name(c)).collect::<Vec<_>>().join(","));
        }
        s.push('\n');
    }
    s.push_str("}\n");
    s
}

pub fn print_stage(st: &Stage) -> String {
    match st {
        Stage::Brel(b) => print_brel(b),
        Stage::Trel(t) => print_trel(t),
        Stage::Mtt(m) => print_mtt(m),
        Stage::Att(a) => print_att(a),
    }
}

/// Lines `q j -> j′`.
pub fn print_rho(rho: &ParamRenaming) -> String {
    let mut s = String::new();
    for (q, j, v) in rho.entries() {
        let _ = writeln!(s, "{} {j} -> {v}", quote_name(q));
    }
    s
}

pub fn parse_rho(text: &str, m: &Mtt) -> Result<ParamRenaming, FormatError> {
    let mut c = Cursor::new(text)?;
    let mut rho = ParamRenaming::new();
    while !c.at_eof() {
        let pos = c.pos();
        let q = c.name()?;
        let Some(sym) = m.state(&q) else {
            return Err(ParseError::UnknownSymbol { pos, name: q }.into());
        };
        let j = c.number()?;
        c.expect(Tok::Arrow)?;
        let v = c.number()?;
        if j == 0 || j > sym.rank() || v == 0 {
            return Err(FormatError::Rho(format!("{pos}: index out of range in {q} {j} -> {v}")));
        }
        rho.set(&q, j, v);
    }
    rho.check_complete(m).map_err(FormatError::Rho)?;
    Ok(rho)
}

/// Helper used by printers of call labels in rule listings.
pub fn call_label(q: &Symbol, i: usize) -> String {
    let mut s = String::new();
    let _ = crate::mtt::write_call(&mut s, q.name(), i);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn mtt_round_trip() {
        for m in samples::all_mtts() {
            let text = print_mtt(&m);
            let back = parse_mtt(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert_eq!(print_mtt(&back), text);
        }
    }

    #[test]
    fn att_round_trip() {
        for a in samples::all_atts() {
            let text = print_att(&a);
            let back = parse_att(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert_eq!(print_att(&back), text);
        }
    }

    #[test]
    fn relabeling_round_trip() {
        let nf = crate::constructions::nondeleting_nf(&samples::deleting()).unwrap();
        let text = print_brel(&nf.lookahead);
        assert_eq!(print_brel(&parse_brel(&text).unwrap()), text);
        let t = crate::dynfv::build_state_annotating_trel(&samples::twin_args());
        let text = print_trel(&t);
        assert_eq!(print_trel(&parse_trel(&text).unwrap()), text);
    }

    #[test]
    fn multi_document_files() {
        let nf = crate::constructions::nondeleting_nf(&samples::deleting()).unwrap();
        let text = format!("// look-ahead\n{}\n{}", print_brel(&nf.lookahead), print_mtt(&nf.core));
        let docs = parse_documents(&text).unwrap();
        assert_eq!(docs.iter().map(Stage::kind).collect::<Vec<_>>(), ["brel", "mtt"]);
    }

    #[test]
    fn rho_round_trip() {
        let m = samples::abcd();
        let rho = parse_rho("q1 1 -> 1\nq2 1 -> 2\n", &m).unwrap();
        assert_eq!(print_rho(&rho), "q1 1 -> 1\nq2 1 -> 2\n");
        assert!(parse_rho("q1 1 -> 1\n", &m).is_err());
        assert!(parse_rho("q1 2 -> 1\nq2 1 -> 2\n", &m).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_mtt("mtt m { input { a/1 } output { e/0 } states { q/0 } initial q\n rule q b(x1) -> e }")
            .unwrap_err();
        match err {
            FormatError::Parse(ParseError::UnknownSymbol { pos, name }) => {
                assert_eq!(name, "b");
                assert_eq!(pos.line, 2);
            }
            other => panic!("{other:?}"),
        }
    }
}
