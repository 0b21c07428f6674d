//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use mtt_workbench::att::{AttrKind, AttrLabel, AttrTree};
use mtt_workbench::mtt::{rhs_out, Rhs, RhsLabel};
use mtt_workbench::tree::{all_trees, Term};
use mtt_workbench::{Att, Mtt, Path, Symbol, Tree};

/// `q`'s translation of `s`, written with parameter leaves.
fn semantics_table(m: &Mtt, trees: &[Tree]) -> Vec<Vec<Rhs>> {
    trees.iter().map(|s| m.states().iter().map(|q| m.state_semantics(q.name(), s)).collect()).collect()
}

/// Replaces every call `<q', x_i>(args)` by `M_q'(s_i)` with its parameters
/// bound to the (already substituted) arguments.
fn substitute(m: &Mtt, r: &Rhs, choice: &[usize], table: &[Vec<Rhs>]) -> Rhs {
    let kids: Vec<Rhs> = r.children().iter().map(|c| substitute(m, c, choice, table)).collect();
    match r.label() {
        RhsLabel::Call(q, i) => {
            let qi = m.state_index(q.name()).unwrap();
            table[choice[i - 1]][qi].instantiate_params(&kids)
        }
        other => Term::new(other.clone(), kids).unwrap(),
    }
}

/// Marks node `v` with a fresh leaf and looks for the mark in the fully
/// substituted right-hand side, over every tuple of subtrees with at most
/// `max_size` nodes each.
pub fn important_by_substitution(m: &Mtt, q: &str, sigma: &str, v: &Path, max_size: usize) -> bool {
    let rhs = m.rhs(q, sigma).unwrap();
    let star = rhs_out(Symbol::new("*", 0), Vec::new()).unwrap();
    let marked = rhs.replace_subtree(v, star).unwrap();
    let k = m.input().get(sigma).unwrap().rank();
    let trees = all_trees(m.input(), max_size).unwrap();
    let table = semantics_table(m, &trees);
    let mut choice = vec![0usize; k];
    loop {
        let out = substitute(m, &marked, &choice, &table);
        if out.any_label(&|l| matches!(l, RhsLabel::Out(s) if s.name() == "*")) {
            return true;
        }
        // Next tuple in odometer order.
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            choice[i] += 1;
            if choice[i] < trees.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Out(Symbol, Vec<Node>),
    Inst(AttrKind, String, Path),
}

fn expand(a: &Att, s: &Tree, kind: AttrKind, attr: &str, u: &Path) -> Option<Node> {
    let (rhs, base) = match kind {
        AttrKind::Syn => (a.syn_rule(s.get(u)?.label().name(), attr)?.clone(), u.clone()),
        AttrKind::Inh => {
            let (p, i) = u.parent()?;
            (a.inh_rule(s.get(&p)?.label().name(), attr, i)?.clone(), p)
        }
    };
    fn conv(t: &AttrTree, base: &Path) -> Node {
        match t.label() {
            AttrLabel::Out(sym) => Node::Out(sym.clone(), t.children().iter().map(|c| conv(c, base)).collect()),
            AttrLabel::Syn(n, j) => Node::Inst(AttrKind::Syn, n.to_string(), if *j == 0 { base.clone() } else { base.child(*j) }),
            AttrLabel::Inh(n, j) => Node::Inst(AttrKind::Inh, n.to_string(), if *j == 0 { base.clone() } else { base.child(*j) }),
        }
    }
    Some(conv(&rhs, &base))
}

/// Rewrites the leftmost attribute instance once; `Some(false)` when none is left.
fn step(a: &Att, s: &Tree, n: &mut Node) -> Option<bool> {
    match n {
        Node::Inst(k, attr, u) => {
            *n = expand(a, s, *k, attr, u)?;
            Some(true)
        }
        Node::Out(_, kids) => {
            for c in kids {
                if step(a, s, c)? {
                    return Some(true);
                }
            }
            Some(false)
        }
    }
}

fn finish(n: &Node) -> Tree {
    match n {
        Node::Out(s, k) => Tree::new(s.clone(), k.iter().map(finish).collect()).unwrap(),
        Node::Inst(..) => unreachable!(),
    }
}

/// Evaluates by literal rewriting from the root attribute; `None` if a
/// rule is missing (an inherited attribute at the root) or the step limit
/// is hit (circularity).
pub fn rewrite_att(a: &Att, s: &Tree, max_steps: usize) -> Option<Tree> {
    let mut t = Node::Inst(AttrKind::Syn, a.root().to_string(), Path::root());
    for _ in 0..max_steps {
        if !step(a, s, &mut t)? {
            return Some(finish(&t));
        }
    }
    None
}

/// `σ1(σ2(…σn(leaf)))` as text.
pub fn monadic(prefix: &[&str], leaf: &str) -> String {
    let mut s = String::new();
    for p in prefix {
        s.push_str(p);
        s.push('(');
    }
    s.push_str(leaf);
    s.push_str(&")".repeat(prefix.len()));
    s
}

pub fn repeat<'a>(sym: &'a str, n: usize) -> Vec<&'a str> {
    vec![sym; n]
}
