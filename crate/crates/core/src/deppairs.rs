//! Dependency pair extraction: for every rule `f l̄ --> r`, each maximal
//! application spine in `r` headed by a defined symbol `g` yields a pair
//! `f l̄ > g m̄` carrying all arguments of that spine.

use crate::signature::{Rule, Signature};
use crate::syntax::{build_spine, print_term, spine, Pos, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct DependencyPair {
    /// Letter label in extraction order: A, B, ..., Z, AA, ...
    pub label: String,
    pub rule: usize,
    /// Position of the spine in the rule's right-hand side.
    pub position: Pos,
    pub lhs_head: String,
    pub lhs_args: Vec<Term>,
    pub rhs_head: String,
    pub rhs_args: Vec<Term>,
}

pub fn pair_label(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

/// Extracts dependency pairs from all rules, in preorder over each
/// right-hand side (binder annotations and bodies included), rules in
/// declaration order.
pub fn extract_dependency_pairs(rules: &[Rule], sig: &Signature) -> Vec<DependencyPair> {
    let mut out = Vec::new();
    for rule in rules {
        visit(&rule.rhs, &mut Vec::new(), false, rule, sig, &mut out);
    }
    for (i, dp) in out.iter_mut().enumerate() {
        dp.label = pair_label(i);
    }
    out
}

fn visit(
    t: &Term,
    pos: &mut Pos,
    is_fun_child: bool,
    rule: &Rule,
    sig: &Signature,
    out: &mut Vec<DependencyPair>,
) {
    if !is_fun_child {
        let (head, args) = spine(t);
        if let Term::Sym(g) = head {
            if sig.defined(g) {
                out.push(DependencyPair {
                    label: String::new(),
                    rule: rule.index,
                    position: pos.clone(),
                    lhs_head: rule.head.clone(),
                    lhs_args: rule.args.clone(),
                    rhs_head: g.clone(),
                    rhs_args: args.into_iter().cloned().collect(),
                });
            }
        }
    }
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Sym(_) => {}
        Term::App(f, a) => {
            pos.push(0);
            visit(f, pos, true, rule, sig, out);
            pos.pop();
            pos.push(1);
            visit(a, pos, false, rule, sig, out);
            pos.pop();
        }
        Term::Prod(_, a, b) | Term::Abs(_, a, b) => {
            pos.push(0);
            visit(a, pos, false, rule, sig, out);
            pos.pop();
            pos.push(1);
            visit(b, pos, false, rule, sig, out);
            pos.pop();
        }
    }
}

/// Human-readable `f l1 ... lp > g m1 ... mq` form of a pair, using the
/// declared infix notation where available.
pub fn dp_text(dp: &DependencyPair, sig: &Signature) -> String {
    let lhs = build_spine(Term::sym(dp.lhs_head.as_str()), dp.lhs_args.iter().cloned());
    let rhs = build_spine(Term::sym(dp.rhs_head.as_str()), dp.rhs_args.iter().cloned());
    format!("{} > {}", print_term(&lhs, &sig.infix), print_term(&rhs, &sig.infix))
}

#[derive(Debug, Clone)]
pub struct PairArity {
    pub label: String,
    pub head: String,
    pub args: usize,
    pub arity: usize,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct ConditionC {
    pub pass: bool,
    pub per_pair: Vec<PairArity>,
}

/// Every dependency pair must apply its called symbol to at most the arity
/// of the declared type.
pub fn check_condition_c(dps: &[DependencyPair], sig: &Signature) -> ConditionC {
    let per_pair: Vec<PairArity> = dps
        .iter()
        .map(|dp| {
            let arity = sig.get(&dp.rhs_head).map(|s| s.arity).unwrap_or(0);
            PairArity {
                label: dp.label.clone(),
                head: dp.rhs_head.clone(),
                args: dp.rhs_args.len(),
                arity,
                ok: dp.rhs_args.len() <= arity,
            }
        })
        .collect();
    ConditionC { pass: per_pair.iter().all(|p| p.ok), per_pair }
}
