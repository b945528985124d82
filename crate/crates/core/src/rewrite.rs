//! Substitution, syntactic matching, and the reduction relation (beta
//! together with the rewrite rules), plus fueled normalization and
//! joinability.

use crate::signature::Rule;
use crate::syntax::{alpha_eq, free_vars, Pos, Term};
use std::collections::BTreeMap;

pub type Substitution = BTreeMap<String, Term>;

/// Capture-avoiding substitution. Binders that would capture a free
/// variable of the substituted terms are renamed with primes.
pub fn substitute(t: &Term, sub: &Substitution) -> Term {
    if sub.is_empty() {
        return t.clone();
    }
    match t {
        Term::Sort(_) | Term::Sym(_) => t.clone(),
        Term::Var(x) => sub.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, a) => Term::app(substitute(f, sub), substitute(a, sub)),
        Term::Prod(x, a, b) | Term::Abs(x, a, b) => {
            let dom = substitute(a, sub);
            let inner: Substitution = sub
                .iter()
                .filter(|(k, _)| *k != x)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let relevant = || {
                let body_fv = free_vars(b);
                inner
                    .iter()
                    .any(|(k, v)| body_fv.contains(k) && free_vars(v).contains(x))
            };
            let (binder, body) = if x.is_empty() || inner.is_empty() || !relevant() {
                (x.clone(), substitute(b, &inner))
            } else {
                let mut fresh = format!("{x}'");
                let body_fv = free_vars(b);
                while body_fv.contains(&fresh)
                    || inner.contains_key(&fresh)
                    || inner.values().any(|v| free_vars(v).contains(&fresh))
                {
                    fresh.push('\'');
                }
                let mut renamed = inner;
                renamed.insert(x.clone(), Term::Var(fresh.clone()));
                (fresh, substitute(b, &renamed))
            };
            match t {
                Term::Prod(..) => Term::prod(binder, dom, body),
                _ => Term::abs(binder, dom, body),
            }
        }
    }
}

/// First-order syntactic matching of a rule pattern against a subject.
/// Pattern variables may repeat; repeated occurrences must match
/// alpha-equal subjects. Binders inside a pattern are matched rigidly, up
/// to alpha-equivalence.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, out: &mut Substitution) -> bool {
        match (p, t) {
            (Term::Var(x), _) => match out.get(x) {
                Some(prev) => alpha_eq(prev, t),
                None => {
                    out.insert(x.clone(), t.clone());
                    true
                }
            },
            (Term::Sym(a), Term::Sym(b)) => a == b,
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => go(f, g, out) && go(a, b, out),
            (Term::Prod(..), _) | (Term::Abs(..), _) => alpha_eq(p, t),
            _ => false,
        }
    }
    let mut out = Substitution::new();
    go(pattern, subject, &mut out).then_some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductKind {
    Beta,
    Rule(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduct {
    pub term: Term,
    pub kind: ReductKind,
    pub pos: Pos,
}

/// All one-step reducts of `t`, in a fixed order: positions in preorder,
/// and at each position beta first, then the rules in declaration order.
pub fn reduce_step(t: &Term, rules: &[Rule]) -> Vec<Reduct> {
    let mut out = Vec::new();
    if let Term::App(f, a) = t {
        if let Term::Abs(x, _, b) = &**f {
            let mut s = Substitution::new();
            if !x.is_empty() {
                s.insert(x.clone(), (**a).clone());
            }
            out.push(Reduct { term: substitute(b, &s), kind: ReductKind::Beta, pos: Vec::new() });
        }
    }
    for (i, r) in rules.iter().enumerate() {
        if let Some(s) = match_term(&r.lhs, t) {
            out.push(Reduct {
                term: substitute(&r.rhs, &s),
                kind: ReductKind::Rule(i),
                pos: Vec::new(),
            });
        }
    }
    let mut child = |edge: usize, sub: &Term, rebuild: &dyn Fn(Term) -> Term| {
        for r in reduce_step(sub, rules) {
            let mut pos = Vec::with_capacity(r.pos.len() + 1);
            pos.push(edge);
            pos.extend(r.pos);
            out.push(Reduct { term: rebuild(r.term), kind: r.kind, pos });
        }
    };
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Sym(_) => {}
        Term::App(f, a) => {
            child(0, f, &|n| Term::app(n, (**a).clone()));
            child(1, a, &|n| Term::app((**f).clone(), n));
        }
        Term::Prod(x, a, b) => {
            child(0, a, &|n| Term::prod(x.clone(), n, (**b).clone()));
            child(1, b, &|n| Term::prod(x.clone(), (**a).clone(), n));
        }
        Term::Abs(x, a, b) => {
            child(0, a, &|n| Term::abs(x.clone(), n, (**b).clone()));
            child(1, b, &|n| Term::abs(x.clone(), (**a).clone(), n));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normal,
    FuelExhausted,
}

/// Repeatedly applies the first reduct until no redex remains or the fuel
/// runs out. Fuel counts reduction steps, so a term already in normal form
/// normalizes with zero fuel.
pub fn normalize(t: &Term, rules: &[Rule], mut fuel: u64) -> (Term, NormalizeOutcome) {
    let mut cur = t.clone();
    loop {
        let mut reducts = reduce_step(&cur, rules);
        if reducts.is_empty() {
            return (cur, NormalizeOutcome::Normal);
        }
        if fuel == 0 {
            return (cur, NormalizeOutcome::FuelExhausted);
        }
        fuel -= 1;
        cur = reducts.swap_remove(0).term;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joinability {
    Yes,
    No,
    Unknown,
}

/// Checks whether two terms reduce to a common term, by normalizing both
/// with the given fuel and comparing up to alpha. A definite No is only
/// reported when both sides fully normalized.
pub fn joinable(a: &Term, b: &Term, rules: &[Rule], fuel: u64) -> Joinability {
    if alpha_eq(a, b) {
        return Joinability::Yes;
    }
    let (na, oa) = normalize(a, rules, fuel);
    let (nb, ob) = normalize(b, rules, fuel);
    if alpha_eq(&na, &nb) {
        Joinability::Yes
    } else if oa == NormalizeOutcome::Normal && ob == NormalizeOutcome::Normal {
        Joinability::No
    } else {
        Joinability::Unknown
    }
}
