//! A bounded search for reduction cycles. Rule left-hand sides are
//! grounded with small constructor terms and the reducts explored
//! breadth-first; a reduct alpha-equivalent to one of its ancestors is a
//! concrete non-termination witness. The search is deterministic: ground
//! instances are enumerated in a fixed order and reducts are explored in
//! the order the rewrite engine yields them.

use crate::rewrite::{reduce_step, ReductKind, Substitution};
use crate::signature::{Rule, Signature};
use crate::syntax::{alpha_canon, build_spine, spine, Pos, Term};
use crate::typecheck::infer_rule_environment;

const MAX_PER_ARG: usize = 4;
const MAX_PER_TYPE: usize = 16;
const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzStep {
    pub term: Term,
    pub kind: ReductKind,
    pub pos: Pos,
}

/// A concrete cycle: `trace.last()` is alpha-equivalent to the
/// `cycle_start`-th element of the sequence `[start, trace...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzWitness {
    pub start: Term,
    pub trace: Vec<FuzzStep>,
    pub cycle_start: usize,
}

pub fn fuzz_nontermination(
    sig: &Signature,
    rules: &[Rule],
    seeds: usize,
    depth: usize,
) -> Option<FuzzWitness> {
    let starts = ground_starts(sig, rules, seeds);
    for start in starts {
        if let Some(w) = search(&start, rules, depth) {
            return Some(w);
        }
    }
    None
}

/// Closed instances of rule left-hand sides, taken round-robin across the
/// rules so that every rule contributes early seeds.
fn ground_starts(sig: &Signature, rules: &[Rule], seeds: usize) -> Vec<Term> {
    let mut per_rule: Vec<Vec<Term>> = Vec::new();
    for rule in rules {
        let Ok(env) = infer_rule_environment(rule, sig) else {
            per_rule.push(Vec::new());
            continue;
        };
        let mut assignments: Vec<Substitution> = vec![Substitution::new()];
        let mut groundable = true;
        for (var, ty) in &env.delta {
            let candidates = ground_terms(sig, ty, 2);
            if candidates.is_empty() {
                groundable = false;
                break;
            }
            let mut next = Vec::new();
            for a in &assignments {
                for c in &candidates {
                    let mut a = a.clone();
                    a.insert(var.clone(), c.clone());
                    next.push(a);
                }
            }
            assignments = next;
            if assignments.len() > MAX_PER_TYPE * MAX_PER_TYPE {
                assignments.truncate(MAX_PER_TYPE * MAX_PER_TYPE);
            }
        }
        if !groundable {
            per_rule.push(Vec::new());
            continue;
        }
        let lhs = build_spine(Term::sym(rule.head.as_str()), rule.args.iter().cloned());
        per_rule
            .push(assignments.iter().map(|a| crate::rewrite::substitute(&lhs, a)).collect());
    }
    let mut starts = Vec::new();
    let mut round = 0;
    while starts.len() < seeds {
        let mut any = false;
        for terms in &per_rule {
            if let Some(t) = terms.get(round) {
                any = true;
                if starts.len() < seeds && !starts.contains(t) {
                    starts.push(t.clone());
                }
            }
        }
        if !any {
            break;
        }
        round += 1;
    }
    starts.truncate(seeds);
    starts
}

/// Closed terms of a given type, built from undefined symbols whose
/// codomain has the same head. Types that are products or variable-headed
/// have no reliable constructors and yield nothing.
fn ground_terms(sig: &Signature, ty: &Term, depth: usize) -> Vec<Term> {
    let (head, _) = spine(ty);
    let Term::Sym(d) = head else { return Vec::new() };
    let d = d.clone();
    let mut out = Vec::new();
    for name in sig.symbols.iter().map(|s| s.name.clone()) {
        let info = sig.get(&name).unwrap();
        if info.defined {
            continue;
        }
        let (cod_head, _) = spine(&info.codomain);
        if !matches!(cod_head, Term::Sym(c) if *c == d) {
            continue;
        }
        if info.arity == 0 {
            out.push(Term::sym(&name));
        } else if depth > 0 {
            let mut partials: Vec<(Substitution, Vec<Term>)> =
                vec![(Substitution::new(), Vec::new())];
            let mut ok = true;
            for (binder, dom) in &info.telescope {
                let mut next = Vec::new();
                for (inst, args) in &partials {
                    let dom = crate::rewrite::substitute(dom, inst);
                    let mut cands = ground_terms(sig, &dom, depth - 1);
                    cands.truncate(MAX_PER_ARG);
                    for c in cands {
                        let mut inst = inst.clone();
                        if !binder.is_empty() {
                            inst.insert(binder.clone(), c.clone());
                        }
                        let mut args = args.clone();
                        args.push(c);
                        next.push((inst, args));
                    }
                }
                if next.is_empty() {
                    ok = false;
                    break;
                }
                next.truncate(MAX_PER_TYPE);
                partials = next;
            }
            if ok {
                for (_, args) in partials {
                    out.push(build_spine(Term::sym(name.as_str()), args));
                }
            }
        }
        if out.len() >= MAX_PER_TYPE {
            out.truncate(MAX_PER_TYPE);
            break;
        }
    }
    out
}

struct Node {
    term: Term,
    parent: Option<usize>,
    via: Option<(ReductKind, Pos)>,
    depth: usize,
    canon: Term,
}

fn search(start: &Term, rules: &[Rule], depth: usize) -> Option<FuzzWitness> {
    let mut arena = vec![Node {
        term: start.clone(),
        parent: None,
        via: None,
        depth: 0,
        canon: alpha_canon(start),
    }];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if arena[i].depth >= depth {
            continue;
        }
        let reducts = reduce_step(&arena[i].term, rules);
        for r in reducts {
            let canon = alpha_canon(&r.term);
            let mut j = Some(i);
            while let Some(k) = j {
                if arena[k].canon == canon {
                    return Some(witness(&arena, i, k, r.term, r.kind, r.pos));
                }
                j = arena[k].parent;
            }
            if arena.len() >= MAX_NODES {
                return None;
            }
            arena.push(Node {
                term: r.term,
                parent: Some(i),
                via: Some((r.kind, r.pos)),
                depth: arena[i].depth + 1,
                canon,
            });
            queue.push_back(arena.len() - 1);
        }
    }
    None
}

fn witness(
    arena: &[Node],
    tip: usize,
    ancestor: usize,
    closing_term: Term,
    closing_kind: ReductKind,
    closing_pos: Pos,
) -> FuzzWitness {
    let mut chain = Vec::new();
    let mut j = Some(tip);
    while let Some(k) = j {
        chain.push(k);
        j = arena[k].parent;
    }
    chain.reverse();
    let mut trace = Vec::new();
    for &k in chain.iter().skip(1) {
        let (kind, pos) = arena[k].via.clone().expect("non-root nodes record their step");
        trace.push(FuzzStep { term: arena[k].term.clone(), kind, pos });
    }
    trace.push(FuzzStep { term: closing_term, kind: closing_kind, pos: closing_pos });
    FuzzWitness { start: arena[chain[0]].term.clone(), trace, cycle_start: arena[ancestor].depth }
}
