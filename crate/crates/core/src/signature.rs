//! Symbol table, rule table, product arities, and the symbol precedence
//! generated by type dependencies and right-hand-side calls.

use crate::syntax::{spine, structural_subterms, Declaration, Sort, Term};
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub head: String,
    pub args: Vec<Term>,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolInfo {
    pub name: String,
    pub theta: Term,
    /// Sort of the declared type itself: KIND when the type ends in TYPE,
    /// TYPE otherwise.
    pub sort: Sort,
    /// Number of leading products of the declared type.
    pub arity: usize,
    /// Leading products as (binder, domain) pairs; anonymous binders are
    /// empty strings.
    pub telescope: Vec<(String, Term)>,
    /// The declared type stripped of its leading products.
    pub codomain: Term,
    pub defined: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Signature {
    pub symbols: Vec<SymbolInfo>,
    by_name: HashMap<String, usize>,
    /// symbol name -> declared operator (first declaration wins).
    pub infix: BTreeMap<String, String>,
}

impl Signature {
    pub fn get(&self, name: &str) -> Option<&SymbolInfo> {
        self.by_name.get(name).map(|&i| &self.symbols[i])
    }

    pub fn defined(&self, name: &str) -> bool {
        self.get(name).is_some_and(|s| s.defined)
    }

    /// Display name for reports and graphs: the infix operator when the
    /// symbol has one.
    pub fn display<'a>(&'a self, name: &'a str) -> &'a str {
        self.infix.get(name).map(String::as_str).unwrap_or(name)
    }

    /// The codomain of `name` after consuming `applied` arguments `args`,
    /// with telescope binders instantiated positionally. When fewer
    /// arguments than the arity are given the result is the remaining
    /// product.
    pub fn instantiated_codomain(&self, name: &str, args: &[Term]) -> Term {
        let info = self.get(name).expect("unknown symbol");
        let mut sub = crate::rewrite::Substitution::new();
        for ((binder, _), arg) in info.telescope.iter().zip(args) {
            if !binder.is_empty() {
                sub.insert(binder.clone(), arg.clone());
            }
        }
        let mut rest = info.codomain.clone();
        for (binder, dom) in info.telescope[args.len()..].iter().rev() {
            rest = Term::prod(binder.clone(), dom.clone(), rest);
        }
        crate::rewrite::substitute(&rest, &sub)
    }
}

/// Number of leading products of a type.
pub fn product_arity(t: &Term) -> usize {
    match t {
        Term::Prod(_, _, b) => 1 + product_arity(b),
        _ => 0,
    }
}

fn telescope_of(t: &Term) -> (Vec<(String, Term)>, Term) {
    let mut tele = Vec::new();
    let mut cur = t;
    while let Term::Prod(x, a, b) = cur {
        tele.push((x.clone(), (**a).clone()));
        cur = b;
    }
    (tele, cur.clone())
}

/// Builds the symbol and rule tables from parsed declarations. The parser
/// has already validated names, so this cannot fail.
pub fn build_signature(decls: &[Declaration]) -> (Signature, Vec<Rule>) {
    let mut sig = Signature::default();
    let mut rules = Vec::new();
    for d in decls {
        match d {
            Declaration::Symbol { name, ty } => {
                let (telescope, codomain) = telescope_of(ty);
                let sort = if codomain == Term::Sort(Sort::Type) { Sort::Kind } else { Sort::Type };
                sig.by_name.insert(name.clone(), sig.symbols.len());
                sig.symbols.push(SymbolInfo {
                    name: name.clone(),
                    theta: ty.clone(),
                    sort,
                    arity: telescope.len(),
                    telescope,
                    codomain,
                    defined: false,
                });
            }
            Declaration::Rule { lhs, rhs } => {
                let (head, args) = spine(lhs);
                let Term::Sym(head) = head else { unreachable!("parser checks rule heads") };
                let idx = sig.by_name[head];
                sig.symbols[idx].defined = true;
                rules.push(Rule {
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    head: head.clone(),
                    args: args.into_iter().cloned().collect(),
                    index: rules.len(),
                });
            }
            Declaration::Infix { op, symbol } => {
                sig.infix.entry(symbol.clone()).or_insert_with(|| op.clone());
            }
        }
    }
    (sig, rules)
}

/// The quasi-order on symbols: f is at least g when g occurs in the
/// declared type of f or in the right-hand side of a rule headed by f.
/// Symbols are compared through the strongly connected components of that
/// relation; class ids are deterministic under rule reordering.
#[derive(Debug, Clone)]
pub struct Precedence {
    pub class_of: BTreeMap<String, usize>,
    /// Members of each class, in declaration order.
    pub classes: Vec<Vec<String>>,
    /// Direct edges of the condensation: (higher class, lower class).
    pub class_edges: BTreeSet<(usize, usize)>,
    below: Vec<BTreeSet<usize>>,
}

impl Precedence {
    /// g is strictly below f.
    pub fn strictly_less(&self, g: &str, f: &str) -> bool {
        let (cg, cf) = (self.class_of[g], self.class_of[f]);
        cg != cf && self.below[cf].contains(&cg)
    }

    pub fn equivalent(&self, f: &str, g: &str) -> bool {
        self.class_of[f] == self.class_of[g]
    }

    pub fn less_eq(&self, g: &str, f: &str) -> bool {
        self.equivalent(f, g) || self.strictly_less(g, f)
    }
}

fn symbols_in(t: &Term, out: &mut BTreeSet<String>) {
    for (_, s) in structural_subterms(t) {
        if let Term::Sym(name) = s {
            out.insert(name.clone());
        }
    }
}

pub fn build_precedence(sig: &Signature, rules: &[Rule]) -> Precedence {
    let mut graph: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..sig.symbols.len()).map(|i| graph.add_node(i)).collect();
    let index_of: HashMap<&str, usize> =
        sig.symbols.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
    let add_edges = |from: usize, t: &Term, graph: &mut DiGraph<usize, ()>| {
        let mut syms = BTreeSet::new();
        symbols_in(t, &mut syms);
        for s in syms {
            let to = index_of[s.as_str()];
            graph.update_edge(nodes[from], nodes[to], ());
        }
    };
    for (i, info) in sig.symbols.iter().enumerate() {
        add_edges(i, &info.theta, &mut graph);
    }
    for r in rules {
        add_edges(index_of[r.head.as_str()], &r.rhs, &mut graph);
    }

    // Tarjan gives components in reverse topological order (callees first).
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut scc_of = vec![0usize; sig.symbols.len()];
    for (k, comp) in sccs.iter().enumerate() {
        for &n in comp {
            scc_of[graph[n]] = k;
        }
    }
    // Rank each component by the longest chain strictly below it, then
    // order classes by (rank, first declaration index) for stable ids.
    let mut succs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).unwrap();
        let (ka, kb) = (scc_of[graph[a]], scc_of[graph[b]]);
        if ka != kb {
            succs[ka].insert(kb);
        }
    }
    let mut rank = vec![0usize; sccs.len()];
    // Reverse topological order means successors are already ranked.
    for k in 0..sccs.len() {
        rank[k] = succs[k].iter().map(|&s| rank[s] + 1).max().unwrap_or(0);
    }
    let mut order: Vec<usize> = (0..sccs.len()).collect();
    let min_decl = |k: usize| sccs[k].iter().map(|&n| graph[n]).min().unwrap();
    order.sort_by_key(|&k| (rank[k], min_decl(k)));
    let mut id_of_scc = vec![0usize; sccs.len()];
    for (id, &k) in order.iter().enumerate() {
        id_of_scc[k] = id;
    }

    let mut classes = vec![Vec::new(); sccs.len()];
    for (i, info) in sig.symbols.iter().enumerate() {
        classes[id_of_scc[scc_of[i]]].push(info.name.clone());
    }
    let class_of: BTreeMap<String, usize> = sig
        .symbols
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.clone(), id_of_scc[scc_of[i]]))
        .collect();
    let mut class_edges = BTreeSet::new();
    for (k, ss) in succs.iter().enumerate() {
        for &s in ss {
            class_edges.insert((id_of_scc[k], id_of_scc[s]));
        }
    }
    // Transitive closure over the condensation. Classes come in ascending
    // rank order, so everything below a class is complete before the class
    // itself is processed.
    let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    for &k in &order {
        let id = id_of_scc[k];
        let direct: Vec<usize> =
            class_edges.iter().filter(|(f, _)| *f == id).map(|&(_, t)| t).collect();
        for d in direct {
            below[id].insert(d);
            let trans: Vec<usize> = below[d].iter().copied().collect();
            below[id].extend(trans);
        }
    }
    Precedence { class_of, classes, class_edges, below }
}

#[derive(Debug, Clone)]
pub struct RuleArity {
    pub rule: usize,
    pub head: String,
    pub args: usize,
    pub arity: usize,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct ConditionB {
    pub pass: bool,
    pub per_rule: Vec<RuleArity>,
}

/// Every rule must apply its head symbol to at most the arity of the
/// declared type.
pub fn check_condition_b(sig: &Signature, rules: &[Rule]) -> ConditionB {
    let per_rule: Vec<RuleArity> = rules
        .iter()
        .map(|r| {
            let arity = sig.get(&r.head).map(|s| s.arity).unwrap_or(0);
            RuleArity {
                rule: r.index,
                head: r.head.clone(),
                args: r.args.len(),
                arity,
                ok: r.args.len() <= arity,
            }
        })
        .collect();
    ConditionB { pass: per_rule.iter().all(|r| r.ok), per_rule }
}
