//! Size-change matrices over the structural subterm order, their min-plus
//! composition, the call-graph closure, and the size-change verdict.

use crate::deppairs::DependencyPair;
use crate::signature::Signature;
use crate::syntax::{alpha_eq, spine, Term};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

/// A matrix entry: strict decrease, equality, or no information. Addition
/// saturates at strict decrease; anything plus Inf is Inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    Lt,
    Eq,
    Inf,
}

impl Entry {
    pub fn plus(self, other: Entry) -> Entry {
        match (self, other) {
            (Entry::Inf, _) | (_, Entry::Inf) => Entry::Inf,
            (Entry::Lt, _) | (_, Entry::Lt) => Entry::Lt,
            _ => Entry::Eq,
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Entry::Lt => s.serialize_i64(-1),
            Entry::Eq => s.serialize_i64(0),
            Entry::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Entry, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) if n.as_i64() == Some(-1) => Ok(Entry::Lt),
            serde_json::Value::Number(n) if n.as_i64() == Some(0) => Ok(Entry::Eq),
            serde_json::Value::String(s) if s == "inf" => Ok(Entry::Inf),
            other => Err(D::Error::custom(format!("invalid matrix entry {other}"))),
        }
    }
}

/// Comparison in the structural subterm order used for matrix entries:
/// a term is strictly greater than each argument of its application spine
/// when the head is a symbol, transitively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtermCmp {
    Strict,
    Equal,
    Incomparable,
}

impl From<SubtermCmp> for Entry {
    fn from(c: SubtermCmp) -> Entry {
        match c {
            SubtermCmp::Strict => Entry::Lt,
            SubtermCmp::Equal => Entry::Eq,
            SubtermCmp::Incomparable => Entry::Inf,
        }
    }
}

pub fn subterm_ge(l: &Term, m: &Term) -> SubtermCmp {
    fn strict(l: &Term, m: &Term) -> bool {
        let (head, args) = spine(l);
        if !matches!(head, Term::Sym(_)) || args.is_empty() {
            return false;
        }
        args.iter().any(|a| alpha_eq(a, m) || strict(a, m))
    }
    if alpha_eq(l, m) {
        SubtermCmp::Equal
    } else if strict(l, m) {
        SubtermCmp::Strict
    } else {
        SubtermCmp::Incomparable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SCMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Entry>,
}

impl SCMatrix {
    pub fn filled(rows: usize, cols: usize, e: Entry) -> SCMatrix {
        SCMatrix { rows, cols, entries: vec![e; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Entry>>) -> SCMatrix {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        SCMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> Entry {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Entry) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn row_major(&self) -> Vec<Vec<Entry>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Min-plus composition: the entry (i, k) is the best composed
    /// relation over any intermediate argument j.
    pub fn compose(&self, other: &SCMatrix) -> SCMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in composition");
        let mut out = SCMatrix::filled(self.rows, other.cols, Entry::Inf);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut best = Entry::Inf;
                for j in 0..self.cols {
                    best = best.min(self.get(i, j).plus(other.get(j, k)));
                }
                out.set(i, k, best);
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.rows == self.cols && self.compose(self) == *self
    }

    pub fn has_diagonal_decrease(&self) -> bool {
        (0..self.rows.min(self.cols)).any(|i| self.get(i, i) == Entry::Lt)
    }

    /// Deletes one row and/or column, for comparisons against matrices
    /// presented with a parameter elided.
    pub fn delete(&self, row: Option<usize>, col: Option<usize>) -> SCMatrix {
        let rows: Vec<Vec<Entry>> = (0..self.rows)
            .filter(|i| Some(*i) != row)
            .map(|i| (0..self.cols).filter(|j| Some(*j) != col).map(|j| self.get(i, j)).collect())
            .collect();
        SCMatrix::from_rows(rows)
    }
}

/// Builds the size-change matrix of a dependency pair. Dimensions come
/// from the arities of the declared types; argument positions beyond those
/// present in the pair are padded with Inf, which realizes closure of the
/// pairs under left-application.
pub fn build_matrix(dp: &DependencyPair, sig: &Signature) -> SCMatrix {
    let rows = sig.get(&dp.lhs_head).map(|s| s.arity).unwrap_or(0);
    let cols = sig.get(&dp.rhs_head).map(|s| s.arity).unwrap_or(0);
    let mut m = SCMatrix::filled(rows, cols, Entry::Inf);
    for (i, l) in dp.lhs_args.iter().enumerate().take(rows) {
        for (j, r) in dp.rhs_args.iter().enumerate().take(cols) {
            m.set(i, j, subterm_ge(l, r).into());
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectEdge {
    pub label: String,
    pub from: String,
    pub to: String,
    pub matrix: SCMatrix,
}

/// Call graph between defined symbols. `direct` keeps one edge per
/// dependency pair; `edges` holds the matrix sets actually used for the
/// closure, with identical matrices merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CallGraph {
    /// Defined symbols in declaration order.
    pub nodes: Vec<String>,
    /// Node display names (infix operator when declared).
    pub display: BTreeMap<String, String>,
    pub direct: Vec<DirectEdge>,
    pub edges: BTreeMap<(String, String), BTreeSet<SCMatrix>>,
}

impl CallGraph {
    pub fn display_name<'a>(&'a self, node: &'a str) -> &'a str {
        self.display.get(node).map(String::as_str).unwrap_or(node)
    }
}

pub fn build_call_graph(dps: &[DependencyPair], sig: &Signature) -> CallGraph {
    let nodes: Vec<String> =
        sig.symbols.iter().filter(|s| s.defined).map(|s| s.name.clone()).collect();
    let display = nodes.iter().map(|n| (n.clone(), sig.display(n).to_string())).collect();
    let mut g = CallGraph { nodes, display, ..CallGraph::default() };
    for dp in dps {
        let m = build_matrix(dp, sig);
        g.direct.push(DirectEdge {
            label: dp.label.clone(),
            from: dp.lhs_head.clone(),
            to: dp.rhs_head.clone(),
            matrix: m.clone(),
        });
        g.edges.entry((dp.lhs_head.clone(), dp.rhs_head.clone())).or_default().insert(m);
    }
    g
}

/// Saturates the edge sets under composition: whenever matrices label
/// consecutive edges f -> g -> h, their composition labels f -> h.
pub fn transitive_closure(g: &CallGraph) -> CallGraph {
    let mut closed = g.clone();
    loop {
        let mut additions: Vec<((String, String), SCMatrix)> = Vec::new();
        for ((f, g1), ms) in &closed.edges {
            for ((g2, h), ns) in &closed.edges {
                if g1 != g2 {
                    continue;
                }
                for m in ms {
                    for n in ns {
                        let c = m.compose(n);
                        let key = (f.clone(), h.clone());
                        if !closed.edges.get(&key).is_some_and(|s| s.contains(&c)) {
                            additions.push((key, c));
                        }
                    }
                }
            }
        }
        if additions.is_empty() {
            return closed;
        }
        for (key, m) in additions {
            closed.edges.entry(key).or_default().insert(m);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SctOutcome {
    Pass,
    Fail(Vec<(String, SCMatrix)>),
}

/// Loop edges (f, f) of a closed graph with their matrices.
pub fn loops(g: &CallGraph) -> Vec<(String, SCMatrix)> {
    let mut out = Vec::new();
    for ((f, h), ms) in &g.edges {
        if f == h {
            for m in ms {
                out.push((f.clone(), m.clone()));
            }
        }
    }
    out
}

/// The size-change criterion over a closed call graph: every idempotent
/// loop matrix must have a strict decrease on its diagonal.
pub fn check_sct(closed: &CallGraph) -> SctOutcome {
    let mut violations = Vec::new();
    for (f, m) in loops(closed) {
        if m.is_idempotent() && !m.has_diagonal_decrease() {
            violations.push((f, m));
        }
    }
    if violations.is_empty() {
        SctOutcome::Pass
    } else {
        SctOutcome::Fail(violations)
    }
}
