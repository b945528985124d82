//! Term representation, concrete syntax, and structural helpers.

mod lexer;
mod parser;
mod printer;

pub use parser::parse_file;
pub use printer::{print_decl, print_term};

use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Type,
    Kind,
}

/// Terms of the calculus. Binder names are plain strings; the empty string
/// marks the anonymous binder of a non-dependent product (`A -> B`), which
/// can never collide with a variable because identifiers are non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Sort(Sort),
    Var(String),
    Sym(String),
    App(Box<Term>, Box<Term>),
    Prod(String, Box<Term>, Box<Term>),
    Abs(String, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Term {
        Term::Sym(name.into())
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn prod(binder: impl Into<String>, dom: Term, cod: Term) -> Term {
        Term::Prod(binder.into(), Box::new(dom), Box::new(cod))
    }

    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::prod("", dom, cod)
    }

    pub fn abs(binder: impl Into<String>, dom: Term, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(dom), Box::new(body))
    }
}

/// A path from the root of a term: 0 selects the function of an application
/// or the domain/annotation of a binder, 1 the argument or body.
pub type Pos = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Symbol { name: String, ty: Term },
    Rule { lhs: Term, rhs: Term },
    Infix { op: String, symbol: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// Free variables in sorted order.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match t {
            Term::Sort(_) | Term::Sym(_) => {}
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
            Term::Prod(x, a, b) | Term::Abs(x, a, b) => {
                go(a, bound, out);
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Every subterm with its position, in preorder. Binder annotations and
/// bodies are both visited.
pub fn structural_subterms(t: &Term) -> Vec<(Pos, &Term)> {
    fn go<'a>(t: &'a Term, pos: &mut Pos, out: &mut Vec<(Pos, &'a Term)>) {
        out.push((pos.clone(), t));
        match t {
            Term::Sort(_) | Term::Var(_) | Term::Sym(_) => {}
            Term::App(f, a) => {
                pos.push(0);
                go(f, pos, out);
                pos.pop();
                pos.push(1);
                go(a, pos, out);
                pos.pop();
            }
            Term::Prod(_, a, b) | Term::Abs(_, a, b) => {
                pos.push(0);
                go(a, pos, out);
                pos.pop();
                pos.push(1);
                go(b, pos, out);
                pos.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Alpha-equivalence: equality up to consistent renaming of bound variables.
pub fn alpha_eq(s: &Term, t: &Term) -> bool {
    fn go(s: &Term, t: &Term, ls: &mut Vec<String>, rs: &mut Vec<String>) -> bool {
        match (s, t) {
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::Sym(a), Term::Sym(b)) => a == b,
            (Term::Var(x), Term::Var(y)) => {
                let i = ls.iter().rposition(|b| b == x);
                let j = rs.iter().rposition(|b| b == y);
                match (i, j) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::App(f, a), Term::App(g, b)) => go(f, g, ls, rs) && go(a, b, ls, rs),
            (Term::Prod(x, a, b), Term::Prod(y, c, d))
            | (Term::Abs(x, a, b), Term::Abs(y, c, d)) => {
                if !go(a, c, ls, rs) {
                    return false;
                }
                ls.push(x.clone());
                rs.push(y.clone());
                let r = go(b, d, ls, rs);
                ls.pop();
                rs.pop();
                r
            }
            _ => false,
        }
    }
    go(s, t, &mut Vec::new(), &mut Vec::new())
}

/// Canonical renaming of bound variables to `$0`, `$1`, ... in traversal
/// order. Two terms are alpha-equivalent exactly when their canonical forms
/// are structurally equal, so the result works as a hash/set key.
pub fn alpha_canon(t: &Term) -> Term {
    fn go(t: &Term, ctx: &mut Vec<(String, String)>, counter: &mut usize) -> Term {
        match t {
            Term::Sort(_) | Term::Sym(_) => t.clone(),
            Term::Var(x) => {
                let name = ctx
                    .iter()
                    .rev()
                    .find(|(orig, _)| orig == x)
                    .map(|(_, fresh)| fresh.clone())
                    .unwrap_or_else(|| x.clone());
                Term::Var(name)
            }
            Term::App(f, a) => Term::app(go(f, ctx, counter), go(a, ctx, counter)),
            Term::Prod(x, a, b) | Term::Abs(x, a, b) => {
                let dom = go(a, ctx, counter);
                let fresh = format!("${counter}");
                *counter += 1;
                ctx.push((x.clone(), fresh.clone()));
                let body = go(b, ctx, counter);
                ctx.pop();
                match t {
                    Term::Prod(..) => Term::prod(fresh, dom, body),
                    _ => Term::abs(fresh, dom, body),
                }
            }
        }
    }
    go(t, &mut Vec::new(), &mut 0)
}

/// Splits nested applications into a head and its argument list.
pub fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// Rebuilds an application spine.
pub fn build_spine(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(head, Term::app)
}
