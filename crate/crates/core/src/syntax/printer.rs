use super::{spine, Declaration, Sort, Term};
use std::collections::BTreeMap;

/// Precedence levels from loosest to tightest. A term whose own level is
/// below the level its context requires gets parenthesized.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Term = 0,
    Infix = 1,
    App = 2,
    Atom = 3,
}

/// Renders a term back to concrete syntax. `infix` maps symbol names to
/// their declared operators; pass an empty map for plain prefix output.
/// The output reparses to an alpha-equivalent term.
pub fn print_term(t: &Term, infix: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    go(t, Level::Term, infix, &mut out);
    out
}

pub fn print_decl(d: &Declaration, infix: &BTreeMap<String, String>) -> String {
    match d {
        Declaration::Symbol { name, ty } => {
            format!("symbol {name}: {}.", print_term(ty, infix))
        }
        Declaration::Rule { lhs, rhs } => {
            format!("rule {} --> {}.", print_term(lhs, infix), print_term(rhs, infix))
        }
        Declaration::Infix { op, symbol } => format!("infix \"{op}\" := {symbol}."),
    }
}

fn go(t: &Term, lvl: Level, infix: &BTreeMap<String, String>, out: &mut String) {
    match t {
        Term::Sort(Sort::Type) => out.push_str("TYPE"),
        Term::Sort(Sort::Kind) => out.push_str("KIND"),
        Term::Var(x) | Term::Sym(x) => out.push_str(x),
        Term::App(..) => {
            let (head, args) = spine(t);
            if let Term::Sym(s) = head {
                if let Some(op) = infix.get(s) {
                    if args.len() >= 2 {
                        return print_infix(op, &args, lvl, infix, out);
                    }
                }
            }
            let wrap = lvl > Level::App;
            if wrap {
                out.push('(');
            }
            go(head, Level::App, infix, out);
            for a in args {
                out.push(' ');
                go(a, Level::Atom, infix, out);
            }
            if wrap {
                out.push(')');
            }
        }
        Term::Prod(x, a, b) => {
            let wrap = lvl > Level::Term;
            if wrap {
                out.push('(');
            }
            if x.is_empty() {
                go(a, Level::Infix, infix, out);
                out.push_str(" -> ");
                go(b, Level::Term, infix, out);
            } else {
                // Group consecutive named binders: !a: A b: B, body.
                out.push('!');
                let mut cur = t;
                let mut first = true;
                while let Term::Prod(x, a, b) = cur {
                    if x.is_empty() {
                        break;
                    }
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    out.push_str(x);
                    out.push_str(": ");
                    go(a, Level::Atom, infix, out);
                    cur = b;
                }
                out.push_str(", ");
                go(cur, Level::Term, infix, out);
            }
            if wrap {
                out.push(')');
            }
        }
        Term::Abs(x, a, b) => {
            let wrap = lvl > Level::Term;
            if wrap {
                out.push('(');
            }
            out.push('\\');
            out.push_str(x);
            out.push_str(": ");
            go(a, Level::Atom, infix, out);
            out.push_str(", ");
            go(b, Level::Term, infix, out);
            if wrap {
                out.push(')');
            }
        }
    }
}

fn print_infix(
    op: &str,
    args: &[&Term],
    lvl: Level,
    infix: &BTreeMap<String, String>,
    out: &mut String,
) {
    let extra = &args[2..];
    let needs_inner_wrap = !extra.is_empty();
    let wrap = if needs_inner_wrap { lvl > Level::App } else { lvl > Level::Infix };
    if wrap {
        out.push('(');
    }
    if needs_inner_wrap {
        out.push('(');
    }
    go(args[0], Level::Infix, infix, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    go(args[1], Level::App, infix, out);
    if needs_inner_wrap {
        out.push(')');
        for a in extra {
            out.push(' ');
            go(a, Level::Atom, infix, out);
        }
    }
    if wrap {
        out.push(')');
    }
}
