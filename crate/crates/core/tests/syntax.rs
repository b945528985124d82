mod common;

use common::{fixture, FIXTURES};
use sct_core::syntax::{
    alpha_canon, alpha_eq, build_spine, free_vars, parse_file, print_decl, print_term, spine,
    structural_subterms, Declaration, Sort, Term,
};
use std::collections::BTreeMap;

fn parse_one_rule(src: &str) -> (Term, Term) {
    let decls = parse_file(src).expect("parses");
    decls
        .into_iter()
        .find_map(|d| match d {
            Declaration::Rule { lhs, rhs } => Some((lhs, rhs)),
            _ => None,
        })
        .expect("contains a rule")
}

fn err_msg(src: &str) -> String {
    parse_file(src).expect_err("should not parse").to_string()
}

#[test]
fn parses_symbol_declarations() {
    let decls = parse_file("symbol Nat: TYPE.\nsymbol s: Nat -> Nat.").unwrap();
    assert_eq!(decls.len(), 2);
    match &decls[1] {
        Declaration::Symbol { name, ty } => {
            assert_eq!(name, "s");
            assert_eq!(*ty, Term::arrow(Term::sym("Nat"), Term::sym("Nat")));
        }
        other => panic!("expected a symbol declaration, got {other:?}"),
    }
}

#[test]
fn multi_binder_groups_fold_rightwards() {
    let decls = parse_file("symbol Set: TYPE.\nsymbol Nat: TYPE.\nsymbol f: !a: Set p: Nat, Nat.")
        .unwrap();
    let Declaration::Symbol { ty, .. } = &decls[2] else { panic!() };
    let expected = Term::prod(
        "a",
        Term::sym("Set"),
        Term::prod("p", Term::sym("Nat"), Term::sym("Nat")),
    );
    assert_eq!(*ty, expected);
}

#[test]
fn later_binders_see_earlier_ones() {
    let decls = parse_file(
        "symbol Set: TYPE.\nsymbol El: Set -> TYPE.\nsymbol g: !a: Set x: El a, El a.",
    )
    .unwrap();
    let Declaration::Symbol { ty, .. } = &decls[2] else { panic!() };
    let Term::Prod(_, _, body) = ty else { panic!("expected a product") };
    let Term::Prod(x, dom, _) = &**body else { panic!("expected a nested product") };
    assert_eq!(x, "x");
    assert_eq!(**dom, Term::app(Term::sym("El"), Term::var("a")));
}

#[test]
fn zero_is_an_ordinary_identifier() {
    let decls = parse_file("symbol Nat: TYPE.\nsymbol 0: Nat.").unwrap();
    let Declaration::Symbol { name, .. } = &decls[1] else { panic!() };
    assert_eq!(name, "0");
}

#[test]
fn infix_is_left_associative_and_tighter_than_arrow() {
    let src = "symbol Nat: TYPE.\nsymbol plus: Nat -> Nat -> Nat.\ninfix \"+\" := plus.\n\
               symbol T: Nat -> TYPE.\nsymbol a: Nat.\nsymbol f: T (a + a + a) -> TYPE.";
    let decls = parse_file(src).unwrap();
    let Declaration::Symbol { ty, .. } = decls.last().unwrap() else { panic!() };
    let Term::Prod(_, dom, _) = ty else { panic!("expected an arrow") };
    let plus = |l: Term, r: Term| Term::app(Term::app(Term::sym("plus"), l), r);
    let a = Term::sym("a");
    let expected = Term::app(Term::sym("T"), plus(plus(a.clone(), a.clone()), a));
    assert_eq!(**dom, expected);
}

#[test]
fn application_binds_tighter_than_infix() {
    let src = "symbol Nat: TYPE.\nsymbol s: Nat -> Nat.\nsymbol plus: Nat -> Nat -> Nat.\n\
               infix \"+\" := plus.\nrule s a + s b --> s (a + b).";
    let (lhs, _) = parse_one_rule(src);
    let expected = Term::app(
        Term::app(Term::sym("plus"), Term::app(Term::sym("s"), Term::var("a"))),
        Term::app(Term::sym("s"), Term::var("b")),
    );
    assert!(alpha_eq(&lhs, &expected));
}

#[test]
fn wildcards_become_fresh_pattern_variables() {
    // The rule names _1 itself, so the fresh wildcard names must avoid it.
    let src = "symbol Nat: TYPE.\nsymbol f: Nat -> Nat -> Nat.\nrule f _ _1 --> f _1 _1.";
    let (lhs, rhs) = parse_one_rule(src);
    let (_, args) = spine(&lhs);
    let Term::Var(first) = args[0] else { panic!("wildcard should become a variable") };
    assert_ne!(first, "_1");
    assert_eq!(*args[1], Term::var("_1"));
    let (_, rhs_args) = spine(&rhs);
    assert_eq!(*rhs_args[0], Term::var("_1"));
    let plain = "symbol Nat: TYPE.\nsymbol g: Nat -> Nat -> Nat.\nsymbol c: Nat.\n\
                 rule g _ _ --> c.";
    let (lhs, _) = parse_one_rule(plain);
    let (_, args) = spine(&lhs);
    let Term::Var(a) = args[0] else { panic!("wildcard should become a variable") };
    let Term::Var(b) = args[1] else { panic!("wildcard should become a variable") };
    assert_ne!(a, b);
}

#[test]
fn wildcard_rejected_outside_patterns() {
    let rhs = "symbol Nat: TYPE.\nsymbol f: Nat -> Nat.\nrule f x --> _.";
    assert!(err_msg(rhs).contains("not allowed in a right-hand side"));
    let ty = "symbol Nat: TYPE.\nsymbol f: _ -> Nat.";
    assert!(err_msg(ty).contains("not allowed in a type"));
}

#[test]
fn rhs_variables_must_occur_in_lhs() {
    let src = "symbol Nat: TYPE.\nsymbol f: Nat -> Nat.\nrule f x --> y.";
    assert!(err_msg(src).contains("must occur in the left-hand side"));
}

#[test]
fn shadowing_is_rejected() {
    let sym = "symbol Set: TYPE.\nsymbol f: !Set: Set, Set.";
    assert!(err_msg(sym).contains("shadows a symbol"));
    let enclosing = "symbol Set: TYPE.\nsymbol f: !a: Set, !a: Set, Set.";
    assert!(err_msg(enclosing).contains("shadows an enclosing binder"));
    let pattern = "symbol Set: TYPE.\nsymbol T: TYPE.\nsymbol g: (Set -> T) -> T.\n\
                   symbol h: T -> T.\nrule h (g x) --> g (\\x: Set, x).";
    assert!(err_msg(pattern).contains("shadows a pattern variable"));
}

#[test]
fn pattern_variables_do_not_leak_into_later_declarations() {
    let src = "symbol Nat: TYPE.\nsymbol f: Nat -> Nat.\nrule f p --> p.\n\
               symbol g: !p: Nat, Nat.";
    assert!(parse_file(src).is_ok());
}

#[test]
fn duplicate_declarations_are_rejected() {
    assert!(err_msg("symbol A: TYPE.\nsymbol A: TYPE.").contains("duplicate declaration"));
    let infix = "symbol Nat: TYPE.\nsymbol p: Nat -> Nat -> Nat.\nsymbol q: Nat -> Nat -> Nat.\n\
                 infix \"+\" := p.\ninfix \"+\" := q.";
    assert!(err_msg(infix).contains("duplicate infix"));
}

#[test]
fn reserved_and_undeclared_operators_are_rejected() {
    let reserved = "symbol Nat: TYPE.\nsymbol f: Nat -> Nat -> Nat.\ninfix \"->\" := f.";
    assert!(err_msg(reserved).contains("reserved"));
    let undeclared = "symbol Nat: TYPE.\nsymbol a: Nat.\nsymbol T: Nat -> TYPE.\n\
                      symbol g: T (a ** a) -> TYPE.";
    assert!(err_msg(undeclared).contains("undeclared infix operator"));
}

#[test]
fn rule_head_must_be_a_symbol() {
    let src = "symbol Nat: TYPE.\nsymbol c: Nat.\nrule (\\x: Nat, x) c --> c.";
    assert!(err_msg(src).contains("headed by a declared symbol"));
}

#[test]
fn errors_carry_line_and_column() {
    let e = parse_file("symbol A: TYPE.\nsymbol B: .").expect_err("should fail");
    assert_eq!(e.line, 2);
    assert!(e.col > 0);
    let lex = parse_file("symbol A: TYPE.\ninfix \"unterminated := A.").expect_err("should fail");
    assert!(lex.to_string().contains("unterminated string"));
}

#[test]
fn comments_are_ignored() {
    let src = "// leading comment\nsymbol Nat: TYPE. // trailing\n// rule f x --> x.\n";
    let decls = parse_file(src).unwrap();
    assert_eq!(decls.len(), 1);
}

#[test]
fn free_vars_sees_through_binders() {
    let t = Term::abs(
        "x",
        Term::app(Term::sym("El"), Term::var("a")),
        Term::app(Term::var("x"), Term::var("y")),
    );
    let fv = free_vars(&t);
    assert!(fv.contains("a"));
    assert!(fv.contains("y"));
    assert!(!fv.contains("x"));
}

#[test]
fn structural_subterms_is_preorder() {
    let t = Term::app(Term::app(Term::sym("f"), Term::var("x")), Term::var("y"));
    let subs = structural_subterms(&t);
    let positions: Vec<Vec<usize>> = subs.iter().map(|(p, _)| p.clone()).collect();
    assert_eq!(
        positions,
        vec![vec![], vec![0], vec![0, 0], vec![0, 1], vec![1]]
    );
}

#[test]
fn spine_and_build_spine_are_inverse() {
    let t = Term::app(Term::app(Term::sym("f"), Term::var("x")), Term::var("y"));
    let (head, args) = spine(&t);
    let rebuilt = build_spine(head.clone(), args.into_iter().cloned());
    assert_eq!(t, rebuilt);
}

#[test]
fn alpha_equivalence_ignores_binder_names() {
    let l = Term::abs("x", Term::sym("A"), Term::var("x"));
    let r = Term::abs("y", Term::sym("A"), Term::var("y"));
    assert!(alpha_eq(&l, &r));
    assert_eq!(alpha_canon(&l), alpha_canon(&r));
    let free = Term::abs("x", Term::sym("A"), Term::var("z"));
    let other = Term::abs("x", Term::sym("A"), Term::var("w"));
    assert!(!alpha_eq(&free, &other));
}

#[test]
fn sorts_parse_and_compare() {
    let decls = parse_file("symbol A: TYPE.").unwrap();
    let Declaration::Symbol { ty, .. } = &decls[0] else { panic!() };
    assert_eq!(*ty, Term::Sort(Sort::Type));
}

#[test]
fn printed_declarations_reparse_to_the_same_terms() {
    for name in FIXTURES {
        let decls = parse_file(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut infix = BTreeMap::new();
        for d in &decls {
            if let Declaration::Infix { op, symbol } = d {
                infix.entry(symbol.clone()).or_insert_with(|| op.clone());
            }
        }
        let printed: String =
            decls.iter().map(|d| print_decl(d, &infix) + "\n").collect();
        let reparsed = parse_file(&printed)
            .unwrap_or_else(|e| panic!("{name}: reparse failed: {e}\n{printed}"));
        assert_eq!(decls.len(), reparsed.len(), "{name}");
        for (a, b) in decls.iter().zip(&reparsed) {
            match (a, b) {
                (
                    Declaration::Symbol { name: n1, ty: t1 },
                    Declaration::Symbol { name: n2, ty: t2 },
                ) => {
                    assert_eq!(n1, n2);
                    assert!(alpha_eq(t1, t2), "{name}: {}", print_term(t1, &infix));
                }
                (
                    Declaration::Rule { lhs: l1, rhs: r1 },
                    Declaration::Rule { lhs: l2, rhs: r2 },
                ) => {
                    assert!(alpha_eq(l1, l2), "{name}: {}", print_term(l1, &infix));
                    assert!(alpha_eq(r1, r2), "{name}: {}", print_term(r1, &infix));
                }
                (
                    Declaration::Infix { op: o1, symbol: s1 },
                    Declaration::Infix { op: o2, symbol: s2 },
                ) => {
                    assert_eq!((o1, s1), (o2, s2));
                }
                _ => panic!("{name}: declaration kinds diverged"),
            }
        }
    }
}
