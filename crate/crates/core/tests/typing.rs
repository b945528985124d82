mod common;

use common::{analyze_fixture_with, fixture, FIXTURES};
use sct_core::analysis::{AnalysisOptions, Status, Verdict};
use sct_core::deppairs::extract_dependency_pairs;
use sct_core::signature::{build_precedence, build_signature, Rule, Signature};
use sct_core::syntax::{alpha_eq, parse_file, print_term, Term};
use sct_core::typecheck::{
    check_condition_d, check_pfp, infer_rule_environment, InferError, RuleEnv, Tri,
};

fn example1() -> (Signature, Vec<Rule>) {
    build_signature(&parse_file(&fixture("example1_filter")).unwrap())
}

fn envs_of(sig: &Signature, rules: &[Rule]) -> Vec<Result<RuleEnv, InferError>> {
    rules.iter().map(|r| infer_rule_environment(r, sig)).collect()
}

fn parse(src: &str) -> (Signature, Vec<Rule>) {
    build_signature(&parse_file(src).unwrap())
}

fn condition_d_of(src: &str, fuel: u64) -> Vec<Tri> {
    let (sig, rules) = parse(src);
    let prec = build_precedence(&sig, &rules);
    let dps = extract_dependency_pairs(&rules, &sig);
    let envs = envs_of(&sig, &rules);
    check_condition_d(&sig, &rules, &prec, &dps, &envs, fuel)
}

#[test]
fn environments_list_pattern_variables_in_order() {
    let (sig, rules) = example1();
    let env = infer_rule_environment(&rules[6], &sig).unwrap();
    let printed: Vec<(String, String)> = env
        .delta
        .iter()
        .map(|(n, t)| (n.clone(), print_term(t, &sig.infix)))
        .collect();
    assert_eq!(
        printed,
        vec![
            ("a".to_string(), "Set".to_string()),
            ("f".to_string(), "El a -> Bool".to_string()),
            ("x".to_string(), "El a".to_string()),
            ("p".to_string(), "Nat".to_string()),
            ("l".to_string(), "List a p".to_string()),
        ]
    );
    assert_eq!(print_term(&env.expected_type, &sig.infix), "Nat");
}

#[test]
fn unification_resolves_wildcards_out_of_the_environment() {
    let (sig, rules) = example1();
    let env = infer_rule_environment(&rules[4], &sig).unwrap();
    let names: Vec<&str> = env.delta.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["a", "x", "p", "l", "q", "m"]);

    let sp = Term::app(Term::sym("s"), Term::var("p"));
    assert!(alpha_eq(&env.lhs_args[1], &sp), "the length wildcard is solved to s p");
    let cons = Term::app(
        Term::app(
            Term::app(Term::app(Term::sym("cons"), Term::var("a")), Term::var("x")),
            Term::var("p"),
        ),
        Term::var("l"),
    );
    assert!(alpha_eq(&env.lhs_args[2], &cons), "the element type wildcard is solved to a");
    assert_eq!(print_term(&env.expected_type, &sig.infix), "List a (s p + q)");
}

#[test]
fn solved_variables_are_substituted_into_the_right_hand_side() {
    let src = "symbol Nat: TYPE.\nsymbol zero: Nat.\nsymbol plus: Nat -> Nat -> Nat.\n\
               rule plus zero zero --> zero.\n\
               symbol D: Nat -> TYPE.\nsymbol mk: !n: Nat, D (plus n n).\n\
               symbol r: !k: Nat, D k -> Nat.\nrule r k (mk n) --> k.";
    let (sig, rules) = parse(src);
    let env = infer_rule_environment(&rules[1], &sig).unwrap();
    let names: Vec<&str> = env.delta.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["n"], "k is solved and drops out");
    assert_eq!(print_term(&env.rhs, &sig.infix), "plus n n");
    assert_eq!(print_term(&env.lhs_args[0], &sig.infix), "plus n n");
}

#[test]
fn conflicting_occurrences_are_rejected() {
    let src = "symbol Nat: TYPE.\nsymbol Bool: TYPE.\nsymbol f: Nat -> Bool -> Nat.\n\
               rule f x x --> x.";
    let (sig, rules) = parse(src);
    let err = infer_rule_environment(&rules[0], &sig).unwrap_err();
    assert_eq!(
        err.to_string(),
        "conflicting constraints: cannot identify Nat with Bool"
    );
}

#[test]
fn arity_overflow_is_reported_with_counts() {
    let src = "symbol Nat: TYPE.\nsymbol z: Nat.\nsymbol f: Nat -> Nat.\nrule f z z --> z.";
    let (sig, rules) = parse(src);
    let err = infer_rule_environment(&rules[0], &sig).unwrap_err();
    assert_eq!(
        err.to_string(),
        "the left-hand side applies f to 2 arguments but its arity is 1"
    );
}

#[test]
fn non_algebraic_patterns_are_rejected() {
    let src = "symbol Nat: TYPE.\nsymbol z: Nat.\nsymbol f: (Nat -> Nat) -> Nat.\n\
               rule f (\\x: Nat, x) --> z.";
    let (sig, rules) = parse(src);
    let err = infer_rule_environment(&rules[0], &sig).unwrap_err();
    assert!(matches!(err, InferError::NonAlgebraic { .. }), "{err}");
}

#[test]
fn circular_constraints_fail_the_occurs_check() {
    let src = "symbol Nat: TYPE.\nsymbol s: Nat -> Nat.\nsymbol E: Nat -> TYPE.\n\
               symbol mk: !n: Nat, E (s n).\nsymbol r: !k: Nat, E k -> Nat.\n\
               rule r x (mk x) --> x.";
    let (sig, rules) = parse(src);
    let err = infer_rule_environment(&rules[0], &sig).unwrap_err();
    assert!(matches!(err, InferError::OccursCheck { .. }), "{err}");
}

#[test]
fn function_passing_holds_across_the_main_example() {
    let (sig, rules) = example1();
    for rule in &rules {
        let env = infer_rule_environment(rule, &sig).unwrap();
        let out = check_pfp(&env, rule, &sig);
        assert!(out.pass, "rule {}: {:?}", rule.index + 1, out.failures);
    }
}

#[test]
fn function_passing_rejects_computed_function_arguments() {
    let (sig, rules) = build_signature(&parse_file(&fixture("ordrec")).unwrap());
    let env = infer_rule_environment(&rules[2], &sig).unwrap();
    let out = check_pfp(&env, &rules[2], &sig);
    assert!(!out.pass);
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].var, "f");
    assert_eq!(out.failures[0].ty, "Nat -> Ord");

    let (sig, rules) = build_signature(&parse_file(&fixture("stlc")).unwrap());
    let env = infer_rule_environment(&rules[0], &sig).unwrap();
    let out = check_pfp(&env, &rules[0], &sig);
    assert!(!out.pass);
    assert_eq!(out.failures[0].var, "f");
    assert_eq!(out.failures[0].ty, "T a -> T b");
}

#[test]
fn right_hand_sides_type_check_across_the_corpus() {
    for name in FIXTURES {
        let (sig, rules) = build_signature(&parse_file(&fixture(name)).unwrap());
        let prec = build_precedence(&sig, &rules);
        let dps = extract_dependency_pairs(&rules, &sig);
        let envs = envs_of(&sig, &rules);
        let out = check_condition_d(&sig, &rules, &prec, &dps, &envs, 10_000);
        for (i, tri) in out.iter().enumerate() {
            assert_eq!(tri, &Tri::Pass, "{name} rule {}", i + 1);
        }
    }
}

#[test]
fn ill_typed_right_hand_sides_fail() {
    let src = "symbol Nat: TYPE.\nsymbol Bool: TYPE.\nsymbol t: Bool.\n\
               symbol s: Nat -> Nat.\nsymbol f: Nat -> Nat.\nrule f x --> s t.";
    let out = condition_d_of(src, 10_000);
    let Tri::Fail(msg) = &out[0] else { panic!("expected a failure, got {:?}", out[0]) };
    assert!(msg.contains("type mismatch: expected Nat, found Bool"), "{msg}");
}

#[test]
fn annotations_may_not_call_the_rule_head() {
    let src = "symbol U: TYPE.\nsymbol h: U -> U.\nrule h x --> \\y: h x, y.";
    let out = condition_d_of(src, 10_000);
    let Tri::Fail(msg) = &out[0] else { panic!("expected a failure, got {:?}", out[0]) };
    assert!(msg.contains("defined symbol h is not below h"), "{msg}");
}

#[test]
fn calls_without_a_dependency_pair_fail() {
    let src = "symbol Nat: TYPE.\nsymbol zero: Nat.\nsymbol plus: Nat -> Nat -> Nat.\n\
               rule plus zero zero --> zero.\n\
               symbol D: Nat -> TYPE.\nsymbol mk: !n: Nat, D (plus n n).\n\
               symbol r: !k: Nat, D k -> Nat.\nrule r k (mk n) --> k.";
    let out = condition_d_of(src, 10_000);
    assert_eq!(out[0], Tri::Pass);
    let Tri::Fail(msg) = &out[1] else { panic!("expected a failure, got {:?}", out[1]) };
    assert!(msg.contains("the call to plus is not covered by a dependency pair"), "{msg}");
}

#[test]
fn undecided_conversions_stay_unknown() {
    let src = "symbol N: TYPE.\nsymbol c: N.\nsymbol f: N -> N.\nrule f x --> f x.\n\
               symbol D: N -> TYPE.\nsymbol mk: !n: N, D n.\nsymbol g: N -> D (f c).\n\
               rule g x --> mk c.";
    let out = condition_d_of(src, 100);
    assert_eq!(out[0], Tri::Pass);
    let Tri::Unknown(msg) = &out[1] else { panic!("expected unknown, got {:?}", out[1]) };
    assert!(msg.contains("undecided"), "{msg}");
}

#[test]
fn exhausted_fuel_degrades_the_verdict_not_the_result() {
    let out = analyze_fixture_with(
        "example1_filter",
        &AnalysisOptions { fuel: 0, ..AnalysisOptions::default() },
    );
    assert_eq!(out.verdict, Verdict::Maybe);
    let sys = out.system.unwrap();
    assert_eq!(sys.d_status, Status::Unknown);
    assert_eq!(sys.pfp_status, Status::Pass);
}

#[test]
fn skipping_the_typing_phase_is_explicit() {
    let out = analyze_fixture_with(
        "example1_filter",
        &AnalysisOptions { skip_typing: true, ..AnalysisOptions::default() },
    );
    assert_eq!(out.verdict, Verdict::Maybe);
    let sys = out.system.unwrap();
    assert_eq!(sys.d_status, Status::Skipped);
    assert_eq!(sys.pfp_status, Status::Skipped);
    assert!(sys.rule_envs.is_none());
}
