//! End-to-end analysis of an input file: parse, build the signature and
//! precedence, extract dependency pairs, run the structural conditions and
//! the size-change test, and fold everything into a single verdict with a
//! JSON rendering.

use crate::deppairs::{
    check_condition_c, dp_text, extract_dependency_pairs, ConditionC, DependencyPair,
};
use crate::fuzz::{fuzz_nontermination, FuzzWitness};
use crate::rewrite::ReductKind;
use crate::sct::{build_call_graph, build_matrix, check_sct, loops, transitive_closure, CallGraph, SCMatrix, SctOutcome};
use crate::signature::{
    build_precedence, build_signature, check_condition_b, ConditionB, Precedence, Rule, Signature,
};
use crate::syntax::{parse_file, print_term, Term};
use crate::typecheck::{
    check_condition_d, check_pfp, infer_rule_environment, InferError, PfpOutcome, RuleEnv, Tri,
};
use serde_json::{json, Map, Value};
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub fuel: u64,
    pub skip_typing: bool,
    pub fuzz: bool,
    pub fuzz_seeds: usize,
    pub fuzz_depth: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            fuel: 10_000,
            skip_typing: false,
            fuzz: false,
            fuzz_seeds: 16,
            fuzz_depth: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Terminating,
    Maybe,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Terminating => "TERMINATING",
            Verdict::Maybe => "MAYBE",
            Verdict::Error => "ERROR",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Terminating => 0,
            Verdict::Maybe => 1,
            Verdict::Error => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
            Status::Skipped => "skipped",
        }
    }
}

/// Everything computed for a successfully parsed system.
#[derive(Debug, Clone)]
pub struct System {
    pub signature: Signature,
    pub rules: Vec<Rule>,
    pub precedence: Precedence,
    pub dps: Vec<DependencyPair>,
    pub matrices: Vec<SCMatrix>,
    pub graph: CallGraph,
    pub closed: CallGraph,
    pub condition_b: ConditionB,
    pub condition_c: ConditionC,
    pub condition_d: Vec<Tri>,
    pub d_status: Status,
    pub pfp: Vec<PfpOutcome>,
    pub pfp_status: Status,
    pub sct: SctOutcome,
    pub rule_envs: Option<Vec<Result<RuleEnv, InferError>>>,
    pub fuzz: Option<FuzzWitness>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub verdict: Verdict,
    pub error: Option<String>,
    pub system: Option<System>,
    pub timing_ms: u64,
}

pub fn analyze(path: &Path, opts: &AnalysisOptions) -> Analysis {
    match std::fs::read_to_string(path) {
        Ok(text) => analyze_text(&text, opts),
        Err(e) => Analysis {
            verdict: Verdict::Error,
            error: Some(format!("cannot read {}: {e}", path.display())),
            system: None,
            timing_ms: 0,
        },
    }
}

pub fn analyze_text(text: &str, opts: &AnalysisOptions) -> Analysis {
    let started = Instant::now();
    let decls = match parse_file(text) {
        Ok(decls) => decls,
        Err(e) => {
            return Analysis {
                verdict: Verdict::Error,
                error: Some(e.to_string()),
                system: None,
                timing_ms: started.elapsed().as_millis() as u64,
            }
        }
    };
    let (signature, rules) = build_signature(&decls);
    let precedence = build_precedence(&signature, &rules);
    let condition_b = check_condition_b(&signature, &rules);
    let dps = extract_dependency_pairs(&rules, &signature);
    let condition_c = check_condition_c(&dps, &signature);
    let matrices: Vec<SCMatrix> = dps.iter().map(|dp| build_matrix(dp, &signature)).collect();
    let graph = build_call_graph(&dps, &signature);
    let closed = transitive_closure(&graph);
    let sct = check_sct(&closed);

    let (rule_envs, pfp, pfp_status, condition_d, d_status) = if opts.skip_typing {
        (None, Vec::new(), Status::Skipped, Vec::new(), Status::Skipped)
    } else {
        let envs: Vec<Result<RuleEnv, InferError>> =
            rules.iter().map(|r| infer_rule_environment(r, &signature)).collect();
        let pfp: Vec<PfpOutcome> = rules
            .iter()
            .zip(&envs)
            .map(|(rule, env)| match env {
                Ok(env) => check_pfp(env, rule, &signature),
                Err(e) => PfpOutcome {
                    pass: false,
                    failures: vec![crate::typecheck::PfpFailure {
                        var: rule.head.clone(),
                        ty: String::new(),
                        reason: format!("environment inference failed: {e}"),
                    }],
                },
            })
            .collect();
        let pfp_status =
            if pfp.iter().all(|o| o.pass) { Status::Pass } else { Status::Fail };
        let d = check_condition_d(&signature, &rules, &precedence, &dps, &envs, opts.fuel);
        let d_status = if d.iter().any(|t| matches!(t, Tri::Fail(_))) {
            Status::Fail
        } else if d.iter().any(|t| matches!(t, Tri::Unknown(_))) {
            Status::Unknown
        } else {
            Status::Pass
        };
        (Some(envs), pfp, pfp_status, d, d_status)
    };

    let fuzz = if opts.fuzz {
        fuzz_nontermination(&signature, &rules, opts.fuzz_seeds, opts.fuzz_depth)
    } else {
        None
    };

    let verdict = if condition_b.pass
        && condition_c.pass
        && d_status == Status::Pass
        && pfp_status == Status::Pass
        && sct == SctOutcome::Pass
    {
        Verdict::Terminating
    } else {
        Verdict::Maybe
    };

    Analysis {
        verdict,
        error: None,
        system: Some(System {
            signature,
            rules,
            precedence,
            dps,
            matrices,
            graph,
            closed,
            condition_b,
            condition_c,
            condition_d,
            d_status,
            pfp,
            pfp_status,
            sct,
            rule_envs,
            fuzz,
        }),
        timing_ms: started.elapsed().as_millis() as u64,
    }
}

fn matrix_json(m: &SCMatrix) -> Value {
    json!({
        "rows": m.rows,
        "cols": m.cols,
        "entries": m.row_major(),
    })
}

fn term_json(t: &Term, sig: &Signature) -> Value {
    Value::String(print_term(t, &sig.infix))
}

/// Renders the analysis with a stable key set: every key is present on
/// every run, including parse failures, so downstream consumers never
/// branch on key existence.
pub fn to_json(analysis: &Analysis) -> Value {
    let mut root = Map::new();
    root.insert(
        "assumptions".into(),
        json!({
            "local_confluence": "unchecked",
            "subject_reduction": "unchecked",
        }),
    );

    let closure_loops = match &analysis.system {
        Some(sys) => Value::Array(
            loops(&sys.closed)
                .iter()
                .map(|(symbol, m)| {
                    json!({
                        "symbol": symbol,
                        "matrix": matrix_json(m),
                        "idempotent": m.is_idempotent(),
                        "decreasing": m.has_diagonal_decrease(),
                    })
                })
                .collect(),
        ),
        None => Value::Array(Vec::new()),
    };
    root.insert("closure_loops".into(), closure_loops);

    let conditions = match &analysis.system {
        Some(sys) => {
            let b_rules: Vec<Value> = sys
                .condition_b
                .per_rule
                .iter()
                .map(|r| {
                    json!({
                        "rule": r.rule + 1,
                        "head": r.head,
                        "args": r.args,
                        "arity": r.arity,
                        "ok": r.ok,
                    })
                })
                .collect();
            let c_pairs: Vec<Value> = sys
                .condition_c
                .per_pair
                .iter()
                .map(|p| {
                    json!({
                        "pair": p.label,
                        "head": p.head,
                        "args": p.args,
                        "arity": p.arity,
                        "ok": p.ok,
                    })
                })
                .collect();
            let d_rules: Vec<Value> = sys
                .condition_d
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let (status, detail) = match t {
                        Tri::Pass => ("pass", Value::Null),
                        Tri::Fail(m) => ("fail", Value::String(m.clone())),
                        Tri::Unknown(m) => ("unknown", Value::String(m.clone())),
                    };
                    json!({"rule": i + 1, "status": status, "detail": detail})
                })
                .collect();
            let pfp_rules: Vec<Value> = sys
                .pfp
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    let failures: Vec<Value> = o
                        .failures
                        .iter()
                        .map(|f| json!({"var": f.var, "type": f.ty, "reason": f.reason}))
                        .collect();
                    json!({
                        "rule": i + 1,
                        "status": if o.pass { "pass" } else { "fail" },
                        "failures": failures,
                    })
                })
                .collect();
            let (sct_status, violations) = match &sys.sct {
                SctOutcome::Pass => ("pass", Vec::new()),
                SctOutcome::Fail(vs) => (
                    "fail",
                    vs.iter()
                        .map(|(symbol, m)| json!({"symbol": symbol, "matrix": matrix_json(m)}))
                        .collect(),
                ),
            };
            json!({
                "a": {"status": "pass"},
                "b": {"status": if sys.condition_b.pass { "pass" } else { "fail" }, "rules": b_rules},
                "c": {"status": if sys.condition_c.pass { "pass" } else { "fail" }, "pairs": c_pairs},
                "d": {"status": sys.d_status.as_str(), "rules": d_rules},
                "pfp": {"status": sys.pfp_status.as_str(), "rules": pfp_rules},
                "sct": {"status": sct_status, "violations": violations},
            })
        }
        None => json!({
            "a": {"status": "skipped"},
            "b": {"status": "skipped", "rules": []},
            "c": {"status": "skipped", "pairs": []},
            "d": {"status": "skipped", "rules": []},
            "pfp": {"status": "skipped", "rules": []},
            "sct": {"status": "skipped", "violations": []},
        }),
    };
    root.insert("conditions".into(), conditions);

    let dps = match &analysis.system {
        Some(sys) => Value::Array(
            sys.dps
                .iter()
                .map(|dp| {
                    json!({
                        "label": dp.label,
                        "rule": dp.rule + 1,
                        "position": dp.position,
                        "lhs_head": dp.lhs_head,
                        "lhs_args": dp.lhs_args.iter().map(|t| term_json(t, &sys.signature)).collect::<Vec<_>>(),
                        "rhs_head": dp.rhs_head,
                        "rhs_args": dp.rhs_args.iter().map(|t| term_json(t, &sys.signature)).collect::<Vec<_>>(),
                        "text": dp_text(dp, &sys.signature),
                    })
                })
                .collect(),
        ),
        None => Value::Array(Vec::new()),
    };
    root.insert("dependency_pairs".into(), dps);

    root.insert(
        "error".into(),
        match &analysis.error {
            Some(e) => Value::String(e.clone()),
            None => Value::Null,
        },
    );

    let witness = analysis.system.as_ref().and_then(|sys| sys.fuzz.as_ref()).map(|w| {
        let sig = &analysis.system.as_ref().unwrap().signature;
        let trace: Vec<Value> = w
            .trace
            .iter()
            .map(|step| {
                let (kind, rule) = match step.kind {
                    ReductKind::Beta => ("beta", Value::Null),
                    ReductKind::Rule(i) => ("rule", json!(i + 1)),
                };
                json!({
                    "term": term_json(&step.term, sig),
                    "kind": kind,
                    "rule": rule,
                    "position": step.pos,
                })
            })
            .collect();
        json!({
            "start": term_json(&w.start, sig),
            "trace": trace,
            "cycle_start": w.cycle_start,
        })
    });
    root.insert("fuzz_witness".into(), witness.unwrap_or(Value::Null));

    let matrices = match &analysis.system {
        Some(sys) => Value::Array(
            sys.dps
                .iter()
                .zip(&sys.matrices)
                .map(|(dp, m)| {
                    let mut o = Map::new();
                    o.insert("label".into(), json!(dp.label));
                    o.insert("from".into(), json!(dp.lhs_head));
                    o.insert("to".into(), json!(dp.rhs_head));
                    if let Value::Object(body) = matrix_json(m) {
                        o.extend(body);
                    }
                    Value::Object(o)
                })
                .collect(),
        ),
        None => Value::Array(Vec::new()),
    };
    root.insert("matrices".into(), matrices);

    let precedence = match &analysis.system {
        Some(sys) => {
            let classes: Vec<Value> = sys
                .precedence
                .classes
                .iter()
                .enumerate()
                .map(|(id, members)| json!({"id": id, "members": members}))
                .collect();
            let edges: Vec<Value> = sys
                .precedence
                .class_edges
                .iter()
                .map(|(hi, lo)| json!([hi, lo]))
                .collect();
            json!({"classes": classes, "edges": edges})
        }
        None => json!({"classes": [], "edges": []}),
    };
    root.insert("precedence".into(), precedence);

    root.insert("timing_ms".into(), json!(analysis.timing_ms));
    root.insert("verdict".into(), Value::String(analysis.verdict.as_str().into()));
    Value::Object(root)
}
