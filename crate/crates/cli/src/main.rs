use anyhow::Context;
use clap::Parser;
use sct_core::analysis::{analyze, to_json, AnalysisOptions};
use sct_core::deppairs::dp_text;
use sct_core::dot::{export_dot, Stage};
use sct_core::rewrite::ReductKind;
use sct_core::sct::{loops, SctOutcome};
use sct_core::syntax::print_term;
use sct_core::typecheck::Tri;
use std::path::PathBuf;

/// Termination checker for higher-order rewrite systems with dependent
/// types, based on dependency pairs and size-change matrices.
#[derive(Parser, Debug)]
#[command(name = "sct-check", version, about)]
struct Args {
    /// Input file with symbol, rule, and infix declarations.
    file: PathBuf,

    /// Print the full analysis as JSON.
    #[arg(long)]
    json: bool,

    /// Write the call graph before and after closure as Graphviz digraphs.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,

    /// Print the dependency pairs, one per line.
    #[arg(long)]
    list_dps: bool,

    /// Print the size-change matrix of every dependency pair.
    #[arg(long)]
    matrices: bool,

    /// Step budget for normalization during type conversion.
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,

    /// Search for concrete reduction cycles from ground instances.
    #[arg(long)]
    fuzz: bool,

    /// Number of ground start terms for the cycle search.
    #[arg(long, default_value_t = 16)]
    fuzz_seeds: usize,

    /// Depth bound for the cycle search.
    #[arg(long, default_value_t = 50)]
    fuzz_depth: usize,

    /// Skip the typing-based conditions; the verdict is then at most MAYBE.
    #[arg(long)]
    skip_typing: bool,
}

fn main() {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("sct-check: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(args: &Args) -> anyhow::Result<i32> {
    let opts = AnalysisOptions {
        fuel: args.fuel,
        skip_typing: args.skip_typing,
        fuzz: args.fuzz,
        fuzz_seeds: args.fuzz_seeds,
        fuzz_depth: args.fuzz_depth,
    };
    let analysis = analyze(&args.file, &opts);

    if let Some(path) = &args.dot {
        let content = match &analysis.system {
            Some(sys) => format!(
                "{}\n{}",
                export_dot(&sys.graph, Stage::Pre),
                export_dot(&sys.closed, Stage::Post)
            ),
            None => String::new(),
        };
        std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    if args.json {
        println!("{}", serde_json::to_string_pretty(&to_json(&analysis))?);
        return Ok(analysis.verdict.exit_code());
    }

    if let Some(e) = &analysis.error {
        eprintln!("sct-check: {e}");
        println!("verdict: {}", analysis.verdict.as_str());
        return Ok(analysis.verdict.exit_code());
    }

    let sys = analysis.system.as_ref().expect("non-error analyses carry a system");

    if args.list_dps {
        for dp in &sys.dps {
            println!("{}", dp_text(dp, &sys.signature));
        }
        return Ok(analysis.verdict.exit_code());
    }

    if args.matrices {
        for (dp, m) in sys.dps.iter().zip(&sys.matrices) {
            println!(
                "{}: {} -> {} ({}x{})",
                dp.label,
                sys.signature.display(&dp.lhs_head),
                sys.signature.display(&dp.rhs_head),
                m.rows,
                m.cols
            );
            for row in m.row_major() {
                let cells: Vec<String> = row
                    .iter()
                    .map(|e| {
                        match e {
                            sct_core::sct::Entry::Lt => "-1".to_string(),
                            sct_core::sct::Entry::Eq => "0".to_string(),
                            sct_core::sct::Entry::Inf => "inf".to_string(),
                        }
                    })
                    .collect();
                println!("  [{}]", cells.join(", "));
            }
        }
        return Ok(analysis.verdict.exit_code());
    }

    println!("verdict: {}", analysis.verdict.as_str());
    println!(
        "conditions: a={} b={} c={} d={} pfp={} sct={}",
        "pass",
        status(sys.condition_b.pass),
        status(sys.condition_c.pass),
        sys.d_status.as_str(),
        sys.pfp_status.as_str(),
        match sys.sct {
            SctOutcome::Pass => "pass",
            SctOutcome::Fail(_) => "fail",
        }
    );
    println!("assumptions: local_confluence=unchecked subject_reduction=unchecked");
    println!("dependency pairs: {}", sys.dps.len());
    if let SctOutcome::Fail(violations) = &sys.sct {
        for (symbol, m) in violations {
            println!(
                "size-change violation at {}: idempotent loop without decrease ({}x{})",
                sys.signature.display(symbol),
                m.rows,
                m.cols
            );
        }
    } else {
        let loop_count = loops(&sys.closed).len();
        println!("closure loops: {loop_count}, all with a strict diagonal decrease");
    }
    for tri in sys.condition_d.iter() {
        if let Tri::Fail(m) | Tri::Unknown(m) = tri {
            println!("typing: {m}");
            break;
        }
    }
    for outcome in sys.pfp.iter() {
        if let Some(f) = outcome.failures.first() {
            println!("function passing: variable {} ({})", f.var, f.reason);
            break;
        }
    }
    if let Some(w) = &sys.fuzz {
        println!(
            "cycle found: {} (length {})",
            print_term(&w.start, &sys.signature.infix),
            w.trace.len() - w.cycle_start
        );
        for step in &w.trace {
            let how = match step.kind {
                ReductKind::Beta => "beta".to_string(),
                ReductKind::Rule(i) => format!("rule {}", i + 1),
            };
            println!("  --> {} ({how})", print_term(&step.term, &sys.signature.infix));
        }
    } else if args.fuzz {
        println!("cycle search: no cycle found");
    }
    Ok(analysis.verdict.exit_code())
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}
