//! Graphviz rendering of the call graph, before and after transitive
//! closure. Closure edges that were not among the direct dependency pair
//! edges are drawn dashed.

use crate::sct::CallGraph;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Pre,
    Post,
}

pub fn export_dot(g: &CallGraph, stage: Stage) -> String {
    let mut out = String::new();
    let name = match stage {
        Stage::Pre => "pre_closure",
        Stage::Post => "post_closure",
    };
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for node in &g.nodes {
        writeln!(out, "  \"{}\";", g.display_name(node)).unwrap();
    }
    match stage {
        Stage::Pre => {
            for e in &g.direct {
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    g.display_name(&e.from),
                    g.display_name(&e.to),
                    e.label
                )
                .unwrap();
            }
        }
        Stage::Post => {
            let mut tc = 0usize;
            for ((from, to), mats) in &g.edges {
                for m in mats {
                    let labels: Vec<&str> = g
                        .direct
                        .iter()
                        .filter(|e| &e.from == from && &e.to == to && &e.matrix == m)
                        .map(|e| e.label.as_str())
                        .collect();
                    if labels.is_empty() {
                        tc += 1;
                        writeln!(
                            out,
                            "  \"{}\" -> \"{}\" [style=dashed, label=\"tc{tc}\"];",
                            g.display_name(from),
                            g.display_name(to)
                        )
                        .unwrap();
                    } else {
                        writeln!(
                            out,
                            "  \"{}\" -> \"{}\" [label=\"{}\"];",
                            g.display_name(from),
                            g.display_name(to),
                            labels.join(",")
                        )
                        .unwrap();
                    }
                }
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
