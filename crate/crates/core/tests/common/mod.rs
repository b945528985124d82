#![allow(dead_code)]

use sct_core::analysis::{analyze_text, Analysis, AnalysisOptions};
use std::path::PathBuf;

pub const FIXTURES: &[&str] =
    &["example1_filter", "plus", "lenfil", "appf", "ordrec", "stlc", "div", "fg"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.sct"))
}

pub fn fixture(name: &str) -> String {
    let path = fixture_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn analyze_fixture(name: &str) -> Analysis {
    analyze_text(&fixture(name), &AnalysisOptions::default())
}

pub fn analyze_fixture_with(name: &str, opts: &AnalysisOptions) -> Analysis {
    analyze_text(&fixture(name), opts)
}
