//! Parses check bundles and prints their validation reports.
//!
//! Run with `cargo run --example lint_bundle [BUNDLE.xml ...]`.

use confcheck::content::parse_bundle;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn lint(path: &str) -> String {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return format!("{path}: {e}\n"),
    };
    match parse_bundle(&bytes) {
        Err(e) => format!("{path}: {e}\n"),
        Ok(bundle) => {
            let report = bundle.validate();
            let mut out = format!(
                "{path}: {} tests, {} definitions, {} targets, {} checks\n",
                bundle.tests.len(),
                bundle.definitions.len(),
                bundle.targets.len(),
                bundle.checks.len()
            );
            if report.is_valid() {
                out.push_str("  valid\n");
            }
            for v in &report.violations {
                out.push_str(&format!("  {v}\n"));
            }
            out
        }
    }
}

fn run(paths: &[String]) -> String {
    paths.iter().map(|p| lint(p)).collect()
}

fn main() {
    let mut paths: Vec<String> = std::env::args().skip(1).collect();
    if paths.is_empty() {
        paths = vec![
            format!("{FIXTURES}/sans_bundle.xml"),
            format!("{FIXTURES}/cyclic_bundle.xml"),
        ];
    }
    print!("{}", run(&paths));
}

#[cfg(test)]
mod tests {
    #[test]
    fn lints_fixtures() {
        let out = super::run(&[
            format!("{}/sans_bundle.xml", super::FIXTURES),
            format!("{}/cyclic_bundle.xml", super::FIXTURES),
        ]);
        assert!(out.contains("2 tests, 1 definitions, 1 targets, 1 checks\n  valid"), "{out}");
        assert!(out.contains("cycle at r1"), "{out}");
    }
}
