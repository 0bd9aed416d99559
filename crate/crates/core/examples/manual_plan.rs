//! Executes a hand-written plan, skipping target resolution and planning.

use confcheck::content::{parse_bundle, parse_plans};
use confcheck::oval::{parse_adapters, run_plans};
use confcheck::report::ScanReport;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run(plan_path: &str) -> String {
    let read = |p: String| std::fs::read(p).unwrap();
    let bundle = parse_bundle(&read(format!("{FIXTURES}/sans_bundle.xml"))).unwrap();
    let adapters = parse_adapters(&read(format!("{FIXTURES}/adapters.json")), FIXTURES.as_ref()).unwrap();
    let plans = parse_plans(&read(plan_path.to_string())).unwrap();
    let report = ScanReport::new(run_plans(&plans, &bundle, &adapters).unwrap());
    let mut out = String::new();
    for r in &report.results {
        out.push_str(&format!("{}: {}\n", r.system_test.id, r.definition_status));
        for m in &r.omega {
            out.push_str(&format!("  {} -> {} {:?}\n", m.mapping.test, m.status, m.item.values));
        }
    }
    out
}

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{FIXTURES}/manual_plan.json"));
    print!("{}", run(&path));
}

#[cfg(test)]
mod tests {
    #[test]
    fn storefront_only() {
        let out = super::run(&format!("{}/manual_plan.json", super::FIXTURES));
        assert_eq!(out.lines().next(), Some("CD_sans#1: false"), "{out}");
        assert!(out.contains(r#"tst:2 -> false ["false"]"#), "{out}");
    }
}
