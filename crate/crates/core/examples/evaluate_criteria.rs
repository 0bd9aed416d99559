//! Prints the three-valued truth tables used to combine test results, and
//! evaluates the SANS definition under every pair of test outcomes.

use std::collections::BTreeMap;

use confcheck::content::parse_bundle;
use confcheck::model::Status;
use confcheck::oval::evaluate_definition;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run() -> String {
    let mut out = String::from("a      b      and    or\n");
    for a in Status::ALL {
        for b in Status::ALL {
            out.push_str(&format!("{a:<6} {b:<6} {:<6} {}\n", a.and(b), a.or(b)));
        }
    }
    let bundle = parse_bundle(&std::fs::read(format!("{FIXTURES}/sans_bundle.xml")).unwrap()).unwrap();
    let def = bundle.definitions.values().next().unwrap();
    let tests: Vec<&str> = def.tests().into_iter().collect();
    out.push_str(&format!("\n{}\n", def.id));
    for a in Status::ALL {
        for b in Status::ALL {
            let statuses = BTreeMap::from([(tests[0].to_string(), a), (tests[1].to_string(), b)]);
            out.push_str(&format!("  {a:<6} {b:<6} => {}\n", evaluate_definition(def, &statuses)));
        }
    }
    out
}

fn main() {
    print!("{}", run());
}

#[cfg(test)]
mod tests {
    #[test]
    fn dominance() {
        let out = super::run();
        assert!(out.contains("false  error  false  error"), "{out}");
        assert!(out.contains("true   error  error  true"), "{out}");
    }
}
