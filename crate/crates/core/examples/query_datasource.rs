//! Loads the inventory data source and evaluates property conditions,
//! including version and specification comparisons.

use confcheck::datasource::{load_data_source, PropertyRegistry};
use confcheck::model::{Condition, Operator, RelationKind};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run() -> String {
    let sources = [
        std::fs::read(format!("{FIXTURES}/acme_ds.json")).unwrap(),
        std::fs::read(format!("{FIXTURES}/acme_ds_ext.json")).unwrap(),
    ];
    let ds = load_data_source(&sources, PropertyRegistry::default()).expect("fixtures load");
    let mut out = format!("identifiers: {:?}\n", ds.identifiers());
    for cond in [
        Condition::new("sup_spec", Operator::Ge, "Java_Servlet_3.0"),
        Condition::new("release", Operator::Ge, "7.0"),
        Condition::new("vendor", Operator::Eq, "Apache"),
        Condition::new("req_spec", Operator::Eq, "Java_Servlet_3.0"),
    ] {
        let matches = ds.eval_software_component([&cond]);
        out.push_str(&format!("{cond}: {matches:?}\n"));
    }
    let deployed: Vec<_> = ds.relation_pairs(RelationKind::DeplIn).collect();
    out.push_str(&format!("depl_in: {deployed:?}\n"));
    out
}

fn main() {
    print!("{}", run());
}
