//! Evaluates object queries against deployment descriptors.
//!
//! `cargo run --example xpath_query -- QUERY FILE.xml` evaluates an arbitrary
//! query; without arguments the fixture descriptors are used.

use confcheck::xquery::{XPath, XmlDoc};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn eval(query: &str, path: &str) -> String {
    let q = match XPath::parse(query) {
        Ok(q) => q,
        Err(e) => return format!("{query}: {e}\n"),
    };
    let text = std::fs::read_to_string(path).unwrap();
    match XmlDoc::parse(&text) {
        Ok(doc) => format!("{query} on {}: {:?}\n", short(path), q.eval(&doc)),
        Err(e) => format!("{path}: {e}\n"),
    }
}

fn short(path: &str) -> &str {
    path.strip_prefix(FIXTURES).map(|p| p.trim_start_matches('/')).unwrap_or(path)
}

fn run() -> String {
    let manager = format!("{FIXTURES}/http/manager_web.xml");
    let store = format!("{FIXTURES}/fs/192.168.2.3/path/to/web.xml");
    let mut out = String::new();
    for query in [
        "//*session-config/*cookie-config/*http-only/text()",
        "//*session-config/*cookie-config/*secure/text()",
        "/web-app/servlet[1]/servlet-name/text()",
        "//cookie-config",
        "/web-app[@version='3.0']/display-name/text()",
    ] {
        out.push_str(&eval(query, &manager));
        out.push_str(&eval(query, &store));
    }
    out.push_str(&eval("//a | //b", &manager));
    out
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.as_slice() {
        [query, file] => print!("{}", eval(query, file)),
        _ => print!("{}", run()),
    }
}
