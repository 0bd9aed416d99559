use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use roxmltree::Node;

use super::{CheckBundle, ContentError};
use crate::model::{
    CheckDefinition, Condition, CriteriaChild, CriteriaNode, CriteriaOperator, DefinitionClass, Existence,
    ItemCheck, OvalDefinition, OvalTest, RelationKind, RelationNode, SoftwareComponent, StateEntry,
    StateOperation, TargetDefinition, XmlConfigObject, XmlConfigState,
};
use crate::xquery::{escape_attr, escape_text};

type Result<T> = std::result::Result<T, ContentError>;

/// Parses a `<check_bundle>` document. Namespaces are ignored; only local
/// element names matter.
pub fn parse_bundle(bytes: &[u8]) -> Result<CheckBundle> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let (line, column) = line_col(bytes, e.valid_up_to());
        ContentError::Syntax {
            line,
            column,
            message: format!("invalid UTF-8: {e}"),
        }
    })?;
    let options = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(text, options).map_err(|e| ContentError::Syntax {
        line: e.pos().row,
        column: e.pos().col,
        message: e.to_string(),
    })?;

    let root = doc.root_element();
    if local(root) != "check_bundle" {
        return Err(ContentError::schema(format!(
            "root element must be check_bundle, found {}",
            local(root)
        )));
    }

    let mut bundle = CheckBundle::default();
    for section in elements(root) {
        match local(section) {
            "objects" => {
                for node in elements(section) {
                    expect_name(node, "xmlconfiguration_object")?;
                    let obj = parse_object(node)?;
                    insert_unique(&mut bundle.objects, obj.id.clone(), obj, "object")?;
                }
            }
            "states" => {
                for node in elements(section) {
                    expect_name(node, "xmlconfiguration_state")?;
                    let state = parse_state(node)?;
                    insert_unique(&mut bundle.states, state.id.clone(), state, "state")?;
                }
            }
            "tests" => {
                for node in elements(section) {
                    expect_name(node, "xmlconfiguration_test")?;
                    let test = parse_test(node)?;
                    insert_unique(&mut bundle.tests, test.id.clone(), test, "test")?;
                }
            }
            "definitions" => {
                for node in elements(section) {
                    expect_name(node, "definition")?;
                    let def = parse_definition(node)?;
                    insert_unique(&mut bundle.definitions, def.id.clone(), def, "definition")?;
                }
            }
            "targets" => {
                for node in elements(section) {
                    expect_name(node, "target_definition")?;
                    let td = parse_target(node)?;
                    insert_unique(&mut bundle.targets, td.id.clone(), td, "target definition")?;
                }
            }
            "checks" => {
                for node in elements(section) {
                    expect_name(node, "check_definition")?;
                    let cd = parse_check(node)?;
                    insert_unique(&mut bundle.checks, cd.id.clone(), cd, "check definition")?;
                }
            }
            other => return Err(ContentError::schema(format!("unknown section <{other}>"))),
        }
    }
    Ok(bundle)
}

fn line_col(bytes: &[u8], offset: usize) -> (u32, u32) {
    let before = &bytes[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = offset - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
    (line as u32, col as u32)
}

fn local<'a>(node: Node<'a, '_>) -> &'a str {
    node.tag_name().name()
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(Node::is_element)
}

fn expect_name(node: Node, name: &str) -> Result<()> {
    if local(node) == name {
        Ok(())
    } else {
        Err(ContentError::schema(format!(
            "unexpected <{}> where <{name}> was expected",
            local(node)
        )))
    }
}

fn attr<'a>(node: Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| {
        ContentError::schema(format!("<{}> is missing required attribute {name}", local(node)))
    })
}

fn parse_attr<T: std::str::FromStr<Err = String>>(node: Node, name: &str, default: T) -> Result<T> {
    match node.attribute(name) {
        None => Ok(default),
        Some(raw) => raw.parse().map_err(ContentError::Schema),
    }
}

fn bool_attr(node: Node, name: &str) -> Result<bool> {
    match node.attribute(name) {
        None | Some("false") => Ok(false),
        Some("true") => Ok(true),
        Some(other) => Err(ContentError::schema(format!("{name} must be true or false, found `{other}`"))),
    }
}

fn text(node: Node) -> String {
    node.children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect::<String>()
        .trim()
        .to_string()
}

fn insert_unique<T>(map: &mut BTreeMap<String, T>, id: String, value: T, what: &str) -> Result<()> {
    if map.contains_key(&id) {
        return Err(ContentError::Ref(format!("duplicate {what} id {id}")));
    }
    map.insert(id, value);
    Ok(())
}

fn parse_object(node: Node) -> Result<XmlConfigObject> {
    let id = attr(node, "id")?.to_string();
    let mut fields: BTreeMap<&str, String> = BTreeMap::new();
    for child in elements(node) {
        let name = local(child);
        if !matches!(name, "type" | "schema" | "query") {
            return Err(ContentError::schema(format!("unknown element <{name}> in object {id}")));
        }
        if fields.insert(name, text(child)).is_some() {
            return Err(ContentError::schema(format!("object {id} has more than one <{name}>")));
        }
    }
    let mut take = |name: &str, required: bool| match fields.remove(name) {
        Some(v) => Ok(v),
        None if required => Err(ContentError::schema(format!("object {id} is missing <{name}>"))),
        None => Ok(String::new()),
    };
    Ok(XmlConfigObject {
        config_type: take("type", true)?,
        schema: take("schema", false)?,
        query: take("query", true)?,
        id,
    })
}

fn parse_state(node: Node) -> Result<XmlConfigState> {
    let id = attr(node, "id")?.to_string();
    let mut expected = Vec::new();
    for child in elements(node) {
        expect_name(child, "value")?;
        let operation = parse_attr(child, "operation", StateOperation::Equals)?;
        let value = text(child);
        if operation == StateOperation::PatternMatch {
            regex::Regex::new(&value)
                .map_err(|e| ContentError::schema(format!("state {id} has an invalid pattern: {e}")))?;
        }
        expected.push(StateEntry { operation, value });
    }
    Ok(XmlConfigState { id, expected })
}

fn parse_test(node: Node) -> Result<OvalTest> {
    let id = attr(node, "id")?.to_string();
    let existence = parse_attr(node, "check_existence", Existence::AtLeastOne)?;
    let item_check = parse_attr(node, "check", ItemCheck::All)?;
    let mut object_ref = None;
    let mut state_refs = Vec::new();
    for child in elements(node) {
        match local(child) {
            "object" => {
                if object_ref.replace(attr(child, "object_ref")?.to_string()).is_some() {
                    return Err(ContentError::schema(format!("test {id} references more than one object")));
                }
            }
            "state" => state_refs.push(attr(child, "state_ref")?.to_string()),
            other => return Err(ContentError::schema(format!("unknown element <{other}> in test {id}"))),
        }
    }
    Ok(OvalTest {
        object_ref: object_ref.ok_or_else(|| ContentError::schema(format!("test {id} has no <object>")))?,
        id,
        state_refs,
        existence,
        item_check,
    })
}

fn parse_definition(node: Node) -> Result<OvalDefinition> {
    let id = attr(node, "id")?.to_string();
    let class = parse_attr(node, "class", DefinitionClass::Compliance)?;
    let mut criteria = None;
    for child in elements(node) {
        match local(child) {
            "criteria" if criteria.is_none() => criteria = Some(parse_criteria(child)?),
            "criteria" => return Err(ContentError::schema(format!("definition {id} has more than one <criteria>"))),
            "metadata" => {}
            other => return Err(ContentError::schema(format!("unknown element <{other}> in definition {id}"))),
        }
    }
    Ok(OvalDefinition {
        criteria: criteria.ok_or_else(|| ContentError::schema(format!("definition {id} has no <criteria>")))?,
        id,
        class,
    })
}

fn parse_criteria(node: Node) -> Result<CriteriaNode> {
    let operator = parse_attr(node, "operator", CriteriaOperator::And)?;
    let negate = bool_attr(node, "negate")?;
    let children = elements(node)
        .map(|child| match local(child) {
            "criteria" => parse_criteria(child).map(CriteriaChild::Criteria),
            "criterion" => Ok(CriteriaChild::Test {
                test_ref: attr(child, "test_ref")?.to_string(),
                negate: bool_attr(child, "negate")?,
            }),
            other => Err(ContentError::schema(format!("unknown element <{other}> in criteria"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriteriaNode {
        operator,
        negate,
        children,
    })
}

fn parse_target(node: Node) -> Result<TargetDefinition> {
    let id = attr(node, "id")?.to_string();
    let root = node.attribute("root").map(str::to_string);
    let mut components = BTreeMap::new();
    let mut pending = Vec::new();
    for child in elements(node) {
        match local(child) {
            "software_component" => {
                let sc_id = attr(child, "id")?.to_string();
                let mut conditions = BTreeSet::new();
                for cond in elements(child) {
                    expect_name(cond, "condition")?;
                    let c = Condition {
                        property: attr(cond, "property")?.to_string(),
                        op: attr(cond, "op")?.parse().map_err(ContentError::Schema)?,
                        value: attr(cond, "value")?.to_string(),
                    };
                    if c.property.is_empty() {
                        return Err(ContentError::schema(format!("empty property name in {sc_id}")));
                    }
                    if !conditions.insert(c) {
                        return Err(ContentError::schema(format!("duplicate condition in {sc_id}")));
                    }
                }
                let sc = SoftwareComponent {
                    id: sc_id.clone(),
                    conditions,
                };
                insert_unique(&mut components, sc_id, sc, "software component")?;
            }
            "relation" => pending.push(child),
            other => return Err(ContentError::schema(format!("unknown element <{other}> in target {id}"))),
        }
    }

    let mut relations = BTreeMap::new();
    let mut anonymous = Vec::new();
    for child in pending {
        let kind: RelationKind = attr(child, "kind")?.parse().map_err(ContentError::Schema)?;
        let rel = RelationNode {
            id: child.attribute("id").unwrap_or_default().to_string(),
            kind,
            left: attr(child, "left")?.to_string(),
            right: attr(child, "right")?.to_string(),
        };
        if rel.id.is_empty() {
            anonymous.push(rel);
        } else {
            insert_unique(&mut relations, rel.id.clone(), rel, "relation")?;
        }
    }
    // unnumbered relations get the first free `<kind>-<n>` id
    let mut counter = 0;
    for mut rel in anonymous {
        loop {
            counter += 1;
            let candidate = format!("{}-{counter}", rel.kind);
            if !relations.contains_key(&candidate) && !components.contains_key(&candidate) {
                rel.id = candidate;
                break;
            }
        }
        relations.insert(rel.id.clone(), rel);
    }

    Ok(TargetDefinition {
        id,
        components,
        relations,
        root,
    })
}

fn parse_check(node: Node) -> Result<CheckDefinition> {
    let id = attr(node, "id")?.to_string();
    let mut tau = BTreeMap::new();
    for child in elements(node) {
        expect_name(child, "test_map")?;
        let test = attr(child, "test_ref")?.to_string();
        let sc = attr(child, "sc_ref")?.to_string();
        if tau.insert(test.clone(), sc).is_some() {
            return Err(ContentError::Ref(format!("check {id} maps test {test} more than once")));
        }
    }
    Ok(CheckDefinition {
        definition_ref: attr(node, "definition_ref")?.to_string(),
        target_ref: attr(node, "target_ref")?.to_string(),
        id,
        tau,
    })
}

/// Canonical single-line rendering of an object, the form collector object
/// queries are evaluated against.
pub fn serialize_object(obj: &XmlConfigObject) -> String {
    let mut out = String::new();
    write_object(&mut out, obj, None);
    out
}

fn write_object(out: &mut String, obj: &XmlConfigObject, indent: Option<&str>) {
    let (nl, inner) = match indent {
        Some(pad) => ("\n", format!("{pad}  ")),
        None => ("", String::new()),
    };
    let pad = indent.unwrap_or("");
    let _ = write!(
        out,
        "{pad}<xmlconfiguration_object id=\"{}\">{nl}\
         {inner}<type>{}</type>{nl}\
         {inner}<schema>{}</schema>{nl}\
         {inner}<query>{}</query>{nl}\
         {pad}</xmlconfiguration_object>",
        escape_attr(&obj.id),
        escape_text(&obj.config_type),
        escape_text(&obj.schema),
        escape_text(&obj.query),
    );
}

pub fn serialize_bundle(bundle: &CheckBundle) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<check_bundle>\n");

    out.push_str("  <objects>\n");
    for obj in bundle.objects.values() {
        write_object(&mut out, obj, Some("    "));
        out.push('\n');
    }
    out.push_str("  </objects>\n  <states>\n");
    for state in bundle.states.values() {
        let _ = writeln!(out, "    <xmlconfiguration_state id=\"{}\">", escape_attr(&state.id));
        for entry in &state.expected {
            let _ = writeln!(
                out,
                "      <value operation=\"{}\">{}</value>",
                entry.operation.as_str(),
                escape_text(&entry.value)
            );
        }
        out.push_str("    </xmlconfiguration_state>\n");
    }
    out.push_str("  </states>\n  <tests>\n");
    for test in bundle.tests.values() {
        let _ = writeln!(
            out,
            "    <xmlconfiguration_test id=\"{}\" check_existence=\"{}\" check=\"{}\">",
            escape_attr(&test.id),
            test.existence.as_str(),
            test.item_check.as_str()
        );
        let _ = writeln!(out, "      <object object_ref=\"{}\"/>", escape_attr(&test.object_ref));
        for state in &test.state_refs {
            let _ = writeln!(out, "      <state state_ref=\"{}\"/>", escape_attr(state));
        }
        out.push_str("    </xmlconfiguration_test>\n");
    }
    out.push_str("  </tests>\n  <definitions>\n");
    for def in bundle.definitions.values() {
        let _ = writeln!(
            out,
            "    <definition id=\"{}\" class=\"{}\">",
            escape_attr(&def.id),
            def.class.as_str()
        );
        write_criteria(&mut out, &def.criteria, 6);
        out.push_str("    </definition>\n");
    }
    out.push_str("  </definitions>\n  <targets>\n");
    for td in bundle.targets.values() {
        let _ = write!(out, "    <target_definition id=\"{}\"", escape_attr(&td.id));
        if let Some(root) = &td.root {
            let _ = write!(out, " root=\"{}\"", escape_attr(root));
        }
        out.push_str(">\n");
        for sc in td.components.values() {
            if sc.conditions.is_empty() {
                let _ = writeln!(out, "      <software_component id=\"{}\"/>", escape_attr(&sc.id));
                continue;
            }
            let _ = writeln!(out, "      <software_component id=\"{}\">", escape_attr(&sc.id));
            for c in &sc.conditions {
                let _ = writeln!(
                    out,
                    "        <condition property=\"{}\" op=\"{}\" value=\"{}\"/>",
                    escape_attr(&c.property),
                    c.op.as_str(),
                    escape_attr(&c.value)
                );
            }
            out.push_str("      </software_component>\n");
        }
        for rel in td.relations.values() {
            let _ = writeln!(
                out,
                "      <relation id=\"{}\" kind=\"{}\" left=\"{}\" right=\"{}\"/>",
                escape_attr(&rel.id),
                rel.kind,
                escape_attr(&rel.left),
                escape_attr(&rel.right)
            );
        }
        out.push_str("    </target_definition>\n");
    }
    out.push_str("  </targets>\n  <checks>\n");
    for cd in bundle.checks.values() {
        let _ = writeln!(
            out,
            "    <check_definition id=\"{}\" definition_ref=\"{}\" target_ref=\"{}\">",
            escape_attr(&cd.id),
            escape_attr(&cd.definition_ref),
            escape_attr(&cd.target_ref)
        );
        for (test, sc) in &cd.tau {
            let _ = writeln!(
                out,
                "      <test_map test_ref=\"{}\" sc_ref=\"{}\"/>",
                escape_attr(test),
                escape_attr(sc)
            );
        }
        out.push_str("    </check_definition>\n");
    }
    out.push_str("  </checks>\n</check_bundle>\n");
    out
}

fn write_criteria(out: &mut String, node: &CriteriaNode, depth: usize) {
    let pad = " ".repeat(depth);
    let _ = write!(out, "{pad}<criteria operator=\"{}\"", node.operator.as_str());
    if node.negate {
        out.push_str(" negate=\"true\"");
    }
    out.push_str(">\n");
    for child in &node.children {
        match child {
            CriteriaChild::Criteria(inner) => write_criteria(out, inner, depth + 2),
            CriteriaChild::Test { test_ref, negate } => {
                let _ = write!(out, "{pad}  <criterion test_ref=\"{}\"", escape_attr(test_ref));
                if *negate {
                    out.push_str(" negate=\"true\"");
                }
                out.push_str("/>\n");
            }
        }
    }
    let _ = writeln!(out, "{pad}</criteria>");
}
