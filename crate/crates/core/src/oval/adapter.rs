use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::path::{Component, Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::content::ContentError;
use crate::model::{Collector, SystemComponent, ValidationReport};

pub const HTTP_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdapterKind {
    /// Reads the file named by attribute `path_attr`; UNC paths are remapped
    /// under `remap_root`.
    File { path_attr: String, remap_root: PathBuf },
    /// GETs the URL obtained by filling `{attribute}` placeholders.
    Http { url_template: UrlTemplate },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionAdapter {
    pub id: String,
    pub kind: AdapterKind,
    pub accepts: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Attr(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlTemplate {
    source: String,
    segments: Vec<Segment>,
}

impl UrlTemplate {
    pub fn parse(source: &str) -> Result<UrlTemplate, String> {
        let mut segments = Vec::new();
        let mut rest = source;
        while let Some(open) = rest.find(['{', '}']) {
            if rest.as_bytes()[open] == b'}' {
                return Err(format!("unmatched '}}' in url template `{source}`"));
            }
            if open > 0 {
                segments.push(Segment::Literal(rest[..open].to_string()));
            }
            let close = rest[open..]
                .find('}')
                .ok_or_else(|| format!("unterminated placeholder in url template `{source}`"))?;
            let name = &rest[open + 1..open + close];
            if name.is_empty() || name.contains('{') {
                return Err(format!("bad placeholder in url template `{source}`"));
            }
            segments.push(Segment::Attr(name.to_string()));
            rest = &rest[open + close + 1..];
        }
        if !rest.is_empty() {
            segments.push(Segment::Literal(rest.to_string()));
        }
        Ok(UrlTemplate {
            source: source.to_string(),
            segments,
        })
    }

    pub fn placeholders(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Attr(name) => Some(name.as_str()),
            Segment::Literal(_) => None,
        })
    }

    pub fn instantiate(&self, si: &SystemComponent) -> Option<String> {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(text) => out.push_str(text),
                Segment::Attr(name) => out.push_str(si.get(name)?),
            }
        }
        Some(out)
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for UrlTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdapterJson {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path_attr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    remap_root: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    url_template: Option<String>,
    accepts: Vec<String>,
}

/// Parses adapter configuration. Relative remap roots are resolved against `base_dir`.
pub fn parse_adapters(bytes: &[u8], base_dir: &Path) -> Result<Vec<CollectionAdapter>, ContentError> {
    let raw: Vec<AdapterJson> = serde_json::from_slice(bytes).map_err(ContentError::from_json)?;
    let mut ids = BTreeSet::new();
    raw.into_iter()
        .map(|a| {
            if !ids.insert(a.id.clone()) {
                return Err(ContentError::schema(format!("duplicate adapter id {}", a.id)));
            }
            let missing = |field: &str| ContentError::schema(format!("adapter {} needs `{field}`", a.id));
            let kind = match a.kind.as_str() {
                "file" => {
                    if a.url_template.is_some() {
                        return Err(ContentError::schema(format!("file adapter {} has a url_template", a.id)));
                    }
                    let root = a.remap_root.clone().ok_or_else(|| missing("remap_root"))?;
                    AdapterKind::File {
                        path_attr: a.path_attr.clone().ok_or_else(|| missing("path_attr"))?,
                        remap_root: if root.is_relative() { base_dir.join(root) } else { root },
                    }
                }
                "http" => {
                    if a.path_attr.is_some() || a.remap_root.is_some() {
                        return Err(ContentError::schema(format!("http adapter {} has file settings", a.id)));
                    }
                    let template = a.url_template.as_deref().ok_or_else(|| missing("url_template"))?;
                    AdapterKind::Http {
                        url_template: UrlTemplate::parse(template).map_err(ContentError::Schema)?,
                    }
                }
                other => return Err(ContentError::schema(format!("unknown adapter kind `{other}`"))),
            };
            Ok(CollectionAdapter {
                id: a.id,
                kind,
                accepts: a.accepts.into_iter().collect(),
            })
        })
        .collect()
}

impl CollectionAdapter {
    /// Attribute names a system component must carry for this adapter.
    pub fn required_attributes(&self) -> Vec<&str> {
        match &self.kind {
            AdapterKind::File { path_attr, .. } => vec![path_attr.as_str()],
            AdapterKind::Http { url_template } => url_template.placeholders().collect(),
        }
    }

    pub fn can_serve(&self, config_type: &str, si: &SystemComponent) -> bool {
        self.accepts.contains(config_type)
            && self
                .required_attributes()
                .iter()
                .all(|a| si.attributes.contains_key(*a))
    }

    /// Where the document for `si` lives, as a path or URL string.
    pub fn locate(&self, si: &SystemComponent) -> Result<String, String> {
        match &self.kind {
            AdapterKind::File { path_attr, remap_root } => {
                let raw = si.get(path_attr).ok_or_else(|| format!("missing attribute {path_attr}"))?;
                remap_path(raw, remap_root).map(|p| p.display().to_string())
            }
            AdapterKind::Http { url_template } => url_template
                .instantiate(si)
                .ok_or_else(|| format!("missing attribute for {url_template}")),
        }
    }

    /// Fetches the raw document. Errors are short human-readable strings.
    pub fn fetch(&self, location: &str) -> Result<String, String> {
        match &self.kind {
            AdapterKind::File { .. } => std::fs::read_to_string(location).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => "not found".to_string(),
                _ => format!("read error: {e}"),
            }),
            AdapterKind::Http { .. } => http_get(location),
        }
    }
}

/// `\\host\p1\p2` becomes `<root>/host/p1/p2`; other relative paths are
/// taken under `root`, absolute ones as they are. `..` is rejected.
pub fn remap_path(raw: &str, root: &Path) -> Result<PathBuf, String> {
    let path = if let Some(unc) = raw.strip_prefix(r"\\") {
        let mut out = root.to_path_buf();
        for part in unc.split('\\').filter(|p| !p.is_empty()) {
            if part == ".." || part == "." {
                return Err(format!("invalid path {raw}"));
            }
            out.push(part);
        }
        out
    } else {
        let p = Path::new(raw);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            root.join(p)
        }
    };
    if path.components().any(|c| c == Component::ParentDir) {
        return Err(format!("invalid path {raw}"));
    }
    Ok(path)
}

fn http_get(url: &str) -> Result<String, String> {
    let agent = ureq::AgentBuilder::new()
        .timeout(HTTP_TIMEOUT)
        .redirects(0)
        .build();
    match agent.get(url).call() {
        Ok(resp) if resp.status() == 200 => resp.into_string().map_err(|e| format!("http read error: {e}")),
        Ok(resp) => Err(format!("http status {}", resp.status())),
        Err(ureq::Error::Status(code, _)) => Err(format!("http status {code}")),
        Err(ureq::Error::Transport(t)) => Err(format!("http transport error: {t}")),
    }
}

/// Checks adapter configuration against the collectors in use: placeholders
/// must name collector properties and remap roots must be directories.
pub fn validate_adapters(adapters: &[CollectionAdapter], collectors: Option<&[Collector]>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let known: Option<BTreeSet<&str>> =
        collectors.map(|ks| ks.iter().flat_map(|k| k.properties.iter().map(String::as_str)).collect());
    for a in adapters {
        match &a.kind {
            AdapterKind::File { remap_root, .. } => {
                if !remap_root.is_dir() {
                    report.push(&a.id, format!("remap root {} is not a directory", remap_root.display()));
                }
            }
            AdapterKind::Http { url_template } => {
                if let Some(known) = &known {
                    for p in url_template.placeholders() {
                        if !known.contains(p) {
                            report.push(&a.id, format!("placeholder {{{p}}} is not a property of any collector"));
                        }
                    }
                }
            }
        }
        if a.accepts.is_empty() {
            report.push(&a.id, "adapter accepts no configuration type");
        }
    }
    report
}
