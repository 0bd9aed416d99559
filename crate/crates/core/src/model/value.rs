//! Typed comparison of property values.
//!
//! Every property carries one of three value kinds. Strings compare
//! lexicographically, dotted versions compare numerically segment by segment
//! (missing trailing segments count as zero), and spec tokens of the shape
//! `Name_X.Y` compare by version only when both names are identical.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    String,
    Version,
    Spec,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::String => "string",
            ValueKind::Version => "version",
            ValueKind::Spec => "spec",
        }
    }

    /// Whether `raw` is a well-formed value of this kind.
    pub fn accepts(self, raw: &str) -> bool {
        match self {
            ValueKind::String => true,
            ValueKind::Version => DottedVersion::from_str(raw).is_ok(),
            ValueKind::Spec => SpecToken::from_str(raw).is_ok(),
        }
    }

    /// Orders `left` against `right` under this kind. `None` means the two
    /// values are incomparable (malformed, or spec tokens with different names).
    pub fn compare(self, left: &str, right: &str) -> Option<Ordering> {
        match self {
            ValueKind::String => Some(left.cmp(right)),
            ValueKind::Version => {
                let l = DottedVersion::from_str(left).ok()?;
                let r = DottedVersion::from_str(right).ok()?;
                Some(l.cmp(&r))
            }
            ValueKind::Spec => {
                let l = SpecToken::from_str(left).ok()?;
                let r = SpecToken::from_str(right).ok()?;
                if l.name != r.name {
                    return None;
                }
                Some(l.version.cmp(&r.version))
            }
        }
    }

    /// `actual op expected`; incomparable values satisfy no operator.
    pub fn satisfies(self, actual: &str, op: Operator, expected: &str) -> bool {
        match self.compare(actual, expected) {
            Some(ord) => op.holds(ord),
            None => false,
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DottedVersion(Vec<u64>);

impl DottedVersion {
    pub fn segments(&self) -> &[u64] {
        &self.0
    }
}

impl FromStr for DottedVersion {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s.is_empty() {
            return Err(());
        }
        s.split('.')
            .map(|seg| {
                if seg.is_empty() || !seg.bytes().all(|b| b.is_ascii_digit()) {
                    Err(())
                } else {
                    seg.parse::<u64>().map_err(|_| ())
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DottedVersion)
    }
}

impl Ord for DottedVersion {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.0.len().max(other.0.len());
        for idx in 0..len {
            let a = self.0.get(idx).copied().unwrap_or(0);
            let b = other.0.get(idx).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for DottedVersion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Java_Servlet_3.0` splits into name `Java_Servlet` and version `3.0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecToken {
    pub name: String,
    pub version: DottedVersion,
}

impl FromStr for SpecToken {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (name, version) = s.rsplit_once('_').ok_or(())?;
        if name.is_empty() {
            return Err(());
        }
        Ok(SpecToken {
            name: name.to_string(),
            version: version.parse()?,
        })
    }
}
