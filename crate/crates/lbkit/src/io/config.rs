//! Flat configuration files with dotted keys.
//!
//! ```text
//! # comment
//! [Application.Discretization]
//! Resolution = 128
//! ```
//!
//! Section headers prefix the keys that follow; `Key = value` lines may
//! also spell the dotted path directly. Typed getters follow read-or-warn
//! semantics: a missing or unparsable value yields the supplied default and
//! records a warning instead of failing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::Error;

/// Parsed configuration: dotted keys to raw string values.
#[derive(Debug, Clone, Default)]
pub struct ConfigTree {
    values: BTreeMap<String, String>,
    warnings: Vec<String>,
}

/// Reads and parses a configuration file.
pub fn parse_config<P: AsRef<Path>>(path: P) -> Result<ConfigTree, Error> {
    parse_config_str(&fs::read_to_string(path)?)
}

/// Parses configuration text.
pub fn parse_config_str(text: &str) -> Result<ConfigTree, Error> {
    let mut tree = ConfigTree::default();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(Error::Config {
                line: line_no,
                what: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::Config {
                    line: line_no,
                    what: "empty section name".into(),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_config(line_no)?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config {
                line: line_no,
                what: "empty key".into(),
            });
        }
        let dotted = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if tree.values.contains_key(&dotted) {
            return Err(Error::Config {
                line: line_no,
                what: format!("duplicate key {dotted}"),
            });
        }
        tree.values.insert(dotted, value.trim().to_string());
    }
    Ok(tree)
}

trait OkOrConfig<'a> {
    fn ok_or_config(self, line: usize) -> Result<(&'a str, &'a str), Error>;
}

impl<'a> OkOrConfig<'a> for Option<(&'a str, &'a str)> {
    fn ok_or_config(self, line: usize) -> Result<(&'a str, &'a str), Error> {
        self.ok_or(Error::Config {
            line,
            what: "expected `Key = value`".into(),
        })
    }
}

impl ConfigTree {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Reads a typed value; a missing or malformed entry records a warning
    /// and returns the default.
    pub fn read_or_warn<T: FromStr + ToString>(&mut self, key: &str, default: T) -> T {
        match self.values.get(key) {
            None => {
                self.warnings.push(format!(
                    "parameter {key} not found, using default {}",
                    default.to_string()
                ));
                default
            }
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => v,
                Err(_) => {
                    self.warnings.push(format!(
                        "parameter {key} = `{raw}` does not parse, using default {}",
                        default.to_string()
                    ));
                    default
                }
            },
        }
    }

    pub fn read_bool_or_warn(&mut self, key: &str, default: bool) -> bool {
        self.read_or_warn(key, default)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Serializes as flat dotted `key = value` lines; parsing the output
    /// reproduces the same key/value pairs.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.values {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_become_dotted_keys() {
        let tree = parse_config_str("[Application.Discretization]\nResolution = 128\n").unwrap();
        assert_eq!(tree.raw("Application.Discretization.Resolution"), Some("128"));
    }

    #[test]
    fn read_or_warn_defaults_and_records() {
        let mut tree = parse_config_str("Tolerance = 1e-10\n").unwrap();
        let tol: f64 = tree.read_or_warn("Tolerance", 0.0);
        assert_eq!(tol, 1e-10);
        assert!(tree.warnings().is_empty());

        let tau: f64 = tree.read_or_warn("LatticeRelaxationTime", 0.53);
        assert_eq!(tau, 0.53);
        assert_eq!(tree.warnings().len(), 1);
        assert!(tree.warnings()[0].contains("LatticeRelaxationTime"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let tree = parse_config_str(
            "# full line\n\n[S]\nA = 1 # trailing\nB = text value\n",
        )
        .unwrap();
        assert_eq!(tree.raw("S.A"), Some("1"));
        assert_eq!(tree.raw("S.B"), Some("text value"));
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let err = parse_config_str("[S]\njust words\n").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(parse_config_str("A = 1\nA = 2\n").is_err());
        assert!(parse_config_str("[S]\nA = 1\n[S]\nA = 2\n").is_err());
    }

    #[test]
    fn serialize_round_trip_preserves_pairs() {
        let text = "[App]\nB = 2\nA = one two\n[App.Sub]\nC = 1e-3\n";
        let tree = parse_config_str(text).unwrap();
        let reparsed = parse_config_str(&tree.serialize()).unwrap();
        let a: Vec<(String, String)> = tree
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let b: Vec<(String, String)> = reparsed
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        assert_eq!(a, b);
    }
}
