//! Line-oriented `key = value unit` documents with `[section]` headers.

use super::units::{parse_quantity, Dimension, QuantityError};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Item {
    Section {
        name: String,
        arg: Option<String>,
        line: usize,
    },
    Entry {
        key: String,
        value: String,
        line: usize,
    },
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: "unterminated section header".into(),
            })?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().ok_or_else(|| Error::Parse {
                line,
                message: "empty section header".into(),
            })?;
            let rest: Vec<&str> = parts.collect();
            items.push(Item::Section {
                name: name.to_string(),
                arg: (!rest.is_empty()).then(|| rest.join(" ")),
                line,
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Parse {
                line,
                message: format!("malformed key `{key}`"),
            });
        }
        items.push(Item::Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(items)
}

pub(crate) fn quantity(value: &str, dim: Dimension, line: usize) -> Result<f64> {
    parse_quantity(value, dim).map_err(|e| match e {
        QuantityError::Number(message) => Error::Parse { line, message },
        QuantityError::Unit(message) => Error::Unit { line, message },
    })
}

pub(crate) fn boolean(value: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(Error::Parse {
            line,
            message: format!("expected on/off, found `{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_sections_and_entries() {
        let items = tokenize("# header\nv = 1 V  # trailing\n\n[event]\nkind = sag\n[entry ref 1]\n").unwrap();
        assert_eq!(items.len(), 4);
        assert_eq!(
            items[0],
            Item::Entry {
                key: "v".into(),
                value: "1 V".into(),
                line: 2
            }
        );
        assert!(matches!(&items[1], Item::Section { name, arg: None, line: 4 } if name == "event"));
        assert!(matches!(&items[3], Item::Section { arg: Some(a), .. } if a == "ref 1"));
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            tokenize("a = 1\nbogus line\n"),
            Err(Error::Parse {
                line: 2,
                message: "expected `key = value`, found `bogus line`".into()
            })
        );
        assert!(matches!(tokenize("[oops\n"), Err(Error::Parse { line: 1, .. })));
    }
}
