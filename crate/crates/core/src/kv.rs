//! Flat `key = value` text blocks used by grid, config and scene files.
//!
//! Blank lines and `#` comments are ignored. Keys may repeat; callers decide
//! whether that is meaningful.

use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KvError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: invalid value {value:?} for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("unknown key `{key}` on line {line}")]
    UnknownKey { line: usize, key: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn parse<T: FromStr>(&self) -> Result<T, KvError> {
        self.value.parse().map_err(|_| KvError::BadValue {
            line: self.line,
            key: self.key.clone(),
            value: self.value.clone(),
        })
    }
}

/// Strips a trailing `# comment` and surrounding whitespace.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

pub fn parse(text: &str) -> Result<Vec<Entry>, KvError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(KvError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let key = k.trim();
        if key.is_empty() {
            return Err(KvError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        out.push(Entry {
            line: i + 1,
            key: key.to_string(),
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

pub fn render<K: Display, V: Display>(pairs: impl IntoIterator<Item = (K, V)>) -> String {
    pairs
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let e = parse("# header\nrows = 8  # eight\n\ncols=4\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].key, "rows");
        assert_eq!(e[0].parse::<usize>().unwrap(), 8);
        assert_eq!(e[1].line, 4);
    }

    #[test]
    fn rejects_missing_equals() {
        assert!(matches!(
            parse("rows 8"),
            Err(KvError::Syntax { line: 1, .. })
        ));
    }
}
