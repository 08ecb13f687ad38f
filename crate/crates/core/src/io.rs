//! Text formats shared by designs, matrices and words.

use std::collections::BTreeMap;

use crate::error::{parse_err, Error, Result};

/// `key=value` fields of a header line such as
/// `qdesign t=2 v=3 k=2 lambda=1 q=2 poly=2`.
#[derive(Debug)]
pub(crate) struct Header {
    line: usize,
    fields: BTreeMap<String, String>,
}

pub(crate) fn header_fields(line: usize, text: &str, tag: &str) -> Result<Header> {
    let mut parts = text.split_whitespace();
    match parts.next() {
        Some(t) if t == tag => {}
        other => {
            return Err(parse_err(
                line,
                format!("expected `{tag}` header, found {:?}", other.unwrap_or("")),
            ))
        }
    }
    let mut fields = BTreeMap::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, found {part:?}")))?;
        if fields.insert(k.to_string(), v.to_string()).is_some() {
            return Err(parse_err(line, format!("repeated header key {k:?}")));
        }
    }
    Ok(Header { line, fields })
}

impl Header {
    pub(crate) fn get_opt_u64(&self, key: &str) -> Result<Option<u64>> {
        self.fields
            .get(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    parse_err(
                        self.line,
                        format!("{key}={v} is not a non-negative integer"),
                    )
                })
            })
            .transpose()
    }

    pub(crate) fn get_u64(&self, key: &str) -> Result<u64> {
        self.get_opt_u64(key)?
            .ok_or_else(|| parse_err(self.line, format!("missing header field {key}")))
    }

    pub(crate) fn get_usize(&self, key: &str) -> Result<usize> {
        Ok(self.get_u64(key)? as usize)
    }

    pub(crate) fn get_u32(&self, key: &str) -> Result<u32> {
        u32::try_from(self.get_u64(key)?)
            .map_err(|_| parse_err(self.line, format!("{key} too large")))
    }
}

/// Non-empty lines with `#` comments stripped, numbered from 1.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses a received word written as a string of `0`/`1` characters.
pub fn parse_word(text: &str) -> Result<Vec<u8>> {
    text.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::DecodeInput(format!("non-binary symbol {other:?}"))),
        })
        .collect()
}

pub fn format_word(w: &[u8]) -> String {
    w.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_parsing() {
        let h = header_fields(1, "cdesign t=2 n=7 k=3 lambda=1", "cdesign").unwrap();
        assert_eq!(h.get_u64("n").unwrap(), 7);
        assert!(h.get_u64("q").is_err());
        assert!(header_fields(1, "qdesign t=2", "cdesign").is_err());
        assert!(header_fields(1, "cdesign t=2 t=3", "cdesign").is_err());
        assert!(header_fields(1, "cdesign t", "cdesign").is_err());
    }

    #[test]
    fn words() {
        assert_eq!(parse_word("0110\n").unwrap(), vec![0, 1, 1, 0]);
        assert!(parse_word("012").is_err());
        assert_eq!(format_word(&[1, 0, 1]), "101");
    }
}
