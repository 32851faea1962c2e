//! Dense ARFF subset: `@relation`, nominal and numeric `@attribute`s, `@data`.

use std::path::Path;

use super::{assemble, Column, DatasetFile, DatasetFormat};
use crate::error::{Error, Result};

pub fn parse_arff(path: &Path, class_index: Option<usize>) -> Result<DatasetFile> {
    let text = std::fs::read_to_string(path)?;
    parse_arff_str(&text, path, class_index)
}

/// Parses ARFF text; `path` is used for error messages only.
pub fn parse_arff_str(text: &str, path: &Path, class_index: Option<usize>) -> Result<DatasetFile> {
    let fail = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if in_data {
            if trimmed.starts_with('{') {
                return Err(fail(line, "sparse data rows are not supported".into()));
            }
            let fields = split_fields(trimmed).map_err(|m| fail(line, m))?;
            rows.push((line, fields));
            continue;
        }
        let (keyword, rest) = split_keyword(trimmed);
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => {}
            "@attribute" => columns.push(parse_attribute(rest).map_err(|m| fail(line, m))?),
            "@data" => in_data = true,
            other => return Err(fail(line, format!("unexpected header line starting with `{other}`"))),
        }
    }
    if !in_data {
        return Err(fail(0, "missing @data section".into()));
    }
    assemble(path, DatasetFormat::Arff, columns, rows, class_index)
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim_start()),
        None => (line, ""),
    }
}

/// Reads one possibly quoted token; returns it and the remainder.
fn take_token(s: &str) -> Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err("expected a name".into()),
        Some((_, q @ ('\'' | '"'))) => {
            let end = s[1..].find(q).ok_or_else(|| format!("unterminated quote in `{s}`"))?;
            Ok((s[1..1 + end].to_string(), &s[end + 2..]))
        }
        Some(_) => {
            let end = s.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn parse_attribute(rest: &str) -> Result<Column, String> {
    let (name, kind) = take_token(rest)?;
    let kind = kind.trim();
    if let Some(body) = kind.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| format!("unterminated nominal domain for `{name}`"))?;
        let labels = split_fields(body)?;
        if labels.is_empty() || labels.iter().any(String::is_empty) {
            return Err(format!("empty nominal value in domain of `{name}`"));
        }
        return Ok(Column::Nominal { name, labels });
    }
    match kind.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(Column::Numeric { name }),
        other => Err(format!("unsupported attribute type `{other}` for `{name}`")),
    }
}

/// Splits on commas outside quotes and strips surrounding quotes.
fn split_fields(line: &str) -> Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    let mut quoted = false;
    for c in line.chars() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), c) => current.push(c),
            (None, '\'' | '"') if current.trim().is_empty() => {
                current.clear();
                quote = Some(c);
                quoted = true;
            }
            (None, ',') => {
                fields.push(finish(&mut current, quoted));
                quoted = false;
            }
            (None, c) => current.push(c),
        }
    }
    if quote.is_some() {
        return Err(format!("unterminated quote in `{line}`"));
    }
    fields.push(finish(&mut current, quoted));
    Ok(fields)
}

fn finish(current: &mut String, quoted: bool) -> String {
    let s = std::mem::take(current);
    if quoted {
        s
    } else {
        s.trim().to_string()
    }
}
