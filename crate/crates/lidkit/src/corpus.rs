//! Corpus files: one `code<TAB>text` sample per line, UTF-8. Tabs, newlines
//! and backslashes inside the text are written as `\t`, `\n` and `\\`.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{LidError, Result};

pub fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_text`]; an unknown escape is kept as written.
pub fn unescape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.peek() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            _ => {
                out.push('\\');
                continue;
            }
        }
        chars.next();
    }
    out
}

/// Parses one line; blank lines give `None`.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<(String, String)>> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        return Ok(None);
    }
    let Some((code, text)) = line.split_once('\t') else {
        return Err(LidError::Corpus {
            line: line_no,
            message: "expected `code<TAB>text`".into(),
        });
    };
    Ok(Some((code.trim().to_string(), unescape_text(text))))
}

pub fn read_corpus_from(reader: impl BufRead) -> Result<Vec<(String, String)>> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| LidError::Corpus {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if let Some(row) = parse_line(&line, idx + 1)? {
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn read_corpus(path: &Path) -> Result<Vec<(String, String)>> {
    let file = fs::File::open(path).map_err(|e| LidError::io(path, e))?;
    read_corpus_from(BufReader::new(file))
}

pub fn write_corpus_to<S: AsRef<str>, T: AsRef<str>>(
    mut out: impl Write,
    rows: &[(S, T)],
) -> io::Result<()> {
    for (code, text) in rows {
        writeln!(out, "{}\t{}", code.as_ref(), escape_text(text.as_ref()))?;
    }
    out.flush()
}

pub fn write_corpus<S: AsRef<str>, T: AsRef<str>>(path: &Path, rows: &[(S, T)]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| LidError::io(path, e))?;
    write_corpus_to(io::BufWriter::new(file), rows).map_err(|e| LidError::io(path, e))
}
