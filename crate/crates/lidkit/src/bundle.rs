//! Single-file model bundle.
//!
//! The bundle is UTF-8 text with `\n` line endings and tab-separated fields:
//!
//! ```text
//! AFLIDMB1
//! format_version  1
//! method          <rank|heli|liga|nb|markov|varbyte>
//! [tokenizer]     case_fold, form, unit
//! [bpe]           target_vocab_size, base symbols, merges in rank order (bpe unit only)
//! [labels]        one code per line, sorted
//! [params]        method parameters, sorted by key
//! [model]         temperature
//! [lang <code>]   counts of one language, in label order
//! [end]
//! ```
//!
//! Tables hold integer counts only; frequencies are recomputed on load, so a
//! loaded model scores exactly like the one that was saved. Char grams are
//! escaped (`\\`, `\t`, `\n`, `\r`, `\<`, `\u{..}` for other controls, and
//! `</w>` for the end-of-word marker); byte grams are lowercase hex. The
//! writer emits one canonical byte sequence per model. See
//! `docs/bundle-format.md` for the row grammar of every section.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use lidkit_core::classify::{
    HeliModel, LigaModel, MarkovModel, ModelKind, NaiveBayesModel, RankDistanceModel, VarByteModel,
};
use lidkit_core::profiles::{ByteNGramCounts, CharNGramCounts, GramUnit, NGramCounts};
use lidkit_core::registry::is_valid_code;
use lidkit_core::text::{BpeModel, END_OF_WORD};
use lidkit_core::{LanguageModel, Method, MethodParams, NormForm, TokenUnit, TokenizerSpec};

use crate::error::{LidError, Result};

pub const MAGIC: &str = "AFLIDMB1";
pub const FORMAT_VERSION: u32 = 1;

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Escapes a symbol or gram so it fits in one tab-separated field.
pub fn escape_symbol(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '<' => out.push_str("\\<"),
            END_OF_WORD => out.push_str("</w>"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_symbol(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(c) = rest.chars().next() {
        if let Some(tail) = rest.strip_prefix("</w>") {
            out.push(END_OF_WORD);
            rest = tail;
            continue;
        }
        rest = &rest[c.len_utf8()..];
        match c {
            '<' => return None,
            '\\' => {
                let e = rest.chars().next()?;
                rest = &rest[e.len_utf8()..];
                match e {
                    '\\' => out.push('\\'),
                    't' => out.push('\t'),
                    'n' => out.push('\n'),
                    'r' => out.push('\r'),
                    '<' => out.push('<'),
                    'u' => {
                        let body = rest.strip_prefix('{')?;
                        let end = body.find('}')?;
                        let cp = u32::from_str_radix(&body[..end], 16).ok()?;
                        out.push(char::from_u32(cp)?);
                        rest = &body[end + 1..];
                    }
                    _ => return None,
                }
            }
            c => out.push(c),
        }
    }
    Some(out)
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn unhex(s: &str) -> Option<Vec<u8>> {
    if s.is_empty() || s.len() % 2 != 0 {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn write_char_table(out: &mut String, counts: &CharNGramCounts) {
    for n in counts.orders() {
        let _ = writeln!(out, "total\t{n}\t{}", counts.total(n));
    }
    for (n, g, c) in counts.iter() {
        let _ = writeln!(out, "gram\t{n}\t{}\t{c}", escape_symbol(g));
    }
}

fn write_byte_table(out: &mut String, counts: &ByteNGramCounts) {
    for n in counts.orders() {
        let _ = writeln!(out, "total\t{n}\t{}", counts.total(n));
    }
    for (n, g, c) in counts.iter() {
        let _ = writeln!(out, "gram\t{n}\t{}\t{c}", hex(g));
    }
}

/// Serializes a model to its canonical bundle text.
pub fn encode_bundle(model: &LanguageModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "format_version\t{FORMAT_VERSION}");
    let _ = writeln!(out, "method\t{}", model.method().name());

    let tok = model.tokenizer();
    out.push_str("[tokenizer]\n");
    let _ = writeln!(out, "case_fold\t{}", flag(tok.case_fold));
    let _ = writeln!(out, "form\t{}", tok.form.name());
    let _ = writeln!(out, "unit\t{}", tok.unit.name());
    if let Some(bpe) = &tok.bpe {
        out.push_str("[bpe]\n");
        let _ = writeln!(out, "target_vocab_size\t{}", bpe.target_vocab_size());
        for s in bpe.base_symbols() {
            let _ = writeln!(out, "base\t{}", escape_symbol(s));
        }
        for (l, r) in bpe.merges() {
            let _ = writeln!(out, "merge\t{}\t{}", escape_symbol(l), escape_symbol(r));
        }
    }

    out.push_str("[labels]\n");
    for code in model.labels() {
        let _ = writeln!(out, "{code}");
    }
    out.push_str("[params]\n");
    for (k, v) in model.kind().params().to_pairs() {
        let _ = writeln!(out, "{k}\t{}", escape_symbol(&v));
    }
    out.push_str("[model]\n");
    let _ = writeln!(out, "temperature\t{:?}", model.temperature());

    for (i, code) in model.labels().iter().enumerate() {
        let _ = writeln!(out, "[lang {code}]");
        match model.kind() {
            ModelKind::RankDistance(m) => write_char_table(&mut out, &m.counts()[i]),
            ModelKind::Heli(m) => write_char_table(&mut out, &m.counts()[i]),
            ModelKind::Liga(m) => write_char_table(&mut out, &m.counts()[i]),
            ModelKind::NaiveBayes(m) => {
                let _ = writeln!(out, "samples\t{}", m.sample_counts()[i]);
                write_byte_table(&mut out, &m.counts()[i]);
            }
            ModelKind::Markov(m) => {
                for (s, c) in &m.initial_counts()[i] {
                    let _ = writeln!(out, "init\t{}\t{c}", escape_symbol(s));
                }
                for ((a, b), c) in &m.transition_counts()[i] {
                    let _ = writeln!(
                        out,
                        "trans\t{}\t{}\t{c}",
                        escape_symbol(a),
                        escape_symbol(b)
                    );
                }
            }
            ModelKind::VarByte(m) => write_byte_table(&mut out, &m.counts()[i]),
        }
    }
    out.push_str("[end]\n");
    out
}

/// Writes the bundle to `out`, gzip-compressed when asked.
pub fn write_bundle(
    model: &LanguageModel,
    mut out: impl Write,
    compress: bool,
) -> std::io::Result<()> {
    let text = encode_bundle(model);
    if compress {
        let mut gz = GzEncoder::new(out, Compression::default());
        gz.write_all(text.as_bytes())?;
        gz.finish()?.flush()
    } else {
        out.write_all(text.as_bytes())?;
        out.flush()
    }
}

pub fn save_bundle(model: &LanguageModel, path: &Path, compress: bool) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| LidError::io(path, e))?;
    write_bundle(model, std::io::BufWriter::new(file), compress).map_err(|e| LidError::io(path, e))
}

pub fn load_bundle(path: &Path) -> Result<LanguageModel> {
    let bytes = fs::read(path).map_err(|e| LidError::io(path, e))?;
    read_bundle(&bytes)
}

/// Parses bundle bytes, plain or gzip-compressed.
pub fn read_bundle(bytes: &[u8]) -> Result<LanguageModel> {
    if bytes.starts_with(&GZIP_MAGIC) {
        let mut text = Vec::new();
        GzDecoder::new(bytes)
            .read_to_end(&mut text)
            .map_err(|e| corrupt("header", 0, format!("gzip stream: {e}")))?;
        return decode_bundle(&text);
    }
    decode_bundle(bytes)
}

fn corrupt(section: &str, line: usize, message: impl Into<String>) -> LidError {
    LidError::CorruptTable {
        section: section.to_string(),
        line,
        message: message.into(),
    }
}

type Rows<'a> = Vec<(usize, Vec<&'a str>)>;
/// Section name and rows of one `[lang <code>]` section.
type Table<'a> = (String, Rows<'a>);

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let line = self.peek()?;
        self.pos += 1;
        Some((self.pos, line))
    }

    /// Rows up to the next section header.
    fn rows(&mut self) -> Rows<'a> {
        let mut out = Vec::new();
        while let Some(line) = self.peek() {
            if line.starts_with('[') {
                break;
            }
            let (no, line) = self.next().expect("peeked");
            out.push((no, line.split('\t').collect()));
        }
        out
    }

    fn section(&mut self, name: &str) -> Result<Rows<'a>> {
        match self.next() {
            Some((_, line)) if line == format!("[{name}]") => Ok(self.rows()),
            Some((no, line)) => Err(corrupt(
                name,
                no,
                format!("expected [{name}], found `{line}`"),
            )),
            None => Err(corrupt(name, self.pos, "file ends before this section")),
        }
    }
}

fn key_value<'a>(
    section: &str,
    rows: &[(usize, Vec<&'a str>)],
) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut map = BTreeMap::new();
    let mut last: Option<&str> = None;
    for (no, fields) in rows {
        let [k, v] = fields[..] else {
            return Err(corrupt(section, *no, "expected `key<TAB>value`"));
        };
        if last.is_some_and(|l| l >= k) {
            return Err(corrupt(section, *no, "keys must be sorted and unique"));
        }
        last = Some(k);
        map.insert(k, v);
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(section: &str, line: usize, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| corrupt(section, line, format!("bad number `{v}`")))
}

fn symbol(section: &str, line: usize, v: &str) -> Result<String> {
    unescape_symbol(v).ok_or_else(|| corrupt(section, line, format!("bad escape in `{v}`")))
}

fn decode_bundle(bytes: &[u8]) -> Result<LanguageModel> {
    if !bytes.starts_with(MAGIC.as_bytes()) || bytes.get(MAGIC.len()) != Some(&b'\n') {
        return Err(LidError::BadMagic);
    }
    let text =
        std::str::from_utf8(bytes).map_err(|e| corrupt("header", 0, format!("not UTF-8: {e}")))?;
    let mut lines = Lines {
        lines: text.split('\n').collect(),
        pos: 1,
    };
    if lines.lines.last() != Some(&"") {
        return Err(corrupt("end", lines.lines.len(), "missing final newline"));
    }
    lines.lines.pop();

    let header = lines.rows();
    let version = header
        .iter()
        .find(|(_, f)| f.first() == Some(&"format_version"))
        .and_then(|(_, f)| f.get(1).copied())
        .ok_or_else(|| corrupt("header", 2, "missing format_version"))?;
    if version != FORMAT_VERSION.to_string() {
        return Err(LidError::UnsupportedVersion(version.to_string()));
    }
    let header = key_value("header", &header)?;
    if header.len() != 2 {
        return Err(corrupt("header", 2, "expected format_version and method"));
    }
    let method: Method = header
        .get("method")
        .ok_or_else(|| corrupt("header", 3, "missing method"))?
        .parse()
        .map_err(|e: String| corrupt("header", 3, e))?;

    let tok_rows = lines.section("tokenizer")?;
    let tok = key_value("tokenizer", &tok_rows)?;
    let get = |k: &str| {
        tok.get(k)
            .copied()
            .ok_or_else(|| corrupt("tokenizer", 0, format!("missing `{k}`")))
    };
    let case_fold = match get("case_fold")? {
        "0" => false,
        "1" => true,
        v => return Err(corrupt("tokenizer", 0, format!("bad case_fold `{v}`"))),
    };
    let form: NormForm = get("form")?
        .parse()
        .map_err(|e: String| corrupt("tokenizer", 0, e))?;
    let unit: TokenUnit = get("unit")?
        .parse()
        .map_err(|e: String| corrupt("tokenizer", 0, e))?;
    if tok.len() != 3 {
        return Err(corrupt("tokenizer", 0, "unexpected keys"));
    }
    let bpe = if unit == TokenUnit::Bpe {
        Some(decode_bpe(lines.section("bpe")?)?)
    } else {
        None
    };
    let tokenizer = TokenizerSpec {
        unit,
        form,
        case_fold,
        bpe,
    };

    let labels: Vec<String> = lines
        .section("labels")?
        .into_iter()
        .map(|(no, f)| match f[..] {
            [code] => Ok(code.to_string()),
            _ => Err(corrupt("labels", no, "expected one code per line")),
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = labels.iter().find(|l| !is_valid_code(l)) {
        return Err(corrupt(
            "labels",
            0,
            format!("`{bad}` is not a three-letter code"),
        ));
    }
    if labels.is_empty() || !labels.windows(2).all(|w| w[0] < w[1]) {
        return Err(corrupt(
            "labels",
            0,
            "labels must be non-empty, sorted and unique",
        ));
    }

    let param_rows = lines.section("params")?;
    let mut params = BTreeMap::new();
    for (k, v) in key_value("params", &param_rows)? {
        params.insert(k.to_string(), symbol("params", 0, v)?);
    }
    let params = MethodParams::from_pairs(method, &params)
        .map_err(|e| corrupt("params", 0, e.to_string()))?;

    let model_rows = lines.section("model")?;
    let model_kv = key_value("model", &model_rows)?;
    let temperature: f64 = match (model_kv.get("temperature"), model_kv.len()) {
        (Some(t), 1) => num("model", 0, t)?,
        _ => return Err(corrupt("model", 0, "expected only `temperature`")),
    };

    let mut tables = Vec::with_capacity(labels.len());
    for code in &labels {
        let name = format!("lang {code}");
        tables.push((name.clone(), lines.section(&name)?));
    }
    let trailing = lines.section("end")?;
    if let Some((no, _)) = trailing.first() {
        return Err(corrupt("end", *no, "content after [end]"));
    }
    if let Some((no, line)) = lines.next() {
        return Err(corrupt("end", no, format!("trailing content `{line}`")));
    }

    let kind = build_kind(&params, &tables)?;
    LanguageModel::new(tokenizer, labels, temperature, kind)
        .map_err(|e| corrupt("model", 0, e.to_string()))
}

fn decode_bpe(rows: Vec<(usize, Vec<&str>)>) -> Result<BpeModel> {
    let mut target = None;
    let mut base = Vec::new();
    let mut merges = Vec::new();
    for (no, f) in rows {
        match f[..] {
            ["target_vocab_size", v] if target.is_none() => {
                target = Some(num::<usize>("bpe", no, v)?)
            }
            ["base", s] => base.push(symbol("bpe", no, s)?),
            ["merge", l, r] => merges.push((symbol("bpe", no, l)?, symbol("bpe", no, r)?)),
            _ => return Err(corrupt("bpe", no, "unexpected row")),
        }
    }
    let target = target.ok_or_else(|| corrupt("bpe", 0, "missing target_vocab_size"))?;
    BpeModel::from_parts(base, merges, target).map_err(|e| corrupt("bpe", 0, e.to_string()))
}

fn read_counts<G: Ord + Clone>(
    section: &str,
    rows: &[(usize, Vec<&str>)],
    unit: GramUnit,
    orders: (usize, usize),
    gram: impl Fn(&str) -> Option<G>,
) -> Result<(NGramCounts<G>, Option<u64>)> {
    let mut counts = NGramCounts::new(unit, orders.0, orders.1)
        .map_err(|e| corrupt(section, 0, e.to_string()))?;
    let mut totals = BTreeMap::new();
    let mut samples = None;
    let mut last: Option<(usize, G)> = None;
    for (no, f) in rows {
        let no = *no;
        let order_of = |v: &str| -> Result<usize> {
            let n: usize = num(section, no, v)?;
            if !(orders.0..=orders.1).contains(&n) {
                return Err(corrupt(
                    section,
                    no,
                    format!("order {n} outside {}..={}", orders.0, orders.1),
                ));
            }
            Ok(n)
        };
        match f[..] {
            ["samples", v] if samples.is_none() => samples = Some(num(section, no, v)?),
            ["total", n, t] => {
                if totals
                    .insert(order_of(n)?, num::<u64>(section, no, t)?)
                    .is_some()
                {
                    return Err(corrupt(section, no, "repeated total"));
                }
            }
            ["gram", n, g, c] => {
                let n = order_of(n)?;
                let g = gram(g).ok_or_else(|| corrupt(section, no, format!("bad gram `{g}`")))?;
                let c: u64 = num(section, no, c)?;
                if c == 0 {
                    return Err(corrupt(section, no, "zero count"));
                }
                let key = (n, g);
                if last.as_ref().is_some_and(|l| *l >= key) {
                    return Err(corrupt(section, no, "grams must be sorted and unique"));
                }
                counts.add(key.0, key.1.clone(), c);
                last = Some(key);
            }
            _ => return Err(corrupt(section, no, "unexpected row")),
        }
    }
    for n in orders.0..=orders.1 {
        let t = totals
            .get(&n)
            .ok_or_else(|| corrupt(section, 0, format!("missing total for order {n}")))?;
        if *t < counts.total(n) {
            return Err(corrupt(
                section,
                0,
                format!("order-{n} total is below its counts"),
            ));
        }
        counts.set_total(n, *t);
    }
    Ok((counts, samples))
}

fn char_tables(tables: &[Table<'_>], orders: (usize, usize)) -> Result<Vec<CharNGramCounts>> {
    tables
        .iter()
        .map(|(name, rows)| {
            let (counts, samples) =
                read_counts(name, rows, GramUnit::CharNGram, orders, unescape_symbol)?;
            if samples.is_some() {
                return Err(corrupt(name, 0, "unexpected samples row"));
            }
            Ok(counts)
        })
        .collect()
}

fn byte_tables(
    tables: &[Table<'_>],
    orders: (usize, usize),
) -> Result<Vec<(ByteNGramCounts, Option<u64>)>> {
    tables
        .iter()
        .map(|(name, rows)| read_counts(name, rows, GramUnit::ByteNGram, orders, unhex))
        .collect()
}

fn build_kind(params: &MethodParams, tables: &[Table<'_>]) -> Result<ModelKind> {
    let model_err = |e: lidkit_core::Error| corrupt("model", 0, e.to_string());
    Ok(match params {
        MethodParams::RankDistance(p) => ModelKind::RankDistance(
            RankDistanceModel::from_counts(p.clone(), char_tables(tables, (p.n_min, p.n_max))?)
                .map_err(model_err)?,
        ),
        MethodParams::Heli(p) => ModelKind::Heli(
            HeliModel::from_counts(p.clone(), char_tables(tables, (1, p.nmax))?)
                .map_err(model_err)?,
        ),
        MethodParams::Liga(p) => ModelKind::Liga(
            LigaModel::from_counts(
                p.clone(),
                char_tables(tables, lidkit_core::classify::LIGA_ORDERS)?,
            )
            .map_err(model_err)?,
        ),
        MethodParams::NaiveBayes(p) => {
            let mut samples = Vec::new();
            let mut counts = Vec::new();
            for ((name, _), (c, s)) in tables.iter().zip(byte_tables(tables, (p.n_min, p.n_max))?) {
                samples.push(s.ok_or_else(|| corrupt(name, 0, "missing samples row"))?);
                counts.push(c);
            }
            ModelKind::NaiveBayes(
                NaiveBayesModel::from_counts(p.clone(), samples, counts).map_err(model_err)?,
            )
        }
        MethodParams::VarByte(p) => {
            let mut counts = Vec::new();
            for ((name, _), (c, s)) in tables.iter().zip(byte_tables(tables, (p.n_min, p.n_max))?) {
                if s.is_some() {
                    return Err(corrupt(name, 0, "unexpected samples row"));
                }
                counts.push(c);
            }
            ModelKind::VarByte(VarByteModel::from_counts(p.clone(), counts).map_err(model_err)?)
        }
        MethodParams::Markov(p) => {
            let mut init = Vec::new();
            let mut trans = Vec::new();
            for (name, rows) in tables {
                let mut first = BTreeMap::new();
                let mut pairs = BTreeMap::new();
                for (no, f) in rows {
                    let count = |c: &str| -> Result<u64> {
                        let c: u64 = num(name, *no, c)?;
                        if c == 0 {
                            return Err(corrupt(name, *no, "zero count"));
                        }
                        Ok(c)
                    };
                    let fresh = match f[..] {
                        ["init", s, c] => first.insert(symbol(name, *no, s)?, count(c)?).is_none(),
                        ["trans", a, b, c] => pairs
                            .insert((symbol(name, *no, a)?, symbol(name, *no, b)?), count(c)?)
                            .is_none(),
                        _ => return Err(corrupt(name, *no, "unexpected row")),
                    };
                    if !fresh {
                        return Err(corrupt(name, *no, "repeated entry"));
                    }
                }
                init.push(first);
                trans.push(pairs);
            }
            ModelKind::Markov(MarkovModel::from_counts(p.clone(), init, trans).map_err(model_err)?)
        }
    })
}
