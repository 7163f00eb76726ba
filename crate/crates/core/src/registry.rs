//! The closed set of identifiable languages.
//!
//! A registry is loaded from tab-separated text. Language rows have five fields
//! (`code name family scripts diacritics`), group rows have two
//! (`group_name code,code,...`). Lines starting with `#` are comments.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

const DEFAULT_REGISTRY: &str = include_str!("../data/languages.tsv");

/// Languages written in a script other than Latin.
pub const NONLATIN_GROUP: [&str; 11] = [
    "amh", "bst", "mdy", "sgw", "tir", "xan", "fub", "fuv", "rif", "vai", "cop",
];
pub const CREOLE_GROUP: [&str; 9] = [
    "kri", "pcm", "wes", "crs", "mfe", "ktu", "sag", "kea", "pov",
];
pub const SOUTHAFRICA_GROUP: [&str; 10] = [
    "afr", "nbl", "nso", "sot", "ssw", "tsn", "tso", "ven", "xho", "zul",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Script {
    Latin,
    Ethiopic,
    Arabic,
    Vai,
    Coptic,
}

impl Script {
    pub const ALL: [Script; 5] = [
        Script::Latin,
        Script::Ethiopic,
        Script::Arabic,
        Script::Vai,
        Script::Coptic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Script::Latin => "Latin",
            Script::Ethiopic => "Ethiopic",
            Script::Arabic => "Arabic",
            Script::Vai => "Vai",
            Script::Coptic => "Coptic",
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Script {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Script::ALL
            .iter()
            .copied()
            .find(|sc| sc.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown script `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    AfroAsiatic,
    Austronesian,
    Creole,
    IndoEuropean,
    KhoeKwadi,
    NigerCongo,
    NiloSaharan,
    Other,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::AfroAsiatic,
        Family::Austronesian,
        Family::Creole,
        Family::IndoEuropean,
        Family::KhoeKwadi,
        Family::NigerCongo,
        Family::NiloSaharan,
        Family::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AfroAsiatic => "AfroAsiatic",
            Family::Austronesian => "Austronesian",
            Family::Creole => "Creole",
            Family::IndoEuropean => "IndoEuropean",
            Family::KhoeKwadi => "KhoeKwadi",
            Family::NigerCongo => "NigerCongo",
            Family::NiloSaharan => "NiloSaharan",
            Family::Other => "Other",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    /// Accepts the enum spelling as well as hyphenated forms such as `Niger-Congo`.
    fn from_str(s: &str) -> core::result::Result<Self, String> {
        let squashed: String = s.chars().filter(|c| *c != '-' && *c != ' ').collect();
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(&squashed))
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageTag {
    pub code: String,
    pub name: String,
    pub family: Family,
    /// Sorted, deduplicated, never empty.
    pub scripts: Vec<Script>,
    pub uses_diacritics: bool,
}

/// Returns true when `code` is exactly three lowercase ASCII letters.
pub fn is_valid_code(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_lowercase())
}

fn fold_code(raw: &str) -> Result<String> {
    let raw = raw.trim();
    if raw.chars().count() != 3 || !raw.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(Error::MalformedTag(raw.to_owned()));
    }
    Ok(raw.to_ascii_lowercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Registry {
    entries: BTreeMap<String, LanguageTag>,
    groups: BTreeMap<String, Vec<String>>,
}

impl Registry {
    /// The registry shipped with the crate, with the built-in groups.
    pub fn builtin() -> Registry {
        Registry::parse(DEFAULT_REGISTRY).expect("bundled registry is well formed")
    }

    /// Parses registry text. Built-in groups are added unless the text defines
    /// a group with the same name.
    pub fn parse(text: &str) -> Result<Registry> {
        let mut registry = Registry::default();
        let mut group_rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.len() {
                5 => registry.insert_row(&fields, line_no)?,
                2 => group_rows.push((line_no, fields[0], fields[1])),
                n => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected 5 (language) or 2 (group) fields, found {n}"),
                    })
                }
            }
        }
        for (line_no, name, codes) in group_rows {
            registry.insert_group(name, codes, line_no)?;
        }
        registry.inject_builtin_groups();
        Ok(registry)
    }

    /// Adds groups from a group file (`group_name<TAB>code,code,...` rows).
    /// Every member must be a registered language.
    pub fn add_groups(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("group rows have 2 fields, found {}", fields.len()),
                });
            }
            self.insert_group(fields[0], fields[1], line_no)?;
        }
        Ok(())
    }

    fn insert_row(&mut self, fields: &[&str], line: usize) -> Result<()> {
        let parse_err = |message: String| Error::Parse { line, message };
        let code = fields[0].trim();
        if !is_valid_code(code) {
            return Err(parse_err(format!(
                "language code `{code}` is not [a-z]{{3}}"
            )));
        }
        let name = fields[1].trim();
        if name.is_empty() {
            return Err(parse_err("empty language name".to_string()));
        }
        let family: Family = fields[2].parse().map_err(parse_err)?;
        let mut scripts = fields[3]
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<Script>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(parse_err)?;
        scripts.sort();
        scripts.dedup();
        if scripts.is_empty() {
            return Err(parse_err(format!("language `{code}` lists no script")));
        }
        let uses_diacritics = match fields[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(format!(
                    "diacritics flag must be 0 or 1, got `{other}`"
                )))
            }
        };
        if self.entries.contains_key(code) {
            return Err(Error::DuplicateCode {
                code: code.to_owned(),
                line,
            });
        }
        self.entries.insert(
            code.to_owned(),
            LanguageTag {
                code: code.to_owned(),
                name: name.to_owned(),
                family,
                scripts,
                uses_diacritics,
            },
        );
        Ok(())
    }

    fn insert_group(&mut self, name: &str, codes: &str, line: usize) -> Result<()> {
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty group name".to_string(),
            });
        }
        let mut members = Vec::new();
        for raw in codes.split(',').filter(|c| !c.trim().is_empty()) {
            let code = fold_code(raw)?;
            if !self.entries.contains_key(&code) {
                return Err(Error::Parse {
                    line,
                    message: format!("group `{name}` references unregistered language `{code}`"),
                });
            }
            if !members.contains(&code) {
                members.push(code);
            }
        }
        self.groups.insert(name.to_owned(), members);
        Ok(())
    }

    // Built-in groups keep all of their members even when the registry does not
    // list them; grouped evaluation skips members a model does not know.
    fn inject_builtin_groups(&mut self) {
        let builtins: [(&str, &[&str]); 3] = [
            ("nonlatin", &NONLATIN_GROUP),
            ("creole", &CREOLE_GROUP),
            ("southafrica", &SOUTHAFRICA_GROUP),
        ];
        for (name, codes) in builtins {
            self.groups
                .entry(name.to_owned())
                .or_insert_with(|| codes.iter().map(|c| (*c).to_owned()).collect());
        }
    }

    /// Looks up a tag after case-folding it.
    pub fn parse_tag(&self, raw: &str) -> Result<&LanguageTag> {
        let code = fold_code(raw)?;
        self.entries.get(&code).ok_or(Error::UnknownLanguage(code))
    }

    pub fn get(&self, code: &str) -> Option<&LanguageTag> {
        self.entries.get(code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.entries.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in code order.
    pub fn entries(&self) -> impl Iterator<Item = &LanguageTag> {
        self.entries.values()
    }

    pub fn group(&self, name: &str) -> Option<&[String]> {
        self.groups.get(name).map(Vec::as_slice)
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yoruba_from_builtin() {
        let reg = Registry::builtin();
        let tag = reg.parse_tag("yor").unwrap();
        assert_eq!(tag.name, "Yoruba");
        assert_eq!(tag.family, Family::NigerCongo);
        assert_eq!(reg.parse_tag("YOR").unwrap(), tag);
    }

    #[test]
    fn malformed_and_unknown_tags() {
        let reg = Registry::builtin();
        assert!(matches!(reg.parse_tag("zz"), Err(Error::MalformedTag(_))));
        assert!(matches!(reg.parse_tag("y0r"), Err(Error::MalformedTag(_))));
        assert_eq!(
            reg.parse_tag("qqq"),
            Err(Error::UnknownLanguage("qqq".into()))
        );
    }

    #[test]
    fn builtin_covers_all_scripts_and_groups() {
        let reg = Registry::builtin();
        assert!(reg.len() >= 20);
        for script in Script::ALL {
            assert!(
                reg.entries().any(|t| t.scripts.contains(&script)),
                "{script}"
            );
        }
        for (_, members) in reg.groups() {
            assert!(members.iter().all(|c| reg.contains(c)));
        }
    }

    #[test]
    fn two_row_file() {
        let text = "yor\tYoruba\tNigerCongo\tLatin\t1\namh\tAmharic\tAfroAsiatic\tEthiopic\t0\n";
        let reg = Registry::parse(text).unwrap();
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.group("creole").unwrap().len(), 9);
    }

    #[test]
    fn duplicate_code_is_rejected() {
        let text =
            "# header\nyor\tYoruba\tNigerCongo\tLatin\t1\nyor\tYoruba\tNigerCongo\tLatin\t1\n";
        assert_eq!(
            Registry::parse(text),
            Err(Error::DuplicateCode {
                code: "yor".into(),
                line: 3
            })
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "yor\tYoruba\tNigerCongo\tLatin\t1\namh\tAmharic\tAfroAsiatic\tCyrillic\t0\n";
        assert!(matches!(
            Registry::parse(text),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = "yor\tYoruba\tNigerCongo\n";
        assert!(matches!(
            Registry::parse(text),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn user_groups_override_and_validate() {
        let text =
            "yor\tYoruba\tNigerCongo\tLatin\t1\nhau\tHausa\tAfroAsiatic\tLatin\t0\ncreole\tyor\n";
        let reg = Registry::parse(text).unwrap();
        assert_eq!(reg.group("creole").unwrap(), &["yor".to_string()]);
        let bad = "yor\tYoruba\tNigerCongo\tLatin\t1\nwest\tyor,ibo\n";
        assert!(matches!(
            Registry::parse(bad),
            Err(Error::Parse { line: 2, .. })
        ));

        let mut reg = Registry::parse(
            "yor\tYoruba\tNigerCongo\tLatin\t1\nhau\tHausa\tAfroAsiatic\tLatin\t0\n",
        )
        .unwrap();
        reg.add_groups("west\tYOR,hau\n").unwrap();
        assert_eq!(reg.group("west").unwrap().len(), 2);
    }

    #[test]
    fn builtin_group_sizes_and_disjointness() {
        let reg = Registry::builtin();
        assert_eq!(reg.group("nonlatin").unwrap().len(), 11);
        assert_eq!(reg.group("creole").unwrap().len(), 9);
        assert_eq!(reg.group("southafrica").unwrap().len(), 10);
        let creole = reg.group("creole").unwrap();
        assert!(reg
            .group("southafrica")
            .unwrap()
            .iter()
            .all(|c| !creole.contains(c)));
    }

    #[test]
    fn family_spellings() {
        assert_eq!("Niger-Congo".parse::<Family>().unwrap(), Family::NigerCongo);
        assert_eq!("khoe kwadi".parse::<Family>().unwrap(), Family::KhoeKwadi);
        assert!("Bantu".parse::<Family>().is_err());
    }
}
