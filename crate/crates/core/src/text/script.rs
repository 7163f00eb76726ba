use alloc::vec::Vec;

use super::NormalizedText;
use crate::error::{Error, Result};
use crate::registry::Script;

/// Unicode block intervals assigned to scripts. Only alphabetic scalars inside an
/// interval count, so digits and punctuation that live in a script's block are
/// ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRanges {
    // Sorted by start, non-overlapping, inclusive bounds.
    ranges: Vec<(u32, u32, Script)>,
}

impl Default for ScriptRanges {
    fn default() -> Self {
        use Script::*;
        ScriptRanges::new(alloc::vec![
            (0x0041, 0x024F, Latin),
            (0x0250, 0x02AF, Latin),
            (0x03E2, 0x03EF, Coptic),
            (0x0600, 0x06FF, Arabic),
            (0x0750, 0x077F, Arabic),
            (0x0870, 0x08FF, Arabic),
            (0x1200, 0x137F, Ethiopic),
            (0x1380, 0x139F, Ethiopic),
            (0x1D00, 0x1DBF, Latin),
            (0x1E00, 0x1EFF, Latin),
            (0x2C60, 0x2C7F, Latin),
            (0x2C80, 0x2CFF, Coptic),
            (0x2D80, 0x2DDF, Ethiopic),
            (0xA500, 0xA63F, Vai),
            (0xA720, 0xA7FF, Latin),
            (0xAB00, 0xAB2F, Ethiopic),
            (0xAB30, 0xAB6F, Latin),
            (0xFB50, 0xFDFF, Arabic),
            (0xFE70, 0xFEFF, Arabic),
            (0xFF21, 0xFF5A, Latin),
            (0x1E7E0, 0x1E7FF, Ethiopic),
        ])
    }
}

impl ScriptRanges {
    /// Builds a table; intervals are sorted and must not overlap.
    pub fn new(mut ranges: Vec<(u32, u32, Script)>) -> Self {
        ranges.sort_by_key(|r| r.0);
        debug_assert!(ranges.windows(2).all(|w| w[0].1 < w[1].0));
        ScriptRanges { ranges }
    }

    /// Script of an alphabetic scalar, if it falls in a known interval.
    pub fn script_of(&self, c: char) -> Option<Script> {
        if !c.is_alphabetic() {
            return None;
        }
        let cp = c as u32;
        let idx = self.ranges.partition_point(|r| r.0 <= cp);
        let (lo, hi, script) = *self.ranges.get(idx.checked_sub(1)?)?;
        (lo <= cp && cp <= hi).then_some(script)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptProfile {
    /// Indexed like [`Script::ALL`].
    pub counts: [u64; 5],
    pub dominant: Script,
    pub coverage: f64,
}

impl ScriptProfile {
    pub fn count(&self, script: Script) -> u64 {
        self.counts[script_index(script)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn script_index(script: Script) -> usize {
    Script::ALL.iter().position(|s| *s == script).unwrap_or(0)
}

/// Counts script-bearing scalars and reports the dominant script. Ties go to
/// the script whose name sorts first.
pub fn detect_script(text: &NormalizedText, ranges: &ScriptRanges) -> Result<ScriptProfile> {
    let mut counts = [0u64; 5];
    for c in text.as_str().chars() {
        if let Some(script) = ranges.script_of(c) {
            counts[script_index(script)] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::NoScriptContent);
    }
    let dominant = Script::ALL
        .iter()
        .copied()
        .max_by(|a, b| {
            counts[script_index(*a)]
                .cmp(&counts[script_index(*b)])
                .then_with(|| b.name().cmp(a.name()))
        })
        .unwrap_or(Script::Latin);
    Ok(ScriptProfile {
        counts,
        dominant,
        coverage: counts[script_index(dominant)] as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{normalize, NormForm};

    fn profile(s: &str) -> Result<ScriptProfile> {
        detect_script(&normalize(s, NormForm::Composed), &ScriptRanges::default())
    }

    #[test]
    fn single_script_texts() {
        let p = profile("ሰላም").unwrap();
        assert_eq!((p.dominant, p.coverage), (Script::Ethiopic, 1.0));
        let p = profile("abc").unwrap();
        assert_eq!((p.dominant, p.coverage), (Script::Latin, 1.0));
        assert_eq!(profile("ꕙꔤ").unwrap().dominant, Script::Vai);
        assert_eq!(profile("ⲛⲟⲩⲧⲉ").unwrap().dominant, Script::Coptic);
        assert_eq!(profile("سلام").unwrap().dominant, Script::Arabic);
    }

    #[test]
    fn mixed_text_coverage() {
        let p = profile("abcሰ").unwrap();
        assert_eq!(p.dominant, Script::Latin);
        assert_eq!(p.coverage, 0.75);
        assert_eq!(p.count(Script::Ethiopic), 1);
    }

    #[test]
    fn ties_go_to_the_first_name() {
        // one Latin, one Ethiopic: "Ethiopic" < "Latin"
        assert_eq!(profile("aሰ").unwrap().dominant, Script::Ethiopic);
    }

    #[test]
    fn digits_and_punctuation_are_not_script_content() {
        assert_eq!(profile("12, 3!"), Err(Error::NoScriptContent));
        // Arabic-Indic digits and the Ethiopic full stop sit inside script blocks
        assert_eq!(profile("٣٤ ።"), Err(Error::NoScriptContent));
        let p = profile("a1٣").unwrap();
        assert_eq!(p.total(), 1);
    }

    #[test]
    fn combining_marks_do_not_count() {
        let p = detect_script(
            &normalize("\u{e4}", NormForm::Decomposed),
            &ScriptRanges::default(),
        )
        .unwrap();
        assert_eq!(p.total(), 1);
    }
}
