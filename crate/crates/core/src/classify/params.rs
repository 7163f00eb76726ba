use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{check_pad, default_pad, ScoreDirection};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    RankDistance,
    Heli,
    Liga,
    NaiveBayes,
    Markov,
    VarByte,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::RankDistance,
        Method::Heli,
        Method::Liga,
        Method::NaiveBayes,
        Method::Markov,
        Method::VarByte,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::RankDistance => "rank",
            Method::Heli => "heli",
            Method::Liga => "liga",
            Method::NaiveBayes => "nb",
            Method::Markov => "markov",
            Method::VarByte => "varbyte",
        }
    }

    pub fn direction(self) -> ScoreDirection {
        match self {
            Method::RankDistance | Method::Heli => ScoreDirection::LowerIsBetter,
            _ => ScoreDirection::HigherIsBetter,
        }
    }

    pub fn default_params(self) -> MethodParams {
        match self {
            Method::RankDistance => MethodParams::RankDistance(RankParams::default()),
            Method::Heli => MethodParams::Heli(HeliParams::default()),
            Method::Liga => MethodParams::Liga(LigaParams::default()),
            Method::NaiveBayes => MethodParams::NaiveBayes(NaiveBayesParams::default()),
            Method::Markov => MethodParams::Markov(MarkovParams::default()),
            Method::VarByte => MethodParams::VarByte(VarByteParams::default()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Out-of-place rank distance over n-gram profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankParams {
    pub n_min: usize,
    pub n_max: usize,
    pub max_rank: usize,
    /// Added for each document gram missing from a language profile.
    /// `None` means `max_rank`.
    pub missing_penalty: Option<u64>,
    /// Rank each order separately instead of in one mixed list.
    pub per_order: bool,
    pub pad: Option<String>,
}

impl Default for RankParams {
    fn default() -> Self {
        RankParams {
            n_min: 1,
            n_max: 5,
            max_rank: 400,
            missing_penalty: None,
            per_order: false,
            pad: default_pad(),
        }
    }
}

impl RankParams {
    pub fn penalty(&self) -> u64 {
        self.missing_penalty.unwrap_or(self.max_rank as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeliParams {
    pub nmax: usize,
    pub penalty: f64,
    /// Most frequent grams kept per order and language.
    pub top_f: usize,
    /// Average per-segment means instead of one mean over all positions.
    pub word_average: bool,
    pub pad: Option<String>,
}

impl Default for HeliParams {
    fn default() -> Self {
        HeliParams {
            nmax: 6,
            penalty: 7.0,
            top_f: 10_000,
            word_average: false,
            pad: default_pad(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LigaParams {
    pub pad: Option<String>,
}

impl Default for LigaParams {
    fn default() -> Self {
        LigaParams { pad: default_pad() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesParams {
    pub n_min: usize,
    pub n_max: usize,
    pub alpha: f64,
    pub uniform_prior: bool,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams {
            n_min: 1,
            n_max: 4,
            alpha: 1.0,
            uniform_prior: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovParams {
    pub alpha: f64,
}

impl Default for MarkovParams {
    fn default() -> Self {
        MarkovParams { alpha: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarByteParams {
    pub n_min: usize,
    pub n_max: usize,
    /// Grams kept per language.
    pub k: usize,
}

impl Default for VarByteParams {
    fn default() -> Self {
        VarByteParams {
            n_min: 3,
            n_max: 12,
            k: 3000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodParams {
    RankDistance(RankParams),
    Heli(HeliParams),
    Liga(LigaParams),
    NaiveBayes(NaiveBayesParams),
    Markov(MarkovParams),
    VarByte(VarByteParams),
}

fn bad(msg: String) -> Error {
    Error::BadParams(msg)
}

fn check_range(n_min: usize, n_max: usize) -> Result<()> {
    if n_min == 0 || n_max < n_min {
        return Err(bad(format!("n-gram orders {n_min}..={n_max} are invalid")));
    }
    Ok(())
}

fn check_alpha(alpha: f64, strictly_positive: bool) -> Result<()> {
    let ok = alpha.is_finite()
        && if strictly_positive {
            alpha > 0.0
        } else {
            alpha >= 0.0
        };
    if ok {
        Ok(())
    } else {
        Err(bad(format!("smoothing alpha {alpha} is out of range")))
    }
}

fn opt_str(v: &Option<String>) -> String {
    v.clone().unwrap_or_else(|| "none".to_string())
}

fn flag(b: bool) -> String {
    (if b { "1" } else { "0" }).to_string()
}

impl MethodParams {
    pub fn method(&self) -> Method {
        match self {
            MethodParams::RankDistance(_) => Method::RankDistance,
            MethodParams::Heli(_) => Method::Heli,
            MethodParams::Liga(_) => Method::Liga,
            MethodParams::NaiveBayes(_) => Method::NaiveBayes,
            MethodParams::Markov(_) => Method::Markov,
            MethodParams::VarByte(_) => Method::VarByte,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MethodParams::RankDistance(p) => {
                check_range(p.n_min, p.n_max)?;
                check_pad(&p.pad)?;
                if p.max_rank == 0 {
                    return Err(bad("max_rank must be at least 1".into()));
                }
            }
            MethodParams::Heli(p) => {
                check_pad(&p.pad)?;
                if p.nmax == 0 || p.top_f == 0 {
                    return Err(bad("nmax and top_f must be at least 1".into()));
                }
                if !(p.penalty > 0.0 && p.penalty.is_finite()) {
                    return Err(bad(format!("penalty {} must be > 0", p.penalty)));
                }
            }
            MethodParams::Liga(p) => check_pad(&p.pad)?,
            MethodParams::NaiveBayes(p) => {
                check_range(p.n_min, p.n_max)?;
                check_alpha(p.alpha, true)?;
            }
            MethodParams::Markov(p) => check_alpha(p.alpha, true)?,
            MethodParams::VarByte(p) => {
                check_range(p.n_min, p.n_max)?;
                if p.k == 0 {
                    return Err(bad("k must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Parameters as sorted `key, value` text pairs. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs: Vec<(&'static str, String)> = match self {
            MethodParams::RankDistance(p) => alloc::vec![
                ("max_rank", p.max_rank.to_string()),
                (
                    "missing_penalty",
                    p.missing_penalty
                        .map_or_else(|| "none".to_string(), |v| v.to_string())
                ),
                ("n_max", p.n_max.to_string()),
                ("n_min", p.n_min.to_string()),
                ("pad", opt_str(&p.pad)),
                ("per_order", flag(p.per_order)),
            ],
            MethodParams::Heli(p) => alloc::vec![
                ("nmax", p.nmax.to_string()),
                ("pad", opt_str(&p.pad)),
                ("penalty", format!("{:?}", p.penalty)),
                ("top_f", p.top_f.to_string()),
                ("word_average", flag(p.word_average)),
            ],
            MethodParams::Liga(p) => alloc::vec![("pad", opt_str(&p.pad))],
            MethodParams::NaiveBayes(p) => alloc::vec![
                ("alpha", format!("{:?}", p.alpha)),
                ("n_max", p.n_max.to_string()),
                ("n_min", p.n_min.to_string()),
                ("uniform_prior", flag(p.uniform_prior)),
            ],
            MethodParams::Markov(p) => alloc::vec![("alpha", format!("{:?}", p.alpha))],
            MethodParams::VarByte(p) => alloc::vec![
                ("k", p.k.to_string()),
                ("n_max", p.n_max.to_string()),
                ("n_min", p.n_min.to_string()),
            ],
        };
        pairs.sort_by(|a, b| a.0.cmp(b.0));
        pairs
    }

    /// Inverse of [`MethodParams::to_pairs`]; every key must be present.
    pub fn from_pairs(method: Method, pairs: &BTreeMap<String, String>) -> Result<MethodParams> {
        let get = |key: &str| -> Result<&str> {
            pairs
                .get(key)
                .map(String::as_str)
                .ok_or_else(|| bad(format!("missing parameter `{key}`")))
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::BadParams(format!("parameter `{key}` has bad value `{v}`")))
        }
        let usize_of = |key: &str| -> Result<usize> { num(key, get(key)?) };
        let f64_of = |key: &str| -> Result<f64> { num(key, get(key)?) };
        let bool_of = |key: &str| -> Result<bool> {
            match get(key)? {
                "0" => Ok(false),
                "1" => Ok(true),
                v => Err(bad(format!("parameter `{key}` has bad value `{v}`"))),
            }
        };
        let pad_of = || -> Result<Option<String>> {
            Ok(match get("pad")? {
                "none" => None,
                p => Some(p.to_owned()),
            })
        };
        let params = match method {
            Method::RankDistance => MethodParams::RankDistance(RankParams {
                n_min: usize_of("n_min")?,
                n_max: usize_of("n_max")?,
                max_rank: usize_of("max_rank")?,
                missing_penalty: match get("missing_penalty")? {
                    "none" => None,
                    v => Some(num("missing_penalty", v)?),
                },
                per_order: bool_of("per_order")?,
                pad: pad_of()?,
            }),
            Method::Heli => MethodParams::Heli(HeliParams {
                nmax: usize_of("nmax")?,
                penalty: f64_of("penalty")?,
                top_f: usize_of("top_f")?,
                word_average: bool_of("word_average")?,
                pad: pad_of()?,
            }),
            Method::Liga => MethodParams::Liga(LigaParams { pad: pad_of()? }),
            Method::NaiveBayes => MethodParams::NaiveBayes(NaiveBayesParams {
                n_min: usize_of("n_min")?,
                n_max: usize_of("n_max")?,
                alpha: f64_of("alpha")?,
                uniform_prior: bool_of("uniform_prior")?,
            }),
            Method::Markov => MethodParams::Markov(MarkovParams {
                alpha: f64_of("alpha")?,
            }),
            Method::VarByte => MethodParams::VarByte(VarByteParams {
                n_min: usize_of("n_min")?,
                n_max: usize_of("n_max")?,
                k: usize_of("k")?,
            }),
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_round_trip_for_every_method() {
        for method in Method::ALL {
            let params = method.default_params();
            let pairs: BTreeMap<String, String> = params
                .to_pairs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            let back = MethodParams::from_pairs(method, &pairs).unwrap();
            assert_eq!(params, back);
        }
    }

    #[test]
    fn odd_floats_survive_text() {
        let params = MethodParams::Heli(HeliParams {
            penalty: 0.1 + 0.2,
            ..HeliParams::default()
        });
        let pairs: BTreeMap<String, String> = params
            .to_pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(
            MethodParams::from_pairs(Method::Heli, &pairs).unwrap(),
            params
        );
    }

    #[test]
    fn validation() {
        let bad_nb = MethodParams::NaiveBayes(NaiveBayesParams {
            alpha: 0.0,
            ..Default::default()
        });
        assert!(bad_nb.validate().is_err());
        let bad_pad = MethodParams::Liga(LigaParams {
            pad: Some("__".into()),
        });
        assert!(bad_pad.validate().is_err());
        let bad_heli = MethodParams::Heli(HeliParams {
            penalty: -1.0,
            ..Default::default()
        });
        assert!(bad_heli.validate().is_err());
        assert!("svm".parse::<Method>().is_err());
        assert_eq!("varbyte".parse::<Method>().unwrap(), Method::VarByte);
    }
}
