use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{build_postings, empty_input_unless, pad_str, Document, Grouped, Postings};
use crate::classify::params::RankParams;
use crate::error::{Error, Result};
use crate::profiles::{
    build_rank_profile, build_rank_profiles_per_order, extract_ngrams, CharGramCounter,
    CharNGramCounts, RankProfile,
};

/// Per-language rank profiles compared by out-of-place distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDistanceModel {
    params: RankParams,
    kept: Vec<CharNGramCounts>,
    profiles: Vec<Vec<RankProfile<String>>>,
    index: Postings<String, u64>,
}

impl RankDistanceModel {
    pub(crate) fn train(params: &RankParams, grouped: &Grouped) -> Result<Self> {
        let mut kept = Vec::with_capacity(grouped.docs.len());
        for docs in &grouped.docs {
            let mut counter =
                CharGramCounter::new(params.n_min, params.n_max, pad_str(&params.pad))?;
            for doc in docs {
                counter.add_stream(&doc.stream);
            }
            let mut counts = counter.finish();
            let lists = profiles_of(params, &counts);
            let in_profile: BTreeSet<&String> = lists.iter().flat_map(|p| p.ordered()).collect();
            let in_profile: BTreeSet<String> = in_profile.into_iter().cloned().collect();
            counts.retain(|_, g, _| in_profile.contains(g));
            for n in params.n_min..=params.n_max {
                let sum = counts.order(n).map_or(0, |m| m.values().sum());
                counts.set_total(n, sum);
            }
            kept.push(counts);
        }
        Self::from_counts(params.clone(), kept)
    }

    /// Rebuilds the model from the profile grams' counts of each language.
    pub fn from_counts(params: RankParams, kept: Vec<CharNGramCounts>) -> Result<Self> {
        let mut profiles = Vec::with_capacity(kept.len());
        for (lang, counts) in kept.iter().enumerate() {
            if counts.n_min != params.n_min || counts.n_max != params.n_max {
                return Err(Error::Invariant(format!(
                    "language {lang}: orders {}..={} do not match the parameters",
                    counts.n_min, counts.n_max
                )));
            }
            if counts.is_empty() {
                return Err(Error::Invariant(format!("language {lang}: empty profile")));
            }
            let lists = profiles_of(&params, counts);
            let ranked: usize = lists.iter().map(RankProfile::len).sum();
            if ranked != counts.len() {
                return Err(Error::Invariant(format!(
                    "language {lang}: {} grams stored but only {ranked} fit the profile",
                    counts.len()
                )));
            }
            profiles.push(lists);
        }
        let index = build_postings(profiles.iter().enumerate().flat_map(|(lang, lists)| {
            lists.iter().flat_map(move |list| {
                list.ordered()
                    .iter()
                    .enumerate()
                    .map(move |(rank, g)| (lang as u32, g.clone(), rank as u64))
            })
        }));
        Ok(RankDistanceModel {
            params,
            kept,
            profiles,
            index,
        })
    }

    pub fn params(&self) -> &RankParams {
        &self.params
    }

    pub fn language_count(&self) -> usize {
        self.kept.len()
    }

    /// Counts of the grams in each language's profile.
    pub fn counts(&self) -> &[CharNGramCounts] {
        &self.kept
    }

    /// One list in mixed mode, one per order otherwise.
    pub fn profiles(&self, lang: usize) -> &[RankProfile<String>] {
        &self.profiles[lang]
    }

    pub fn document_profiles(&self, doc: &Document) -> Result<Vec<RankProfile<String>>> {
        empty_input_unless(!doc.stream.is_empty())?;
        let counts = extract_ngrams(
            &doc.stream,
            self.params.n_min,
            self.params.n_max,
            pad_str(&self.params.pad),
        )?;
        Ok(profiles_of(&self.params, &counts))
    }

    pub fn scores(&self, doc: &Document) -> Result<Vec<f64>> {
        let doc_lists = self.document_profiles(doc)?;
        Ok(self
            .distances(&doc_lists)
            .into_iter()
            .map(|d| d as f64)
            .collect())
    }

    /// Out-of-place distance of a document profile to every language.
    pub fn distances(&self, doc_lists: &[RankProfile<String>]) -> Vec<u64> {
        let langs = self.kept.len();
        let mut matched = alloc::vec![0u64; langs];
        let mut displacement = alloc::vec![0u64; langs];
        let mut total = 0u64;
        for list in doc_lists {
            for (doc_rank, gram) in list.ordered().iter().enumerate() {
                total += 1;
                if let Some(postings) = self.index.get(gram.as_str()) {
                    for &(lang, lang_rank) in postings {
                        matched[lang as usize] += 1;
                        displacement[lang as usize] += lang_rank.abs_diff(doc_rank as u64);
                    }
                }
            }
        }
        let penalty = self.params.penalty();
        (0..langs)
            .map(|l| displacement[l] + (total - matched[l]) * penalty)
            .collect()
    }
}

fn profiles_of(params: &RankParams, counts: &CharNGramCounts) -> Vec<RankProfile<String>> {
    if params.per_order {
        build_rank_profiles_per_order(counts, params.max_rank)
    } else {
        alloc::vec![build_rank_profile(counts, params.max_rank)]
    }
}
