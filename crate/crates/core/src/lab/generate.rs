//! Seeded random multi-wordnets.
//!
//! Algorithm, for synset `i` in `0..synset_count` (all draws from one
//! [`SplitMix64`] seeded with `seed`):
//!
//! 1. pos = `parts_of_speech[below(len)]`.
//! 2. For each language in the given order: with probability
//!    `zero_probability` the language gets no words (a lexical gap);
//!    otherwise the word count is `min_words + below(max_words - min_words + 1)`.
//!    Each word slot draws a lemma from the language's pool: if some
//!    already-used lemma is available and `chance(reuse_bias)`, pick
//!    `below(used)` among used lemmas (up to 4 attempts, skipping lemmas
//!    already in this synset); otherwise take a fresh lemma with
//!    `below(unused)` from the unused ones. When both are exhausted the
//!    slot stays empty.
//! 3. If the synset ended up empty, one language is picked with
//!    `below(k)` among the `k` languages that can hold words, and one lemma
//!    is drawn for it as above.
//!
//! Lemmas are `<lang><index>`, synset ids `syn<8-digit i>`.

use thiserror::Error;

use super::rng::SplitMix64;
use crate::assumptions::Direction;
use crate::ingest::AlignedToken;
use crate::model::{LanguageCode, MultiSynset, MultiWordnet, Pos, WordKey};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least two languages")]
    TooFewLanguages,
    #[error("language {0} listed twice")]
    DuplicateLanguage(LanguageCode),
    #[error("language {0}: {1}")]
    BadLanguageParams(LanguageCode, &'static str),
    #[error("reuse_bias must be in [0, 1]")]
    BadReuseBias,
    #[error("no parts of speech given")]
    NoPartsOfSpeech,
    #[error("no language can hold words (zero_probability = 1 or max_words = 0 everywhere)")]
    Infeasible,
    #[error("n_cases must be at least 1")]
    NoCases,
    #[error("synset range {0}..={1} is empty")]
    BadSynsetRange(usize, usize),
    #[error("template: {0}")]
    Template(String),
    #[error("cannot sample: {0}")]
    Sampling(&'static str),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageParams {
    pub code: LanguageCode,
    pub pool_size: usize,
    pub min_words: usize,
    pub max_words: usize,
    pub zero_probability: f64,
}

impl LanguageParams {
    fn can_hold_words(&self) -> bool {
        self.zero_probability < 1.0 && self.max_words > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub synset_count: usize,
    pub languages: Vec<LanguageParams>,
    pub reuse_bias: f64,
    pub parts_of_speech: Vec<Pos>,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        validate_shape(&self.languages, self.reuse_bias, &self.parts_of_speech)
    }
}

pub(crate) fn validate_shape(
    languages: &[LanguageParams],
    reuse_bias: f64,
    parts_of_speech: &[Pos],
) -> Result<(), GenError> {
    if languages.len() < 2 {
        return Err(GenError::TooFewLanguages);
    }
    for (i, l) in languages.iter().enumerate() {
        if languages[..i].iter().any(|o| o.code == l.code) {
            return Err(GenError::DuplicateLanguage(l.code));
        }
        if l.pool_size == 0 {
            return Err(GenError::BadLanguageParams(l.code, "pool_size must be >= 1"));
        }
        if l.max_words < l.min_words {
            return Err(GenError::BadLanguageParams(l.code, "max_words < min_words"));
        }
        if !(0.0..=1.0).contains(&l.zero_probability) {
            return Err(GenError::BadLanguageParams(l.code, "zero_probability outside [0, 1]"));
        }
    }
    if !(0.0..=1.0).contains(&reuse_bias) {
        return Err(GenError::BadReuseBias);
    }
    if parts_of_speech.is_empty() {
        return Err(GenError::NoPartsOfSpeech);
    }
    if !languages.iter().any(LanguageParams::can_hold_words) {
        return Err(GenError::Infeasible);
    }
    Ok(())
}

/// Lemma pool of one language: `order[..used]` are used lemma indices,
/// `order[used..]` the unused ones.
struct Pool {
    order: Vec<u32>,
    used: usize,
}

impl Pool {
    fn new(size: usize) -> Self {
        Pool {
            order: (0..size as u32).collect(),
            used: 0,
        }
    }

    fn draw(&mut self, rng: &mut SplitMix64, reuse_bias: f64, taken: &[u32]) -> Option<u32> {
        let unused = self.order.len() - self.used;
        let reusable = self.used > taken.len();
        if reusable && rng.chance(reuse_bias) {
            for _ in 0..4 {
                let cand = self.order[rng.below(self.used as u64) as usize];
                if !taken.contains(&cand) {
                    return Some(cand);
                }
            }
        }
        if unused > 0 {
            let j = self.used + rng.below(unused as u64) as usize;
            self.order.swap(self.used, j);
            self.used += 1;
            return Some(self.order[self.used - 1]);
        }
        // pool exhausted: scan used lemmas from a random start
        if reusable {
            let start = rng.below(self.used as u64) as usize;
            return (0..self.used)
                .map(|k| self.order[(start + k) % self.used])
                .find(|c| !taken.contains(c));
        }
        None
    }
}

pub fn generate(params: &GenParams) -> Result<MultiWordnet, GenError> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);
    let mut pools: Vec<Pool> = params
        .languages
        .iter()
        .map(|l| Pool::new(l.pool_size))
        .collect();
    let feasible: Vec<usize> = params
        .languages
        .iter()
        .enumerate()
        .filter(|(_, l)| l.can_hold_words())
        .map(|(i, _)| i)
        .collect();
    let lemma = |lang: &LanguageParams, idx: u32, pos: Pos| {
        WordKey::new(lang.code, &format!("{}{}", lang.code, idx), pos).expect("generated lemma")
    };

    let mut synsets = Vec::with_capacity(params.synset_count);
    let mut taken: Vec<Vec<u32>> = vec![Vec::new(); params.languages.len()];
    for i in 0..params.synset_count {
        let pos = params.parts_of_speech[rng.below(params.parts_of_speech.len() as u64) as usize];
        for t in &mut taken {
            t.clear();
        }
        for (li, lang) in params.languages.iter().enumerate() {
            if rng.chance(lang.zero_probability) {
                continue;
            }
            let k = lang.min_words + rng.below((lang.max_words - lang.min_words + 1) as u64) as usize;
            for _ in 0..k {
                if let Some(idx) = pools[li].draw(&mut rng, params.reuse_bias, &taken[li]) {
                    taken[li].push(idx);
                }
            }
        }
        if taken.iter().all(Vec::is_empty) {
            let li = feasible[rng.below(feasible.len() as u64) as usize];
            let idx = pools[li]
                .draw(&mut rng, params.reuse_bias, &[])
                .expect("pool_size >= 1");
            taken[li].push(idx);
        }
        let words = params
            .languages
            .iter()
            .zip(&taken)
            .flat_map(|(lang, idxs)| idxs.iter().map(move |&idx| lemma(lang, idx, pos)))
            .collect();
        let synset = MultiSynset::new(format!("syn{i:08}"), pos, None, words)
            .expect("generator respects synset invariants");
        synsets.push(synset);
    }
    Ok(MultiWordnet::build(synsets).expect("generated ids are unique"))
}

/// A gold-tagged bitext consistent with `m`: each token first draws a gold
/// synset among those holding both a source and a target word, then a
/// source word and an aligned target lemma from that synset.
pub fn synthetic_bitext(
    m: &MultiWordnet,
    d: Direction,
    n_tokens: usize,
    seed: u64,
) -> Result<Vec<AlignedToken>, GenError> {
    let candidates: Vec<_> = m
        .synsets()
        .iter()
        .filter(|s| s.has_language(d.source) && s.has_language(d.target))
        .collect();
    if candidates.is_empty() && n_tokens > 0 {
        return Err(GenError::Sampling("no synset holds both languages"));
    }
    let mut rng = SplitMix64::new(seed);
    let tokens = (0..n_tokens)
        .map(|i| {
            let s = candidates[rng.below(candidates.len() as u64) as usize];
            let src = s.words_in(d.source);
            let tgt = s.words_in(d.target);
            let source = src[rng.below(src.len() as u64) as usize].clone();
            let target = &tgt[rng.below(tgt.len() as u64) as usize];
            AlignedToken {
                sentence_id: format!("s{:06}", i / 20),
                token_id: (i % 20) as u64,
                source,
                target_lemma: target.lemma().to_string(),
                target_language: None,
                gold_synset_id: Some(s.id().to_string()),
            }
        })
        .collect();
    Ok(tokens)
}
