//! Per-word evaluation of the translation/sense assumptions for an ordered
//! language pair E → F.
//!
//! Notation used below, for a source word `e`:
//!
//! * `S(e)`: synsets containing `e`
//! * `T(s)`: F-language lemmas of synset `s`; `T(e)` is their union
//! * `C(e, f)`: synsets of `e` whose translation set contains `f`
//!
//! Each flag is computed straight from its own set definition; none is
//! derived from another flag. The equivalences between them are checked
//! separately by [`crate::lab::verify`].

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{LanguageCode, MultiSynset, MultiWordnet, WordKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssumptionError {
    #[error("source and target language are both {0}")]
    SameLanguage(LanguageCode),
    #[error("word {0} is not in the vocabulary")]
    OutOfVocabulary(WordKey),
    #[error("word {word} is not in the source language {expected}")]
    LanguageMismatch { word: WordKey, expected: LanguageCode },
}

/// Ordered language pair; the source is the language being annotated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Direction {
    pub source: LanguageCode,
    pub target: LanguageCode,
}

impl Direction {
    pub fn new(source: LanguageCode, target: LanguageCode) -> Result<Self, AssumptionError> {
        if source == target {
            return Err(AssumptionError::SameLanguage(source));
        }
        Ok(Direction { source, target })
    }

    pub fn reversed(self) -> Direction {
        Direction {
            source: self.target,
            target: self.source,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    Ospt,
    Psa,
    Otps,
    Spa,
    Ssa,
    Gsa,
    Gpa,
    NoLg,
    Ocpw,
}

impl Assumption {
    pub const ALL: [Assumption; 9] = [
        Assumption::Ospt,
        Assumption::Psa,
        Assumption::Otps,
        Assumption::Spa,
        Assumption::Ssa,
        Assumption::Gsa,
        Assumption::Gpa,
        Assumption::NoLg,
        Assumption::Ocpw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Assumption::Ospt => "OSPT",
            Assumption::Psa => "PSA",
            Assumption::Otps => "OTPS",
            Assumption::Spa => "SPA",
            Assumption::Ssa => "SSA",
            Assumption::Gsa => "GSA",
            Assumption::Gpa => "GPA",
            Assumption::NoLg => "NoLG",
            Assumption::Ocpw => "OCPW",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssumptionFlags {
    pub ospt: bool,
    pub psa: bool,
    pub otps: bool,
    pub spa: bool,
    pub ssa: bool,
    pub gsa: bool,
    pub gpa: bool,
    pub nolg: bool,
    pub ocpw: bool,
}

impl AssumptionFlags {
    pub fn get(&self, a: Assumption) -> bool {
        match a {
            Assumption::Ospt => self.ospt,
            Assumption::Psa => self.psa,
            Assumption::Otps => self.otps,
            Assumption::Spa => self.spa,
            Assumption::Ssa => self.ssa,
            Assumption::Gsa => self.gsa,
            Assumption::Gpa => self.gpa,
            Assumption::NoLg => self.nolg,
            Assumption::Ocpw => self.ocpw,
        }
    }
}

impl Serialize for AssumptionFlags {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, bool> = Assumption::ALL
            .iter()
            .map(|&a| (a.name(), self.get(a)))
            .collect();
        map.serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionProfile {
    pub word: WordKey,
    pub direction: Direction,
    pub sense_count: usize,
    pub translation_count: usize,
    pub eligible: bool,
    pub flags: AssumptionFlags,
    /// Target lemmas `f` with `|C(e, f)| >= 2`.
    pub parallel_polysemy_partners: Vec<String>,
}

/// `S(e)` with each sense's translation set, plus the inverse map `f ↦ C(e, f)`.
struct SenseTable<'a> {
    translations: Vec<Vec<&'a str>>,
    concepts: BTreeMap<&'a str, Vec<usize>>,
}

impl<'a> SenseTable<'a> {
    fn new(senses: impl Iterator<Item = &'a MultiSynset>, target: LanguageCode) -> Self {
        let translations: Vec<Vec<&str>> = senses.map(|s| s.lemmas_in(target).collect()).collect();
        let mut concepts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, t) in translations.iter().enumerate() {
            for &f in t {
                concepts.entry(f).or_default().push(i);
            }
        }
        SenseTable {
            translations,
            concepts,
        }
    }

    fn pairs_of_senses(&self) -> impl Iterator<Item = (&[&'a str], &[&'a str])> + '_ {
        let t = &self.translations;
        (0..t.len()).flat_map(move |i| (i + 1..t.len()).map(move |j| (&t[i][..], &t[j][..])))
    }

    fn pairs_of_translations(&self) -> Vec<(&Vec<usize>, &Vec<usize>)> {
        let cs: Vec<&Vec<usize>> = self.concepts.values().collect();
        let mut out = Vec::new();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                out.push((cs[i], cs[j]));
            }
        }
        out
    }

    fn ospt(&self) -> bool {
        self.pairs_of_senses().all(|(a, b)| disjoint(a, b))
    }

    fn psa(&self) -> bool {
        self.concepts.values().all(|c| c.len() == 1)
    }

    fn otps(&self) -> bool {
        self.translations.iter().all(|t| t.len() <= 1)
    }

    fn spa(&self) -> bool {
        self.pairs_of_translations()
            .into_iter()
            .all(|(c1, c2)| disjoint(c1, c2))
    }

    fn ssa(&self) -> bool {
        self.pairs_of_translations()
            .into_iter()
            .all(|(c1, c2)| union_len(c1, c2) == 1)
    }

    fn gsa(&self) -> bool {
        self.translations.iter().filter(|t| !t.is_empty()).count() <= 1
    }

    fn gpa(&self) -> bool {
        let mut assigned = Vec::with_capacity(self.concepts.len());
        for c in self.concepts.values() {
            match c.as_slice() {
                [only] => assigned.push(*only),
                _ => return false,
            }
        }
        assigned.sort_unstable();
        assigned.windows(2).all(|w| w[0] != w[1])
    }

    fn nolg(&self) -> bool {
        self.translations.iter().all(|t| !t.is_empty())
    }
}

fn disjoint<T: Ord>(a: &[T], b: &[T]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn union_len(a: &[usize], b: &[usize]) -> usize {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

pub fn profile(
    m: &MultiWordnet,
    d: Direction,
    e: &WordKey,
) -> Result<AssumptionProfile, AssumptionError> {
    if e.language() != d.source {
        return Err(AssumptionError::LanguageMismatch {
            word: e.clone(),
            expected: d.source,
        });
    }
    let sense_count = m.sense_count(e);
    if sense_count == 0 {
        return Err(AssumptionError::OutOfVocabulary(e.clone()));
    }
    let table = SenseTable::new(m.senses_of(e), d.target);
    let translation_count = table.concepts.len();
    let flags = AssumptionFlags {
        ospt: table.ospt(),
        psa: table.psa(),
        otps: table.otps(),
        spa: table.spa(),
        ssa: table.ssa(),
        gsa: table.gsa(),
        gpa: table.gpa(),
        nolg: table.nolg(),
        ocpw: sense_count == 1,
    };
    let parallel_polysemy_partners = table
        .concepts
        .iter()
        .filter(|(_, c)| c.len() >= 2)
        .map(|(f, _)| f.to_string())
        .collect();
    Ok(AssumptionProfile {
        word: e.clone(),
        direction: d,
        sense_count,
        translation_count,
        eligible: sense_count >= 2 && translation_count > 0,
        flags,
        parallel_polysemy_partners,
    })
}

/// True when `e` and `f` share two or more synsets. `f` takes `e`'s pos.
pub fn parallel_polysemy(m: &MultiWordnet, d: Direction, e: &WordKey, f_lemma: &str) -> bool {
    m.senses_of(e)
        .filter(|s| s.lemmas_in(d.target).any(|f| f == f_lemma))
        .nth(1)
        .is_some()
}

/// Synsets holding two or more words of `language`, in id order.
pub fn owpc_violations(m: &MultiWordnet, language: LanguageCode) -> Vec<&str> {
    m.synsets()
        .iter()
        .filter(|s| s.words_in(language).len() >= 2)
        .map(MultiSynset::id)
        .collect()
}

pub fn owpc(m: &MultiWordnet, language: LanguageCode) -> bool {
    m.synsets().iter().all(|s| s.words_in(language).len() <= 1)
}

/// Every synset with a `covered`-language word also has a `by`-language word.
pub fn gap_covered(m: &MultiWordnet, covered: LanguageCode, by: LanguageCode) -> bool {
    m.synsets()
        .iter()
        .filter(|s| s.has_language(covered))
        .all(|s| s.has_language(by))
}
