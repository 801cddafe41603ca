//! In-memory multi-wordnet: multi-synsets, word identities and the
//! word → synset index.
//!
//! A [`MultiWordnet`] is immutable once built. Synsets are stored in id
//! order and words in `(language, lemma, pos)` order, so every collection
//! handed out by a query is deterministic.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid language code {0:?} (expected 2-3 lowercase ASCII letters)")]
    InvalidLanguage(String),
    #[error("invalid part of speech {0:?} (expected one of n, v, a, r)")]
    InvalidPos(String),
    #[error("invalid lemma {0:?}")]
    InvalidLemma(String),
    #[error("empty synset id")]
    EmptySynsetId,
    #[error("synset {0} has no words")]
    EmptySynset(String),
    #[error("duplicate synset id {0}")]
    DuplicateSynsetId(String),
    #[error("synset {synset} lists {word} more than once")]
    DuplicateWord { synset: String, word: WordKey },
    #[error("synset {synset} has pos {synset_pos} but member {word} has pos {word_pos}")]
    PosMismatch {
        synset: String,
        synset_pos: Pos,
        word: WordKey,
        word_pos: Pos,
    },
    #[error("unknown synset {0}")]
    UnknownSynset(String),
    #[error("word {0} is not in the vocabulary")]
    OutOfVocabulary(WordKey),
    #[error("synset {synset} does not contain {word}")]
    NotAMember { synset: String, word: WordKey },
    #[error("{0} and {1} are in different languages")]
    CrossLanguage(WordKey, WordKey),
    #[error("{0} and {1} are in the same language")]
    SameLanguage(WordKey, WordKey),
}

/// A 2-3 letter lowercase ISO-639 code, stored inline.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageCode([u8; 3]);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self, ModelError> {
        let bytes = code.as_bytes();
        if !(2..=3).contains(&bytes.len()) || !bytes.iter().all(u8::is_ascii_lowercase) {
            return Err(ModelError::InvalidLanguage(code.to_string()));
        }
        let mut buf = [0u8; 3];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(LanguageCode(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = if self.0[2] == 0 { 2 } else { 3 };
        // only ASCII lowercase letters are ever stored
        std::str::from_utf8(&self.0[..len]).expect("ascii language code")
    }
}

impl FromStr for LanguageCode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LanguageCode::new(s)
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LanguageCode({})", self.as_str())
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LanguageCode::new(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    /// Single-letter code used by the file formats (`n`, `v`, `a`, `r`).
    pub fn code(self) -> &'static str {
        match self {
            Pos::Noun => "n",
            Pos::Verb => "v",
            Pos::Adj => "a",
            Pos::Adv => "r",
        }
    }
}

impl FromStr for Pos {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" => Ok(Pos::Noun),
            "v" => Ok(Pos::Verb),
            "a" => Ok(Pos::Adj),
            "r" => Ok(Pos::Adv),
            _ => Err(ModelError::InvalidPos(s.to_string())),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Pos {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Pos {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// NFC-normalizes a lemma and encodes internal whitespace as underscores.
/// Case is preserved.
pub fn normalize_lemma(raw: &str) -> Result<String, ModelError> {
    let nfc: String = raw.nfc().collect();
    let trimmed = nfc.trim();
    if trimmed.is_empty() {
        return Err(ModelError::InvalidLemma(raw.to_string()));
    }
    Ok(trimmed
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect())
}

/// Identity of a lexical item: `(language, lemma, pos)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordKey {
    language: LanguageCode,
    lemma: Arc<str>,
    pos: Pos,
}

impl WordKey {
    pub fn new(language: LanguageCode, lemma: &str, pos: Pos) -> Result<Self, ModelError> {
        let lemma = normalize_lemma(lemma)?;
        Ok(WordKey {
            language,
            lemma: Arc::from(lemma),
            pos,
        })
    }

    pub fn language(&self) -> LanguageCode {
        self.language
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    /// Same lemma and pos, different language.
    pub fn with_language(&self, language: LanguageCode) -> WordKey {
        WordKey {
            language,
            lemma: self.lemma.clone(),
            pos: self.pos,
        }
    }
}

impl fmt::Display for WordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.language, self.lemma, self.pos)
    }
}

impl fmt::Debug for WordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WordKey({self})")
    }
}

impl FromStr for WordKey {
    type Err = ModelError;

    /// Parses `lang:lemma:pos`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(2, ':');
        let lang = parts.next().unwrap_or_default();
        let rest = parts.next().ok_or_else(|| ModelError::InvalidLemma(s.to_string()))?;
        let (lemma, pos) = rest
            .rsplit_once(':')
            .ok_or_else(|| ModelError::InvalidLemma(s.to_string()))?;
        WordKey::new(lang.parse()?, lemma, pos.parse()?)
    }
}

impl Serialize for WordKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("WordKey", 3)?;
        st.serialize_field("lang", &self.language)?;
        st.serialize_field("lemma", &*self.lemma)?;
        st.serialize_field("pos", &self.pos)?;
        st.end()
    }
}

/// One lexicalized concept with its words in any number of languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSynset {
    id: String,
    pos: Pos,
    gloss: Option<String>,
    words: Vec<WordKey>,
}

impl MultiSynset {
    pub fn new(
        id: impl Into<String>,
        pos: Pos,
        gloss: Option<String>,
        mut words: Vec<WordKey>,
    ) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptySynsetId);
        }
        if words.is_empty() {
            return Err(ModelError::EmptySynset(id));
        }
        if let Some(w) = words.iter().find(|w| w.pos != pos) {
            return Err(ModelError::PosMismatch {
                synset: id,
                synset_pos: pos,
                word: w.clone(),
                word_pos: w.pos,
            });
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(ModelError::DuplicateWord {
                synset: id,
                word: pair[0].clone(),
            });
        }
        Ok(MultiSynset { id, pos, gloss, words })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    pub fn gloss(&self) -> Option<&str> {
        self.gloss.as_deref()
    }

    /// Members, sorted by `(language, lemma)`.
    pub fn words(&self) -> &[WordKey] {
        &self.words
    }

    /// Members of one language; empty for a lexical gap.
    pub fn words_in(&self, language: LanguageCode) -> &[WordKey] {
        let start = self.words.partition_point(|w| w.language < language);
        let end = self.words.partition_point(|w| w.language <= language);
        &self.words[start..end]
    }

    pub fn lemmas_in(&self, language: LanguageCode) -> impl Iterator<Item = &str> + '_ {
        self.words_in(language).iter().map(WordKey::lemma)
    }

    pub fn has_language(&self, language: LanguageCode) -> bool {
        !self.words_in(language).is_empty()
    }

    pub fn languages(&self) -> BTreeSet<LanguageCode> {
        self.words.iter().map(|w| w.language).collect()
    }

    pub fn contains(&self, word: &WordKey) -> bool {
        self.words.binary_search(word).is_ok()
    }
}

/// A word paired with one of its synsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseRef {
    word: WordKey,
    synset_id: String,
}

impl SenseRef {
    pub fn word(&self) -> &WordKey {
        &self.word
    }

    pub fn synset_id(&self) -> &str {
        &self.synset_id
    }
}

/// Incremental construction of a [`MultiWordnet`]; used by the streaming
/// parser so that duplicate ids can be reported at the offending record.
#[derive(Default)]
pub struct MultiWordnetBuilder {
    synsets: Vec<MultiSynset>,
    ids: HashSet<String>,
    lemmas: HashSet<Arc<str>>,
}

impl MultiWordnetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut synset: MultiSynset) -> Result<(), ModelError> {
        if !self.ids.insert(synset.id.clone()) {
            return Err(ModelError::DuplicateSynsetId(synset.id));
        }
        // share one allocation per distinct lemma
        for w in &mut synset.words {
            match self.lemmas.get(&w.lemma) {
                Some(shared) => w.lemma = shared.clone(),
                None => {
                    self.lemmas.insert(w.lemma.clone());
                }
            }
        }
        self.synsets.push(synset);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn finish(self) -> MultiWordnet {
        let mut synsets = self.synsets;
        synsets.sort_unstable_by(|a, b| a.id.cmp(&b.id));

        let mut provisional: HashMap<WordKey, u32> = HashMap::new();
        let mut keys: Vec<WordKey> = Vec::new();
        let mut occurrences: Vec<(u32, u32)> = Vec::new();
        for (si, s) in synsets.iter().enumerate() {
            for w in &s.words {
                let id = *provisional.entry(w.clone()).or_insert_with(|| {
                    keys.push(w.clone());
                    (keys.len() - 1) as u32
                });
                occurrences.push((id, si as u32));
            }
        }

        let mut order: Vec<u32> = (0..keys.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
        let mut rank = vec![0u32; keys.len()];
        for (r, &p) in order.iter().enumerate() {
            rank[p as usize] = r as u32;
        }

        let mut offsets = vec![0usize; keys.len() + 1];
        for &(w, _) in &occurrences {
            offsets[rank[w as usize] as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut cursor = offsets.clone();
        let mut postings = vec![0u32; occurrences.len()];
        // occurrences are in ascending synset order, so each posting list
        // comes out sorted by synset id
        for &(w, s) in &occurrences {
            let r = rank[w as usize] as usize;
            postings[cursor[r]] = s;
            cursor[r] += 1;
        }

        let languages = keys.iter().map(|w| w.language).collect();
        for v in provisional.values_mut() {
            *v = rank[*v as usize];
        }
        let words = order.iter().map(|&p| keys[p as usize].clone()).collect();

        MultiWordnet {
            synsets,
            words,
            word_ids: provisional,
            offsets,
            postings,
            languages,
        }
    }
}

/// Structural inconsistency between synset membership and the word index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexIssue {
    /// The synset lists the word but the index does not point back.
    MemberNotIndexed { synset: String, word: WordKey },
    /// The index points to a synset that does not list the word.
    IndexedNotMember { synset: String, word: WordKey },
}

impl fmt::Display for IndexIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexIssue::MemberNotIndexed { synset, word } => {
                write!(f, "{word} is a member of {synset} but not indexed there")
            }
            IndexIssue::IndexedNotMember { synset, word } => {
                write!(f, "{word} is indexed under {synset} but is not a member")
            }
        }
    }
}

/// Validated, indexed collection of multi-synsets.
#[derive(Debug, Clone)]
pub struct MultiWordnet {
    synsets: Vec<MultiSynset>,
    words: Vec<WordKey>,
    word_ids: HashMap<WordKey, u32>,
    offsets: Vec<usize>,
    postings: Vec<u32>,
    languages: BTreeSet<LanguageCode>,
}

impl Default for MultiWordnet {
    fn default() -> Self {
        MultiWordnetBuilder::new().finish()
    }
}

impl PartialEq for MultiWordnet {
    fn eq(&self, other: &Self) -> bool {
        // the index is a function of the synsets
        self.synsets == other.synsets
    }
}

impl MultiWordnet {
    pub fn build<I>(synsets: I) -> Result<MultiWordnet, ModelError>
    where
        I: IntoIterator<Item = MultiSynset>,
    {
        let mut builder = MultiWordnetBuilder::new();
        for s in synsets {
            builder.add(s)?;
        }
        Ok(builder.finish())
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn languages(&self) -> &BTreeSet<LanguageCode> {
        &self.languages
    }

    /// All synsets in id order.
    pub fn synsets(&self) -> &[MultiSynset] {
        &self.synsets
    }

    pub fn synset(&self, id: &str) -> Option<&MultiSynset> {
        self.synset_index(id).map(|i| &self.synsets[i])
    }

    fn synset_index(&self, id: &str) -> Option<usize> {
        self.synsets.binary_search_by(|s| s.id.as_str().cmp(id)).ok()
    }

    /// Every indexed word, sorted by `(language, lemma, pos)`.
    pub fn words(&self) -> &[WordKey] {
        &self.words
    }

    pub fn words_in_language(&self, language: LanguageCode) -> &[WordKey] {
        let start = self.words.partition_point(|w| w.language < language);
        let end = self.words.partition_point(|w| w.language <= language);
        &self.words[start..end]
    }

    pub fn contains_word(&self, word: &WordKey) -> bool {
        self.word_ids.contains_key(word)
    }

    fn postings(&self, word: &WordKey) -> &[u32] {
        match self.word_ids.get(word) {
            Some(&id) => {
                let id = id as usize;
                &self.postings[self.offsets[id]..self.offsets[id + 1]]
            }
            None => &[],
        }
    }

    /// Synsets of a word, in id order; empty when out of vocabulary.
    pub fn senses_of<'a>(&'a self, word: &WordKey) -> impl Iterator<Item = &'a MultiSynset> + 'a {
        self.postings(word)
            .iter()
            .map(move |&i| &self.synsets[i as usize])
    }

    pub fn synsets_of(&self, word: &WordKey) -> Vec<&str> {
        self.senses_of(word).map(MultiSynset::id).collect()
    }

    pub fn sense_count(&self, word: &WordKey) -> usize {
        self.postings(word).len()
    }

    pub fn senses(&self, word: &WordKey) -> Vec<SenseRef> {
        self.senses_of(word)
            .map(|s| SenseRef {
                word: word.clone(),
                synset_id: s.id.clone(),
            })
            .collect()
    }

    pub fn sense(&self, word: &WordKey, synset_id: &str) -> Result<SenseRef, ModelError> {
        let s = self
            .synset(synset_id)
            .ok_or_else(|| ModelError::UnknownSynset(synset_id.to_string()))?;
        if !s.contains(word) {
            return Err(ModelError::NotAMember {
                synset: synset_id.to_string(),
                word: word.clone(),
            });
        }
        Ok(SenseRef {
            word: word.clone(),
            synset_id: synset_id.to_string(),
        })
    }

    fn known_sense_count(&self, word: &WordKey) -> Result<usize, ModelError> {
        match self.sense_count(word) {
            0 => Err(ModelError::OutOfVocabulary(word.clone())),
            n => Ok(n),
        }
    }

    pub fn is_polysemous(&self, word: &WordKey) -> Result<bool, ModelError> {
        Ok(self.known_sense_count(word)? >= 2)
    }

    pub fn is_monosemous(&self, word: &WordKey) -> Result<bool, ModelError> {
        Ok(self.known_sense_count(word)? == 1)
    }

    fn same_language(w1: &WordKey, w2: &WordKey) -> Result<(), ModelError> {
        if w1.language != w2.language {
            return Err(ModelError::CrossLanguage(w1.clone(), w2.clone()));
        }
        Ok(())
    }

    /// Same-language words sharing at least one synset.
    pub fn are_synonyms(&self, w1: &WordKey, w2: &WordKey) -> Result<bool, ModelError> {
        Self::same_language(w1, w2)?;
        let (a, b) = (self.postings(w1), self.postings(w2));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Ok(true),
            }
        }
        Ok(false)
    }

    /// Same-language words sharing all their synsets.
    pub fn are_absolute_synonyms(&self, w1: &WordKey, w2: &WordKey) -> Result<bool, ModelError> {
        Self::same_language(w1, w2)?;
        let a = self.postings(w1);
        Ok(!a.is_empty() && a == self.postings(w2))
    }

    /// Target-language lemmas of a synset; empty means a lexical gap.
    pub fn translations_of_sense(
        &self,
        synset_id: &str,
        target: LanguageCode,
    ) -> Result<BTreeSet<&str>, ModelError> {
        let s = self
            .synset(synset_id)
            .ok_or_else(|| ModelError::UnknownSynset(synset_id.to_string()))?;
        Ok(s.lemmas_in(target).collect())
    }

    pub fn translations_of_word(&self, word: &WordKey, target: LanguageCode) -> BTreeSet<&str> {
        self.senses_of(word)
            .flat_map(|s| s.lemmas_in(target))
            .collect()
    }

    /// Synsets of `e` that also contain `f`.
    pub fn shared_synsets(&self, e: &WordKey, f: &WordKey) -> Result<Vec<&str>, ModelError> {
        if e.language == f.language {
            return Err(ModelError::SameLanguage(e.clone(), f.clone()));
        }
        Ok(self
            .senses_of(e)
            .filter(|s| s.contains(f))
            .map(MultiSynset::id)
            .collect())
    }

    /// Checks that the index is exactly the inverse of synset membership.
    pub fn check_index(&self) -> Vec<IndexIssue> {
        let mut issues = Vec::new();
        for (si, s) in self.synsets.iter().enumerate() {
            for w in &s.words {
                if self.postings(w).binary_search(&(si as u32)).is_err() {
                    issues.push(IndexIssue::MemberNotIndexed {
                        synset: s.id.clone(),
                        word: w.clone(),
                    });
                }
            }
        }
        for w in &self.words {
            for &si in self.postings(w) {
                let s = &self.synsets[si as usize];
                if !s.contains(w) {
                    issues.push(IndexIssue::IndexedNotMember {
                        synset: s.id.clone(),
                        word: w.clone(),
                    });
                }
            }
        }
        issues
    }

    /// Adds `word` to a synset's member list without touching the index.
    /// Produces an inconsistent structure; exists only as a negative control
    /// for the theorem checker.
    #[doc(hidden)]
    pub fn inject_unindexed_member(&mut self, synset_id: &str, word: WordKey) -> bool {
        let Some(i) = self.synset_index(synset_id) else {
            return false;
        };
        let s = &mut self.synsets[i];
        if s.contains(&word) {
            return false;
        }
        s.words.push(word);
        s.words.sort();
        true
    }
}
