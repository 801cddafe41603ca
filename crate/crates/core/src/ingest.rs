//! Readers and writers for the canonical file formats.
//!
//! * multi-wordnet: JSON Lines, one synset per line
//!   `{"id":..,"pos":"n|v|a|r","gloss":..?,"words":[{"lang":..,"lemma":..},..]}`
//! * bitext: JSON Lines, one aligned source token per line
//!   `{"sent":..,"tok":0,"lang":..,"lemma":..,"pos":..,"tgt_lemma":..,"tgt_lang":..?,"gold":..?}`
//! * cluster map: `synset_id<TAB>cluster_label` per line
//!
//! All readers are single pass and report the 1-based line number of the
//! first bad record. Input must be UTF-8 without a byte-order mark.

use std::collections::{BTreeMap, HashSet};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    normalize_lemma, LanguageCode, ModelError, MultiSynset, MultiWordnet, MultiWordnetBuilder, Pos,
    WordKey,
};

#[derive(Debug, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum ParseErrorKind {
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    #[error("byte-order mark is not allowed")]
    ByteOrderMark,
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("synset {0} has an empty word list")]
    EmptySynset(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("duplicate token ({0}, {1})")]
    DuplicateToken(String, u64),
    #[error("duplicate synset id {0} in cluster map")]
    DuplicateClusterEntry(String),
    #[error("blank cluster label for {0}")]
    BlankLabel(String),
}

impl ParseError {
    fn new(line: usize, kind: impl Into<ParseErrorKind>) -> Self {
        ParseError {
            line,
            kind: kind.into(),
        }
    }
}

/// Yields `(line_number, line)` for non-blank lines, rejecting a BOM.
fn records<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), ParseError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let n = i + 1;
            match line {
                Err(e) => Some(Err(ParseError::new(n, e))),
                Ok(l) if n == 1 && l.starts_with('\u{feff}') => {
                    Some(Err(ParseError::new(n, ParseErrorKind::ByteOrderMark)))
                }
                Ok(l) if l.trim().is_empty() => None,
                Ok(l) => Some(Ok((n, l))),
            }
        })
}

fn json<'a, T: Deserialize<'a>>(line: usize, text: &'a str) -> Result<T, ParseError> {
    serde_json::from_str(text)
        .map_err(|e| ParseError::new(line, ParseErrorKind::Malformed(e.to_string())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SynsetRecord {
    id: String,
    pos: String,
    #[serde(default)]
    gloss: Option<String>,
    words: Vec<WordRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WordRecord {
    lang: String,
    lemma: String,
    #[serde(default)]
    pos: Option<String>,
}

fn synset_from_record(rec: SynsetRecord) -> Result<MultiSynset, ParseErrorKind> {
    let pos: Pos = rec.pos.parse()?;
    if rec.words.is_empty() {
        return Err(ParseErrorKind::EmptySynset(rec.id));
    }
    let words = rec
        .words
        .into_iter()
        .map(|w| {
            let word_pos = match w.pos {
                Some(p) => p.parse()?,
                None => pos,
            };
            WordKey::new(w.lang.parse()?, &w.lemma, word_pos)
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(MultiSynset::new(rec.id, pos, rec.gloss, words)?)
}

pub fn parse_multiwordnet<R: BufRead>(reader: R) -> Result<MultiWordnet, ParseError> {
    let mut builder = MultiWordnetBuilder::new();
    for rec in records(reader) {
        let (n, text) = rec?;
        let record: SynsetRecord = json(n, &text)?;
        let synset = synset_from_record(record).map_err(|k| ParseError::new(n, k))?;
        builder.add(synset).map_err(|e| ParseError::new(n, e))?;
    }
    Ok(builder.finish())
}

#[derive(Serialize)]
struct SynsetOut<'a> {
    id: &'a str,
    pos: Pos,
    #[serde(skip_serializing_if = "Option::is_none")]
    gloss: Option<&'a str>,
    words: Vec<WordOut<'a>>,
}

#[derive(Serialize)]
struct WordOut<'a> {
    lang: LanguageCode,
    lemma: &'a str,
}

/// Writes the canonical form: one line per synset in id order, members
/// sorted by language then lemma, `\n` line endings.
pub fn write_multiwordnet<W: Write>(m: &MultiWordnet, mut out: W) -> io::Result<()> {
    for s in m.synsets() {
        let rec = SynsetOut {
            id: s.id(),
            pos: s.pos(),
            gloss: s.gloss(),
            words: s
                .words()
                .iter()
                .map(|w| WordOut {
                    lang: w.language(),
                    lemma: w.lemma(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn multiwordnet_to_string(m: &MultiWordnet) -> String {
    let mut buf = Vec::new();
    write_multiwordnet(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

/// One source-side corpus token aligned to a single target lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedToken {
    pub sentence_id: String,
    pub token_id: u64,
    pub source: WordKey,
    pub target_lemma: String,
    /// Per-token target language; `None` means the run's target language.
    pub target_language: Option<LanguageCode>,
    pub gold_synset_id: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenRecord {
    sent: String,
    tok: u64,
    lang: String,
    lemma: String,
    pos: String,
    tgt_lemma: String,
    #[serde(default)]
    tgt_lang: Option<String>,
    #[serde(default)]
    gold: Option<String>,
}

fn token_from_record(rec: TokenRecord) -> Result<AlignedToken, ModelError> {
    let source = WordKey::new(rec.lang.parse()?, &rec.lemma, rec.pos.parse()?)?;
    Ok(AlignedToken {
        sentence_id: rec.sent,
        token_id: rec.tok,
        source,
        target_lemma: normalize_lemma(&rec.tgt_lemma)?,
        target_language: rec.tgt_lang.as_deref().map(str::parse).transpose()?,
        gold_synset_id: rec.gold,
    })
}

pub fn parse_bitext<R: BufRead>(reader: R) -> Result<Vec<AlignedToken>, ParseError> {
    let mut seen: HashSet<(String, u64)> = HashSet::new();
    let mut tokens = Vec::new();
    for rec in records(reader) {
        let (n, text) = rec?;
        let record: TokenRecord = json(n, &text)?;
        let token = token_from_record(record).map_err(|e| ParseError::new(n, e))?;
        if !seen.insert((token.sentence_id.clone(), token.token_id)) {
            return Err(ParseError::new(
                n,
                ParseErrorKind::DuplicateToken(token.sentence_id, token.token_id),
            ));
        }
        tokens.push(token);
    }
    Ok(tokens)
}

#[derive(Serialize)]
struct TokenOut<'a> {
    sent: &'a str,
    tok: u64,
    lang: LanguageCode,
    lemma: &'a str,
    pos: Pos,
    tgt_lemma: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tgt_lang: Option<LanguageCode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gold: Option<&'a str>,
}

pub fn write_bitext<W: Write>(tokens: &[AlignedToken], mut out: W) -> io::Result<()> {
    for t in tokens {
        let rec = TokenOut {
            sent: &t.sentence_id,
            tok: t.token_id,
            lang: t.source.language(),
            lemma: t.source.lemma(),
            pos: t.source.pos(),
            tgt_lemma: &t.target_lemma,
            tgt_lang: t.target_language,
            gold: t.gold_synset_id.as_deref(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Synset id → homonym cluster label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterMap {
    entries: BTreeMap<String, String>,
}

impl ClusterMap {
    pub fn get(&self, synset_id: &str) -> Option<&str> {
        self.entries.get(synset_id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl FromIterator<(String, String)> for ClusterMap {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        ClusterMap {
            entries: iter.into_iter().collect(),
        }
    }
}

pub fn parse_cluster_map<R: BufRead>(reader: R) -> Result<ClusterMap, ParseError> {
    let mut entries = BTreeMap::new();
    for rec in records(reader) {
        let (n, text) = rec?;
        let (id, label) = text.split_once('\t').ok_or_else(|| {
            ParseError::new(n, ParseErrorKind::Malformed("expected two tab-separated columns".into()))
        })?;
        if label.contains('\t') {
            return Err(ParseError::new(
                n,
                ParseErrorKind::Malformed("more than two columns".into()),
            ));
        }
        let label = label.trim_end_matches('\r');
        if id.trim().is_empty() {
            return Err(ParseError::new(n, ParseErrorKind::Malformed("empty synset id".into())));
        }
        if label.trim().is_empty() {
            return Err(ParseError::new(n, ParseErrorKind::BlankLabel(id.to_string())));
        }
        if entries.insert(id.to_string(), label.to_string()).is_some() {
            return Err(ParseError::new(
                n,
                ParseErrorKind::DuplicateClusterEntry(id.to_string()),
            ));
        }
    }
    Ok(ClusterMap { entries })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LanguageStats {
    pub word_count: usize,
    pub monosemous: usize,
    pub polysemous: usize,
    /// Synsets holding at least one word of the language.
    pub synsets_with_words: usize,
    /// Of those, synsets holding exactly one word of the language.
    pub single_word_synsets: usize,
    /// `single_word_synsets / synsets_with_words`, 0 when there are none.
    pub single_word_synset_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LexiconStats {
    pub synset_count: usize,
    pub languages: BTreeMap<LanguageCode, LanguageStats>,
}

impl LexiconStats {
    /// Stats for one language; all zeros when it does not occur.
    pub fn language(&self, language: LanguageCode) -> LanguageStats {
        self.languages.get(&language).cloned().unwrap_or_default()
    }
}

pub fn lexicon_stats(m: &MultiWordnet) -> LexiconStats {
    let mut languages: BTreeMap<LanguageCode, LanguageStats> = BTreeMap::new();
    for w in m.words() {
        let st = languages.entry(w.language()).or_default();
        st.word_count += 1;
        match m.sense_count(w) {
            1 => st.monosemous += 1,
            _ => st.polysemous += 1,
        }
    }
    for s in m.synsets() {
        for lang in s.languages() {
            let st = languages.entry(lang).or_default();
            st.synsets_with_words += 1;
            if s.words_in(lang).len() == 1 {
                st.single_word_synsets += 1;
            }
        }
    }
    for st in languages.values_mut() {
        if st.synsets_with_words > 0 {
            st.single_word_synset_fraction =
                st.single_word_synsets as f64 / st.synsets_with_words as f64;
        }
    }
    LexiconStats {
        synset_count: m.len(),
        languages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<MultiWordnet, ParseError> {
        parse_multiwordnet(text.as_bytes())
    }

    #[test]
    fn empty_inputs() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse_bitext("".as_bytes()).unwrap().is_empty());
        assert!(parse_cluster_map("".as_bytes()).unwrap().is_empty());
        let st = lexicon_stats(&MultiWordnet::default());
        assert_eq!(st.synset_count, 0);
        assert!(st.languages.is_empty());
    }

    #[test]
    fn empty_word_list_reports_line() {
        let text = "{\"id\":\"a\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\"x\"}]}\n\
                    {\"id\":\"b\",\"pos\":\"n\",\"words\":[]}\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::EmptySynset(ref id) if id == "b"));
    }

    #[test]
    fn duplicate_id_reports_line() {
        let line = "{\"id\":\"duty-1\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\"duty\"}]}\n";
        let err = parse(&format!("{line}\n{line}")).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Model(ModelError::DuplicateSynsetId(_))
        ));
    }

    #[test]
    fn bad_fields() {
        let cases = [
            ("{\"id\":\"a\",\"pos\":\"x\",\"words\":[{\"lang\":\"en\",\"lemma\":\"x\"}]}", "part of speech"),
            ("{\"id\":\"a\",\"pos\":\"n\",\"words\":[{\"lang\":\"EN\",\"lemma\":\"x\"}]}", "language"),
            ("{\"id\":\"a\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\" \"}]}", "lemma"),
            ("{\"id\":\"a\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\"x\",\"pos\":\"v\"}]}", "pos"),
            ("{\"id\":\"a\",\"pos\":\"n\",\"extra\":1,\"words\":[]}", "unknown field"),
            ("not json", "malformed"),
        ];
        for (text, needle) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!(err.line, 1);
            assert!(err.to_string().contains(needle), "{err} should mention {needle}");
        }
    }

    #[test]
    fn bom_rejected() {
        let text = "\u{feff}{\"id\":\"a\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\"x\"}]}";
        let err = parse(text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ByteOrderMark));
    }

    #[test]
    fn invalid_utf8_rejected() {
        let err = parse_multiwordnet(&b"{\"id\":\"\xff\"}"[..]).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.kind, ParseErrorKind::Io(_)));
    }

    #[test]
    fn serialization_is_sorted() {
        let text = "{\"id\":\"b\",\"pos\":\"n\",\"words\":[{\"lang\":\"fr\",\"lemma\":\"z\"},{\"lang\":\"en\",\"lemma\":\"ice cream\"}]}\n\
                    {\"id\":\"a\",\"pos\":\"v\",\"gloss\":\"g\",\"words\":[{\"lang\":\"en\",\"lemma\":\"y\"}]}\n";
        let m = parse(text).unwrap();
        assert_eq!(
            multiwordnet_to_string(&m),
            "{\"id\":\"a\",\"pos\":\"v\",\"gloss\":\"g\",\"words\":[{\"lang\":\"en\",\"lemma\":\"y\"}]}\n\
             {\"id\":\"b\",\"pos\":\"n\",\"words\":[{\"lang\":\"en\",\"lemma\":\"ice_cream\"},{\"lang\":\"fr\",\"lemma\":\"z\"}]}\n"
        );
    }

    #[test]
    fn bitext_duplicates_and_empty_lemma() {
        let tok = "{\"sent\":\"s1\",\"tok\":0,\"lang\":\"en\",\"lemma\":\"duty\",\"pos\":\"n\",\"tgt_lemma\":\"droit\"}";
        let err = parse_bitext(format!("{tok}\n{tok}\n").as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::DuplicateToken(ref s, 0) if s == "s1"));

        let empty = tok.replace("droit", "");
        let err = parse_bitext(empty.as_bytes()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Model(ModelError::InvalidLemma(_))));

        let negative = tok.replace("\"tok\":0", "\"tok\":-1");
        assert!(parse_bitext(negative.as_bytes()).is_err());
    }

    #[test]
    fn bitext_round_trip() {
        let text = "{\"sent\":\"s1\",\"tok\":3,\"lang\":\"en\",\"lemma\":\"memory\",\"pos\":\"n\",\"tgt_lemma\":\"ricordo\",\"tgt_lang\":\"it\",\"gold\":\"mem-1\"}\n";
        let tokens = parse_bitext(text.as_bytes()).unwrap();
        assert_eq!(tokens[0].target_language, Some(LanguageCode::new("it").unwrap()));
        let mut out = Vec::new();
        write_bitext(&tokens, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn cluster_map() {
        let map = parse_cluster_map("ord-1\tA\nord-2\tA\nord-3\tB\n".as_bytes()).unwrap();
        assert_eq!(map.len(), 3);
        assert_eq!(map.get("ord-3"), Some("B"));
        assert_eq!(map.get("ord-4"), None);

        let err = parse_cluster_map("ord-1\tA\nord-1\tB\n".as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::DuplicateClusterEntry(_)));

        let err = parse_cluster_map("ord-1\t  \n".as_bytes()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::BlankLabel(_)));
        assert!(parse_cluster_map("ord-1 A\n".as_bytes()).is_err());
        assert!(parse_cluster_map("a\tb\tc\n".as_bytes()).is_err());
    }
}
