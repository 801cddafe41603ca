//! Unsupervised sense annotation of a word-aligned bitext.
//!
//! A source token aligned to target lemma `f` is tagged with synset `s`
//! exactly when `s` is the only synset containing both the source word and
//! `f`. Everything else is an explicit abstention, so corpus runs never
//! halt and coverage accounting stays exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::assumptions::Direction;
use crate::ingest::{AlignedToken, ClusterMap, ParseError, ParseErrorKind};
use crate::model::{LanguageCode, MultiWordnet, WordKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbstainReason {
    NoSharedSynset,
    MultipleSharedSynsets,
    SourceOov,
}

impl AbstainReason {
    pub fn as_str(self) -> &'static str {
        match self {
            AbstainReason::NoSharedSynset => "no-shared-synset",
            AbstainReason::MultipleSharedSynsets => "multiple-shared-synsets",
            AbstainReason::SourceOov => "source-oov",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            AbstainReason::NoSharedSynset,
            AbstainReason::MultipleSharedSynsets,
            AbstainReason::SourceOov,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

impl fmt::Display for AbstainReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decision {
    /// A synset id, or a cluster label in homonym-level mode.
    Tagged(String),
    Abstained(AbstainReason),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotateError {
    #[error("synset {0} has no entry in the cluster map")]
    UnmappedSynset(String),
}

/// An annotation decision for one corpus token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationResult<'a> {
    pub token: &'a AlignedToken,
    pub decision: Decision,
}

enum Shared<'a> {
    SourceOov,
    Ids(Vec<&'a str>),
}

fn shared<'a>(m: &'a MultiWordnet, target: LanguageCode, src: &WordKey, tgt_lemma: &str) -> Shared<'a> {
    if !m.contains_word(src) {
        return Shared::SourceOov;
    }
    // the target word takes the source pos; synsets are pos-homogeneous
    Shared::Ids(
        m.senses_of(src)
            .filter(|s| s.lemmas_in(target).any(|f| f == tgt_lemma))
            .map(|s| s.id())
            .collect(),
    )
}

fn language_error(d: Direction, src: &WordKey) -> Option<Decision> {
    if src.language() != d.source {
        return Some(Decision::Error(format!(
            "language-mismatch: {src} is not in source language {}",
            d.source
        )));
    }
    None
}

pub fn annotate_token(m: &MultiWordnet, d: Direction, src: &WordKey, tgt_lemma: &str) -> Decision {
    if let Some(err) = language_error(d, src) {
        return err;
    }
    match shared(m, d.target, src, tgt_lemma) {
        Shared::SourceOov => Decision::Abstained(AbstainReason::SourceOov),
        Shared::Ids(ids) => match ids.as_slice() {
            [] => Decision::Abstained(AbstainReason::NoSharedSynset),
            [only] => Decision::Tagged(only.to_string()),
            _ => Decision::Abstained(AbstainReason::MultipleSharedSynsets),
        },
    }
}

/// Coarse variant: tags with a cluster label when every shared synset maps
/// to the same label.
pub fn annotate_homonym_level(
    m: &MultiWordnet,
    d: Direction,
    src: &WordKey,
    tgt_lemma: &str,
    clusters: &ClusterMap,
) -> Result<Decision, AnnotateError> {
    if let Some(err) = language_error(d, src) {
        return Ok(err);
    }
    let ids = match shared(m, d.target, src, tgt_lemma) {
        Shared::SourceOov => return Ok(Decision::Abstained(AbstainReason::SourceOov)),
        Shared::Ids(ids) => ids,
    };
    if ids.is_empty() {
        return Ok(Decision::Abstained(AbstainReason::NoSharedSynset));
    }
    let labels = ids
        .iter()
        .map(|id| {
            clusters
                .get(id)
                .ok_or_else(|| AnnotateError::UnmappedSynset(id.to_string()))
        })
        .collect::<Result<BTreeSet<_>, _>>()?;
    let mut labels = labels.into_iter();
    match (labels.next(), labels.next()) {
        (Some(only), None) => Ok(Decision::Tagged(only.to_string())),
        _ => Ok(Decision::Abstained(AbstainReason::MultipleSharedSynsets)),
    }
}

/// Direction for one token: the run's direction, with the target language
/// overridden when the token carries its own.
fn token_direction(run: Direction, token: &AlignedToken) -> Result<Direction, Decision> {
    if let Some(err) = language_error(run, &token.source) {
        return Err(err);
    }
    let target = token.target_language.unwrap_or(run.target);
    Direction::new(run.source, target)
        .map_err(|_| Decision::Error(format!("language-mismatch: target language {target} equals source")))
}

#[derive(Debug, Clone, Copy)]
pub enum Granularity<'c> {
    Sense,
    Homonym(&'c ClusterMap),
}

pub fn annotate_tokens<'a>(
    m: &MultiWordnet,
    d: Direction,
    tokens: &'a [AlignedToken],
    granularity: Granularity<'_>,
) -> Vec<AnnotationResult<'a>> {
    tokens
        .iter()
        .map(|token| {
            let decision = match token_direction(d, token) {
                Err(e) => e,
                Ok(td) => match granularity {
                    Granularity::Sense => annotate_token(m, td, &token.source, &token.target_lemma),
                    Granularity::Homonym(c) => {
                        annotate_homonym_level(m, td, &token.source, &token.target_lemma, c)
                            .unwrap_or_else(|e| Decision::Error(e.to_string()))
                    }
                },
            };
            AnnotationResult { token, decision }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AnnotationSummary {
    pub tokens: usize,
    pub tagged: usize,
    pub abstained: usize,
    pub abstained_no_shared_synset: usize,
    pub abstained_multiple_shared_synsets: usize,
    pub abstained_source_oov: usize,
    pub errors: usize,
}

impl AnnotationSummary {
    pub fn of(results: &[AnnotationResult<'_>]) -> Self {
        let mut s = AnnotationSummary {
            tokens: results.len(),
            ..Default::default()
        };
        for r in results {
            match &r.decision {
                Decision::Tagged(_) => s.tagged += 1,
                Decision::Error(_) => s.errors += 1,
                Decision::Abstained(reason) => {
                    s.abstained += 1;
                    match reason {
                        AbstainReason::NoSharedSynset => s.abstained_no_shared_synset += 1,
                        AbstainReason::MultipleSharedSynsets => {
                            s.abstained_multiple_shared_synsets += 1
                        }
                        AbstainReason::SourceOov => s.abstained_source_oov += 1,
                    }
                }
            }
        }
        s
    }
}

/// Output record. Sense-level tags go in `synset`, homonym-level in `cluster`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationRecord {
    pub sent: String,
    pub tok: u64,
    pub decision: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AnnotationRecord {
    fn new(result: &AnnotationResult<'_>, granularity: Granularity<'_>) -> Self {
        let mut rec = AnnotationRecord {
            sent: result.token.sentence_id.clone(),
            tok: result.token.token_id,
            decision: String::new(),
            synset: None,
            cluster: None,
            reason: None,
        };
        match &result.decision {
            Decision::Tagged(label) => {
                rec.decision = "tagged".into();
                match granularity {
                    Granularity::Sense => rec.synset = Some(label.clone()),
                    Granularity::Homonym(_) => rec.cluster = Some(label.clone()),
                }
            }
            Decision::Abstained(r) => {
                rec.decision = "abstain".into();
                rec.reason = Some(r.as_str().into());
            }
            Decision::Error(msg) => {
                rec.decision = "error".into();
                rec.reason = Some(msg.clone());
            }
        }
        rec
    }

    pub fn to_decision(&self) -> Result<Decision, String> {
        match self.decision.as_str() {
            "tagged" => self
                .synset
                .clone()
                .or_else(|| self.cluster.clone())
                .map(Decision::Tagged)
                .ok_or_else(|| "tagged record without synset or cluster".to_string()),
            "abstain" => self
                .reason
                .as_deref()
                .and_then(AbstainReason::parse)
                .map(Decision::Abstained)
                .ok_or_else(|| format!("unknown abstain reason {:?}", self.reason)),
            "error" => Ok(Decision::Error(self.reason.clone().unwrap_or_default())),
            other => Err(format!("unknown decision {other:?}")),
        }
    }
}

pub fn write_annotations<W: Write>(
    results: &[AnnotationResult<'_>],
    granularity: Granularity<'_>,
    mut sink: W,
) -> io::Result<()> {
    for r in results {
        serde_json::to_writer(&mut sink, &AnnotationRecord::new(r, granularity))?;
        sink.write_all(b"\n")?;
    }
    sink.flush()
}

/// Annotates every token, writes one record per token in input order and
/// returns the decision counts.
pub fn annotate_bitext<W: Write>(
    m: &MultiWordnet,
    d: Direction,
    tokens: &[AlignedToken],
    granularity: Granularity<'_>,
    sink: W,
) -> io::Result<AnnotationSummary> {
    let results = annotate_tokens(m, d, tokens, granularity);
    write_annotations(&results, granularity, sink)?;
    Ok(AnnotationSummary::of(&results))
}

pub fn parse_annotations<R: BufRead>(reader: R) -> Result<Vec<AnnotationRecord>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| ParseError {
            line: n,
            kind: e.into(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: AnnotationRecord = serde_json::from_str(&line).map_err(|e| ParseError {
            line: n,
            kind: ParseErrorKind::Malformed(e.to_string()),
        })?;
        rec.to_decision().map_err(|msg| ParseError {
            line: n,
            kind: ParseErrorKind::Malformed(msg),
        })?;
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("annotation for unknown token ({0}, {1})")]
    UnknownToken(String, u64),
    #[error("token ({0}, {1}) annotated more than once")]
    DuplicateAnnotation(String, u64),
    #[error("annotation ({0}, {1}): {2}")]
    BadRecord(String, u64, String),
}

/// Pairs annotation records with their corpus tokens by `(sent, tok)`.
pub fn join_annotations<'a>(
    tokens: &'a [AlignedToken],
    records: &[AnnotationRecord],
) -> Result<Vec<AnnotationResult<'a>>, JoinError> {
    let by_key: HashMap<(&str, u64), &AlignedToken> = tokens
        .iter()
        .map(|t| ((t.sentence_id.as_str(), t.token_id), t))
        .collect();
    let mut seen = std::collections::HashSet::new();
    records
        .iter()
        .map(|r| {
            let token = by_key
                .get(&(r.sent.as_str(), r.tok))
                .ok_or_else(|| JoinError::UnknownToken(r.sent.clone(), r.tok))?;
            if !seen.insert((r.sent.as_str(), r.tok)) {
                return Err(JoinError::DuplicateAnnotation(r.sent.clone(), r.tok));
            }
            let decision = r
                .to_decision()
                .map_err(|e| JoinError::BadRecord(r.sent.clone(), r.tok, e))?;
            Ok(AnnotationResult { token, decision })
        })
        .collect()
}

/// Counts for one population slice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SliceCounts {
    pub population: usize,
    pub annotated: usize,
    pub correct: usize,
}

impl SliceCounts {
    /// `annotated / population`, `None` for an empty population.
    pub fn coverage(&self) -> Option<f64> {
        (self.population > 0).then(|| self.annotated as f64 / self.population as f64)
    }

    /// `correct / annotated`, `None` when nothing was annotated.
    pub fn precision(&self) -> Option<f64> {
        (self.annotated > 0).then(|| self.correct as f64 / self.annotated as f64)
    }

    fn add(&mut self, annotated: bool, correct: bool) {
        self.population += 1;
        self.annotated += annotated as usize;
        self.correct += correct as usize;
    }
}

fn ratio_or_undefined(r: Option<f64>) -> serde_json::Value {
    match r {
        Some(x) => serde_json::json!(x),
        None => serde_json::json!("undefined"),
    }
}

impl Serialize for SliceCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serde_json::json!({
            "annotated": self.annotated,
            "correct": self.correct,
            "coverage": ratio_or_undefined(self.coverage()),
            "population": self.population,
            "precision": ratio_or_undefined(self.precision()),
        })
        .serialize(serializer)
    }
}

/// Gold-tag evaluation, split by the source word's sense count.
/// Tokens without a gold tag are excluded and counted in `without_gold`.
/// Out-of-vocabulary source words count only towards `all`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvaluationReport {
    pub all: SliceCounts,
    pub monosemous: SliceCounts,
    pub polysemous: SliceCounts,
    pub without_gold: usize,
}

fn evaluate_by<F>(results: &[AnnotationResult<'_>], m: &MultiWordnet, is_correct: F) -> EvaluationReport
where
    F: Fn(&str, &str) -> bool,
{
    let mut report = EvaluationReport::default();
    for r in results {
        let Some(gold) = r.token.gold_synset_id.as_deref() else {
            report.without_gold += 1;
            continue;
        };
        let (annotated, correct) = match &r.decision {
            Decision::Tagged(tag) => (true, is_correct(tag, gold)),
            _ => (false, false),
        };
        report.all.add(annotated, correct);
        match m.sense_count(&r.token.source) {
            0 => {}
            1 => report.monosemous.add(annotated, correct),
            _ => report.polysemous.add(annotated, correct),
        }
    }
    report
}

pub fn evaluate(results: &[AnnotationResult<'_>], m: &MultiWordnet) -> EvaluationReport {
    evaluate_by(results, m, |tag, gold| tag == gold)
}

/// Homonym-level evaluation: a cluster tag is correct when the gold synset
/// maps to that cluster.
pub fn evaluate_homonym_level(
    results: &[AnnotationResult<'_>],
    m: &MultiWordnet,
    clusters: &ClusterMap,
) -> EvaluationReport {
    evaluate_by(results, m, |tag, gold| clusters.get(gold) == Some(tag))
}

/// One weak-assumption instance: two distinct target lemmas aligned to the
/// same source word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AuditInstance {
    pub source: WordKey,
    pub target_language: LanguageCode,
    pub first: String,
    pub second: String,
    /// The two target words share a synset.
    pub synonyms: bool,
    /// The source word has two or more synsets.
    pub source_polysemous: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WeakAuditReport {
    pub instances: Vec<AuditInstance>,
    pub wsa_satisfied: usize,
    pub wsa_violated: usize,
    pub wpa_satisfied: usize,
    pub wpa_violated: usize,
}

/// Checks the weak synonymy and weak polysemy assumptions on every pair of
/// distinct target lemmas aligned to the same source word in the corpus.
pub fn weak_assumption_audit(
    m: &MultiWordnet,
    d: Direction,
    tokens: &[AlignedToken],
) -> WeakAuditReport {
    let mut aligned: BTreeMap<(WordKey, LanguageCode), BTreeSet<&str>> = BTreeMap::new();
    for t in tokens {
        let Ok(td) = token_direction(d, t) else {
            continue;
        };
        aligned
            .entry((t.source.clone(), td.target))
            .or_default()
            .insert(&t.target_lemma);
    }
    let mut report = WeakAuditReport::default();
    for ((source, target), lemmas) in aligned {
        let lemmas: Vec<&str> = lemmas.into_iter().collect();
        let polysemous = m.sense_count(&source) >= 2;
        for i in 0..lemmas.len() {
            for j in i + 1..lemmas.len() {
                let f1 = WordKey::new(target, lemmas[i], source.pos()).expect("normalized lemma");
                let f2 = WordKey::new(target, lemmas[j], source.pos()).expect("normalized lemma");
                let synonyms = m.are_synonyms(&f1, &f2).expect("same language");
                report.instances.push(AuditInstance {
                    source: source.clone(),
                    target_language: target,
                    first: lemmas[i].to_string(),
                    second: lemmas[j].to_string(),
                    synonyms,
                    source_polysemous: polysemous,
                });
            }
        }
    }
    for inst in &report.instances {
        if inst.synonyms {
            report.wsa_satisfied += 1;
        } else {
            report.wsa_violated += 1;
        }
        if inst.source_polysemous {
            report.wpa_satisfied += 1;
        } else {
            report.wpa_violated += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MultiSynset, Pos};

    fn l(s: &str) -> LanguageCode {
        LanguageCode::new(s).unwrap()
    }

    fn key(lang: &str, lemma: &str) -> WordKey {
        WordKey::new(l(lang), lemma, Pos::Noun).unwrap()
    }

    fn wn() -> MultiWordnet {
        MultiWordnet::build([
            MultiSynset::new("a", Pos::Noun, None, vec![key("en", "x"), key("fr", "p")]).unwrap(),
            MultiSynset::new("b", Pos::Noun, None, vec![key("en", "x"), key("fr", "p"), key("fr", "q")])
                .unwrap(),
        ])
        .unwrap()
    }

    fn token(id: u64, lemma: &str, tgt: &str, gold: Option<&str>) -> AlignedToken {
        AlignedToken {
            sentence_id: "s".into(),
            token_id: id,
            source: key("en", lemma),
            target_lemma: tgt.into(),
            target_language: None,
            gold_synset_id: gold.map(str::to_string),
        }
    }

    fn en_fr() -> Direction {
        Direction::new(l("en"), l("fr")).unwrap()
    }

    #[test]
    fn decisions() {
        let m = wn();
        let d = en_fr();
        assert_eq!(annotate_token(&m, d, &key("en", "x"), "q"), Decision::Tagged("b".into()));
        assert_eq!(
            annotate_token(&m, d, &key("en", "x"), "p"),
            Decision::Abstained(AbstainReason::MultipleSharedSynsets)
        );
        assert_eq!(
            annotate_token(&m, d, &key("en", "x"), "r"),
            Decision::Abstained(AbstainReason::NoSharedSynset)
        );
        assert_eq!(
            annotate_token(&m, d, &key("en", "y"), "p"),
            Decision::Abstained(AbstainReason::SourceOov)
        );
        assert!(matches!(
            annotate_token(&m, d, &key("fr", "p"), "x"),
            Decision::Error(_)
        ));
    }

    #[test]
    fn homonym_level_requires_total_map() {
        let m = wn();
        let partial: ClusterMap = [("a".to_string(), "A".to_string())].into_iter().collect();
        assert_eq!(
            annotate_homonym_level(&m, en_fr(), &key("en", "x"), "p", &partial),
            Err(AnnotateError::UnmappedSynset("b".into()))
        );
        let one: ClusterMap = [("a", "A"), ("b", "A")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(
            annotate_homonym_level(&m, en_fr(), &key("en", "x"), "p", &one),
            Ok(Decision::Tagged("A".into()))
        );
    }

    #[test]
    fn empty_corpus() {
        let m = wn();
        let mut out = Vec::new();
        let s = annotate_bitext(&m, en_fr(), &[], Granularity::Sense, &mut out).unwrap();
        assert_eq!(s, AnnotationSummary::default());
        assert!(out.is_empty());
        let r = evaluate(&[], &m);
        assert_eq!(r.all.precision(), None);
        assert_eq!(r.all.coverage(), None);
    }

    #[test]
    fn evaluation_counts_and_undefined_precision() {
        let m = wn();
        let tokens = vec![
            token(0, "x", "q", Some("b")),
            token(1, "x", "p", Some("a")),
            token(2, "x", "q", Some("a")),
            token(3, "x", "q", None),
        ];
        let results = annotate_tokens(&m, en_fr(), &tokens, Granularity::Sense);
        let r = evaluate(&results, &m);
        assert_eq!(r.without_gold, 1);
        assert_eq!(
            r.polysemous,
            SliceCounts {
                population: 3,
                annotated: 2,
                correct: 1
            }
        );
        assert_eq!(r.all, r.polysemous);
        assert_eq!(r.monosemous, SliceCounts::default());
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["monosemous"]["precision"], "undefined");
        assert_eq!(json["polysemous"]["precision"], 0.5);

        let only_abstain = annotate_tokens(&m, en_fr(), &tokens[1..2], Granularity::Sense);
        assert_eq!(evaluate(&only_abstain, &m).all.precision(), None);
    }

    #[test]
    fn records_round_trip() {
        let m = wn();
        let tokens = vec![token(0, "x", "q", None), token(1, "x", "p", None), token(2, "y", "p", None)];
        let results = annotate_tokens(&m, en_fr(), &tokens, Granularity::Sense);
        let mut out = Vec::new();
        write_annotations(&results, Granularity::Sense, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "{\"sent\":\"s\",\"tok\":0,\"decision\":\"tagged\",\"synset\":\"b\"}"
        );
        let records = parse_annotations(text.as_bytes()).unwrap();
        let joined = join_annotations(&tokens, &records).unwrap();
        assert_eq!(joined, results);

        let stray = AnnotationRecord {
            sent: "zz".into(),
            tok: 9,
            decision: "tagged".into(),
            synset: Some("a".into()),
            cluster: None,
            reason: None,
        };
        assert_eq!(
            join_annotations(&tokens, &[stray]),
            Err(JoinError::UnknownToken("zz".into(), 9))
        );
    }

    #[test]
    fn audit_single_alignment_has_no_instances() {
        let m = wn();
        let tokens = vec![token(0, "x", "q", None), token(1, "x", "q", None)];
        let r = weak_assumption_audit(&m, en_fr(), &tokens);
        assert!(r.instances.is_empty());
        assert_eq!(r.wsa_satisfied + r.wsa_violated, 0);
    }

    #[test]
    fn audit_pairs() {
        let m = wn();
        let tokens = vec![token(0, "x", "q", None), token(1, "x", "p", None)];
        let r = weak_assumption_audit(&m, en_fr(), &tokens);
        assert_eq!(r.instances.len(), 1);
        assert_eq!((r.wsa_satisfied, r.wpa_satisfied), (1, 1));
    }
}
