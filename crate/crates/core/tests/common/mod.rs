//! Brute-force reference implementation working on raw JSON, sharing no code
//! with the library beyond the file format.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture readable")
}

#[derive(Debug, Clone)]
pub struct OSynset {
    pub id: String,
    pub pos: String,
    /// (lang, lemma) pairs.
    pub words: Vec<(String, String)>,
}

impl OSynset {
    pub fn lemmas(&self, lang: &str) -> BTreeSet<String> {
        self.words
            .iter()
            .filter(|(l, _)| l == lang)
            .map(|(_, w)| w.clone())
            .collect()
    }

    pub fn has(&self, lang: &str, lemma: &str) -> bool {
        self.words.iter().any(|(l, w)| l == lang && w == lemma)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OProfile {
    pub sense_count: usize,
    pub translation_count: usize,
    pub eligible: bool,
    pub ospt: bool,
    pub psa: bool,
    pub otps: bool,
    pub spa: bool,
    pub ssa: bool,
    pub gsa: bool,
    pub gpa: bool,
    pub nolg: bool,
    pub ocpw: bool,
    pub partners: Vec<String>,
}

pub struct Oracle {
    pub synsets: Vec<OSynset>,
}

impl Oracle {
    pub fn from_jsonl(text: &str) -> Oracle {
        let mut synsets = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let v: Value = serde_json::from_str(line).expect("valid JSON line");
            let words = v["words"]
                .as_array()
                .expect("words array")
                .iter()
                .map(|w| {
                    (
                        w["lang"].as_str().unwrap().to_string(),
                        w["lemma"].as_str().unwrap().to_string(),
                    )
                })
                .collect();
            synsets.push(OSynset {
                id: v["id"].as_str().unwrap().to_string(),
                pos: v["pos"].as_str().unwrap().to_string(),
                words,
            });
        }
        Oracle { synsets }
    }

    pub fn from_fixture() -> Oracle {
        Oracle::from_jsonl(&fixture_text("mw_paper.jsonl"))
    }

    /// S(e)
    pub fn senses(&self, lang: &str, lemma: &str, pos: &str) -> Vec<&OSynset> {
        self.synsets
            .iter()
            .filter(|s| s.pos == pos && s.has(lang, lemma))
            .collect()
    }

    /// All distinct (lemma, pos) pairs of a language.
    pub fn words(&self, lang: &str) -> BTreeSet<(String, String)> {
        self.synsets
            .iter()
            .flat_map(|s| {
                s.words
                    .iter()
                    .filter(|(l, _)| l == lang)
                    .map(|(_, w)| (w.clone(), s.pos.clone()))
            })
            .collect()
    }

    /// Ids of synsets holding both `e` and `f`.
    pub fn shared(&self, src: &str, e: &str, tgt: &str, f: &str, pos: &str) -> Vec<String> {
        self.senses(src, e, pos)
            .into_iter()
            .filter(|s| s.has(tgt, f))
            .map(|s| s.id.clone())
            .collect()
    }

    pub fn profile(&self, src: &str, tgt: &str, lemma: &str, pos: &str) -> OProfile {
        let senses = self.senses(src, lemma, pos);
        let t: Vec<BTreeSet<String>> = senses.iter().map(|s| s.lemmas(tgt)).collect();
        let all_t: BTreeSet<String> = t.iter().flatten().cloned().collect();
        let c = |f: &String| -> BTreeSet<usize> {
            (0..t.len()).filter(|&i| t[i].contains(f)).collect()
        };
        let fs: Vec<&String> = all_t.iter().collect();
        let n = t.len();

        let mut ospt = true;
        for i in 0..n {
            for j in 0..n {
                if i != j && t[i].intersection(&t[j]).next().is_some() {
                    ospt = false;
                }
            }
        }
        let psa = fs.iter().all(|f| c(f).len() == 1);
        let otps = t.iter().all(|x| x.len() <= 1);
        let mut spa = true;
        let mut ssa = true;
        let mut distinct_concepts = true;
        for a in &fs {
            for b in &fs {
                if a == b {
                    continue;
                }
                let (ca, cb) = (c(a), c(b));
                if ca.intersection(&cb).next().is_some() {
                    spa = false;
                }
                if ca.union(&cb).count() != 1 {
                    ssa = false;
                }
                if ca == cb {
                    distinct_concepts = false;
                }
            }
        }
        let gsa = t.iter().filter(|x| !x.is_empty()).count() <= 1;
        let gpa = psa && distinct_concepts;
        let nolg = t.iter().all(|x| !x.is_empty());
        let partners = fs
            .iter()
            .filter(|f| c(f).len() >= 2)
            .map(|f| f.to_string())
            .collect();
        OProfile {
            sense_count: n,
            translation_count: fs.len(),
            eligible: n >= 2 && !fs.is_empty(),
            ospt,
            psa,
            otps,
            spa,
            ssa,
            gsa,
            gpa,
            nolg,
            ocpw: n == 1,
            partners,
        }
    }

    /// Eligible-word profiles of a direction, keyed by (lemma, pos).
    pub fn eligible(&self, src: &str, tgt: &str) -> BTreeMap<(String, String), OProfile> {
        self.words(src)
            .into_iter()
            .map(|(w, p)| {
                let prof = self.profile(src, tgt, &w, &p);
                ((w, p), prof)
            })
            .filter(|(_, p)| p.eligible)
            .collect()
    }
}

/// Library profile flattened into the oracle's shape.
pub fn flatten(p: &mwsense::AssumptionProfile) -> OProfile {
    let f = p.flags;
    OProfile {
        sense_count: p.sense_count,
        translation_count: p.translation_count,
        eligible: p.eligible,
        ospt: f.ospt,
        psa: f.psa,
        otps: f.otps,
        spa: f.spa,
        ssa: f.ssa,
        gsa: f.gsa,
        gpa: f.gpa,
        nolg: f.nolg,
        ocpw: f.ocpw,
        partners: p.parallel_polysemy_partners.clone(),
    }
}

/// Percentage in tenths, half to even, by exact integer arithmetic.
pub fn tenths_half_even(count: u64, total: u64) -> u64 {
    let num = count * 1000;
    let (q, r) = (num / total, num % total);
    match (2 * r).cmp(&total) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q & 1),
    }
}
