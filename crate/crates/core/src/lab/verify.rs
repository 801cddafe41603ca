//! Machine checks of the relations between the assumptions.
//!
//! Every flag in [`crate::assumptions`] is computed from its own definition,
//! so each implication below is a real test of the implementation against
//! the set algebra, not a restatement of it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::assumptions::{gap_covered, owpc, profile, AssumptionProfile, Direction};
use crate::model::{MultiWordnet, WordKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    /// OSPT ⇔ PSA
    T1,
    /// OTPS ⇔ SPA
    T2,
    /// GSA ⇔ SSA ∧ PSA
    O1,
    /// GPA ⇔ SPA ∧ PSA
    O2,
    /// OCPW ⇒ GSA
    O3,
    /// GSA ∧ NoLG ⇒ OCPW
    O4,
    /// OWPC(F) ⇒ OTPS(e) for every source word
    O5,
    /// (∀e OTPS(e)) ∧ every F-synset has an E word ⇒ OWPC(F)
    O6,
    /// Shared-synset counts and global OSPT agree in both directions.
    Bidir,
    /// Strong assumptions imply the weak ones.
    S2w,
    /// Index disagrees with synset membership.
    Structure,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::O1,
        TheoremId::O2,
        TheoremId::O3,
        TheoremId::O4,
        TheoremId::O5,
        TheoremId::O6,
        TheoremId::Bidir,
        TheoremId::S2w,
        TheoremId::Structure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2 => "T2",
            TheoremId::O1 => "O1",
            TheoremId::O2 => "O2",
            TheoremId::O3 => "O3",
            TheoremId::O4 => "O4",
            TheoremId::O5 => "O5",
            TheoremId::O6 => "O6",
            TheoremId::Bidir => "BIDIR",
            TheoremId::S2w => "S2W",
            TheoremId::Structure => "STRUCT",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub theorem: TheoremId,
    pub direction: Direction,
    /// Word or synset id the violation was found at.
    pub witness: String,
    pub details: String,
}

struct Sink {
    d: Direction,
    out: Vec<ViolationReport>,
}

impl Sink {
    fn check(&mut self, ok: bool, theorem: TheoremId, witness: impl fmt::Display, details: impl FnOnce() -> String) {
        if !ok {
            self.out.push(ViolationReport {
                theorem,
                direction: self.d,
                witness: witness.to_string(),
                details: details(),
            });
        }
    }
}

fn flags_str(p: &AssumptionProfile) -> String {
    serde_json::to_string(&p.flags).unwrap_or_default()
}

fn check_word(m: &MultiWordnet, p: &AssumptionProfile, sink: &mut Sink) {
    let f = p.flags;
    let w = &p.word;
    let fl = || flags_str(p);
    sink.check(f.ospt == f.psa, TheoremId::T1, w, fl);
    sink.check(f.otps == f.spa, TheoremId::T2, w, fl);
    sink.check(f.gsa == (f.ssa && f.psa), TheoremId::O1, w, fl);
    sink.check(f.gpa == (f.spa && f.psa), TheoremId::O2, w, fl);
    sink.check(!f.ocpw || f.gsa, TheoremId::O3, w, fl);
    sink.check(!(f.gsa && f.nolg) || f.ocpw, TheoremId::O4, w, fl);
    sink.check(!f.gpa || f.otps, TheoremId::S2w, w, || format!("GPA without OTPS: {}", fl()));
    sink.check(!f.gsa || f.ssa, TheoremId::S2w, w, || format!("GSA without SSA: {}", fl()));

    if p.translation_count < 2 {
        return;
    }
    let target = sink.d.target;
    let translations: Vec<WordKey> = m
        .translations_of_word(w, target)
        .into_iter()
        .map(|lemma| WordKey::new(target, lemma, w.pos()).expect("lemma from the model"))
        .collect();
    if f.ssa {
        // all translations pinned to one shared sense are synonyms
        for (i, a) in translations.iter().enumerate() {
            for b in &translations[i + 1..] {
                let syn = m.are_synonyms(a, b).unwrap_or(false);
                sink.check(syn, TheoremId::S2w, w, || format!("SSA holds but {a} and {b} are not synonyms"));
            }
        }
    }
    if f.spa {
        let poly = m.is_polysemous(w).unwrap_or(false);
        sink.check(poly, TheoremId::S2w, w, || {
            format!("SPA holds with {} translations but the word is not polysemous", p.translation_count)
        });
    }
}

/// Every (e, f) pair that co-occurs in some synset, as seen from either
/// side's index, must report the same shared-synset count both ways.
fn check_pairs(m: &MultiWordnet, sink: &mut Sink) {
    let d = sink.d;
    let mut pairs: BTreeSet<(WordKey, WordKey)> = BTreeSet::new();
    for e in m.words_in_language(d.source) {
        for s in m.senses_of(e) {
            pairs.extend(s.words_in(d.target).iter().map(|f| (e.clone(), f.clone())));
        }
    }
    for f in m.words_in_language(d.target) {
        for s in m.senses_of(f) {
            pairs.extend(s.words_in(d.source).iter().map(|e| (e.clone(), f.clone())));
        }
    }
    for (e, f) in &pairs {
        let ef = m.shared_synsets(e, f).map(|v| v.len()).unwrap_or(0);
        let fe = m.shared_synsets(f, e).map(|v| v.len()).unwrap_or(0);
        sink.check(ef == fe, TheoremId::Bidir, format!("{e}/{f}"), || {
            format!("shared synsets: {ef} from {e}, {fe} from {f}")
        });
    }
}

/// Runs every check for the direction `d` and returns all violations, in a
/// deterministic order.
pub fn verify(m: &MultiWordnet, d: Direction) -> Vec<ViolationReport> {
    let mut sink = Sink { d, out: Vec::new() };

    for issue in m.check_index() {
        sink.check(false, TheoremId::Structure, "index", || issue.to_string());
    }

    let profiles: Vec<AssumptionProfile> = m
        .words_in_language(d.source)
        .iter()
        .filter_map(|e| profile(m, d, e).ok())
        .collect();
    for p in &profiles {
        check_word(m, p, &mut sink);
    }

    let all_otps = profiles.iter().all(|p| p.flags.otps);
    if owpc(m, d.target) {
        for p in profiles.iter().filter(|p| !p.flags.otps) {
            sink.check(false, TheoremId::O5, &p.word, || {
                format!("{} has one word per synset but {} lacks OTPS", d.target, p.word)
            });
        }
    }
    let covered = gap_covered(m, d.target, d.source);
    sink.check(!(all_otps && covered) || owpc(m, d.target), TheoremId::O6, d.target, || {
        format!("OTPS everywhere and {} covered by {} but OWPC fails", d.target, d.source)
    });

    let forward = profiles.iter().all(|p| p.flags.ospt);
    let backward = m
        .words_in_language(d.target)
        .iter()
        .filter_map(|f| profile(m, d.reversed(), f).ok())
        .all(|p| p.flags.ospt);
    sink.check(forward == backward, TheoremId::Bidir, d, || {
        format!("global OSPT is {forward} for {d} but {backward} for {}", d.reversed())
    });
    check_pairs(m, &mut sink);

    sink.out
}
