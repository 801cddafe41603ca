//! Seeded fuzzing of the theorem checks over generated multi-wordnets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::generate::{generate, validate_shape, GenError, GenParams, LanguageParams};
use super::rng::SplitMix64;
use super::verify::{verify, TheoremId, ViolationReport};
use crate::assumptions::{profile, Assumption, Direction};
use crate::model::{MultiWordnet, Pos, WordKey};
use crate::reports::Percent;

const DEFAULT_TEMPLATE: &str = include_str!("../../../../fixtures/fuzz_default.json");

/// Generation parameters minus the seed, with a range for the synset count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzTemplate {
    pub name: String,
    pub min_synsets: usize,
    pub max_synsets: usize,
    pub reuse_bias: f64,
    pub parts_of_speech: Vec<Pos>,
    pub languages: Vec<LanguageParams>,
}

impl FuzzTemplate {
    /// The checked-in `default-3lang` template.
    pub fn default_template() -> FuzzTemplate {
        FuzzTemplate::from_json(DEFAULT_TEMPLATE).expect("bundled template is valid")
    }

    pub fn from_json(text: &str) -> Result<FuzzTemplate, GenError> {
        let t: FuzzTemplate =
            serde_json::from_str(text).map_err(|e| GenError::Template(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.min_synsets > self.max_synsets {
            return Err(GenError::BadSynsetRange(self.min_synsets, self.max_synsets));
        }
        validate_shape(&self.languages, self.reuse_bias, &self.parts_of_speech)
    }

    /// Parameters of case `seed`: the synset count and the generator seed
    /// are both drawn from a generator seeded with `seed`.
    pub fn params_for(&self, seed: u64) -> GenParams {
        let mut rng = SplitMix64::new(seed);
        let span = (self.max_synsets - self.min_synsets + 1) as u64;
        let synset_count = self.min_synsets + rng.below(span) as usize;
        GenParams {
            seed: rng.next_u64(),
            synset_count,
            languages: self.languages.clone(),
            reuse_bias: self.reuse_bias,
            parts_of_speech: self.parts_of_speech.clone(),
        }
    }

    pub fn directions(&self) -> Vec<Direction> {
        let mut out = Vec::new();
        for a in &self.languages {
            for b in &self.languages {
                if let Ok(d) = Direction::new(a.code, b.code) {
                    out.push(d);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FuzzOptions {
    /// Corrupts every generated instance behind the model's back so the
    /// harness can prove it reports failures.
    #[doc(hidden)]
    pub inject_corruption: bool,
}

/// Assumption satisfaction counts over all source words of one direction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectionStats {
    pub source_words: usize,
    pub eligible_words: usize,
    pub satisfied: BTreeMap<Assumption, usize>,
}

impl DirectionStats {
    fn merge(&mut self, other: &DirectionStats) {
        self.source_words += other.source_words;
        self.eligible_words += other.eligible_words;
        for (a, n) in &other.satisfied {
            *self.satisfied.entry(*a).or_default() += n;
        }
    }

    pub fn frequency(&self, a: Assumption) -> Percent {
        Percent::from_counts(
            self.satisfied.get(&a).copied().unwrap_or(0),
            self.source_words,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzFailure {
    pub seed: u64,
    pub violations: Vec<ViolationReport>,
    pub instance: MultiWordnet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub template: String,
    pub base_seed: u64,
    pub cases: usize,
    pub violation_count: usize,
    pub violations_by_theorem: BTreeMap<TheoremId, usize>,
    pub directions: BTreeMap<Direction, DirectionStats>,
    pub first_failure: Option<FuzzFailure>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        let by_theorem: BTreeMap<&str, usize> = TheoremId::ALL
            .iter()
            .map(|t| (t.name(), self.violations_by_theorem.get(t).copied().unwrap_or(0)))
            .collect();
        let directions: BTreeMap<String, Value> = self
            .directions
            .iter()
            .map(|(d, s)| {
                let freq: BTreeMap<&str, Percent> = Assumption::ALL
                    .iter()
                    .map(|&a| (a.name(), s.frequency(a)))
                    .collect();
                let v = json!({
                    "source_words": s.source_words,
                    "eligible_words": s.eligible_words,
                    "satisfaction_percent": freq,
                });
                (d.to_string(), v)
            })
            .collect();
        let first = self.first_failure.as_ref().map(|f| {
            json!({
                "seed": f.seed,
                "synset_count": f.instance.len(),
                "violations": f.violations,
            })
        });
        json!({
            "template": self.template,
            "base_seed": self.base_seed,
            "cases": self.cases,
            "violation_count": self.violation_count,
            "violations_by_theorem": by_theorem,
            "directions": directions,
            "first_failure": first,
        })
    }
}

struct CaseOutcome {
    seed: u64,
    stats: Vec<DirectionStats>,
    violations: Vec<ViolationReport>,
    instance: MultiWordnet,
}

fn corrupt(m: &mut MultiWordnet) {
    let Some(s) = m.synsets().first() else { return };
    let (id, pos) = (s.id().to_string(), s.pos());
    let lang = *m.languages().iter().next().expect("non-empty synset has a language");
    let word = WordKey::new(lang, "unindexed", pos).expect("valid lemma");
    m.inject_unindexed_member(&id, word);
}

fn run_case(template: &FuzzTemplate, dirs: &[Direction], seed: u64, opts: FuzzOptions) -> Result<CaseOutcome, GenError> {
    let mut m = generate(&template.params_for(seed))?;
    if opts.inject_corruption {
        corrupt(&mut m);
    }
    let mut stats = Vec::with_capacity(dirs.len());
    let mut violations = Vec::new();
    for &d in dirs {
        let mut st = DirectionStats::default();
        for e in m.words_in_language(d.source) {
            let Ok(p) = profile(&m, d, e) else { continue };
            st.source_words += 1;
            st.eligible_words += p.eligible as usize;
            for a in Assumption::ALL {
                *st.satisfied.entry(a).or_default() += p.flags.get(a) as usize;
            }
        }
        stats.push(st);
        violations.extend(verify(&m, d));
    }
    Ok(CaseOutcome {
        seed,
        stats,
        violations,
        instance: m,
    })
}

pub fn fuzz(template: &FuzzTemplate, n_cases: usize, base_seed: u64) -> Result<FuzzReport, GenError> {
    fuzz_with(template, n_cases, base_seed, FuzzOptions::default())
}

/// Runs cases `base_seed..base_seed + n_cases` in parallel; the report is
/// independent of scheduling.
pub fn fuzz_with(
    template: &FuzzTemplate,
    n_cases: usize,
    base_seed: u64,
    opts: FuzzOptions,
) -> Result<FuzzReport, GenError> {
    if n_cases == 0 {
        return Err(GenError::NoCases);
    }
    template.validate()?;
    let dirs = template.directions();
    let outcomes: Vec<CaseOutcome> = (0..n_cases as u64)
        .into_par_iter()
        .map(|i| run_case(template, &dirs, base_seed.wrapping_add(i), opts))
        .collect::<Result<_, _>>()?;

    let mut report = FuzzReport {
        template: template.name.clone(),
        base_seed,
        cases: n_cases,
        violation_count: 0,
        violations_by_theorem: BTreeMap::new(),
        directions: dirs.iter().map(|&d| (d, DirectionStats::default())).collect(),
        first_failure: None,
    };
    for case in outcomes {
        for (d, st) in dirs.iter().zip(&case.stats) {
            report.directions.get_mut(d).expect("direction present").merge(st);
        }
        report.violation_count += case.violations.len();
        for v in &case.violations {
            *report.violations_by_theorem.entry(v.theorem).or_default() += 1;
        }
        if report.first_failure.is_none() && !case.violations.is_empty() {
            report.first_failure = Some(FuzzFailure {
                seed: case.seed,
                violations: case.violations,
                instance: case.instance,
            });
        }
    }
    Ok(report)
}
