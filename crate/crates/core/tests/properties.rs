mod common;

use common::{flatten, tenths_half_even, Oracle};
use proptest::prelude::*;

use mwsense::annotate::{annotate_tokens, AnnotationSummary, Decision, Granularity};
use mwsense::ingest::{multiwordnet_to_string, parse_multiwordnet, ClusterMap};
use mwsense::lab::{generate, synthetic_bitext, verify, GenParams, LanguageParams};
use mwsense::reports::{table1, table2, Combination, Table1Row};
use mwsense::{profile, Direction, LanguageCode, Pos};

fn language(code: &'static str) -> impl Strategy<Value = LanguageParams> {
    (1usize..25, 0usize..3, 0usize..4, 0.0f64..=1.0).prop_map(move |(pool, min, extra, zero)| {
        LanguageParams {
            code: LanguageCode::new(code).unwrap(),
            pool_size: pool,
            min_words: min,
            max_words: min + extra,
            zero_probability: zero,
        }
    })
}

fn params() -> impl Strategy<Value = GenParams> {
    (
        any::<u64>(),
        0usize..50,
        language("en"),
        language("fr"),
        proptest::option::of(language("it")),
        0.0f64..=1.0,
        prop::sample::subsequence(vec![Pos::Noun, Pos::Verb, Pos::Adj], 1..=3),
    )
        .prop_map(|(seed, count, en, mut fr, it, reuse, pos)| {
            // keep at least one language able to hold words
            fr.zero_probability = fr.zero_probability.min(0.9);
            fr.max_words = fr.max_words.max(1);
            GenParams {
                seed,
                synset_count: count,
                languages: [Some(en), Some(fr), it].into_iter().flatten().collect(),
                reuse_bias: reuse,
                parts_of_speech: pos,
            }
        })
}

fn directions(p: &GenParams) -> Vec<Direction> {
    let codes: Vec<_> = p.languages.iter().map(|l| l.code).collect();
    let mut out = Vec::new();
    for &a in &codes {
        for &b in &codes {
            if a != b {
                out.push(Direction::new(a, b).unwrap());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_models_are_consistent(p in params()) {
        let m = generate(&p).unwrap();
        prop_assert_eq!(m.len(), p.synset_count);
        prop_assert!(m.check_index().is_empty());
        let oracle = Oracle::from_jsonl(&multiwordnet_to_string(&m));
        for w in m.words() {
            let ids = m.synsets_of(w);
            let expected: Vec<String> = oracle
                .senses(w.language().as_str(), w.lemma(), w.pos().code())
                .iter()
                .map(|s| s.id.clone())
                .collect();
            prop_assert_eq!(ids, expected);
        }
        for s in m.synsets() {
            prop_assert!(!s.words().is_empty());
            prop_assert!(s.words().iter().all(|w| w.pos() == s.pos()));
        }
    }

    #[test]
    fn round_trip_is_identity(p in params()) {
        let m = generate(&p).unwrap();
        let text = multiwordnet_to_string(&m);
        let back = parse_multiwordnet(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(multiwordnet_to_string(&back), text);
    }

    #[test]
    fn no_theorem_violations(p in params()) {
        let m = generate(&p).unwrap();
        for d in directions(&p) {
            let v = verify(&m, d);
            prop_assert!(v.is_empty(), "{:?}", v);
        }
    }

    #[test]
    fn profiles_match_oracle(p in params()) {
        let m = generate(&p).unwrap();
        let oracle = Oracle::from_jsonl(&multiwordnet_to_string(&m));
        for d in directions(&p) {
            for e in m.words_in_language(d.source) {
                let got = flatten(&profile(&m, d, e).unwrap());
                let want = oracle.profile(d.source.as_str(), d.target.as_str(), e.lemma(), e.pos().code());
                prop_assert_eq!(got, want, "{} {}", d, e);
            }
        }
    }

    #[test]
    fn tables_match_oracle(p in params()) {
        let m = generate(&p).unwrap();
        let oracle = Oracle::from_jsonl(&multiwordnet_to_string(&m));
        for d in directions(&p) {
            let eligible = oracle.eligible(d.source.as_str(), d.target.as_str());
            let (Ok(t1), Ok(t2)) = (table1(&m, d), table2(&m, d)) else {
                prop_assert!(eligible.is_empty());
                continue;
            };
            let total = eligible.len() as u64;
            prop_assert_eq!(t1.eligible_word_count as u64, total);
            let ospt = eligible.values().filter(|p| p.ospt).count() as u64;
            let gpa = eligible.values().filter(|p| p.gpa).count() as u64;
            prop_assert_eq!(t1.percent(Table1Row::OsptPsa).tenths(), tenths_half_even(ospt, total));
            prop_assert_eq!(t1.percent(Table1Row::Gpa).tenths(), tenths_half_even(gpa, total));
            let cells: usize = Combination::all().iter().map(|&c| t2.count(c)).sum();
            prop_assert_eq!(cells as u64, total);
            let bij = eligible.values().filter(|p| p.ospt && p.otps && p.nolg).count();
            prop_assert_eq!(t2.count(Combination::BIJECTION), bij);
        }
    }

    #[test]
    fn annotation_is_sound(p in params(), seed in any::<u64>(), labels in 1u8..4) {
        let m = generate(&p).unwrap();
        let oracle = Oracle::from_jsonl(&multiwordnet_to_string(&m));
        let d = Direction::new(p.languages[0].code, p.languages[1].code).unwrap();
        let Ok(tokens) = synthetic_bitext(&m, d, 200, seed) else {
            return Ok(());
        };
        let results = annotate_tokens(&m, d, &tokens, Granularity::Sense);
        let mut singleton = 0;
        for r in &results {
            let t = r.token;
            let shared = oracle.shared(
                d.source.as_str(), t.source.lemma(), d.target.as_str(), &t.target_lemma, t.source.pos().code(),
            );
            singleton += (shared.len() == 1) as usize;
            if let Decision::Tagged(id) = &r.decision {
                prop_assert_eq!(Some(id), t.gold_synset_id.as_ref());
            }
        }
        prop_assert_eq!(AnnotationSummary::of(&results).tagged, singleton);

        // any cluster map tags at least what the sense level tags
        let clusters: ClusterMap = m
            .synsets()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id().to_string(), format!("c{}", i % labels as usize)))
            .collect();
        let coarse = annotate_tokens(&m, d, &tokens, Granularity::Homonym(&clusters));
        for (fine, coarse) in results.iter().zip(&coarse) {
            if let Decision::Tagged(id) = &fine.decision {
                let label = clusters.get(id).unwrap().to_string();
                prop_assert_eq!(&coarse.decision, &Decision::Tagged(label));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(p in params()) {
        let a = multiwordnet_to_string(&generate(&p).unwrap());
        let b = multiwordnet_to_string(&generate(&p).unwrap());
        prop_assert_eq!(a, b);
    }
}
