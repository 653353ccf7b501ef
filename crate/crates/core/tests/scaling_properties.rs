use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;

use wordscores_core::corpus::{build_matrix, Corpus, Document, Role, TermDocumentMatrix};
use wordscores_core::scaling::{
    extreme_anchors, lbg_transform, mv_transform, score_virgin, train, word_probabilities, Anchor, FrequencyBasis,
    ReferenceScores, ReferenceSet, TransformSpec, Variant,
};
use wordscores_core::stats::{mean, population_sd};

type Q = Ratio<i128>;

fn matrix(role: Role, docs: &[Vec<String>], prefix: &str) -> TermDocumentMatrix {
    let docs = docs
        .iter()
        .enumerate()
        .map(|(i, t)| Document::new(format!("{prefix}{i}"), "XX", 2004).with_tokens(t.iter().cloned()))
        .collect();
    build_matrix(&Corpus::new(role, docs).unwrap()).unwrap()
}

fn reference(docs: &[Vec<String>], scores: &[i64]) -> ReferenceSet {
    let mut s = ReferenceScores::new();
    for (i, &a) in scores.iter().enumerate() {
        s.insert(format!("R{i}"), "d", a as f64).unwrap();
    }
    ReferenceSet::new(matrix(Role::Reference, docs, "R"), s).unwrap()
}

fn doc(max_words: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec((0..max_words).prop_map(|i| format!("w{i}")), len)
}

/// Reference texts with distinct integer scores, and virgin texts.
fn corpus() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<i64>, Vec<Vec<String>>)> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(r, v)| {
        (
            prop::collection::vec(doc(8, 1..12), r),
            prop::collection::btree_set(-20i64..20, r).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
            prop::collection::vec(doc(10, 1..12), v),
        )
    })
}

/// Literal loops over words and documents in exact arithmetic.
fn brute_force(reference: &[Vec<String>], scores: &[i64], virgin: &[String], co_occurring: bool) -> Option<Q> {
    let mut wordscore: BTreeMap<&str, Q> = BTreeMap::new();
    for r in reference {
        for w in r {
            if wordscore.contains_key(w.as_str()) {
                continue;
            }
            let freq: Vec<Q> = reference
                .iter()
                .map(|d| Q::new(d.iter().filter(|t| *t == w).count() as i128, d.len() as i128))
                .collect();
            let total: Q = freq.iter().copied().sum();
            let mut s = Q::from_integer(0);
            for (f, a) in freq.iter().zip(scores) {
                s += f / total * Q::from_integer(*a as i128);
            }
            wordscore.insert(w, s);
        }
    }
    let scored = virgin.iter().filter(|t| wordscore.contains_key(t.as_str())).count() as i128;
    if scored == 0 {
        return None;
    }
    let denom = if co_occurring { scored } else { virgin.len() as i128 };
    let mut raw = Q::from_integer(0);
    for t in virgin {
        if let Some(s) = wordscore.get(t.as_str()) {
            raw += s / Q::from_integer(denom);
        }
    }
    Some(raw)
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

proptest! {
    #[test]
    fn raw_scores_match_exact_oracle((refs, scores, virgins) in corpus()) {
        let set = reference(&refs, &scores);
        let table = train(&set, "d", FrequencyBasis::Relative).unwrap();
        let m = matrix(Role::Virgin, &virgins, "V");
        for variant in Variant::ALL {
            let got = wordscores_core::scaling::score_virgin_each(&m, &table, variant);
            for (v, g) in virgins.iter().zip(got) {
                match brute_force(&refs, &scores, v, variant == Variant::CoOccurring) {
                    Some(want) => prop_assert!((g.unwrap().raw - to_f64(want)).abs() <= 1e-12),
                    None => prop_assert!(g.is_err()),
                }
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one((refs, scores, _v) in corpus()) {
        let set = reference(&refs, &scores);
        let p = word_probabilities(&set, FrequencyBasis::Relative).unwrap();
        for (_, row) in p.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scores_are_convex((refs, scores, _v) in corpus()) {
        let set = reference(&refs, &scores);
        let table = train(&set, "d", FrequencyBasis::Relative).unwrap();
        let lo = *scores.iter().min().unwrap() as f64;
        let hi = *scores.iter().max().unwrap() as f64;
        prop_assert!(table.iter().all(|(_, s)| (lo..=hi).contains(&s)));
        let s_lo = table.iter().map(|(_, s)| s).fold(f64::INFINITY, f64::min);
        let s_hi = table.iter().map(|(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
        for e in score_virgin(set.matrix(), &table, Variant::CoOccurring).unwrap() {
            prop_assert!(e.raw >= s_lo - 1e-12 && e.raw <= s_hi + 1e-12);
            prop_assert!(e.ci_low <= e.raw && e.raw <= e.ci_high);
        }
    }

    #[test]
    fn variants_agree_without_unscored_words((refs, scores, _v) in corpus(), picks in prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 1..15), 1..4)) {
        let set = reference(&refs, &scores);
        let table = train(&set, "d", FrequencyBasis::Relative).unwrap();
        let known: Vec<String> = table.iter().map(|(w, _)| w.to_owned()).collect();
        let virgins: Vec<Vec<String>> = picks.iter().map(|p| p.iter().map(|i| i.get(&known).clone()).collect()).collect();
        let m = matrix(Role::Virgin, &virgins, "V");
        let t = score_virgin(&m, &table, Variant::TotalWords).unwrap();
        let c = score_virgin(&m, &table, Variant::CoOccurring).unwrap();
        for (a, b) in t.iter().zip(&c) {
            prop_assert_eq!(a.raw.to_bits(), b.raw.to_bits());
        }
    }

    #[test]
    fn lbg_fixes_mean_and_spread((refs, scores, _v) in corpus(), extra in prop::collection::vec(doc(8, 3..12), 2..6)) {
        let set = reference(&refs, &scores);
        let table = train(&set, "d", FrequencyBasis::Relative).unwrap();
        let m = matrix(Role::Virgin, &extra, "V");
        let Ok(est) = score_virgin(&m, &table, Variant::TotalWords) else { return Ok(()) };
        let raw: Vec<f64> = est.iter().map(|e| e.raw).collect();
        prop_assume!(population_sd(&raw) > 1e-9);
        let (out, _) = lbg_transform(&est, &set, "d").unwrap();
        let t: Vec<f64> = out.iter().map(|e| e.transformed.as_ref().unwrap().score).collect();
        prop_assert!((mean(&t) - mean(&raw)).abs() < 1e-10);
        prop_assert!((population_sd(&t) - population_sd(&set.scores_on("d").unwrap())).abs() < 1e-10);
    }

    #[test]
    fn mv_recovers_anchors((refs, scores, _v) in corpus()) {
        let set = reference(&refs, &scores);
        let table = train(&set, "d", FrequencyBasis::Relative).unwrap();
        let (lo, hi) = extreme_anchors(&set, "d").unwrap();
        for variant in Variant::ALL {
            let as_virgin = score_virgin(set.matrix(), &table, variant).unwrap();
            let Ok((out, _)) = mv_transform(&as_virgin, &set, &table, (&lo, &hi), variant) else { continue };
            for e in out.iter().filter(|e| e.document == lo || e.document == hi) {
                prop_assert_eq!(e.transformed.as_ref().unwrap().score, set.score(&e.document, "d").unwrap());
            }
        }
    }

    #[test]
    fn mv_ignores_affine_rescaling_of_raw_scores(
        r1 in -5.0f64..5.0, gap in 0.1f64..5.0, a1 in -10.0f64..10.0, a2 in -10.0f64..10.0,
        raw in -10.0f64..10.0, scale in 0.1f64..10.0, shift in -10.0f64..10.0,
    ) {
        prop_assume!((a1 - a2).abs() > 1e-3);
        let spec = |f: &dyn Fn(f64) -> f64| TransformSpec::Mv {
            first: Anchor { document: "A".into(), raw: f(r1), assigned: a1 },
            second: Anchor { document: "B".into(), raw: f(r1 + gap), assigned: a2 },
        };
        let plain = spec(&|x| x).apply(raw);
        let moved = spec(&|x| scale * x + shift).apply(scale * raw + shift);
        prop_assert!((plain - moved).abs() <= 1e-9 * (1.0 + plain.abs()));
    }
}
