//! The Wordscores estimator.
//!
//! Reference texts with known positions turn into per-word scores; virgin
//! texts are scored as the frequency-weighted mean of the scores of their
//! words. Raw virgin scores shrink toward the middle of the scale, so two
//! affine transforms map them back onto the reference metric:
//!
//! - LBG keeps the mean of the virgin raw scores and stretches their spread
//!   to the spread of the reference scores.
//! - Martin-Vanberg (MV) pins two anchor reference texts to their assigned
//!   scores and places everything else relative to them.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Document, TermDocumentMatrix};
use crate::error::{Error, Result};
use crate::stats;
use crate::validation::{self, ConcordanceResult};

/// Two-sided 95% normal critical value used for raw-score intervals.
pub const Z_95: f64 = 1.96;

/// Exogenous positions of reference documents, keyed by dimension and then
/// by document id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceScores {
    by_dimension: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ReferenceScores {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        document: impl Into<String>,
        dimension: impl Into<String>,
        score: f64,
    ) -> Result<()> {
        let document = document.into();
        let dimension = dimension.into();
        let slot = self.by_dimension.entry(dimension.clone()).or_default();
        if slot.contains_key(&document) {
            return Err(Error::DuplicateKey(format!("({document}, {dimension})")));
        }
        slot.insert(document, score);
        Ok(())
    }

    pub fn get(&self, document: &str, dimension: &str) -> Option<f64> {
        self.by_dimension.get(dimension)?.get(document).copied()
    }

    pub fn dimensions(&self) -> impl Iterator<Item = &str> {
        self.by_dimension.keys().map(String::as_str)
    }

    /// Document ids scored on `dimension`.
    pub fn documents_on(&self, dimension: &str) -> Vec<&str> {
        self.by_dimension
            .get(dimension)
            .map(|m| m.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    matrix: TermDocumentMatrix,
    scores: ReferenceScores,
}

impl ReferenceSet {
    pub fn new(matrix: TermDocumentMatrix, scores: ReferenceScores) -> Result<Self> {
        if matrix.n_documents() < 2 {
            return Err(Error::InvalidReference(format!(
                "need at least 2 reference documents, got {}",
                matrix.n_documents()
            )));
        }
        Ok(ReferenceSet { matrix, scores })
    }

    pub fn matrix(&self) -> &TermDocumentMatrix {
        &self.matrix
    }

    pub fn scores(&self) -> &ReferenceScores {
        &self.scores
    }

    pub fn score(&self, document: &str, dimension: &str) -> Result<f64> {
        self.scores.get(document, dimension).ok_or_else(|| Error::MissingScore {
            document: document.to_owned(),
            dimension: dimension.to_owned(),
        })
    }

    /// Assigned scores in matrix document order.
    pub fn scores_on(&self, dimension: &str) -> Result<Vec<f64>> {
        self.matrix.documents().iter().map(|d| self.score(d, dimension)).collect()
    }
}

/// How reference word frequencies enter the word probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyBasis {
    /// Count divided by the reference text's token total.
    #[default]
    Relative,
    /// Plain counts, which favour long reference texts.
    Raw,
}

/// `P(r | w)`: for each word, how its (relative) frequency is spread over
/// the reference texts. Rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WordProbabilityTable {
    words: Vec<String>,
    documents: Vec<String>,
    probabilities: Vec<Vec<f64>>,
}

impl WordProbabilityTable {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn documents(&self) -> &[String] {
        &self.documents
    }

    pub fn row(&self, word: &str) -> Option<&[f64]> {
        let i = self.words.binary_search_by(|w| w.as_str().cmp(word)).ok()?;
        Some(&self.probabilities[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words.iter().map(String::as_str).zip(self.probabilities.iter().map(Vec::as_slice))
    }
}

pub fn word_probabilities(
    reference: &ReferenceSet,
    basis: FrequencyBasis,
) -> Result<WordProbabilityTable> {
    let m = reference.matrix();
    if m.n_words() == 0 {
        return Err(Error::EmptyVocabulary);
    }
    let totals = m.totals();
    let mut words = Vec::with_capacity(m.n_words());
    let mut probabilities = Vec::with_capacity(m.n_words());
    for (word, row) in m.vocabulary().iter().zip(m.counts()) {
        let freqs: Vec<f64> = row
            .iter()
            .zip(totals)
            .map(|(&c, &t)| match basis {
                FrequencyBasis::Raw => c as f64,
                FrequencyBasis::Relative if t == 0 => 0.0,
                FrequencyBasis::Relative => c as f64 / t as f64,
            })
            .collect();
        let sum: f64 = freqs.iter().sum();
        if sum <= 0.0 {
            continue;
        }
        words.push(word.clone());
        probabilities.push(freqs.into_iter().map(|f| f / sum).collect());
    }
    Ok(WordProbabilityTable {
        words,
        documents: m.documents().to_vec(),
        probabilities,
    })
}

/// Per-word scores on one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WordScoreTable {
    dimension: String,
    scores: BTreeMap<String, f64>,
}

impl WordScoreTable {
    pub fn from_scores(dimension: impl Into<String>, scores: BTreeMap<String, f64>) -> Self {
        WordScoreTable { dimension: dimension.into(), scores }
    }

    pub fn dimension(&self) -> &str {
        &self.dimension
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(w, &s)| (w.as_str(), s))
    }
}

/// Word score = probability-weighted mean of the reference scores. Results
/// are clamped into the reference range to absorb rounding.
pub fn word_scores(
    probs: &WordProbabilityTable,
    reference: &ReferenceSet,
    dimension: &str,
) -> Result<WordScoreTable> {
    let assigned: Vec<f64> = probs
        .documents
        .iter()
        .map(|d| reference.score(d, dimension))
        .collect::<Result<_>>()?;
    let lo = assigned.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = assigned.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scores = probs
        .rows()
        .map(|(w, p)| {
            let s: f64 = p.iter().zip(&assigned).map(|(p, a)| p * a).sum();
            (w.to_owned(), s.clamp(lo, hi))
        })
        .collect();
    Ok(WordScoreTable { dimension: dimension.to_owned(), scores })
}

/// Word probabilities and word scores in one step.
pub fn train(
    reference: &ReferenceSet,
    dimension: &str,
    basis: FrequencyBasis,
) -> Result<WordScoreTable> {
    word_scores(&word_probabilities(reference, basis)?, reference, dimension)
}

/// Normalization of virgin word frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// Count over every token of the virgin text.
    TotalWords,
    /// Count over the virgin tokens that have a word score.
    CoOccurring,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::TotalWords, Variant::CoOccurring];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::TotalWords => "total",
            Variant::CoOccurring => "cooccur",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Variant::TotalWords),
            "cooccur" => Ok(Variant::CoOccurring),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformKind {
    Lbg,
    Mv,
}

impl TransformKind {
    pub const ALL: [TransformKind; 2] = [TransformKind::Lbg, TransformKind::Mv];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Lbg => "lbg",
            TransformKind::Mv => "mv",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lbg" => Ok(TransformKind::Lbg),
            "mv" => Ok(TransformKind::Mv),
            other => Err(Error::InvalidArgument(format!("unknown transform `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transformed {
    pub kind: TransformKind,
    pub score: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirginEstimate {
    pub document: String,
    pub raw: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub transformed: Option<Transformed>,
    /// Tokens of the document that carry a word score.
    pub scored_tokens: u64,
}

/// Scores one column of `virgin`.
///
/// The standard error follows the original LBG estimator: the
/// frequency-weighted variance of the word scores around the raw score,
/// divided by the number of scored tokens.
pub fn score_document(
    virgin: &TermDocumentMatrix,
    document: usize,
    table: &WordScoreTable,
    variant: Variant,
) -> Result<VirginEstimate> {
    if table.is_empty() {
        return Err(Error::EmptyWordScores);
    }
    let id = &virgin.documents()[document];
    let scored: Vec<(u64, f64)> = virgin
        .column(document)
        .filter_map(|(w, c)| table.get(w).map(|s| (c, s)))
        .collect();
    let scored_tokens: u64 = scored.iter().map(|&(c, _)| c).sum();
    if scored_tokens == 0 {
        return Err(Error::Unscorable(id.clone()));
    }
    let denom = match variant {
        Variant::TotalWords => virgin.totals()[document],
        Variant::CoOccurring => scored_tokens,
    } as f64;
    let raw: f64 = scored.iter().map(|&(c, s)| c as f64 / denom * s).sum();
    let dispersion: f64 = scored
        .iter()
        .map(|&(c, s)| c as f64 / denom * (s - raw) * (s - raw))
        .sum();
    let se = libm::sqrt(dispersion / scored_tokens as f64);
    Ok(VirginEstimate {
        document: id.clone(),
        raw,
        se,
        ci_low: raw - Z_95 * se,
        ci_high: raw + Z_95 * se,
        transformed: None,
        scored_tokens,
    })
}

/// Scores every virgin document, one result per document in matrix order.
pub fn score_virgin_each(
    virgin: &TermDocumentMatrix,
    table: &WordScoreTable,
    variant: Variant,
) -> Vec<Result<VirginEstimate>> {
    (0..virgin.n_documents()).map(|d| score_document(virgin, d, table, variant)).collect()
}

/// Scores every virgin document; the first unscorable document is an error.
pub fn score_virgin(
    virgin: &TermDocumentMatrix,
    table: &WordScoreTable,
    variant: Variant,
) -> Result<Vec<VirginEstimate>> {
    score_virgin_each(virgin, table, variant).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub document: String,
    /// Raw score of the anchor text scored as if it were virgin.
    pub raw: f64,
    pub assigned: f64,
}

/// Parameters of a fitted transform.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec {
    Lbg { virgin_mean: f64, reference_sd: f64, virgin_sd: f64 },
    Mv { first: Anchor, second: Anchor },
}

impl TransformSpec {
    pub fn kind(&self) -> TransformKind {
        match self {
            TransformSpec::Lbg { .. } => TransformKind::Lbg,
            TransformSpec::Mv { .. } => TransformKind::Mv,
        }
    }

    pub fn apply(&self, raw: f64) -> f64 {
        match self {
            TransformSpec::Lbg { virgin_mean, reference_sd, virgin_sd } => {
                (raw - virgin_mean) * (reference_sd / virgin_sd) + virgin_mean
            }
            TransformSpec::Mv { first, second } => {
                // Interpolation form: t = 0 and t = 1 give the assigned
                // anchor scores bit for bit.
                let t = (raw - first.raw) / (second.raw - first.raw);
                (1.0 - t) * first.assigned + t * second.assigned
            }
        }
    }

    fn apply_to(&self, estimates: &[VirginEstimate]) -> Vec<VirginEstimate> {
        estimates
            .iter()
            .map(|e| {
                let a = self.apply(e.ci_low);
                let b = self.apply(e.ci_high);
                VirginEstimate {
                    transformed: Some(Transformed {
                        kind: self.kind(),
                        score: self.apply(e.raw),
                        ci_low: a.min(b),
                        ci_high: a.max(b),
                    }),
                    ..e.clone()
                }
            })
            .collect()
    }
}

/// LBG rescaling. Population SDs are used for both the reference scores and
/// the virgin raw scores.
pub fn lbg_transform(
    estimates: &[VirginEstimate],
    reference: &ReferenceSet,
    dimension: &str,
) -> Result<(Vec<VirginEstimate>, TransformSpec)> {
    if estimates.len() < 2 {
        return Err(Error::DegenerateTransform(format!(
            "LBG needs at least 2 virgin texts, got {}",
            estimates.len()
        )));
    }
    let raw: Vec<f64> = estimates.iter().map(|e| e.raw).collect();
    let virgin_sd = stats::population_sd(&raw);
    if !(virgin_sd > 0.0) {
        return Err(Error::DegenerateTransform("virgin raw scores have zero variance".to_owned()));
    }
    let reference_sd = stats::population_sd(&reference.scores_on(dimension)?);
    let spec = TransformSpec::Lbg { virgin_mean: stats::mean(&raw), reference_sd, virgin_sd };
    Ok((spec.apply_to(estimates), spec))
}

/// The reference documents with the lowest and highest assigned score on
/// `dimension` (first in matrix order on ties).
pub fn extreme_anchors(reference: &ReferenceSet, dimension: &str) -> Result<(String, String)> {
    let scores = reference.scores_on(dimension)?;
    let docs = reference.matrix().documents();
    let mut lo = 0;
    let mut hi = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[lo] {
            lo = i;
        }
        if s > scores[hi] {
            hi = i;
        }
    }
    Ok((docs[lo].clone(), docs[hi].clone()))
}

fn fit_mv(
    reference: &ReferenceSet,
    table: &WordScoreTable,
    anchors: (&str, &str),
    variant: Variant,
) -> Result<TransformSpec> {
    let m = reference.matrix();
    let anchor = |id: &str| -> Result<Anchor> {
        let idx = m.document_index(id).ok_or_else(|| Error::UnknownDocument(id.to_owned()))?;
        let est = score_document(m, idx, table, variant)?;
        Ok(Anchor {
            document: id.to_owned(),
            raw: est.raw,
            assigned: reference.score(id, table.dimension())?,
        })
    };
    let first = anchor(anchors.0)?;
    let second = anchor(anchors.1)?;
    if first.raw == second.raw || first.assigned == second.assigned {
        return Err(Error::DegenerateAnchors {
            first: first.document,
            second: second.document,
        });
    }
    Ok(TransformSpec::Mv { first, second })
}

/// Martin-Vanberg rescaling on two anchor reference texts. The anchors are
/// scored from the reference matrix with the same table and variant as the
/// virgin texts.
pub fn mv_transform(
    estimates: &[VirginEstimate],
    reference: &ReferenceSet,
    table: &WordScoreTable,
    anchors: (&str, &str),
    variant: Variant,
) -> Result<(Vec<VirginEstimate>, TransformSpec)> {
    let spec = fit_mv(reference, table, anchors, variant)?;
    Ok((spec.apply_to(estimates), spec))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub document: String,
    pub exogenous: f64,
    pub mv_score: f64,
    pub difference: f64,
    /// `None` when the exogenous score is zero.
    pub percent_difference: Option<f64>,
}

/// Re-scores the reference texts as virgin texts and compares their MV
/// placement with their assigned scores.
pub fn mv_tradeoff(
    reference: &ReferenceSet,
    table: &WordScoreTable,
    anchors: (&str, &str),
    variant: Variant,
) -> Result<Vec<TradeoffRow>> {
    let spec = fit_mv(reference, table, anchors, variant)?;
    let m = reference.matrix();
    (0..m.n_documents())
        .map(|d| {
            let est = score_document(m, d, table, variant)?;
            let exogenous = reference.score(&est.document, table.dimension())?;
            let mv_score = spec.apply(est.raw);
            let difference = mv_score - exogenous;
            Ok(TradeoffRow {
                document: est.document,
                exogenous,
                mv_score,
                difference,
                percent_difference: (exogenous != 0.0).then(|| 100.0 * difference / exogenous),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantPair {
    pub document: String,
    pub total_words: f64,
    pub co_occurring: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantComparison {
    pub rows: Vec<VariantPair>,
    /// `None` when there are too few documents or no spread.
    pub pearson: Option<f64>,
    pub concordance: Option<ConcordanceResult>,
}

/// Scores the same virgin texts under both frequency normalizations.
pub fn compare_variants(
    virgin: &TermDocumentMatrix,
    table: &WordScoreTable,
) -> Result<VariantComparison> {
    let total = score_virgin(virgin, table, Variant::TotalWords)?;
    let co = score_virgin(virgin, table, Variant::CoOccurring)?;
    let rows: Vec<VariantPair> = total
        .iter()
        .zip(&co)
        .map(|(t, c)| VariantPair {
            document: t.document.clone(),
            total_words: t.raw,
            co_occurring: c.raw,
            difference: t.raw - c.raw,
        })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.total_words).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.co_occurring).collect();
    Ok(VariantComparison {
        pearson: validation::pearson(&x, &y).ok(),
        concordance: validation::ccc(&x, &y).ok(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordScoreRow {
    pub word: String,
    pub frequency: u64,
    pub score: Option<f64>,
}

/// Distinct words of a tokenized document in first-occurrence order, with
/// their frequency and word score (`None` for unscored words).
pub fn export_wordscores(document: &Document, table: &WordScoreTable) -> Vec<WordScoreRow> {
    let mut rows: Vec<WordScoreRow> = Vec::new();
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &document.tokens {
        match index.get(t.as_str()) {
            Some(&i) => rows[i].frequency += 1,
            None => {
                index.insert(t.as_str(), rows.len());
                rows.push(WordScoreRow { word: t.clone(), frequency: 1, score: table.get(t) });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_matrix, Corpus, Role};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn matrix(role: Role, docs: &[(&str, &[&str])]) -> TermDocumentMatrix {
        let docs = docs
            .iter()
            .map(|(id, toks)| Document::new(*id, "XX", 2004).with_tokens(toks.iter().copied()))
            .collect();
        build_matrix(&Corpus::new(role, docs).unwrap()).unwrap()
    }

    fn toy() -> ReferenceSet {
        let m = matrix(
            Role::Reference,
            &[("R1", &["tax", "tax", "spend"]), ("R2", &["tax", "spend", "spend", "spend"])],
        );
        let mut s = ReferenceScores::new();
        s.insert("R1", "econ", -1.0).unwrap();
        s.insert("R2", "econ", 1.0).unwrap();
        ReferenceSet::new(m, s).unwrap()
    }

    #[test]
    fn toy_probabilities_and_scores() {
        let r = toy();
        let p = word_probabilities(&r, FrequencyBasis::Relative).unwrap();
        let tax = p.row("tax").unwrap();
        assert_abs_diff_eq!(tax[0], 8.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tax[1], 3.0 / 11.0, epsilon = 1e-15);
        let spend = p.row("spend").unwrap();
        assert_abs_diff_eq!(spend[0], 4.0 / 13.0, epsilon = 1e-15);
        let t = word_scores(&p, &r, "econ").unwrap();
        assert_abs_diff_eq!(t.get("tax").unwrap(), -5.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.get("spend").unwrap(), 5.0 / 13.0, epsilon = 1e-15);
    }

    #[test]
    fn raw_basis_uses_counts() {
        let p = word_probabilities(&toy(), FrequencyBasis::Raw).unwrap();
        assert_abs_diff_eq!(p.row("tax").unwrap()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.row("spend").unwrap()[1], 0.75, epsilon = 1e-15);
    }

    #[test]
    fn single_support_and_identical_texts() {
        let m = matrix(Role::Reference, &[("A", &["x", "y"]), ("B", &["y"])]);
        let mut s = ReferenceScores::new();
        s.insert("A", "d", 7.0).unwrap();
        s.insert("B", "d", 1.0).unwrap();
        let r = ReferenceSet::new(m, s).unwrap();
        let p = word_probabilities(&r, FrequencyBasis::Relative).unwrap();
        assert_eq!(p.row("x").unwrap(), [1.0, 0.0]);
        assert_eq!(word_scores(&p, &r, "d").unwrap().get("x"), Some(7.0));

        let m = matrix(Role::Reference, &[("A", &["x", "y", "y"]), ("B", &["x", "y", "y"])]);
        let mut s = ReferenceScores::new();
        s.insert("A", "d", 3.0).unwrap();
        s.insert("B", "d", 3.0).unwrap();
        let r = ReferenceSet::new(m, s).unwrap();
        let p = word_probabilities(&r, FrequencyBasis::Relative).unwrap();
        for (_, row) in p.rows() {
            assert_eq!(row, [0.5, 0.5]);
        }
        let t = word_scores(&p, &r, "d").unwrap();
        assert!(t.iter().all(|(_, s)| s == 3.0));
    }

    #[test]
    fn missing_reference_score_names_document() {
        let r = toy();
        let p = word_probabilities(&r, FrequencyBasis::Relative).unwrap();
        let err = word_scores(&p, &r, "social").unwrap_err();
        assert_eq!(err, Error::MissingScore { document: "R1".into(), dimension: "social".into() });
    }

    #[test]
    fn toy_virgin_scores() {
        let r = toy();
        let t = train(&r, "econ", FrequencyBasis::Relative).unwrap();
        let v = matrix(Role::Virgin, &[("V", &["tax", "spend"])]);
        for variant in Variant::ALL {
            let e = &score_virgin(&v, &t, variant).unwrap()[0];
            assert_abs_diff_eq!(e.raw, -5.0 / 143.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e.se, 0.29669, epsilon = 5e-6);
            assert_eq!(e.scored_tokens, 2);
            assert!(e.ci_low <= e.raw && e.raw <= e.ci_high);
        }
        let v2 = matrix(Role::Virgin, &[("V'", &["tax", "spend", "unicorn"])]);
        let co = score_virgin(&v2, &t, Variant::CoOccurring).unwrap();
        let tot = score_virgin(&v2, &t, Variant::TotalWords).unwrap();
        assert_abs_diff_eq!(co[0].raw, -5.0 / 143.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tot[0].raw, -10.0 / 429.0, epsilon = 1e-15);

        let r1 = score_document(r.matrix(), 0, &t, Variant::TotalWords).unwrap();
        assert_abs_diff_eq!(r1.raw, -25.0 / 143.0, epsilon = 1e-15);
    }

    #[test]
    fn unscorable_and_empty_table() {
        let t = train(&toy(), "econ", FrequencyBasis::Relative).unwrap();
        let v = matrix(Role::Virgin, &[("U", &["unicorn"])]);
        assert_eq!(score_virgin(&v, &t, Variant::CoOccurring), Err(Error::Unscorable("U".into())));
        let empty = WordScoreTable::from_scores("econ", BTreeMap::new());
        assert_eq!(score_virgin(&v, &empty, Variant::TotalWords), Err(Error::EmptyWordScores));
    }

    #[test]
    fn toy_lbg() {
        let r = toy();
        let t = train(&r, "econ", FrequencyBasis::Relative).unwrap();
        let v = matrix(Role::Virgin, &[("V", &["tax", "spend"]), ("V2", &["spend", "spend", "tax"])]);
        let est = score_virgin(&v, &t, Variant::CoOccurring).unwrap();
        assert_abs_diff_eq!(est[1].raw, 45.0 / 429.0, epsilon = 1e-15);
        let (out, spec) = lbg_transform(&est, &r, "econ").unwrap();
        let mean = 15.0 / 429.0;
        assert_abs_diff_eq!(out[0].transformed.unwrap().score, mean - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1].transformed.unwrap().score, mean + 1.0, epsilon = 1e-12);
        match spec {
            TransformSpec::Lbg { reference_sd, .. } => assert_abs_diff_eq!(reference_sd, 1.0),
            _ => unreachable!(),
        }
        let tr = out[0].transformed.unwrap();
        assert!(tr.ci_low <= tr.score && tr.score <= tr.ci_high);

        assert!(matches!(lbg_transform(&est[..1], &r, "econ"), Err(Error::DegenerateTransform(_))));
        let same = [est[0].clone(), est[0].clone()];
        assert!(matches!(lbg_transform(&same, &r, "econ"), Err(Error::DegenerateTransform(_))));
    }

    #[test]
    fn lbg_identity_when_spread_matches() {
        let r = toy();
        let mk = |id: &str, raw: f64| VirginEstimate {
            document: id.into(),
            raw,
            se: 0.0,
            ci_low: raw,
            ci_high: raw,
            transformed: None,
            scored_tokens: 1,
        };
        let est = [mk("a", 2.0), mk("b", 4.0)];
        let (out, _) = lbg_transform(&est, &r, "econ").unwrap();
        assert_abs_diff_eq!(out[0].transformed.unwrap().score, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].transformed.unwrap().score, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn toy_mv() {
        let r = toy();
        let t = train(&r, "econ", FrequencyBasis::Relative).unwrap();
        let v = matrix(Role::Virgin, &[("V", &["tax", "spend"])]);
        let est = score_virgin(&v, &t, Variant::TotalWords).unwrap();
        let (anchors_lo, anchors_hi) = extreme_anchors(&r, "econ").unwrap();
        assert_eq!((anchors_lo.as_str(), anchors_hi.as_str()), ("R1", "R2"));
        let (out, spec) = mv_transform(&est, &r, &t, ("R1", "R2"), Variant::TotalWords).unwrap();
        assert_abs_diff_eq!(out[0].transformed.unwrap().score, -0.2, epsilon = 1e-12);
        match &spec {
            TransformSpec::Mv { first, second } => {
                assert_eq!(spec.apply(first.raw), -1.0);
                assert_eq!(spec.apply(second.raw), 1.0);
            }
            _ => unreachable!(),
        }
        let rows = mv_tradeoff(&r, &t, ("R1", "R2"), Variant::TotalWords).unwrap();
        assert!(rows.iter().all(|row| row.difference == 0.0));
        assert_eq!(rows[0].percent_difference, Some(0.0));

        assert_eq!(
            mv_transform(&est, &r, &t, ("R1", "R9"), Variant::TotalWords).unwrap_err(),
            Error::UnknownDocument("R9".into())
        );
        assert!(matches!(
            mv_transform(&est, &r, &t, ("R1", "R1"), Variant::TotalWords),
            Err(Error::DegenerateAnchors { .. })
        ));
    }

    #[test]
    fn tradeoff_zero_exogenous_has_no_percentage() {
        let m = matrix(Role::Reference, &[("A", &["x", "y"]), ("B", &["y", "z"]), ("C", &["z", "z", "x"])]);
        let mut s = ReferenceScores::new();
        s.insert("A", "d", -2.0).unwrap();
        s.insert("B", "d", 0.0).unwrap();
        s.insert("C", "d", 4.0).unwrap();
        let r = ReferenceSet::new(m, s).unwrap();
        let t = train(&r, "d", FrequencyBasis::Relative).unwrap();
        let rows = mv_tradeoff(&r, &t, ("A", "C"), Variant::CoOccurring).unwrap();
        assert_eq!(rows[1].percent_difference, None);
        assert_eq!(rows[0].difference, 0.0);
        assert_eq!(rows[2].difference, 0.0);
    }

    #[test]
    fn variants_and_export() {
        let r = toy();
        let t = train(&r, "econ", FrequencyBasis::Relative).unwrap();
        let v = matrix(Role::Virgin, &[("V", &["tax", "spend"])]);
        let c = compare_variants(&v, &t).unwrap();
        assert_eq!(c.rows[0].difference, 0.0);
        assert!(c.pearson.is_none());
        let v2 = matrix(Role::Virgin, &[("V'", &["tax", "spend", "unicorn"])]);
        let c = compare_variants(&v2, &t).unwrap();
        assert_abs_diff_eq!(c.rows[0].total_words, -10.0 / 429.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rows[0].co_occurring, -5.0 / 143.0, epsilon = 1e-15);

        let doc = Document::new("V", "XX", 2009).with_tokens(["tax", "spend"]);
        let rows = export_wordscores(&doc, &t);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].word.as_str(), rows[0].frequency), ("tax", 1));
        assert_abs_diff_eq!(rows[0].score.unwrap(), -0.454545, epsilon = 1e-6);
        assert_abs_diff_eq!(rows[1].score.unwrap(), 0.384615, epsilon = 1e-6);
        let doc = Document::new("U", "XX", 2009).with_tokens(["unicorn", "unicorn"]);
        assert_eq!(
            export_wordscores(&doc, &t),
            vec![WordScoreRow { word: "unicorn".into(), frequency: 2, score: None }]
        );
        assert!(export_wordscores(&Document::new("E", "XX", 2009), &t).is_empty());
    }

    #[test]
    fn reference_set_needs_two_documents() {
        let m = matrix(Role::Reference, &[("A", &["x"])]);
        assert!(matches!(
            ReferenceSet::new(m, ReferenceScores::new()),
            Err(Error::InvalidReference(_))
        ));
    }
}
