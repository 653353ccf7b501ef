//! Documents, tokenizing and term-document matrices.
//!
//! Tokens are maximal runs of letters after lowercasing, so punctuation and
//! hyphens always split words. Number and currency tokens are only emitted
//! when the corresponding strip flag is off.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stats;

/// Whether a corpus holds texts with known positions or texts to be scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Reference,
    Virgin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub label: String,
    pub country: String,
    pub year: i32,
    pub dimension_tags: Vec<String>,
    /// Untokenized text, dropped once [`Document::tokenize`] runs.
    pub raw: Option<String>,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, country: impl Into<String>, year: i32) -> Self {
        let id = id.into();
        Document {
            label: id.clone(),
            id,
            country: country.into(),
            year,
            dimension_tags: Vec::new(),
            raw: None,
            tokens: Vec::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_text(mut self, raw: impl Into<String>) -> Self {
        self.raw = Some(raw.into());
        self
    }

    pub fn with_tokens<I, S>(mut self, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tokens = tokens.into_iter().map(Into::into).collect();
        self
    }

    /// Replaces `tokens` with the tokenized raw text. Documents without raw
    /// text keep their tokens (re-normalized through the tokenizer).
    pub fn tokenize(
        &mut self,
        config: &PreprocessConfig,
        stemmer: Option<&dyn Stemmer>,
    ) -> Result<()> {
        if config.stemming && stemmer.is_none() {
            return Err(Error::InvalidConfig("stemming enabled without a stemmer".to_owned()));
        }
        let source = match self.raw.take() {
            Some(raw) => raw,
            None => self.tokens.join(" "),
        };
        let mut tokens = tokenize(&source, config);
        if config.stemming {
            if let Some(stemmer) = stemmer {
                for t in tokens.iter_mut() {
                    *t = stemmer.stem(t);
                }
            }
        }
        self.tokens = tokens;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    role: Role,
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(role: Role, documents: Vec<Document>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus { role, documents })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn tokenize(
        &mut self,
        config: &PreprocessConfig,
        stemmer: Option<&dyn Stemmer>,
    ) -> Result<()> {
        for doc in self.documents.iter_mut() {
            doc.tokenize(config, stemmer)?;
        }
        Ok(())
    }

    /// Drops every token listed in `words`.
    pub fn remove_words(&mut self, words: &[String]) {
        let stop: BTreeSet<&str> = words.iter().map(String::as_str).collect();
        for doc in self.documents.iter_mut() {
            doc.tokens.retain(|t| !stop.contains(t.as_str()));
        }
    }
}

/// Word stemming hook; the core crate ships no stemmer of its own.
pub trait Stemmer {
    fn stem(&self, word: &str) -> String;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub strip_numbers: bool,
    pub strip_currency: bool,
    /// Number of most frequent words dropped per corpus.
    pub top_k_stopwords: usize,
    pub min_doc_fraction: Option<f64>,
    pub max_doc_fraction: Option<f64>,
    pub stemming: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            strip_numbers: true,
            strip_currency: true,
            top_k_stopwords: 20,
            min_doc_fraction: None,
            max_doc_fraction: None,
            stemming: false,
        }
    }
}

impl PreprocessConfig {
    /// Tokenize only: no stop words, no document-frequency filter.
    pub fn plain() -> Self {
        PreprocessConfig { top_k_stopwords: 0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let lo = self.min_doc_fraction.unwrap_or(0.0);
        let hi = self.max_doc_fraction.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
            return Err(Error::InvalidConfig(format!(
                "document fractions must lie in [0, 1], got {lo} and {hi}"
            )));
        }
        if (self.min_doc_fraction.is_some() || self.max_doc_fraction.is_some()) && lo >= hi {
            return Err(Error::InvalidConfig(format!(
                "min-doc-fraction {lo} must be below max-doc-fraction {hi}"
            )));
        }
        Ok(())
    }
}

fn is_currency(c: char) -> bool {
    matches!(
        c,
        '$' | '¢' | '£' | '¤' | '¥' | '֏' | '؋' | '৲' | '৳' | '৻' | '૱' | '௹' | '฿' | '៛'
            | '\u{20A0}'..='\u{20C0}'
            | '꠸' | '﷼' | '﹩' | '＄' | '￠' | '￡' | '￥' | '￦'
    )
}

/// Splits raw text into lowercase word tokens, preserving order.
pub fn tokenize(raw: &str, config: &PreprocessConfig) -> Vec<String> {
    let lower: Vec<char> = raw.chars().flat_map(char::to_lowercase).collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < lower.len() {
        let c = lower[i];
        if c.is_alphabetic() {
            let start = i;
            while i < lower.len() && lower[i].is_alphabetic() {
                i += 1;
            }
            tokens.push(lower[start..i].iter().collect());
        } else if c.is_numeric() {
            let start = i;
            i += 1;
            loop {
                if i < lower.len() && lower[i].is_numeric() {
                    i += 1;
                } else if i + 1 < lower.len()
                    && matches!(lower[i], '.' | ',')
                    && lower[i + 1].is_numeric()
                {
                    i += 2;
                } else {
                    break;
                }
            }
            if !config.strip_numbers {
                tokens.push(lower[start..i].iter().collect());
            }
        } else {
            if is_currency(c) && !config.strip_currency {
                tokens.push(String::from(c));
            }
            i += 1;
        }
    }
    tokens
}

/// Word-by-document count matrix with a lexicographically sorted vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDocumentMatrix {
    vocabulary: Vec<String>,
    documents: Vec<String>,
    counts: Vec<Vec<u64>>,
    totals: Vec<u64>,
}

impl TermDocumentMatrix {
    /// Builds a matrix from `(document id, word counts)` columns.
    ///
    /// Words with zero count in every document are dropped.
    pub fn from_columns<I, S>(columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, BTreeMap<String, u64>)>,
        S: Into<String>,
    {
        let mut documents = Vec::new();
        let mut cols = Vec::new();
        let mut seen = BTreeSet::new();
        let mut vocab = BTreeSet::new();
        for (id, col) in columns {
            let id = id.into();
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            vocab.extend(col.iter().filter(|(_, &c)| c > 0).map(|(w, _)| w.clone()));
            documents.push(id);
            cols.push(col);
        }
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let vocabulary: Vec<String> = vocab.into_iter().collect();
        let counts: Vec<Vec<u64>> = vocabulary
            .iter()
            .map(|w| cols.iter().map(|c| c.get(w).copied().unwrap_or(0)).collect())
            .collect();
        let totals = column_sums(&counts, documents.len());
        Ok(TermDocumentMatrix { vocabulary, documents, counts, totals })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn documents(&self) -> &[String] {
        &self.documents
    }

    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n_words(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn n_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.vocabulary.binary_search_by(|w| w.as_str().cmp(word)).ok()
    }

    pub fn document_index(&self, id: &str) -> Option<usize> {
        self.documents.iter().position(|d| d == id)
    }

    pub fn count(&self, word: usize, document: usize) -> u64 {
        self.counts[word][document]
    }

    /// Total count of each word across all documents.
    pub fn word_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    /// `(word, count)` pairs for one document, zero counts skipped.
    pub fn column(&self, document: usize) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.vocabulary
            .iter()
            .zip(&self.counts)
            .map(move |(w, row)| (w.as_str(), row[document]))
            .filter(|&(_, c)| c > 0)
    }

    /// Keeps only the listed documents, in the listed order, and drops
    /// words that no longer occur.
    pub fn select_documents<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let mut idx = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            let i = self.document_index(id).ok_or_else(|| Error::UnknownDocument(id.to_owned()))?;
            if idx.contains(&i) {
                return Err(Error::DuplicateId(id.to_owned()));
            }
            idx.push(i);
        }
        if idx.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut vocabulary = Vec::new();
        let mut counts = Vec::new();
        for (w, row) in self.vocabulary.iter().zip(&self.counts) {
            let new_row: Vec<u64> = idx.iter().map(|&i| row[i]).collect();
            if new_row.iter().any(|&c| c > 0) {
                vocabulary.push(w.clone());
                counts.push(new_row);
            }
        }
        let documents = idx.iter().map(|&i| self.documents[i].clone()).collect();
        let totals = column_sums(&counts, idx.len());
        Ok(TermDocumentMatrix { vocabulary, documents, counts, totals })
    }

    fn retain_words(&self, mut keep: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut vocabulary = Vec::new();
        let mut counts = Vec::new();
        for (i, (w, row)) in self.vocabulary.iter().zip(&self.counts).enumerate() {
            if keep(i) {
                vocabulary.push(w.clone());
                counts.push(row.clone());
            }
        }
        if vocabulary.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let totals = column_sums(&counts, self.documents.len());
        Ok(TermDocumentMatrix {
            vocabulary,
            documents: self.documents.clone(),
            counts,
            totals,
        })
    }
}

fn column_sums(counts: &[Vec<u64>], n_docs: usize) -> Vec<u64> {
    let mut totals = alloc::vec![0u64; n_docs];
    for row in counts {
        for (t, &c) in totals.iter_mut().zip(row) {
            *t += c;
        }
    }
    totals
}

/// Counts the tokens of every document in the corpus.
pub fn build_matrix(corpus: &Corpus) -> Result<TermDocumentMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let matrix = TermDocumentMatrix::from_columns(corpus.documents().iter().map(|doc| {
        let mut col = BTreeMap::new();
        for t in &doc.tokens {
            *col.entry(t.clone()).or_insert(0u64) += 1;
        }
        (doc.id.clone(), col)
    }))?;
    if matrix.vocabulary.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(matrix)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedWord {
    pub word: String,
    pub count: u64,
}

/// The `k` most frequent words; ties go to the lexicographically smaller word.
pub fn top_k_stopwords(matrix: &TermDocumentMatrix, k: usize) -> Vec<RankedWord> {
    let mut ranked: Vec<RankedWord> = matrix
        .vocabulary
        .iter()
        .zip(matrix.word_totals())
        .map(|(w, count)| RankedWord { word: w.clone(), count })
        .collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.word.cmp(&b.word)));
    ranked.truncate(k);
    ranked
}

/// Removes the listed words; unknown words are ignored.
pub fn apply_stoplist<S: AsRef<str>>(
    matrix: &TermDocumentMatrix,
    words: &[S],
) -> Result<TermDocumentMatrix> {
    let stop: BTreeSet<&str> = words.iter().map(AsRef::as_ref).collect();
    matrix.retain_words(|i| !stop.contains(matrix.vocabulary[i].as_str()))
}

/// Keeps words whose document frequency (share of documents containing the
/// word) lies within `[min_fraction, max_fraction]`.
pub fn filter_document_frequency(
    matrix: &TermDocumentMatrix,
    min_fraction: f64,
    max_fraction: f64,
) -> Result<TermDocumentMatrix> {
    let n = matrix.n_documents() as f64;
    matrix.retain_words(|i| {
        let df = matrix.counts[i].iter().filter(|&&c| c > 0).count() as f64 / n;
        df >= min_fraction && df <= max_fraction
    })
}

/// Applies the matrix-level steps of `config`: the optional
/// document-frequency filter, then top-k stop-word removal. Returns the
/// pruned matrix and the removed stop words.
pub fn preprocess_matrix(
    matrix: &TermDocumentMatrix,
    config: &PreprocessConfig,
) -> Result<(TermDocumentMatrix, Vec<RankedWord>)> {
    config.validate()?;
    let mut m = matrix.clone();
    if config.min_doc_fraction.is_some() || config.max_doc_fraction.is_some() {
        m = filter_document_frequency(
            &m,
            config.min_doc_fraction.unwrap_or(0.0),
            config.max_doc_fraction.unwrap_or(1.0),
        )?;
    }
    let stop = top_k_stopwords(&m, config.top_k_stopwords);
    if !stop.is_empty() {
        let words: Vec<&str> = stop.iter().map(|r| r.word.as_str()).collect();
        m = apply_stoplist(&m, &words)?;
    }
    Ok((m, stop))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub documents: usize,
    pub mean_total: f64,
    pub sd_total: f64,
    /// Distinct words per document.
    pub mean_unique: f64,
    pub sd_unique: f64,
    /// Words that occur in this document and no other.
    pub mean_exclusive: f64,
    pub sd_exclusive: f64,
    /// False with a single document, where the sample SDs are reported as 0.
    pub sd_defined: bool,
}

/// Word-count summary with sample standard deviations over documents.
pub fn corpus_stats(matrix: &TermDocumentMatrix) -> CorpusStats {
    let n = matrix.n_documents();
    let totals: Vec<f64> = matrix.totals.iter().map(|&t| t as f64).collect();
    let mut unique = alloc::vec![0.0; n];
    let mut exclusive = alloc::vec![0.0; n];
    for row in &matrix.counts {
        let mut present = 0;
        let mut last = 0;
        for (d, &c) in row.iter().enumerate() {
            if c > 0 {
                unique[d] += 1.0;
                present += 1;
                last = d;
            }
        }
        if present == 1 {
            exclusive[last] += 1.0;
        }
    }
    let sd = |v: &[f64]| stats::sample_sd(v).unwrap_or(0.0);
    CorpusStats {
        documents: n,
        mean_total: stats::mean(&totals),
        sd_total: sd(&totals),
        mean_unique: stats::mean(&unique),
        sd_unique: sd(&unique),
        mean_exclusive: stats::mean(&exclusive),
        sd_exclusive: sd(&exclusive),
        sd_defined: n >= 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDiagnostics {
    /// Share of each virgin document's tokens whose word is in the reference
    /// vocabulary, keyed by document id. Empty documents report 0.
    pub coverage: Vec<(String, f64)>,
    /// Share of the virgin vocabulary that also occurs in the reference texts.
    pub vocabulary_overlap: f64,
    pub reference_skewness: f64,
    pub virgin_skewness: f64,
}

pub fn diagnose_overlap(
    reference: &TermDocumentMatrix,
    virgin: &TermDocumentMatrix,
) -> Result<OverlapDiagnostics> {
    if reference.vocabulary.is_empty() || virgin.vocabulary.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let known: Vec<bool> =
        virgin.vocabulary.iter().map(|w| reference.word_index(w).is_some()).collect();
    let coverage = virgin
        .documents
        .iter()
        .enumerate()
        .map(|(d, id)| {
            let total = virgin.totals[d];
            let covered: u64 = virgin
                .counts
                .iter()
                .zip(&known)
                .filter(|(_, &k)| k)
                .map(|(row, _)| row[d])
                .sum();
            let share = if total == 0 { 0.0 } else { covered as f64 / total as f64 };
            (id.clone(), share)
        })
        .collect();
    let overlap = known.iter().filter(|&&k| k).count() as f64 / known.len() as f64;
    let skew = |m: &TermDocumentMatrix| {
        let totals: Vec<f64> = m.word_totals().into_iter().map(|t| t as f64).collect();
        stats::skewness(&totals)
    };
    Ok(OverlapDiagnostics {
        coverage,
        vocabulary_overlap: overlap,
        reference_skewness: skew(reference),
        virgin_skewness: skew(virgin),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn toy_reference() -> Corpus {
        Corpus::new(
            Role::Reference,
            vec![
                Document::new("R1", "XX", 2004).with_tokens(["tax", "tax", "spend"]),
                Document::new("R2", "XX", 2004).with_tokens(["tax", "spend", "spend", "spend"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn tokenize_normalizes_case_and_punctuation() {
        let cfg = PreprocessConfig::plain();
        assert_eq!(tokenize("Tax, tax; spend!", &cfg), ["tax", "tax", "spend"]);
        assert!(tokenize("", &cfg).is_empty());
    }

    #[test]
    fn tokenize_strip_flags() {
        let strip = PreprocessConfig::plain();
        assert_eq!(tokenize("spend £5 now", &strip), ["spend", "now"]);
        let keep = PreprocessConfig { strip_numbers: false, strip_currency: false, ..strip };
        assert_eq!(tokenize("spend £5 now", &keep), ["spend", "£", "5", "now"]);
        assert_eq!(tokenize("cost 1,000.50 €", &keep), ["cost", "1,000.50", "€"]);
    }

    #[test]
    fn tokenize_splits_hyphens_keeps_accents() {
        let cfg = PreprocessConfig::plain();
        assert_eq!(tokenize("Euro-sceptic Öffentlichkeit", &cfg), ["euro", "sceptic", "öffentlichkeit"]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Corpus::new(
            Role::Reference,
            vec![Document::new("uk-lab", "UK", 2004), Document::new("uk-lab", "UK", 2004)],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateId("uk-lab".into()));
    }

    #[test]
    fn toy_matrix_counts() {
        let m = build_matrix(&toy_reference()).unwrap();
        assert_eq!(m.vocabulary(), ["spend", "tax"]);
        assert_eq!(m.counts()[1], [2, 1]);
        assert_eq!(m.counts()[0], [1, 3]);
        assert_eq!(m.totals(), [3, 4]);
    }

    #[test]
    fn single_document_matrix() {
        let c = Corpus::new(Role::Virgin, vec![Document::new("d", "X", 1).with_tokens(["a", "a"])])
            .unwrap();
        let m = build_matrix(&c).unwrap();
        assert_eq!(m.counts(), [vec![2]]);
    }

    #[test]
    fn empty_corpora_rejected() {
        let c = Corpus::new(Role::Virgin, vec![Document::new("d", "X", 1)]).unwrap();
        assert_eq!(build_matrix(&c), Err(Error::EmptyCorpus));
        let c = Corpus::new(Role::Virgin, vec![]).unwrap();
        assert_eq!(build_matrix(&c), Err(Error::EmptyCorpus));
    }

    #[test]
    fn top_k_and_stoplist() {
        let m = build_matrix(&toy_reference()).unwrap();
        let top = top_k_stopwords(&m, 1);
        assert_eq!(top, [RankedWord { word: "spend".into(), count: 4 }]);
        assert!(top_k_stopwords(&m, 0).is_empty());
        assert_eq!(top_k_stopwords(&m, 10).len(), 2);

        let pruned = apply_stoplist(&m, &["spend"]).unwrap();
        assert_eq!(pruned.vocabulary(), ["tax"]);
        assert_eq!(pruned.totals(), [2, 1]);
        assert_eq!(apply_stoplist::<&str>(&m, &[]).unwrap(), m);
        assert_eq!(apply_stoplist(&m, &["spend", "tax"]), Err(Error::EmptyVocabulary));
    }

    #[test]
    fn top_k_ties_are_lexicographic() {
        let c = Corpus::new(
            Role::Reference,
            vec![Document::new("a", "X", 1).with_tokens(["zeta", "alpha", "mid", "mid"])],
        )
        .unwrap();
        let m = build_matrix(&c).unwrap();
        let words: Vec<_> = top_k_stopwords(&m, 3).into_iter().map(|r| r.word).collect();
        assert_eq!(words, ["mid", "alpha", "zeta"]);
    }

    #[test]
    fn document_frequency_filter() {
        let c = Corpus::new(
            Role::Reference,
            vec![
                Document::new("a", "X", 1).with_tokens(["common", "rare"]),
                Document::new("b", "X", 1).with_tokens(["common", "mid"]),
                Document::new("c", "X", 1).with_tokens(["common", "mid"]),
            ],
        )
        .unwrap();
        let m = build_matrix(&c).unwrap();
        let f = filter_document_frequency(&m, 0.5, 0.9).unwrap();
        assert_eq!(f.vocabulary(), ["mid"]);
        let cfg = PreprocessConfig {
            min_doc_fraction: Some(0.5),
            max_doc_fraction: Some(0.2),
            ..PreprocessConfig::plain()
        };
        assert!(matches!(preprocess_matrix(&m, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn stats_toy_and_single() {
        let m = build_matrix(&toy_reference()).unwrap();
        let s = corpus_stats(&m);
        assert_eq!(s.documents, 2);
        assert_abs_diff_eq!(s.mean_total, 3.5);
        assert_abs_diff_eq!(s.sd_total, core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.mean_unique, 2.0);
        assert_abs_diff_eq!(s.mean_exclusive, 0.0);
        assert!(s.sd_defined);

        let toks: Vec<String> = (0..10).map(|i| alloc::format!("w{}", i % 4)).collect();
        let c = Corpus::new(Role::Virgin, vec![Document::new("d", "X", 1).with_tokens(toks)]).unwrap();
        let s = corpus_stats(&build_matrix(&c).unwrap());
        assert_abs_diff_eq!(s.mean_total, 10.0);
        assert_eq!(s.sd_total, 0.0);
        assert!(!s.sd_defined);
    }

    #[test]
    fn overlap() {
        let r = build_matrix(&toy_reference()).unwrap();
        let v = build_matrix(
            &Corpus::new(Role::Virgin, vec![Document::new("V", "X", 1).with_tokens(["tax", "spend"])])
                .unwrap(),
        )
        .unwrap();
        let d = diagnose_overlap(&r, &v).unwrap();
        assert_eq!(d.coverage, [("V".into(), 1.0)]);
        let u = build_matrix(
            &Corpus::new(Role::Virgin, vec![Document::new("U", "X", 1).with_tokens(["unicorn"])])
                .unwrap(),
        )
        .unwrap();
        let d = diagnose_overlap(&r, &u).unwrap();
        assert_eq!(d.coverage[0].1, 0.0);
        assert_eq!(d.vocabulary_overlap, 0.0);
        assert_eq!(diagnose_overlap(&r, &r).unwrap().vocabulary_overlap, 1.0);
    }

    #[test]
    fn stemming_requires_stemmer() {
        let cfg = PreprocessConfig { stemming: true, ..PreprocessConfig::plain() };
        let mut d = Document::new("d", "X", 1).with_text("taxes");
        assert!(d.tokenize(&cfg, None).is_err());
        struct Chop;
        impl Stemmer for Chop {
            fn stem(&self, w: &str) -> String {
                w.trim_end_matches('s').into()
            }
        }
        d.tokenize(&cfg, Some(&Chop)).unwrap();
        assert_eq!(d.tokens, ["taxe"]);
    }

    fn small_corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
        let word = prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]).prop_map(String::from);
        prop::collection::vec(prop::collection::vec(word, 1..12), 1..5)
    }

    proptest! {
        #[test]
        fn columns_sum_to_totals(docs in small_corpus()) {
            let corpus = Corpus::new(
                Role::Reference,
                docs.iter().enumerate()
                    .map(|(i, t)| Document::new(alloc::format!("d{i}"), "X", 1).with_tokens(t.clone()))
                    .collect(),
            ).unwrap();
            let m = build_matrix(&corpus).unwrap();
            for d in 0..m.n_documents() {
                let s: u64 = m.counts().iter().map(|r| r[d]).sum();
                prop_assert_eq!(s, m.totals()[d]);
                prop_assert_eq!(s, docs[d].len() as u64);
            }
            let all = top_k_stopwords(&m, m.n_words());
            let mut words: Vec<String> = all.into_iter().map(|r| r.word).collect();
            words.sort();
            prop_assert_eq!(&words[..], m.vocabulary());
        }

        #[test]
        fn stoplist_commutes_with_build(docs in small_corpus(), stop in prop::collection::vec(
            prop::sample::select(vec!["a", "b", "c"]).prop_map(String::from), 0..3)) {
            let mut corpus = Corpus::new(
                Role::Reference,
                docs.iter().enumerate()
                    .map(|(i, t)| Document::new(alloc::format!("d{i}"), "X", 1).with_tokens(t.clone()))
                    .collect(),
            ).unwrap();
            let m = build_matrix(&corpus).unwrap();
            let pruned = apply_stoplist(&m, &stop);
            corpus.remove_words(&stop);
            match (pruned, build_matrix(&corpus)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "diverged: {:?} vs {:?}", a, b),
            }
        }

        #[test]
        fn tokenize_is_idempotent(text in "\\PC{0,60}", numbers: bool, currency: bool) {
            let cfg = PreprocessConfig {
                strip_numbers: numbers,
                strip_currency: currency,
                ..PreprocessConfig::plain()
            };
            let once = tokenize(&text, &cfg);
            let twice = tokenize(&once.join(" "), &cfg);
            prop_assert_eq!(once, twice);
        }
    }
}
