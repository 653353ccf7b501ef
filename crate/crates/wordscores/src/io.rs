//! CSV and plain-text formats.
//!
//! Floats are written with 6 significant digits unless noted; reading is
//! tolerant of surrounding whitespace and `#` comment lines.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::StringRecord;
use wordscores_core::construct::{Comparison, ModelFit};
use wordscores_core::corpus::{Corpus, CorpusStats, Document, OverlapDiagnostics, Role, TermDocumentMatrix};
use wordscores_core::scaling::{
    ReferenceScores, TradeoffRow, TransformKind, Variant, VirginEstimate, WordScoreRow,
    WordScoreTable,
};
use wordscores_core::validation::{
    ConcordanceResult, Crosswalk, EstimateTable, ExternalRecord, RescaleMode, RowKey, Scale,
};

use crate::error::{Error, Result};
use crate::pipeline::StopList;

/// `x` with 6 significant digits, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-4..6).contains(&exp) {
        return sci;
    }
    let decimals = (5 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_exact(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// A CSV writer that remembers its path for error messages.
pub(crate) struct CsvOut {
    path: PathBuf,
    inner: csv::Writer<File>,
}

impl CsvOut {
    pub(crate) fn create(path: &Path, header: &[&str]) -> Result<Self> {
        Self::with_comments(path, &[], header)
    }

    /// Writes `# ` comment lines before the header row.
    pub(crate) fn with_comments(path: &Path, comments: &[String], header: &[&str]) -> Result<Self> {
        let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
        for c in comments {
            writeln!(file, "# {c}").map_err(|e| Error::io(path, e))?;
        }
        let mut out = CsvOut { path: path.to_owned(), inner: csv::Writer::from_writer(file) };
        out.row(header)?;
        Ok(out)
    }

    pub(crate) fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|e| Error::csv(&self.path, e))
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Parsed CSV with header lookup.
pub(crate) struct CsvIn {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<StringRecord>,
}

impl CsvIn {
    pub(crate) fn read(path: &Path, required: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(file);
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::csv(path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        for r in required {
            if !headers.iter().any(|h| h == r) {
                return Err(Error::parse(path, 1, format!("missing column `{r}`")));
            }
        }
        let rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::csv(path, e))?;
        Ok(CsvIn { path: path.to_owned(), headers, rows })
    }

    pub(crate) fn col(&self, name: &str) -> usize {
        self.headers.iter().position(|h| h == name).expect("column checked on read")
    }

    pub(crate) fn line(&self, row: &StringRecord) -> u64 {
        row.position().map_or(0, |p| p.line())
    }

    pub(crate) fn float(&self, row: &StringRecord, col: usize) -> Result<f64> {
        let s = &row[col];
        s.parse().map_err(|_| {
            Error::parse(&self.path, self.line(row), format!("`{s}` in column `{}` is not a number", self.headers[col]))
        })
    }

    pub(crate) fn opt_float(&self, row: &StringRecord, col: usize) -> Result<Option<f64>> {
        if row[col].is_empty() || row[col].eq_ignore_ascii_case("na") {
            Ok(None)
        } else {
            self.float(row, col).map(Some)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub label: String,
    pub country: String,
    pub year: i32,
    /// Resolved against the manifest's directory.
    pub path: PathBuf,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let csv = CsvIn::read(path, &["id", "label", "country", "year", "path"])?;
    let base = path.parent().unwrap_or(Path::new(""));
    let (id, label, country, year, file) =
        (csv.col("id"), csv.col("label"), csv.col("country"), csv.col("year"), csv.col("path"));
    csv.rows
        .iter()
        .map(|r| {
            let y = r[year].parse().map_err(|_| {
                Error::parse(path, csv.line(r), format!("year `{}` is not an integer", &r[year]))
            })?;
            Ok(ManifestEntry {
                id: r[id].to_owned(),
                label: r[label].to_owned(),
                country: r[country].to_owned(),
                year: y,
                path: base.join(&r[file]),
            })
        })
        .collect()
}

/// Reads a manifest and the raw text of every listed document.
pub fn load_documents(manifest: &Path, role: Role) -> Result<Corpus> {
    let docs = read_manifest(manifest)?
        .into_iter()
        .map(|e| {
            let text = fs::read_to_string(&e.path)
                .map_err(|source| Error::Load { id: e.id.clone(), path: e.path.clone(), source })?;
            Ok(Document::new(e.id, e.country, e.year).with_label(e.label).with_text(text))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus::new(role, docs)?)
}

pub fn write_matrix(path: &Path, m: &TermDocumentMatrix) -> Result<()> {
    let mut header = vec!["word"];
    header.extend(m.documents().iter().map(String::as_str));
    let mut out = CsvOut::create(path, &header)?;
    for (w, row) in m.vocabulary().iter().zip(m.counts()) {
        let mut rec = vec![w.clone()];
        rec.extend(row.iter().map(u64::to_string));
        out.row(&rec)?;
    }
    out.finish()
}

pub fn read_matrix(path: &Path) -> Result<TermDocumentMatrix> {
    let csv = CsvIn::read(path, &["word"])?;
    let docs = &csv.headers[1..];
    let mut columns: Vec<(String, BTreeMap<String, u64>)> =
        docs.iter().map(|d| (d.clone(), BTreeMap::new())).collect();
    for r in &csv.rows {
        for (d, col) in columns.iter_mut().enumerate() {
            let c: u64 = r[d + 1].parse().map_err(|_| {
                Error::parse(path, csv.line(r), format!("count `{}` is not a non-negative integer", &r[d + 1]))
            })?;
            if c > 0 {
                col.1.insert(r[0].to_owned(), c);
            }
        }
    }
    Ok(TermDocumentMatrix::from_columns(columns)?)
}

pub fn read_reference_scores(path: &Path) -> Result<ReferenceScores> {
    let csv = CsvIn::read(path, &["doc_id", "dimension", "score"])?;
    let (doc, dim, score) = (csv.col("doc_id"), csv.col("dimension"), csv.col("score"));
    let mut scores = ReferenceScores::new();
    for r in &csv.rows {
        scores.insert(&r[doc], &r[dim], csv.float(r, score)?)?;
    }
    Ok(scores)
}

pub fn write_reference_scores(path: &Path, scores: &ReferenceScores) -> Result<()> {
    let mut out = CsvOut::create(path, &["doc_id", "dimension", "score"])?;
    for dim in scores.dimensions() {
        for doc in scores.documents_on(dim) {
            let s = scores.get(doc, dim).expect("listed document has a score");
            out.row([doc, dim, &fmt_exact(s)])?;
        }
    }
    out.finish()
}

/// One row of the estimates export.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub document: String,
    pub dimension: String,
    pub variant: Variant,
    pub raw: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub transform: Option<TransformKind>,
    pub transformed: Option<f64>,
}

impl EstimateRecord {
    pub fn new(e: &VirginEstimate, dimension: &str, variant: Variant) -> Self {
        EstimateRecord {
            document: e.document.clone(),
            dimension: dimension.to_owned(),
            variant,
            raw: e.raw,
            se: e.se,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            transform: e.transformed.map(|t| t.kind),
            transformed: e.transformed.map(|t| t.score),
        }
    }

    /// The transformed score when present, else the raw score.
    pub fn position(&self) -> f64 {
        self.transformed.unwrap_or(self.raw)
    }
}

const ESTIMATE_HEADER: [&str; 9] =
    ["doc_id", "dimension", "variant", "raw", "se", "ci_low", "ci_high", "transform", "transformed"];

pub fn write_estimates(path: &Path, rows: &[EstimateRecord]) -> Result<()> {
    let mut out = CsvOut::create(path, &ESTIMATE_HEADER)?;
    for r in rows {
        out.row([
            r.document.clone(),
            r.dimension.clone(),
            r.variant.to_string(),
            fmt_float(r.raw),
            fmt_float(r.se),
            fmt_float(r.ci_low),
            fmt_float(r.ci_high),
            r.transform.map(|t| t.to_string()).unwrap_or_default(),
            fmt_opt(r.transformed),
        ])?;
    }
    out.finish()
}

pub fn read_estimates(path: &Path) -> Result<Vec<EstimateRecord>> {
    let csv = CsvIn::read(path, &ESTIMATE_HEADER)?;
    let c: Vec<usize> = ESTIMATE_HEADER.iter().map(|h| csv.col(h)).collect();
    csv.rows
        .iter()
        .map(|r| {
            let bad = |what: &str| Error::parse(path, csv.line(r), format!("unknown {what}"));
            Ok(EstimateRecord {
                document: r[c[0]].to_owned(),
                dimension: r[c[1]].to_owned(),
                variant: r[c[2]].parse().map_err(|_| bad("variant"))?,
                raw: csv.float(r, c[3])?,
                se: csv.float(r, c[4])?,
                ci_low: csv.float(r, c[5])?,
                ci_high: csv.float(r, c[6])?,
                transform: match &r[c[7]] {
                    "" => None,
                    t => Some(t.parse().map_err(|_| bad("transform"))?),
                },
                transformed: csv.opt_float(r, c[8])?,
            })
        })
        .collect()
}

/// Per-document export: `word,freq,score`, score empty for unscored words.
pub fn write_word_export(path: &Path, rows: &[WordScoreRow]) -> Result<()> {
    let mut out = CsvOut::create(path, &["word", "freq", "score"])?;
    for r in rows {
        out.row([r.word.clone(), r.frequency.to_string(), fmt_opt(r.score)])?;
    }
    out.finish()
}

/// The same export for many documents in one long table.
pub fn write_word_exports(path: &Path, docs: &[(String, Vec<WordScoreRow>)]) -> Result<()> {
    let mut out = CsvOut::create(path, &["document", "word", "freq", "score"])?;
    for (doc, rows) in docs {
        for r in rows {
            out.row([doc.clone(), r.word.clone(), r.frequency.to_string(), fmt_opt(r.score)])?;
        }
    }
    out.finish()
}

pub fn write_word_scores(path: &Path, table: &WordScoreTable) -> Result<()> {
    let mut out = CsvOut::create(path, &["word", "dimension", "score"])?;
    for (w, s) in table.iter() {
        out.row([w, table.dimension(), &fmt_float(s)])?;
    }
    out.finish()
}

pub fn write_tradeoff(path: &Path, rows: &[TradeoffRow]) -> Result<()> {
    let mut out =
        CsvOut::create(path, &["doc_id", "exogenous", "mv_score", "difference", "percent_difference"])?;
    for r in rows {
        out.row([
            r.document.clone(),
            fmt_float(r.exogenous),
            fmt_float(r.mv_score),
            fmt_float(r.difference),
            fmt_opt(r.percent_difference),
        ])?;
    }
    out.finish()
}

pub fn read_external(path: &Path) -> Result<Vec<ExternalRecord>> {
    let csv = CsvIn::read(path, &["party_id", "country", "dimension", "source", "score"])?;
    let c: Vec<usize> =
        ["party_id", "country", "dimension", "source", "score"].iter().map(|h| csv.col(h)).collect();
    csv.rows
        .iter()
        .map(|r| {
            Ok(ExternalRecord {
                party: r[c[0]].to_owned(),
                country: r[c[1]].to_owned(),
                dimension: r[c[2]].to_owned(),
                source: r[c[3]].to_owned(),
                score: csv.float(r, c[4])?,
            })
        })
        .collect()
}

pub fn read_crosswalk(path: &Path) -> Result<Crosswalk> {
    let csv = CsvIn::read(path, &["doc_id", "party_id", "country"])?;
    let (d, p, c) = (csv.col("doc_id"), csv.col("party_id"), csv.col("country"));
    let mut cw = Crosswalk::new();
    for r in &csv.rows {
        cw.insert(&r[d], &r[p], &r[c])?;
    }
    Ok(cw)
}

/// Meta-dataset: `party_id,country,dimension,<column>...` with empty cells
/// for missing values. Declared scales travel as `# scale <column> <min>
/// <max>` comment lines above the header.
pub fn write_estimate_table(path: &Path, table: &EstimateTable) -> Result<()> {
    let comments: Vec<String> = table
        .columns()
        .iter()
        .filter_map(|c| match c.scale {
            Scale::Declared { min, max } => {
                Some(format!("scale {} {} {}", c.name, fmt_exact(min), fmt_exact(max)))
            }
            Scale::Empirical => None,
        })
        .collect();
    let mut header = vec!["party_id", "country", "dimension"];
    header.extend(table.columns().iter().map(|c| c.name.as_str()));
    let mut out = CsvOut::with_comments(path, &comments, &header)?;
    for (i, k) in table.keys().iter().enumerate() {
        let mut rec = vec![k.party.clone(), k.country.clone(), k.dimension.clone()];
        rec.extend(table.columns().iter().map(|c| c.values[i].map(fmt_exact).unwrap_or_default()));
        out.row(&rec)?;
    }
    out.finish()
}

fn scale_comments(path: &Path) -> Result<BTreeMap<String, Scale>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut scales = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let Some(rest) = line.trim().strip_prefix('#') else { continue };
        let parts: Vec<&str> = rest.split_whitespace().collect();
        if parts.first() != Some(&"scale") {
            continue;
        }
        let parsed = match parts[..] {
            [_, name, lo, hi] => lo.parse().ok().zip(hi.parse().ok()).map(|(min, max)| (name, min, max)),
            _ => None,
        };
        let Some((name, min, max)) = parsed else {
            return Err(Error::parse(path, n as u64 + 1, "expected `# scale <column> <min> <max>`"));
        };
        scales.insert(name.to_owned(), Scale::Declared { min, max });
    }
    Ok(scales)
}

pub fn read_estimate_table(path: &Path) -> Result<EstimateTable> {
    let scales = scale_comments(path)?;
    let csv = CsvIn::read(path, &["party_id", "country", "dimension"])?;
    let (p, c, d) = (csv.col("party_id"), csv.col("country"), csv.col("dimension"));
    let value_cols: Vec<usize> = (0..csv.headers.len()).filter(|i| ![p, c, d].contains(i)).collect();
    let mut table = EstimateTable::new();
    for &i in &value_cols {
        let name = &csv.headers[i];
        table.add_column(name.as_str(), scales.get(name).copied().unwrap_or(Scale::Empirical))?;
    }
    for r in &csv.rows {
        let key = RowKey::new(&r[p], &r[c], &r[d]);
        table.add_row(key.clone())?;
        for &i in &value_cols {
            table.set(&key, &csv.headers[i], csv.opt_float(r, i)?)?;
        }
    }
    Ok(table)
}

/// One concordance comparison in the report layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dimension: String,
    pub variant: String,
    pub reference: String,
    pub benchmark: String,
    pub transformation: String,
    pub rescale: RescaleMode,
    pub result: ConcordanceResult,
}

pub const REPORT_HEADER: [&str; 12] = [
    "dimension",
    "variant",
    "reference",
    "benchmark",
    "transformation",
    "rescale",
    "rho_c",
    "n",
    "ci_low",
    "ci_high",
    "pearson_r",
    "c_b",
];

/// Correlation columns are written at full precision so that the
/// `rho_c = pearson_r * c_b` identity survives a round trip.
pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut out = CsvOut::create(path, &REPORT_HEADER)?;
    for r in rows {
        out.row([
            r.dimension.clone(),
            r.variant.clone(),
            r.reference.clone(),
            r.benchmark.clone(),
            r.transformation.clone(),
            r.rescale.to_string(),
            fmt_exact(r.result.rho_c),
            r.result.n.to_string(),
            fmt_float(r.result.ci_low),
            fmt_float(r.result.ci_high),
            fmt_exact(r.result.pearson),
            fmt_exact(r.result.bias_correction),
        ])?;
    }
    out.finish()
}

/// Report columns as read back: `(rho_c, n, ci_low, ci_high, pearson_r, c_b)`
/// plus the labelling columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub dimension: String,
    pub variant: String,
    pub reference: String,
    pub benchmark: String,
    pub transformation: String,
    pub rescale: String,
    pub rho_c: f64,
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pearson_r: f64,
    pub c_b: f64,
}

pub fn read_report(path: &Path) -> Result<Vec<ReportLine>> {
    let csv = CsvIn::read(path, &REPORT_HEADER)?;
    let c: Vec<usize> = REPORT_HEADER.iter().map(|h| csv.col(h)).collect();
    csv.rows
        .iter()
        .map(|r| {
            Ok(ReportLine {
                dimension: r[c[0]].to_owned(),
                variant: r[c[1]].to_owned(),
                reference: r[c[2]].to_owned(),
                benchmark: r[c[3]].to_owned(),
                transformation: r[c[4]].to_owned(),
                rescale: r[c[5]].to_owned(),
                rho_c: csv.float(r, c[6])?,
                n: r[c[7]].parse().map_err(|_| Error::parse(path, csv.line(r), "n is not an integer"))?,
                ci_low: csv.float(r, c[8])?,
                ci_high: csv.float(r, c[9])?,
                pearson_r: csv.float(r, c[10])?,
                c_b: csv.float(r, c[11])?,
            })
        })
        .collect()
}

/// Construct input rows `(party, class_label, features)` and feature names.
pub type ConstructRows = (Vec<(String, String, Vec<Option<f64>>)>, Vec<String>);

pub fn read_construct_input(path: &Path) -> Result<ConstructRows> {
    let csv = CsvIn::read(path, &["party_id", "class_label"])?;
    let (p, l) = (csv.col("party_id"), csv.col("class_label"));
    let features: Vec<usize> = (0..csv.headers.len()).filter(|&i| i != p && i != l).collect();
    let rows = csv
        .rows
        .iter()
        .map(|r| {
            let x = features.iter().map(|&i| csv.opt_float(r, i)).collect::<Result<_>>()?;
            Ok((r[p].to_owned(), r[l].to_owned(), x))
        })
        .collect::<Result<_>>()?;
    Ok((rows, features.iter().map(|&i| csv.headers[i].clone()).collect()))
}

/// Fit statistics for one model, ready for export.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub model: String,
    pub fit: ModelFit,
    pub count_r2: f64,
    pub mcfadden_r2: Option<f64>,
    pub bic: f64,
}

pub fn write_fit_stats(path: &Path, rows: &[FitRow]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["model", "n", "k", "loglik", "count_r2", "mcfadden_r2", "bic", "converged", "separation"],
    )?;
    for r in rows {
        out.row([
            r.model.clone(),
            r.fit.n.to_string(),
            r.fit.k.to_string(),
            fmt_float(r.fit.log_likelihood),
            fmt_float(r.count_r2),
            fmt_opt(r.mcfadden_r2),
            fmt_float(r.bic),
            r.fit.converged.to_string(),
            r.fit.separation.to_string(),
        ])?;
    }
    out.finish()
}

pub fn write_coefficients(
    path: &Path,
    rows: &[FitRow],
    classes: &[String],
    features: &BTreeMap<String, Vec<String>>,
) -> Result<()> {
    let mut out = CsvOut::create(path, &["model", "class", "term", "estimate"])?;
    for r in rows {
        let names = features.get(&r.model).map(Vec::as_slice).unwrap_or_default();
        for (j, beta) in r.fit.coefficients.iter().enumerate() {
            for (f, b) in beta.iter().enumerate() {
                let term = if f == 0 { "(intercept)" } else { names.get(f - 1).map_or("?", String::as_str) };
                out.row([r.model.as_str(), classes[j + 1].as_str(), term, &fmt_float(*b)])?;
            }
        }
    }
    out.finish()
}

pub fn write_comparisons(path: &Path, rows: &[Comparison]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["first", "second", "bic_first", "bic_second", "delta_bic", "favored", "evidence"],
    )?;
    for c in rows {
        out.row([
            c.first.clone(),
            c.second.clone(),
            fmt_float(c.bic_first),
            fmt_float(c.bic_second),
            fmt_float(c.delta),
            c.favored.clone(),
            c.evidence.to_string(),
        ])?;
    }
    out.finish()
}

pub fn write_stopwords(path: &Path, lists: &[StopList]) -> Result<()> {
    let mut out = CsvOut::create(path, &["country", "year", "rank", "word", "count"])?;
    for l in lists {
        for (i, w) in l.words.iter().enumerate() {
            out.row([l.country.clone(), l.year.to_string(), (i + 1).to_string(), w.word.clone(), w.count.to_string()])?;
        }
    }
    out.finish()
}

pub fn write_corpus_stats(path: &Path, rows: &[(&str, CorpusStats)]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "corpus", "documents", "mean_total", "sd_total", "mean_unique", "sd_unique",
            "mean_exclusive", "sd_exclusive", "sd_defined",
        ],
    )?;
    for (name, s) in rows {
        out.row([
            name.to_string(),
            s.documents.to_string(),
            fmt_float(s.mean_total),
            fmt_float(s.sd_total),
            fmt_float(s.mean_unique),
            fmt_float(s.sd_unique),
            fmt_float(s.mean_exclusive),
            fmt_float(s.sd_exclusive),
            s.sd_defined.to_string(),
        ])?;
    }
    out.finish()
}

/// Per-document coverage plus a one-row summary file next to it.
pub fn write_overlap(coverage: &Path, summary: &Path, d: &OverlapDiagnostics) -> Result<()> {
    let mut out = CsvOut::create(coverage, &["document", "coverage"])?;
    for (doc, c) in &d.coverage {
        out.row([doc.as_str(), &fmt_float(*c)])?;
    }
    out.finish()?;
    let mut out =
        CsvOut::create(summary, &["vocabulary_overlap", "reference_skewness", "virgin_skewness"])?;
    out.row([
        fmt_float(d.vocabulary_overlap),
        fmt_float(d.reference_skewness),
        fmt_float(d.virgin_skewness),
    ])?;
    out.finish()
}
