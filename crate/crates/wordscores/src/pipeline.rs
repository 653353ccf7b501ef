//! The full run grid: countries × reference sources × dimensions ×
//! variants × transforms, followed by merging, criterion validation and
//! construct-validity fits.
//!
//! Inputs are loaded and checked by [`load_inputs`] before anything is
//! written. Cells run on a rayon pool; each writes only its own directory,
//! and the aggregate files are written afterwards by the calling thread in
//! grid order, so output is byte-identical for a fixed config and seed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wordscores_core::construct::{
    bic, compare_models, count_r2, fit_multinomial, mcfadden_r2, DesignMatrix, FitOptions,
};
use wordscores_core::corpus::{
    build_matrix, corpus_stats, diagnose_overlap, preprocess_matrix, Corpus, Document,
    PreprocessConfig, RankedWord, Role, TermDocumentMatrix,
};
use wordscores_core::scaling::{
    compare_variants, export_wordscores, extreme_anchors, lbg_transform, mv_tradeoff,
    mv_transform, score_virgin_each, train, FrequencyBasis, ReferenceScores, ReferenceSet,
    TradeoffRow, TransformKind, Variant, VirginEstimate, WordScoreRow, WordScoreTable,
};
use wordscores_core::validation::{
    benchmark_matrix, ccc_with, merge_estimates, pairwise_complete, rescale_unit, Crosswalk,
    EstimateTable, ExternalRecord, PairResult, RescaleMode, RunRecord, Scale,
};

use crate::config::{RunConfig, SourceSpec};
use crate::error::{Error, Result};
use crate::io::{self, CsvOut, EstimateRecord, FitRow, ReportRow};
use crate::stem::Snowball;

/// Top-k stop words removed from one `(country, year)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct StopList {
    pub country: String,
    pub year: i32,
    pub words: Vec<RankedWord>,
}

/// Tokenizes every corpus, then prunes each `(country, year)` group of
/// documents (across all corpora) with its own document-frequency filter
/// and top-k stop list.
pub fn preprocess(corpora: Vec<Corpus>, config: &PreprocessConfig) -> Result<(Vec<Corpus>, Vec<StopList>)> {
    config.validate()?;
    let stemmer = config.stemming.then(Snowball::english);
    let stem = stemmer.as_ref().map(|s| s as &dyn wordscores_core::corpus::Stemmer);

    let mut docs: Vec<(Role, Vec<Document>)> = Vec::new();
    for mut c in corpora {
        c.tokenize(config, stem)?;
        docs.push((c.role(), c.documents().to_vec()));
    }

    let mut groups: BTreeMap<(String, i32), Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, (_, ds)) in docs.iter().enumerate() {
        for (di, d) in ds.iter().enumerate() {
            groups.entry((d.country.clone(), d.year)).or_default().push((ci, di));
        }
    }

    let mut stoplists = Vec::new();
    for ((country, year), members) in groups {
        let columns = members.iter().enumerate().map(|(k, &(ci, di))| {
            let mut col = BTreeMap::new();
            for t in &docs[ci].1[di].tokens {
                *col.entry(t.clone()).or_insert(0u64) += 1;
            }
            (k.to_string(), col)
        });
        let matrix = TermDocumentMatrix::from_columns(columns)?;
        if matrix.n_words() == 0 {
            stoplists.push(StopList { country, year, words: Vec::new() });
            continue;
        }
        let (kept, words) = preprocess_matrix(&matrix, config).map_err(|e| match e {
            wordscores_core::Error::EmptyVocabulary => Error::Config(format!(
                "preprocessing removes every word of {country} {year}"
            )),
            e => e.into(),
        })?;
        let kept: BTreeSet<&str> = kept.vocabulary().iter().map(String::as_str).collect();
        let removed: BTreeSet<String> =
            matrix.vocabulary().iter().filter(|w| !kept.contains(w.as_str())).cloned().collect();
        for &(ci, di) in &members {
            docs[ci].1[di].tokens.retain(|t| !removed.contains(t));
        }
        stoplists.push(StopList { country, year, words });
    }

    let corpora = docs
        .into_iter()
        .map(|(role, ds)| Corpus::new(role, ds))
        .collect::<std::result::Result<_, _>>()?;
    Ok((corpora, stoplists))
}

/// One country's corpora after preprocessing.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub reference: Corpus,
    pub virgin: Corpus,
    pub reference_matrix: TermDocumentMatrix,
    pub virgin_matrix: TermDocumentMatrix,
    pub stoplists: Vec<StopList>,
}

pub fn prepare(reference: Corpus, virgin: Corpus, config: &PreprocessConfig) -> Result<Prepared> {
    let (mut corpora, stoplists) = preprocess(vec![reference, virgin], config)?;
    let virgin = corpora.pop().expect("two corpora in, two out");
    let reference = corpora.pop().expect("two corpora in, two out");
    Ok(Prepared {
        reference_matrix: build_matrix(&reference)?,
        virgin_matrix: build_matrix(&virgin)?,
        reference,
        virgin,
        stoplists,
    })
}

/// Everything a scoring cell produces.
#[derive(Debug, Clone)]
pub struct Scored {
    pub table: WordScoreTable,
    pub estimates: Vec<VirginEstimate>,
    /// Virgin documents without a single scored word.
    pub unscorable: Vec<String>,
    pub tradeoff: Option<Vec<TradeoffRow>>,
    pub words: Vec<(String, Vec<WordScoreRow>)>,
}

/// Trains on the reference texts that carry a score on `dimension`,
/// scores every virgin text and applies `transform`.
pub fn score_and_transform(
    prepared: &Prepared,
    scores: &ReferenceScores,
    dimension: &str,
    variant: Variant,
    frequency: FrequencyBasis,
    transform: Option<TransformKind>,
    anchors: Option<&(String, String)>,
) -> Result<Scored> {
    let ids: Vec<&str> = prepared
        .reference_matrix
        .documents()
        .iter()
        .map(String::as_str)
        .filter(|id| scores.get(id, dimension).is_some())
        .collect();
    if ids.len() < 2 {
        return Err(wordscores_core::Error::InvalidReference(format!(
            "{} reference text(s) scored on `{dimension}`, need at least 2",
            ids.len()
        ))
        .into());
    }
    let reference = ReferenceSet::new(prepared.reference_matrix.select_documents(&ids)?, scores.clone())?;
    let table = train(&reference, dimension, frequency)?;

    let mut estimates = Vec::new();
    let mut unscorable = Vec::new();
    for r in score_virgin_each(&prepared.virgin_matrix, &table, variant) {
        match r {
            Ok(e) => estimates.push(e),
            Err(wordscores_core::Error::Unscorable(id)) => unscorable.push(id),
            Err(e) => return Err(e.into()),
        }
    }
    if estimates.is_empty() {
        return Err(wordscores_core::Error::Unscorable(unscorable.join(", ")).into());
    }

    let mut tradeoff = None;
    match transform {
        None => {}
        Some(TransformKind::Lbg) => estimates = lbg_transform(&estimates, &reference, dimension)?.0,
        Some(TransformKind::Mv) => {
            let (a, b) = match anchors {
                Some(pair) => pair.clone(),
                None => extreme_anchors(&reference, dimension)?,
            };
            estimates = mv_transform(&estimates, &reference, &table, (&a, &b), variant)?.0;
            tradeoff = Some(mv_tradeoff(&reference, &table, (&a, &b), variant)?);
        }
    }
    let words = prepared
        .virgin
        .documents()
        .iter()
        .map(|d| (d.id.clone(), export_wordscores(d, &table)))
        .collect();
    Ok(Scored { table, estimates, unscorable, tradeoff, words })
}

/// Writes a [`Scored`] result into `dir`.
pub fn write_scored(dir: &Path, scored: &Scored, dimension: &str, variant: Variant) -> Result<()> {
    io::create_dir(dir)?;
    let records: Vec<EstimateRecord> =
        scored.estimates.iter().map(|e| EstimateRecord::new(e, dimension, variant)).collect();
    io::write_estimates(&dir.join("estimates.csv"), &records)?;
    io::write_word_scores(&dir.join("wordscores.csv"), &scored.table)?;
    io::write_word_exports(&dir.join("words.csv"), &scored.words)?;
    if let Some(t) = &scored.tradeoff {
        io::write_tradeoff(&dir.join("tradeoff.csv"), t)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub country: String,
    pub source: String,
    pub dimension: String,
    pub variant: Variant,
    pub transform: TransformKind,
}

impl Cell {
    /// Output directory relative to the run root.
    pub fn dir(&self) -> PathBuf {
        ["cells", &self.country, &self.source, &self.dimension]
            .iter()
            .map(|s| path_safe(s))
            .collect::<PathBuf>()
            .join(format!("{}-{}", self.variant, self.transform))
    }

    /// Name of this cell's column in the merged estimate table.
    pub fn column(&self) -> String {
        column_name(&self.source, self.variant, self.transform)
    }
}

fn column_name(source: &str, variant: Variant, transform: TransformKind) -> String {
    format!("{source}/{variant}/{transform}")
}

fn path_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

/// Cartesian product in config order: country, source, dimension, variant,
/// transform (last varies fastest).
pub fn grid(config: &RunConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for c in &config.countries {
        for s in &config.sources {
            for d in &config.dimensions {
                for &v in &config.variants {
                    for &t in &config.transforms {
                        cells.push(Cell {
                            country: c.name.clone(),
                            source: s.name.clone(),
                            dimension: d.clone(),
                            variant: v,
                            transform: t,
                        });
                    }
                }
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    /// Scored, but some virgin documents were unscorable.
    Partial,
    Failed,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Partial => "partial",
            CellStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub cell: Cell,
    pub estimates: Vec<EstimateRecord>,
    pub unscorable: Vec<String>,
    pub error: Option<String>,
}

impl CellOutcome {
    pub fn status(&self) -> CellStatus {
        if self.error.is_some() {
            CellStatus::Failed
        } else if !self.unscorable.is_empty() {
            CellStatus::Partial
        } else {
            CellStatus::Ok
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out: PathBuf,
    pub cells: Vec<CellOutcome>,
    pub summary: Vec<ReportRow>,
    /// Everything that went wrong after the config was accepted.
    pub errors: Vec<String>,
}

impl RunReport {
    /// 0 when every cell and every validation step succeeded, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() && self.cells.iter().all(|c| c.status() == CellStatus::Ok) {
            0
        } else {
            3
        }
    }
}

/// Loaded inputs of a run.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub countries: Vec<(String, Corpus, Corpus)>,
    pub scores: Vec<ReferenceScores>,
    pub external: Vec<ExternalRecord>,
    pub crosswalk: Option<Crosswalk>,
    pub labels: Option<BTreeMap<String, String>>,
}

/// Reads and checks every input named by `config`. Nothing is written.
pub fn load_inputs(config: &RunConfig) -> Result<Inputs> {
    for f in config.input_files() {
        if !f.is_file() {
            return Err(Error::Config(format!("input file {} does not exist", f.display())));
        }
    }
    let countries = config
        .countries
        .iter()
        .map(|c| {
            Ok((
                c.name.clone(),
                io::load_documents(&c.reference, Role::Reference)?,
                io::load_documents(&c.virgin, Role::Virgin)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let scores = config
        .sources
        .iter()
        .map(|s| io::read_reference_scores(&s.scores))
        .collect::<Result<Vec<_>>>()?;
    for (s, sc) in config.sources.iter().zip(&scores) {
        let dims: BTreeSet<&str> = sc.dimensions().collect();
        if let Some(d) = config.dimensions.iter().find(|d| !dims.contains(d.as_str())) {
            return Err(Error::Config(format!("source `{}` has no scores on dimension `{d}`", s.name)));
        }
    }
    let mut external = Vec::new();
    for b in &config.benchmarks {
        let rows: Vec<ExternalRecord> =
            io::read_external(&b.file)?.into_iter().filter(|r| r.source == b.name).collect();
        if rows.is_empty() {
            return Err(Error::Config(format!(
                "{} has no rows with source `{}`",
                b.file.display(),
                b.name
            )));
        }
        external.extend(rows);
    }
    let crosswalk = config.crosswalk.as_deref().map(io::read_crosswalk).transpose()?;
    let labels = match &config.construct {
        Some(c) => {
            let csv = io::CsvIn::read(&c.labels, &["party_id", "class_label"])?;
            let (p, l) = (csv.col("party_id"), csv.col("class_label"));
            let mut map = BTreeMap::new();
            for r in &csv.rows {
                if map.insert(r[p].to_owned(), r[l].to_owned()).is_some() {
                    return Err(Error::parse(&c.labels, csv.line(r), format!("party `{}` listed twice", &r[p])));
                }
            }
            Some(map)
        }
        None => None,
    };
    Ok(Inputs { countries, scores, external, crosswalk, labels })
}

/// Loads, validates and executes a run.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let inputs = load_inputs(config)?;
    execute(config, inputs)
}

/// Executes a run on inputs from [`load_inputs`]. Errors returned here are
/// output failures; data problems are collected in the report.
pub fn execute(config: &RunConfig, inputs: Inputs) -> Result<RunReport> {
    let out = config.out.clone();
    io::create_dir(&out)?;
    let mut errors: Vec<String> = Vec::new();

    let prepared: Vec<std::result::Result<Prepared, String>> = inputs
        .countries
        .into_par_iter()
        .map(|(_, r, v)| prepare(r, v, &config.preprocess).map_err(|e| e.to_string()))
        .collect();
    for (spec, p) in config.countries.iter().zip(&prepared) {
        match p {
            Ok(p) => write_country_diagnostics(&out, &spec.name, p, config, &inputs.scores)?,
            Err(e) => errors.push(format!("country {}: {e}", spec.name)),
        }
    }

    let cells = grid(config);
    let outcomes: Vec<CellOutcome> = cells
        .into_par_iter()
        .map(|cell| {
            let ci = config.countries.iter().position(|c| c.name == cell.country).expect("grid from config");
            let si = config.sources.iter().position(|s| s.name == cell.source).expect("grid from config");
            run_cell(&out, cell, &prepared[ci], &config.sources[si], &inputs.scores[si], config)
        })
        .collect();
    for o in &outcomes {
        let tag = format!(
            "cell {}/{}/{}/{}/{}",
            o.cell.country, o.cell.source, o.cell.dimension, o.cell.variant, o.cell.transform
        );
        if let Some(e) = &o.error {
            errors.push(format!("{tag}: {e}"));
        }
        for d in &o.unscorable {
            errors.push(format!("{tag}: document `{d}` shares no words with the word scores"));
        }
    }
    write_cell_index(&out.join("cells.csv"), &outcomes)?;

    // Merge run estimates with the benchmarks.
    let crosswalk = match inputs.crosswalk {
        Some(c) => c,
        None => {
            let mut c = Crosswalk::new();
            for p in prepared.iter().flatten() {
                for d in p.virgin.documents() {
                    c.insert(d.id.as_str(), d.id.as_str(), d.country.as_str())?;
                }
            }
            c
        }
    };
    let runs: Vec<RunRecord> = outcomes
        .iter()
        .filter(|o| o.error.is_none())
        .flat_map(|o| {
            o.estimates.iter().map(|e| RunRecord {
                run: o.cell.column(),
                document: e.document.clone(),
                dimension: e.dimension.clone(),
                score: e.position(),
            })
        })
        .collect();
    let scales: BTreeMap<String, Scale> =
        config.benchmarks.iter().map(|b| (b.name.clone(), b.scale)).collect();
    let merged = merge_estimates(&runs, &inputs.external, &crosswalk, &scales)?;
    io::write_estimate_table(&out.join("meta.csv"), &merged.table)?;
    let mut unc = CsvOut::create(&out.join("uncovered.csv"), &["doc_id"])?;
    for d in &merged.uncovered {
        unc.row([d])?;
    }
    unc.finish()?;

    let columns: Vec<(String, Variant, TransformKind)> = {
        let mut seen = Vec::new();
        for o in &outcomes {
            let key = (o.cell.source.clone(), o.cell.variant, o.cell.transform);
            if !seen.contains(&key) {
                seen.push(key);
            }
        }
        seen
    };
    let present: BTreeSet<&str> = merged.table.columns().iter().map(|c| c.name.as_str()).collect();
    let summary = validate_all(&out, config, &merged.table, &columns, &present, &mut errors)?;

    if let (Some(spec), Some(labels)) = (&config.construct, &inputs.labels) {
        let mut models: Vec<String> = columns
            .iter()
            .map(|(s, v, t)| column_name(s, *v, *t))
            .filter(|c| present.contains(c.as_str()))
            .collect();
        models.extend(config.benchmarks.iter().map(|b| b.name.clone()));
        if let Err(e) = construct_fits(&out.join("fits"), &merged.table, &models, labels, spec) {
            errors.push(format!("construct: {e}"));
        }
    }

    let mut log = errors.join("\n");
    if !log.is_empty() {
        log.push('\n');
    }
    io::write_text(&out.join("errors.log"), &log)?;
    Ok(RunReport { out, cells: outcomes, summary, errors })
}

fn run_cell(
    out: &Path,
    cell: Cell,
    prepared: &std::result::Result<Prepared, String>,
    source: &SourceSpec,
    scores: &ReferenceScores,
    config: &RunConfig,
) -> CellOutcome {
    let dir = out.join(cell.dir());
    let result = prepared.as_ref().map_err(|e| format!("preprocessing failed: {e}")).and_then(|p| {
        let anchors = source.anchors.get(&(cell.country.clone(), cell.dimension.clone()));
        let scored = score_and_transform(
            p,
            scores,
            &cell.dimension,
            cell.variant,
            config.frequency,
            Some(cell.transform),
            anchors,
        )
        .map_err(|e| e.to_string())?;
        write_scored(&dir, &scored, &cell.dimension, cell.variant).map_err(|e| e.to_string())?;
        Ok(scored)
    });
    match result {
        Ok(s) => CellOutcome {
            estimates: s
                .estimates
                .iter()
                .map(|e| EstimateRecord::new(e, &cell.dimension, cell.variant))
                .collect(),
            unscorable: s.unscorable,
            error: None,
            cell,
        },
        Err(e) => {
            let _ = io::create_dir(&dir).and_then(|_| io::write_text(&dir.join("error.txt"), &format!("{e}\n")));
            CellOutcome { cell, estimates: Vec::new(), unscorable: Vec::new(), error: Some(e) }
        }
    }
}

fn write_cell_index(path: &Path, outcomes: &[CellOutcome]) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &["cell", "country", "source", "dimension", "variant", "transform", "status", "path", "message"],
    )?;
    for (i, o) in outcomes.iter().enumerate() {
        let c = &o.cell;
        out.row([
            (i + 1).to_string(),
            c.country.clone(),
            c.source.clone(),
            c.dimension.clone(),
            c.variant.to_string(),
            c.transform.to_string(),
            o.status().as_str().to_owned(),
            c.dir().to_string_lossy().replace('\\', "/"),
            o.error.clone().unwrap_or_default(),
        ])?;
    }
    out.finish()
}

fn write_country_diagnostics(
    out: &Path,
    country: &str,
    p: &Prepared,
    config: &RunConfig,
    scores: &[ReferenceScores],
) -> Result<()> {
    let dir = out.join("countries").join(path_safe(country));
    io::create_dir(&dir)?;
    io::write_matrix(&dir.join("reference_matrix.csv"), &p.reference_matrix)?;
    io::write_matrix(&dir.join("virgin_matrix.csv"), &p.virgin_matrix)?;
    io::write_stopwords(&dir.join("stopwords.csv"), &p.stoplists)?;
    io::write_corpus_stats(
        &dir.join("stats.csv"),
        &[("reference", corpus_stats(&p.reference_matrix)), ("virgin", corpus_stats(&p.virgin_matrix))],
    )?;
    if let Ok(d) = diagnose_overlap(&p.reference_matrix, &p.virgin_matrix) {
        io::write_overlap(&dir.join("overlap.csv"), &dir.join("overlap_summary.csv"), &d)?;
    }

    // Raw scores under both normalizations, side by side.
    let mut v = CsvOut::create(
        &dir.join("variants.csv"),
        &["source", "dimension", "document", "total", "cooccur", "difference"],
    )?;
    for (s, sc) in config.sources.iter().zip(scores) {
        for dim in &config.dimensions {
            let ids: Vec<&str> = p
                .reference_matrix
                .documents()
                .iter()
                .map(String::as_str)
                .filter(|id| sc.get(id, dim).is_some())
                .collect();
            let cmp = p
                .reference_matrix
                .select_documents(&ids)
                .and_then(|m| ReferenceSet::new(m, sc.clone()))
                .and_then(|r| train(&r, dim, config.frequency))
                .and_then(|t| compare_variants(&p.virgin_matrix, &t));
            if let Ok(cmp) = cmp {
                for r in &cmp.rows {
                    v.row([
                        s.name.clone(),
                        dim.clone(),
                        r.document.clone(),
                        io::fmt_float(r.total_words),
                        io::fmt_float(r.co_occurring),
                        io::fmt_float(r.difference),
                    ])?;
                }
            }
        }
    }
    v.finish()
}

fn seed_for(base: u64, index: u64) -> u64 {
    base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn validate_all(
    out: &Path,
    config: &RunConfig,
    table: &EstimateTable,
    columns: &[(String, Variant, TransformKind)],
    present: &BTreeSet<&str>,
    errors: &mut Vec<String>,
) -> Result<Vec<ReportRow>> {
    let benches: Vec<&str> = config.benchmarks.iter().map(|b| b.name.as_str()).collect();
    let mut summary = Vec::new();
    let mut criterion = CsvOut::create(
        &out.join("criterion.csv"),
        &[
            "dimension", "variant", "reference", "transformation", "rescale", "benchmark", "ci_high",
            "threshold", "passes",
        ],
    )?;
    let mut pairs: BTreeMap<(usize, usize), Vec<PairResult>> = BTreeMap::new();
    let mut call = 0u64;

    for (di, dim) in config.dimensions.iter().enumerate() {
        let t = table.filter_dimension(dim);
        for (source, variant, transform) in columns {
            let col = column_name(source, *variant, *transform);
            if !present.contains(col.as_str()) || benches.is_empty() {
                continue;
            }
            for (mi, &mode) in config.rescale.iter().enumerate() {
                call += 1;
                let method = config.ci_method(seed_for(config.seed, call));
                let row = |benchmark: &str, result| ReportRow {
                    dimension: dim.clone(),
                    variant: variant.to_string(),
                    reference: source.clone(),
                    benchmark: benchmark.to_owned(),
                    transformation: transform.to_string(),
                    rescale: mode,
                    result,
                };
                let tag = format!("validation {dim} {col} {mode}");
                if benches.len() >= 2 {
                    match benchmark_matrix(&t, &col, &benches, mode, config.level, method) {
                        Ok(rep) => {
                            for p in &rep.candidate_pairs {
                                criterion.row([
                                    dim.clone(),
                                    variant.to_string(),
                                    source.clone(),
                                    transform.to_string(),
                                    mode.to_string(),
                                    p.benchmark.clone(),
                                    io::fmt_float(p.result.ci_high),
                                    io::fmt_float(rep.threshold),
                                    p.passes.to_string(),
                                ])?;
                                summary.push(row(&p.benchmark, p.result));
                            }
                            pairs.entry((di, mi)).or_insert(rep.benchmark_pairs);
                        }
                        Err(e) => errors.push(format!("{tag}: {e}")),
                    }
                } else {
                    let r = rescale_unit(&t, &col, mode)
                        .and_then(|a| Ok((a, rescale_unit(&t, benches[0], mode)?)))
                        .and_then(|(a, b)| pairwise_complete(&a, &b))
                        .and_then(|(x, y)| ccc_with(&x, &y, config.level, method));
                    match r {
                        Ok(r) => summary.push(row(benches[0], r)),
                        Err(e) => errors.push(format!("{tag}: {e}")),
                    }
                }
            }
        }
    }
    criterion.finish()?;
    io::write_report(&out.join("summary.csv"), &summary)?;

    let mut bp = CsvOut::create(
        &out.join("benchmark_pairs.csv"),
        &["dimension", "rescale", "first", "second", "rho_c", "n", "ci_low", "ci_high", "pearson_r", "c_b"],
    )?;
    for ((di, mi), list) in &pairs {
        for p in list {
            let r = &p.result;
            bp.row([
                config.dimensions[*di].clone(),
                config.rescale[*mi].to_string(),
                p.first.clone(),
                p.second.clone(),
                io::fmt_exact(r.rho_c),
                r.n.to_string(),
                io::fmt_float(r.ci_low),
                io::fmt_float(r.ci_high),
                io::fmt_exact(r.pearson),
                io::fmt_exact(r.bias_correction),
            ])?;
        }
    }
    bp.finish()?;
    Ok(summary)
}

/// One multinomial model per estimate source, all on the same parties:
/// those with a class label and a complete feature row in every model.
/// Features are the source's positions on the construct dimensions after
/// whole-dimension unit rescaling.
fn construct_fits(
    dir: &Path,
    table: &EstimateTable,
    models: &[String],
    labels: &BTreeMap<String, String>,
    spec: &crate::config::ConstructSpec,
) -> Result<()> {
    io::create_dir(dir)?;
    let mut features: Vec<BTreeMap<String, Vec<Option<f64>>>> = Vec::new();
    for m in models {
        let values = rescale_unit(table, m, RescaleMode::WholeDimension)?;
        let mut by_party: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
        for (k, v) in table.keys().iter().zip(values) {
            if let Some(f) = spec.dimensions.iter().position(|d| *d == k.dimension) {
                by_party.entry(k.party.clone()).or_insert_with(|| vec![None; spec.dimensions.len()])[f] = v;
            }
        }
        features.push(by_party);
    }
    let parties: Vec<&String> = labels
        .keys()
        .filter(|p| {
            features
                .iter()
                .all(|f| f.get(*p).is_some_and(|row| row.iter().all(Option::is_some)))
        })
        .collect();
    let mut classes: Vec<String> = parties.iter().map(|p| labels[*p].clone()).collect();
    classes.sort();
    classes.dedup();

    let designs: Vec<DesignMatrix> = features
        .iter()
        .map(|f| {
            let rows: Vec<(String, String, Vec<Option<f64>>)> =
                parties.iter().map(|p| ((*p).clone(), labels[*p].clone(), f[*p].clone())).collect();
            DesignMatrix::from_rows(&rows, spec.dimensions.clone(), Some(classes.clone())).map(|(d, _)| d)
        })
        .collect::<std::result::Result<_, _>>()?;
    let null_design = designs
        .first()
        .ok_or_else(|| Error::Config("no models to fit".to_owned()))?
        .intercept_only();

    let options = FitOptions {
        tolerance: spec.tolerance,
        max_iterations: spec.max_iterations,
        ..FitOptions::default()
    };
    let mut all: Vec<(&str, &DesignMatrix)> = vec![("null", &null_design)];
    all.extend(models.iter().map(String::as_str).zip(&designs));
    let fits = all
        .par_iter()
        .map(|(_, d)| fit_multinomial(d, options))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let null = &fits[0];
    let rows: Vec<FitRow> = all
        .iter()
        .zip(&fits)
        .map(|((name, d), fit)| {
            Ok(FitRow {
                model: (*name).to_owned(),
                count_r2: count_r2(fit, d)?,
                mcfadden_r2: mcfadden_r2(fit, null).ok(),
                bic: bic(fit),
                fit: fit.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let names: Vec<&str> = all.iter().map(|(n, _)| *n).collect();
    let comparisons = compare_models(&fits, &names)?;
    let feature_names: BTreeMap<String, Vec<String>> = names
        .iter()
        .map(|&n| (n.to_owned(), if n == "null" { Vec::new() } else { spec.dimensions.clone() }))
        .collect();

    io::write_fit_stats(&dir.join("fit_stats.csv"), &rows)?;
    io::write_coefficients(&dir.join("coefficients.csv"), &rows, &classes, &feature_names)?;
    io::write_comparisons(&dir.join("bic_comparison.csv"), &comparisons)?;
    Ok(())
}
