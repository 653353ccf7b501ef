use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wordscores::core::construct::{
    bic, compare_models, count_r2, fit_multinomial, mcfadden_r2, DesignMatrix, FitOptions,
};
use wordscores::core::corpus::{corpus_stats, diagnose_overlap, PreprocessConfig, Role};
use wordscores::core::scaling::{FrequencyBasis, TransformKind, Variant};
use wordscores::core::validation::{
    benchmark_matrix, ccc_with, pairwise_complete, rescale_unit, CiMethod, EstimateTable,
    RescaleMode, Scale,
};
use wordscores::io::{self, EstimateRecord, FitRow, ReportRow};
use wordscores::pipeline::{self, Prepared};
use wordscores::plotdata::{emit_plot_data, PlotFilter, PlotKind};
use wordscores::{Error, RunConfig};

/// Supervised text scaling with Wordscores, plus its validation harness.
#[derive(Parser)]
#[command(name = "wordscores", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize a corpus, drop stop words, export the matrix and word counts.
    Preprocess(PreprocessArgs),
    /// Train word scores and score virgin texts (raw scores).
    Score(ScoreArgs),
    /// Score virgin texts and rescale with LBG or Martin-Vanberg.
    Transform(TransformArgs),
    /// Unit-rescale estimate columns, whole-dimension or per country.
    Rescale(RescaleArgs),
    /// Concordance of a candidate column against benchmark columns.
    Validate(ValidateArgs),
    /// Multinomial-logit fits with count R², McFadden R² and BIC comparison.
    Construct(ConstructArgs),
    /// Corpus statistics and reference/virgin overlap diagnostics.
    Diagnose(DiagnoseArgs),
    /// Run the full grid described by a config file.
    Run(RunArgs),
    /// Emit long-format CSV for plotting from a run directory.
    Plotdata(PlotArgs),
}

#[derive(Args, Clone)]
struct PrepFlags {
    /// Most frequent words dropped per country and year.
    #[arg(long, default_value_t = 20)]
    top_k: usize,
    #[arg(long)]
    keep_numbers: bool,
    #[arg(long)]
    keep_currency: bool,
    /// Snowball (English) stemming.
    #[arg(long)]
    stem: bool,
    #[arg(long)]
    min_doc_fraction: Option<f64>,
    #[arg(long)]
    max_doc_fraction: Option<f64>,
}

impl PrepFlags {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            strip_numbers: !self.keep_numbers,
            strip_currency: !self.keep_currency,
            top_k_stopwords: self.top_k,
            min_doc_fraction: self.min_doc_fraction,
            max_doc_fraction: self.max_doc_fraction,
            stemming: self.stem,
        }
    }
}

#[derive(Args)]
struct PreprocessArgs {
    /// CSV `id,label,country,year,path`.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    prep: PrepFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Total,
    Cooccur,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Total => Variant::TotalWords,
            VariantArg::Cooccur => Variant::CoOccurring,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Lbg,
    Mv,
}

impl From<TransformArg> for TransformKind {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Lbg => TransformKind::Lbg,
            TransformArg::Mv => TransformKind::Mv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RescaleArg {
    Wd,
    Pc,
}

impl From<RescaleArg> for RescaleMode {
    fn from(r: RescaleArg) -> Self {
        match r {
            RescaleArg::Wd => RescaleMode::WholeDimension,
            RescaleArg::Pc => RescaleMode::PerCountry,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FrequencyArg {
    Relative,
    Raw,
}

#[derive(Args)]
struct ScoreArgs {
    /// Manifest of the reference texts.
    #[arg(long)]
    reference: PathBuf,
    /// CSV `doc_id,dimension,score` for the reference texts.
    #[arg(long)]
    scores: PathBuf,
    /// Manifest of the virgin texts.
    #[arg(long)]
    virgin: PathBuf,
    /// Dimensions to score (default: every dimension in the scores file).
    #[arg(long)]
    dimension: Vec<String>,
    /// Normalization of virgin word frequencies (default: both).
    #[arg(long, value_enum)]
    variant: Vec<VariantArg>,
    #[arg(long, value_enum, default_value = "relative")]
    frequency: FrequencyArg,
    /// Also write the `word,freq,score` export of this virgin document.
    #[arg(long)]
    export_words: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    prep: PrepFlags,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    score: ScoreArgs,
    #[arg(long, value_enum)]
    transform: TransformArg,
    /// Martin-Vanberg anchor texts `low,high` (default: the reference
    /// texts with the lowest and highest score).
    #[arg(long, value_parser = parse_anchors)]
    anchors: Option<(String, String)>,
}

#[derive(Args)]
struct RescaleArgs {
    /// Estimate table `party_id,country,dimension,<column>...`.
    #[arg(long)]
    table: PathBuf,
    /// Columns to rescale (default: all).
    #[arg(long)]
    column: Vec<String>,
    #[arg(long, value_enum, default_value = "wd")]
    rescale: RescaleArg,
    /// Declared scale `NAME=MIN,MAX`; overrides the table's own.
    #[arg(long, value_parser = parse_scale)]
    scale: Vec<(String, Scale)>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    candidate: String,
    #[arg(long, required = true)]
    benchmark: Vec<String>,
    /// Rescale modes (default: both).
    #[arg(long, value_enum)]
    rescale: Vec<RescaleArg>,
    #[arg(long, value_parser = parse_scale)]
    scale: Vec<(String, Scale)>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Bootstrap resamples for the intervals; 0 uses the asymptotic formula.
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConstructArgs {
    /// CSV `party_id,class_label,feature_1,...`.
    #[arg(long)]
    input: PathBuf,
    /// Model `NAME=feature,feature`; repeatable (default: all features).
    #[arg(long)]
    model: Vec<String>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    virgin: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    prep: PrepFlags,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    variant: Vec<VariantArg>,
    #[arg(long, value_enum)]
    transform: Vec<TransformArg>,
    #[arg(long, value_enum)]
    rescale: Vec<RescaleArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    WordscoreDistribution,
    CccDotplot,
    FitBars,
}

#[derive(Args)]
struct PlotArgs {
    /// Run output directory (or a cell directory for word scores).
    #[arg(long)]
    from: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    document: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scale(s: &str) -> Result<(String, Scale), String> {
    let (name, range) = s.split_once('=').ok_or("expected NAME=MIN,MAX")?;
    let (lo, hi) = range.split_once(',').ok_or("expected NAME=MIN,MAX")?;
    let min = lo.trim().parse().map_err(|_| format!("bad minimum `{lo}`"))?;
    let max = hi.trim().parse().map_err(|_| format!("bad maximum `{hi}`"))?;
    Ok((name.to_owned(), Scale::Declared { min, max }))
}

fn parse_anchors(s: &str) -> Result<(String, String), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_owned(), b.to_owned())),
        _ => Err("expected two document ids `LOW,HIGH`".to_owned()),
    }
}

/// Failure with the process exit status it maps to.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { code: 1, error }
    }
}

impl From<wordscores::core::Error> for Failure {
    fn from(e: wordscores::core::Error) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn usage(error: Error) -> Failure {
    Failure { code: 2, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess(a) => preprocess(a),
        Command::Score(a) => score(a, None, None),
        Command::Transform(a) => {
            score(a.score, Some(a.transform.into()), a.anchors)
        }
        Command::Rescale(a) => rescale(a),
        Command::Validate(a) => validate(a),
        Command::Construct(a) => construct(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Run(a) => run(a),
        Command::Plotdata(a) => plotdata(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}

type Outcome = Result<u8, Failure>;

fn preprocess(a: PreprocessArgs) -> Outcome {
    let corpus = io::load_documents(&a.manifest, Role::Virgin).map_err(usage)?;
    let (corpora, stop) = pipeline::preprocess(vec![corpus], &a.prep.config())?;
    let matrix = wordscores::core::corpus::build_matrix(&corpora[0])?;
    io::create_dir(&a.out)?;
    io::write_matrix(&a.out.join("matrix.csv"), &matrix)?;
    io::write_stopwords(&a.out.join("stopwords.csv"), &stop)?;
    io::write_corpus_stats(&a.out.join("stats.csv"), &[("corpus", corpus_stats(&matrix))])?;
    println!("{} documents, {} words kept", matrix.n_documents(), matrix.n_words());
    Ok(0)
}

fn load_pair(reference: &Path, virgin: &Path, prep: &PrepFlags) -> Result<Prepared, Failure> {
    let r = io::load_documents(reference, Role::Reference).map_err(usage)?;
    let v = io::load_documents(virgin, Role::Virgin).map_err(usage)?;
    Ok(pipeline::prepare(r, v, &prep.config())?)
}

fn score(a: ScoreArgs, transform: Option<TransformKind>, anchors: Option<(String, String)>) -> Outcome {
    let scores = io::read_reference_scores(&a.scores).map_err(usage)?;
    let prepared = load_pair(&a.reference, &a.virgin, &a.prep)?;
    let dims: Vec<String> = if a.dimension.is_empty() {
        scores.dimensions().map(str::to_owned).collect()
    } else {
        a.dimension.clone()
    };
    let variants: Vec<Variant> = if a.variant.is_empty() {
        Variant::ALL.to_vec()
    } else {
        a.variant.iter().map(|&v| v.into()).collect()
    };
    let frequency = match a.frequency {
        FrequencyArg::Relative => FrequencyBasis::Relative,
        FrequencyArg::Raw => FrequencyBasis::Raw,
    };
    io::create_dir(&a.out)?;
    let mut records = Vec::new();
    let mut unscorable = 0;
    for dim in &dims {
        let dir = a.out.join(dim);
        for &variant in &variants {
            let s = pipeline::score_and_transform(
                &prepared,
                &scores,
                dim,
                variant,
                frequency,
                transform,
                anchors.as_ref(),
            )?;
            let dir = dir.join(variant.as_str());
            pipeline::write_scored(&dir, &s, dim, variant)?;
            for doc in &a.export_words {
                let (_, rows) = s
                    .words
                    .iter()
                    .find(|(d, _)| d == doc)
                    .ok_or_else(|| Failure::from(wordscores::core::Error::UnknownDocument(doc.clone())))?;
                io::write_word_export(&dir.join(format!("words-{doc}.csv")), rows)?;
            }
            for d in &s.unscorable {
                eprintln!("warning: {dim}/{variant}: document `{d}` shares no words with the word scores");
            }
            unscorable += s.unscorable.len();
            records.extend(s.estimates.iter().map(|e| EstimateRecord::new(e, dim, variant)));
        }
    }
    io::write_estimates(&a.out.join("estimates.csv"), &records)?;
    println!("{} estimates written to {}", records.len(), a.out.display());
    Ok(if unscorable > 0 { 3 } else { 0 })
}

fn apply_scales(table: EstimateTable, scales: &[(String, Scale)]) -> Result<EstimateTable, Failure> {
    if scales.is_empty() {
        return Ok(table);
    }
    let overrides: BTreeMap<&str, Scale> = scales.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let mut out = EstimateTable::new();
    for c in table.columns() {
        out.add_column(c.name.as_str(), overrides.get(c.name.as_str()).copied().unwrap_or(c.scale))?;
    }
    for (i, k) in table.keys().iter().enumerate() {
        out.add_row(k.clone())?;
        for c in table.columns() {
            out.set(k, &c.name, c.values[i])?;
        }
    }
    for name in overrides.keys() {
        out.column(name).map_err(|e| usage(e.into()))?;
    }
    Ok(out)
}

fn rescale(a: RescaleArgs) -> Outcome {
    let table = apply_scales(io::read_estimate_table(&a.table).map_err(usage)?, &a.scale)?;
    let mode: RescaleMode = a.rescale.into();
    let names: Vec<String> = if a.column.is_empty() {
        table.columns().iter().map(|c| c.name.clone()).collect()
    } else {
        a.column.clone()
    };
    let mut out = EstimateTable::new();
    for k in table.keys() {
        out.add_row(k.clone())?;
    }
    for name in &names {
        let values = rescale_unit(&table, name, mode)?;
        out.add_column(name.as_str(), Scale::Declared { min: 0.0, max: 1.0 })?;
        for (k, v) in table.keys().iter().zip(values) {
            out.set(k, name, v)?;
        }
    }
    io::create_dir(&a.out)?;
    io::write_estimate_table(&a.out.join("rescaled.csv"), &out)?;
    Ok(0)
}

/// `source/variant/transform` column names split into report fields.
fn split_candidate(name: &str) -> (String, String, String) {
    match name.split('/').collect::<Vec<_>>()[..] {
        [s, v, t] => (s.to_owned(), v.to_owned(), t.to_owned()),
        _ => (name.to_owned(), String::new(), String::new()),
    }
}

fn validate(a: ValidateArgs) -> Outcome {
    let table = apply_scales(io::read_estimate_table(&a.table).map_err(usage)?, &a.scale)?;
    let modes: Vec<RescaleMode> = if a.rescale.is_empty() {
        vec![RescaleMode::WholeDimension, RescaleMode::PerCountry]
    } else {
        a.rescale.iter().map(|&r| r.into()).collect()
    };
    let method =
        if a.bootstrap == 0 { CiMethod::Asymptotic } else { CiMethod::Bootstrap { resamples: a.bootstrap, seed: a.seed } };
    let (reference, variant, transformation) = split_candidate(&a.candidate);
    let benches: Vec<&str> = a.benchmark.iter().map(String::as_str).collect();
    let mut report = Vec::new();
    let mut lines = vec!["dimension,rescale,benchmark,ci_high,threshold,passes".to_owned()];
    for dim in table.dimensions() {
        let t = table.filter_dimension(&dim);
        for &mode in &modes {
            let row = |benchmark: &str, result| ReportRow {
                dimension: dim.clone(),
                variant: variant.clone(),
                reference: reference.clone(),
                benchmark: benchmark.to_owned(),
                transformation: transformation.clone(),
                rescale: mode,
                result,
            };
            if benches.len() >= 2 {
                let rep = benchmark_matrix(&t, &a.candidate, &benches, mode, a.level, method)?;
                for p in &rep.candidate_pairs {
                    lines.push(format!(
                        "{dim},{mode},{},{},{},{}",
                        p.benchmark,
                        io::fmt_float(p.result.ci_high),
                        io::fmt_float(rep.threshold),
                        p.passes
                    ));
                    report.push(row(&p.benchmark, p.result));
                }
                for p in &rep.benchmark_pairs {
                    report.push(ReportRow {
                        reference: p.first.clone(),
                        variant: String::new(),
                        transformation: String::new(),
                        ..row(&p.second, p.result)
                    });
                }
            } else {
                let x = rescale_unit(&t, &a.candidate, mode)?;
                let y = rescale_unit(&t, benches[0], mode)?;
                let (x, y) = pairwise_complete(&x, &y)?;
                report.push(row(benches[0], ccc_with(&x, &y, a.level, method)?));
            }
        }
    }
    io::create_dir(&a.out)?;
    io::write_report(&a.out.join("report.csv"), &report)?;
    if benches.len() >= 2 {
        io::write_text(&a.out.join("criterion.csv"), &(lines.join("\n") + "\n"))?;
    }
    println!("{} comparisons written to {}", report.len(), a.out.display());
    Ok(0)
}

fn construct(a: ConstructArgs) -> Outcome {
    let (rows, features) = io::read_construct_input(&a.input).map_err(usage)?;
    let mut models: Vec<(String, Vec<usize>)> = Vec::new();
    for m in &a.model {
        let (name, list) = m.split_once('=').ok_or_else(|| usage(Error::Config(format!("model `{m}` must be NAME=f1,f2"))))?;
        let cols = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|f| {
                features
                    .iter()
                    .position(|g| g == f)
                    .ok_or_else(|| usage(Error::Config(format!("unknown feature `{f}`"))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        models.push((name.to_owned(), cols));
    }
    if models.is_empty() {
        models.push(("full".to_owned(), (0..features.len()).collect()));
    }
    // Listwise deletion over every feature any model uses, so all fits
    // share the same rows.
    let used: Vec<usize> = {
        let mut u: Vec<usize> = models.iter().flat_map(|(_, c)| c.iter().copied()).collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let trimmed: Vec<_> = rows
        .iter()
        .map(|(p, l, x)| (p.clone(), l.clone(), used.iter().map(|&i| x[i]).collect::<Vec<_>>()))
        .collect();
    let names: Vec<String> = used.iter().map(|&i| features[i].clone()).collect();
    let (full, dropped) = DesignMatrix::from_rows(&trimmed, names.clone(), None)?;
    if dropped > 0 {
        eprintln!("note: {dropped} row(s) with missing predictors dropped");
    }
    let options = FitOptions { tolerance: a.tolerance, max_iterations: a.max_iterations, ..FitOptions::default() };
    let null_design = full.intercept_only();
    let null = fit_multinomial(&null_design, options)?;
    let mut fit_rows = vec![FitRow {
        model: "null".to_owned(),
        count_r2: count_r2(&null, &null_design)?,
        mcfadden_r2: mcfadden_r2(&null, &null).ok(),
        bic: bic(&null),
        fit: null.clone(),
    }];
    let mut feature_names = BTreeMap::from([("null".to_owned(), Vec::new())]);
    for (name, cols) in &models {
        let idx: Vec<usize> = cols.iter().map(|c| used.iter().position(|u| u == c).expect("used")).collect();
        let d = full.select_features(&idx)?;
        let fit = fit_multinomial(&d, options)?;
        if fit.separation {
            eprintln!("warning: model `{name}` separates the classes; coefficients clamped");
        }
        feature_names.insert(name.clone(), d.feature_names().to_vec());
        fit_rows.push(FitRow {
            model: name.clone(),
            count_r2: count_r2(&fit, &d)?,
            mcfadden_r2: mcfadden_r2(&fit, &null).ok(),
            bic: bic(&fit),
            fit,
        });
    }
    let fits: Vec<_> = fit_rows.iter().map(|r| r.fit.clone()).collect();
    let labels: Vec<&str> = fit_rows.iter().map(|r| r.model.as_str()).collect();
    let comparisons = compare_models(&fits, &labels)?;
    io::create_dir(&a.out)?;
    io::write_fit_stats(&a.out.join("fit_stats.csv"), &fit_rows)?;
    io::write_coefficients(&a.out.join("coefficients.csv"), &fit_rows, full.class_names(), &feature_names)?;
    io::write_comparisons(&a.out.join("bic_comparison.csv"), &comparisons)?;
    println!("{} models fitted on {} rows", fit_rows.len(), full.n());
    Ok(0)
}

fn diagnose(a: DiagnoseArgs) -> Outcome {
    let p = load_pair(&a.reference, &a.virgin, &a.prep)?;
    io::create_dir(&a.out)?;
    io::write_stopwords(&a.out.join("stopwords.csv"), &p.stoplists)?;
    io::write_corpus_stats(
        &a.out.join("stats.csv"),
        &[("reference", corpus_stats(&p.reference_matrix)), ("virgin", corpus_stats(&p.virgin_matrix))],
    )?;
    let d = diagnose_overlap(&p.reference_matrix, &p.virgin_matrix)?;
    io::write_overlap(&a.out.join("overlap.csv"), &a.out.join("overlap_summary.csv"), &d)?;
    println!(
        "vocabulary overlap {}, skewness reference {} / virgin {}",
        io::fmt_float(d.vocabulary_overlap),
        io::fmt_float(d.reference_skewness),
        io::fmt_float(d.virgin_skewness)
    );
    Ok(0)
}

fn run(a: RunArgs) -> Outcome {
    let mut config = RunConfig::load(&a.config).map_err(usage)?;
    if let Some(out) = a.out {
        config.out = out;
    }
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if !a.variant.is_empty() {
        config.variants = a.variant.iter().map(|&v| v.into()).collect();
    }
    if !a.transform.is_empty() {
        config.transforms = a.transform.iter().map(|&t| t.into()).collect();
    }
    if !a.rescale.is_empty() {
        config.rescale = a.rescale.iter().map(|&r| r.into()).collect();
    }
    let inputs = pipeline::load_inputs(&config).map_err(usage)?;
    let report = pipeline::execute(&config, inputs)?;
    let failed = report.cells.iter().filter(|c| c.error.is_some()).count();
    println!(
        "{} cells ({} failed), {} summary rows, output in {}",
        report.cells.len(),
        failed,
        report.summary.len(),
        report.out.display()
    );
    for e in &report.errors {
        eprintln!("{e}");
    }
    Ok(report.exit_code() as u8)
}

fn plotdata(a: PlotArgs) -> Outcome {
    let kind = match a.kind {
        KindArg::WordscoreDistribution => PlotKind::WordscoreDistribution,
        KindArg::CccDotplot => PlotKind::CccDotplot,
        KindArg::FitBars => PlotKind::FitBars,
    };
    let filter = PlotFilter { document: a.document };
    match a.out {
        Some(path) => {
            let f = File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            emit_plot_data(&a.from, kind, &filter, BufWriter::new(f)).map_err(usage)?;
        }
        None => {
            emit_plot_data(&a.from, kind, &filter, std::io::stdout().lock()).map_err(usage)?;
        }
    }
    Ok(0)
}
