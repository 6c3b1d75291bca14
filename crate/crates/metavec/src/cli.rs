//! The `metavec` command line.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use metavec_core::align::{align_to_target, MappingDictionary};
use metavec_core::combine::{combine, CombineConfig, Method, OovPolicy};
use metavec_core::eval::{evaluate_suite, EvalMode, EvalOptions};
use metavec_core::linalg::Step0;
use metavec_core::oov::{extend_to_union, SynthesisOptions, DEFAULT_NEIGHBORS};
use metavec_core::EmbeddingSpace;

use crate::formats::{self, Delimiter, Format, Loaded, Precision, ReadOptions};
use crate::output::Outputs;
use crate::provenance::{sidecar_path, OutputEntry, Sidecar, SourceEntry};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "metavec", version, about = "Build and evaluate meta-embeddings from pre-trained word vectors")]
pub struct Cli {
    /// Output format (default: the format of the first input)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Input format (default: `.bin` files are binary, others text)
    #[arg(long, global = true, value_enum)]
    pub input_format: Option<Format>,
    /// Digits after the decimal point in text output; 17 or more writes exact values
    #[arg(long, global = true, default_value_t = 17)]
    pub precision: usize,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize and orthogonally map SRC onto the space of TGT
    Map(MapArgs),
    /// Map all inputs to a common space, synthesize missing words, average
    Mvm(MvmArgs),
    /// Baseline combiners: average, concat, concat-reduce
    Baseline(BaselineArgs),
    /// Extend two already-aligned spaces to their union vocabulary
    #[command(name = "synth-oov")]
    SynthOov(SynthArgs),
    /// Word-similarity evaluation (Spearman correlation and coverage)
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    pub src: PathBuf,
    pub tgt: PathBuf,
    /// Output embedding file
    #[arg(long)]
    pub out: PathBuf,
    /// Bilingual dictionary (`source TAB target`); default is the vocabulary intersection
    #[arg(long)]
    pub dict: Option<PathBuf>,
    /// Skip the final length normalization after centering
    #[arg(long)]
    pub strict_step0: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OovArg {
    Nn,
    Available,
    Zero,
}

impl From<OovArg> for OovPolicy {
    fn from(o: OovArg) -> Self {
        match o {
            OovArg::Nn => OovPolicy::NearestNeighbor,
            OovArg::Available => OovPolicy::Available,
            OovArg::Zero => OovPolicy::Zero,
        }
    }
}

#[derive(Debug, Args)]
pub struct MvmArgs {
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    /// Output embedding file
    #[arg(long)]
    pub out: PathBuf,
    /// Index of the input whose space is the common space
    #[arg(long, default_value_t = 0)]
    pub target: usize,
    /// Neighbours per synthesized word
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub k: usize,
    /// How words missing from a source are filled before averaging
    #[arg(long, value_enum, default_value_t = OovArg::Nn)]
    pub oov: OovArg,
    /// Token prefix, one per input in order
    #[arg(long)]
    pub prefix: Vec<String>,
    /// Dictionary for the n-th non-target input, in input order
    #[arg(long)]
    pub dict: Vec<PathBuf>,
    /// Write `word TAB neighbours` for every synthesized word
    #[arg(long)]
    pub audit: Option<PathBuf>,
    /// Skip the final length normalization after centering
    #[arg(long)]
    pub strict_step0: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineMethod {
    Average,
    Concat,
    ConcatReduce,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(value_enum)]
    pub method: BaselineMethod,
    #[arg(required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Output embedding file
    #[arg(long)]
    pub out: PathBuf,
    /// Output dimension (concat-reduce only)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Dominant directions removed after reduction
    #[arg(long, default_value_t = 0)]
    pub post_remove: usize,
    /// Fill missing words by nearest-neighbour synthesis
    #[arg(long, conflicts_with = "zero_oov")]
    pub nn_oov: bool,
    /// Average: count missing words as zero vectors instead of skipping them
    #[arg(long)]
    pub zero_oov: bool,
    /// Neighbours per synthesized word (with --nn-oov)
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub k: usize,
    /// Token prefix, one per input in order
    #[arg(long)]
    pub prefix: Vec<String>,
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub e1: PathBuf,
    pub e2: PathBuf,
    #[arg(long)]
    pub out1: PathBuf,
    #[arg(long)]
    pub out2: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub k: usize,
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub embeddings: PathBuf,
    #[arg(required = true, num_args = 1..)]
    pub datasets: Vec<PathBuf>,
    /// Look up the first word with PREFIX1 and the second with PREFIX2
    #[arg(long, num_args = 2, value_names = ["PREFIX1", "PREFIX2"])]
    pub crosslingual: Option<Vec<String>>,
    /// File of `dataset TAB sim|rel` lines; enables Av/Sim/Rel rows
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Machine-readable report (default: `<embeddings>.eval.tsv`)
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Delimiter::Tab)]
    pub delimiter: Delimiter,
    /// Retry failed lookups with the lowercased word
    #[arg(long)]
    pub lowercase_fallback: bool,
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = check_usage(&cli) {
        e.exit();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn check_usage(cli: &Cli) -> Result<(), clap::Error> {
    let mut cmd = Cli::command();
    if let Command::Baseline(b) = &cli.command {
        match (b.method, b.dim) {
            (BaselineMethod::ConcatReduce, None) => {
                return Err(cmd.error(ErrorKind::MissingRequiredArgument, "concat-reduce requires --dim <N>"))
            }
            (BaselineMethod::Average | BaselineMethod::Concat, Some(_)) => {
                return Err(cmd.error(ErrorKind::ArgumentConflict, "--dim is only valid for concat-reduce"))
            }
            _ => {}
        }
    }
    if cli.threads == Some(0) {
        return Err(cmd.error(ErrorKind::InvalidValue, "--threads must be at least 1"));
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Map(a) => cmd_map(cli, a),
        Command::Mvm(a) => cmd_mvm(cli, a),
        Command::Baseline(a) => cmd_baseline(cli, a),
        Command::SynthOov(a) => cmd_synth_oov(cli, a),
        Command::Eval(a) => cmd_eval(cli, a),
    }
}

fn input_format(cli: &Cli, path: &Path) -> Format {
    cli.input_format.unwrap_or_else(|| Format::from_path(path))
}

fn output_format(cli: &Cli, first_input: &Path) -> Format {
    cli.format.unwrap_or_else(|| input_format(cli, first_input))
}

fn load(cli: &Cli, path: &Path) -> Result<Loaded> {
    let format = input_format(cli, path);
    let loaded = formats::read_embeddings(path, format, &ReadOptions::default())
        .with_context(|| format!("reading {}", path.display()))?;
    eprintln!(
        "loaded {}: {} words, dim {}{}",
        path.display(),
        loaded.space.len(),
        loaded.space.dim(),
        if loaded.duplicates > 0 { format!(", {} duplicates dropped", loaded.duplicates) } else { String::new() }
    );
    Ok(loaded)
}

fn load_dictionary(path: &Path) -> Result<MappingDictionary> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    formats::load_bilingual_dictionary(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn step0(strict: bool) -> Step0 {
    if strict {
        Step0::UnitCenter
    } else {
        Step0::UnitCenterUnit
    }
}

fn write_space(
    outputs: &mut Outputs,
    path: &Path,
    space: &EmbeddingSpace,
    format: Format,
    precision: usize,
) -> Result<()> {
    outputs
        .write(path, |w| formats::write_embeddings(space, format, Precision::digits(precision), w))
        .with_context(|| format!("writing {}", path.display()))
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Text => "text",
        Format::Binary => "binary",
    }
}

fn cmd_map(cli: &Cli, a: &MapArgs) -> Result<()> {
    let src = load(cli, &a.src)?;
    let tgt = load(cli, &a.tgt)?;
    let dicts = match &a.dict {
        Some(p) => vec![None, Some(load_dictionary(p)?)],
        None => Vec::new(),
    };
    let aligned = align_to_target(&[tgt.space, src.space], 0, &dicts, step0(a.strict_step0))?;
    let report = &aligned.reports[1];
    let mut outputs = Outputs::new();
    write_space(&mut outputs, &a.out, &aligned.spaces[1], output_format(cli, &a.src), cli.precision)?;
    outputs.commit();
    let mut out = io::stdout().lock();
    writeln!(out, "dictionary_size\t{}", report.dictionary_size)?;
    writeln!(out, "filtered_pairs\t{}", report.filtered)?;
    writeln!(out, "residual\t{}", report.residual)?;
    Ok(())
}

struct Sources {
    spaces: Vec<EmbeddingSpace>,
    entries: Vec<SourceEntry>,
}

fn load_all(cli: &Cli, paths: &[PathBuf]) -> Result<Sources> {
    let mut spaces = Vec::with_capacity(paths.len());
    let mut entries = Vec::with_capacity(paths.len());
    for p in paths {
        let l = load(cli, p)?;
        entries.push(SourceEntry {
            path: p.display().to_string(),
            label: l.space.meta().unwrap_or_default().to_string(),
            vocab_size: l.space.len(),
            dim: l.space.dim(),
            duplicates_dropped: l.duplicates,
        });
        spaces.push(l.space);
    }
    Ok(Sources { spaces, entries })
}

fn prefixes(prefix: &[String], n: usize) -> Result<Option<Vec<String>>> {
    match prefix.len() {
        0 => Ok(None),
        m if m == n => Ok(Some(prefix.to_vec())),
        m => bail!("{m} --prefix values given for {n} inputs"),
    }
}

fn write_combined(
    cli: &Cli,
    inputs: &[PathBuf],
    out: &Path,
    audit: Option<&Path>,
    sources: Sources,
    config: &CombineConfig,
) -> Result<()> {
    let meta = combine(&sources.spaces, config)?;
    let format = output_format(cli, &inputs[0]);
    let mut outputs = Outputs::new();
    write_space(&mut outputs, out, &meta.space, format, cli.precision)?;
    let mut sidecar = Sidecar::from_provenance(
        &meta.provenance,
        sources.entries,
        OutputEntry {
            path: out.display().to_string(),
            format: format_name(format).into(),
            vocab_size: meta.space.len(),
            dim: meta.space.dim(),
        },
    );
    if config.method == Method::ConcatReduce {
        sidecar.reduce_dim = config.reduce_dim;
        sidecar.post_remove = Some(config.post_remove);
    }
    outputs.write(&sidecar_path(out), |w| {
        serde_json::to_writer_pretty(&mut *w, &sidecar).map_err(io::Error::from)?;
        Ok(w.write_all(b"\n")?)
    })?;
    if let Some(path) = audit {
        let report = meta.provenance.synthesis.clone().unwrap_or_default();
        outputs.write(path, |w| formats::write_audit(&report, w))?;
    }
    outputs.commit();
    eprintln!("wrote {} ({} words, dim {})", out.display(), meta.space.len(), meta.space.dim());
    Ok(())
}

fn cmd_mvm(cli: &Cli, a: &MvmArgs) -> Result<()> {
    let n = a.inputs.len();
    if a.target >= n {
        bail!("--target {} out of range for {n} inputs", a.target);
    }
    if a.dict.len() > n - 1 {
        bail!("{} --dict files given for {} non-target inputs", a.dict.len(), n - 1);
    }
    let sources = load_all(cli, &a.inputs)?;
    let mut config = CombineConfig::mvm();
    config.target_index = a.target;
    config.k_neighbors = a.k;
    config.oov = a.oov.into();
    config.language_prefixes = prefixes(&a.prefix, n)?;
    config.step0 = step0(a.strict_step0);
    config.audit = a.audit.is_some();
    if !a.dict.is_empty() {
        let mut dicts = vec![None; n];
        let non_target = (0..n).filter(|&i| i != a.target);
        for (i, p) in non_target.zip(&a.dict) {
            dicts[i] = Some(load_dictionary(p)?);
        }
        config.dictionaries = dicts;
    }
    write_combined(cli, &a.inputs, &a.out, a.audit.as_deref(), sources, &config)
}

fn cmd_baseline(cli: &Cli, a: &BaselineArgs) -> Result<()> {
    let sources = load_all(cli, &a.inputs)?;
    let mut config = match a.method {
        BaselineMethod::Average => CombineConfig::average(),
        BaselineMethod::Concat => CombineConfig::concat(),
        BaselineMethod::ConcatReduce => CombineConfig::concat_reduce(a.dim.context("concat-reduce requires --dim")?),
    };
    if a.nn_oov {
        config.oov = OovPolicy::NearestNeighbor;
    } else if a.zero_oov {
        config.oov = OovPolicy::Zero;
    }
    config.k_neighbors = a.k;
    config.post_remove = a.post_remove;
    config.language_prefixes = prefixes(&a.prefix, a.inputs.len())?;
    config.audit = a.audit.is_some();
    write_combined(cli, &a.inputs, &a.out, a.audit.as_deref(), sources, &config)
}

fn cmd_synth_oov(cli: &Cli, a: &SynthArgs) -> Result<()> {
    let e1 = load(cli, &a.e1)?;
    let e2 = load(cli, &a.e2)?;
    let opts = SynthesisOptions { k: a.k, audit: a.audit.is_some() };
    let (x1, x2, report) = extend_to_union(&e1.space, &e2.space, opts)?;
    let mut outputs = Outputs::new();
    write_space(&mut outputs, &a.out1, &x1, output_format(cli, &a.e1), cli.precision)?;
    write_space(&mut outputs, &a.out2, &x2, output_format(cli, &a.e2), cli.precision)?;
    if let Some(path) = &a.audit {
        outputs.write(path, |w| formats::write_audit(&report, w))?;
    }
    outputs.commit();
    let mut out = io::stdout().lock();
    for (i, c) in report.per_space.iter().enumerate() {
        writeln!(
            out,
            "space{}\tsynthesized\t{}\tskipped_zero\t{}\tshort_lists\t{}",
            i + 1,
            c.synthesized,
            c.skipped_zero,
            c.short_lists
        )?;
    }
    Ok(())
}

fn cmd_eval(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let space = load(cli, &a.embeddings)?.space;
    let mut datasets = Vec::with_capacity(a.datasets.len());
    for p in &a.datasets {
        let name = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
        let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        let ds = formats::load_similarity_dataset(BufReader::new(f), &name, a.delimiter)
            .with_context(|| format!("reading {}", p.display()))?;
        datasets.push(ds);
    }
    let groups = match &a.groups {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            formats::load_groups(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))?
        }
        None => Default::default(),
    };
    let mode = match &a.crosslingual {
        Some(p) => EvalMode::Crosslingual { prefix1: p[0].clone(), prefix2: p[1].clone() },
        None => EvalMode::Monolingual,
    };
    let options = EvalOptions { mode, lowercase_fallback: a.lowercase_fallback };
    let summary = evaluate_suite(&space, &datasets, &groups, &options)?;

    let report_path = a.report.clone().unwrap_or_else(|| {
        let mut name = a.embeddings.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".eval.tsv");
        a.embeddings.with_file_name(name)
    });
    let mut outputs = Outputs::new();
    outputs.write(&report_path, |w| Ok(report::write_tsv(&summary, w)?))?;
    outputs.commit();
    report::print_table(&summary, a.groups.is_some(), io::stdout().lock())?;
    Ok(())
}
