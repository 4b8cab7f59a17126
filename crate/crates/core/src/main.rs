use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use skillmatch::config::CONFIG_ENV_VAR;
use skillmatch::docstore::DocKind;
use skillmatch::screenrank::InterestWeights;
use skillmatch::taxonomy;
use skillmatch::textkit::TextAnalyzer;
use skillmatch::{Engine, RunConfig};

/// CV / job-post matching engine.
#[derive(Parser, Debug)]
#[command(name = "skillmatch", version, about)]
struct Cli {
    /// Config file (falls back to $SKILLMATCH_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate and store parsed documents (one JSON file or a directory).
    Ingest {
        /// File or directory of `*.json` documents.
        path: PathBuf,
        /// Expected document kind; files of the other kind are failures.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Replace documents that already exist with different content.
        #[arg(long)]
        overwrite: bool,
    },
    /// One-to-one match: JSON report on stdout.
    Match {
        #[arg(long)]
        cv: String,
        #[arg(long)]
        job: String,
        /// `skills=2,domain=2,culture=2,required=0`; omitted axes are 0.
        #[arg(long)]
        weights: Option<String>,
        /// Include per-axis explanations (matched concepts, missing
        /// required skills, culture pole deltas).
        #[arg(long)]
        explain: bool,
    },
    /// Many-to-one ranking for a job post.
    Rank {
        #[arg(long)]
        job: String,
        /// Comma-separated CV ids; every stored CV when omitted.
        #[arg(long)]
        cvs: Option<String>,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Corpus-driven draft ontology tooling.
    #[command(subcommand)]
    Taxonomy(TaxonomyCommand),
}

#[derive(Subcommand, Debug)]
enum TaxonomyCommand {
    /// Harvest top n-grams from a corpus, cluster them, emit a draft
    /// ontology CSV.
    Build(TaxonomyBuild),
}

#[derive(Args, Debug)]
struct TaxonomyBuild {
    /// Directory of job-post JSON documents.
    #[arg(long)]
    corpus: PathBuf,
    /// Word-vector file.
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long, default_value_t = taxonomy::DEFAULT_TOP_N)]
    top_n: usize,
    #[arg(long, default_value_t = taxonomy::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output ontology CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Cv,
    JobPost,
}

impl From<KindArg> for DocKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cv => DocKind::Cv,
            KindArg::JobPost => DocKind::JobPost,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config_path(cli_flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(p) = cli_flag {
        return Ok(p);
    }
    if let Ok(p) = std::env::var(CONFIG_ENV_VAR) {
        return Ok(PathBuf::from(p));
    }
    anyhow::bail!("no config file: pass --config or set ${CONFIG_ENV_VAR}")
}

fn load_engine(cli_flag: Option<PathBuf>) -> anyhow::Result<Engine> {
    let path = config_path(cli_flag)?;
    let config = RunConfig::load(&path)?;
    Ok(Engine::from_config(&config)?)
}

fn parse_weights(spec: &Option<String>) -> anyhow::Result<Option<InterestWeights>> {
    Ok(match spec {
        Some(s) => Some(InterestWeights::parse(s)?),
        None => None,
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Ingest {
            path,
            kind,
            overwrite,
        } => {
            let engine = load_engine(cli.config)?;
            let summary = engine.ingest_path(&path, kind.into(), overwrite);
            for (file, id) in &summary.stored {
                println!("stored {} <- {}", id, file.display());
            }
            for (file, reason) in &summary.failures {
                eprintln!("failed {}: {}", file.display(), reason);
            }
            println!(
                "ingested {} document(s), {} failure(s)",
                summary.stored.len(),
                summary.failures.len()
            );
            Ok(if summary.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Match {
            cv,
            job,
            weights,
            explain,
        } => {
            let engine = load_engine(cli.config)?;
            let weights = parse_weights(&weights)?;
            let report = engine.match_one(&cv, &job, weights.as_ref(), explain)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank {
            job,
            cvs,
            weights,
            format,
        } => {
            let engine = load_engine(cli.config)?;
            let weights = parse_weights(&weights)?;
            let ids: Option<Vec<String>> = cvs.map(|list| {
                list.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            });
            let ranking = engine.rank(&job, ids.as_deref(), weights.as_ref())?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&ranking)?),
                Format::Csv => print!("{}", ranking.to_csv()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Taxonomy(TaxonomyCommand::Build(args)) => run_taxonomy_build(args),
    }
}

fn run_taxonomy_build(args: TaxonomyBuild) -> anyhow::Result<ExitCode> {
    use skillmatch::docstore::Document;
    use skillmatch::embeddings::VectorStore;

    let mut corpus: Vec<Document> = Vec::new();
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.corpus)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    for file in &files {
        let doc: Document = serde_json::from_str(&std::fs::read_to_string(file)?)?;
        corpus.push(doc);
    }

    let analyzer = TextAnalyzer::default();
    let (vectors, warnings) = VectorStore::load_with_warnings(&args.vectors)?;
    for w in &warnings {
        eprintln!("vectors line {}: {}", w.line, w.message);
    }
    let table = taxonomy::harvest_candidates(&corpus, args.top_n, &analyzer)?;
    let clusters = taxonomy::cluster_candidates(&table, &vectors, args.k, args.seed)?;
    for gram in &clusters.skipped_oov {
        eprintln!("skipped out-of-vocabulary candidate: {gram}");
    }
    let draft = taxonomy::emit_draft_ontology(&clusters, &vectors)?;
    std::fs::write(&args.out, draft.to_csv())?;
    println!(
        "taxonomy draft: {} documents, {} candidates, k={}, {} concepts -> {}",
        table.corpus_size,
        table.entries.len(),
        clusters.k,
        draft.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
