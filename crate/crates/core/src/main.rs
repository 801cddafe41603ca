use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mwsense::annotate::{
    annotate_bitext, evaluate, evaluate_homonym_level, join_annotations, parse_annotations,
    weak_assumption_audit, Granularity,
};
use mwsense::assumptions::{profile, AssumptionError, Direction};
use mwsense::ingest::{
    lexicon_stats, parse_bitext, parse_cluster_map, parse_multiwordnet, write_multiwordnet,
    ClusterMap, LexiconStats,
};
use mwsense::lab::{fuzz_with, verify, FuzzOptions, FuzzTemplate};
use mwsense::reports::{
    eligible_profiles, table1_from_profiles, table2_from_profiles, write_profiles_csv,
    write_table1_csv, write_table2_csv, ReportError,
};
use mwsense::{LanguageCode, MultiWordnet, Pos, WordKey};

#[derive(Parser)]
#[command(name = "mwsense", version, about = "Sense/translation assumptions over multi-wordnets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lexicon statistics as JSON.
    Stats {
        #[arg(long)]
        wordnet: PathBuf,
        /// Restrict the per-language section to this language.
        #[arg(long)]
        lang: Option<LanguageCode>,
    },
    /// Assumption profile of one source word as JSON.
    Check {
        #[command(flatten)]
        input: WordnetPair,
        #[arg(long)]
        word: String,
        #[arg(long)]
        pos: Pos,
    },
    /// Table of assumption frequencies (1) or of assumption combinations (2).
    Report {
        #[arg(long)]
        wordnet: PathBuf,
        #[arg(long)]
        src: LanguageCode,
        /// One or more target languages, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        tgt: Vec<LanguageCode>,
        #[arg(long, value_parser = ["1", "2"])]
        table: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write one CSV row per eligible word here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Tag source tokens of a word-aligned bitext.
    Annotate {
        #[command(flatten)]
        input: WordnetPair,
        #[arg(long)]
        bitext: PathBuf,
        /// Synset to cluster TSV; tags with cluster labels instead of synsets.
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score annotations against the gold tags of the bitext.
    Evaluate {
        #[arg(long)]
        wordnet: PathBuf,
        #[arg(long)]
        bitext: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        /// Score cluster tags through this synset to cluster map.
        #[arg(long)]
        clusters: Option<PathBuf>,
    },
    /// Weak synonymy / weak polysemy audit of the bitext alignments.
    Audit {
        #[command(flatten)]
        input: WordnetPair,
        #[arg(long)]
        bitext: PathBuf,
    },
    /// Check every theorem on one lexicon and direction.
    Verify {
        #[command(flatten)]
        input: WordnetPair,
    },
    /// Check the theorems on randomly generated lexicons.
    Fuzz {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Template JSON; the bundled default when omitted.
        #[arg(long)]
        template: Option<PathBuf>,
        /// Where the first failing instance is written.
        #[arg(long, default_value = "fuzz-witness.jsonl")]
        witness: PathBuf,
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
}

#[derive(Args)]
struct WordnetPair {
    #[arg(long)]
    wordnet: PathBuf,
    #[arg(long)]
    src: LanguageCode,
    #[arg(long)]
    tgt: LanguageCode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Invalid(String),
    Io(String),
    EmptyPopulation(String),
    Violation(String),
    /// Downstream reader went away; not reported.
    BrokenPipe,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::BrokenPipe => 0,
            CliError::Invalid(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::EmptyPopulation(_) => 3,
            CliError::Violation(_) => 4,
        }
    }

    fn line(&self) -> String {
        let (code, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Invalid(m) => ("invalid-input", m),
            CliError::Io(m) => ("io", m),
            CliError::EmptyPopulation(m) => ("empty-population", m),
            CliError::Violation(m) => ("theorem-violation", m),
            CliError::BrokenPipe => return String::new(),
        };
        let msg = msg.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("{code}: {msg}")
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError::BrokenPipe;
        }
        CliError::Io(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::EmptyPopulation(_) => CliError::EmptyPopulation(e.to_string()),
            ReportError::Io(io) => io.into(),
            other => CliError::Io(other.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn open(path: &Path) -> CliResult<Box<dyn BufRead>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        return Ok(Box::new(io::Cursor::new(buf)));
    }
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(file)))
}

fn create(path: &Path) -> CliResult<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(format!("{}: {e}", path.display()))
}

fn load_wordnet(path: &Path) -> CliResult<MultiWordnet> {
    parse_multiwordnet(open(path)?).map_err(|e| invalid(path, e))
}

fn load_clusters(path: Option<&PathBuf>) -> CliResult<Option<ClusterMap>> {
    path.map(|p| parse_cluster_map(open(p)?).map_err(|e| invalid(p, e)))
        .transpose()
}

fn direction(src: LanguageCode, tgt: LanguageCode) -> CliResult<Direction> {
    Direction::new(src, tgt).map_err(|e| CliError::Usage(e.to_string()))
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_stats(wordnet: &Path, lang: Option<LanguageCode>) -> CliResult {
    let m = load_wordnet(wordnet)?;
    let mut stats = lexicon_stats(&m);
    if let Some(l) = lang {
        let only = stats.language(l);
        stats = LexiconStats {
            synset_count: stats.synset_count,
            languages: [(l, only)].into_iter().collect(),
        };
    }
    print_json(&stats)
}

fn cmd_check(input: &WordnetPair, word: &str, pos: Pos) -> CliResult {
    let d = direction(input.src, input.tgt)?;
    let m = load_wordnet(&input.wordnet)?;
    let e = WordKey::new(d.source, word, pos).map_err(|e| CliError::Invalid(e.to_string()))?;
    let p = profile(&m, d, &e).map_err(|e| match e {
        AssumptionError::SameLanguage(_) => CliError::Usage(e.to_string()),
        _ => CliError::Invalid(e.to_string()),
    })?;
    print_json(&p)
}

fn cmd_report(
    wordnet: &Path,
    src: LanguageCode,
    tgts: &[LanguageCode],
    table: &str,
    format: Format,
    dump: Option<&PathBuf>,
) -> CliResult {
    let dirs = tgts
        .iter()
        .map(|&t| direction(src, t))
        .collect::<CliResult<Vec<_>>>()?;
    let m = load_wordnet(wordnet)?;
    let profiles: Vec<_> = dirs.iter().map(|&d| eligible_profiles(&m, d)).collect();

    let mut out = io::stdout().lock();
    if table == "1" {
        let reports = dirs
            .iter()
            .zip(&profiles)
            .map(|(&d, p)| table1_from_profiles(p, d))
            .collect::<Result<Vec<_>, _>>()?;
        match format {
            Format::Csv => write_table1_csv(&reports, &mut out)?,
            Format::Json => print_json(&reports)?,
        }
    } else {
        let reports = dirs
            .iter()
            .zip(&profiles)
            .map(|(&d, p)| table2_from_profiles(p, d))
            .collect::<Result<Vec<_>, _>>()?;
        match format {
            Format::Csv => write_table2_csv(&reports, &mut out)?,
            Format::Json => print_json(&reports)?,
        }
    }
    if let Some(path) = dump {
        let all: Vec<_> = profiles.into_iter().flatten().collect();
        write_profiles_csv(&all, create(path)?)?;
    }
    Ok(())
}

fn cmd_annotate(
    input: &WordnetPair,
    bitext: &Path,
    clusters: Option<&PathBuf>,
    out: &Path,
) -> CliResult {
    let d = direction(input.src, input.tgt)?;
    let m = load_wordnet(&input.wordnet)?;
    let tokens = parse_bitext(open(bitext)?).map_err(|e| invalid(bitext, e))?;
    let clusters = load_clusters(clusters)?;
    let granularity = match &clusters {
        Some(c) => Granularity::Homonym(c),
        None => Granularity::Sense,
    };
    let summary = annotate_bitext(&m, d, &tokens, granularity, create(out)?)?;
    if out == Path::new("-") {
        let line = serde_json::to_string(&summary).map_err(|e| CliError::Io(e.to_string()))?;
        eprintln!("{line}");
        Ok(())
    } else {
        print_json(&summary)
    }
}

fn cmd_evaluate(
    wordnet: &Path,
    bitext: &Path,
    annotations: &Path,
    clusters: Option<&PathBuf>,
) -> CliResult {
    let m = load_wordnet(wordnet)?;
    let tokens = parse_bitext(open(bitext)?).map_err(|e| invalid(bitext, e))?;
    let records = parse_annotations(open(annotations)?).map_err(|e| invalid(annotations, e))?;
    let results = join_annotations(&tokens, &records).map_err(|e| invalid(annotations, e))?;
    let report = match load_clusters(clusters)? {
        Some(c) => evaluate_homonym_level(&results, &m, &c),
        None => evaluate(&results, &m),
    };
    print_json(&report)
}

fn cmd_audit(input: &WordnetPair, bitext: &Path) -> CliResult {
    let d = direction(input.src, input.tgt)?;
    let m = load_wordnet(&input.wordnet)?;
    let tokens = parse_bitext(open(bitext)?).map_err(|e| invalid(bitext, e))?;
    print_json(&weak_assumption_audit(&m, d, &tokens))
}

fn cmd_verify(input: &WordnetPair) -> CliResult {
    let d = direction(input.src, input.tgt)?;
    let m = load_wordnet(&input.wordnet)?;
    let violations = verify(&m, d);
    print_json(&serde_json::json!({
        "direction": d,
        "violation_count": violations.len(),
        "violations": violations,
    }))?;
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(CliError::Violation(format!(
            "{} violation(s), first {} at {}",
            violations.len(),
            v.theorem,
            v.witness
        ))),
    }
}

fn cmd_fuzz(
    cases: u64,
    seed: u64,
    template: Option<&PathBuf>,
    witness: &Path,
    inject_corruption: bool,
) -> CliResult {
    let template = match template {
        Some(p) => {
            let mut text = String::new();
            open(p)?.read_to_string(&mut text)?;
            FuzzTemplate::from_json(&text).map_err(|e| invalid(p, e))?
        }
        None => FuzzTemplate::default_template(),
    };
    let opts = FuzzOptions { inject_corruption };
    let report = fuzz_with(&template, cases as usize, seed, opts)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    print_json(&report.to_json())?;
    match &report.first_failure {
        None => Ok(()),
        Some(f) => {
            let mut w = create(witness)?;
            write_multiwordnet(&f.instance, &mut w)?;
            w.flush()?;
            Err(CliError::Violation(format!(
                "{} violation(s); first failing case seed {} written to {}",
                report.violation_count,
                f.seed,
                witness.display()
            )))
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Stats { wordnet, lang } => cmd_stats(&wordnet, lang),
        Command::Check { input, word, pos } => cmd_check(&input, &word, pos),
        Command::Report {
            wordnet,
            src,
            tgt,
            table,
            format,
            dump,
        } => cmd_report(&wordnet, src, &tgt, &table, format, dump.as_ref()),
        Command::Annotate {
            input,
            bitext,
            clusters,
            out,
        } => cmd_annotate(&input, &bitext, clusters.as_ref(), &out),
        Command::Evaluate {
            wordnet,
            bitext,
            annotations,
            clusters,
        } => cmd_evaluate(&wordnet, &bitext, &annotations, clusters.as_ref()),
        Command::Audit { input, bitext } => cmd_audit(&input, &bitext),
        Command::Verify { input } => cmd_verify(&input),
        Command::Fuzz {
            cases,
            seed,
            template,
            witness,
            inject_corruption,
        } => cmd_fuzz(cases, seed, template.as_ref(), &witness, inject_corruption),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ").to_string();
            let err = CliError::Usage(msg);
            eprintln!("{}", err.line());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code())
        }
    }
}
