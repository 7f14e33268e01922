//! `cometlens`: validate, analyze and synthesize multimodal design corpora.
//!
//! Exit status: 0 success, 1 invalid input, 2 invalid configuration,
//! 3 internal invariant violation.

use std::fmt::Write as _;
use std::io::{IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use cometlens::io::{parse_corpus, write_corpus, Format, Issue, IssueCode, ParseReport};
use cometlens::model::{AnalysisConfig, Corpus, Granularity, Millis};
use cometlens::pattern::{Pattern, COMPOSITE_PATTERN};
use cometlens::coalition::{CoalitionEpisode, CoalitionSummary};
use cometlens::report::{analyze, PatternResult, ReportedEpisode, RunReport};
use cometlens::stats::csv_out;
use cometlens::synth::{generate, SynthSpec};

#[derive(Parser)]
#[command(name = "cometlens", version, about = "Batch analysis of multimodal collaborative-design corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a corpus file.
    Validate {
        /// Corpus file, or `-` for standard input (TSV only).
        path: String,
        #[arg(long)]
        format: Option<Format>,
        /// Print the parse report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the full pipeline and write a report.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: AnalysisOpts,
        /// Output file (JSON) or directory (CSV); standard output by default.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Write the statistics tables as CSV files into the `--out` directory.
        #[arg(long, requires = "out")]
        csv: bool,
    },
    /// List episodes and pattern matches.
    Episodes {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        json: bool,
    },
    /// List coalitions and their summary.
    Coalitions {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        json: bool,
    },
    /// Co-occurrence, transition and duration statistics.
    Stats {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: AnalysisOpts,
        /// Directory receiving one CSV file per table; JSON on standard output otherwise.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a synthetic corpus from a JSON spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Corpus output; standard output by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ground-truth JSON output.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value = "tsv")]
        format: Format,
    },
}

#[derive(Args)]
struct Input {
    /// Corpus file, or `-` for standard input (TSV only).
    path: String,
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct AnalysisOpts {
    #[arg(long, default_value = "PROBLEM")]
    granularity: Granularity,
    /// Largest gap (seconds) between units still reported as NEAR.
    #[arg(long, default_value = "1.000")]
    gap_tol: String,
    /// Episodes shorter than this (seconds) merge into the preceding one.
    #[arg(long, default_value = "0.000")]
    min_episode: String,
    /// Let NEAR pairs take part in co-occurrence counts.
    #[arg(long)]
    include_near: bool,
    /// Episode-label pattern; repeatable. `COMPOSITE` names the built-in preset.
    #[arg(long)]
    pattern: Vec<String>,
}

enum Failure {
    Input(String),
    Config(String),
    Invariant(Vec<String>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Config(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl From<cometlens::Error> for Failure {
    fn from(e: cometlens::Error) -> Failure {
        let msg = format!("{}: {e}", e.code());
        match e.code() {
            "E_CONFIG" | "E_PATTERN" => Failure::Config(msg),
            _ => Failure::Input(msg),
        }
    }
}

type Outcome = Result<(), Failure>;

fn secs(flag: &str, value: &str) -> Result<Millis, Failure> {
    value.parse().map_err(|e| Failure::Config(format!("E_CONFIG: --{flag} {value:?}: {e}")))
}

impl AnalysisOpts {
    fn config(&self) -> Result<AnalysisConfig, Failure> {
        Ok(AnalysisConfig {
            granularity: self.granularity,
            gap_tolerance: secs("gap-tol", &self.gap_tol)?,
            min_episode_duration: secs("min-episode", &self.min_episode)?,
            include_near: self.include_near,
        })
    }

    fn patterns(&self) -> Result<Vec<Pattern>, Failure> {
        let sources: Vec<&str> = if self.pattern.is_empty() { vec![COMPOSITE_PATTERN] } else { self.pattern.iter().map(String::as_str).collect() };
        sources
            .into_iter()
            .map(|p| Pattern::parse(if p.eq_ignore_ascii_case("COMPOSITE") { COMPOSITE_PATTERN } else { p }))
            .collect::<Result<_, _>>()
            .map_err(Failure::from)
    }
}

fn read_input(path: &str, format: Option<Format>) -> Result<(Vec<u8>, Format), Failure> {
    if path == "-" {
        if format == Some(Format::Doc) {
            return Err(Failure::Config("E_CONFIG: standard input accepts TSV only".to_string()));
        }
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok((buf, Format::Tsv));
    }
    let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok((bytes, format.unwrap_or_else(|| Format::from_path(path))))
}

fn load(input: &Input) -> Result<(Corpus, ParseReport), Failure> {
    let (bytes, format) = read_input(&input.path, input.format)?;
    match parse_corpus(&bytes, format) {
        Ok(ok) => Ok(ok),
        Err(report) => {
            let mut msg = format!("{}: {report}", input.path);
            for e in &report.errors {
                let _ = write!(msg, "\n  {e}");
            }
            Err(Failure::Input(msg))
        }
    }
}

fn run_analysis(input: &Input, opts: &AnalysisOpts) -> Result<RunReport, Failure> {
    let config = opts.config()?;
    let patterns = opts.patterns()?;
    let (corpus, parse) = load(input)?;
    let report = analyze(&corpus, &parse, &config, &patterns)?;
    let violations = report.invariant_violations();
    if !violations.is_empty() {
        return Err(Failure::Invariant(violations));
    }
    Ok(report)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}

#[derive(Serialize)]
struct EpisodesOut<'a> {
    episodes: &'a [ReportedEpisode],
    patterns: &'a [PatternResult],
}

#[derive(Serialize)]
struct CoalitionsOut<'a> {
    coalitions: &'a [CoalitionEpisode],
    summary: &'a CoalitionSummary,
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write_csv_dir(dir: &Path, report: &RunReport) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let stats = &report.stats;
    let mut files = vec![
        ("cooccurrence.csv", csv_out::co_occurrence(&stats.co_occurrence)),
        ("durations.csv", csv_out::durations(&stats.durations)),
        ("histogram.csv", csv_out::histogram(&stats.durations)),
    ];
    if let Some(t) = &stats.transitions {
        files.push(("transitions_pooled.csv", csv_out::transitions(&t.pooled)));
        files.push(("transitions_per_actor.csv", csv_out::transitions(&t.per_actor)));
    }
    for (name, bytes) in files {
        emit(Some(&dir.join(name)), &bytes)?;
    }
    Ok(())
}

fn validate(path: &str, format: Option<Format>, json: bool) -> Outcome {
    let (bytes, format) = read_input(path, format)?;
    let (report, ok) = match parse_corpus(&bytes, format) {
        Ok((corpus, mut report)) => {
            if corpus.is_empty() {
                report.warnings.push(Issue { line: 1, code: IssueCode::Empty, message: "corpus has no units".to_string() });
            }
            (report, true)
        }
        Err(report) => (report, false),
    };
    let text = if json {
        json_line(&report)
    } else {
        let mut s = format!("{path}: {} unit(s), {} error(s), {} warning(s)\n", report.unit_count, report.errors.len(), report.warnings.len());
        for i in report.errors.iter().chain(&report.warnings) {
            let _ = writeln!(s, "  {i}");
        }
        s
    };
    emit(None, text.as_bytes())?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Input(String::new()))
    }
}

fn episodes_text(report: &RunReport) -> String {
    let mut s = String::new();
    for e in &report.episodes {
        let ep = &e.episode;
        let blocks: Vec<String> =
            ep.partition.iter().map(|b| format!("{{{}}}:{}", b.actors.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(","), b.focus)).collect();
        let _ = write!(s, "{}\t{}\t{}\t{}", ep.interval.start(), ep.interval.end(), ep.label, blocks.join(" "));
        if let Some(d) = e.disalignment {
            let _ = write!(s, "\t{d}");
        }
        s.push('\n');
    }
    for p in &report.patterns {
        let _ = writeln!(s, "pattern {:?}: {} match(es)", p.pattern, p.matches.len());
        for m in &p.matches {
            let _ = writeln!(s, "  episodes {}..={} {}", m.first, m.last, m.interval);
        }
    }
    s
}

fn coalitions_text(report: &RunReport) -> String {
    let mut s = String::new();
    for c in &report.coalitions {
        let opposed: Vec<String> = c
            .opposed
            .iter()
            .map(|o| format!("{{{}}}:{}", o.actors.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(","), o.focus))
            .collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{{{}}}:{}\tvs {}\t{}",
            c.interval.start(),
            c.interval.end(),
            c.coalition_block.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(","),
            c.coalition_focus,
            opposed.join(" "),
            c.disalignment
        );
    }
    let _ = writeln!(s, "{} coalition(s), {} total", report.coalition_summary.total.count, report.coalition_summary.total.duration);
    s
}

fn synth(spec: &Path, seed: Option<u64>, out: Option<&Path>, truth: Option<&Path>, format: Format) -> Outcome {
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("{}: {e}", spec.display())))?;
    let mut spec = SynthSpec::from_json(&text)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let (corpus, gt) = generate(&spec)?;
    emit(out, &write_corpus(&corpus, format))?;
    if let Some(t) = truth {
        emit(Some(t), gt.to_json().as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { path, format, json } => validate(&path, format, json),
        Command::Analyze { input, opts, out, json: _, csv } => {
            let report = run_analysis(&input, &opts)?;
            match (csv, out) {
                (true, Some(dir)) => write_csv_dir(&dir, &report),
                (_, out) => emit(out.as_deref(), report.to_json().as_bytes()),
            }
        }
        Command::Episodes { input, opts, json } => {
            let report = run_analysis(&input, &opts)?;
            let text = if json {
                json_line(&EpisodesOut { episodes: &report.episodes, patterns: &report.patterns })
            } else {
                episodes_text(&report)
            };
            emit(None, text.as_bytes())
        }
        Command::Coalitions { input, opts, json } => {
            let report = run_analysis(&input, &opts)?;
            let text = if json {
                json_line(&CoalitionsOut { coalitions: &report.coalitions, summary: &report.coalition_summary })
            } else {
                coalitions_text(&report)
            };
            emit(None, text.as_bytes())
        }
        Command::Stats { input, opts, csv } => {
            let report = run_analysis(&input, &opts)?;
            match csv {
                Some(dir) => write_csv_dir(&dir, &report),
                None => emit(None, json_line(&report.stats).as_bytes()),
            }
        }
        Command::Synth { spec, seed, out, truth, format } => synth(&spec, seed, out.as_deref(), truth.as_deref(), format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let color = std::env::var_os("COMETLENS_NO_COLOR").is_none() && std::io::stderr().is_terminal();
            let tag = if color { "\x1b[31merror\x1b[0m" } else { "error" };
            let lines = match &f {
                Failure::Input(m) | Failure::Config(m) => vec![m.clone()],
                Failure::Invariant(v) => v.iter().map(|m| format!("invariant violated: {m}")).collect(),
            };
            for m in lines.iter().filter(|m| !m.is_empty()) {
                eprintln!("{tag}: {m}");
            }
            ExitCode::from(f.code())
        }
    }
}
