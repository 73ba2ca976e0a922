//! Command-line entry point.
//!
//! Exit codes: 0 no findings, 1 findings present, 2 usage or
//! configuration error, 3 fatal analysis error.

use agentlint_core::config::{AnalyzerConfig, OutputFormat};
use agentlint_core::cpg::{build_cpg, export_graph};
use agentlint_core::findings::DefectKind;
use agentlint_core::ingest::{discover_project, IngestError};
use agentlint_core::pipeline::{run_analysis, PipelineError};
use agentlint_core::reasoner::BackendKind;
use agentlint_core::report::{render_json, render_markdown};
use agentlint_core::unrt::build_unrt;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "agentlint",
    version,
    about = "Static analysis for LLM-agent codebases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Heuristic,
    Remote,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Md,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a project and write a defect report.
    Analyze {
        /// Project root directory.
        root: PathBuf,
        /// Reasoner backend.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Flat key-value config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format(s) to write.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Comma-separated defect ids to run (e.g. ALS,EPDD).
        #[arg(long)]
        only: Option<String>,
        /// Report unknown model capabilities as warnings.
        #[arg(long)]
        strict: bool,
        /// Also write nodes.jsonl and edges.jsonl.
        #[arg(long)]
        dump_graph: bool,
        /// Also write the relationship tree as indented text.
        #[arg(long)]
        dump_unrt: bool,
        /// Reasoner batch size.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Emit the code property graph node and edge files only.
    DumpGraph {
        /// Project root directory.
        root: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("agentlint: {message}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            root,
            backend,
            config,
            out,
            format,
            only,
            strict,
            dump_graph,
            dump_unrt,
            n,
        } => {
            let mut cfg = AnalyzerConfig::default();
            if let Some(path) = &config {
                cfg.apply_file(path).map_err(|e| e.to_string())?;
            }
            if let Some(backend) = backend {
                cfg.backend.kind = match backend {
                    BackendArg::Heuristic => BackendKind::Heuristic,
                    BackendArg::Remote => BackendKind::Remote,
                };
            }
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            if let Some(format) = format {
                cfg.format = match format {
                    FormatArg::Json => OutputFormat::Json,
                    FormatArg::Md => OutputFormat::Markdown,
                    FormatArg::Both => OutputFormat::Both,
                };
            }
            if let Some(only) = only {
                let mut enabled = std::collections::BTreeSet::new();
                for part in only.split(',').filter(|p| !p.trim().is_empty()) {
                    let kind = DefectKind::parse(part)
                        .ok_or_else(|| format!("unknown defect id {part:?}"))?;
                    enabled.insert(kind);
                }
                if enabled.is_empty() {
                    return Err("--only selected no oracles".to_string());
                }
                cfg.enabled = enabled;
            }
            if strict {
                cfg.strict = true;
            }
            cfg.dump_graph |= dump_graph;
            cfg.dump_unrt |= dump_unrt;
            if let Some(n) = n {
                if n == 0 {
                    return Err("batch size must be at least 1".to_string());
                }
                cfg.batch_size = n;
            }
            if cfg.backend.kind == BackendKind::Remote
                && (cfg.backend.endpoint.is_none() || cfg.backend.model.is_none())
            {
                return Err(
                    "remote backend needs `endpoint` and `model` in the config file".to_string(),
                );
            }

            let outcome = match run_analysis(&root, &cfg) {
                Ok(outcome) => outcome,
                Err(PipelineError::Ingest(IngestError::RootNotFound(path))) => {
                    return Err(format!("root not found: {}", path.display()));
                }
                Err(PipelineError::Ingest(IngestError::NoSourceFiles(path))) => {
                    eprintln!(
                        "agentlint: no analyzable source files under {}",
                        path.display()
                    );
                    return Ok(ExitCode::from(3));
                }
                Err(PipelineError::AllFilesFailedToParse(count)) => {
                    eprintln!("agentlint: all {count} source file(s) failed to parse");
                    return Ok(ExitCode::from(3));
                }
                Err(other) => return Err(other.to_string()),
            };

            std::fs::create_dir_all(&cfg.out_dir)
                .map_err(|e| format!("cannot create {}: {e}", cfg.out_dir.display()))?;
            if matches!(cfg.format, OutputFormat::Json | OutputFormat::Both) {
                let path = cfg.out_dir.join("report.json");
                std::fs::write(&path, render_json(&outcome.report))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                eprintln!("agentlint: wrote {}", path.display());
            }
            if matches!(cfg.format, OutputFormat::Markdown | OutputFormat::Both) {
                let path = cfg.out_dir.join("report.md");
                std::fs::write(&path, render_markdown(&outcome.report))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                eprintln!("agentlint: wrote {}", path.display());
            }
            if cfg.dump_graph {
                let (nodes, edges) =
                    export_graph(&outcome.cpg, &cfg.out_dir).map_err(|e| e.to_string())?;
                eprintln!(
                    "agentlint: wrote {} and {}",
                    nodes.display(),
                    edges.display()
                );
            }
            if cfg.dump_unrt {
                let path = cfg.out_dir.join("unrt.txt");
                std::fs::write(&path, outcome.unrt.dump())
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                eprintln!("agentlint: wrote {}", path.display());
            }

            for (file, line, message) in &outcome.report.parse_failures {
                eprintln!("agentlint: syntax issue in {file}:{line}: {message}");
            }
            for (oracle, error) in &outcome.report.oracle_errors {
                eprintln!("agentlint: oracle {oracle} failed: {error}");
            }
            eprintln!(
                "agentlint: {} finding(s) across {} file(s)",
                outcome.report.findings.len(),
                outcome.snapshot.files.len()
            );
            Ok(if outcome.report.has_findings() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::DumpGraph { root, out } => {
            let cfg = AnalyzerConfig::default();
            let snapshot = match discover_project(&root, &cfg) {
                Ok(snapshot) => snapshot,
                Err(IngestError::RootNotFound(path)) => {
                    return Err(format!("root not found: {}", path.display()));
                }
                Err(IngestError::NoSourceFiles(path)) => {
                    eprintln!(
                        "agentlint: no analyzable source files under {}",
                        path.display()
                    );
                    return Ok(ExitCode::from(3));
                }
                Err(other) => return Err(other.to_string()),
            };
            let cpg = build_cpg(&snapshot);
            let _ = build_unrt(&cpg);
            let out_dir = out.unwrap_or_else(|| PathBuf::from("./agentlint-out"));
            let (nodes, edges) = export_graph(&cpg, &out_dir).map_err(|e| e.to_string())?;
            eprintln!(
                "agentlint: wrote {} and {}",
                nodes.display(),
                edges.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
