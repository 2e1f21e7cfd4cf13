use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use wikiref_core::evaluate::System;
use wikiref_core::refrank::PoolMode;

use crate::artifacts::{to_json_bytes, REPORT_JSON};
use crate::commands;
use crate::config::{Overrides, Settings, DEFAULT_OUT};
use crate::corpus_file::META_FILE;
use crate::error::{AppError, AppResult, ExitCode};
use crate::render::recommendation_table;
use crate::workspace::Workspace;

#[derive(Debug, Parser)]
#[command(name = "wikiref", version, about = "Recommend references for wiki articles from their wikilinks")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, env = "WIKIREF_CONFIG")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, global = true, env = "WIKIREF_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for per-target work.
    #[arg(long, global = true, env = "WIKIREF_JOBS")]
    pub jobs: Option<usize>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true, env = "WIKIREF_OUT")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus (records or raw wikitext pages) and write it in the record format.
    Ingest {
        input: PathBuf,
        /// Destination corpus file [default: <out>/corpus.jsonl].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train the link classifier and the reference ranker.
    Train,
    /// Recommend references for one target page.
    Recommend {
        target: String,
        #[arg(short, long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Keep references the target already cites.
        #[arg(long)]
        include_existing: bool,
        /// Take the top k of every relevant link before pooling.
        #[arg(long)]
        per_link: bool,
    },
    /// Evaluate all systems on the held-out targets.
    Evaluate {
        /// Train before evaluating instead of loading saved models.
        #[arg(long)]
        train: bool,
        /// Comma-separated subset of WikiRef, BL-I, BL-II, BL-III, BL-IV, BL-V.
        #[arg(long, value_delimiter = ',')]
        systems: Option<Vec<String>>,
        /// Votes file for rank correlation; overrides the config file.
        #[arg(long)]
        votes: Option<PathBuf>,
    },
    /// Re-render report.md and per_target.csv from a report.json.
    Report {
        /// [default: <out>/report.json]
        report: Option<PathBuf>,
    },
}

fn settings(cli: &Cli) -> AppResult<Settings> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| AppError::Config("this command needs --config (or WIKIREF_CONFIG)".into()))?;
    Settings::load(
        path,
        &Overrides {
            seed: cli.seed,
            out: cli.out.clone(),
            jobs: cli.jobs,
        },
    )
}

fn out_dir(cli: &Cli) -> AppResult<PathBuf> {
    if let Some(o) = &cli.out {
        return Ok(o.clone());
    }
    match &cli.config {
        Some(_) => Ok(settings(cli)?.out),
        None => Ok(PathBuf::from(DEFAULT_OUT)),
    }
}

/// Runs a parsed command, writing user-facing output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> AppResult<()> {
    let emit = |stdout: &mut dyn Write, bytes: &[u8]| {
        stdout
            .write_all(bytes)
            .map_err(|e| AppError::Internal(format!("stdout: {e}")))
    };
    match &cli.command {
        Command::Ingest { input, output } => {
            let output = match output {
                Some(o) => o.clone(),
                None => out_dir(cli)?.join("corpus.jsonl"),
            };
            let meta = commands::ingest(input, &output)?;
            let line = format!(
                "ingested {} pages ({} wikilinks, {} references) into {}; meta in {}\n",
                meta.stats.pages,
                meta.stats.wikilinks,
                meta.stats.references,
                output.display(),
                output.with_file_name(META_FILE).display()
            );
            emit(stdout, line.as_bytes())
        }
        Command::Train => {
            let ws = Workspace::open(settings(cli)?)?;
            let t = commands::train(&ws)?;
            let line = format!(
                "trained on {} targets ({} links, {} kept after undersampling, {} ranking pairs); models in {}\n",
                t.train_targets.len(),
                t.log.examples,
                t.log.kept_after_enn,
                t.log.pairs,
                ws.settings.models_dir().display()
            );
            emit(stdout, line.as_bytes())
        }
        Command::Recommend {
            target,
            k,
            format,
            include_existing,
            per_link,
        } => {
            let ws = Workspace::open(settings(cli)?)?;
            let mut options = ws.settings.recommend_options();
            if *include_existing {
                options.exclude_existing = false;
            }
            if *per_link {
                options.mode = PoolMode::PerLink;
            }
            let k = k.unwrap_or(ws.settings.config.recommend.k);
            let out = commands::recommend(&ws, target, k, options)?;
            match format {
                OutputFormat::Json => emit(stdout, &to_json_bytes(&out)),
                OutputFormat::Table => emit(stdout, recommendation_table(&out).as_bytes()),
            }
        }
        Command::Evaluate {
            train,
            systems,
            votes,
        } => {
            let mut s = settings(cli)?;
            if let Some(list) = systems {
                let parsed = list
                    .iter()
                    .map(|n| n.parse::<System>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| AppError::Config(e.to_string()))?;
                s.config.evaluate.systems = parsed;
            }
            if let Some(v) = votes {
                let v = std::path::absolute(v).map_err(|e| AppError::read(v, e))?;
                s.config.votes = Some(v);
            }
            let s = Settings::from_config(s.config, s.base_dir, &Overrides {
                seed: Some(s.seed),
                out: Some(s.out),
                jobs: s.jobs,
            })?;
            let ws = Workspace::open(s)?;
            let file = commands::evaluate(&ws, *train)?;
            let mut line = format!(
                "evaluated {} systems on {} held-out targets; report in {}\n",
                file.report.systems.len(),
                file.report.test_target_count,
                ws.settings.out.join(REPORT_JSON).display()
            );
            for s in &file.report.systems {
                let m = &s.at_k[0];
                line.push_str(&format!(
                    "  {:<8} P@{} {:.3}  R@{} {:.3}  F@{} {:.3}\n",
                    s.system.name(),
                    m.k,
                    m.precision,
                    m.k,
                    m.recall,
                    m.k,
                    m.f_measure
                ));
            }
            emit(stdout, line.as_bytes())
        }
        Command::Report { report } => {
            let out = out_dir(cli)?;
            let path = report.clone().unwrap_or_else(|| out.join(REPORT_JSON));
            let md = commands::report(&path, &out)?;
            emit(stdout, md.as_bytes())
        }
    }
}

/// Parses `args` and runs the command; errors go to `stderr`. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Input as i32 } else { ExitCode::Ok as i32 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => ExitCode::Ok as i32,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code() as i32
        }
    }
}
