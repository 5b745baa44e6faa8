use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use debunk_core::Lang;
use debunk_service::commands;
use debunk_service::Settings;

#[derive(Parser)]
#[command(name = "debunk", version, about = "Collect probably-fake news events from debunking tweets")]
struct Cli {
    /// Settings file supplying defaults for every flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a tweet record file into the per-day tweet store.
    Crawl {
        /// Line-delimited tweet records.
        #[arg(long)]
        source: PathBuf,
        /// UTC offset defining the calendar day, e.g. +09:00.
        #[arg(long)]
        timezone: Option<String>,
    },
    /// Extract, group and rank one day and store the result.
    Archive {
        #[arg(long)]
        date: NaiveDate,
        #[arg(long)]
        lang: Lang,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Rules file with the debunking patterns.
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// CoNLL-U parses of the day's tweets; defaults to the data directory.
        #[arg(long)]
        parses: Option<PathBuf>,
        #[arg(long)]
        min_shares: Option<u64>,
    },
    /// Serve the HTTP API (and the review UI, if configured).
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Write the labeled dataset as line-delimited records.
    Export {
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        #[arg(long)]
        lang: Option<Lang>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohen's kappa between two label files (one label per line).
    EvalKappa { a: PathBuf, b: PathBuf },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let mut settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Some(dir) = cli.data_dir {
        settings.data_dir = dir;
    }

    match cli.command {
        Command::Crawl { source, timezone } => {
            if let Some(tz) = timezone {
                settings.timezone = tz;
            }
            let summary = commands::crawl(&settings, &source)?;
            println!("loaded {} tweets ({} rejected)", summary.loaded, summary.rejected);
            for (date, lang, n) in summary.days {
                println!("{date} {lang}: {n} tweets stored");
            }
        }
        Command::Archive {
            date,
            lang,
            tau,
            embeddings,
            patterns,
            parses,
            min_shares,
        } => {
            settings.tau = tau.unwrap_or(settings.tau);
            settings.min_shares = min_shares.unwrap_or(settings.min_shares);
            settings.embeddings = embeddings.or(settings.embeddings);
            settings.rules = patterns.or(settings.rules);
            let s = commands::archive(&settings, date, &lang, parses.as_deref())?;
            println!(
                "{date} {lang}: {} tweets, {} after share filter, {} matched, {} phrases, {} clusters",
                s.stats.tweets, s.stats.kept_after_filter, s.stats.matched, s.stats.extracted, s.clusters
            );
        }
        Command::Serve { port, ui_dir } => {
            settings.port = port.unwrap_or(settings.port);
            settings.ui_dir = ui_dir.or(settings.ui_dir);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(commands::serve(&settings))?;
        }
        Command::Export { from, to, lang, out } => {
            let text = commands::export(&settings, from, to, lang.as_ref())?;
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
        }
        Command::EvalKappa { a, b } => {
            println!("{:.6}", commands::eval_kappa(&a, &b)?);
        }
    }
    Ok(())
}
