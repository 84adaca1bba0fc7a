mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use btstrata_core::report::Report;
use btstrata_core::suites::{self, Profile};
use clap::{Parser, Subcommand};

use config::{Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "btstrata", version, about = "Exact verification runs for vertex lattices, strata points and charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    h: Option<u32>,
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true)]
    r: Option<u32>,
    #[arg(long, global = true)]
    mmax: Option<u32>,
    #[arg(long, global = true)]
    window: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = clap::value_parser!(String))]
    format: Option<String>,
    #[arg(long, global = true)]
    profile: Option<String>,
    /// key = value file with the same fields as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Vertex lattice enumeration, type parity, duality.
    Vertex,
    /// Point counts, fiber laws, oracle comparison and the stratification.
    Strata,
    /// Chart counts, smoothness certificates and pivot audits.
    Charts,
    /// All three suites.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Vertex => "vertex",
            Command::Strata => "strata",
            Command::Charts => "charts",
            Command::All => "all",
        }
    }
}

const EXIT_USAGE: u8 = 1;

fn overrides(cli: &Cli) -> Result<Overrides, String> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            config::parse_config_file(&text)?
        }
        None => Overrides::default(),
    };
    let flags = Overrides {
        n: cli.n,
        h: cli.h,
        p: cli.p,
        r: cli.r,
        m_max: cli.mmax,
        window: cli.window,
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format.as_deref().map(str::parse).transpose()?,
        profile: cli.profile.as_deref().map(config::parse_profile).transpose()?,
    };
    Ok(file.layer(flags))
}

fn setup_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BTSTRATA_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("BTSTRATA_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("BTSTRATA_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn render_csv(report: &Report) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| e.to_string();
    w.write_record(["check_id", "params", "status", "pass", "checked", "witness"]).map_err(err)?;
    let js = |v: &serde_json::Value| v.to_string();
    for c in &report.checks {
        let status = serde_json::to_value(c.status).map_err(|e| e.to_string())?;
        w.write_record([
            c.check_id.clone(),
            js(&c.params),
            status.as_str().unwrap_or_default().to_string(),
            c.pass.to_string(),
            c.checked.to_string(),
            c.witness.as_ref().map(js).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    for s in &report.skipped {
        let reason = serde_json::to_value(s.reason).map_err(|e| e.to_string())?;
        let status = format!("skipped_{}", reason.as_str().unwrap_or_default());
        w.write_record([s.check_id.clone(), js(&s.params), status, String::new(), "0".into(), s.message.clone()]).map_err(err)?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    let cfg = RunConfig::resolve(overrides(&cli)?)?;
    setup_threads()?;
    if cfg.suite.profile == Profile::Deep {
        eprintln!("warning: deep profile (n = 6, m up to 3); expect long runtimes and bound refusals");
    }
    let config_json = serde_json::to_value(&cfg.suite).map_err(|e| e.to_string())?;
    let mut report = Report::new(cli.command.name(), config_json);
    let suite = match cli.command {
        Command::Vertex => suites::vertex_suite,
        Command::Strata => suites::strata_suite,
        Command::Charts => suites::charts_suite,
        Command::All => suites::all_suites,
    };
    suite(&cfg.suite, &mut report).map_err(|e| e.to_string())?;
    report.finish();
    let bytes = match cfg.format {
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(&report).map_err(|e| e.to_string())?;
            b.push(b'\n');
            b
        }
        Format::Csv => render_csv(&report)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    let s = &report.summary;
    eprintln!("{}: {} checks, {} passed, {} failed, {} skipped", report.command, s.total, s.passed, s.failed, s.skipped);
    if !s.failed_checks.is_empty() {
        eprintln!("failed: {}", s.failed_checks.join(", "));
    }
    Ok(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
