use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qupdate_core::campaign::{self, CampaignSpec, MessagePolicy, NoiseSpec, OracleChoice, ReportFormat};
use qupdate_core::css::{css_constructions, CssParams};
use qupdate_core::matfile;
use qupdate_core::mds::mds_constructions;
use qupdate_core::protocol::bandwidth_report;

#[derive(Parser)]
#[command(name = "qupdate", version, about = "Verify quantum-assisted oblivious updates for MDS-coded storage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification campaign; exits 0 iff nothing failed.
    Verify(VerifyArgs),
    /// List built-in presets and constructions.
    List,
    /// Print the generators of an MDS code in the text matrix format.
    ExportMds {
        #[arg(long, default_value = "interleaved-rs")]
        construction: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        q: u32,
    },
    /// Print the parity checks of a CSS code in the text matrix format.
    ExportCss {
        #[arg(long, default_value = "auto")]
        construction: String,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        param: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the bandwidth comparison as JSON.
    Bandwidth {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Built-in campaign name (see `qupdate list`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML campaign file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    oracle: Option<OracleChoice>,
    /// `exhaustive`, `random:<count>` or `auto:<count>`.
    #[arg(long)]
    messages: Option<MessagePolicy>,
    #[arg(long)]
    seed: Option<u64>,
    /// `p=<f>[,p=<f>...],trials=<n>`.
    #[arg(long)]
    noise: Option<String>,
    /// Write the report here and print a text summary to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

fn parse_noise(s: &str) -> Result<NoiseSpec> {
    let mut p = Vec::new();
    let mut trials = None;
    for part in s.split(',') {
        match part.split_once('=') {
            Some(("p", v)) => p.push(v.parse::<f64>().with_context(|| format!("bad fidelity `{v}`"))?),
            Some(("trials", v)) => trials = Some(v.replace('_', "").parse::<u64>().with_context(|| format!("bad trial count `{v}`"))?),
            _ => bail!("expected `p=<f>,trials=<n>`, got `{s}`"),
        }
    }
    if p.is_empty() {
        bail!("noise needs at least one `p=<f>`");
    }
    Ok(NoiseSpec { p, trials: trials.context("noise needs `trials=<n>`")? })
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut spec = match (&args.preset, &args.config) {
        (Some(name), _) => campaign::preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            CampaignSpec::from_toml(&text)?
        }
        (None, None) => bail!("one of --preset or --config is required"),
    };
    if let Some(o) = args.oracle {
        spec.oracle = o;
    }
    if let Some(m) = args.messages {
        spec.messages = m;
        spec.configurations.iter_mut().for_each(|c| c.messages = None);
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = &args.noise {
        spec.noise = Some(parse_noise(n)?);
    }
    let report = campaign::run_campaign(&spec)?;
    match &args.out {
        Some(path) => {
            campaign::write_report(&report, args.format, path)?;
            print!("{}", String::from_utf8_lossy(&campaign::emit_report(&report, ReportFormat::Text)));
        }
        None => print!("{}", String::from_utf8_lossy(&campaign::emit_report(&report, args.format))),
    }
    Ok(report.all_passed())
}

fn list() {
    println!("presets:");
    for (name, about) in campaign::PRESETS {
        println!("  {name:<22} {about}");
    }
    println!("mds constructions:");
    for c in mds_constructions().iter() {
        println!("  {:<22} {}", c.name(), c.description());
    }
    println!("css constructions:");
    for c in css_constructions().iter() {
        println!("  {:<22} {}", c.name(), c.description());
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::List => {
            list();
            Ok(true)
        }
        Command::ExportMds { construction, n, k, alpha, q } => {
            let code = mds_constructions().get(&construction)?.build(n, k, alpha, q)?;
            print!("{}", matfile::write_mds(&code));
            Ok(true)
        }
        Command::ExportCss { construction, alpha, k, q, param, seed } => {
            let code = css_constructions().get(&construction)?.build(&CssParams { alpha, k, q, seed, param })?;
            print!("{}", matfile::write_css(&code));
            Ok(true)
        }
        Command::Bandwidth { alpha, k, q } => {
            println!("{}", serde_json::to_string_pretty(&bandwidth_report(alpha, k, q))?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
