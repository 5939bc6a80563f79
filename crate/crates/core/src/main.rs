use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blaschke::cli::{exit_code, run_animate, run_curves, run_render};
use blaschke::config::{parse_seed, JobConfig, RawConfig, DEFAULT_SEED, KEYS_HELP};
use blaschke::{verify, Error, Result};

#[derive(Parser)]
#[command(
    name = "blaschke",
    version,
    about = "Domain coloring and fundamental domains of Blaschke products"
)]
#[command(after_help = KEYS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a domain-colored image (PNG, or PPM for a .ppm output).
    Render(JobArgs),
    /// Write boundary or annulus curves as CSV.
    Curves(JobArgs),
    /// Render a frame sequence while one zero moves.
    Animate(JobArgs),
    /// Check the reference configurations; exits 1 on failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(after_help = KEYS_HELP)]
struct JobArgs {
    /// JSON config file with dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (directory for animate).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    /// Viewport `x0,x1,y0,y1`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Number of finite color bands.
    #[arg(long)]
    bands: Option<usize>,
    /// Seed in hex.
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads, 0 = auto.
    #[arg(long)]
    threads: Option<usize>,
    /// 2x2 supersampling.
    #[arg(long)]
    supersample: bool,
    /// Override a config key, e.g. `--set family.a=0.5,0.25`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run one configuration (fig1..fig5).
    #[arg(long)]
    only: Option<String>,
    /// Seed in hex.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, hide = true)]
    perturb: bool,
}

fn job_config(args: &JobArgs) -> Result<JobConfig> {
    let mut raw = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for s in &args.set {
        raw.set_from_str(s)?;
    }
    if let Some(w) = &args.window {
        let v: Vec<f64> = w
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("bad window {w}")))?;
        let v: [f64; 4] = v
            .try_into()
            .map_err(|_| Error::Config("window needs four numbers".into()))?;
        raw.window = Some(v);
    }
    if let Some(p) = &args.out {
        raw.output = Some(p.to_string_lossy().into_owned());
    }
    raw.width = args.width.or(raw.width);
    raw.height = args.height.or(raw.height);
    raw.bands = args.bands.or(raw.bands);
    raw.threads = args.threads.or(raw.threads);
    raw.seed = args.seed.clone().or(raw.seed);
    if args.supersample {
        raw.supersample = Some(true);
    }
    JobConfig::from_raw(&raw)
}

fn finish<T>(r: Result<T>) -> ExitCode {
    match r {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Render(a) => finish(job_config(&a).and_then(|j| run_render(&j))),
        Command::Curves(a) => finish(job_config(&a).and_then(|j| run_curves(&j))),
        Command::Animate(a) => finish(job_config(&a).and_then(|j| run_animate(&j))),
        Command::Verify(a) => {
            let seed = match a.seed.as_deref().map(parse_seed).transpose() {
                Ok(s) => s.unwrap_or(DEFAULT_SEED),
                Err(e) => return finish::<()>(Err(e)),
            };
            let report = verify::run(a.only.as_deref(), a.perturb, seed);
            print!("{}", report.table());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
