use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twirl_core::isotypic::{block_structure, twirl_decomposition_with_retries};
use twirl_core::twirls::{permutation_twirl_closed_form, twirl_finite_group, werner_channel};
use twirl_core::{
    block_channel, depolarizing, json as tjson, verify_decomposition, BlockSpec, Channel, Error,
    FiniteGroupRep, MixedUnitaryDecomposition,
};

/// Twirling channels and minimal mixed-unitary decompositions.
#[derive(Parser, Debug)]
#[command(name = "twirl", version)]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for the randomized structure search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Attempts allowed for the structure search.
    #[arg(long, global = true, default_value_t = 8)]
    retries: usize,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named channel.
    Build {
        kind: Kind,
        /// Dimension parameter for depolarizing, perm-twirl and werner.
        #[arg(long)]
        n: Option<usize>,
        /// Block spec such as "1x2,1x1".
        #[arg(long)]
        spec: Option<String>,
        /// FiniteGroupRep JSON file for group-twirl.
        #[arg(long)]
        group: Option<PathBuf>,
    },
    /// Find the block structure and a minimal decomposition.
    Decompose { channel: PathBuf },
    /// Check a decomposition against a channel.
    Verify {
        channel: PathBuf,
        decomposition: PathBuf,
    },
    /// Print the Choi rank.
    Rank { channel: PathBuf },
    /// Print the block structure and basis change.
    Structure { channel: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Depolarizing,
    Block,
    PermTwirl,
    Werner,
    GroupTwirl,
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_channel(path: &PathBuf) -> anyhow::Result<Channel> {
    serde_json::from_str(&read_input(path)?)
        .with_context(|| format!("parsing channel from {}", path.display()))
}

/// Accepts a bare decomposition or the `decompose` output wrapping one.
fn read_decomposition(path: &PathBuf) -> anyhow::Result<MixedUnitaryDecomposition> {
    let mut value: Value = serde_json::from_str(&read_input(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    if let Some(inner) = value.get_mut("decomposition") {
        value = inner.take();
    }
    serde_json::from_value(value)
        .with_context(|| format!("parsing decomposition from {}", path.display()))
}

fn need_n(n: Option<usize>, kind: &str) -> anyhow::Result<usize> {
    n.ok_or_else(|| anyhow!("{kind} needs --n"))
}

fn build(
    kind: Kind,
    n: Option<usize>,
    spec: Option<String>,
    group: Option<PathBuf>,
) -> anyhow::Result<Channel> {
    Ok(match kind {
        Kind::Depolarizing => {
            let n = need_n(n, "depolarizing")?;
            if n == 0 {
                bail!("--n must be positive");
            }
            depolarizing(n)
        }
        Kind::Block => {
            let spec: BlockSpec = spec.ok_or_else(|| anyhow!("block needs --spec"))?.parse()?;
            block_channel(&spec)
        }
        Kind::PermTwirl => permutation_twirl_closed_form(need_n(n, "perm-twirl")?)?,
        Kind::Werner => werner_channel(need_n(n, "werner")?)?,
        Kind::GroupTwirl => {
            let path = group.ok_or_else(|| anyhow!("group-twirl needs --group"))?;
            let rep: FiniteGroupRep = serde_json::from_str(&read_input(&path)?)
                .with_context(|| format!("parsing group from {}", path.display()))?;
            twirl_finite_group(&rep)
        }
    })
}

fn twirl_error(e: Error) -> anyhow::Error {
    match e {
        Error::NotProjection { .. } => anyhow!("not a twirling channel: {e}"),
        other => other.into(),
    }
}

fn write_output(out: &Option<PathBuf>, value: &Value) -> anyhow::Result<()> {
    let mut text = tjson::to_string(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    if cli.retries == 0 {
        bail!("--retries must be at least 1");
    }
    match cli.command {
        Command::Build {
            kind,
            n,
            spec,
            group,
        } => {
            let c = build(kind, n, spec, group)?;
            write_output(&cli.out, &to_value(&c)?)?;
        }
        Command::Decompose { channel } => {
            let phi = read_channel(&channel)?;
            let (d, s) = twirl_decomposition_with_retries(&phi, cli.seed, cli.tol, cli.retries)
                .map_err(twirl_error)?;
            let value = json!({
                "decomposition": to_value(&d)?,
                "structure": { "spec": to_value(&s.spec)?, "rank": s.spec.rank() },
            });
            write_output(&cli.out, &value)?;
        }
        Command::Verify {
            channel,
            decomposition,
        } => {
            let phi = read_channel(&channel)?;
            let d = read_decomposition(&decomposition)?;
            let report = verify_decomposition(&d, &phi, cli.tol)?;
            write_output(&cli.out, &to_value(&report)?)?;
            if !report.pass {
                eprintln!(
                    "verification failed: channel error {:.3e}, unitarity error {:.3e}, probability error {:.3e}",
                    report.max_channel_error, report.max_unitarity_error, report.prob_sum_error
                );
                return Ok(ExitCode::from(1));
            }
        }
        Command::Rank { channel } => {
            let phi = read_channel(&channel)?;
            write_output(&cli.out, &json!({ "choi_rank": phi.choi_rank(cli.tol) }))?;
        }
        Command::Structure { channel } => {
            let phi = read_channel(&channel)?;
            let s = block_structure(&phi, cli.seed, cli.tol, cli.retries).map_err(twirl_error)?;
            write_output(&cli.out, &to_value(&s)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
