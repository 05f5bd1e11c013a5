//! nsl: noise stability of three-part partitions from the command line.
//!
//! Exit status: 0 when the requested computation succeeds (and, under
//! `verify`, every check passes); 1 when a verification fails; 2 for
//! usage or domain errors.

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use noise_stability::checks::{run_named, CheckReport, CHECK_NAMES};
use noise_stability::constants::{
    alpha2, alpha3, beta3, majority_agreement_limit, plurality_agreement_limit,
};
use noise_stability::discrete::{
    influences, majority_convergence_mc, plurality_convergence, stability_exact, stability_mc,
    VotingRule,
};
use noise_stability::profile::{
    bilinear_stability_with_depth, penalty_functional, profile_stability_with_depth,
    BilinearStability, RadialProfile, DEFAULT_RADIAL_POINTS, DEFAULT_SERIES_DEPTH,
};
use noise_stability::spherical::{lambda_bounds, lambda_sequence};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nsl",
    version,
    about = "Noise stability of three-part partitions: kernel eigenvalues, radial-profile \
             stability, certified inequality scans, and correlated-ballot voting simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, env = "NSL_FORMAT")]
    format: Format,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH", env = "NSL_OUT")]
    out: Option<PathBuf>,

    /// Worker threads for grid scans and sampling (0 = one per core)
    #[arg(long, global = true, default_value_t = 0, env = "NSL_JOBS")]
    jobs: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// The two- and three-part cut constants with their minimisers
    Constants,
    /// Run certified inequality checks; exits 1 when any fails
    Verify(VerifyArgs),
    /// Stability of a three-part radial profile under correlated noise
    Stability(StabilityArgs),
    /// Kernel eigenvalues with their certified envelopes
    Lambda(LambdaArgs),
    /// Exact or Monte Carlo stability of discrete voting rules
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Check names, or "all"
    #[arg(value_name = "NAME", default_value = "all")]
    names: Vec<String>,

    /// Rerun each grid at double resolution and report stability warnings
    #[arg(long)]
    refine: bool,

    /// List the available check names and exit
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true)))]
struct StabilityArgs {
    /// Correlation parameter
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,

    /// Read the profile from this JSON file ("-" for stdin)
    #[arg(long, value_name = "PATH", group = "source")]
    profile: Option<PathBuf>,

    /// Use the three equal sectors on a radial grid of this many points
    #[arg(long, value_name = "POINTS", group = "source")]
    sectors: Option<usize>,

    /// Use this member of the built-in balanced pseudorandom family
    #[arg(long, value_name = "INDEX", group = "source")]
    family: Option<usize>,

    /// Correlate against a second profile (bilinear form, needs rho > 0)
    #[arg(long, value_name = "PATH")]
    pair: Option<PathBuf>,

    /// Reflect the second profile through the origin first
    #[arg(long, requires = "pair")]
    antipodal: bool,

    /// Angular harmonic series depth
    #[arg(long, default_value_t = DEFAULT_SERIES_DEPTH)]
    depth: usize,

    /// Also report the sector-deviation penalty (needs rho > 0)
    #[arg(long, conflicts_with = "pair")]
    penalty: bool,
}

#[derive(Args)]
struct LambdaArgs {
    /// Correlation parameter
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,

    /// Radius of the first point
    #[arg(long, default_value_t = 1.0)]
    r: f64,

    /// Radius of the second point
    #[arg(long, default_value_t = 1.0)]
    s: f64,

    /// Highest degree to report
    #[arg(long, default_value_t = 10)]
    max_degree: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RuleKind {
    Plurality,
    Majority,
    Dictator,
    Lookup,
}

#[derive(Args)]
struct SimulateArgs {
    /// Voting rule
    #[arg(long, value_enum)]
    rule: RuleKind,

    /// Number of letters on each ballot (vector rules)
    #[arg(long, default_value_t = 3)]
    candidates: usize,

    /// Electorate size
    #[arg(long)]
    voters: Option<usize>,

    /// Deciding coordinate for --rule dictator
    #[arg(long, default_value_t = 0)]
    coordinate: usize,

    /// Lookup table JSON file for --rule lookup
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,

    /// Correlation parameter
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,

    /// Estimate by seeded Monte Carlo instead of exact enumeration
    #[arg(long)]
    mc: bool,

    /// Monte Carlo sample budget
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,

    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Scan electorate sizes LO:HI instead of a single rule
    /// (odd sizes for majority, every size for plurality)
    #[arg(long, value_name = "LO:HI", conflicts_with_all = ["voters", "mc"])]
    ladder: Option<String>,

    /// Report per-coordinate influences instead of stability
    #[arg(long, conflicts_with_all = ["ladder", "mc"])]
    influences: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .context("initialising the worker pool")?;
    }
    let (report, passed) = match &cli.command {
        Command::Constants => (constants_report(cli.format), true),
        Command::Verify(args) => verify_report(cli.format, args)?,
        Command::Stability(args) => (stability_report(cli.format, args)?, true),
        Command::Lambda(args) => (lambda_report(cli.format, args)?, true),
        Command::Simulate(args) => (simulate_report(cli.format, args)?, true),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, report).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{report}"),
    }
    Ok(passed)
}

// ---------------------------------------------------------------------
// constants

fn constants_report(format: Format) -> String {
    let (a2, a3, b3) = (alpha2(), alpha3(), beta3());
    match format {
        Format::Json => pretty(&serde_json::json!({
            "alpha2": a2, "alpha3": a3, "beta3": b3,
        })),
        Format::Text => {
            let mut s = String::new();
            for (name, e) in [("alpha2", a2), ("alpha3", a3), ("beta3 ", b3)] {
                let _ = writeln!(
                    s,
                    "{name} = {:.12}  (minimiser rho = {:.12})",
                    e.value, e.argmin
                );
            }
            s
        }
    }
}

// ---------------------------------------------------------------------
// verify

fn verify_report(format: Format, args: &VerifyArgs) -> Result<(String, bool)> {
    if args.list {
        let mut s = String::new();
        for name in CHECK_NAMES {
            let _ = writeln!(s, "{name}");
        }
        return Ok((s, true));
    }
    let mut reports: Vec<CheckReport> = Vec::new();
    for name in &args.names {
        if name == "all" {
            for n in CHECK_NAMES {
                reports.extend(run_named(n, args.refine)?);
            }
        } else {
            reports.extend(run_named(name, args.refine)?);
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let all_passed = passed == reports.len();
    let text = match format {
        Format::Json => pretty(&reports),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{} {} {} margin {:+.6e} over {} points ({} ms)",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    compact_params(&r.params),
                    r.min_margin,
                    r.points_tested,
                    r.runtime_ms,
                );
                for note in &r.notes {
                    let _ = writeln!(s, "  note: {note}");
                }
                for warning in &r.warnings {
                    let _ = writeln!(s, "  warning: {warning}");
                }
            }
            let _ = writeln!(s, "{passed} of {} checks passed", reports.len());
            s
        }
    };
    Ok((text, all_passed))
}

fn compact_params(params: &serde_json::Value) -> String {
    match params.as_object() {
        Some(map) if !map.is_empty() => map
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
        _ => "-".to_string(),
    }
}

// ---------------------------------------------------------------------
// stability

fn load_profile(path: &Path) -> Result<RadialProfile> {
    let json = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading the profile from stdin")?;
        buf
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(RadialProfile::from_json(&json)?)
}

fn stability_report(format: Format, args: &StabilityArgs) -> Result<String> {
    let profile = if let Some(path) = &args.profile {
        load_profile(path)?
    } else if let Some(points) = args.sectors {
        RadialProfile::sectors(points)?
    } else if let Some(index) = args.family {
        RadialProfile::balanced_family(index, DEFAULT_RADIAL_POINTS)?
    } else {
        unreachable!("clap enforces the source group");
    };

    let stability: BilinearStability = match &args.pair {
        Some(path) => {
            let mut second = load_profile(path)?;
            if args.antipodal {
                second = second.antipodal();
            }
            bilinear_stability_with_depth(args.rho, &profile, &second, args.depth)?
        }
        None => profile_stability_with_depth(args.rho, &profile, args.depth)?,
    };
    let penalty = if args.penalty {
        Some(penalty_functional(args.rho, &profile)?)
    } else {
        None
    };

    Ok(match format {
        Format::Json => {
            let mut v = serde_json::to_value(stability).expect("plain struct");
            if let Some(p) = penalty {
                v["penalty"] = p.into();
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "total          {:+.15}", stability.total);
            let _ = writeln!(s, "constant part  {:+.15}", stability.constant_part);
            let _ = writeln!(s, "degree one     {:+.15}", stability.degree_one);
            let _ = writeln!(s, "higher degrees {:+.15}", stability.higher_degrees);
            let _ = writeln!(s, "uncertainty    {:.3e}", stability.uncertainty);
            if let Some(p) = penalty {
                let _ = writeln!(s, "penalty        {:.15e}", p);
            }
            s
        }
    })
}

// ---------------------------------------------------------------------
// lambda

#[derive(Serialize)]
struct LambdaRow {
    degree: usize,
    lambda: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn lambda_report(format: Format, args: &LambdaArgs) -> Result<String> {
    let seq = lambda_sequence(args.max_degree, args.rho, args.r, args.s)?;
    let rows: Vec<LambdaRow> = seq
        .iter()
        .enumerate()
        .map(|(d, &lambda)| {
            // envelopes are certified in the positive regime only
            let bounds = (args.rho > 0.0).then(|| {
                lambda_bounds(d, args.rho, args.r, args.s).expect("positive kernel scale")
            });
            LambdaRow {
                degree: d,
                lambda,
                lower: bounds.map(|b| b.lower),
                upper: bounds.map(|b| b.upper),
            }
        })
        .collect();
    Ok(match format {
        Format::Json => pretty(&rows),
        Format::Text => {
            let mut s = String::from(" d  lambda                  lower                   upper\n");
            for row in &rows {
                let envelope = match (row.lower, row.upper) {
                    (Some(lo), Some(hi)) => format!("{lo:+.15e}  {hi:+.15e}"),
                    _ => "-".to_string(),
                };
                let _ = writeln!(s, "{:2}  {:+.15e}  {envelope}", row.degree, row.lambda);
            }
            s
        }
    })
}

// ---------------------------------------------------------------------
// simulate

fn build_rule(args: &SimulateArgs) -> Result<VotingRule> {
    let voters = || args.voters.context("--voters is required for this rule");
    Ok(match args.rule {
        RuleKind::Plurality => VotingRule::Plurality {
            candidates: args.candidates,
            voters: voters()?,
        },
        RuleKind::Majority => VotingRule::Majority { voters: voters()? },
        RuleKind::Dictator => VotingRule::Dictator {
            candidates: args.candidates,
            voters: voters()?,
            coordinate: args.coordinate,
        },
        RuleKind::Lookup => {
            let path = args
                .table
                .as_ref()
                .context("--rule lookup needs --table PATH")?;
            let json = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            VotingRule::lookup_from_json(&json)?
        }
    })
}

fn parse_ladder(spec: &str, step: usize) -> Result<Vec<usize>> {
    let (lo, hi) = spec
        .split_once(':')
        .context("ladder spec must look like LO:HI")?;
    let lo: usize = lo.trim().parse().context("ladder start")?;
    let hi: usize = hi.trim().parse().context("ladder end")?;
    if lo > hi {
        bail!("ladder start {lo} exceeds end {hi}");
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn simulate_report(format: Format, args: &SimulateArgs) -> Result<String> {
    if let Some(spec) = &args.ladder {
        return ladder_report(format, args, spec);
    }
    let rule = build_rule(args)?;
    if args.influences {
        let inf = influences(&rule)?;
        return Ok(match format {
            Format::Json => pretty(&serde_json::json!({ "influences": inf })),
            Format::Text => {
                let mut s = String::new();
                for (i, v) in inf.iter().enumerate() {
                    let _ = writeln!(s, "influence[{i}] = {v:.15}");
                }
                s
            }
        });
    }
    if args.mc {
        let est = stability_mc(&rule, args.rho, args.samples, args.seed)?;
        Ok(match format {
            Format::Json => pretty(&est),
            Format::Text => format!(
                "stability {:.9} (std error {:.3e}, {} samples, seed {})\n",
                est.value, est.std_error, est.samples, est.seed
            ),
        })
    } else {
        let value = stability_exact(&rule, args.rho)?;
        Ok(match format {
            Format::Json => pretty(&serde_json::json!({ "value": value, "exact": true })),
            Format::Text => format!("stability {value:.15} (exact enumeration)\n"),
        })
    }
}

fn ladder_report(format: Format, args: &SimulateArgs, spec: &str) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        voters: usize,
        value: f64,
        std_error: f64,
        monte_carlo: bool,
        gap_to_limit: f64,
    }
    let rows: Vec<Row> = match args.rule {
        RuleKind::Majority => {
            let mut sizes = parse_ladder(spec, 2)?;
            sizes.retain(|n| n % 2 == 1);
            let limit = majority_agreement_limit(args.rho)?;
            majority_convergence_mc(args.rho, &sizes, args.samples, args.seed)?
                .iter()
                .zip(&sizes)
                .map(|(est, &n)| Row {
                    voters: n,
                    value: est.value,
                    std_error: est.std_error,
                    monte_carlo: true,
                    gap_to_limit: est.value - limit,
                })
                .collect()
        }
        RuleKind::Plurality => {
            if args.candidates != 3 {
                bail!("the plurality ladder is only defined for 3 candidates");
            }
            let sizes = parse_ladder(spec, 1)?;
            plurality_convergence(args.rho, &sizes, args.samples, args.seed)?
                .iter()
                .map(|r| Row {
                    voters: r.voters,
                    value: r.value,
                    std_error: r.std_error,
                    monte_carlo: r.monte_carlo,
                    gap_to_limit: r.gap_to_limit,
                })
                .collect()
        }
        _ => bail!("--ladder applies to majority and plurality only"),
    };
    let limit = match args.rule {
        RuleKind::Majority => majority_agreement_limit(args.rho)?,
        _ => plurality_agreement_limit(args.rho)?,
    };
    Ok(match format {
        Format::Json => pretty(&serde_json::json!({ "limit": limit, "rows": rows })),
        Format::Text => {
            let mut s = format!("large-electorate limit {limit:.12}\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "n={:<5} {:+.9}  se {:.3e}  gap {:+.3e}{}",
                    r.voters,
                    r.value,
                    r.std_error,
                    r.gap_to_limit,
                    if r.monte_carlo { "" } else { "  (exact)" },
                );
            }
            s
        }
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialisation");
    s.push('\n');
    s
}
