use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cheese_core::families::json::{cheese_from_json, cheese_to_json};
use cheese_core::families::{sqrt_family, DiscFamily, Generator, ParametricTail};
use cheese_core::precision::format_short;
use cheese_core::verify::{overall, render_svg, run_suite, toy_seed_family, SuiteConfig, DEFAULT_SEED, SUITES};
use cheese_core::{browder, CheeseSpec, Complex, Error, Execution, Precision, RationalFunction, Verdict};

#[derive(Parser)]
#[command(name = "cheese", version, about = "Build, transform and certify Swiss-cheese disc families")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(53..))]
    precision: u32,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Output format; `svg` only applies to `render`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family JSON from a generator: discs 1..=depth realized, the rest parametric.
    Build(BuildArgs),
    /// Replace every disc of a family by its two square-root discs.
    Sqrt {
        family: PathBuf,
    },
    /// Browder sum report for a family, order and point. Exits 1 unless certified finite.
    Browder(BrowderArgs),
    /// Taylor functional delta_{a,m} of a rational-function file.
    Delta(DeltaArgs),
    /// Run a property suite and emit its certificates. Exits 1 unless every certificate passes.
    Verify(VerifyArgs),
    /// SVG picture of a family.
    Render(RenderArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// road_runner, synthetic_budget, infinite_order or toy_seed.
    generator: String,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    count: Option<u32>,
    #[arg(long, default_value_t = 20)]
    depth: u64,
}

#[derive(Args)]
struct BrowderArgs {
    /// Family JSON; the empty family when omitted.
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long, short)]
    m: u32,
    /// Point as `re,im`.
    #[arg(long, default_value = "0,0")]
    point: String,
    #[arg(long, default_value_t = 20)]
    depth: u64,
}

#[derive(Args)]
struct DeltaArgs {
    function: PathBuf,
    #[arg(long, short)]
    m: u32,
    #[arg(long, default_value = "0,0")]
    point: String,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    /// Comma-separated orders (or family parameters) overriding the suite defaults.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    #[arg(long)]
    depth: Option<u64>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    count: Option<u32>,
    #[arg(long)]
    functions: Option<usize>,
    /// Seed family JSON for the pipeline suites; the bundled toy seed otherwise.
    #[arg(long)]
    seed_family: Option<PathBuf>,
    /// Pin the certificate timestamp.
    #[arg(long)]
    timestamp: Option<String>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RenderArgs {
    family: PathBuf,
    #[arg(long, default_value_t = 20)]
    depth: u64,
    #[arg(long, default_value_t = 800)]
    width: u32,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotCertified(_) | Error::TheoremViolation(_) => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(String, bool), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed)) => {
            if let Err(e) = emit(cli.output.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let prec = Precision::new(cli.precision)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Render(_) => Format::Svg,
        _ => Format::Json,
    });
    match (&cli.command, format) {
        (Command::Render(_), Format::Svg) => {}
        (Command::Render(_), _) => return Err(Failure::Usage("render only writes svg".into())),
        (_, Format::Svg) => return Err(Failure::Usage("svg output is only available for render".into())),
        _ => {}
    }
    match &cli.command {
        Command::Build(args) => build(args, prec, cli.seed, format),
        Command::Sqrt { family } => {
            let cheese = read_family(family, prec)?;
            let root = sqrt_family(&cheese.family)?;
            let label = format!("sqrt of {}", cheese.label);
            family_output(&CheeseSpec::new(root, label), format)
        }
        Command::Browder(args) => browder_cmd(args, prec, format),
        Command::Delta(args) => delta(args, prec, format),
        Command::Verify(args) => verify(args, cli, prec, format),
        Command::Render(args) => {
            let cheese = read_family(&args.family, prec)?;
            Ok((render_svg(&cheese, args.depth, args.width)?, true))
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_family(path: &Path, prec: Precision) -> Result<CheeseSpec, Failure> {
    let text = read_text(path)?;
    cheese_from_json(&text, prec).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn family_output(cheese: &CheeseSpec, format: Format) -> Outcome {
    let text = match format {
        Format::Json => pretty(&cheese_to_json(cheese)),
        _ => {
            let fam = &cheese.family;
            let mut s = format!("{}\n{} finite discs\n", cheese.label, fam.finite().len());
            for d in fam.finite() {
                s.push_str(&format!(
                    "{} {} {}\n",
                    format_short(d.center().real()),
                    format_short(d.center().imag()),
                    format_short(d.radius())
                ));
            }
            for t in fam.tails() {
                s.push_str(&format!("tail {} from index {}\n", t.generator.id(), t.start));
            }
            s
        }
    };
    Ok((text, true))
}

fn require<T>(value: Option<T>, flag: &str, generator: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("{generator} needs --{flag}")))
}

fn build(args: &BuildArgs, prec: Precision, seed: u64, format: Format) -> Outcome {
    let id = args.generator.as_str();
    if id == "toy_seed" {
        return family_output(&toy_seed_family(prec), format);
    }
    let (generator, label) = match id {
        "road_runner" => {
            let m = require(args.m, "m", id)?;
            if m == 0 {
                return Err(Failure::Usage("road_runner needs m >= 1".into()));
            }
            (Generator::RoadRunner { m }, format!("road_runner({m})"))
        }
        "synthetic_budget" => {
            let n = require(args.n, "n", id)?;
            let count = require(args.count, "count", id)?;
            (Generator::SyntheticBudget { n, count, seed }, format!("synthetic_budget(n={n}, count={count})"))
        }
        "infinite_order" => {
            let count = args.count.unwrap_or(8);
            (Generator::InfiniteOrder { count, seed }, format!("infinite_order(count={count})"))
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown generator `{other}` (expected road_runner, synthetic_budget, infinite_order or toy_seed)"
            )))
        }
    };
    let full = DiscFamily::from_generator(prec, generator.clone());
    let mut fam = DiscFamily::from_discs(prec, full.realize(args.depth)?);
    if generator.last_index().is_none_or(|last| last > args.depth) {
        fam.push_tail(ParametricTail {
            generator,
            start: args.depth + 1,
        });
    }
    family_output(&CheeseSpec::new(fam, label), format)
}

fn parse_point(text: &str, prec: Precision) -> Result<Complex, Failure> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("point `{text}` is not of the form re,im")))?;
    let re = prec.parse(re.trim()).map_err(|e| Failure::Usage(format!("point real part: {e}")))?;
    let im = prec.parse(im.trim()).map_err(|e| Failure::Usage(format!("point imaginary part: {e}")))?;
    Ok(Complex::with_val(prec.bits(), (re, im)))
}

fn browder_cmd(args: &BrowderArgs, prec: Precision, format: Format) -> Outcome {
    let cheese = match &args.family {
        Some(path) => read_family(path, prec)?,
        None => CheeseSpec::new(DiscFamily::empty(prec), "empty"),
    };
    let point = parse_point(&args.point, prec)?;
    let report = browder::browder_sum(&cheese.family, args.m, &point, args.depth)?;
    let certified = report.is_certified_finite();
    let text = match format {
        Format::Json => pretty(&report.to_json()),
        _ => {
            let upper = report.upper_bound().map(|u| format_short(&u)).unwrap_or_else(|| "none".into());
            format!(
                "order {} realized_sum {} upper_bound {} certified_finite {}",
                report.order,
                format_short(&report.realized_sum),
                upper,
                certified
            )
        }
    };
    Ok((text, certified))
}

fn delta(args: &DeltaArgs, prec: Precision, format: Format) -> Outcome {
    let text = read_text(&args.function)?;
    let f = RationalFunction::from_json(&text, prec).map_err(|e| Failure::Usage(format!("{}: {e}", args.function.display())))?;
    let point = parse_point(&args.point, prec)?;
    let value = f.taylor_functional(&point, args.m)?;
    let (re, im) = (format_short(value.real()), format_short(value.imag()));
    let text = match format {
        Format::Json => pretty(&json!({
            "point": [format_short(point.real()), format_short(point.imag())],
            "m": args.m,
            "value": [re, im],
        })),
        _ => format!("{re} {im}"),
    };
    Ok((text, true))
}

fn verify(args: &VerifyArgs, cli: &Cli, prec: Precision, format: Format) -> Outcome {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(Failure::Usage(format!(
            "unknown suite `{}` (expected one of {})",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let mut cfg = SuiteConfig::for_suite(&args.suite);
    cfg.precision = prec;
    cfg.seed = cli.seed;
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = &args.orders {
        cfg.orders = v.clone();
    }
    if let Some(v) = args.depth {
        cfg.depth = v;
    }
    if let Some(v) = args.n_max {
        cfg.n_max = v;
    }
    if let Some(v) = args.count {
        cfg.count = v;
    }
    if let Some(v) = args.functions {
        cfg.functions = v;
    }
    if let Some(path) = &args.seed_family {
        cfg.seed_family = Some(read_family(path, prec)?);
    }
    cfg.timestamp = args.timestamp.clone();
    if args.sequential {
        cfg.exec = Execution::Sequential;
    }
    let certs = run_suite(&args.suite, &cfg)?;
    let verdict = overall(&certs);
    let text = match format {
        Format::Json => pretty(&serde_json::to_value(&certs).expect("certificates serialize")),
        _ => {
            let mut s = String::new();
            for c in &certs {
                s.push_str(&format!("{} {} margin {} [{}]\n", c.verdict, c.subject, c.margin, c.claim_id));
            }
            s.push_str(&format!("{}: {} certificates, overall {verdict}\n", args.suite, certs.len()));
            s
        }
    };
    Ok((text, verdict == Verdict::Pass))
}
