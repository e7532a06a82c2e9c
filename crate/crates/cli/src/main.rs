//! `sheafnet` command-line pipeline.
//!
//! Every subcommand reads its inputs, writes one output (stdout unless
//! `--out` is given) and reports failures as a single stderr line of the
//! form `error[<kind>]: <message>`.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sheafnet::activation::DEFAULT_ENUMERATION_CAP;
use sheafnet::generate::{random_geometric_radii, Dumbbell};
use sheafnet::homology::DEFAULT_MAX_K;
use sheafnet::traffic::{write_trace, TopRule};
use sheafnet::{io, Error, Network};

#[derive(Parser)]
#[command(name = "sheafnet", version, about = "Activation sheaves and local homology for wireless networks")]
#[command(propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random geometric node placement as node CSV
    Gen(GenArgs),
    /// Build a link or interference complex from node CSV
    Complex(ComplexArgs),
    /// Local homology scores for every cell
    Lh(LhArgs),
    /// Enumerate global sections of the activation sheaf
    Sections(SectionsArgs),
    /// Simulate shortest-path traffic and write a trace
    Sim(SimArgs),
    /// Relate forwarding load to LH_1
    Correlate(CorrelateArgs),
    /// Cohomology of the vector activation sheaf
    Cohomology(CohomologyArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, required_unless_present = "dumbbell")]
    count: Option<usize>,
    /// Side of the square placement area
    #[arg(long, default_value_t = 1000.0)]
    area: f64,
    #[arg(long, required_unless_present = "dumbbell")]
    radius: Option<f64>,
    /// Draw radii uniformly from [radius, radius-max]
    #[arg(long)]
    radius_max: Option<f64>,
    /// Two clusters joined by bridge nodes instead of uniform placement;
    /// takes `LEFT,RIGHT,BRIDGES` and ignores area and radius
    #[arg(long, value_parser = parse_dumbbell, conflicts_with_all = ["radius_max"])]
    dumbbell: Option<Dumbbell>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Link,
    Interference,
}

#[derive(Args)]
struct ComplexArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long, value_enum, default_value_t = Kind::Link)]
    kind: Kind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LhArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_K)]
    max_k: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SectionsArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Refuse to enumerate above this many nodes
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    packets: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopBy {
    Range,
    Rank,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    lh: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 5.0)]
    top_percent: f64,
    /// Top forwarders by share of the count range or by node rank
    #[arg(long, value_enum, default_value_t = TopBy::Range)]
    top_by: TopBy,
    /// Exit with status 4 unless every top forwarder has LH_1 >= 1
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CohomologyArgs {
    #[arg(long)]
    complex: PathBuf,
    #[command(flatten)]
    output: Output,
}

fn parse_dumbbell(s: &str) -> Result<Dumbbell, String> {
    let parts: Vec<usize> =
        s.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    match parts[..] {
        [left, right, bridges] => Ok(Dumbbell { left, right, bridges }),
        _ => Err("expected LEFT,RIGHT,BRIDGES".into()),
    }
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "input", message: message.into() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 1, kind: "internal", message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EnumerationCap { nodes, cap } => Failure {
                code: 3,
                kind: "cap",
                message: format!("{nodes} nodes exceed the enumeration cap of {cap}; raise it with --cap"),
            },
            Error::InvariantViolation(_) => Failure { code: 1, kind: "internal", message: e.to_string() },
            Error::Io(_) => Failure { code: 2, kind: "io", message: e.to_string() },
            other => Failure::input(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn require_file(p: &Path) -> Outcome {
    if p.is_file() {
        Ok(())
    } else {
        Err(Failure { code: 2, kind: "io", message: format!("{}: no such file", p.display()) })
    }
}

fn require_out(o: &Output) -> Outcome {
    let Some(p) = &o.out else { return Ok(()) };
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(Failure { code: 2, kind: "io", message: format!("{}: output directory does not exist", dir.display()) })
        }
        _ => Ok(()),
    }
}

fn open(p: &Path) -> Result<BufReader<File>, Failure> {
    File::open(p).map(BufReader::new).map_err(|e| Failure {
        code: 2,
        kind: "io",
        message: format!("{}: {e}", p.display()),
    })
}

fn read_string(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure { code: 2, kind: "io", message: format!("{}: {e}", p.display()) })
}

fn emit(o: &Output, bytes: &[u8]) -> Outcome {
    let io_fail = |e: std::io::Error| Failure { code: 1, kind: "io", message: e.to_string() };
    match &o.out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure {
            code: 1,
            kind: "io",
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(io_fail)
        }
    }
}

fn json_line(v: serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(&v).expect("report serializes");
    s.push(b'\n');
    s
}

fn read_nodes(p: &Path) -> Result<Network, Failure> {
    io::read_nodes_csv(open(p)?).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
}

fn read_complex(p: &Path) -> Result<sheafnet::Complex, Failure> {
    io::complex_from_json(&read_string(p)?).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
}

fn gen(a: GenArgs) -> Outcome {
    require_out(&a.output)?;
    let net: Network = match a.dumbbell {
        Some(shape) => sheafnet::generate::dumbbell(shape, a.seed)?,
        None => {
            let (count, radius) = (a.count.unwrap_or(0), a.radius.unwrap_or(0.0));
            random_geometric_radii(count, a.area, (radius, a.radius_max.unwrap_or(radius)), a.seed)?
        }
    };
    let mut buf = Vec::new();
    io::write_nodes_csv(&mut buf, &net)?;
    emit(&a.output, &buf)
}

fn complex(a: ComplexArgs) -> Outcome {
    require_file(&a.nodes)?;
    require_out(&a.output)?;
    let net = read_nodes(&a.nodes)?;
    let x = match a.kind {
        Kind::Link => sheafnet::link_complex(&net),
        Kind::Interference => sheafnet::interference_complex(&net)?,
    };
    let mut json = io::complex_to_json(&x).into_bytes();
    json.push(b'\n');
    emit(&a.output, &json)?;
    eprintln!("cells {}", io::summary_line(&x));
    Ok(())
}

fn lh(a: LhArgs) -> Outcome {
    require_file(&a.complex)?;
    require_out(&a.output)?;
    let x = read_complex(&a.complex)?;
    let scores = sheafnet::lh_field(&x, a.max_k)?;
    let mut buf = Vec::new();
    io::write_lh_csv(&mut buf, &scores, a.max_k)?;
    emit(&a.output, &buf)
}

fn sections(a: SectionsArgs) -> Outcome {
    require_file(&a.complex)?;
    require_out(&a.output)?;
    let x = read_complex(&a.complex)?;
    let all = sheafnet::enumerate_global_sections(&x, a.cap)?;
    let mut json = io::sections_to_json(&all).into_bytes();
    json.push(b'\n');
    emit(&a.output, &json)
}

fn sim(a: SimArgs) -> Outcome {
    require_file(&a.nodes)?;
    require_out(&a.output)?;
    let net = read_nodes(&a.nodes)?;
    let trace = sheafnet::simulate(&net, a.packets, a.seed)?;
    let mut buf = Vec::new();
    write_trace(&mut buf, &trace)?;
    emit(&a.output, &buf)
}

fn correlate(a: CorrelateArgs) -> Outcome {
    require_file(&a.lh)?;
    require_file(&a.trace)?;
    require_out(&a.output)?;
    let scores = io::read_lh_csv(open(&a.lh)?).map_err(|e| Failure::input(format!("{}: {e}", a.lh.display())))?;
    let known = io::lh_nodes(&scores);
    let trace = sheafnet::ingest_trace(open(&a.trace)?, Some(&known))
        .map_err(|e| Failure::input(format!("{}: {e}", a.trace.display())))?;
    let cfg = sheafnet::CorrelationConfig {
        bins: a.bins,
        top_percent: a.top_percent,
        top_rule: match a.top_by {
            TopBy::Range => TopRule::Range,
            TopBy::Rank => TopRule::Rank,
        },
    };
    let report = sheafnet::correlate(&sheafnet::forwarding_stats(&trace), &scores, &cfg)?;
    emit(&a.output, &json_line(serde_json::to_value(&report)?))?;
    if a.assert && !report.top_bin_high_lh {
        let ids: Vec<String> = report.top_bin.iter().map(ToString::to_string).collect();
        return Err(Failure {
            code: 4,
            kind: "assert",
            message: format!("top forwarders [{}] include a node with LH_1 = 0", ids.join(",")),
        });
    }
    Ok(())
}

fn cohomology(a: CohomologyArgs) -> Outcome {
    require_file(&a.complex)?;
    require_out(&a.output)?;
    let x = read_complex(&a.complex)?;
    emit(&a.output, &json_line(serde_json::to_value(sheafnet::cohomology_report(&x)?)?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let summary: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
                .collect();
            eprintln!("error[usage]: {}", summary.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Complex(a) => complex(a),
        Command::Lh(a) => lh(a),
        Command::Sections(a) => sections(a),
        Command::Sim(a) => sim(a),
        Command::Correlate(a) => correlate(a),
        Command::Cohomology(a) => cohomology(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
