use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use koszul::{Error, FieldTag};

mod commands;

/// Koszul modules, resonance diagnostics and Chen ranks over exact fields.
///
/// Exit codes: 0 success, 2 malformed input or missing file, 3 ambient or
/// field mismatch, 4 disagreement between two computations of the same number.
#[derive(Parser, Debug)]
#[command(name = "koszul", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Coefficient field, `QQ` or `GFp:<p>`. Defaults to the field named in
    /// the input file, then to GFp:32003.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<FieldTag>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Recompute every dim W_q by a second route and fail on disagreement.
    #[arg(long, global = true)]
    pub verify: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// dim W_q for a range of degrees.
    Wq(WqArgs),
    /// Hilbert function from degree 0, with resonance and base-locus summaries.
    Hilbert(HilbertArgs),
    /// Report for a hyperplane arrangement (JSON) or a graph (edge list).
    Arrangement(ArrangementArgs),
    /// Report for the graphic arrangement of an edge list.
    Graphic(GraphicArgs),
    /// Isotropy and separability of declared components; resonance membership.
    Resonance(ResonanceArgs),
    /// Seeded generic-vanishing trials, as JSON lines.
    GenericVanishing(GenericArgs),
    /// Rank of a matrix in TSV triplet form.
    Rank(RankArgs),
}

/// Inclusive degree range, written `a..b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QRange {
    pub start: usize,
    pub end: usize,
}

impl QRange {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Args, Debug)]
pub struct WqArgs {
    /// Problem file.
    #[arg(required_unless_present = "random")]
    pub problem: Option<PathBuf>,
    /// Use a random K of dimension M in ∧^2 of an N-space, written `N:M`; needs --seed.
    #[arg(long, value_parser = parse_random, conflicts_with = "problem")]
    pub random: Option<(usize, usize)>,
    /// Degrees, default `0..n`.
    #[arg(long, value_parser = parse_range)]
    pub q: Option<QRange>,
}

#[derive(Args, Debug)]
pub struct HilbertArgs {
    pub problem: PathBuf,
    /// Largest degree, default n.
    #[arg(long)]
    pub q_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ArrangementArgs {
    /// Arrangement JSON or graph edge list.
    pub input: PathBuf,
    /// Multinet file; repeatable.
    #[arg(long)]
    pub multinet: Vec<PathBuf>,
    /// Chen-rank degrees.
    #[arg(long, value_parser = parse_range)]
    pub q: Option<QRange>,
}

#[derive(Args, Debug)]
pub struct GraphicArgs {
    /// Edge list, one `i j` pair per line, vertices numbered from 1.
    pub edges: PathBuf,
    /// Chen-rank degrees, default `κ2−1..κ2+1`.
    #[arg(long, value_parser = parse_range)]
    pub q: Option<QRange>,
}

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    pub problem: PathBuf,
    /// Component file (one object or an array); repeatable.
    #[arg(long)]
    pub component: Vec<PathBuf>,
    /// Comma-separated coordinates of a vector to test; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub vector: Vec<String>,
    /// Compare dim W_q with the component sum over these degrees.
    #[arg(long, value_parser = parse_range)]
    pub q: Option<QRange>,
}

#[derive(Args, Debug)]
pub struct GenericArgs {
    /// Values of n.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Seeds; defaults to --seed.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Dimension of K, default 2n−2.
    #[arg(long)]
    pub m: Option<usize>,
    /// Degree, default n−4.
    #[arg(long)]
    pub q: Option<usize>,
    /// Prime, default 32003 or the prime of --field.
    #[arg(long)]
    pub prime: Option<u32>,
    /// Run the n = 5 Kronecker witness check instead of trials.
    #[arg(long)]
    pub witness: bool,
    /// JSON-lines file; existing records are kept and their trials skipped.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    pub matrix: PathBuf,
}

fn parse_field(s: &str) -> Result<FieldTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<QRange, String> {
    let number = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad degree `{t}`"));
    let (start, end) = match s.split_once("..") {
        Some((a, b)) => (number(a)?, number(b.strip_prefix('=').unwrap_or(b))?),
        None => (number(s)?, number(s)?),
    };
    if start > end {
        return Err(format!("empty range `{s}`"));
    }
    Ok(QRange { start, end })
}

fn parse_random(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s.split_once(':').ok_or_else(|| format!("expected N:M, got `{s}`"))?;
    let n = n.trim().parse().map_err(|_| format!("bad n in `{s}`"))?;
    let m = m.trim().parse().map_err(|_| format!("bad m in `{s}`"))?;
    Ok((n, m))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AmbientMismatch(_) => 3,
        Error::RouteDisagreement(_) => 4,
        Error::RetriesExhausted(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(jobs) = cli.global.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Wq(a) => commands::wq(g, a),
        Command::Hilbert(a) => commands::hilbert(g, a),
        Command::Arrangement(a) => commands::arrangement(g, a),
        Command::Graphic(a) => commands::graphic(g, a),
        Command::Resonance(a) => commands::resonance(g, a),
        Command::GenericVanishing(a) => commands::generic_vanishing(g, a),
        Command::Rank(a) => commands::rank(g, a),
    };
    match result {
        Ok(out) => {
            out.print(g.format);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
