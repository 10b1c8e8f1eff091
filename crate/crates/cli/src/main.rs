mod campaign;
mod config;
mod verify;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asym_core::generators::{default_degree, gen_gnp, gen_gnpd, GnpParams, GnpdParams};
use asym_core::graph::{read_edge_list, write_edge_list};
use asym_core::perm::Permutation;
use asym_core::search::{
    delta2_scan, exact_profile, is_delta_asymmetric, profile_over, SearchParams, Verdict, DEFAULT_BUDGET,
};
use asym_core::{Graph, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "asym", version, about = "Asymmetry profiles of graphs under k-permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random graph and write it as an edge list.
    Gen(GenArgs),
    /// Distance between two graphs, or between a graph and its permutation.
    Dist(DistArgs),
    /// Per-k robustness profile of a graph.
    Profile(ProfileArgs),
    /// Exact delta(2) and transposition statistics.
    Delta2(GraphArg),
    /// Run structural and statistical checks.
    Verify(verify::VerifyArgs),
    /// Run tasks over a seed ensemble and collect CSV and JSON results.
    Campaign(campaign::CampaignArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gnp,
    Gnpd,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Gnp => "gnp",
            Model::Gnpd => "gnpd",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Model as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Model::Gnp)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// Minimum degree for gnpd; defaults to ceil(p (n - 1)).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; the edge list goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    graph: PathBuf,
    /// Second graph on the same vertex set.
    other: Option<PathBuf>,
    /// Permutation in cycle notation, e.g. "(0 3)(1 4 2)".
    #[arg(long, conflicts_with = "other")]
    perm: Option<String>,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub restarts: Option<u32>,
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long)]
    pub cooling: Option<f64>,
    #[arg(long)]
    pub search_seed: Option<u64>,
}

impl SearchArgs {
    pub fn params(&self) -> Result<SearchParams, Failure> {
        let base = SearchParams::default();
        let params = SearchParams {
            restarts: self.restarts.unwrap_or(base.restarts),
            steps: self.steps.unwrap_or(base.steps),
            cooling: self.cooling.unwrap_or(base.cooling),
            seed: self.search_seed.unwrap_or(base.seed),
            ..base
        };
        validate_search(&params)?;
        Ok(params)
    }
}

pub fn validate_search(params: &SearchParams) -> Result<(), Failure> {
    if !(params.cooling > 0.0 && params.cooling <= 1.0) {
        return Err(Failure::domain(format!("cooling must lie in (0, 1], got {}", params.cooling)));
    }
    if params.restarts == 0 {
        return Err(Failure::domain("at least one restart is required"));
    }
    Ok(())
}

#[derive(Args)]
struct ProfileArgs {
    graph: PathBuf,
    /// Largest enumeration (in permutations) attempted per k before falling
    /// back to annealing.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Restrict the profile to these support sizes.
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    /// Decide delta-asymmetry against this value ("a/b" or an integer).
    #[arg(long)]
    delta: Option<Rational>,
    #[command(flatten)]
    search: SearchArgs,
    /// Output file for the profile JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArg {
    graph: PathBuf,
}

/// An error carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub const CHECK: u8 = 1;
    pub const IO: u8 = 3;
    pub const DOMAIN: u8 = 4;

    pub fn domain(msg: impl Into<String>) -> Self {
        Failure { code: Self::DOMAIN, msg: msg.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure { code: Self::IO, msg: format!("{}: {err}", path.display()) }
    }
}

impl From<asym_core::Error> for Failure {
    fn from(err: asym_core::Error) -> Self {
        use asym_core::Error as E;
        let code = match err {
            E::Io(_) | E::Parse { .. } => Self::IO,
            _ => Self::DOMAIN,
        };
        Failure { code, msg: err.to_string() }
    }
}

pub fn load_graph(path: &Path) -> Result<Graph, Failure> {
    read_edge_list(path).map_err(|e| match e {
        asym_core::Error::Io(io) => Failure::io(path, io),
        other => Failure { code: Failure::IO, msg: format!("{}: {other}", path.display()) },
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

pub fn to_json_text(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure { code: Failure::IO, msg: format!("stdout: {e}") }),
    }
}

pub fn generate(model: Model, n: usize, p: f64, d: Option<usize>, seed: u64) -> Result<Graph, Failure> {
    Ok(match model {
        Model::Gnp => {
            if d.is_some() {
                return Err(Failure::domain("--d applies only to the gnpd model"));
            }
            gen_gnp(&GnpParams { n, p, seed })?
        }
        Model::Gnpd => {
            GnpParams { n, p, seed }.validate()?;
            let d = d.unwrap_or_else(|| default_degree(n, p));
            gen_gnpd(&GnpdParams { n, p, d, seed })?
        }
    })
}

fn rational_json(r: Rational) -> (u64, u64) {
    (*r.numer(), *r.denom())
}

fn run_gen(args: &GenArgs) -> Result<u8, Failure> {
    let g = generate(args.model, args.n, args.p, args.d, args.seed)?;
    let stats = g.degree_stats();
    let (avg_num, avg_den) = rational_json(stats.average);
    let summary = json!({
        "n": g.n(),
        "m": g.m(),
        "min_degree": stats.min,
        "avg_degree_num": avg_num,
        "avg_degree_den": avg_den,
        "max_degree": stats.max,
        "aux_edges": g.aux_edges().len(),
    });
    emit(args.out.as_deref(), &write_edge_list(&g, true))?;
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

fn run_dist(args: &DistArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.graph)?;
    let out = match (&args.other, &args.perm) {
        (Some(other), _) => {
            let h = load_graph(other)?;
            let (num, den) = rational_json(g.dist(&h)?);
            json!({ "dist_num": num, "dist_den": den })
        }
        (None, Some(text)) => {
            let pi = Permutation::parse_cycles(g.n(), text)?;
            let dist = g.dist_perm(&pi)?;
            let mut v = json!({ "dist": dist, "k": pi.k(), "perm": pi.to_string() });
            if pi.k() >= 2 && g.m() > 0 {
                let (num, den) = rational_json(asym_core::search::normalized(&g, pi.k(), dist));
                v["delta_num"] = num.into();
                v["delta_den"] = den.into();
            }
            v
        }
        (None, None) => return Err(Failure::domain("give a second graph or --perm")),
    };
    emit(None, &to_json_text(&out))?;
    Ok(0)
}

fn run_profile(args: &ProfileArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.graph)?;
    let search = args.search.params()?;
    let profile = if args.ks.is_empty() {
        exact_profile(&g, args.budget, &search)?
    } else {
        profile_over(&g, &args.ks, args.budget, &search)?
    };
    emit(args.out.as_deref(), &profile.to_json())?;
    let overall = profile.overall();
    let certified = if profile.certified() { "certified" } else { "not certified" };
    let mut line = format!("overall delta = {overall} ({certified})");
    if let Some(delta) = args.delta {
        let verdict = match is_delta_asymmetric(&g, delta, &profile)? {
            Verdict::Certified => format!("{delta}-asymmetric: certified"),
            Verdict::Refuted { k, delta: found } => format!("{delta}-asymmetric: refuted at k = {k} ({found})"),
            Verdict::NotRefuted => format!("{delta}-asymmetric: not refuted (heuristic entries)"),
        };
        line = format!("{line}; {verdict}");
    }
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(0)
}

#[derive(Serialize)]
struct Delta2Doc {
    n: usize,
    m: usize,
    delta_num: u64,
    delta_den: u64,
    dist: u64,
    witness_cycles: String,
    pairs: u64,
    mean_dist: f64,
    mean_normalized: f64,
}

fn run_delta2(args: &GraphArg) -> Result<u8, Failure> {
    let g = load_graph(&args.graph)?;
    let scan = delta2_scan(&g)?;
    let (delta_num, delta_den) = rational_json(scan.entry.delta);
    let doc = Delta2Doc {
        n: g.n(),
        m: g.m(),
        delta_num,
        delta_den,
        dist: scan.entry.dist,
        witness_cycles: scan.entry.witness.to_string(),
        pairs: scan.pairs,
        mean_dist: scan.mean_dist,
        mean_normalized: scan.mean_normalized,
    };
    emit(None, &to_json_text(&doc))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Dist(args) => run_dist(args),
        Command::Profile(args) => run_profile(args),
        Command::Delta2(args) => run_delta2(args),
        Command::Verify(args) => verify::run(args),
        Command::Campaign(args) => campaign::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.msg);
            ExitCode::from(failure.code)
        }
    }
}
