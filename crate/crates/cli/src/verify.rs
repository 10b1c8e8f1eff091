use std::path::PathBuf;

use asym_core::checks::{
    check_avg_degree, check_common_neighbors, check_small_k_bound, check_small_set_density, lemma1_sweep,
    mc_covered_edges, mc_edge_probability, mc_lemma1_expectation, CheckReport, CheckVerdict, DistanceSpec,
    DEFAULT_NODE_BUDGET,
};
use asym_core::generators::{default_degree, GnpdParams};
use asym_core::perm::Permutation;
use asym_core::Graph;
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::{emit, load_graph, to_json_text, Failure, SearchArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    AvgDegree,
    CommonNeighbors,
    Density,
    SmallK,
    CoveredEdges,
    EdgeProbability,
    Lemma1,
    Lemma1Sweep,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Graph file, required by the graph checks.
    pub graph: Option<PathBuf>,
    #[arg(long = "check", value_enum, required = true)]
    pub checks: Vec<CheckKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 5.0)]
    pub slack: f64,
    /// Largest set size for the density check; defaults to n / d^2 when d is
    /// known, else min(n, 12).
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Conditioning edges, e.g. "0-1,2-3".
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub condition: Vec<(u32, u32)>,
    #[arg(long, value_parser = parse_pair)]
    pub edge: Option<(u32, u32)>,
    #[arg(long, default_value_t = 1000)]
    pub min_conditional: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_trials: u64,
    #[arg(long)]
    pub m_s: Option<usize>,
    /// Permutation in cycle notation for the lemma1 check.
    #[arg(long)]
    pub perm: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub max_p: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once('-').ok_or_else(|| format!("expected u-v, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Serialize)]
struct Summary {
    checks: usize,
    passed: usize,
    failed: usize,
    inconclusive: usize,
    skipped: usize,
    ok: bool,
}

#[derive(Serialize)]
struct Bundle {
    summary: Summary,
    reports: Vec<CheckReport>,
    warnings: Vec<String>,
}

fn need<T: Copy>(value: Option<T>, flag: &str, check: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::domain(format!("the {check} check needs --{flag}")))
}

struct Context<'a> {
    args: &'a VerifyArgs,
    graph: Option<Graph>,
}

impl Context<'_> {
    fn graph(&self, check: &str) -> Result<&Graph, Failure> {
        self.graph.as_ref().ok_or_else(|| Failure::domain(format!("the {check} check needs a graph file")))
    }

    fn degree(&self, n: usize) -> Option<usize> {
        self.args.d.or_else(|| self.args.p.map(|p| default_degree(n, p)))
    }

    fn run(&self, kind: CheckKind) -> Result<CheckReport, Failure> {
        let a = self.args;
        Ok(match kind {
            CheckKind::AvgDegree => {
                let g = self.graph("avg-degree")?;
                let p = need(a.p, "p", "avg-degree")?;
                check_avg_degree(g, p, self.degree(g.n()).unwrap_or(0), a.slack)
            }
            CheckKind::CommonNeighbors => check_common_neighbors(self.graph("common-neighbors")?),
            CheckKind::Density => {
                let g = self.graph("density")?;
                let limit = a.limit.unwrap_or_else(|| match self.degree(g.n()) {
                    Some(d) if d > 0 => g.n() / (d * d),
                    _ => g.n().min(12),
                });
                check_small_set_density(g, limit, a.node_budget)?
            }
            CheckKind::SmallK => {
                let g = self.graph("small-k")?;
                let d = need(self.degree(g.n()), "d", "small-k")?;
                let k = a.k.unwrap_or(10.min(g.n()));
                check_small_k_bound(g, d, k, a.samples, a.seed, &a.search.params()?)?
            }
            CheckKind::CoveredEdges => {
                let n = need(a.n, "n", "covered-edges")?;
                let p = need(a.p, "p", "covered-edges")?;
                let k = need(a.k, "k", "covered-edges")?;
                mc_covered_edges(n, p, k, a.trials, a.seed)?
            }
            CheckKind::EdgeProbability => {
                let n = need(a.n, "n", "edge-probability")?;
                let p = need(a.p, "p", "edge-probability")?;
                let d = a.d.unwrap_or_else(|| default_degree(n, p));
                let edge = need(a.edge, "edge", "edge-probability")?;
                let model = GnpdParams { n, p, d, seed: 0 };
                mc_edge_probability(&model, &a.condition, edge, a.min_conditional, a.max_trials, a.seed)?
            }
            CheckKind::Lemma1 => {
                let n = need(a.n, "n", "lemma1")?;
                let text = a.perm.as_deref().ok_or_else(|| Failure::domain("the lemma1 check needs --perm"))?;
                let pi = Permutation::parse_cycles(n, text)?;
                let spec = DistanceSpec { n, subset: pi.support(), m_s: need(a.m_s, "m-s", "lemma1")?, trials: a.trials };
                mc_lemma1_expectation(&spec, &pi, a.seed)?
            }
            CheckKind::Lemma1Sweep => lemma1_sweep(a.max_p)?,
        })
    }
}

pub fn run(args: &VerifyArgs) -> Result<u8, Failure> {
    let graph = args.graph.as_deref().map(load_graph).transpose()?;
    let ctx = Context { args, graph };
    let mut reports = Vec::new();
    for &kind in &args.checks {
        let report = ctx.run(kind)?;
        eprintln!("{}: {}", report.check, report.verdict.as_str());
        reports.push(report);
    }
    let count = |v: CheckVerdict| reports.iter().filter(|r| r.verdict == v).count();
    let failed = reports.iter().filter(|r| r.verdict.failed()).count();
    let warnings = reports
        .iter()
        .filter(|r| r.verdict == CheckVerdict::Inconclusive)
        .map(|r| format!("{} is inconclusive", r.check))
        .collect();
    let summary = Summary {
        checks: reports.len(),
        passed: count(CheckVerdict::Pass) + count(CheckVerdict::StatisticalPass),
        failed,
        inconclusive: count(CheckVerdict::Inconclusive),
        skipped: count(CheckVerdict::Skipped),
        ok: failed == 0,
    };
    let bundle = Bundle { summary, reports, warnings };
    emit(args.out.as_deref(), &to_json_text(&bundle))?;
    Ok(if failed == 0 { 0 } else { Failure::CHECK })
}
