use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use asym_core::checks::{
    check_avg_degree, check_common_neighbors, check_small_k_bound, check_small_set_density,
    DEFAULT_NODE_BUDGET,
};
use asym_core::generators::default_degree;
use asym_core::graph::write_edge_list;
use asym_core::rng::derive_seed;
use asym_core::search::{delta2_scan, exact_profile, profile_over, SearchParams, DEFAULT_BUDGET};
use asym_core::{Graph, Rational};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::FlatConfig;
use crate::{generate, to_json_text, validate_search, write_file, Failure, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Profile,
    Delta2,
    Verify,
    SmallKBound,
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Task as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
pub struct CampaignArgs {
    /// Flat key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Explicit seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Number of seeds derived from the master seed.
    #[arg(long)]
    seed_count: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    tasks: Vec<Task>,
    #[arg(long)]
    budget: Option<u64>,
    /// Support sizes for the profile task (all of 2..=n when omitted).
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    restarts: Option<u32>,
    #[arg(long)]
    steps: Option<u32>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long)]
    search_seed: Option<u64>,
    /// Support size for the small-k-bound task.
    #[arg(long)]
    small_k: Option<usize>,
    /// Sampled permutations for the small-k-bound task.
    #[arg(long)]
    samples: Option<u64>,
    /// Density check size limit; defaults to n / d^2.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seeds processed concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip writing per-seed graph files.
    #[arg(long)]
    no_graph_files: bool,
}

const KEYS: &[&str] = &[
    "model", "n", "p", "d", "seeds", "seed-count", "master-seed", "tasks", "budget", "ks", "restarts", "steps",
    "cooling", "search-seed", "small-k", "samples", "limit", "slack", "node-budget", "out", "jobs",
    "graph-files",
];

/// Everything that determines the results; hashed to label the campaign.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignConfig {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub d: Option<usize>,
    pub seeds: Vec<u64>,
    pub master_seed: Option<u64>,
    pub tasks: Vec<Task>,
    pub budget: u64,
    pub ks: Vec<usize>,
    pub search: SearchParams,
    pub small_k: usize,
    pub samples: u64,
    pub limit: Option<usize>,
    pub slack: f64,
    pub node_budget: u64,
}

impl CampaignConfig {
    fn resolve(args: &CampaignArgs) -> Result<(Self, Output), Failure> {
        let file = match &args.config {
            Some(path) => FlatConfig::load(path)?,
            None => FlatConfig::default(),
        };
        if let Some(key) = file.unknown_keys(KEYS).next() {
            return Err(Failure::domain(format!("unknown config key {key}")));
        }
        let model = file.pick(args.model, "model")?.unwrap_or(Model::Gnp);
        let n = file.pick(args.n, "n")?.ok_or_else(|| Failure::domain("campaign needs n"))?;
        let p = file.pick(args.p, "p")?.ok_or_else(|| Failure::domain("campaign needs p"))?;
        let mut d = file.pick(args.d, "d")?;
        if model == Model::Gnpd && d.is_none() {
            d = Some(default_degree(n, p));
        }
        if model == Model::Gnp && d.is_some() {
            return Err(Failure::domain("d applies only to the gnpd model"));
        }

        let listed: Vec<u64> = file.pick_list(&args.seeds, "seeds")?;
        let count = file.pick(args.seed_count, "seed-count")?;
        let master = file.pick(args.master_seed, "master-seed")?;
        let (seeds, master_seed) = match (listed.is_empty(), count) {
            (false, None) => (listed, None),
            (true, Some(count)) => {
                let master = master.unwrap_or(0);
                ((0..count).map(|i| derive_seed(master, "campaign", i)).collect(), Some(master))
            }
            (false, Some(_)) => return Err(Failure::domain("give either seeds or seed-count, not both")),
            (true, None) => return Err(Failure::domain("campaign needs seeds or seed-count")),
        };
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(Failure::domain("duplicate seeds"));
        }

        let mut tasks = file.pick_list(&args.tasks, "tasks")?;
        if tasks.is_empty() {
            return Err(Failure::domain("campaign needs at least one task"));
        }
        tasks.sort_unstable();
        tasks.dedup();

        let base = SearchParams::default();
        let search = SearchParams {
            restarts: file.pick(args.restarts, "restarts")?.unwrap_or(base.restarts),
            steps: file.pick(args.steps, "steps")?.unwrap_or(base.steps),
            cooling: file.pick(args.cooling, "cooling")?.unwrap_or(base.cooling),
            seed: file.pick(args.search_seed, "search-seed")?.unwrap_or(base.seed),
            ..base
        };
        validate_search(&search)?;

        let config = CampaignConfig {
            model,
            n,
            p,
            d,
            seeds,
            master_seed,
            tasks,
            budget: file.pick(args.budget, "budget")?.unwrap_or(DEFAULT_BUDGET),
            ks: file.pick_list(&args.ks, "ks")?,
            search,
            small_k: file.pick(args.small_k, "small-k")?.unwrap_or(10).min(n),
            samples: file.pick(args.samples, "samples")?.unwrap_or(10_000),
            limit: file.pick(args.limit, "limit")?,
            slack: file.pick(args.slack, "slack")?.unwrap_or(5.0),
            node_budget: file.pick(args.node_budget, "node-budget")?.unwrap_or(DEFAULT_NODE_BUDGET),
        };
        let out = file.pick(args.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from("campaign-out"));
        let jobs = file.pick(args.jobs, "jobs")?.unwrap_or(1).max(1);
        let graph_files = !args.no_graph_files && file.pick(None, "graph-files")?.unwrap_or(true);
        Ok((config, Output { dir: out, jobs, graph_files }))
    }

    fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("serializable");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Degree parameter used by the checks: `d` for gnpd, `ceil(p (n - 1))`
    /// for gnp.
    fn check_degree(&self) -> usize {
        self.d.unwrap_or_else(|| default_degree(self.n, self.p))
    }

    fn density_limit(&self) -> usize {
        let d = self.check_degree();
        self.limit.unwrap_or(if d > 0 { self.n / (d * d) } else { self.n.min(12) }).min(self.n)
    }
}

/// Where and how results are written; does not affect their values.
struct Output {
    dir: PathBuf,
    jobs: usize,
    graph_files: bool,
}

/// One CSV row. Columns after `error` are wall-clock times and fall outside
/// the determinism contract.
#[derive(Debug, Default, Serialize)]
struct Row {
    seed: u64,
    model: String,
    n: usize,
    p: f64,
    d: Option<usize>,
    m: Option<usize>,
    min_degree: Option<usize>,
    max_degree: Option<usize>,
    delta2_num: Option<u64>,
    delta2_den: Option<u64>,
    delta2_mean_normalized: Option<f64>,
    overall_delta_num: Option<u64>,
    overall_delta_den: Option<u64>,
    certified: Option<bool>,
    avg_degree: Option<&'static str>,
    common_neighbors: Option<&'static str>,
    small_set_density: Option<&'static str>,
    small_k_bound: Option<&'static str>,
    small_k_min_dist: Option<u64>,
    error: String,
    rt_generate_ms: Option<f64>,
    rt_profile_ms: Option<f64>,
    rt_delta2_ms: Option<f64>,
    rt_verify_ms: Option<f64>,
    rt_small_k_ms: Option<f64>,
}

fn elapsed_ms(start: Instant) -> Option<f64> {
    Some((start.elapsed().as_secs_f64() * 1e6).round() / 1e3)
}

fn seed_file(out: &Path, dir: &str, seed: u64, ext: &str) -> PathBuf {
    out.join(dir).join(format!("seed-{seed}.{ext}"))
}

fn run_seed(cfg: &CampaignConfig, out: &Output, seed: u64) -> Row {
    let mut row = Row { seed, model: cfg.model.to_string(), n: cfg.n, p: cfg.p, d: cfg.d, ..Default::default() };
    if let Err(e) = fill_row(cfg, out, seed, &mut row) {
        row.error = e.msg;
    }
    row
}

fn fill_row(cfg: &CampaignConfig, out: &Output, seed: u64, row: &mut Row) -> Result<(), Failure> {
    let start = Instant::now();
    let g: Graph = generate(cfg.model, cfg.n, cfg.p, cfg.d, seed)?;
    if out.graph_files {
        write_file(&seed_file(&out.dir, "graphs", seed, "txt"), &write_edge_list(&g, true))?;
    }
    row.rt_generate_ms = elapsed_ms(start);
    let stats = g.degree_stats();
    row.m = Some(g.m());
    row.min_degree = Some(stats.min);
    row.max_degree = Some(stats.max);

    for task in &cfg.tasks {
        let start = Instant::now();
        match task {
            Task::Profile => {
                let profile = if cfg.ks.is_empty() {
                    exact_profile(&g, cfg.budget, &cfg.search)?
                } else {
                    profile_over(&g, &cfg.ks, cfg.budget, &cfg.search)?
                };
                write_file(&seed_file(&out.dir, "profiles", seed, "json"), &profile.to_json())?;
                let overall = profile.overall();
                row.overall_delta_num = Some(*overall.numer());
                row.overall_delta_den = Some(*overall.denom());
                row.certified = Some(profile.certified());
                row.rt_profile_ms = elapsed_ms(start);
            }
            Task::Delta2 => {
                let scan = delta2_scan(&g)?;
                row.delta2_num = Some(*scan.entry.delta.numer());
                row.delta2_den = Some(*scan.entry.delta.denom());
                row.delta2_mean_normalized = Some(scan.mean_normalized);
                row.rt_delta2_ms = elapsed_ms(start);
            }
            Task::Verify => {
                let d = cfg.check_degree();
                row.avg_degree = Some(check_avg_degree(&g, cfg.p, d, cfg.slack).verdict.as_str());
                row.common_neighbors = Some(check_common_neighbors(&g).verdict.as_str());
                let density = check_small_set_density(&g, cfg.density_limit(), cfg.node_budget)?;
                row.small_set_density = Some(density.verdict.as_str());
                row.rt_verify_ms = elapsed_ms(start);
            }
            Task::SmallKBound => {
                let k = cfg.small_k;
                let report = check_small_k_bound(&g, cfg.check_degree(), k, cfg.samples, seed, &cfg.search)?;
                row.small_k_bound = Some(report.verdict.as_str());
                row.small_k_min_dist = report.stats.get("search_min_dist").and_then(|v| v.as_u64()).map(|s| {
                    let sampled = report.stats["sampled_min_dist"].as_u64().unwrap_or(u64::MAX);
                    s.min(sampled)
                });
                row.rt_small_k_ms = elapsed_ms(start);
            }
        }
    }
    Ok(())
}

fn rational_summary(mut values: Vec<Rational>) -> serde_json::Value {
    if values.is_empty() {
        return serde_json::Value::Null;
    }
    values.sort_unstable();
    let (min, median) = (values[0], values[(values.len() - 1) / 2]);
    json!({
        "count": values.len(),
        "min_num": *min.numer(),
        "min_den": *min.denom(),
        "median_num": *median.numer(),
        "median_den": *median.denom(),
    })
}

fn verdict_summary(rows: &[Row], pick: impl Fn(&Row) -> Option<&'static str>) -> serde_json::Value {
    let verdicts: Vec<&str> = rows.iter().filter_map(&pick).collect();
    if verdicts.is_empty() {
        return serde_json::Value::Null;
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in &verdicts {
        *counts.entry(v).or_default() += 1;
    }
    let ok = verdicts.iter().filter(|v| matches!(**v, "pass" | "statistical-pass" | "skipped")).count();
    json!({
        "evaluated": verdicts.len(),
        "ok": ok,
        "pass_rate": ok as f64 / verdicts.len() as f64,
        "verdicts": counts,
    })
}

fn summarize(cfg: &CampaignConfig, rows: &[Row]) -> serde_json::Value {
    let pair = |num: Option<u64>, den: Option<u64>| num.zip(den).map(|(a, b)| Rational::new(a, b));
    json!({
        "config_hash": cfg.hash(),
        "config": cfg,
        "rows": rows.len(),
        "errors": rows.iter().filter(|r| !r.error.is_empty()).count(),
        "certified": rows.iter().filter(|r| r.certified == Some(true)).count(),
        "delta2": rational_summary(rows.iter().filter_map(|r| pair(r.delta2_num, r.delta2_den)).collect()),
        "overall_delta": rational_summary(
            rows.iter().filter_map(|r| pair(r.overall_delta_num, r.overall_delta_den)).collect()
        ),
        "checks": {
            "avg_degree": verdict_summary(rows, |r| r.avg_degree),
            "common_neighbors": verdict_summary(rows, |r| r.common_neighbors),
            "small_set_density": verdict_summary(rows, |r| r.small_set_density),
            "small_k_bound": verdict_summary(rows, |r| r.small_k_bound),
        },
    })
}

pub fn run(args: &CampaignArgs) -> Result<u8, Failure> {
    let (cfg, output) = CampaignConfig::resolve(args)?;
    let out = output.dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Failure::io(&out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(output.jobs)
        .build()
        .map_err(|e| Failure { code: Failure::CHECK, msg: format!("thread pool: {e}") })?;
    let total = cfg.seeds.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let mut rows: Vec<Row> = pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let row = run_seed(&cfg, &output, seed);
                let i = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                let status = if row.error.is_empty() { "ok" } else { "error" };
                eprintln!("[{i}/{total}] seed {seed}: {status}");
                row
            })
            .collect()
    });
    rows.sort_by_key(|r| r.seed);

    let csv_path = out.join("results.csv");
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&csv_path)
        .map_err(|e| Failure { code: Failure::IO, msg: format!("{}: {e}", csv_path.display()) })?;
    for row in &rows {
        writer.serialize(row).map_err(|e| Failure { code: Failure::IO, msg: e.to_string() })?;
    }
    writer.flush().map_err(|e| Failure::io(&csv_path, e))?;

    let summary = summarize(&cfg, &rows);
    write_file(&out.join("summary.json"), &to_json_text(&summary))?;
    println!("{}", serde_json::to_string(&json!({
        "rows": rows.len(),
        "errors": summary["errors"],
        "results": csv_path.display().to_string(),
        "summary": out.join("summary.json").display().to_string(),
    })).expect("serializable"));
    Ok(0)
}
