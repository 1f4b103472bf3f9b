//! Commands behind the `xagtrace` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;

use xagtrace::bench::{bundled, run_pipeline};
use xagtrace::cost::{he_cost, BenchReport};
use xagtrace::egraph::{replay_trace, write_trace, EGraph};
use xagtrace::extract::{he_cost_sweep, ExtractGraph, IlpInstance, SweepConfig, SweepResult};
use xagtrace::gen::{random_network, RandomSpec};
use xagtrace::mcdb::{McDatabase, DATABASE_ARITY};
use xagtrace::netlist::{parse_blif_subset, parse_xag_text, write_xag_text};
use xagtrace::passes::{cut_rewrite, run_flow, FlowOrder, PassConfig};
use xagtrace::sim::equivalent;
use xagtrace::{NetworkStats, XagNetwork};

pub const DB_ENV: &str = "XAG_DB_PATH";

pub const OPTIMIZED_FILE: &str = "optimized.xag";
pub const TRACE_FILE: &str = "trace.txt";
pub const STATS_FILE: &str = "stats.txt";
pub const EXTRACTED_FILE: &str = "extracted.xag";
pub const EXTRACT_LOG_FILE: &str = "extract_log.txt";
pub const REPORT_TEXT_FILE: &str = "report.txt";
pub const REPORT_CSV_FILE: &str = "report.csv";

/// Reads a network, choosing the parser by extension (`.blif` or XAG text).
pub fn read_network(path: &Path) -> Result<XagNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let net = if path.extension().is_some_and(|e| e == "blif") {
        parse_blif_subset(&text)
    } else {
        parse_xag_text(&text)
    };
    net.with_context(|| path.display().to_string())
}

pub fn stats_line(st: &NetworkStats) -> String {
    format!("md={} mc={} he_cost={}", st.md, st.mc, he_cost(st.md, st.mc))
}

/// The database named by `path`, else by `XAG_DB_PATH`, else the one built
/// in-process.
pub fn load_database(path: Option<&Path>) -> Result<&'static McDatabase> {
    let from_env = std::env::var_os(DB_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(from_env) {
        Some(p) => {
            let db = McDatabase::load(&p).with_context(|| format!("loading database {}", p.display()))?;
            Ok(Box::leak(Box::new(db)))
        }
        None => Ok(McDatabase::shared()),
    }
}

pub fn cmd_gen_db(n: usize, out: &Path) -> Result<McDatabase> {
    let db = McDatabase::build(n)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    db.save(out).with_context(|| format!("writing {}", out.display()))?;
    Ok(db)
}

/// Fails unless `b` computes the same outputs as `a`.
fn self_check(a: &XagNetwork, b: &XagNetwork, what: &str) -> Result<()> {
    let eq = equivalent(a, b)?;
    ensure!(eq.equal, "{what} is not equivalent to the input");
    Ok(())
}

#[derive(Clone, Debug)]
pub struct OptReport {
    pub before: NetworkStats,
    pub after: NetworkStats,
    /// MC after a single rewriting pass on the input.
    pub first_rewrite_mc: u32,
    pub classes: usize,
    pub nodes: usize,
}

/// Runs one traced flow and writes the result, the trace and a stats line.
pub fn cmd_opt(input: &Path, order: FlowOrder, out: &Path, db: &McDatabase, cfg: &PassConfig) -> Result<OptReport> {
    let net = read_network(input)?;
    let first = cut_rewrite(&net, db, None, cfg)?;
    let (mut eg, _) = EGraph::from_network(&net);
    let flow = run_flow(&net, order, db, Some(&mut eg), cfg)?;
    self_check(&net, &flow.network, "flow output")?;
    eg.check_soundness()?;
    let after = flow.network.compute_stats();
    fs::create_dir_all(out)?;
    fs::write(out.join(OPTIMIZED_FILE), write_xag_text(&flow.network))?;
    fs::write(out.join(TRACE_FILE), write_trace(eg.events()))?;
    fs::write(out.join(STATS_FILE), stats_line(&after) + "\n")?;
    Ok(OptReport {
        before: net.compute_stats(),
        after,
        first_rewrite_mc: first.network.compute_stats().mc,
        classes: eg.num_classes(),
        nodes: eg.num_nodes(),
    })
}

#[derive(Clone, Debug, Default)]
pub struct ExtractOptions {
    pub k: u32,
    pub timeout: Option<Duration>,
    /// Networks known to be in the trace (for example the flow output).
    pub witnesses: Vec<PathBuf>,
    /// Source circuit to verify the result against.
    pub reference: Option<PathBuf>,
    /// Also write the program of every swept bound in LP format.
    pub export_lp: bool,
}

fn attempt_log(r: &SweepResult) -> String {
    let mut log = format!(
        "greedy md={} mc={} he_cost={}\n",
        r.greedy.md, r.greedy.mc, r.greedy.he_cost
    );
    for a in &r.attempts {
        let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        log += &format!(
            "bound={} status={} md={} mc={} he_cost={} bound_cost={} nodes={} time={:.3}s\n",
            a.bound,
            a.status.as_str(),
            show(a.md.map(u64::from)),
            show(a.mc.map(u64::from)),
            show(a.he_cost),
            show(a.bound_cost),
            a.nodes,
            a.elapsed.as_secs_f64()
        );
    }
    log += &format!(
        "best {} md={} mc={} he_cost={}\n",
        r.best.method, r.best.md, r.best.mc, r.best.he_cost
    );
    log
}

/// Replays a trace, runs the HE-cost sweep and writes the chosen network.
pub fn cmd_extract(trace: &Path, opts: &ExtractOptions, out: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(trace).with_context(|| format!("reading {}", trace.display()))?;
    let eg = replay_trace(&text).with_context(|| trace.display().to_string())?;
    let g = ExtractGraph::new(&eg);
    let mut cfg = SweepConfig {
        k: opts.k,
        timeout: opts.timeout,
        witnesses: Vec::new(),
    };
    for w in &opts.witnesses {
        let net = read_network(w)?;
        let choice = g
            .witness(&eg, &net)
            .with_context(|| format!("{} is not contained in the trace", w.display()))?;
        cfg.witnesses.push(choice);
    }
    let r = he_cost_sweep(&g, &cfg)?;
    match &opts.reference {
        Some(p) => self_check(&read_network(p)?, &r.best.network, "extracted network")?,
        None => self_check(&r.greedy.network, &r.best.network, "extracted network")?,
    }
    fs::create_dir_all(out)?;
    fs::write(out.join(EXTRACTED_FILE), write_xag_text(&r.best.network))?;
    fs::write(out.join(EXTRACT_LOG_FILE), attempt_log(&r))?;
    fs::write(out.join(STATS_FILE), stats_line(&r.best.network.compute_stats()) + "\n")?;
    if opts.export_lp {
        for a in &r.attempts {
            fs::write(
                out.join(format!("ilp_md{}.lp", a.bound)),
                IlpInstance::new(&g, a.bound).export_lp(),
            )?;
        }
    }
    Ok(r)
}

/// Benchmark manifest. Relative circuit paths resolve against the manifest.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default)]
    pub circuits: Vec<PathBuf>,
    /// Include the bundled circuits.
    #[serde(default)]
    pub builtin: bool,
    /// Number of generated random circuits.
    #[serde(default)]
    pub random: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k_sweep: u32,
    /// Seconds per bound.
    #[serde(default = "default_timeout")]
    pub ilp_timeout: f64,
    #[serde(default = "default_balance")]
    pub cut_size_balance: usize,
    #[serde(default = "default_cuts")]
    pub cuts_per_node: usize,
    #[serde(default = "default_rewrite")]
    pub cut_size_rewrite: usize,
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub base: PathBuf,
}

fn default_seed() -> u64 {
    1
}
fn default_k() -> u32 {
    2
}
fn default_timeout() -> f64 {
    600.0
}
fn default_balance() -> usize {
    6
}
fn default_cuts() -> usize {
    12
}
fn default_rewrite() -> usize {
    DATABASE_ARITY
}

impl Default for RunManifest {
    fn default() -> Self {
        RunManifest {
            circuits: Vec::new(),
            builtin: false,
            random: 0,
            seed: default_seed(),
            k_sweep: default_k(),
            ilp_timeout: default_timeout(),
            cut_size_balance: default_balance(),
            cuts_per_node: default_cuts(),
            cut_size_rewrite: default_rewrite(),
            out: None,
            base: PathBuf::new(),
        }
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut m: RunManifest = toml::from_str(&text).with_context(|| path.display().to_string())?;
        m.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn pass_config(&self) -> PassConfig {
        PassConfig {
            k_rewrite: self.cut_size_rewrite,
            k_balance: self.cut_size_balance,
            priority_limit: self.cuts_per_node,
            ..PassConfig::default()
        }
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            k: self.k_sweep,
            timeout: Some(timeout_from_secs(self.ilp_timeout)?),
            witnesses: Vec::new(),
        })
    }

    pub fn circuits(&self) -> Result<Vec<(String, XagNetwork)>> {
        let mut out = Vec::new();
        if self.builtin {
            out.extend(bundled().into_iter().map(|(n, net)| (n.to_string(), net)));
        }
        for p in &self.circuits {
            let path = self.base.join(p);
            let name = path
                .file_stem()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            out.push((name, read_network(&path)?));
        }
        for i in 0..self.random {
            let seed = self.seed.wrapping_add(i);
            let spec = RandomSpec {
                inputs: 4 + (seed % 9) as usize,
                gates: 30 + (seed * 7 % 71) as usize,
                ..RandomSpec::default()
            };
            out.push((format!("random{i}"), random_network(&spec, seed)));
        }
        Ok(out)
    }
}

pub fn timeout_from_secs(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| anyhow::anyhow!("invalid timeout {secs}"))
}

/// Runs the baselines and the cut-tracing pipeline on every circuit and
/// writes the report. Fails if tracing loses to a baseline.
pub fn cmd_bench(manifest: &RunManifest, db: &McDatabase, out: &Path) -> Result<BenchReport> {
    let circuits = manifest.circuits()?;
    ensure!(!circuits.is_empty(), "manifest lists no circuits");
    let cfg = manifest.pass_config();
    let sweep = manifest.sweep_config()?;
    let mut rows = Vec::new();
    for (name, net) in &circuits {
        let r = run_pipeline(net, db, &cfg, &sweep).with_context(|| name.clone())?;
        self_check(net, &r.sweep.best.network, &format!("{name}: extracted network"))?;
        for (order, flow) in &r.baselines {
            self_check(net, flow, &format!("{name}: {} flow output", order.as_str()))?;
        }
        let circuit_rows = r.rows(name);
        let traced = circuit_rows.last().expect("traced row").he_cost;
        if let Some(base) = circuit_rows[..circuit_rows.len() - 1]
            .iter()
            .find(|b| b.he_cost < traced)
        {
            bail!(
                "{name}: cut tracing cost {traced} exceeds {} cost {}",
                base.variant,
                base.he_cost
            );
        }
        rows.extend(circuit_rows);
    }
    let report = BenchReport::new(rows);
    fs::create_dir_all(out)?;
    fs::write(out.join(REPORT_TEXT_FILE), report.to_text())?;
    fs::write(out.join(REPORT_CSV_FILE), report.to_csv())?;
    Ok(report)
}

pub fn cmd_verify(a: &Path, b: &Path) -> Result<bool> {
    Ok(equivalent(&read_network(a)?, &read_network(b)?)?.equal)
}

pub fn cmd_stats(path: &Path) -> Result<String> {
    let net = read_network(path)?;
    let st = net.compute_stats();
    Ok(format!(
        "inputs={} outputs={} gates={} {}",
        net.inputs().len(),
        net.outputs().len(),
        net.cleanup().num_gates(),
        stats_line(&st)
    ))
}
