//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any attainable criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{brute_force, corpus, small_traces};
use xagtrace::bench::{bundled, comparator, full_adder, run_pipeline};
use xagtrace::cost::{he_cost, CUT_TRACING};
use xagtrace::egraph::{write_trace, EGraph, ELit};
use xagtrace::extract::{depth_bounded_ilp, greedy_md_dag, he_cost_sweep, ExtractGraph, SolverStatus, SweepConfig};
use xagtrace::mcdb::{exact_mc_synthesize, McDatabase};
use xagtrace::netlist::write_xag_text;
use xagtrace::passes::{cut_rewrite, esop_balance, resubstitute, run_flow, FlowOrder, PassConfig};
use xagtrace::sim::{equivalent, simulate};
use xagtrace::xag::GateBuilder;
use xagtrace::XagNetwork;
use xagtrace_cli::{cmd_bench, cmd_extract, cmd_gen_db, cmd_opt, ExtractOptions, RunManifest};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn same(a: &XagNetwork, b: &XagNetwork) -> bool {
    equivalent(a, b).is_ok_and(|e| e.equal && e.exhaustive)
}

fn criterion_1(dir: &Path) -> Outcome {
    let start = Instant::now();
    let input = dir.join("fa.xag");
    fs::write(&input, write_xag_text(&full_adder())).map_err(|e| e.to_string())?;
    let db = McDatabase::build(4).map_err(|e| e.to_string())?;
    let out = dir.join("fa_opt");
    let r = cmd_opt(&input, FlowOrder::McFirst, &out, &db, &PassConfig::default()).map_err(|e| e.to_string())?;
    check(r.before.mc == 2, format!("input mc {}", r.before.mc))?;
    check(
        r.first_rewrite_mc == 1,
        format!("one rewrite pass gives mc {}", r.first_rewrite_mc),
    )?;
    let opts = ExtractOptions {
        k: 2,
        timeout: Some(Duration::from_secs(1)),
        reference: Some(input),
        ..ExtractOptions::default()
    };
    let x = cmd_extract(&out.join("trace.txt"), &opts, &dir.join("fa_ext")).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(x.best.md == 1, format!("extracted md {}", x.best.md))?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "mc 2 -> {}, extracted md={} mc={} in {elapsed:.2?}",
        r.first_rewrite_mc, x.best.md, x.best.mc
    ))
}

fn swap_vars(tt: u16, i: usize) -> u16 {
    let mut out = 0u16;
    for m in 0..16usize {
        let (bi, bj) = ((m >> i) & 1, (m >> (i + 1)) & 1);
        let src = (m & !(1 << i) & !(1 << (i + 1))) | (bj << i) | (bi << (i + 1));
        out |= ((tt >> src) & 1) << m;
    }
    out
}

fn negate_var(tt: u16, i: usize) -> u16 {
    (0..16usize).fold(0, |acc, m| acc | (((tt >> (m ^ (1 << i))) & 1) << m))
}

/// NPN classes of 4-input functions as connected components under the
/// generators: adjacent swaps, negating x0, negating the output.
fn npn_components() -> Vec<u32> {
    let mut parent: Vec<u32> = (0..65536).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for tt in 0..=u16::MAX {
        let mut next = vec![!tt, negate_var(tt, 0)];
        next.extend((0..3).map(|i| swap_vars(tt, i)));
        for n in next {
            let (a, b) = (find(&mut parent, tt as u32), find(&mut parent, n as u32));
            parent[a as usize] = b;
        }
    }
    (0..65536).map(|x| find(&mut parent, x)).collect()
}

fn algebraic_degree(tt: u16) -> u32 {
    let mut anf = tt;
    for i in 0..4 {
        for m in 0..16 {
            if (m >> i) & 1 == 1 {
                anf ^= ((anf >> (m ^ (1 << i))) & 1) << m;
            }
        }
    }
    (0..16u32)
        .filter(|&m| (anf >> m) & 1 == 1)
        .map(|m| m.count_ones())
        .max()
        .unwrap_or(0)
}

fn criterion_2(dir: &Path) -> Outcome {
    let start = Instant::now();
    let path = dir.join("db.txt");
    let db = cmd_gen_db(4, &path).map_err(|e| e.to_string())?;
    let loaded = McDatabase::load(&path).map_err(|e| e.to_string())?;
    check(loaded == db, "reloaded database differs")?;
    let comp = npn_components();
    let classes: HashSet<u32> = comp.iter().copied().collect();
    check(classes.len() == 222, format!("oracle found {} classes", classes.len()))?;
    check(db.len() == 222, format!("{} entries", db.len()))?;
    let covered: HashSet<u32> = db.entries().map(|(k, _)| comp[k as usize]).collect();
    check(covered.len() == 222, "two entries share an NPN class")?;
    for (key, frag) in db.entries() {
        check(
            frag.simulate() == key,
            format!("entry {key:#06x} simulates to {:#06x}", frag.simulate()),
        )?;
        let c = frag.and_count();
        check(
            c as u32 + 1 >= algebraic_degree(key),
            format!("entry {key:#06x} below degree bound"),
        )?;
        if c > 0 {
            let fewer = exact_mc_synthesize(key, 4, c - 1).map_err(|e| e.to_string())?;
            check(fewer.is_none(), format!("entry {key:#06x} has a smaller realization"))?;
        }
    }
    check(db.max_and_count() <= 3, format!("max and count {}", db.max_and_count()))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(600), format!("took {elapsed:?}"))?;
    Ok(format!(
        "222 entries, every entry minimal, max and count {} in {elapsed:.2?}",
        db.max_and_count()
    ))
}

type PassFn = fn(&XagNetwork, &PassConfig) -> xagtrace::Result<XagNetwork>;

struct SuiteReport {
    sound: Outcome,
    monotone: Outcome,
    sweep: Outcome,
}

/// Criteria 3, 4 and 6 share the bundled suite plus 200 random networks.
fn suite() -> SuiteReport {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    let mut nets: Vec<(String, XagNetwork)> = bundled().into_iter().map(|(n, net)| (n.to_string(), net)).collect();
    nets.extend(
        corpus(200, 5000)
            .into_iter()
            .enumerate()
            .map(|(i, n)| (format!("random{i}"), n)),
    );
    let sweep_cfg = SweepConfig {
        timeout: Some(Duration::from_millis(250)),
        ..SweepConfig::default()
    };
    let mut unsound = Vec::new();
    let mut non_monotone = Vec::new();
    let mut losses = Vec::new();
    let mut errors = Vec::new();
    let mut checks = 0usize;
    for (name, net) in &nets {
        let mut inspect = |what: &str, out: &XagNetwork, mc_ok: bool, md_ok: bool| {
            checks += 1;
            if !same(net, out) {
                unsound.push(format!("{name}/{what}"));
            }
            if !(mc_ok && md_ok) {
                non_monotone.push(format!("{name}/{what}"));
            }
        };
        let st = net.compute_stats();
        let passes: [(&str, PassFn, bool); 3] = [
            (
                "rewrite",
                |n, c| cut_rewrite(n, McDatabase::shared(), None, c).map(|o| o.network),
                true,
            ),
            ("resub", |n, c| resubstitute(n, None, c).map(|o| o.network), true),
            ("balance", |n, c| esop_balance(n, None, c).map(|o| o.network), false),
        ];
        for (what, pass, mc_pass) in passes {
            match pass(net, &cfg) {
                Ok(out) => {
                    let o = out.compute_stats();
                    inspect(what, &out, !mc_pass || o.mc <= st.mc, mc_pass || o.md <= st.md);
                }
                Err(e) => errors.push(format!("{name}/{what}: {e}")),
            }
        }
        let r = match run_pipeline(net, db, &cfg, &sweep_cfg) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("{name}/pipeline: {e}"));
                continue;
            }
        };
        for (order, flow) in &r.baselines {
            let o = flow.compute_stats();
            inspect(order.as_str(), flow, true, true);
            if r.sweep.best.he_cost > he_cost(o.md, o.mc) {
                losses.push(format!(
                    "{name}/{}: {} > {}",
                    order.as_str(),
                    r.sweep.best.he_cost,
                    he_cost(o.md, o.mc)
                ));
            }
        }
        inspect("greedy", &r.sweep.greedy.network, true, true);
        for a in &r.sweep.attempts {
            if let Some(sol) = &a.solution {
                inspect(&format!("bound{}", a.bound), &sol.network, true, true);
            }
        }
        inspect("best", &r.sweep.best.network, true, true);
    }
    unsound.extend(errors);
    let summarize = |bad: &Vec<String>, ok: String| {
        if bad.is_empty() {
            Ok(ok)
        } else {
            Err(format!("{} failures, first {}", bad.len(), bad[0]))
        }
    };
    SuiteReport {
        sound: summarize(
            &unsound,
            format!("{} networks, {checks} pass/extraction results equivalent", nets.len()),
        ),
        monotone: summarize(
            &non_monotone,
            format!(
                "{} networks, rewrite/resub never raise mc, balance never raises md",
                nets.len()
            ),
        ),
        sweep: summarize(
            &losses,
            format!("{} networks x 2 orders, sweep cost <= flow cost", nets.len()),
        ),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let traces = small_traces(100, 12);
    for (i, (_, _, g)) in traces.iter().enumerate() {
        let bf = brute_force(g);
        let greedy = greedy_md_dag(g).map_err(|e| e.to_string())?;
        check(
            Some(greedy.md) == bf.min_md,
            format!("trace {i}: greedy md {} vs {:?}", greedy.md, bf.min_md),
        )?;
        for d in 0..5u32 {
            let r = depth_bounded_ilp(g, d, None, &[]).map_err(|e| e.to_string())?;
            let mc = r.solution.as_ref().map(|s| s.mc);
            check(
                mc == bf.min_mc[d as usize],
                format!("trace {i} D={d}: {mc:?} vs {:?}", bf.min_mc[d as usize]),
            )?;
            let expected = if mc.is_some() {
                SolverStatus::Optimal
            } else {
                SolverStatus::Infeasible
            };
            check(
                r.status == expected,
                format!("trace {i} D={d}: status {}", r.status.as_str()),
            )?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} traces, D in 0..=4, all match brute force in {elapsed:.2?}",
        traces.len()
    ))
}

/// Output `p` is a fixed AND chain over x0..x4 (depth 4, four ANDs). Output
/// `q = p & x5` has two members: one reusing the chain (depth 5, one more
/// AND) and one balanced tree over all six inputs (depth 3, four more ANDs
/// after sharing x0 & x1). Greedy is stuck at (4, 8) for 128; bound 5 gives
/// (5, 5) for 125.
fn criterion_7() -> (Outcome, Outcome) {
    let literal = Err("unattainable: every AND on a path is counted by MC, so MD <= MC and \
                       no candidate has MD 4 with MC 2; realizable analogue below"
        .to_string());
    let analogue = (|| {
        let mut eg = EGraph::new();
        eg.enable_checking(6);
        let x: Vec<ELit> = (0..6).map(|i| eg.add_input(&format!("x{i}"))).collect();
        let mut p = x[0];
        for &xi in &x[1..5] {
            p = eg.build_and(p, xi);
        }
        let deep = eg.build_and(p, x[5]);
        let x01 = eg.build_and(x[0], x[1]);
        let x23 = eg.build_and(x[2], x[3]);
        let x45 = eg.build_and(x[4], x[5]);
        let left = eg.build_and(x01, x23);
        let flat = eg.build_and(left, x45);
        eg.union(deep, flat).map_err(|e| e.to_string())?;
        eg.add_output("p", p);
        eg.add_output("q", deep);
        let g = ExtractGraph::new(&eg);
        let r = he_cost_sweep(&g, &SweepConfig::default()).map_err(|e| e.to_string())?;
        let gr = (r.greedy.md, r.greedy.mc, r.greedy.he_cost);
        let best = (r.best.md, r.best.mc, r.best.he_cost);
        check(gr == (4, 8, 128), format!("greedy {gr:?}"))?;
        check(best == (5, 5, 125), format!("sweep {best:?}"))?;
        let mut reference = XagNetwork::new();
        let xs: Vec<_> = (0..6).map(|i| reference.add_input(format!("x{i}"))).collect();
        let p = xs[1..5].iter().fold(xs[0], |acc, &s| reference.and(acc, s));
        let q = reference.and(p, xs[5]);
        reference.add_output("p", p).map_err(|e| e.to_string())?;
        reference.add_output("q", q).map_err(|e| e.to_string())?;
        check(same(&reference, &r.best.network), "extracted network differs")?;
        Ok("greedy (md 4, mc 8) cost 128, k=2 sweep picks (md 5, mc 5) cost 125".to_string())
    })();
    (literal, analogue)
}

fn product_ok(net: &XagNetwork) -> bool {
    // inputs a0 a1 b0 b1, outputs p0..p3
    (0..16u64).all(|m| {
        let patterns: Vec<Vec<u64>> = (0..4).map(|i| vec![(m >> i) & 1]).collect();
        let out = simulate(net, &patterns).unwrap();
        let p = out.iter().enumerate().fold(0, |acc, (i, w)| acc | ((w[0] & 1) << i));
        p == (m & 3) * (m >> 2)
    })
}

fn criterion_8(dir: &Path) -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mult = xagtrace_cli::read_network(&fixtures.join("mult2.blif")).map_err(|e| e.to_string())?;
    check(product_ok(&mult), "mult2 fixture does not multiply")?;
    let db = McDatabase::shared();
    let timeout = 1.0;
    let all = RunManifest {
        circuits: vec![fixtures.join("mult2.blif"), fixtures.join("mux4.blif")],
        builtin: true,
        ilp_timeout: timeout,
        ..RunManifest::default()
    };
    let report = cmd_bench(&all, db, &dir.join("bench_all")).map_err(|e| e.to_string())?;
    for chunk in report.rows.chunks(3) {
        let traced = chunk
            .iter()
            .find(|r| r.variant == CUT_TRACING)
            .ok_or("missing traced row")?;
        let best = chunk
            .iter()
            .filter(|r| r.variant != CUT_TRACING)
            .map(|r| r.he_cost)
            .min()
            .unwrap();
        check(
            traced.he_cost <= best,
            format!("{}: {} > {best}", traced.name, traced.he_cost),
        )?;
    }
    let cmp = dir.join("comparator4.xag");
    fs::write(&cmp, write_xag_text(&comparator(4))).map_err(|e| e.to_string())?;
    let pair = RunManifest {
        circuits: vec![fixtures.join("mult2.blif"), cmp],
        ilp_timeout: timeout,
        ..RunManifest::default()
    };
    let out = dir.join("bench_pair");
    let r = cmd_bench(&pair, db, &out).map_err(|e| e.to_string())?;
    let csv = fs::read_to_string(out.join("report.csv")).map_err(|e| e.to_string())?;
    let cost = |name: &str, variant: &str| -> f64 {
        csv.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| f[0] == name && f[1] == variant)
            .map(|f| f[4].parse().unwrap())
            .unwrap()
    };
    let ratio = |name: &str| cost(name, "baseline-mc-first") / cost(name, "cut-tracing");
    let hand = (ratio("mult2") * ratio("comparator4")).sqrt();
    let got = r.geomean_baseline.ok_or("no geomean")?;
    check(
        (hand - got).abs() <= 1e-9 * hand,
        format!("geomean {got} vs hand {hand}"),
    )?;
    Ok(format!(
        "{} circuits never lose to a baseline; 2-circuit geomean {got:.4} = hand {hand:.4}",
        report.speedups.len()
    ))
}

/// A random network whose traced e-graph has close to 50 classes.
fn fifty_class_net() -> (XagNetwork, EGraph) {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    let mut best: Option<(usize, XagNetwork, EGraph)> = None;
    for seed in 0..400u64 {
        let spec = xagtrace::gen::RandomSpec {
            inputs: 6 + (seed % 4) as usize,
            gates: 16 + (seed % 12) as usize,
            outputs: 1 + (seed % 3) as usize,
            and_percent: 70,
        };
        let net = xagtrace::gen::random_network(&spec, seed);
        let (mut eg, _) = EGraph::from_network(&net);
        for order in FlowOrder::BOTH {
            run_flow(&net, order, db, Some(&mut eg), &cfg).unwrap();
        }
        let dist = ExtractGraph::new(&eg).num_classes().abs_diff(50);
        if best.as_ref().is_none_or(|b| dist < b.0) {
            best = Some((dist, net, eg));
        }
        if dist == 0 {
            break;
        }
    }
    let (_, net, eg) = best.unwrap();
    (net, eg)
}

fn run_extract(dir: &Path, trace: &Path, reference: &Path, out: &Path) -> Result<Vec<String>, String> {
    let run = Command::new(env!("CARGO_BIN_EXE_xagtrace"))
        .arg("extract")
        .arg(trace)
        .args(["--ilp-timeout", "0.01", "--k-sweep", "2", "--reference"])
        .arg(reference)
        .arg("--out")
        .arg(out)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        run.status.success(),
        format!(
            "extract exited with {}: {}",
            run.status,
            String::from_utf8_lossy(&run.stderr)
        ),
    )?;
    let log = fs::read_to_string(out.join("extract_log.txt")).map_err(|e| e.to_string())?;
    let extracted = xagtrace_cli::read_network(&out.join("extracted.xag")).map_err(|e| e.to_string())?;
    let source = xagtrace_cli::read_network(reference).map_err(|e| e.to_string())?;
    check(same(&source, &extracted), "extracted network differs")?;
    let mut statuses = Vec::new();
    for line in log.lines().filter(|l| l.starts_with("bound=")) {
        let field = |k: &str| {
            line.split_whitespace()
                .find_map(|t| t.strip_prefix(k))
                .unwrap_or("")
                .to_string()
        };
        let status = field("status=");
        let secs: f64 = field("time=")
            .trim_end_matches('s')
            .parse()
            .map_err(|_| format!("bad log line {line}"))?;
        match status.as_str() {
            "incumbent" | "timeout" => check(secs >= 0.01, format!("{status} after {secs}s"))?,
            "optimal" | "infeasible" => {}
            other => return Err(format!("unknown status {other}")),
        }
        check(secs < 1.0, format!("bound ran {secs}s past a 0.01s limit"))?;
        statuses.push(status);
    }
    check(!statuses.is_empty(), "no attempts logged")?;
    Ok(statuses)
}

fn criterion_9(dir: &Path) -> Outcome {
    let (net, eg) = fifty_class_net();
    let classes = ExtractGraph::new(&eg).num_classes();
    let src = dir.join("fifty.xag");
    let trace = dir.join("fifty_trace.txt");
    fs::write(&src, write_xag_text(&net)).map_err(|e| e.to_string())?;
    fs::write(&trace, write_trace(eg.events())).map_err(|e| e.to_string())?;
    let small = run_extract(dir, &trace, &src, &dir.join("fifty_ext"))?;

    // a larger trace where the limit is certain to cut searches short
    let big = xagtrace::bench::maj5_cascade();
    let (mut eg, _) = EGraph::from_network(&big);
    for order in FlowOrder::BOTH {
        run_flow(&big, order, McDatabase::shared(), Some(&mut eg), &PassConfig::default())
            .map_err(|e| e.to_string())?;
    }
    let big_src = dir.join("maj5.xag");
    let big_trace = dir.join("maj5_trace.txt");
    fs::write(&big_src, write_xag_text(&big)).map_err(|e| e.to_string())?;
    fs::write(&big_trace, write_trace(eg.events())).map_err(|e| e.to_string())?;
    let large = run_extract(dir, &big_trace, &big_src, &dir.join("maj5_ext"))?;
    check(
        large.iter().any(|s| s == "incumbent" || s == "timeout"),
        format!("no bound hit the limit on the larger trace: {large:?}"),
    )?;
    Ok(format!(
        "{classes}-class trace statuses {small:?}; maj5 trace statuses {large:?}; results equivalent"
    ))
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let dir = tempfile::tempdir().expect("temp dir");
    let dir = dir.path();
    let mut failed = false;
    let report = |id: &str, r: &Outcome| {
        match r {
            Ok(msg) => println!("criterion {id}: PASS {msg}"),
            Err(msg) => println!("criterion {id}: FAIL {msg}"),
        }
        r.is_ok()
    };
    failed |= !report("1", &criterion_1(dir));
    failed |= !report("2", &criterion_2(dir));
    let s = suite();
    failed |= !report("3", &s.sound);
    failed |= !report("4", &s.monotone);
    failed |= !report("5", &criterion_5());
    failed |= !report("6", &s.sweep);
    let (literal, analogue) = criterion_7();
    report("7", &literal);
    failed |= !report("7 (analogue)", &analogue);
    failed |= !report("8", &criterion_8(dir));
    failed |= !report("9", &criterion_9(dir));
    if failed {
        std::process::exit(1);
    }
}
