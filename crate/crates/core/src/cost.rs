//! HE cost model and benchmark reports.

use std::fmt::Write as _;

/// Estimated homomorphic evaluation cost, `md² × mc`.
pub fn he_cost(md: u32, mc: u32) -> u64 {
    (md as u64) * (md as u64) * (mc as u64)
}

pub const BASELINE_MC_FIRST: &str = "baseline-mc-first";
pub const BASELINE_MD_FIRST: &str = "baseline-md-first";
pub const CUT_TRACING: &str = "cut-tracing";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub name: String,
    pub variant: String,
    pub md: u32,
    pub mc: u32,
    pub he_cost: u64,
}

impl ReportRow {
    pub fn new(name: impl Into<String>, variant: impl Into<String>, md: u32, mc: u32) -> ReportRow {
        ReportRow {
            name: name.into(),
            variant: variant.into(),
            md,
            mc,
            he_cost: he_cost(md, mc),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Speedup {
    pub name: String,
    /// Against the mc-first baseline.
    pub baseline: Option<f64>,
    /// Against the cheaper of the two baselines.
    pub best_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    pub speedups: Vec<Speedup>,
    pub geomean_baseline: Option<f64>,
    pub geomean_best_order: Option<f64>,
}

/// `base / traced`; 1 when both are zero, `None` when only `traced` is.
pub fn speedup(base: u64, traced: u64) -> Option<f64> {
    match (base, traced) {
        (0, 0) => Some(1.0),
        (_, 0) => None,
        (b, t) => Some(b as f64 / t as f64),
    }
}

pub fn geomean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some((xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp())
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "inf".to_string(), |r| format!("{r:.2}"))
}

impl BenchReport {
    /// Groups rows by circuit name (first appearance order) and computes the
    /// speedup of the cut-tracing row over the baselines.
    pub fn new(rows: Vec<ReportRow>) -> BenchReport {
        let mut names: Vec<&str> = Vec::new();
        for r in &rows {
            if !names.contains(&r.name.as_str()) {
                names.push(&r.name);
            }
        }
        let cost = |name: &str, variant: &str| {
            rows.iter()
                .find(|r| r.name == name && r.variant == variant)
                .map(|r| r.he_cost)
        };
        let mut speedups = Vec::new();
        for name in names {
            let Some(traced) = cost(name, CUT_TRACING) else {
                continue;
            };
            let mc_first = cost(name, BASELINE_MC_FIRST);
            let best = [mc_first, cost(name, BASELINE_MD_FIRST)].into_iter().flatten().min();
            speedups.push(Speedup {
                name: name.to_string(),
                baseline: mc_first.and_then(|b| speedup(b, traced)),
                best_order: best.and_then(|b| speedup(b, traced)),
            });
        }
        let finite = |f: fn(&Speedup) -> Option<f64>| geomean(&speedups.iter().filter_map(f).collect::<Vec<_>>());
        BenchReport {
            geomean_baseline: finite(|s| s.baseline),
            geomean_best_order: finite(|s| s.best_order),
            speedups,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,variant,md,mc,he_cost\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.name, r.variant, r.md, r.mc, r.he_cost);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:<18} {:>5} {:>7} {:>12}",
            "name", "variant", "md", "mc", "he_cost"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:<18} {:>5} {:>7} {:>12}",
                r.name, r.variant, r.md, r.mc, r.he_cost
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<width$}  {:>10} {:>10}", "name", "baseline", "best-order");
        for s in &self.speedups {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10} {:>10}",
                s.name,
                fmt_ratio(s.baseline),
                fmt_ratio(s.best_order)
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>10} {:>10}",
            "geomean",
            self.geomean_baseline.map_or("-".into(), |g| format!("{g:.2}")),
            self.geomean_best_order.map_or("-".into(), |g| format!("{g:.2}"))
        );
        out
    }
}
