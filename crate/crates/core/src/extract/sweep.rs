use std::time::Duration;

use log::{debug, info};

use super::bnb::{depth_bounded_ilp, IlpOutcome};
use super::greedy::greedy_md_dag;
use super::{Choice, ExtractGraph, ExtractionSolution, SolverStatus};
use crate::cost::he_cost;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Extra depth levels tried above the greedy depth.
    pub k: u32,
    /// Per-bound solver limit; `None` runs every bound to completion.
    pub timeout: Option<Duration>,
    /// Known extractable choices (such as flow outputs). Each seeds every
    /// solve as a starting incumbent and adds its own depth as a bound.
    pub witnesses: Vec<Choice>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k: 2,
            timeout: Some(Duration::from_secs(600)),
            witnesses: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepAttempt {
    pub bound: u32,
    pub status: SolverStatus,
    /// Measured on the extracted network.
    pub md: Option<u32>,
    pub mc: Option<u32>,
    pub he_cost: Option<u64>,
    /// Cost as `bound² × mc`.
    pub bound_cost: Option<u64>,
    pub nodes: u64,
    pub elapsed: Duration,
    pub solution: Option<ExtractionSolution>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub best: ExtractionSolution,
    pub greedy: ExtractionSolution,
    pub attempts: Vec<SweepAttempt>,
}

/// Greedy extraction followed by minimum-AND solves for depth bounds
/// `md..=md + k` (plus witness depths). A candidate replaces the current
/// best when its HE cost, measured on the extracted network, is no larger.
pub fn he_cost_sweep(g: &ExtractGraph, cfg: &SweepConfig) -> Result<SweepResult> {
    let greedy = greedy_md_dag(g)?;
    info!("greedy: md={} mc={} he_cost={}", greedy.md, greedy.mc, greedy.he_cost);
    let mut bounds: Vec<u32> = (0..=cfg.k).map(|i| greedy.md + i).collect();
    for w in &cfg.witnesses {
        if let Some((md, _)) = g.evaluate(w) {
            if !bounds.contains(&md) {
                bounds.push(md);
            }
        }
    }
    let mut warm = vec![greedy.choice.clone()];
    warm.extend(cfg.witnesses.iter().cloned());

    let outcomes: Vec<Result<IlpOutcome>> = std::thread::scope(|s| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&b| {
                let warm = &warm;
                s.spawn(move || depth_bounded_ilp(g, b, cfg.timeout, warm))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });

    let mut best = greedy.clone();
    let mut attempts = Vec::new();
    for out in outcomes {
        let out = out?;
        let sol = out.solution.as_ref();
        let attempt = SweepAttempt {
            bound: out.bound,
            status: out.status,
            md: sol.map(|s| s.md),
            mc: sol.map(|s| s.mc),
            he_cost: sol.map(|s| s.he_cost),
            bound_cost: sol.map(|s| he_cost(out.bound, s.mc)),
            nodes: out.nodes,
            elapsed: out.elapsed,
            solution: out.solution,
        };
        debug!(
            "bound {}: {} mc={:?} he_cost={:?} nodes={} in {:?}",
            attempt.bound,
            attempt.status.as_str(),
            attempt.mc,
            attempt.he_cost,
            attempt.nodes,
            attempt.elapsed
        );
        if let Some(sol) = &attempt.solution {
            if sol.he_cost <= best.he_cost {
                best = sol.clone();
            }
        }
        attempts.push(attempt);
    }
    info!(
        "best: {} md={} mc={} he_cost={}",
        best.method, best.md, best.mc, best.he_cost
    );
    Ok(SweepResult { best, greedy, attempts })
}
