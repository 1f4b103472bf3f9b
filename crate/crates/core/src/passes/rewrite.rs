use super::work::WorkNet;
use super::{GainReport, PassConfig, PassOutcome, RecordPolicy};
use crate::cuts::enumerate_cuts;
use crate::egraph::EGraph;
use crate::error::{Error, Result};
use crate::mcdb::McDatabase;
use crate::xag::{NodeId, Signal, XagNetwork};

/// MC-oriented cut rewriting: every cut function is replaced by its
/// database implementation when that saves AND gates.
pub fn cut_rewrite(
    net: &XagNetwork,
    db: &McDatabase,
    mut trace: Option<&mut EGraph>,
    cfg: &PassConfig,
) -> Result<PassOutcome> {
    cfg.validate()?;
    if db.arity() < cfg.k_rewrite {
        return Err(Error::Database(format!(
            "database arity {} is below the rewrite cut size {}",
            db.arity(),
            cfg.k_rewrite
        )));
    }
    let mut w = WorkNet::new(net);
    if let Some(eg) = trace.as_deref_mut() {
        w.attach(eg);
    }
    let cuts = enumerate_cuts(w.net(), cfg.k_rewrite, cfg.priority_limit)?;
    let mut reports = Vec::new();
    for i in 0..w.original() {
        let v = NodeId(i as u32);
        if !w.is_gate(v) || !w.is_active(v) {
            continue;
        }
        let root = Signal::new(v, false);
        let mut best: Option<(i64, Signal)> = None;
        for cut in cuts.cuts(v) {
            if cut.is_trivial() {
                continue;
            }
            let leaves: Vec<Signal> = cut.leaves.iter().map(|&l| w.resolve(Signal::new(l, false))).collect();
            let m = db.lookup(cut.truth_table as u16, leaves.len())?;
            let s = m.build(&mut w, &leaves);
            let Some(gain) = w.gain(v, s) else { continue };
            if cfg.mc_policy == RecordPolicy::All {
                if let Some(eg) = trace.as_deref_mut() {
                    w.record(eg, root, s)?;
                }
            }
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, s));
            }
        }
        if let Some((gain, s)) = best.filter(|&(g, _)| g > 0) {
            if cfg.mc_policy == RecordPolicy::BestOnly {
                if let Some(eg) = trace.as_deref_mut() {
                    w.record(eg, root, s)?;
                }
            }
            w.replace(v, s);
            reports.push(GainReport {
                pass: "rewrite",
                node: v,
                gain,
            });
        }
    }
    Ok(PassOutcome {
        network: w.finish(),
        reports,
    })
}
