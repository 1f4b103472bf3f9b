//! ESOP balancing of the critical path.

use std::collections::HashMap;

use super::work::WorkNet;
use super::{GainReport, PassConfig, PassOutcome, RecordPolicy};
use crate::cuts::enumerate_cuts;
use crate::egraph::EGraph;
use crate::error::Result;
use crate::esop::{build_esop_fragment, esop_of, Cube};
use crate::xag::{GateKind, Node, NodeId, Signal, XagNetwork};

/// Gates lying on some path whose multiplicative depth equals the network's.
pub(crate) fn critical_nodes(net: &XagNetwork) -> Vec<bool> {
    let level = net.levels();
    let live = net.live_mask();
    let n = net.num_nodes();
    let md = net
        .outputs()
        .iter()
        .map(|(_, s)| level[s.node().index()])
        .max()
        .unwrap_or(0);
    // depth still to come above each node
    let mut above: Vec<Option<u32>> = vec![None; n];
    for (_, s) in net.outputs() {
        above[s.node().index()] = Some(0);
    }
    for i in (0..n).rev() {
        let (true, Some(up), Node::Gate { kind, fanins }) = (live[i], above[i], net.node(NodeId(i as u32))) else {
            continue;
        };
        let up = up + (kind == GateKind::And) as u32;
        for f in fanins {
            let slot = &mut above[f.node().index()];
            *slot = Some(slot.map_or(up, |x| x.max(up)));
        }
    }
    (0..n)
        .map(|i| md > 0 && net.is_gate(NodeId(i as u32)) && above[i].is_some_and(|up| level[i] + up == md))
        .collect()
}

/// Rebuilds critical-path nodes from the ESOP forms of their cuts when this
/// lowers their level.
pub fn esop_balance(net: &XagNetwork, mut trace: Option<&mut EGraph>, cfg: &PassConfig) -> Result<PassOutcome> {
    cfg.validate()?;
    let mut w = WorkNet::new(net);
    if let Some(eg) = trace.as_deref_mut() {
        w.attach(eg);
    }
    let critical = critical_nodes(w.net());
    let cuts = enumerate_cuts(w.net(), cfg.k_balance, cfg.priority_limit)?;
    let mut cache: HashMap<(u64, usize), Vec<Cube>> = HashMap::new();
    let mut reports = Vec::new();
    for (i, &on_path) in critical.iter().enumerate().take(w.original()) {
        let v = NodeId(i as u32);
        if !w.is_gate(v) {
            continue;
        }
        w.refresh_level(v);
        if !on_path || !w.is_active(v) {
            continue;
        }
        let root = Signal::new(v, false);
        let current = w.level(v);
        let mut best: Option<(u32, Signal)> = None;
        for cut in cuts.cuts(v) {
            if cut.is_trivial() {
                continue;
            }
            let leaves: Vec<Signal> = cut.leaves.iter().map(|&l| w.resolve(Signal::new(l, false))).collect();
            let levels: Vec<u32> = leaves.iter().map(|s| w.level(s.node())).collect();
            let cubes = cache
                .entry((cut.truth_table, leaves.len()))
                .or_insert_with(|| esop_of(cut.truth_table, leaves.len()));
            let (s, _) = build_esop_fragment(&mut w, cubes, &leaves, Some(&levels));
            if s.node() == v {
                continue;
            }
            if cfg.md_policy == RecordPolicy::All {
                if let Some(eg) = trace.as_deref_mut() {
                    w.record(eg, root, s)?;
                }
            }
            let level = w.level(s.node());
            if level < current && w.can_replace(v, s) && best.is_none_or(|(l, _)| level < l) {
                best = Some((level, s));
            }
        }
        if let Some((level, s)) = best {
            if cfg.md_policy == RecordPolicy::BestOnly {
                if let Some(eg) = trace.as_deref_mut() {
                    w.record(eg, root, s)?;
                }
            }
            w.replace(v, s);
            reports.push(GainReport {
                pass: "balance",
                node: v,
                gain: (current - level) as i64,
            });
        }
    }
    Ok(PassOutcome {
        network: w.finish(),
        reports,
    })
}
