#![allow(dead_code)]

use xagtrace::egraph::{EGraph, ENode};
use xagtrace::extract::ExtractGraph;
use xagtrace::gen::{random_network, RandomSpec};
use xagtrace::mcdb::McDatabase;
use xagtrace::passes::{run_flow, FlowOrder, PassConfig};
use xagtrace::XagNetwork;

/// Random networks with 4 to 12 inputs and 30 to 100 gates.
pub fn corpus(count: u64, base: u64) -> Vec<XagNetwork> {
    (0..count)
        .map(|i| {
            let seed = base + i;
            let spec = RandomSpec {
                inputs: 4 + (seed % 9) as usize,
                gates: 30 + (seed * 7 % 71) as usize,
                outputs: 1 + (seed % 5) as usize,
                and_percent: 50 + (seed % 4) as u32 * 10,
            };
            random_network(&spec, seed)
        })
        .collect()
}

/// Traced e-graphs of small random networks, both flow orders recorded,
/// kept when the extraction view has at most `max_classes` classes and
/// some class offers a choice.
pub fn small_traces(count: usize, max_classes: usize) -> Vec<(XagNetwork, EGraph, ExtractGraph)> {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        seed += 1;
        assert!(seed < 200_000, "not enough small traces");
        let spec = RandomSpec {
            inputs: 2 + (seed % 3) as usize,
            gates: 3 + (seed % 6) as usize,
            outputs: 1 + (seed % 2) as usize,
            and_percent: 60 + (seed % 3) as u32 * 10,
        };
        let net = random_network(&spec, seed);
        let (mut eg, _) = EGraph::from_network(&net);
        for order in FlowOrder::BOTH {
            run_flow(&net, order, db, Some(&mut eg), &cfg).unwrap();
        }
        let g = ExtractGraph::new(&eg);
        if g.num_classes() <= max_classes && g.members.iter().any(|m| m.len() > 1) {
            out.push((net, eg, g));
        }
    }
    out
}

/// Exhaustive minima over every assignment of one member per class.
pub struct BruteForce {
    pub min_md: Option<u32>,
    /// Minimum AND count with depth at most `d`, for `d` in `0..5`.
    pub min_mc: [Option<u32>; 5],
}

fn depth_of(
    g: &ExtractGraph,
    pick: &[usize],
    c: usize,
    state: &mut [u8],
    depth: &mut [u32],
    ands: &mut Vec<usize>,
) -> Option<u32> {
    match state[c] {
        2 => return Some(depth[c]),
        1 => return None,
        _ => {}
    }
    state[c] = 1;
    let m = &g.members[c][pick[c]];
    let mut d = 0;
    for &(k, _) in &m.children {
        d = d.max(depth_of(g, pick, k, state, depth, ands)?);
    }
    let and = matches!(
        m.node,
        ENode::Gate {
            kind: xagtrace::GateKind::And,
            ..
        }
    );
    if and {
        ands.push(c);
    }
    depth[c] = d + and as u32;
    state[c] = 2;
    Some(depth[c])
}

pub fn brute_force(g: &ExtractGraph) -> BruteForce {
    let n = g.num_classes();
    let mut pick = vec![0usize; n];
    let mut res = BruteForce {
        min_md: None,
        min_mc: [None; 5],
    };
    loop {
        let mut state = vec![0u8; n];
        let mut depth = vec![0u32; n];
        let mut ands = Vec::new();
        let md = g
            .outputs
            .iter()
            .map(|&(_, c, _)| depth_of(g, &pick, c, &mut state, &mut depth, &mut ands))
            .try_fold(0u32, |acc, d| d.map(|d| acc.max(d)));
        if let Some(md) = md {
            let mc = ands.len() as u32;
            res.min_md = Some(res.min_md.map_or(md, |m| m.min(md)));
            for d in md as usize..5 {
                res.min_mc[d] = Some(res.min_mc[d].map_or(mc, |m| m.min(mc)));
            }
        }
        // odometer over member indices
        let mut i = 0;
        loop {
            if i == n {
                return res;
            }
            pick[i] += 1;
            if pick[i] < g.members[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
