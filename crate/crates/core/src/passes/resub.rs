//! Resubstitution of AND gates by existing divisors, the XOR of two
//! divisors, or the AND of two divisors.

use std::collections::HashMap;

use super::work::WorkNet;
use super::{GainReport, PassConfig, PassOutcome};
use crate::egraph::EGraph;
use crate::error::Result;
use crate::sim::exhaustive_patterns;
use crate::xag::{GateBuilder, NodeId, Signal, XagNetwork};

pub const MAX_WINDOW_LEAVES: usize = 8;

const MAX_DIVISORS: usize = 150;
const MAX_CANDIDATES: usize = 32;

type Table = [u64; 4];

fn not(t: Table) -> Table {
    t.map(|w| !w)
}

fn and(a: Table, b: Table) -> Table {
    [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]]
}

fn xor(a: Table, b: Table) -> Table {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]]
}

/// Leaves of a window under `v`, grown from its fanins by expanding the
/// leaf that adds the fewest new leaves (latest first on ties).
fn window_leaves(w: &WorkNet, v: NodeId) -> Vec<NodeId> {
    let mut leaves: Vec<NodeId> = w.fanins(v).expect("gate").iter().map(|s| s.node()).collect();
    leaves.sort();
    leaves.dedup();
    loop {
        let mut best: Option<(usize, u64, usize, Vec<NodeId>)> = None;
        for (i, &l) in leaves.iter().enumerate() {
            let Some(f) = w.fanins(l) else { continue };
            let new: Vec<NodeId> =
                f.iter()
                    .map(|s| s.node())
                    .filter(|n| !leaves.contains(n))
                    .fold(Vec::new(), |mut acc, n| {
                        if !acc.contains(&n) {
                            acc.push(n);
                        }
                        acc
                    });
            if leaves.len() - 1 + new.len() > MAX_WINDOW_LEAVES {
                continue;
            }
            let key = (new.len(), u64::MAX - w.rank(l));
            if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
                best = Some((key.0, key.1, i, new));
            }
        }
        let Some((_, _, i, new)) = best else { break };
        leaves.remove(i);
        leaves.extend(new);
    }
    leaves
}

/// Active nodes in topological order.
fn active_order(w: &WorkNet) -> Vec<NodeId> {
    let mut seen = vec![false; w.net().num_nodes()];
    let mut order = Vec::new();
    for (_, s) in w.net().outputs() {
        let mut stack = vec![(w.resolve(*s).node(), false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                order.push(n);
                continue;
            }
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            stack.push((n, true));
            if let Some(f) = w.fanins(n) {
                for s in f {
                    if !seen[s.node().index()] {
                        stack.push((s.node(), false));
                    }
                }
            }
        }
    }
    order
}

enum Candidate {
    Divisor(Signal),
    Xor(Signal, Signal),
    And(Signal, Signal, bool),
}

/// Replaces AND gates whose window function is already available, up to
/// one extra gate, elsewhere in the network.
pub fn resubstitute(net: &XagNetwork, mut trace: Option<&mut EGraph>, cfg: &PassConfig) -> Result<PassOutcome> {
    cfg.validate()?;
    let mut w = WorkNet::new(net);
    if let Some(eg) = trace.as_deref_mut() {
        w.attach(eg);
    }
    let vars = exhaustive_patterns(MAX_WINDOW_LEAVES);
    let mut reports = Vec::new();
    for i in 0..w.original() {
        let v = NodeId(i as u32);
        if !w.is_and(v) || !w.is_active(v) {
            continue;
        }
        let leaves = window_leaves(&w, v);
        let mffc = w.mffc(v);
        let and_mffc = mffc.iter().filter(|&&n| w.is_and(n)).count();

        // tables of every active node whose cone lies inside the window
        let order = active_order(&w);
        let mut table: HashMap<NodeId, Table> = HashMap::new();
        for (j, &l) in leaves.iter().enumerate() {
            let t = &vars[j];
            table.insert(l, [t[0], t[1], t[2], t[3]]);
        }
        table.insert(NodeId::CONST0, [0; 4]);
        let mut in_tfo = vec![false; w.net().num_nodes()];
        in_tfo[v.index()] = true;
        let mut divisors: Vec<(NodeId, Table)> = Vec::new();
        for &n in &order {
            let Some(f) = w.fanins(n) else {
                if let Some(&t) = table.get(&n) {
                    if n != NodeId::CONST0 {
                        divisors.push((n, t));
                    }
                }
                continue;
            };
            if f.iter().any(|s| in_tfo[s.node().index()]) {
                in_tfo[n.index()] = true;
            }
            if table.contains_key(&n) {
                if !in_tfo[n.index()] && !mffc.contains(&n) {
                    divisors.push((n, table[&n]));
                }
                continue;
            }
            let (Some(&ta), Some(&tb)) = (table.get(&f[0].node()), table.get(&f[1].node())) else {
                continue;
            };
            let ta = if f[0].is_complemented() { not(ta) } else { ta };
            let tb = if f[1].is_complemented() { not(tb) } else { tb };
            let t = match w.kind(n).expect("gate") {
                crate::xag::GateKind::And => and(ta, tb),
                crate::xag::GateKind::Xor => xor(ta, tb),
            };
            table.insert(n, t);
            if !in_tfo[n.index()] && !mffc.contains(&n) && w.can_replace(v, Signal::new(n, false)) {
                divisors.push((n, t));
            }
        }
        let Some(&target) = table.get(&v) else { continue };
        // nearest divisors first
        if divisors.len() > MAX_DIVISORS {
            divisors.drain(..divisors.len() - MAX_DIVISORS);
        }

        let mut cands: Vec<Candidate> = Vec::new();
        for &(d, t) in &divisors {
            if t == target || t == not(target) {
                cands.push(Candidate::Divisor(Signal::new(d, t != target)));
            }
        }
        if and_mffc >= 1 {
            let index: HashMap<Table, NodeId> = divisors.iter().rev().map(|&(d, t)| (t, d)).collect();
            'xor: for &(d1, t1) in &divisors {
                for (want, c) in [(xor(target, t1), false), (not(xor(target, t1)), true)] {
                    if let Some(&d2) = index.get(&want) {
                        if d2 > d1 {
                            cands.push(Candidate::Xor(Signal::new(d1, c), Signal::new(d2, false)));
                            if cands.len() >= MAX_CANDIDATES {
                                break 'xor;
                            }
                        }
                    }
                }
            }
        }
        if and_mffc >= 2 && cands.is_empty() {
            'and: for (x, &(d1, t1)) in divisors.iter().enumerate() {
                for &(d2, t2) in &divisors[x + 1..] {
                    for p in 0..8u8 {
                        let a = if p & 1 == 1 { not(t1) } else { t1 };
                        let b = if p & 2 == 2 { not(t2) } else { t2 };
                        let g = and(a, b);
                        let g = if p & 4 == 4 { not(g) } else { g };
                        if g == target {
                            cands.push(Candidate::And(
                                Signal::new(d1, p & 1 == 1),
                                Signal::new(d2, p & 2 == 2),
                                p & 4 == 4,
                            ));
                            if cands.len() >= MAX_CANDIDATES {
                                break 'and;
                            }
                        }
                    }
                }
            }
        }

        let root = Signal::new(v, false);
        let mut best: Option<(i64, Signal)> = None;
        for c in &cands {
            let s = match *c {
                Candidate::Divisor(s) => s,
                Candidate::Xor(a, b) => w.build_xor(a, b),
                Candidate::And(a, b, neg) => w.build_and(a, b).complement_if(neg),
            };
            let Some(gain) = w.gain(v, s) else { continue };
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, s));
            }
        }
        if let Some((gain, s)) = best.filter(|&(g, _)| g > 0) {
            if let Some(eg) = trace.as_deref_mut() {
                w.record(eg, root, s)?;
            }
            w.replace(v, s);
            reports.push(GainReport {
                pass: "resub",
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::equivalent;

    #[test]
    fn hidden_duplicate_becomes_divisor() {
        // v = a & ((a ^ b) ^ a) is a & b, which already exists
        let mut net = XagNetwork::new();
        let a = net.add_input("a");
        let b = net.add_input("b");
        let ab = net.and(a, b);
        let t = net.xor(a, b);
        let u = net.xor(t, a);
        let v = net.and(a, u);
        net.add_output("p", ab).unwrap();
        net.add_output("q", !v).unwrap();
        assert_eq!(net.compute_stats().mc, 2);
        let out = resubstitute(&net, None, &PassConfig::default()).unwrap();
        assert_eq!(out.network.compute_stats().mc, 1);
        assert!(equivalent(&net, &out.network).unwrap().equal);
    }

    #[test]
    fn xor_of_divisors_saves_two() {
        // v = !(p & q) & !(!p & !q) is p ^ q; p & q is shared
        let mut net = XagNetwork::new();
        let p = net.add_input("p");
        let q = net.add_input("q");
        let pq = net.and(p, q);
        let npq = net.and(!p, !q);
        let v = net.and(!pq, !npq);
        net.add_output("x", v).unwrap();
        net.add_output("y", pq).unwrap();
        assert_eq!(net.compute_stats().mc, 3);
        let out = resubstitute(&net, None, &PassConfig::default()).unwrap();
        assert_eq!(out.network.compute_stats().mc, 1);
        assert_eq!(out.reports[0].gain, 2);
        assert!(equivalent(&net, &out.network).unwrap().equal);
    }

    #[test]
    fn irredundant_network_unchanged() {
        let mut net = XagNetwork::new();
        let x: Vec<_> = (0..3).map(|i| net.add_input(format!("x{i}"))).collect();
        let t = net.and(x[0], x[1]);
        let y = net.and(t, x[2]);
        let z = net.xor(t, x[2]);
        net.add_output("y", y).unwrap();
        net.add_output("z", z).unwrap();
        let out = resubstitute(&net, None, &PassConfig::default()).unwrap();
        assert!(out.reports.is_empty());
        assert_eq!(out.network.compute_stats(), net.compute_stats());
    }

    #[test]
    fn window_respects_limit() {
        let mut net = XagNetwork::new();
        let x: Vec<_> = (0..12).map(|i| net.add_input(format!("x{i}"))).collect();
        let mut acc = x[0];
        for &xi in &x[1..] {
            acc = net.and(acc, xi);
        }
        net.add_output("y", acc).unwrap();
        let w = WorkNet::new(&net);
        let leaves = window_leaves(&w, acc.node());
        assert_eq!(leaves.len(), MAX_WINDOW_LEAVES);
    }
}
