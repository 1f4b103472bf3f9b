//! Bundled benchmark circuits and the baseline / cut-tracing pipelines.

use crate::cost::{ReportRow, BASELINE_MC_FIRST, BASELINE_MD_FIRST, CUT_TRACING};
use crate::egraph::EGraph;
use crate::error::Result;
use crate::extract::{he_cost_sweep, ExtractGraph, SweepConfig, SweepResult};
use crate::mcdb::McDatabase;
use crate::passes::{run_flow, FlowOrder, PassConfig};
use crate::xag::{Signal, XagNetwork};

fn or(net: &mut XagNetwork, a: Signal, b: Signal) -> Signal {
    !net.and(!a, !b)
}

/// Naive majority, `ab | c(a ^ b)` with an explicit OR.
fn maj_naive(net: &mut XagNetwork, a: Signal, b: Signal, c: Signal) -> Signal {
    let ab = net.and(a, b);
    let x = net.xor(a, b);
    let cx = net.and(c, x);
    or(net, ab, cx)
}

/// Full adder with two ANDs in the carry.
pub fn full_adder() -> XagNetwork {
    let mut net = XagNetwork::new();
    let a = net.add_input("a");
    let b = net.add_input("b");
    let c = net.add_input("cin");
    let ab = net.xor(a, b);
    let s = net.xor(ab, c);
    let g1 = net.and(a, b);
    let g2 = net.and(ab, c);
    let carry = net.xor(g1, g2);
    net.add_output("sum", s).expect("valid");
    net.add_output("cout", carry).expect("valid");
    net
}

pub fn ripple_adder(bits: usize) -> XagNetwork {
    let mut net = XagNetwork::new();
    let a: Vec<Signal> = (0..bits).map(|i| net.add_input(format!("a{i}"))).collect();
    let b: Vec<Signal> = (0..bits).map(|i| net.add_input(format!("b{i}"))).collect();
    let mut carry = net.add_input("cin");
    for i in 0..bits {
        let x = net.xor(a[i], b[i]);
        let s = net.xor(x, carry);
        net.add_output(format!("s{i}"), s).expect("valid");
        carry = maj_naive(&mut net, a[i], b[i], carry);
    }
    net.add_output("cout", carry).expect("valid");
    net
}

/// Unsigned `a < b` and `a == b`, most significant bit first.
pub fn comparator(bits: usize) -> XagNetwork {
    let mut net = XagNetwork::new();
    let a: Vec<Signal> = (0..bits).map(|i| net.add_input(format!("a{i}"))).collect();
    let b: Vec<Signal> = (0..bits).map(|i| net.add_input(format!("b{i}"))).collect();
    let mut lt = Signal::ZERO;
    let mut eq = Signal::ONE;
    for i in (0..bits).rev() {
        let here = net.and(!a[i], b[i]);
        let same = !net.xor(a[i], b[i]);
        let t = net.and(eq, here);
        lt = or(&mut net, lt, t);
        eq = net.and(eq, same);
    }
    net.add_output("lt", lt).expect("valid");
    net.add_output("eq", eq).expect("valid");
    net
}

/// Majority of five as the OR of all ten three-input products.
fn maj5_sop(net: &mut XagNetwork, x: &[Signal]) -> Signal {
    let mut acc = Signal::ZERO;
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                let t = net.and(x[i], x[j]);
                let t = net.and(t, x[k]);
                acc = or(net, acc, t);
            }
        }
    }
    acc
}

/// Two chained five-input majorities over nine inputs.
pub fn maj5_cascade() -> XagNetwork {
    let mut net = XagNetwork::new();
    let x: Vec<Signal> = (0..9).map(|i| net.add_input(format!("x{i}"))).collect();
    let m1 = maj5_sop(&mut net, &x[..5]);
    let m2 = maj5_sop(&mut net, &[m1, x[5], x[6], x[7], x[8]]);
    net.add_output("m1", m1).expect("valid");
    net.add_output("m2", m2).expect("valid");
    net
}

pub fn bundled() -> Vec<(&'static str, XagNetwork)> {
    vec![
        ("full_adder", full_adder()),
        ("ripple_adder4", ripple_adder(4)),
        ("comparator4", comparator(4)),
        ("maj5_cascade", maj5_cascade()),
    ]
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    /// Flow output per order.
    pub baselines: Vec<(FlowOrder, XagNetwork)>,
    pub egraph: EGraph,
    pub sweep: SweepResult,
}

impl PipelineResult {
    pub fn rows(&self, name: &str) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self
            .baselines
            .iter()
            .map(|(order, net)| {
                let st = net.compute_stats();
                let variant = match order {
                    FlowOrder::McFirst => BASELINE_MC_FIRST,
                    FlowOrder::MdFirst => BASELINE_MD_FIRST,
                };
                ReportRow::new(name, variant, st.md, st.mc)
            })
            .collect();
        rows.push(ReportRow::new(
            name,
            CUT_TRACING,
            self.sweep.best.md,
            self.sweep.best.mc,
        ));
        rows
    }
}

/// Runs both flow orders on `net`, tracing them into one e-graph, and
/// extracts from it. The flow outputs double as the baselines and as
/// witnesses for the sweep.
pub fn run_pipeline(
    net: &XagNetwork,
    db: &McDatabase,
    cfg: &PassConfig,
    sweep: &SweepConfig,
) -> Result<PipelineResult> {
    let (mut eg, _) = EGraph::from_network(net);
    let mut baselines = Vec::new();
    for order in FlowOrder::BOTH {
        let out = run_flow(net, order, db, Some(&mut eg), cfg)?;
        baselines.push((order, out.network));
    }
    let g = ExtractGraph::new(&eg);
    let mut sweep = sweep.clone();
    for (_, flow) in &baselines {
        if let Some(w) = g.witness(&eg, flow) {
            sweep.witnesses.push(w);
        }
    }
    let sweep = he_cost_sweep(&g, &sweep)?;
    Ok(PipelineResult {
        baselines,
        egraph: eg,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate;

    fn eval(net: &XagNetwork, bits: u64) -> Vec<bool> {
        let n = net.inputs().len();
        let patterns: Vec<Vec<u64>> = (0..n).map(|i| vec![(bits >> i) & 1]).collect();
        simulate(net, &patterns)
            .unwrap()
            .iter()
            .map(|w| w[0] & 1 == 1)
            .collect()
    }

    #[test]
    fn ripple_adder_adds() {
        let net = ripple_adder(4);
        for a in 0..16u64 {
            for b in 0..16u64 {
                for c in 0..2u64 {
                    // inputs a0..a3, b0..b3, cin
                    let out = eval(&net, a | (b << 4) | (c << 8));
                    let sum = out
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (i, &v)| acc | ((v as u64) << i));
                    assert_eq!(sum, a + b + c);
                }
            }
        }
    }

    #[test]
    fn comparator_compares() {
        let net = comparator(4);
        for a in 0..16u64 {
            for b in 0..16u64 {
                // a0 is the least significant bit
                let out = eval(&net, a | (b << 4));
                assert_eq!(out, vec![a < b, a == b]);
            }
        }
    }

    #[test]
    fn maj5_cascade_votes() {
        let net = maj5_cascade();
        for x in 0..512u64 {
            let m1 = (x & 0x1f).count_ones() >= 3;
            let m2 = (m1 as u32 + (x >> 5).count_ones()) >= 3;
            assert_eq!(eval(&net, x), vec![m1, m2]);
        }
    }

    #[test]
    fn full_adder_pipeline() {
        let r = run_pipeline(
            &full_adder(),
            McDatabase::shared(),
            &PassConfig::default(),
            &SweepConfig::default(),
        )
        .unwrap();
        assert_eq!((r.sweep.best.md, r.sweep.best.mc), (1, 1));
        let rows = r.rows("fa");
        assert_eq!(rows.len(), 3);
        assert!(rows[2].he_cost <= rows[0].he_cost.min(rows[1].he_cost));
    }
}
