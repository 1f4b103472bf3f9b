use super::{cut_rewrite, esop_balance, resubstitute, GainReport, PassConfig, PassOutcome};
use crate::egraph::EGraph;
use crate::error::Result;
use crate::mcdb::McDatabase;
use crate::xag::XagNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowOrder {
    /// MC reduction to convergence, then balancing.
    McFirst,
    MdFirst,
}

impl FlowOrder {
    pub const BOTH: [FlowOrder; 2] = [FlowOrder::McFirst, FlowOrder::MdFirst];

    pub fn as_str(self) -> &'static str {
        match self {
            FlowOrder::McFirst => "mc-first",
            FlowOrder::MdFirst => "md-first",
        }
    }
}

fn mc_phase(
    mut net: XagNetwork,
    db: &McDatabase,
    trace: &mut Option<&mut EGraph>,
    cfg: &PassConfig,
    reports: &mut Vec<GainReport>,
) -> Result<XagNetwork> {
    for _ in 0..cfg.max_flow_rounds {
        let before = net.compute_stats().mc;
        let PassOutcome { network, reports: r1 } = cut_rewrite(&net, db, trace.as_deref_mut(), cfg)?;
        let PassOutcome { network, reports: r2 } = resubstitute(&network, trace.as_deref_mut(), cfg)?;
        reports.extend(r1.into_iter().chain(r2));
        net = network;
        if net.compute_stats().mc >= before {
            break;
        }
    }
    Ok(net)
}

fn md_phase(
    mut net: XagNetwork,
    trace: &mut Option<&mut EGraph>,
    cfg: &PassConfig,
    reports: &mut Vec<GainReport>,
) -> Result<XagNetwork> {
    for _ in 0..cfg.max_flow_rounds {
        let before = net.compute_stats().md;
        let PassOutcome { network, reports: r } = esop_balance(&net, trace.as_deref_mut(), cfg)?;
        reports.extend(r);
        net = network;
        if net.compute_stats().md >= before {
            break;
        }
    }
    Ok(net)
}

/// Runs the MC passes and ESOP balancing, each to convergence, in the given
/// order. With a trace, every pass records into the same e-graph.
pub fn run_flow(
    net: &XagNetwork,
    order: FlowOrder,
    db: &McDatabase,
    mut trace: Option<&mut EGraph>,
    cfg: &PassConfig,
) -> Result<PassOutcome> {
    cfg.validate()?;
    let mut reports = Vec::new();
    let net = net.cleanup();
    let network = match order {
        FlowOrder::McFirst => {
            let n = mc_phase(net, db, &mut trace, cfg, &mut reports)?;
            md_phase(n, &mut trace, cfg, &mut reports)?
        }
        FlowOrder::MdFirst => {
            let n = md_phase(net, &mut trace, cfg, &mut reports)?;
            mc_phase(n, db, &mut trace, cfg, &mut reports)?
        }
    };
    Ok(PassOutcome { network, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::equivalent;

    #[test]
    fn full_adder_mc_first() {
        let mut net = XagNetwork::new();
        let a = net.add_input("a");
        let b = net.add_input("b");
        let c = net.add_input("cin");
        let ab = net.xor(a, b);
        let s = net.xor(ab, c);
        let g1 = net.and(a, b);
        let g2 = net.and(ab, c);
        let carry = net.xor(g1, g2);
        net.add_output("sum", s).unwrap();
        net.add_output("cout", carry).unwrap();
        let out = run_flow(
            &net,
            FlowOrder::McFirst,
            McDatabase::shared(),
            None,
            &PassConfig::default(),
        )
        .unwrap();
        let st = out.network.compute_stats();
        assert_eq!((st.md, st.mc), (1, 1));
        assert!(equivalent(&net, &out.network).unwrap().equal);
    }

    #[test]
    fn empty_network_unchanged() {
        let net = XagNetwork::new();
        for order in FlowOrder::BOTH {
            let out = run_flow(&net, order, McDatabase::shared(), None, &PassConfig::default()).unwrap();
            assert_eq!(out.network.num_nodes(), 1);
        }
    }
}
