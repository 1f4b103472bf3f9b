mod common;

use common::corpus;
use xagtrace::egraph::EGraph;
use xagtrace::mcdb::McDatabase;
use xagtrace::passes::{cut_rewrite, esop_balance, resubstitute, run_flow, FlowOrder, PassConfig};
use xagtrace::sim::equivalent;

#[test]
fn passes_preserve_function_and_metrics() {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    for net in corpus(40, 1000) {
        let st = net.compute_stats();
        let rw = cut_rewrite(&net, db, None, &cfg).unwrap().network;
        assert!(equivalent(&net, &rw).unwrap().equal);
        assert!(rw.compute_stats().mc <= st.mc);
        let rs = resubstitute(&net, None, &cfg).unwrap().network;
        assert!(equivalent(&net, &rs).unwrap().equal);
        assert!(rs.compute_stats().mc <= st.mc);
        let bl = esop_balance(&net, None, &cfg).unwrap().network;
        assert!(equivalent(&net, &bl).unwrap().equal);
        assert!(bl.compute_stats().md <= st.md);
    }
}

#[test]
fn traced_flows_are_sound_and_contained() {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    for net in corpus(20, 1000) {
        for order in FlowOrder::BOTH {
            let (mut eg, _) = EGraph::from_network(&net);
            let out = run_flow(&net, order, db, Some(&mut eg), &cfg).unwrap().network;
            assert!(equivalent(&net, &out).unwrap().equal);
            eg.check_soundness().unwrap();
            eg.check_congruence().unwrap();
            let nodes = eg.num_nodes();
            let classes = eg.num_classes();
            eg.import(&out);
            assert_eq!((eg.num_nodes(), eg.num_classes()), (nodes, classes));
        }
    }
}

#[test]
fn flows_are_deterministic() {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    let net = &corpus(3, 1000)[2];
    let a = run_flow(net, FlowOrder::McFirst, db, None, &cfg).unwrap().network;
    let b = run_flow(net, FlowOrder::McFirst, db, None, &cfg).unwrap().network;
    assert_eq!(
        xagtrace::netlist::write_xag_text(&a),
        xagtrace::netlist::write_xag_text(&b)
    );
}

#[test]
fn tracing_does_not_change_flow_results() {
    let db = McDatabase::shared();
    let cfg = PassConfig::default();
    for net in corpus(10, 2000) {
        let (mut eg, _) = EGraph::from_network(&net);
        for order in FlowOrder::BOTH {
            let plain = run_flow(&net, order, db, None, &cfg).unwrap().network;
            let traced = run_flow(&net, order, db, Some(&mut eg), &cfg).unwrap().network;
            assert_eq!(
                xagtrace::netlist::write_xag_text(&plain),
                xagtrace::netlist::write_xag_text(&traced)
            );
        }
    }
}
