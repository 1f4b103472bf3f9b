mod common;

use std::collections::HashMap;
use std::time::Duration;

use common::{brute_force, corpus, small_traces};
use proptest::prelude::*;
use xagtrace::bench::run_pipeline;
use xagtrace::extract::{
    depth_bounded_ilp, greedy_md_dag, he_cost_sweep, ExtractGraph, IlpInstance, IlpValues, SolverStatus, SweepConfig,
};
use xagtrace::mcdb::McDatabase;
use xagtrace::passes::PassConfig;
use xagtrace::sim::equivalent;

#[test]
fn greedy_and_solver_match_brute_force() {
    for (net, _, g) in small_traces(40, 12) {
        let bf = brute_force(&g);
        let greedy = greedy_md_dag(&g).unwrap();
        assert_eq!(Some(greedy.md), bf.min_md);
        assert!(equivalent(&net, &greedy.network).unwrap().equal);
        for d in 0..5u32 {
            let out = depth_bounded_ilp(&g, d, None, &[]).unwrap();
            match bf.min_mc[d as usize] {
                None => assert_eq!(out.status, SolverStatus::Infeasible),
                Some(mc) => {
                    assert_eq!(out.status, SolverStatus::Optimal);
                    let sol = out.solution.unwrap();
                    assert_eq!(sol.mc, mc);
                    assert!(sol.md <= d);
                    assert!(equivalent(&net, &sol.network).unwrap().equal);
                    assert!(IlpInstance::new(&g, d).is_satisfied(&out.values.unwrap()));
                }
            }
        }
    }
}

/// Reads the constraint rows and bounds back from LP text and evaluates
/// them on named values.
fn lp_satisfied(lp: &str, values: &HashMap<String, i64>) -> bool {
    let mut section = "";
    for line in lp.lines() {
        let t = line.trim();
        if matches!(t, "Minimize" | "Subject To" | "Bounds" | "Binary" | "General" | "End") {
            section = t;
            continue;
        }
        match section {
            "Subject To" => {
                let (_, body) = t.split_once(": ").unwrap();
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let (rhs, op) = (
                    tokens[tokens.len() - 1].parse::<i64>().unwrap(),
                    tokens[tokens.len() - 2],
                );
                let mut lhs = 0;
                let (mut sign, mut coef) = (1, 1);
                for tok in &tokens[..tokens.len() - 2] {
                    match *tok {
                        "+" => sign = 1,
                        "-" => sign = -1,
                        v if v.chars().all(|c| c.is_ascii_digit()) => coef = v.parse().unwrap(),
                        var => {
                            lhs += sign * coef * values[var];
                            sign = 1;
                            coef = 1;
                        }
                    }
                }
                let ok = match op {
                    "<=" => lhs <= rhs,
                    ">=" => lhs >= rhs,
                    "=" => lhs == rhs,
                    _ => panic!("operator {op}"),
                };
                if !ok {
                    return false;
                }
            }
            "Bounds" => {
                let p: Vec<&str> = t.split_whitespace().collect();
                let (lo, var, hi) = (p[0].parse::<i64>().unwrap(), p[2], p[4].parse::<i64>().unwrap());
                if !(lo..=hi).contains(&values[var]) {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

fn named(v: &IlpValues) -> HashMap<String, i64> {
    let mut m = HashMap::new();
    for (i, &x) in v.x.iter().enumerate() {
        m.insert(format!("x_{i}"), x as i64);
    }
    for c in 0..v.s.len() {
        m.insert(format!("s_{c}"), v.s[c] as i64);
        m.insert(format!("d_{c}"), v.d[c]);
        m.insert(format!("t_{c}"), v.t[c]);
    }
    m
}

#[test]
fn exported_lp_accepts_solver_values() {
    for (_, _, g) in small_traces(15, 12) {
        let greedy = greedy_md_dag(&g).unwrap();
        let out = depth_bounded_ilp(&g, greedy.md, None, &[]).unwrap();
        let values = out.values.unwrap();
        let lp = IlpInstance::new(&g, greedy.md).export_lp();
        assert!(lp_satisfied(&lp, &named(&values)));
        // shrinking the bound below the solution depth breaks a row
        if greedy.md > 0 {
            let tight = IlpInstance::new(&g, greedy.md - 1).export_lp();
            assert!(!lp_satisfied(&tight, &named(&values)));
        }
    }
}

#[test]
fn sweep_never_loses_to_flows_or_greedy() {
    let sweep = SweepConfig {
        timeout: Some(Duration::from_millis(200)),
        ..SweepConfig::default()
    };
    for net in corpus(12, 3000) {
        let r = run_pipeline(&net, McDatabase::shared(), &PassConfig::default(), &sweep).unwrap();
        let best = &r.sweep.best;
        assert!(equivalent(&net, &best.network).unwrap().equal);
        assert!(best.he_cost <= r.sweep.greedy.he_cost);
        for (_, flow) in &r.baselines {
            let st = flow.compute_stats();
            assert!(best.he_cost <= xagtrace::cost::he_cost(st.md, st.mc));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_extraction_is_equivalent(seed in 0u64..1_000_000) {
        let net = &corpus(1, seed)[0];
        let (mut eg, _) = xagtrace::egraph::EGraph::from_network(net);
        for order in xagtrace::passes::FlowOrder::BOTH {
            xagtrace::passes::run_flow(net, order, McDatabase::shared(), Some(&mut eg), &PassConfig::default()).unwrap();
        }
        let g = ExtractGraph::new(&eg);
        let cfg = SweepConfig { k: 1, timeout: Some(Duration::from_millis(50)), witnesses: vec![] };
        let r = he_cost_sweep(&g, &cfg).unwrap();
        prop_assert!(equivalent(net, &r.greedy.network).unwrap().equal);
        prop_assert!(equivalent(net, &r.best.network).unwrap().equal);
        prop_assert!(r.best.he_cost <= r.greedy.he_cost);
        prop_assert_eq!(r.best.he_cost, xagtrace::cost::he_cost(r.best.md, r.best.mc));
    }
}
