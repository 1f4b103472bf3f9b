//! Extraction of a concrete network from a traced e-graph.
//!
//! Everything here works on [`ExtractGraph`], a dense snapshot of the classes
//! reachable from the outputs. A *choice* picks at most one member per class;
//! the classes reachable from the outputs through chosen members form the
//! extracted DAG.

mod bnb;
mod greedy;
mod ilp;
mod sweep;

use std::collections::HashMap;

pub use bnb::{depth_bounded_ilp, IlpOutcome};
pub use greedy::{greedy_md_dag, min_depths};
pub use ilp::{Constraint, IlpInstance, IlpValues, Var};
pub use sweep::{he_cost_sweep, SweepAttempt, SweepConfig, SweepResult};

use crate::cost::he_cost;
use crate::egraph::{ClassId, EGraph, ELit, ENode};
use crate::error::{Error, Result};
use crate::xag::{Signal, XagNetwork};

/// One chosen member per class, indexed by dense class.
pub type Choice = Vec<Option<usize>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub node: ENode,
    /// The class value is `node ^ phase`.
    pub phase: bool,
    /// Dense class and complement of each operand.
    pub children: Vec<(usize, bool)>,
}

impl Member {
    pub fn is_and(&self) -> bool {
        self.node.is_and()
    }

    /// Operand classes without repeats.
    pub fn child_classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.children
            .iter()
            .enumerate()
            .filter(|&(i, c)| self.children[..i].iter().all(|d| d.0 != c.0))
            .map(|(_, c)| c.0)
    }
}

#[derive(Clone, Debug)]
pub struct ExtractGraph {
    /// E-graph class of each dense class.
    pub classes: Vec<ClassId>,
    pub members: Vec<Vec<Member>>,
    pub inputs: Vec<String>,
    /// Output name, dense class and complement.
    pub outputs: Vec<(String, usize, bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverStatus {
    Optimal,
    /// Best solution found before the time limit.
    Incumbent,
    Infeasible,
    /// Time limit reached without any solution.
    Timeout,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Incumbent => "incumbent",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Greedy,
    Ilp { bound: u32 },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Greedy => write!(f, "greedy"),
            Method::Ilp { bound } => write!(f, "ilp(md<={bound})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtractionSolution {
    pub network: XagNetwork,
    pub md: u32,
    pub mc: u32,
    pub he_cost: u64,
    pub method: Method,
    pub status: SolverStatus,
    pub choice: Choice,
}

impl ExtractGraph {
    /// Snapshot of the classes reachable from the e-graph's outputs.
    pub fn new(eg: &EGraph) -> ExtractGraph {
        let outputs = eg.outputs();
        let mut index: HashMap<ClassId, usize> = HashMap::new();
        let mut classes = Vec::new();
        let mut raw: Vec<Vec<(ENode, bool)>> = Vec::new();
        let mut queue: Vec<ClassId> = outputs.iter().map(|(_, l)| l.class()).collect();
        while let Some(c) = queue.pop() {
            if index.contains_key(&c) {
                continue;
            }
            index.insert(c, classes.len());
            classes.push(c);
            let nodes = eg.class_nodes(c);
            for (n, _) in &nodes {
                queue.extend(n.operands().iter().map(|l| l.class()));
            }
            raw.push(nodes);
        }
        let members = raw
            .into_iter()
            .map(|nodes| {
                nodes
                    .into_iter()
                    .map(|(node, phase)| Member {
                        node,
                        phase,
                        children: node
                            .operands()
                            .iter()
                            .map(|l| (index[&l.class()], l.is_complemented()))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        ExtractGraph {
            classes,
            members,
            inputs: eg.inputs().to_vec(),
            outputs: outputs
                .into_iter()
                .map(|(n, l)| (n, index[&l.class()], l.is_complemented()))
                .collect(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_members(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    pub fn class_index(&self, c: ClassId) -> Option<usize> {
        self.classes.iter().position(|&x| x == c)
    }

    /// Output classes without repeats, in output order.
    pub fn output_classes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &(_, c, _) in &self.outputs {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Classes reachable from the outputs through `choice`, children before
    /// parents. `None` if the choice is incomplete or cyclic.
    pub fn topo_order(&self, choice: &[Option<usize>]) -> Option<Vec<usize>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.num_classes()];
        let mut order = Vec::new();
        for c in self.output_classes() {
            if state[c] == 2 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(c, 0)];
            state[c] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let m = &self.members[v][(*choice.get(v)?)?];
                if let Some(&(k, _)) = m.children.get(*next) {
                    *next += 1;
                    match state[k] {
                        0 => {
                            state[k] = 1;
                            stack.push((k, 0));
                        }
                        1 => return None,
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                    stack.pop();
                }
            }
        }
        Some(order)
    }

    /// Multiplicative depth and AND count of the DAG selected by `choice`.
    pub fn evaluate(&self, choice: &[Option<usize>]) -> Option<(u32, u32)> {
        let order = self.topo_order(choice)?;
        let mut depth = vec![0u32; self.num_classes()];
        let mut mc = 0;
        for &c in &order {
            let m = &self.members[c][choice[c]?];
            let d = m.children.iter().map(|&(k, _)| depth[k]).max().unwrap_or(0);
            depth[c] = d + m.is_and() as u32;
            mc += m.is_and() as u32;
        }
        let md = self.output_classes().iter().map(|&c| depth[c]).max().unwrap_or(0);
        Some((md, mc))
    }

    /// Drops choices for classes the outputs do not reach.
    pub fn trim(&self, choice: &[Option<usize>]) -> Option<Choice> {
        let order = self.topo_order(choice)?;
        let mut out = vec![None; self.num_classes()];
        for c in order {
            out[c] = choice[c];
        }
        Some(out)
    }

    /// Builds the network selected by `choice`. Inputs follow the e-graph's
    /// input list, so the interface matches the traced source.
    pub fn materialize(&self, choice: &[Option<usize>]) -> Result<XagNetwork> {
        let order = self
            .topo_order(choice)
            .ok_or_else(|| Error::Infeasible("choice is incomplete or cyclic".into()))?;
        let mut net = XagNetwork::new();
        let inputs: Vec<Signal> = self.inputs.iter().map(|n| net.add_input(n.clone())).collect();
        let mut sig: Vec<Option<Signal>> = vec![None; self.num_classes()];
        for &c in &order {
            let m = &self.members[c][choice[c].expect("ordered classes are chosen")];
            let child = |i: usize| {
                let (k, neg) = m.children[i];
                sig[k].expect("children come first").complement_if(neg)
            };
            let s = match m.node {
                ENode::Const0 => Signal::ZERO,
                ENode::Input(i) => inputs[i as usize],
                ENode::Gate { kind, .. } => {
                    let (a, b) = (child(0), child(1));
                    net.add_gate(kind, a, b)?
                }
            };
            sig[c] = Some(s.complement_if(m.phase));
        }
        for (name, c, neg) in &self.outputs {
            net.add_output(name.clone(), sig[*c].expect("output chosen").complement_if(*neg))?;
        }
        Ok(net)
    }

    /// Materializes `choice` and measures the result.
    pub fn solution(&self, choice: Choice, method: Method, status: SolverStatus) -> Result<ExtractionSolution> {
        let network = self.materialize(&choice)?;
        let st = network.compute_stats();
        Ok(ExtractionSolution {
            network,
            md: st.md,
            mc: st.mc,
            he_cost: he_cost(st.md, st.mc),
            method,
            status,
            choice,
        })
    }

    /// The choice that reproduces `net`, provided the e-graph contains it:
    /// each class takes the member of its earliest node by (level, index),
    /// which keeps the choice acyclic and no deeper or larger than `net`.
    pub fn witness(&self, eg: &EGraph, net: &XagNetwork) -> Option<Choice> {
        let live = net.live_mask();
        let level = net.levels();
        let mut lit: Vec<Option<ELit>> = vec![None; net.num_nodes()];
        lit[0] = Some(ELit::ZERO);
        for (i, name) in net.input_names().iter().enumerate() {
            lit[net.inputs()[i].index()] = Some(eg.input_lit(name)?);
        }
        let mut best: Vec<Option<((u32, usize), usize)>> = vec![None; self.num_classes()];
        let index: HashMap<ClassId, usize> = self.classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        for (i, node) in net.nodes().iter().enumerate() {
            if !live[i] {
                continue;
            }
            let enode = match *node {
                crate::xag::Node::Const0 => ENode::Const0,
                crate::xag::Node::Input(_) => {
                    let l = lit[i]?;
                    eg.class_nodes(l.class())
                        .into_iter()
                        .find(|(n, _)| matches!(n, ENode::Input(_)))?
                        .0
                }
                crate::xag::Node::Gate { kind, fanins } => {
                    let op = |s: Signal| lit[s.node().index()].map(|l| l.complement_if(s.is_complemented()));
                    let ops = [op(fanins[0])?, op(fanins[1])?];
                    let l = eg.lookup(ENode::Gate { kind, ops })?;
                    lit[i] = Some(l);
                    match eg.canonicalize(ENode::Gate { kind, ops }) {
                        crate::egraph::Canonical::Node { node, .. } => node,
                        crate::egraph::Canonical::Folded(_) => continue,
                    }
                }
            };
            let l = lit[i]?;
            let Some(&c) = index.get(&l.class()) else { continue };
            let m = self.members[c].iter().position(|m| m.node == enode)?;
            let key = (level[i], i);
            if best[c].is_none_or(|(k, _)| key < k) {
                best[c] = Some((key, m));
            }
        }
        let choice: Choice = best.into_iter().map(|b| b.map(|(_, m)| m)).collect();
        self.trim(&choice)
    }
}
