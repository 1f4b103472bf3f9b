//! XOR-AND graphs with complemented edges.
//!
//! Inverters are free, so they live on edges as a phase bit of [`Signal`].
//! Node 0 is the constant-zero node; constant one is its complement.
//! Gates are always appended after their fanins, so index order is a
//! topological order.

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const CONST0: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A reference to a node, optionally complemented.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signal(u32);

impl Signal {
    pub const ZERO: Signal = Signal(0);
    pub const ONE: Signal = Signal(1);

    pub fn new(node: NodeId, complemented: bool) -> Self {
        Signal(node.0 << 1 | complemented as u32)
    }

    pub fn node(self) -> NodeId {
        NodeId(self.0 >> 1)
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn regular(self) -> Signal {
        Signal(self.0 & !1)
    }

    pub fn complement_if(self, c: bool) -> Signal {
        Signal(self.0 ^ c as u32)
    }

    pub fn is_const(self) -> bool {
        self.0 >> 1 == 0
    }
}

impl Not for Signal {
    type Output = Signal;
    fn not(self) -> Signal {
        Signal(self.0 ^ 1)
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!n{}", self.node().0)
        } else {
            write!(f, "n{}", self.node().0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Xor,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Xor => "XOR",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Const0,
    /// Primary input with its position in the input list.
    Input(u32),
    Gate {
        kind: GateKind,
        fanins: [Signal; 2],
    },
}

/// Literal-like handles shared by networks and e-graphs, so both use the
/// same gate normalization.
pub trait Literal: Copy + Ord {
    fn zero() -> Self;
    fn is_complemented(self) -> bool;
    fn complement_if(self, c: bool) -> Self;
    fn regular(self) -> Self {
        self.complement_if(self.is_complemented())
    }
    fn is_const(self) -> bool;
}

impl Literal for Signal {
    fn zero() -> Self {
        Signal::ZERO
    }
    fn is_complemented(self) -> bool {
        Signal::is_complemented(self)
    }
    fn complement_if(self, c: bool) -> Self {
        Signal::complement_if(self, c)
    }
    fn is_const(self) -> bool {
        Signal::is_const(self)
    }
}

/// Result of normalizing a two-input gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalized<L> {
    Folded(L),
    Gate {
        kind: GateKind,
        fanins: [L; 2],
        complemented: bool,
    },
}

/// Sorts operands, pushes XOR input complements to the output and folds
/// trivial cases (idempotence, self-cancellation, constants).
pub fn normalize<L: Literal>(kind: GateKind, a: L, b: L) -> Normalized<L> {
    match kind {
        GateKind::And => {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            if a.regular() == b.regular() {
                return Normalized::Folded(if a == b { a } else { L::zero() });
            }
            if a.is_const() {
                return Normalized::Folded(if a.is_complemented() { b } else { L::zero() });
            }
            Normalized::Gate {
                kind,
                fanins: [a, b],
                complemented: false,
            }
        }
        GateKind::Xor => {
            let c = a.is_complemented() ^ b.is_complemented();
            let (a, b) = (a.regular(), b.regular());
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            if a == b {
                return Normalized::Folded(L::zero().complement_if(c));
            }
            if a.is_const() {
                return Normalized::Folded(b.complement_if(c));
            }
            Normalized::Gate {
                kind,
                fanins: [a, b],
                complemented: c,
            }
        }
    }
}

/// Something that can construct gates over its own literal type.
pub trait GateBuilder {
    type Lit: Literal;

    fn build_gate(&mut self, kind: GateKind, a: Self::Lit, b: Self::Lit) -> Self::Lit;

    fn build_and(&mut self, a: Self::Lit, b: Self::Lit) -> Self::Lit {
        self.build_gate(GateKind::And, a, b)
    }

    fn build_xor(&mut self, a: Self::Lit, b: Self::Lit) -> Self::Lit {
        self.build_gate(GateKind::Xor, a, b)
    }

    /// XOR of all literals; constant zero when empty.
    fn build_xor_all(&mut self, lits: &[Self::Lit]) -> Self::Lit {
        let mut acc = Self::Lit::zero();
        for &l in lits {
            acc = self.build_xor(acc, l);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkStats {
    pub md: u32,
    pub mc: u32,
    /// Live gates (AND and XOR).
    pub node_count: u32,
    /// Multiplicative depth of every node, indexed by node id.
    pub level_per_node: Vec<u32>,
}

#[derive(Clone, Default)]
pub struct XagNetwork {
    nodes: Vec<Node>,
    inputs: Vec<NodeId>,
    input_names: Vec<String>,
    outputs: Vec<(String, Signal)>,
    strash: HashMap<(GateKind, Signal, Signal), NodeId>,
}

impl fmt::Debug for XagNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("XagNetwork")
            .field("inputs", &self.input_names)
            .field("gates", &self.num_gates())
            .field("outputs", &self.outputs)
            .finish()
    }
}

impl XagNetwork {
    pub fn new() -> Self {
        XagNetwork {
            nodes: vec![Node::Const0],
            ..Default::default()
        }
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> Signal {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node::Input(self.inputs.len() as u32));
        self.inputs.push(id);
        self.input_names.push(name.into());
        Signal::new(id, false)
    }

    pub fn add_output(&mut self, name: impl Into<String>, s: Signal) -> Result<()> {
        self.check(s)?;
        self.outputs.push((name.into(), s));
        Ok(())
    }

    fn check(&self, s: Signal) -> Result<()> {
        if s.node().index() < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::InvalidSignal(s.node().0))
        }
    }

    /// Adds a gate, returning the signal of an existing equivalent gate when
    /// structural hashing or folding finds one.
    pub fn add_gate(&mut self, kind: GateKind, a: Signal, b: Signal) -> Result<Signal> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.gate(kind, a, b))
    }

    pub fn and(&mut self, a: Signal, b: Signal) -> Signal {
        self.gate(GateKind::And, a, b)
    }

    pub fn xor(&mut self, a: Signal, b: Signal) -> Signal {
        self.gate(GateKind::Xor, a, b)
    }

    pub(crate) fn gate(&mut self, kind: GateKind, a: Signal, b: Signal) -> Signal {
        debug_assert!(a.node().index() < self.nodes.len() && b.node().index() < self.nodes.len());
        match normalize(kind, a, b) {
            Normalized::Folded(s) => s,
            Normalized::Gate {
                kind,
                fanins,
                complemented,
            } => {
                let key = (kind, fanins[0], fanins[1]);
                let id = match self.strash.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = NodeId(self.nodes.len() as u32);
                        self.nodes.push(Node::Gate { kind, fanins });
                        self.strash.insert(key, id);
                        id
                    }
                };
                Signal::new(id, complemented)
            }
        }
    }

    /// Existing gate for the normalized operands, if any.
    pub fn find_gate(&self, kind: GateKind, a: Signal, b: Signal) -> Option<Signal> {
        match normalize(kind, a, b) {
            Normalized::Folded(s) => Some(s),
            Normalized::Gate {
                kind,
                fanins,
                complemented,
            } => self
                .strash
                .get(&(kind, fanins[0], fanins[1]))
                .map(|&id| Signal::new(id, complemented)),
        }
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_gates(&self) -> usize {
        self.nodes.len() - 1 - self.inputs.len()
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn input_signal(&self, i: usize) -> Signal {
        Signal::new(self.inputs[i], false)
    }

    pub fn outputs(&self) -> &[(String, Signal)] {
        &self.outputs
    }

    pub fn set_output(&mut self, i: usize, s: Signal) {
        self.outputs[i].1 = s;
    }

    pub fn fanins(&self, id: NodeId) -> Option<[Signal; 2]> {
        match self.nodes[id.index()] {
            Node::Gate { fanins, .. } => Some(fanins),
            _ => None,
        }
    }

    pub fn is_and(&self, id: NodeId) -> bool {
        matches!(
            self.nodes[id.index()],
            Node::Gate {
                kind: GateKind::And,
                ..
            }
        )
    }

    pub fn is_gate(&self, id: NodeId) -> bool {
        matches!(self.nodes[id.index()], Node::Gate { .. })
    }

    /// Nodes reachable from the outputs.
    pub fn live_mask(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.outputs.iter().map(|(_, s)| s.node()).collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut live[n.index()], true) {
                continue;
            }
            if let Some(f) = self.fanins(n) {
                stack.extend(f.iter().map(|s| s.node()));
            }
        }
        live
    }

    pub fn levels(&self) -> Vec<u32> {
        let mut level = vec![0u32; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Gate { kind, fanins } = node {
                let m = level[fanins[0].node().index()].max(level[fanins[1].node().index()]);
                level[i] = m + (*kind == GateKind::And) as u32;
            }
        }
        level
    }

    pub fn compute_stats(&self) -> NetworkStats {
        let level = self.levels();
        let live = self.live_mask();
        let md = self
            .outputs
            .iter()
            .map(|(_, s)| level[s.node().index()])
            .max()
            .unwrap_or(0);
        let mut mc = 0;
        let mut node_count = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            if live[i] {
                if let Node::Gate { kind, .. } = node {
                    node_count += 1;
                    if *kind == GateKind::And {
                        mc += 1;
                    }
                }
            }
        }
        NetworkStats {
            md,
            mc,
            node_count,
            level_per_node: level,
        }
    }

    /// Removes dead nodes. All primary inputs are kept so the interface is
    /// unchanged.
    pub fn cleanup(&self) -> XagNetwork {
        self.rebuild(|s| s)
    }

    /// Copies the live cone into a fresh network, redirecting every fanin and
    /// output through `resolve` first.
    pub(crate) fn rebuild(&self, resolve: impl Fn(Signal) -> Signal) -> XagNetwork {
        let mut out = XagNetwork::new();
        let mut map: Vec<Option<Signal>> = vec![None; self.nodes.len()];
        map[0] = Some(Signal::ZERO);
        for (i, name) in self.input_names.iter().enumerate() {
            map[self.inputs[i].index()] = Some(out.add_input(name.clone()));
        }
        let lookup = |map: &[Option<Signal>], s: Signal| -> Option<Signal> {
            let r = resolve(s);
            map[r.node().index()].map(|m| m.complement_if(r.is_complemented()))
        };
        for (_, s) in &self.outputs {
            // iterative post-order over resolved fanins
            let mut stack = vec![(resolve(*s).node(), false)];
            while let Some((n, expanded)) = stack.pop() {
                if map[n.index()].is_some() {
                    continue;
                }
                let Some(f) = self.fanins(n) else {
                    unreachable!("inputs and constant are mapped up front")
                };
                if expanded {
                    let a = lookup(&map, f[0]).expect("fanin mapped");
                    let b = lookup(&map, f[1]).expect("fanin mapped");
                    let Node::Gate { kind, .. } = self.nodes[n.index()] else {
                        unreachable!()
                    };
                    map[n.index()] = Some(out.gate(kind, a, b));
                } else {
                    stack.push((n, true));
                    for fi in f {
                        let r = resolve(fi).node();
                        if map[r.index()].is_none() {
                            stack.push((r, false));
                        }
                    }
                }
            }
        }
        for (name, s) in &self.outputs {
            let m = lookup(&map, *s).expect("output mapped");
            out.outputs.push((name.clone(), m));
        }
        out
    }
}

impl GateBuilder for XagNetwork {
    type Lit = Signal;

    fn build_gate(&mut self, kind: GateKind, a: Signal, b: Signal) -> Signal {
        self.gate(kind, a, b)
    }
}
