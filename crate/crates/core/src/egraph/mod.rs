//! An e-graph over XAG terms that grows by tracing cut replacements.
//!
//! Classes are stored up to polarity: a literal is a class id plus a phase,
//! exactly like a network signal, and union-find edges carry a parity bit.

mod trace;

use std::collections::HashMap;
use std::fmt;

pub use trace::{parse_trace, replay_trace, write_trace, TraceEvent};

use crate::error::{Error, Result};
use crate::sim::{exhaustive_patterns, EXHAUSTIVE_LIMIT};
use crate::xag::{normalize, GateBuilder, GateKind, Literal, Node, Normalized, Signal, XagNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

impl ClassId {
    pub const CONST: ClassId = ClassId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A class id with a complement bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ELit(u32);

impl ELit {
    pub const ZERO: ELit = ELit(0);
    pub const ONE: ELit = ELit(1);

    pub fn new(class: ClassId, complemented: bool) -> ELit {
        ELit(class.0 << 1 | complemented as u32)
    }

    pub fn class(self) -> ClassId {
        ClassId(self.0 >> 1)
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn complement_if(self, c: bool) -> ELit {
        ELit(self.0 ^ c as u32)
    }
}

impl Literal for ELit {
    fn zero() -> Self {
        ELit::ZERO
    }
    fn is_complemented(self) -> bool {
        ELit::is_complemented(self)
    }
    fn complement_if(self, c: bool) -> Self {
        ELit::complement_if(self, c)
    }
    fn is_const(self) -> bool {
        self.class() == ClassId::CONST
    }
}

impl std::ops::Not for ELit {
    type Output = ELit;
    fn not(self) -> ELit {
        ELit(self.0 ^ 1)
    }
}

impl fmt::Debug for ELit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bang = if self.is_complemented() { "!" } else { "" };
        write!(f, "{bang}c{}", self.class().0)
    }
}

impl fmt::Display for ELit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bang = if self.is_complemented() { "!" } else { "" };
        write!(f, "{bang}{}", self.class().0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ENode {
    Const0,
    /// Primary input by position in the e-graph's input list.
    Input(u32),
    Gate {
        kind: GateKind,
        ops: [ELit; 2],
    },
}

impl ENode {
    pub fn operands(&self) -> &[ELit] {
        match self {
            ENode::Gate { ops, .. } => ops,
            _ => &[],
        }
    }

    pub fn is_and(&self) -> bool {
        matches!(
            self,
            ENode::Gate {
                kind: GateKind::And,
                ..
            }
        )
    }
}

#[derive(Clone, Debug, Default)]
struct EClass {
    /// Members as `(node, phase)`: the class value is `node ^ phase`.
    nodes: Vec<(ENode, bool)>,
    /// E-nodes using this class, with the literal each one equals.
    parents: Vec<(ENode, ELit)>,
    sig: Option<Vec<u64>>,
}

/// Canonical form of an e-node after its operands have been resolved.
pub enum Canonical {
    Folded(ELit),
    Node { node: ENode, complemented: bool },
}

#[derive(Clone, Debug)]
pub struct EGraph {
    parent: Vec<ELit>,
    classes: Vec<EClass>,
    memo: HashMap<ENode, ELit>,
    inputs: Vec<String>,
    input_index: HashMap<String, u32>,
    outputs: Vec<(String, ELit)>,
    events: Vec<TraceEvent>,
    pending: Vec<ClassId>,
    patterns: Option<Vec<Vec<u64>>>,
}

impl Default for EGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl EGraph {
    /// An e-graph holding only the constant class.
    pub fn new() -> Self {
        let mut eg = EGraph {
            parent: Vec::new(),
            classes: Vec::new(),
            memo: HashMap::new(),
            inputs: Vec::new(),
            input_index: HashMap::new(),
            outputs: Vec::new(),
            events: Vec::new(),
            pending: Vec::new(),
            patterns: None,
        };
        eg.new_class(ENode::Const0);
        eg
    }

    /// Turns on signature checking for a source with `num_inputs` inputs.
    /// Has no effect above the exhaustive limit or once classes beyond the
    /// constant exist.
    pub fn enable_checking(&mut self, num_inputs: usize) {
        if num_inputs <= EXHAUSTIVE_LIMIT && self.classes.len() == 1 {
            self.patterns = Some(exhaustive_patterns(num_inputs));
            let words = self.patterns.as_ref().unwrap().first().map_or(1, |p| p.len());
            self.classes[0].sig = Some(vec![0; words]);
        }
    }

    pub fn is_checking(&self) -> bool {
        self.patterns.is_some()
    }

    /// Builds the e-graph of the live part of `net`; returns the literal of
    /// every live node (`None` for dead ones).
    pub fn from_network(net: &XagNetwork) -> (EGraph, Vec<Option<ELit>>) {
        let mut eg = EGraph::new();
        eg.enable_checking(net.inputs().len());
        let map = eg.import(net);
        for (name, s) in net.outputs() {
            let lit = map[s.node().index()]
                .expect("output is live")
                .complement_if(s.is_complemented());
            eg.add_output(name.clone(), lit);
        }
        (eg, map)
    }

    /// Hashconses the live part of `net` into the e-graph. Inputs are matched
    /// by name and created when missing.
    pub fn import(&mut self, net: &XagNetwork) -> Vec<Option<ELit>> {
        let live = net.live_mask();
        let mut map: Vec<Option<ELit>> = vec![None; net.num_nodes()];
        map[0] = Some(ELit::ZERO);
        for (i, name) in net.input_names().iter().enumerate() {
            map[net.inputs()[i].index()] = Some(self.add_input(name));
        }
        for (i, node) in net.nodes().iter().enumerate() {
            if let Node::Gate { kind, fanins } = *node {
                if live[i] {
                    let lit = |s: Signal| {
                        map[s.node().index()]
                            .expect("fanin imported")
                            .complement_if(s.is_complemented())
                    };
                    let (a, b) = (lit(fanins[0]), lit(fanins[1]));
                    map[i] = Some(self.build_gate(kind, a, b));
                }
            }
        }
        map
    }

    pub fn add_input(&mut self, name: &str) -> ELit {
        if let Some(&i) = self.input_index.get(name) {
            return self.find(self.memo[&ENode::Input(i)]);
        }
        let i = self.inputs.len() as u32;
        self.inputs.push(name.to_string());
        self.input_index.insert(name.to_string(), i);
        let lit = self.new_class(ENode::Input(i));
        self.events.push(TraceEvent::Input {
            id: lit.class().0,
            name: name.to_string(),
        });
        lit
    }

    pub fn add_output(&mut self, name: impl Into<String>, lit: ELit) {
        let name = name.into();
        let lit = self.find(lit);
        self.events.push(TraceEvent::Output {
            name: name.clone(),
            lit,
        });
        self.outputs.push((name, lit));
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// Output literals, canonicalized.
    pub fn outputs(&self) -> Vec<(String, ELit)> {
        self.outputs.iter().map(|(n, l)| (n.clone(), self.find(*l))).collect()
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn find(&self, lit: ELit) -> ELit {
        let mut cur = lit;
        loop {
            let p = self.parent[cur.class().index()];
            if p.class() == cur.class() {
                return cur;
            }
            cur = p.complement_if(cur.is_complemented());
        }
    }

    fn find_mut(&mut self, lit: ELit) -> ELit {
        let root = self.find(lit);
        // path compression
        let mut cur = lit;
        while cur.class() != root.class() {
            let p = self.parent[cur.class().index()];
            let rel = root.complement_if(cur.is_complemented());
            self.parent[cur.class().index()] = rel;
            cur = p.complement_if(cur.is_complemented());
        }
        root
    }

    pub fn is_root(&self, c: ClassId) -> bool {
        self.parent[c.index()].class() == c
    }

    /// Number of classes ever created, including merged ones.
    pub fn num_class_ids(&self) -> usize {
        self.classes.len()
    }

    /// Canonical classes (including the constant class).
    pub fn class_ids(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.classes.len() as u32).map(ClassId).filter(|&c| self.is_root(c))
    }

    pub fn num_classes(&self) -> usize {
        self.class_ids().count()
    }

    /// Number of distinct canonical e-nodes.
    pub fn num_nodes(&self) -> usize {
        self.class_ids().map(|c| self.class_nodes(c).len()).sum()
    }

    /// Canonical members of a root class, deduplicated, in insertion order.
    /// Members that fold to a literal are omitted.
    pub fn class_nodes(&self, c: ClassId) -> Vec<(ENode, bool)> {
        let mut out: Vec<(ENode, bool)> = Vec::new();
        for &(node, ph) in &self.classes[c.index()].nodes {
            if let Canonical::Node { node, complemented } = self.canonicalize(node) {
                let m = (node, ph ^ complemented);
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }

    /// Simulation signature of a class (checking mode only).
    pub fn signature(&self, lit: ELit) -> Option<Vec<u64>> {
        let lit = self.find(lit);
        let sig = self.classes[lit.class().index()].sig.as_ref()?;
        Some(if lit.is_complemented() {
            sig.iter().map(|w| !w).collect()
        } else {
            sig.clone()
        })
    }

    pub fn canonicalize(&self, node: ENode) -> Canonical {
        match node {
            ENode::Gate { kind, ops } => match normalize(kind, self.find(ops[0]), self.find(ops[1])) {
                Normalized::Folded(l) => Canonical::Folded(l),
                Normalized::Gate {
                    kind,
                    fanins,
                    complemented,
                } => Canonical::Node {
                    node: ENode::Gate { kind, ops: fanins },
                    complemented,
                },
            },
            other => Canonical::Node {
                node: other,
                complemented: false,
            },
        }
    }

    /// The literal equal to `node` if the e-graph already contains it, without
    /// adding anything. Gates whose canonical form folds return the folded
    /// literal.
    pub fn lookup(&self, node: ENode) -> Option<ELit> {
        match self.canonicalize(node) {
            Canonical::Folded(l) => Some(self.find(l)),
            Canonical::Node { node, complemented } => {
                self.memo.get(&node).map(|&l| self.find(l).complement_if(complemented))
            }
        }
    }

    pub fn input_lit(&self, name: &str) -> Option<ELit> {
        let &i = self.input_index.get(name)?;
        self.lookup(ENode::Input(i))
    }

    fn node_signature(&self, node: &ENode) -> Option<Vec<u64>> {
        let patterns = self.patterns.as_ref()?;
        Some(match *node {
            ENode::Const0 => vec![0; patterns.first().map_or(1, |p| p.len())],
            ENode::Input(i) => patterns.get(i as usize)?.clone(),
            ENode::Gate { kind, ops } => {
                let a = self.signature(ops[0])?;
                let b = self.signature(ops[1])?;
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| match kind {
                        GateKind::And => x & y,
                        GateKind::Xor => x ^ y,
                    })
                    .collect()
            }
        })
    }

    fn new_class(&mut self, node: ENode) -> ELit {
        let id = ClassId(self.classes.len() as u32);
        let lit = ELit::new(id, false);
        let sig = self.node_signature(&node);
        if sig.is_none() && matches!(node, ENode::Input(_)) {
            // an input beyond the checked interface disables checking
            self.patterns = None;
            for c in &mut self.classes {
                c.sig = None;
            }
        }
        self.parent.push(lit);
        self.classes.push(EClass {
            nodes: vec![(node, false)],
            parents: Vec::new(),
            sig,
        });
        for op in node.operands() {
            self.classes[op.class().index()].parents.push((node, lit));
        }
        self.memo.insert(node, lit);
        lit
    }

    /// Adds an already normalized e-node, returning the literal equal to it.
    fn add_node(&mut self, node: ENode) -> ELit {
        if let Some(&l) = self.memo.get(&node) {
            return self.find_mut(l);
        }
        let lit = self.new_class(node);
        if let ENode::Gate { kind, ops } = node {
            self.events.push(TraceEvent::Gate {
                id: lit.class().0,
                kind,
                ops,
            });
        }
        lit
    }

    /// Asserts `a == b` and restores congruence closure.
    pub fn union(&mut self, a: ELit, b: ELit) -> Result<bool> {
        let (ra, rb) = (self.find(a), self.find(b));
        let merged = self.union_inner(a, b)?;
        if merged {
            self.events.push(TraceEvent::Union {
                a: ra.class().0,
                b: rb.class().0,
                inv: ra.is_complemented() ^ rb.is_complemented(),
            });
        }
        self.rebuild()?;
        Ok(merged)
    }

    fn union_inner(&mut self, a: ELit, b: ELit) -> Result<bool> {
        let a = self.find_mut(a);
        let b = self.find_mut(b);
        if a.class() == b.class() {
            if a == b {
                return Ok(false);
            }
            return Err(Error::TraceSoundness(format!(
                "class {} equated with its complement",
                a.class().0
            )));
        }
        if let (Some(sa), Some(sb)) = (self.signature(a), self.signature(b)) {
            if sa != sb {
                return Err(Error::TraceSoundness(format!(
                    "union of {a:?} and {b:?} with different signatures"
                )));
            }
        }
        let inv = a.is_complemented() ^ b.is_complemented();
        let (root, child) = if a.class() < b.class() {
            (a.class(), b.class())
        } else {
            (b.class(), a.class())
        };
        self.parent[child.index()] = ELit::new(root, inv);
        let moved = std::mem::take(&mut self.classes[child.index()]);
        let r = &mut self.classes[root.index()];
        r.nodes.extend(moved.nodes.into_iter().map(|(n, ph)| (n, ph ^ inv)));
        r.parents.extend(moved.parents);
        self.pending.push(root);
        Ok(true)
    }

    /// Re-canonicalizes the users of merged classes, merging congruent
    /// e-nodes and classes whose members fold to another literal.
    fn rebuild(&mut self) -> Result<()> {
        while let Some(c) = self.pending.pop() {
            let c = self.find(ELit::new(c, false)).class();
            let parents = std::mem::take(&mut self.classes[c.index()].parents);
            for (node, _) in &parents {
                self.memo.remove(node);
            }
            let mut kept: Vec<(ENode, ELit)> = Vec::with_capacity(parents.len());
            for (node, lit) in parents {
                let lit = self.find_mut(lit);
                match self.canonicalize(node) {
                    Canonical::Folded(l) => {
                        self.union_inner(lit, l)?;
                    }
                    Canonical::Node { node, complemented } => {
                        let owner = lit.complement_if(complemented);
                        if let Some(&existing) = self.memo.get(&node) {
                            self.union_inner(existing, owner)?;
                        }
                        let owner = self.find_mut(owner);
                        self.memo.insert(node, owner);
                        if !kept.iter().any(|(n, _)| *n == node) {
                            kept.push((node, owner));
                        }
                    }
                }
            }
            let c = self.find(ELit::new(c, false)).class();
            self.classes[c.index()].parents.extend(kept);
        }
        Ok(())
    }

    /// Checks that every member of every class matches the class signature.
    pub fn check_soundness(&self) -> Result<()> {
        if self.patterns.is_none() {
            return Ok(());
        }
        for c in self.class_ids() {
            let sig = self.signature(ELit::new(c, false));
            for (node, ph) in self.class_nodes(c) {
                let mut s = self.node_signature(&node);
                if ph {
                    s = s.map(|v| v.iter().map(|w| !w).collect());
                }
                if s != sig {
                    return Err(Error::TraceSoundness(format!("member {node:?} of class {}", c.0)));
                }
            }
        }
        Ok(())
    }

    /// Checks that no two canonical e-nodes coincide across classes.
    pub fn check_congruence(&self) -> Result<()> {
        let mut seen: HashMap<ENode, ClassId> = HashMap::new();
        for c in self.class_ids() {
            for (node, _) in self.class_nodes(c) {
                if let Some(&other) = seen.get(&node) {
                    if other != c {
                        return Err(Error::TraceSoundness(format!(
                            "{node:?} in classes {} and {}",
                            other.0, c.0
                        )));
                    }
                }
                seen.insert(node, c);
            }
        }
        Ok(())
    }
}

impl GateBuilder for EGraph {
    type Lit = ELit;

    fn build_gate(&mut self, kind: GateKind, a: ELit, b: ELit) -> ELit {
        let a = self.find_mut(a);
        let b = self.find_mut(b);
        match normalize(kind, a, b) {
            Normalized::Folded(l) => l,
            Normalized::Gate {
                kind,
                fanins,
                complemented,
            } => self
                .add_node(ENode::Gate { kind, ops: fanins })
                .complement_if(complemented),
        }
    }
}
