//! A network under in-place cut replacement.
//!
//! Replaced nodes are forwarded lazily through `repl`; reference counts over
//! the active part give exact MFFC gains by dereferencing and referencing
//! cones. Every node carries a rank that strictly increases along resolved
//! fanin edges, which keeps replacements acyclic.

use crate::egraph::{EGraph, ELit};
use crate::error::Result;
use crate::xag::{GateBuilder, GateKind, Node, NodeId, Signal, XagNetwork};

const RANK_SPACING: u64 = 1 << 20;

pub(crate) struct WorkNet {
    net: XagNetwork,
    repl: Vec<Option<Signal>>,
    refs: Vec<u32>,
    level: Vec<u32>,
    rank: Vec<u64>,
    elit: Vec<Option<ELit>>,
    original: usize,
}

impl WorkNet {
    pub fn new(net: &XagNetwork) -> Self {
        let net = net.clone();
        let n = net.num_nodes();
        let live = net.live_mask();
        let mut refs = vec![0u32; n];
        for (i, node) in net.nodes().iter().enumerate() {
            if let (true, Node::Gate { fanins, .. }) = (live[i], node) {
                for f in fanins {
                    refs[f.node().index()] += 1;
                }
            }
        }
        for (_, s) in net.outputs() {
            refs[s.node().index()] += 1;
        }
        WorkNet {
            level: net.levels(),
            rank: (0..n as u64).map(|i| i * RANK_SPACING).collect(),
            repl: vec![None; n],
            elit: vec![None; n],
            refs,
            original: n,
            net,
        }
    }

    /// Maps every node into `eg` so replacements can be recorded.
    pub fn attach(&mut self, eg: &mut EGraph) {
        let map = eg.import(&self.net);
        for (i, l) in map.into_iter().enumerate() {
            self.elit[i] = l;
        }
    }

    pub fn net(&self) -> &XagNetwork {
        &self.net
    }

    /// Node count of the network the pass started from.
    pub fn original(&self) -> usize {
        self.original
    }

    pub fn resolve(&self, s: Signal) -> Signal {
        let mut cur = s;
        while let Some(t) = self.repl[cur.node().index()] {
            cur = t.complement_if(cur.is_complemented());
        }
        cur
    }

    pub fn fanins(&self, n: NodeId) -> Option<[Signal; 2]> {
        self.net.fanins(n).map(|f| f.map(|s| self.resolve(s)))
    }

    pub fn kind(&self, n: NodeId) -> Option<GateKind> {
        match self.net.node(n) {
            Node::Gate { kind, .. } => Some(kind),
            _ => None,
        }
    }

    pub fn is_gate(&self, n: NodeId) -> bool {
        self.net.is_gate(n)
    }

    pub fn is_and(&self, n: NodeId) -> bool {
        self.net.is_and(n)
    }

    /// Referenced and not replaced.
    pub fn is_active(&self, n: NodeId) -> bool {
        self.refs[n.index()] > 0 && self.repl[n.index()].is_none()
    }

    pub fn level(&self, n: NodeId) -> u32 {
        self.level[n.index()]
    }

    pub fn rank(&self, n: NodeId) -> u64 {
        self.rank[n.index()]
    }

    /// Recomputes a gate's level from its resolved fanins.
    pub fn refresh_level(&mut self, n: NodeId) {
        if let (Some(kind), Some(f)) = (self.kind(n), self.fanins(n)) {
            let m = self.level[f[0].node().index()].max(self.level[f[1].node().index()]);
            self.level[n.index()] = m + (kind == GateKind::And) as u32;
        }
    }

    /// Releases the fanins of `n`; returns the AND gates that become
    /// unreferenced, `n` included.
    pub fn deref_node(&mut self, n: NodeId) -> u32 {
        let mut count = self.is_and(n) as u32;
        for f in self.fanins(n).expect("gate") {
            let m = f.node();
            self.refs[m.index()] -= 1;
            if self.refs[m.index()] == 0 && self.is_gate(m) {
                count += self.deref_node(m);
            }
        }
        count
    }

    /// Inverse of [`deref_node`](Self::deref_node).
    pub fn ref_node(&mut self, n: NodeId) -> u32 {
        let mut count = self.is_and(n) as u32;
        for f in self.fanins(n).expect("gate") {
            let m = f.node();
            if self.refs[m.index()] == 0 && self.is_gate(m) {
                count += self.ref_node(m);
            }
            self.refs[m.index()] += 1;
        }
        count
    }

    /// Nodes of the maximum fanout-free cone of `v`.
    pub fn mffc(&mut self, v: NodeId) -> Vec<NodeId> {
        fn collect(w: &mut WorkNet, n: NodeId, out: &mut Vec<NodeId>) {
            out.push(n);
            for f in w.fanins(n).expect("gate") {
                let m = f.node();
                w.refs[m.index()] -= 1;
                if w.refs[m.index()] == 0 && w.is_gate(m) {
                    collect(w, m, out);
                }
            }
        }
        let mut out = Vec::new();
        collect(self, v, &mut out);
        self.ref_node(v);
        out
    }

    /// Whether `s` may replace `v` without creating a cycle.
    pub fn can_replace(&self, v: NodeId, s: Signal) -> bool {
        self.rank[s.node().index()] < self.rank[v.index()]
    }

    /// AND gates saved by replacing `v` with `s`, or `None` when `s` may
    /// not replace `v`.
    pub fn gain(&mut self, v: NodeId, s: Signal) -> Option<i64> {
        if !self.can_replace(v, s) {
            return None;
        }
        let r = s.node();
        let freed = self.deref_node(v);
        let added = if self.is_gate(r) && self.refs[r.index()] == 0 {
            let a = self.ref_node(r);
            self.deref_node(r);
            a
        } else {
            0
        };
        self.ref_node(v);
        Some(freed as i64 - added as i64)
    }

    /// Redirects all users of `v` to `s`.
    pub fn replace(&mut self, v: NodeId, s: Signal) {
        debug_assert!(self.can_replace(v, s));
        let r = s.node();
        self.deref_node(v);
        if self.is_gate(r) && self.refs[r.index()] == 0 {
            self.ref_node(r);
        }
        self.refs[r.index()] += self.refs[v.index()];
        self.refs[v.index()] = 0;
        self.repl[v.index()] = Some(s);
    }

    /// E-graph literal of a signal, adding missing structure on the way.
    pub fn elit(&mut self, eg: &mut EGraph, s: Signal) -> ELit {
        let n = s.node();
        let lit = match self.elit[n.index()] {
            Some(l) => l,
            None => {
                let l = match self.net.node(n) {
                    Node::Const0 => ELit::ZERO,
                    Node::Input(i) => eg.add_input(&self.net.input_names()[i as usize]),
                    Node::Gate { kind, .. } => {
                        let f = self.fanins(n).expect("gate");
                        let a = self.elit(eg, f[0]);
                        let b = self.elit(eg, f[1]);
                        eg.build_gate(kind, a, b)
                    }
                };
                self.elit[n.index()] = Some(l);
                l
            }
        };
        eg.find(lit).complement_if(s.is_complemented())
    }

    /// Records `old == new` in the e-graph.
    pub fn record(&mut self, eg: &mut EGraph, old: Signal, new: Signal) -> Result<()> {
        let a = self.elit(eg, old);
        let b = self.elit(eg, new);
        eg.union(a, b)?;
        Ok(())
    }

    /// The network with all replacements applied and dead logic removed.
    pub fn finish(&self) -> XagNetwork {
        self.net.rebuild(|s| self.resolve(s))
    }
}

impl GateBuilder for WorkNet {
    type Lit = Signal;

    fn build_gate(&mut self, kind: GateKind, a: Signal, b: Signal) -> Signal {
        let a = self.resolve(a);
        let b = self.resolve(b);
        let before = self.net.num_nodes();
        let s = self.net.gate(kind, a, b);
        if self.net.num_nodes() > before {
            let la = self.level[a.node().index()];
            let lb = self.level[b.node().index()];
            let ra = self.rank[a.node().index()];
            let rb = self.rank[b.node().index()];
            self.repl.push(None);
            self.refs.push(0);
            self.level.push(la.max(lb) + (kind == GateKind::And) as u32);
            self.rank.push(ra.max(rb) + 1);
            self.elit.push(None);
        }
        self.resolve(s)
    }
}
