//! k-feasible priority cut enumeration.

use crate::error::{Error, Result};
use crate::xag::{GateKind, Node, NodeId, XagNetwork};

pub const MAX_CUT_SIZE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub root: NodeId,
    /// Sorted, duplicate free.
    pub leaves: Vec<NodeId>,
    /// Bit `i` is the root value when leaf `j` takes bit `j` of `i`.
    pub truth_table: u64,
}

impl Cut {
    pub fn is_trivial(&self) -> bool {
        self.leaves.len() == 1 && self.leaves[0] == self.root
    }
}

#[derive(Clone, Debug)]
pub struct CutSet {
    cuts: Vec<Vec<Cut>>,
}

impl CutSet {
    pub fn cuts(&self, node: NodeId) -> &[Cut] {
        &self.cuts[node.index()]
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }
}

/// Mask of the meaningful bits of a table over `n` variables.
pub fn table_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// Re-expresses a table over `sub` (sorted) as a table over `sup` (sorted superset).
fn expand(tt: u64, sub: &[NodeId], sup: &[NodeId]) -> u64 {
    let pos: Vec<usize> = sub
        .iter()
        .map(|l| sup.iter().position(|x| x == l).expect("sub-leaf in superset"))
        .collect();
    let mut out = 0u64;
    for m in 0..(1usize << sup.len()) {
        let mut idx = 0;
        for (j, &p) in pos.iter().enumerate() {
            idx |= ((m >> p) & 1) << j;
        }
        out |= ((tt >> idx) & 1) << m;
    }
    out
}

fn merge_leaves(a: &[NodeId], b: &[NodeId], k: usize) -> Option<Vec<NodeId>> {
    let mut out = Vec::with_capacity(k);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.len() == k {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

/// Enumerates up to `priority_limit` non-trivial cuts per node plus the
/// trivial cut. Cuts are ranked by leaf count, then lexicographically.
pub fn enumerate_cuts(net: &XagNetwork, k: usize, priority_limit: usize) -> Result<CutSet> {
    if !(2..=MAX_CUT_SIZE).contains(&k) {
        return Err(Error::CutSize(k));
    }
    let limit = priority_limit.max(1);
    let mut cuts: Vec<Vec<Cut>> = Vec::with_capacity(net.num_nodes());
    for (i, node) in net.nodes().iter().enumerate() {
        let id = NodeId(i as u32);
        let trivial = Cut {
            root: id,
            leaves: vec![id],
            truth_table: 0b10,
        };
        let Node::Gate { kind, fanins } = *node else {
            cuts.push(vec![trivial]);
            continue;
        };
        let mut cands: Vec<Cut> = Vec::new();
        for ca in &cuts[fanins[0].node().index()] {
            for cb in &cuts[fanins[1].node().index()] {
                let Some(leaves) = merge_leaves(&ca.leaves, &cb.leaves, k) else {
                    continue;
                };
                if cands.iter().any(|c| c.leaves == leaves) {
                    continue;
                }
                let mask = table_mask(leaves.len());
                let ta =
                    expand(ca.truth_table, &ca.leaves, &leaves) ^ if fanins[0].is_complemented() { mask } else { 0 };
                let tb =
                    expand(cb.truth_table, &cb.leaves, &leaves) ^ if fanins[1].is_complemented() { mask } else { 0 };
                let tt = match kind {
                    GateKind::And => ta & tb,
                    GateKind::Xor => ta ^ tb,
                } & mask;
                cands.push(Cut {
                    root: id,
                    leaves,
                    truth_table: tt,
                });
            }
        }
        cands.sort_by(|x, y| {
            x.leaves
                .len()
                .cmp(&y.leaves.len())
                .then_with(|| x.leaves.cmp(&y.leaves))
        });
        cands.truncate(limit);
        cands.push(trivial);
        cuts.push(cands);
    }
    Ok(CutSet { cuts })
}

/// Truth table of `root` over `leaves` by simulating the cone between them.
pub fn cut_function(net: &XagNetwork, root: NodeId, leaves: &[NodeId]) -> Result<u64> {
    if leaves.len() > MAX_CUT_SIZE {
        return Err(Error::CutSize(leaves.len()));
    }
    let mask = table_mask(leaves.len());
    let mut memo: std::collections::HashMap<NodeId, u64> = std::collections::HashMap::new();
    for (j, &l) in leaves.iter().enumerate() {
        let var = crate::sim::exhaustive_patterns(leaves.len())[j][0];
        memo.insert(l, var & mask);
    }
    fn eval(
        net: &XagNetwork,
        n: NodeId,
        root: NodeId,
        mask: u64,
        memo: &mut std::collections::HashMap<NodeId, u64>,
    ) -> Result<u64> {
        if let Some(&v) = memo.get(&n) {
            return Ok(v);
        }
        let v = match net.node(n) {
            Node::Const0 => 0,
            Node::Input(_) => {
                return Err(Error::MalformedCut {
                    root: root.0,
                    node: n.0,
                })
            }
            Node::Gate { kind, fanins } => {
                let a =
                    eval(net, fanins[0].node(), root, mask, memo)? ^ if fanins[0].is_complemented() { mask } else { 0 };
                let b =
                    eval(net, fanins[1].node(), root, mask, memo)? ^ if fanins[1].is_complemented() { mask } else { 0 };
                match kind {
                    GateKind::And => a & b,
                    GateKind::Xor => a ^ b,
                }
            }
        };
        memo.insert(n, v);
        Ok(v)
    }
    eval(net, root, root, mask, &mut memo)
}
