use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Choice, ExtractGraph, ExtractionSolution, Method, SolverStatus};
use crate::error::{Error, Result};

/// Per-member operand bookkeeping shared by the bottom-up passes.
struct Users {
    /// `(class, member)` pairs using each class as an operand.
    users: Vec<Vec<(usize, usize)>>,
    /// Distinct operand classes still unresolved, per member.
    pending: Vec<Vec<usize>>,
}

impl Users {
    fn new(g: &ExtractGraph) -> Users {
        let mut users = vec![Vec::new(); g.num_classes()];
        let mut pending = Vec::with_capacity(g.num_classes());
        for (c, ms) in g.members.iter().enumerate() {
            let mut p = Vec::with_capacity(ms.len());
            for (i, m) in ms.iter().enumerate() {
                let mut n = 0;
                for k in m.child_classes() {
                    users[k].push((c, i));
                    n += 1;
                }
                p.push(n);
            }
            pending.push(p);
        }
        Users { users, pending }
    }
}

/// Minimum achievable multiplicative depth of every class over acyclic
/// choices (`None` when no acyclic choice exists).
pub fn min_depths(g: &ExtractGraph) -> Vec<Option<u32>> {
    let Users { users, mut pending } = Users::new(g);
    let mut depth: Vec<Option<u32>> = vec![None; g.num_classes()];
    let mut heap = BinaryHeap::new();
    for (c, ms) in g.members.iter().enumerate() {
        for (i, m) in ms.iter().enumerate() {
            if pending[c][i] == 0 {
                heap.push(Reverse((m.is_and() as u32, c)));
            }
        }
    }
    while let Some(Reverse((d, c))) = heap.pop() {
        if depth[c].is_some() {
            continue;
        }
        depth[c] = Some(d);
        for &(p, i) in &users[c] {
            pending[p][i] -= 1;
            if pending[p][i] == 0 && depth[p].is_none() {
                let m = &g.members[p][i];
                let below = m
                    .child_classes()
                    .map(|k| depth[k].expect("resolved"))
                    .max()
                    .unwrap_or(0);
                heap.push(Reverse((below + m.is_and() as u32, p)));
            }
        }
    }
    depth
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Bottom-up extraction minimizing depth first and the shared AND count of
/// the selected sub-DAG second. Classes are finalized in order of their
/// `(depth, |AND set|)` cost, so the depth of every class is its minimum.
pub fn greedy_md_dag(g: &ExtractGraph) -> Result<ExtractionSolution> {
    let Users { users, mut pending } = Users::new(g);
    let offsets: Vec<u32> = g
        .members
        .iter()
        .scan(0u32, |acc, ms| {
            let o = *acc;
            *acc += ms.len() as u32;
            Some(o)
        })
        .collect();
    // candidate sets live here; the heap refers to them by index
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut best: Vec<Option<(u32, usize)>> = vec![None; g.num_classes()];
    let mut best_set: Vec<usize> = vec![usize::MAX; g.num_classes()];

    let candidate =
        |c: usize, i: usize, best: &[Option<(u32, usize)>], best_set: &[usize], sets: &mut Vec<Vec<u32>>| {
            let m = &g.members[c][i];
            let mut depth = 0;
            let mut set: Vec<u32> = Vec::new();
            for k in m.child_classes() {
                let (d, _) = best[k].expect("operands resolved");
                depth = depth.max(d);
                set = union(&set, &sets[best_set[k]]);
            }
            if m.is_and() {
                set = union(&set, &[offsets[c] + i as u32]);
            }
            sets.push(set);
            Reverse((
                depth + m.is_and() as u32,
                sets[sets.len() - 1].len(),
                c,
                i,
                sets.len() - 1,
            ))
        };

    for (c, row) in pending.iter().enumerate() {
        for (i, &p) in row.iter().enumerate() {
            if p == 0 {
                heap.push(candidate(c, i, &best, &best_set, &mut sets));
            }
        }
    }
    while let Some(Reverse((d, _, c, i, s))) = heap.pop() {
        if best[c].is_some() {
            continue;
        }
        best[c] = Some((d, i));
        best_set[c] = s;
        for &(p, j) in &users[c] {
            pending[p][j] -= 1;
            if pending[p][j] == 0 && best[p].is_none() {
                heap.push(candidate(p, j, &best, &best_set, &mut sets));
            }
        }
    }
    if let Some((name, _, _)) = g.outputs.iter().find(|(_, c, _)| best[*c].is_none()) {
        return Err(Error::Infeasible(format!(
            "output {name} has no acyclic implementation"
        )));
    }
    let choice: Choice = best.iter().map(|b| b.map(|(_, i)| i)).collect();
    let choice = g.trim(&choice).expect("finalization order is acyclic");
    g.solution(choice, Method::Greedy, SolverStatus::Optimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::EGraph;
    use crate::extract::tests::{full_adder, traced_full_adder};
    use crate::sim::equivalent;
    use crate::xag::GateBuilder;

    #[test]
    fn xor_member_preferred_over_and() {
        // o = x ^ y, also recorded as an AND-based equivalent
        let mut eg = EGraph::new();
        eg.enable_checking(2);
        let x = eg.add_input("x");
        let y = eg.add_input("y");
        let p = eg.build_and(x, !y);
        let q = eg.build_and(!x, y);
        let or = !eg.build_and(!p, !q);
        let xor = eg.build_xor(x, y);
        eg.union(or, xor).unwrap();
        eg.add_output("o", xor);
        let g = ExtractGraph::new(&eg);
        let sol = greedy_md_dag(&g).unwrap();
        assert_eq!((sol.md, sol.mc), (0, 0));
    }

    #[test]
    fn full_adder_trace() {
        let (eg, _) = traced_full_adder();
        let g = ExtractGraph::new(&eg);
        let sol = greedy_md_dag(&g).unwrap();
        assert_eq!((sol.md, sol.mc, sol.he_cost), (1, 1, 1));
        assert!(equivalent(&full_adder(), &sol.network).unwrap().equal);
        let md = min_depths(&g);
        assert_eq!(g.output_classes().iter().map(|&c| md[c].unwrap()).max(), Some(1));
    }

    #[test]
    fn union_merges_sorted() {
        assert_eq!(union(&[1, 3, 5], &[2, 3, 6]), vec![1, 2, 3, 5, 6]);
        assert_eq!(union(&[], &[4]), vec![4]);
    }
}
