//! Depth-bounded minimum-AND extraction by depth-first branch and bound.
//!
//! Required classes are assigned one at a time (highest fanout first,
//! AND-free members first). Each assignment pushes a depth budget down to its
//! operands, so a class is only ever given members that fit under the bound,
//! and is rejected when it would close a cycle. The remaining cost is
//! bounded from below by the AND-only classes that the open classes must
//! include.

use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use super::greedy::min_depths;
use super::ilp::{IlpInstance, IlpValues};
use super::{Choice, ExtractGraph, ExtractionSolution, Method, SolverStatus};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct IlpOutcome {
    pub bound: u32,
    pub status: SolverStatus,
    pub solution: Option<ExtractionSolution>,
    /// Variable values of the solution, checkable against the instance.
    pub values: Option<IlpValues>,
    /// Search nodes visited.
    pub nodes: u64,
    pub elapsed: Duration,
}

enum Undo {
    Assign(usize),
    Require(usize),
    Budget(usize, u32),
}

struct Search<'a> {
    g: &'a ExtractGraph,
    mindepth: Vec<u32>,
    fanout: Vec<u32>,
    /// AND-only classes that any choice for a class must include.
    must_and: Vec<FixedBitSet>,
    /// Members per class in trial order.
    order: Vec<Vec<usize>>,
    assign: Vec<Option<usize>>,
    required: Vec<bool>,
    budget: Vec<u32>,
    open: BTreeSet<(Reverse<u32>, usize)>,
    assigned: FixedBitSet,
    cost: u32,
    undo: Vec<Undo>,
    best: Option<(u32, Choice)>,
    deadline: Option<Instant>,
    timed_out: bool,
    nodes: u64,
    mark: Vec<u32>,
    epoch: u32,
}

const UNREACHABLE: u32 = u32::MAX;
const STACK_BYTES: usize = 512 << 20;

impl<'a> Search<'a> {
    fn new(g: &'a ExtractGraph, deadline: Option<Instant>) -> Search<'a> {
        let n = g.num_classes();
        let mindepth: Vec<u32> = min_depths(g).into_iter().map(|d| d.unwrap_or(UNREACHABLE)).collect();
        let mut fanout = vec![0u32; n];
        for ms in &g.members {
            for m in ms {
                for k in m.child_classes() {
                    fanout[k] += 1;
                }
            }
        }
        let member_depth = |c: usize, i: usize| {
            let m = &g.members[c][i];
            m.child_classes()
                .map(|k| mindepth[k])
                .max()
                .unwrap_or(0)
                .saturating_add(m.is_and() as u32)
        };
        let order: Vec<Vec<usize>> = (0..n)
            .map(|c| {
                let mut v: Vec<usize> = (0..g.members[c].len())
                    .filter(|&i| g.members[c][i].child_classes().all(|k| k != c) && member_depth(c, i) != UNREACHABLE)
                    .collect();
                v.sort_by_key(|&i| (g.members[c][i].is_and(), member_depth(c, i), i));
                v
            })
            .collect();
        let and_only: Vec<bool> = order
            .iter()
            .enumerate()
            .map(|(c, o)| o.iter().all(|&i| g.members[c][i].is_and()))
            .collect();
        let must_and = must_sets(g, &order, &mindepth)
            .into_iter()
            .map(|mut m| {
                m.ones()
                    .filter(|&k| !and_only[k])
                    .collect::<Vec<_>>()
                    .into_iter()
                    .for_each(|k| m.set(k, false));
                m
            })
            .collect();
        Search {
            g,
            mindepth,
            fanout,
            must_and,
            order,
            assign: vec![None; n],
            required: vec![false; n],
            budget: vec![u32::MAX; n],
            open: BTreeSet::new(),
            assigned: FixedBitSet::with_capacity(n),
            cost: 0,
            undo: Vec::new(),
            best: None,
            deadline,
            timed_out: false,
            nodes: 0,
            mark: vec![0; n],
            epoch: 0,
        }
    }

    fn key(&self, c: usize) -> (Reverse<u32>, usize) {
        (Reverse(self.fanout[c]), c)
    }

    /// Lowers the budget of `k` to `b`, requiring it if needed and pushing
    /// the budget through its assigned member.
    fn tighten(&mut self, k: usize, b: u32) -> bool {
        if self.required[k] && self.budget[k] <= b {
            return true;
        }
        if self.mindepth[k] > b {
            return false;
        }
        if !self.required[k] {
            self.required[k] = true;
            self.open.insert(self.key(k));
            self.undo.push(Undo::Require(k));
        }
        self.undo.push(Undo::Budget(k, self.budget[k]));
        self.budget[k] = b;
        if let Some(i) = self.assign[k] {
            let g = self.g;
            let m = &g.members[k][i];
            let Some(child) = b.checked_sub(m.is_and() as u32) else {
                return false;
            };
            for j in m.child_classes() {
                if !self.tighten(j, child) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `target` is reachable from `from` through assigned members.
    fn reaches(&mut self, from: usize, target: usize) -> bool {
        self.epoch += 1;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == target {
                return true;
            }
            if self.mark[v] == self.epoch {
                continue;
            }
            self.mark[v] = self.epoch;
            if let Some(i) = self.assign[v] {
                stack.extend(self.g.members[v][i].child_classes());
            }
        }
        false
    }

    fn try_assign(&mut self, c: usize, i: usize) -> bool {
        let g = self.g;
        let m = &g.members[c][i];
        let Some(child) = self.budget[c].checked_sub(m.is_and() as u32) else {
            return false;
        };
        for k in m.child_classes() {
            if self.assign[k].is_some() && self.reaches(k, c) {
                return false;
            }
        }
        self.assign[c] = Some(i);
        self.open.remove(&self.key(c));
        self.assigned.insert(c);
        self.cost += m.is_and() as u32;
        self.undo.push(Undo::Assign(c));
        m.child_classes().all(|k| self.tighten(k, child))
    }

    fn rollback(&mut self, mark: usize) {
        while self.undo.len() > mark {
            match self.undo.pop().expect("nonempty") {
                Undo::Assign(c) => {
                    let i = self.assign[c].take().expect("assigned");
                    self.open.insert(self.key(c));
                    self.assigned.set(c, false);
                    self.cost -= self.g.members[c][i].is_and() as u32;
                }
                Undo::Require(k) => {
                    self.required[k] = false;
                    self.open.remove(&self.key(k));
                }
                Undo::Budget(k, old) => self.budget[k] = old,
            }
        }
    }

    fn remaining_bound(&self) -> u32 {
        let mut need = FixedBitSet::with_capacity(self.g.num_classes());
        for &(_, c) in &self.open {
            need.union_with(&self.must_and[c]);
        }
        need.difference(&self.assigned).count() as u32
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        if let Some((best, _)) = &self.best {
            if self.cost + self.remaining_bound() >= *best {
                return;
            }
        }
        let Some(&(_, c)) = self.open.first() else {
            self.best = Some((self.cost, self.assign.clone()));
            return;
        };
        for idx in 0..self.order[c].len() {
            let i = self.order[c][idx];
            let mark = self.undo.len();
            if self.try_assign(c, i) {
                self.dfs();
            }
            self.rollback(mark);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Least fixpoint of `must(c) = {c} ∪ ⋂_m ⋃_k must(k)` over the trial
/// members `m` of `c` and their operand classes `k`. Every acyclic choice
/// for `c` includes at least these classes.
fn must_sets(g: &ExtractGraph, order: &[Vec<usize>], mindepth: &[u32]) -> Vec<FixedBitSet> {
    let n = g.num_classes();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, ms) in g.members.iter().enumerate() {
        for m in ms {
            for k in m.child_classes() {
                if parents[k].last() != Some(&c) {
                    parents[k].push(c);
                }
            }
        }
    }
    let mut must: Vec<FixedBitSet> = (0..n)
        .map(|c| {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(c);
            b
        })
        .collect();
    let mut queued = vec![true; n];
    let mut start: Vec<usize> = (0..n).collect();
    start.sort_by_key(|&c| mindepth[c]);
    let mut queue: VecDeque<usize> = start.into();
    while let Some(c) = queue.pop_front() {
        queued[c] = false;
        let mut acc: Option<FixedBitSet> = None;
        for &i in &order[c] {
            let mut u = FixedBitSet::with_capacity(n);
            for k in g.members[c][i].child_classes() {
                u.union_with(&must[k]);
            }
            match acc.as_mut() {
                None => acc = Some(u),
                Some(a) => a.intersect_with(&u),
            }
        }
        let Some(mut next) = acc else { continue };
        next.insert(c);
        if next != must[c] {
            must[c] = next;
            for &p in &parents[c] {
                if !queued[p] {
                    queued[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }
    must
}

/// Minimum-AND extraction with multiplicative depth at most `bound`.
/// `warm` choices that fit the bound seed the incumbent. Without `timeout`
/// the search runs to completion.
pub fn depth_bounded_ilp(
    g: &ExtractGraph,
    bound: u32,
    timeout: Option<Duration>,
    warm: &[Choice],
) -> Result<IlpOutcome> {
    let start = Instant::now();
    let mut s = Search::new(g, timeout.map(|t| start + t));
    for w in warm {
        if let (Some((md, mc)), Some(w)) = (g.evaluate(w), g.trim(w)) {
            if md <= bound && s.best.as_ref().is_none_or(|(b, _)| mc < *b) {
                s.best = Some((mc, w));
            }
        }
    }
    let mut feasible = true;
    for c in g.output_classes() {
        feasible &= s.tighten(c, bound);
    }
    if timeout.is_some_and(|t| t.is_zero()) {
        s.timed_out = true;
    }
    if feasible && !s.timed_out {
        // the search recurses once per required class
        std::thread::scope(|scope| {
            std::thread::Builder::new()
                .stack_size(STACK_BYTES)
                .spawn_scoped(scope, || s.dfs())
                .expect("spawn solver thread")
                .join()
                .expect("solver thread")
        });
    }
    let status = match (s.timed_out, s.best.is_some()) {
        (false, true) => SolverStatus::Optimal,
        (false, false) => SolverStatus::Infeasible,
        (true, true) => SolverStatus::Incumbent,
        (true, false) => SolverStatus::Timeout,
    };
    let nodes = s.nodes;
    let (solution, values) = match s.best {
        Some((_, choice)) => {
            let values = IlpValues::from_choice(g, &choice);
            (Some(g.solution(choice, Method::Ilp { bound }, status)?), values)
        }
        None => (None, None),
    };
    debug_assert!(values
        .as_ref()
        .is_none_or(|v| IlpInstance::new(g, bound).is_satisfied(v)));
    Ok(IlpOutcome {
        bound,
        status,
        solution,
        values,
        nodes,
        elapsed: start.elapsed(),
    })
}
