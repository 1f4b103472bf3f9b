//! The depth-bounded extraction program in explicit form.
//!
//! Variables: `x_n` selects member `n` (global member index), `s_c` selects
//! class `c`, `d_c` in `[0, D]` is the class depth and `t_c` in `[0, N]` its
//! topological position, `N` being the number of classes.

use std::fmt::Write as _;

use super::{Choice, ExtractGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    S(usize),
    D(usize),
    T(usize),
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::X(i) => write!(f, "x_{i}"),
            Var::S(i) => write!(f, "s_{i}"),
            Var::D(i) => write!(f, "d_{i}"),
            Var::T(i) => write!(f, "t_{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub terms: Vec<(i64, Var)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Constraint {
    fn holds(&self, v: &IlpValues) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(k, var)| k * v.get(var)).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IlpInstance {
    pub bound: u32,
    pub num_classes: usize,
    pub num_members: usize,
    /// Global index of each AND member; the objective is their sum.
    pub objective: Vec<usize>,
    pub constraints: Vec<Constraint>,
}

/// An assignment to every variable of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpValues {
    pub x: Vec<bool>,
    pub s: Vec<bool>,
    pub d: Vec<i64>,
    pub t: Vec<i64>,
}

impl IlpValues {
    fn get(&self, v: Var) -> i64 {
        match v {
            Var::X(i) => self.x[i] as i64,
            Var::S(i) => self.s[i] as i64,
            Var::D(i) => self.d[i],
            Var::T(i) => self.t[i],
        }
    }

    /// Values induced by an acyclic choice: chosen classes take their depth
    /// and their longest distance from a leaf; the rest are zero.
    pub fn from_choice(g: &ExtractGraph, choice: &[Option<usize>]) -> Option<IlpValues> {
        let order = g.topo_order(choice)?;
        let offsets = member_offsets(g);
        let n = g.num_classes();
        let mut v = IlpValues {
            x: vec![false; g.num_members()],
            s: vec![false; n],
            d: vec![0; n],
            t: vec![0; n],
        };
        for c in order {
            let i = choice[c]?;
            let m = &g.members[c][i];
            v.x[offsets[c] + i] = true;
            v.s[c] = true;
            v.d[c] = m.children.iter().map(|&(k, _)| v.d[k]).max().unwrap_or(0) + m.is_and() as i64;
            v.t[c] = m.children.iter().map(|&(k, _)| v.t[k] + 1).max().unwrap_or(0);
        }
        Some(v)
    }

    pub fn choice(&self, g: &ExtractGraph) -> Choice {
        let offsets = member_offsets(g);
        (0..g.num_classes())
            .map(|c| (0..g.members[c].len()).find(|&i| self.x[offsets[c] + i]))
            .collect()
    }
}

pub(crate) fn member_offsets(g: &ExtractGraph) -> Vec<usize> {
    let mut acc = 0;
    g.members
        .iter()
        .map(|ms| {
            let o = acc;
            acc += ms.len();
            o
        })
        .collect()
}

impl IlpInstance {
    pub fn new(g: &ExtractGraph, bound: u32) -> IlpInstance {
        let n = g.num_classes() as i64;
        let big_d = bound as i64 + 1;
        let offsets = member_offsets(g);
        let mut constraints = Vec::new();
        let mut objective = Vec::new();
        for (c, ms) in g.members.iter().enumerate() {
            let mut terms = vec![(1, Var::S(c))];
            terms.extend((0..ms.len()).map(|i| (-1, Var::X(offsets[c] + i))));
            constraints.push(Constraint {
                terms,
                sense: Sense::Eq,
                rhs: 0,
            });
        }
        for c in g.output_classes() {
            constraints.push(Constraint {
                terms: vec![(1, Var::S(c))],
                sense: Sense::Eq,
                rhs: 1,
            });
        }
        for (c, ms) in g.members.iter().enumerate() {
            for (i, m) in ms.iter().enumerate() {
                let x = Var::X(offsets[c] + i);
                let a = m.is_and() as i64;
                if m.is_and() {
                    objective.push(offsets[c] + i);
                }
                for k in m.child_classes() {
                    constraints.push(Constraint {
                        terms: vec![(1, x), (-1, Var::S(k))],
                        sense: Sense::Le,
                        rhs: 0,
                    });
                    // d_c >= d_k + a - (D + 1)(1 - x)
                    constraints.push(Constraint {
                        terms: vec![(1, Var::D(c)), (-1, Var::D(k)), (-big_d, x)],
                        sense: Sense::Ge,
                        rhs: a - big_d,
                    });
                    // t_c >= t_k + 1 - N(1 - x)
                    constraints.push(Constraint {
                        terms: vec![(1, Var::T(c)), (-1, Var::T(k)), (-n, x)],
                        sense: Sense::Ge,
                        rhs: 1 - n,
                    });
                }
            }
        }
        IlpInstance {
            bound,
            num_classes: g.num_classes(),
            num_members: g.num_members(),
            objective,
            constraints,
        }
    }

    pub fn objective_value(&self, v: &IlpValues) -> i64 {
        self.objective.iter().map(|&i| v.x[i] as i64).sum()
    }

    /// Index of the first violated constraint or variable bound.
    pub fn first_violation(&self, v: &IlpValues) -> Option<String> {
        let n = self.num_classes as i64;
        for c in 0..self.num_classes {
            if !(0..=self.bound as i64).contains(&v.d[c]) {
                return Some(format!("bound on d_{c}"));
            }
            if !(0..=n).contains(&v.t[c]) {
                return Some(format!("bound on t_{c}"));
            }
        }
        self.constraints
            .iter()
            .position(|k| !k.holds(v))
            .map(|i| format!("constraint c{i}"))
    }

    pub fn is_satisfied(&self, v: &IlpValues) -> bool {
        self.first_violation(v).is_none()
    }

    /// CPLEX LP text.
    pub fn export_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ depth-bounded extraction, md <= {}", self.bound);
        let _ = writeln!(out, "Minimize");
        let obj: Vec<String> = self.objective.iter().map(|&i| format!("{}", Var::X(i))).collect();
        let _ = writeln!(out, " obj: {}", obj.join(" + "));
        let _ = writeln!(out, "Subject To");
        for (i, k) in self.constraints.iter().enumerate() {
            let mut line = String::new();
            for (j, &(coef, var)) in k.terms.iter().enumerate() {
                let sign = if coef < 0 {
                    "-"
                } else if j > 0 {
                    "+"
                } else {
                    ""
                };
                let mag = coef.abs();
                if !sign.is_empty() {
                    line.push_str(sign);
                    line.push(' ');
                }
                if mag != 1 {
                    let _ = write!(line, "{mag} ");
                }
                let _ = write!(line, "{var} ");
            }
            let op = match k.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " c{i}: {line}{op} {}", k.rhs);
        }
        if self.num_classes > 0 {
            let _ = writeln!(out, "Bounds");
            for c in 0..self.num_classes {
                let _ = writeln!(out, " 0 <= d_{c} <= {}", self.bound);
            }
            for c in 0..self.num_classes {
                let _ = writeln!(out, " 0 <= t_{c} <= {}", self.num_classes);
            }
            let _ = writeln!(out, "Binary");
            for i in 0..self.num_members {
                let _ = writeln!(out, " x_{i}");
            }
            for c in 0..self.num_classes {
                let _ = writeln!(out, " s_{c}");
            }
            let _ = writeln!(out, "General");
            for c in 0..self.num_classes {
                let _ = writeln!(out, " d_{c} t_{c}");
            }
        }
        let _ = writeln!(out, "End");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::EGraph;
    use crate::extract::greedy_md_dag;
    use crate::extract::tests::traced_full_adder;

    fn empty_graph() -> ExtractGraph {
        ExtractGraph::new(&EGraph::new())
    }

    #[test]
    fn empty_instance_is_objective_only() {
        let lp = IlpInstance::new(&empty_graph(), 0).export_lp();
        assert_eq!(lp.lines().filter(|l| l.starts_with(" c")).count(), 0);
        assert!(lp.contains("Minimize\n obj: \nSubject To\nEnd\n"));
    }

    #[test]
    fn constraint_count_closed_form() {
        let (eg, _) = traced_full_adder();
        let g = ExtractGraph::new(&eg);
        let inst = IlpInstance::new(&g, 1);
        // hand count: one selection row per class, one per distinct output
        // class, three per (member, distinct child) pair
        let mut pairs = 0;
        for ms in &g.members {
            for m in ms {
                let mut seen: Vec<usize> = Vec::new();
                for &(k, _) in &m.children {
                    if !seen.contains(&k) {
                        seen.push(k);
                    }
                }
                pairs += seen.len();
            }
        }
        let outs: std::collections::BTreeSet<usize> = g.outputs.iter().map(|o| o.1).collect();
        assert_eq!(inst.constraints.len(), g.num_classes() + outs.len() + 3 * pairs);
    }

    #[test]
    fn greedy_values_satisfy_instance() {
        let (eg, _) = traced_full_adder();
        let g = ExtractGraph::new(&eg);
        let sol = greedy_md_dag(&g).unwrap();
        let v = IlpValues::from_choice(&g, &sol.choice).unwrap();
        let inst = IlpInstance::new(&g, 1);
        assert_eq!(inst.first_violation(&v), None);
        assert_eq!(inst.objective_value(&v), 1);
        assert_eq!(v.choice(&g), sol.choice);
        // the same values break a tighter bound
        assert!(!IlpInstance::new(&g, 0).is_satisfied(&v));
    }
}
