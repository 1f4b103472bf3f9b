//! Exclusive-sum-of-products forms from Kronecker expansions, and their
//! depth-balanced realization.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cuts::table_mask;
use crate::xag::{GateBuilder, Literal};

/// A product of literals; `vars` selects variables and `positive` their
/// polarity (bits outside `vars` are zero). The empty cube is constant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub vars: u8,
    pub positive: u8,
}

impl Cube {
    pub const ONE: Cube = Cube { vars: 0, positive: 0 };

    pub fn degree(&self) -> u32 {
        self.vars.count_ones()
    }

    fn with(self, var: usize, positive: bool) -> Cube {
        Cube {
            vars: self.vars | 1 << var,
            positive: self.positive | (positive as u8) << var,
        }
    }

    /// Truth table of the cube over `n` variables.
    pub fn table(&self, n: usize) -> u64 {
        let mut t = table_mask(n);
        for v in 0..n {
            if (self.vars >> v) & 1 == 1 {
                let var = crate::sim::VAR_MASKS[v];
                t &= if (self.positive >> v) & 1 == 1 { var } else { !var };
            }
        }
        t & table_mask(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    PositiveDavio,
    NegativeDavio,
    Shannon,
}

impl Expansion {
    const ALL: [Expansion; 3] = [Expansion::PositiveDavio, Expansion::NegativeDavio, Expansion::Shannon];
}

/// Cubes of the Kronecker expansion that uses `choice[v]` for variable `v`.
pub fn kronecker_cubes(tt: u64, n: usize, choice: &[Expansion]) -> Vec<Cube> {
    fn rec(f: u64, k: usize, choice: &[Expansion], prefix: Cube, out: &mut Vec<Cube>) {
        if f == 0 {
            return;
        }
        if k == 0 {
            out.push(prefix);
            return;
        }
        let v = k - 1;
        let half = 1usize << v;
        let low_mask = table_mask(v);
        let f0 = f & low_mask;
        let f1 = (f >> half) & low_mask;
        match choice[v] {
            Expansion::PositiveDavio => {
                rec(f0, v, choice, prefix, out);
                rec(f0 ^ f1, v, choice, prefix.with(v, true), out);
            }
            Expansion::NegativeDavio => {
                rec(f1, v, choice, prefix, out);
                rec(f0 ^ f1, v, choice, prefix.with(v, false), out);
            }
            Expansion::Shannon => {
                rec(f0, v, choice, prefix.with(v, false), out);
                rec(f1, v, choice, prefix.with(v, true), out);
            }
        }
    }
    let mut out = Vec::new();
    rec(tt & table_mask(n), n, choice, Cube::ONE, &mut out);
    out
}

/// ESOP over `n <= 6` variables: among all `3^n` Kronecker expansions, the
/// one with the smallest maximum cube degree, then fewest cubes, then the
/// first in enumeration order (variable 0 varies fastest).
pub fn esop_of(tt: u64, n: usize) -> Vec<Cube> {
    assert!(n <= 6, "esop_of supports at most 6 variables");
    let tt = tt & table_mask(n);
    if tt == 0 {
        return Vec::new();
    }
    let total = 3usize.pow(n as u32);
    let mut best: Option<(u32, usize, Vec<Cube>)> = None;
    let mut choice = vec![Expansion::PositiveDavio; n];
    for idx in 0..total {
        let mut r = idx;
        for c in choice.iter_mut() {
            *c = Expansion::ALL[r % 3];
            r /= 3;
        }
        let cubes = kronecker_cubes(tt, n, &choice);
        let deg = cubes.iter().map(Cube::degree).max().unwrap_or(0);
        let better = match &best {
            None => true,
            Some((d, c, _)) => (deg, cubes.len()) < (*d, *c),
        };
        if better {
            best = Some((deg, cubes.len(), cubes));
        }
    }
    best.map(|b| b.2).unwrap_or_default()
}

/// XOR of the cube tables.
pub fn esop_table(cubes: &[Cube], n: usize) -> u64 {
    cubes.iter().fold(0, |acc, c| acc ^ c.table(n))
}

/// Depth of a balanced AND tree over `degree` literals.
pub fn balanced_depth(degree: u32) -> u32 {
    if degree <= 1 {
        0
    } else {
        32 - (degree - 1).leading_zeros()
    }
}

/// Realizes the ESOP over `leaves`. Each cube becomes an AND tree that
/// always pairs the two earliest-arriving operands (a balanced tree when all
/// leaf levels are equal); cubes are combined with XOR gates.
///
/// Returns the root literal and its multiplicative depth given `leaf_levels`
/// (all zero when `None`).
pub fn build_esop_fragment<B: GateBuilder>(
    b: &mut B,
    cubes: &[Cube],
    leaves: &[B::Lit],
    leaf_levels: Option<&[u32]>,
) -> (B::Lit, u32) {
    let mut parts = Vec::with_capacity(cubes.len());
    let mut depth = 0;
    for cube in cubes {
        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
        let mut lits: Vec<B::Lit> = Vec::new();
        for (v, &leaf) in leaves.iter().enumerate() {
            if (cube.vars >> v) & 1 == 1 {
                let lit = leaf.complement_if((cube.positive >> v) & 1 == 0);
                let lvl = leaf_levels.map_or(0, |l| l[v]);
                heap.push(Reverse((lvl, lits.len())));
                lits.push(lit);
            }
        }
        let lit = match heap.len() {
            0 => B::Lit::zero().complement_if(true),
            _ => {
                while heap.len() > 1 {
                    let Reverse((l1, i1)) = heap.pop().unwrap();
                    let Reverse((l2, i2)) = heap.pop().unwrap();
                    let g = b.build_and(lits[i1], lits[i2]);
                    heap.push(Reverse((l1.max(l2) + 1, lits.len())));
                    lits.push(g);
                }
                let Reverse((l, i)) = heap.pop().unwrap();
                depth = depth.max(l);
                lits[i]
            }
        };
        parts.push(lit);
    }
    (b.build_xor_all(&parts), depth)
}
