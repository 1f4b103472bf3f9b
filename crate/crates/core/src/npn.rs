//! NPN canonicalization of functions with up to four inputs.
//!
//! Tables are `u16` values whose low `2^n` bits are meaningful.

use crate::error::{Error, Result};

pub const MAX_NPN_VARS: usize = 4;

/// Input permutation, input negation and output negation.
///
/// Applying the transform to `f` gives `f'(y) = f(x) ^ output_neg` where
/// `x[perm[i]] = y[i] ^ neg(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    pub input_neg: u8,
    pub output_neg: bool,
}

impl NpnTransform {
    pub const IDENTITY: NpnTransform = NpnTransform {
        perm: [0, 1, 2, 3],
        input_neg: 0,
        output_neg: false,
    };

    pub fn input_negated(&self, i: usize) -> bool {
        (self.input_neg >> i) & 1 == 1
    }

    pub fn inverse(&self) -> NpnTransform {
        let mut perm = [0u8; 4];
        let mut neg = 0u8;
        for i in 0..4 {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            if self.input_negated(i) {
                neg |= 1 << j;
            }
        }
        NpnTransform {
            perm,
            input_neg: neg,
            output_neg: self.output_neg,
        }
    }

    /// Applies the transform to a table over `n` variables.
    pub fn apply(&self, tt: u16, n: usize) -> u16 {
        let mut out = 0u16;
        for y in 0..(1usize << n) {
            let mut x = 0usize;
            for i in 0..n {
                let bit = ((y >> i) & 1) ^ self.input_negated(i) as usize;
                x |= bit << self.perm[i];
            }
            let v = ((tt >> x) & 1) ^ self.output_neg as u16;
            out |= v << y;
        }
        out
    }
}

pub fn mask(n: usize) -> u16 {
    if n >= 4 {
        0xffff
    } else {
        ((1u32 << (1 << n)) - 1) as u16
    }
}

/// Permutations of `0..n` in lexicographic order, padded with identity.
fn permutations(n: usize) -> Vec<[u8; 4]> {
    fn rec(k: usize, n: usize, used: &mut [bool; 4], cur: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        if k == n {
            out.push(*cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur[k] = v as u8;
                rec(k + 1, n, used, cur, out);
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut [false; 4], &mut [0, 1, 2, 3], &mut out);
    out
}

/// Negates variable `i` of a table over `n` variables.
fn flip_var(tt: u16, i: usize, n: usize) -> u16 {
    const LOW: [u16; 4] = [0x5555, 0x3333, 0x0f0f, 0x00ff];
    let s = 1 << i;
    let m = LOW[i];
    (((tt & m) << s) | ((tt >> s) & m)) & mask(n)
}

/// Minimum table over all `2 * 2^n * n!` transforms, with a transform that
/// maps `tt` onto it.
pub fn npn_canonicalize(tt: u16, n: usize) -> Result<(u16, NpnTransform)> {
    if n > MAX_NPN_VARS {
        return Err(Error::Arity(n));
    }
    let m = mask(n);
    let tt = tt & m;
    let mut best = (u16::MAX, NpnTransform::IDENTITY);
    let mut first = true;
    for perm in permutations(n) {
        let base = NpnTransform {
            perm,
            input_neg: 0,
            output_neg: false,
        }
        .apply(tt, n);
        for neg in 0..(1u8 << n) {
            let mut t = base;
            for i in 0..n {
                if (neg >> i) & 1 == 1 {
                    t = flip_var(t, i, n);
                }
            }
            for out_neg in [false, true] {
                let v = if out_neg { !t & m } else { t };
                if first || v < best.0 {
                    first = false;
                    best = (
                        v,
                        NpnTransform {
                            perm,
                            input_neg: neg,
                            output_neg: out_neg,
                        },
                    );
                }
            }
        }
    }
    Ok(best)
}

/// Extends a table over `n` variables to `to` variables (new variables unused).
pub fn extend_table(tt: u16, n: usize, to: usize) -> u16 {
    let mut t = tt & mask(n);
    let mut width = 1 << n;
    while width < (1 << to) {
        t |= t << width;
        width <<= 1;
    }
    t & mask(to)
}
