//! Bit-parallel simulation and equivalence checking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::xag::{GateKind, Node, Signal, XagNetwork};

/// Exhaustive checking is used up to this many inputs.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Random words (64 patterns each) used above the exhaustive limit.
pub const RANDOM_WORDS: usize = 1024;

pub const EQUIVALENCE_SEED: u64 = 0x5eed_c0de;

pub(crate) const VAR_MASKS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

/// All `2^n` assignments, one bit per pattern; pattern `p` assigns input `i`
/// the bit `(p >> i) & 1`.
pub fn exhaustive_patterns(n: usize) -> Vec<Vec<u64>> {
    let words = if n <= 6 { 1 } else { 1usize << (n - 6) };
    (0..n)
        .map(|i| {
            (0..words)
                .map(|w| {
                    if i < 6 {
                        VAR_MASKS[i]
                    } else if (w >> (i - 6)) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

pub fn random_patterns(n: usize, words: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..words).map(|_| rng.gen()).collect()).collect()
}

/// Number of meaningful pattern bits in an exhaustive block for `n` inputs.
pub fn exhaustive_bits(n: usize) -> usize {
    1usize << n
}

/// Simulates every node; `result[node]` is the node's regular value.
pub fn simulate_nodes(net: &XagNetwork, patterns: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    if patterns.len() != net.inputs().len() {
        return Err(Error::Interface(format!(
            "{} pattern rows for {} inputs",
            patterns.len(),
            net.inputs().len()
        )));
    }
    let words = patterns.first().map_or(1, |p| p.len());
    if patterns.iter().any(|p| p.len() != words) {
        return Err(Error::Interface("pattern rows of unequal width".into()));
    }
    let mut values: Vec<Vec<u64>> = Vec::with_capacity(net.num_nodes());
    for node in net.nodes() {
        let v = match *node {
            Node::Const0 => vec![0; words],
            Node::Input(i) => patterns[i as usize].clone(),
            Node::Gate { kind, fanins } => {
                let a = &values[fanins[0].node().index()];
                let b = &values[fanins[1].node().index()];
                let ma = if fanins[0].is_complemented() { !0 } else { 0 };
                let mb = if fanins[1].is_complemented() { !0 } else { 0 };
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| match kind {
                        GateKind::And => (x ^ ma) & (y ^ mb),
                        GateKind::Xor => (x ^ ma) ^ (y ^ mb),
                    })
                    .collect()
            }
        };
        values.push(v);
    }
    Ok(values)
}

pub fn signal_value(values: &[Vec<u64>], s: Signal) -> Vec<u64> {
    let v = &values[s.node().index()];
    if s.is_complemented() {
        v.iter().map(|x| !x).collect()
    } else {
        v.clone()
    }
}

/// Output signatures, one bit vector per output.
pub fn simulate(net: &XagNetwork, patterns: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let values = simulate_nodes(net, patterns)?;
    Ok(net.outputs().iter().map(|(_, s)| signal_value(&values, *s)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equal: bool,
    /// False when the verdict comes from random patterns only.
    pub exhaustive: bool,
}

/// Compares two networks by input and output names.
pub fn equivalent(a: &XagNetwork, b: &XagNetwork) -> Result<Equivalence> {
    let n = a.inputs().len();
    if b.inputs().len() != n {
        return Err(Error::Interface(format!("{} vs {} inputs", n, b.inputs().len())));
    }
    let b_order = a
        .input_names()
        .iter()
        .map(|name| {
            b.input_names()
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::Interface(format!("input {name} missing")))
        })
        .collect::<Result<Vec<_>>>()?;
    if a.outputs().len() != b.outputs().len() {
        return Err(Error::Interface("output counts differ".into()));
    }
    let out_map = a
        .outputs()
        .iter()
        .map(|(name, _)| {
            b.outputs()
                .iter()
                .position(|(x, _)| x == name)
                .ok_or_else(|| Error::Interface(format!("output {name} missing")))
        })
        .collect::<Result<Vec<_>>>()?;

    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let pa = if exhaustive {
        exhaustive_patterns(n)
    } else {
        random_patterns(n, RANDOM_WORDS, EQUIVALENCE_SEED)
    };
    let mut pb = vec![Vec::new(); n];
    for (i, &j) in b_order.iter().enumerate() {
        pb[j] = pa[i].clone();
    }
    let mask = if exhaustive && n < 6 {
        (1u64 << (1 << n)) - 1
    } else {
        !0
    };
    let sa = simulate(a, &pa)?;
    let sb = simulate(b, &pb)?;
    let equal = out_map
        .iter()
        .enumerate()
        .all(|(i, &j)| sa[i].iter().zip(&sb[j]).all(|(x, y)| (x ^ y) & mask == 0));
    Ok(Equivalence { equal, exhaustive })
}
