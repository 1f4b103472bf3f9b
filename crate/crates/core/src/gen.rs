//! Seeded random networks for testing and benchmarking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::xag::{GateKind, Signal, XagNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub inputs: usize,
    pub gates: usize,
    pub outputs: usize,
    /// Percentage of AND gates.
    pub and_percent: u32,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            inputs: 8,
            gates: 50,
            outputs: 4,
            and_percent: 60,
        }
    }
}

/// A random network with `spec.gates` distinct gates (fewer only when
/// structural hashing keeps rejecting candidates). Operands favor recent
/// signals so the result is deep rather than flat.
pub fn random_network(spec: &RandomSpec, seed: u64) -> XagNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = XagNetwork::new();
    let mut pool: Vec<Signal> = (0..spec.inputs.max(1))
        .map(|i| net.add_input(format!("x{i}")))
        .collect();
    let mut attempts = 0;
    while net.num_gates() < spec.gates && attempts < spec.gates * 20 {
        attempts += 1;
        let pick = |rng: &mut ChaCha8Rng| {
            let n = pool.len();
            let i = if rng.gen_bool(0.6) {
                n - 1 - rng.gen_range(0..n.min(6))
            } else {
                rng.gen_range(0..n)
            };
            pool[i].complement_if(rng.gen_bool(0.4))
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let kind = if rng.gen_range(0..100) < spec.and_percent {
            GateKind::And
        } else {
            GateKind::Xor
        };
        let before = net.num_gates();
        let s = net.add_gate(kind, a, b).expect("operands are valid");
        if net.num_gates() > before {
            pool.push(s);
        }
    }
    let gates: Vec<Signal> = pool[spec.inputs.max(1)..].to_vec();
    let mut outputs: Vec<Signal> = Vec::new();
    if let Some(&last) = gates.last() {
        outputs.push(last);
    }
    while outputs.len() < spec.outputs && !pool.is_empty() {
        let src = if gates.is_empty() { &pool } else { &gates };
        let s = src[rng.gen_range(0..src.len())].complement_if(rng.gen_bool(0.3));
        outputs.push(s);
    }
    for (i, s) in outputs.into_iter().enumerate() {
        net.add_output(format!("y{i}"), s).expect("valid signal");
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let spec = RandomSpec::default();
        let a = random_network(&spec, 7);
        let b = random_network(&spec, 7);
        assert_eq!(crate::netlist::write_xag_text(&a), crate::netlist::write_xag_text(&b));
        assert_eq!(a.num_gates(), 50);
        assert_eq!(a.outputs().len(), 4);
    }
}
