//! Exact multiplicative-complexity synthesis and the NPN-class database used
//! by cut rewriting.
//!
//! A fragment is a chain of AND gates whose inputs are XOR combinations of
//! the fragment inputs and earlier gate outputs; the output is an affine
//! combination of the same signals. Affine masks use bit 0 for constant one,
//! bits `1..=n` for the inputs and bits `n+1..` for the gate outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::npn::{self, NpnTransform};
use crate::xag::{GateBuilder, Literal};

/// AND budget used when building the 4-input database.
pub const DEFAULT_BUDGET: usize = 4;
pub const DATABASE_ARITY: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalFragment {
    pub num_inputs: usize,
    /// Input masks of each AND gate.
    pub gates: Vec<(u32, u32)>,
    pub output: u32,
}

impl OptimalFragment {
    pub fn and_count(&self) -> usize {
        self.gates.len()
    }

    fn signal_tables(&self) -> Vec<u16> {
        let n = self.num_inputs;
        let m = npn::mask(n);
        let mut sigs: Vec<u16> = vec![m];
        sigs.extend((0..n).map(|i| var_table(i, n)));
        for &(a, b) in &self.gates {
            let ta = combine(&sigs, a);
            let tb = combine(&sigs, b);
            sigs.push(ta & tb);
        }
        sigs
    }

    pub fn simulate(&self) -> u16 {
        combine(&self.signal_tables(), self.output)
    }

    /// Builds the fragment over `inputs` (one literal per fragment input).
    pub fn build<B: GateBuilder>(&self, b: &mut B, inputs: &[B::Lit]) -> B::Lit {
        assert_eq!(inputs.len(), self.num_inputs);
        let mut sigs: Vec<B::Lit> = vec![B::Lit::zero().complement_if(true)];
        sigs.extend_from_slice(inputs);
        let affine = |b: &mut B, sigs: &[B::Lit], mask: u32| -> B::Lit {
            let lits: Vec<B::Lit> = (1..sigs.len())
                .filter(|&i| (mask >> i) & 1 == 1)
                .map(|i| sigs[i])
                .collect();
            b.build_xor_all(&lits).complement_if(mask & 1 == 1)
        };
        for &(ma, mb) in &self.gates {
            let x = affine(b, &sigs, ma);
            let y = affine(b, &sigs, mb);
            let g = b.build_and(x, y);
            sigs.push(g);
        }
        affine(b, &sigs, self.output)
    }
}

fn var_table(i: usize, n: usize) -> u16 {
    const VARS: [u16; 4] = [0xaaaa, 0xcccc, 0xf0f0, 0xff00];
    VARS[i] & npn::mask(n)
}

fn combine(sigs: &[u16], mask: u32) -> u16 {
    let mut t = 0;
    for (i, s) in sigs.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            t ^= s;
        }
    }
    t
}

struct Search {
    n: usize,
    target: u16,
    full: u16,
    /// Linear signals: inputs then gate outputs.
    sigs: Vec<u16>,
    gates: Vec<(u32, u32)>,
    seen: Vec<u64>,
}

impl Search {
    fn linear_tables(&self) -> Vec<u16> {
        let m = self.sigs.len();
        let mut lin = vec![0u16; 1 << m];
        for u in 1..(1usize << m) {
            let low = u.trailing_zeros() as usize;
            lin[u] = lin[u & (u - 1)] ^ self.sigs[low];
        }
        lin
    }

    fn set(&mut self, v: u16) {
        self.seen[v as usize >> 6] |= 1 << (v & 63);
    }

    fn clear(&mut self, v: u16) {
        self.seen[v as usize >> 6] &= !(1 << (v & 63));
    }

    fn contains(&self, v: u16) -> bool {
        (self.seen[v as usize >> 6] >> (v & 63)) & 1 == 1
    }

    fn output_mask(&self) -> Option<u32> {
        let lin = self.linear_tables();
        for (u, &t) in lin.iter().enumerate() {
            if t == self.target {
                return Some((u as u32) << 1);
            }
            if t ^ self.full == self.target {
                return Some(((u as u32) << 1) | 1);
            }
        }
        None
    }

    /// Tries to finish with exactly `remaining` more AND gates.
    fn run(&mut self, remaining: usize) -> Option<u32> {
        if remaining == 0 {
            return self.output_mask();
        }
        let m = self.sigs.len();
        let lin = self.linear_tables();
        let span: Vec<u16> = lin.iter().flat_map(|&t| [t, t ^ self.full]).collect();
        for &v in &span {
            self.set(v);
        }
        let mut found = None;
        'outer: for u in 1..(1usize << m) {
            for v in (u + 1)..(1usize << m) {
                if (u ^ v) < v {
                    continue;
                }
                let p = lin[u] & lin[v];
                if self.contains(p) {
                    continue;
                }
                if remaining == 1 {
                    if self.contains(self.target ^ p) {
                        self.gates.push(((u as u32) << 1, (v as u32) << 1));
                        self.sigs.push(p);
                        found = self.output_mask();
                        debug_assert!(found.is_some());
                        break 'outer;
                    }
                } else {
                    for &s in &span {
                        self.clear(s);
                    }
                    self.gates.push(((u as u32) << 1, (v as u32) << 1));
                    self.sigs.push(p);
                    if let Some(out) = self.run(remaining - 1) {
                        return Some(out);
                    }
                    self.gates.pop();
                    self.sigs.pop();
                    for &s in &span {
                        self.set(s);
                    }
                }
            }
        }
        for &s in &span {
            self.clear(s);
        }
        found
    }
}

/// Searches for an implementation with the fewest AND gates, trying
/// `0, 1, ..., budget` gates in turn. `None` when the budget is exhausted.
pub fn exact_mc_synthesize(tt: u16, n: usize, budget: usize) -> Result<Option<OptimalFragment>> {
    if n > npn::MAX_NPN_VARS {
        return Err(Error::Arity(n));
    }
    let full = npn::mask(n);
    let target = tt & full;
    for g in 0..=budget {
        let mut s = Search {
            n,
            target,
            full,
            sigs: (0..n).map(|i| var_table(i, n)).collect(),
            gates: Vec::new(),
            seen: vec![0; 1024],
        };
        if let Some(output) = s.run(g) {
            let frag = OptimalFragment {
                num_inputs: s.n,
                gates: s.gates,
                output,
            };
            debug_assert_eq!(frag.simulate(), target);
            return Ok(Some(frag));
        }
    }
    Ok(None)
}

/// Canonical representatives of all NPN classes over `n` variables, ascending.
pub fn npn_class_representatives(n: usize) -> Result<Vec<u16>> {
    if n > npn::MAX_NPN_VARS {
        return Err(Error::Arity(n));
    }
    let count = 1usize << (1 << n);
    let mut visited = vec![false; count];
    let mut reps = Vec::new();
    // The first unvisited table in ascending order is its orbit's minimum.
    let mut transforms = Vec::new();
    for perm in all_perms(n) {
        for neg in 0..(1u8 << n) {
            for output_neg in [false, true] {
                transforms.push(NpnTransform {
                    perm,
                    input_neg: neg,
                    output_neg,
                });
            }
        }
    }
    for tt in 0..count {
        if visited[tt] {
            continue;
        }
        reps.push(tt as u16);
        for t in &transforms {
            visited[t.apply(tt as u16, n) as usize] = true;
        }
    }
    Ok(reps)
}

fn all_perms(n: usize) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    let mut p = [0u8, 1, 2, 3];
    fn rec(k: usize, n: usize, p: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        if k == n {
            out.push(*p);
            return;
        }
        for i in k..n {
            p.swap(k, i);
            rec(k + 1, n, p, out);
            p.swap(k, i);
        }
    }
    rec(0, n, &mut p, &mut out);
    out
}

/// A fragment together with the wiring that realizes the queried function.
#[derive(Clone, Copy, Debug)]
pub struct Match<'a> {
    pub fragment: &'a OptimalFragment,
    pub transform: NpnTransform,
}

impl Match<'_> {
    /// Builds the matched function over `leaves` (one per queried variable;
    /// missing variables of a narrower query are never referenced).
    pub fn build<B: GateBuilder>(&self, b: &mut B, leaves: &[B::Lit]) -> B::Lit {
        let n = self.fragment.num_inputs;
        let inputs: Vec<B::Lit> = (0..n)
            .map(|i| {
                let src = self.transform.perm[i] as usize;
                let leaf = leaves.get(src).copied().unwrap_or_else(B::Lit::zero);
                leaf.complement_if(self.transform.input_negated(i))
            })
            .collect();
        self.fragment.build(b, &inputs).complement_if(self.transform.output_neg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McDatabase {
    arity: usize,
    entries: BTreeMap<u16, OptimalFragment>,
}

impl McDatabase {
    /// One MC-optimal fragment per NPN class over `n` inputs.
    pub fn build(n: usize) -> Result<McDatabase> {
        let mut entries = BTreeMap::new();
        for rep in npn_class_representatives(n)? {
            let frag = exact_mc_synthesize(rep, n, DEFAULT_BUDGET)?.ok_or_else(|| {
                Error::Database(format!("class {rep:#06x} needs more than {DEFAULT_BUDGET} AND gates"))
            })?;
            entries.insert(rep, frag);
        }
        Ok(McDatabase { arity: n, entries })
    }

    /// The 4-input database, built once per process.
    pub fn shared() -> &'static McDatabase {
        static DB: OnceLock<McDatabase> = OnceLock::new();
        DB.get_or_init(|| McDatabase::build(DATABASE_ARITY).expect("4-input database builds"))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u16, &OptimalFragment)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn max_and_count(&self) -> usize {
        self.entries.values().map(|f| f.and_count()).max().unwrap_or(0)
    }

    /// Finds the fragment for a function of `n <= arity` variables.
    pub fn lookup(&self, tt: u16, n: usize) -> Result<Match<'_>> {
        if n > self.arity {
            return Err(Error::Arity(n));
        }
        let wide = npn::extend_table(tt, n, self.arity);
        let (canon, t) = npn::npn_canonicalize(wide, self.arity)?;
        let fragment = self
            .entries
            .get(&canon)
            .ok_or_else(|| Error::Database(format!("missing class {canon:#06x}")))?;
        // canon(y) = f(x) ^ o with x[perm[i]] = y[i] ^ neg(i), so the fragment
        // input i is driven by leaf perm[i].
        Ok(Match { fragment, transform: t })
    }

    pub fn to_text(&self) -> String {
        let digits = ((1usize << self.arity) / 4).max(1);
        let mut out = format!("arity {}\n", self.arity);
        for (tt, f) in &self.entries {
            let _ = write!(out, "{:0width$x} {}", tt, f.and_count(), width = digits);
            for (a, b) in &f.gates {
                let _ = write!(out, " {a:x}*{b:x}");
            }
            let _ = writeln!(out, " out {:x}", f.output);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<McDatabase> {
        let perr = |line: usize, m: &str| Error::Parse {
            line,
            message: m.to_string(),
        };
        let mut arity = None;
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks: Vec<&str> = raw.split('#').next().unwrap().split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if toks[0] == "arity" {
                let n: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr(line, "bad arity"))?;
                if n > npn::MAX_NPN_VARS {
                    return Err(Error::Arity(n));
                }
                arity = Some(n);
                continue;
            }
            let n = arity.ok_or_else(|| perr(line, "entry before arity line"))?;
            let hex = |t: &str| u32::from_str_radix(t, 16).map_err(|_| perr(line, "bad hex value"));
            let tt = hex(toks[0])? as u16;
            let g: usize = toks
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(line, "bad gate count"))?;
            if toks.len() != g + 4 || toks[g + 2] != "out" {
                return Err(perr(line, "expected '<tt> <g> <a>*<b>... out <mask>'"));
            }
            let mut gates = Vec::with_capacity(g);
            for t in &toks[2..2 + g] {
                let (a, b) = t.split_once('*').ok_or_else(|| perr(line, "gate must be '<a>*<b>'"))?;
                gates.push((hex(a)?, hex(b)?));
            }
            let frag = OptimalFragment {
                num_inputs: n,
                gates,
                output: hex(toks[g + 3])?,
            };
            if frag.simulate() != tt {
                return Err(Error::Database(format!(
                    "line {line}: fragment does not realize {tt:x}"
                )));
            }
            entries.insert(tt, frag);
        }
        let arity = arity.ok_or_else(|| perr(0, "missing arity line"))?;
        Ok(McDatabase { arity, entries })
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }

    pub fn load(path: &Path) -> Result<McDatabase> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Database(format!("{}: {e}", path.display())))?;
        McDatabase::from_text(&text)
    }
}
