//! Text formats: the line-based XAG format and a small BLIF subset.
//!
//! XAG format, one statement per line, `#` starts a comment:
//!
//! ```text
//! inputs a b cin
//! outputs sum cout
//! n1 = XOR a b
//! sum = XOR n1 cin
//! n2 = AND !a b
//! cout = !n2
//! ```
//!
//! A literal is a name with an optional leading `!`. The name `0` is the
//! constant zero, so `!0` is constant one.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::xag::{GateKind, Node, Signal, XagNetwork};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_xag_text(text: &str) -> Result<XagNetwork> {
    let mut net = XagNetwork::new();
    let mut names: HashMap<String, Signal> = HashMap::new();
    names.insert("0".into(), Signal::ZERO);
    let mut outputs: Vec<(String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some(&head) = tokens.first() else { continue };
        match head {
            "inputs" => {
                for &name in &tokens[1..] {
                    if names.contains_key(name) {
                        return Err(parse_err(line_no, format!("duplicate definition of '{name}'")));
                    }
                    let s = net.add_input(name);
                    names.insert(name.to_string(), s);
                }
            }
            "outputs" => {
                outputs.extend(tokens[1..].iter().map(|n| (n.to_string(), line_no)));
            }
            _ => {
                if tokens.len() < 3 || tokens[1] != "=" {
                    return Err(parse_err(line_no, "expected '<name> = <expr>'"));
                }
                if names.contains_key(head) {
                    return Err(parse_err(line_no, format!("duplicate definition of '{head}'")));
                }
                let lit = |tok: &str| -> Result<Signal> {
                    let (neg, name) = match tok.strip_prefix('!') {
                        Some(rest) => (true, rest),
                        None => (false, tok),
                    };
                    names
                        .get(name)
                        .map(|s| s.complement_if(neg))
                        .ok_or_else(|| parse_err(line_no, format!("undefined literal '{name}'")))
                };
                let s = match &tokens[2..] {
                    [op @ ("AND" | "XOR"), a, b] => {
                        let kind = if *op == "AND" { GateKind::And } else { GateKind::Xor };
                        let (a, b) = (lit(a)?, lit(b)?);
                        net.gate(kind, a, b)
                    }
                    [l] => lit(l)?,
                    _ => return Err(parse_err(line_no, "malformed expression")),
                };
                names.insert(head.to_string(), s);
            }
        }
    }
    for (name, line_no) in outputs {
        let s = *names
            .get(&name)
            .ok_or_else(|| parse_err(line_no, format!("output '{name}' is never defined")))?;
        net.add_output(name, s)?;
    }
    Ok(net)
}

/// Writes the live part of the network in topological order.
pub fn write_xag_text(net: &XagNetwork) -> String {
    let mut out = String::new();
    out.push_str("inputs");
    for name in net.input_names() {
        let _ = write!(out, " {name}");
    }
    out.push_str("\noutputs");
    for (name, _) in net.outputs() {
        let _ = write!(out, " {name}");
    }
    out.push('\n');

    let mut taken: HashSet<&str> = net.input_names().iter().map(String::as_str).collect();
    taken.extend(net.outputs().iter().map(|(n, _)| n.as_str()));
    let mut node_names: Vec<String> = vec![String::new(); net.num_nodes()];
    node_names[0] = "0".into();
    for (i, &id) in net.inputs().iter().enumerate() {
        node_names[id.index()] = net.input_names()[i].clone();
    }
    let lit = |names: &[String], s: Signal| -> String {
        let n = &names[s.node().index()];
        if s.is_complemented() {
            format!("!{n}")
        } else {
            n.clone()
        }
    };
    let live = net.live_mask();
    for (i, node) in net.nodes().iter().enumerate() {
        if let Node::Gate { kind, fanins } = node {
            if !live[i] {
                continue;
            }
            let mut name = format!("n{i}");
            while taken.contains(name.as_str()) {
                name.push('_');
            }
            let _ = writeln!(
                out,
                "{name} = {} {} {}",
                kind.as_str(),
                lit(&node_names, fanins[0]),
                lit(&node_names, fanins[1])
            );
            node_names[i] = name;
        }
    }
    for (name, s) in net.outputs() {
        if !s.is_complemented() && node_names[s.node().index()] == *name {
            continue;
        }
        let _ = writeln!(out, "{name} = {}", lit(&node_names, *s));
    }
    out
}

struct Cover {
    inputs: Vec<String>,
    /// Truth table over the inputs, bit `m` for minterm `m` (first input is bit 0).
    table: u8,
    line: usize,
}

fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim_end();
        let (body, cont) = match line.strip_suffix('\\') {
            Some(b) => (b, true),
            None => (line, false),
        };
        let entry = pending.get_or_insert_with(|| (idx + 1, String::new()));
        entry.1.push(' ');
        entry.1.push_str(body);
        if !cont {
            let (n, l) = pending.take().unwrap();
            if !l.trim().is_empty() {
                out.push((n, l.trim().to_string()));
            }
        }
    }
    if let Some((n, l)) = pending {
        if !l.trim().is_empty() {
            out.push((n, l.trim().to_string()));
        }
    }
    out
}

/// Output name, input names, line and cover rows of the `.names` being read.
type PendingCover = (String, Vec<String>, usize, Vec<(String, usize)>);

/// Parses `.model/.inputs/.outputs/.names/.end` with at most two inputs per
/// `.names` table.
pub fn parse_blif_subset(text: &str) -> Result<XagNetwork> {
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<(String, usize)> = Vec::new();
    let mut covers: HashMap<String, Cover> = HashMap::new();
    let mut current: Option<PendingCover> = None;

    let finish = |cur: Option<PendingCover>, covers: &mut HashMap<String, Cover>| -> Result<()> {
        let Some((out, ins, line, rows)) = cur else {
            return Ok(());
        };
        let n = ins.len();
        let mut on: u8 = 0;
        let mut polarity: Option<bool> = None;
        for (row, row_line) in rows {
            let toks: Vec<&str> = row.split_whitespace().collect();
            let (pattern, value) = match (n, toks.as_slice()) {
                (0, [v]) => ("", *v),
                (_, [p, v]) if n > 0 => (*p, *v),
                _ => return Err(parse_err(row_line, "malformed cover row")),
            };
            if pattern.len() != n {
                return Err(parse_err(row_line, "cover row width does not match inputs"));
            }
            let v = match value {
                "1" => true,
                "0" => false,
                _ => return Err(parse_err(row_line, "cover output must be 0 or 1")),
            };
            if *polarity.get_or_insert(v) != v {
                return Err(parse_err(row_line, "mixed on-set and off-set rows"));
            }
            for m in 0..(1u8 << n) {
                let matches = pattern.chars().enumerate().all(|(j, c)| match c {
                    '1' => (m >> j) & 1 == 1,
                    '0' => (m >> j) & 1 == 0,
                    '-' => true,
                    _ => false,
                });
                if pattern.chars().any(|c| !matches!(c, '0' | '1' | '-')) {
                    return Err(parse_err(row_line, "invalid cover character"));
                }
                if matches {
                    on |= 1 << m;
                }
            }
        }
        let full: u8 = if n == 0 { 1 } else { ((1u16 << (1 << n)) - 1) as u8 };
        let table = if polarity == Some(false) { !on & full } else { on };
        if covers.contains_key(&out) {
            return Err(parse_err(line, format!("signal '{out}' defined twice")));
        }
        covers.insert(
            out,
            Cover {
                inputs: ins,
                table,
                line,
            },
        );
        Ok(())
    };

    for (line, l) in logical_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0].starts_with('.') {
            finish(current.take(), &mut covers)?;
            match toks[0] {
                ".model" => {}
                ".inputs" => inputs.extend(toks[1..].iter().map(|s| s.to_string())),
                ".outputs" => outputs.extend(toks[1..].iter().map(|s| (s.to_string(), line))),
                ".names" => {
                    if toks.len() < 2 {
                        return Err(parse_err(line, ".names without output"));
                    }
                    let ins: Vec<String> = toks[1..toks.len() - 1].iter().map(|s| s.to_string()).collect();
                    if ins.len() > 2 {
                        return Err(Error::Unsupported {
                            line,
                            feature: format!(".names with {} inputs (max 2)", ins.len()),
                        });
                    }
                    current = Some((toks[toks.len() - 1].to_string(), ins, line, Vec::new()));
                }
                ".end" => break,
                other => {
                    return Err(Error::Unsupported {
                        line,
                        feature: other.to_string(),
                    })
                }
            }
        } else {
            match current.as_mut() {
                Some(cur) => cur.3.push((l.clone(), line)),
                None => return Err(parse_err(line, "cover row outside .names")),
            }
        }
    }
    finish(current.take(), &mut covers)?;

    let mut net = XagNetwork::new();
    let mut signals: HashMap<String, Signal> = HashMap::new();
    for name in &inputs {
        if signals.contains_key(name) {
            return Err(parse_err(0, format!("duplicate input '{name}'")));
        }
        let s = net.add_input(name.clone());
        signals.insert(name.clone(), s);
    }
    for (name, line) in &outputs {
        let s = resolve_blif(name, *line, &covers, &mut signals, &mut net, &mut HashSet::new())?;
        net.add_output(name.clone(), s)?;
    }
    Ok(net)
}

fn resolve_blif(
    name: &str,
    line: usize,
    covers: &HashMap<String, Cover>,
    signals: &mut HashMap<String, Signal>,
    net: &mut XagNetwork,
    visiting: &mut HashSet<String>,
) -> Result<Signal> {
    if let Some(&s) = signals.get(name) {
        return Ok(s);
    }
    let cover = covers
        .get(name)
        .ok_or_else(|| parse_err(line, format!("undefined signal '{name}'")))?;
    if !visiting.insert(name.to_string()) {
        return Err(parse_err(cover.line, format!("combinational cycle through '{name}'")));
    }
    let mut ins = Vec::new();
    for i in &cover.inputs {
        ins.push(resolve_blif(i, cover.line, covers, signals, net, visiting)?);
    }
    let s = synthesize_small(net, &ins, cover.table);
    visiting.remove(name);
    signals.insert(name.to_string(), s);
    Ok(s)
}

/// Realizes a function of at most two inputs with at most one gate.
fn synthesize_small(net: &mut XagNetwork, ins: &[Signal], table: u8) -> Signal {
    match ins.len() {
        0 => Signal::ZERO.complement_if(table & 1 == 1),
        1 => match table & 0b11 {
            0b00 => Signal::ZERO,
            0b11 => Signal::ONE,
            0b10 => ins[0],
            _ => !ins[0],
        },
        _ => {
            let (x, y) = (ins[0], ins[1]);
            let t = table & 0xf;
            match t {
                0b0000 => Signal::ZERO,
                0b1111 => Signal::ONE,
                0b1010 => x,
                0b0101 => !x,
                0b1100 => y,
                0b0011 => !y,
                0b0110 => net.xor(x, y),
                0b1001 => !net.xor(x, y),
                _ if t.count_ones() == 1 => {
                    let m = t.trailing_zeros();
                    net.and(x.complement_if(m & 1 == 0), y.complement_if(m & 2 == 0))
                }
                _ => {
                    let m = (!t & 0xf).trailing_zeros();
                    !net.and(x.complement_if(m & 1 == 0), y.complement_if(m & 2 == 0))
                }
            }
        }
    }
}
