//! Line-based trace files.
//!
//! ```text
//! node 0 CONST0
//! node 1 PI a
//! node 3 AND 1 !2
//! union 3 5 inv
//! output y !3
//! ```

use std::fmt::Write as _;

use super::{ClassId, EGraph, ELit};
use crate::error::{Error, Result};
use crate::xag::{GateBuilder, GateKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Input {
        id: u32,
        name: String,
    },
    Gate {
        id: u32,
        kind: GateKind,
        ops: [ELit; 2],
    },
    /// Class `a` equals class `b`, complemented when `inv`.
    Union {
        a: u32,
        b: u32,
        inv: bool,
    },
    Output {
        name: String,
        lit: ELit,
    },
}

pub fn write_trace(events: &[TraceEvent]) -> String {
    let mut out = String::from("node 0 CONST0\n");
    for e in events {
        match e {
            TraceEvent::Input { id, name } => writeln!(out, "node {id} PI {name}"),
            TraceEvent::Gate { id, kind, ops } => {
                writeln!(out, "node {id} {} {} {}", kind.as_str(), ops[0], ops[1])
            }
            TraceEvent::Union { a, b, inv } => {
                writeln!(out, "union {a} {b}{}", if *inv { " inv" } else { "" })
            }
            TraceEvent::Output { name, lit } => writeln!(out, "output {name} {lit}"),
        }
        .expect("writing to a string");
    }
    out
}

fn parse_lit(tok: &str, line: usize) -> Result<ELit> {
    let (neg, body) = match tok.strip_prefix('!') {
        Some(rest) => (true, rest),
        None => (false, tok),
    };
    let id: u32 = body.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad literal '{tok}'"),
    })?;
    Ok(ELit::new(ClassId(id), neg))
}

fn parse_id(tok: &str, line: usize) -> Result<u32> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad id '{tok}'"),
    })
}

fn parse_lines(text: &str) -> Result<Vec<(usize, TraceEvent)>> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let malformed = || Error::Parse {
            line,
            message: format!("malformed statement '{content}'"),
        };
        let event = match toks.as_slice() {
            ["node", id, "CONST0"] => {
                if parse_id(id, line)? != 0 {
                    return Err(Error::Parse {
                        line,
                        message: "the constant must be node 0".into(),
                    });
                }
                continue;
            }
            ["node", id, "PI", name] => TraceEvent::Input {
                id: parse_id(id, line)?,
                name: name.to_string(),
            },
            ["node", id, kind @ ("AND" | "XOR"), a, b] => TraceEvent::Gate {
                id: parse_id(id, line)?,
                kind: if *kind == "AND" { GateKind::And } else { GateKind::Xor },
                ops: [parse_lit(a, line)?, parse_lit(b, line)?],
            },
            ["union", a, b] => TraceEvent::Union {
                a: parse_id(a, line)?,
                b: parse_id(b, line)?,
                inv: false,
            },
            ["union", a, b, "inv"] => TraceEvent::Union {
                a: parse_id(a, line)?,
                b: parse_id(b, line)?,
                inv: true,
            },
            ["output", name, lit] => TraceEvent::Output {
                name: name.to_string(),
                lit: parse_lit(lit, line)?,
            },
            _ => return Err(malformed()),
        };
        events.push((line, event));
    }
    Ok(events)
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>> {
    Ok(parse_lines(text)?.into_iter().map(|(_, e)| e).collect())
}

/// Rebuilds the e-graph a trace was written from.
pub fn replay_trace(text: &str) -> Result<EGraph> {
    let events = parse_lines(text)?;
    let mut eg = EGraph::new();
    let num_inputs = events
        .iter()
        .filter(|(_, e)| matches!(e, TraceEvent::Input { .. }))
        .count();
    eg.enable_checking(num_inputs);
    for (line, event) in events {
        let known = |eg: &EGraph, id: u32| -> Result<()> {
            if (id as usize) < eg.num_class_ids() {
                Ok(())
            } else {
                Err(Error::Parse {
                    line,
                    message: format!("id {id} used before definition"),
                })
            }
        };
        let expect_id = |got: ELit, id: u32| -> Result<()> {
            if got == ELit::new(ClassId(id), false) {
                Ok(())
            } else {
                Err(Error::Parse {
                    line,
                    message: format!("node {id} does not replay to a fresh class"),
                })
            }
        };
        match event {
            TraceEvent::Input { id, name } => {
                let lit = eg.add_input(&name);
                expect_id(lit, id)?;
            }
            TraceEvent::Gate { id, kind, ops } => {
                known(&eg, ops[0].class().0)?;
                known(&eg, ops[1].class().0)?;
                let lit = eg.build_gate(kind, ops[0], ops[1]);
                expect_id(lit, id)?;
            }
            TraceEvent::Union { a, b, inv } => {
                known(&eg, a)?;
                known(&eg, b)?;
                eg.union(ELit::new(ClassId(a), false), ELit::new(ClassId(b), inv))
                    .map_err(|e| Error::Parse {
                        line,
                        message: e.to_string(),
                    })?;
            }
            TraceEvent::Output { name, lit } => {
                known(&eg, lit.class().0)?;
                eg.add_output(name, lit);
            }
        }
    }
    Ok(eg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::tests::full_adder;

    #[test]
    fn empty_trace_gives_empty_egraph() {
        let eg = replay_trace("").unwrap();
        assert_eq!(eg.num_classes(), 1);
        assert!(eg.outputs().is_empty());
    }

    #[test]
    fn round_trip_counts() {
        let net = full_adder();
        let (mut eg, map) = EGraph::from_network(&net);
        let [a, b, c] = [0, 1, 2].map(|i| map[net.inputs()[i].index()].unwrap());
        let ac = eg.build_xor(a, c);
        let bc = eg.build_xor(b, c);
        let t = eg.build_and(ac, bc);
        let maj = eg.build_xor(t, c);
        let carry = eg.outputs()[1].1;
        eg.union(carry, maj).unwrap();
        let text = write_trace(eg.events());
        let again = replay_trace(&text).unwrap();
        assert_eq!(again.num_classes(), eg.num_classes());
        assert_eq!(again.num_nodes(), eg.num_nodes());
        assert_eq!(again.outputs(), eg.outputs());
        assert_eq!(write_trace(again.events()), text);
    }

    #[test]
    fn self_union_is_noop() {
        let text = "node 0 CONST0\nnode 1 PI a\nunion 1 1\noutput y 1\n";
        let eg = replay_trace(text).unwrap();
        assert_eq!(eg.num_classes(), 2);
    }

    #[test]
    fn malformed_line_reports_line() {
        let err = replay_trace("node 1 PI a\nnode 2 NAND 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = replay_trace("node 1 PI a\nunion 1 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
