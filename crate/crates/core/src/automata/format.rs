use std::fmt;

use crate::error::{Error, Result};
use crate::terms::{join_names, resolve_pair, ConvolutionAlphabet, RankedAlphabet, Signature};

use super::{Automaton, SpecAutomaton, StateId, Transition, TreeAutomaton};

#[derive(Clone, Debug)]
pub enum LoadedAutomaton {
    Plain(TreeAutomaton),
    Spec(SpecAutomaton),
}

/// Header lines shared by automaton and transducer files.
pub(crate) struct Header {
    pub input: RankedAlphabet,
    pub output: Option<RankedAlphabet>,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub initial_line: usize,
    /// Non-header lines with their 1-based line numbers, comments stripped.
    pub body: Vec<(usize, String)>,
}

fn parse_alphabet(line: usize, items: &[&str]) -> Result<RankedAlphabet> {
    let mut syms = Vec::new();
    for it in items {
        let (name, arity) = it.rsplit_once(':').ok_or_else(|| Error::Format {
            line,
            msg: format!("expected name:arity, found `{it}`"),
        })?;
        let arity = arity.parse::<usize>().map_err(|_| Error::Format {
            line,
            msg: format!("bad arity in `{it}`"),
        })?;
        syms.push((name.to_string(), arity));
    }
    RankedAlphabet::new(syms).map_err(|e| Error::Format {
        line,
        msg: e.to_string(),
    })
}

pub(crate) fn parse_header(text: &str) -> Result<Header> {
    let mut input = None;
    let mut output = None;
    let mut states = None;
    let mut initial = None;
    let mut initial_line = 0;
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let dup = |what: &str| Error::Format {
            line,
            msg: format!("duplicate `{what}` line"),
        };
        match words[0] {
            "input" => {
                if input.replace(parse_alphabet(line, &words[1..])?).is_some() {
                    return Err(dup("input"));
                }
            }
            "output" => {
                if output.replace(parse_alphabet(line, &words[1..])?).is_some() {
                    return Err(dup("output"));
                }
            }
            "states" => {
                let v: Vec<String> = words[1..].iter().map(|s| s.to_string()).collect();
                if v.is_empty() {
                    return Err(Error::Format {
                        line,
                        msg: "no states declared".into(),
                    });
                }
                if states.replace(v).is_some() {
                    return Err(dup("states"));
                }
            }
            "initial" => {
                let v: Vec<String> = words[1..].iter().map(|s| s.to_string()).collect();
                if initial.replace(v).is_some() {
                    return Err(dup("initial"));
                }
                initial_line = line;
            }
            _ => body.push((line, content.to_string())),
        }
    }
    let missing = |what: &str| Error::Format {
        line: 0,
        msg: format!("missing `{what}` line"),
    };
    let states: Vec<String> = states.ok_or_else(|| missing("states"))?;
    for (k, s) in states.iter().enumerate() {
        if states[..k].contains(s) {
            return Err(Error::Format {
                line: 0,
                msg: format!("state `{s}` declared twice"),
            });
        }
    }
    Ok(Header {
        input: input.ok_or_else(|| missing("input"))?,
        output,
        states,
        initial: initial.ok_or_else(|| missing("initial"))?,
        initial_line,
        body,
    })
}

pub(crate) fn state_lookup(states: &[String], line: usize, name: &str) -> Result<StateId> {
    states
        .iter()
        .position(|s| s == name)
        .map(|i| StateId(i as u32))
        .ok_or_else(|| Error::Format {
            line,
            msg: format!("unknown state `{name}`"),
        })
}

/// Parses an automaton file; the presence of an `output` line selects a convolution alphabet.
pub fn parse_automaton(text: &str) -> Result<LoadedAutomaton> {
    let h = parse_header(text)?;
    let initial = h
        .initial
        .iter()
        .map(|n| state_lookup(&h.states, h.initial_line, n))
        .collect::<Result<Vec<_>>>()?;
    let mut plain = Vec::new();
    let mut pairs = Vec::new();
    let conv = h
        .output
        .clone()
        .map(|o| ConvolutionAlphabet::new(h.input.clone(), o));
    for (line, content) in &h.body {
        let (lhs, rhs) = match content.split_once("->") {
            Some((l, r)) => (l, r),
            None => (content.as_str(), ""),
        };
        let lw: Vec<&str> = lhs.split_whitespace().collect();
        if lw.len() != 2 {
            return Err(Error::Format {
                line: *line,
                msg: "expected `state symbol [-> states]`".into(),
            });
        }
        let from = state_lookup(&h.states, *line, lw[0])?;
        let to = rhs
            .split_whitespace()
            .map(|n| state_lookup(&h.states, *line, n))
            .collect::<Result<Vec<_>>>()?;
        let wrap = |e: Error| Error::Format {
            line: *line,
            msg: e.to_string(),
        };
        match &conv {
            Some(c) => {
                let label = resolve_pair(lw[1], to.len(), c).map_err(wrap)?;
                pairs.push(Transition { from, label, to });
            }
            None => {
                let label = h.input.resolve(lw[1], to.len()).map_err(wrap)?;
                plain.push(Transition { from, label, to });
            }
        }
    }
    let wrap = |e: Error| Error::Format {
        line: 0,
        msg: e.to_string(),
    };
    Ok(match conv {
        Some(c) => {
            LoadedAutomaton::Spec(Automaton::new(c, h.states, initial, pairs).map_err(wrap)?)
        }
        None => {
            LoadedAutomaton::Plain(Automaton::new(h.input, h.states, initial, plain).map_err(wrap)?)
        }
    })
}

pub fn parse_spec(text: &str) -> Result<SpecAutomaton> {
    match parse_automaton(text)? {
        LoadedAutomaton::Spec(a) => Ok(a),
        LoadedAutomaton::Plain(_) => Err(Error::Format {
            line: 0,
            msg: "missing `output` line".into(),
        }),
    }
}

pub fn parse_tree_automaton(text: &str) -> Result<TreeAutomaton> {
    match parse_automaton(text)? {
        LoadedAutomaton::Plain(a) => Ok(a),
        LoadedAutomaton::Spec(_) => Err(Error::Format {
            line: 0,
            msg: "expected an automaton without `output` line".into(),
        }),
    }
}

fn write_body<S: Signature>(f: &mut fmt::Formatter<'_>, a: &Automaton<S>) -> fmt::Result {
    writeln!(f, "states {}", join_names(a.states.iter().cloned()))?;
    writeln!(
        f,
        "initial {}",
        join_names(a.initial.iter().map(|q| a.state_name(*q).to_string()))
    )?;
    for t in &a.transitions {
        write!(
            f,
            "{} {}",
            a.state_name(t.from),
            a.signature.label_name(t.label)
        )?;
        if !t.to.is_empty() {
            write!(
                f,
                " -> {}",
                join_names(t.to.iter().map(|q| a.state_name(*q).to_string()))
            )?;
        }
        writeln!(f)?;
    }
    Ok(())
}

impl fmt::Display for TreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input {}", self.signature)?;
        write_body(f, self)
    }
}

impl fmt::Display for SpecAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input {}", self.signature.input)?;
        writeln!(f, "output {}", self.signature.output)?;
        write_body(f, self)
    }
}
