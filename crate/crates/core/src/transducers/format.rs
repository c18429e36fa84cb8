use std::fmt;

use crate::automata::format::{parse_header, state_lookup};
use crate::error::{Error, Result};
use crate::terms::{join_names, print_with, Cursor, RankedAlphabet, Tree};

use super::{check_rhs, Lhs, RhsLabel, Rule, Transducer};

fn parse_var(name: &str) -> Option<usize> {
    name.strip_prefix('x')?
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
}

fn parse_lhs(cur: &mut Cursor<'_>, input: &RankedAlphabet) -> Result<Lhs> {
    let (name, _) = cur.name()?;
    if name == "_" {
        return Ok(Lhs::Epsilon);
    }
    let mut arity = 0;
    if cur.eat('(') {
        loop {
            let (v, _) = cur.name()?;
            arity += 1;
            if parse_var(&v) != Some(arity) {
                return Err(cur.error(format!("expected variable x{arity}, found `{v}`")));
            }
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
    }
    Ok(Lhs::Symbol(input.resolve(&name, arity)?))
}

fn parse_rhs(
    cur: &mut Cursor<'_>,
    output: &RankedAlphabet,
    states: &[String],
) -> Result<Tree<RhsLabel>> {
    let (name, pos) = cur.name()?;
    if cur.eat('(') {
        let mut children = Vec::new();
        loop {
            children.push(parse_rhs(cur, output, states)?);
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
        let g = output.resolve(&name, children.len())?;
        return Ok(Tree::new(RhsLabel::Out(g), children));
    }
    if matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
        let (var, vpos) = cur.name()?;
        let j = parse_var(&var).ok_or(Error::Syntax {
            pos: vpos,
            msg: format!("expected a variable, found `{var}`"),
        })?;
        let q = states
            .iter()
            .position(|s| *s == name)
            .ok_or(Error::Syntax {
                pos,
                msg: format!("unknown state `{name}`"),
            })?;
        return Ok(Tree::leaf(RhsLabel::Call(
            crate::automata::StateId(q as u32),
            j,
        )));
    }
    Ok(Tree::leaf(RhsLabel::Out(output.resolve(&name, 0)?)))
}

/// Parses a transducer file: automaton-style header plus rule lines
/// `q f(x1,x2) -> g(p x1, b)`. A left side `_` denotes an ε-rule.
pub fn parse_transducer(text: &str) -> Result<Transducer> {
    let h = parse_header(text)?;
    let output = h.output.ok_or(Error::Format {
        line: 0,
        msg: "missing `output` line".into(),
    })?;
    if h.initial.len() != 1 {
        return Err(Error::Format {
            line: h.initial_line,
            msg: "a transducer has exactly one initial state".into(),
        });
    }
    let initial = state_lookup(&h.states, h.initial_line, &h.initial[0])?;
    let mut rules = Vec::new();
    for (line, content) in &h.body {
        let wrap = |e: Error| Error::Format {
            line: *line,
            msg: e.to_string(),
        };
        let (lhs, rhs) = content.split_once("->").ok_or(Error::Format {
            line: *line,
            msg: "expected `state lhs -> rhs`".into(),
        })?;
        let lhs = lhs.trim();
        let (state, pattern) = lhs.split_once(char::is_whitespace).ok_or(Error::Format {
            line: *line,
            msg: "expected `state lhs`".into(),
        })?;
        let state = state_lookup(&h.states, *line, state)?;
        let mut cur = Cursor::new(pattern);
        let lhs = parse_lhs(&mut cur, &h.input).map_err(wrap)?;
        if !cur.at_end() {
            return Err(wrap(cur.error("trailing input after left side".into())));
        }
        let mut cur = Cursor::new(rhs);
        let rhs = parse_rhs(&mut cur, &output, &h.states).map_err(wrap)?;
        if !cur.at_end() {
            return Err(wrap(cur.error("trailing input after right side".into())));
        }
        let vars = match lhs {
            Lhs::Symbol(f) => h.input.arity(f),
            Lhs::Epsilon => 1,
        };
        check_rhs(&rhs, &output, h.states.len(), vars).map_err(wrap)?;
        rules.push(Rule { state, lhs, rhs });
    }
    Transducer::new(h.input, output, h.states, initial, rules).map_err(|e| Error::Format {
        line: 0,
        msg: e.to_string(),
    })
}

impl Transducer {
    pub fn rhs_to_string(&self, rhs: &Tree<RhsLabel>) -> String {
        print_with(rhs, |l| match *l {
            RhsLabel::Out(g) => self.output.name(g).to_string(),
            RhsLabel::Call(q, j) => format!("{} x{j}", self.state_name(q)),
        })
        .replace(',', ", ")
    }

    pub fn rule_to_string(&self, r: &Rule) -> String {
        let lhs = match r.lhs {
            Lhs::Epsilon => "_".to_string(),
            Lhs::Symbol(f) => {
                let n = self.input.arity(f);
                if n == 0 {
                    self.input.name(f).to_string()
                } else {
                    let vars: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
                    format!("{}({})", self.input.name(f), vars.join(","))
                }
            }
        };
        format!(
            "{} {} -> {}",
            self.state_name(r.state),
            lhs,
            self.rhs_to_string(&r.rhs)
        )
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input {}", self.input)?;
        writeln!(f, "output {}", self.output)?;
        writeln!(f, "states {}", join_names(self.states.iter().cloned()))?;
        writeln!(f, "initial {}", self.state_name(self.initial))?;
        for r in &self.rules {
            writeln!(f, "{}", self.rule_to_string(r))?;
        }
        Ok(())
    }
}
