//! Brute-force ground truth: tree enumeration, uniformizer verification and
//! refutation of every small transducer.

use std::fmt::Write;

use crate::automata::{InputGuard, SpecAutomaton, StateId, TreeAutomaton};
use crate::error::{Error, Result};
use crate::terms::{print_term, translate_tree, RankedAlphabet, Sym, Tree};
use crate::transducers::{Lhs, RhsLabel, Rule, Transducer};

/// All trees of height at most `max_depth`, by height, then by symbol
/// declaration order, then lexicographically by child tuples.
pub struct TreeEnumerator<'a> {
    alphabet: &'a RankedAlphabet,
    max_depth: usize,
    /// Trees of height below `height`, in emission order.
    upto: Vec<Tree>,
    /// Index in `upto` where height `height - 1` starts.
    level_start: usize,
    fresh: Vec<Tree>,
    height: usize,
    symbols: Vec<Sym>,
    sym_pos: usize,
    odometer: Option<Vec<usize>>,
}

pub fn enumerate_trees(alphabet: &RankedAlphabet, max_depth: usize) -> TreeEnumerator<'_> {
    TreeEnumerator {
        alphabet,
        max_depth,
        upto: Vec::new(),
        level_start: 0,
        fresh: Vec::new(),
        height: 0,
        symbols: alphabet.symbols().collect(),
        sym_pos: 0,
        odometer: None,
    }
}

impl TreeEnumerator<'_> {
    fn advance_odometer(&mut self) {
        let n = self.upto.len();
        if let Some(od) = &mut self.odometer {
            for k in (0..od.len()).rev() {
                od[k] += 1;
                if od[k] < n {
                    return;
                }
                od[k] = 0;
            }
        }
        self.odometer = None;
        self.sym_pos += 1;
    }
}

impl Iterator for TreeEnumerator<'_> {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        loop {
            if self.height > self.max_depth {
                return None;
            }
            if self.sym_pos >= self.symbols.len() {
                // Level done.
                if self.fresh.is_empty() && self.height > 0 {
                    self.height = self.max_depth + 1;
                    return None;
                }
                self.level_start = self.upto.len();
                self.upto.append(&mut self.fresh);
                self.height += 1;
                self.sym_pos = 0;
                continue;
            }
            let f = self.symbols[self.sym_pos];
            let arity = self.alphabet.arity(f);
            if self.height == 0 {
                self.sym_pos += 1;
                if arity == 0 {
                    let t = Tree::leaf(f);
                    self.fresh.push(t.clone());
                    return Some(t);
                }
                continue;
            }
            if arity == 0 {
                self.sym_pos += 1;
                continue;
            }
            if self.odometer.is_none() {
                self.odometer = Some(vec![0; arity]);
            }
            let od = self.odometer.clone().unwrap();
            self.advance_odometer();
            if od.iter().all(|&i| i < self.level_start) {
                continue;
            }
            let t = Tree::new(f, od.iter().map(|&i| self.upto[i].clone()).collect());
            if self.height < self.max_depth {
                self.fresh.push(t.clone());
            }
            return Some(t);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// The transducer has no rule to continue.
    Stuck(String),
    /// The output is not related to the input.
    Rejected(Tree),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub input: Tree,
    pub kind: FailureKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    /// Domain inputs checked.
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    /// One line per failure: the input term, a tab, and the verdict.
    pub fn to_lines(&self, input: &RankedAlphabet, output: &RankedAlphabet) -> String {
        let mut s = String::new();
        for f in &self.failures {
            let verdict = match &f.kind {
                FailureKind::Stuck(_) => "stuck".to_string(),
                FailureKind::Rejected(o) => format!("rejected {}", print_term(o, output)),
            };
            let _ = writeln!(s, "{}\t{verdict}", print_term(&f.input, input));
        }
        s
    }
}

fn domain_guard(spec: &SpecAutomaton, dom: Option<&TreeAutomaton>) -> Result<InputGuard> {
    match dom {
        Some(d) => InputGuard::new(&spec.signature().input, d),
        None => Ok(InputGuard::total()),
    }
}

/// Checks `t ⊗ T(t)` against the relation automaton for every domain input up to `depth`.
pub fn verify_uniformizer(
    spec: &SpecAutomaton,
    transducer: &Transducer,
    depth: usize,
    dom: Option<&TreeAutomaton>,
) -> Result<VerifyReport> {
    let sig = spec.signature();
    if !transducer.input().same_symbols(&sig.input)
        || !transducer.output().same_symbols(&sig.output)
    {
        return Err(Error::AlphabetMismatch(
            "transducer and spec alphabets differ".into(),
        ));
    }
    let guard = domain_guard(spec, dom)?;
    let same_in = transducer.input() == &sig.input;
    let same_out = transducer.output() == &sig.output;
    let mut report = VerifyReport::default();
    for t in enumerate_trees(&sig.input, depth) {
        if !guard.accepts(&t) {
            continue;
        }
        report.checked += 1;
        let run = if same_in {
            transducer.execute(&t)
        } else {
            transducer.execute(&translate_tree(&t, &sig.input, transducer.input())?)
        };
        let kind = match run {
            Err(e) => Some(FailureKind::Stuck(e.to_string())),
            Ok(o) => {
                let o = if same_out {
                    o
                } else {
                    translate_tree(&o, transducer.output(), &sig.output)?
                };
                let ok = spec.accepts_pair_unchecked(spec.initial(), Some(&t), Some(&o));
                (!ok).then_some(FailureKind::Rejected(o))
            }
        };
        if let Some(kind) = kind {
            report.failures.push(Failure { input: t, kind });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub enum Refutation {
    /// Every candidate failed; `failing_inputs[c]` is the first failing input of candidate `c`.
    AllFail {
        candidates: u128,
        failing_inputs: Vec<Tree>,
    },
    /// A candidate passed every enumerated input. Not a proof of realizability.
    Survivor(Transducer),
}

/// Right-hand sides of depth at most `depth`, calls counting as leaves:
/// output leaves, then calls, then deeper trees.
fn rhs_options(
    gamma: &RankedAlphabet,
    states: usize,
    vars: usize,
    depth: usize,
) -> Vec<Tree<RhsLabel>> {
    let mut base: Vec<Tree<RhsLabel>> = gamma
        .leaves()
        .map(|g| Tree::leaf(RhsLabel::Out(g)))
        .collect();
    for q in 0..states {
        for j in 1..=vars {
            base.push(Tree::leaf(RhsLabel::Call(StateId(q as u32), j)));
        }
    }
    let mut level = base.clone();
    for _ in 0..depth {
        let mut next = base.clone();
        for g in gamma.symbols().filter(|&g| gamma.arity(g) > 0) {
            let n = gamma.arity(g);
            let mut od = vec![0usize; n];
            'tuples: loop {
                next.push(Tree::new(
                    RhsLabel::Out(g),
                    od.iter().map(|&i| level[i].clone()).collect(),
                ));
                for k in (0..n).rev() {
                    od[k] += 1;
                    if od[k] < level.len() {
                        continue 'tuples;
                    }
                    od[k] = 0;
                }
                break;
            }
        }
        level = next;
    }
    level
}

/// Advances a mixed-radix counter; false once it wraps around.
fn bump(od: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..od.len()).rev() {
        od[k] += 1;
        if od[k] < radix(k) {
            return true;
        }
        od[k] = 0;
    }
    false
}

/// Enumerates every total deterministic transducer with up to `state_budget`
/// states and right-hand sides of depth at most `rule_depth`, and looks for
/// a failing input of height at most `input_depth` for each.
pub fn refute_small_transducers(
    spec: &SpecAutomaton,
    state_budget: usize,
    rule_depth: usize,
    input_depth: usize,
    dom: Option<&TreeAutomaton>,
    max_candidates: u128,
) -> Result<Refutation> {
    let sig = spec.signature();
    let sigma = &sig.input;
    let guard = domain_guard(spec, dom)?;
    let inputs: Vec<Tree> = enumerate_trees(sigma, input_depth)
        .filter(|t| guard.accepts(t))
        .collect();
    let symbols: Vec<Sym> = sigma.symbols().collect();

    let mut total: u128 = 0;
    let mut plans = Vec::new();
    for n in 1..=state_budget {
        let options: Vec<Vec<Tree<RhsLabel>>> = symbols
            .iter()
            .map(|&f| rhs_options(&sig.output, n, sigma.arity(f), rule_depth))
            .collect();
        let per_state: u128 = options.iter().map(|o| o.len() as u128).product();
        let count = (0..n)
            .try_fold(1u128, |acc, _| acc.checked_mul(per_state))
            .unwrap_or(u128::MAX);
        total = total.saturating_add(count);
        if total > max_candidates {
            return Err(Error::CandidateBudget(total));
        }
        plans.push((n, options));
    }

    let mut failing_inputs = Vec::new();
    for (n, options) in plans {
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|q| (0..symbols.len()).map(move |s| (q, s)))
            .collect();
        let mut od = vec![0usize; slots.len()];
        loop {
            let rules = slots
                .iter()
                .zip(&od)
                .map(|(&(q, s), &i)| Rule {
                    state: StateId(q as u32),
                    lhs: Lhs::Symbol(symbols[s]),
                    rhs: options[s][i].clone(),
                })
                .collect();
            let t = Transducer::new(
                sigma.clone(),
                sig.output.clone(),
                names.clone(),
                StateId(0),
                rules,
            )?;
            let failure = inputs.iter().find(|input| match t.execute(input) {
                Err(_) => true,
                Ok(o) => !spec.accepts_pair_unchecked(spec.initial(), Some(input), Some(&o)),
            });
            match failure {
                None => return Ok(Refutation::Survivor(t)),
                Some(input) => failing_inputs.push(input.clone()),
            }
            if !bump(&mut od, |k| options[slots[k].1].len()) {
                break;
            }
        }
    }
    Ok(Refutation::AllFail {
        candidates: total,
        failing_inputs,
    })
}
