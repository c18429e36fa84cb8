use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeSet, HashMap};

use crate::terms::{Pair, Sym, Tree};

use super::{GuardState, InputGuard, SpecAutomaton, StateId};

/// A pair `(S_eq, S_bot)`: states that must accept `t ⊗ t'` for every legal
/// input `t`, and states that must accept `⊥ ⊗ t'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct UniformKey {
    eq: Vec<(StateId, GuardState)>,
    bot: Vec<StateId>,
}

enum Child {
    Known(Option<Tree>),
    Node(usize),
}

/// Memoized edge constraints of the delay games, relative to an input guard.
///
/// Caches use interior mutability, so one instance belongs to one thread.
pub struct Predicates<'a> {
    spec: &'a SpecAutomaton,
    guard: InputGuard,
    univ: RefCell<HashMap<(StateId, GuardState), bool>>,
    exists: OnceCell<Vec<Option<Tree>>>,
    uniform: RefCell<HashMap<UniformKey, Option<Tree>>>,
}

impl<'a> Predicates<'a> {
    pub fn new(spec: &'a SpecAutomaton, guard: InputGuard) -> Self {
        Predicates {
            spec,
            guard,
            univ: RefCell::new(HashMap::new()),
            exists: OnceCell::new(),
            uniform: RefCell::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &'a SpecAutomaton {
        self.spec
    }

    pub fn guard(&self) -> &InputGuard {
        &self.guard
    }

    /// Predicates over the total input domain.
    pub fn total(spec: &'a SpecAutomaton) -> Self {
        Predicates::new(spec, InputGuard::total())
    }

    /// Input symbols playable at `b`, with their child guard states.
    pub fn legal_inputs(&self, b: GuardState) -> Vec<(Sym, Vec<GuardState>)> {
        let sigma = &self.spec.signature().input;
        sigma
            .symbols()
            .filter_map(|f| self.guard.step(b, f, sigma.arity(f)).map(|bs| (f, bs)))
            .collect()
    }

    /// Does `q` accept `t ⊗ ⊥` for every input `t` legal at `b`?
    pub fn univ_input(&self, q: StateId, b: GuardState) -> bool {
        if let Some(&v) = self.univ.borrow().get(&(q, b)) {
            return v;
        }
        let mut ids: HashMap<(StateId, GuardState), usize> = HashMap::new();
        let mut pairs = Vec::new();
        let mut local_ok = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        ids.insert((q, b), 0);
        pairs.push((q, b));
        let mut next = 0;
        while next < pairs.len() {
            let (p, pb) = pairs[next];
            let mut ok = true;
            let mut out = Vec::new();
            'symbols: for (f, bs) in self.legal_inputs(pb) {
                let Some(to) = self.spec.delta(p, Pair::new(Some(f), None)) else {
                    ok = false;
                    break;
                };
                for (&qc, &bc) in to.iter().zip(&bs) {
                    if let Some(&v) = self.univ.borrow().get(&(qc, bc)) {
                        if !v {
                            ok = false;
                            break 'symbols;
                        }
                        continue;
                    }
                    let id = *ids.entry((qc, bc)).or_insert_with(|| {
                        pairs.push((qc, bc));
                        pairs.len() - 1
                    });
                    out.push(id);
                }
            }
            local_ok.push(ok);
            succ.push(out);
            next += 1;
        }
        let mut alive = local_ok;
        loop {
            let mut changed = false;
            for i in 0..pairs.len() {
                if alive[i] && succ[i].iter().any(|&j| !alive[j]) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut cache = self.univ.borrow_mut();
        for (i, p) in pairs.iter().enumerate() {
            cache.insert(*p, alive[i]);
        }
        alive[0]
    }

    fn exists_table(&self) -> &Vec<Option<Tree>> {
        self.exists.get_or_init(|| {
            let gamma = &self.spec.signature().output;
            let mut witness: Vec<Option<Tree>> = vec![None; self.spec.num_states()];
            loop {
                let mut found = Vec::new();
                for q in self.spec.states() {
                    if witness[q.index()].is_some() {
                        continue;
                    }
                    for g in gamma.symbols() {
                        if let Some(to) = self.spec.delta(q, Pair::new(None, Some(g))) {
                            if to.iter().all(|c| witness[c.index()].is_some()) {
                                let children = to
                                    .iter()
                                    .map(|c| witness[c.index()].clone().unwrap())
                                    .collect();
                                found.push((q, Tree::new(g, children)));
                                break;
                            }
                        }
                    }
                }
                if found.is_empty() {
                    break;
                }
                for (q, t) in found {
                    witness[q.index()] = Some(t);
                }
            }
            witness
        })
    }

    /// A smallest-round output tree `t'` with `⊥ ⊗ t'` accepted from `q`.
    pub fn exists_output(&self, q: StateId) -> Option<Tree> {
        let w = self.exists_table()[q.index()].clone();
        debug_assert!(w.as_ref().is_none_or(|t| self
            .spec
            .run_unchecked(
                q,
                &crate::terms::convolve_bot(t, crate::terms::Side::Output)
            )
            .is_some()));
        w
    }

    pub fn has_output(&self, q: StateId) -> bool {
        self.exists_table()[q.index()].is_some()
    }

    /// One output tree `t'` that works for every `(q, b)` in `eq` against
    /// all legal inputs, and for every `q` in `bot` against ⊥.
    pub fn uniform_output(&self, eq: &[(StateId, GuardState)], bot: &[StateId]) -> Option<Tree> {
        let root = UniformKey {
            eq: eq
                .iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            bot: bot
                .iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        if let Some(v) = self.uniform.borrow().get(&root) {
            return v.clone();
        }
        let mut ids: HashMap<UniformKey, usize> = HashMap::new();
        let mut keys = vec![root.clone()];
        ids.insert(root, 0);
        let mut options: Vec<Vec<(Sym, Vec<Child>)>> = Vec::new();
        let mut next = 0;
        while next < keys.len() {
            let key = keys[next].clone();
            let mut opts = Vec::new();
            for (g, children) in self.uniform_options(&key) {
                let cs = children
                    .into_iter()
                    .map(|k| {
                        if let Some(v) = self.uniform.borrow().get(&k) {
                            return Child::Known(v.clone());
                        }
                        let id = *ids.entry(k.clone()).or_insert_with(|| {
                            keys.push(k);
                            keys.len() - 1
                        });
                        Child::Node(id)
                    })
                    .collect();
                opts.push((g, cs));
            }
            options.push(opts);
            next += 1;
        }
        let mut choice: Vec<Option<usize>> = vec![None; keys.len()];
        loop {
            let mut found = Vec::new();
            for i in 0..keys.len() {
                if choice[i].is_some() {
                    continue;
                }
                let pick = options[i].iter().position(|(_, cs)| {
                    cs.iter().all(|c| match c {
                        Child::Known(v) => v.is_some(),
                        Child::Node(j) => choice[*j].is_some(),
                    })
                });
                if let Some(p) = pick {
                    found.push((i, p));
                }
            }
            if found.is_empty() {
                break;
            }
            for (i, p) in found {
                choice[i] = Some(p);
            }
        }
        let mut built: Vec<Option<Tree>> = vec![None; keys.len()];
        fn build(
            i: usize,
            options: &[Vec<(Sym, Vec<Child>)>],
            choice: &[Option<usize>],
            built: &mut Vec<Option<Tree>>,
        ) -> Tree {
            if let Some(t) = &built[i] {
                return t.clone();
            }
            let (g, cs) = &options[i][choice[i].unwrap()];
            let children = cs
                .iter()
                .map(|c| match c {
                    Child::Known(v) => v.clone().unwrap(),
                    Child::Node(j) => build(*j, options, choice, built),
                })
                .collect();
            let t = Tree::new(*g, children);
            built[i] = Some(t.clone());
            t
        }
        let mut cache = self.uniform.borrow_mut();
        for i in 0..keys.len() {
            let v = choice[i].map(|_| build(i, &options, &choice, &mut built));
            cache.insert(keys[i].clone(), v);
        }
        cache.get(&keys[0]).cloned().flatten()
    }

    /// Output symbols locally admissible for `key`, each with its child pairs.
    fn uniform_options(&self, key: &UniformKey) -> Vec<(Sym, Vec<UniformKey>)> {
        let sigma = &self.spec.signature().input;
        let gamma = &self.spec.signature().output;
        let inputs: Vec<_> = key
            .eq
            .iter()
            .map(|&(q, b)| (q, self.legal_inputs(b)))
            .collect();
        let mut out = Vec::new();
        'outputs: for g in gamma.symbols() {
            let rg = gamma.arity(g);
            let mut ch_eq = vec![BTreeSet::new(); rg];
            let mut ch_bot = vec![BTreeSet::new(); rg];
            for (q, legal) in &inputs {
                for (f, bs) in legal {
                    let rf = sigma.arity(*f);
                    let Some(to) = self.spec.delta(*q, Pair::both(*f, g)) else {
                        continue 'outputs;
                    };
                    for l in 0..rf.max(rg) {
                        if l < rf && l < rg {
                            ch_eq[l].insert((to[l], bs[l]));
                        } else if l < rf {
                            if !self.univ_input(to[l], bs[l]) {
                                continue 'outputs;
                            }
                        } else {
                            ch_bot[l].insert(to[l]);
                        }
                    }
                }
            }
            for &q in &key.bot {
                let Some(to) = self.spec.delta(q, Pair::new(None, Some(g))) else {
                    continue 'outputs;
                };
                for l in 0..rg {
                    ch_bot[l].insert(to[l]);
                }
            }
            let children = ch_eq
                .into_iter()
                .zip(ch_bot)
                .map(|(e, b)| UniformKey {
                    eq: e.into_iter().collect(),
                    bot: b.into_iter().collect(),
                })
                .collect();
            out.push((g, children));
        }
        out
    }

    pub fn uniform_single(&self, q: StateId, b: GuardState) -> Option<Tree> {
        self.uniform_output(&[(q, b)], &[])
    }
}

/// `∀t: t ⊗ ⊥ ∈ T(A_q)` over the total input domain.
pub fn pred_univ_input(spec: &SpecAutomaton, q: StateId) -> bool {
    Predicates::total(spec).univ_input(q, GuardState::ANY)
}

/// `∃t': ⊥ ⊗ t' ∈ T(A_q)`, with a witness.
pub fn pred_exists_output(spec: &SpecAutomaton, q: StateId) -> Option<Tree> {
    Predicates::total(spec).exists_output(q)
}

/// `∃t' ∀t: t ⊗ t' ∈ T(A_q)`, with a witness.
pub fn pred_uniform_output(spec: &SpecAutomaton, q: StateId) -> Option<Tree> {
    uniform_output(spec, &[q], &[])
}

pub fn uniform_output(spec: &SpecAutomaton, eq: &[StateId], bot: &[StateId]) -> Option<Tree> {
    let eq: Vec<_> = eq.iter().map(|&q| (q, GuardState::ANY)).collect();
    Predicates::total(spec).uniform_output(&eq, bot)
}
