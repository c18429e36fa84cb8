use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Index of a symbol inside its [`RankedAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub(crate) u32);

impl Sym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Returns true for names matching `[A-Za-z_][A-Za-z0-9_]*` other than the reserved `_`.
pub fn is_symbol_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    s != "_" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite set of symbols, each a `(name, arity)` pair, kept in declaration order.
#[derive(Clone, Debug)]
pub struct RankedAlphabet {
    symbols: Vec<(String, usize)>,
    lookup: HashMap<(String, usize), Sym>,
}

impl PartialEq for RankedAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for RankedAlphabet {}

impl RankedAlphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out = RankedAlphabet {
            symbols: Vec::new(),
            lookup: HashMap::new(),
        };
        for (name, arity) in symbols {
            let name = name.into();
            if !is_symbol_name(&name) {
                return Err(Error::Alphabet(format!(
                    "`{name}` is not a valid symbol name"
                )));
            }
            if out.lookup.contains_key(&(name.clone(), arity)) {
                return Err(Error::Alphabet(format!("duplicate symbol {name}:{arity}")));
            }
            let sym = Sym(out.symbols.len() as u32);
            out.lookup.insert((name.clone(), arity), sym);
            out.symbols.push((name, arity));
        }
        if out.symbols.is_empty() {
            return Err(Error::Alphabet("alphabet is empty".into()));
        }
        if !out.symbols.iter().any(|(_, a)| *a == 0) {
            return Err(Error::Alphabet("alphabet has no symbol of arity 0".into()));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// All symbols in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.symbols.len() as u32).map(Sym)
    }

    pub fn leaves(&self) -> impl Iterator<Item = Sym> + '_ {
        self.symbols().filter(|&s| self.arity(s) == 0)
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s.index()].0
    }

    pub fn arity(&self, s: Sym) -> usize {
        self.symbols[s.index()].1
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<Sym> {
        self.lookup.get(&(name.to_string(), arity)).copied()
    }

    /// Every symbol carrying `name`, in declaration order.
    pub fn by_name(&self, name: &str) -> Vec<Sym> {
        self.symbols().filter(|&s| self.name(s) == name).collect()
    }

    pub fn resolve(&self, name: &str, arity: usize) -> Result<Sym> {
        if let Some(s) = self.get(name, arity) {
            return Ok(s);
        }
        if self.by_name(name).is_empty() {
            Err(Error::UnknownSymbol(name.to_string()))
        } else {
            Err(Error::ArityMismatch {
                name: name.to_string(),
                arity,
            })
        }
    }

    /// Maps `s` of `other` to the symbol with the same name and arity here.
    pub fn translate(&self, other: &RankedAlphabet, s: Sym) -> Result<Sym> {
        self.resolve(other.name(s), other.arity(s))
    }

    /// Same symbol set, irrespective of declaration order.
    pub fn same_symbols(&self, other: &RankedAlphabet) -> bool {
        self.len() == other.len() && other.symbols().all(|s| self.translate(other, s).is_ok())
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, arity)) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{name}:{arity}")?;
        }
        Ok(())
    }
}

/// A convolution symbol; `None` stands for the padding symbol ⊥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub input: Option<Sym>,
    pub output: Option<Sym>,
}

impl Pair {
    pub fn new(input: Option<Sym>, output: Option<Sym>) -> Self {
        Pair { input, output }
    }

    pub fn both(input: Sym, output: Sym) -> Self {
        Pair {
            input: Some(input),
            output: Some(output),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvolutionAlphabet {
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
}

impl ConvolutionAlphabet {
    pub fn new(input: RankedAlphabet, output: RankedAlphabet) -> Self {
        ConvolutionAlphabet { input, output }
    }

    pub fn input_arity(&self, s: Option<Sym>) -> usize {
        s.map_or(0, |s| self.input.arity(s))
    }

    pub fn output_arity(&self, s: Option<Sym>) -> usize {
        s.map_or(0, |s| self.output.arity(s))
    }

    /// All pairs except `(⊥,⊥)`, input-major, ⊥ last on each side.
    pub fn pairs(&self) -> Vec<Pair> {
        let ins: Vec<Option<Sym>> = self.input.symbols().map(Some).chain([None]).collect();
        let outs: Vec<Option<Sym>> = self.output.symbols().map(Some).chain([None]).collect();
        let mut v = Vec::new();
        for &i in &ins {
            for &o in &outs {
                if i.is_some() || o.is_some() {
                    v.push(Pair::new(i, o));
                }
            }
        }
        v
    }
}

/// Alphabets whose labels carry an arity; implemented by plain and convolution alphabets.
pub trait Signature: Clone + fmt::Debug {
    type Label: Copy + Eq + Hash + Ord + fmt::Debug;

    fn label_arity(&self, label: Self::Label) -> usize;
    fn contains(&self, label: Self::Label) -> bool;
    fn label_name(&self, label: Self::Label) -> String;
}

impl Signature for RankedAlphabet {
    type Label = Sym;

    fn label_arity(&self, label: Sym) -> usize {
        self.arity(label)
    }

    fn contains(&self, label: Sym) -> bool {
        label.index() < self.len()
    }

    fn label_name(&self, label: Sym) -> String {
        self.name(label).to_string()
    }
}

impl Signature for ConvolutionAlphabet {
    type Label = Pair;

    fn label_arity(&self, p: Pair) -> usize {
        self.input_arity(p.input).max(self.output_arity(p.output))
    }

    fn contains(&self, p: Pair) -> bool {
        (p.input.is_some() || p.output.is_some())
            && p.input.is_none_or(|s| self.input.contains(s))
            && p.output.is_none_or(|s| self.output.contains(s))
    }

    fn label_name(&self, p: Pair) -> String {
        let i = p.input.map_or("_", |s| self.input.name(s));
        let o = p.output.map_or("_", |s| self.output.name(s));
        format!("{i}|{o}")
    }
}
