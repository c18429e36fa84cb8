use std::fmt::Write;

use crate::error::{Error, Result};

use super::alphabet::{ConvolutionAlphabet, Pair, RankedAlphabet, Signature, Sym};
use super::open::{Open, OpenTree};
use super::tree::Tree;

/// A parsed term before symbol resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub name: String,
    pub pos: usize,
    pub children: Vec<RawTerm>,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '|' || c == '*'
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn name(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !is_name_char(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected a name".into()));
        }
        Ok((self.src[start..self.pos].to_string(), start))
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn error(&self, msg: String) -> Error {
        Error::Syntax { pos: self.pos, msg }
    }
}

pub(crate) fn raw_term(cur: &mut Cursor<'_>) -> Result<RawTerm> {
    let (name, pos) = cur.name()?;
    let mut children = Vec::new();
    if cur.eat('(') {
        loop {
            children.push(raw_term(cur)?);
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
    }
    Ok(RawTerm {
        name,
        pos,
        children,
    })
}

/// Parses `term := name | name "(" term ("," term)* ")"` without resolving symbols.
pub fn parse_raw(text: &str) -> Result<RawTerm> {
    let mut cur = Cursor::new(text);
    let t = raw_term(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input".into()));
    }
    Ok(t)
}

fn plain_name(raw: &RawTerm) -> Result<&str> {
    if raw.name.contains(['|', '*']) || raw.name == "_" {
        return Err(Error::Syntax {
            pos: raw.pos,
            msg: format!("`{}` is not a symbol name", raw.name),
        });
    }
    Ok(&raw.name)
}

fn resolve(raw: &RawTerm, alphabet: &RankedAlphabet) -> Result<Tree> {
    let sym = alphabet.resolve(plain_name(raw)?, raw.children.len())?;
    let children = raw
        .children
        .iter()
        .map(|c| resolve(c, alphabet))
        .collect::<Result<_>>()?;
    Ok(Tree::new(sym, children))
}

pub fn parse_term(text: &str, alphabet: &RankedAlphabet) -> Result<Tree> {
    resolve(&parse_raw(text)?, alphabet)
}

/// Parses a term with holes: `*` is ◦ and `x<n>` is a variable unless the alphabet declares it.
pub fn parse_open_term(text: &str, alphabet: &RankedAlphabet) -> Result<OpenTree<Sym>> {
    fn go(raw: &RawTerm, alphabet: &RankedAlphabet) -> Result<OpenTree<Sym>> {
        if raw.name == "*" && raw.children.is_empty() {
            return Ok(Tree::leaf(Open::Hole(0)));
        }
        if raw.children.is_empty() && alphabet.get(&raw.name, 0).is_none() {
            if let Some(n) = raw
                .name
                .strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
            {
                if n > 0 {
                    return Ok(Tree::leaf(Open::Hole(n)));
                }
            }
        }
        let sym = alphabet.resolve(plain_name(raw)?, raw.children.len())?;
        let children = raw
            .children
            .iter()
            .map(|c| go(c, alphabet))
            .collect::<Result<_>>()?;
        Ok(Tree::new(Open::Label(sym), children))
    }
    go(&parse_raw(text)?, alphabet)
}

/// Resolves a pair label `f|g` (either side may be `_`) whose arity is `arity`.
pub fn resolve_pair(label: &str, arity: usize, alphabet: &ConvolutionAlphabet) -> Result<Pair> {
    let (i, o) = label
        .split_once('|')
        .ok_or_else(|| Error::UnknownSymbol(format!("{label} (expected input|output)")))?;
    let candidates = |name: &str, a: &RankedAlphabet| -> Result<Vec<Option<Sym>>> {
        if name == "_" {
            return Ok(vec![None]);
        }
        let v = a.by_name(name);
        if v.is_empty() {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        Ok(v.into_iter().map(Some).collect())
    };
    let mut found = Vec::new();
    for ci in candidates(i, &alphabet.input)? {
        for co in candidates(o, &alphabet.output)? {
            let p = Pair::new(ci, co);
            if alphabet.contains(p) && alphabet.label_arity(p) == arity {
                found.push(p);
            }
        }
    }
    match found.len() {
        1 => Ok(found[0]),
        0 => Err(Error::ArityMismatch {
            name: label.to_string(),
            arity,
        }),
        _ => Err(Error::Alphabet(format!(
            "pair `{label}` with arity {arity} is ambiguous"
        ))),
    }
}

/// Parses a convolution tree written with `f|g` labels.
pub fn parse_pair_term(text: &str, alphabet: &ConvolutionAlphabet) -> Result<Tree<Pair>> {
    fn go(raw: &RawTerm, alphabet: &ConvolutionAlphabet) -> Result<Tree<Pair>> {
        let p = resolve_pair(&raw.name, raw.children.len(), alphabet)?;
        let children = raw
            .children
            .iter()
            .map(|c| go(c, alphabet))
            .collect::<Result<_>>()?;
        Ok(Tree::new(p, children))
    }
    go(&parse_raw(text)?, alphabet)
}

/// Prints a tree over any signature in the term grammar.
pub fn print_term<S: Signature>(t: &Tree<S::Label>, sig: &S) -> String {
    let mut out = String::new();
    write_term(&mut out, t, &mut |l| sig.label_name(*l));
    out
}

pub fn print_open_term(t: &OpenTree<Sym>, alphabet: &RankedAlphabet) -> String {
    let mut out = String::new();
    write_term(&mut out, t, &mut |l| match l {
        Open::Label(s) => alphabet.name(*s).to_string(),
        Open::Hole(0) => "*".to_string(),
        Open::Hole(i) => format!("x{i}"),
    });
    out
}

pub(crate) fn write_term<L>(out: &mut String, t: &Tree<L>, name: &mut impl FnMut(&L) -> String) {
    out.push_str(&name(&t.label));
    if !t.children.is_empty() {
        out.push('(');
        for (i, c) in t.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_term(out, c, name);
        }
        out.push(')');
    }
}

/// Prints with a caller-supplied label renderer.
pub fn print_with<L>(t: &Tree<L>, mut name: impl FnMut(&L) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, t, &mut name);
    out
}

pub(crate) fn join_names<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut s = String::new();
    for (i, it) in items.into_iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{it}");
    }
    s
}
