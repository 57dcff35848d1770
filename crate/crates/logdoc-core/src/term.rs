//! First-order terms and atoms.
//!
//! The text syntax follows the usual logic-programming convention: tokens
//! beginning with an uppercase letter are variables, lowercase tokens are
//! constants, `sk-N` is a Skolem constant, bare digits are integers (used
//! for fragment/document numbers), and `f(a,g(X))` is a compound.
//! Printing is the inverse of parsing, with no whitespace inserted, so that
//! stored facts serialize exactly as `pred(arg,...)/Frag/Doc`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub type Symbol = String;

/// A logical variable. `salt` distinguishes renamed-apart copies; variables
/// parsed from text always carry salt 0 and print as their bare name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Symbol,
    pub salt: u64,
}

impl Var {
    pub fn new(name: impl Into<Symbol>) -> Self {
        Var { name: name.into(), salt: 0 }
    }

    pub fn salted(name: impl Into<Symbol>, salt: u64) -> Self {
        Var { name: name.into(), salt }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.salt == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.salt)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(Symbol),
    /// Skolem constant `sk-N`; indices are issued by a [`SkolemCounter`] and
    /// never reused within one knowledge base.
    Skolem(u64),
    Int(u64),
    Compound(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Symbol>) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl Into<Symbol>) -> Self {
        Term::Const(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Skolem(_) | Term::Int(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            _ => {}
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Skolem(n) => write!(f, "sk-{n}"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A predicate application. The lookup key everywhere is the
/// (predicate, arity) pair; the same symbol may occur at several arities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Symbol>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (Symbol, usize) {
        (self.pred.clone(), self.arity())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Issues Skolem indices, monotonically and never reused.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkolemCounter {
    next: u64,
}

impl SkolemCounter {
    pub fn starting_at(next: u64) -> Self {
        SkolemCounter { next }
    }

    pub fn peek(&self) -> u64 {
        self.next
    }

    pub fn issue(&mut self) -> Term {
        self.next += 1;
        Term::Skolem(self.next - 1)
    }
}

impl SkolemCounter {
    /// Counters start at 1 so the first issued constant is `sk-1`.
    pub fn new() -> Self {
        SkolemCounter { next: 1 }
    }
}

// ---------------------------------------------------------------------------
// Text syntax
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub at: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.at)
    }
}

impl core::error::Error for ParseError {}

pub(crate) struct Scanner<'a> {
    src: &'a str,
    pub pos: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str) -> Self {
        Scanner { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        while self.rest().starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    pub fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { message: message.into(), at: self.pos }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        let mut chars = rest.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            let ok = if i == 0 {
                c.is_alphabetic() || c == '_'
            } else if c == '-' {
                // internal hyphens only ("lube-oil"), never trailing
                matches!(chars.peek(), Some((_, n)) if n.is_alphanumeric())
            } else {
                c.is_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            return None;
        }
        self.pos += end;
        Some(&rest[..end])
    }

    fn digits(&mut self) -> Option<u64> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        let n: u64 = rest[..end].parse().ok()?;
        self.pos += end;
        Some(n)
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        if let Some(n) = self.digits() {
            return Ok(Term::Int(n));
        }
        // `?name` metavariable form used in grammar resource files.
        if self.rest().starts_with('?') {
            self.pos += 1;
            let name = self.ident().ok_or_else(|| self.err("expected name after `?`"))?;
            return Ok(Term::Var(Var::new(name)));
        }
        // `@(F,...)` pending-application slot in semantic build terms.
        if self.rest().starts_with('@') {
            self.pos += 1;
            self.expect("(")?;
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.term()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(Term::Compound("@".to_string(), args));
        }
        let name = self.ident().ok_or_else(|| self.err("expected a term"))?;
        if let Some(n) = name.strip_prefix("sk-").and_then(|d| d.parse::<u64>().ok()) {
            return Ok(Term::Skolem(n));
        }
        if self.eat("(") {
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.term()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(Term::Compound(name.to_string(), args));
        }
        if name.starts_with(|c: char| c.is_uppercase()) {
            Ok(Term::Var(Var::new(name)))
        } else {
            Ok(Term::Const(name.to_string()))
        }
    }

    pub fn atom(&mut self) -> Result<Atom, ParseError> {
        let pos = self.pos;
        match self.term()? {
            Term::Compound(pred, args) => Ok(Atom { pred, args }),
            Term::Const(pred) => Ok(Atom { pred, args: Vec::new() }),
            other => Err(ParseError {
                message: format!("expected an atom, found `{other}`"),
                at: pos,
            }),
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut s = Scanner::new(src);
    let t = s.term()?;
    if !s.at_end() {
        return Err(s.err("trailing input after term"));
    }
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<Atom, ParseError> {
    let mut s = Scanner::new(src);
    let a = s.atom()?;
    if !s.at_end() {
        return Err(s.err("trailing input after atom"));
    }
    Ok(a)
}

impl core::str::FromStr for Term {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

impl core::str::FromStr for Atom {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_atom(s)
    }
}

/// Renumbers variables in first-occurrence order, giving a canonical form
/// for alpha-equivalence comparisons over atom lists.
pub fn alpha_canonical(atoms: &[Atom]) -> Vec<Atom> {
    let mut map: Vec<(Var, Var)> = Vec::new();
    fn canon(t: &Term, map: &mut Vec<(Var, Var)>) -> Term {
        match t {
            Term::Var(v) => {
                if let Some((_, c)) = map.iter().find(|(orig, _)| orig == v) {
                    Term::Var(c.clone())
                } else {
                    let c = Var::salted("V", map.len() as u64 + 1);
                    map.push((v.clone(), c.clone()));
                    Term::Var(c)
                }
            }
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| canon(a, map)).collect())
            }
            other => other.clone(),
        }
    }
    atoms
        .iter()
        .map(|a| Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| canon(t, &mut map)).collect(),
        })
        .collect()
}

/// True when the two atom lists are equal up to a renaming of variables.
/// Order-sensitive on the list; callers sort first when order is irrelevant.
pub fn alpha_equivalent(a: &[Atom], b: &[Atom]) -> bool {
    alpha_canonical(a) == alpha_canonical(b)
}
