//! Horn clauses: facts, rules, and meaning postulates.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::subst::rename_atom;
use crate::term::{Atom, ParseError, Scanner, Symbol, Var};

/// Abstraction level of a meaning postulate. Level 1 covers eventuality-type
/// rules (role-scheme bridges, the locative demo rule), level 2 defines core
/// modifiers, level 3 defines circumstantial descriptions.
pub type RuleLevel = u8;

#[derive(Debug, Clone, PartialEq)]
pub struct HornClause {
    pub head: Atom,
    /// Empty for facts.
    pub body: Vec<Atom>,
    pub level: Option<RuleLevel>,
    pub weight: f64,
}

impl HornClause {
    pub fn fact(head: Atom) -> Self {
        HornClause { head, body: Vec::new(), level: None, weight: 0.0 }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.head.collect_vars(out);
        for b in &self.body {
            b.collect_vars(out);
        }
    }
}

/// Alpha-renames every variable with the given salt. Ground clauses are
/// fixed points. Callers guarantee fresh salts per use.
pub fn rename_apart(c: &HornClause, salt: u64) -> HornClause {
    HornClause {
        head: rename_atom(&c.head, salt),
        body: c.body.iter().map(|b| rename_atom(b, salt)).collect(),
        level: c.level,
        weight: c.weight,
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " <- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

/// A rule with a stable name for proof traces.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRule {
    pub name: Symbol,
    pub clause: HornClause,
}

/// Parses `head <- body1, body2, ...` (the body may be absent).
pub fn parse_clause(src: &str) -> Result<HornClause, ParseError> {
    let mut s = Scanner::new(src);
    let head = s.atom()?;
    let mut body = Vec::new();
    if s.eat("<-") && !s.at_end() {
        loop {
            body.push(s.atom()?);
            if !s.eat(",") {
                break;
            }
        }
    }
    if !s.at_end() {
        return Err(s.err("trailing input after clause"));
    }
    Ok(HornClause { head, body, level: None, weight: 0.0 })
}

/// A conjunctive goal. Every literal shares the fragment and document
/// variables, so a solution must ground all of them in one fragment of one
/// document.
#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub literals: Vec<Atom>,
    pub frag_var: Var,
    pub doc_var: Var,
}

/// Salt reserved for provenance variables, keeping them apart from literal
/// variables that happen to share the letter (the worked query writes both
/// the structure variable and the fragment variable as `S`).
pub const PROVENANCE_SALT: u64 = 800_000;

impl Goal {
    pub fn new(literals: Vec<Atom>) -> Self {
        Goal {
            literals,
            frag_var: Var::salted("S", PROVENANCE_SALT),
            doc_var: Var::salted("D", PROVENANCE_SALT),
        }
    }

    /// All variables occurring in the goal, provenance variables included.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for l in &self.literals {
            l.collect_vars(&mut out);
        }
        for v in [&self.frag_var, &self.doc_var] {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

/// Parses the query notation of the worked examples:
/// `repr(R,L)/S/D, language(L)/S/D, ...`. All literals must use the same
/// provenance variable pair.
pub fn parse_goal(src: &str) -> Result<Goal, ParseError> {
    let mut s = Scanner::new(src);
    let mut literals = Vec::new();
    let mut prov: Option<(Var, Var)> = None;
    loop {
        let atom = s.atom()?;
        s.expect("/")?;
        let fv = match s.term()? {
            crate::term::Term::Var(v) => v,
            other => return Err(s.err(format_args!("fragment slot must be a variable, found `{other}`").to_string())),
        };
        s.expect("/")?;
        let dv = match s.term()? {
            crate::term::Term::Var(v) => v,
            other => return Err(s.err(format_args!("document slot must be a variable, found `{other}`").to_string())),
        };
        match &prov {
            None => prov = Some((fv, dv)),
            Some((f0, d0)) => {
                if *f0 != fv || *d0 != dv {
                    return Err(s.err("all literals must share one fragment/document variable pair"));
                }
            }
        }
        literals.push(atom);
        if !s.eat(",") {
            break;
        }
    }
    if !s.at_end() {
        return Err(s.err("trailing input after goal"));
    }
    let (frag_var, doc_var) = prov.unwrap_or((Var::new("S"), Var::new("D")));
    Ok(Goal {
        literals,
        frag_var: Var::salted(frag_var.name, PROVENANCE_SALT),
        doc_var: Var::salted(doc_var.name, PROVENANCE_SALT),
    })
}
