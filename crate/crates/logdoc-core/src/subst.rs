//! Substitutions, unification with occurs-check, renaming, Skolemization.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::term::{Atom, SkolemCounter, Term, Var};

/// A binding map from variables to terms. Bindings may reference other bound
/// variables (triangular form); [`Substitution::apply`] resolves recursively,
/// so the applied result never contains a bound variable and re-applying is
/// the identity. The occurs-check at bind time keeps resolution finite.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    /// Follows variable chains until a non-variable or an unbound variable.
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    pub fn apply(&self, t: &Term) -> Term {
        let t = self.walk(t);
        match t {
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
            other => other.clone(),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.apply(t)).collect(),
        }
    }

    /// Restricts the substitution to the given variables, fully resolving
    /// each binding. Used to report solutions over the query's own variables.
    pub fn project(&self, vars: &[Var]) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            let t = self.apply(&Term::Var(v.clone()));
            if t != Term::Var(v.clone()) {
                out.bindings.insert(v.clone(), t);
            }
        }
        out
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }

    fn bind(&mut self, v: Var, t: Term) -> bool {
        if let Term::Var(w) = &t {
            if *w == v {
                return true;
            }
        }
        if self.occurs(&v, &t) {
            return false;
        }
        self.bindings.insert(v, t);
        true
    }

    /// Extends `self` in place; on failure the substitution is left in an
    /// unspecified state, so callers unify on a clone when they must keep
    /// the original.
    fn unify_into(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (a, b) {
            (Term::Var(v), t) | (t, Term::Var(v)) => self.bind(v, t),
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Skolem(x), Term::Skolem(y)) => x == y,
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_into(x, y))
            }
            _ => false,
        }
    }
}

/// Most general unifier of two terms extending `s`. Failure is a value;
/// an occurs-check violation (a cyclic binding) also yields `None`.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    if out.unify_into(a, b) {
        Some(out)
    } else {
        None
    }
}

pub fn unify_atoms(a: &Atom, b: &Atom, s: &Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.arity() != b.arity() {
        return None;
    }
    let mut out = s.clone();
    for (x, y) in a.args.iter().zip(b.args.iter()) {
        if !out.unify_into(x, y) {
            return None;
        }
    }
    Some(out)
}

fn rename_term(t: &Term, salt: u64) -> Term {
    match t {
        Term::Var(v) => Term::Var(Var::salted(v.name.clone(), salt)),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| rename_term(a, salt)).collect())
        }
        other => other.clone(),
    }
}

pub fn rename_atom(a: &Atom, salt: u64) -> Atom {
    Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| rename_term(t, salt)).collect(),
    }
}

/// Replaces every free variable with a fresh Skolem constant, the same
/// variable mapping to the same constant within the list. Constants are
/// issued in first-occurrence order.
pub fn skolemize_atoms(atoms: &[Atom], counter: &mut SkolemCounter) -> Vec<Atom> {
    let mut map: BTreeMap<Var, Term> = BTreeMap::new();
    fn close(t: &Term, map: &mut BTreeMap<Var, Term>, counter: &mut SkolemCounter) -> Term {
        match t {
            Term::Var(v) => map.entry(v.clone()).or_insert_with(|| counter.issue()).clone(),
            Term::Compound(f, args) => Term::Compound(
                f.clone(),
                args.iter().map(|a| close(a, map, counter)).collect(),
            ),
            other => other.clone(),
        }
    }
    atoms
        .iter()
        .map(|a| Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| close(t, &mut map, counter)).collect(),
        })
        .collect()
}
