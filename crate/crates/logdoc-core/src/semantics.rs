//! Mixed-level logical forms: extraction from semantic build terms,
//! per-atom abstraction-level classification, and the keyword fallback.
//!
//! Level 1 holds the obligatory role fillers (the eventuality/parameter
//! schemes), level 2 the closed set of core modifiers, level 3 unanalysed
//! circumstantial descriptions (`circumstance/3`), and support atoms
//! (`object/2`, `property/2`, `relationship/3`) attach entities to
//! discourse referents.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chart::{Analysis, Chart, EdgeRule};
use crate::lexicon::Lexicon;
use crate::subst::skolemize_atoms;
use crate::term::{Atom, SkolemCounter, Symbol, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AtomLevel {
    Level1,
    Level2,
    Level3,
    Support,
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AtomLevel::Level1 => "1",
            AtomLevel::Level2 => "2",
            AtomLevel::Level3 => "3",
            AtomLevel::Support => "s",
        };
        write!(f, "{s}")
    }
}

/// Registered predicate families. The level-1 table carries the compressed
/// eventuality schemes and the six-slot parameter schemes; level-2
/// predicates are binary with (Value, Eventuality) argument order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTables {
    pub level1: BTreeSet<(Symbol, usize)>,
    pub level2: BTreeSet<Symbol>,
    pub support: BTreeSet<(Symbol, usize)>,
}

impl Default for SchemeTables {
    fn default() -> Self {
        let sym = |s: &str| s.to_string();
        SchemeTables {
            level1: [
                ("eventuality", 4),
                ("action", 5),
                ("locative", 6),
                ("temporal", 6),
                ("active", 6),
                ("objective", 6),
                ("dative", 6),
                ("ambient", 6),
            ]
            .iter()
            .map(|(p, a)| (sym(p), *a))
            .collect(),
            level2: ["purpose", "method", "tool", "beneficiary", "manner", "time", "location"]
                .iter()
                .map(|s| sym(s))
                .collect(),
            support: [("object", 2), ("property", 2), ("relationship", 3)]
                .iter()
                .map(|(p, a)| (sym(p), *a))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemanticsError {
    UnknownPredicateFamily(Atom),
    IllTypedBuild { rule: Symbol, detail: String },
}

impl fmt::Display for SemanticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsError::UnknownPredicateFamily(a) => {
                write!(f, "unknown predicate family: {}/{}", a.pred, a.arity())
            }
            SemanticsError::IllTypedBuild { rule, detail } => {
                write!(f, "ill-typed semantic build from rule `{rule}`: {detail}")
            }
        }
    }
}

impl core::error::Error for SemanticsError {}

/// Deterministic classification into {1,2,3} or support.
pub fn classify_level(atom: &Atom, tables: &SchemeTables) -> Result<AtomLevel, SemanticsError> {
    let key = (atom.pred.clone(), atom.arity());
    if tables.level1.contains(&key) {
        Ok(AtomLevel::Level1)
    } else if atom.arity() == 2 && tables.level2.contains(&atom.pred) {
        Ok(AtomLevel::Level2)
    } else if atom.pred == "circumstance" && atom.arity() == 3 {
        Ok(AtomLevel::Level3)
    } else if tables.support.contains(&key) {
        Ok(AtomLevel::Support)
    } else {
        Err(SemanticsError::UnknownPredicateFamily(atom.clone()))
    }
}

/// A conjunction of atoms, each tagged with its abstraction level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogicalForm {
    pub atoms: Vec<Atom>,
    pub levels: Vec<AtomLevel>,
}

impl LogicalForm {
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn classified(atoms: Vec<Atom>, tables: &SchemeTables) -> Result<Self, SemanticsError> {
        let mut levels = Vec::with_capacity(atoms.len());
        for a in &atoms {
            levels.push(classify_level(a, tables)?);
        }
        Ok(LogicalForm { atoms, levels })
    }

    pub fn skolemized(&self, counter: &mut SkolemCounter) -> LogicalForm {
        LogicalForm {
            atoms: skolemize_atoms(&self.atoms, counter),
            levels: self.levels.clone(),
        }
    }

    pub fn extend(&mut self, other: LogicalForm) {
        self.atoms.extend(other.atoms);
        self.levels.extend(other.levels);
    }
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, l) in self.atoms.iter().zip(&self.levels) {
            writeln!(f, "[{l}] {a}")?;
        }
        Ok(())
    }
}

const STRUCTURAL: &[&str] = &["l", "conj", "padj", "@"];

fn flatten_build(
    t: &Term,
    rule: &str,
    out: &mut Vec<Atom>,
) -> Result<(), SemanticsError> {
    match t {
        Term::Const(c) if c == "nil" => Ok(()),
        Term::Compound(f, args) if f == "conj" => {
            for a in args {
                flatten_build(a, rule, out)?;
            }
            Ok(())
        }
        Term::Compound(f, args) if !STRUCTURAL.contains(&f.as_str()) => {
            for a in args {
                if let Term::Compound(g, _) = a {
                    if STRUCTURAL.contains(&g.as_str()) {
                        return Err(SemanticsError::IllTypedBuild {
                            rule: rule.to_string(),
                            detail: format!("structural term `{g}` inside atom argument of `{f}`"),
                        });
                    }
                }
            }
            out.push(Atom { pred: f.clone(), args: args.clone() });
            Ok(())
        }
        other => Err(SemanticsError::IllTypedBuild {
            rule: rule.to_string(),
            detail: format!("unexpected build term `{other}`"),
        }),
    }
}

/// Translates one analysis into its logical form by peeling the abstraction
/// wrappers off the root build and flattening the conjunction. Unresolved
/// slots remain as variables, to be Skolemized at assertion time. Returns
/// one form per reading carried by the analysis.
pub fn compose(
    analysis: &Analysis,
    chart: &Chart,
    tables: &SchemeTables,
) -> Result<Vec<LogicalForm>, SemanticsError> {
    let edge = chart.edge(analysis.root);
    let rule_id = match &edge.rule {
        EdgeRule::Lexical => "lexical".to_string(),
        EdgeRule::Rule(r) => r.clone(),
    };
    // peel l(V, Body) wrappers; the abstraction variable simply stays free
    let mut body = &edge.build;
    loop {
        match body {
            Term::Compound(f, args) if f == "l" && args.len() == 2 => body = &args[1],
            _ => break,
        }
    }
    let mut atoms = Vec::new();
    flatten_build(body, &rule_id, &mut atoms)?;
    Ok(alloc::vec![LogicalForm::classified(atoms, tables)?])
}

/// Closed-class forms dropped by the keyword fallback.
const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "an", "of", "in", "on", "at", "by", "with", "for", "to", "from", "against",
    "and", "or", "but", "is", "are", "was", "were", "be", "been", "am", "he", "she", "it",
    "they", "him", "her", "his", "its", "their", "them", "this", "that", "these", "those",
    "as", "not", "no", "we", "you", "i",
];

const FUNCTION_CATEGORIES: &[&str] = &["det", "possdet", "prep", "conj", "pron"];

/// Degenerate indexing for token stretches with no analysis: each content
/// word becomes `object(lemma, FreshVar)`; function words are dropped.
/// The result carries support atoms only.
pub fn keyword_fallback(tokens: &[String], lexicon: &Lexicon) -> LogicalForm {
    let mut lf = LogicalForm::default();
    let mut seen: Vec<Symbol> = Vec::new();
    let mut fresh = 0u64;
    for tok in tokens {
        if FUNCTION_WORDS.contains(&tok.as_str()) {
            continue;
        }
        let entries = crate::lexicon::analyze_word(tok, lexicon);
        let content = entries
            .iter()
            .find(|e| !FUNCTION_CATEGORIES.contains(&e.category.as_str()));
        if content.is_none() && !entries.is_empty() {
            continue; // known word, function categories only
        }
        let lemma = content.map(|e| e.lemma.clone()).unwrap_or_else(|| tok.clone());
        if seen.contains(&lemma) {
            continue;
        }
        seen.push(lemma.clone());
        fresh += 1;
        // numeric tokens index as integers so the stored form round-trips
        let index_term = match lemma.parse::<u64>() {
            Ok(n) => Term::Int(n),
            Err(_) => Term::Const(lemma),
        };
        lf.atoms.push(Atom::new(
            "object",
            alloc::vec![index_term, Term::Var(Var::salted("W", fresh))],
        ));
        lf.levels.push(AtomLevel::Support);
    }
    lf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;
    use crate::term::parse_atom;

    fn a(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    #[test]
    fn classification_follows_the_tables() {
        let t = SchemeTables::default();
        assert_eq!(classify_level(&a("eventuality(answer,E,S,Q)"), &t).unwrap(), AtomLevel::Level1);
        assert_eq!(classify_level(&a("time(tuesday1,E)"), &t).unwrap(), AtomLevel::Level2);
        assert_eq!(classify_level(&a("circumstance(by_with_for,X,Y)"), &t).unwrap(), AtomLevel::Level3);
        assert_eq!(classify_level(&a("object(dog,X)"), &t).unwrap(), AtomLevel::Support);
        assert_eq!(classify_level(&a("action(give,E,A,O,G)"), &t).unwrap(), AtomLevel::Level1);
        assert_eq!(classify_level(&a("locative(m,E,S,P,G,L)"), &t).unwrap(), AtomLevel::Level1);
    }

    #[test]
    fn unregistered_predicate_is_an_error() {
        let t = SchemeTables::default();
        assert!(matches!(
            classify_level(&a("frobnicate(X)"), &t),
            Err(SemanticsError::UnknownPredicateFamily(_))
        ));
        // wrong arity for a known family is unknown too
        assert!(classify_level(&a("time(a,b,c)"), &t).is_err());
    }

    #[test]
    fn fallback_produces_support_objects_only() {
        let lex = parse_lexicon("word backtracking noun lemma=backtrack\nword the det\n").unwrap();
        let lf = keyword_fallback(&["backtracking".to_string()], &lex);
        assert_eq!(lf.atoms.len(), 1);
        assert_eq!(lf.atoms[0].pred, "object");
        assert_eq!(lf.atoms[0].args[0], Term::constant("backtrack"));
        assert!(lf.levels.iter().all(|l| *l == AtomLevel::Support));
    }

    #[test]
    fn fallback_drops_function_words_and_handles_unknowns() {
        let lex = parse_lexicon("word the det\n").unwrap();
        let lf = keyword_fallback(
            &["the".to_string(), "of".to_string(), "zorp".to_string()],
            &lex,
        );
        assert_eq!(lf.atoms.len(), 1);
        assert_eq!(lf.atoms[0].args[0], Term::constant("zorp"));
    }

    #[test]
    fn fallback_on_empty_input() {
        let lex = Lexicon::new();
        assert!(keyword_fallback(&[], &lex).is_empty());
    }

    #[test]
    fn lf_print_carries_level_tags() {
        let t = SchemeTables::default();
        let lf = LogicalForm::classified(
            alloc::vec![a("time(tuesday1,E)"), a("object(apple,X)")],
            &t,
        )
        .unwrap();
        let s = lf.to_string();
        assert!(s.contains("[2] time(tuesday1,E)"));
        assert!(s.contains("[s] object(apple,X)"));
    }
}
