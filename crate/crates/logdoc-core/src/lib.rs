//! Logic-based passage retrieval over natural-language document fragments.
//!
//! Documents are parsed into mixed-level Horn-clause axioms with
//! fragment/document back-pointers; queries are answered by refutation
//! proof with variable-depth escalation from direct matches through
//! meaning postulates to inheritance hierarchies.
//!
//! This crate is the allocation-only core: terms and unification
//! ([`term`], [`subst`]), the clause base ([`kb`]), grammar and lexicon
//! resources ([`lexicon`], [`grammar`]), the preference-ranked chart parser
//! ([`chart`]), semantic composition ([`semantics`]), the prover
//! ([`prover`]), and the staged retrieval strategy ([`retrieval`]).
//! File handling and the command-line interface live in the companion
//! `logdoc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chart;
pub mod clause;
pub mod grammar;
pub mod kb;
pub mod lexicon;
pub mod prover;
pub mod retrieval;
pub mod semantics;
pub mod subst;
pub mod term;

pub use chart::{parse, score, Analysis, Chart, Edge, EdgeId, FilterMode, ScoreConfig};
pub use clause::{parse_clause, parse_goal, Goal, HornClause, NamedRule};
pub use grammar::{GrammarRule, MeaningPostulate, ResourceSet, SpecRule};
pub use kb::{FactId, KnowledgeBase, Provenance, ReadingGroup, StoredFact};
pub use lexicon::{analyze_word, tokenize, LexEntry, Lexicon, SemType};
pub use prover::{prove, subsumption_expand, IsaHierarchy, ProofTrace, StageLabel, StagePolicy};
pub use retrieval::{answer_query, index_document, IndexReport, Passage, QueryOutcome, VDConfig};
pub use semantics::{classify_level, keyword_fallback, AtomLevel, LogicalForm, SchemeTables};
pub use subst::{skolemize_atoms, unify, unify_atoms, Substitution};
pub use term::{parse_atom, parse_term, Atom, SkolemCounter, Symbol, Term, Var};
