//! Refutation-resolution prover for the provenance-tagged clause base.
//!
//! A goal is the clausal form of a query's negation: a conjunction of
//! literals sharing one fragment/document variable pair, so that every
//! solution is confined to a single fragment. Search is depth-bounded DFS
//! with a global inference budget; exhausting a budget truncates the
//! solution set and is flagged, not an error.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::clause::{rename_apart, Goal};
use crate::kb::{FactId, KnowledgeBase, LookupEntry};
use crate::subst::{unify, unify_atoms, Substitution};
use crate::term::{Atom, Symbol, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StageLabel {
    Direct,
    Level2,
    Level3,
    Isa,
    Keyword,
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StageLabel::Direct => "direct",
            StageLabel::Level2 => "level2",
            StageLabel::Level3 => "level3",
            StageLabel::Isa => "isa",
            StageLabel::Keyword => "keyword",
        };
        write!(f, "{s}")
    }
}

/// Per-stage rule admission and inference budgets. Rules carrying a level
/// are admitted when the level is in `admitted_levels`; untagged rules are
/// admitted whenever any rules are (the direct stage admits none at all).
#[derive(Debug, Clone, PartialEq)]
pub struct StagePolicy {
    pub admitted_levels: alloc::collections::BTreeSet<u8>,
    pub use_isa: bool,
    pub max_inferences: u64,
    pub max_depth: usize,
    pub rule_weight_cap: Option<f64>,
    pub label: StageLabel,
}

impl StagePolicy {
    pub fn direct() -> Self {
        StagePolicy {
            admitted_levels: Default::default(),
            use_isa: false,
            max_inferences: 10_000,
            max_depth: 8,
            rule_weight_cap: None,
            label: StageLabel::Direct,
        }
    }

    pub fn with_levels(levels: &[u8], label: StageLabel) -> Self {
        StagePolicy {
            admitted_levels: levels.iter().copied().collect(),
            label,
            ..StagePolicy::direct()
        }
    }

    pub fn with_isa(levels: &[u8]) -> Self {
        StagePolicy {
            use_isa: true,
            ..StagePolicy::with_levels(levels, StageLabel::Isa)
        }
    }

    fn admits_rules(&self) -> bool {
        !self.admitted_levels.is_empty() || self.use_isa
    }

    fn admits(&self, level: Option<u8>, weight: f64) -> bool {
        if let Some(cap) = self.rule_weight_cap {
            if weight > cap {
                return false;
            }
        }
        match level {
            Some(l) => self.admitted_levels.contains(&l),
            None => self.admits_rules(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStep {
    Fact(FactId),
    Rule(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofTrace {
    pub fragment: Option<u64>,
    pub document: Option<u64>,
    pub steps: Vec<TraceStep>,
    pub stage: StageLabel,
}

impl ProofTrace {
    pub fn inference_count(&self) -> usize {
        self.steps.len()
    }

    pub fn rule_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter_map(|s| match s {
            TraceStep::Rule(i) => Some(*i),
            _ => None,
        })
    }

    pub fn uses_rules(&self) -> bool {
        self.rule_indices().next().is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub bindings: Substitution,
    pub trace: ProofTrace,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProveResult {
    pub solutions: Vec<Solution>,
    /// True when a depth or inference budget cut the search.
    pub truncated: bool,
}

// ---------------------------------------------------------------------------
// Inheritance hierarchy
// ---------------------------------------------------------------------------

/// Directed acyclic subsumption edges over constants, `isa(child, parent)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IsaHierarchy {
    edges: Vec<(Symbol, Symbol)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsaError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for IsaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for IsaError {}

impl IsaHierarchy {
    pub fn new() -> Self {
        IsaHierarchy::default()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn ancestors(&self, of: &str) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        let mut work = alloc::vec![of.to_string()];
        while let Some(c) = work.pop() {
            for (child, parent) in &self.edges {
                if *child == c && !out.contains(parent) {
                    out.push(parent.clone());
                    work.push(parent.clone());
                }
            }
        }
        out
    }

    /// Adding must keep the hierarchy acyclic.
    pub fn add(&mut self, child: impl Into<Symbol>, parent: impl Into<Symbol>) -> Result<(), String> {
        let child = child.into();
        let parent = parent.into();
        if child == parent || self.ancestors(&parent).contains(&child) {
            return Err(format!("isa({child},{parent}) would create a cycle"));
        }
        self.edges.push((child, parent));
        Ok(())
    }

    /// Transitive descendants, excluding the constant itself.
    pub fn descendants(&self, of: &str) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        let mut work = alloc::vec![of.to_string()];
        while let Some(c) = work.pop() {
            for (child, parent) in &self.edges {
                if *parent == c && !out.contains(child) {
                    out.push(child.clone());
                    work.push(child.clone());
                }
            }
        }
        out
    }
}

/// `isa <child> <parent>` lines.
pub fn parse_isa(src: &str) -> Result<IsaHierarchy, Vec<IsaError>> {
    let mut isa = IsaHierarchy::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["isa", child, parent] => {
                if let Err(message) = isa.add(*child, *parent) {
                    errors.push(IsaError { line: lineno, message });
                }
            }
            _ => errors.push(IsaError {
                line: lineno,
                message: format!("expected `isa child parent`, found `{line}`"),
            }),
        }
    }
    if errors.is_empty() {
        Ok(isa)
    } else {
        Err(errors)
    }
}

/// The atom plus variants with top-level constant arguments replaced by
/// isa-descendants (query constants generalize downward). The cartesian
/// product over argument positions is returned, original first.
pub fn subsumption_expand(atom: &Atom, isa: &IsaHierarchy) -> Vec<Atom> {
    let mut variants: Vec<Vec<Term>> = alloc::vec![Vec::new()];
    for arg in &atom.args {
        let options: Vec<Term> = match arg {
            Term::Const(c) => {
                let mut opts = alloc::vec![arg.clone()];
                opts.extend(isa.descendants(c).into_iter().map(Term::Const));
                opts
            }
            other => alloc::vec![other.clone()],
        };
        let mut next = Vec::new();
        for v in &variants {
            for o in &options {
                let mut row = v.clone();
                row.push(o.clone());
                next.push(row);
            }
        }
        variants = next;
    }
    variants
        .into_iter()
        .map(|args| Atom { pred: atom.pred.clone(), args })
        .collect()
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

struct Search<'a> {
    kb: &'a KnowledgeBase,
    isa: &'a IsaHierarchy,
    policy: &'a StagePolicy,
    goal_vars: Vec<Var>,
    frag_var: Var,
    doc_var: Var,
    inferences: u64,
    truncated: bool,
    salt: u64,
    /// solution key -> (steps, bindings, trace)
    found: BTreeMap<String, Solution>,
}

impl<'a> Search<'a> {
    fn record(&mut self, subst: &Substitution, steps: &[TraceStep]) {
        let bindings = subst.project(&self.goal_vars);
        let as_int = |v: &Var| match subst.apply(&Term::Var(v.clone())) {
            Term::Int(n) => Some(n),
            _ => None,
        };
        let fragment = as_int(&self.frag_var);
        let document = as_int(&self.doc_var);
        let mut key = format!("{document:?}/{fragment:?}");
        for (v, t) in bindings.iter() {
            key.push_str(&format!(";{v}={t}"));
        }
        let trace = ProofTrace {
            fragment,
            document,
            steps: steps.to_vec(),
            stage: self.policy.label,
        };
        match self.found.get(&key) {
            Some(existing) if existing.trace.steps.len() <= steps.len() => {}
            _ => {
                self.found.insert(key, Solution { bindings, trace });
            }
        }
    }

    fn solve(
        &mut self,
        goals: &[(Atom, usize)],
        subst: &Substitution,
        commitments: &BTreeMap<Symbol, usize>,
        steps: &mut Vec<TraceStep>,
    ) {
        let Some(((lit, depth), rest)) = goals.split_first() else {
            self.record(subst, steps);
            return;
        };
        if self.inferences >= self.policy.max_inferences {
            self.truncated = true;
            return;
        }
        let resolved = subst.apply_atom(lit);
        let variants = if self.policy.use_isa {
            subsumption_expand(&resolved, self.isa)
        } else {
            alloc::vec![resolved]
        };

        for variant in &variants {
            let entries: Vec<LookupEntry<'_>> =
                self.kb.lookup(&variant.pred, variant.arity()).collect();
            for entry in entries {
                match entry {
                    LookupEntry::Fact(id, fact) => {
                        let mut next_commit = commitments.clone();
                        if let Some(gref) = &fact.reading_group {
                            match next_commit.get(&gref.group) {
                                Some(alt) if *alt != gref.alternative => continue,
                                _ => {
                                    next_commit.insert(gref.group.clone(), gref.alternative);
                                }
                            }
                        }
                        let Some(s) = unify_atoms(variant, &fact.atom, subst) else {
                            continue;
                        };
                        let Some(s) = unify(
                            &Term::Var(self.frag_var.clone()),
                            &Term::Int(fact.prov.fragment),
                            &s,
                        ) else {
                            continue;
                        };
                        let Some(s) = unify(
                            &Term::Var(self.doc_var.clone()),
                            &Term::Int(fact.prov.document),
                            &s,
                        ) else {
                            continue;
                        };
                        self.inferences += 1;
                        steps.push(TraceStep::Fact(id));
                        self.solve(rest, &s, &next_commit, steps);
                        steps.pop();
                        if self.inferences >= self.policy.max_inferences {
                            self.truncated = true;
                            return;
                        }
                    }
                    LookupEntry::Rule(idx, rule) => {
                        if !self.policy.admits(rule.clause.level, rule.clause.weight) {
                            continue;
                        }
                        if depth + 1 > self.policy.max_depth {
                            self.truncated = true;
                            continue;
                        }
                        self.salt += 1;
                        let renamed = rename_apart(&rule.clause, self.salt);
                        let Some(s) = unify_atoms(variant, &renamed.head, subst) else {
                            continue;
                        };
                        self.inferences += 1;
                        let mut subgoals: Vec<(Atom, usize)> = renamed
                            .body
                            .iter()
                            .map(|b| (b.clone(), depth + 1))
                            .collect();
                        subgoals.extend_from_slice(rest);
                        steps.push(TraceStep::Rule(idx));
                        self.solve(&subgoals, &s, commitments, steps);
                        steps.pop();
                        if self.inferences >= self.policy.max_inferences {
                            self.truncated = true;
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// Proves the goal. Complete up to the policy budgets: every solution
/// derivable within the depth and inference bounds using admitted rules is
/// returned exactly once (per grounding of the goal variables), with
/// reading-group exclusivity enforced and deterministic order by document,
/// fragment, then trace length.
pub fn prove(
    goal: &Goal,
    kb: &KnowledgeBase,
    isa: &IsaHierarchy,
    policy: &StagePolicy,
) -> ProveResult {
    // Rule renaming salts must clear every salt present in the goal.
    let max_goal_salt = goal.vars().iter().map(|v| v.salt).max().unwrap_or(0);
    let mut search = Search {
        kb,
        isa,
        policy,
        goal_vars: goal.vars(),
        frag_var: goal.frag_var.clone(),
        doc_var: goal.doc_var.clone(),
        inferences: 0,
        truncated: false,
        salt: max_goal_salt.max(1_000_000),
        found: BTreeMap::new(),
    };
    let goals: Vec<(Atom, usize)> = goal.literals.iter().map(|l| (l.clone(), 0)).collect();
    let mut steps = Vec::new();
    search.solve(&goals, &Substitution::new(), &BTreeMap::new(), &mut steps);

    let mut solutions: Vec<Solution> = search.found.into_values().collect();
    solutions.sort_by(|a, b| {
        a.trace
            .document
            .cmp(&b.trace.document)
            .then(a.trace.fragment.cmp(&b.trace.fragment))
            .then(a.trace.steps.len().cmp(&b.trace.steps.len()))
    });
    ProveResult { solutions, truncated: search.truncated }
}

/// Re-runs a recorded trace against the knowledge base, following the
/// recorded resolution choices; returns the rediscovered bindings when the
/// trace is valid.
pub fn replay(goal: &Goal, kb: &KnowledgeBase, isa: &IsaHierarchy, trace: &ProofTrace) -> Option<Substitution> {
    struct Guide<'a> {
        kb: &'a KnowledgeBase,
        isa: &'a IsaHierarchy,
        use_isa: bool,
        frag_var: &'a Var,
        doc_var: &'a Var,
    }
    fn go(
        g: &Guide<'_>,
        goals: &[Atom],
        subst: &Substitution,
        steps: &[TraceStep],
        salt: u64,
    ) -> Option<Substitution> {
        let Some((lit, rest)) = goals.split_first() else {
            return if steps.is_empty() { Some(subst.clone()) } else { None };
        };
        let (step, more) = steps.split_first()?;
        let resolved = subst.apply_atom(lit);
        let variants = if g.use_isa {
            subsumption_expand(&resolved, g.isa)
        } else {
            alloc::vec![resolved]
        };
        match step {
            TraceStep::Fact(id) => {
                let fact = g.kb.fact(*id);
                for v in &variants {
                    let Some(s) = unify_atoms(v, &fact.atom, subst) else { continue };
                    let Some(s) =
                        unify(&Term::Var(g.frag_var.clone()), &Term::Int(fact.prov.fragment), &s)
                    else {
                        continue;
                    };
                    let Some(s) =
                        unify(&Term::Var(g.doc_var.clone()), &Term::Int(fact.prov.document), &s)
                    else {
                        continue;
                    };
                    if let Some(done) = go(g, rest, &s, more, salt) {
                        return Some(done);
                    }
                }
                None
            }
            TraceStep::Rule(idx) => {
                let renamed = rename_apart(&g.kb.rule(*idx).clause, salt);
                for v in &variants {
                    let Some(s) = unify_atoms(v, &renamed.head, subst) else { continue };
                    let mut next: Vec<Atom> = renamed.body.clone();
                    next.extend_from_slice(rest);
                    if let Some(done) = go(g, &next, &s, more, salt + 1) {
                        return Some(done);
                    }
                }
                None
            }
        }
    }
    let guide = Guide {
        kb,
        isa,
        use_isa: trace.stage == StageLabel::Isa,
        frag_var: &goal.frag_var,
        doc_var: &goal.doc_var,
    };
    go(&guide, &goal.literals, &Substitution::new(), &trace.steps, 2_000_000)
        .map(|s| s.project(&goal.vars()))
}
