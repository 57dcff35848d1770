//! The incrementally growing clause base: provenance-tagged facts,
//! disjunctive reading groups, rules, and the line-oriented persistence
//! format.
//!
//! Every stored fact serializes as `atom/Fragment/Document`, e.g.
//! `language(sk-2)/1/3` for an axiom derived from fragment 1 of document 3.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::clause::{parse_clause, HornClause, NamedRule};
use crate::term::{parse_atom, Atom, SkolemCounter, Symbol};

/// Back-pointer from an axiom to its source passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub fragment: u64,
    pub document: u64,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/{}", self.fragment, self.document)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactId(pub usize);

/// Membership of a fact in one alternative of a disjunctive reading group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRef {
    pub group: Symbol,
    pub alternative: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredFact {
    pub atom: Atom,
    pub prov: Provenance,
    pub reading_group: Option<GroupRef>,
}

impl fmt::Display for StoredFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.atom, self.prov)
    }
}

/// Alternatives of one ambiguous fragment. A proof may use facts from at
/// most one alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingGroup {
    pub id: Symbol,
    pub prov: Provenance,
    pub alternatives: Vec<Vec<FactId>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KbError {
    DuplicateFragment(Provenance),
    EmptyReadings,
    NonGroundFact(Atom),
    DuplicateDocument(u64),
}

impl fmt::Display for KbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KbError::DuplicateFragment(p) => {
                write!(f, "fragment already indexed ({}:{})", p.document, p.fragment)
            }
            KbError::EmptyReadings => write!(f, "a fragment needs at least one reading"),
            KbError::NonGroundFact(a) => write!(f, "fact is not ground: {a}"),
            KbError::DuplicateDocument(d) => write!(f, "document {d} already indexed"),
        }
    }
}

impl core::error::Error for KbError {}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    facts: Vec<StoredFact>,
    index: BTreeMap<(Symbol, usize), Vec<FactId>>,
    rules: Vec<NamedRule>,
    groups: Vec<ReadingGroup>,
    pub skolems: SkolemCounter,
    /// (document, fragment) -> source text.
    registry: BTreeMap<(u64, u64), String>,
}

/// One entry of a predicate/arity lookup: either a stored fact or a rule
/// whose head matches.
#[derive(Debug, Clone, Copy)]
pub enum LookupEntry<'a> {
    Fact(FactId, &'a StoredFact),
    Rule(usize, &'a NamedRule),
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase { skolems: SkolemCounter::new(), ..Default::default() }
    }

    pub fn fact(&self, id: FactId) -> &StoredFact {
        &self.facts[id.0]
    }

    pub fn facts(&self) -> impl Iterator<Item = (FactId, &StoredFact)> {
        self.facts.iter().enumerate().map(|(i, f)| (FactId(i), f))
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn rules(&self) -> &[NamedRule] {
        &self.rules
    }

    pub fn rule(&self, idx: usize) -> &NamedRule {
        &self.rules[idx]
    }

    pub fn groups(&self) -> &[ReadingGroup] {
        &self.groups
    }

    pub fn source_text(&self, document: u64, fragment: u64) -> Option<&str> {
        self.registry.get(&(document, fragment)).map(String::as_str)
    }

    pub fn documents(&self) -> impl Iterator<Item = u64> + '_ {
        let mut last = None;
        self.registry.keys().filter_map(move |(d, _)| {
            if last == Some(*d) {
                None
            } else {
                last = Some(*d);
                Some(*d)
            }
        })
    }

    pub fn has_document(&self, document: u64) -> bool {
        self.registry.keys().any(|(d, _)| *d == document)
    }

    pub fn add_rule(&mut self, name: impl Into<Symbol>, clause: HornClause) -> usize {
        self.rules.push(NamedRule { name: name.into(), clause });
        self.rules.len() - 1
    }

    fn push_fact(&mut self, fact: StoredFact) -> FactId {
        let id = FactId(self.facts.len());
        self.index.entry(fact.atom.key()).or_default().push(id);
        self.facts.push(fact);
        id
    }

    /// Stores the readings of one fragment, append-only. A single reading
    /// becomes plain facts; two or more become a reading group whose
    /// alternatives are mutually exclusive at proof time.
    pub fn assert_fragment(
        &mut self,
        document: u64,
        fragment: u64,
        readings: Vec<Vec<Atom>>,
        source_text: &str,
    ) -> Result<Vec<FactId>, KbError> {
        if readings.is_empty() {
            return Err(KbError::EmptyReadings);
        }
        let prov = Provenance { fragment, document };
        if self.registry.contains_key(&(document, fragment)) {
            return Err(KbError::DuplicateFragment(prov));
        }
        for reading in &readings {
            for atom in reading {
                if !atom.is_ground() {
                    return Err(KbError::NonGroundFact(atom.clone()));
                }
            }
        }
        self.registry.insert((document, fragment), source_text.to_string());
        let mut ids = Vec::new();
        if readings.len() == 1 {
            for atom in readings.into_iter().next().unwrap() {
                ids.push(self.push_fact(StoredFact { atom, prov, reading_group: None }));
            }
        } else {
            let gid = format!("g{document}_{fragment}");
            let mut alternatives = Vec::new();
            for (alt, reading) in readings.into_iter().enumerate() {
                let mut alt_ids = Vec::new();
                for atom in reading {
                    let id = self.push_fact(StoredFact {
                        atom,
                        prov,
                        reading_group: Some(GroupRef { group: gid.clone(), alternative: alt }),
                    });
                    alt_ids.push(id);
                    ids.push(id);
                }
                alternatives.push(alt_ids);
            }
            self.groups.push(ReadingGroup { id: gid, prov, alternatives });
        }
        Ok(ids)
    }

    /// Exact predicate/arity lookup: matching facts in insertion order,
    /// then rules whose head matches.
    pub fn lookup<'a>(&'a self, pred: &'a str, arity: usize) -> impl Iterator<Item = LookupEntry<'a>> + 'a {
        let fact_ids = self
            .index
            .get(&(pred.to_string(), arity))
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let facts = fact_ids.iter().map(|id| LookupEntry::Fact(*id, &self.facts[id.0]));
        let rules = self
            .rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.clause.head.pred == pred && r.clause.head.arity() == arity)
            .map(|(i, r)| LookupEntry::Rule(i, r));
        facts.chain(rules)
    }
}

// ---------------------------------------------------------------------------
// Persistence: a line-oriented, human-diffable text format.
//
//   SKOLEM <next index>
//   SOURCE <frag> <doc> <source text>
//   FACT <atom>/<frag>/<doc>
//   GROUP <id> BEGIN / ALT / END   (FACT lines between)
//   RULE <level|-> <weight> <head> [<- body]
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbFormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for KbFormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for KbFormatError {}

impl KnowledgeBase {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("SKOLEM {}\n", self.skolems.peek()));
        for ((doc, frag), text) in &self.registry {
            out.push_str(&format!("SOURCE {frag} {doc} {text}\n"));
        }
        let mut emitted_groups: Vec<&str> = Vec::new();
        for fact in &self.facts {
            match &fact.reading_group {
                None => out.push_str(&format!("FACT {fact}\n")),
                Some(gref) => {
                    if emitted_groups.contains(&gref.group.as_str()) {
                        continue;
                    }
                    emitted_groups.push(&gref.group);
                    let group = self
                        .groups
                        .iter()
                        .find(|g| g.id == gref.group)
                        .expect("group registered for tagged fact");
                    out.push_str(&format!("GROUP {} BEGIN\n", group.id));
                    for (i, alt) in group.alternatives.iter().enumerate() {
                        if i > 0 {
                            out.push_str("ALT\n");
                        }
                        for id in alt {
                            out.push_str(&format!("FACT {}\n", self.facts[id.0]));
                        }
                    }
                    out.push_str("END\n");
                }
            }
        }
        for rule in &self.rules {
            let level = match rule.clause.level {
                Some(l) => l.to_string(),
                None => "-".to_string(),
            };
            out.push_str(&format!("RULE {} {} {}\n", level, rule.clause.weight, rule.clause));
        }
        out
    }

    pub fn from_text(src: &str) -> Result<Self, KbFormatError> {
        let mut kb = KnowledgeBase::new();
        let err = |line: usize, message: String| KbFormatError { line, message };
        let parse_fact = |line: usize, rest: &str| -> Result<StoredFact, KbFormatError> {
            // atom/F/D: the atom itself may not contain `/`, so split from the right.
            let mut parts = rest.rsplitn(3, '/');
            let doc = parts.next().and_then(|s| s.trim().parse::<u64>().ok());
            let frag = parts.next().and_then(|s| s.trim().parse::<u64>().ok());
            let atom_src = parts.next();
            match (atom_src, frag, doc) {
                (Some(a), Some(fragment), Some(document)) => {
                    let atom = parse_atom(a)
                        .map_err(|e| err(line, format!("bad atom in FACT: {e}")))?;
                    if !atom.is_ground() {
                        return Err(err(line, format!("stored fact is not ground: {atom}")));
                    }
                    Ok(StoredFact {
                        atom,
                        prov: Provenance { fragment, document },
                        reading_group: None,
                    })
                }
                _ => Err(err(line, "expected FACT atom/Frag/Doc".to_string())),
            }
        };

        let mut lines = src.lines().enumerate().peekable();
        while let Some((idx, raw)) = lines.next() {
            let lineno = idx + 1;
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "SKOLEM" => {
                    let next = rest
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| err(lineno, "bad SKOLEM index".to_string()))?;
                    kb.skolems = SkolemCounter::starting_at(next);
                }
                "SOURCE" => {
                    let mut it = rest.splitn(3, ' ');
                    let frag = it.next().and_then(|s| s.parse::<u64>().ok());
                    let doc = it.next().and_then(|s| s.parse::<u64>().ok());
                    let text = it.next().unwrap_or("");
                    match (frag, doc) {
                        (Some(f), Some(d)) => {
                            kb.registry.insert((d, f), text.to_string());
                        }
                        _ => return Err(err(lineno, "expected SOURCE frag doc text".to_string())),
                    }
                }
                "FACT" => {
                    let fact = parse_fact(lineno, rest)?;
                    kb.push_fact(fact);
                }
                "GROUP" => {
                    let (id, kw) = rest
                        .rsplit_once(' ')
                        .ok_or_else(|| err(lineno, "expected GROUP id BEGIN".to_string()))?;
                    if kw != "BEGIN" {
                        return Err(err(lineno, "expected GROUP id BEGIN".to_string()));
                    }
                    let gid = id.trim().to_string();
                    let mut alternatives: Vec<Vec<FactId>> = Vec::new();
                    let mut current: Vec<FactId> = Vec::new();
                    let mut prov: Option<Provenance> = None;
                    loop {
                        let (gidx, graw) = lines
                            .next()
                            .ok_or_else(|| err(lineno, format!("GROUP {gid} missing END")))?;
                        let glineno = gidx + 1;
                        let gline = graw.trim_end();
                        if gline == "END" {
                            alternatives.push(current);
                            break;
                        } else if gline == "ALT" {
                            alternatives.push(core::mem::take(&mut current));
                        } else if let Some(frest) = gline.strip_prefix("FACT ") {
                            let mut fact = parse_fact(glineno, frest)?;
                            match prov {
                                None => prov = Some(fact.prov),
                                Some(p) if p != fact.prov => {
                                    return Err(err(
                                        glineno,
                                        "alternatives of one group must share provenance".to_string(),
                                    ))
                                }
                                _ => {}
                            }
                            fact.reading_group = Some(GroupRef {
                                group: gid.clone(),
                                alternative: alternatives.len(),
                            });
                            current.push(kb.push_fact(fact));
                        } else {
                            return Err(err(glineno, format!("unexpected line inside GROUP: {gline}")));
                        }
                    }
                    if alternatives.len() < 2 {
                        return Err(err(lineno, format!("GROUP {gid} needs at least two alternatives")));
                    }
                    let prov =
                        prov.ok_or_else(|| err(lineno, format!("GROUP {gid} has no facts")))?;
                    kb.groups.push(ReadingGroup { id: gid, prov, alternatives });
                }
                "RULE" => {
                    let mut it = rest.splitn(3, ' ');
                    let level_src = it.next().unwrap_or("");
                    let weight_src = it.next().unwrap_or("");
                    let clause_src = it.next().unwrap_or("");
                    let level = match level_src {
                        "-" => None,
                        other => Some(other.parse::<u8>().map_err(|_| {
                            err(lineno, format!("bad rule level `{other}`"))
                        })?),
                    };
                    if let Some(l) = level {
                        if !(1..=3).contains(&l) {
                            return Err(err(lineno, format!("rule level must be 1..3, got {l}")));
                        }
                    }
                    let weight = weight_src
                        .parse::<f64>()
                        .map_err(|_| err(lineno, format!("bad rule weight `{weight_src}`")))?;
                    let mut clause = parse_clause(clause_src)
                        .map_err(|e| err(lineno, format!("bad rule clause: {e}")))?;
                    clause.level = level;
                    clause.weight = weight;
                    let name = format!("rule-{}", kb.rules.len() + 1);
                    kb.add_rule(name, clause);
                }
                other => return Err(err(lineno, format!("unknown record `{other}`"))),
            }
        }
        Ok(kb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    /// The nine axioms of the worked closure example, fragment 1 of document 3.
    pub(crate) fn example_3c() -> Vec<Atom> {
        [
            "representation(sk-1,sk-2)",
            "language(sk-2)",
            "share(sk-1,sk-3)",
            "structure(sk-3,sk-4)",
            "formalism(sk-5,sk-6)",
            "grammar(sk-6,sk-7)",
            "base(sk-5,sk-8)",
            "unification(sk-8)",
            "goal(sk-5,sk-1)",
        ]
        .iter()
        .map(|s| a(s))
        .collect()
    }

    #[test]
    fn asserting_the_closure_example() {
        let mut kb = KnowledgeBase::new();
        let ids = kb.assert_fragment(3, 1, vec![example_3c()], "A structure sharing representation of language for unification based grammar formalisms").unwrap();
        assert_eq!(ids.len(), 9);
        let f = kb.fact(ids[1]);
        assert_eq!(f.to_string(), "language(sk-2)/1/3");
        assert!(kb.source_text(3, 1).is_some());
    }

    #[test]
    fn duplicate_fragment_is_an_error() {
        let mut kb = KnowledgeBase::new();
        kb.assert_fragment(3, 1, vec![vec![a("p(sk-1)")]], "x").unwrap();
        let e = kb.assert_fragment(3, 1, vec![vec![a("q(sk-2)")]], "y").unwrap_err();
        assert!(matches!(e, KbError::DuplicateFragment(_)));
    }

    #[test]
    fn empty_readings_is_an_error() {
        let mut kb = KnowledgeBase::new();
        assert_eq!(kb.assert_fragment(1, 1, vec![], "t").unwrap_err(), KbError::EmptyReadings);
    }

    #[test]
    fn non_ground_reading_is_rejected() {
        let mut kb = KnowledgeBase::new();
        let e = kb.assert_fragment(1, 1, vec![vec![a("p(X)")]], "t").unwrap_err();
        assert!(matches!(e, KbError::NonGroundFact(_)));
    }

    #[test]
    fn lookup_is_exact_and_insertion_ordered() {
        let mut kb = KnowledgeBase::new();
        // passage 11 of the mixed-level example
        kb.assert_fragment(
            11,
            1,
            vec![vec![
                a("property(natural,sk-28)"),
                a("object(system,sk-30)"),
                a("object(language,sk-28)"),
                a("circumstance(by_with_for,sk-30,sk-28)"),
                a("object(question,sk-29)"),
                a("eventuality(answer,sk-31,sk-30,sk-29)"),
            ]],
            "Natural language question answering systems",
        )
        .unwrap();
        let objects: Vec<_> = kb.lookup("object", 2).collect();
        assert_eq!(objects.len(), 3);
        assert_eq!(kb.lookup("unknown", 9).count(), 0);
        match objects[0] {
            LookupEntry::Fact(_, f) => assert_eq!(f.atom.to_string(), "object(system,sk-30)"),
            _ => panic!("expected a fact"),
        }
    }

    #[test]
    fn lookup_union_counts_fragments() {
        let mut kb = KnowledgeBase::new();
        for d in 1..=4u64 {
            kb.assert_fragment(d, 1, vec![vec![a("tag(sk-1)")]], "t").unwrap();
        }
        assert_eq!(kb.lookup("tag", 1).count(), 4);
    }

    #[test]
    fn round_trip_preserves_everything() {
        let mut kb = KnowledgeBase::new();
        let mut closed = Vec::new();
        let mut counter = core::mem::take(&mut kb.skolems);
        for pat in ["representation(R,L)", "language(L)"] {
            closed.push(crate::subst::skolemize_atoms(&[a(pat)], &mut counter)[0].clone());
        }
        kb.skolems = counter;
        kb.assert_fragment(3, 1, vec![closed], "title").unwrap();
        kb.assert_fragment(
            5,
            2,
            vec![vec![a("p(sk-10)")], vec![a("q(sk-11)")]],
            "ambiguous",
        )
        .unwrap();
        let mut c = parse_clause("circumstance(by_with_for,O1,O2) <- eventuality(T,E,A,O1), circumstance(by_with_for,A,O2)").unwrap();
        c.level = Some(3);
        c.weight = 1.0;
        kb.add_rule("by_with_for_agent", c);

        let text = kb.to_text();
        let loaded = KnowledgeBase::from_text(&text).unwrap();
        assert_eq!(loaded.fact_count(), kb.fact_count());
        assert_eq!(loaded.groups().len(), 1);
        assert_eq!(loaded.skolems.peek(), kb.skolems.peek());
        assert_eq!(loaded.source_text(3, 1), Some("title"));
        assert_eq!(loaded.rules().len(), 1);
        assert_eq!(loaded.rules()[0].clause.level, Some(3));
        // a second round trip is byte-identical
        assert_eq!(loaded.to_text(), text);
    }

    #[test]
    fn empty_round_trip() {
        let kb = KnowledgeBase::new();
        let loaded = KnowledgeBase::from_text(&kb.to_text()).unwrap();
        assert_eq!(loaded, kb);
    }

    #[test]
    fn skolem_counter_round_trips() {
        let mut kb = KnowledgeBase::new();
        kb.skolems.issue();
        kb.skolems.issue();
        let mut loaded = KnowledgeBase::from_text(&kb.to_text()).unwrap();
        assert_eq!(loaded.skolems.issue(), kb.skolems.clone().issue());
    }

    #[test]
    fn malformed_file_reports_line() {
        let e = KnowledgeBase::from_text("SKOLEM 1\nFACT oops\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
