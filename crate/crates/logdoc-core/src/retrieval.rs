//! Indexing and the three-stage variable-depth retrieval strategy.
//!
//! Queries are answered by escalating proof stages under the result-count
//! thresholds M, N, O: stop at direct matches when they are plentiful
//! (more than M), admit level-2 then level-3 meaning postulates when they
//! are scarce (fewer than N), and try inheritance hierarchies when even
//! that leaves fewer than O passages.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chart::{self, ScoreConfig};
use crate::clause::Goal;
use crate::grammar::ResourceSet;
use crate::kb::{KbError, KnowledgeBase};
use crate::lexicon::tokenize;
use crate::prover::{prove, IsaHierarchy, ProofTrace, StageLabel, StagePolicy};
use crate::semantics::{compose, keyword_fallback, LogicalForm, SchemeTables};
use crate::term::alpha_canonical;

/// Variable-depth thresholds. The defaults M=15, N=10, O=5 keep the
/// reference weighting M:N:O = 3:2:1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VDConfig {
    pub m: usize,
    pub n: usize,
    pub o: usize,
    /// Escalate even when direct results land in the band [N, M].
    pub escalate_in_band: bool,
}

impl Default for VDConfig {
    fn default() -> Self {
        VDConfig { m: 15, n: 10, o: 5, escalate_in_band: false }
    }
}

impl VDConfig {
    pub fn validate(&self) -> Result<(), crate::chart::ConfigError> {
        if !(self.m > self.n && self.n > self.o && self.o > 0) {
            return Err(crate::chart::ConfigError(format!(
                "thresholds must satisfy M > N > O > 0, got {}/{}/{}",
                self.m, self.n, self.o
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Passage {
    pub document: u64,
    pub fragment: u64,
    pub text: String,
    /// Cheapest stage that produced the passage.
    pub stage: StageLabel,
    pub trace: ProofTrace,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexReport {
    pub document: u64,
    pub fragments: usize,
    pub readings: usize,
    pub fallback_tokens: usize,
    pub facts: usize,
}

impl fmt::Display for IndexReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "document {}: {} fragments, {} readings, {} facts, {} fallback tokens",
            self.document, self.fragments, self.readings, self.facts, self.fallback_tokens
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RetrievalError {
    Kb(KbError),
    EmptyQuery,
}

impl fmt::Display for RetrievalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetrievalError::Kb(e) => write!(f, "{e}"),
            RetrievalError::EmptyQuery => write!(f, "empty query"),
        }
    }
}

impl core::error::Error for RetrievalError {}

impl From<KbError> for RetrievalError {
    fn from(e: KbError) -> Self {
        RetrievalError::Kb(e)
    }
}

/// Splits a document into fragments: lines without terminal punctuation are
/// titles (one fragment each); otherwise sentences end at `.?!` followed by
/// whitespace and a capital.
pub fn split_fragments(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !line.ends_with(['.', '?', '!']) {
            out.push(line.to_string());
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            if matches!(chars[i], '.' | '?' | '!') {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let boundary = j >= chars.len() || chars[j].is_uppercase();
                if boundary && j > i + 1 || j >= chars.len() {
                    let sentence: String = chars[start..=i].iter().collect();
                    let sentence = sentence.trim().to_string();
                    if !sentence.is_empty() {
                        out.push(sentence);
                    }
                    start = j;
                    i = j;
                    continue;
                }
            }
            i += 1;
        }
        if start < chars.len() {
            let tail: String = chars[start..].iter().collect();
            let tail = tail.trim().to_string();
            if !tail.is_empty() {
                out.push(tail);
            }
        }
    }
    out
}

/// How a query reading came to be; pure keyword fallback is labeled as the
/// degraded retrieval mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReadingOrigin {
    Parsed,
    Fallback,
}

fn dedup_readings(readings: Vec<LogicalForm>) -> Vec<LogicalForm> {
    let mut out: Vec<LogicalForm> = Vec::new();
    for r in readings {
        let canon = alpha_canonical(&r.atoms);
        if !out.iter().any(|o| alpha_canonical(&o.atoms) == canon) {
            out.push(r);
        }
    }
    out
}

/// Parses one fragment of text into its readings. A full parse yields the
/// filtered full-span readings; otherwise the largest partial analyses are
/// conjoined into one mixed reading, with keyword fallback covering tokens
/// that have no edge at all.
fn readings_for_fragment(
    tokens: &[String],
    rs: &ResourceSet,
    tables: &SchemeTables,
    cfg: &ScoreConfig,
) -> (Vec<LogicalForm>, ReadingOrigin, usize) {
    if tokens.is_empty() {
        return (Vec::new(), ReadingOrigin::Fallback, 0);
    }
    let chart = chart::parse(tokens, rs, cfg);
    let cover = chart::extract_fragments(&chart, cfg);
    if cover.full_parse {
        let mut readings = Vec::new();
        for analysis in &cover.fragments {
            if let Ok(lfs) = compose(analysis, &chart, tables) {
                readings.extend(lfs.into_iter().filter(|lf| !lf.is_empty()));
            }
        }
        let readings = dedup_readings(readings);
        if !readings.is_empty() {
            return (readings, ReadingOrigin::Parsed, 0);
        }
    }
    // Partial analyses: conjoin the pieces into one mixed reading. Tokens
    // with no edge, and pieces carrying no semantic content (function words,
    // or everything when the grammar is empty), go to keyword fallback.
    let mut combined = LogicalForm::default();
    let mut any_parsed = false;
    let mut fallback_positions: Vec<usize> = cover.skipped_tokens.clone();
    for analysis in &cover.fragments {
        let span = chart.edge(analysis.root).span;
        let mut contentful = false;
        if let Ok(lfs) = compose(analysis, &chart, tables) {
            for lf in lfs {
                if !lf.is_empty() {
                    contentful = true;
                    any_parsed = true;
                    combined.extend(lf);
                }
            }
        }
        if !contentful {
            fallback_positions.extend(span.0..span.1);
        }
    }
    fallback_positions.sort_unstable();
    let fallback_words: Vec<String> =
        fallback_positions.iter().map(|i| tokens[*i].clone()).collect();
    let fallback = keyword_fallback(&fallback_words, &rs.lexicon);
    let fallback_count = fallback.atoms.len();
    combined.extend(fallback);
    if combined.is_empty() {
        return (Vec::new(), ReadingOrigin::Fallback, 0);
    }
    let origin = if any_parsed { ReadingOrigin::Parsed } else { ReadingOrigin::Fallback };
    (alloc::vec![combined], origin, fallback_count)
}

/// Translates a document into logical axioms with back-pointers to the
/// source text and asserts them. Ambiguous fragments (several surviving
/// readings) are stored as one disjunctive reading group.
pub fn index_document(
    kb: &mut KnowledgeBase,
    document: u64,
    text: &str,
    rs: &ResourceSet,
    tables: &SchemeTables,
    cfg: &ScoreConfig,
) -> Result<IndexReport, RetrievalError> {
    if kb.has_document(document) {
        return Err(KbError::DuplicateDocument(document).into());
    }
    let mut report = IndexReport { document, ..Default::default() };
    for (i, fragment_text) in split_fragments(text).into_iter().enumerate() {
        let fragment = i as u64 + 1;
        let tokens = tokenize(&fragment_text);
        let (readings, _origin, fallback) = readings_for_fragment(&tokens, rs, tables, cfg);
        report.fragments += 1;
        report.fallback_tokens += fallback;
        if readings.is_empty() {
            continue;
        }
        report.readings += readings.len();
        let closed: Vec<Vec<crate::term::Atom>> = readings
            .iter()
            .map(|lf| {
                let mut counter = core::mem::take(&mut kb.skolems);
                let atoms = crate::subst::skolemize_atoms(&lf.atoms, &mut counter);
                kb.skolems = counter;
                atoms
            })
            .collect();
        report.facts += closed.iter().map(Vec::len).sum::<usize>();
        kb.assert_fragment(document, fragment, closed, &fragment_text)?;
    }
    Ok(report)
}

/// One query reading turned into a prover goal. Reading variables are
/// existential discourse referents and stay free.
fn goal_for(lf: &LogicalForm) -> Goal {
    Goal::new(lf.atoms.clone())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryOutcome {
    pub passages: Vec<Passage>,
    pub stages_run: Vec<StageLabel>,
    pub truncated: bool,
}

/// Answers a query by variable-depth evaluation. Direct results above M
/// return immediately; in the band [N, M] no escalation happens unless
/// configured; below N level-2 then level-3 postulates are admitted; below
/// O the inheritance hierarchy is tried as well.
pub fn answer_query(
    kb: &KnowledgeBase,
    query_text: &str,
    rs: &ResourceSet,
    isa: &IsaHierarchy,
    tables: &SchemeTables,
    vd: &VDConfig,
    cfg: &ScoreConfig,
) -> Result<QueryOutcome, RetrievalError> {
    let tokens = tokenize(query_text);
    let (readings, origin, _) = readings_for_fragment(&tokens, rs, tables, cfg);
    if readings.is_empty() {
        return Err(RetrievalError::EmptyQuery);
    }
    let goals: Vec<Goal> = readings.iter().map(goal_for).collect();

    let mut outcome = QueryOutcome::default();
    let mut seen: BTreeMap<(u64, u64), usize> = BTreeMap::new();

    let run_stage = |outcome: &mut QueryOutcome,
                         seen: &mut BTreeMap<(u64, u64), usize>,
                         policy: &StagePolicy| {
        outcome.stages_run.push(policy.label);
        for goal in &goals {
            let result = prove(goal, kb, isa, policy);
            outcome.truncated |= result.truncated;
            for sol in result.solutions {
                let (Some(document), Some(fragment)) =
                    (sol.trace.document, sol.trace.fragment)
                else {
                    continue;
                };
                if seen.contains_key(&(document, fragment)) {
                    continue;
                }
                let stage = if origin == ReadingOrigin::Fallback
                    && policy.label == StageLabel::Direct
                {
                    StageLabel::Keyword
                } else {
                    policy.label
                };
                let mut trace = sol.trace.clone();
                trace.stage = stage;
                seen.insert((document, fragment), outcome.passages.len());
                outcome.passages.push(Passage {
                    document,
                    fragment,
                    text: kb
                        .source_text(document, fragment)
                        .unwrap_or_default()
                        .to_string(),
                    stage,
                    trace,
                });
            }
        }
        outcome.passages.len()
    };

    let direct = run_stage(&mut outcome, &mut seen, &StagePolicy::direct());
    let escalate = if direct > vd.m {
        false
    } else if direct < vd.n {
        true
    } else {
        vd.escalate_in_band
    };
    if escalate {
        let after_l2 = run_stage(
            &mut outcome,
            &mut seen,
            &StagePolicy::with_levels(&[1, 2], StageLabel::Level2),
        );
        if after_l2 < vd.n {
            run_stage(
                &mut outcome,
                &mut seen,
                &StagePolicy::with_levels(&[1, 2, 3], StageLabel::Level3),
            );
        }
        if outcome.passages.len() < vd.o {
            run_stage(&mut outcome, &mut seen, &StagePolicy::with_isa(&[1, 2, 3]));
        }
    }

    outcome.passages.sort_by(|a, b| {
        a.stage
            .cmp(&b.stage)
            .then(a.document.cmp(&b.document))
            .then(a.fragment.cmp(&b.fragment))
    });
    Ok(outcome)
}

/// Human-readable result line: `doc:frag [stage] source-text`.
pub fn render_passage(p: &Passage) -> String {
    format!("{}:{} [{}] {}", p.document, p.fragment, p.stage, p.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_titles_and_sentences() {
        let text = "Natural language question answering systems\nThe operator tested the programs. The system failed! Done?";
        let frags = split_fragments(text);
        assert_eq!(
            frags,
            alloc::vec![
                "Natural language question answering systems".to_string(),
                "The operator tested the programs.".to_string(),
                "The system failed!".to_string(),
                "Done?".to_string(),
            ]
        );
    }

    #[test]
    fn abbreviation_like_periods_do_not_split_before_lowercase() {
        let frags = split_fragments("The no. one system works. It is fine.");
        assert_eq!(frags.len(), 2);
    }

    #[test]
    fn empty_document_has_no_fragments() {
        assert!(split_fragments("\n  \n").is_empty());
    }

    #[test]
    fn threshold_validation() {
        assert!(VDConfig::default().validate().is_ok());
        assert!(VDConfig { m: 5, n: 10, o: 1, escalate_in_band: false }.validate().is_err());
    }
}
