//! Bottom-up, breadth-first chart parser with preference-value scoring,
//! agenda-ordered n-best pruning, cluster filtering, and largest-fragment
//! extraction.
//!
//! The preference of a constituent is `(sum of child values - Spec) / Rew + Pen`:
//! dividing by `Rew > 1` discounts material attached deeper in the tree (a
//! simplified Right Association, deeper trees preferred), while `Pen` charges
//! every new node (Minimal Attachment). Lower values rank better, and Spec
//! corrections for set phrases and semantic-type rules are subtractive.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::grammar::{instantiate_lexsem, lexsem_for, try_apply, ChildView, ResourceSet};
use crate::lexicon::analyze_word;
use crate::term::{Symbol, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    FirstN,
    WithinPct,
    Cluster,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    /// Embedding reward; must exceed 1 or deeper attachment is not rewarded.
    pub rew: f64,
    /// Node penalty charged on every rule application.
    pub pen: f64,
    pub default_lex_value: f64,
    /// Retained value cohorts per (span, category, signature); `None`
    /// disables pruning. Edges tied at a retained value are all kept.
    pub n_best: Option<usize>,
    pub filter: FilterMode,
    pub cluster_threshold: f64,
    /// Keep analyses within this percentage of the top value (mode WithinPct).
    pub within_pct: f64,
    /// Keep this many analyses (mode FirstN).
    pub first_n: usize,
    /// Unary rule chains are capped at this depth per span.
    pub unary_cap: usize,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            rew: 2.25,
            pen: 15.0,
            default_lex_value: 0.0,
            n_best: Some(1),
            filter: FilterMode::Cluster,
            cluster_threshold: 0.897,
            within_pct: 120.0,
            first_n: 1,
            unary_cap: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl core::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl core::error::Error for ConfigError {}

impl ScoreConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rew <= 1.0 {
            return Err(ConfigError(format!("Rew must be > 1, got {}", self.rew)));
        }
        if self.pen <= 0.0 {
            return Err(ConfigError(format!("Pen must be > 0, got {}", self.pen)));
        }
        if self.cluster_threshold <= 0.0 || self.cluster_threshold > 1.0 {
            return Err(ConfigError(format!(
                "cluster threshold must be in (0,1], got {}",
                self.cluster_threshold
            )));
        }
        Ok(())
    }
}

/// The preference recursion: `(sum(children) - spec) / Rew + Pen`.
pub fn score(child_values: &[f64], spec: f64, cfg: &ScoreConfig) -> f64 {
    let sum: f64 = child_values.iter().sum();
    (sum - spec) / cfg.rew + cfg.pen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeRule {
    Lexical,
    Rule(Symbol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub span: (usize, usize),
    pub category: Symbol,
    pub features: BTreeMap<Symbol, Symbol>,
    pub build: Term,
    /// Preference value; lower ranks better.
    pub value: f64,
    pub children: Vec<EdgeId>,
    pub rule: EdgeRule,
    /// Head lemma, propagated along each rule's declared head child.
    pub head: Symbol,
    pub lemma_yield: Vec<Symbol>,
    unary_depth: usize,
}

/// Pruning cohorts group edges that later rules cannot distinguish:
/// category plus the number, verb-form, and transitivity features.
type CohortKey = ((usize, usize), Symbol, [Option<Symbol>; 3]);

fn cohort_key(e: &Edge) -> CohortKey {
    (
        e.span,
        e.category.clone(),
        [
            e.features.get("num").cloned(),
            e.features.get("form").cloned(),
            e.features.get("tr").cloned(),
        ],
    )
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    edges: Vec<Edge>,
    pub n_tokens: usize,
    by_start: BTreeMap<usize, Vec<EdgeId>>,
    by_end: BTreeMap<usize, Vec<EdgeId>>,
    /// Retained distinct values per cohort, sorted ascending.
    cohorts: BTreeMap<CohortKey, Vec<f64>>,
}

impl Chart {
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn starting_at(&self, pos: usize) -> &[EdgeId] {
        self.by_start.get(&pos).map(Vec::as_slice).unwrap_or(&[])
    }

    fn ending_at(&self, pos: usize) -> &[EdgeId] {
        self.by_end.get(&pos).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Inserts unless the cohort's n-best cutoff rejects the value.
    fn insert(&mut self, edge: Edge, n_best: Option<usize>) -> Option<EdgeId> {
        let key = cohort_key(&edge);
        let retained = self.cohorts.entry(key).or_default();
        if let Some(n) = n_best {
            if retained.len() >= n {
                let cutoff = retained[n - 1];
                if edge.value > cutoff {
                    return None;
                }
            }
        }
        if !retained.contains(&edge.value) {
            retained.push(edge.value);
            retained.sort_by(f64::total_cmp);
        }
        let id = EdgeId(self.edges.len());
        self.by_start.entry(edge.span.0).or_default().push(id);
        self.by_end.entry(edge.span.1).or_default().push(id);
        self.edges.push(edge);
        Some(id)
    }
}

/// One ranked reading: a root edge covering some span.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub root: EdgeId,
    pub value: f64,
    pub span: (usize, usize),
    /// Rank among its sibling readings, 0 = best.
    pub reading: usize,
}

struct Parser<'a> {
    rs: &'a ResourceSet,
    cfg: &'a ScoreConfig,
    chart: Chart,
    agenda: BinaryHeap<Reverse<(u64, EdgeId)>>,
    popped: Vec<bool>,
    salt: u64,
}

/// Order-preserving map from value to heap key (lowest value pops first).
fn heap_key(value: f64) -> u64 {
    let bits = value.to_bits();
    if value >= 0.0 {
        bits ^ (1 << 63)
    } else {
        !bits
    }
}

impl<'a> Parser<'a> {
    fn fresh_salt(&mut self) -> u64 {
        self.salt += 1;
        self.salt
    }

    fn push(&mut self, edge: Edge) {
        let value = edge.value;
        if let Some(id) = self.chart.insert(edge, self.cfg.n_best) {
            self.popped.push(false);
            self.agenda.push(Reverse((heap_key(value), id)));
        }
    }

    fn seed_lexical(&mut self, tokens: &[String]) {
        for (i, tok) in tokens.iter().enumerate() {
            for entry in analyze_word(tok, &self.rs.lexicon) {
                let salt = self.fresh_salt();
                let build = match lexsem_for(self.rs, &entry.category, &entry.features) {
                    Some(ls) => instantiate_lexsem(&ls.template, &entry.lemma, salt),
                    None => Term::constant("nil"),
                };
                self.push(Edge {
                    span: (i, i + 1),
                    category: entry.category.clone(),
                    features: entry.features.clone(),
                    build,
                    value: self.cfg.default_lex_value,
                    children: Vec::new(),
                    rule: EdgeRule::Lexical,
                    head: entry.lemma.clone(),
                    lemma_yield: alloc::vec![entry.lemma.clone()],
                    unary_depth: 0,
                });
            }
        }
    }

    /// Enumerates child tuples for `rule` where position `k` is the freshly
    /// popped trigger edge and all other positions are previously popped
    /// edges chained over adjacent spans.
    fn combine(&mut self, trigger: EdgeId) {
        let n_rules = self.rs.rules.len();
        for r in 0..n_rules {
            let arity = self.rs.rules[r].rhs.len();
            for k in 0..arity {
                if self.rs.rules[r].rhs[k].category != self.chart.edge(trigger).category {
                    continue;
                }
                let mut tuple = alloc::vec![None; arity];
                tuple[k] = Some(trigger);
                self.extend_left(r, trigger, tuple);
            }
        }
    }

    fn extend_left(&mut self, r: usize, trigger: EdgeId, tuple: Vec<Option<EdgeId>>) {
        // fill positions k-1, k-2, .. 0 with edges ending where the next starts
        let leftmost_filled = tuple.iter().position(|t| t.is_some()).unwrap();
        if leftmost_filled == 0 {
            self.extend_right(r, trigger, tuple);
            return;
        }
        let pos = leftmost_filled - 1;
        let boundary = self.chart.edge(tuple[leftmost_filled].unwrap()).span.0;
        let want_cat = self.rs.rules[r].rhs[pos].category.clone();
        let candidates: Vec<EdgeId> = self
            .chart
            .ending_at(boundary)
            .iter()
            .copied()
            .filter(|id| {
                *id != trigger
                    && self.popped[id.0]
                    && self.chart.edge(*id).category == want_cat
            })
            .collect();
        for c in candidates {
            let mut t = tuple.clone();
            t[pos] = Some(c);
            self.extend_left(r, trigger, t);
        }
    }

    fn extend_right(&mut self, r: usize, trigger: EdgeId, tuple: Vec<Option<EdgeId>>) {
        let rightmost_filled = tuple.iter().rposition(|t| t.is_some()).unwrap();
        if rightmost_filled == tuple.len() - 1 {
            self.fire(r, tuple.into_iter().map(Option::unwrap).collect());
            return;
        }
        let pos = rightmost_filled + 1;
        let boundary = self.chart.edge(tuple[rightmost_filled].unwrap()).span.1;
        let want_cat = self.rs.rules[r].rhs[pos].category.clone();
        let candidates: Vec<EdgeId> = self
            .chart
            .starting_at(boundary)
            .iter()
            .copied()
            .filter(|id| {
                *id != trigger
                    && self.popped[id.0]
                    && self.chart.edge(*id).category == want_cat
            })
            .collect();
        for c in candidates {
            let mut t = tuple.clone();
            t[pos] = Some(c);
            self.extend_right(r, trigger, t);
        }
    }

    fn fire(&mut self, r: usize, children: Vec<EdgeId>) {
        let rule = &self.rs.rules[r];
        if children.len() == 1 {
            let child = self.chart.edge(children[0]);
            if child.unary_depth + 1 > self.cfg.unary_cap {
                return;
            }
        }
        let views: Vec<ChildView<'_>> = children
            .iter()
            .map(|id| {
                let e = self.chart.edge(*id);
                ChildView {
                    category: &e.category,
                    features: &e.features,
                    build: &e.build,
                    head: &e.head,
                }
            })
            .collect();
        let salt = self.salt + 1;
        let Some(m) = try_apply(rule, &views, self.rs, salt) else {
            return;
        };
        self.salt = salt;

        let child_values: Vec<f64> = children.iter().map(|id| self.chart.edge(*id).value).collect();
        let mut lemma_yield = Vec::new();
        for id in &children {
            lemma_yield.extend(self.chart.edge(*id).lemma_yield.iter().cloned());
        }
        // A set phrase rewards the firing that joins it into one constituent.
        let mut spec = m.spec;
        if children.len() >= 2 {
            if let Some(v) = self.rs.phrase_value(&lemma_yield) {
                spec += v;
            }
        }
        let value = score(&child_values, spec, self.cfg);
        let unary_depth = if children.len() == 1 {
            self.chart.edge(children[0]).unary_depth + 1
        } else {
            0
        };
        let span = (
            self.chart.edge(children[0]).span.0,
            self.chart.edge(*children.last().unwrap()).span.1,
        );
        self.push(Edge {
            span,
            category: rule.lhs_category.clone(),
            features: m.features,
            build: m.build,
            value,
            children,
            rule: EdgeRule::Rule(rule.id.clone()),
            head: m.head,
            lemma_yield,
            unary_depth,
        });
    }

    fn run(&mut self) {
        while let Some(Reverse((_, id))) = self.agenda.pop() {
            if self.popped[id.0] {
                continue;
            }
            self.popped[id.0] = true;
            self.combine(id);
        }
    }
}

/// Parses bottom-up and breadth-first with no assumption about final
/// categories; unknown words simply contribute no lexical edges.
pub fn parse(tokens: &[String], rs: &ResourceSet, cfg: &ScoreConfig) -> Chart {
    let mut p = Parser {
        rs,
        cfg,
        chart: Chart { n_tokens: tokens.len(), ..Default::default() },
        agenda: BinaryHeap::new(),
        popped: Vec::new(),
        salt: 0,
    };
    p.seed_lexical(tokens);
    p.run();
    p.chart
}

/// All full-span edges ranked by preference value (ascending, best first).
pub fn full_analyses(chart: &Chart) -> Vec<Analysis> {
    if chart.n_tokens == 0 {
        return Vec::new();
    }
    let mut roots: Vec<(EdgeId, &Edge)> = chart
        .edges()
        .filter(|(_, e)| e.span == (0, chart.n_tokens))
        .collect();
    roots.sort_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)));
    roots
        .into_iter()
        .enumerate()
        .map(|(i, (id, e))| Analysis { root: id, value: e.value, span: e.span, reading: i })
        .collect()
}

/// Keeps the top-ranking readings. Cluster mode (the default) computes the
/// coefficient of successive values, `min(|a|,|b|) / max(|a|,|b|)` (1 when
/// both are 0), and keeps the first cluster: a pair belongs to the same
/// cluster iff its coefficient is at or above the threshold.
pub fn filter_readings(ranked: &[Analysis], cfg: &ScoreConfig) -> Vec<Analysis> {
    if ranked.is_empty() {
        return Vec::new();
    }
    match cfg.filter {
        FilterMode::FirstN => ranked.iter().take(cfg.first_n).cloned().collect(),
        FilterMode::WithinPct => {
            let top = ranked[0].value;
            let cutoff = top + abs(top) * (cfg.within_pct / 100.0 - 1.0);
            ranked.iter().take_while(|a| a.value <= cutoff).cloned().collect()
        }
        FilterMode::Cluster => {
            let mut out = alloc::vec![ranked[0].clone()];
            for pair in ranked.windows(2) {
                let (a, b) = (pair[0].value, pair[1].value);
                let c = if a == 0.0 && b == 0.0 {
                    1.0
                } else {
                    let (lo, hi) = (min(abs(a), abs(b)), max(abs(a), abs(b)));
                    lo / hi
                };
                if c >= cfg.cluster_threshold {
                    out.push(pair[1].clone());
                } else {
                    break;
                }
            }
            out
        }
    }
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

fn min(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

fn max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

/// Partial-analysis extraction. With at least one full-span analysis the
/// filtered full analyses are returned; otherwise a left-to-right greedy
/// cover by the longest available edges (ties broken by lower value, then
/// lower id), descending to single-token lexical edges. Tokens with no edge
/// at all are reported for keyword fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentCover {
    pub fragments: Vec<Analysis>,
    pub skipped_tokens: Vec<usize>,
    pub full_parse: bool,
}

pub fn extract_fragments(chart: &Chart, cfg: &ScoreConfig) -> FragmentCover {
    let full = full_analyses(chart);
    if !full.is_empty() {
        return FragmentCover {
            fragments: filter_readings(&full, cfg),
            skipped_tokens: Vec::new(),
            full_parse: true,
        };
    }
    let mut fragments = Vec::new();
    let mut skipped = Vec::new();
    let mut i = 0;
    while i < chart.n_tokens {
        let best = chart
            .starting_at(i)
            .iter()
            .copied()
            .max_by(|a, b| {
                let (ea, eb) = (chart.edge(*a), chart.edge(*b));
                ea.span
                    .1
                    .cmp(&eb.span.1)
                    .then(eb.value.total_cmp(&ea.value))
                    .then(b.cmp(a))
            });
        match best {
            Some(id) => {
                let e = chart.edge(id);
                fragments.push(Analysis {
                    root: id,
                    value: e.value,
                    span: e.span,
                    reading: fragments.len(),
                });
                i = e.span.1;
            }
            None => {
                skipped.push(i);
                i += 1;
            }
        }
    }
    FragmentCover { fragments, skipped_tokens: skipped, full_parse: false }
}

/// Debug dump, one edge per line: span, category, value, rule, children.
pub fn dump_chart(chart: &Chart) -> String {
    let mut out = String::new();
    for (id, e) in chart.edges() {
        let rule = match &e.rule {
            EdgeRule::Lexical => "lexical".to_string(),
            EdgeRule::Rule(r) => r.clone(),
        };
        let children: Vec<String> = e.children.iter().map(|c| c.0.to_string()).collect();
        out.push_str(&alloc::format!(
            "{} {}..{} {} {:.4} {} [{}]\n",
            id.0,
            e.span.0,
            e.span.1,
            e.category,
            e.value,
            rule,
            children.join(",")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_matches_hand_evaluation() {
        let cfg = ScoreConfig::default();
        assert_eq!(score(&[0.0, 0.0], 0.0, &cfg), 15.0);
        assert!((score(&[15.0, 0.0], 0.0, &cfg) - 21.666_666_666_666_668).abs() < 1e-9);
        assert!((score(&[0.0, 0.0], 80.0, &cfg) - (-20.555_555_555_555_557)).abs() < 1e-9);
    }

    #[test]
    fn score_is_monotone() {
        let cfg = ScoreConfig::default();
        assert!(score(&[1.0, 0.0], 0.0, &cfg) > score(&[0.0, 0.0], 0.0, &cfg));
        assert!(score(&[0.0, 0.0], 10.0, &cfg) < score(&[0.0, 0.0], 0.0, &cfg));
    }

    fn ranked(values: &[f64]) -> Vec<Analysis> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Analysis { root: EdgeId(i), value: *v, span: (0, 1), reading: i })
            .collect()
    }

    #[test]
    fn cluster_filter_keeps_first_cluster() {
        let cfg = ScoreConfig::default();
        let kept = filter_readings(&ranked(&[100.0, 105.0, 200.0]), &cfg);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[1].value, 105.0);
    }

    #[test]
    fn cluster_filter_singleton() {
        let cfg = ScoreConfig::default();
        assert_eq!(filter_readings(&ranked(&[50.0]), &cfg).len(), 1);
    }

    #[test]
    fn cluster_filter_ties_then_break() {
        let cfg = ScoreConfig::default();
        let kept = filter_readings(&ranked(&[30.0, 30.0, 30.0, 90.0]), &cfg);
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn filter_empty_input() {
        let cfg = ScoreConfig::default();
        assert!(filter_readings(&[], &cfg).is_empty());
    }

    #[test]
    fn first_n_and_within_pct_modes() {
        let mut cfg = ScoreConfig { filter: FilterMode::FirstN, first_n: 2, ..Default::default() };
        assert_eq!(filter_readings(&ranked(&[1.0, 2.0, 3.0]), &cfg).len(), 2);
        cfg.filter = FilterMode::WithinPct;
        cfg.within_pct = 150.0;
        let kept = filter_readings(&ranked(&[10.0, 14.0, 16.0]), &cfg);
        assert_eq!(kept.len(), 2); // cutoff 15
    }

    #[test]
    fn config_validation() {
        let mut cfg = ScoreConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.rew = 1.0;
        assert!(cfg.validate().is_err());
    }
}
