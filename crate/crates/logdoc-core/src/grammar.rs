//! Grammar rules, semantic-type preference (Spec) rules, set phrases,
//! meaning postulates, and the rule-application engine.
//!
//! A grammar rule pairs constituent patterns with build patterns over one
//! shared variable space; applying a rule unifies each right-hand pattern
//! against the corresponding child's build term and instantiates the rule's
//! build template with the result. Composition is unification throughout;
//! nothing is ever beta-reduced.
//!
//! Text format, one rule per line (`#` comments):
//!
//! ```text
//! rule np_det_cnp: np[num=?N] -> det cnp[num=?N]:l(?X,?B) { head($2); build = l(?X,?B) }
//! lexsem noun: l(?X,object(?lemma,?X))
//! ```
//!
//! Guards come from a closed vocabulary: `semtype($K,type)`, `feature($K,f,v)`,
//! `nofeature($K,f)`, `transitivity($K,t)`, `spec(id)`, `head($K)`, and the
//! `build = term` template.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::clause::{parse_clause, HornClause, NamedRule};
use crate::lexicon::{Lexicon, ResourceError, SemType};
use crate::subst::{unify, Substitution};
use crate::term::{Scanner, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum FeatValue {
    Sym(Symbol),
    Var(Var),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatPattern {
    pub feat: Symbol,
    pub value: FeatValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstituentPat {
    pub category: Symbol,
    pub feats: Vec<FeatPattern>,
    /// Build pattern unified against the child's build term.
    pub build: Option<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Guard {
    /// Head lemma of child $K carries the semantic type.
    SemType(usize, SemType),
    Feature(usize, Symbol, Symbol),
    NoFeature(usize, Symbol),
    /// Apply the Spec rule of this id; contributes 0 when its conditions fail.
    Spec(Symbol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrammarRule {
    pub id: Symbol,
    pub lhs_category: Symbol,
    pub lhs_feats: Vec<FeatPattern>,
    pub rhs: Vec<ConstituentPat>,
    pub guards: Vec<Guard>,
    pub build: Term,
    /// Child whose head lemma the new edge inherits.
    pub head: usize,
    pub line: usize,
}

/// Per-category semantic template for lexical edges. `?lemma` resolves to
/// the entry's lemma constant, `?lemma1` to the lemma with a `1` suffix
/// (the instance-constant notation for individual nouns); any other
/// variable is renamed fresh per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct LexSem {
    pub category: Symbol,
    pub feats: Vec<(Symbol, Symbol)>,
    pub template: Term,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpecCond {
    SemType(usize, SemType),
    Feature(usize, Symbol, Symbol),
}

/// A subtractive preference correction, fired by name from a grammar rule's
/// `spec(id)` guard when its conditions hold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecRule {
    pub id: Symbol,
    pub value: f64,
    pub conds: Vec<SpecCond>,
    pub line: usize,
}

/// A set phrase keyed on an adjacent lemma sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPhrase {
    pub lemmas: Vec<Symbol>,
    pub value: f64,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeaningPostulate {
    pub name: Symbol,
    pub clause: HornClause,
}

impl MeaningPostulate {
    pub fn to_named_rule(&self) -> NamedRule {
        NamedRule { name: self.name.clone(), clause: self.clause.clone() }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResourceSet {
    pub rules: Vec<GrammarRule>,
    pub lexsems: Vec<LexSem>,
    pub lexicon: Lexicon,
    pub postulates: Vec<MeaningPostulate>,
    pub specs: Vec<SpecRule>,
    pub phrases: Vec<SetPhrase>,
}

impl ResourceSet {
    pub fn spec_rules<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a SpecRule> + 'a {
        self.specs.iter().filter(move |s| s.id == id)
    }

    pub fn phrase_value(&self, lemmas: &[Symbol]) -> Option<f64> {
        self.phrases.iter().find(|p| p.lemmas == lemmas).map(|p| p.value)
    }
}

// ---------------------------------------------------------------------------
// Rule application
// ---------------------------------------------------------------------------

/// What rule application needs to see of a chart edge.
#[derive(Debug, Clone, Copy)]
pub struct ChildView<'a> {
    pub category: &'a str,
    pub features: &'a BTreeMap<Symbol, Symbol>,
    pub build: &'a Term,
    pub head: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub features: BTreeMap<Symbol, Symbol>,
    pub build: Term,
    pub head: Symbol,
    /// Summed Spec corrections from fired preference rules.
    pub spec: f64,
}

fn rename_pattern(t: &Term, salt: u64) -> Term {
    match t {
        Term::Var(v) => Term::Var(Var::salted(v.name.clone(), salt)),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| rename_pattern(a, salt)).collect())
        }
        other => other.clone(),
    }
}

fn unify_feats(
    pats: &[FeatPattern],
    child: &ChildView<'_>,
    salt: u64,
    subst: &mut Substitution,
) -> bool {
    for p in pats {
        match &p.value {
            FeatValue::Sym(want) => {
                if child.features.get(&p.feat) != Some(want) {
                    return false;
                }
            }
            FeatValue::Var(v) => {
                // bind only when the child carries the feature
                if let Some(have) = child.features.get(&p.feat) {
                    let var = Term::Var(Var::salted(v.name.clone(), salt));
                    match unify(&var, &Term::Const(have.clone()), subst) {
                        Some(s) => *subst = s,
                        None => return false,
                    }
                }
            }
        }
    }
    true
}

fn cond_holds(k: usize, children: &[ChildView<'_>], f: impl Fn(&ChildView<'_>) -> bool) -> bool {
    k >= 1 && k <= children.len() && f(&children[k - 1])
}

fn semtype_holds(lexicon: &Lexicon, child: &ChildView<'_>, t: SemType) -> bool {
    lexicon.semtypes_of(child.head).contains(&t)
}

/// Attempts to apply `rule` to the child edges. `salt` must be fresh per
/// firing so the rule's variables cannot capture anything in the children.
pub fn try_apply(
    rule: &GrammarRule,
    children: &[ChildView<'_>],
    rs: &ResourceSet,
    salt: u64,
) -> Option<RuleMatch> {
    if children.len() != rule.rhs.len() {
        return None;
    }
    let mut subst = Substitution::new();
    for (pat, child) in rule.rhs.iter().zip(children) {
        if pat.category != child.category {
            return None;
        }
        if !unify_feats(&pat.feats, child, salt, &mut subst) {
            return None;
        }
        if let Some(bp) = &pat.build {
            let pattern = rename_pattern(bp, salt);
            subst = unify(&pattern, child.build, &subst)?;
        }
    }

    let mut spec = 0.0;
    for guard in &rule.guards {
        match guard {
            Guard::SemType(k, t) => {
                if !cond_holds(*k, children, |c| semtype_holds(&rs.lexicon, c, *t)) {
                    return None;
                }
            }
            Guard::Feature(k, f, v) => {
                if !cond_holds(*k, children, |c| c.features.get(f) == Some(v)) {
                    return None;
                }
            }
            Guard::NoFeature(k, f) => {
                if !cond_holds(*k, children, |c| !c.features.contains_key(f)) {
                    return None;
                }
            }
            Guard::Spec(id) => {
                for sr in rs.spec_rules(id) {
                    let fired = sr.conds.iter().all(|c| match c {
                        SpecCond::SemType(k, t) => {
                            cond_holds(*k, children, |ch| semtype_holds(&rs.lexicon, ch, *t))
                        }
                        SpecCond::Feature(k, f, v) => {
                            cond_holds(*k, children, |ch| ch.features.get(f) == Some(v))
                        }
                    });
                    if fired {
                        spec += sr.value;
                        break;
                    }
                }
            }
        }
    }

    let mut features = BTreeMap::new();
    for p in &rule.lhs_feats {
        match &p.value {
            FeatValue::Sym(v) => {
                features.insert(p.feat.clone(), v.clone());
            }
            FeatValue::Var(v) => {
                let resolved = subst.apply(&Term::Var(Var::salted(v.name.clone(), salt)));
                if let Term::Const(c) = resolved {
                    features.insert(p.feat.clone(), c);
                }
            }
        }
    }

    let build = subst.apply(&rename_pattern(&rule.build, salt));
    let head = children[rule.head].head.to_string();
    Some(RuleMatch { features, build, head, spec })
}

/// Instantiates a lexical template for an entry: `?lemma`/`?lemma1` become
/// constants, remaining variables are renamed fresh with `salt`.
pub fn instantiate_lexsem(template: &Term, lemma: &str, salt: u64) -> Term {
    fn go(t: &Term, lemma: &str, salt: u64) -> Term {
        match t {
            Term::Var(v) if v.name == "lemma" => Term::Const(lemma.to_string()),
            Term::Var(v) if v.name == "lemma1" => Term::Const(format!("{lemma}1")),
            Term::Var(v) => Term::Var(Var::salted(v.name.clone(), salt)),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| go(a, lemma, salt)).collect())
            }
            other => other.clone(),
        }
    }
    go(template, lemma, salt)
}

/// First lexsem whose category and feature constraints accept the entry.
pub fn lexsem_for<'a>(
    rs: &'a ResourceSet,
    category: &str,
    features: &BTreeMap<Symbol, Symbol>,
) -> Option<&'a LexSem> {
    rs.lexsems.iter().find(|ls| {
        ls.category == category
            && ls.feats.iter().all(|(f, v)| features.get(f) == Some(v))
    })
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// Splits on whitespace at bracket depth zero, so build patterns may contain
/// parenthesized argument lists.
fn split_top_level(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, c) in src.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push(&src[s..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&src[s..]);
    }
    out
}

fn split_guards(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ';' if depth == 0 => {
                out.push(src[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(src[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

fn rerr(line: usize, message: impl Into<String>) -> ResourceError {
    ResourceError { line, message: message.into() }
}

fn parse_feat_block(src: &str, line: usize) -> Result<Vec<FeatPattern>, ResourceError> {
    let mut out = Vec::new();
    for part in src.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (f, v) = part
            .split_once('=')
            .ok_or_else(|| rerr(line, format!("expected feat=value in `{part}`")))?;
        let value = if let Some(name) = v.trim().strip_prefix('?') {
            FeatValue::Var(Var::new(name))
        } else {
            FeatValue::Sym(v.trim().to_string())
        };
        out.push(FeatPattern { feat: f.trim().to_string(), value });
    }
    Ok(out)
}

/// `cat`, `cat[f=v,g=?V]`, optionally `:buildpattern` for RHS items.
fn parse_constituent(src: &str, line: usize, allow_build: bool) -> Result<ConstituentPat, ResourceError> {
    let (main, build_src) = match find_top_level_colon(src) {
        Some(i) if allow_build => (&src[..i], Some(&src[i + 1..])),
        _ => (src, None),
    };
    let (category, feats) = match main.find('[') {
        Some(i) => {
            let inner = main[i..]
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| rerr(line, format!("malformed feature block in `{main}`")))?;
            (main[..i].to_string(), parse_feat_block(inner, line)?)
        }
        None => (main.to_string(), Vec::new()),
    };
    let build = match build_src {
        Some(b) => Some(parse_build_term(b, line)?),
        None => None,
    };
    Ok(ConstituentPat { category, feats, build })
}

fn find_top_level_colon(src: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in src.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ':' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_build_term(src: &str, line: usize) -> Result<Term, ResourceError> {
    let mut s = Scanner::new(src);
    let t = s.term().map_err(|e| rerr(line, format!("bad build term: {e}")))?;
    if !s.at_end() {
        return Err(rerr(line, "trailing input after build term"));
    }
    Ok(t)
}

fn parse_child_ref(src: &str, line: usize) -> Result<usize, ResourceError> {
    src.trim()
        .strip_prefix('$')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|k| *k >= 1)
        .ok_or_else(|| rerr(line, format!("expected child reference `$K`, found `{src}`")))
}

fn parse_guard_call(src: &str, line: usize) -> Result<(String, Vec<String>), ResourceError> {
    let open = src
        .find('(')
        .ok_or_else(|| rerr(line, format!("malformed guard `{src}`")))?;
    let name = src[..open].trim().to_string();
    let args_src = src[open..]
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| rerr(line, format!("malformed guard `{src}`")))?;
    let args = args_src.split(',').map(|a| a.trim().to_string()).collect();
    Ok((name, args))
}

pub fn parse_grammar(src: &str) -> Result<(Vec<GrammarRule>, Vec<LexSem>), Vec<ResourceError>> {
    let mut rules = Vec::new();
    let mut lexsems = Vec::new();
    let mut errors = Vec::new();

    'line: for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("lexsem ") {
            let Some((head, template_src)) = rest.split_once(':') else {
                errors.push(rerr(lineno, "expected `lexsem cat[..]: template`"));
                continue;
            };
            match (
                parse_constituent(head.trim(), lineno, false),
                parse_build_term(template_src.trim(), lineno),
            ) {
                (Ok(pat), Ok(template)) => {
                    let feats = pat
                        .feats
                        .iter()
                        .filter_map(|p| match &p.value {
                            FeatValue::Sym(v) => Some((p.feat.clone(), v.clone())),
                            FeatValue::Var(_) => None,
                        })
                        .collect();
                    lexsems.push(LexSem { category: pat.category, feats, template, line: lineno });
                }
                (Err(e), _) | (_, Err(e)) => errors.push(e),
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("rule ") else {
            errors.push(rerr(lineno, format!("expected `rule` or `lexsem`, found `{line}`")));
            continue;
        };
        let Some((id, rest)) = rest.split_once(':') else {
            errors.push(rerr(lineno, "expected `rule id: lhs -> rhs { guards }`"));
            continue;
        };
        let id = id.trim().to_string();
        let (body, guards_src) = match rest.find('{') {
            Some(i) => {
                let Some(inner) = rest[i..].strip_prefix('{').and_then(|s| s.trim_end().strip_suffix('}')) else {
                    errors.push(rerr(lineno, "unterminated guard block"));
                    continue;
                };
                (&rest[..i], inner)
            }
            None => (rest, ""),
        };
        let Some((lhs_src, rhs_src)) = body.split_once("->") else {
            errors.push(rerr(lineno, "expected `lhs -> rhs`"));
            continue;
        };
        let lhs = match parse_constituent(lhs_src.trim(), lineno, false) {
            Ok(l) => l,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let mut rhs = Vec::new();
        for chunk in split_top_level(rhs_src) {
            match parse_constituent(chunk, lineno, true) {
                Ok(c) => rhs.push(c),
                Err(e) => {
                    errors.push(e);
                    continue 'line;
                }
            }
        }
        if rhs.is_empty() {
            errors.push(rerr(lineno, format!("rule {id} has an empty right-hand side")));
            continue;
        }

        let mut guards = Vec::new();
        let mut build = None;
        let mut head = 0usize;
        for g in split_guards(guards_src) {
            if let Some(b) = g.strip_prefix("build") {
                let Some(b) = b.trim_start().strip_prefix('=') else {
                    errors.push(rerr(lineno, "expected `build = term`"));
                    continue 'line;
                };
                match parse_build_term(b.trim(), lineno) {
                    Ok(t) => build = Some(t),
                    Err(e) => {
                        errors.push(e);
                        continue 'line;
                    }
                }
                continue;
            }
            let (name, args) = match parse_guard_call(g, lineno) {
                Ok(x) => x,
                Err(e) => {
                    errors.push(e);
                    continue 'line;
                }
            };
            let guard = match (name.as_str(), args.as_slice()) {
                ("semtype", [k, t]) => match (parse_child_ref(k, lineno), SemType::parse(t)) {
                    (Ok(k), Some(t)) => Ok(Guard::SemType(k, t)),
                    (Err(e), _) => Err(e),
                    (_, None) => Err(rerr(lineno, format!("unknown semantic type `{t}`"))),
                },
                ("feature", [k, f, v]) => {
                    parse_child_ref(k, lineno).map(|k| Guard::Feature(k, f.clone(), v.clone()))
                }
                ("transitivity", [k, t]) => {
                    parse_child_ref(k, lineno).map(|k| Guard::Feature(k, "tr".to_string(), t.clone()))
                }
                ("nofeature", [k, f]) => {
                    parse_child_ref(k, lineno).map(|k| Guard::NoFeature(k, f.clone()))
                }
                ("spec", [id]) => Ok(Guard::Spec(id.clone())),
                ("head", [k]) => match parse_child_ref(k, lineno) {
                    Ok(k) => {
                        head = k - 1;
                        continue;
                    }
                    Err(e) => Err(e),
                },
                _ => Err(rerr(lineno, format!("unknown guard `{g}`"))),
            };
            match guard {
                Ok(g) => guards.push(g),
                Err(e) => {
                    errors.push(e);
                    continue 'line;
                }
            }
        }
        let Some(build) = build else {
            errors.push(rerr(lineno, format!("rule {id} has no build")));
            continue;
        };
        rules.push(GrammarRule {
            id,
            lhs_category: lhs.category,
            lhs_feats: lhs.feats,
            rhs,
            guards,
            build,
            head,
            line: lineno,
        });
    }

    if errors.is_empty() {
        Ok((rules, lexsems))
    } else {
        Err(errors)
    }
}

/// `spec id value { conds }` and `phrase lemma... value` lines.
pub fn parse_specs(src: &str) -> Result<(Vec<SpecRule>, Vec<SetPhrase>), Vec<ResourceError>> {
    let mut specs = Vec::new();
    let mut phrases = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("phrase ") {
            let mut parts: Vec<&str> = rest.split_whitespace().collect();
            let value = parts.pop().and_then(|v| v.parse::<f64>().ok());
            match value {
                Some(value) if !parts.is_empty() && value >= 0.0 => phrases.push(SetPhrase {
                    lemmas: parts.iter().map(|s| s.to_string()).collect(),
                    value,
                    line: lineno,
                }),
                _ => errors.push(rerr(lineno, "expected `phrase lemma... value>=0`")),
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("spec ") else {
            errors.push(rerr(lineno, format!("expected `spec` or `phrase`, found `{line}`")));
            continue;
        };
        let (heading, conds_src) = match rest.find('{') {
            Some(i) => {
                let Some(inner) = rest[i..].strip_prefix('{').and_then(|s| s.trim_end().strip_suffix('}')) else {
                    errors.push(rerr(lineno, "unterminated condition block"));
                    continue;
                };
                (&rest[..i], inner)
            }
            None => (rest, ""),
        };
        let mut parts = heading.split_whitespace();
        let (Some(id), Some(value)) = (parts.next(), parts.next().and_then(|v| v.parse::<f64>().ok()))
        else {
            errors.push(rerr(lineno, "expected `spec id value { conds }`"));
            continue;
        };
        if value < 0.0 {
            errors.push(rerr(lineno, format!("spec value must be non-negative, got {value}")));
            continue;
        }
        let mut conds = Vec::new();
        let mut ok = true;
        for c in split_guards(conds_src) {
            let parsed = parse_guard_call(c, lineno).and_then(|(name, args)| {
                match (name.as_str(), args.as_slice()) {
                    ("semtype", [k, t]) => match (parse_child_ref(k, lineno), SemType::parse(t)) {
                        (Ok(k), Some(t)) => Ok(SpecCond::SemType(k, t)),
                        (Err(e), _) => Err(e),
                        (_, None) => Err(rerr(lineno, format!("unknown semantic type `{t}`"))),
                    },
                    ("feature", [k, f, v]) => {
                        parse_child_ref(k, lineno).map(|k| SpecCond::Feature(k, f.clone(), v.clone()))
                    }
                    ("transitivity", [k, t]) => parse_child_ref(k, lineno)
                        .map(|k| SpecCond::Feature(k, "tr".to_string(), t.clone())),
                    _ => Err(rerr(lineno, format!("unknown condition `{c}`"))),
                }
            });
            match parsed {
                Ok(c) => conds.push(c),
                Err(e) => {
                    errors.push(e);
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            specs.push(SpecRule { id: id.to_string(), value, conds, line: lineno });
        }
    }
    if errors.is_empty() {
        Ok((specs, phrases))
    } else {
        Err(errors)
    }
}

/// `postulate name level=<1|2|3|-> weight=<w>: head <- body` lines.
pub fn parse_postulates(src: &str) -> Result<Vec<MeaningPostulate>, Vec<ResourceError>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(rest) = line.strip_prefix("postulate ") else {
            errors.push(rerr(lineno, format!("expected `postulate`, found `{line}`")));
            continue;
        };
        let Some((heading, clause_src)) = rest.split_once(':') else {
            errors.push(rerr(lineno, "expected `postulate name level=N weight=W: clause`"));
            continue;
        };
        let mut parts = heading.split_whitespace();
        let Some(name) = parts.next() else {
            errors.push(rerr(lineno, "postulate needs a name"));
            continue;
        };
        let mut level = None;
        let mut weight = 1.0;
        let mut ok = true;
        for kv in parts {
            match kv.split_once('=') {
                Some(("level", "-")) => level = None,
                Some(("level", v)) => match v.parse::<u8>() {
                    Ok(l) if (1..=3).contains(&l) => level = Some(l),
                    _ => {
                        errors.push(rerr(lineno, format!("bad level `{v}`")));
                        ok = false;
                    }
                },
                Some(("weight", v)) => match v.parse::<f64>() {
                    Ok(w) if w >= 0.0 => weight = w,
                    _ => {
                        errors.push(rerr(lineno, format!("bad weight `{v}`")));
                        ok = false;
                    }
                },
                _ => {
                    errors.push(rerr(lineno, format!("unknown postulate option `{kv}`")));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        match parse_clause(clause_src.trim()) {
            Ok(mut clause) => {
                clause.level = level;
                clause.weight = weight;
                out.push(MeaningPostulate { name: name.to_string(), clause });
            }
            Err(e) => errors.push(rerr(lineno, format!("bad clause: {e}"))),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

fn pattern_vars(t: &Term, out: &mut Vec<Var>) {
    t.collect_vars(out);
}

impl ResourceSet {
    /// Checks the loaded resources as a whole: duplicate rule ids, unknown
    /// category references, and build variables not bound by any pattern.
    pub fn validate(&self) -> Vec<ResourceError> {
        let mut errors = Vec::new();
        let mut defined = self.lexicon.categories();
        for r in &self.rules {
            defined.insert(r.lhs_category.clone());
        }

        let mut seen: Vec<&str> = Vec::new();
        for r in &self.rules {
            if seen.contains(&r.id.as_str()) {
                errors.push(rerr(r.line, format!("duplicate rule id `{}`", r.id)));
            }
            seen.push(&r.id);

            for pat in &r.rhs {
                if !defined.contains(&pat.category) {
                    errors.push(rerr(
                        r.line,
                        format!("rule {}: unknown category `{}`", r.id, pat.category),
                    ));
                }
            }
            if r.head >= r.rhs.len() {
                errors.push(rerr(
                    r.line,
                    format!("rule {}: head child ${} out of range", r.id, r.head + 1),
                ));
            }
            for g in &r.guards {
                let k = match g {
                    Guard::SemType(k, _) | Guard::Feature(k, _, _) | Guard::NoFeature(k, _) => *k,
                    Guard::Spec(_) => continue,
                };
                if k > r.rhs.len() {
                    errors.push(rerr(
                        r.line,
                        format!("rule {}: guard child ${k} out of range", r.id),
                    ));
                }
            }

            let mut bound = Vec::new();
            for pat in &r.rhs {
                if let Some(b) = &pat.build {
                    pattern_vars(b, &mut bound);
                }
                for f in &pat.feats {
                    if let FeatValue::Var(v) = &f.value {
                        if !bound.contains(v) {
                            bound.push(v.clone());
                        }
                    }
                }
            }
            let mut used = Vec::new();
            pattern_vars(&r.build, &mut used);
            for f in &r.lhs_feats {
                if let FeatValue::Var(v) = &f.value {
                    used.push(v.clone());
                }
            }
            for v in used {
                if !bound.contains(&v) {
                    errors.push(rerr(
                        r.line,
                        format!("rule {}: build variable ?{} is not bound by any pattern", r.id, v.name),
                    ));
                }
            }
        }
        errors
    }
}
