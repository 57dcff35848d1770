//! Lexicon, tokenizer, and conservative suffix morphology.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::term::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemType {
    ActiveObject,
    PassiveObject,
    Activity,
    Process,
}

impl SemType {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "active_object" => Some(SemType::ActiveObject),
            "passive_object" => Some(SemType::PassiveObject),
            "activity" => Some(SemType::Activity),
            "process" => Some(SemType::Process),
            _ => None,
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SemType::ActiveObject => "active_object",
            SemType::PassiveObject => "passive_object",
            SemType::Activity => "activity",
            SemType::Process => "process",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    pub surface: String,
    pub lemma: Symbol,
    pub category: Symbol,
    pub features: BTreeMap<Symbol, Symbol>,
    pub semtypes: BTreeSet<SemType>,
    /// 1-based line in the lexicon file, 0 for programmatic entries.
    pub line: usize,
}

impl LexEntry {
    pub fn feature(&self, key: &str) -> Option<&str> {
        self.features.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    by_surface: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn add(&mut self, entry: LexEntry) {
        self.by_surface
            .entry(entry.surface.clone())
            .or_default()
            .push(self.entries.len());
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn exact(&self, surface: &str) -> impl Iterator<Item = &LexEntry> {
        self.by_surface
            .get(surface)
            .map(Vec::as_slice)
            .unwrap_or(&[])
            .iter()
            .map(|i| &self.entries[*i])
    }

    pub fn categories(&self) -> BTreeSet<Symbol> {
        self.entries.iter().map(|e| e.category.clone()).collect()
    }

    /// Semantic types of a lemma, unioned over all its entries.
    pub fn semtypes_of(&self, lemma: &str) -> BTreeSet<SemType> {
        self.entries
            .iter()
            .filter(|e| e.lemma == lemma)
            .flat_map(|e| e.semtypes.iter().copied())
            .collect()
    }
}

/// Lowercasing word tokenizer: splits on whitespace and punctuation but
/// keeps internal hyphens ("lube-oil") and apostrophes.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '-' || c == '\'' {
            for lc in c.to_lowercase() {
                word.push(lc);
            }
        } else if !word.is_empty() {
            out.push(core::mem::take(&mut word));
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    // strip boundary hyphens left by dashes in running text
    out.into_iter()
        .map(|w| w.trim_matches('-').to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

fn derived(base: &LexEntry, surface: &str, extra: &[(&str, &str)]) -> LexEntry {
    let mut e = base.clone();
    e.surface = surface.to_string();
    for (k, v) in extra {
        e.features.insert((*k).to_string(), (*v).to_string());
    }
    e
}

/// Exact lexicon matches plus suffix-stripped candidates whose base form
/// exists: plural `-s`/`-es` on nouns, gerund `-ing` on verbs with consonant
/// doubling and `e`-restoration undone. Every returned lemma exists in the
/// lexicon; unknown words yield an empty list.
pub fn analyze_word(form: &str, lexicon: &Lexicon) -> Vec<LexEntry> {
    let mut out: Vec<LexEntry> = lexicon.exact(form).cloned().collect();

    if let Some(stem) = form.strip_suffix("ing") {
        if stem.len() >= 2 {
            let mut candidates = Vec::new();
            candidates.push(stem.to_string());
            candidates.push(format!("{stem}e"));
            let bytes = stem.as_bytes();
            let last = bytes[bytes.len() - 1] as char;
            if bytes.len() >= 2 && bytes[bytes.len() - 1] == bytes[bytes.len() - 2] && !"aeiou".contains(last) {
                candidates.push(stem[..stem.len() - 1].to_string());
            }
            for cand in candidates {
                for e in lexicon.exact(&cand) {
                    if e.category == "verb" {
                        out.push(derived(e, form, &[("form", "gerund")]));
                    }
                }
            }
        }
    }

    if form.len() > 2 && form.ends_with('s') && !form.ends_with("ss") {
        let mut candidates = vec![form.strip_suffix('s').unwrap()];
        if let Some(stem) = form.strip_suffix("es") {
            candidates.push(stem);
        }
        for cand in candidates {
            for e in lexicon.exact(cand) {
                if e.category == "noun" {
                    out.push(derived(e, form, &[("num", "plur")]));
                }
            }
        }
    }

    out
}

// ---------------------------------------------------------------------------
// Lexicon text format, one entry per line:
//   word <surface> <category> [lemma=..] [tr=intr|tr|ditr] [num=..] [form=..]
//        [role=time|place] [indiv=yes] [sem=type,type]
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ResourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ResourceError {}

pub fn parse_lexicon(src: &str) -> Result<Lexicon, Vec<ResourceError>> {
    let mut lexicon = Lexicon::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or("");
        if tag != "word" {
            errors.push(ResourceError {
                line: lineno,
                message: format!("expected `word`, found `{tag}`"),
            });
            continue;
        }
        let (surface, category) = match (parts.next(), parts.next()) {
            (Some(s), Some(c)) => (s.to_string(), c.to_string()),
            _ => {
                errors.push(ResourceError {
                    line: lineno,
                    message: "expected `word <surface> <category> ...`".to_string(),
                });
                continue;
            }
        };
        let mut entry = LexEntry {
            lemma: surface.clone(),
            surface,
            category,
            features: BTreeMap::new(),
            semtypes: BTreeSet::new(),
            line: lineno,
        };
        let mut ok = true;
        for kv in parts {
            let Some((k, v)) = kv.split_once('=') else {
                errors.push(ResourceError {
                    line: lineno,
                    message: format!("expected key=value, found `{kv}`"),
                });
                ok = false;
                break;
            };
            match k {
                "lemma" => entry.lemma = v.to_string(),
                "sem" => {
                    for t in v.split(',') {
                        match SemType::parse(t) {
                            Some(st) => {
                                entry.semtypes.insert(st);
                            }
                            None => {
                                errors.push(ResourceError {
                                    line: lineno,
                                    message: format!("unknown semantic type `{t}`"),
                                });
                                ok = false;
                            }
                        }
                    }
                }
                _ => {
                    entry.features.insert(k.to_string(), v.to_string());
                }
            }
        }
        if ok {
            lexicon.add(entry);
        }
    }
    if errors.is_empty() {
        Ok(lexicon)
    } else {
        Err(errors)
    }
}
