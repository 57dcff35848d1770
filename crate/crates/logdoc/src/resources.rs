//! Loading and validating grammar, lexicon, postulate, spec, and isa files.

use std::fmt;
use std::path::{Path, PathBuf};

use logdoc_core::grammar::{parse_grammar, parse_postulates, parse_specs, ResourceSet};
use logdoc_core::lexicon::{parse_lexicon, ResourceError};
use logdoc_core::prover::{parse_isa, IsaHierarchy};

/// All problems found while loading a resource set, each tagged file:line.
#[derive(Debug, Default)]
pub struct LoadErrors {
    pub entries: Vec<String>,
}

impl LoadErrors {
    fn push_io(&mut self, path: &Path, err: std::io::Error) {
        self.entries.push(format!("{}: {err}", path.display()));
    }

    fn push_all(&mut self, path: &Path, errs: Vec<ResourceError>) {
        for e in errs {
            self.entries.push(format!("{}:{}: {}", path.display(), e.line, e.message));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for LoadErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for LoadErrors {}

#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub grammar: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub postulates: Option<PathBuf>,
    pub specs: Option<PathBuf>,
}

/// Reads and validates the four resource files. Missing optional paths
/// (postulates, specs) yield empty sections; errors from every file are
/// aggregated rather than reported one at a time.
pub fn load_resources(paths: &ResourcePaths) -> Result<ResourceSet, LoadErrors> {
    let mut errors = LoadErrors::default();
    let read = |path: &Option<PathBuf>, errors: &mut LoadErrors| -> Option<(PathBuf, String)> {
        let path = path.as_ref()?;
        match std::fs::read_to_string(path) {
            Ok(text) => Some((path.clone(), text)),
            Err(e) => {
                errors.push_io(path, e);
                None
            }
        }
    };

    let mut rs = ResourceSet::default();
    if let Some((path, text)) = read(&paths.grammar, &mut errors) {
        match parse_grammar(&text) {
            Ok((rules, lexsems)) => {
                rs.rules = rules;
                rs.lexsems = lexsems;
            }
            Err(errs) => errors.push_all(&path, errs),
        }
    }
    if let Some((path, text)) = read(&paths.lexicon, &mut errors) {
        match parse_lexicon(&text) {
            Ok(lexicon) => rs.lexicon = lexicon,
            Err(errs) => errors.push_all(&path, errs),
        }
    }
    if let Some((path, text)) = read(&paths.postulates, &mut errors) {
        match parse_postulates(&text) {
            Ok(postulates) => rs.postulates = postulates,
            Err(errs) => errors.push_all(&path, errs),
        }
    }
    if let Some((path, text)) = read(&paths.specs, &mut errors) {
        match parse_specs(&text) {
            Ok((specs, phrases)) => {
                rs.specs = specs;
                rs.phrases = phrases;
            }
            Err(errs) => errors.push_all(&path, errs),
        }
    }

    if errors.is_empty() {
        let validation = rs.validate();
        if !validation.is_empty() {
            if let Some(g) = &paths.grammar {
                errors.push_all(g, validation);
            } else {
                errors.push_all(Path::new("<grammar>"), validation);
            }
        }
    }

    if errors.is_empty() {
        Ok(rs)
    } else {
        Err(errors)
    }
}

pub fn load_isa(path: Option<&Path>) -> Result<IsaHierarchy, LoadErrors> {
    let Some(path) = path else {
        return Ok(IsaHierarchy::new());
    };
    let mut errors = LoadErrors::default();
    match std::fs::read_to_string(path) {
        Ok(text) => match parse_isa(&text) {
            Ok(isa) => return Ok(isa),
            Err(errs) => {
                for e in errs {
                    errors.entries.push(format!("{}:{}: {}", path.display(), e.line, e.message));
                }
            }
        },
        Err(e) => errors.push_io(path, e),
    }
    Err(errors)
}
