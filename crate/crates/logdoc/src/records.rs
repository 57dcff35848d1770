//! Machine-readable query output and the trace sidecar consumed by
//! `explain`. Records are line-delimited JSON; traces are persisted next to
//! the knowledge base as `<kb>.traces`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use logdoc_core::prover::TraceStep;
use logdoc_core::retrieval::Passage;
use logdoc_core::KnowledgeBase;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PassageRecord {
    pub doc: u64,
    pub frag: u64,
    pub stage: String,
    pub text: String,
    pub trace: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepRecord {
    pub kind: String,
    pub name: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub id: String,
    pub query: String,
    pub doc: u64,
    pub frag: u64,
    pub stage: String,
    pub steps: Vec<TraceStepRecord>,
}

pub fn sidecar_path(kb_path: &Path) -> PathBuf {
    let mut os = kb_path.as_os_str().to_os_string();
    os.push(".traces");
    PathBuf::from(os)
}

/// Renders passages as records, assigning sequential trace ids, and returns
/// the trace rows to persist.
pub fn build_records(
    passages: &[Passage],
    kb: &KnowledgeBase,
    query: &str,
) -> (Vec<PassageRecord>, Vec<TraceRecord>) {
    let mut records = Vec::new();
    let mut traces = Vec::new();
    for (i, p) in passages.iter().enumerate() {
        let id = format!("t{}", i + 1);
        let steps = p
            .trace
            .steps
            .iter()
            .map(|s| match s {
                TraceStep::Fact(fid) => TraceStepRecord {
                    kind: "fact".into(),
                    name: format!("f{}", fid.0),
                    detail: kb.fact(*fid).to_string(),
                },
                TraceStep::Rule(idx) => {
                    let rule = kb.rule(*idx);
                    TraceStepRecord {
                        kind: "rule".into(),
                        name: rule.name.clone(),
                        detail: rule.clause.to_string(),
                    }
                }
            })
            .collect();
        records.push(PassageRecord {
            doc: p.document,
            frag: p.fragment,
            stage: p.stage.to_string(),
            text: p.text.clone(),
            trace: id.clone(),
        });
        traces.push(TraceRecord {
            id,
            query: query.to_string(),
            doc: p.document,
            frag: p.fragment,
            stage: p.stage.to_string(),
            steps,
        });
    }
    (records, traces)
}

pub fn save_traces(kb_path: &Path, traces: &[TraceRecord]) -> Result<()> {
    let path = sidecar_path(kb_path);
    let mut out = String::new();
    for t in traces {
        out.push_str(&serde_json::to_string(t)?);
        out.push('\n');
    }
    std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn load_trace(kb_path: &Path, id: &str) -> Result<Option<TraceRecord>> {
    let path = sidecar_path(kb_path);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.display()))?;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let t: TraceRecord = serde_json::from_str(line)
            .with_context(|| format!("parsing trace record in {}", path.display()))?;
        if t.id == id {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Numbered resolution steps with provenance, for `explain`.
pub fn render_trace(t: &TraceRecord) -> String {
    let mut out = format!(
        "trace {} for query {:?} -> {}:{} [{}]\n",
        t.id, t.query, t.doc, t.frag, t.stage
    );
    if t.steps.is_empty() {
        out.push_str("  (direct match with no resolution steps)\n");
    }
    for (i, s) in t.steps.iter().enumerate() {
        out.push_str(&format!("  {}. {} {}: {}\n", i + 1, s.kind, s.name, s.detail));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip_into_explain() {
        let dir = tempfile::tempdir().unwrap();
        let kb_path = dir.path().join("kb.txt");
        let trace = TraceRecord {
            id: "t1".into(),
            query: "q".into(),
            doc: 11,
            frag: 1,
            stage: "level3".into(),
            steps: vec![TraceStepRecord {
                kind: "rule".into(),
                name: "by_with_for_agent".into(),
                detail: "circumstance(by_with_for,O1,O2) <- ...".into(),
            }],
        };
        save_traces(&kb_path, &[trace]).unwrap();
        let loaded = load_trace(&kb_path, "t1").unwrap().unwrap();
        assert_eq!(loaded.doc, 11);
        assert!(render_trace(&loaded).contains("by_with_for_agent"));
        assert!(load_trace(&kb_path, "t99").unwrap().is_none());
    }
}
