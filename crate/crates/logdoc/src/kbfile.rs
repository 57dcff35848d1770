//! Knowledge-base file IO with atomic updates.

use std::path::Path;

use anyhow::{Context, Result};
use logdoc_core::KnowledgeBase;

pub fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    if !path.exists() {
        return Ok(KnowledgeBase::new());
    }
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    KnowledgeBase::from_text(&text)
        .map_err(|e| anyhow::anyhow!("{}:{}", path.display(), e))
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn save_kb(path: &Path, kb: &KnowledgeBase) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, kb.to_text())
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}
