//! Record types of the line-delimited stage artifacts that are not already
//! core domain types.

use serde::{Deserialize, Serialize};

use oeq_core::index::RetrievalHit;

/// One line of `hits.jsonl`: the retrieval results for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitsRecord {
    pub question_id: String,
    pub hits: Vec<RetrievalHit>,
}

pub fn load_hits(path: &std::path::Path) -> anyhow::Result<Vec<HitsRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: HitsRecord = serde_json::from_str(line)
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), idx + 1))?;
        out.push(record);
    }
    Ok(out)
}

pub fn load_augmented(path: &std::path::Path) -> anyhow::Result<Vec<oeq_core::augment::AugmentedQuery>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: oeq_core::augment::AugmentedQuery = serde_json::from_str(line)
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), idx + 1))?;
        out.push(record);
    }
    Ok(out)
}

/// Serialize records as JSONL bytes.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut bytes = Vec::new();
    for record in records {
        serde_json::to_writer(&mut bytes, record)?;
        bytes.push(b'\n');
    }
    Ok(bytes)
}
