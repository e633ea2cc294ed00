//! Dataset serialization: line-delimited JSON for records, a dedicated
//! binary format for embeddings.
//!
//! Every loader either returns a fully validated value set or an error
//! naming the offending record; partial results are never returned.
//! Loading preserves file order.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    CorpusPassage, EmbeddingMatrix, QuestionItem, RankedPrediction, RaterJudgment,
};

/// Header magic of the embedding binary format.
pub const EMBEDDING_MAGIC: &[u8; 4] = b"EMB1";

/// Pull the backtick-quoted token out of a serde error message, if any,
/// so malformed-record errors can name the field.
fn field_from_serde_error(msg: &str) -> String {
    let mut parts = msg.split('`');
    match (parts.next(), parts.next()) {
        (Some(_), Some(field)) if !field.is_empty() => field.to_string(),
        _ => "<record>".to_string(),
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            field: field_from_serde_error(&e.to_string()),
            detail: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(records: &[T], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record).map_err(|e| Error::InvalidArg(e.to_string()))?;
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Load `questions.jsonl`, validating every record and rejecting duplicate
/// question ids. Soft warnings (for example non-5-option questions) are
/// logged, not returned.
pub fn load_questions(path: impl AsRef<Path>) -> Result<Vec<QuestionItem>> {
    let path = path.as_ref();
    let questions: Vec<QuestionItem> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    for q in &questions {
        q.validate()?;
        if !seen.insert(q.id.clone()) {
            return Err(Error::DuplicateId {
                kind: "question",
                id: q.id.clone(),
            });
        }
        for warning in q.warnings() {
            log::warn!("{}: {warning}", path.display());
        }
    }
    Ok(questions)
}

pub fn save_questions(questions: &[QuestionItem], path: impl AsRef<Path>) -> Result<()> {
    for q in questions {
        q.validate()?;
    }
    write_jsonl(questions, path.as_ref())
}

/// Load `judgments.jsonl`. Judgments are validated standalone here; checks
/// against the judged questions happen at aggregation time.
pub fn load_judgments(path: impl AsRef<Path>) -> Result<Vec<RaterJudgment>> {
    let judgments: Vec<RaterJudgment> = read_jsonl(path.as_ref())?;
    for j in &judgments {
        j.validate()?;
    }
    Ok(judgments)
}

pub fn save_judgments(judgments: &[RaterJudgment], path: impl AsRef<Path>) -> Result<()> {
    for j in judgments {
        j.validate()?;
    }
    write_jsonl(judgments, path.as_ref())
}

/// Save predictions after checking each is a valid permutation of its
/// question's options. Nothing is written if any prediction is rejected.
pub fn save_predictions(
    predictions: &[RankedPrediction],
    questions: &[QuestionItem],
    path: impl AsRef<Path>,
) -> Result<()> {
    for pred in predictions {
        let question = questions
            .iter()
            .find(|q| q.id == pred.question_id)
            .ok_or_else(|| Error::UnknownId {
                kind: "question",
                id: pred.question_id.clone(),
            })?;
        pred.validate_against(question)?;
    }
    write_jsonl(predictions, path.as_ref())
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<RankedPrediction>> {
    let predictions: Vec<RankedPrediction> = read_jsonl(path.as_ref())?;
    for p in &predictions {
        p.validate()?;
    }
    Ok(predictions)
}

/// Load `corpus.jsonl`, rejecting empty bodies and duplicate passage ids.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusPassage>> {
    let passages: Vec<CorpusPassage> = read_jsonl(path.as_ref())?;
    let mut seen = HashSet::new();
    for p in &passages {
        p.validate()?;
        if !seen.insert(p.id.clone()) {
            return Err(Error::DuplicateId {
                kind: "passage",
                id: p.id.clone(),
            });
        }
    }
    Ok(passages)
}

pub fn save_corpus(passages: &[CorpusPassage], path: impl AsRef<Path>) -> Result<()> {
    for p in passages {
        p.validate()?;
    }
    write_jsonl(passages, path.as_ref())
}

/// Write the embedding binary: `EMB1`, u32-le rows, u32-le dim, one
/// length-prefixed UTF-8 id per row, then the row-major f32-le payload.
pub fn save_embeddings(matrix: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_embeddings_to(matrix, &mut writer).map_err(|e| Error::io(path, e))?;
    writer.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_embeddings_to<W: Write>(
    matrix: &EmbeddingMatrix,
    writer: &mut W,
) -> std::io::Result<()> {
    writer.write_all(EMBEDDING_MAGIC)?;
    writer.write_u32::<LittleEndian>(matrix.rows() as u32)?;
    writer.write_u32::<LittleEndian>(matrix.dim() as u32)?;
    for id in matrix.ids() {
        writer.write_u32::<LittleEndian>(id.len() as u32)?;
        writer.write_all(id.as_bytes())?;
    }
    for value in matrix.data() {
        writer.write_f32::<LittleEndian>(*value)?;
    }
    Ok(())
}

/// Load the embedding binary written by [`save_embeddings`]. Bit-exact for
/// all 32-bit values.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut reader = BufReader::new(file);
    read_embeddings_from(&mut reader, path, file_len)
}

pub(crate) fn read_embeddings_from<R: Read>(
    reader: &mut R,
    path: &Path,
    total_len: u64,
) -> Result<EmbeddingMatrix> {
    let mut consumed: u64 = 0;
    let truncated = |consumed: u64, needed: u64| Error::Truncated {
        path: path.to_path_buf(),
        expected: consumed + needed,
        actual: total_len,
    };

    let mut magic = [0u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|_| truncated(consumed, 4))?;
    consumed += 4;
    if &magic != EMBEDDING_MAGIC {
        return Err(Error::Format {
            path: path.to_path_buf(),
            detail: format!("bad magic {magic:?}, expected {EMBEDDING_MAGIC:?}"),
        });
    }

    let rows = reader
        .read_u32::<LittleEndian>()
        .map_err(|_| truncated(consumed, 4))? as usize;
    consumed += 4;
    let dim = reader
        .read_u32::<LittleEndian>()
        .map_err(|_| truncated(consumed, 4))? as usize;
    consumed += 4;
    if dim == 0 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            detail: "embedding dim is zero".into(),
        });
    }

    let mut ids = Vec::with_capacity(rows);
    for _ in 0..rows {
        let len = reader
            .read_u32::<LittleEndian>()
            .map_err(|_| truncated(consumed, 4))? as usize;
        consumed += 4;
        let mut buf = vec![0u8; len];
        reader
            .read_exact(&mut buf)
            .map_err(|_| truncated(consumed, len as u64))?;
        consumed += len as u64;
        let id = String::from_utf8(buf).map_err(|_| Error::Format {
            path: path.to_path_buf(),
            detail: "row id is not valid UTF-8".into(),
        })?;
        ids.push(id);
    }

    let payload_len = rows * dim;
    let mut data = vec![0f32; payload_len];
    reader
        .read_f32_into::<LittleEndian>(&mut data)
        .map_err(|_| truncated(consumed, (payload_len * 4) as u64))?;

    EmbeddingMatrix::new(dim, ids, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GoldLabel, RankedOption, ResponseOption};

    fn sample_question(id: &str) -> QuestionItem {
        QuestionItem {
            id: id.into(),
            prompt: format!("prompt for {id}"),
            options: ["A", "B", "C", "D", "E"]
                .into_iter()
                .map(|o| ResponseOption {
                    id: o.into(),
                    text: format!("text {o}"),
                })
                .collect(),
            category: None,
            gold: Some(GoldLabel::SingleCorrect("A".into())),
        }
    }

    #[test]
    fn questions_roundtrip_single_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.jsonl");
        let questions = vec![sample_question("q1")];
        save_questions(&questions, &path).unwrap();
        let loaded = load_questions(&path).unwrap();
        assert_eq!(loaded, questions);
    }

    #[test]
    fn missing_prompt_names_line_and_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.jsonl");
        std::fs::write(
            &path,
            "{\"id\":\"q1\",\"options\":[{\"id\":\"A\",\"text\":\"x\"},{\"id\":\"B\",\"text\":\"y\"}]}\n",
        )
        .unwrap();
        match load_questions(&path) {
            Err(Error::MalformedRecord { line, field, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(field, "prompt");
            }
            other => panic!("expected malformed-record error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_question_id_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.jsonl");
        save_questions(&[sample_question("q1")], &path).unwrap();
        let mut contents = std::fs::read(&path).unwrap();
        let mut dup = contents.clone();
        contents.append(&mut dup);
        std::fs::write(&path, contents).unwrap();
        match load_questions(&path) {
            Err(Error::DuplicateId { kind: "question", id }) => assert_eq!(id, "q1"),
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    #[test]
    fn prediction_missing_option_rejected_before_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let mut q = sample_question("q1");
        q.options.truncate(3);
        q.gold = None;
        let pred = RankedPrediction::from_scores(
            "q1",
            vec![
                RankedOption { id: "A".into(), score: 0.9 },
                RankedOption { id: "B".into(), score: 0.1 },
            ],
        );
        assert!(save_predictions(&[pred], &[q], &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn embeddings_roundtrip_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        let matrix =
            EmbeddingMatrix::new(3, vec!["a".into(), "b".into()], vec![0.0; 6]).unwrap();
        save_embeddings(&matrix, &path).unwrap();
        let loaded = load_embeddings(&path).unwrap();
        assert_eq!(loaded, matrix);
    }

    #[test]
    fn embeddings_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x00\x01\x00\x00\x00").unwrap();
        assert!(matches!(load_embeddings(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn embeddings_truncation_reports_byte_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        let matrix =
            EmbeddingMatrix::new(4, vec!["a".into(), "b".into()], vec![1.5; 8]).unwrap();
        save_embeddings(&matrix, &path).unwrap();
        let full = std::fs::read(&path).unwrap();
        let mut f = File::create(&path).unwrap();
        f.write_all(&full[..full.len() - 5]).unwrap();
        drop(f);
        match load_embeddings(&path) {
            Err(Error::Truncated { expected, actual, .. }) => {
                assert_eq!(expected, full.len() as u64);
                assert_eq!(actual, (full.len() - 5) as u64);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
