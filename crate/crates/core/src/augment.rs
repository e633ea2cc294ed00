//! Query augmentation: combine a question with its retrieved passages into
//! one rendered text under a character budget.
//!
//! Contexts are admitted greedily best-first. A context that would push the
//! rendering over budget is skipped whole (never truncated mid-passage) and
//! admission continues with the next hit, so passages stay semantically
//! intact. Rendering is a pure function of its inputs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::RetrievalHit;
use crate::model::{CorpusPassage, QuestionItem};

/// Separator between rendered contexts.
const CONTEXT_SEPARATOR: &str = "\n\n";

/// Built-in template: contexts, then the prompt, then enumerated options.
pub const DEFAULT_TEMPLATE: &str = "{contexts}\n\n{prompt}\n\n{options}";

/// One admitted context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub id: String,
    pub text: String,
}

/// A question enriched with retrieved passages, plus the rendered text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedQuery {
    pub question_id: String,
    pub prompt: String,
    /// Admitted contexts in hit order (descending retrieval score).
    pub contexts: Vec<Context>,
    pub rendered: String,
    /// Maximum rendered length, in characters.
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Contexts,
    Prompt,
    Options,
}

/// A parsed template over the placeholders `{contexts}`, `{prompt}` and
/// `{options}`. Placeholders are recognized in the template text only;
/// braces inside substituted values stay literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTemplate {
    segments: Vec<Segment>,
}

impl QueryTemplate {
    /// Parse a template. `{prompt}` and `{contexts}` must each appear
    /// exactly once; `{options}` is optional.
    pub fn parse(text: &str) -> Result<QueryTemplate> {
        const PLACEHOLDERS: [(&str, Segment); 3] = [
            ("{contexts}", Segment::Contexts),
            ("{prompt}", Segment::Prompt),
            ("{options}", Segment::Options),
        ];
        let mut segments = Vec::new();
        let mut rest = text;
        'outer: while !rest.is_empty() {
            let mut first: Option<(usize, &Segment, usize)> = None;
            for (token, seg) in &PLACEHOLDERS {
                if let Some(pos) = rest.find(token) {
                    if first.map_or(true, |(p, _, _)| pos < p) {
                        first = Some((pos, seg, token.len()));
                    }
                }
            }
            match first {
                None => {
                    segments.push(Segment::Literal(rest.to_string()));
                    break 'outer;
                }
                Some((pos, seg, token_len)) => {
                    if pos > 0 {
                        segments.push(Segment::Literal(rest[..pos].to_string()));
                    }
                    segments.push(seg.clone());
                    rest = &rest[pos + token_len..];
                }
            }
        }
        let count = |needle: &Segment| segments.iter().filter(|s| *s == needle).count();
        if count(&Segment::Prompt) != 1 {
            return Err(Error::InvalidArg(
                "template must contain `{prompt}` exactly once".into(),
            ));
        }
        if count(&Segment::Contexts) != 1 {
            return Err(Error::InvalidArg(
                "template must contain `{contexts}` exactly once".into(),
            ));
        }
        if count(&Segment::Options) > 1 {
            return Err(Error::InvalidArg(
                "template may contain `{options}` at most once".into(),
            ));
        }
        Ok(QueryTemplate { segments })
    }

    fn render(&self, contexts_block: &str, prompt: &str, options_block: &str) -> String {
        let mut out = String::new();
        for segment in &self.segments {
            match segment {
                Segment::Literal(text) => out.push_str(text),
                Segment::Contexts => out.push_str(contexts_block),
                Segment::Prompt => out.push_str(prompt),
                Segment::Options => out.push_str(options_block),
            }
        }
        out
    }
}

impl Default for QueryTemplate {
    fn default() -> Self {
        QueryTemplate::parse(DEFAULT_TEMPLATE).expect("default template parses")
    }
}

fn options_block(question: &QuestionItem) -> String {
    question
        .options
        .iter()
        .map(|o| format!("{}. {}", o.id, o.text))
        .collect::<Vec<_>>()
        .join("\n")
}

fn contexts_block(contexts: &[Context]) -> String {
    contexts
        .iter()
        .map(|c| c.text.as_str())
        .collect::<Vec<_>>()
        .join(CONTEXT_SEPARATOR)
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Augment `question` with the passages named by `hits`, best-first, under
/// `budget` characters.
///
/// Every hit id must resolve in `corpus`. The budget must cover the
/// rendering with no contexts at all.
pub fn augment_query(
    question: &QuestionItem,
    hits: &[RetrievalHit],
    corpus: &HashMap<String, &CorpusPassage>,
    budget: usize,
    template: &QueryTemplate,
) -> Result<AugmentedQuery> {
    let mut resolved = Vec::with_capacity(hits.len());
    for hit in hits {
        let passage = corpus.get(&hit.passage_id).ok_or_else(|| Error::UnknownId {
            kind: "passage",
            id: hit.passage_id.clone(),
        })?;
        resolved.push(*passage);
    }

    let options = options_block(question);
    let base_len = char_len(&template.render("", &question.prompt, &options));
    if base_len > budget {
        return Err(Error::BudgetTooSmall {
            budget,
            required: base_len,
        });
    }

    let sep_len = char_len(CONTEXT_SEPARATOR);
    let mut contexts: Vec<Context> = Vec::new();
    let mut block_len = 0usize;
    for passage in &resolved {
        let text_len = char_len(&passage.body);
        let added = if contexts.is_empty() {
            text_len
        } else {
            sep_len + text_len
        };
        if base_len + block_len + added <= budget {
            block_len += added;
            contexts.push(Context {
                id: passage.id.clone(),
                text: passage.body.clone(),
            });
        }
    }

    let rendered = template.render(&contexts_block(&contexts), &question.prompt, &options);
    debug_assert!(char_len(&rendered) <= budget);
    debug_assert!(rendered.contains(&question.prompt));

    Ok(AugmentedQuery {
        question_id: question.id.clone(),
        prompt: question.prompt.clone(),
        contexts,
        rendered,
        budget,
    })
}

/// Build the passage lookup used by [`augment_query`].
pub fn corpus_lookup(passages: &[CorpusPassage]) -> HashMap<String, &CorpusPassage> {
    passages.iter().map(|p| (p.id.clone(), p)).collect()
}
