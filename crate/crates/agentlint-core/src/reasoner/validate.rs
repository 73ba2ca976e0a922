//! Fixed-format answer parsing, applied to every backend response.
//!
//! The contract: one line per batch item, `<index>: <YES|NO|identifier>`,
//! indices 1-based and ascending with no gaps, nothing else mixed into
//! the answer lines. Free text around the block is kept as rationale.

use super::{Answer, AnswerType, TemplateId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatProblem {
    pub detail: String,
}

impl std::fmt::Display for FormatProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.detail)
    }
}

/// Parses `raw` into per-item answers for a batch of `batch_len`.
/// Returns the answers plus the surrounding rationale text.
pub fn validate_response(
    raw: &str,
    template_id: TemplateId,
    batch_len: usize,
) -> Result<(Vec<Answer>, String), FormatProblem> {
    let mut answers: Vec<(usize, String, String)> = Vec::new();
    let mut rationale_lines: Vec<&str> = Vec::new();

    for line in raw.lines() {
        match parse_answer_line(line) {
            Some((index, token)) => answers.push((index, token, line.trim().to_string())),
            None => {
                if !line.trim().is_empty() && !line.trim().eq_ignore_ascii_case("answers:") {
                    rationale_lines.push(line);
                }
            }
        }
    }

    if answers.len() != batch_len {
        return Err(FormatProblem {
            detail: format!(
                "expected {batch_len} answer line(s), found {}",
                answers.len()
            ),
        });
    }
    let mut parsed = Vec::with_capacity(batch_len);
    for (pos, (index, token, line)) in answers.iter().enumerate() {
        if *index != pos + 1 {
            return Err(FormatProblem {
                detail: format!("answer line {line:?}: expected index {}", pos + 1),
            });
        }
        parsed.push(
            parse_token(token, template_id.answer_type()).map_err(|detail| FormatProblem {
                detail: format!("answer line {line:?}: {detail}"),
            })?,
        );
    }
    Ok((parsed, rationale_lines.join("\n")))
}

fn parse_answer_line(line: &str) -> Option<(usize, String)> {
    let trimmed = line.trim();
    let (idx_part, rest) = trimmed.split_once(':')?;
    let index: usize = idx_part.trim().parse().ok()?;
    let token = rest.trim();
    if token.is_empty() || token.contains(char::is_whitespace) {
        return None;
    }
    Some((index, token.to_string()))
}

fn parse_token(token: &str, answer_type: AnswerType) -> Result<Answer, String> {
    match answer_type {
        AnswerType::Boolean => match token {
            "YES" => Ok(Answer::Yes),
            "NO" => Ok(Answer::No),
            other => Err(format!("expected YES or NO, got {other:?}")),
        },
        AnswerType::Identifier => {
            if token == "NO" || token == "NONE" {
                return Ok(Answer::No);
            }
            if token == "YES" {
                return Err("expected an identifier, got YES".to_string());
            }
            if is_identifier(token) {
                Ok(Answer::Ident(token.to_string()))
            } else {
                Err(format!("{token:?} is not a valid identifier"))
            }
        }
    }
}

fn is_identifier(token: &str) -> bool {
    let mut chars = token.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders answers back into the wire format; `validate_response` of the
/// result is the identity on well-formed answer lists.
pub fn render_answers(answers: &[Answer]) -> String {
    answers
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let token = match a {
                Answer::Yes => "YES",
                Answer::No => "NO",
                Answer::Ident(name) => name.as_str(),
            };
            format!("{}: {token}", i + 1)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_line_boolean_batch() {
        let (answers, rationale) =
            validate_response("1: YES\n2: NO", TemplateId::IsToolInit, 2).unwrap();
        assert_eq!(answers, vec![Answer::Yes, Answer::No]);
        assert!(rationale.is_empty());
    }

    #[test]
    fn maybe_is_invalid() {
        let err = validate_response("1: MAYBE", TemplateId::IsToolInit, 1).unwrap_err();
        assert!(err.detail.contains("MAYBE"));
    }

    #[test]
    fn identifier_extraction() {
        let (answers, _) =
            validate_response("1: generate", TemplateId::LlmExecFunctionName, 1).unwrap();
        assert_eq!(answers, vec![Answer::Ident("generate".to_string())]);
    }

    #[test]
    fn missing_and_extra_lines_rejected() {
        assert!(validate_response("1: YES", TemplateId::IsToolInit, 2).is_err());
        assert!(validate_response("1: YES\n2: NO\n3: YES", TemplateId::IsToolInit, 2).is_err());
    }

    #[test]
    fn out_of_range_index_rejected() {
        assert!(validate_response("1: YES\n7: NO", TemplateId::IsToolInit, 2).is_err());
    }

    #[test]
    fn rationale_kept_around_answer_block() {
        let raw =
            "Considering the base classes first.\nThe snippet inherits BaseTool.\nANSWERS:\n1: YES";
        let (answers, rationale) = validate_response(raw, TemplateId::IsToolInit, 1).unwrap();
        assert_eq!(answers, vec![Answer::Yes]);
        assert!(rationale.contains("inherits BaseTool"));
        assert!(!rationale.to_lowercase().contains("answers:"));
    }

    #[test]
    fn render_validate_round_trip() {
        let answers = vec![Answer::Yes, Answer::No, Answer::Yes];
        let rendered = render_answers(&answers);
        let (parsed, _) = validate_response(&rendered, TemplateId::IsLlmInit, 3).unwrap();
        assert_eq!(parsed, answers);

        let idents = vec![Answer::Ident("generate".to_string()), Answer::No];
        let rendered = render_answers(&idents);
        let (parsed, _) = validate_response(&rendered, TemplateId::LlmExecFunctionName, 2).unwrap();
        assert_eq!(parsed, idents);
    }

    #[test]
    fn non_identifier_token_rejected_for_identifier_template() {
        assert!(validate_response("1: 123abc", TemplateId::LlmExecFunctionName, 1).is_err());
        assert!(validate_response("1: YES", TemplateId::LlmExecFunctionName, 1).is_err());
    }
}
