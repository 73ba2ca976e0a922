//! Deterministic offline rules, one per template. Pure functions of the
//! question payload and the marker data: identical questions produce
//! identical verdicts on every platform.

use super::markers::MarkerConfig;
use super::validate::render_answers;
use super::{facts, Answer, ReasonerError, ReasonerQuestion, ReasonerVerdict, TemplateId};

pub fn heuristic_answer(
    question: &ReasonerQuestion,
    markers: &MarkerConfig,
) -> Result<ReasonerVerdict, ReasonerError> {
    let answers: Vec<Answer> = question
        .items
        .iter()
        .map(|item| answer_item(question.template_id, item, markers))
        .collect::<Result<_, _>>()?;
    let raw = render_answers(&answers);
    Ok(ReasonerVerdict {
        template_id: question.template_id,
        answers,
        rationale: String::new(),
        raw,
        backend_tag: "heuristic".to_string(),
    })
}

fn answer_item(
    template: TemplateId,
    item: &super::QuestionItem,
    markers: &MarkerConfig,
) -> Result<Answer, ReasonerError> {
    let answer = match template {
        TemplateId::IsLlmInit => {
            let by_call = item
                .fact(facts::CALL)
                .iter()
                .any(|path| markers.is_llm_call_path(path))
                || markers
                    .llm_call_markers
                    .iter()
                    .any(|m| item.snippet.contains(m.as_str()));
            let by_name = markers.llm_name_matches(simple_name(&item.subject));
            bool_answer(by_call || by_name)
        }
        TemplateId::IsAgentInit => {
            let by_name = markers.agent_name_matches(simple_name(&item.subject));
            let by_structure = item.fact_is_true(facts::CALLS_LLM)
                && !item.fact(facts::TOOL_COLLECTION).is_empty();
            bool_answer(by_name || by_structure)
        }
        TemplateId::IsToolInit => {
            let by_base = item
                .fact(facts::BASE)
                .iter()
                .any(|base| markers.is_tool_base(base));
            let by_decorator = item
                .fact(facts::DECORATOR)
                .iter()
                .any(|d| markers.is_tool_decorator(d));
            // In-project tool base classes inherit nothing marker-like;
            // a tool-ish name plus a conventional entry point counts.
            let by_shape = markers.is_tool_base(simple_name(&item.subject))
                && item
                    .fact(facts::METHOD)
                    .iter()
                    .any(|m| markers.tool_exec_names.iter().any(|e| e == m));
            bool_answer(by_base || by_decorator || by_shape)
        }
        TemplateId::ToolInfoConsistent => {
            let name_ok = item
                .fact(facts::TOOL_NAME)
                .iter()
                .any(|v| !v.trim().is_empty());
            let description = item.fact(facts::TOOL_DESCRIPTION).join(" ");
            let desc_ok = !description.trim().is_empty();
            let overlap = if desc_ok {
                let desc_tokens = markers.content_tokens(&description);
                let impl_tokens = item.fact(facts::IMPL_TOKEN);
                desc_tokens
                    .iter()
                    .any(|t| impl_tokens.iter().any(|i| i == t))
            } else {
                false
            };
            bool_answer(name_ok && desc_ok && overlap)
        }
        TemplateId::HasFaultToleranceIn => {
            bool_answer(item.fact_is_true(facts::IN_TRY) || !item.fact(facts::GUARD_IN).is_empty())
        }
        TemplateId::HasFaultToleranceOut => {
            bool_answer(item.fact_is_true(facts::IN_TRY) || !item.fact(facts::GUARD_OUT).is_empty())
        }
        // Structural checks only offline; never affirm a free-form code
        // defect without a model.
        TemplateId::ToolCodeDefect => Answer::No,
        TemplateId::LlmCallCorrect => {
            let creds_ok = item.fact(facts::CRED_EMPTY).is_empty();
            let stop_ok =
                item.fact_is_true(facts::STOP_PRESENT) || item.fact(facts::TRIGGER_WORD).is_empty();
            bool_answer(creds_ok && stop_ok)
        }
        TemplateId::LlmExecFunctionName => {
            let methods = item.fact(facts::METHOD);
            let marked = item.fact(facts::LLM_CALL_METHOD);
            if let Some(name) = marked.first() {
                Answer::Ident(name.clone())
            } else if let Some(name) = methods
                .iter()
                .find(|m| markers.llm_exec_names.iter().any(|e| e == *m))
            {
                Answer::Ident(name.clone())
            } else {
                Answer::No
            }
        }
        TemplateId::ToolExecFunctionName => {
            let methods = item.fact(facts::METHOD);
            if let Some(name) = methods
                .iter()
                .find(|m| markers.tool_exec_names.iter().any(|e| e == *m))
            {
                Answer::Ident(name.clone())
            } else {
                Answer::No
            }
        }
    };
    Ok(answer)
}

fn bool_answer(value: bool) -> Answer {
    if value {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn simple_name(subject: &str) -> &str {
    subject.rsplit('.').next().unwrap_or(subject)
}
