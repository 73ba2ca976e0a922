//! Prompt rendering for the remote backend. Every template shares the
//! same shape: a role line, a chain-of-thought instruction, the numbered
//! items with snippets and facts, and a strict answer-format contract.

use super::{AnswerType, ReasonerQuestion, TemplateId};

pub const SYSTEM_PROMPT: &str = "You are a static-analysis assistant reviewing code from an \
LLM-agent project. Reason carefully about each numbered item, step by step, before answering. \
Your final lines must follow the required answer format exactly; any deviation is discarded.";

fn question_text(template: TemplateId) -> &'static str {
    match template {
        TemplateId::IsLlmInit => {
            "Does this class or function initialize a large language model client or wrap \
             model-completion calls (for example a chat-completions client)?"
        }
        TemplateId::IsAgentInit => {
            "Does this class or function initialize an agent: code that orchestrates a language \
             model together with tools or memory to plan and act?"
        }
        TemplateId::IsToolInit => {
            "Does this class or function define an agent tool: an external capability registered \
             with a name, a description, and implementation code?"
        }
        TemplateId::ToolInfoConsistent => {
            "Is the tool's registration information complete and consistent? Check that the name \
             and description are non-empty, agree with each other, and match what the \
             implementation code actually does."
        }
        TemplateId::HasFaultToleranceIn => {
            "Looking at the call and its surrounding context, do the inputs flowing into the call \
             have fault tolerance (try/except, assertions, or type checks)?"
        }
        TemplateId::HasFaultToleranceOut => {
            "Looking at the call and its surrounding context, does the result of the call have \
             fault tolerance (try/except, assertions, or type checks) before it is used?"
        }
        TemplateId::ToolCodeDefect => {
            "Does this tool implementation contain a defect that would prevent it from returning \
             a correct result to the agent (missing return values, unreachable code, wrong \
             behavior)?"
        }
        TemplateId::LlmExecFunctionName => {
            "Name the function that is executed to invoke the language model in this code, such \
             as generate or create. Answer with the bare function name."
        }
        TemplateId::ToolExecFunctionName => {
            "Name the function that is executed to invoke this tool from agent code, such as run \
             or invoke. Answer with the bare function name."
        }
        TemplateId::LlmCallCorrect => {
            "Is the model invocation correct? Check that required values such as api_key are \
             properly initialized and that essential parameters such as stop are not missing."
        }
    }
}

fn format_contract(template: TemplateId, batch_len: usize) -> String {
    match template.answer_type() {
        AnswerType::Boolean => format!(
            "After your reasoning, output exactly {batch_len} final line(s), one per item, in \
             the form `<index>: YES` or `<index>: NO` with indices 1 through {batch_len} in \
             order. No other text on those lines."
        ),
        AnswerType::Identifier => format!(
            "After your reasoning, output exactly {batch_len} final line(s), one per item, in \
             the form `<index>: <function_name>` (a bare identifier) or `<index>: NO` if there \
             is none, with indices 1 through {batch_len} in order. No other text on those lines."
        ),
    }
}

/// Renders the user prompt for a question batch.
pub fn render_question(question: &ReasonerQuestion) -> String {
    let mut out = String::new();
    out.push_str(question_text(question.template_id));
    out.push_str("\n\n");
    for (i, item) in question.items.iter().enumerate() {
        out.push_str(&format!("### Item {} — {}\n", i + 1, item.subject));
        if !item.facts.is_empty() {
            out.push_str("Facts:\n");
            for (key, values) in &item.facts {
                out.push_str(&format!("  {key}: {}\n", values.join(", ")));
            }
        }
        out.push_str("```python\n");
        out.push_str(&item.snippet);
        if !item.snippet.ends_with('\n') {
            out.push('\n');
        }
        out.push_str("```\n\n");
    }
    out.push_str(&format_contract(question.template_id, question.items.len()));
    out
}
