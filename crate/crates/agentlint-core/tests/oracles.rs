//! Oracle-level tests against in-memory projects: locator results,
//! per-oracle examples, and the cross-oracle invariants (severity,
//! locality, collision soundness, run ordering).

use agentlint_core::config::AnalyzerConfig;
use agentlint_core::cpg::build_cpg;
use agentlint_core::findings::{DefectKind, Severity};
use agentlint_core::ingest::snapshot_from_sources;
use agentlint_core::oracles::{detect, run_all, ModelCapabilityRegistry, OracleContext};
use agentlint_core::reasoner::{MarkerConfig, Reasoner};
use agentlint_core::unrt::build_unrt;
use std::collections::BTreeSet;
use std::sync::Arc;

struct Harness {
    snapshot: agentlint_core::ingest::ProjectSnapshot,
    cpg: agentlint_core::cpg::CodePropertyGraph,
    unrt: agentlint_core::unrt::Unrt,
    reasoner: Reasoner,
    registry: ModelCapabilityRegistry,
    config: AnalyzerConfig,
}

impl Harness {
    fn new(sources: &[(&str, &str)]) -> Self {
        let config = AnalyzerConfig::default();
        let snapshot = snapshot_from_sources("/proj", sources);
        let cpg = build_cpg(&snapshot);
        assert!(cpg.validate().is_empty(), "{:?}", cpg.validate());
        let unrt = build_unrt(&cpg);
        let reasoner = Reasoner::new(
            config.backend.clone(),
            Arc::new(MarkerConfig::bundled()),
            config.batch_size,
        );
        Harness {
            snapshot,
            cpg,
            unrt,
            reasoner,
            registry: ModelCapabilityRegistry::bundled(),
            config,
        }
    }

    fn ctx(&self) -> OracleContext<'_> {
        OracleContext::new(
            &self.snapshot,
            &self.cpg,
            &self.unrt,
            &self.reasoner,
            &self.registry,
            &self.config,
        )
    }
}

const FIG2_LLM: &str = "class ChatLLM(BaseModel):\n    def generate(self, prompt: str, stop=None):\n        response = client.chat.completions.create(\n            model=\"file_path/StarCoder\",\n            messages=[{\"role\": \"user\", \"content\": prompt}],\n            temperature=0.6)\n        return response.choices[0].message.content\n";

const FIG8_LLM: &str = "class ChatLLM(BaseModel):\n    api_key: str = \"\"\n    def generate(self, prompt: str, stop=None):\n        client = OpenAI(api_key=self.api_key, base_url=url)\n        response = client.chat.completions.create(\n            model='gpt-4o',\n            messages=[{\"role\": \"user\", \"content\": prompt}])\n        return response.choices[0].message.content\n";

#[test]
fn locate_llm_init_finds_chatllm_and_model_name() {
    let h = Harness::new(&[("llm.py", FIG2_LLM)]);
    let ctx = h.ctx();
    let init = ctx.ensure_llm_init().unwrap().expect("llm init located");
    assert_eq!(init.name, "ChatLLM");
    let models = ctx.ensure_model_names().unwrap();
    assert_eq!(models, vec!["file_path/StarCoder".to_string()]);
}

#[test]
fn locate_llm_init_absent_on_plain_project() {
    let h = Harness::new(&[("util.py", "def helper(x):\n    return x + 1\n")]);
    let ctx = h.ctx();
    assert!(ctx.ensure_llm_init().unwrap().is_none());
    assert!(detect(&ctx, DefectKind::Adal).unwrap().is_empty());
    assert!(detect(&ctx, DefectKind::Lard).unwrap().is_empty());
}

#[test]
fn locate_llm_init_fig8_extracts_gpt4o() {
    let h = Harness::new(&[("llm.py", FIG8_LLM)]);
    let ctx = h.ctx();
    let init = ctx.ensure_llm_init().unwrap().expect("llm init located");
    assert_eq!(init.name, "ChatLLM");
    assert_eq!(
        ctx.ensure_model_names().unwrap(),
        vec!["gpt-4o".to_string()]
    );
    // gpt-4o is a general chat model: no adaptation finding.
    assert!(detect(&ctx, DefectKind::Adal).unwrap().is_empty());
    // but the empty api_key is an API defect.
    let lard = detect(&ctx, DefectKind::Lard).unwrap();
    assert_eq!(lard.len(), 1);
    assert!(lard[0].rationale.contains("api_key is empty"));
}

#[test]
fn adal_starcoder_flagged_unknown_silent() {
    let h = Harness::new(&[("llm.py", FIG2_LLM)]);
    let ctx = h.ctx();
    let findings = detect(&ctx, DefectKind::Adal).unwrap();
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0].severity, Severity::Defect);
    assert!(findings[0].rationale.contains("StarCoder"));

    // An unregistered model name stays silent without --strict.
    let quiet = FIG2_LLM.replace("file_path/StarCoder", "my-private-model-v2");
    let h = Harness::new(&[("llm.py", &quiet)]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Adal).unwrap().is_empty());
}

#[test]
fn adal_strict_flips_unknown_to_warning() {
    let quiet = FIG2_LLM.replace("file_path/StarCoder", "my-private-model-v2");
    let mut h = Harness::new(&[("llm.py", &quiet)]);
    h.config.strict = true;
    let ctx = h.ctx();
    let findings = detect(&ctx, DefectKind::Adal).unwrap();
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0].severity, Severity::Warning);
}

#[test]
fn ieti_consistent_tool_produces_no_finding() {
    let h = Harness::new(&[(
        "calc.py",
        "class CalculatorTool(BaseTool):\n    name: str = \"calculator\"\n    description: str = \"Evaluate an arithmetic expression and return the result.\"\n    def run(self, expression: str) -> str:\n        return str(eval(expression))\n",
    )]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Ieti).unwrap().is_empty());
}

#[test]
fn ieti_decorated_function_tool_is_an_instance() {
    let h = Harness::new(&[("tools.py", "@tool\ndef cryptic(x):\n    return x\n")]);
    let ctx = h.ctx();
    let instances = ctx.ensure_tool_instances().unwrap();
    assert_eq!(instances.len(), 1);
    assert!(!instances[0].is_class);
    // No docstring at all: registration information is insufficient.
    let findings = detect(&ctx, DefectKind::Ieti).unwrap();
    assert_eq!(findings.len(), 1);
}

#[test]
fn tool_instances_cover_subclasses_of_project_base() {
    let h = Harness::new(&[(
        "tools.py",
        "class BaseTool:\n    name: str = \"base\"\n    description: str = \"Base interface for registered tools.\"\n    def run(self, text: str) -> str:\n        return text\n\nclass EchoTool(BaseTool):\n    name: str = \"echo\"\n    description: str = \"Echo the given text back.\"\n    def run(self, text: str) -> str:\n        return text\n",
    )]);
    let ctx = h.ctx();
    let instances = ctx.ensure_tool_instances().unwrap();
    let names: Vec<&str> = instances.iter().map(|t| t.qualname.as_str()).collect();
    assert_eq!(names, vec!["BaseTool", "EchoTool"]);
}

#[test]
fn tre_reuses_ieti_tool_instances() {
    let h = Harness::new(&[(
        "tool.py",
        "class BrokenTool(BaseTool):\n    name: str = \"broken\"\n    description: str = \"A broken tool that computes nothing.\"\n    def run(self, text: str):\n        compute(text)\n\ndef compute(text):\n    return text\n",
    )]);
    let ctx = h.ctx();
    let _ = detect(&ctx, DefectKind::Ieti).unwrap();
    let findings = detect(&ctx, DefectKind::Tre).unwrap();
    assert_eq!(findings.len(), 1);
    assert!(findings[0].rationale.contains("BrokenTool.run"));
}

#[test]
fn als_soundness_collision_in_both_sets() {
    // Tool returns the literal that is also a stop word.
    let h = Harness::new(&[(
        "agent.py",
        "STOP = \"Observation:\"\n\nclass EchoAgent:\n    def think(self, q):\n        try:\n            out = self.llm.generate(q, stop=[STOP])\n        except ValueError:\n            out = \"\"\n        return out\n",
    ), (
        "llm.py",
        "class ChatModel:\n    model_name: str = 'gpt-4o'\n    def generate(self, prompt, stop=None):\n        r = client.chat.completions.create(model=self.model_name, messages=[], stop=stop)\n        return r.text\n",
    ), (
        "tool.py",
        "class ReportTool:\n    name: str = \"reporter\"\n    description: str = \"Produce the observation report header.\"\n    def run(self, text: str) -> str:\n        return \"Observation:\"\n",
    )]);
    let ctx = h.ctx();
    let findings = detect(&ctx, DefectKind::Als).unwrap();
    assert_eq!(findings.len(), 1, "{findings:?}");
    // Soundness: the reported word is in the trigger set and among the
    // tool's resolvable outputs (recomputed here by brute force).
    let trigger = ctx.ensure_trigger_words().unwrap();
    assert!(trigger.words.contains("Observation:"));
    assert!(findings[0]
        .evidence
        .iter()
        .any(|e| e.contains("Observation:")));
}

#[test]
fn als_no_intersection_no_finding() {
    let h = Harness::new(&[(
        "agent.py",
        "DONE = \"###DONE###\"\n\nclass RunnerAgent:\n    def think(self, q):\n        try:\n            out = self.llm.generate(q, stop=[DONE])\n        except ValueError:\n            out = \"\"\n        return out\n",
    ), (
        "tool.py",
        "class EchoTool:\n    name: str = \"echo\"\n    description: str = \"Echo text straight back.\"\n    def run(self, text: str) -> str:\n        return text\n",
    )]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Als).unwrap().is_empty());
}

#[test]
fn mnft_no_tool_calls_in_agent_is_quiet() {
    let h = Harness::new(&[(
        "agent.py",
        "class IdleAgent:\n    def ponder(self):\n        return 42\n",
    ), (
        "tool.py",
        "class EchoTool:\n    name: str = \"echo\"\n    description: str = \"Echo text straight back.\"\n    def run(self, text: str) -> str:\n        return text\n",
    )]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Mnft).unwrap().is_empty());
}

#[test]
fn mnft_guarded_tool_call_is_quiet() {
    let h = Harness::new(&[(
        "agent.py",
        "class WorkAgent:\n    def act(self, q):\n        try:\n            result = self.tools[\"echo\"].run(q)\n        except KeyError:\n            result = \"\"\n        if not isinstance(result, str):\n            result = str(result)\n        return result\n",
    ), (
        "tool.py",
        "class EchoTool:\n    name: str = \"echo\"\n    description: str = \"Echo text straight back.\"\n    def run(self, text: str) -> str:\n        return text\n",
    )]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Mnft).unwrap().is_empty());
}

#[test]
fn lard_env_credential_and_stop_is_quiet() {
    let h = Harness::new(&[(
        "llm.py",
        "import os\n\nclass ChatModel:\n    model_name: str = 'gpt-4o'\n    def generate(self, prompt, stop=None):\n        client = OpenAI(api_key=os.environ.get(\"KEY\"))\n        r = client.chat.completions.create(model=self.model_name, messages=[], stop=stop)\n        return r.text\n",
    )]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Lard).unwrap().is_empty());
}

#[test]
fn epdd_tool_only_package_is_quiet() {
    let h = Harness::new(&[
        ("agent.py", "import os\n\nclass MiniAgent:\n    def go(self):\n        return 1\n"),
        ("tool.py", "import rare_pkg\n\nclass EchoTool:\n    name: str = \"echo\"\n    description: str = \"Echo text straight back.\"\n    def run(self, text: str) -> str:\n        return rare_pkg.echo(text)\n"),
    ]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Epdd).unwrap().is_empty());
}

#[test]
fn run_all_orders_findings_and_respects_locality() {
    let h = Harness::new(&[
        ("a_agent.py", "from z_llm import ChatBroken\n\nclass OrderAgent:\n    def act(self, q):\n        plan = self.llm.generate(q)\n        outcome = self.tools[\"echo\"].run(plan)\n        return outcome\n"),
        ("z_llm.py", "class ChatBroken:\n    api_key: str = \"\"\n    model: str = 'gpt2-medium'\n    def generate(self, prompt, stop=None):\n        client = OpenAI(api_key=self.api_key)\n        r = client.chat.completions.create(model=self.model, messages=[])\n        return r.text\n"),
        ("tools.py", "class EchoTool:\n    name: str = \"echo\"\n    description: str = \"Echo text straight back.\"\n    def run(self, text: str) -> str:\n        return text\n"),
    ]);
    let ctx = h.ctx();
    let (findings, errors) = run_all(&ctx);
    assert!(errors.is_empty(), "{errors:?}");
    assert!(!findings.is_empty());
    // Sorted by (file, span, defect id).
    let keys: Vec<_> = findings.iter().map(|f| f.sort_key()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // Locality: every finding's file is part of the snapshot.
    let files: BTreeSet<&str> = h.snapshot.files.iter().map(|f| f.path.as_str()).collect();
    for finding in &findings {
        assert!(files.contains(finding.file.as_str()), "{}", finding.file);
        assert!(finding.span.0 >= 1);
        let source = h.snapshot.file(&finding.file).unwrap();
        assert!(finding.span.1 <= source.line_count());
    }
    // Severity: only EPDD findings may be warnings under defaults.
    for finding in &findings {
        match finding.defect_id {
            DefectKind::Epdd => assert_eq!(finding.severity, Severity::Warning),
            _ => assert_eq!(finding.severity, Severity::Defect),
        }
    }
}

#[test]
fn only_filter_still_runs_prerequisite_locators() {
    // EPDD alone must locate the tool instances that IETI would have.
    let mut h = Harness::new(&[
        ("Agent.py", "from pydantic import BaseModel\n\nclass Agent(BaseModel):\n    name: str = \"runner\"\n    def describe(self):\n        return self.name\n"),
        ("Tools/Repl.py", "from pydantic import BaseModel\nfrom agenttools import BaseTool\n\nclass Repl(BaseTool):\n    name: str = \"repl\"\n    description: str = \"Run code in a repl sandbox.\"\n    def _run(self, code: str) -> str:\n        return str(code)\n"),
    ]);
    h.config.enabled = [DefectKind::Epdd].into_iter().collect();
    let ctx = h.ctx();
    let (findings, errors) = run_all(&ctx);
    assert!(errors.is_empty());
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0].defect_id, DefectKind::Epdd);
    assert!(findings[0].rationale.contains("pydantic"));
}

#[test]
fn lope_handle_parsing_error_false_detected_without_agent() {
    let h = Harness::new(&[(
        "main.py",
        "agent = initialize_agent(tools=[], llm=None, handle_parsing_error=False)\n",
    )]);
    let ctx = h.ctx();
    let findings = detect(&ctx, DefectKind::Lope).unwrap();
    assert_eq!(findings.len(), 1);
    assert!(findings[0].rationale.contains("handle_parsing_error"));
}

#[test]
fn lope_guarded_generate_is_quiet() {
    let h = Harness::new(&[
        ("agent.py", "class SafeAgent:\n    def go(self, q):\n        try:\n            out = self.llm.generate(q)\n        except ValueError:\n            out = \"\"\n        if not isinstance(out, str):\n            out = str(out)\n        return out\n"),
        ("llm.py", "class ChatModel:\n    model_name: str = 'gpt-4o'\n    def generate(self, prompt, stop=None):\n        r = client.chat.completions.create(model=self.model_name, messages=[], stop=stop)\n        return r.text\n"),
    ]);
    let ctx = h.ctx();
    assert!(detect(&ctx, DefectKind::Lope).unwrap().is_empty());
}

#[test]
fn lope_unguarded_generate_flagged() {
    let h = Harness::new(&[
        ("agent.py", "class RawAgent:\n    def go(self, q):\n        out = self.llm.generate(q)\n        return out\n"),
        ("llm.py", "class ChatModel:\n    model_name: str = 'gpt-4o'\n    def generate(self, prompt, stop=None):\n        r = client.chat.completions.create(model=self.model_name, messages=[], stop=stop)\n        return r.text\n"),
    ]);
    let ctx = h.ctx();
    let findings = detect(&ctx, DefectKind::Lope).unwrap();
    assert_eq!(findings.len(), 1);
    assert!(findings[0].rationale.contains("input and output"));
}

#[test]
fn reasoner_rejects_empty_batch() {
    use agentlint_core::reasoner::{ReasonerQuestion, TemplateId};
    let h = Harness::new(&[("a.py", "x = 1\n")]);
    let question = ReasonerQuestion {
        template_id: TemplateId::IsToolInit,
        items: Vec::new(),
    };
    let err = h.reasoner.ask(&question).unwrap_err();
    assert!(err.to_string().contains("empty question batch"));
}

#[test]
fn llm_exec_function_name_extracted_from_init_code() {
    let h = Harness::new(&[("llm.py", FIG2_LLM)]);
    let ctx = h.ctx();
    assert_eq!(
        ctx.ensure_llm_exec_fn().unwrap(),
        Some("generate".to_string())
    );
}

#[test]
fn tool_exec_function_name_extracted_from_tool_init() {
    let h = Harness::new(&[(
        "tools.py",
        "class BaseTool:\n    name: str = \"base\"\n    description: str = \"Base interface for registered tools.\"\n    def helper(self):\n        return 1\n    def use(self, argument: str) -> str:\n        return argument\n",
    )]);
    let ctx = h.ctx();
    assert_eq!(ctx.ensure_tool_exec_fn().unwrap(), Some("use".to_string()));
}
