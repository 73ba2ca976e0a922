//! Pipeline benchmarks over a synthetic mid-size agent project:
//! parsing plus graph construction, tree construction, layered search,
//! and the full analysis.

use agentlint_core::config::AnalyzerConfig;
use agentlint_core::cpg::build_cpg;
use agentlint_core::ingest::snapshot_from_sources;
use agentlint_core::pipeline::analyze_snapshot;
use agentlint_core::unrt::{build_unrt, layered_search};
use criterion::{criterion_group, criterion_main, Criterion};
use std::convert::Infallible;
use std::hint::black_box;

/// A project with `n` tool classes and an agent that dispatches to all
/// of them, exercising inheritance, containment, calls, and literals.
fn synthetic_sources(n: usize) -> Vec<(String, String)> {
    let mut tools = String::new();
    tools.push_str(
        "class BaseTool:\n    name: str = \"base\"\n    description: str = \"Base interface for registered tools.\"\n\n    def use(self, argument: str) -> str:\n        return argument\n",
    );
    for i in 0..n {
        tools.push_str(&format!(
            "\n\nclass Tool{i}(BaseTool):\n    name: str = \"tool_{i}\"\n    description: str = \"Perform task number {i} and report the outcome.\"\n\n    def use(self, argument: str) -> str:\n        outcome = helper_{i}(argument)\n        return str(outcome)\n\n\ndef helper_{i}(argument):\n    return argument\n"
        ));
    }
    let agent = "from llm import ChatModel\nfrom tools import BaseTool\n\nSTOP = \"Observation:\"\n\n\nclass FleetAgent:\n    def __init__(self):\n        self.llm = ChatModel()\n        self.tools = {}\n\n    def act(self, question: str) -> str:\n        try:\n            plan = self.llm.generate(question, stop=[STOP])\n        except ValueError:\n            plan = \"\"\n        if not isinstance(plan, str):\n            plan = str(plan)\n        try:\n            result = self.tools[plan].use(plan)\n        except KeyError:\n            result = \"\"\n        return result\n".to_string();
    let llm = "import os\nfrom openai import OpenAI\n\n\nclass ChatModel:\n    model_name: str = \"gpt-4o\"\n\n    def generate(self, prompt: str, stop=None):\n        client = OpenAI(api_key=os.environ.get(\"OPENAI_API_KEY\"))\n        response = client.chat.completions.create(\n            model=self.model_name,\n            messages=[{\"role\": \"user\", \"content\": prompt}],\n            stop=stop,\n        )\n        return response.choices[0].message.content\n".to_string();
    vec![
        ("agent.py".to_string(), agent),
        ("llm.py".to_string(), llm),
        ("tools.py".to_string(), tools),
    ]
}

fn bench_pipeline(c: &mut Criterion) {
    let sources = synthetic_sources(40);
    let refs: Vec<(&str, &str)> = sources
        .iter()
        .map(|(p, t)| (p.as_str(), t.as_str()))
        .collect();

    c.bench_function("parse_and_build_cpg", |b| {
        b.iter(|| {
            let snapshot = snapshot_from_sources("/bench", black_box(&refs));
            black_box(build_cpg(&snapshot))
        })
    });

    let snapshot = snapshot_from_sources("/bench", &refs);
    let cpg = build_cpg(&snapshot);
    c.bench_function("build_unrt", |b| b.iter(|| black_box(build_unrt(&cpg))));

    let unrt = build_unrt(&cpg);
    c.bench_function("layered_search_miss", |b| {
        b.iter(|| {
            layered_search(&unrt, 10, |batch| {
                black_box(batch.len());
                Ok::<Option<usize>, Infallible>(None)
            })
        })
    });

    c.bench_function("full_analysis_heuristic", |b| {
        b.iter(|| {
            let snapshot = snapshot_from_sources("/bench", &refs);
            black_box(analyze_snapshot(snapshot, &AnalyzerConfig::default()).unwrap())
        })
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
