//! Acceptance suite. Each criterion prints one PASS/FAIL line; the
//! expected values come from independent brute-force oracles computed
//! here, never from the implementation under test.

use agentlint_core::config::AnalyzerConfig;
use agentlint_core::cpg::{
    export_graph, import_graph, CodePropertyGraph, EdgeKind, GraphEdge, GraphNode, NodeId, NodeKind,
};
use agentlint_core::findings::{DefectKind, Severity};
use agentlint_core::ingest::snapshot_from_sources;
use agentlint_core::oracles::{detect, ModelCapabilityRegistry, OracleContext};
use agentlint_core::pipeline::{analyze_snapshot, run_analysis};
use agentlint_core::reasoner::{MarkerConfig, Reasoner};
use agentlint_core::report::{build_report, parse_json, render_json, ConfigEcho, ReportMeta};
use agentlint_core::unrt::{build_unrt, layered_search, LeafRole, Part, UnifiedNode};
use std::collections::{BTreeMap, BTreeSet};
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::Arc;

// ----------------------------------------------------------------------
// harness
// ----------------------------------------------------------------------

fn criterion(name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {name}: PASS"),
        Err(message) => {
            println!("ACCEPTANCE {name}: FAIL ({message})");
            panic!("acceptance criterion {name} failed: {message}");
        }
    }
}

fn fixture_root(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

const DEFECT_FIXTURES: &[(&str, &[DefectKind])] = &[
    ("adal", &[DefectKind::Adal]),
    ("ieti", &[DefectKind::Ieti]),
    ("lope", &[DefectKind::Lope]),
    ("tre", &[DefectKind::Tre]),
    ("als_mnft", &[DefectKind::Als, DefectKind::Mnft]),
    ("mnft", &[DefectKind::Mnft]),
    ("lard", &[DefectKind::Lard]),
    ("epdd", &[DefectKind::Epdd]),
];

struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(if seed == 0 {
            0x9E37_79B9_7F4A_7C15
        } else {
            seed
        })
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound.max(1)
    }
}

// ----------------------------------------------------------------------
// synthetic graph generator (shared by criteria 2, 3, 4)
// ----------------------------------------------------------------------

/// Raw relations of a generated project; the enumerator works from these
/// lists, not from any implementation structure.
struct SyntheticProject {
    cpg: CodePropertyGraph,
    class_ids: Vec<NodeId>,
    fn_ids: Vec<NodeId>,
    /// (class idx, base class idx)
    inherits: Vec<(usize, usize)>,
    /// (container: Ok(class idx) | Err(fn idx), fn idx)
    contains: Vec<(Result<usize, usize>, usize)>,
    /// (src fn idx, dst fn idx), in emission order, duplicates allowed
    calls: Vec<(usize, usize)>,
}

fn generate_project(rng: &mut Rng) -> SyntheticProject {
    let n_classes = 1 + rng.below(20) as usize;
    let n_fns = 1 + rng.below(50) as usize;

    let mut nodes = Vec::new();
    let mut class_ids = Vec::new();
    let mut fn_ids = Vec::new();
    for i in 0..n_classes {
        let id = nodes.len() as NodeId;
        nodes.push(GraphNode {
            id,
            kind: NodeKind::Class,
            name: format!("C{i}"),
            file: "gen.py".to_string(),
            span: (id + 1, id + 1),
        });
        class_ids.push(id);
    }
    for i in 0..n_fns {
        let id = nodes.len() as NodeId;
        nodes.push(GraphNode {
            id,
            kind: NodeKind::Function,
            name: format!("f{i}"),
            file: "gen.py".to_string(),
            span: (id + 1, id + 1),
        });
        fn_ids.push(id);
    }

    // Acyclic inheritance: bases always have a smaller index.
    let mut inherits = Vec::new();
    for i in 1..n_classes {
        if rng.below(100) < 55 {
            let base = rng.below(i as u64) as usize;
            inherits.push((i, base));
            if rng.below(100) < 20 {
                let other = rng.below(i as u64) as usize;
                if other != base {
                    inherits.push((i, other));
                }
            }
        }
    }

    // Containment: classes, functions (earlier index), or module level.
    let mut contains = Vec::new();
    for i in 0..n_fns {
        match rng.below(100) {
            0..=59 => {
                let owner = rng.below(n_classes as u64) as usize;
                contains.push((Ok(owner), i));
            }
            60..=79 if i > 0 => {
                let outer = rng.below(i as u64) as usize;
                contains.push((Err(outer), i));
            }
            _ => {}
        }
    }

    // Calls with multiplicity, grouped by caller in document order to
    // mirror call-site emission.
    let mut calls = Vec::new();
    for src in 0..n_fns {
        let count = rng.below(4);
        for _ in 0..count {
            let dst = rng.below(n_fns as u64) as usize;
            calls.push((src, dst));
        }
    }

    let mut edges = Vec::new();
    for &(class, base) in &inherits {
        edges.push(GraphEdge {
            src: class_ids[class],
            dst: class_ids[base],
            kind: EdgeKind::Inherits,
        });
    }
    for &(owner, f) in &contains {
        let src = match owner {
            Ok(class) => class_ids[class],
            Err(outer) => fn_ids[outer],
        };
        edges.push(GraphEdge {
            src,
            dst: fn_ids[f],
            kind: EdgeKind::Contains,
        });
    }
    for &(src, dst) in &calls {
        edges.push(GraphEdge {
            src: fn_ids[src],
            dst: fn_ids[dst],
            kind: EdgeKind::Calls,
        });
    }

    let cpg = CodePropertyGraph {
        nodes,
        edges,
        ..CodePropertyGraph::default()
    };
    assert!(cpg.validate().is_empty(), "generator produced a bad graph");
    SyntheticProject {
        cpg,
        class_ids,
        fn_ids,
        inherits,
        contains,
        calls,
    }
}

/// One expected occurrence, as the brute-force enumerator derives it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Occurrence {
    part: u8, // 0 trunk, 1 branch, 2 leaf
    layer: usize,
    graph_id: NodeId,
    /// Branch: owning class. Leaf: owning branch function.
    parent: Option<NodeId>,
    /// Leaf only: the branch's owning class.
    grandparent: Option<NodeId>,
    role: u8, // 0 none, 1 callee, 2 caller
}

/// Independent relation enumerator: produces the expected occurrence
/// multiset directly from the generated relation lists.
fn enumerate_occurrences(project: &SyntheticProject) -> Vec<Occurrence> {
    let n_classes = project.class_ids.len();

    // Inheritance depth, acyclic by construction.
    let mut bases: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for &(class, base) in &project.inherits {
        bases[class].push(base);
    }
    fn depth(i: usize, bases: &[Vec<usize>], memo: &mut [Option<usize>]) -> usize {
        if let Some(d) = memo[i] {
            return d;
        }
        let d = bases[i]
            .iter()
            .map(|&b| depth(b, bases, memo) + 1)
            .max()
            .unwrap_or(0);
        memo[i] = Some(d);
        d
    }
    let mut memo = vec![None; n_classes];
    let depths: Vec<usize> = (0..n_classes)
        .map(|i| depth(i, &bases, &mut memo))
        .collect();

    let mut out = Vec::new();
    for (i, &id) in project.class_ids.iter().enumerate() {
        out.push(Occurrence {
            part: 0,
            layer: depths[i],
            graph_id: id,
            parent: None,
            grandparent: None,
            role: 0,
        });
    }

    // Branch occurrences: walk containment up to a class.
    let container: BTreeMap<usize, Result<usize, usize>> = project
        .contains
        .iter()
        .map(|&(owner, f)| (f, owner))
        .collect();
    let owner_class_of = |mut f: usize| -> Option<usize> {
        loop {
            match container.get(&f)? {
                Ok(class) => return Some(*class),
                Err(outer) => f = *outer,
            }
        }
    };
    let mut branch_owner: BTreeMap<usize, usize> = BTreeMap::new();
    for &(_, f) in &project.contains {
        if let Some(class) = owner_class_of(f) {
            branch_owner.insert(f, class);
            out.push(Occurrence {
                part: 1,
                layer: depths[class],
                graph_id: project.fn_ids[f],
                parent: Some(project.class_ids[class]),
                grandparent: None,
                role: 0,
            });
        }
    }

    // Leaves per branch: callees per call site (self-calls collapse to
    // one), then callers per call site from other functions.
    for (&f, &class) in &branch_owner {
        let layer = depths[class];
        let mut self_seen = false;
        for &(src, dst) in &project.calls {
            if src != f {
                continue;
            }
            if dst == src {
                if self_seen {
                    continue;
                }
                self_seen = true;
            }
            out.push(Occurrence {
                part: 2,
                layer,
                graph_id: project.fn_ids[dst],
                parent: Some(project.fn_ids[f]),
                grandparent: Some(project.class_ids[class]),
                role: 1,
            });
        }
        for &(src, dst) in &project.calls {
            if dst == f && src != f {
                out.push(Occurrence {
                    part: 2,
                    layer,
                    graph_id: project.fn_ids[src],
                    parent: Some(project.fn_ids[f]),
                    grandparent: Some(project.class_ids[class]),
                    role: 2,
                });
            }
        }
    }
    out
}

fn observed_occurrences(unrt: &agentlint_core::unrt::Unrt) -> Vec<Occurrence> {
    unrt.nodes()
        .iter()
        .map(|n| {
            let parent = unrt.parent_of(n);
            let grandparent = parent.and_then(|p| unrt.parent_of(p));
            Occurrence {
                part: match n.part {
                    Part::Trunk => 0,
                    Part::Branch => 1,
                    Part::Leaf => 2,
                },
                layer: n.layer,
                graph_id: n.graph_id,
                parent: match n.part {
                    Part::Trunk => None,
                    _ => parent.map(|p| p.graph_id),
                },
                grandparent: match n.part {
                    Part::Leaf => grandparent.map(|g| g.graph_id),
                    _ => None,
                },
                role: match n.leaf_role {
                    None => 0,
                    Some(LeafRole::Callee) => 1,
                    Some(LeafRole::Caller) => 2,
                },
            }
        })
        .collect()
}

// ----------------------------------------------------------------------
// 1. Seeded-corpus recall
// ----------------------------------------------------------------------

#[test]
fn acceptance_seeded_corpus_recall() {
    criterion("seeded-corpus-recall", || {
        let started = std::time::Instant::now();
        let mut covered: BTreeSet<DefectKind> = BTreeSet::new();
        for (name, expected) in DEFECT_FIXTURES {
            let outcome = run_analysis(&fixture_root(name), &AnalyzerConfig::default())
                .map_err(|e| format!("fixture {name}: {e}"))?;
            let got: BTreeSet<DefectKind> = outcome
                .report
                .findings
                .iter()
                .map(|f| f.defect_id)
                .collect();
            let want: BTreeSet<DefectKind> = expected.iter().copied().collect();
            if got != want {
                return Err(format!("fixture {name}: expected {want:?}, got {got:?}"));
            }
            covered.extend(got);
        }
        if covered.len() != 8 {
            return Err(format!("only {}/8 defect kinds covered", covered.len()));
        }
        let clean = run_analysis(&fixture_root("clean"), &AnalyzerConfig::default())
            .map_err(|e| format!("clean fixture: {e}"))?;
        if !clean.report.findings.is_empty() {
            return Err(format!(
                "clean fixture produced findings: {:?}",
                clean.report.findings
            ));
        }
        let elapsed = started.elapsed();
        if elapsed.as_secs() >= 10 {
            return Err(format!("corpus took {elapsed:?}, budget is 10 s"));
        }
        Ok(())
    });
}

// ----------------------------------------------------------------------
// 2. UNRT construction equivalence
// ----------------------------------------------------------------------

#[test]
fn acceptance_unrt_construction_equivalence() {
    criterion("unrt-construction-equivalence", || {
        let started = std::time::Instant::now();
        let mut rng = Rng::new(0xA6E1);
        for case in 0..200 {
            let project = generate_project(&mut rng);
            let unrt = build_unrt(&project.cpg);
            let mut expected = enumerate_occurrences(&project);
            let mut observed = observed_occurrences(&unrt);
            expected.sort();
            observed.sort();
            if expected != observed {
                let missing: Vec<_> = expected
                    .iter()
                    .filter(|o| !observed.contains(o))
                    .take(3)
                    .collect();
                let extra: Vec<_> = observed
                    .iter()
                    .filter(|o| !expected.contains(o))
                    .take(3)
                    .collect();
                return Err(format!(
                    "case {case}: multisets differ; missing {missing:?}, extra {extra:?}"
                ));
            }
        }
        let elapsed = started.elapsed();
        if elapsed.as_secs() >= 30 {
            return Err(format!("200 projects took {elapsed:?}, budget is 30 s"));
        }
        Ok(())
    });
}

// ----------------------------------------------------------------------
// 3. Layered-search ordering
// ----------------------------------------------------------------------

#[test]
fn acceptance_layered_search_ordering() {
    criterion("layered-search-ordering", || {
        let mut rng = Rng::new(0x5EED);
        for case in 0..100 {
            let project = generate_project(&mut rng);
            let unrt = build_unrt(&project.cpg);
            let batch_size = 1 + rng.below(10) as usize;

            // Expected global order, derived from the enumerator: parts
            // major, layers ascending, trunk/branch by document order,
            // leaves grouped per branch in (layer, branch id) order with
            // callees (call order) before callers (caller id order).
            let expected_full = expected_search_order(&project);
            let full_names: Vec<String> = {
                let mut log = Vec::new();
                let result = layered_search(&unrt, batch_size, |batch| {
                    log.extend(batch.iter().map(|n| occurrence_key(&unrt, n)));
                    Ok::<Option<usize>, Infallible>(None)
                });
                if result.unwrap().is_some() {
                    return Err(format!("case {case}: false predicate matched"));
                }
                log
            };
            if full_names != expected_full {
                return Err(format!(
                    "case {case}: full evaluation order diverges from the enumerator order\n  expected: {expected_full:?}\n  got: {full_names:?}"
                ));
            }

            // Pick a target: an existing node or a guaranteed miss.
            let target = if unrt.is_empty() || rng.below(5) == 0 {
                "absent-node".to_string()
            } else {
                let pick = rng.below(unrt.len() as u64) as usize;
                unrt.nodes()[pick].name.clone()
            };
            let mut log: Vec<usize> = Vec::new();
            let found = layered_search(&unrt, batch_size, |batch| {
                log.extend(batch.iter().map(|n| n.id));
                Ok::<Option<usize>, Infallible>(batch.iter().position(|n| n.name == target))
            })
            .unwrap();

            match found {
                None => {
                    if unrt.nodes().iter().any(|n| n.name == target) {
                        return Err(format!("case {case}: existing target not found"));
                    }
                    if log.len() != unrt.len() {
                        return Err(format!(
                            "case {case}: miss must evaluate everything exactly once"
                        ));
                    }
                }
                Some(node) => {
                    // First match in evaluation order wins.
                    let first_matching = log
                        .iter()
                        .find(|&&id| unrt.nodes()[id].name == target)
                        .copied();
                    if first_matching != Some(node.id) {
                        return Err(format!("case {case}: returned node is not the first match"));
                    }
                    // Stops at the first match: nothing after the
                    // matching batch is evaluated.
                    let pos = log.iter().position(|&id| id == node.id).unwrap();
                    if log.len() - pos > batch_size {
                        return Err(format!(
                            "case {case}: {} evaluations after the match, batch is {batch_size}",
                            log.len() - pos - 1
                        ));
                    }
                    // The log is a prefix of the exhaustive order.
                    let full_ids: Vec<usize> = (0..unrt.len()).collect();
                    if log != full_ids[..log.len()] {
                        return Err(format!("case {case}: log is not a prefix"));
                    }
                }
            }
        }
        Ok(())
    });
}

fn occurrence_key(unrt: &agentlint_core::unrt::Unrt, n: &UnifiedNode) -> String {
    // Trunk parent attachment is a rendering detail, not part of the
    // occurrence identity; branches attach to classes, leaves to branch
    // functions.
    let parent = match n.part {
        Part::Trunk => None,
        _ => unrt.parent_of(n).map(|p| p.graph_id),
    };
    format!(
        "{:?}/L{}/{}/{:?}/{:?}",
        n.part, n.layer, n.graph_id, parent, n.leaf_role
    )
}

/// Expected evaluation order per the construction rules, computed from
/// the generator's relation lists alone.
fn expected_search_order(project: &SyntheticProject) -> Vec<String> {
    let occurrences = enumerate_occurrences(project);
    let max_layer = occurrences.iter().map(|o| o.layer).max().unwrap_or(0);
    let mut out = Vec::new();

    let key = |o: &Occurrence| {
        let part = match o.part {
            0 => Part::Trunk,
            1 => Part::Branch,
            _ => Part::Leaf,
        };
        let role = match o.role {
            1 => Some(LeafRole::Callee),
            2 => Some(LeafRole::Caller),
            _ => None,
        };
        format!(
            "{:?}/L{}/{}/{:?}/{:?}",
            part, o.layer, o.graph_id, o.parent, role
        )
    };

    for layer in 0..=max_layer {
        let mut trunk: Vec<&Occurrence> = occurrences
            .iter()
            .filter(|o| o.part == 0 && o.layer == layer)
            .collect();
        trunk.sort_by_key(|o| o.graph_id);
        out.extend(trunk.iter().map(|o| key(o)));
    }
    for layer in 0..=max_layer {
        let mut branches: Vec<&Occurrence> = occurrences
            .iter()
            .filter(|o| o.part == 1 && o.layer == layer)
            .collect();
        branches.sort_by_key(|o| o.graph_id);
        out.extend(branches.iter().map(|o| key(o)));
    }
    for layer in 0..=max_layer {
        // Leaves grouped per branch function in document order; within a
        // branch the enumerator already produced callees (in call-site
        // order) before callers (in caller order).
        let mut branch_fns: Vec<NodeId> = occurrences
            .iter()
            .filter(|o| o.part == 1 && o.layer == layer)
            .map(|o| o.graph_id)
            .collect();
        branch_fns.sort_unstable();
        for branch in branch_fns {
            let mut callees: Vec<&Occurrence> = Vec::new();
            let mut callers: Vec<&Occurrence> = Vec::new();
            for o in occurrences
                .iter()
                .filter(|o| o.part == 2 && o.layer == layer && o.parent == Some(branch))
            {
                if o.role == 1 {
                    callees.push(o);
                } else {
                    callers.push(o);
                }
            }
            // Callee order follows the call list; the enumerator emitted
            // them in that order already. Caller order is by caller id.
            callers.sort_by_key(|o| o.graph_id);
            out.extend(callees.iter().map(|o| key(o)));
            out.extend(callers.iter().map(|o| key(o)));
        }
    }
    out
}

// ----------------------------------------------------------------------
// 4. Graph and report round-trips
// ----------------------------------------------------------------------

#[test]
fn acceptance_graph_round_trip() {
    criterion("graph-round-trip", || {
        let mut rng = Rng::new(0x0DD5);
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for case in 0..100 {
            let mut project = generate_project(&mut rng);
            // Mix in the remaining node and edge kinds.
            let import_a = project.cpg.nodes.len() as NodeId;
            for (offset, (kind, name)) in [
                (NodeKind::Import, "pkg"),
                (NodeKind::Import, "pkg"),
                (NodeKind::Assignment, "x"),
                (NodeKind::Call, "f0()"),
                (NodeKind::Literal, "\"lit\""),
            ]
            .into_iter()
            .enumerate()
            {
                project.cpg.nodes.push(GraphNode {
                    id: import_a + offset as NodeId,
                    kind,
                    name: name.to_string(),
                    file: if offset == 1 {
                        String::new()
                    } else {
                        "gen.py".to_string()
                    },
                    span: if offset == 1 { (0, 0) } else { (90, 90) },
                });
            }
            project.cpg.edges.push(GraphEdge {
                src: import_a,
                dst: import_a + 1,
                kind: EdgeKind::ImportsPackage,
            });
            project.cpg.edges.push(GraphEdge {
                src: import_a + 2,
                dst: import_a + 3,
                kind: EdgeKind::DefUse,
            });
            if !project.cpg.validate().is_empty() {
                return Err(format!("case {case}: generator invariant broken"));
            }

            let case_dir = dir.path().join(format!("case{case}"));
            export_graph(&project.cpg, &case_dir).map_err(|e| e.to_string())?;
            let back = import_graph(&case_dir).map_err(|e| e.to_string())?;
            if back != project.cpg {
                return Err(format!("case {case}: graph round-trip mismatch"));
            }
        }

        // Canonical report round-trip, with non-ASCII content included.
        let mut rng = Rng::new(0xCAFE);
        for case in 0..100 {
            let kinds = DefectKind::ALL;
            let mut findings = Vec::new();
            for _ in 0..rng.below(6) {
                let kind = kinds[rng.below(8) as usize];
                findings.push(agentlint_core::findings::DefectFinding::new(
                    kind,
                    format!("file{}.py", rng.below(4)),
                    (rng.below(90) as u32 + 1, rng.below(200) as u32 + 1),
                    vec![
                        format!("evidence-{}", rng.below(1000)),
                        "非ascii — évidence".to_string(),
                    ],
                    format!("rationale {}", rng.below(1000)),
                ));
            }
            let report = build_report(
                findings,
                ReportMeta {
                    project_root: "/proj".to_string(),
                    config_echo: ConfigEcho {
                        backend: "heuristic".to_string(),
                        model: None,
                        batch_size: 10,
                        enabled_oracles: vec!["ALS".to_string()],
                        strict: false,
                    },
                    parse_failures: Vec::new(),
                    tree_warnings: Vec::new(),
                    locator_summary: Default::default(),
                    oracle_errors: Vec::new(),
                },
            );
            let bytes = render_json(&report);
            let parsed = parse_json(&bytes).map_err(|e| format!("case {case}: {e}"))?;
            if parsed != report {
                return Err(format!("case {case}: report round-trip mismatch"));
            }
        }
        Ok(())
    });
}

// ----------------------------------------------------------------------
// 5. EPDD oracle equivalence
// ----------------------------------------------------------------------

#[test]
fn acceptance_epdd_equivalence() {
    criterion("epdd-equivalence", || {
        let mut rng = Rng::new(0xEBDD);
        for case in 0..100 {
            let n_files = 2 + rng.below(6) as usize;
            let n_packages = 1 + rng.below(6) as usize;
            let mut matrix: Vec<Vec<bool>> = Vec::new();
            for _ in 0..n_files {
                matrix.push((0..n_packages).map(|_| rng.below(100) < 40).collect());
            }
            let n_tools = 1 + rng.below(n_files as u64).min(3) as usize;

            // Tool files are decorated functions so every tool is an
            // instance regardless of class-tree position.
            let mut sources: Vec<(String, String)> = Vec::new();
            for (file, row) in matrix.iter().enumerate() {
                let mut text = String::new();
                for (pkg, imported) in row.iter().enumerate() {
                    if *imported {
                        text.push_str(&format!("import extpkg{pkg}\n"));
                    }
                }
                if file < n_tools {
                    text.push_str(&format!(
                        "\n@tool\ndef gadget_{file}(text):\n    \"\"\"Transforms text for gadget {file}.\"\"\"\n    return text\n"
                    ));
                } else {
                    text.push_str(&format!("\ndef helper_{file}():\n    return {file}\n"));
                }
                sources.push((format!("mod{file}.py"), text));
            }
            let source_refs: Vec<(&str, &str)> = sources
                .iter()
                .map(|(p, t)| (p.as_str(), t.as_str()))
                .collect();
            let snapshot = snapshot_from_sources("/gen", &source_refs);
            let cpg = agentlint_core::cpg::build_cpg(&snapshot);
            let unrt = build_unrt(&cpg);
            let config = AnalyzerConfig::default();
            let markers = Arc::new(MarkerConfig::bundled());
            let reasoner = Reasoner::new(config.backend.clone(), markers, config.batch_size);
            let registry = ModelCapabilityRegistry::bundled();
            let ctx = OracleContext::new(&snapshot, &cpg, &unrt, &reasoner, &registry, &config);
            let findings =
                detect(&ctx, DefectKind::Epdd).map_err(|e| format!("case {case}: {e}"))?;
            let got: BTreeSet<(String, String)> = findings
                .iter()
                .map(|f| {
                    let pkg = f
                        .rationale
                        .split("package ")
                        .nth(1)
                        .unwrap_or("")
                        .split(';')
                        .next()
                        .unwrap_or("")
                        .trim()
                        .to_string();
                    (f.file.clone(), pkg)
                })
                .collect();

            // Brute force directly over the matrix.
            let mut want: BTreeSet<(String, String)> = BTreeSet::new();
            for tool_file in 0..n_tools {
                for (pkg, imported) in matrix[tool_file].iter().enumerate() {
                    if !imported {
                        continue;
                    }
                    let elsewhere =
                        (0..n_files).any(|other| other != tool_file && matrix[other][pkg]);
                    if elsewhere {
                        want.insert((format!("mod{tool_file}.py"), format!("extpkg{pkg}")));
                    }
                }
            }
            if got != want {
                return Err(format!(
                    "case {case}: EPDD mismatch\n  expected {want:?}\n  got {got:?}"
                ));
            }
            // Severity rule: every EPDD finding is a warning.
            if findings.iter().any(|f| f.severity != Severity::Warning) {
                return Err(format!("case {case}: non-warning EPDD finding"));
            }
        }
        Ok(())
    });
}

// ----------------------------------------------------------------------
// 6. Determinism
// ----------------------------------------------------------------------

#[test]
fn acceptance_determinism() {
    criterion("determinism", || {
        for (name, _) in DEFECT_FIXTURES.iter().chain([&("clean", [].as_slice())]) {
            let run = || {
                run_analysis(&fixture_root(name), &AnalyzerConfig::default())
                    .map(|o| render_json(&o.report))
                    .map_err(|e| format!("fixture {name}: {e}"))
            };
            let a = mask_generated_at(&run()?);
            let b = mask_generated_at(&run()?);
            if a != b {
                return Err(format!(
                    "fixture {name}: reports differ beyond generated_at"
                ));
            }
        }
        Ok(())
    });
}

fn mask_generated_at(bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8(bytes.to_vec()).expect("report is UTF-8");
    let masked: Vec<String> = text
        .lines()
        .map(|line| {
            if line.trim_start().starts_with("\"generated_at\"") {
                "  \"generated_at\": \"<masked>\",".to_string()
            } else {
                line.to_string()
            }
        })
        .collect();
    masked.join("\n").into_bytes()
}

// ----------------------------------------------------------------------
// 7. Cache transparency
// ----------------------------------------------------------------------

#[test]
fn acceptance_cache_transparency() {
    criterion("cache-transparency", || {
        let all_fixtures: Vec<&str> = DEFECT_FIXTURES
            .iter()
            .map(|(n, _)| *n)
            .chain(["clean"])
            .collect();
        for name in all_fixtures {
            let config = AnalyzerConfig::default();
            let snapshot = agentlint_core::ingest::discover_project(&fixture_root(name), &config)
                .map_err(|e| format!("fixture {name}: {e}"))?;
            let cpg = agentlint_core::cpg::build_cpg(&snapshot);
            let unrt = build_unrt(&cpg);
            let markers = Arc::new(MarkerConfig::bundled());
            let reasoner = Reasoner::new(config.backend.clone(), markers, config.batch_size);
            let registry = ModelCapabilityRegistry::bundled();

            // One shared context through run_all.
            let shared = OracleContext::new(&snapshot, &cpg, &unrt, &reasoner, &registry, &config);
            let (all_findings, errors) = agentlint_core::oracles::run_all(&shared);
            if !errors.is_empty() {
                return Err(format!("fixture {name}: run_all errors {errors:?}"));
            }

            for kind in DefectKind::ALL {
                let fresh =
                    OracleContext::new(&snapshot, &cpg, &unrt, &reasoner, &registry, &config);
                let standalone =
                    detect(&fresh, kind).map_err(|e| format!("fixture {name}/{kind}: {e}"))?;
                let mut standalone = standalone;
                standalone.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
                let slice: Vec<_> = all_findings
                    .iter()
                    .filter(|f| f.defect_id == kind)
                    .cloned()
                    .collect();
                if standalone != slice {
                    return Err(format!(
                        "fixture {name}, oracle {kind}: standalone run diverges from run_all slice"
                    ));
                }
            }
        }
        Ok(())
    });
}

// ----------------------------------------------------------------------
// Supplementary: determinism also holds for in-memory pipelines
// ----------------------------------------------------------------------

#[test]
fn snapshot_pipeline_matches_directory_pipeline() {
    let outcome_dir = run_analysis(&fixture_root("lard"), &AnalyzerConfig::default()).unwrap();
    let sources: Vec<(String, String)> = outcome_dir
        .snapshot
        .files
        .iter()
        .map(|f| (f.path.clone(), f.text.clone()))
        .collect();
    let refs: Vec<(&str, &str)> = sources
        .iter()
        .map(|(p, t)| (p.as_str(), t.as_str()))
        .collect();
    let mut snapshot = snapshot_from_sources(outcome_dir.snapshot.root.clone(), &refs);
    snapshot.root = outcome_dir.snapshot.root.clone();
    let outcome_mem = analyze_snapshot(snapshot, &AnalyzerConfig::default()).unwrap();
    assert_eq!(
        outcome_dir.report.findings, outcome_mem.report.findings,
        "directory and in-memory pipelines disagree"
    );
}
