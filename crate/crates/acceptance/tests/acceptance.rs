//! One line per acceptance criterion. Exits nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use catnav_core::analytics::{analyze, per_session_stats, JumpHistogram, LevelHistogram, COLUMNS};
use catnav_core::corpus::{category_importance, CategoryGraph, Corpus};
use catnav_core::index::{bm25_score, search_categories, tokenize, Index};
use catnav_core::navigator::{
    category_children, category_entities, entity_speech_list, speech_view, Condition, EventInput, EventKind, Session,
    SessionHeader, SessionLog, System, Task,
};
use catnav_core::simulator::{simulate_session, Policy, PolicyKind, SimulationSpec};
use catnav_core::spn::{category_score, edge_weights, entity_scores, QueryScores};
use catnav_core::synth::{layered_collection, random_instance, InstanceLimits, LayeredConfig};
use catnav_core::Collection;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn instances(n: u64) -> Vec<(Corpus, CategoryGraph)> {
    (0..n).map(|s| random_instance(1000 + s, InstanceLimits::default())).collect()
}

fn all_ids(graph: &CategoryGraph) -> Vec<String> {
    graph.categories().iter().map(|c| c.id.clone()).collect()
}

const RANDOM_QUERIES: [&str; 3] = ["tax Entity1", "war budget Entity4 Entity4", "Entity0 europe"];

fn bm25_oracle() -> Outcome {
    let start = Instant::now();
    let c = Collection::fixture().map_err(|e| e.to_string())?;
    ensure!(c.corpus.len() == 20, "fixture has {} speeches", c.corpus.len());
    let vocab: BTreeSet<String> = c.corpus.speeches().iter().flat_map(|s| oracle::words(&s.text)).collect();
    let mut queries: Vec<String> = vocab.iter().cloned().collect();
    queries.extend(
        ["income tax reform", "tax tax", "Srebrenica Dutchbat massacre", "the european union", "unknownword", "islam film fitna"]
            .map(String::from),
    );
    let mut pairs = 0;
    let mut worst = 0.0f64;
    for q in &queries {
        let want = oracle::speech_scores(&c.corpus, q);
        let terms = tokenize(q);
        for (s, w) in c.corpus.speeches().iter().zip(&want) {
            let got = bm25_score(&c.index, &terms, &s.id).map_err(|e| e.to_string())?;
            worst = worst.max((got - w).abs());
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst <= 1e-9, "max deviation {worst:e}");
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("{pairs} (query, doc) pairs, max |diff| {worst:.1e}, {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn spn_brute_force() -> Outcome {
    let mut worst = 0.0f64;
    let mut cyclic = 0;
    let mut checked = 0;
    for (corpus, graph) in instances(100) {
        cyclic += usize::from(graph.categories().iter().any(|c| {
            graph.children(&c.id).unwrap().iter().any(|k| oracle::closure(&graph, k).contains(&c.id))
        }));
        let index = Index::build(&corpus);
        for q in RANDOM_QUERIES {
            let dense = index.score_all(&tokenize(q));
            let ents = entity_scores(&dense, &corpus);
            let want_ents = oracle::entity_scores(&corpus, &oracle::speech_scores(&corpus, q));
            ensure!(ents.len() == want_ents.len(), "entity sets differ");
            for (e, v) in &ents {
                worst = worst.max((v - want_ents[e]).abs());
            }
            for (cat, want) in oracle::category_scores(&corpus, &graph, q) {
                let got = category_score(&ents, &graph, &cat).map_err(|e| e.to_string())?;
                worst = worst.max((got - want).abs());
            }
            let map = edge_weights(&index, &corpus, &graph, q, &all_ids(&graph)).map_err(|e| e.to_string())?;
            let want = oracle::edge_weights(&corpus, &graph, q);
            ensure!(map.edges.len() == want.len(), "edge count {} vs {}", map.edges.len(), want.len());
            for e in &map.edges {
                let (w, rank) = want[&(e.parent.clone(), e.child.clone())];
                worst = worst.max((e.weight - w).abs());
                ensure!(e.rank == rank, "rank of {}->{} is {} not {rank}", e.parent, e.child, e.rank);
            }
            checked += 1;
        }
    }
    ensure!(worst <= 1e-9, "max deviation {worst:e}");
    Ok(format!("{checked} instance-queries, {cyclic}/100 instances cyclic, max |diff| {worst:.1e}"))
}

fn scaling_invariance() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (corpus, graph) in instances(60) {
        let index = Index::build(&corpus);
        let terms = tokenize("tax Entity1 Entity2");
        let base = index.score_all(&terms);
        let frontier = all_ids(&graph);
        let reference = QueryScores::from_speech_scores(terms.clone(), base.clone(), &corpus, &graph)
            .edge_weights(&corpus, &graph, &frontier)
            .map_err(|e| e.to_string())?;
        for c in [0.1, 7.0, 1e6] {
            let scaled = base.iter().map(|s| s * c).collect();
            let map = QueryScores::from_speech_scores(terms.clone(), scaled, &corpus, &graph)
                .edge_weights(&corpus, &graph, &frontier)
                .map_err(|e| e.to_string())?;
            for (a, b) in reference.edges.iter().zip(&map.edges) {
                ensure!(a.parent == b.parent && a.child == b.child && a.rank == b.rank, "ranks moved at c={c}");
                worst = worst.max((a.weight - b.weight).abs());
            }
        }
        n += 1;
    }
    ensure!(worst <= 1e-12, "max weight change {worst:e}");
    Ok(format!("{n} instances x 3 factors, max |diff| {worst:.1e}"))
}

fn closure_monotonicity() -> Outcome {
    let mut edges = 0;
    for (corpus, graph) in instances(100) {
        let index = Index::build(&corpus);
        let ents = entity_scores(&index.score_all(&tokenize("tax Entity1 budget")), &corpus);
        for (p, c) in graph.edges() {
            let ip = category_importance(&graph, &corpus, p).unwrap();
            let ic = category_importance(&graph, &corpus, c).unwrap();
            ensure!(ip >= ic, "importance {p}={ip} < {c}={ic}");
            let sp = category_score(&ents, &graph, p).unwrap();
            let sc = category_score(&ents, &graph, c).unwrap();
            ensure!(sp >= sc, "score {p}={sp} < {c}={sc}");
            edges += 1;
        }
    }
    Ok(format!("{edges} edges over 100 instances"))
}

fn at(n: i64) -> chrono::DateTime<chrono::Utc> {
    chrono::DateTime::parse_from_rfc3339("2024-02-01T10:00:00Z").unwrap().to_utc() + chrono::Duration::seconds(n)
}

fn hand_built_log(c: &Collection) -> SessionLog {
    let mut header = SessionHeader::new("hand", Condition::new(System::Spn, Task::Focused), "t");
    header.rating = Some(7.5);
    let mut s = Session::new(header);
    let inputs = [
        EventInput::new(at(0), EventKind::RootSelection, "Politics"),
        EventInput::new(at(10), EventKind::NodeExpansion, "Politics"),
        EventInput::new(at(20), EventKind::QuerySubmit, "income tax"),
        EventInput::edge(at(25), "Politics", "Economy", 1),
        EventInput::new(at(30), EventKind::NodeExpansion, "Economy"),
        EventInput::new(at(40), EventKind::NodeExpansion, "Taxation"),
        EventInput::new(at(50), EventKind::EntityListLoad, "Economy"),
        EventInput::new(at(60), EventKind::SpeechListLoad, "Tax"),
        EventInput::new(at(70), EventKind::SpeechContentView, "s01"),
        EventInput::new(at(80), EventKind::SpeechContentView, "s02"),
        EventInput::new(at(90), EventKind::RootSelection, "Taxation"),
    ];
    for i in inputs {
        s.apply(&c.graph, &c.corpus, i).unwrap();
    }
    SessionLog::from(&s)
}

fn analytics_exactness() -> Outcome {
    let c = Collection::fixture().map_err(|e| e.to_string())?;
    let log = hand_built_log(&c);
    let st = per_session_stats(&log).map_err(|e| e.to_string())?;
    ensure!(st.root_selections == 2, "root selections {}", st.root_selections);
    ensure!(st.mean_root_depth == Some(1.0), "root depth {:?}", st.mean_root_depth);
    ensure!(st.node_expansions == 3 && st.entity_list_loads == 1, "visit counts {st:?}");
    ensure!(st.speech_list_loads == 1 && st.speech_content_views == 2, "speech counts {st:?}");
    ensure!(st.duration_minutes == 1.5 && st.external_rating == Some(7.5), "duration/rating {st:?}");

    let mut jumps = JumpHistogram::default();
    jumps.add_log(&log);
    let (up, down) = (jumps.percentage("+1"), jumps.percentage("-1"));
    ensure!((up - 66.7).abs() <= 0.1 && (down - 33.3).abs() <= 0.1, "+1 {up}, -1 {down}");
    ensure!(jumps.total() == 3, "{} jumps", jumps.total());

    let sim = layered_collection(LayeredConfig::default());
    let mut logs = vec![];
    for seed in 0..40u64 {
        let kind = PolicyKind::ALL[seed as usize % 4];
        logs.push(simulate_session(&sim, &SimulationSpec::new(Policy::new(kind, seed), "tax", Condition::ALL[1])).unwrap());
    }
    let a = analyze(&logs).map_err(|e| e.to_string())?;
    let mut sums = vec![];
    for h in a.jumps.values() {
        sums.push(h.percentages().iter().sum::<f64>());
    }
    for h in a.levels.values() {
        sums.push(h.percentages().iter().sum::<f64>());
    }
    for s in a.edge_ranks.values() {
        sums.push(s.selection_percentages().iter().sum::<f64>());
    }
    let mut one = LevelHistogram::default();
    one.add_log(&log);
    sums.push(one.percentages().iter().sum());
    for s in &sums {
        ensure!((s - 100.0).abs() <= 1e-9, "histogram sums to {s}");
    }
    Ok(format!("stats exact, +1 {up:.1}% / -1 {down:.1}%, {} histograms sum to 100", sums.len()))
}

fn navigator_determinism() -> Outcome {
    let c = layered_collection(LayeredConfig::default());
    let fixture = Collection::fixture().map_err(|e| e.to_string())?;
    let mut n = 0;
    for seed in 0..100u64 {
        let target = if seed % 2 == 0 { &c } else { &fixture };
        let kind = PolicyKind::ALL[seed as usize % 4];
        let mut cond = Condition::ALL[(seed as usize / 4) % 4];
        if kind == PolicyKind::SpnGuided {
            cond.system = System::Spn;
        }
        let spec = SimulationSpec::new(Policy::new(kind, seed).with_budget(20), "tax", cond);
        let log = simulate_session(target, &spec).map_err(|e| e.to_string())?;
        let parsed = SessionLog::from_jsonl(&log.to_jsonl()).map_err(|e| e.to_string())?;
        ensure!(parsed == log, "seed {seed}: log changed in serialization");
        let a = Session::replay(parsed.header.clone(), &parsed.events, &target.graph, &target.corpus)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let b = Session::replay(log.header.clone(), &log.events, &target.graph, &target.corpus)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(
            a.levels() == b.levels()
                && a.current_root() == b.current_root()
                && a.active_query() == b.active_query()
                && a.expanded().eq(b.expanded())
                && a.events() == &log.events[..],
            "seed {seed}: replayed state differs"
        );
        ensure!(simulate_session(target, &spec).unwrap() == log, "seed {seed}: rerun differs");
        n += 1;
    }
    Ok(format!("{n} simulated logs replay to identical state"))
}

fn behavioral_contrast() -> Outcome {
    let c = layered_collection(LayeredConfig::default());
    let cond = Condition::new(System::Baseline, Task::Broad);
    let pooled = |kind| {
        let mut h = JumpHistogram::default();
        for seed in 0..100 {
            let log = simulate_session(&c, &SimulationSpec::new(Policy::new(kind, seed), "tax", cond)).unwrap();
            h.add_log(&log);
        }
        h
    };
    let deep = pooled(PolicyKind::DepthFirst);
    let wide = pooled(PolicyKind::BreadthFirst);
    ensure!(deep.mode() == Some("+1"), "depth_first mode {:?}", deep.mode());
    ensure!(wide.mode() == Some("0"), "breadth_first mode {:?}", wide.mode());
    ensure!(deep.percentage("+1") > wide.percentage("+1"), "+1 mass not larger");

    let mut logs = vec![];
    for (i, cond) in Condition::ALL.into_iter().enumerate() {
        for seed in 0..10 {
            let kind = if cond.system == System::Spn { PolicyKind::SpnGuided } else { PolicyKind::BreadthFirst };
            let mut spec = SimulationSpec::new(Policy::new(kind, seed * 4 + i as u64), "tax", cond);
            spec.task_id = format!("t{i}");
            logs.push(simulate_session(&c, &spec).unwrap());
        }
    }
    let report = analyze(&logs).map_err(|e| e.to_string())?.report;
    ensure!(report.columns.len() == 8 && report.columns == COLUMNS.map(String::from), "columns {:?}", report.columns);
    ensure!(report.rows.len() == 4, "{} rows", report.rows.len());
    let tsv = report.to_tsv();
    ensure!(tsv.lines().count() == 5 && tsv.lines().all(|l| l.split('\t').count() == 11), "tsv shape");
    Ok(format!(
        "+1: depth_first {:.1}% vs breadth_first {:.1}%; 0: {:.1}% vs {:.1}%; report 4x8",
        deep.percentage("+1"),
        wide.percentage("+1"),
        deep.percentage("0"),
        wide.percentage("0")
    ))
}

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn to_json<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap()
}

async fn service_checks(c: Arc<Collection>) -> Outcome {
    let app = catnav_service::router(Arc::new(catnav_service::AppState::new(c.clone())));
    let get = |uri: String| {
        let app = app.clone();
        async move { call(&app, Method::GET, &uri, None).await }
    };
    let mut n = 0;
    let ids = all_ids(&c.graph);
    for id in &ids {
        ensure!(get(format!("/categories/{id}/children")).await == (StatusCode::OK, to_json(category_children(&c, id).unwrap())), "children {id}");
        ensure!(get(format!("/categories/{id}/entities")).await == (StatusCode::OK, to_json(category_entities(&c, id).unwrap())), "entities {id}");
        n += 2;
    }
    let mut entities: BTreeSet<String> = c.corpus.entities().into_iter().map(String::from).collect();
    entities.extend((0..c.graph.entity_count()).map(|i| c.graph.entity_at(i).to_string()));
    for e in &entities {
        let want = to_json(entity_speech_list(&c.corpus, &c.graph, e).unwrap());
        ensure!(get(format!("/entities/{e}/speeches")).await == (StatusCode::OK, want), "speeches of {e}");
        n += 1;
    }
    for s in c.corpus.speeches() {
        ensure!(get(format!("/speeches/{}", s.id)).await == (StatusCode::OK, to_json(speech_view(&c.corpus, &s.id).unwrap())), "speech {}", s.id);
        n += 1;
    }
    for q in ["tax", "income tax", "srebrenica", "islam immigration", "europe"] {
        for k in [1, 5, 16] {
            let want: Vec<Value> = search_categories(&c.categories, q, k)
                .unwrap()
                .into_iter()
                .map(|(id, score)| json!({"id": id, "label": c.graph.category(&id).unwrap().label, "score": score}))
                .collect();
            ensure!(get(format!("/categories/search?q={}&k={k}", q.replace(' ', "%20"))).await == (StatusCode::OK, Value::Array(want)), "search {q}");
            n += 1;
        }
        let mut frontiers: Vec<Vec<String>> = ids.iter().map(|i| vec![i.clone()]).collect();
        frontiers.push(ids.clone());
        for f in frontiers {
            let got = call(&app, Method::POST, "/spn/score", Some(json!({"query": q, "frontier": f}))).await;
            let want = to_json(edge_weights(&c.index, &c.corpus, &c.graph, q, &f).unwrap());
            ensure!(got == (StatusCode::OK, want), "spn score {q} {f:?}");
            n += 1;
        }
    }
    // session round trip against a locally driven session
    let (s, _) = call(&app, Method::POST, "/sessions", Some(json!({"session_id": "acc", "system": "spn", "task": "focused", "task_id": "t"}))).await;
    ensure!(s == StatusCode::CREATED, "create session {s}");
    let reference = hand_built_log(&c);
    for e in &reference.events {
        let (s, v) = call(&app, Method::POST, "/sessions/acc/events", Some(to_json(EventInput::from(e)))).await;
        ensure!(s == StatusCode::OK && v == to_json(e), "event {:?}", e.kind);
        n += 1;
    }
    let (s, v) = call(&app, Method::GET, "/sessions/acc/log", None).await;
    let mut expected = reference.clone();
    expected.header.session_id = "acc".into();
    expected.header.rating = None;
    ensure!(s == StatusCode::OK && v == to_json(&expected), "session log");
    let bad = EventInput::new(at(500), EventKind::NodeExpansion, "History");
    let (s, v) = call(&app, Method::POST, "/sessions/acc/events", Some(to_json(bad))).await;
    ensure!(s == StatusCode::CONFLICT && v["code"] == "illegal_transition", "illegal transition gave {s} {v}");
    let (s, v) = get("/categories/Films/children".into()).await;
    ensure!(s == StatusCode::OK && v == json!([]), "leaf children");
    Ok(format!("{n} responses equal their library calls"))
}

fn service_parity() -> Outcome {
    let c = Arc::new(Collection::fixture().map_err(|e| e.to_string())?);
    tokio::runtime::Runtime::new().unwrap().block_on(service_checks(c))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("bm25 oracle equivalence", bm25_oracle),
        ("spn brute-force equivalence", spn_brute_force),
        ("scaling invariance", scaling_invariance),
        ("closure monotonicity", closure_monotonicity),
        ("analytics exactness", analytics_exactness),
        ("navigator determinism", navigator_determinism),
        ("behavioral contrast", behavioral_contrast),
        ("service parity", service_parity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
