//! Brute-force reference implementations. Everything here is recomputed
//! from raw speeches and graph edges with no shared code beyond the data
//! types, so agreement with the library is meaningful.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use catnav_core::corpus::{entities_under, CategoryGraph, Corpus, Membership};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Okapi BM25 of each document for `query`, straight from the formula.
pub fn bm25_docs(docs: &[Vec<String>], query: &[String]) -> Vec<f64> {
    let n = docs.len() as f64;
    if docs.is_empty() {
        return Vec::new();
    }
    let avgdl = docs.iter().map(|d| d.len()).sum::<usize>() as f64 / n;
    docs.iter()
        .map(|d| {
            let mut total = 0.0;
            for q in query {
                let df = docs.iter().filter(|x| x.contains(q)).count() as f64;
                let tf = d.iter().filter(|w| *w == q).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
                let norm = if avgdl > 0.0 { d.len() as f64 / avgdl } else { 0.0 };
                total += idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * norm));
            }
            total
        })
        .collect()
}

pub fn speech_scores(corpus: &Corpus, query: &str) -> Vec<f64> {
    let docs: Vec<Vec<String>> = corpus.speeches().iter().map(|s| words(&s.text)).collect();
    bm25_docs(&docs, &words(query))
}

/// Descendants by repeated edge relaxation until nothing changes.
pub fn closure(graph: &CategoryGraph, category: &str) -> BTreeSet<String> {
    let edges: Vec<(String, String)> = graph.edges().map(|(p, c)| (p.to_string(), c.to_string())).collect();
    let mut set = BTreeSet::from([category.to_string()]);
    loop {
        let before = set.len();
        for (p, c) in &edges {
            if set.contains(p) {
                set.insert(c.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

pub fn closure_entities(graph: &CategoryGraph, category: &str) -> BTreeSet<String> {
    closure(graph, category)
        .iter()
        .flat_map(|c| entities_under(graph, c, Membership::Direct).unwrap())
        .collect()
}

/// Entity relevance: mention-weighted speech scores, L1-normalized.
pub fn entity_scores(corpus: &Corpus, scores: &[f64]) -> HashMap<String, f64> {
    let mut raw: HashMap<String, f64> = HashMap::new();
    for (s, score) in corpus.speeches().iter().zip(scores) {
        for m in &s.mentions {
            *raw.entry(m.entity_id.clone()).or_default() += score;
        }
    }
    let total: f64 = raw.values().sum();
    raw.values_mut().for_each(|v| *v = if total > 0.0 { *v / total } else { 0.0 });
    raw
}

pub fn category_scores(corpus: &Corpus, graph: &CategoryGraph, query: &str) -> BTreeMap<String, f64> {
    let ent = entity_scores(corpus, &speech_scores(corpus, query));
    graph
        .categories()
        .iter()
        .map(|c| {
            let s = closure_entities(graph, &c.id).iter().map(|e| ent.get(e).copied().unwrap_or(0.0)).sum();
            (c.id.clone(), s)
        })
        .collect()
}

/// (parent, child) -> (weight, rank) for every edge.
pub fn edge_weights(corpus: &Corpus, graph: &CategoryGraph, query: &str) -> BTreeMap<(String, String), (f64, u32)> {
    let cat = category_scores(corpus, graph, query);
    let mut out = BTreeMap::new();
    for p in graph.categories() {
        let kids = graph.children(&p.id).unwrap();
        let mass: f64 = kids.iter().map(|k| cat[*k]).sum();
        for k in &kids {
            let higher = kids
                .iter()
                .filter(|o| cat[**o] > cat[*k] || (cat[**o] == cat[*k] && *o < k))
                .count();
            let w = if mass > 0.0 { cat[*k] / mass } else { 0.0 };
            out.insert((p.id.clone(), k.to_string()), (w, higher as u32 + 1));
        }
    }
    out
}

/// Category virtual documents: every speech of every debate in which some
/// speech mentions an entity under the category's closure.
pub fn category_documents(corpus: &Corpus, graph: &CategoryGraph) -> Vec<Vec<String>> {
    graph
        .categories()
        .iter()
        .map(|c| {
            let ents = closure_entities(graph, &c.id);
            let debates: BTreeSet<&str> = corpus
                .speeches()
                .iter()
                .filter(|s| s.mentions.iter().any(|m| ents.contains(&m.entity_id)))
                .map(|s| s.debate_id.as_str())
                .collect();
            corpus
                .speeches()
                .iter()
                .filter(|s| debates.contains(s.debate_id.as_str()))
                .flat_map(|s| words(&s.text))
                .collect()
        })
        .collect()
}

/// Top-k by score descending then id, positive scores only.
pub fn top_k(ids: &[String], scores: &[f64], k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = ids.iter().cloned().zip(scores.iter().copied()).filter(|x| x.1 > 0.0).collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn plain_corpus(texts: &[String]) -> Corpus {
    use catnav_core::corpus::Speech;
    let date = chrono::NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
    let speeches = texts
        .iter()
        .enumerate()
        .map(|(i, t)| Speech {
            id: format!("doc{i:02}"),
            debate_id: format!("deb{}", i / 3),
            debate_title: String::new(),
            date,
            speaker: String::new(),
            text: t.clone(),
            mentions: Vec::new(),
        })
        .collect();
    Corpus::from_speeches(speeches).unwrap()
}
