//! Seeded random corpora and hierarchies for property tests, simulations
//! and benchmarks.

use chrono::{Days, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Category, CategoryGraph, Corpus, EntityMention, Speech};
use crate::Collection;

const WORDS: [&str; 24] = [
    "tax", "budget", "europe", "law", "minister", "debate", "war", "history", "islam", "immigration",
    "school", "health", "police", "farm", "energy", "water", "housing", "pension", "trade", "court",
    "army", "bank", "rail", "climate",
];

/// Size limits for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct InstanceLimits {
    pub max_speeches: usize,
    pub max_entities: usize,
    pub max_categories: usize,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_speeches: 30,
            max_entities: 20,
            max_categories: 15,
        }
    }
}

fn random_date(rng: &mut ChaCha8Rng) -> NaiveDate {
    let start = NaiveDate::from_ymd_opt(1994, 1, 1).expect("valid date");
    start + Days::new(rng.random_range(0..7300))
}

fn entity_name(k: usize) -> String {
    format!("Entity{k}")
}

/// A speech of random filler words with the given entity mentions spliced
/// in; each mention's surface is the entity name.
fn make_speech(rng: &mut ChaCha8Rng, id: String, debate: usize, date: NaiveDate, words: usize, entities: &[usize]) -> Speech {
    let mut text = String::new();
    let mut mentions = Vec::new();
    let mut pending: Vec<usize> = entities.to_vec();
    let slots = words + pending.len();
    for _ in 0..slots {
        if !text.is_empty() {
            text.push(' ');
        }
        let place_entity = !pending.is_empty() && rng.random_bool((pending.len() as f64 / slots as f64 + 0.1).min(1.0));
        if place_entity {
            let e = pending.swap_remove(rng.random_range(0..pending.len()));
            let name = entity_name(e);
            let begin = text.chars().count();
            text.push_str(&name);
            mentions.push(EntityMention {
                entity_id: name.clone(),
                begin,
                end: begin + name.chars().count(),
                surface: name,
            });
        } else {
            text.push_str(WORDS.choose(rng).expect("non-empty"));
        }
    }
    for e in pending {
        text.push(' ');
        let name = entity_name(e);
        let begin = text.chars().count();
        text.push_str(&name);
        mentions.push(EntityMention {
            entity_id: name.clone(),
            begin,
            end: begin + name.chars().count(),
            surface: name,
        });
    }
    Speech {
        id,
        debate_id: format!("debate{debate:03}"),
        debate_title: format!("Debate {debate}"),
        date,
        speaker: format!("member{}", rng.random_range(0..10)),
        text,
        mentions,
    }
}

fn graph_from(n: usize, edges: Vec<(usize, usize)>, members: Vec<(usize, String)>) -> CategoryGraph {
    let name = |i: usize| format!("cat{i:03}");
    CategoryGraph::new(
        (0..n)
            .map(|i| Category {
                id: name(i),
                label: format!("Category {i}"),
            })
            .collect(),
        edges.into_iter().map(|(p, c)| (name(p), name(c))),
        members.into_iter().map(|(c, e)| (name(c), e)),
        &name(0),
    )
    .expect("generated graph is consistent")
}

/// A small random corpus and category graph. Every category is reachable
/// from `cat000`; extra edges may point anywhere, so cycles and
/// multi-parent nodes occur. Some memberships name entities that are never
/// mentioned.
pub fn random_instance(seed: u64, limits: InstanceLimits) -> (Corpus, CategoryGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_speeches = rng.random_range(1..=limits.max_speeches);
    let n_entities = rng.random_range(1..=limits.max_entities);
    let n_categories = rng.random_range(1..=limits.max_categories);
    let n_debates = n_speeches / 3 + 1;
    let debate_dates: Vec<NaiveDate> = (0..n_debates).map(|_| random_date(&mut rng)).collect();

    let speeches = (0..n_speeches)
        .map(|i| {
            let debate = rng.random_range(0..n_debates);
            let mut ents = Vec::new();
            for _ in 0..rng.random_range(0..=4) {
                let e = rng.random_range(0..n_entities);
                for _ in 0..rng.random_range(1..=3) {
                    ents.push(e);
                }
            }
            let words = rng.random_range(0..12);
            make_speech(&mut rng, format!("sp{i:03}"), debate, debate_dates[debate], words, &ents)
        })
        .collect();
    let corpus = Corpus::from_speeches(speeches).expect("generated speeches are valid");

    let mut edges = Vec::new();
    for c in 1..n_categories {
        edges.push((rng.random_range(0..c), c));
    }
    for _ in 0..rng.random_range(0..=n_categories) {
        edges.push((rng.random_range(0..n_categories), rng.random_range(0..n_categories)));
    }
    let mut members = Vec::new();
    for e in 0..n_entities {
        for _ in 0..rng.random_range(0..=2) {
            members.push((rng.random_range(0..n_categories), entity_name(e)));
        }
    }
    if rng.random_bool(0.3) {
        members.push((rng.random_range(0..n_categories), "Ghost".to_string()));
    }
    (corpus, graph_from(n_categories, edges, members))
}

/// Shape of a layered synthetic collection.
#[derive(Debug, Clone, Copy)]
pub struct LayeredConfig {
    pub depth: u32,
    pub branching: usize,
    pub speeches: usize,
    pub words_per_speech: usize,
    pub entities_per_leaf: usize,
    /// Extra edges from a random node to a random node one layer up,
    /// creating cycles.
    pub back_edges: usize,
    pub seed: u64,
}

impl Default for LayeredConfig {
    fn default() -> Self {
        LayeredConfig {
            depth: 5,
            branching: 3,
            speeches: 400,
            words_per_speech: 40,
            entities_per_leaf: 2,
            back_edges: 4,
            seed: 0,
        }
    }
}

/// A complete `branching`-ary category tree `depth` layers below the root,
/// with entity memberships on every category, a few upward edges forming
/// cycles, and speeches mentioning random entities.
pub fn layered_collection(cfg: LayeredConfig) -> Collection {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut layers: Vec<Vec<usize>> = vec![vec![0]];
    let mut edges = Vec::new();
    let mut next = 1;
    for _ in 0..cfg.depth {
        let mut layer = Vec::new();
        for &p in layers.last().expect("root layer") {
            for _ in 0..cfg.branching {
                edges.push((p, next));
                layer.push(next);
                next += 1;
            }
        }
        layers.push(layer);
    }
    let n_categories = next;
    for _ in 0..cfg.back_edges {
        if layers.len() < 3 {
            break;
        }
        let l = rng.random_range(2..layers.len());
        let from = *layers[l].choose(&mut rng).expect("non-empty layer");
        let to = *layers[l - 1].choose(&mut rng).expect("non-empty layer");
        edges.push((from, to));
    }

    let mut members = Vec::new();
    let mut n_entities = 0;
    for c in 0..n_categories {
        let k = if layers.last().expect("layers").contains(&c) {
            cfg.entities_per_leaf
        } else {
            1
        };
        for _ in 0..k {
            members.push((c, entity_name(n_entities)));
            n_entities += 1;
        }
    }

    let n_debates = cfg.speeches / 4 + 1;
    let dates: Vec<NaiveDate> = (0..n_debates).map(|_| random_date(&mut rng)).collect();
    let speeches = (0..cfg.speeches)
        .map(|i| {
            let debate = rng.random_range(0..n_debates);
            let ents: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..n_entities)).collect();
            make_speech(&mut rng, format!("sp{i:05}"), debate, dates[debate], cfg.words_per_speech, &ents)
        })
        .collect();
    let corpus = Corpus::from_speeches(speeches).expect("generated speeches are valid");
    Collection::new(corpus, graph_from(n_categories, edges, members))
}
