//! Synthetic navigation sessions. Each policy is a small Markov walk over
//! the hierarchy, driven through a real [`Session`] so every emitted event
//! has already passed the navigator's checks.
//!
//! The budget counts level visits: root selections, node expansions and
//! entity list loads. Query submits, edge selections and speech events are
//! free.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{search_categories, tokenize};
use crate::navigator::{
    category_entities, entity_speech_list, Condition, EventInput, EventKind, Session, SessionHeader, SessionLog,
    System,
};
use crate::spn::{QueryScores, ScoreCache};
use crate::{Collection, Execution};

/// How many category search hits are tried as roots, in order.
const ROOT_CANDIDATES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    BreadthFirst,
    DepthFirst,
    Backtracking,
    SpnGuided,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::BreadthFirst,
        PolicyKind::DepthFirst,
        PolicyKind::Backtracking,
        PolicyKind::SpnGuided,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::BreadthFirst => "breadth_first",
            PolicyKind::DepthFirst => "depth_first",
            PolicyKind::Backtracking => "backtracking",
            PolicyKind::SpnGuided => "spn_guided",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidPolicy(format!("unknown policy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub kind: PolicyKind,
    /// Maximum number of level visits, at least 1.
    pub budget: u32,
    /// Chance, before each step of the backtracking policy, of returning to
    /// a random ancestor on the current path.
    pub backtrack_probability: f64,
    /// Sharpness of spn_guided child sampling; 0 always takes rank 1.
    pub temperature: f64,
    pub seed: u64,
}

impl Policy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Policy {
            kind,
            budget: 20,
            backtrack_probability: 0.3,
            temperature: 1.0,
            seed,
        }
    }

    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_backtrack_probability(mut self, p: f64) -> Self {
        self.backtrack_probability = p;
        self
    }

    pub fn validate(&self, condition: Condition) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidPolicy("budget must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.backtrack_probability) {
            return Err(Error::InvalidPolicy(format!(
                "backtrack probability {} outside [0, 1]",
                self.backtrack_probability
            )));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidPolicy(format!("temperature {} must be finite and >= 0", self.temperature)));
        }
        if self.kind == PolicyKind::SpnGuided && condition.system != System::Spn {
            return Err(Error::InvalidPolicy("spn_guided needs the spn condition".into()));
        }
        Ok(())
    }
}

/// One session to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub policy: Policy,
    pub query: String,
    pub condition: Condition,
    pub task_id: String,
}

impl SimulationSpec {
    pub fn new(policy: Policy, query: impl Into<String>, condition: Condition) -> Self {
        SimulationSpec {
            policy,
            query: query.into(),
            condition,
            task_id: "task".into(),
        }
    }

    pub fn session_id(&self) -> String {
        let system = match self.condition.system {
            System::Baseline => "baseline",
            System::Spn => "spn",
        };
        let task = match self.condition.task {
            crate::navigator::Task::Broad => "broad",
            crate::navigator::Task::Focused => "focused",
        };
        format!("{}-{system}-{task}-{}-s{}", self.policy.kind, self.task_id, self.policy.seed)
    }
}

fn base_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 8, 9, 0, 0).single().expect("valid timestamp")
}

struct Walker<'a> {
    collection: &'a Collection,
    spec: &'a SimulationSpec,
    session: Session,
    rng: ChaCha8Rng,
    clock: DateTime<Utc>,
    budget: u32,
    scores: Option<Arc<QueryScores>>,
    query_sent: bool,
}

/// Visited set for a walk below one root.
type Seen = std::collections::HashSet<String>;

impl<'a> Walker<'a> {
    fn tick(&mut self) -> DateTime<Utc> {
        self.clock += Duration::seconds(self.rng.random_range(3..=60));
        self.clock
    }

    fn emit(&mut self, input: EventInput) -> Result<()> {
        let c = self.collection;
        self.session.apply(&c.graph, &c.corpus, input).map(|_| ())
    }

    fn spn(&self) -> bool {
        self.spec.condition.system == System::Spn
    }

    /// A level visit, if budget remains.
    fn visit(&mut self, kind: EventKind, category: &str) -> Result<bool> {
        if self.budget == 0 {
            return Ok(false);
        }
        let t = self.tick();
        self.emit(EventInput::new(t, kind, category))?;
        self.budget -= 1;
        Ok(true)
    }

    fn has_children(&self, category: &str) -> bool {
        self.collection.graph.children(category).is_ok_and(|c| !c.is_empty())
    }

    /// Select a category by showing it: expand it if it has children,
    /// otherwise open its entity list and maybe read a speech.
    fn open(&mut self, category: &str) -> Result<bool> {
        if self.has_children(category) {
            self.visit(EventKind::NodeExpansion, category)
        } else {
            if !self.visit(EventKind::EntityListLoad, category)? {
                return Ok(false);
            }
            self.browse(category)?;
            Ok(true)
        }
    }

    fn browse(&mut self, category: &str) -> Result<()> {
        let c = self.collection;
        let Some(entity) = category_entities(c, category)?.into_iter().find(|e| e.mentions > 0) else {
            return Ok(());
        };
        if !self.rng.random_bool(0.5) {
            return Ok(());
        }
        let t = self.tick();
        self.emit(EventInput::new(t, EventKind::SpeechListLoad, &entity.id))?;
        let speeches = entity_speech_list(&c.corpus, &c.graph, &entity.id)?;
        if let Some(first) = speeches.first() {
            if self.rng.random_bool(0.5) {
                let t = self.tick();
                self.emit(EventInput::new(t, EventKind::SpeechContentView, &first.speech_id))?;
            }
        }
        Ok(())
    }

    /// Children of `parent` with their edge weights, in rank order. All
    /// weights are zero in the baseline condition.
    fn ranked_children(&self, parent: &str) -> Result<Vec<(String, f64)>> {
        let c = self.collection;
        match &self.scores {
            Some(scores) => Ok(scores
                .sibling_edges(&c.graph, parent)?
                .into_iter()
                .map(|e| (e.child, e.weight))
                .collect()),
            None => Ok(c.graph.children(parent)?.into_iter().map(|s| (s.to_string(), 0.0)).collect()),
        }
    }

    /// Move from `parent` to `child`: in the spn condition an edge
    /// selection precedes the visit.
    fn descend(&mut self, parent: &str, child: &str) -> Result<bool> {
        if self.budget == 0 {
            return Ok(false);
        }
        if self.spn() {
            if !self.query_sent {
                let t = self.tick();
                self.emit(EventInput::new(t, EventKind::QuerySubmit, &self.spec.query))?;
                self.query_sent = true;
            }
            let ranked = self.ranked_children(parent)?;
            let rank = ranked.iter().position(|(c, _)| c == child).expect("child of parent") as u32 + 1;
            let weights = ranked.into_iter().map(|(_, w)| w).collect();
            let t = self.tick();
            self.emit(EventInput::edge(t, parent, child, rank).with_sibling_weights(weights))?;
        }
        self.open(child)
    }

    fn pick_uniform(&mut self, options: &[String]) -> String {
        options[self.rng.random_range(0..options.len())].clone()
    }

    fn unseen_children(&self, parent: &str, seen: &Seen) -> Result<Vec<String>> {
        Ok(self
            .collection
            .graph
            .children(parent)?
            .into_iter()
            .filter(|c| !seen.contains(*c))
            .map(str::to_string)
            .collect())
    }

    /// Depth-first without replacement. Internal children are taken before
    /// leaves and a single leaf ends a dive. With `backtrack` > 0 the walk
    /// sometimes re-expands a random ancestor on the path and continues there.
    fn depth_first(&mut self, root: &str, backtrack: f64) -> Result<()> {
        let mut seen = Seen::from([root.to_string()]);
        let mut path = vec![root.to_string()];
        while self.budget > 0 {
            let Some(current) = path.last().cloned() else { break };
            if backtrack > 0.0 && path.len() > 1 && self.rng.random_bool(backtrack) {
                let keep = self.rng.random_range(1..path.len());
                path.truncate(keep);
                let ancestor = path.last().cloned().expect("kept at least the root");
                if !self.visit(EventKind::NodeExpansion, &ancestor)? {
                    break;
                }
                continue;
            }
            let options = self.unseen_children(&current, &seen)?;
            if options.is_empty() {
                path.pop();
                continue;
            }
            let inner: Vec<String> = options.iter().filter(|c| self.has_children(c)).cloned().collect();
            let child = if inner.is_empty() {
                self.pick_uniform(&options)
            } else {
                self.pick_uniform(&inner)
            };
            seen.insert(child.clone());
            let internal = self.has_children(&child);
            if !self.descend(&current, &child)? {
                break;
            }
            if internal {
                path.push(child);
            } else {
                // one leaf is enough; the walk heads back up for the next dive
                path.pop();
            }
        }
        Ok(())
    }

    /// Level-order over the visible nodes; siblings come out consecutively.
    fn breadth_first(&mut self, root: &str) -> Result<()> {
        let mut seen = Seen::from([root.to_string()]);
        let mut queue = std::collections::VecDeque::new();
        for c in self.unseen_children(root, &seen)? {
            seen.insert(c.clone());
            queue.push_back((root.to_string(), c));
        }
        while let Some((parent, child)) = queue.pop_front() {
            if !self.descend(&parent, &child)? {
                break;
            }
            for c in self.unseen_children(&child, &seen)? {
                seen.insert(c.clone());
                queue.push_back((child.clone(), c));
            }
        }
        Ok(())
    }

    /// Repeated descents from the root, sampling each child with
    /// probability proportional to weight^(1/T), revisits allowed.
    fn spn_guided(&mut self, root: &str) -> Result<()> {
        let mut current = root.to_string();
        while self.budget > 0 {
            let ranked = self.ranked_children(&current)?;
            if ranked.is_empty() {
                if current == root {
                    break;
                }
                current = root.to_string();
                continue;
            }
            let child = sample_child(&mut self.rng, &ranked, self.spec.policy.temperature);
            if !self.descend(&current, &child)? {
                break;
            }
            current = child;
        }
        Ok(())
    }
}

/// Sample from rank-ordered `(child, weight)` pairs with probability
/// proportional to weight^(1/T). T = 0, or weights too peaked to represent,
/// give the first maximum; all-zero weights fall back to uniform.
fn sample_child(rng: &mut ChaCha8Rng, ranked: &[(String, f64)], temperature: f64) -> String {
    let best = ranked
        .iter()
        .enumerate()
        .fold(0, |b, (i, (_, w))| if *w > ranked[b].1 { i } else { b });
    if ranked.iter().all(|(_, w)| *w <= 0.0) {
        return ranked[rng.random_range(0..ranked.len())].0.clone();
    }
    if temperature == 0.0 {
        return ranked[best].0.clone();
    }
    // log space keeps small temperatures from underflowing to all zeros
    let logits: Vec<f64> = ranked.iter().map(|(_, w)| w.ln() / temperature).collect();
    let top = logits[best];
    let mass: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = mass.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return ranked[best].0.clone();
    }
    let mut x = rng.random::<f64>() * total;
    for (i, m) in mass.iter().enumerate() {
        if x < *m {
            return ranked[i].0.clone();
        }
        x -= m;
    }
    ranked[best].0.clone()
}

/// Simulate one session. Roots are taken from the category search for the
/// query, best first, falling back to the hierarchy root; a new root is
/// selected whenever the walk under the previous one runs dry.
pub fn simulate_session(collection: &Collection, spec: &SimulationSpec) -> Result<SessionLog> {
    simulate_cached(collection, spec, None)
}

fn simulate_cached(collection: &Collection, spec: &SimulationSpec, cache: Option<&ScoreCache>) -> Result<SessionLog> {
    let policy = spec.policy;
    policy.validate(spec.condition)?;
    let spn = spec.condition.system == System::Spn;
    let scores = if spn {
        let (index, corpus, graph) = (&collection.index, &collection.corpus, &collection.graph);
        Some(match cache {
            Some(cache) => cache.get_or_compute(index, corpus, graph, &spec.query)?,
            None => {
                if tokenize(&spec.query).is_empty() {
                    return Err(Error::EmptyQuery);
                }
                Arc::new(QueryScores::compute(index, corpus, graph, &spec.query)?)
            }
        })
    } else {
        None
    };

    let mut roots: Vec<String> = match search_categories(&collection.categories, &spec.query, ROOT_CANDIDATES) {
        Ok(hits) => hits.into_iter().map(|(id, _)| id).collect(),
        Err(Error::EmptyQuery) => Vec::new(),
        Err(e) => return Err(e),
    };
    if roots.is_empty() {
        roots.push(collection.graph.root().to_string());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut header = SessionHeader::new(spec.session_id(), spec.condition, spec.task_id.clone());
    header.rating = Some(rng.random_range(1..=10) as f64);
    header.started_at = Some(base_time());
    let mut walker = Walker {
        collection,
        spec,
        session: Session::new(header),
        rng,
        clock: base_time(),
        budget: policy.budget,
        scores,
        query_sent: false,
    };

    for root in &roots {
        if !walker.visit(EventKind::RootSelection, root)? {
            break;
        }
        if walker.has_children(root) {
            if !walker.visit(EventKind::NodeExpansion, root)? {
                break;
            }
        } else {
            if !walker.visit(EventKind::EntityListLoad, root)? {
                break;
            }
            continue;
        }
        match policy.kind {
            PolicyKind::DepthFirst => walker.depth_first(root, 0.0)?,
            PolicyKind::Backtracking => walker.depth_first(root, policy.backtrack_probability)?,
            PolicyKind::BreadthFirst => walker.breadth_first(root)?,
            PolicyKind::SpnGuided => walker.spn_guided(root)?,
        }
    }
    Ok(SessionLog::from(&walker.session))
}

/// Simulate many sessions, sharing query scores between them. Output order
/// follows `specs`.
pub fn simulate_batch(collection: &Collection, specs: &[SimulationSpec], exec: Execution) -> Result<Vec<SessionLog>> {
    let cache = ScoreCache::new(64);
    exec.map(specs, |spec| simulate_cached(collection, spec, Some(&cache)))
        .into_iter()
        .collect()
}
