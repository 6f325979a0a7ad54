use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Only the category's own members.
    Direct,
    /// Members of the category and of every descendant.
    Transitive,
}

/// Directed category graph with entity memberships. Edges point from
/// parent to child. Cycles are allowed; every traversal keeps a visited set.
///
/// Categories and entities are addressed by dense positions internally;
/// the string-keyed methods are the public surface.
#[derive(Debug, Clone)]
pub struct CategoryGraph {
    categories: Vec<Category>,
    by_id: HashMap<String, usize>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
    entities: Vec<String>,
    entity_by_id: HashMap<String, usize>,
    root: usize,
    depth: Vec<Option<u32>>,
    closure_entities: Vec<OnceLock<Vec<usize>>>,
}

impl CategoryGraph {
    /// Build and validate a graph. Duplicate edges and memberships collapse.
    /// Children lists are ordered by category id.
    pub fn new(
        categories: Vec<Category>,
        edges: impl IntoIterator<Item = (String, String)>,
        memberships: impl IntoIterator<Item = (String, String)>,
        root: &str,
    ) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(categories.len());
        for (i, c) in categories.iter().enumerate() {
            if by_id.insert(c.id.clone(), i).is_some() {
                return Err(Error::Duplicate {
                    kind: "category",
                    id: c.id.clone(),
                });
            }
        }
        let lookup = |id: &str| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownCategory(id.to_string()))
        };

        let n = categories.len();
        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for (p, c) in edges {
            let (p, c) = (lookup(&p)?, lookup(&c)?);
            children[p].push(c);
            parents[c].push(p);
        }
        for list in children.iter_mut().chain(parents.iter_mut()) {
            list.sort_unstable_by(|&a, &b| categories[a].id.cmp(&categories[b].id));
            list.dedup();
        }

        let mut entities = Vec::new();
        let mut entity_by_id = HashMap::new();
        let mut members = vec![Vec::new(); n];
        for (c, e) in memberships {
            let c = lookup(&c)?;
            let next = entities.len();
            let e = *entity_by_id.entry(e.clone()).or_insert_with(|| {
                entities.push(e);
                next
            });
            members[c].push(e);
        }
        for list in &mut members {
            list.sort_unstable();
            list.dedup();
        }

        let root = lookup(root)?;
        let mut graph = CategoryGraph {
            categories,
            by_id,
            children,
            parents,
            members,
            entities,
            entity_by_id,
            root,
            depth: Vec::new(),
            closure_entities: (0..n).map(|_| OnceLock::new()).collect(),
        };
        graph.depth = graph.shortest_depths();
        Ok(graph)
    }

    fn shortest_depths(&self) -> Vec<Option<u32>> {
        let mut depth = vec![None; self.categories.len()];
        depth[self.root] = Some(0);
        let mut queue = VecDeque::from([self.root]);
        while let Some(c) = queue.pop_front() {
            let d = depth[c].unwrap_or(0);
            for &child in &self.children[c] {
                if depth[child].is_none() {
                    depth[child] = Some(d + 1);
                    queue.push_back(child);
                }
            }
        }
        depth
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, id: &str) -> Option<&Category> {
        self.by_id.get(id).map(|&i| &self.categories[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownCategory(id.to_string()))
    }

    pub fn id_at(&self, idx: usize) -> &str {
        &self.categories[idx].id
    }

    pub fn root(&self) -> &str {
        self.id_at(self.root)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Child ids in id order.
    pub fn children(&self, id: &str) -> Result<Vec<&str>> {
        let c = self.require(id)?;
        Ok(self.children[c].iter().map(|&i| self.id_at(i)).collect())
    }

    pub fn children_at(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn parents(&self, id: &str) -> Result<Vec<&str>> {
        let c = self.require(id)?;
        Ok(self.parents[c].iter().map(|&i| self.id_at(i)).collect())
    }

    pub fn has_edge(&self, parent: &str, child: &str) -> bool {
        match (self.index_of(parent), self.index_of(child)) {
            (Some(p), Some(c)) => self.children[p].binary_search_by(|&x| self.id_at(x).cmp(self.id_at(c))).is_ok(),
            _ => false,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(move |(p, cs)| cs.iter().map(move |&c| (self.id_at(p), self.id_at(c))))
    }

    /// Shortest directed path length from the designated root; `None` when
    /// unreachable.
    pub fn depth(&self, id: &str) -> Result<Option<u32>> {
        Ok(self.depth[self.require(id)?])
    }

    pub fn is_entity(&self, entity: &str) -> bool {
        self.entity_by_id.contains_key(entity)
    }

    pub fn entity_at(&self, idx: usize) -> &str {
        &self.entities[idx]
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    /// The category and all of its descendants, ascending by position.
    pub fn closure_at(&self, idx: usize) -> Vec<usize> {
        let mut seen = vec![false; self.categories.len()];
        let mut stack = vec![idx];
        seen[idx] = true;
        let mut out = Vec::new();
        while let Some(c) = stack.pop() {
            out.push(c);
            for &child in &self.children[c] {
                if !seen[child] {
                    seen[child] = true;
                    stack.push(child);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn closure(&self, id: &str) -> Result<Vec<&str>> {
        let c = self.require(id)?;
        Ok(self.closure_at(c).into_iter().map(|i| self.id_at(i)).collect())
    }

    /// Entity positions under the category, sorted and unique. Transitive
    /// sets are computed once per category and kept.
    pub fn entities_at(&self, idx: usize, mode: Membership) -> &[usize] {
        match mode {
            Membership::Direct => &self.members[idx],
            Membership::Transitive => self.closure_entities[idx].get_or_init(|| {
                let mut out: Vec<usize> = self
                    .closure_at(idx)
                    .into_iter()
                    .flat_map(|c| self.members[c].iter().copied())
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            }),
        }
    }
}

/// Entity ids under `category`, either its own members or those of its
/// whole descendant closure.
pub fn entities_under(
    graph: &CategoryGraph,
    category: &str,
    mode: Membership,
) -> Result<BTreeSet<String>> {
    let c = graph.require(category)?;
    Ok(graph
        .entities_at(c, mode)
        .iter()
        .map(|&e| graph.entity_at(e).to_string())
        .collect())
}

fn read_tsv(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                rows.push((a.to_string(), b.to_string()))
            }
            _ => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: n + 1,
                    message: "expected exactly two non-empty tab-separated fields".into(),
                })
            }
        }
    }
    Ok(rows)
}

/// Load a hierarchy directory holding `categories.tsv` (id, label),
/// `edges.tsv` (parent, child) and `memberships.tsv` (category, entity).
/// The designated root is read from `root.txt`; without it the first
/// listed category is the root.
pub fn load_hierarchy(dir: impl AsRef<Path>) -> Result<CategoryGraph> {
    let dir = dir.as_ref();
    let categories: Vec<Category> = read_tsv(&dir.join("categories.tsv"))?
        .into_iter()
        .map(|(id, label)| Category { id, label })
        .collect();
    let edges = read_tsv(&dir.join("edges.tsv"))?;
    let memberships = read_tsv(&dir.join("memberships.tsv"))?;
    let root_file = dir.join("root.txt");
    let root = if root_file.exists() {
        fs::read_to_string(&root_file)?.trim().to_string()
    } else {
        categories
            .first()
            .map(|c| c.id.clone())
            .ok_or_else(|| Error::Invalid {
                id: dir.display().to_string(),
                message: "hierarchy has no categories".into(),
            })?
    };
    CategoryGraph::new(categories, edges, memberships, &root)
}
