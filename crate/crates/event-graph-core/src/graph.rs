use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::event::{Event, RelationEdge, RelationType};

/// A directed acyclic graph over events for exactly one relation type.
///
/// Acyclicity, endpoint membership, and edge uniqueness are enforced at
/// construction; a value of this type is always a valid DAG. Node and edge
/// order is the insertion order, which keeps downstream prompt rendering
/// and serialization deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationGraph {
    relation: RelationType,
    nodes: Vec<Event>,
    node_index: HashMap<Event, usize>,
    edges: Vec<RelationEdge>,
    edge_set: HashSet<(usize, usize)>,
}

/// Why an edge was rejected by [`RelationGraph::merge_edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Inserting the edge would create a directed cycle.
    WouldCycle,
    /// The edge is already present.
    Duplicate,
    /// An endpoint is not a member of the node set.
    UnknownEndpoint,
    /// The edge carries a different relation type than the graph.
    RelationMismatch,
}

/// An edge refused during a merge, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedEdge {
    pub edge: RelationEdge,
    pub reason: RejectReason,
}

/// Result of merging candidate edges into a graph.
#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub graph: RelationGraph,
    pub rejected: Vec<RejectedEdge>,
}

impl RelationGraph {
    /// An edgeless graph over the given node set (duplicates dropped,
    /// keeping the first occurrence).
    pub fn empty(relation: RelationType, nodes: impl IntoIterator<Item = Event>) -> Self {
        let mut graph = RelationGraph {
            relation,
            nodes: Vec::new(),
            node_index: HashMap::new(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
        };
        for node in nodes {
            graph.insert_node(node);
        }
        graph
    }

    /// Builds a graph and validates every invariant: matching relation
    /// types, endpoints in the node set, no duplicates, no cycles.
    pub fn new(
        relation: RelationType,
        nodes: impl IntoIterator<Item = Event>,
        edges: impl IntoIterator<Item = RelationEdge>,
    ) -> Result<Self, GraphError> {
        let mut graph = RelationGraph::empty(relation, nodes);
        for edge in edges {
            graph.try_insert_edge(edge)?;
        }
        Ok(graph)
    }

    fn insert_node(&mut self, node: Event) -> usize {
        if let Some(&idx) = self.node_index.get(&node) {
            return idx;
        }
        let idx = self.nodes.len();
        self.node_index.insert(node.clone(), idx);
        self.nodes.push(node);
        idx
    }

    /// Inserts one edge or reports exactly why it cannot be inserted.
    fn classify_edge(&self, edge: &RelationEdge) -> Result<(usize, usize), RejectReason> {
        if edge.relation() != self.relation {
            return Err(RejectReason::RelationMismatch);
        }
        let head = *self
            .node_index
            .get(edge.head())
            .ok_or(RejectReason::UnknownEndpoint)?;
        let tail = *self
            .node_index
            .get(edge.tail())
            .ok_or(RejectReason::UnknownEndpoint)?;
        if self.edge_set.contains(&(head, tail)) {
            return Err(RejectReason::Duplicate);
        }
        // Adding head -> tail closes a cycle iff head is reachable from tail.
        if self.reaches(tail, head) {
            return Err(RejectReason::WouldCycle);
        }
        Ok((head, tail))
    }

    fn try_insert_edge(&mut self, edge: RelationEdge) -> Result<(), GraphError> {
        match self.classify_edge(&edge) {
            Ok((head, tail)) => {
                self.edge_set.insert((head, tail));
                self.edges.push(edge);
                Ok(())
            }
            Err(RejectReason::RelationMismatch) => Err(GraphError::RelationMismatch {
                expected: self.relation.to_string(),
                found: edge.relation().to_string(),
            }),
            Err(RejectReason::UnknownEndpoint) => {
                let event = if self.node_index.contains_key(edge.head()) {
                    edge.tail().text()
                } else {
                    edge.head().text()
                };
                Err(GraphError::UnknownEvent {
                    event: event.to_string(),
                })
            }
            Err(RejectReason::Duplicate) => Err(GraphError::DuplicateEdge {
                head: edge.head().text().to_string(),
                tail: edge.tail().text().to_string(),
            }),
            Err(RejectReason::WouldCycle) => {
                let mut witness: Vec<String> = self
                    .path_between(
                        self.node_index[edge.tail()],
                        self.node_index[edge.head()],
                    )
                    .into_iter()
                    .map(|i| self.nodes[i].text().to_string())
                    .collect();
                witness.insert(0, edge.head().text().to_string());
                witness.dedup();
                Err(GraphError::CycleDetected { witness })
            }
        }
    }

    /// Adds each candidate edge whose insertion keeps the graph a valid
    /// DAG, in the given order. Edges that would create a cycle, duplicate
    /// an existing edge, reference an unknown event, or carry the wrong
    /// relation are returned in `rejected` instead of failing the merge.
    pub fn merge_edges(&self, new_edges: impl IntoIterator<Item = RelationEdge>) -> MergeOutcome {
        let mut graph = self.clone();
        let mut rejected = Vec::new();
        for edge in new_edges {
            match graph.classify_edge(&edge) {
                Ok((head, tail)) => {
                    graph.edge_set.insert((head, tail));
                    graph.edges.push(edge);
                }
                Err(reason) => rejected.push(RejectedEdge { edge, reason }),
            }
        }
        MergeOutcome { graph, rejected }
    }

    pub fn relation(&self) -> RelationType {
        self.relation
    }

    pub fn nodes(&self) -> &[Event] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RelationEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, event: &Event) -> bool {
        self.node_index.contains_key(event)
    }

    pub fn contains_edge(&self, head: &Event, tail: &Event) -> bool {
        match (self.node_index.get(head), self.node_index.get(tail)) {
            (Some(&h), Some(&t)) => self.edge_set.contains(&(h, t)),
            _ => false,
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for edge in &self.edges {
            let h = self.node_index[edge.head()];
            let t = self.node_index[edge.tail()];
            adj[h].push(t);
        }
        adj
    }

    /// True when `to` is reachable from `from` along directed edges.
    fn reaches(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &next in &adj[v] {
                if next == to {
                    return true;
                }
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        false
    }

    /// A directed path from `from` to `to` (inclusive), empty when none.
    fn path_between(&self, from: usize, to: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut stack = vec![from];
        let mut seen = vec![false; self.nodes.len()];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return path;
            }
            // Reverse order so the lowest-index neighbor is explored first.
            for &next in adj[v].iter().rev() {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some(v);
                    stack.push(next);
                }
            }
        }
        Vec::new()
    }
}

/// Searches a candidate edge set for a directed cycle.
///
/// Unlike [`RelationGraph`], the input here is unvalidated: edges may
/// duplicate, form cycles, or mention events absent from `nodes` (those
/// are appended to the working node list in edge order). Returns the
/// vertex sequence of the first cycle found by a depth-first search in
/// input order, so the result is deterministic for a fixed input ordering.
pub fn detect_cycle(nodes: &[Event], edges: &[RelationEdge]) -> Option<Vec<Event>> {
    let pairs: Vec<(&Event, &Event)> = edges.iter().map(|e| (e.head(), e.tail())).collect();
    let (all_nodes, adjacency) = index_pairs(nodes, &pairs);
    find_cycle(&adjacency).map(|idxs| idxs.into_iter().map(|i| all_nodes[i].clone()).collect())
}

/// Cycle detection over bare string pairs, used for raw trace edge sets
/// where no validated [`Event`]s exist. Node order is first appearance.
pub fn detect_cycle_in_pairs(pairs: &[(String, String)]) -> Option<Vec<String>> {
    let mut nodes: Vec<&str> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut adjacency: Vec<Vec<usize>> = Vec::new();
    for (head, tail) in pairs {
        for name in [head.as_str(), tail.as_str()] {
            if !index.contains_key(name) {
                index.insert(name, nodes.len());
                nodes.push(name);
                adjacency.push(Vec::new());
            }
        }
        adjacency[index[head.as_str()]].push(index[tail.as_str()]);
    }
    find_cycle(&adjacency).map(|idxs| idxs.into_iter().map(|i| nodes[i].to_string()).collect())
}

fn index_pairs<'a>(
    nodes: &'a [Event],
    pairs: &[(&'a Event, &'a Event)],
) -> (Vec<&'a Event>, Vec<Vec<usize>>) {
    let mut all: Vec<&Event> = Vec::new();
    let mut index: HashMap<&Event, usize> = HashMap::new();
    for node in nodes {
        if !index.contains_key(node) {
            index.insert(node, all.len());
            all.push(node);
        }
    }
    for (head, tail) in pairs {
        for node in [*head, *tail] {
            if !index.contains_key(node) {
                index.insert(node, all.len());
                all.push(node);
            }
        }
    }
    let mut adjacency = vec![Vec::new(); all.len()];
    for (head, tail) in pairs {
        adjacency[index[*head]].push(index[*tail]);
    }
    (all, adjacency)
}

/// Iterative colored DFS; returns the vertex cycle `v0 -> v1 -> ... -> v0`
/// as `[v0, v1, ...]`, or `None` when the graph is acyclic.
fn find_cycle(adjacency: &[Vec<usize>]) -> Option<Vec<usize>> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = adjacency.len();
    let mut color = vec![WHITE; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if color[start] != WHITE {
            continue;
        }
        stack.push((start, 0));
        color[start] = GRAY;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adjacency[v].len() {
                let target = adjacency[v][*next];
                *next += 1;
                match color[target] {
                    WHITE => {
                        color[target] = GRAY;
                        stack.push((target, 0));
                    }
                    GRAY => {
                        // Back edge: the cycle is the stack suffix from `target`.
                        let pos = stack.iter().position(|&(node, _)| node == target).unwrap();
                        return Some(stack[pos..].iter().map(|&(node, _)| node).collect());
                    }
                    _ => {}
                }
            } else {
                color[v] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// The transitive closure of an acyclic relation graph: the output holds
/// an edge `(u, v)` iff `v` is reachable from `u` in the input. Node order
/// is preserved; edges are ordered by (source, target) node position, so
/// the operation is deterministic and idempotent.
pub fn transitive_closure(graph: &RelationGraph) -> RelationGraph {
    let nodes = graph.nodes().to_vec();
    let n = nodes.len();
    let mut adjacency = vec![Vec::new(); n];
    for edge in graph.edges() {
        let h = nodes.iter().position(|e| e == edge.head()).unwrap();
        let t = nodes.iter().position(|e| e == edge.tail()).unwrap();
        adjacency[h].push(t);
    }

    let mut edges = Vec::new();
    for u in 0..n {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = adjacency[u].clone();
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(adjacency[v].iter().copied());
        }
        for v in 0..n {
            if seen[v] && v != u {
                edges.push(
                    RelationEdge::new(nodes[u].clone(), nodes[v].clone(), graph.relation())
                        .expect("closure endpoints are distinct"),
                );
            }
        }
    }

    RelationGraph::new(graph.relation(), nodes, edges)
        .expect("closure of a DAG is a DAG")
}
