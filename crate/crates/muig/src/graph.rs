//! Plain undirected graphs over integer vertex ids.
//!
//! Graphs are compared by vertex- and edge-set identity, which is what the
//! round-trip checks between representations and bubble models rely on.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("cut member {0} is not a vertex of the graph")]
    UnknownCutMember(VertexId),
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn insert_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
    }

    /// Adds the undirected edge `{u, v}`; inserting it twice is a no-op.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        debug_assert_ne!(u, v, "self loops are not part of the model");
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.insert(b);
            } else if b == v {
                out.insert(a);
            }
        }
        out
    }

    /// Induced subgraph on the given vertex set.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for &v in keep {
            if self.vertices.contains(&v) {
                g.insert_vertex(v);
            }
        }
        for &(a, b) in &self.edges {
            if keep.contains(&a) && keep.contains(&b) {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let mut it = self.vertices.iter();
        let Some(&start) = it.next() else {
            return true;
        };
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    fn adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        adj
    }
}

/// One side of a vertex bipartition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cut {
    pub members: BTreeSet<VertexId>,
}

impl Cut {
    pub fn new(members: impl IntoIterator<Item = VertexId>) -> Self {
        Cut {
            members: members.into_iter().collect(),
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }
}

/// Number of edges with exactly one end in the cut.
pub fn cut_size(g: &Graph, cut: &Cut) -> Result<u64, GraphError> {
    for &v in &cut.members {
        if !g.has_vertex(v) {
            return Err(GraphError::UnknownCutMember(v));
        }
    }
    Ok(g.edges()
        .filter(|&(u, v)| cut.contains(u) != cut.contains(v))
        .count() as u64)
}
