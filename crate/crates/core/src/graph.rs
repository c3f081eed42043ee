//! Simple undirected graphs with exact unweighted metric queries.
//!
//! Vertex ids are dense naturals `0..vertex_count`. All distances are
//! breadth-first-search distances in the whole graph; set queries (weak
//! diameter, set distance, neighbourhoods) are always measured in the host
//! graph, never in an induced subgraph. Radii are exact rationals, so a
//! vertex is inside a ball iff its integer distance compares `<=` exactly.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::par;
use crate::scalar::Scalar;

/// A BFS distance: a natural number, or infinite when no path exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(usize),
    Infinite,
}

impl Dist {
    pub fn is_finite(&self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// `self <= bound`, decided exactly. Infinite distances exceed every
    /// rational bound.
    pub fn le_scalar(&self, bound: &Scalar) -> bool {
        match self {
            Dist::Finite(d) => bound.cmp_usize(*d).is_ge(),
            Dist::Infinite => false,
        }
    }

    pub fn plus(&self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => write!(f, "INF"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {v} out of range (graph has {n} vertices)")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0} not allowed in a simple graph")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("operation requires a nonempty vertex set")]
    EmptySet,
}

/// Simple undirected graph. No self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    labels: Option<Vec<Option<String>>>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); vertex_count],
            edge_count: 0,
            labels: None,
        }
    }

    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(vertex_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// The path v0-v1-...-v(n-1).
    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    /// The cycle on n >= 3 vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    /// The complete graph on n vertices.
    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    /// The star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => self.adj[u].insert(pos, v),
        }
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as ordered pairs (u, v) with u < v, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        let n = self.vertex_count();
        self.labels.get_or_insert_with(|| vec![None; n])[v] = Some(label.into());
        Ok(())
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref()?.get(v)?.as_deref()
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                v,
                n: self.adj.len(),
            })
        }
    }

    fn check_set(&self, s: &[usize]) -> Result<(), GraphError> {
        s.iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// min over `sources` of dist(source, v), for every vertex v. Empty
    /// sources yield all-infinite.
    pub fn multi_source_distances(&self, sources: &[usize]) -> Result<Vec<Dist>, GraphError> {
        self.check_set(sources)?;
        Ok(self.bfs(sources))
    }

    fn bfs(&self, sources: &[usize]) -> Vec<Dist> {
        let mut dist = vec![Dist::Infinite; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == Dist::Infinite {
                dist[s] = Dist::Finite(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let Dist::Finite(du) = dist[u] else {
                unreachable!()
            };
            for &v in &self.adj[u] {
                if dist[v] == Dist::Infinite {
                    dist[v] = Dist::Finite(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Dist, GraphError> {
        self.check_vertex(v)?;
        Ok(self.multi_source_distances(&[u])?[v])
    }

    /// Vertices at distance at most `radius` from `s`. Empty when
    /// `radius < 0`; contains `s` when `radius >= 0`.
    pub fn neighbourhood(
        &self,
        s: &[usize],
        radius: &Scalar,
    ) -> Result<BTreeSet<usize>, GraphError> {
        self.check_set(s)?;
        if radius.is_negative() {
            return Ok(BTreeSet::new());
        }
        let dist = self.bfs(s);
        Ok((0..self.vertex_count())
            .filter(|&v| dist[v].le_scalar(radius))
            .collect())
    }

    /// The `ell`-th power: same vertices, edge uv iff u != v and
    /// dist(u, v) <= ell.
    pub fn power(&self, ell: &Scalar) -> Graph {
        let n = self.vertex_count();
        let rows = par::map_range(n, |u| {
            let dist = self.bfs(&[u]);
            (u + 1..n)
                .filter(|&v| dist[v].le_scalar(ell))
                .collect::<Vec<_>>()
        });
        let mut g = Graph::new(n);
        for (u, row) in rows.into_iter().enumerate() {
            for v in row {
                g.add_edge(u, v).expect("power edges are simple");
            }
        }
        g
    }

    /// Maximum distance between two vertices of `s`, measured in the whole
    /// graph. Errors on an empty set; a singleton has weak diameter 0.
    pub fn weak_diameter(&self, s: &[usize]) -> Result<Dist, GraphError> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let mut best = Dist::Finite(0);
        for &u in s {
            let dist = self.bfs(&[u]);
            for &v in s {
                best = best.max(dist[v]);
            }
        }
        Ok(best)
    }

    /// min over (a, b) pairs of dist(a, b). Infinite if either set is empty
    /// or no connecting path exists, so empty sets impose no constraints.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Result<Dist, GraphError> {
        self.check_set(a)?;
        self.check_set(b)?;
        if a.is_empty() || b.is_empty() {
            return Ok(Dist::Infinite);
        }
        let dist = self.bfs(a);
        Ok(b.iter().map(|&v| dist[v]).min().unwrap_or(Dist::Infinite))
    }

    /// True iff every path from `a` to `b` (including single-vertex paths
    /// when the sets overlap) contains a vertex of `s`.
    pub fn is_separator(&self, s: &[usize], a: &[usize], b: &[usize]) -> Result<bool, GraphError> {
        self.check_set(s)?;
        self.check_set(a)?;
        self.check_set(b)?;
        let n = self.vertex_count();
        let mut blocked = vec![false; n];
        for &v in s {
            blocked[v] = true;
        }
        let mut in_b = vec![false; n];
        for &v in b {
            in_b[v] = true;
        }
        // BFS from a \ s in the graph with s removed.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &v in a {
            if !blocked[v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            if in_b[u] {
                return Ok(false);
            }
            for &v in &self.adj[u] {
                if !blocked[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        Ok(true)
    }

    /// Full distance table, one BFS per source vertex.
    pub fn all_pairs_distances(&self) -> Vec<Vec<Dist>> {
        par::map_range(self.vertex_count(), |u| self.bfs(&[u]))
    }

    /// Subgraph induced by `verts` (sorted, deduplicated). Returns the
    /// subgraph on dense ids together with the map new-id -> old-id.
    pub fn induced_subgraph(&self, verts: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        self.check_set(verts)?;
        let kept: Vec<usize> = verts
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut old_to_new = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in kept.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut g = Graph::new(kept.len());
        for (new, &old) in kept.iter().enumerate() {
            for &w in &self.adj[old] {
                let wn = old_to_new[w];
                if wn != usize::MAX && new < wn {
                    g.add_edge(new, wn).expect("induced edges are simple");
                }
            }
        }
        Ok((g, kept))
    }
}
