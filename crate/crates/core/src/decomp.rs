//! Tree- and path-decompositions.
//!
//! A decomposition is a tree whose nodes carry bags (vertex subsets of a
//! host graph) such that every host vertex appears in a nonempty connected
//! set of bags and every host edge is contained in some bag. The width is
//! the maximum bag size minus one.
//!
//! Rooting a valid decomposition fixes, for every host vertex `v`, the
//! unique bag node containing `v` that is closest to the root (`root_bag`),
//! and induces a total priority order on the host vertices: vertices whose
//! root bags sit higher in the tree come first.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionViolation {
    /// The index graph is not a tree (disconnected or wrong edge count).
    IndexNotATree {
        nodes: usize,
        edges: usize,
    },
    /// The decomposition covers a different vertex universe than the graph.
    UniverseMismatch {
        graph: usize,
        decomposition: usize,
    },
    VertexNotCovered {
        v: usize,
    },
    /// The bags containing `v` do not induce a connected subtree.
    DisconnectedTrace {
        v: usize,
    },
    EdgeNotCovered {
        u: usize,
        v: usize,
    },
    /// A bag mentions a vertex outside the universe.
    BagVertexOutOfRange {
        node: usize,
        v: usize,
    },
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DecompositionViolation::*;
        match self {
            IndexNotATree { nodes, edges } => {
                write!(
                    f,
                    "index graph is not a tree ({nodes} nodes, {edges} edges)"
                )
            }
            UniverseMismatch {
                graph,
                decomposition,
            } => write!(
                f,
                "graph has {graph} vertices but decomposition covers {decomposition}"
            ),
            VertexNotCovered { v } => write!(f, "vertex {v} appears in no bag"),
            DisconnectedTrace { v } => write!(f, "bags containing vertex {v} are disconnected"),
            EdgeNotCovered { u, v } => write!(f, "edge {u}-{v} is contained in no bag"),
            BagVertexOutOfRange { node, v } => {
                write!(f, "bag {node} mentions out-of-range vertex {v}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("invalid decomposition: {}", format_violations(.0))]
    Invalid(Vec<DecompositionViolation>),
    #[error("tree node {node} out of range (tree has {nodes} nodes)")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("rank vector is not a permutation of 0..{0}")]
    NotAPermutation(usize),
}

fn format_violations(vs: &[DecompositionViolation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A tree of bags over the vertex universe `0..vertex_universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    tree: Graph,
    bags: Vec<BTreeSet<usize>>,
    vertex_universe: usize,
}

impl TreeDecomposition {
    pub fn new(tree: Graph, bags: Vec<BTreeSet<usize>>, vertex_universe: usize) -> Self {
        assert_eq!(tree.vertex_count(), bags.len(), "one bag per tree node");
        TreeDecomposition {
            tree,
            bags,
            vertex_universe,
        }
    }

    /// The decomposition with a single bag holding every vertex.
    pub fn trivial(g: &Graph) -> Self {
        TreeDecomposition::new(
            Graph::new(1),
            vec![(0..g.vertex_count()).collect()],
            g.vertex_count(),
        )
    }

    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &BTreeSet<usize> {
        &self.bags[node]
    }

    pub fn vertex_universe(&self) -> usize {
        self.vertex_universe
    }

    /// Max bag size minus one (0 for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Violations checkable without the host graph's edges: index tree
    /// shape, bag ranges, coverage of the universe, connected traces.
    fn structural_violations(&self) -> Vec<DecompositionViolation> {
        let mut violations = Vec::new();
        let nodes = self.tree.vertex_count();
        let edges = self.tree.edge_count();
        let tree_ok = nodes >= 1 && edges + 1 == nodes && {
            let reach = self.tree.multi_source_distances(&[0]).unwrap();
            reach.iter().all(|d| d.is_finite())
        };
        if !tree_ok {
            violations.push(DecompositionViolation::IndexNotATree { nodes, edges });
        }
        for (node, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= self.vertex_universe {
                    violations.push(DecompositionViolation::BagVertexOutOfRange { node, v });
                }
            }
        }
        for v in 0..self.vertex_universe {
            let trace: Vec<usize> = (0..nodes).filter(|&t| self.bags[t].contains(&v)).collect();
            if trace.is_empty() {
                violations.push(DecompositionViolation::VertexNotCovered { v });
                continue;
            }
            if tree_ok && !self.trace_connected(&trace) {
                violations.push(DecompositionViolation::DisconnectedTrace { v });
            }
        }
        violations
    }

    fn trace_connected(&self, trace: &[usize]) -> bool {
        let in_trace: BTreeSet<usize> = trace.iter().copied().collect();
        let mut seen = BTreeSet::from([trace[0]]);
        let mut queue = VecDeque::from([trace[0]]);
        while let Some(t) = queue.pop_front() {
            for &u in self.tree.neighbors(t) {
                if in_trace.contains(&u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen.len() == trace.len()
    }

    /// Checks all decomposition conditions against `g` and returns the width,
    /// or the full list of violations with witnesses.
    pub fn validate(&self, g: &Graph) -> Result<usize, Vec<DecompositionViolation>> {
        let mut violations = Vec::new();
        if g.vertex_count() != self.vertex_universe {
            violations.push(DecompositionViolation::UniverseMismatch {
                graph: g.vertex_count(),
                decomposition: self.vertex_universe,
            });
        }
        violations.extend(self.structural_violations());
        for (u, v) in g.edges() {
            let covered = self
                .bags
                .iter()
                .any(|bag| bag.contains(&u) && bag.contains(&v));
            if !covered {
                violations.push(DecompositionViolation::EdgeNotCovered { u, v });
            }
        }
        if violations.is_empty() {
            Ok(self.width())
        } else {
            Err(violations)
        }
    }
}

/// True iff the index tree has maximum degree at most 2.
pub fn is_path_decomposition(td: &TreeDecomposition) -> bool {
    (0..td.tree().vertex_count()).all(|t| td.tree().degree(t) <= 2)
}

/// A tree-decomposition with a chosen root, parent/depth arrays, and the
/// per-vertex root bag map.
#[derive(Debug, Clone)]
pub struct RootedTreeDecomposition {
    td: TreeDecomposition,
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// Tree nodes in BFS order from the root; parents precede children.
    traversal: Vec<usize>,
    /// For each host vertex, the unique minimum-depth node whose bag holds it.
    root_bag: Vec<usize>,
}

impl RootedTreeDecomposition {
    /// Roots a structurally valid decomposition at tree node `root`.
    ///
    /// Structural validity (tree shape, nonempty connected traces) is
    /// rechecked here because the root-bag map is only well defined then.
    pub fn root_at(td: TreeDecomposition, root: usize) -> Result<Self, DecompError> {
        let nodes = td.tree().vertex_count();
        if root >= nodes {
            return Err(DecompError::NodeOutOfRange { node: root, nodes });
        }
        let violations = td.structural_violations();
        if !violations.is_empty() {
            return Err(DecompError::Invalid(violations));
        }
        let mut parent = vec![None; nodes];
        let mut depth = vec![0usize; nodes];
        let mut traversal = Vec::with_capacity(nodes);
        let mut seen = vec![false; nodes];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(t) = queue.pop_front() {
            traversal.push(t);
            for &u in td.tree().neighbors(t) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(t);
                    depth[u] = depth[t] + 1;
                    queue.push_back(u);
                }
            }
        }
        let mut root_bag = vec![usize::MAX; td.vertex_universe()];
        for v in 0..td.vertex_universe() {
            // unique by the connected-trace property
            root_bag[v] = (0..nodes)
                .filter(|&t| td.bag(t).contains(&v))
                .min_by_key(|&t| (depth[t], t))
                .expect("traces are nonempty");
        }
        Ok(RootedTreeDecomposition {
            td,
            root,
            parent,
            depth,
            traversal,
            root_bag,
        })
    }

    pub fn td(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// Tree nodes in BFS order from the root.
    pub fn traversal(&self) -> &[usize] {
        &self.traversal
    }

    pub fn root_bag(&self, v: usize) -> usize {
        self.root_bag[v]
    }

    /// Ancestor in the rooted tree; reflexive (`t` is an ancestor of `t`).
    pub fn is_ancestor(&self, anc: usize, node: usize) -> bool {
        let mut cur = node;
        loop {
            if cur == anc {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// `node`, its parent, ..., up to the root.
    pub fn ancestors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let mut cur = Some(node);
        std::iter::from_fn(move || {
            let t = cur?;
            cur = self.parent[t];
            Some(t)
        })
    }
}

/// Total priority order on host vertices. Rank 0 is the highest priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    rank: Vec<usize>,
}

impl PriorityOrder {
    /// Builds an order from explicit ranks; must be a permutation of 0..n.
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self, DecompError> {
        let n = rank.len();
        let mut seen = vec![false; n];
        for &r in &rank {
            if r >= n || seen[r] {
                return Err(DecompError::NotAPermutation(n));
            }
            seen[r] = true;
        }
        Ok(PriorityOrder { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn higher_priority(&self, u: usize, v: usize) -> bool {
        self.rank[u] < self.rank[v]
    }

    /// Vertices from highest to lowest priority.
    pub fn by_priority(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = (0..self.rank.len()).collect();
        vs.sort_by_key(|&v| self.rank[v]);
        vs
    }
}

/// Priority order induced by a rooted decomposition: vertices sorted by the
/// depth of their root bag (shallower first), ties by vertex id. If the root
/// bag of `u` is a strict ancestor of the root bag of `v`, then `u` has
/// higher priority, because strict ancestors have strictly smaller depth.
pub fn priority_order(g: &Graph, rtd: &RootedTreeDecomposition) -> PriorityOrder {
    assert_eq!(
        g.vertex_count(),
        rtd.td().vertex_universe(),
        "decomposition must cover the graph"
    );
    let n = g.vertex_count();
    let mut vs: Vec<usize> = (0..n).collect();
    vs.sort_by_key(|&v| (rtd.depth(rtd.root_bag(v)), v));
    let mut rank = vec![0usize; n];
    for (r, &v) in vs.iter().enumerate() {
        rank[v] = r;
    }
    PriorityOrder { rank }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationStrategy {
    MinFill,
    MinDegree,
}

/// Heuristic tree-decomposition from an elimination ordering. Valid on every
/// input; width is not guaranteed optimal.
pub fn heuristic_td(g: &Graph, strategy: EliminationStrategy) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::new(Graph::new(1), vec![BTreeSet::new()], 0);
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: Vec<bool> = vec![true; n];
    let fill_count = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                if !adj[x].contains(&y) {
                    missing += 1;
                }
            }
        }
        missing
    };

    let mut bags: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut position = vec![usize::MAX; n];
    let mut elim: Vec<usize> = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| match strategy {
                EliminationStrategy::MinDegree => (adj[v].len(), v),
                EliminationStrategy::MinFill => (fill_count(&adj, v), v),
            })
            .unwrap();
        let mut bag: BTreeSet<usize> = adj[v].clone();
        bag.insert(v);
        bags.push(bag);
        position[v] = step;
        elim.push(v);
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        for &x in &nbrs {
            adj[x].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
    }

    let mut tree = Graph::new(n);
    let mut roots = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let v = elim[i];
        match bag.iter().filter(|&&w| w != v).map(|&w| position[w]).min() {
            Some(p) => tree
                .add_edge(i, p)
                .expect("elimination tree edges are simple"),
            None => roots.push(i),
        }
    }
    // components yield separate elimination roots; chain them so the index
    // graph is one tree
    for w in roots.windows(2) {
        tree.add_edge(w[0], w[1]).unwrap();
    }
    contract_nested_bags(TreeDecomposition::new(tree, bags, n))
}

/// Heuristic path-decomposition: a left-to-right interval construction over
/// a BFS vertex order. `bag[i]` holds the i-th vertex plus every earlier
/// vertex that still has a neighbour at position >= i.
pub fn heuristic_pd(g: &Graph) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::new(Graph::new(1), vec![BTreeSet::new()], 0);
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let last = |v: usize| -> usize {
        g.neighbors(v)
            .iter()
            .map(|&w| pos[w])
            .max()
            .unwrap_or(pos[v])
            .max(pos[v])
    };
    let bags: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| {
            order[..=i]
                .iter()
                .copied()
                .filter(|&v| last(v) >= i)
                .collect()
        })
        .collect();
    contract_nested_bags(TreeDecomposition::new(Graph::path(n), bags, n))
}

/// Contracts tree edges whose endpoint bags are nested. This preserves
/// validity and never increases node degrees, so path shapes survive.
fn contract_nested_bags(td: TreeDecomposition) -> TreeDecomposition {
    let n = td.tree().vertex_count();
    let mut nbrs: Vec<BTreeSet<usize>> = (0..n)
        .map(|t| td.tree().neighbors(t).iter().copied().collect())
        .collect();
    let bags: Vec<BTreeSet<usize>> = td.bags().to_vec();
    let mut active: Vec<bool> = vec![true; n];
    loop {
        let mut contracted = false;
        'scan: for i in 0..n {
            if !active[i] {
                continue;
            }
            for &j in nbrs[i].clone().iter() {
                if bags[i].is_subset(&bags[j]) {
                    // fold i into j
                    for &k in nbrs[i].clone().iter() {
                        nbrs[k].remove(&i);
                        if k != j {
                            nbrs[k].insert(j);
                            nbrs[j].insert(k);
                        }
                    }
                    nbrs[i].clear();
                    active[i] = false;
                    contracted = true;
                    continue 'scan;
                }
            }
        }
        if !contracted {
            break;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&t| active[t]).collect();
    // the last active node has no active neighbour to fold into
    assert!(!kept.is_empty());
    let mut new_id = vec![usize::MAX; n];
    for (id, &t) in kept.iter().enumerate() {
        new_id[t] = id;
    }
    let mut tree = Graph::new(kept.len());
    for &t in &kept {
        for &u in &nbrs[t] {
            if new_id[t] < new_id[u] {
                tree.add_edge(new_id[t], new_id[u]).unwrap();
            }
        }
    }
    let new_bags = kept.iter().map(|&t| bags[t].clone()).collect();
    TreeDecomposition::new(tree, new_bags, td.vertex_universe())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3_decomposition() -> TreeDecomposition {
        TreeDecomposition::new(
            Graph::path(2),
            vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])],
            3,
        )
    }

    #[test]
    fn trivial_decomposition_width() {
        let g = Graph::cycle(5);
        let td = TreeDecomposition::trivial(&g);
        assert_eq!(td.validate(&g).unwrap(), 4);

        let k4 = Graph::complete(4);
        assert_eq!(TreeDecomposition::trivial(&k4).validate(&k4).unwrap(), 3);
    }

    #[test]
    fn p3_two_bags_has_width_one() {
        let g = Graph::path(3);
        assert_eq!(p3_decomposition().validate(&g).unwrap(), 1);
    }

    #[test]
    fn violations_carry_witnesses() {
        let g = Graph::path(3);
        // drop vertex 2 entirely
        let td = TreeDecomposition::new(
            Graph::path(2),
            vec![BTreeSet::from([0, 1]), BTreeSet::from([1])],
            3,
        );
        let errs = td.validate(&g).unwrap_err();
        assert!(errs.contains(&DecompositionViolation::VertexNotCovered { v: 2 }));
        assert!(errs.contains(&DecompositionViolation::EdgeNotCovered { u: 1, v: 2 }));

        // disconnected trace for vertex 0
        let td = TreeDecomposition::new(
            Graph::path(3),
            vec![
                BTreeSet::from([0, 1]),
                BTreeSet::from([1, 2]),
                BTreeSet::from([0, 2]),
            ],
            3,
        );
        let errs = td.validate(&g).unwrap_err();
        assert!(errs.contains(&DecompositionViolation::DisconnectedTrace { v: 0 }));

        // index graph not a tree
        let td = TreeDecomposition::new(
            Graph::new(2),
            vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([1, 2])],
            3,
        );
        let errs = td.validate(&g).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, DecompositionViolation::IndexNotATree { .. })));
    }

    #[test]
    fn rooting_computes_root_bags() {
        let rtd = RootedTreeDecomposition::root_at(p3_decomposition(), 0).unwrap();
        assert_eq!(rtd.root_bag(0), 0);
        assert_eq!(rtd.root_bag(1), 0);
        assert_eq!(rtd.root_bag(2), 1);
        assert_eq!(rtd.depth(1), 1);
        assert!(rtd.is_ancestor(0, 1));
        assert!(rtd.is_ancestor(1, 1));
        assert!(!rtd.is_ancestor(1, 0));

        // rerooting moves the root bags consistently
        let rtd = RootedTreeDecomposition::root_at(p3_decomposition(), 1).unwrap();
        assert_eq!(rtd.root_bag(2), 1);
        assert_eq!(rtd.root_bag(1), 1);
        assert_eq!(rtd.root_bag(0), 0);
    }

    #[test]
    fn single_node_tree_roots_everything() {
        let g = Graph::complete(3);
        let rtd = RootedTreeDecomposition::root_at(TreeDecomposition::trivial(&g), 0).unwrap();
        for v in 0..3 {
            assert_eq!(rtd.root_bag(v), 0);
        }
    }

    #[test]
    fn rooting_rejects_invalid_input() {
        let td = TreeDecomposition::new(Graph::new(2), vec![BTreeSet::new(), BTreeSet::new()], 0);
        assert!(matches!(
            RootedTreeDecomposition::root_at(td, 0),
            Err(DecompError::Invalid(_))
        ));
        assert!(matches!(
            RootedTreeDecomposition::root_at(p3_decomposition(), 5),
            Err(DecompError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn priority_breaks_depth_ties_by_id() {
        let g = Graph::complete(3);
        let rtd = RootedTreeDecomposition::root_at(TreeDecomposition::trivial(&g), 0).unwrap();
        let order = priority_order(&g, &rtd);
        assert_eq!(order.by_priority(), vec![0, 1, 2]);
    }

    #[test]
    fn priority_respects_root_bag_depth() {
        let g = Graph::path(3);
        let rtd = RootedTreeDecomposition::root_at(p3_decomposition(), 0).unwrap();
        let order = priority_order(&g, &rtd);
        assert!(order.higher_priority(0, 2));
        assert!(order.higher_priority(1, 2));
        assert_eq!(order.by_priority(), vec![0, 1, 2]);
    }

    #[test]
    fn from_ranks_validates_permutation() {
        assert!(PriorityOrder::from_ranks(vec![1, 0, 2]).is_ok());
        assert!(PriorityOrder::from_ranks(vec![0, 0, 2]).is_err());
        assert!(PriorityOrder::from_ranks(vec![0, 3]).is_err());
    }

    #[test]
    fn heuristics_on_known_graphs() {
        for strategy in [EliminationStrategy::MinFill, EliminationStrategy::MinDegree] {
            // a tree has width 1 under both heuristics
            let tree = Graph::from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)]).unwrap();
            let td = heuristic_td(&tree, strategy);
            assert_eq!(td.validate(&tree).unwrap(), 1);

            let k5 = Graph::complete(5);
            assert_eq!(heuristic_td(&k5, strategy).validate(&k5).unwrap(), 4);

            let c6 = Graph::cycle(6);
            assert_eq!(heuristic_td(&c6, strategy).validate(&c6).unwrap(), 2);
        }
    }

    #[test]
    fn heuristic_handles_disconnected_graphs() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let td = heuristic_td(&g, EliminationStrategy::MinFill);
        assert_eq!(td.validate(&g).unwrap(), 1);
    }

    #[test]
    fn path_decomposition_shape_checks() {
        let single = TreeDecomposition::new(Graph::new(1), vec![BTreeSet::new()], 0);
        assert!(is_path_decomposition(&single));
        assert!(is_path_decomposition(&p3_decomposition()));

        let star_tree = Graph::star(3);
        let td = TreeDecomposition::new(star_tree, vec![BTreeSet::new(); 4], 0);
        assert!(!is_path_decomposition(&td));
    }

    #[test]
    fn heuristic_pd_is_a_valid_path_decomposition() {
        let g = Graph::path(7);
        let td = heuristic_pd(&g);
        assert!(is_path_decomposition(&td));
        assert_eq!(td.validate(&g).unwrap(), 1);

        // caterpillar: path 0-1-2-3 with leaves hanging off
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let td = heuristic_pd(&g);
        assert!(is_path_decomposition(&td));
        assert!(td.validate(&g).is_ok());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            let len = pairs.len();
            proptest::collection::vec(proptest::bool::weighted(0.3), len).prop_map(move |mask| {
                let mut g = Graph::new(n);
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask[i] {
                        g.add_edge(u, v).unwrap();
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn heuristics_always_validate(g in arb_graph(12), min_fill in any::<bool>()) {
            let strategy = if min_fill {
                EliminationStrategy::MinFill
            } else {
                EliminationStrategy::MinDegree
            };
            let td = heuristic_td(&g, strategy);
            prop_assert!(td.validate(&g).is_ok());
        }

        #[test]
        fn heuristic_pd_always_validates_and_is_path_shaped(g in arb_graph(12)) {
            let td = heuristic_pd(&g);
            prop_assert!(is_path_decomposition(&td));
            prop_assert!(td.validate(&g).is_ok());
        }

        #[test]
        fn root_bag_is_ancestor_of_every_trace_node(g in arb_graph(10), root_pick in any::<proptest::sample::Index>()) {
            let td = heuristic_td(&g, EliminationStrategy::MinFill);
            let root = root_pick.index(td.tree().vertex_count());
            let rtd = RootedTreeDecomposition::root_at(td, root).unwrap();
            for v in 0..g.vertex_count() {
                for t in 0..rtd.td().tree().vertex_count() {
                    if rtd.td().bag(t).contains(&v) {
                        prop_assert!(rtd.is_ancestor(rtd.root_bag(v), t));
                    }
                }
            }
        }

        #[test]
        fn strict_ancestor_root_bags_mean_higher_priority(g in arb_graph(10), root_pick in any::<proptest::sample::Index>()) {
            let td = heuristic_td(&g, EliminationStrategy::MinDegree);
            let root = root_pick.index(td.tree().vertex_count());
            let rtd = RootedTreeDecomposition::root_at(td, root).unwrap();
            let order = priority_order(&g, &rtd);
            let n = g.vertex_count();
            for u in 0..n {
                for v in 0..n {
                    if u != v
                        && rtd.root_bag(u) != rtd.root_bag(v)
                        && rtd.is_ancestor(rtd.root_bag(u), rtd.root_bag(v))
                    {
                        prop_assert!(order.higher_priority(u, v));
                    }
                }
            }
        }
    }
}
