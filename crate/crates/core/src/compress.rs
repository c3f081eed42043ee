//! Centre-based compressing partitions.
//!
//! Given a graph `G`, a rooted decomposition of width `k`, and a level
//! `ell >= 0`, the builder walks the tree from the root and maintains, per
//! tree node `t`, a set of at most `k+1` *centres* `B_t` (vertices of `G`).
//! Around each centre two nested zones grow with the centre's age:
//!
//! * its *security*, the `(|B| - 1 - penalty) * ell`-ball, and
//! * its *coverage*, the `(|B| - penalty) * ell`-ball,
//!
//! where the *penalty* of a centre counts the strictly higher-priority
//! centres in the same set, so older centres get larger zones. Every bag
//! vertex is kept inside the security of its node's centres; when a centre
//! is dropped on the way down, anything that could still lean on it (its
//! *leak* through the child bag) is already secured by the surviving
//! centres. Each vertex of `G` is assigned to the highest-priority centre
//! whose coverage reaches it at an ancestor of its root bag.
//!
//! The outcome: an index graph `H` on the centres (adjacent iff co-bagged),
//! a decomposition `(B_t)` of `H` of width at most `k` over the same tree,
//! and a partition of `V(G)` indexed by `V(H)` in which parts at distance
//! at most `ell` always carry adjacent indices, while every part sits
//! inside the `(k+1)*ell`-ball of its centre.
//!
//! [`verify_result`] rechecks all of this from scratch and reports
//! violations as data; the builder itself asserts its inductive invariants
//! and aborts with the claim name if one breaks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{
    priority_order, DecompError, DecompositionViolation, PriorityOrder, RootedTreeDecomposition,
    TreeDecomposition,
};
use crate::graph::{Dist, Graph, GraphError};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("compression level must be nonnegative, got {0}")]
    NegativeLevel(Scalar),
    #[error("vertex {x} is not a centre")]
    NotACentre { x: usize },
    #[error("centre set is empty")]
    NoCentres,
    #[error("no centre is reachable from vertex {v}")]
    NoReachableCentre { v: usize },
    #[error("decomposition rejected: {0}")]
    InvalidDecomposition(String),
    #[error("precondition `{condition}` violated: {witness}")]
    Precondition {
        condition: &'static str,
        witness: String,
    },
    #[error("internal invariant `{claim}` failed{}: {detail}", node_suffix(*.node))]
    InternalClaim {
        claim: &'static str,
        node: Option<usize>,
        detail: String,
    },
}

fn node_suffix(node: Option<usize>) -> String {
    match node {
        Some(t) => format!(" at tree node {t}"),
        None => String::new(),
    }
}

fn claim(claim: &'static str, node: Option<usize>, detail: String) -> EngineError {
    EngineError::InternalClaim {
        claim,
        node,
        detail,
    }
}

/// The penalty of each centre: how many centres of `b` have strictly higher
/// priority. A bijection from `b` onto `0..b.len()`; the highest-priority
/// centre gets 0.
pub fn penalty_map(order: &PriorityOrder, b: &BTreeSet<usize>) -> BTreeMap<usize, usize> {
    b.iter()
        .map(|&x| {
            let penalty = b.iter().filter(|&&y| order.higher_priority(y, x)).count();
            (x, penalty)
        })
        .collect()
}

/// A centre set with its penalties, zone radii, and cached BFS rows.
pub struct CentreContext<'a> {
    graph: &'a Graph,
    order: &'a PriorityOrder,
    ell: Scalar,
    centres: BTreeSet<usize>,
    penalty: BTreeMap<usize, usize>,
    dist: BTreeMap<usize, Vec<Dist>>,
}

impl<'a> CentreContext<'a> {
    pub fn new(
        graph: &'a Graph,
        order: &'a PriorityOrder,
        ell: &Scalar,
        centres: &BTreeSet<usize>,
    ) -> Result<Self, EngineError> {
        if ell.is_negative() {
            return Err(EngineError::NegativeLevel(ell.clone()));
        }
        let dist = centres
            .iter()
            .map(|&x| Ok((x, graph.multi_source_distances(&[x])?)))
            .collect::<Result<_, GraphError>>()?;
        Ok(CentreContext {
            graph,
            order,
            ell: ell.clone(),
            penalty: penalty_map(order, centres),
            centres: centres.clone(),
            dist,
        })
    }

    pub fn centres(&self) -> &BTreeSet<usize> {
        &self.centres
    }

    pub fn ell(&self) -> &Scalar {
        &self.ell
    }

    pub fn penalty(&self, x: usize) -> Result<usize, EngineError> {
        self.penalty
            .get(&x)
            .copied()
            .ok_or(EngineError::NotACentre { x })
    }

    pub fn dist_from_centre(&self, x: usize, v: usize) -> Result<Dist, EngineError> {
        Ok(self.dist.get(&x).ok_or(EngineError::NotACentre { x })?[v])
    }

    /// `(|B| - 1 - penalty(x)) * ell`
    pub fn security_radius(&self, x: usize) -> Result<Scalar, EngineError> {
        let p = self.penalty(x)?;
        Ok(self.ell.scale(self.centres.len() - 1 - p))
    }

    /// `(|B| - penalty(x)) * ell`
    pub fn coverage_radius(&self, x: usize) -> Result<Scalar, EngineError> {
        let p = self.penalty(x)?;
        Ok(self.ell.scale(self.centres.len() - p))
    }

    pub fn in_security(&self, x: usize, v: usize) -> Result<bool, EngineError> {
        Ok(self
            .dist_from_centre(x, v)?
            .le_scalar(&self.security_radius(x)?))
    }

    pub fn in_coverage(&self, x: usize, v: usize) -> Result<bool, EngineError> {
        Ok(self
            .dist_from_centre(x, v)?
            .le_scalar(&self.coverage_radius(x)?))
    }

    fn ball_union(
        &self,
        sub: &BTreeSet<usize>,
        radius: impl Fn(&Self, usize) -> Result<Scalar, EngineError>,
    ) -> Result<BTreeSet<usize>, EngineError> {
        let mut out = BTreeSet::new();
        for &x in sub {
            let r = radius(self, x)?;
            let row = self.dist.get(&x).ok_or(EngineError::NotACentre { x })?;
            out.extend((0..self.graph.vertex_count()).filter(|&v| row[v].le_scalar(&r)));
        }
        Ok(out)
    }

    /// Union of the security balls of `sub` (a subset of the centres).
    pub fn security(&self, sub: &BTreeSet<usize>) -> Result<BTreeSet<usize>, EngineError> {
        self.ball_union(sub, Self::security_radius)
    }

    /// Union of the coverage balls of `sub`.
    pub fn coverage(&self, sub: &BTreeSet<usize>) -> Result<BTreeSet<usize>, EngineError> {
        self.ball_union(sub, Self::coverage_radius)
    }

    /// Vertices that reach past `j` on centre `x`'s coverage budget without
    /// being covered by any higher-priority centre: `v` qualifies iff some
    /// `z` in `j` has `dist(v, z) <= coverage_radius(x) - dist(x, z)`.
    /// Unreachable `z` contribute nothing.
    pub fn leak(&self, x: usize, j: &BTreeSet<usize>) -> Result<BTreeSet<usize>, EngineError> {
        let cov = self.coverage_radius(x)?;
        let mut budgets = Vec::new();
        for &z in j {
            if let Dist::Finite(dxz) = self.dist_from_centre(x, z)? {
                let budget = cov.minus_usize(dxz);
                if !budget.is_negative() {
                    budgets.push((self.graph.multi_source_distances(&[z])?, budget));
                }
            }
        }
        let higher: Vec<usize> = self
            .centres
            .iter()
            .copied()
            .filter(|&y| self.order.higher_priority(y, x))
            .collect();
        let mut out = BTreeSet::new();
        'vertices: for v in 0..self.graph.vertex_count() {
            if !budgets.iter().any(|(row, budget)| row[v].le_scalar(budget)) {
                continue;
            }
            for &y in &higher {
                if self.in_coverage(y, v)? {
                    continue 'vertices;
                }
            }
            out.insert(v);
        }
        Ok(out)
    }

    /// The centre minimising `dist(x, v) + penalty(x) * ell`; ties go to the
    /// higher-priority centre. Unreachable centres count as infinitely far.
    pub fn local_assign(&self, v: usize) -> Result<usize, EngineError> {
        if self.centres.is_empty() {
            return Err(EngineError::NoCentres);
        }
        self.local_assign_opt(v)
            .ok_or(EngineError::NoReachableCentre { v })
    }

    fn local_assign_opt(&self, v: usize) -> Option<usize> {
        let mut best: Option<(Scalar, usize, usize)> = None;
        for &x in &self.centres {
            let Dist::Finite(d) = self.dist[&x][v] else {
                continue;
            };
            let cost = &Scalar::from_usize(d) + &self.ell.scale(self.penalty[&x]);
            let rank = self.order.rank(x);
            let better = match &best {
                None => true,
                Some((bc, br, _)) => cost < *bc || (cost == *bc && rank < *br),
            };
            if better {
                best = Some((cost, rank, x));
            }
        }
        best.map(|(_, _, x)| x)
    }
}

/// Finds an endpoint pair witnessing that `s` fails to separate `a` from
/// `b`, if any.
fn separation_escape(
    g: &Graph,
    s: &BTreeSet<usize>,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
) -> Result<Option<(usize, usize)>, GraphError> {
    let a_vec: Vec<usize> = a.iter().copied().collect();
    let b_vec: Vec<usize> = b.iter().copied().collect();
    let s_vec: Vec<usize> = s.iter().copied().collect();
    if g.is_separator(&s_vec, &a_vec, &b_vec)? {
        return Ok(None);
    }
    for &start in &a_vec {
        if s.contains(&start) {
            continue;
        }
        for &end in &b_vec {
            if s.contains(&end) {
                continue;
            }
            if !g.is_separator(&s_vec, &[start], &[end])? {
                return Ok(Some((start, end)));
            }
        }
    }
    Ok(Some((a_vec[0], b_vec[0])))
}

/// Replaces the centre set `b` by one that secures the whole of `j`.
///
/// Preconditions (checked, violations reported):
/// 1. `j ∩ security(b)` separates `b` from `j`;
/// 2. every centre outranks every vertex of `j` outside `security(b)`.
///
/// Guarantees, asserted before returning:
/// * `|b| <= |b'| <= max(|b|, |j|)`;
/// * `j ⊆ security_{b'}(b')`;
/// * `b' \ b = j \ security_b(b)`;
/// * for each discarded centre `x`, `leak_b(x, j) ⊆ security_{b'}(b ∩ b')`.
pub fn change_providers(
    g: &Graph,
    order: &PriorityOrder,
    ell: &Scalar,
    b: &BTreeSet<usize>,
    j: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>, EngineError> {
    let ctx = CentreContext::new(g, order, ell, b)?;
    let b_new = change_providers_in(&ctx, j, None)?;
    assert_provider_change(g, order, ell, b, j, &b_new, None)?;
    Ok(b_new)
}

/// Core of [`change_providers`] against a prebuilt context. Postcondition
/// assertions are the caller's job.
fn change_providers_in(
    ctx: &CentreContext<'_>,
    j: &BTreeSet<usize>,
    node: Option<usize>,
) -> Result<BTreeSet<usize>, EngineError> {
    let g = ctx.graph;
    let order = ctx.order;
    let b = &ctx.centres;
    g.multi_source_distances(&j.iter().copied().collect::<Vec<_>>())?; // id range check
    let security_b = ctx.security(b)?;

    let interface: BTreeSet<usize> = j.intersection(&security_b).copied().collect();
    if let Some((from, to)) = separation_escape(g, &interface, b, j)? {
        return Err(EngineError::Precondition {
            condition: "interface-separates-centres-from-bag",
            witness: format!(
                "path from centre-side vertex {from} to bag vertex {to} avoids the interface{}",
                node_suffix(node)
            ),
        });
    }
    for &u in b {
        for &v in j {
            if !security_b.contains(&v) && !order.higher_priority(u, v) {
                return Err(EngineError::Precondition {
                    condition: "centres-outrank-unsecured-bag-vertices",
                    witness: format!(
                        "centre {u} does not outrank unsecured bag vertex {v}{}",
                        node_suffix(node)
                    ),
                });
            }
        }
    }

    if b.is_empty() {
        return Ok(j.clone());
    }

    // secured bag vertices stay anchored to the centre they belong to
    let mut anchored: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &v in j {
        if let Some(x) = ctx.local_assign_opt(v) {
            if ctx.in_security(x, v)? {
                anchored.entry(x).or_default().insert(v);
            }
        }
    }
    let secured: BTreeSet<usize> = anchored.values().flatten().copied().collect();
    if secured.len() == j.len() {
        return Ok(b.clone());
    }

    let unsecured: BTreeSet<usize> = j.difference(&secured).copied().collect();
    let idle: BTreeSet<usize> = b
        .iter()
        .copied()
        .filter(|x| !anchored.contains_key(x))
        .collect();
    let drop_count = unsecured.len().min(idle.len());
    // drop the lowest-priority idle centres
    let mut idle_by_rank: Vec<usize> = idle.iter().copied().collect();
    idle_by_rank.sort_by_key(|&x| std::cmp::Reverse(order.rank(x)));
    let dropped: BTreeSet<usize> = idle_by_rank.into_iter().take(drop_count).collect();

    Ok(b.difference(&dropped)
        .chain(unsecured.iter())
        .copied()
        .collect())
}

/// Asserts the four [`change_providers`] guarantees for a computed `b_new`.
fn assert_provider_change(
    g: &Graph,
    order: &PriorityOrder,
    ell: &Scalar,
    b: &BTreeSet<usize>,
    j: &BTreeSet<usize>,
    b_new: &BTreeSet<usize>,
    node: Option<usize>,
) -> Result<(), EngineError> {
    let ctx_old = CentreContext::new(g, order, ell, b)?;
    let ctx_new = CentreContext::new(g, order, ell, b_new)?;

    if !(b.len() <= b_new.len() && b_new.len() <= b.len().max(j.len())) {
        return Err(claim(
            "centre-count-bounds",
            node,
            format!("|b|={}, |b'|={}, |j|={}", b.len(), b_new.len(), j.len()),
        ));
    }
    let security_new = ctx_new.security(b_new)?;
    if let Some(&v) = j.iter().find(|v| !security_new.contains(v)) {
        return Err(claim(
            "bag-secured-by-new-centres",
            node,
            format!("bag vertex {v} is outside the new security"),
        ));
    }
    let security_old = ctx_old.security(b)?;
    let added: BTreeSet<usize> = b_new.difference(b).copied().collect();
    let expected: BTreeSet<usize> = j.difference(&security_old).copied().collect();
    if added != expected {
        return Err(claim(
            "new-centres-are-exactly-unsecured-bag-vertices",
            node,
            format!("added {added:?}, expected {expected:?}"),
        ));
    }
    let kept: BTreeSet<usize> = b.intersection(b_new).copied().collect();
    let kept_security = ctx_new.security(&kept)?;
    for &x in b.difference(b_new) {
        let leak = ctx_old.leak(x, j)?;
        if let Some(&v) = leak.iter().find(|v| !kept_security.contains(v)) {
            return Err(claim(
                "discarded-centre-leak-contained",
                node,
                format!("vertex {v} leaks from discarded centre {x}"),
            ));
        }
    }
    Ok(())
}

/// One centre-replacement step of a build, recorded for replay against
/// independent checkers.
#[derive(Debug, Clone)]
pub struct BuildStep {
    pub node: usize,
    pub parent: usize,
    pub parent_centres: BTreeSet<usize>,
    pub bag: BTreeSet<usize>,
    pub new_centres: BTreeSet<usize>,
}

/// The index graph, its decomposition, the partition, and the assignment
/// data produced by [`build_compressing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionResult {
    /// V(H): the centres, a subset of V(G).
    pub centres: BTreeSet<usize>,
    /// E(H) over centre ids, each pair ordered (u < v).
    pub h_edges: BTreeSet<(usize, usize)>,
    /// B_t per tree node, indexed like the decomposition's tree.
    pub bags: Vec<BTreeSet<usize>>,
    /// Part of each centre; empty parts are retained.
    pub parts: BTreeMap<usize, BTreeSet<usize>>,
    /// Assigned centre per graph vertex.
    pub centre_of: Vec<usize>,
    /// Witness tree node per graph vertex: the deepest ancestor of the
    /// vertex's root bag at which the assigned centre's coverage reaches it.
    pub witness_node: Vec<usize>,
    /// Compression level the result was built for.
    pub ell: Scalar,
    /// Width of the input decomposition.
    pub k: usize,
}

impl CompressionResult {
    /// Dense index graph plus the map dense-id -> centre vertex.
    pub fn index_graph(&self) -> (Graph, Vec<usize>) {
        let ids: Vec<usize> = self.centres.iter().copied().collect();
        let mut to_dense = BTreeMap::new();
        for (i, &x) in ids.iter().enumerate() {
            to_dense.insert(x, i);
        }
        let mut h = Graph::new(ids.len());
        for &(u, v) in &self.h_edges {
            h.add_edge(to_dense[&u], to_dense[&v]).unwrap();
        }
        (h, ids)
    }

    pub fn to_doc(&self) -> CompressionDoc {
        CompressionDoc {
            index: GraphDoc {
                vertices: self.centres.iter().copied().collect(),
                edges: self.h_edges.iter().copied().collect(),
            },
            bags: self
                .bags
                .iter()
                .enumerate()
                .map(|(t, b)| (t, b.iter().copied().collect()))
                .collect(),
            parts: self
                .parts
                .iter()
                .map(|(&x, p)| (x, p.iter().copied().collect()))
                .collect(),
            centre_of: self.centre_of.iter().copied().enumerate().collect(),
            ell: self.ell.clone(),
            k: self.k,
            bound: None,
        }
    }
}

/// Graph fragment of the JSON artifacts: explicit vertex list plus edges.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// JSON artifact for a compression result. Keys are emitted in declaration
/// order and maps sort numerically, so outputs are diffable.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompressionDoc {
    #[serde(rename = "H")]
    pub index: GraphDoc,
    pub bags: BTreeMap<usize, Vec<usize>>,
    pub parts: BTreeMap<usize, Vec<usize>>,
    pub centre_of: BTreeMap<usize, usize>,
    pub ell: Scalar,
    pub k: usize,
    /// Weak-diameter bound `2(k+1)ell`, filled in by the CLI.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Scalar>,
}

pub fn build_compressing(
    g: &Graph,
    rtd: &RootedTreeDecomposition,
    ell: &Scalar,
) -> Result<CompressionResult, EngineError> {
    build_compressing_traced(g, rtd, ell).map(|(res, _)| res)
}

/// As [`build_compressing`], additionally returning the per-node
/// centre-replacement steps.
pub fn build_compressing_traced(
    g: &Graph,
    rtd: &RootedTreeDecomposition,
    ell: &Scalar,
) -> Result<(CompressionResult, Vec<BuildStep>), EngineError> {
    if ell.is_negative() {
        return Err(EngineError::NegativeLevel(ell.clone()));
    }
    let k = rtd
        .td()
        .validate(g)
        .map_err(|vs| EngineError::InvalidDecomposition(format_violation_list(&vs)))?;
    let order = priority_order(g, rtd);
    let nodes = rtd.td().tree().vertex_count();

    let mut bags: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes];
    let mut ctxs: Vec<Option<CentreContext<'_>>> = Vec::with_capacity(nodes);
    ctxs.resize_with(nodes, || None);
    let mut steps = Vec::new();

    for &t in rtd.traversal() {
        let bag = rtd.td().bag(t);
        let b_t = match rtd.parent(t) {
            None => bag.clone(),
            Some(parent) => {
                let parent_ctx = ctxs[parent].as_ref().expect("parents precede children");
                let b_t = change_providers_in(parent_ctx, bag, Some(t))?;
                assert_provider_change(g, &order, ell, parent_ctx.centres(), bag, &b_t, Some(t))?;
                steps.push(BuildStep {
                    node: t,
                    parent,
                    parent_centres: parent_ctx.centres().clone(),
                    bag: bag.clone(),
                    new_centres: b_t.clone(),
                });
                b_t
            }
        };
        if b_t.len() > k + 1 {
            return Err(claim(
                "bag-size-bound",
                Some(t),
                format!("{} centres exceed width bound {}", b_t.len(), k + 1),
            ));
        }
        for &x in &b_t {
            if !rtd.is_ancestor(rtd.root_bag(x), t) {
                return Err(claim(
                    "centre-roots-are-ancestors",
                    Some(t),
                    format!("root bag of centre {x} is not an ancestor"),
                ));
            }
        }
        let ctx = CentreContext::new(g, &order, ell, &b_t)?;
        if let Some(&v) = bag
            .iter()
            .find(|&&v| !b_t.iter().any(|&x| ctx.in_security(x, v).unwrap_or(false)))
        {
            return Err(claim(
                "bag-secured",
                Some(t),
                format!("bag vertex {v} lies outside every centre's security"),
            ));
        }
        bags[t] = b_t;
        ctxs[t] = Some(ctx);
    }

    let centres: BTreeSet<usize> = bags.iter().flatten().copied().collect();
    let mut h_edges = BTreeSet::new();
    for bag in &bags {
        let vs: Vec<usize> = bag.iter().copied().collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                h_edges.insert((u, v));
            }
        }
    }

    let n = g.vertex_count();
    let mut centre_of = vec![usize::MAX; n];
    let mut witness_node = vec![usize::MAX; n];
    for v in 0..n {
        // walk ancestors of the root bag bottom-up: the first hit per centre
        // is the deepest witness, and the highest-priority centre wins
        let mut best: Option<(usize, usize, usize)> = None; // (rank, x, t*)
        for t_star in rtd.ancestors(rtd.root_bag(v)) {
            let ctx = ctxs[t_star].as_ref().unwrap();
            for &x in &bags[t_star] {
                if !rtd.is_ancestor(rtd.root_bag(x), rtd.root_bag(v)) {
                    continue;
                }
                if !ctx.in_coverage(x, v)? {
                    continue;
                }
                let rank = order.rank(x);
                if best.map_or(true, |(br, _, _)| rank < br) {
                    best = Some((rank, x, t_star));
                }
            }
        }
        let Some((_, x, t_star)) = best else {
            return Err(claim(
                "assignment-exists",
                Some(rtd.root_bag(v)),
                format!("no centre covers vertex {v} at an ancestor of its root bag"),
            ));
        };
        centre_of[v] = x;
        witness_node[v] = t_star;
    }

    let mut parts: BTreeMap<usize, BTreeSet<usize>> =
        centres.iter().map(|&x| (x, BTreeSet::new())).collect();
    for v in 0..n {
        parts.get_mut(&centre_of[v]).unwrap().insert(v);
    }

    let result = CompressionResult {
        centres,
        h_edges,
        bags,
        parts,
        centre_of,
        witness_node,
        ell: ell.clone(),
        k,
    };
    Ok((result, steps))
}

fn format_violation_list(vs: &[DecompositionViolation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One verification finding; every variant carries a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckViolation {
    /// `centre_of`/`parts`/`bags` are structurally unusable.
    Malformed {
        detail: String,
    },
    /// V(H) differs from the union of the bags.
    IndexVerticesMismatch {
        missing_from_bags: Vec<usize>,
        extra_in_bags: Vec<usize>,
    },
    /// A co-bagged centre pair is not an index edge.
    CoBaggedPairNotEdge {
        node: usize,
        u: usize,
        v: usize,
    },
    /// The bag family fails a decomposition condition over the index graph.
    Decomposition(DecompositionViolation),
    BagTooLarge {
        node: usize,
        size: usize,
        bound: usize,
    },
    NotAPartition {
        v: usize,
        detail: String,
    },
    /// Parts closer than `ell` whose centres are not adjacent.
    CompressionViolated {
        x: usize,
        y: usize,
        distance: Dist,
        ell: Scalar,
    },
    PartOutsideCentreBall {
        x: usize,
        v: usize,
        distance: Dist,
        bound: Scalar,
    },
    WeakDiameterExceeded {
        x: usize,
        diameter: Dist,
        bound: Scalar,
    },
    BagSizeNotMonotone {
        ancestor: usize,
        node: usize,
        ancestor_size: usize,
        size: usize,
    },
    PenaltyNotMonotone {
        ancestor: usize,
        node: usize,
        centre: usize,
    },
    /// The shallowest bag containing a centre differs from its root bag.
    TraceRootMismatch {
        centre: usize,
        trace_root: usize,
        root_bag: usize,
    },
}

impl std::fmt::Display for CheckViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use CheckViolation::*;
        match self {
            Malformed { detail } => write!(f, "malformed result: {detail}"),
            IndexVerticesMismatch {
                missing_from_bags,
                extra_in_bags,
            } => write!(
                f,
                "index vertex set mismatch: missing from bags {missing_from_bags:?}, extra in bags {extra_in_bags:?}"
            ),
            CoBaggedPairNotEdge { node, u, v } => {
                write!(f, "centres {u},{v} share bag {node} but are not adjacent")
            }
            Decomposition(v) => write!(f, "index decomposition: {v}"),
            BagTooLarge { node, size, bound } => {
                write!(f, "bag {node} has {size} centres, bound {bound}")
            }
            NotAPartition { v, detail } => write!(f, "vertex {v}: {detail}"),
            CompressionViolated {
                x,
                y,
                distance,
                ell,
            } => write!(
                f,
                "parts of {x} and {y} at distance {distance} <= {ell} but centres not adjacent"
            ),
            PartOutsideCentreBall {
                x,
                v,
                distance,
                bound,
            } => write!(
                f,
                "vertex {v} in part of {x} at distance {distance} > bound {bound}"
            ),
            WeakDiameterExceeded { x, diameter, bound } => {
                write!(f, "part of {x} has weak diameter {diameter} > bound {bound}")
            }
            BagSizeNotMonotone {
                ancestor,
                node,
                ancestor_size,
                size,
            } => write!(
                f,
                "bag sizes not monotone: |B_{ancestor}|={ancestor_size} > |B_{node}|={size}"
            ),
            PenaltyNotMonotone {
                ancestor,
                node,
                centre,
            } => write!(
                f,
                "penalty of centre {centre} grows from node {ancestor} to descendant {node}"
            ),
            TraceRootMismatch {
                centre,
                trace_root,
                root_bag,
            } => write!(
                f,
                "centre {centre} first appears at node {trace_root}, root bag is {root_bag}"
            ),
        }
    }
}

/// Result of an independent verification pass; zero violations certify the
/// construction's guarantees on this instance.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub violations: Vec<CheckViolation>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            Ok(())
        }
    }
}

/// Checks a [`CompressionResult`] independently of how it was built:
///
/// 1. the bags form a decomposition of the index graph over the same tree,
///    of width at most `k`, and co-bagged pairs are exactly the edges;
/// 2. the parts partition `V(G)` consistently with `centre_of`;
/// 3. parts at distance at most `ell` have adjacent centres;
/// 4. each part lies in the `(k+1)*ell`-ball of its centre and has weak
///    diameter at most `2(k+1)*ell`;
/// 5. bag sizes never shrink from ancestor to descendant;
/// 6. shared centres never gain penalty moving down the tree;
/// 7. each centre's shallowest bag is its root bag.
pub fn verify_result(
    g: &Graph,
    rtd: &RootedTreeDecomposition,
    res: &CompressionResult,
    k: usize,
    ell: &Scalar,
) -> VerificationReport {
    let mut violations = Vec::new();
    let n = g.vertex_count();
    let nodes = rtd.td().tree().vertex_count();

    let structurally_ok = res.bags.len() == nodes
        && res.centre_of.len() == n
        && res
            .centres
            .iter()
            .chain(res.bags.iter().flatten())
            .chain(res.parts.values().flatten())
            .all(|&v| v < n);
    if !structurally_ok {
        violations.push(CheckViolation::Malformed {
            detail: format!(
                "expected {nodes} bags over {n} vertices, got {} bags, or ids out of range",
                res.bags.len()
            ),
        });
        return VerificationReport { violations };
    }

    // (1) decomposition of the index graph
    let bag_union: BTreeSet<usize> = res.bags.iter().flatten().copied().collect();
    if bag_union != res.centres {
        violations.push(CheckViolation::IndexVerticesMismatch {
            missing_from_bags: res.centres.difference(&bag_union).copied().collect(),
            extra_in_bags: bag_union.difference(&res.centres).copied().collect(),
        });
    }
    let (h, dense_to_centre) = res.index_graph();
    let centre_to_dense: BTreeMap<usize, usize> = dense_to_centre
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let mapped_bags: Vec<BTreeSet<usize>> = res
        .bags
        .iter()
        .map(|bag| {
            bag.iter()
                .filter_map(|x| centre_to_dense.get(x).copied())
                .collect()
        })
        .collect();
    let td_h = TreeDecomposition::new(rtd.td().tree().clone(), mapped_bags, h.vertex_count());
    if let Err(vs) = td_h.validate(&h) {
        violations.extend(vs.into_iter().map(CheckViolation::Decomposition));
    }
    for (t, bag) in res.bags.iter().enumerate() {
        if bag.len() > k + 1 {
            violations.push(CheckViolation::BagTooLarge {
                node: t,
                size: bag.len(),
                bound: k + 1,
            });
        }
        let vs: Vec<usize> = bag.iter().copied().collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !res.h_edges.contains(&(u, v)) {
                    violations.push(CheckViolation::CoBaggedPairNotEdge { node: t, u, v });
                }
            }
        }
    }

    // (2) partition consistency
    let mut assigned_count = 0usize;
    for (&x, part) in &res.parts {
        if !res.centres.contains(&x) {
            violations.push(CheckViolation::NotAPartition {
                v: x,
                detail: "part indexed by a non-centre".into(),
            });
        }
        for &v in part {
            assigned_count += 1;
            if res.centre_of[v] != x {
                violations.push(CheckViolation::NotAPartition {
                    v,
                    detail: format!("in part of {x} but centre_of says {}", res.centre_of[v]),
                });
            }
        }
    }
    for v in 0..n {
        let x = res.centre_of[v];
        if !res.parts.get(&x).is_some_and(|p| p.contains(&v)) {
            violations.push(CheckViolation::NotAPartition {
                v,
                detail: format!("not present in the part of its centre {x}"),
            });
        }
    }
    for &x in &res.centres {
        if !res.parts.contains_key(&x) {
            violations.push(CheckViolation::NotAPartition {
                v: x,
                detail: "centre has no (possibly empty) part".into(),
            });
        }
    }
    if assigned_count != n {
        violations.push(CheckViolation::Malformed {
            detail: format!("parts hold {assigned_count} vertices, graph has {n}"),
        });
    }

    // (3) compression: nearby parts carry adjacent centres
    let centre_list: Vec<usize> = res.centres.iter().copied().collect();
    let part_members: Vec<Vec<usize>> = centre_list
        .iter()
        .map(|x| {
            res.parts
                .get(x)
                .map(|p| p.iter().copied().collect())
                .unwrap_or_default()
        })
        .collect();
    violations.extend(par::flat_map_range(centre_list.len(), |i| {
        let mut found = Vec::new();
        if part_members[i].is_empty() {
            return found;
        }
        let dist = g
            .multi_source_distances(&part_members[i])
            .expect("ids checked above");
        for jdx in i + 1..centre_list.len() {
            let d = part_members[jdx]
                .iter()
                .map(|&v| dist[v])
                .min()
                .unwrap_or(Dist::Infinite);
            let (x, y) = (centre_list[i], centre_list[jdx]);
            if d.le_scalar(ell) && !res.h_edges.contains(&(x.min(y), x.max(y))) {
                found.push(CheckViolation::CompressionViolated {
                    x,
                    y,
                    distance: d,
                    ell: ell.clone(),
                });
            }
        }
        found
    }));

    // (4) radius and weak-diameter bounds
    let radius_bound = ell.scale(k + 1);
    let diameter_bound = ell.scale(2 * (k + 1));
    violations.extend(par::flat_map_range(centre_list.len(), |i| {
        let x = centre_list[i];
        let members = &part_members[i];
        let mut found = Vec::new();
        if members.is_empty() {
            return found;
        }
        let dist = g.multi_source_distances(&[x]).expect("centre id in range");
        for &v in members {
            if !dist[v].le_scalar(&radius_bound) {
                found.push(CheckViolation::PartOutsideCentreBall {
                    x,
                    v,
                    distance: dist[v],
                    bound: radius_bound.clone(),
                });
            }
        }
        let diam = g.weak_diameter(members).expect("nonempty");
        if !diam.le_scalar(&diameter_bound) {
            found.push(CheckViolation::WeakDiameterExceeded {
                x,
                diameter: diam,
                bound: diameter_bound.clone(),
            });
        }
        found
    }));

    // (5) bag sizes monotone along root paths
    for t in 0..nodes {
        for anc in rtd.ancestors(t).skip(1) {
            if res.bags[anc].len() > res.bags[t].len() {
                violations.push(CheckViolation::BagSizeNotMonotone {
                    ancestor: anc,
                    node: t,
                    ancestor_size: res.bags[anc].len(),
                    size: res.bags[t].len(),
                });
            }
        }
    }

    // (6) penalties of shared centres never grow downward
    let order = priority_order(g, rtd);
    let penalties: Vec<BTreeMap<usize, usize>> = res
        .bags
        .iter()
        .map(|bag| penalty_map(&order, bag))
        .collect();
    for t in 0..nodes {
        for anc in rtd.ancestors(t).skip(1) {
            for (&x, &p_t) in &penalties[t] {
                if let Some(&p_anc) = penalties[anc].get(&x) {
                    if p_t > p_anc {
                        violations.push(CheckViolation::PenaltyNotMonotone {
                            ancestor: anc,
                            node: t,
                            centre: x,
                        });
                    }
                }
            }
        }
    }

    // (7) trace roots coincide with root bags
    for &x in &res.centres {
        let trace_root = (0..nodes)
            .filter(|&t| res.bags[t].contains(&x))
            .min_by_key(|&t| (rtd.depth(t), t));
        if let Some(trace_root) = trace_root {
            if trace_root != rtd.root_bag(x) {
                violations.push(CheckViolation::TraceRootMismatch {
                    centre: x,
                    trace_root,
                    root_bag: rtd.root_bag(x),
                });
            }
        }
    }

    VerificationReport { violations }
}
