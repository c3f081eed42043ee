//! Quasi-isometries, quotients, and the partition pipeline.
//!
//! A vertex map `phi: V(G) -> V(H)` is a c-quasi-isometry when distances
//! distort by at most a multiplicative and additive factor `c` in both
//! directions and the image is c-dense in `H`. [`check_qi`] tests all three
//! conditions exactly and returns the offending pairs as data.
//!
//! Around it sit the constructions this crate chains together:
//!
//! * [`quotient`] / [`qi_from_partition`]: a proper partition with parts of
//!   weak diameter at most `d` induces a `(d+1)`-quasi-isometry onto its
//!   quotient (checked, not assumed);
//! * [`power_partition`]: the fibres of a c-quasi-isometry form a partition
//!   indexed by the `2c`-th power of the target, with parts of weak
//!   diameter at most `c`;
//! * [`pull_back`]: a `2c`-compressing partition of the target with parts
//!   of weak diameter at most `f` pulls back through the map to a proper
//!   partition of the source with parts of weak diameter `c*f + c`;
//! * [`qi_to_bounded_width_pipeline`]: combines the compression builder on
//!   the target with the pull-back, certifying that the final index graph
//!   keeps the decomposition width `k` and the parts of the source stay
//!   within weak diameter `4(k+1)c^2 + c`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compress::{build_compressing, CompressionResult, EngineError, GraphDoc};
use crate::decomp::{
    is_path_decomposition, DecompError, DecompositionViolation, RootedTreeDecomposition,
    TreeDecomposition,
};
use crate::graph::{Dist, Graph, GraphError};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum QiError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("distortion constant must be at least 1, got {0}")]
    DistortionTooSmall(Scalar),
    #[error("map is not total: no image for source vertex {v}")]
    MapNotTotal { v: usize },
    #[error("map sends {v} to {image}, but the target has {n} vertices")]
    TargetOutOfRange { v: usize, image: usize, n: usize },
    #[error("not a partition: {detail}")]
    NotAPartition { detail: String },
    #[error("part {index} is empty; a proper partition is required")]
    EmptyPart { index: usize },
    #[error("part {index} has weak diameter {diameter}, bound {bound}")]
    PartTooWide {
        index: usize,
        diameter: Dist,
        bound: Scalar,
    },
    #[error(
        "partition is not {ell}-compressing: parts {a} and {b} at distance {distance} have non-adjacent indices"
    )]
    NotCompressing {
        a: usize,
        b: usize,
        distance: Dist,
        ell: Scalar,
    },
    #[error("map fails quasi-isometry conditions; first violation: {first}")]
    NotAQuasiIsometry {
        violations: Vec<QiViolation>,
        first: String,
    },
    #[error("pathwidth mode requires a path-shaped decomposition")]
    NotAPathDecomposition,
    #[error("decomposition rejected: {0}")]
    InvalidDecomposition(String),
    #[error("internal invariant `{claim}` failed: {detail}")]
    InternalClaim { claim: &'static str, detail: String },
}

/// A vertex map with its exact distortion constant `c >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIsometryMap {
    phi: Vec<usize>,
    c: Scalar,
}

impl QuasiIsometryMap {
    pub fn new(phi: Vec<usize>, c: Scalar) -> Result<Self, QiError> {
        if c.cmp_usize(1).is_lt() {
            return Err(QiError::DistortionTooSmall(c));
        }
        Ok(QuasiIsometryMap { phi, c })
    }

    pub fn identity(n: usize) -> Self {
        QuasiIsometryMap {
            phi: (0..n).collect(),
            c: Scalar::one(),
        }
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn image_of(&self, v: usize) -> usize {
        self.phi[v]
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    fn check_against(&self, g: &Graph, h: &Graph) -> Result<(), QiError> {
        if self.phi.len() != g.vertex_count() {
            return Err(QiError::MapNotTotal {
                v: self.phi.len().min(g.vertex_count()),
            });
        }
        for (v, &image) in self.phi.iter().enumerate() {
            if image >= h.vertex_count() {
                return Err(QiError::TargetOutOfRange {
                    v,
                    image,
                    n: h.vertex_count(),
                });
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> QiDoc {
        QiDoc {
            c: self.c.clone(),
            phi: self.phi.iter().copied().enumerate().collect(),
        }
    }

    /// Builds the map from its JSON form; `n` is the source vertex count.
    pub fn from_doc(doc: &QiDoc, n: usize) -> Result<Self, QiError> {
        let mut phi = Vec::with_capacity(n);
        for v in 0..n {
            match doc.phi.get(&v) {
                Some(&image) => phi.push(image),
                None => return Err(QiError::MapNotTotal { v }),
            }
        }
        QuasiIsometryMap::new(phi, doc.c.clone())
    }
}

/// JSON form of a quasi-isometry map.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct QiDoc {
    pub c: Scalar,
    pub phi: BTreeMap<usize, usize>,
}

/// One failed quasi-isometry condition, with both sides of the inequality.
/// A `None` bound means the right-hand side was infinite (never violated);
/// an infinite left-hand side violates every finite bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QiViolation {
    /// dist_G(u, v) > c * dist_H(phi(u), phi(v)) + c
    SourceDistanceTooLarge {
        u: usize,
        v: usize,
        lhs: Dist,
        bound: Scalar,
    },
    /// dist_H(phi(u), phi(v)) > c * dist_G(u, v) + c
    TargetDistanceTooLarge {
        u: usize,
        v: usize,
        lhs: Dist,
        bound: Scalar,
    },
    /// no image vertex within distance c of h
    NotQuasiSurjective { h: usize, nearest: Dist },
}

impl std::fmt::Display for QiViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use QiViolation::*;
        match self {
            SourceDistanceTooLarge { u, v, lhs, bound } => write!(
                f,
                "dist_G({u},{v}) = {lhs} exceeds c*dist_H(phi({u}),phi({v}))+c = {bound}"
            ),
            TargetDistanceTooLarge { u, v, lhs, bound } => write!(
                f,
                "dist_H(phi({u}),phi({v})) = {lhs} exceeds c*dist_G({u},{v})+c = {bound}"
            ),
            NotQuasiSurjective { h, nearest } => {
                write!(
                    f,
                    "target vertex {h} is at distance {nearest} from the image"
                )
            }
        }
    }
}

/// `lhs <= c * d + c`, with an infinite `d` making the bound unbounded.
fn within_affine(lhs: Dist, c: &Scalar, d: Dist) -> Result<(), Scalar> {
    match d {
        Dist::Infinite => Ok(()),
        Dist::Finite(d) => {
            let bound = &c.scale(d) + c;
            if lhs.le_scalar(&bound) {
                Ok(())
            } else {
                Err(bound)
            }
        }
    }
}

/// Tests the two distortion inequalities on every vertex pair and the
/// c-density of the image. Returns an empty list iff `m` is a
/// c-quasi-isometry from `g` to `h`.
pub fn check_qi(g: &Graph, h: &Graph, m: &QuasiIsometryMap) -> Result<Vec<QiViolation>, QiError> {
    m.check_against(g, h)?;
    let n = g.vertex_count();
    let c = m.c();

    let image: BTreeSet<usize> = m.phi().iter().copied().collect();
    let image_rows: BTreeMap<usize, Vec<Dist>> = image
        .iter()
        .map(|&x| Ok((x, h.multi_source_distances(&[x])?)))
        .collect::<Result<_, GraphError>>()?;

    let mut violations: Vec<QiViolation> = par::flat_map_range(n, |u| {
        let mut found = Vec::new();
        let g_row = g.multi_source_distances(&[u]).expect("u in range");
        let h_row = &image_rows[&m.image_of(u)];
        for v in u + 1..n {
            let dg = g_row[v];
            let dh = h_row[m.image_of(v)];
            if let Err(bound) = within_affine(dg, c, dh) {
                found.push(QiViolation::SourceDistanceTooLarge {
                    u,
                    v,
                    lhs: dg,
                    bound,
                });
            }
            if let Err(bound) = within_affine(dh, c, dg) {
                found.push(QiViolation::TargetDistanceTooLarge {
                    u,
                    v,
                    lhs: dh,
                    bound,
                });
            }
        }
        found
    });

    if h.vertex_count() > 0 {
        let image_vec: Vec<usize> = image.iter().copied().collect();
        let from_image = h.multi_source_distances(&image_vec)?;
        for t in 0..h.vertex_count() {
            if !from_image[t].le_scalar(c) {
                violations.push(QiViolation::NotQuasiSurjective {
                    h: t,
                    nearest: from_image[t],
                });
            }
        }
    }
    Ok(violations)
}

fn check_is_partition(n: usize, parts: &[BTreeSet<usize>]) -> Result<(), QiError> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            if v >= n {
                return Err(QiError::NotAPartition {
                    detail: format!("part {i} mentions out-of-range vertex {v}"),
                });
            }
            if let Some(other) = owner[v] {
                return Err(QiError::NotAPartition {
                    detail: format!("vertex {v} lies in parts {other} and {i}"),
                });
            }
            owner[v] = Some(i);
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Err(QiError::NotAPartition {
            detail: format!("vertex {v} lies in no part"),
        });
    }
    Ok(())
}

/// The quotient graph: one vertex per part (empty parts become isolated
/// vertices), an edge between distinct parts iff some host edge crosses
/// them. Also returns the canonical map vertex -> part index.
pub fn quotient(g: &Graph, parts: &[BTreeSet<usize>]) -> Result<(Graph, Vec<usize>), QiError> {
    check_is_partition(g.vertex_count(), parts)?;
    let mut part_of = vec![0usize; g.vertex_count()];
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            part_of[v] = i;
        }
    }
    let mut q = Graph::new(parts.len());
    for (u, v) in g.edges() {
        let (a, b) = (part_of[u], part_of[v]);
        if a != b && !q.has_edge(a, b) {
            q.add_edge(a, b).unwrap();
        }
    }
    Ok((q, part_of))
}

/// Canonical `(d+1)`-quasi-isometry onto the quotient of a proper partition
/// whose parts have weak diameter at most `d`. The returned map has been
/// run through [`check_qi`]; a violation is a bug and surfaces as an error.
pub fn qi_from_partition(
    g: &Graph,
    parts: &[BTreeSet<usize>],
    d: usize,
) -> Result<(QuasiIsometryMap, Graph), QiError> {
    let bound = Scalar::from_usize(d);
    for (index, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(QiError::EmptyPart { index });
        }
        let members: Vec<usize> = part.iter().copied().collect();
        let diameter = g.weak_diameter(&members)?;
        if !diameter.le_scalar(&bound) {
            return Err(QiError::PartTooWide {
                index,
                diameter,
                bound,
            });
        }
    }
    let (q, part_of) = quotient(g, parts)?;
    let m = QuasiIsometryMap::new(part_of, Scalar::from_usize(d + 1))?;
    let violations = check_qi(g, &q, &m)?;
    if let Some(first) = violations.first() {
        return Err(QiError::NotAQuasiIsometry {
            first: first.to_string(),
            violations,
        });
    }
    Ok((m, q))
}

/// A partition of some host graph indexed by the vertices of `index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedPartition {
    pub index: Graph,
    pub parts: Vec<BTreeSet<usize>>,
}

impl IndexedPartition {
    pub fn new(index: Graph, parts: Vec<BTreeSet<usize>>) -> Self {
        assert_eq!(index.vertex_count(), parts.len(), "one part per index");
        IndexedPartition { index, parts }
    }

    pub fn is_proper(&self) -> bool {
        self.parts.iter().all(|p| !p.is_empty())
    }
}

/// Converts a compression result into an indexed partition over the dense
/// index graph; also returns the map dense-id -> centre vertex.
pub fn partition_of_compression(res: &CompressionResult) -> (IndexedPartition, Vec<usize>) {
    let (index, dense_to_centre) = res.index_graph();
    let parts = dense_to_centre
        .iter()
        .map(|x| res.parts.get(x).cloned().unwrap_or_default())
        .collect();
    (IndexedPartition::new(index, parts), dense_to_centre)
}

/// The fibre partition of a c-quasi-isometry, indexed by the `2c`-th power
/// of the target. Asserts the two guarantees: crossing edges only between
/// power-adjacent indices, and fibres of weak diameter at most `c`. A
/// failed assertion means `m` was not a valid c-quasi-isometry; the error
/// carries the [`check_qi`] report.
pub fn power_partition(
    g: &Graph,
    h: &Graph,
    m: &QuasiIsometryMap,
) -> Result<IndexedPartition, QiError> {
    m.check_against(g, h)?;
    let index = h.power(&m.c().scale(2));
    let mut parts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); h.vertex_count()];
    for v in 0..g.vertex_count() {
        parts[m.image_of(v)].insert(v);
    }

    let not_qi = |_: ()| -> QiError {
        let violations = check_qi(g, h, m).unwrap_or_default();
        let first = violations
            .first()
            .map(|v| v.to_string())
            .unwrap_or_else(|| "none recorded".into());
        QiError::NotAQuasiIsometry { violations, first }
    };
    for (u, v) in g.edges() {
        let (a, b) = (m.image_of(u), m.image_of(v));
        if a != b && !index.has_edge(a, b) {
            return Err(not_qi(()));
        }
    }
    for part in &parts {
        if part.is_empty() {
            continue;
        }
        let members: Vec<usize> = part.iter().copied().collect();
        if !g.weak_diameter(&members)?.le_scalar(m.c()) {
            return Err(not_qi(()));
        }
    }
    Ok(IndexedPartition::new(index, parts))
}

/// A proper partition of the source graph produced by [`pull_back`].
#[derive(Debug, Clone)]
pub struct PulledBackPartition {
    /// Dense index graph A: the subgraph of the original index induced by
    /// the indices with nonempty preimage.
    pub index: Graph,
    /// A-id -> vertex id in the original index graph.
    pub index_vertices: Vec<usize>,
    /// Parts of the source graph, aligned with A ids; all nonempty.
    pub parts: Vec<BTreeSet<usize>>,
}

/// Pulls an `ell'`-compressing partition of the target back through the
/// map: each part becomes its preimage, indices with empty preimage are
/// dropped, and the result is a proper partition of the source indexed by
/// the induced subgraph, with parts of weak diameter at most
/// `c * f_val + c`.
///
/// Preconditions verified before use: `hp` partitions `V(h)`, is
/// `ell'`-compressing in `h`, and its parts have weak diameter at most
/// `f_val` in `h`.
pub fn pull_back(
    g: &Graph,
    h: &Graph,
    m: &QuasiIsometryMap,
    hp: &IndexedPartition,
    ell_prime: &Scalar,
    f_val: &Scalar,
) -> Result<PulledBackPartition, QiError> {
    m.check_against(g, h)?;
    check_is_partition(h.vertex_count(), &hp.parts)?;
    for (index, part) in hp.parts.iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        let members: Vec<usize> = part.iter().copied().collect();
        let diameter = h.weak_diameter(&members)?;
        if !diameter.le_scalar(f_val) {
            return Err(QiError::PartTooWide {
                index,
                diameter,
                bound: f_val.clone(),
            });
        }
    }
    for a in 0..hp.parts.len() {
        if hp.parts[a].is_empty() {
            continue;
        }
        let from_a: Vec<usize> = hp.parts[a].iter().copied().collect();
        let row = h.multi_source_distances(&from_a)?;
        for b in a + 1..hp.parts.len() {
            let d = hp.parts[b]
                .iter()
                .map(|&v| row[v])
                .min()
                .unwrap_or(Dist::Infinite);
            if d.le_scalar(ell_prime) && !hp.index.has_edge(a, b) {
                return Err(QiError::NotCompressing {
                    a,
                    b,
                    distance: d,
                    ell: ell_prime.clone(),
                });
            }
        }
    }

    let mut preimages: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); hp.parts.len()];
    {
        let mut part_of_target = vec![0usize; h.vertex_count()];
        for (a, part) in hp.parts.iter().enumerate() {
            for &t in part {
                part_of_target[t] = a;
            }
        }
        for v in 0..g.vertex_count() {
            preimages[part_of_target[m.image_of(v)]].insert(v);
        }
    }
    let kept: Vec<usize> = (0..hp.parts.len())
        .filter(|&a| !preimages[a].is_empty())
        .collect();
    let (index, index_vertices) = hp.index.induced_subgraph(&kept)?;
    let parts: Vec<BTreeSet<usize>> = kept.iter().map(|&a| preimages[a].clone()).collect();

    // the pull-back guarantees, asserted
    let mut part_of = vec![usize::MAX; g.vertex_count()];
    for (a, part) in parts.iter().enumerate() {
        for &v in part {
            part_of[v] = a;
        }
    }
    if let Some(v) = part_of.iter().position(|&a| a == usize::MAX) {
        return Err(QiError::InternalClaim {
            claim: "pull-back-covers-source",
            detail: format!("vertex {v} landed in no part"),
        });
    }
    for (u, v) in g.edges() {
        let (a, b) = (part_of[u], part_of[v]);
        if a != b && !index.has_edge(a, b) {
            return Err(QiError::InternalClaim {
                claim: "pull-back-respects-index-adjacency",
                detail: format!("edge {u}-{v} crosses non-adjacent indices"),
            });
        }
    }
    let bound = &(m.c() * f_val) + m.c();
    for (a, part) in parts.iter().enumerate() {
        let members: Vec<usize> = part.iter().copied().collect();
        let diameter = g.weak_diameter(&members)?;
        if !diameter.le_scalar(&bound) {
            return Err(QiError::InternalClaim {
                claim: "pull-back-weak-diameter-bound",
                detail: format!("part {a} has weak diameter {diameter} > {bound}"),
            });
        }
    }
    Ok(PulledBackPartition {
        index,
        index_vertices,
        parts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineMode {
    Treewidth,
    Pathwidth,
}

impl std::fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineMode::Treewidth => write!(f, "treewidth"),
            PipelineMode::Pathwidth => write!(f, "pathwidth"),
        }
    }
}

/// A certificate finding from the pipeline's final verification pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineViolation {
    IndexDecomposition(DecompositionViolation),
    IndexBagTooLarge {
        node: usize,
        size: usize,
        bound: usize,
    },
    IndexNotAPath,
    EmptyPart {
        index: usize,
    },
    NotAPartition {
        v: usize,
        detail: String,
    },
    PartTooWide {
        index: usize,
        diameter: Dist,
        bound: Scalar,
    },
    CrossingEdgeNotAdjacent {
        u: usize,
        v: usize,
        a: usize,
        b: usize,
    },
}

impl std::fmt::Display for PipelineViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use PipelineViolation::*;
        match self {
            IndexDecomposition(v) => write!(f, "index decomposition: {v}"),
            IndexBagTooLarge { node, size, bound } => {
                write!(f, "restricted bag {node} has {size} indices, bound {bound}")
            }
            IndexNotAPath => write!(f, "index decomposition is not path-shaped"),
            EmptyPart { index } => write!(f, "part {index} is empty"),
            NotAPartition { v, detail } => write!(f, "vertex {v}: {detail}"),
            PartTooWide {
                index,
                diameter,
                bound,
            } => write!(
                f,
                "part {index} has weak diameter {diameter} > bound {bound}"
            ),
            CrossingEdgeNotAdjacent { u, v, a, b } => write!(
                f,
                "edge {u}-{v} crosses parts {a},{b} with non-adjacent indices"
            ),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineReport {
    pub violations: Vec<PipelineViolation>,
}

impl PipelineReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for PipelineReport {
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

/// Everything the pipeline produces: the proper partition of the source,
/// the index graph A over centre ids, the restricted decomposition, and an
/// independently computed certificate report.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    /// The intermediate compression of the target graph.
    pub compression: CompressionResult,
    /// V(A) as centre ids (vertices of the target graph), ascending.
    pub index_vertices: Vec<usize>,
    /// E(A) over centre ids, pairs ordered (u < v).
    pub index_edges: BTreeSet<(usize, usize)>,
    /// Restricted decomposition bags `B_t ∩ V(A)`, per tree node.
    pub bags: Vec<BTreeSet<usize>>,
    /// Proper partition of the source, keyed by centre id.
    pub parts: BTreeMap<usize, BTreeSet<usize>>,
    /// Part index (centre id) per source vertex.
    pub part_of: Vec<usize>,
    pub k: usize,
    pub c: Scalar,
    pub mode: PipelineMode,
    /// Weak-diameter bound on the source parts: `4(k+1)c^2 + c`.
    pub bound: Scalar,
    pub report: PipelineReport,
}

/// JSON artifact for a pipeline run; shares the graph/bags/parts shapes
/// with the compression artifact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PipelineDoc {
    #[serde(rename = "H")]
    pub index: GraphDoc,
    pub bags: BTreeMap<usize, Vec<usize>>,
    pub parts: BTreeMap<usize, Vec<usize>>,
    pub centre_of: BTreeMap<usize, usize>,
    /// Compression level used on the target graph (2c).
    pub ell: Scalar,
    pub k: usize,
    pub c: Scalar,
    pub mode: String,
    pub bound: Scalar,
}

impl PipelineResult {
    pub fn to_doc(&self) -> PipelineDoc {
        PipelineDoc {
            index: GraphDoc {
                vertices: self.index_vertices.clone(),
                edges: self.index_edges.iter().copied().collect(),
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
            centre_of: self.part_of.iter().copied().enumerate().collect(),
            ell: self.c.scale(2),
            k: self.k,
            c: self.c.clone(),
            mode: self.mode.to_string(),
            bound: self.bound.clone(),
        }
    }
}

/// Runs the full pipeline: compress the target graph along its
/// decomposition at level `2c`, pull the partition back through the map,
/// restrict the decomposition to the surviving indices, and certify the
/// conclusions.
pub fn qi_to_bounded_width_pipeline(
    g: &Graph,
    h: &Graph,
    m: &QuasiIsometryMap,
    td_h: &TreeDecomposition,
    root: usize,
    mode: PipelineMode,
) -> Result<PipelineResult, QiError> {
    m.check_against(g, h)?;
    let k = td_h
        .validate(h)
        .map_err(|vs| QiError::InvalidDecomposition(join_violations(&vs)))?;
    if mode == PipelineMode::Pathwidth && !is_path_decomposition(td_h) {
        return Err(QiError::NotAPathDecomposition);
    }
    let rtd = RootedTreeDecomposition::root_at(td_h.clone(), root)?;
    let two_c = m.c().scale(2);
    // compressing function for width k evaluated at 2c
    let f_val = two_c.scale(2 * (k + 1));
    let compression = build_compressing(h, &rtd, &two_c)?;
    let (hp, dense_to_centre) = partition_of_compression(&compression);
    let pulled = pull_back(g, h, m, &hp, &two_c, &f_val)?;

    let bound = &(m.c() * &f_val) + m.c();
    let closed_form = &(m.c() * m.c()).scale(4 * (k + 1)) + m.c();
    if bound != closed_form {
        return Err(QiError::InternalClaim {
            claim: "pipeline-bound-identity",
            detail: format!("c*f(2c)+c = {bound} but 4(k+1)c^2+c = {closed_form}"),
        });
    }

    let index_vertices: Vec<usize> = pulled
        .index_vertices
        .iter()
        .map(|&a| dense_to_centre[a])
        .collect();
    let kept_centres: BTreeSet<usize> = index_vertices.iter().copied().collect();
    let mut index_edges = BTreeSet::new();
    for (a, b) in pulled.index.edges() {
        let (u, v) = (index_vertices[a], index_vertices[b]);
        index_edges.insert((u.min(v), u.max(v)));
    }
    let bags: Vec<BTreeSet<usize>> = compression
        .bags
        .iter()
        .map(|bag| bag.intersection(&kept_centres).copied().collect())
        .collect();
    let mut parts = BTreeMap::new();
    let mut part_of = vec![usize::MAX; g.vertex_count()];
    for (a, part) in pulled.parts.iter().enumerate() {
        let centre = index_vertices[a];
        for &v in part {
            part_of[v] = centre;
        }
        parts.insert(centre, part.clone());
    }

    // certificate pass, on the dense index graph with dense-id bags
    let mut violations = Vec::new();
    let centre_to_dense: BTreeMap<usize, usize> = index_vertices
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let dense_bags: Vec<BTreeSet<usize>> = bags
        .iter()
        .map(|bag| bag.iter().map(|x| centre_to_dense[x]).collect())
        .collect();
    let td_a = TreeDecomposition::new(
        rtd.td().tree().clone(),
        dense_bags,
        pulled.index.vertex_count(),
    );
    if let Err(vs) = td_a.validate(&pulled.index) {
        violations.extend(vs.into_iter().map(PipelineViolation::IndexDecomposition));
    }
    for (t, bag) in bags.iter().enumerate() {
        if bag.len() > k + 1 {
            violations.push(PipelineViolation::IndexBagTooLarge {
                node: t,
                size: bag.len(),
                bound: k + 1,
            });
        }
    }
    if mode == PipelineMode::Pathwidth && !is_path_decomposition(&td_a) {
        violations.push(PipelineViolation::IndexNotAPath);
    }
    for (a, part) in pulled.parts.iter().enumerate() {
        if part.is_empty() {
            violations.push(PipelineViolation::EmptyPart {
                index: index_vertices[a],
            });
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    for part in pulled.parts.iter() {
        for &v in part {
            if seen[v] {
                violations.push(PipelineViolation::NotAPartition {
                    v,
                    detail: "appears in two parts".into(),
                });
            }
            seen[v] = true;
        }
    }
    for (v, &s) in seen.iter().enumerate() {
        if !s {
            violations.push(PipelineViolation::NotAPartition {
                v,
                detail: "appears in no part".into(),
            });
        }
    }
    violations.extend(par::flat_map_range(pulled.parts.len(), |a| {
        let members: Vec<usize> = pulled.parts[a].iter().copied().collect();
        if members.is_empty() {
            return Vec::new();
        }
        let diameter = g.weak_diameter(&members).expect("nonempty part");
        if diameter.le_scalar(&bound) {
            Vec::new()
        } else {
            vec![PipelineViolation::PartTooWide {
                index: index_vertices[a],
                diameter,
                bound: bound.clone(),
            }]
        }
    }));
    for (u, v) in g.edges() {
        let (x, y) = (part_of[u], part_of[v]);
        if x != y && !index_edges.contains(&(x.min(y), x.max(y))) {
            violations.push(PipelineViolation::CrossingEdgeNotAdjacent { u, v, a: x, b: y });
        }
    }

    Ok(PipelineResult {
        compression,
        index_vertices,
        index_edges,
        bags,
        parts,
        part_of,
        k,
        c: m.c().clone(),
        mode,
        bound,
        report: PipelineReport { violations },
    })
}

fn join_violations(vs: &[DecompositionViolation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Greedy BFS-ball covering: repeatedly pick the lowest-id uncovered
/// vertex and take its radius-`d/2` ball among the uncovered vertices as a
/// part. Every part is nonempty with weak diameter at most `d`.
pub fn cluster_partition(g: &Graph, d: usize) -> Vec<BTreeSet<usize>> {
    let n = g.vertex_count();
    let radius = Scalar::from_usize(d / 2);
    let mut covered = vec![false; n];
    let mut parts = Vec::new();
    for v in 0..n {
        if covered[v] {
            continue;
        }
        let ball = g.neighbourhood(&[v], &radius).expect("v in range");
        let part: BTreeSet<usize> = ball.into_iter().filter(|&u| !covered[u]).collect();
        for &u in &part {
            covered[u] = true;
        }
        parts.push(part);
    }
    parts
}
