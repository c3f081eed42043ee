//! Deterministic test-corpus generators. All randomness comes from the
//! caller's RNG, so a fixed seed reproduces the same instance byte for byte.

use rand::Rng;

use crate::graph::Graph;

/// Erdős–Rényi graph: each pair becomes an edge with probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Uniform random attachment tree.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        g.add_edge(parent, v).unwrap();
    }
    g
}

/// A random k-tree on `n` vertices with each edge then deleted with
/// probability `delete_p`. The result has treewidth at most `k`.
pub fn random_partial_ktree(n: usize, k: usize, delete_p: f64, rng: &mut impl Rng) -> Graph {
    let mut full = Graph::new(n);
    let base = n.min(k + 1);
    for u in 0..base {
        for v in u + 1..base {
            full.add_edge(u, v).unwrap();
        }
    }
    // k-subsets of the initial clique seed the attachable faces
    let mut faces: Vec<Vec<usize>> = if base > k {
        (0..base)
            .map(|skip| (0..base).filter(|&v| v != skip).collect())
            .collect()
    } else {
        vec![(0..base).collect()]
    };
    for v in base..n {
        let face = faces[rng.gen_range(0..faces.len())].clone();
        for &u in &face {
            full.add_edge(u, v).unwrap();
        }
        for skip in 0..face.len() {
            let mut next: Vec<usize> = face.clone();
            next[skip] = v;
            faces.push(next);
        }
    }
    let mut g = Graph::new(n);
    for (u, v) in full.edges() {
        if !rng.gen_bool(delete_p) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

/// Complete binary tree of the given height in heap layout: root 0, children
/// of `i` are `2i+1` and `2i+2`. Height 0 is a single vertex.
pub fn complete_binary_tree(height: u32) -> Graph {
    let n = (1usize << (height + 1)) - 1;
    Graph::from_edges(n, (1..n).map(|v| ((v - 1) / 2, v))).unwrap()
}

/// Replaces each vertex of `h` by a star of `spokes` paths of length `rho`
/// hanging off a hub, and joins hubs along the edges of `h`. Returns the
/// blown-up graph together with the collapse map onto `V(h)`. Each cluster
/// has weak diameter `2*rho` (0 when `rho` or `spokes` is 0).
pub fn blow_up_into_balls(h: &Graph, rho: usize, spokes: usize) -> (Graph, Vec<usize>) {
    let cluster = 1 + spokes * rho;
    let n = h.vertex_count() * cluster;
    let hub = |hv: usize| hv * cluster;
    let mut g = Graph::new(n);
    let mut collapse = vec![0; n];
    for hv in 0..h.vertex_count() {
        let base = hub(hv);
        for i in 0..cluster {
            collapse[base + i] = hv;
        }
        for s in 0..spokes {
            let mut prev = base;
            for step in 0..rho {
                let next = base + 1 + s * rho + step;
                g.add_edge(prev, next).unwrap();
                prev = next;
            }
        }
    }
    for (u, v) in h.edges() {
        g.add_edge(hub(u), hub(v)).unwrap();
    }
    (g, collapse)
}
