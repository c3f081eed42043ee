//! Acceptance suite: every guarantee the library makes, exercised on
//! randomized corpora at full scale with one pass/fail line per criterion.
//! Run with `cargo test -p twpart --test acceptance -- --nocapture` to see
//! the lines and timings.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twpart::compress::{build_compressing_traced, verify_result, BuildStep};
use twpart::decomp::{
    heuristic_pd, heuristic_td, is_path_decomposition, priority_order, EliminationStrategy,
    PriorityOrder, RootedTreeDecomposition, TreeDecomposition,
};
use twpart::gen;
use twpart::oracles;
use twpart::oracles::SmallGraphBudget;
use twpart::qi::{
    check_qi, cluster_partition, power_partition, qi_from_partition, qi_to_bounded_width_pipeline,
    PipelineMode, QuasiIsometryMap,
};
use twpart::{Graph, Scalar};

struct Instance {
    graph: Graph,
    rooted: RootedTreeDecomposition,
    width: usize,
}

/// Random graphs over swept densities and flavours whose min-fill
/// decompositions land in the width range 1..=6.
fn corpus(count: usize, base_seed: u64) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while out.len() < count {
        let seed = base_seed + attempt;
        attempt += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(5..=60);
        let graph = match seed % 4 {
            0 => {
                let density = [1.2, 2.0, 3.0, 4.5][(seed / 4 % 4) as usize] / n as f64;
                gen::random_graph(n, density.min(1.0), &mut rng)
            }
            1 => {
                let k = 1 + (seed / 4 % 6) as usize;
                let delete = [0.15, 0.3, 0.45][(seed / 24 % 3) as usize];
                gen::random_partial_ktree(n, k, delete, &mut rng)
            }
            2 => gen::random_tree(n, &mut rng),
            _ => {
                let density = [1.5, 2.5][(seed / 4 % 2) as usize] / n as f64;
                gen::random_graph(n, density.min(1.0), &mut rng)
            }
        };
        let td = heuristic_td(&graph, EliminationStrategy::MinFill);
        let width = match td.validate(&graph) {
            Ok(w) => w,
            Err(_) => panic!("heuristic produced an invalid decomposition"),
        };
        if !(1..=6).contains(&width) {
            continue;
        }
        let rooted = RootedTreeDecomposition::root_at(td, 0).expect("heuristic output roots");
        out.push(Instance {
            graph,
            rooted,
            width,
        });
    }
    out
}

fn ell_sweep() -> Vec<Scalar> {
    vec![
        Scalar::zero(),
        Scalar::one(),
        Scalar::ratio(3, 2),
        Scalar::from_int(2),
        Scalar::from_int(3),
    ]
}

fn pass(line: &str, elapsed: Duration) {
    println!("{line}: PASS ({:.2?})", elapsed);
}

/// Criteria 1 and 2 share the corpus: every build must verify cleanly, and
/// every centre-replacement step must satisfy its four guarantees under the
/// independent evaluator.
#[test]
fn criterion_1_and_2_compression_and_replacement_guarantees() {
    let started = Instant::now();
    let instances = corpus(200, 0x1000);
    assert_eq!(instances.len(), 200);

    let mut builds = 0usize;
    let mut steps_checked = 0usize;
    for inst in &instances {
        let order = priority_order(&inst.graph, &inst.rooted);
        let table = oracles::distance_table(&inst.graph);
        for ell in ell_sweep() {
            let (result, steps) = build_compressing_traced(&inst.graph, &inst.rooted, &ell)
                .expect("construction succeeds on valid input");
            builds += 1;
            assert_eq!(result.k, inst.width);
            let report = verify_result(&inst.graph, &inst.rooted, &result, inst.width, &ell);
            assert!(
                report.is_ok(),
                "verification failed (n={}, k={}, ell={ell}): {report}",
                inst.graph.vertex_count(),
                inst.width
            );
            steps_checked += replay_steps(&inst.graph, &order, &ell, &steps, &table);
        }
    }
    let elapsed = started.elapsed();
    assert!(builds >= 1000);
    assert!(
        elapsed < Duration::from_secs(300),
        "compression suite took {elapsed:.2?}"
    );
    pass(
        &format!("criterion 1: compression suite ({builds} builds, zero violations)"),
        elapsed,
    );
    assert!(
        steps_checked >= 2000,
        "only {steps_checked} replacement steps exercised"
    );
    pass(
        &format!(
            "criterion 2: centre-replacement guarantees ({steps_checked} steps, zero failures)"
        ),
        elapsed,
    );
}

fn replay_steps(
    g: &Graph,
    order: &PriorityOrder,
    ell: &Scalar,
    steps: &[BuildStep],
    table: &[Vec<Option<usize>>],
) -> usize {
    for step in steps {
        let findings = oracles::check_provider_change(
            g,
            order,
            ell,
            &step.parent_centres,
            &step.bag,
            &step.new_centres,
            table,
        );
        assert!(
            findings.is_empty(),
            "step at node {} failed the independent evaluator: {findings:?}",
            step.node
        );
    }
    steps.len()
}

struct QiInstance {
    graph: Graph,
    target: Graph,
    map: QuasiIsometryMap,
    d: usize,
}

fn qi_corpus(count: usize, base_seed: u64) -> Vec<QiInstance> {
    (0..count as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed + i);
            let n = rng.gen_range(10..=40);
            let d = (i % 5) as usize;
            let graph = match i % 3 {
                0 => gen::random_graph(n, (2.2_f64 / n as f64).min(1.0), &mut rng),
                1 => gen::random_tree(n, &mut rng),
                _ => gen::random_partial_ktree(n, 1 + (i % 4) as usize, 0.3, &mut rng),
            };
            let parts = cluster_partition(&graph, d);
            let (map, target) =
                qi_from_partition(&graph, &parts, d).expect("cluster parts are proper");
            QiInstance {
                graph,
                target,
                map,
                d,
            }
        })
        .collect()
}

/// Criterion 3: the full pipeline meets the `4(k+1)c^2 + c` weak-diameter
/// bound with a width-k index decomposition, in both modes.
#[test]
fn criterion_3_pipeline_bounds_in_both_modes() {
    let started = Instant::now();
    let instances = qi_corpus(60, 0x3000);
    assert!(instances.len() >= 50);
    for inst in &instances {
        let c = Scalar::from_usize(inst.d + 1);
        assert_eq!(inst.map.c(), &c);
        for mode in [PipelineMode::Treewidth, PipelineMode::Pathwidth] {
            let td = match mode {
                PipelineMode::Treewidth => heuristic_td(&inst.target, EliminationStrategy::MinFill),
                PipelineMode::Pathwidth => heuristic_pd(&inst.target),
            };
            let k = td.validate(&inst.target).expect("heuristics validate");
            let out =
                qi_to_bounded_width_pipeline(&inst.graph, &inst.target, &inst.map, &td, 0, mode)
                    .expect("pipeline runs");
            assert!(
                out.report.is_ok(),
                "pipeline certificate failed (d={}, mode={mode:?}): {}",
                inst.d,
                out.report
            );
            assert_eq!(out.k, k);
            // exact closed form of the bound
            assert_eq!(out.bound, &(&c * &c).scale(4 * (k + 1)) + &c);
            if mode == PipelineMode::Pathwidth {
                let dense_bags: Vec<BTreeSet<usize>> = {
                    let to_dense: std::collections::BTreeMap<usize, usize> = out
                        .index_vertices
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| (x, i))
                        .collect();
                    out.bags
                        .iter()
                        .map(|b| b.iter().map(|x| to_dense[x]).collect())
                        .collect()
                };
                let restricted =
                    TreeDecomposition::new(td.tree().clone(), dense_bags, out.index_vertices.len());
                assert!(is_path_decomposition(&restricted));
            }
        }
    }
    pass(
        &format!(
            "criterion 3: pipeline bound suite ({} instances x 2 modes, zero violations)",
            instances.len()
        ),
        started.elapsed(),
    );
}

/// Criterion 4: fibre partitions of the same maps satisfy both power
/// partition guarantees, rechecked exhaustively here.
#[test]
fn criterion_4_power_partition_guarantees() {
    let started = Instant::now();
    let instances = qi_corpus(60, 0x3000);
    for inst in &instances {
        let p = power_partition(&inst.graph, &inst.target, &inst.map)
            .expect("verified maps admit fibre partitions");
        for (u, v) in inst.graph.edges() {
            let (a, b) = (inst.map.image_of(u), inst.map.image_of(v));
            assert!(
                a == b || p.index.has_edge(a, b),
                "crossing edge {u}-{v} lands on non-adjacent indices"
            );
        }
        for part in &p.parts {
            if part.is_empty() {
                continue;
            }
            let members: Vec<usize> = part.iter().copied().collect();
            let diam = inst.graph.weak_diameter(&members).unwrap();
            assert!(
                diam.le_scalar(inst.map.c()),
                "fibre diameter {diam} exceeds c={}",
                inst.map.c()
            );
        }
    }
    pass(
        &format!(
            "criterion 4: fibre partition suite ({} instances, zero violations)",
            instances.len()
        ),
        started.elapsed(),
    );
}

/// Criterion 5: squaring a star jumps the treewidth from 1 to the leaf
/// count.
#[test]
fn criterion_5_star_squares() {
    let started = Instant::now();
    let budget = SmallGraphBudget::width_oracle();
    for leaves in 2..=8 {
        let star = Graph::star(leaves);
        assert_eq!(oracles::exact_treewidth(&star, &budget).unwrap().width, 1);
        let squared = star.power(&Scalar::from_int(2));
        assert_eq!(
            oracles::exact_treewidth(&squared, &budget).unwrap().width,
            leaves
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10));
    pass(
        "criterion 5: star squares break treewidth (n = 2..=8)",
        elapsed,
    );
}

/// Criterion 6: exhaustive refusal on the height-2 binary tree, with a
/// positive control on the path.
#[test]
fn criterion_6_connected_partition_counterexample() {
    let started = Instant::now();
    let report = oracles::counterexample_check(1).unwrap();
    assert!(report.holds(), "refuted by {:?}", report.refuting_partition);
    assert!(report.examined > 0);
    assert_eq!(report.tree_vertices, 7);

    let sanity = oracles::search_connected_compressing_partition(
        &Graph::path(3),
        1,
        &SmallGraphBudget::partition_enumeration(),
    )
    .unwrap();
    assert!(sanity.witness.is_some(), "the search must not be vacuous");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30));
    pass(
        &format!(
            "criterion 6: no connected 2-compressing partition ({} examined; positive control found)",
            report.examined
        ),
        elapsed,
    );
}

/// Criterion 7: exact oracles agree with known widths and dominate each
/// other the right way around on a small random corpus.
#[test]
fn criterion_7_oracle_consistency() {
    let started = Instant::now();
    let budget = SmallGraphBudget::width_oracle();
    let tw = |g: &Graph| oracles::exact_treewidth(g, &budget).unwrap().width;
    let pw = |g: &Graph| oracles::exact_pathwidth(g, &budget).unwrap().width;

    let mut rng = ChaCha8Rng::seed_from_u64(0x7000);
    for n in [5, 8, 12] {
        assert_eq!(tw(&gen::random_tree(n, &mut rng)), 1);
    }
    for n in 3..=9 {
        assert_eq!(tw(&Graph::cycle(n)), 2);
    }
    for n in 2..=7 {
        assert_eq!(tw(&Graph::complete(n)), n - 1);
    }
    let mut grid = Graph::new(9);
    for r in 0..3 {
        for c in 0..3 {
            let v = 3 * r + c;
            if c + 1 < 3 {
                grid.add_edge(v, v + 1).unwrap();
            }
            if r + 1 < 3 {
                grid.add_edge(v, v + 3).unwrap();
            }
        }
    }
    assert_eq!(tw(&grid), 3);

    let mut corpus: Vec<Graph> = vec![
        grid,
        Graph::path(9),
        Graph::cycle(8),
        Graph::star(7),
        Graph::complete(6),
        gen::complete_binary_tree(2),
    ];
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7100 + seed);
        let n = rng.gen_range(4..=10);
        corpus.push(gen::random_graph(n, 0.3, &mut rng));
    }
    for g in &corpus {
        let t = tw(g);
        assert!(pw(g) >= t, "pathwidth below treewidth");
        for strategy in [EliminationStrategy::MinFill, EliminationStrategy::MinDegree] {
            let heuristic = heuristic_td(g, strategy).validate(g).unwrap();
            assert!(heuristic >= t, "heuristic width beat the exact oracle");
        }
    }
    pass(
        &format!(
            "criterion 7: oracle consistency ({} graphs, zero inversions)",
            corpus.len()
        ),
        started.elapsed(),
    );
}

/// Criterion 8: identical seeds reproduce byte-identical JSON artifacts.
#[test]
fn criterion_8_seeded_determinism() {
    let started = Instant::now();
    let artifacts = |seed: u64| -> (String, String) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gen::random_partial_ktree(24, 3, 0.3, &mut rng);
        let td = heuristic_td(&g, EliminationStrategy::MinFill);
        let rtd = RootedTreeDecomposition::root_at(td, 0).unwrap();
        let res = twpart::compress::build_compressing(&g, &rtd, &Scalar::ratio(3, 2)).unwrap();
        let compression = serde_json::to_string_pretty(&res.to_doc()).unwrap();

        let parts = cluster_partition(&g, 2);
        let (m, h) = qi_from_partition(&g, &parts, 2).unwrap();
        assert!(check_qi(&g, &h, &m).unwrap().is_empty());
        let td_h = heuristic_td(&h, EliminationStrategy::MinFill);
        let out =
            qi_to_bounded_width_pipeline(&g, &h, &m, &td_h, 0, PipelineMode::Treewidth).unwrap();
        let pipeline = serde_json::to_string_pretty(&out.to_doc()).unwrap();
        (compression, pipeline)
    };
    for seed in [1u64, 99, 4096] {
        let first = artifacts(seed);
        let second = artifacts(seed);
        assert_eq!(first.0, second.0, "compression artifact not reproducible");
        assert_eq!(first.1, second.1, "pipeline artifact not reproducible");
    }
    pass(
        "criterion 8: byte-identical artifacts under identical seeds",
        started.elapsed(),
    );
}
