mod common;

use edgeshap::explain::{explain_node, ExplainConfig, Explanation};
use edgeshap::gcn::{gcn_forward, Normalization};
use edgeshap::mask::MaskMatrix;
use edgeshap::metrics::{self, select_sparsity, select_topk};
use edgeshap::sampler::{build_plan, Strategy};
use edgeshap::solver::{exact_shapley, FnGame};
use edgeshap::synth::{gen_planted_task, gen_random_task};
use edgeshap::{CompGraph, Error, FeatureMatrix, GcnModel, Graph, LocalGraph};
use proptest::prelude::*;

fn enumerate(n: usize) -> ExplainConfig {
    ExplainConfig {
        num_samples: (1 << n).max(4),
        ..ExplainConfig::default()
    }
}

#[test]
fn full_enumeration_matches_brute_force() {
    for (task, target, n) in common::small_instances(20, 2, 10) {
        let e = explain_node(&task.graph, &task.feats, &task.model, target, &enumerate(n)).unwrap();
        let comp = CompGraph::extract_pruned(&task.graph, target, 2).unwrap();
        let values = common::coalition_values(&task.graph, &task.feats, &task.model, &comp, e.explained_class);
        assert!((values[0] - e.base_value).abs() < 1e-6);
        assert!((values[values.len() - 1] - e.full_value).abs() < 1e-6);
        for (a, b) in e.phis().iter().zip(common::brute_force_shapley(&values)) {
            assert!((a - b).abs() < 1e-4, "target {target}: {a} vs {b}");
        }
        assert!(e.efficiency_gap() < 1e-6);
        assert!(e.phis().iter().all(|p| p.abs() <= 1.0 + 1e-9));
    }
}

#[test]
fn solver_oracle_agrees_with_test_oracle() {
    let values: Vec<f64> = (0..1u32 << 7).map(|s| ((s * 37 % 101) as f64 / 101.0).powi(2)).collect();
    let ours = exact_shapley(&FnGame { num_players: 7, value: |s: u32| values[s as usize] }).unwrap();
    for (a, b) in ours.iter().zip(common::brute_force_shapley(&values)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn same_seed_same_explanation() {
    let task = gen_random_task(80, 4.0, 6, 8, 3, 3).unwrap();
    let config = ExplainConfig {
        num_samples: 2000,
        ..ExplainConfig::default()
    };
    let v = *task
        .targets
        .iter()
        .find(|&&v| CompGraph::extract_pruned(&task.graph, v, 2).unwrap().num_players() > 14)
        .unwrap();
    let strip = |mut e: Explanation| {
        e.meta.timings_ms = Default::default();
        e
    };
    let a = strip(explain_node(&task.graph, &task.feats, &task.model, v, &config).unwrap());
    let b = strip(explain_node(&task.graph, &task.feats, &task.model, v, &config).unwrap());
    assert_eq!(a, b);
    let other = ExplainConfig { seed: 1, ..config };
    let c = strip(explain_node(&task.graph, &task.feats, &task.model, v, &other).unwrap());
    assert_ne!(a.phis(), c.phis());
}

#[test]
fn too_few_players_is_refused() {
    let task = gen_random_task(10, 0.0, 4, 4, 2, 0).unwrap();
    let err = explain_node(&task.graph, &task.feats, &task.model, 3, &ExplainConfig::default()).unwrap_err();
    assert!(matches!(err, Error::TooFewPlayers { node: 3, players: 0 }));
}

fn relabel(task: &edgeshap::synth::SyntheticTask, perm: &[usize]) -> (Graph, FeatureMatrix) {
    let n = task.graph.num_nodes();
    let edges: Vec<(usize, usize)> = task.graph.edges().map(|(u, v)| (perm[u], perm[v])).collect();
    let d = task.feats.dim();
    let mut values = vec![0f32; n * d];
    for v in 0..n {
        values[perm[v] * d..(perm[v] + 1) * d].copy_from_slice(task.feats.row(v));
    }
    (Graph::from_edges(n, &edges, false).unwrap(), FeatureMatrix::new(n, d, values).unwrap())
}

#[test]
fn relabeling_nodes_permutes_players() {
    for (task, target, n) in common::small_instances(8, 3, 9) {
        let size = task.graph.num_nodes();
        let perm: Vec<usize> = (0..size).map(|v| (v * 5 + 3) % size).collect();
        let (graph, feats) = relabel(&task, &perm);
        let a = explain_node(&task.graph, &task.feats, &task.model, target, &enumerate(n)).unwrap();
        let b = explain_node(&graph, &feats, &task.model, perm[target], &enumerate(n)).unwrap();
        assert!((a.full_value - b.full_value).abs() < 1e-6);
        for p in &a.players {
            let q = b.players.iter().find(|q| q.src == perm[p.src] && q.dst == perm[p.dst]).unwrap();
            assert!((p.phi - q.phi).abs() < 1e-6);
        }
    }
}

#[test]
fn far_edges_do_not_matter() {
    // Path 0-1-2-3-4-5; target 0 reads nodes up to 2 hops away.
    let task = gen_random_task(6, 0.0, 4, 6, 3, 9).unwrap();
    let path: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
    let g = Graph::from_edges(6, &path, true).unwrap();
    let mut longer = path.clone();
    longer.push((3, 5));
    let g2 = Graph::from_edges(6, &longer, true).unwrap();
    let a = task.model.predict_node(&g, &task.feats, 0).unwrap();
    let b = task.model.predict_node(&g2, &task.feats, 0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn players_cover_every_edge_the_target_reads() {
    for seed in 0..10 {
        let task = gen_random_task(18, 2.5, 4, 6, 3, seed).unwrap();
        let target = seed as usize;
        let comp = CompGraph::extract_pruned(&task.graph, target, 2).unwrap();
        let players: Vec<(usize, usize)> = comp.players().iter().map(|p| (p.src_global, p.dst_global)).collect();
        let all: Vec<(usize, usize)> = task.graph.edges().collect();
        let base = common::dense_probs(18, &all, &task.feats, &task.model, target);
        // Hops from each node to the target along edge direction.
        let mut dist = vec![usize::MAX; 18];
        dist[target] = 0;
        for d in 0..18 {
            for &(u, v) in &all {
                if dist[v] == d && dist[u] == usize::MAX {
                    dist[u] = d + 1;
                }
            }
        }
        for &e in all.iter().filter(|e| !players.contains(e)) {
            assert!(dist[e.1] >= 2, "edge {e:?} into the receptive core is not a player");
            if dist[e.1] == 2 {
                // Only reaches the target through the degree of its endpoint.
                continue;
            }
            let without: Vec<(usize, usize)> = all.iter().copied().filter(|&x| x != e).collect();
            let p = common::dense_probs(18, &without, &task.feats, &task.model, target);
            for (a, b) in base.iter().zip(&p) {
                assert!((a - b).abs() < 1e-12, "edge {e:?} changed the prediction");
            }
        }
        for &e in all.iter().filter(|e| players.contains(e)) {
            assert!(dist[e.1] <= 1);
        }
        // The player set only grows with depth.
        let deeper = CompGraph::extract_pruned(&task.graph, target, 3).unwrap();
        for p in &players {
            assert!(deeper.players().iter().any(|q| (q.src_global, q.dst_global) == *p));
        }
    }
}

#[test]
fn frozen_normalization_batches_like_sequential() {
    let task = gen_random_task(60, 4.0, 6, 8, 3, 4).unwrap();
    let model = task.model.clone().with_normalization(Normalization::Frozen);
    let comp = CompGraph::extract_pruned(&task.graph, 7, 2).unwrap();
    let ev = model.evaluator(&comp, &task.feats).unwrap();
    let plan = build_plan(comp.num_players(), 500, Strategy::AllSizes, 1).unwrap();
    let seq = ev.predict_sequential(plan.mask()).unwrap();
    let batched = ev.predict(plan.mask(), 17).unwrap();
    assert_eq!(seq, batched.values);
    let whole = model.predict_node(&task.graph, &task.feats, 7).unwrap();
    for (a, b) in ev.full_probs().probs.iter().zip(&whole.probs) {
        assert!((a - b).abs() < 1e-6);
    }
    // Frozen masking keeps full-graph degrees, so it differs from the default.
    let default_ev = task.model.evaluator(&comp, &task.feats).unwrap();
    assert_ne!(default_ev.predict(plan.mask(), 64).unwrap().values, batched.values);
}

#[test]
fn batch_size_does_not_change_predictions() {
    let task = gen_random_task(100, 5.0, 6, 8, 3, 8).unwrap();
    let comp = CompGraph::extract_pruned(&task.graph, 11, 2).unwrap();
    let n = comp.num_players();
    let ev = task.model.evaluator(&comp, &task.feats).unwrap();
    let rows: Vec<Vec<bool>> = (0..1000).map(|i| (0..n).map(|j| (i * 31 + j * 17) % 3 != 0).collect()).collect();
    let masks = MaskMatrix::from_rows(n, &rows);
    let one = ev.predict(&masks, 1).unwrap();
    let many = ev.predict(&masks, 64).unwrap();
    assert_eq!(one, many);
    let seq = ev.predict_sequential(&masks).unwrap();
    assert!(seq.iter().zip(&one.values).all(|(a, b)| (a - b).abs() < 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_is_a_distribution_and_label_free(seed in 0u64..1000, shift in 1usize..7) {
        let task = gen_random_task(8, 2.0, 3, 4, 3, seed).unwrap();
        let edges: Vec<(usize, usize)> = task.graph.edges().collect();
        let local = LocalGraph::from_edges(8, &edges).unwrap();
        let p = gcn_forward(&task.model, &local, &task.feats, 0).unwrap();
        prop_assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-5);
        prop_assert!(p.probs.iter().all(|&x| (0.0..=1.0).contains(&x)));

        let perm: Vec<usize> = (0..8).map(|v| (v + shift) % 8).collect();
        let (g, f) = relabel(&task, &perm);
        let moved: Vec<(usize, usize)> = g.edges().collect();
        let q = gcn_forward(&task.model, &LocalGraph::from_edges(8, &moved).unwrap(), &f, perm[0]).unwrap();
        for (a, b) in p.probs.iter().zip(&q.probs) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn selection_properties(phis in proptest::collection::vec(-1.0f64..1.0, 2..40), scale in 0.01f64..100.0) {
        let e = fake(&phis);
        let scaled = fake(&phis.iter().map(|p| p * scale).collect::<Vec<_>>());
        let n = phis.len();
        for k in 1..n {
            let a = select_topk(&e, k).unwrap();
            let b = select_topk(&e, k + 1).unwrap();
            prop_assert!(a.iter().all(|j| b.contains(j)));
            prop_assert_eq!(&a, &select_topk(&scaled, k).unwrap());
        }
        for s in [0.0, 0.1, 0.3, 0.5, 0.9] {
            let kept = select_sparsity(&e, s).unwrap();
            prop_assert_eq!(kept.len(), n - (s * n as f64).floor() as usize);
            prop_assert_eq!(kept, select_sparsity(&scaled, s).unwrap());
        }
    }
}

fn fake(phis: &[f64]) -> Explanation {
    let mut e = explain_fixture();
    e.players = phis
        .iter()
        .enumerate()
        .map(|(i, &phi)| edgeshap::explain::EdgeAttribution { src: i + 1, dst: 0, phi })
        .collect();
    e
}

fn explain_fixture() -> Explanation {
    let (task, target, n) = common::small_instances(1, 2, 8).remove(0);
    explain_node(&task.graph, &task.feats, &task.model, target, &enumerate(n)).unwrap()
}

#[test]
fn planted_edge_has_largest_exact_shapley_value() {
    let task = gen_planted_task(60, 4, 2).unwrap();
    let mut checked = 0;
    for p in &task.planted_edges {
        let comp = CompGraph::extract_pruned(&task.graph, p.target, 2).unwrap();
        if comp.num_players() > 12 {
            continue;
        }
        let values = common::coalition_values(&task.graph, &task.feats, &task.model, &comp, p.label);
        let phi = common::brute_force_shapley(&values);
        let best = (0..phi.len()).max_by(|&a, &b| phi[a].total_cmp(&phi[b])).unwrap();
        let winner = comp.players()[best];
        assert_eq!((winner.src_global, winner.dst_global), (p.src, p.target));
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} planted targets small enough for brute force");
}

#[test]
fn confidence_matches_direct_removal() {
    for (task, target, n) in common::small_instances(10, 3, 10) {
        let e = explain_node(&task.graph, &task.feats, &task.model, target, &enumerate(n)).unwrap();
        let report = metrics::confidence_improvement(&task.model, &task.graph, &task.feats, std::slice::from_ref(&e)).unwrap();
        let change = &report.per_node[0];
        let removed: Vec<(usize, usize)> = e.players.iter().filter(|p| p.phi < 0.0).map(|p| (p.src, p.dst)).collect();
        let edges: Vec<(usize, usize)> = task.graph.edges().filter(|x| !removed.contains(x)).collect();
        let direct = common::dense_probs(task.graph.num_nodes(), &edges, &task.feats, &task.model, target)[e.explained_class];
        assert!((change.after - direct).abs() < 1e-6);
        assert_eq!(change.removed, removed.len());
        if removed.is_empty() {
            assert_eq!(change.after, change.before);
        }
    }
}

#[test]
fn fidelity_boundaries_and_edge_blind_model() {
    let task = gen_random_task(50, 3.0, 6, 8, 3, 12).unwrap();
    let expls: Vec<Explanation> = (0..50)
        .filter_map(|v| explain_node(&task.graph, &task.feats, &task.model, v, &ExplainConfig { num_samples: 1000, ..Default::default() }).ok())
        .collect();
    assert!(expls.len() > 10);
    let r = metrics::fidelity_report(&task.model, &task.graph, &task.feats, &expls, 0.0, 0).unwrap();
    assert_eq!((r.fidelity_minus, r.fidelity_plus), (0.0, 0.0));
    let r = metrics::fidelity_report(&task.model, &task.graph, &task.feats, &expls, 0.3, 10).unwrap();
    assert!((0.0..=1.0).contains(&r.fidelity_minus) && (0.0..=1.0).contains(&r.fidelity_plus));
    let mean: f64 = r.per_node.iter().map(|x| (x.f_gc - x.f_gs).abs()).sum::<f64>() / r.per_node.len() as f64;
    assert_eq!(mean, r.fidelity_minus);

    // Zero output weights make every prediction ignore the graph.
    let m = &task.model;
    let blind = GcnModel::new(m.in_dim(), m.hidden_dim(), m.num_classes(), m.w0().to_vec(), m.b0().to_vec(), vec![0.0; m.w1().len()], m.b1().to_vec()).unwrap();
    let r = metrics::fidelity_plus(&blind, &task.graph, &task.feats, &expls, 5).unwrap();
    assert!(r.fidelity_plus.abs() < 1e-12);
}
