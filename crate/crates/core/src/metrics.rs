//! Explanation quality: top-k / sparsity selection, Fidelity₋ and Fidelity₊,
//! and the effect of dropping negatively attributed edges.
//!
//! All evaluations mask players of the pruned computational graph; pruned
//! edges carry nothing to the target, so this matches evaluating on the full
//! graph.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comp_graph::CompGraph;
use crate::error::{Error, Result};
use crate::explain::Explanation;
use crate::gcn::GcnModel;
use crate::graph::{FeatureMatrix, Graph};
use crate::mask;
use crate::rng::{self, Purpose};

/// Players ranked by `|φ|` descending, ties by player order.
fn ranked(phis: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..phis.len()).collect();
    idx.sort_by(|&a, &b| phis[b].abs().total_cmp(&phis[a].abs()).then(a.cmp(&b)));
    idx
}

/// The `k` players with the largest `|φ|`, most important first.
pub fn select_topk(expl: &Explanation, k: usize) -> Result<Vec<usize>> {
    let n = expl.num_players();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("top-k needs 1 <= k <= {n}, got {k}")));
    }
    let mut r = ranked(&expl.phis());
    r.truncate(k);
    Ok(r)
}

/// Drops the `⌊sparsity · n⌋` players with the smallest `|φ|`; returns the
/// rest in player order.
pub fn select_sparsity(expl: &Explanation, sparsity: f64) -> Result<Vec<usize>> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidArgument(format!("sparsity must be in [0, 1), got {sparsity}")));
    }
    let n = expl.num_players();
    let drop = (sparsity * n as f64).floor() as usize;
    let mut keep = ranked(&expl.phis());
    keep.truncate(n - drop);
    keep.sort_unstable();
    Ok(keep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFidelity {
    pub node: usize,
    /// Predicted-class probability with every player.
    pub f_gc: f64,
    /// ... with only the retained players.
    pub f_gs: f64,
    /// ... with the top-k players removed.
    pub f_gc_minus_s: f64,
    pub n_players: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub node_count: usize,
    pub fidelity_minus: f64,
    pub fidelity_plus: f64,
    pub sparsity: f64,
    pub top_k: usize,
    pub per_node: Vec<NodeFidelity>,
}

impl FidelityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,f_gc,f_gs,f_gc_minus_s,n_players\n");
        for r in &self.per_node {
            out.push_str(&format!("{},{},{},{},{}\n", r.node, r.f_gc, r.f_gs, r.f_gc_minus_s, r.n_players));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn mask_of(n: usize, players: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut row = vec![0u64; n.div_ceil(64)];
    for j in players {
        row[j / 64] |= 1 << (j % 64);
    }
    row
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Evaluates `f(G_C)`, `f(G_S)` and `f(G_C \ S)` for every explanation.
/// `drop_for_minus` picks the players removed from `G_C` to form `G_S`.
fn evaluate(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
    sparsity: f64,
    top_k: usize,
    drop_for_minus: impl Fn(usize, &Explanation) -> Result<Vec<usize>> + Sync,
) -> Result<FidelityReport> {
    let per_node = explanations
        .par_iter()
        .enumerate()
        .map(|(i, expl)| {
            let comp = CompGraph::extract_pruned(graph, expl.node, expl.meta.layers)?;
            expl.check_players(&comp)?;
            let ev = model.evaluator(&comp, feats)?;
            let n = comp.num_players();
            let class = expl.explained_class;
            let kept = drop_for_minus(i, expl)?;
            let f_gs = ev.probs(&mask_of(n, kept))?.prob(class);
            let removed: Vec<usize> = if top_k == 0 { vec![] } else { select_topk(expl, top_k.min(n))? };
            let mut rest = mask::full_row(n);
            for j in removed {
                rest[j / 64] &= !(1 << (j % 64));
            }
            let f_gc_minus_s = ev.probs(&rest)?.prob(class);
            Ok(NodeFidelity {
                node: expl.node,
                f_gc: ev.full_probs().prob(class),
                f_gs,
                f_gc_minus_s,
                n_players: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityReport {
        node_count: per_node.len(),
        fidelity_minus: mean(per_node.iter().map(|r| (r.f_gc - r.f_gs).abs())),
        fidelity_plus: mean(per_node.iter().map(|r| (r.f_gc - r.f_gc_minus_s).abs())),
        sparsity,
        top_k,
        per_node,
    })
}

/// Fidelity₋ at `sparsity` and Fidelity₊ at `top_k` in one pass.
pub fn fidelity_report(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
    sparsity: f64,
    top_k: usize,
) -> Result<FidelityReport> {
    evaluate(model, graph, feats, explanations, sparsity, top_k, |_, e| select_sparsity(e, sparsity))
}

/// Mean `|f(G_C) - f(G_S)|` on the predicted class, where `G_S` drops the
/// least important fraction `sparsity` of edges.
pub fn fidelity_minus(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
    sparsity: f64,
) -> Result<FidelityReport> {
    fidelity_report(model, graph, feats, explanations, sparsity, 0)
}

/// Mean `|f(G_C) - f(G_C \ S)|` on the predicted class, where `S` holds the
/// `top_k` most important edges.
pub fn fidelity_plus(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
    top_k: usize,
) -> Result<FidelityReport> {
    fidelity_report(model, graph, feats, explanations, 0.0, top_k)
}

/// Fidelity₋ for a baseline that drops `⌊sparsity · n⌋` players chosen
/// uniformly at random.
pub fn fidelity_minus_random(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
    sparsity: f64,
    seed: u64,
) -> Result<FidelityReport> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidArgument(format!("sparsity must be in [0, 1), got {sparsity}")));
    }
    evaluate(model, graph, feats, explanations, sparsity, 0, |i, e| {
        let n = e.num_players();
        let drop = (sparsity * n as f64).floor() as usize;
        let mut rng = rng::stream(seed, Purpose::Baseline, i as u64);
        let dropped = index::sample(&mut rng, n, drop).into_vec();
        Ok((0..n).filter(|j| !dropped.contains(j)).collect())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceChange {
    pub node: usize,
    pub before: f64,
    pub after: f64,
    pub removed: usize,
}

impl ConfidenceChange {
    pub fn delta(&self) -> f64 {
        self.after - self.before
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceReport {
    pub per_node: Vec<ConfidenceChange>,
    /// Share of nodes whose predicted-class probability did not drop.
    pub fraction_improved: f64,
}

/// Predicted-class probability before and after removing every edge with
/// negative φ.
pub fn confidence_improvement(
    model: &GcnModel,
    graph: &Graph,
    feats: &FeatureMatrix,
    explanations: &[Explanation],
) -> Result<ConfidenceReport> {
    let per_node = explanations
        .par_iter()
        .map(|expl| {
            let comp = CompGraph::extract_pruned(graph, expl.node, expl.meta.layers)?;
            expl.check_players(&comp)?;
            let ev = model.evaluator(&comp, feats)?;
            let n = comp.num_players();
            let negative: Vec<usize> = (0..n).filter(|&j| expl.players[j].phi < 0.0).collect();
            let mut row = mask::full_row(n);
            for &j in &negative {
                row[j / 64] &= !(1 << (j % 64));
            }
            Ok(ConfidenceChange {
                node: expl.node,
                before: ev.full_probs().prob(expl.explained_class),
                after: ev.probs(&row)?.prob(expl.explained_class),
                removed: negative.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let improved = per_node.iter().filter(|c| c.delta() >= 0.0).count();
    Ok(ConfidenceReport {
        fraction_improved: if per_node.is_empty() { 0.0 } else { improved as f64 / per_node.len() as f64 },
        per_node,
    })
}
