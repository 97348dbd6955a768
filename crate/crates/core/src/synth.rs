//! Deterministic synthetic fixtures.
//!
//! Every random draw comes from [`rng::stream`] keyed by the task seed, a
//! purpose tag and a per-item index, so fixtures are bit-identical across
//! runs and platforms.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::comp_graph::CompGraph;
use crate::error::{Error, Result};
use crate::gcn::GcnModel;
use crate::graph::{FeatureMatrix, Graph};
use crate::mask;
use crate::rng::{self, Purpose};

/// Signal magnitude carried by a planted source node.
pub const PLANTED_SIGNAL: f32 = 4.0;
/// Layer-1 weight turning the signal units into class logits.
pub const PLANTED_GAIN: f32 = 4.0;

/// Ground truth for one planted target: the edge `src -> target` decides
/// the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedEdge {
    pub target: usize,
    pub src: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub kind: String,
    pub graph: Graph,
    pub feats: FeatureMatrix,
    pub model: GcnModel,
    pub targets: Vec<usize>,
    pub planted_edges: Vec<PlantedEdge>,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct TaskMeta {
    kind: String,
    num_nodes: usize,
    undirected: bool,
    seed: u64,
    targets: usize,
}

impl SyntheticTask {
    pub fn planted_for(&self, target: usize) -> Option<&PlantedEdge> {
        self.planted_edges.iter().find(|p| p.target == target)
    }

    /// File name and contents of every fixture file, in a fixed order.
    pub fn to_files(&self) -> Result<Vec<(&'static str, Vec<u8>)>> {
        let meta = TaskMeta {
            kind: self.kind.clone(),
            num_nodes: self.graph.num_nodes(),
            undirected: !self.graph.is_directed(),
            seed: self.seed,
            targets: self.targets.len(),
        };
        let mut targets = String::new();
        for t in &self.targets {
            targets.push_str(&format!("{t}\n"));
        }
        let mut files = vec![
            ("graph.txt", self.graph.to_edge_list_string().into_bytes()),
            ("features.gta", self.feats.to_archive().to_bytes()),
            ("model.gta", self.model.to_archive().to_bytes()),
            ("targets.txt", targets.into_bytes()),
            ("task.json", serde_json::to_vec_pretty(&meta)?),
        ];
        if !self.planted_edges.is_empty() {
            let mut planted = String::from("# target src label\n");
            for p in &self.planted_edges {
                planted.push_str(&format!("{} {} {}\n", p.target, p.src, p.label));
            }
            files.push(("planted.txt", planted.into_bytes()));
        }
        Ok(files)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in self.to_files()? {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn normal(rng: &mut impl Rng) -> f32 {
    StandardNormal.sample(rng)
}

/// Undirected G(n, p) edges. Row `u` draws its pairs `(u, v > u)` from its
/// own stream.
fn erdos_renyi(num_nodes: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 {
        return edges;
    }
    for u in 0..num_nodes {
        let mut rng = rng::stream(seed, Purpose::GraphEdges, u as u64);
        for v in u + 1..num_nodes {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn normal_vec(len: usize, scale: f32, seed: u64, purpose: Purpose, index: u64) -> Vec<f32> {
    let mut rng = rng::stream(seed, purpose, index);
    (0..len).map(|_| scale * normal(&mut rng)).collect()
}

/// Erdős–Rényi graph with standard-normal features and weights. Every node is
/// a target.
pub fn gen_random_task(
    num_nodes: usize,
    avg_degree: f64,
    feat_dim: usize,
    hidden: usize,
    classes: usize,
    seed: u64,
) -> Result<SyntheticTask> {
    if num_nodes == 0 || feat_dim == 0 || hidden == 0 || classes < 2 {
        return Err(Error::InvalidArgument(
            "random task needs nodes, feature dim and hidden size >= 1 and at least 2 classes".into(),
        ));
    }
    if !(avg_degree >= 0.0 && avg_degree < num_nodes as f64) {
        return Err(Error::InvalidArgument(format!(
            "average degree must be in [0, {num_nodes}), got {avg_degree}"
        )));
    }
    let p = if num_nodes > 1 { avg_degree / (num_nodes - 1) as f64 } else { 0.0 };
    let graph = Graph::from_edges(num_nodes, &erdos_renyi(num_nodes, p, seed), true)?;
    let feats = FeatureMatrix::new(num_nodes, feat_dim, normal_vec(num_nodes * feat_dim, 1.0, seed, Purpose::Features, 0))?;
    let model = GcnModel::new(
        feat_dim,
        hidden,
        classes,
        normal_vec(feat_dim * hidden, 1.0, seed, Purpose::Weights, 0),
        normal_vec(hidden, 1.0, seed, Purpose::Weights, 1),
        normal_vec(hidden * classes, 1.0, seed, Purpose::Weights, 2),
        normal_vec(classes, 1.0, seed, Purpose::Weights, 3),
    )?;
    Ok(SyntheticTask {
        kind: "random".into(),
        graph,
        feats,
        model,
        targets: (0..num_nodes).collect(),
        planted_edges: vec![],
        seed,
    })
}

/// Binary classification where one designated neighbour decides each
/// target's label.
///
/// About a fifth of the nodes are targets, chosen pairwise non-adjacent in an
/// Erdős–Rényi background of average degree 3. Each target gets a private
/// leaf whose feature channel 0 is `±PLANTED_SIGNAL`; every other node has 0
/// there and standard-normal noise elsewhere. The model routes `relu(x₀)` and
/// `relu(-x₀)` to classes 0 and 1 and gives the noise channels small weights,
/// so the leaf edge is the only path for the signal. Targets where removing
/// the planted edge is not strictly the largest single-edge change are
/// dropped.
pub fn gen_planted_task(num_nodes: usize, feat_dim: usize, seed: u64) -> Result<SyntheticTask> {
    if num_nodes < 20 {
        return Err(Error::InvalidArgument(format!("planted task needs at least 20 nodes, got {num_nodes}")));
    }
    if feat_dim == 0 {
        return Err(Error::InvalidArgument("feature dim must be at least 1".into()));
    }
    let want = num_nodes / 5;
    let background = num_nodes - want;
    let mut edges = erdos_renyi(background, 3.0 / (background - 1) as f64, seed);
    let bg = Graph::from_edges(background, &edges, true)?;

    let mut order: Vec<usize> = (0..background).collect();
    order.shuffle(&mut rng::stream(seed, Purpose::Targets, 0));
    let mut blocked = vec![false; background];
    let mut candidates = Vec::new();
    for v in order {
        if candidates.len() == want {
            break;
        }
        if blocked[v] {
            continue;
        }
        blocked[v] = true;
        for &u in bg.out_neighbors(v) {
            blocked[u] = true;
        }
        candidates.push(v);
    }
    candidates.sort_unstable();

    let mut values: Vec<f32> = normal_vec(num_nodes * feat_dim, 1.0, seed, Purpose::Features, 0);
    for v in 0..num_nodes {
        values[v * feat_dim] = 0.0;
    }
    let mut planted = Vec::new();
    for (i, &t) in candidates.iter().enumerate() {
        let leaf = background + i;
        edges.push((t.min(leaf), t.max(leaf)));
        let label = usize::from(!rng::stream(seed, Purpose::Labels, i as u64).random_bool(0.5));
        values[leaf * feat_dim] = if label == 0 { PLANTED_SIGNAL } else { -PLANTED_SIGNAL };
        planted.push(PlantedEdge { target: t, src: leaf, label });
    }
    let graph = Graph::from_edges(num_nodes, &edges, true)?;
    let feats = FeatureMatrix::new(num_nodes, feat_dim, values)?;
    let model = planted_model(feat_dim, seed)?;

    let mut kept = Vec::new();
    for p in planted {
        if planted_edge_dominates(&graph, &feats, &model, &p)? {
            kept.push(p);
        }
    }
    Ok(SyntheticTask {
        kind: "planted".into(),
        targets: kept.iter().map(|p| p.target).collect(),
        graph,
        feats,
        model,
        planted_edges: kept,
        seed,
    })
}

fn planted_model(feat_dim: usize, seed: u64) -> Result<GcnModel> {
    const HIDDEN: usize = 4;
    let mut w0 = vec![0f32; feat_dim * HIDDEN];
    w0[0] = 1.0;
    w0[1] = -1.0;
    let mut rng = rng::stream(seed, Purpose::Weights, 0);
    let noise = 0.3 / (feat_dim as f32).sqrt();
    for c in 1..feat_dim {
        for h in 2..HIDDEN {
            w0[c * HIDDEN + h] = noise * normal(&mut rng);
        }
    }
    let mut w1 = vec![0f32; HIDDEN * 2];
    w1[0] = PLANTED_GAIN;
    w1[3] = PLANTED_GAIN;
    for x in &mut w1[4..] {
        *x = 0.1 * normal(&mut rng);
    }
    GcnModel::new(feat_dim, HIDDEN, 2, w0, vec![0.0; HIDDEN], w1, vec![0.0; 2])
}

fn planted_edge_dominates(graph: &Graph, feats: &FeatureMatrix, model: &GcnModel, p: &PlantedEdge) -> Result<bool> {
    let comp = CompGraph::extract_pruned(graph, p.target, 2)?;
    let ev = model.evaluator(&comp, feats)?;
    if ev.explained_class() != p.label {
        return Ok(false);
    }
    let n = comp.num_players();
    let mut best = (f64::NEG_INFINITY, usize::MAX);
    let mut runner_up = f64::NEG_INFINITY;
    for j in 0..n {
        let mut row = mask::full_row(n);
        row[j / 64] &= !(1 << (j % 64));
        let change = (ev.full_value() - ev.value(&row)?).abs();
        if change > best.0 {
            runner_up = best.0;
            best = (change, j);
        } else if change > runner_up {
            runner_up = change;
        }
    }
    let pl = comp.players()[best.1];
    Ok(best.0 > runner_up && pl.src_global == p.src && pl.dst_global == p.target)
}

/// Citation-network-like fixture: Chung–Lu graph with power-law expected
/// degrees (exponent 2.5), sparse binary bag-of-words features and random
/// weights scaled to keep pre-activations near unit variance. Every node has
/// at least one edge. Every node is a target.
pub fn gen_power_law_task(
    num_nodes: usize,
    avg_degree: f64,
    feat_dim: usize,
    active_features: usize,
    hidden: usize,
    classes: usize,
    seed: u64,
) -> Result<SyntheticTask> {
    if num_nodes < 2 || feat_dim == 0 || hidden == 0 || classes < 2 {
        return Err(Error::InvalidArgument("power-law task needs >= 2 nodes, non-empty layers and >= 2 classes".into()));
    }
    if !(avg_degree > 0.0 && avg_degree < num_nodes as f64) || active_features == 0 || active_features > feat_dim {
        return Err(Error::InvalidArgument("invalid average degree or active feature count".into()));
    }
    let mut rng = rng::stream(seed, Purpose::GraphEdges, u64::MAX);
    let mut w: Vec<f64> = (0..num_nodes)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / 1.5))
        .collect();
    let cap = (num_nodes as f64).sqrt() * avg_degree;
    for x in &mut w {
        *x = x.min(cap);
    }
    let scale = avg_degree * num_nodes as f64 / w.iter().sum::<f64>();
    w.iter_mut().for_each(|x| *x *= scale);
    let total: f64 = w.iter().sum();

    let mut edges = Vec::new();
    let mut degree = vec![0usize; num_nodes];
    for u in 0..num_nodes {
        let mut rng = rng::stream(seed, Purpose::GraphEdges, u as u64);
        for v in u + 1..num_nodes {
            if rng.random::<f64>() < (w[u] * w[v] / total).min(1.0) {
                edges.push((u, v));
                degree[u] += 1;
                degree[v] += 1;
            }
        }
    }
    for u in 0..num_nodes {
        if degree[u] == 0 {
            let mut rng = rng::stream(seed, Purpose::GraphEdges, (num_nodes + u) as u64);
            let mut v = rng.random_range(0..num_nodes - 1);
            if v >= u {
                v += 1;
            }
            edges.push((u.min(v), u.max(v)));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let graph = Graph::from_edges(num_nodes, &edges, true)?;

    let density = active_features as f64 / feat_dim as f64;
    let mut values = vec![0f32; num_nodes * feat_dim];
    for v in 0..num_nodes {
        let mut rng = rng::stream(seed, Purpose::Features, v as u64);
        for x in &mut values[v * feat_dim..(v + 1) * feat_dim] {
            if rng.random_bool(density) {
                *x = 1.0;
            }
        }
    }
    let feats = FeatureMatrix::new(num_nodes, feat_dim, values)?;
    let model = GcnModel::new(
        feat_dim,
        hidden,
        classes,
        normal_vec(feat_dim * hidden, 1.0 / (active_features as f32).sqrt(), seed, Purpose::Weights, 0),
        normal_vec(hidden, 0.1, seed, Purpose::Weights, 1),
        normal_vec(hidden * classes, 2.0 / (hidden as f32).sqrt(), seed, Purpose::Weights, 2),
        normal_vec(classes, 0.1, seed, Purpose::Weights, 3),
    )?;
    Ok(SyntheticTask {
        kind: "power-law".into(),
        graph,
        feats,
        model,
        targets: (0..num_nodes).collect(),
        planted_edges: vec![],
        seed,
    })
}

/// Cora-sized power-law fixture: 2708 nodes, average degree 3.9, 1433 binary
/// features with about 18 active per node, 16 hidden units, 7 classes.
pub fn gen_cora_like(seed: u64) -> Result<SyntheticTask> {
    gen_power_law_task(2708, 3.9, 1433, 18, 16, 7, seed)
}
