//! Two-layer GCN inference.
//!
//! `softmax(Â · relu(Â · X · W0 + b0) · W1 + b1)` with
//! `Â = D^{-1/2} (A + I) D^{-1/2}`, where the degree of `v` counts the self
//! loop plus `v`'s incoming edges. Features, weights and activations are f32;
//! every dot product and aggregation accumulates in f64.
//!
//! Message passing reads incoming edges only: node `v` aggregates `u` iff the
//! edge `u -> v` is present.

use std::path::Path;

use rayon::prelude::*;

use crate::archive::{Tensor, TensorArchive, TensorData};
use crate::comp_graph::CompGraph;
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph};
use crate::mask::{self, MaskMatrix};

/// How normalization degrees are chosen when players are masked out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Degrees reflect the coalition: a removed player no longer counts
    /// toward its head's degree. Edges of the input graph that are not
    /// players always count.
    #[default]
    Coalition,
    /// Degrees are always those of the full input graph; masking only
    /// removes the message.
    Frozen,
}

/// Small graph over local node ids, stored as incoming adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGraph {
    num_nodes: usize,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    // Extra in-degree from edges that carry no message in this graph.
    degree_offset: Vec<usize>,
}

impl LocalGraph {
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_offsets(num_nodes, edges, vec![0; num_nodes])
    }

    pub fn from_edges_with_offsets(
        num_nodes: usize,
        edges: &[(usize, usize)],
        degree_offset: Vec<usize>,
    ) -> Result<Self> {
        if degree_offset.len() != num_nodes {
            return Err(Error::Shape(format!(
                "{} degree offsets for {num_nodes} nodes",
                degree_offset.len()
            )));
        }
        let mut by_dst: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::NodeOutOfRange { id, num_nodes });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            by_dst.push((v, u));
        }
        by_dst.sort_unstable();
        if let Some(w) = by_dst.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge { src: w[0].1, dst: w[0].0 });
        }
        let mut in_offsets = vec![0usize; num_nodes + 1];
        for &(v, _) in &by_dst {
            in_offsets[v + 1] += 1;
        }
        for i in 0..num_nodes {
            in_offsets[i + 1] += in_offsets[i];
        }
        Ok(LocalGraph {
            num_nodes,
            in_offsets,
            in_sources: by_dst.into_iter().map(|(_, u)| u).collect(),
            degree_offset,
        })
    }

    /// The whole input graph as a local graph (identity labelling).
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let mut in_offsets = Vec::with_capacity(n + 1);
        let mut in_sources = Vec::with_capacity(graph.num_edges());
        in_offsets.push(0);
        for v in 0..n {
            in_sources.extend_from_slice(graph.in_neighbors(v));
            in_offsets.push(in_sources.len());
        }
        LocalGraph {
            num_nodes: n,
            in_offsets,
            in_sources,
            degree_offset: vec![0; n],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.in_sources.len()
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Normalization degree: self loop + incoming edges + offset.
    pub fn degree(&self, v: usize) -> usize {
        1 + self.in_neighbors(v).len() + self.degree_offset[v]
    }
}

/// Class distribution at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionVector {
    pub probs: Vec<f64>,
}

impl PredictionVector {
    /// Index of the largest probability; ties go to the lowest class.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (c, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = c;
            }
        }
        best
    }

    pub fn prob(&self, class: usize) -> f64 {
        self.probs[class]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    in_dim: usize,
    hidden: usize,
    classes: usize,
    w0: Vec<f32>,
    b0: Vec<f32>,
    w1: Vec<f32>,
    b1: Vec<f32>,
    normalization: Normalization,
}

impl GcnModel {
    /// `w0` is `in_dim × hidden` and `w1` is `hidden × classes`, both row-major.
    pub fn new(
        in_dim: usize,
        hidden: usize,
        classes: usize,
        w0: Vec<f32>,
        b0: Vec<f32>,
        w1: Vec<f32>,
        b1: Vec<f32>,
    ) -> Result<Self> {
        let check = |name: &str, got: usize, want: usize| {
            if got != want {
                Err(Error::Shape(format!("{name}: expected {want} values, got {got}")))
            } else {
                Ok(())
            }
        };
        check("layer0.weight", w0.len(), in_dim * hidden)?;
        check("layer0.bias", b0.len(), hidden)?;
        check("layer1.weight", w1.len(), hidden * classes)?;
        check("layer1.bias", b1.len(), classes)?;
        if classes < 2 {
            return Err(Error::Shape(format!("need at least 2 classes, got {classes}")));
        }
        if hidden == 0 || in_dim == 0 {
            return Err(Error::Shape("zero-sized layer".into()));
        }
        for (name, v) in [("layer0.weight", &w0), ("layer0.bias", &b0), ("layer1.weight", &w1), ("layer1.bias", &b1)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(GcnModel {
            in_dim,
            hidden,
            classes,
            w0,
            b0,
            w1,
            b1,
            normalization: Normalization::default(),
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn w0(&self) -> &[f32] {
        &self.w0
    }

    pub fn b0(&self) -> &[f32] {
        &self.b0
    }

    pub fn w1(&self) -> &[f32] {
        &self.w1
    }

    pub fn b1(&self) -> &[f32] {
        &self.b1
    }

    pub fn from_archive(archive: &TensorArchive) -> Result<Self> {
        let get = |name: &str| -> Result<&Tensor> {
            archive
                .get(name)
                .ok_or_else(|| Error::Archive(format!("model archive is missing {name:?}")))
        };
        let w0 = get("layer0.weight")?;
        let b0 = get("layer0.bias")?;
        let w1 = get("layer1.weight")?;
        let b1 = get("layer1.bias")?;
        let ([d, h], [h1, c]) = (&w0.shape[..], &w1.shape[..]) else {
            return Err(Error::Shape("layer weights must be 2-D".into()));
        };
        if b0.shape != [*h] || b1.shape != [*c] || h1 != h {
            return Err(Error::Shape(format!(
                "inconsistent model shapes: w0 {:?}, b0 {:?}, w1 {:?}, b1 {:?}",
                w0.shape, b0.shape, w1.shape, b1.shape
            )));
        }
        GcnModel::new(
            *d as usize,
            *h as usize,
            *c as usize,
            w0.data.to_f32()?,
            b0.data.to_f32()?,
            w1.data.to_f32()?,
            b1.data.to_f32()?,
        )
    }

    pub fn to_archive(&self) -> TensorArchive {
        let (d, h, c) = (self.in_dim as u64, self.hidden as u64, self.classes as u64);
        TensorArchive::new(vec![
            Tensor::new("layer0.weight", vec![d, h], TensorData::F32(self.w0.clone())),
            Tensor::new("layer0.bias", vec![h], TensorData::F32(self.b0.clone())),
            Tensor::new("layer1.weight", vec![h, c], TensorData::F32(self.w1.clone())),
            Tensor::new("layer1.bias", vec![c], TensorData::F32(self.b1.clone())),
        ])
        .expect("model tensor names are unique")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_archive(&TensorArchive::load(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_archive().save(path)
    }

    /// `x · W0` for one feature row.
    fn transform(&self, x: &[f32], out: &mut [f32]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0f64;
            for (i, &xi) in x.iter().enumerate() {
                acc += xi as f64 * self.w0[i * self.hidden + j] as f64;
            }
            *o = acc as f32;
        }
    }

    fn hidden_activation(&self, acc: &[f64], out: &mut [f32]) {
        for ((o, &a), &b) in out.iter_mut().zip(acc).zip(&self.b0) {
            *o = ((a + b as f64) as f32).max(0.0);
        }
    }

    fn output(&self, z: &[f64]) -> Result<PredictionVector> {
        let mut logits = vec![0f64; self.classes];
        for (c, l) in logits.iter_mut().enumerate() {
            let mut acc = 0f64;
            for (j, &zj) in z.iter().enumerate() {
                acc += zj * self.w1[j * self.classes + c] as f64;
            }
            *l = acc + self.b1[c] as f64;
        }
        if logits.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("output logits".into()));
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0f64;
        for l in &mut logits {
            *l = (*l - max).exp();
            sum += *l;
        }
        for l in &mut logits {
            *l /= sum;
        }
        Ok(PredictionVector { probs: logits })
    }

    /// Full forward pass over `graph`, read out at `target`. `feats` rows are
    /// indexed by local node id.
    pub fn forward(&self, graph: &LocalGraph, feats: &FeatureMatrix, target: usize) -> Result<PredictionVector> {
        if feats.dim() != self.in_dim {
            return Err(Error::Shape(format!(
                "features have dim {}, model expects {}",
                feats.dim(),
                self.in_dim
            )));
        }
        if feats.num_nodes() != graph.num_nodes() {
            return Err(Error::Shape(format!(
                "features cover {} nodes, graph has {}",
                feats.num_nodes(),
                graph.num_nodes()
            )));
        }
        if target >= graph.num_nodes() {
            return Err(Error::NodeOutOfRange {
                id: target,
                num_nodes: graph.num_nodes(),
            });
        }
        let (n, h) = (graph.num_nodes(), self.hidden);
        let mut transformed = vec![0f32; n * h];
        for v in 0..n {
            self.transform(feats.row(v), &mut transformed[v * h..(v + 1) * h]);
        }
        let mut acc = vec![0f64; h];
        let mut hidden = vec![0f32; n * h];
        for v in 0..n {
            let dv = graph.degree(v);
            let terms = std::iter::once((norm(dv, dv), &transformed[v * h..(v + 1) * h])).chain(
                graph
                    .in_neighbors(v)
                    .iter()
                    .map(|&u| (norm(graph.degree(u), dv), &transformed[u * h..(u + 1) * h])),
            );
            aggregate(&mut acc, terms);
            self.hidden_activation(&acc, &mut hidden[v * h..(v + 1) * h]);
        }
        let dt = graph.degree(target);
        let terms = std::iter::once((norm(dt, dt), &hidden[target * h..(target + 1) * h])).chain(
            graph
                .in_neighbors(target)
                .iter()
                .map(|&u| (norm(graph.degree(u), dt), &hidden[u * h..(u + 1) * h])),
        );
        aggregate(&mut acc, terms);
        self.output(&acc)
    }

    /// Prediction at `target` using the entire input graph.
    pub fn predict_node(&self, graph: &Graph, feats: &FeatureMatrix, target: usize) -> Result<PredictionVector> {
        feats.check_matches(graph)?;
        self.forward(&LocalGraph::from_graph(graph), feats, target)
    }

    /// Binds the model to one computational graph, precomputing the feature
    /// transform shared by every coalition.
    pub fn evaluator<'a>(&'a self, comp: &'a CompGraph, feats: &FeatureMatrix) -> Result<CoalitionEvaluator<'a>> {
        CoalitionEvaluator::new(self, comp, feats)
    }
}

/// Free-function form of [`GcnModel::forward`].
pub fn gcn_forward(
    model: &GcnModel,
    graph: &LocalGraph,
    feats: &FeatureMatrix,
    target: usize,
) -> Result<PredictionVector> {
    model.forward(graph, feats, target)
}

fn norm(du: usize, dv: usize) -> f64 {
    1.0 / ((du as f64) * (dv as f64)).sqrt()
}

fn aggregate<'r>(out: &mut [f64], terms: impl Iterator<Item = (f64, &'r [f32])>) {
    out.fill(0.0);
    for (w, row) in terms {
        for (o, &x) in out.iter_mut().zip(row) {
            *o += w * x as f64;
        }
    }
}

/// Explained-class probabilities for a batch of coalitions.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchPredictions {
    pub values: Vec<f64>,
    /// Rows answered with the base value without a forward pass.
    pub pruned: usize,
}

struct Scratch {
    degree: Vec<usize>,
    hidden: Vec<f32>,
    acc: Vec<f64>,
    z: Vec<f64>,
}

/// A model bound to one computational graph.
///
/// Holds `X · W0` for every local node so each coalition only pays for the
/// two sparse aggregations that reach the target.
pub struct CoalitionEvaluator<'a> {
    model: &'a GcnModel,
    comp: &'a CompGraph,
    feats: FeatureMatrix,
    transformed: Vec<f32>,
    base_degree: Vec<usize>,
    explained_class: usize,
    full_probs: PredictionVector,
    base_value: f64,
}

impl<'a> CoalitionEvaluator<'a> {
    fn new(model: &'a GcnModel, comp: &'a CompGraph, feats: &FeatureMatrix) -> Result<Self> {
        if feats.dim() != model.in_dim {
            return Err(Error::Shape(format!(
                "features have dim {}, model expects {}",
                feats.dim(),
                model.in_dim
            )));
        }
        if let Some(&bad) = comp.local_nodes().iter().find(|&&g| g >= feats.num_nodes()) {
            return Err(Error::NodeOutOfRange {
                id: bad,
                num_nodes: feats.num_nodes(),
            });
        }
        if comp.num_layers() < 2 {
            return Err(Error::InvalidArgument(
                "a two-layer model needs a computational graph with at least 2 layers".into(),
            ));
        }
        let feats = feats.gather(comp.local_nodes());
        let h = model.hidden;
        let a = comp.num_local_nodes();
        let mut transformed = vec![0f32; a * h];
        for v in 0..a {
            model.transform(feats.row(v), &mut transformed[v * h..(v + 1) * h]);
        }
        let base_degree = (0..a)
            .map(|v| match model.normalization {
                Normalization::Coalition => 1 + comp.fixed_in_degree(v),
                Normalization::Frozen => 1 + comp.full_in_degree()[v],
            })
            .collect();
        let mut ev = CoalitionEvaluator {
            model,
            comp,
            feats,
            transformed,
            base_degree,
            explained_class: 0,
            full_probs: PredictionVector { probs: vec![] },
            base_value: 0.0,
        };
        let mut scratch = ev.scratch().map_err(|_| Error::OutOfMemory { batch: 0 })?;
        let full = mask::full_row(comp.num_players());
        ev.full_probs = ev.probs_with(&full, &mut scratch)?;
        ev.explained_class = ev.full_probs.argmax();
        let empty = vec![0u64; full.len()];
        ev.base_value = ev.probs_with(&empty, &mut scratch)?.prob(ev.explained_class);
        Ok(ev)
    }

    pub fn comp(&self) -> &CompGraph {
        self.comp
    }

    /// Class with the highest probability when every player is present.
    pub fn explained_class(&self) -> usize {
        self.explained_class
    }

    /// Explained-class probability with every player present.
    pub fn full_value(&self) -> f64 {
        self.full_probs.prob(self.explained_class)
    }

    pub fn full_probs(&self) -> &PredictionVector {
        &self.full_probs
    }

    /// Explained-class probability with no player present.
    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    fn scratch(&self) -> std::result::Result<Scratch, std::collections::TryReserveError> {
        let h = self.model.hidden;
        let fan_in = self.comp.players_into(0).len() + 1;
        let mut s = Scratch {
            degree: Vec::new(),
            hidden: Vec::new(),
            acc: Vec::new(),
            z: Vec::new(),
        };
        s.degree.try_reserve_exact(self.base_degree.len())?;
        s.hidden.try_reserve_exact(fan_in * h)?;
        s.acc.try_reserve_exact(h)?;
        s.z.try_reserve_exact(h)?;
        s.degree.resize(self.base_degree.len(), 0);
        s.hidden.resize(fan_in * h, 0.0);
        s.acc.resize(h, 0.0);
        s.z.resize(h, 0.0);
        Ok(s)
    }

    fn probs_with(&self, row: &[u64], s: &mut Scratch) -> Result<PredictionVector> {
        let h = self.model.hidden;
        let comp = self.comp;
        let players = comp.players();
        s.degree.copy_from_slice(&self.base_degree);
        if self.model.normalization == Normalization::Coalition {
            for j in mask::ones(row) {
                s.degree[players[j].dst] += 1;
            }
        }
        let degree = &s.degree;
        let present_into = |v: usize| comp.players_into(v).filter(|&j| mask::bit(row, j));

        // Layer 1 at the target (slot 0) and at each present in-neighbour.
        let mut slots = 0;
        for v in std::iter::once(0).chain(present_into(0).map(|j| players[j].src)) {
            let dv = degree[v];
            let terms = std::iter::once((norm(dv, dv), &self.transformed[v * h..(v + 1) * h])).chain(
                present_into(v).map(|j| {
                    let u = players[j].src;
                    (norm(degree[u], dv), &self.transformed[u * h..(u + 1) * h])
                }),
            );
            aggregate(&mut s.acc, terms);
            self.model
                .hidden_activation(&s.acc, &mut s.hidden[slots * h..(slots + 1) * h]);
            slots += 1;
        }

        let dt = degree[0];
        let terms = std::iter::once(norm(dt, dt))
            .chain(present_into(0).map(|j| norm(degree[players[j].src], dt)))
            .zip(s.hidden.chunks_exact(h));
        aggregate(&mut s.z, terms.map(|(w, row)| (w, row)));
        self.model.output(&s.z)
    }

    /// Class distribution for one coalition, always running the forward pass.
    pub fn probs(&self, row: &[u64]) -> Result<PredictionVector> {
        let mut s = self.scratch().map_err(|_| Error::OutOfMemory { batch: 0 })?;
        self.probs_with(row, &mut s)
    }

    /// Explained-class probability for one coalition, always running the
    /// forward pass.
    pub fn value(&self, row: &[u64]) -> Result<f64> {
        Ok(self.probs(row)?.prob(self.explained_class))
    }

    /// Explained-class probability for every mask row. Rows with no edge into
    /// the target get the base value directly. Batches run in parallel; the
    /// result does not depend on `batch_size` or thread count.
    pub fn predict(&self, masks: &MaskMatrix, batch_size: usize) -> Result<BatchPredictions> {
        if masks.cols() != self.comp.num_players() {
            return Err(Error::Shape(format!(
                "mask has {} columns, computational graph has {} players",
                masks.cols(),
                self.comp.num_players()
            )));
        }
        if batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        let mut values = vec![0f64; masks.rows()];
        let pruned: usize = values
            .par_chunks_mut(batch_size)
            .enumerate()
            .map(|(b, chunk)| -> Result<usize> {
                let mut s = self.scratch().map_err(|_| Error::OutOfMemory { batch: b })?;
                let mut pruned = 0;
                for (i, out) in chunk.iter_mut().enumerate() {
                    let row = masks.row(b * batch_size + i);
                    if self.comp.should_prune_prediction(row) {
                        *out = self.base_value;
                        pruned += 1;
                    } else {
                        *out = self.probs_with(row, &mut s)?.prob(self.explained_class);
                    }
                }
                Ok(pruned)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        Ok(BatchPredictions { values, pruned })
    }

    /// One independent full forward pass per row, rebuilding the masked
    /// subgraph and its feature transform every time. Reference path for
    /// benchmarks and equivalence checks.
    pub fn predict_sequential(&self, masks: &MaskMatrix) -> Result<Vec<f64>> {
        (0..masks.rows())
            .map(|i| {
                let graph = self.comp.coalition_graph(Some(masks.row(i)), self.model.normalization);
                Ok(self.model.forward(&graph, &self.feats, 0)?.prob(self.explained_class))
            })
            .collect()
    }
}

/// Explained-class probabilities for every row of `masks` on `comp`.
pub fn batched_masked_predict(
    model: &GcnModel,
    comp: &CompGraph,
    feats: &FeatureMatrix,
    masks: &MaskMatrix,
    batch_size: usize,
) -> Result<BatchPredictions> {
    model.evaluator(comp, feats)?.predict(masks, batch_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_model() -> GcnModel {
        GcnModel::new(2, 2, 2, vec![1., 0., 0., 1.], vec![0.; 2], vec![1., 0., 0., 1.], vec![0.; 2]).unwrap()
    }

    #[test]
    fn two_node_uniform() {
        let g = LocalGraph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let x = FeatureMatrix::new(2, 2, vec![1., 0., 0., 1.]).unwrap();
        let p = identity_model().forward(&g, &x, 0).unwrap();
        assert!((p.probs[0] - 0.5).abs() < 1e-12 && (p.probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn isolated_node_is_plain_mlp() {
        let m = GcnModel::new(2, 3, 2, vec![0.5, -1., 2., 1., 0.25, -0.5], vec![0.1, 0., -0.2], vec![1., -1., 0.5, 2., -0.3, 0.7], vec![0.05, -0.05]).unwrap();
        let g = LocalGraph::from_edges(1, &[]).unwrap();
        let x = [0.3f32, -1.2];
        let p = m.forward(&g, &FeatureMatrix::new(1, 2, x.to_vec()).unwrap(), 0).unwrap();
        // Hand evaluation with Â = [1].
        let h: Vec<f64> = (0..3)
            .map(|j| (x[0] as f64 * m.w0[j] as f64 + x[1] as f64 * m.w0[3 + j] as f64 + m.b0[j] as f64).max(0.0))
            .collect();
        let logits: Vec<f64> = (0..2)
            .map(|c| (0..3).map(|j| h[j] * m.w1[j * 2 + c] as f64).sum::<f64>() + m.b1[c] as f64)
            .collect();
        let e: Vec<f64> = logits.iter().map(|l| l.exp()).collect();
        let s: f64 = e.iter().sum();
        for c in 0..2 {
            assert!((p.probs[c] - e[c] / s).abs() < 1e-6);
        }
    }

    #[test]
    fn model_validation() {
        assert!(GcnModel::new(2, 2, 1, vec![0.; 4], vec![0.; 2], vec![0.; 2], vec![0.; 1]).is_err());
        assert!(GcnModel::new(2, 2, 2, vec![0.; 3], vec![0.; 2], vec![0.; 4], vec![0.; 2]).is_err());
        assert!(GcnModel::new(2, 2, 2, vec![f32::NAN; 4], vec![0.; 2], vec![0.; 4], vec![0.; 2]).is_err());
        let m = identity_model();
        assert_eq!(GcnModel::from_archive(&m.to_archive()).unwrap(), m);
    }

    #[test]
    fn local_graph_validation() {
        assert!(LocalGraph::from_edges(2, &[(0, 2)]).is_err());
        assert!(LocalGraph::from_edges(2, &[(1, 1)]).is_err());
        assert!(LocalGraph::from_edges(2, &[(0, 1), (0, 1)]).is_err());
    }
}
