use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::comp_graph::CompGraph;
use crate::error::{Error, Result};
use crate::gcn::GcnModel;
use crate::graph::{FeatureMatrix, Graph};
use crate::sampler::{build_plan, Strategy};
use crate::solver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplainConfig {
    pub num_layers: usize,
    pub num_samples: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub batch_size: usize,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            num_layers: 2,
            num_samples: 10_000,
            strategy: Strategy::AllSizes,
            seed: 0,
            batch_size: 1024,
        }
    }
}

/// Wall time per pipeline phase, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub prune: f64,
    pub sample: f64,
    pub predict: f64,
    pub solve: f64,
}

impl PhaseTimings {
    pub fn total(&self) -> f64 {
        self.prune + self.sample + self.predict + self.solve
    }
}

/// Shapley value of one directed edge, in global node ids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttribution {
    pub src: usize,
    pub dst: usize,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationMeta {
    /// Rows actually evaluated (the requested budget, capped at `2^n - 2`).
    pub samples: usize,
    pub strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_coalition: Option<usize>,
    pub seed: u64,
    pub layers: usize,
    pub pruned_predictions: usize,
    pub timings_ms: PhaseTimings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

/// Per-edge Shapley values for one node. `players` follows the
/// computational graph's player order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub node: usize,
    pub explained_class: usize,
    pub base_value: f64,
    pub full_value: f64,
    pub players: Vec<EdgeAttribution>,
    pub meta: ExplanationMeta,
}

impl Explanation {
    pub fn phis(&self) -> Vec<f64> {
        self.players.iter().map(|p| p.phi).collect()
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.meta.timings_ms.total()
    }

    /// `|base + Σφ - full|`.
    pub fn efficiency_gap(&self) -> f64 {
        (self.base_value + self.players.iter().map(|p| p.phi).sum::<f64>() - self.full_value).abs()
    }

    pub fn strategy(&self) -> Result<Strategy> {
        match (self.meta.strategy.as_str(), self.meta.max_coalition) {
            ("all-sizes", _) => Ok(Strategy::AllSizes),
            ("small-large", Some(max_coalition)) => Ok(Strategy::SmallLarge { max_coalition }),
            (other, _) => Err(Error::InvalidArgument(format!("unknown strategy {other:?} in explanation"))),
        }
    }

    /// Checks that `comp` has exactly this explanation's players, in order.
    pub fn check_players(&self, comp: &CompGraph) -> Result<()> {
        let same = comp.num_players() == self.players.len()
            && comp
                .players()
                .iter()
                .zip(&self.players)
                .all(|(p, e)| p.src_global == e.src && p.dst_global == e.dst);
        if same {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "explanation for node {} does not match its computational graph",
                self.node
            )))
        }
    }
}

/// Prune, sample, predict, solve.
pub fn explain_node(
    graph: &Graph,
    feats: &FeatureMatrix,
    model: &GcnModel,
    target: usize,
    config: &ExplainConfig,
) -> Result<Explanation> {
    feats.check_matches(graph)?;

    let t = Instant::now();
    let comp = CompGraph::extract_pruned(graph, target, config.num_layers)?;
    let prune = ms(t);
    let n = comp.num_players();
    if n < 2 {
        return Err(Error::TooFewPlayers { node: target, players: n });
    }

    // Small graphs cannot hold the requested small-coalition cap.
    let strategy = match config.strategy {
        Strategy::SmallLarge { max_coalition } => Strategy::SmallLarge {
            max_coalition: max_coalition.min(n / 2),
        },
        s => s,
    };
    let t = Instant::now();
    let plan = build_plan(n, config.num_samples, strategy, config.seed)?;
    let sample = ms(t);

    let t = Instant::now();
    let evaluator = model.evaluator(&comp, feats)?;
    let predictions = evaluator.predict(plan.mask(), config.batch_size)?;
    let predict = ms(t);

    let t = Instant::now();
    let base_value = evaluator.base_value();
    let full_value = evaluator.full_value();
    let phis = solver::solve(&plan, &predictions.values, base_value, full_value)?;
    let solve = ms(t);

    Ok(Explanation {
        node: target,
        explained_class: evaluator.explained_class(),
        base_value,
        full_value,
        players: comp
            .players()
            .iter()
            .zip(phis)
            .map(|(p, phi)| EdgeAttribution {
                src: p.src_global,
                dst: p.dst_global,
                phi,
            })
            .collect(),
        meta: ExplanationMeta {
            samples: plan.num_samples(),
            strategy: config.strategy.name().to_string(),
            max_coalition: match strategy {
                Strategy::SmallLarge { max_coalition } => Some(max_coalition),
                Strategy::AllSizes => None,
            },
            seed: config.seed,
            layers: config.num_layers,
            pruned_predictions: predictions.pruned,
            timings_ms: PhaseTimings {
                prune,
                sample,
                predict,
                solve,
            },
            fingerprint: None,
        },
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}
