//! Pruned computational graphs and the player set.
//!
//! For an `l`-layer message-passing model, the target's output reads messages
//! along directed paths of length at most `l` ending at the target. An edge
//! `u -> v` lies on such a path iff `v` is within `l - 1` message hops of the
//! target, so those edges are the players. Everything else in the `l`-hop
//! induced subgraph is dropped.

use std::collections::VecDeque;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::gcn::{LocalGraph, Normalization};
use crate::graph::Graph;
use crate::mask;

/// One directed edge of the computational graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Player {
    pub src: usize,
    pub dst: usize,
    pub src_global: usize,
    pub dst_global: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompGraph {
    target: usize,
    num_layers: usize,
    local_nodes: Vec<usize>,
    hops: Vec<usize>,
    players: Vec<Player>,
    // players[dst_offsets[v]..dst_offsets[v + 1]] all have dst == v.
    dst_offsets: Vec<usize>,
    full_in_degree: Vec<usize>,
}

impl CompGraph {
    pub fn extract_pruned(graph: &Graph, target: usize, num_layers: usize) -> Result<Self> {
        if target >= graph.num_nodes() {
            return Err(Error::NodeOutOfRange {
                id: target,
                num_nodes: graph.num_nodes(),
            });
        }
        if num_layers == 0 {
            return Err(Error::InvalidArgument("layer count must be at least 1".into()));
        }

        // Message distance to the target, explored backwards over incoming edges.
        let mut dist = std::collections::HashMap::new();
        dist.insert(target, 0usize);
        let mut order = vec![target];
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d == num_layers {
                continue;
            }
            for &u in graph.in_neighbors(v) {
                if !dist.contains_key(&u) {
                    dist.insert(u, d + 1);
                    order.push(u);
                    queue.push_back(u);
                }
            }
        }

        let mut local_nodes = order;
        local_nodes[1..].sort_unstable_by_key(|g| (dist[g], *g));
        let mut local_of = std::collections::HashMap::with_capacity(local_nodes.len());
        for (i, &g) in local_nodes.iter().enumerate() {
            local_of.insert(g, i);
        }

        let mut players = Vec::new();
        let mut dst_offsets = vec![0usize; local_nodes.len() + 1];
        for (v_local, &v) in local_nodes.iter().enumerate() {
            if dist[&v] < num_layers {
                let mut incoming: Vec<Player> = graph
                    .in_neighbors(v)
                    .iter()
                    .map(|&u| Player {
                        src: local_of[&u],
                        dst: v_local,
                        src_global: u,
                        dst_global: v,
                    })
                    .collect();
                incoming.sort_unstable_by_key(|p| p.src);
                players.extend(incoming);
            }
            dst_offsets[v_local + 1] = players.len();
        }

        let hops = local_nodes.iter().map(|g| dist[g]).collect();
        let full_in_degree = local_nodes.iter().map(|&g| graph.in_degree(g)).collect();
        Ok(CompGraph {
            target,
            num_layers,
            local_nodes,
            hops,
            players,
            dst_offsets,
            full_in_degree,
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    /// Global ids of the local nodes; local id 0 is the target.
    pub fn local_nodes(&self) -> &[usize] {
        &self.local_nodes
    }

    pub fn num_local_nodes(&self) -> usize {
        self.local_nodes.len()
    }

    /// Message distance of each local node from the target.
    pub fn hops(&self) -> &[usize] {
        &self.hops
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    /// Indices of the players pointing at local node `v`.
    pub fn players_into(&self, v: usize) -> Range<usize> {
        self.dst_offsets[v]..self.dst_offsets[v + 1]
    }

    /// In-degree of each local node in the full input graph.
    pub fn full_in_degree(&self) -> &[usize] {
        &self.full_in_degree
    }

    /// Incoming edges of `v` in the full graph that are not players. Their
    /// messages never reach the target but they still count toward `v`'s
    /// normalization degree.
    pub fn fixed_in_degree(&self, v: usize) -> usize {
        self.full_in_degree[v] - self.players_into(v).len()
    }

    /// True iff the coalition contains no edge into the target, in which case
    /// the target only sees its own features and the prediction equals the
    /// empty-coalition value.
    pub fn should_prune_prediction(&self, mask_row: &[u64]) -> bool {
        !self.players_into(0).any(|j| mask::bit(mask_row, j))
    }

    /// Local graph for a coalition (`None` = every player present).
    pub fn coalition_graph(&self, mask_row: Option<&[u64]>, normalization: Normalization) -> LocalGraph {
        let present = |j: usize| mask_row.is_none_or(|row| mask::bit(row, j));
        let edges: Vec<(usize, usize)> = self
            .players
            .iter()
            .enumerate()
            .filter(|&(j, _)| present(j))
            .map(|(_, p)| (p.src, p.dst))
            .collect();
        let mut offsets: Vec<usize> = (0..self.num_local_nodes()).map(|v| self.fixed_in_degree(v)).collect();
        if normalization == Normalization::Frozen {
            for (j, p) in self.players.iter().enumerate() {
                if !present(j) {
                    offsets[p.dst] += 1;
                }
            }
        }
        LocalGraph::from_edges_with_offsets(self.num_local_nodes(), &edges, offsets)
            .expect("comp graph players are valid local edges")
    }
}

/// Per target: directed edges of the `l`-hop induced subgraph (neighbourhood
/// taken without regard to direction) and the pruned player count.
pub fn count_reduction(graph: &Graph, targets: &[usize], num_layers: usize) -> Result<Vec<(usize, usize)>> {
    targets
        .iter()
        .map(|&t| {
            let pruned = CompGraph::extract_pruned(graph, t, num_layers)?.num_players();
            Ok((induced_edge_count(graph, t, num_layers), pruned))
        })
        .collect()
}

fn induced_edge_count(graph: &Graph, target: usize, num_layers: usize) -> usize {
    let mut dist = vec![usize::MAX; graph.num_nodes()];
    dist[target] = 0;
    let mut members = vec![target];
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == num_layers {
            continue;
        }
        for &u in graph.out_neighbors(v).iter().chain(graph.in_neighbors(v)) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                members.push(u);
                queue.push_back(u);
            }
        }
    }
    members
        .iter()
        .map(|&u| graph.out_neighbors(u).iter().filter(|&&v| dist[v] != usize::MAX).count())
        .sum()
}
