//! Oracles shared by the integration tests. None of them call into the
//! code paths they check.

#![allow(dead_code)]

use edgeshap::{CompGraph, FeatureMatrix, GcnModel, Graph};

/// Dense two-layer GCN at `target` over an explicit directed edge list,
/// computed as `Â (Â X) W0` in f64 with a full `N × N` matrix.
pub fn dense_probs(
    num_nodes: usize,
    edges: &[(usize, usize)],
    feats: &FeatureMatrix,
    model: &GcnModel,
    target: usize,
) -> Vec<f64> {
    let n = num_nodes;
    let (d, h, c) = (model.in_dim(), model.hidden_dim(), model.num_classes());
    let mut deg = vec![1.0f64; n];
    for &(_, v) in edges {
        deg[v] += 1.0;
    }
    let mut a = vec![0.0f64; n * n];
    for v in 0..n {
        a[v * n + v] = 1.0 / deg[v];
    }
    for &(u, v) in edges {
        a[v * n + u] += 1.0 / (deg[u] * deg[v]).sqrt();
    }
    let x = |v: usize, j: usize| feats.row(v)[j] as f64;
    let w0 = |j: usize, k: usize| model.w0()[j * h + k] as f64;
    let w1 = |k: usize, m: usize| model.w1()[k * c + m] as f64;

    let mut hidden = vec![0.0f64; n * h];
    for v in 0..n {
        let mut ax = vec![0.0f64; d];
        for u in 0..n {
            let coef = a[v * n + u];
            if coef != 0.0 {
                for j in 0..d {
                    ax[j] += coef * x(u, j);
                }
            }
        }
        for k in 0..h {
            let mut s = model.b0()[k] as f64;
            for j in 0..d {
                s += ax[j] * w0(j, k);
            }
            hidden[v * h + k] = s.max(0.0);
        }
    }
    let mut ah = vec![0.0f64; h];
    for u in 0..n {
        let coef = a[target * n + u];
        for k in 0..h {
            ah[k] += coef * hidden[u * h + k];
        }
    }
    let logits: Vec<f64> = (0..c)
        .map(|m| model.b1()[m] as f64 + (0..h).map(|k| ah[k] * w1(k, m)).sum::<f64>())
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Value of every coalition (indexed by bitmask over players) for `class`,
/// evaluated on the whole graph with absent players deleted.
pub fn coalition_values(
    graph: &Graph,
    feats: &FeatureMatrix,
    model: &GcnModel,
    comp: &CompGraph,
    class: usize,
) -> Vec<f64> {
    let players: Vec<(usize, usize)> = comp.players().iter().map(|p| (p.src_global, p.dst_global)).collect();
    assert!(players.len() <= 16, "brute force limited to 16 players");
    let fixed: Vec<(usize, usize)> = graph.edges().filter(|e| !players.contains(e)).collect();
    (0..1u32 << players.len())
        .map(|s| {
            let mut edges = fixed.clone();
            edges.extend(
                players
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| s >> j & 1 == 1)
                    .map(|(_, &e)| e),
            );
            dense_probs(graph.num_nodes(), &edges, feats, model, comp.target())[class]
        })
        .collect()
}

/// Shapley values by the permutation-weight formula over all subsets.
pub fn brute_force_shapley(values: &[f64]) -> Vec<f64> {
    let n = values.len().trailing_zeros() as usize;
    let fact: Vec<f64> = (0..=n).scan(1.0, |f, i| {
        if i > 0 {
            *f *= i as f64;
        }
        Some(*f)
    }).collect();
    (0..n)
        .map(|i| {
            (0..values.len())
                .filter(|s| s >> i & 1 == 0)
                .map(|s| {
                    let size = (s as u32).count_ones() as usize;
                    fact[size] * fact[n - size - 1] / fact[n] * (values[s | 1 << i] - values[s])
                })
                .sum()
        })
        .collect()
}

/// Sequential transcription of the size-allocation procedure: one pass over
/// pair sizes `c = 1..=n/2` from the extremes inward, proportional
/// redistribution of what is left whenever a size is fully covered, then
/// round-half-up with a floor of one sample per size (when the budget
/// allows) and a total correction on the largest bin with room. Returns
/// per-size counts for sizes `0..=n`.
pub fn reference_allocation(n: usize, k: usize) -> Vec<usize> {
    fn choose(n: usize, r: usize) -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
    let half = n / 2;
    let rho = |s: usize| (n - 1) as f64 / (s * (n - s)) as f64;
    // Pair weight and first-half capacity of each pair size.
    let pair_weight = |c: usize| if 2 * c == n { rho(c) } else { 2.0 * rho(c) };
    let capacity = |c: usize| {
        let total = choose(n, c).round();
        if 2 * c == n {
            (total / 2.0).round()
        } else {
            total
        }
    };
    let mut remaining = (k / 2) as f64;
    let mut bins = vec![0f64; half + 1];
    let mut done = vec![false; half + 1];
    for c in 1..=half {
        let active: f64 = (c..=half).map(pair_weight).sum();
        let share = (remaining * pair_weight(c) / active + 0.5).floor();
        if share >= capacity(c) {
            bins[c] = capacity(c);
            done[c] = true;
            remaining -= capacity(c);
        } else {
            break;
        }
    }
    let open: Vec<usize> = (1..=half).filter(|&c| !done[c]).collect();
    if !open.is_empty() {
        let active: f64 = open.iter().map(|&c| pair_weight(c)).sum();
        let floor = if remaining >= open.len() as f64 { 1.0 } else { 0.0 };
        for &c in &open {
            bins[c] = ((remaining * pair_weight(c) / active + 0.5).floor()).max(floor);
        }
        let mut diff = remaining - open.iter().map(|&c| bins[c]).sum::<f64>();
        while diff != 0.0 {
            let mut pick = None;
            for &c in &open {
                let ok = if diff > 0.0 { bins[c] < capacity(c) } else { bins[c] > floor };
                // Largest bin; the smaller size wins ties.
                if ok && pick.is_none_or(|p: usize| bins[c] > bins[p]) {
                    pick = Some(c);
                }
            }
            let c = pick.expect("room for correction");
            let step = if diff > 0.0 {
                (capacity(c) - bins[c]).min(diff)
            } else {
                -(bins[c] - floor).min(-diff)
            };
            bins[c] += step;
            diff -= step;
        }
    }
    let mut counts = vec![0usize; n + 1];
    for c in 1..=half {
        if 2 * c == n {
            counts[c] = 2 * bins[c] as usize;
        } else {
            counts[c] = bins[c] as usize;
            counts[n - c] = bins[c] as usize;
        }
    }
    counts
}

/// All r-subsets of 0..n in lexicographic order, by the successor rule.
pub fn lexicographic_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] < n - r + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `(graph, features, model, target, n_players)` instances with
/// `lo <= n <= hi` drawn from small random tasks.
pub fn small_instances(
    count: usize,
    lo: usize,
    hi: usize,
) -> Vec<(edgeshap::synth::SyntheticTask, usize, usize)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let task = edgeshap::synth::gen_random_task(14, 2.0, 6, 8, 3, seed).unwrap();
        let mut taken = 0;
        for &t in &task.targets {
            let n = CompGraph::extract_pruned(&task.graph, t, 2).unwrap().num_players();
            if (lo..=hi).contains(&n) && taken < 3 && out.len() < count {
                out.push((task.clone(), t, n));
                taken += 1;
            }
        }
        seed += 1;
    }
    out
}
