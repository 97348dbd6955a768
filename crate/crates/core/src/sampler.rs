//! Coalition sampling.
//!
//! A plan holds `k` mask rows and their regression weights. The first `k/2`
//! rows are generated directly; row `k/2 + i` is the complement of row `i`.
//! Sizes `1..=n/2` therefore cover every size `1..n-1`.
//!
//! Sample counts per size follow the kernel-SHAP size weight
//! `ρ_s = (n-1) / (s (n-s))`. Sizes whose share reaches the number of
//! coalitions of that size are enumerated exactly (lexicographic unranking)
//! and their surplus goes back to the remaining sizes; every other size is
//! filled with uniform random subsets drawn with replacement.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::combinatorics::{binomial, unrank_into};
use crate::error::{Error, Result};
use crate::mask::MaskMatrix;
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Samples spread over every coalition size.
    AllSizes,
    /// Only sizes `1..=max_coalition` and their complements.
    SmallLarge { max_coalition: usize },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::AllSizes => "all-sizes",
            Strategy::SmallLarge { .. } => "small-large",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Parses `all-sizes`, `small-large` (max coalition 3) or `small-large:M`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "all-sizes" => Ok(Strategy::AllSizes),
            None if s == "small-large" => Ok(Strategy::SmallLarge { max_coalition: 3 }),
            Some(("small-large", m)) => m
                .parse()
                .map(|max_coalition| Strategy::SmallLarge { max_coalition })
                .map_err(|_| Error::InvalidArgument(format!("bad max coalition in {s:?}"))),
            _ => Err(Error::InvalidArgument(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Total kernel weight of all coalitions of size `s` among `n` players.
pub fn size_weight(n: usize, s: usize) -> Result<f64> {
    if n < 2 || s == 0 || s >= n {
        return Err(Error::InvalidArgument(format!("size weight needs 1 <= s < n, got n={n}, s={s}")));
    }
    Ok((n - 1) as f64 / (s as f64 * (n - s) as f64))
}

fn round_half_up(x: f64) -> u128 {
    (x + 0.5).floor() as u128
}

/// Number of first-half rows that size `c` (with its complement) can hold
/// before every coalition is covered once.
fn half_capacity(n: usize, c: usize) -> u128 {
    let total = binomial(n, c);
    if 2 * c == n {
        total / 2
    } else {
        total
    }
}

/// Samples per coalition size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    /// Indexed by size; entries `0` and `n` are always zero.
    pub counts: Vec<usize>,
    /// Indexed by size.
    pub enumerated: Vec<bool>,
}

impl Allocation {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn fully_enumerated_sizes(&self) -> Vec<usize> {
        (0..self.enumerated.len()).filter(|&s| self.enumerated[s]).collect()
    }
}

/// First-half row counts for sizes `1..=n/2`, plus which are enumerated.
fn allocate_half(n: usize, k: usize) -> (Vec<usize>, Vec<bool>) {
    let half = n / 2;
    let u: Vec<f64> = (0..=half)
        .map(|c| match c {
            0 => 0.0,
            c if 2 * c == n => size_weight(n, c).unwrap(),
            c => 2.0 * size_weight(n, c).unwrap(),
        })
        .collect();
    let cap: Vec<u128> = (0..=half).map(|c| half_capacity(n, c)).collect();

    let mut rows = vec![0usize; half + 1];
    let mut enumerated = vec![false; half + 1];
    let mut remaining = (k / 2) as u128;

    // Extremes inward: enumerate any size whose share covers all of its
    // coalitions, then re-split what is left among the rest.
    loop {
        let active_u: f64 = (1..=half).filter(|&c| !enumerated[c]).map(|c| u[c]).sum();
        let hit = (1..=half)
            .filter(|&c| !enumerated[c])
            .find(|&c| round_half_up(remaining as f64 * u[c] / active_u) >= cap[c]);
        match hit {
            Some(c) => {
                enumerated[c] = true;
                rows[c] = cap[c] as usize;
                remaining -= cap[c];
            }
            None => break,
        }
    }

    let active: Vec<usize> = (1..=half).filter(|&c| !enumerated[c]).collect();
    if active.is_empty() {
        return (rows, enumerated);
    }
    let active_u: f64 = active.iter().map(|&c| u[c]).sum();
    let floor = if remaining >= active.len() as u128 { 1 } else { 0 };
    for &c in &active {
        rows[c] = (round_half_up(remaining as f64 * u[c] / active_u) as usize).max(floor);
    }

    // Fix the total on the largest bin that still has room.
    let mut diff = remaining as i128 - active.iter().map(|&c| rows[c] as i128).sum::<i128>();
    while diff != 0 {
        let pick = active
            .iter()
            .copied()
            .filter(|&c| if diff > 0 { (rows[c] as u128) < cap[c] } else { rows[c] > floor })
            .max_by(|&a, &b| rows[a].cmp(&rows[b]).then(b.cmp(&a)))
            .expect("budget fits within capacity");
        let room = if diff > 0 {
            (cap[pick] - rows[pick] as u128).min(diff as u128) as i128
        } else {
            -((rows[pick] - floor) as i128).min(-diff)
        };
        rows[pick] = (rows[pick] as i128 + room) as usize;
        diff -= room;
    }
    for &c in &active {
        if rows[c] as u128 == cap[c] {
            enumerated[c] = true;
        }
    }
    (rows, enumerated)
}

fn expand_half(n: usize, rows: &[usize], enumerated_half: &[bool]) -> Allocation {
    let mut counts = vec![0usize; n + 1];
    let mut enumerated = vec![false; n + 1];
    for c in 1..rows.len() {
        if 2 * c == n {
            counts[c] = 2 * rows[c];
        } else {
            counts[c] = rows[c];
            counts[n - c] = rows[c];
            enumerated[n - c] = enumerated_half[c];
        }
        enumerated[c] = enumerated_half[c];
    }
    Allocation { counts, enumerated }
}

/// Distributes `k` samples over coalition sizes `1..n-1`.
pub fn allocate_samples(n: usize, k: usize) -> Result<Allocation> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 players, got {n}")));
    }
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("sample budget must be even and >= 2, got {k}")));
    }
    let (rows, enumerated) = allocate_half(n, k);
    Ok(expand_half(n, &rows, &enumerated))
}

/// Contiguous run of first-half rows sharing one size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Segment {
    size: usize,
    start: usize,
    len: usize,
    enumerated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    mask: MaskMatrix,
    weights: Vec<f64>,
    allocation: Allocation,
    strategy: Strategy,
    seed: u64,
}

impl SamplePlan {
    pub fn mask(&self) -> &MaskMatrix {
        &self.mask
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_players(&self) -> usize {
        self.mask.cols()
    }

    pub fn num_samples(&self) -> usize {
        self.mask.rows()
    }

    pub fn size_allocation(&self) -> &[usize] {
        &self.allocation.counts
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub fn fully_enumerated_sizes(&self) -> Vec<usize> {
        self.allocation.fully_enumerated_sizes()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `row,popcount,weight` lines, with header.
    pub fn debug_csv(&self) -> String {
        let mut out = String::from("row,popcount,weight\n");
        for (i, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{i},{},{w:e}\n", self.mask.popcount(i)));
        }
        out
    }

    /// Rebuilds a plan from its parts, e.g. a hand-written mask for tests.
    /// Only shape and weight positivity are checked.
    pub fn from_parts(mask: MaskMatrix, weights: Vec<f64>, strategy: Strategy, seed: u64) -> Result<Self> {
        if weights.len() != mask.rows() {
            return Err(Error::Shape(format!("{} weights for {} rows", weights.len(), mask.rows())));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be positive and finite".into()));
        }
        let n = mask.cols();
        let mut counts = vec![0usize; n + 1];
        for i in 0..mask.rows() {
            counts[mask.popcount(i)] += 1;
        }
        let enumerated = (0..=n)
            .map(|s| s > 0 && s < n && counts[s] as u128 == binomial(n, s))
            .collect();
        Ok(SamplePlan {
            mask,
            weights,
            allocation: Allocation { counts, enumerated },
            strategy,
            seed,
        })
    }
}

/// Builds a plan using one chunk per rayon worker.
pub fn build_plan(n: usize, k: usize, strategy: Strategy, seed: u64) -> Result<SamplePlan> {
    build_plan_chunked(n, k, strategy, seed, rayon::current_num_threads())
}

/// Builds a plan with the first-half rows split into `chunks` contiguous
/// ranges generated in parallel. The output does not depend on `chunks`.
pub fn build_plan_chunked(n: usize, k: usize, strategy: Strategy, seed: u64, chunks: usize) -> Result<SamplePlan> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 players, got {n}")));
    }
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("sample budget must be even and >= 4, got {k}")));
    }
    let (segments, allocation, half_weights) = match strategy {
        Strategy::AllSizes => all_sizes_layout(n, k),
        Strategy::SmallLarge { max_coalition } => small_large_layout(n, k, max_coalition)?,
    };
    let half: usize = segments.iter().map(|s| s.len).sum();
    let mut mask = MaskMatrix::zeros(2 * half, n);
    fill_rows(&mut mask, n, half, &segments, seed, chunks.max(1));
    let mut weights = half_weights;
    weights.extend_from_within(..);
    Ok(SamplePlan {
        mask,
        weights,
        allocation,
        strategy,
        seed,
    })
}

pub fn build_plan_small_large(n: usize, k: usize, max_coalition: usize, seed: u64) -> Result<SamplePlan> {
    build_plan(n, k, Strategy::SmallLarge { max_coalition }, seed)
}

fn all_sizes_layout(n: usize, k: usize) -> (Vec<Segment>, Allocation, Vec<f64>) {
    let (rows, enumerated) = allocate_half(n, k);
    let allocation = expand_half(n, &rows, &enumerated);
    let total_rho: f64 = (1..n).map(|s| size_weight(n, s).unwrap()).sum();

    let mut segments = Vec::new();
    let mut start = 0;
    for pass_enumerated in [true, false] {
        for c in 1..rows.len() {
            if enumerated[c] == pass_enumerated && rows[c] > 0 {
                segments.push(Segment {
                    size: c,
                    start,
                    len: rows[c],
                    enumerated: enumerated[c],
                });
                start += rows[c];
            }
        }
    }

    let half = start;
    let mut weights = Vec::with_capacity(2 * half);
    let mut enumerated_mass = 0.0;
    for seg in segments.iter().filter(|s| s.enumerated) {
        let w = size_weight(n, seg.size).unwrap() / total_rho / binomial(n, seg.size) as f64;
        weights.extend(std::iter::repeat_n(w, seg.len));
        enumerated_mass += w * seg.len as f64;
    }
    let random_rows = half - weights.len();
    if random_rows > 0 {
        let w = (0.5 - enumerated_mass) / random_rows as f64;
        weights.extend(std::iter::repeat_n(w, random_rows));
    }
    (segments, allocation, weights)
}

fn small_large_layout(n: usize, k: usize, max_coalition: usize) -> Result<(Vec<Segment>, Allocation, Vec<f64>)> {
    if max_coalition == 0 || max_coalition > n / 2 {
        return Err(Error::InvalidArgument(format!(
            "max coalition must be in 1..={}, got {max_coalition}",
            n / 2
        )));
    }
    let mut remaining = (k / 2) as u128;
    let mut segments = Vec::new();
    let mut start = 0;
    let mut rows = vec![0usize; n / 2 + 1];
    let mut enumerated = vec![false; n / 2 + 1];
    for c in 1..=max_coalition {
        if remaining == 0 {
            break;
        }
        let cap = half_capacity(n, c);
        let len = cap.min(remaining) as usize;
        enumerated[c] = len as u128 == cap;
        rows[c] = len;
        segments.push(Segment {
            size: c,
            start,
            len,
            enumerated: enumerated[c],
        });
        start += len;
        remaining -= len as u128;
    }
    let allocation = expand_half(n, &rows, &enumerated);

    // Kernel weight per coalition, normalized over both halves.
    let mut weights = Vec::with_capacity(2 * start);
    for seg in &segments {
        let w = size_weight(n, seg.size).unwrap() / binomial(n, seg.size) as f64;
        weights.extend(std::iter::repeat_n(w, seg.len));
    }
    let total: f64 = 2.0 * weights.iter().sum::<f64>();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((segments, allocation, weights))
}

fn fill_rows(mask: &mut MaskMatrix, n: usize, half: usize, segments: &[Segment], seed: u64, chunks: usize) {
    if half == 0 {
        return;
    }
    let wpr = mask.words_per_row();
    let chunk_rows = half.div_ceil(chunks);
    let (first, second) = mask.raw_mut().split_at_mut(half * wpr);
    let tail_bits = n % 64;
    first
        .par_chunks_mut(chunk_rows * wpr)
        .zip(second.par_chunks_mut(chunk_rows * wpr))
        .enumerate()
        .for_each(|(chunk, (rows, complements))| {
            let mut perm: Vec<usize> = (0..n).collect();
            let mut swaps = Vec::new();
            let mut subset = Vec::new();
            for (offset, (row, comp)) in rows.chunks_exact_mut(wpr).zip(complements.chunks_exact_mut(wpr)).enumerate() {
                let i = chunk * chunk_rows + offset;
                let seg = segment_of(segments, i);
                if seg.enumerated {
                    unrank_into(n, seg.size, (i - seg.start) as u128, &mut subset)
                        .expect("rank is below the segment's capacity");
                    for &j in &subset {
                        row[j / 64] |= 1 << (j % 64);
                    }
                } else {
                    // Partial Fisher-Yates on a per-row stream; swaps are undone after.
                    let mut rng = rng::stream(seed, Purpose::Coalition, i as u64);
                    swaps.clear();
                    for t in 0..seg.size {
                        let j = rng.random_range(t..n);
                        perm.swap(t, j);
                        swaps.push(j);
                    }
                    for &j in &perm[..seg.size] {
                        row[j / 64] |= 1 << (j % 64);
                    }
                    for (t, &j) in swaps.iter().enumerate().rev() {
                        perm.swap(t, j);
                    }
                }
                for (c, r) in comp.iter_mut().zip(row.iter()) {
                    *c = !r;
                }
                if tail_bits != 0 {
                    comp[wpr - 1] &= (1u64 << tail_bits) - 1;
                }
            }
        });
}

fn segment_of(segments: &[Segment], row: usize) -> Segment {
    let idx = segments.partition_point(|s| s.start <= row) - 1;
    segments[idx]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_weights() {
        assert_eq!(size_weight(4, 1).unwrap(), 1.0);
        assert_eq!(size_weight(4, 2).unwrap(), 0.75);
        assert!((size_weight(30, 15).unwrap() - 29.0 / 225.0).abs() < 1e-15);
        assert!(size_weight(4, 0).is_err());
        assert!(size_weight(4, 4).is_err());
        assert!(size_weight(1, 1).is_err());
    }

    #[test]
    fn budget_beyond_all_coalitions() {
        let a = allocate_samples(5, 64).unwrap();
        assert_eq!(a.counts, vec![0, 5, 10, 10, 5, 0]);
        assert_eq!(a.fully_enumerated_sizes(), vec![1, 2, 3, 4]);
        assert!(allocate_samples(5, 7).is_err());
        assert!(allocate_samples(1, 8).is_err());
    }

    #[test]
    fn thirty_players() {
        let a = allocate_samples(30, 25_000).unwrap();
        assert_eq!(a.total(), 25_000);
        assert_eq!(a.counts[1], 30);
        assert_eq!(a.counts[29], 30);
        assert!(a.enumerated[1] && a.enumerated[29]);
        assert!((1..30).all(|s| a.counts[s] > 0));
        // Past the enumerated extremes, counts fall toward the middle.
        let first_random = (1..=15).find(|&s| !a.enumerated[s]).unwrap();
        for s in first_random..15 {
            assert!(a.counts[s] >= a.counts[s + 1], "size {s}: {:?}", a.counts);
        }
        assert!(a.counts[first_random] > 2 * a.counts[15], "{:?}", a.counts);
    }

    #[test]
    fn three_players_enumerates_everything() {
        let p = build_plan(3, 6, Strategy::AllSizes, 1).unwrap();
        assert_eq!(p.num_samples(), 6);
        let mut rows: Vec<u64> = (0..6).map(|i| p.mask().row(i)[0]).collect();
        rows.sort_unstable();
        assert_eq!(rows, vec![1, 2, 3, 4, 5, 6]);
        // Every coalition of 3 players has the same kernel weight.
        for w in p.weights() {
            assert!((w - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_players() {
        let p = build_plan(2, 4, Strategy::AllSizes, 0).unwrap();
        assert_eq!(p.num_samples(), 2);
        assert_eq!(p.mask().row(0), &[0b01]);
        assert_eq!(p.mask().row(1), &[0b10]);
    }

    #[test]
    fn small_large_singletons() {
        let p = build_plan_small_large(10, 20, 1, 3).unwrap();
        assert_eq!(p.num_samples(), 20);
        for i in 0..10 {
            assert_eq!(p.mask().row(i)[0], 1 << i);
            assert_eq!(p.mask().popcount(i + 10), 9);
        }
        assert!(build_plan_small_large(10, 20, 6, 3).is_err());
        assert!(build_plan_small_large(10, 20, 0, 3).is_err());
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("all-sizes".parse::<Strategy>().unwrap(), Strategy::AllSizes);
        assert_eq!("small-large".parse::<Strategy>().unwrap(), Strategy::SmallLarge { max_coalition: 3 });
        assert_eq!("small-large:5".parse::<Strategy>().unwrap(), Strategy::SmallLarge { max_coalition: 5 });
        assert!("nope".parse::<Strategy>().is_err());
    }

    #[test]
    fn rejects_bad_budget() {
        assert!(build_plan(5, 2, Strategy::AllSizes, 0).is_err());
        assert!(build_plan(5, 7, Strategy::AllSizes, 0).is_err());
        assert!(build_plan(1, 8, Strategy::AllSizes, 0).is_err());
    }

    #[test]
    fn debug_dump() {
        let p = build_plan(3, 6, Strategy::AllSizes, 1).unwrap();
        let csv = p.debug_csv();
        assert!(csv.starts_with("row,popcount,weight\n0,1,"));
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(p.mask().to_packed_bytes().len(), 6);
    }
}
