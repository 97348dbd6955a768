//! Shapley values from masked predictions.
//!
//! The surrogate `y_i ≈ base + m_i · φ` is fit by weighted least squares.
//! Efficiency (`Σφ = full - base`) is imposed by one extra all-ones row with
//! weight `1e6 · max W`, and a ridge of `1e-10 · trace(MᵀWM) / n` keeps the
//! normal equations positive definite when random rows repeat.
//!
//! A finite anchor leaves a small efficiency residual. Both solvers remove it
//! by moving along `A⁻¹1`, where `A` is the anchored normal matrix. Every
//! solution of `A x = b + t·1` is the ridge minimizer with some multiplier on
//! the constraint, so the corrected point is the exact constrained minimizer.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mask::{self, MaskMatrix};
use crate::sampler::SamplePlan;

pub const ANCHOR_SCALE: f64 = 1e6;
pub const RIDGE: f64 = 1e-10;
/// Above this many players the iterative solver is used.
pub const DIRECT_LIMIT: usize = 5000;

/// `MᵀWM` (dense, symmetric) and `MᵀW r`.
struct NormalEquations {
    n: usize,
    gram: Vec<f64>,
    rhs: Vec<f64>,
}

fn check_inputs(plan: &SamplePlan, y: &[f64]) -> Result<()> {
    if y.len() != plan.num_samples() {
        return Err(Error::Shape(format!(
            "{} predictions for {} samples",
            y.len(),
            plan.num_samples()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("predictions".into()));
    }
    Ok(())
}

fn centered_rhs(masks: &MaskMatrix, weights: &[f64], y: &[f64], base: f64) -> Vec<f64> {
    let mut rhs = vec![0f64; masks.cols()];
    for i in 0..masks.rows() {
        let r = weights[i] * (y[i] - base);
        for j in mask::ones(masks.row(i)) {
            rhs[j] += r;
        }
    }
    rhs
}

impl NormalEquations {
    fn build(plan: &SamplePlan, y: &[f64], base: f64, full: f64) -> Self {
        let masks = plan.mask();
        let weights = plan.weights();
        let n = masks.cols();
        let k = masks.rows();

        // Row a of the Gram matrix, upper triangle; rows are summed in sample
        // order so the result is independent of thread count.
        let mut gram = vec![0f64; n * n];
        gram.par_chunks_mut(n).enumerate().for_each(|(a, out)| {
            for i in 0..k {
                let row = masks.row(i);
                if mask::bit(row, a) {
                    let w = weights[i];
                    for b in mask::ones(row).filter(|&b| b >= a) {
                        out[b] += w;
                    }
                }
            }
        });
        for a in 0..n {
            for b in 0..a {
                gram[a * n + b] = gram[b * n + a];
            }
        }
        let trace: f64 = (0..n).map(|a| gram[a * n + a]).sum();
        let ridge = RIDGE * trace / n as f64;
        let anchor_weight = ANCHOR_SCALE * weights.iter().copied().fold(0.0, f64::max);

        let mut rhs = centered_rhs(masks, weights, y, base);
        for (a, r) in rhs.iter_mut().enumerate() {
            *r += anchor_weight * (full - base);
            for b in 0..n {
                gram[a * n + b] += anchor_weight;
            }
            gram[a * n + a] += ridge;
        }
        NormalEquations { n, gram, rhs }
    }
}

/// Direct dense solve of the anchored normal equations.
pub fn solve_wls(plan: &SamplePlan, y: &[f64], base_value: f64, full_value: f64) -> Result<Vec<f64>> {
    check_inputs(plan, y)?;
    let eq = NormalEquations::build(plan, y, base_value, full_value);
    let n = eq.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let a = DMatrix::from_row_slice(n, n, &eq.gram);
    let b = DVector::from_vec(eq.rhs);
    let ones = DVector::from_element(n, 1.0);
    let (x, u) = match a.clone().cholesky() {
        Some(chol) => (chol.solve(&b), chol.solve(&ones)),
        None => {
            let lu = a.lu();
            let u = lu.u();
            let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].abs()).collect();
            let hi = diag.iter().copied().fold(0.0, f64::max);
            let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
            let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            match (lu.solve(&b), lu.solve(&ones)) {
                (Some(x), Some(u)) if condition.is_finite() && condition < 1e15 => (x, u),
                _ => return Err(Error::Singular { condition }),
            }
        }
    };
    let x = project(x.as_slice(), u.as_slice(), full_value - base_value);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular { condition: f64::INFINITY });
    }
    Ok(x)
}

/// Moves `x` along `u = A⁻¹1` until its entries sum to `target`.
fn project(x: &[f64], u: &[f64], target: f64) -> Vec<f64> {
    let su: f64 = u.iter().sum();
    let gap = target - x.iter().sum::<f64>();
    if su == 0.0 || !su.is_finite() {
        return x.to_vec();
    }
    x.iter().zip(u).map(|(xi, ui)| xi + ui * gap / su).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSolution {
    pub phis: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iters` ran out first; `phis` is then the best iterate.
    pub converged: bool,
}

/// Conjugate gradient on the same anchored, ridge-regularized normal
/// equations, without forming `MᵀWM`. Preconditioned by the diagonal plus
/// the rank-one anchor term (inverted with Sherman-Morrison). Stops when the
/// residual norm drops below `tol · ‖rhs‖`.
pub fn solve_iterative(
    plan: &SamplePlan,
    y: &[f64],
    base_value: f64,
    full_value: f64,
    max_iters: usize,
    tol: f64,
) -> Result<IterativeSolution> {
    check_inputs(plan, y)?;
    let masks = plan.mask();
    let weights = plan.weights();
    let n = masks.cols();
    let k = masks.rows();

    let mut diag = vec![0f64; n];
    for i in 0..k {
        for j in mask::ones(masks.row(i)) {
            diag[j] += weights[i];
        }
    }
    let ridge = RIDGE * diag.iter().sum::<f64>() / n.max(1) as f64;
    let anchor = ANCHOR_SCALE * weights.iter().copied().fold(0.0, f64::max);
    diag.iter_mut().for_each(|d| *d += ridge);

    let mut rhs = centered_rhs(masks, weights, y, base_value);
    rhs.iter_mut().for_each(|r| *r += anchor * (full_value - base_value));

    let apply = |v: &[f64], out: &mut [f64]| {
        let products: Vec<f64> = (0..k)
            .into_par_iter()
            .map(|i| weights[i] * mask::ones(masks.row(i)).map(|j| v[j]).sum::<f64>())
            .collect();
        out.fill(0.0);
        for (i, p) in products.iter().enumerate() {
            for j in mask::ones(masks.row(i)) {
                out[j] += p;
            }
        }
        let total: f64 = v.iter().sum();
        for (o, &x) in out.iter_mut().zip(v) {
            *o += anchor * total + ridge * x;
        }
    };
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / (d + anchor)).collect();
    // (D' + anchor·11ᵀ)⁻¹ with D' = diag without the anchor's own diagonal share.
    let d_prime_inv: Vec<f64> = diag.iter().map(|d| 1.0 / d.max(f64::MIN_POSITIVE)).collect();
    let sm_denom = 1.0 + anchor * d_prime_inv.iter().sum::<f64>();
    let precondition = |r: &[f64], out: &mut [f64]| {
        if !sm_denom.is_finite() {
            for ((o, &ri), &d) in out.iter_mut().zip(r).zip(&inv_diag) {
                *o = ri * d;
            }
            return;
        }
        let dr: f64 = r.iter().zip(&d_prime_inv).map(|(a, b)| a * b).sum();
        for ((o, &ri), &di) in out.iter_mut().zip(r).zip(&d_prime_inv) {
            *o = di * ri - anchor * di * dr / sm_denom;
        }
    };

    if n == 0 || rhs.iter().all(|&r| r == 0.0) {
        return Ok(IterativeSolution {
            phis: vec![0.0; n],
            iterations: 0,
            converged: true,
        });
    }
    let (x, it_x, ok_x) = conjugate_gradient(n, &rhs, &apply, &precondition, max_iters, tol);
    let (u, it_u, ok_u) = conjugate_gradient(n, &vec![1.0; n], &apply, &precondition, max_iters, tol);
    Ok(IterativeSolution {
        phis: project(&x, &u, full_value - base_value),
        iterations: it_x + it_u,
        converged: ok_x && ok_u,
    })
}

/// Preconditioned CG from zero. Returns the best iterate, the iteration
/// count and whether the relative residual reached `tol`.
fn conjugate_gradient(
    n: usize,
    rhs: &[f64],
    apply: &dyn Fn(&[f64], &mut [f64]),
    precondition: &dyn Fn(&[f64], &mut [f64]),
    max_iters: usize,
    tol: f64,
) -> (Vec<f64>, usize, bool) {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rhs_norm = norm(rhs);
    let mut x = vec![0f64; n];
    if rhs_norm == 0.0 {
        return (x, 0, true);
    }
    let mut r = rhs.to_vec();
    let mut z = vec![0f64; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0f64; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut best = (norm(&r), x.clone());
    for it in 1..=max_iters {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for j in 0..n {
            x[j] += alpha * p[j];
            r[j] -= alpha * ap[j];
        }
        let rn = norm(&r);
        if rn < best.0 {
            best = (rn, x.clone());
        }
        if rn <= tol * rhs_norm {
            return (x, it, true);
        }
        precondition(&r, &mut z);
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for j in 0..n {
            p[j] = z[j] + beta * p[j];
        }
    }
    (best.1, max_iters, false)
}

/// Picks the direct solver up to [`DIRECT_LIMIT`] players, CG beyond.
pub fn solve(plan: &SamplePlan, y: &[f64], base_value: f64, full_value: f64) -> Result<Vec<f64>> {
    if plan.num_players() <= DIRECT_LIMIT {
        solve_wls(plan, y, base_value, full_value)
    } else {
        let sol = solve_iterative(plan, y, base_value, full_value, 2000, 1e-10)?;
        Ok(sol.phis)
    }
}

/// A cooperative game over at most 20 players; coalitions are bitmasks.
pub trait Game {
    fn num_players(&self) -> usize;
    fn value(&self, coalition: u32) -> f64;
}

/// Wraps a closure as a [`Game`].
pub struct FnGame<F> {
    pub num_players: usize,
    pub value: F,
}

impl<F: Fn(u32) -> f64> Game for FnGame<F> {
    fn num_players(&self) -> usize {
        self.num_players
    }

    fn value(&self, coalition: u32) -> f64 {
        (self.value)(coalition)
    }
}

pub const EXACT_LIMIT: usize = 20;

/// Shapley values by summing every marginal contribution.
pub fn exact_shapley(game: &impl Game) -> Result<Vec<f64>> {
    let n = game.num_players();
    if n > EXACT_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "exact Shapley values are limited to {EXACT_LIMIT} players, got {n}"
        )));
    }
    let values: Vec<f64> = (0..1u32 << n).map(|s| game.value(s)).collect();
    // |S|! (n-|S|-1)! / n!  =  1 / (n · C(n-1, |S|))
    let weight: Vec<f64> = (0..n)
        .map(|s| 1.0 / (n as f64 * crate::combinatorics::binomial(n - 1, s) as f64))
        .collect();
    Ok((0..n)
        .map(|i| {
            let bit = 1u32 << i;
            (0..1u32 << n)
                .filter(|s| s & bit == 0)
                .map(|s| weight[s.count_ones() as usize] * (values[(s | bit) as usize] - values[s as usize]))
                .sum()
        })
        .collect())
}
