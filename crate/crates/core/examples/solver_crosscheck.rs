// Solve the same regression directly and with conjugate gradient, and check
// both against exact Shapley values on a small game.

use edgeshap::sampler::{build_plan, Strategy};
use edgeshap::solver::{exact_shapley, solve_iterative, solve_wls, FnGame};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 10;
    // Additive terms plus one pairwise interaction.
    let value = |s: u32| {
        let additive: f64 = (0..n).filter(|j| s >> j & 1 == 1).map(|j| 0.05 * (j as f64 - 4.0)).sum();
        additive + if s & 0b11 == 0b11 { 0.2 } else { 0.0 }
    };
    let exact = exact_shapley(&FnGame { num_players: n, value })?;

    let plan = build_plan(n, 1 << n, Strategy::AllSizes, 0)?;
    let y: Vec<f64> = (0..plan.num_samples()).map(|i| value(plan.mask().row(i)[0] as u32)).collect();
    let direct = solve_wls(&plan, &y, value(0), value((1 << n) - 1))?;
    let cg = solve_iterative(&plan, &y, value(0), value((1 << n) - 1), 500, 1e-12)?;
    println!("cg: {} iterations, converged {}", cg.iterations, cg.converged);

    let mut worst: f64 = 0.0;
    for j in 0..n {
        println!("player {j}: exact {:+.6} direct {:+.6} cg {:+.6}", exact[j], direct[j], cg.phis[j]);
        worst = worst.max((exact[j] - direct[j]).abs()).max((exact[j] - cg.phis[j]).abs());
    }
    println!("largest deviation {worst:.2e}");
    assert!(worst < 1e-6);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
