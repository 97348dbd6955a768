// Build a coalition plan and look at its size allocation and weights.

use edgeshap::sampler::{allocate_samples, build_plan, build_plan_chunked, Strategy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = allocate_samples(12, 200)?;
    println!("n=12, k=200 counts per size: {:?}", a.counts);
    println!("fully enumerated sizes: {:?}", a.fully_enumerated_sizes());

    let plan = build_plan(12, 200, Strategy::AllSizes, 7)?;
    let half = plan.num_samples() / 2;
    println!("row 0 popcount {}, its complement {}", plan.mask().popcount(0), plan.mask().popcount(half));
    assert_eq!(plan.mask().popcount(0) + plan.mask().popcount(half), 12);
    let total: f64 = plan.weights().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);

    // The plan depends on the seed only, not on how the rows are split up.
    assert_eq!(plan, build_plan_chunked(12, 200, Strategy::AllSizes, 7, 5)?);

    let small = build_plan(12, 200, Strategy::SmallLarge { max_coalition: 2 }, 7)?;
    println!("small-large counts: {:?}", small.size_allocation());
    print!("{}", small.debug_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
