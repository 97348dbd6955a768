// Compare one-coalition-at-a-time prediction with the batched path.

use edgeshap::cli::bench_nodes;
use edgeshap::synth::gen_power_law_task;
use edgeshap::ExplainConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let task = gen_power_law_task(800, 4.0, 64, 4, 16, 5, 1)?;
    let config = ExplainConfig {
        num_samples: 2000,
        ..ExplainConfig::default()
    };
    let nodes: Vec<usize> = (0..10).collect();
    let r = bench_nodes(&task.graph, &task.feats, &task.model, &nodes, &config)?;
    for n in &r.nodes {
        println!(
            "node {:>3} players {:>4}: sequential {:>8.2} ms batched {:>7.2} ms, max diff {:.1e}, pruned {:.1}%",
            n.node,
            n.players,
            n.sequential_ms,
            n.batched_ms,
            n.max_abs_diff,
            100.0 * n.pruned_fraction
        );
        assert!(n.sampling_identical);
    }
    println!("{} threads, overall speedup {:.1}x", r.threads, r.speedup);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
