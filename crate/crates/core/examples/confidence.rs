// Drop the edges with negative attribution and check the model's confidence.

use edgeshap::metrics::confidence_improvement;
use edgeshap::synth::gen_random_task;
use edgeshap::{explain_node, ExplainConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let task = gen_random_task(150, 4.0, 8, 16, 4, 2)?;
    let config = ExplainConfig {
        num_samples: 2000,
        ..ExplainConfig::default()
    };
    let expls: Vec<_> = task
        .targets
        .iter()
        .take(40)
        .filter_map(|&v| explain_node(&task.graph, &task.feats, &task.model, v, &config).ok())
        .collect();
    let report = confidence_improvement(&task.model, &task.graph, &task.feats, &expls)?;
    for c in report.per_node.iter().take(5) {
        println!("node {:>3}: {:.4} -> {:.4} after removing {} edges", c.node, c.before, c.after, c.removed);
    }
    println!("confidence improved for {:.1}% of {} nodes", 100.0 * report.fraction_improved, report.per_node.len());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
