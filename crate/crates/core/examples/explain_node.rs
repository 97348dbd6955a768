// Explain one node end to end and print its most important edges.

use edgeshap::synth::gen_planted_task;
use edgeshap::{explain_node, ExplainConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let task = gen_planted_task(200, 6, 3)?;
    let planted = task.planted_edges[0];
    let config = ExplainConfig {
        num_samples: 4000,
        ..ExplainConfig::default()
    };
    let e = explain_node(&task.graph, &task.feats, &task.model, planted.target, &config)?;
    println!(
        "node {} class {}: base {:.4}, full {:.4}, {} players",
        e.node,
        e.explained_class,
        e.base_value,
        e.full_value,
        e.num_players()
    );
    let mut ranked = e.players.clone();
    ranked.sort_by(|a, b| b.phi.abs().total_cmp(&a.phi.abs()));
    for p in ranked.iter().take(5) {
        println!("  {:>4} -> {:<4} {:+.5}", p.src, p.dst, p.phi);
    }
    println!("efficiency gap {:.2e}, {:.1} ms", e.efficiency_gap(), e.elapsed_ms());
    assert!(e.efficiency_gap() < 1e-6);
    assert_eq!((ranked[0].src, ranked[0].dst), (planted.src, planted.target));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
