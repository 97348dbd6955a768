// Extract a target's computational graph and see which edges become players.

use edgeshap::synth::gen_cora_like;
use edgeshap::{count_reduction, CompGraph, Graph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Star around 0 with a tail 0-1-2-3: with two layers, the edge 3->2 can
    // never reach node 0, so it is not a player.
    let graph = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (0, 4)], true)?;
    let comp = CompGraph::extract_pruned(&graph, 0, 2)?;
    for p in comp.players() {
        println!("player {} -> {}", p.src_global, p.dst_global);
    }
    assert_eq!(comp.num_players(), 5);
    assert!(!comp.players().iter().any(|p| (p.src_global, p.dst_global) == (3, 2)));

    let task = gen_cora_like(0)?;
    let targets: Vec<usize> = (0..200).collect();
    let counts = count_reduction(&task.graph, &targets, 2)?;
    let before: usize = counts.iter().map(|c| c.0).sum();
    let after: usize = counts.iter().map(|c| c.1).sum();
    println!(
        "cora-like, 200 targets: {:.2} edges per subgraph, {:.2} players after pruning",
        before as f64 / 200.0,
        after as f64 / 200.0
    );
    assert!(after <= before);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
