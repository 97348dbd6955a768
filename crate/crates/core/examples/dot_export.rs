// Render an explanation as Graphviz DOT.

use edgeshap::cli::{to_dot, DotOptions};
use edgeshap::synth::gen_random_task;
use edgeshap::{explain_node, ExplainConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let task = gen_random_task(60, 3.0, 6, 8, 3, 5)?;
    let e = explain_node(&task.graph, &task.feats, &task.model, 7, &ExplainConfig { num_samples: 1000, ..Default::default() })?;
    let opts = DotOptions {
        threshold: 0.0,
        top_k: Some(6),
    };
    let dot = to_dot(&e, &opts, |v| task.model.predict_node(&task.graph, &task.feats, v).ok().map(|p| p.argmax()))?;
    print!("{dot}");
    assert_eq!(dot.matches("->").count(), 6.min(e.num_players()));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
