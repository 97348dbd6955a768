// Score explanations with Fidelity- over sparsity and Fidelity+ over top-k.

use edgeshap::metrics::{fidelity_minus, fidelity_minus_random, fidelity_plus};
use edgeshap::synth::gen_planted_task;
use edgeshap::{explain_node, ExplainConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let task = gen_planted_task(300, 6, 1)?;
    let config = ExplainConfig {
        num_samples: 2000,
        ..ExplainConfig::default()
    };
    let expls = task
        .targets
        .iter()
        .take(30)
        .map(|&v| explain_node(&task.graph, &task.feats, &task.model, v, &config))
        .collect::<Result<Vec<_>, _>>()?;

    println!("sparsity  fid-   random");
    for s in [0.0, 0.3, 0.6, 0.9] {
        let ours = fidelity_minus(&task.model, &task.graph, &task.feats, &expls, s)?;
        let rand = fidelity_minus_random(&task.model, &task.graph, &task.feats, &expls, s, 0)?;
        println!("{s:8.1}  {:.4}  {:.4}", ours.fidelity_minus, rand.fidelity_minus);
    }
    for k in [1, 5, 10] {
        let r = fidelity_plus(&task.model, &task.graph, &task.feats, &expls, k)?;
        println!("top-{k:<2} fid+ {:.4}", r.fidelity_plus);
    }
    let r = fidelity_minus(&task.model, &task.graph, &task.feats, &expls, 0.5)?;
    print!("{}", r.to_csv().lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
