// Generate each fixture kind and write one to disk.

use edgeshap::synth::{gen_planted_task, gen_power_law_task, gen_random_task};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let random = gen_random_task(100, 3.0, 8, 8, 3, 0)?;
    let planted = gen_planted_task(100, 8, 0)?;
    let power = gen_power_law_task(500, 4.0, 64, 4, 16, 5, 0)?;
    for t in [&random, &planted, &power] {
        println!("{:<10} {:>4} nodes {:>5} edges {:>4} targets", t.kind, t.graph.num_nodes(), t.graph.num_edges(), t.targets.len());
    }
    for p in planted.planted_edges.iter().take(3) {
        println!("planted edge {} -> {} decides class {}", p.src, p.target, p.label);
    }

    let dir = tempfile::tempdir()?;
    planted.save(dir.path())?;
    let mut names: Vec<String> = std::fs::read_dir(dir.path())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    names.sort();
    println!("wrote {names:?}");
    assert_eq!(gen_planted_task(100, 8, 0)?.to_files()?, planted.to_files()?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
