// Load an edge list, inspect the CSR layout and save it back.

use edgeshap::graph::{load_relabel_map, relabel_edge_list};
use edgeshap::{FeatureMatrix, Graph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let text = "# a small citation graph\n0 1\n1 2\n2 0\n2 3\n";
    let graph = Graph::parse_edge_list(text, 4, true)?;
    println!("{} nodes, {} directed edges", graph.num_nodes(), graph.num_edges());
    for v in 0..graph.num_nodes() {
        println!("node {v}: in {:?} out {:?}", graph.in_neighbors(v), graph.out_neighbors(v));
    }
    assert_eq!(graph.num_edges(), 8);
    assert!(graph.has_edge(3, 2));

    // Node ids from an external dataset are mapped to 0..N by line order.
    let dir = tempfile::tempdir()?;
    let ids = dir.path().join("ids.txt");
    std::fs::write(&ids, "paper-a\npaper-b\npaper-c\n")?;
    let map = load_relabel_map(&ids)?;
    let relabeled = relabel_edge_list("paper-c paper-a\npaper-b paper-c\n", &map)?;
    let g2 = Graph::parse_edge_list(&relabeled, map.len(), false)?;
    assert!(g2.has_edge(2, 0) && !g2.has_edge(0, 2));

    let feats = FeatureMatrix::new(4, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.5, 0.5])?;
    feats.check_matches(&graph)?;
    let path = dir.path().join("graph.txt");
    graph.save_edge_list(&path)?;
    // Undirected graphs are written with each edge once.
    let back = Graph::load_edge_list(&path, 4, true)?;
    assert_eq!(back.edges().collect::<Vec<_>>(), graph.edges().collect::<Vec<_>>());
    println!("round trip ok: {}", path.display());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
