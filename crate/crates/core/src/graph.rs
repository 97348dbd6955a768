//! Immutable CSR graph and dense node features.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::archive::{Tensor, TensorArchive, TensorData};
use crate::error::{Error, Result};

/// Directed adjacency in CSR form, rows indexed by source node.
///
/// A transposed copy (rows indexed by destination) is kept alongside, since
/// message passing walks incoming edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    directed: bool,
}

impl Graph {
    /// Builds a graph from directed `(src, dst)` pairs.
    ///
    /// With `undirected = true` every input pair is stored in both directions;
    /// listing both `u v` and `v u` in that mode is a duplicate.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)], undirected: bool) -> Result<Self> {
        let mut directed_edges = Vec::with_capacity(edges.len() * if undirected { 2 } else { 1 });
        for &(u, v) in edges {
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::NodeOutOfRange { id, num_nodes });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            directed_edges.push((u, v));
            if undirected {
                directed_edges.push((v, u));
            }
        }
        directed_edges.sort_unstable();
        if let Some(w) = directed_edges.windows(2).find(|w| w[0] == w[1]) {
            let (src, dst) = w[0];
            return Err(Error::DuplicateEdge { src, dst });
        }
        Ok(Self::from_sorted_unique(num_nodes, &directed_edges, !undirected))
    }

    fn from_sorted_unique(num_nodes: usize, edges: &[(usize, usize)], directed: bool) -> Self {
        let (row_offsets, col_indices) = csr(num_nodes, edges.iter().copied());
        let mut transposed: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (v, u)).collect();
        transposed.sort_unstable();
        let (in_offsets, in_sources) = csr(num_nodes, transposed.into_iter());
        Graph {
            num_nodes,
            row_offsets,
            col_indices,
            in_offsets,
            in_sources,
            directed,
        }
    }

    /// Reads a whitespace-separated edge list. Lines starting with `#` and
    /// blank lines are skipped.
    pub fn load_edge_list(path: impl AsRef<Path>, num_nodes: usize, undirected: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text, num_nodes, undirected)
    }

    pub fn parse_edge_list(text: &str, num_nodes: usize, undirected: bool) -> Result<Self> {
        let mut edges = Vec::new();
        let mut seen = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split([' ', '\t']).filter(|f| !f.is_empty());
            let mut next_id = || -> Result<usize> {
                let field = fields.next().ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: "expected two node ids".into(),
                })?;
                field.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid node id {field:?}"),
                })
            };
            let u = next_id()?;
            let v = next_id()?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing fields after edge".into(),
                });
            }
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::NodeOutOfRange { id, num_nodes });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = if undirected { (u.min(v), u.max(v)) } else { (u, v) };
            if seen.insert(key, line_no).is_some() {
                return Err(Error::DuplicateEdge { src: u, dst: v });
            }
            edges.push((u, v));
        }
        Self::from_edges(num_nodes, &edges, undirected)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of stored directed edges.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    /// Destinations of edges leaving `node`, ascending.
    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[node]..self.row_offsets[node + 1]]
    }

    /// Sources of edges entering `node`, ascending.
    pub fn in_neighbors(&self, node: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.row_offsets[node + 1] - self.row_offsets[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_offsets[node + 1] - self.in_offsets[node]
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_neighbors(src).binary_search(&dst).is_ok()
    }

    /// All directed edges in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Writes the edge list in the text format read by [`Graph::load_edge_list`].
    /// Undirected graphs are written with each edge once (`u < v`).
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            if !self.directed && u > v {
                continue;
            }
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_edge_list_string()).map_err(|e| Error::io(path, e))
    }
}

fn csr(num_nodes: usize, sorted: impl Iterator<Item = (usize, usize)>) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; num_nodes + 1];
    let mut cols = Vec::new();
    for (u, v) in sorted {
        offsets[u + 1] += 1;
        cols.push(v);
    }
    for i in 0..num_nodes {
        offsets[i + 1] += offsets[i];
    }
    (offsets, cols)
}

/// Row-major `num_nodes × dim` node features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    num_nodes: usize,
    dim: usize,
    values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(num_nodes: usize, dim: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != num_nodes * dim {
            return Err(Error::Shape(format!(
                "feature matrix {num_nodes}x{dim} needs {} values, got {}",
                num_nodes * dim,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix".into()));
        }
        Ok(FeatureMatrix { num_nodes, dim, values })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, node: usize) -> &[f32] {
        &self.values[node * self.dim..(node + 1) * self.dim]
    }

    /// Gathers the given rows into a new matrix.
    pub fn gather(&self, nodes: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(nodes.len() * self.dim);
        for &n in nodes {
            values.extend_from_slice(self.row(n));
        }
        FeatureMatrix {
            num_nodes: nodes.len(),
            dim: self.dim,
            values,
        }
    }

    pub fn check_matches(&self, graph: &Graph) -> Result<()> {
        if self.num_nodes != graph.num_nodes() {
            return Err(Error::Shape(format!(
                "features cover {} nodes but the graph has {}",
                self.num_nodes,
                graph.num_nodes()
            )));
        }
        Ok(())
    }

    /// Reads features from an archive holding one tensor `"x"` of shape `[N, d]`.
    pub fn from_archive(archive: &TensorArchive) -> Result<Self> {
        let t = archive
            .get("x")
            .ok_or_else(|| Error::Archive("feature archive has no tensor named \"x\"".into()))?;
        let [n, d] = t.shape[..] else {
            return Err(Error::Shape(format!("features \"x\" must be 2-D, got {:?}", t.shape)));
        };
        FeatureMatrix::new(n as usize, d as usize, t.data.to_f32()?)
    }

    pub fn to_archive(&self) -> TensorArchive {
        let mut archive = TensorArchive::default();
        archive
            .push(Tensor::new(
                "x",
                vec![self.num_nodes as u64, self.dim as u64],
                TensorData::F32(self.values.clone()),
            ))
            .expect("fresh archive has no duplicate names");
        archive
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_archive(&TensorArchive::load(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_archive().save(path)
    }
}

/// Reads a relabeling file of `original_id` tokens, one per line; the line
/// position (ignoring comments and blanks) becomes the contiguous node id.
pub fn load_relabel_map(path: impl AsRef<Path>) -> Result<HashMap<String, usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = HashMap::new();
    for (line_no, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let next = map.len();
        if map.insert(token.to_string(), next).is_some() {
            return Err(Error::Parse {
                line: line_no + 1,
                msg: format!("duplicate id {token:?} in relabel map"),
            });
        }
    }
    Ok(map)
}

/// Rewrites an edge list with arbitrary string ids into contiguous ids using a
/// relabel map.
pub fn relabel_edge_list(text: &str, map: &HashMap<String, usize>) -> Result<String> {
    let mut out = String::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let ids: Vec<&str> = trimmed.split([' ', '\t']).filter(|f| !f.is_empty()).collect();
        if ids.len() != 2 {
            return Err(Error::Parse {
                line: line_no + 1,
                msg: "expected two node ids".into(),
            });
        }
        let mut mapped = [0usize; 2];
        for (slot, id) in mapped.iter_mut().zip(&ids) {
            *slot = *map.get(*id).ok_or_else(|| Error::Parse {
                line: line_no + 1,
                msg: format!("id {id:?} missing from relabel map"),
            })?;
        }
        out.push_str(&format!("{} {}\n", mapped[0], mapped[1]));
    }
    Ok(out)
}

/// Reads a list of node ids, one per line.
pub fn load_node_list(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut nodes = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        nodes.push(token.parse().map_err(|_| Error::Parse {
            line: line_no + 1,
            msg: format!("invalid node id {token:?}"),
        })?);
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_graph_undirected() {
        let g = Graph::parse_edge_list("0 1\n1 2", 3, true).unwrap();
        assert_eq!(g.num_edges(), 4);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(g.in_neighbors(1), &[0, 2]);
    }

    #[test]
    fn empty_file() {
        let g = Graph::parse_edge_list("", 5, true).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.row_offsets(), &[0; 6]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Graph::parse_edge_list("0 0", 3, true), Err(Error::SelfLoop(0))));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n# c\n1 x", 3, true),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 7", 3, false),
            Err(Error::NodeOutOfRange { id: 7, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n1 0", 3, true),
            Err(Error::DuplicateEdge { .. })
        ));
        // Fine when directed.
        assert_eq!(Graph::parse_edge_list("0 1\n1\t0\n", 3, false).unwrap().num_edges(), 2);
    }

    #[test]
    fn relabel() {
        let map: HashMap<String, usize> = [("a", 0), ("b", 1), ("zz", 2)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let text = relabel_edge_list("a b\nb zz\n", &map).unwrap();
        assert_eq!(text, "0 1\n1 2\n");
        assert!(relabel_edge_list("a q", &map).is_err());
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..25).prop_flat_map(|n| {
            (Just(n), proptest::collection::btree_set((0..n, 0..n), 0..60))
        })
        .prop_map(|(n, set)| (n, set.into_iter().filter(|(u, v)| u < v).collect()))
    }

    proptest! {
        #[test]
        fn csr_invariants((n, edges) in arb_edges()) {
            let g = Graph::from_edges(n, &edges, true).unwrap();
            let offs = g.row_offsets();
            prop_assert_eq!(offs[0], 0);
            prop_assert_eq!(offs[n], g.num_edges());
            prop_assert!(offs.windows(2).all(|w| w[0] <= w[1]));
            for u in 0..n {
                prop_assert!(g.out_neighbors(u).windows(2).all(|w| w[0] < w[1]));
                for &v in g.out_neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                }
            }
            // Degree from offsets matches an independent scan of the input.
            for u in 0..n {
                let scanned = edges.iter().filter(|&&(a, b)| a == u || b == u).count();
                prop_assert_eq!(g.out_degree(u), scanned);
                prop_assert_eq!(g.in_degree(u), scanned);
            }
            // Edge list round trip.
            let again = Graph::parse_edge_list(&g.to_edge_list_string(), n, true).unwrap();
            prop_assert_eq!(again, g);
        }
    }
}
