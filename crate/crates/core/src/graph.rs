//! Undirected simple graphs over dense node indices, plus the layered view
//! used for interdependent networks.
//!
//! Adjacency is kept as one [`NodeSet`] bitset per node, so boundary and
//! reachability questions reduce to popcounts.

use std::io::{BufRead, Write};

use crate::bitset::NodeSet;
use crate::error::{Error, Result};

/// Undirected simple graph. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<NodeSet>,
    edge_count: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn edgeless(node_count: usize) -> Self {
        Graph {
            adj: vec![NodeSet::empty(node_count); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints. Orientation of each pair is irrelevant.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::edgeless(node_count);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(node_count: usize) -> Self {
        let mut g = Self::edgeless(node_count);
        for u in 0..node_count {
            for v in u + 1..node_count {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    pub fn path(node_count: usize) -> Self {
        let mut g = Self::edgeless(node_count);
        for u in 1..node_count {
            g.add_edge_unchecked(u - 1, u);
        }
        g
    }

    pub fn cycle(node_count: usize) -> Self {
        let mut g = Self::path(node_count);
        if node_count >= 3 {
            g.add_edge_unchecked(node_count - 1, 0);
        }
        g
    }

    /// Disjoint union: nodes of `other` are shifted past the nodes of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.node_count();
        let mut g = Self::edgeless(shift + other.node_count());
        for (u, v) in self.edges() {
            g.add_edge_unchecked(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge_unchecked(u + shift, v + shift);
        }
        g
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }

    pub(crate) fn try_add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.adj[u].contains(v) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.add_edge_unchecked(u, v);
        Ok(())
    }

    /// Caller guarantees `u != v`, both in range and the edge absent.
    pub(crate) fn add_edge_unchecked(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && !self.adj[u].contains(v));
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edge_count += 1;
    }

    /// Copy of the graph with one extra edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.try_add_edge(u, v)?;
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &NodeSet {
        &self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adj[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.adj[v].len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(NodeSet::len).collect()
    }

    /// `(d_min, d_max)`; errors on the empty graph.
    pub fn min_max_degree(&self) -> Result<(usize, usize)> {
        let degs = self.degrees();
        match (degs.iter().min(), degs.iter().max()) {
            (Some(&lo), Some(&hi)) => Ok((lo, hi)),
            _ => Err(Error::TooFewNodes {
                required: 1,
                found: 0,
            }),
        }
    }

    /// Edges as `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub(crate) fn check_set(&self, s: &NodeSet) -> Result<()> {
        if s.universe() != self.node_count() {
            return Err(Error::UniverseMismatch {
                expected: self.node_count(),
                found: s.universe(),
            });
        }
        Ok(())
    }

    /// Number of edges with exactly one endpoint in `s`. The empty set and the
    /// full node set both have boundary zero.
    pub fn edge_boundary_size(&self, s: &NodeSet) -> Result<usize> {
        self.check_set(s)?;
        Ok(s.iter().map(|v| self.adj[v].difference_count(s)).sum())
    }

    /// Subgraph induced by `s`, relabelled to `0..|s|` in ascending order of
    /// the original index. The second value maps new labels to old ones.
    pub fn induced_subgraph(&self, s: &NodeSet) -> Result<(Graph, Vec<usize>)> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let old: Vec<usize> = s.to_vec();
        let mut new_of = vec![usize::MAX; self.node_count()];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let mut g = Graph::edgeless(old.len());
        for (i, &v) in old.iter().enumerate() {
            for w in self.adj[v].iter() {
                let j = new_of[w];
                if j != usize::MAX && j > i {
                    g.add_edge_unchecked(i, j);
                }
            }
        }
        Ok((g, old))
    }

    /// Breadth-first connectivity test. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = NodeSet::empty(n);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(u) = stack.pop() {
            for v in self.adj[u].iter() {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == n
    }

    /// Adjacency rows as `u64` masks, available for graphs of at most 64 nodes.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.node_count() > 64 {
            return None;
        }
        Some(self.adj.iter().map(NodeSet::to_mask).collect())
    }

    /// Writes the edge-list format: `N M`, then one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.node_count(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Parses the edge-list format. Blank lines are skipped; every error
    /// carries the 1-based line number it occurred on.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = numbered_lines(r);
        let (header_line, header) = lines.next().transpose()?.ok_or(Error::Parse {
            line: 1,
            msg: "empty input, expected header `N M`".into(),
        })?;
        let [n, m] = parse_pair(&header, header_line)?;
        let mut g = Graph::edgeless(n);
        for _ in 0..m {
            let (line, text) = lines.next().transpose()?.ok_or(Error::Parse {
                line: header_line,
                msg: format!("header promises {m} edges, found {}", g.edge_count()),
            })?;
            let [u, v] = parse_pair(&text, line)?;
            g.try_add_edge(u, v).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        if let Some(extra) = lines.next().transpose()? {
            return Err(Error::Parse {
                line: extra.0,
                msg: format!("trailing content after {m} edges"),
            });
        }
        Ok(g)
    }

    pub fn from_edge_list_str(s: &str) -> Result<Graph> {
        Self::read_edge_list(s.as_bytes())
    }
}

fn numbered_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn parse_pair(text: &str, line: usize) -> Result<[usize; 2]> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("`{tok}` is not a non-negative integer"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "expected exactly two fields".into(),
        });
    }
    Ok([a, b])
}

/// A graph whose nodes are split into `k` equally sized, index-contiguous
/// layers: layer `i` holds nodes `i*n .. (i+1)*n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredGraph {
    graph: Graph,
    layers: usize,
    per_layer: usize,
}

impl LayeredGraph {
    pub fn new(graph: Graph, layers: usize, per_layer: usize) -> Result<Self> {
        if layers < 2 {
            return Err(Error::InvalidParameter(format!(
                "an interdependent network needs k >= 2 layers, got {layers}"
            )));
        }
        if per_layer == 0 {
            return Err(Error::InvalidParameter("layers must be nonempty".into()));
        }
        if graph.node_count() != layers * per_layer {
            return Err(Error::InvalidParameter(format!(
                "graph has {} nodes, expected k*n = {}",
                graph.node_count(),
                layers * per_layer
            )));
        }
        Ok(LayeredGraph {
            graph,
            layers,
            per_layer,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn per_layer(&self) -> usize {
        self.per_layer
    }

    #[inline]
    pub fn layer_of(&self, v: usize) -> usize {
        v / self.per_layer
    }

    pub fn layer_nodes(&self, layer: usize) -> NodeSet {
        let n = self.per_layer;
        NodeSet::from_indices(self.graph.node_count(), layer * n..(layer + 1) * n)
    }

    pub fn intra_edge_count(&self) -> usize {
        self.graph
            .edges()
            .filter(|&(u, v)| self.layer_of(u) == self.layer_of(v))
            .count()
    }

    pub fn inter_edge_count(&self) -> usize {
        self.graph.edge_count() - self.intra_edge_count()
    }

    /// Writes the companion layer file: one `node layer` line per node.
    pub fn write_layers<W: Write>(&self, mut w: W) -> Result<()> {
        for v in 0..self.graph.node_count() {
            writeln!(w, "{v} {}", self.layer_of(v))?;
        }
        Ok(())
    }

    /// Reads a layer file for `graph`. Layers must be equally sized and
    /// index-contiguous.
    pub fn read_layers<R: BufRead>(graph: Graph, r: R) -> Result<Self> {
        let node_count = graph.node_count();
        let mut layer_of = vec![None; node_count];
        let mut last_line = 0;
        for item in numbered_lines(r) {
            let (line, text) = item?;
            last_line = line;
            let [v, layer] = parse_pair(&text, line)?;
            let slot = layer_of.get_mut(v).ok_or(Error::Parse {
                line,
                msg: format!("node {v} out of range for {node_count} nodes"),
            })?;
            if slot.replace(layer).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("node {v} listed twice"),
                });
            }
        }
        let layer_of: Vec<usize> = layer_of
            .into_iter()
            .enumerate()
            .map(|(v, l)| {
                l.ok_or(Error::Parse {
                    line: last_line + 1,
                    msg: format!("node {v} has no layer"),
                })
            })
            .collect::<Result<_>>()?;
        let layers = layer_of.iter().max().map_or(0, |&m| m + 1);
        if layers < 2 || node_count % layers != 0 {
            return Err(Error::InvalidParameter(format!(
                "{node_count} nodes cannot form {layers} equal layers"
            )));
        }
        let per_layer = node_count / layers;
        if let Some(v) = (0..node_count).find(|&v| layer_of[v] != v / per_layer) {
            return Err(Error::InvalidParameter(format!(
                "node {v} is in layer {}, but layers must be index-contiguous blocks of {per_layer}",
                layer_of[v]
            )));
        }
        Self::new(graph, layers, per_layer)
    }
}
