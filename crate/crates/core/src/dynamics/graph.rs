use crate::error::{Error, Result};

/// A weighted edge; `target` receives input from `source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Neighbour structure of the coupling. Undirected edges are stored as two
/// directed edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n_nodes: usize,
    edges: Vec<Edge>,
    incoming: Vec<Vec<(usize, f64)>>,
}

impl CouplingGraph {
    /// Builds a graph from directed `(source, target, weight)` triples.
    pub fn directed(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(source, target, weight) in edges {
            if source >= n_nodes || target >= n_nodes {
                return Err(Error::invalid(format!(
                    "edge {source}->{target} references a node outside [0, {n_nodes})"
                )));
            }
            if source == target {
                return Err(Error::invalid(format!("self-loop at node {source}")));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::invalid(format!(
                    "edge {source}->{target} has invalid weight {weight}"
                )));
            }
            out.push(Edge {
                source,
                target,
                weight,
            });
        }
        let mut incoming = vec![Vec::new(); n_nodes];
        for e in &out {
            incoming[e.target].push((e.source, e.weight));
        }
        Ok(CouplingGraph {
            n_nodes,
            edges: out,
            incoming,
        })
    }

    /// Builds a graph where each `(i, j, w)` couples `i` and `j` both ways.
    pub fn undirected(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let both: Vec<_> = edges
            .iter()
            .flat_map(|&(i, j, w)| [(i, j, w), (j, i, w)])
            .collect();
        Self::directed(n_nodes, &both)
    }

    pub fn empty(n_nodes: usize) -> Result<Self> {
        Self::directed(n_nodes, &[])
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("ring needs at least 3 nodes"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::undirected(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::undirected(n, &edges)
    }

    /// Node 0 is the hub.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i, 1.0)).collect();
        Self::undirected(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1.0));
            }
        }
        Self::undirected(n, &edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(source, weight)` pairs feeding `node`.
    pub fn incoming(&self, node: usize) -> &[(usize, f64)] {
        &self.incoming[node]
    }

    /// Dense matrix `w[target][source]` with parallel edges summed.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; self.n_nodes]; self.n_nodes];
        for e in &self.edges {
            w[e.target][e.source] += e.weight;
        }
        w
    }

    /// Returns a copy with every edge between `a` and `b` (either direction)
    /// reweighted to `weight`.
    pub fn with_edge_weight(&self, a: usize, b: usize, weight: f64) -> Result<Self> {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let hit = (e.source == a && e.target == b) || (e.source == b && e.target == a);
                (e.source, e.target, if hit { weight } else { e.weight })
            })
            .collect();
        Self::directed(self.n_nodes, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert!(CouplingGraph::undirected(3, &[(0, 0, 1.0)]).is_err());
        assert!(CouplingGraph::undirected(3, &[(0, 3, 1.0)]).is_err());
        assert!(CouplingGraph::undirected(3, &[(0, 1, -1.0)]).is_err());
        assert!(CouplingGraph::undirected(3, &[(0, 1, f64::NAN)]).is_err());
        assert!(CouplingGraph::empty(0).is_err());
    }

    #[test]
    fn undirected_is_symmetric() {
        let g = CouplingGraph::undirected(3, &[(0, 1, 2.0), (1, 2, 0.5)]).unwrap();
        let w = g.weight_matrix();
        for (i, row) in w.iter().enumerate() {
            for (j, &wij) in row.iter().enumerate() {
                assert_eq!(wij, w[j][i]);
            }
        }
        assert_eq!(g.incoming(1).len(), 2);
    }

    #[test]
    fn families() {
        assert_eq!(CouplingGraph::ring(6).unwrap().edges().len(), 12);
        assert_eq!(CouplingGraph::complete(4).unwrap().edges().len(), 12);
        assert_eq!(CouplingGraph::star(5).unwrap().incoming(0).len(), 4);
        assert_eq!(CouplingGraph::path(3).unwrap().incoming(1).len(), 2);
    }
}
