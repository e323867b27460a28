//! Undirected graphs for cluster and brickwork states.

use crate::error::{Error, Result};

/// An undirected graph over `nodes` vertices with optional text labels.
/// Self-loops and duplicate edges are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<Option<String>>,
}

impl GraphSpec {
    pub fn new(nodes: usize) -> Self {
        GraphSpec {
            nodes,
            edges: Vec::new(),
            labels: vec![None; nodes],
        }
    }

    pub fn with_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = GraphSpec::new(nodes);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self) -> usize {
        self.nodes += 1;
        self.labels.push(None);
        self.nodes - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.nodes || v >= self.nodes {
            return Err(Error::InvalidGraph(format!(
                "edge ({u}, {v}) references a node beyond {}",
                self.nodes
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
        }
        let key = (u.min(v), u.max(v));
        if self.edges.contains(&key) {
            return Err(Error::InvalidGraph(format!("duplicate edge {key:?}")));
        }
        self.edges.push(key);
        Ok(())
    }

    pub fn set_label(&mut self, node: usize, label: impl Into<String>) {
        self.labels[node] = Some(label.into());
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.labels.get(node).and_then(|l| l.as_deref())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(u, v) in &self.edges {
            if u == node {
                out.push(v);
            } else if v == node {
                out.push(u);
            }
        }
        out
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u == node || v == node)
            .count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.contains(&key)
    }

    /// Breadth-first connectivity check.
    pub fn is_connected(&self) -> bool {
        if self.nodes == 0 {
            return true;
        }
        let mut seen = vec![false; self.nodes];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.nodes
    }
}
