use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::graph::{enumerate_triples, Bipartition, Graph, TripleIndexSet, TripleMode};

/// A graph with vertex attributes and planar positions.
#[derive(Clone, Debug)]
pub struct Framework {
    pub graph: Graph,
    pub attrs: Bipartition,
    pub config: Configuration,
}

impl Framework {
    pub fn new(graph: Graph, attrs: Bipartition, config: Configuration) -> Result<Framework> {
        if attrs.len() != graph.n() || config.len() != graph.n() {
            return Err(Error::InvalidInput(format!(
                "framework size mismatch: {} vertices, {} attributes, {} positions",
                graph.n(),
                attrs.len(),
                config.len()
            )));
        }
        if let Some((i, j)) = config.collocated_pair(0.0) {
            return Err(Error::Collocated(i + 1, j + 1));
        }
        Ok(Framework { graph, attrs, config })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn triples(&self, mode: TripleMode) -> (TripleIndexSet, TripleIndexSet) {
        enumerate_triples(&self.graph, &self.attrs, mode)
    }

    /// Same graph and positions with `A` and `D` exchanged.
    pub fn swapped(&self) -> Framework {
        Framework { graph: self.graph.clone(), attrs: self.attrs.swapped(), config: self.config.clone() }
    }
}
