//! JSON file formats: networks (graph, attributes, positions, anchors and an
//! optional construction log) and externally supplied measurements. All ids
//! in files are 1-based; the edge order in a file is the canonical edge index.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::ConstructionEntry;
use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{wrap_2pi, Configuration, Measurement, MeasurementSet, Point};
use crate::graph::{Attr, Bipartition, Graph, Triple};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub attr: Attr,
    pub pos: [f64; 2],
    #[serde(default)]
    pub anchor: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Vec<ConstructionEntry>>,
}

impl NetworkFile {
    /// `anchors` are 0-based.
    pub fn from_framework(fw: &Framework, anchors: &[usize], construction: Option<Vec<ConstructionEntry>>) -> NetworkFile {
        let vertices = (0..fw.n())
            .map(|v| VertexRecord {
                id: v + 1,
                attr: fw.attrs.attr(v),
                pos: [fw.config.points[v].x, fw.config.points[v].y],
                anchor: anchors.contains(&v),
            })
            .collect();
        let edges = fw.graph.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect();
        NetworkFile { vertices, edges, construction }
    }

    /// Framework and 0-based anchor list. Vertex records may come in any
    /// order but their ids must be exactly `1..=n`.
    pub fn to_framework(&self) -> Result<(Framework, Vec<usize>)> {
        let n = self.vertices.len();
        let mut slots: Vec<Option<&VertexRecord>> = vec![None; n];
        for (k, v) in self.vertices.iter().enumerate() {
            if v.id == 0 || v.id > n {
                return Err(Error::InvalidInput(format!("vertices[{k}].id = {} outside 1..={n}", v.id)));
            }
            if slots[v.id - 1].replace(v).is_some() {
                return Err(Error::InvalidInput(format!("vertices[{k}].id = {} is repeated", v.id)));
            }
            if !(v.pos[0].is_finite() && v.pos[1].is_finite()) {
                return Err(Error::InvalidInput(format!("vertices[{k}].pos is not finite")));
            }
        }
        let recs: Vec<&VertexRecord> = slots.into_iter().map(Option::unwrap).collect();
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_one_based(n, &pairs)?;
        let attrs = Bipartition::new(recs.iter().map(|r| r.attr).collect());
        let config = Configuration::new(recs.iter().map(|r| Point::new(r.pos[0], r.pos[1])).collect());
        let anchors = recs.iter().filter(|r| r.anchor).map(|r| r.id - 1).collect();
        Ok((Framework::new(graph, attrs, config)?, anchors))
    }
}

fn with_path(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

/// Parses a network; JSON errors carry line and column.
pub fn parse_network(text: &str) -> Result<NetworkFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed network JSON: {e}")))
}

pub fn read_network(path: &Path) -> Result<NetworkFile> {
    let text = std::fs::read_to_string(path).map_err(|e| with_path(path, e))?;
    serde_json::from_str(&text).map_err(|e| with_path(path, format!("malformed network JSON: {e}")))
}

pub fn write_network(path: &Path, file: &NetworkFile) -> Result<()> {
    let text = serde_json::to_string_pretty(file).map_err(|e| with_path(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| with_path(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub apex: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// Signed angles (radians, `[0, 2pi)`) and ratios of distance keyed by 1-based triples.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFile {
    #[serde(default)]
    pub sa: Vec<MeasurementRecord>,
    #[serde(default)]
    pub rod: Vec<MeasurementRecord>,
}

impl MeasurementFile {
    pub fn from_set(ms: &MeasurementSet) -> MeasurementFile {
        let conv = |list: &[Measurement]| {
            list.iter()
                .map(|m| MeasurementRecord { apex: m.triple.apex + 1, j: m.triple.j + 1, k: m.triple.k + 1, value: m.value })
                .collect()
        };
        MeasurementFile { sa: conv(&ms.sa), rod: conv(&ms.rod) }
    }

    pub fn to_set(&self) -> Result<MeasurementSet> {
        let conv = |list: &[MeasurementRecord], what: &str, sa: bool| -> Result<Vec<Measurement>> {
            list.iter()
                .enumerate()
                .map(|(k, r)| {
                    if r.apex == 0 || r.j == 0 || r.k == 0 || r.j == r.k {
                        return Err(Error::InvalidInput(format!("{what}[{k}]: invalid 1-based triple")));
                    }
                    let (j, kk) = (r.j.min(r.k) - 1, r.j.max(r.k) - 1);
                    // listing the legs in the other order negates an angle and inverts a ratio
                    let value = match (r.j < r.k, sa) {
                        (true, _) => r.value,
                        (false, true) => wrap_2pi(-r.value),
                        (false, false) => 1.0 / r.value,
                    };
                    Ok(Measurement { triple: Triple { apex: r.apex - 1, j, k: kk }, value })
                })
                .collect()
        };
        Ok(MeasurementSet { sa: conv(&self.sa, "sa", true)?, rod: conv(&self.rod, "rod", false)? })
    }
}

pub fn read_measurements(path: &Path) -> Result<MeasurementFile> {
    let text = std::fs::read_to_string(path).map_err(|e| with_path(path, e))?;
    serde_json::from_str(&text).map_err(|e| with_path(path, format!("malformed measurement JSON: {e}")))
}
