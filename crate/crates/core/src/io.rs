//! File formats: node CSV, complex JSON, section JSON and LH CSV.
//!
//! All writers are deterministic so that re-running a pipeline step yields
//! byte-identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::activation::{Section, Value};
use crate::complex::{build_closure, Cell, Complex, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{Coord, NetworkModel, NodeGeom};
use crate::homology::LocalHomologyScore;

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Reads `id,x,y,radius` rows.
pub fn read_nodes_csv<T, R>(r: R) -> Result<NetworkModel<T>>
where
    T: Coord + for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rd.headers().map_err(Error::from_csv)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "x", "y", "radius"] {
        return Err(Error::Parse { line: 1, message: "expected header id,x,y,radius".into() });
    }
    let mut nodes: Vec<NodeGeom<T>> = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rd.deserialize() {
        let node: NodeGeom<T> = row.map_err(Error::from_csv)?;
        let line = nodes.len() as u64 + 2;
        if !seen.insert(node.id) {
            return Err(Error::Parse { line, message: format!("duplicate node id {}", node.id) });
        }
        if !(node.radius > T::zero() && node.radius.is_finite() && node.x.is_finite() && node.y.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("node {} needs finite coordinates and a positive radius", node.id),
            });
        }
        nodes.push(node);
    }
    NetworkModel::new(nodes)
}

pub fn write_nodes_csv<T, W>(w: W, net: &NetworkModel<T>) -> Result<()>
where
    T: Coord + Serialize,
    W: Write,
{
    let mut wr = csv_writer(w);
    for n in net.nodes() {
        wr.serialize(n).map_err(Error::from_csv)?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexDoc {
    vertices: Vec<u32>,
    facets: Vec<Vec<u32>>,
}

/// `{"vertices": [...], "facets": [[...]]}`; only facets are stored.
pub fn complex_to_json(x: &Complex) -> String {
    let doc = ComplexDoc {
        vertices: x.vertices().iter().map(|v| v.0).collect(),
        facets: x.facets().iter().map(|f| f.vertices().iter().map(|v| v.0).collect()).collect(),
    };
    serde_json::to_string(&doc).expect("complex serializes")
}

/// Rebuilds a complex as the closure of the stored facets and vertices.
pub fn complex_from_json(s: &str) -> Result<Complex> {
    let doc: ComplexDoc = serde_json::from_str(s)?;
    let mut cells = doc.facets.into_iter().map(Cell::new).collect::<Result<Vec<_>>>()?;
    cells.extend(doc.vertices.into_iter().map(Cell::vertex));
    Ok(build_closure(cells))
}

fn value_json(v: Value) -> Json {
    match v {
        Value::Node(n) => Json::from(n.0),
        Value::Bottom => Json::Null,
    }
}

pub fn section_to_json(s: &Section) -> Json {
    let assignment: serde_json::Map<String, Json> =
        s.assignment.iter().map(|(c, &v)| (c.key(), value_json(v))).collect();
    let tx: Vec<u32> = s.transmitters().iter().map(|v| v.0).collect();
    serde_json::json!({ "transmitters": tx, "assignment": assignment })
}

pub fn sections_to_json(sections: &[Section]) -> String {
    let arr: Vec<Json> = sections.iter().map(section_to_json).collect();
    serde_json::to_string_pretty(&arr).expect("sections serialize")
}

pub fn section_from_json(j: &Json) -> Result<Section> {
    let bad = |m: &str| Error::Validation(format!("section JSON: {m}"));
    let map = j.get("assignment").and_then(Json::as_object).ok_or_else(|| bad("missing assignment object"))?;
    let mut s = Section::new();
    for (k, v) in map {
        let value = match v {
            Json::Null => Value::Bottom,
            other => {
                let id = other
                    .as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| bad("values must be node ids or null"))?;
                Value::Node(VertexId(id))
            }
        };
        s.set(Cell::parse_key(k)?, value);
    }
    Ok(s)
}

/// Header `cell,dim,lh0,..,lh{max_k}`; cells quoted.
pub fn write_lh_csv<W: Write>(mut w: W, scores: &[LocalHomologyScore], max_k: usize) -> Result<()> {
    let mut header = String::from("cell,dim");
    for k in 0..=max_k {
        header.push_str(&format!(",lh{k}"));
    }
    writeln!(w, "{header}")?;
    for s in scores {
        let mut line = format!("\"{}\",{}", s.cell.key(), s.cell.dim());
        for k in 0..=max_k {
            line.push_str(&format!(",{}", s.get(k)));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_lh_csv<R: Read>(r: R) -> Result<Vec<LocalHomologyScore>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rd.headers().map_err(Error::from_csv)?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let ks = cols.len().saturating_sub(2);
    let well_formed = cols.len() >= 3
        && cols[0] == "cell"
        && cols[1] == "dim"
        && cols[2..].iter().enumerate().all(|(k, c)| *c == format!("lh{k}"));
    if !well_formed {
        return Err(Error::Parse { line: 1, message: "expected header cell,dim,lh0,...".into() });
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rd.records() {
        let row = row.map_err(Error::from_csv)?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |m: String| Error::Parse { line, message: m };
        let cell = Cell::parse_key(&row[0]).map_err(|e| parse_err(e.to_string()))?;
        let dim: usize = row[1].parse().map_err(|e| parse_err(format!("bad dim: {e}")))?;
        if dim != cell.dim() {
            return Err(parse_err(format!("dim {dim} does not match cell {cell}")));
        }
        let lh = (0..ks)
            .map(|k| row[k + 2].parse::<usize>().map_err(|e| parse_err(format!("bad lh{k}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if !seen.insert(cell.clone()) {
            return Err(parse_err(format!("duplicate cell {cell}")));
        }
        out.push(LocalHomologyScore { cell, lh });
    }
    Ok(out)
}

/// Node ids that have a vertex row in an LH table.
pub fn lh_nodes(scores: &[LocalHomologyScore]) -> BTreeSet<VertexId> {
    scores.iter().filter(|s| s.cell.dim() == 0).map(|s| s.cell.vertices()[0]).collect()
}

/// Cell counts per dimension, e.g. `0:3 1:2`.
pub fn summary_line(x: &Complex) -> String {
    let parts: BTreeMap<usize, usize> = x.f_vector().into_iter().enumerate().collect();
    parts.iter().map(|(k, n)| format!("{k}:{n}")).collect::<Vec<_>>().join(" ")
}
