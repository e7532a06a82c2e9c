//! The activation sheaf of a complex.
//!
//! The stalk over a cell `c` is the set of nodes sharing a coface with `c`,
//! plus a bottom value meaning "nothing decodable". Restriction from `c` to a
//! coface `d` keeps a node if it is still in the stalk over `d` and sends it
//! to bottom otherwise.
//!
//! Global sections correspond one-to-one with sets of nodes that can
//! transmit simultaneously without interference. Each transmitting node `n`
//! claims its active region, the closure of the star of `n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::complex::{Cell, CellSet, Complex, VertexId};
use crate::error::{Error, Result};

/// Default node-count limit for section enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// A stalk element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Node(VertexId),
    Bottom,
}

impl Value {
    pub fn node(self) -> Option<VertexId> {
        match self {
            Value::Node(n) => Some(n),
            Value::Bottom => None,
        }
    }
}

impl From<Option<VertexId>> for Value {
    fn from(v: Option<VertexId>) -> Self {
        v.map_or(Value::Bottom, Value::Node)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Node(n) => write!(f, "{n}"),
            Value::Bottom => f.write_str("⊥"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stalk {
    pub cell: Cell,
    /// Nodes in the stalk; bottom is always implicitly present.
    pub members: BTreeSet<VertexId>,
}

impl Stalk {
    pub fn contains(&self, v: Value) -> bool {
        match v {
            Value::Node(n) => self.members.contains(&n),
            Value::Bottom => true,
        }
    }
}

pub fn stalk(x: &Complex, c: &Cell) -> Result<Stalk> {
    if !x.contains(c) {
        return Err(Error::NotInComplex(c.clone()));
    }
    let members = x.cofaces(c).flat_map(|d| d.vertices().iter().copied()).collect();
    Ok(Stalk { cell: c.clone(), members })
}

/// Restriction from `face` to `coface`.
pub fn restrict(x: &Complex, face: &Cell, coface: &Cell, v: Value) -> Result<Value> {
    if !x.contains(face) {
        return Err(Error::NotInComplex(face.clone()));
    }
    if !x.contains(coface) {
        return Err(Error::NotInComplex(coface.clone()));
    }
    if !face.is_face_of(coface) {
        return Err(Error::InvalidRestriction { face: face.clone(), coface: coface.clone() });
    }
    Ok(match v {
        Value::Node(n) if stalk(x, coface)?.members.contains(&n) => Value::Node(n),
        _ => Value::Bottom,
    })
}

/// Assignment of stalk values to some cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section {
    pub assignment: BTreeMap<Cell, Value>,
}

impl Section {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bottom(x: &Complex) -> Self {
        Self { assignment: x.cells().map(|c| (c.clone(), Value::Bottom)).collect() }
    }

    pub fn set(&mut self, c: Cell, v: Value) -> &mut Self {
        self.assignment.insert(c, v);
        self
    }

    pub fn get(&self, c: &Cell) -> Option<Value> {
        self.assignment.get(c).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.assignment.keys()
    }

    /// Nodes whose own vertex is assigned to themselves.
    pub fn transmitters(&self) -> Vec<VertexId> {
        self.assignment
            .iter()
            .filter_map(|(c, v)| match (c.vertices(), v) {
                ([a], Value::Node(n)) if a == n => Some(*n),
                _ => None,
            })
            .collect()
    }

    /// `{a : s(a) = n}`.
    pub fn active_cells(&self, n: VertexId) -> CellSet {
        self.assignment.iter().filter(|(_, v)| **v == Value::Node(n)).map(|(c, _)| c.clone()).collect()
    }

    /// Cells with a non-bottom value.
    pub fn support(&self) -> CellSet {
        self.assignment.iter().filter(|(_, v)| **v != Value::Bottom).map(|(c, _)| c.clone()).collect()
    }
}

/// Why an assignment fails to be a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconsistency {
    OutsideStalk { cell: Cell, value: Value },
    Restriction { face: Cell, coface: Cell, face_value: Value, coface_value: Value },
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistency::OutsideStalk { cell, value } => write!(f, "value {value} on {cell} is not in its stalk"),
            Inconsistency::Restriction { face, coface, face_value, coface_value } => {
                write!(f, "restriction of {face_value} from {face} to {coface} disagrees with {coface_value}")
            }
        }
    }
}

/// Checks the section conditions on the assigned cells only.
pub fn check_section(x: &Complex, s: &Section) -> Result<Option<Inconsistency>> {
    let stalks = assigned_stalks(x, s)?;
    for (c, &v) in &s.assignment {
        if !stalks[c].contains(v) {
            return Ok(Some(Inconsistency::OutsideStalk { cell: c.clone(), value: v }));
        }
    }
    for (d, &dv) in &s.assignment {
        for c in d.all_faces() {
            let Some(&cv) = s.assignment.get(&c) else { continue };
            let restricted = restrict_with(&stalks[d], cv);
            if restricted != dv {
                return Ok(Some(Inconsistency::Restriction {
                    face: c,
                    coface: d.clone(),
                    face_value: cv,
                    coface_value: dv,
                }));
            }
        }
    }
    Ok(None)
}

fn assigned_stalks(x: &Complex, s: &Section) -> Result<BTreeMap<Cell, Stalk>> {
    s.assignment.keys().map(|c| Ok((c.clone(), stalk(x, c)?))).collect()
}

fn restrict_with(target: &Stalk, v: Value) -> Value {
    match v {
        Value::Node(n) if target.members.contains(&n) => v,
        _ => Value::Bottom,
    }
}

/// True iff `s` is defined on every cell and satisfies every restriction.
pub fn is_global_section(x: &Complex, s: &Section) -> Result<bool> {
    if let Some(missing) = x.cells().find(|c| !s.assignment.contains_key(*c)) {
        return Err(Error::IncompleteSection(missing.clone()));
    }
    Ok(check_section(x, s)?.is_none())
}

/// Unassigned cells that admit no value consistent with the assigned faces
/// and cofaces, given that `s` is itself a section.
pub fn obstructed_cells(x: &Complex, s: &Section) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for c in x.cells().filter(|c| !s.assignment.contains_key(*c)) {
        let st = stalk(x, c)?;
        let candidates = st.members.iter().map(|&n| Value::Node(n)).chain(std::iter::once(Value::Bottom));
        let mut ok = false;
        'cand: for v in candidates {
            for (d, &dv) in &s.assignment {
                if c.is_face_of(d) {
                    if restrict_with(&stalk(x, d)?, v) != dv {
                        continue 'cand;
                    }
                } else if d.is_face_of(c) && restrict_with(&st, dv) != v {
                    continue 'cand;
                }
            }
            ok = true;
            break;
        }
        if !ok {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// The active region of `n`: the closure of the star of its vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveRegion {
    pub node: VertexId,
    pub cells: CellSet,
}

pub fn active_region(x: &Complex, n: VertexId) -> Result<ActiveRegion> {
    let v = Cell::vertex(n);
    if !x.contains(&v) {
        return Err(Error::UnknownNode(n));
    }
    let star = x.star([&v])?;
    let cells = x.closure_of(&star)?;
    Ok(ActiveRegion { node: n, cells })
}

/// `⋃_{f ∈ F} st(cl f)`.
pub fn region_of_influence<'a, I: IntoIterator<Item = &'a Cell>>(x: &Complex, cells: I) -> Result<CellSet> {
    let mut out = CellSet::new();
    for f in cells {
        let cl = x.closure_of([f])?;
        out.extend(x.star(&cl)?);
    }
    Ok(out)
}

/// `X \ roi`, which must be a closed subcomplex.
pub fn complement_complex(x: &Complex, roi: &CellSet) -> Result<Complex> {
    let rest: CellSet = x.cells().filter(|c| !roi.contains(*c)).cloned().collect();
    Complex::from_cell_set(&rest).map_err(|e| match e {
        Error::InvariantViolation(msg) => {
            Error::InvariantViolation(format!("complement of region of influence: {msg}"))
        }
        other => other,
    })
}

/// Every global section, ordered by transmitter count and then by
/// transmitter ids.
///
/// Candidate transmitter sets are accepted when no node's region of
/// influence meets another chosen node's active region; the full
/// assignment is then rebuilt from the active regions.
pub fn enumerate_global_sections(x: &Complex, cap: usize) -> Result<Vec<Section>> {
    let nodes = x.vertices();
    if nodes.len() > cap {
        return Err(Error::EnumerationCap { nodes: nodes.len(), cap });
    }
    let regions: Vec<ActiveRegion> = nodes.iter().map(|&n| active_region(x, n)).collect::<Result<_>>()?;
    let influence: Vec<CellSet> = regions.par_iter().map(|r| x.star(&r.cells)).collect::<Result<_>>()?;
    let n = nodes.len();
    let conflict: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    i != j
                        && (!influence[i].is_disjoint(&regions[j].cells)
                            || !influence[j].is_disjoint(&regions[i].cells))
                })
                .collect()
        })
        .collect();

    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut chosen = Vec::new();
    independent_sets(&conflict, 0, &mut chosen, &mut sets);
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    Ok(sets
        .into_iter()
        .map(|set| {
            let mut s = Section::bottom(x);
            for i in set {
                for c in &regions[i].cells {
                    s.assignment.insert(c.clone(), Value::Node(nodes[i]));
                }
            }
            s
        })
        .collect())
}

fn independent_sets(conflict: &[Vec<bool>], from: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(chosen.clone());
    for i in from..conflict.len() {
        if chosen.iter().all(|&j| !conflict[i][j]) {
            chosen.push(i);
            independent_sets(conflict, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[u32]) -> Cell {
        Cell::new(v.iter().copied()).unwrap()
    }

    fn path() -> Complex {
        Complex::from_vertex_lists([vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn node(n: u32) -> Value {
        Value::Node(VertexId(n))
    }

    fn ids(v: &[u32]) -> BTreeSet<VertexId> {
        v.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn stalk_examples() {
        let x = path();
        assert_eq!(stalk(&x, &c(&[1])).unwrap().members, ids(&[0, 1, 2]));
        assert_eq!(stalk(&x, &c(&[1, 2])).unwrap().members, ids(&[1, 2]));
        let single = Complex::from_vertex_lists([vec![0]]).unwrap();
        assert_eq!(stalk(&single, &c(&[0])).unwrap().members, ids(&[0]));
        assert!(matches!(stalk(&x, &c(&[0, 2])), Err(Error::NotInComplex(_))));
    }

    #[test]
    fn restriction_examples() {
        let x = path();
        assert_eq!(restrict(&x, &c(&[1]), &c(&[1, 2]), node(0)).unwrap(), Value::Bottom);
        assert_eq!(restrict(&x, &c(&[1]), &c(&[1, 2]), node(2)).unwrap(), node(2));
        assert_eq!(restrict(&x, &c(&[1]), &c(&[1]), node(0)).unwrap(), node(0));
        assert_eq!(restrict(&x, &c(&[1]), &c(&[1, 2]), Value::Bottom).unwrap(), Value::Bottom);
        assert!(matches!(restrict(&x, &c(&[0]), &c(&[1, 2]), node(0)), Err(Error::InvalidRestriction { .. })));
    }

    #[test]
    fn node_zero_transmitting_is_global() {
        let x = path();
        let mut s = Section::new();
        s.set(c(&[0]), node(0))
            .set(c(&[0, 1]), node(0))
            .set(c(&[1]), node(0))
            .set(c(&[1, 2]), Value::Bottom)
            .set(c(&[2]), Value::Bottom);
        assert!(is_global_section(&x, &s).unwrap());
        assert_eq!(s.transmitters(), vec![VertexId(0)]);
    }

    #[test]
    fn bottom_section_is_global() {
        let x = path();
        assert!(is_global_section(&x, &Section::bottom(&x)).unwrap());
    }

    #[test]
    fn incomplete_section_is_reported() {
        let x = path();
        let mut s = Section::new();
        s.set(c(&[0]), Value::Bottom);
        assert!(matches!(is_global_section(&x, &s), Err(Error::IncompleteSection(_))));
    }

    #[test]
    fn end_nodes_together_obstruct_the_middle() {
        let x = path();
        let mut s = Section::new();
        s.set(c(&[0]), node(0)).set(c(&[0, 1]), node(0)).set(c(&[2]), node(2)).set(c(&[1, 2]), node(2));
        assert_eq!(check_section(&x, &s).unwrap(), None);
        assert_eq!(obstructed_cells(&x, &s).unwrap(), vec![c(&[1])]);
        for v in [node(0), node(1), node(2), Value::Bottom] {
            let mut full = s.clone();
            full.set(c(&[1]), v);
            assert!(!is_global_section(&x, &full).unwrap());
        }
    }

    #[test]
    fn enumerate_path() {
        let sections = enumerate_global_sections(&path(), DEFAULT_ENUMERATION_CAP).unwrap();
        let tx: Vec<Vec<VertexId>> = sections.iter().map(Section::transmitters).collect();
        assert_eq!(tx, vec![vec![], vec![VertexId(0)], vec![VertexId(1)], vec![VertexId(2)]]);
        let x = path();
        assert!(sections.iter().all(|s| is_global_section(&x, s).unwrap()));
    }

    #[test]
    fn enumerate_small_cases() {
        let single = Complex::from_vertex_lists([vec![0]]).unwrap();
        assert_eq!(enumerate_global_sections(&single, 20).unwrap().len(), 2);
        let pair = Complex::from_vertex_lists([vec![0], vec![1]]).unwrap();
        let tx: Vec<Vec<VertexId>> =
            enumerate_global_sections(&pair, 20).unwrap().iter().map(Section::transmitters).collect();
        assert_eq!(tx, vec![vec![], vec![VertexId(0)], vec![VertexId(1)], vec![VertexId(0), VertexId(1)]]);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let many = Complex::from_vertex_lists((0..21).map(|i| vec![i])).unwrap();
        assert!(matches!(
            enumerate_global_sections(&many, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationCap { nodes: 21, cap: 20 })
        ));
    }

    #[test]
    fn active_region_examples() {
        let x = path();
        assert_eq!(active_region(&x, VertexId(1)).unwrap().cells.len(), 5);
        assert_eq!(active_region(&x, VertexId(0)).unwrap().cells, CellSet::from([c(&[0]), c(&[1]), c(&[0, 1])]));
        let lone = Complex::from_vertex_lists([vec![4]]).unwrap();
        assert_eq!(active_region(&lone, VertexId(4)).unwrap().cells, CellSet::from([c(&[4])]));
        assert!(matches!(active_region(&x, VertexId(9)), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn region_of_influence_examples() {
        let x = path();
        assert_eq!(region_of_influence(&x, [&c(&[1])]).unwrap(), CellSet::from([c(&[1]), c(&[0, 1]), c(&[1, 2])]));
        assert_eq!(
            region_of_influence(&x, [&c(&[0, 1])]).unwrap(),
            CellSet::from([c(&[0]), c(&[1]), c(&[0, 1]), c(&[1, 2])])
        );
        let facets = x.facets();
        assert_eq!(region_of_influence(&x, &facets).unwrap().len(), x.len());
    }

    #[test]
    fn complement_examples() {
        let x = path();
        let roi = region_of_influence(&x, [&c(&[0, 1])]).unwrap();
        assert_eq!(complement_complex(&x, &roi).unwrap().cells().cloned().collect::<Vec<_>>(), vec![c(&[2])]);
        let roi = region_of_influence(&x, [&c(&[1])]).unwrap();
        assert_eq!(complement_complex(&x, &roi).unwrap().cells().cloned().collect::<Vec<_>>(), vec![c(&[0]), c(&[2])]);
        let everything: CellSet = x.cells().cloned().collect();
        assert!(complement_complex(&x, &everything).unwrap().is_empty());
    }

    #[test]
    fn complement_of_non_star_is_rejected() {
        let x = path();
        let bad = CellSet::from([c(&[1])]);
        assert!(matches!(complement_complex(&x, &bad), Err(Error::InvariantViolation(_))));
    }
}
