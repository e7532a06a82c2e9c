//! Abstract simplicial complexes.
//!
//! A [`Cell`] is a non-empty, strictly increasing list of vertex ids. Cells
//! order by dimension first and then lexicographically, and every listing
//! produced by this module follows that order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BinaryMatrix, SignedMatrix};

/// Identifier of a network node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell(Vec<VertexId>);

/// Sets of cells iterate in (dimension, lexicographic) order.
pub type CellSet = BTreeSet<Cell>;

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key())
    }
}

impl Cell {
    /// Sorts the vertices; rejects empty input and repeated vertices.
    pub fn new<I: IntoIterator<Item = u32>>(vertices: I) -> Result<Self> {
        let raw: Vec<u32> = vertices.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::MalformedCell { vertices: raw, reason: "cell has no vertices" });
        }
        let mut sorted = raw.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedCell { vertices: raw, reason: "duplicate vertex" });
        }
        Ok(Cell(sorted.into_iter().map(VertexId).collect()))
    }

    pub fn vertex(v: impl Into<VertexId>) -> Self {
        Cell(vec![v.into()])
    }

    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.windows(2).all(|w| w[0] < w[1]));
        Cell(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Non-strict subset test.
    pub fn is_face_of(&self, other: &Cell) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.by_ref().any(|w| w == v))
    }

    /// Codimension-one faces, the i-th omitting the i-th vertex.
    pub fn facets(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Cell(v)
        })
    }

    /// Every non-empty subset, including the cell itself.
    pub fn all_faces(&self) -> Vec<Cell> {
        let n = self.0.len();
        assert!(n < 32, "cell too large to enumerate faces");
        (1u32..(1 << n)).map(|mask| Cell((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect())).collect()
    }

    pub fn with_vertex(&self, v: VertexId) -> Cell {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut w = self.0.clone();
                w.insert(pos, v);
                Cell(w)
            }
        }
    }

    /// Comma-joined vertex ids, e.g. `0,1`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|v| v.0.to_string()).collect();
        parts.join(",")
    }

    pub fn parse_key(s: &str) -> Result<Cell> {
        let ids = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| Error::Validation(format!("bad cell key {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Cell::new(ids)
    }
}

/// An abstract simplicial complex, immutable after construction.
#[derive(Clone, Debug, Default)]
pub struct Complex {
    levels: Vec<Vec<Cell>>,
    offsets: Vec<usize>,
    index: HashMap<Cell, usize>,
    incident: HashMap<VertexId, Vec<usize>>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}

impl Eq for Complex {}

/// Smallest complex containing every input cell.
pub fn build_closure<I: IntoIterator<Item = Cell>>(cells: I) -> Complex {
    let mut all: HashSet<Cell> = HashSet::new();
    let mut stack: Vec<Cell> = cells.into_iter().collect();
    while let Some(c) = stack.pop() {
        if all.contains(&c) {
            continue;
        }
        stack.extend(c.facets().filter(|f| !all.contains(f)));
        all.insert(c);
    }
    Complex::from_closed(all)
}

impl Complex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Closure of cells given as raw vertex lists.
    pub fn from_vertex_lists<I, V>(cells: I) -> Result<Complex>
    where
        I: IntoIterator<Item = V>,
        V: IntoIterator<Item = u32>,
    {
        let cells = cells.into_iter().map(Cell::new).collect::<Result<Vec<_>>>()?;
        Ok(build_closure(cells))
    }

    /// Wraps a set already known to be closed under faces.
    fn from_closed<I: IntoIterator<Item = Cell>>(cells: I) -> Complex {
        let mut levels: Vec<Vec<Cell>> = Vec::new();
        for c in cells {
            let d = c.dim();
            if levels.len() <= d {
                levels.resize_with(d + 1, Vec::new);
            }
            levels[d].push(c);
        }
        for l in &mut levels {
            l.sort_unstable();
        }
        let mut offsets = Vec::with_capacity(levels.len() + 1);
        let mut index = HashMap::new();
        let mut incident: HashMap<VertexId, Vec<usize>> = HashMap::new();
        let mut next = 0;
        for l in &levels {
            offsets.push(next);
            for c in l {
                index.insert(c.clone(), next);
                for &v in c.vertices() {
                    incident.entry(v).or_default().push(next);
                }
                next += 1;
            }
        }
        offsets.push(next);
        Complex { levels, offsets, index, incident }
    }

    /// Builds a complex from a cell set, failing if the set is not closed.
    pub fn from_cell_set(cells: &CellSet) -> Result<Complex> {
        if let Some((face, coface)) = first_open_pair(cells) {
            return Err(Error::InvariantViolation(format!(
                "cell set is not closed: {coface} is present but its face {face} is not"
            )));
        }
        Ok(Complex::from_closed(cells.iter().cloned()))
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Highest cell dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn cells_of_dim(&self, k: usize) -> &[Cell] {
        self.levels.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.cells_of_dim(k).len()
    }

    /// All cells in (dimension, lexicographic) order.
    pub fn cells(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.levels.iter().flatten()
    }

    pub fn cell(&self, idx: usize) -> &Cell {
        let d = self.offsets.partition_point(|&o| o <= idx) - 1;
        &self.levels[d][idx - self.offsets[d]]
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.index.contains_key(c)
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.cells_of_dim(0).iter().map(|c| c.vertices()[0]).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.count_of_dim(0)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.incident.contains_key(&v)
    }

    fn require(&self, c: &Cell) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::NotInComplex(c.clone()))
        }
    }

    /// Cells having `c` as a face, `c` included.
    pub fn cofaces<'a>(&'a self, c: &'a Cell) -> impl Iterator<Item = &'a Cell> + 'a {
        let pool = self.incident.get(&c.vertices()[0]).map_or(&[][..], Vec::as_slice);
        pool.iter().map(|&i| self.cell(i)).filter(move |d| c.is_face_of(d))
    }

    pub fn is_facet(&self, c: &Cell) -> bool {
        let pool = self.incident.get(&c.vertices()[0]).map_or(&[][..], Vec::as_slice);
        let next = self.offsets.get(c.dim() + 1).copied().unwrap_or(usize::MAX);
        let end = self.offsets.get(c.dim() + 2).copied().unwrap_or(usize::MAX);
        !pool.iter().any(|&i| i >= next && i < end && c.is_face_of(self.cell(i)))
    }

    /// Cells with no strict coface.
    pub fn facets(&self) -> Vec<Cell> {
        self.cells().filter(|c| self.is_facet(c)).cloned().collect()
    }

    /// All cells having at least one face in `cells`.
    pub fn star<'a, I: IntoIterator<Item = &'a Cell>>(&self, cells: I) -> Result<CellSet> {
        self.star_up_to(cells, usize::MAX)
    }

    /// [`Complex::star`] restricted to cells of dimension at most `max_dim`.
    pub fn star_up_to<'a, I: IntoIterator<Item = &'a Cell>>(&self, cells: I, max_dim: usize) -> Result<CellSet> {
        let mut out = CellSet::new();
        for y in cells {
            self.require(y)?;
            out.extend(self.cofaces(y).filter(|d| d.dim() <= max_dim).cloned());
        }
        Ok(out)
    }

    /// Smallest closed subset of this complex containing `cells`.
    pub fn closure_of<'a, I: IntoIterator<Item = &'a Cell>>(&self, cells: I) -> Result<CellSet> {
        let mut out = CellSet::new();
        for c in cells {
            self.require(c)?;
            if out.contains(c) {
                continue;
            }
            out.extend(c.all_faces());
        }
        Ok(out)
    }

    /// Boundary map from k-cells to (k-1)-cells over GF(2).
    ///
    /// Out-of-range `k` yields an empty matrix with the matching zero
    /// dimension instead of an error.
    pub fn boundary_matrix(&self, k: usize) -> BinaryMatrix {
        if k == 0 {
            return BinaryMatrix::zeros(0, self.count_of_dim(0));
        }
        incidence(self.cells_of_dim(k - 1), self.cells_of_dim(k)).to_binary()
    }

    pub fn is_closed_set(cells: &CellSet) -> bool {
        first_open_pair(cells).is_none()
    }

    /// Connectivity of a cell set under the face relation.
    pub fn is_connected_set(cells: &CellSet) -> bool {
        let Some(first) = cells.iter().next() else {
            return true;
        };
        let list: Vec<&Cell> = cells.iter().collect();
        let pos: HashMap<&Cell, usize> = list.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut parent: Vec<usize> = (0..list.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, c) in list.iter().enumerate() {
            for f in c.all_faces() {
                if let Some(&j) = pos.get(&f) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, pos[first]);
        (0..list.len()).all(|i| find(&mut parent, i) == root)
    }

    /// Applies a vertex relabeling and rebuilds the complex.
    pub fn relabel(&self, map: impl Fn(VertexId) -> VertexId) -> Result<Complex> {
        let cells =
            self.cells().map(|c| Cell::new(c.vertices().iter().map(|&v| map(v).0))).collect::<Result<Vec<_>>>()?;
        Ok(Complex::from_closed(cells))
    }

    /// Cell counts per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

fn first_open_pair(cells: &CellSet) -> Option<(Cell, Cell)> {
    cells.iter().find_map(|c| c.facets().find(|f| !cells.contains(f)).map(|f| (f, c.clone())))
}

/// Signed incidence between `rows` ((k-1)-cells) and `cols` (k-cells).
///
/// Faces of a column cell that are not listed in `rows` are dropped, which
/// realizes quotient chain complexes when `rows` and `cols` come from a
/// relative cell set.
pub(crate) fn incidence(rows: &[Cell], cols: &[Cell]) -> SignedMatrix {
    let pos: HashMap<&Cell, usize> = rows.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut m = SignedMatrix::zeros(rows.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, f) in c.facets().enumerate() {
            if let Some(&r) = pos.get(&f) {
                m.add(r, j, if i % 2 == 0 { 1 } else { -1 });
            }
        }
    }
    m
}
