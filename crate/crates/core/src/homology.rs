//! Local homology scores and cohomology of the vector activation sheaf.
//!
//! Relative homology `H_k(X, X \ U)` is computed as the homology of the
//! quotient chain complex spanned by the cells of `U`; this is valid because
//! `X \ U` is closed when `U` is a region of influence. Coefficients are in
//! GF(2) throughout. The cochain complex also keeps signed incidences so its
//! ranks can be rechecked over the rationals.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{complement_complex, region_of_influence, stalk};
use crate::complex::{incidence, Cell, CellSet, Complex, VertexId};
use crate::error::Result;
use crate::linalg::{BinaryMatrix, SignedMatrix};

pub const DEFAULT_MAX_K: usize = 2;

/// Quotient chain complex of `(X, X \ U)`.
#[derive(Clone, Debug)]
pub struct RelativeChainComplex {
    /// `bases[k]` lists the k-cells of `U` in sorted order.
    pub bases: Vec<Vec<Cell>>,
    /// `boundaries[k]` maps `bases[k]` to `bases[k-1]`; `boundaries[0]` is
    /// the zero map out of `bases[0]`.
    pub boundaries: Vec<BinaryMatrix>,
}

impl RelativeChainComplex {
    /// Builds the chain complex for `roi`, keeping dimensions `0..=top`.
    fn from_cells(roi: &CellSet, top: usize) -> Self {
        let mut bases: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        for c in roi.iter().filter(|c| c.dim() <= top) {
            bases[c.dim()].push(c.clone());
        }
        let boundaries = (0..=top)
            .map(|k| {
                if k == 0 {
                    BinaryMatrix::zeros(0, bases[0].len())
                } else {
                    incidence(&bases[k - 1], &bases[k]).to_binary()
                }
            })
            .collect();
        Self { bases, boundaries }
    }

    /// `dim H_k` for each k whose next boundary is present.
    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundaries.iter().map(BinaryMatrix::rank).collect();
        (0..self.bases.len().saturating_sub(1)).map(|k| self.bases[k].len() - ranks[k] - ranks[k + 1]).collect()
    }
}

/// Quotient chain complex of `(X, X \ roi)` in dimensions up to `top`.
pub fn relative_chain_complex(x: &Complex, roi: &CellSet, top: usize) -> Result<RelativeChainComplex> {
    complement_complex(x, roi)?;
    Ok(RelativeChainComplex::from_cells(roi, top))
}

/// GF(2) Betti numbers of the whole complex in dimensions `0..=max_k`.
pub fn betti_numbers(x: &Complex, max_k: usize) -> Vec<usize> {
    let all: CellSet = x.cells().cloned().collect();
    RelativeChainComplex::from_cells(&all, max_k + 1).betti()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalHomologyScore {
    pub cell: Cell,
    /// `lh[k] = dim H_k(X, X \ roi(c))` for `k = 0..=max_k`.
    pub lh: Vec<usize>,
}

impl LocalHomologyScore {
    pub fn get(&self, k: usize) -> usize {
        self.lh.get(k).copied().unwrap_or(0)
    }
}

pub fn local_homology(x: &Complex, c: &Cell, max_k: usize) -> Result<LocalHomologyScore> {
    let roi = region_of_influence(x, [c])?;
    let top = max_k + 1;
    let truncated: CellSet = roi.into_iter().filter(|d| d.dim() <= top).collect();
    // roi is a union of stars, so its complement is closed.
    let lh = RelativeChainComplex::from_cells(&truncated, top).betti();
    Ok(LocalHomologyScore { cell: c.clone(), lh })
}

/// Scores for every cell, in complex order.
pub fn lh_field(x: &Complex, max_k: usize) -> Result<Vec<LocalHomologyScore>> {
    let cells: Vec<&Cell> = x.cells().collect();
    cells.par_iter().map(|c| local_homology(x, c, max_k)).collect()
}

/// Scores for the vertices only.
pub fn lh_nodes(x: &Complex, max_k: usize) -> Result<Vec<LocalHomologyScore>> {
    x.cells_of_dim(0).par_iter().map(|c| local_homology(x, c, max_k)).collect()
}

/// Cochain complex of the vector activation sheaf.
///
/// The stalk over a cell has one basis vector per node of the activation
/// stalk (bottom dropped); restrictions project onto the surviving basis.
#[derive(Clone, Debug)]
pub struct SheafCochainComplex {
    /// `bases[k]` lists `(cell, node)` basis vectors of `C^k`.
    pub bases: Vec<Vec<(Cell, VertexId)>>,
    /// `coboundaries[k]` maps `C^k` to `C^{k+1}`, with signs.
    pub coboundaries: Vec<SignedMatrix>,
    pub node_count: usize,
}

impl SheafCochainComplex {
    pub fn stalk_dim(&self, c: &Cell) -> usize {
        self.bases.get(c.dim()).map_or(0, |b| b.iter().filter(|(d, _)| d == c).count())
    }

    pub fn cochain_dim(&self, k: usize) -> usize {
        self.bases.get(k).map_or(0, Vec::len)
    }
}

pub fn vector_sheaf_cochain(x: &Complex) -> Result<SheafCochainComplex> {
    let levels = x.dim().map_or(0, |d| d + 1);
    let mut bases: Vec<Vec<(Cell, VertexId)>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let mut basis = Vec::new();
        for c in x.cells_of_dim(k) {
            for n in stalk(x, c)?.members {
                basis.push((c.clone(), n));
            }
        }
        bases.push(basis);
    }
    let mut coboundaries = Vec::with_capacity(levels.saturating_sub(1));
    for k in 0..levels.saturating_sub(1) {
        let col_of: BTreeMap<(&Cell, VertexId), usize> =
            bases[k].iter().enumerate().map(|(i, (c, n))| ((c, *n), i)).collect();
        let mut m = SignedMatrix::zeros(bases[k + 1].len(), bases[k].len());
        for (row, (d, n)) in bases[k + 1].iter().enumerate() {
            for (i, face) in d.facets().enumerate() {
                // n is in the stalk of every face of d, so the column exists.
                let col = col_of[&(&face, *n)];
                m.add(row, col, if i % 2 == 0 { 1 } else { -1 });
            }
        }
        coboundaries.push(m);
    }
    Ok(SheafCochainComplex { bases, coboundaries, node_count: x.vertex_count() })
}

/// `dim H^k = dim C^k - rank δ^k - rank δ^{k-1}` over GF(2).
pub fn sheaf_cohomology_dims(cc: &SheafCochainComplex) -> BTreeMap<usize, usize> {
    let ranks: Vec<usize> = cc.coboundaries.iter().map(|m| m.to_binary().rank()).collect();
    cohomology_from_ranks(cc, &ranks)
}

/// Same as [`sheaf_cohomology_dims`] with exact rational elimination.
pub fn sheaf_cohomology_dims_rational(cc: &SheafCochainComplex) -> BTreeMap<usize, usize> {
    let ranks: Vec<usize> = cc.coboundaries.iter().map(|m| m.rank_over::<BigRational>()).collect();
    cohomology_from_ranks(cc, &ranks)
}

fn cohomology_from_ranks(cc: &SheafCochainComplex, ranks: &[usize]) -> BTreeMap<usize, usize> {
    (0..cc.bases.len())
        .map(|k| {
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k == 0 { 0 } else { ranks[k - 1] };
            (k, cc.bases[k].len() - out - inc)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    /// Keyed by degree; JSON writes the keys as strings.
    pub h: BTreeMap<usize, usize>,
    pub node_count: usize,
    pub theorem_holds: bool,
}

/// Cohomology of the vector activation sheaf, checked against the expected
/// dimensions: the node count in degree zero and nothing above.
pub fn cohomology_report(x: &Complex) -> Result<CohomologyReport> {
    let cc = vector_sheaf_cochain(x)?;
    let dims = sheaf_cohomology_dims(&cc);
    let holds = dims.iter().all(|(&k, &d)| if k == 0 { d == cc.node_count } else { d == 0 });
    Ok(CohomologyReport { h: dims, node_count: cc.node_count, theorem_holds: holds })
}
