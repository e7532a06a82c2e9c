//! Linear algebra for boundary and coboundary maps.
//!
//! [`BinaryMatrix`] is a sparse column-major matrix over the two-element
//! field. Each column is a strictly increasing list of the rows holding a 1,
//! so addition of columns is a sorted symmetric difference.
//!
//! [`SignedMatrix`] keeps integer incidence coefficients so the same map can
//! be reduced over GF(2) or over an exact field such as the rationals via
//! [`rank_exact`].

use std::collections::BTreeMap;

use num_traits::{FromPrimitive, One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<u32>>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, columns: (0..n as u32).map(|i| vec![i]).collect() }
    }

    /// Builds a matrix from per-column row lists. Repeated rows cancel in pairs.
    pub fn from_columns(rows: usize, columns: Vec<Vec<u32>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|mut col| {
                col.sort_unstable();
                let mut out: Vec<u32> = Vec::with_capacity(col.len());
                for r in col {
                    assert!((r as usize) < rows, "row index {r} out of range for {rows} rows");
                    if out.last() == Some(&r) {
                        out.pop();
                    } else {
                        out.push(r);
                    }
                }
                out
            })
            .collect();
        Self { rows, cols, columns }
    }

    /// Row-major 0/1 input; any odd entry counts as 1.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, &v) in row.iter().enumerate() {
                if v % 2 == 1 {
                    columns[c].push(r as u32);
                }
            }
        }
        Self { rows: nrows, cols: ncols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].binary_search(&(r as u32)).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                out[r as usize][c] = 1;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                columns[r as usize].push(c as u32);
            }
        }
        Self { rows: self.cols, cols: self.rows, columns }
    }

    /// Product `self * rhs` over GF(2).
    pub fn mul(&self, rhs: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let columns = rhs
            .columns
            .iter()
            .map(|rcol| {
                let mut acc = Vec::new();
                for &k in rcol {
                    acc = xor_sorted(&acc, &self.columns[k as usize]);
                }
                acc
            })
            .collect();
        BinaryMatrix { rows: self.rows, cols: rhs.cols, columns }
    }

    /// Rank over GF(2) by column reduction on lowest set row.
    pub fn rank(&self) -> usize {
        let mut owner: Vec<u32> = vec![u32::MAX; self.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::new();
        for col in &self.columns {
            let mut cur = col.clone();
            while let Some(&low) = cur.last() {
                match owner[low as usize] {
                    u32::MAX => {
                        owner[low as usize] = reduced.len() as u32;
                        reduced.push(cur);
                        break;
                    }
                    o => cur = xor_sorted(&cur, &reduced[o as usize]),
                }
            }
        }
        reduced.len()
    }

    /// Dimension of the null space, `cols - rank`.
    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse integer matrix with coefficients in {-1, 0, 1} (or any small integer).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), i64>,
}

impl SignedMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows && c < self.cols, "entry ({r}, {c}) out of range");
        let e = self.entries.entry((r, c)).or_insert(0);
        *e += v;
        if *e == 0 {
            self.entries.remove(&(r, c));
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn to_binary(&self) -> BinaryMatrix {
        let mut columns = vec![Vec::new(); self.cols];
        for (&(r, c), &v) in &self.entries {
            if v.rem_euclid(2) == 1 {
                columns[c].push(r as u32);
            }
        }
        BinaryMatrix::from_columns(self.rows, columns)
    }

    pub fn rank_over<T>(&self) -> usize
    where
        T: Clone
            + Zero
            + One
            + PartialEq
            + std::ops::Sub<Output = T>
            + std::ops::Mul<Output = T>
            + std::ops::Div<Output = T>
            + FromPrimitive,
    {
        let entries: Vec<(usize, usize, T)> =
            self.entries().map(|(r, c, v)| (r, c, T::from_i64(v).expect("integer coefficient fits"))).collect();
        rank_exact(self.rows, self.cols, &entries)
    }
}

/// Rank of a matrix over an exact field by dense Gaussian elimination.
///
/// `T` must have exact arithmetic; floating-point types give no guarantee.
pub fn rank_exact<T>(rows: usize, cols: usize, entries: &[(usize, usize, T)]) -> usize
where
    T: Clone
        + Zero
        + One
        + PartialEq
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
{
    let mut m = vec![vec![T::zero(); cols]; rows];
    for (r, c, v) in entries {
        m[*r][*c] = m[*r][*c].clone() + v.clone();
    }
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = T::one() / m[rank][c].clone();
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut().filter(|row| !row[c].is_zero()) {
            let f = row[c].clone() * inv.clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
