//! Bron–Kerbosch enumeration of maximal sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Cell, VertexId};

/// Maximal cliques of an undirected graph, using Tomita pivoting.
/// Isolated vertices come out as singleton cliques. Output is sorted.
pub(crate) fn maximal_cliques(adj: &BTreeMap<VertexId, BTreeSet<VertexId>>) -> Vec<Cell> {
    let mut out = Vec::new();
    let p: BTreeSet<VertexId> = adj.keys().copied().collect();
    expand(adj, &mut Vec::new(), p, BTreeSet::new(), &mut out);
    out.sort();
    out
}

fn expand(
    adj: &BTreeMap<VertexId, BTreeSet<VertexId>>,
    r: &mut Vec<VertexId>,
    mut p: BTreeSet<VertexId>,
    mut x: BTreeSet<VertexId>,
    out: &mut Vec<Cell>,
) {
    if p.is_empty() {
        if x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(Cell::from_sorted(c));
        }
        return;
    }
    let pivot =
        p.iter().chain(x.iter()).max_by_key(|u| adj[u].intersection(&p).count()).copied().expect("p is non-empty");
    let candidates: Vec<VertexId> = p.difference(&adj[&pivot]).copied().collect();
    for v in candidates {
        let nbrs = &adj[&v];
        r.push(v);
        expand(adj, r, p.intersection(nbrs).copied().collect(), x.intersection(nbrs).copied().collect(), out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Maximal members of a hereditary family of subsets of `0..n`.
///
/// `compatible(members, w)` must report whether `members ∪ {w}` is in the
/// family, given that `members` is. Pivoting is unsound for general
/// hereditary families, so this is the plain recursion.
pub(crate) fn maximal_hereditary_sets<F>(n: usize, compatible: F) -> Vec<Vec<usize>>
where
    F: Fn(&[usize], usize) -> bool,
{
    let mut out = Vec::new();
    hereditary(&compatible, &mut Vec::new(), (0..n).collect(), Vec::new(), &mut out);
    out.sort();
    out
}

fn hereditary<F>(compatible: &F, r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>)
where
    F: Fn(&[usize], usize) -> bool,
{
    if p.is_empty() {
        if x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return;
    }
    while let Some(v) = p.first().copied() {
        p.remove(0);
        r.push(v);
        let np: Vec<usize> = p.iter().copied().filter(|&w| compatible(r, w)).collect();
        let nx: Vec<usize> = x.iter().copied().filter(|&w| compatible(r, w)).collect();
        hereditary(compatible, r, np, nx, out);
        r.pop();
        x.push(v);
    }
}
