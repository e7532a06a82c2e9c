//! Independent oracles and random instance generators for integration tests.
//!
//! Nothing here calls into the elimination, section enumeration or triple
//! disk code it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheafnet::{Cell, CellSet, Complex, Network, Node, Section, Value, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closure of a few random facets on at most `max_vertices` vertices, with
/// no dimension holding more than `max_per_dim` cells.
pub fn random_complex(rng: &mut ChaCha8Rng, max_vertices: u32, max_per_dim: usize) -> Complex {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let facets = rng.gen_range(1..=5);
        let mut cells: Vec<Vec<u32>> = (0..n).map(|v| vec![v]).collect();
        for _ in 0..facets {
            let size = rng.gen_range(1..=4.min(n));
            let mut pool: Vec<u32> = (0..n).collect();
            let mut f = Vec::new();
            for _ in 0..size {
                f.push(pool.swap_remove(rng.gen_range(0..pool.len())));
            }
            cells.push(f);
        }
        let x = Complex::from_vertex_lists(cells).unwrap();
        if x.f_vector().iter().all(|&k| k <= max_per_dim) {
            return x;
        }
    }
}

pub fn random_network(rng: &mut ChaCha8Rng, max_nodes: u32) -> Network {
    let n = rng.gen_range(1..=max_nodes);
    let radius = rng.gen_range(15.0..45.0);
    let nodes = (0..n).map(|i| Node::new(i, rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0), radius)).collect();
    Network::new(nodes).unwrap()
}

/// Mixed-radius disks for the interference oracle.
pub fn random_disks(rng: &mut ChaCha8Rng, max_nodes: u32) -> Network {
    let n = rng.gen_range(1..=max_nodes);
    let nodes = (0..n)
        .map(|i| Node::new(i, rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(1.0..4.0)))
        .collect();
    Network::new(nodes).unwrap()
}

/// `dim H_k` of the quotient complex on `cells` by exhaustive span over GF(2).
///
/// Cycles are counted by enumerating every k-chain; boundaries by
/// collecting the image of every (k+1)-chain. Both sizes are powers of two.
pub fn brute_relative_betti(cells: &CellSet, k: usize) -> usize {
    let of_dim = |d: usize| -> Vec<&Cell> { cells.iter().filter(|c| c.dim() == d).collect() };
    let ck = of_dim(k);
    let ck1 = of_dim(k + 1);
    let lower: Vec<&Cell> = if k == 0 { Vec::new() } else { of_dim(k - 1) };
    assert!(
        ck.len() <= 20 && ck1.len() <= 20 && lower.len() <= 64 && ck.len() <= 64,
        "instance too large for brute force"
    );

    let mask_over = |c: &Cell, basis: &[&Cell]| -> u64 {
        let mut m = 0u64;
        for (i, b) in basis.iter().enumerate() {
            if b.dim() + 1 == c.dim() && b.is_face_of(c) {
                m |= 1 << i;
            }
        }
        m
    };

    let down: Vec<u64> = ck.iter().map(|c| mask_over(c, &lower)).collect();
    let mut cycles = 0u64;
    let mut cur = 0u64;
    for i in 0u64..(1 << ck.len()) {
        if i > 0 {
            cur ^= down[i.trailing_zeros() as usize];
        }
        if cur == 0 {
            cycles += 1;
        }
    }

    let up: Vec<u64> = ck1.iter().map(|c| mask_over(c, &ck)).collect();
    let mut images = HashSet::new();
    let mut cur = 0u64;
    for i in 0u64..(1 << ck1.len()) {
        if i > 0 {
            cur ^= up[i.trailing_zeros() as usize];
        }
        images.insert(cur);
    }
    let boundaries = images.len() as u64;
    assert!(cycles.is_power_of_two() && boundaries.is_power_of_two());
    (cycles.trailing_zeros() - boundaries.trailing_zeros()) as usize
}

/// `st(cl c)` by direct subset tests over all cells.
pub fn brute_roi(x: &Complex, c: &Cell) -> CellSet {
    let faces: Vec<&Cell> = x.cells().filter(|f| f.is_face_of(c)).collect();
    x.cells().filter(|d| faces.iter().any(|f| f.is_face_of(d))).cloned().collect()
}

fn brute_stalk(x: &Complex, c: &Cell) -> BTreeSet<VertexId> {
    x.cells().filter(|d| c.is_face_of(d)).flat_map(|d| d.vertices().iter().copied()).collect()
}

/// Every global section, by depth-first search over raw assignments.
///
/// Cells are visited so that each comes after its faces; a cell with faces
/// has its value forced by any one face, and the search backtracks when two
/// faces disagree or the value leaves the stalk.
pub fn brute_global_sections(x: &Complex) -> Vec<BTreeMap<Cell, Value>> {
    let mut order: Vec<Cell> = x.cells().cloned().collect();
    order.sort_by(|a, b| {
        let ka = (a.vertices().last().unwrap(), a.dim());
        let kb = (b.vertices().last().unwrap(), b.dim());
        ka.cmp(&kb).then(a.cmp(b))
    });
    let stalks: BTreeMap<Cell, BTreeSet<VertexId>> = order.iter().map(|c| (c.clone(), brute_stalk(x, c))).collect();
    let mut out = Vec::new();
    let mut assignment = BTreeMap::new();
    search(&order, 0, &stalks, &mut assignment, &mut out);
    out
}

fn search(
    order: &[Cell],
    i: usize,
    stalks: &BTreeMap<Cell, BTreeSet<VertexId>>,
    assignment: &mut BTreeMap<Cell, Value>,
    out: &mut Vec<BTreeMap<Cell, Value>>,
) {
    if i == order.len() {
        out.push(assignment.clone());
        return;
    }
    let c = &order[i];
    let stalk = &stalks[c];
    let restrict = |v: Value| match v {
        Value::Node(n) if stalk.contains(&n) => v,
        _ => Value::Bottom,
    };
    let candidates: Vec<Value> = if c.dim() == 0 {
        stalk.iter().map(|&n| Value::Node(n)).chain([Value::Bottom]).collect()
    } else {
        let forced: BTreeSet<Value> = c
            .vertices()
            .iter()
            .enumerate()
            .map(|(skip, _)| {
                let face: Vec<u32> =
                    c.vertices().iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, v)| v.0).collect();
                restrict(assignment[&Cell::new(face).unwrap()])
            })
            .collect();
        if forced.len() == 1 {
            forced.into_iter().collect()
        } else {
            Vec::new()
        }
    };
    for v in candidates {
        // Restriction along every face pair, not only codimension one.
        let ok = c.all_faces().iter().filter(|f| *f != c).all(|f| restrict(assignment[f]) == v);
        if !ok {
            continue;
        }
        assignment.insert(c.clone(), v);
        search(order, i + 1, stalks, assignment, out);
        assignment.remove(c);
    }
}

pub fn transmitters_of(assignment: &BTreeMap<Cell, Value>) -> Vec<VertexId> {
    Section { assignment: assignment.clone() }.transmitters()
}

/// Monte Carlo witness margins for every subset of up to 7 disks.
///
/// One uniformly jittered sample per cell of a `grid × grid` lattice over
/// the bounding box, so every point of the box is within `resolution` of a
/// sample. Returns, per subset bitmask, the largest sampled value of
/// `min_i (r_i - |p - c_i|)`, and the resolution.
pub fn sampled_margins(net: &Network, grid: usize, seed: u64) -> (Vec<f64>, f64) {
    let nodes = net.nodes();
    assert!(nodes.len() <= 7);
    let x0 = nodes.iter().map(|n| n.x - n.radius).fold(f64::INFINITY, f64::min);
    let x1 = nodes.iter().map(|n| n.x + n.radius).fold(f64::NEG_INFINITY, f64::max);
    let y0 = nodes.iter().map(|n| n.y - n.radius).fold(f64::INFINITY, f64::min);
    let y1 = nodes.iter().map(|n| n.y + n.radius).fold(f64::NEG_INFINITY, f64::max);
    let (hx, hy) = ((x1 - x0) / grid as f64, (y1 - y0) / grid as f64);
    let resolution = hx.hypot(hy);
    let subsets = 1usize << nodes.len();
    let mut best = vec![f64::NEG_INFINITY; subsets];
    let mut r = rng(seed);
    let mut margins = vec![0.0; nodes.len()];
    let mut lo = vec![0.0; subsets];
    for i in 0..grid {
        for j in 0..grid {
            let px = x0 + (i as f64 + r.gen::<f64>()) * hx;
            let py = y0 + (j as f64 + r.gen::<f64>()) * hy;
            for (m, n) in margins.iter_mut().zip(nodes) {
                *m = n.radius - (px - n.x).hypot(py - n.y);
            }
            // Each subset's margin extends the subset without its lowest bit.
            for mask in 1..subsets {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                lo[mask] = if rest == 0 { margins[low] } else { lo[rest].min(margins[low]) };
                if lo[mask] > best[mask] {
                    best[mask] = lo[mask];
                }
            }
        }
    }
    (best, resolution)
}

pub fn subset_cell(net: &Network, mask: usize) -> Cell {
    Cell::new((0..net.len()).filter(|i| mask >> i & 1 == 1).map(|i| net.nodes()[i].id.0)).unwrap()
}
