//! Disk-coverage network geometry: link graphs, link complexes and
//! interference complexes.
//!
//! A node decodes at a point iff the point lies strictly inside its coverage
//! disk. Tangent disks therefore do not interfere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cliques;
use crate::complex::{build_closure, Cell, Complex, VertexId};
use crate::error::{Error, Result};

/// Scalar type used for positions and radii.
pub trait Coord: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in coordinate type")
    }
}

impl<T> Coord for T where T: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {}

/// Default tolerance, in meters, below which geometric predicates are
/// considered degenerate.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeGeom<T> {
    pub id: VertexId,
    pub x: T,
    pub y: T,
    pub radius: T,
}

impl<T: Coord> NodeGeom<T> {
    pub fn new(id: u32, x: T, y: T, radius: T) -> Self {
        Self { id: VertexId(id), x, y, radius }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkModel<T> {
    nodes: Vec<NodeGeom<T>>,
}

impl<T: Coord> NetworkModel<T> {
    /// Validates and sorts nodes by id.
    pub fn new(mut nodes: Vec<NodeGeom<T>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidNetwork("network has no nodes".into()));
        }
        for n in &nodes {
            if !(n.x.is_finite() && n.y.is_finite()) {
                return Err(Error::InvalidNetwork(format!("node {} has a non-finite position", n.id)));
            }
            if !(n.radius.is_finite() && n.radius > T::zero()) {
                return Err(Error::InvalidNetwork(format!("node {} needs a positive finite radius", n.id)));
            }
        }
        nodes.sort_by_key(|n| n.id);
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidNetwork(format!("duplicate node id {}", w[0].id)));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[NodeGeom<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> Vec<VertexId> {
        self.nodes.iter().map(|n| n.id).collect()
    }

    pub fn node(&self, id: VertexId) -> Option<&NodeGeom<T>> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok().map(|i| &self.nodes[i])
    }

    /// Mutual-decodability adjacency, every node present as a key.
    pub fn link_adjacency(&self) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
            self.nodes.iter().map(|n| (n.id, BTreeSet::new())).collect();
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                let d = a.distance(b);
                if d < a.radius && d < b.radius {
                    adj.get_mut(&a.id).unwrap().insert(b.id);
                    adj.get_mut(&b.id).unwrap().insert(a.id);
                }
            }
        }
        adj
    }
}

/// One-dimensional complex of mutually decodable pairs.
pub fn link_graph<T: Coord>(net: &NetworkModel<T>) -> Complex {
    let adj = net.link_adjacency();
    let cells = adj.iter().flat_map(|(&a, nbrs)| {
        std::iter::once(Cell::vertex(a))
            .chain(nbrs.iter().filter(move |&&b| b > a).map(move |&b| Cell::from_sorted(vec![a, b])))
    });
    build_closure(cells)
}

/// Clique complex of the link graph.
pub fn link_complex<T: Coord>(net: &NetworkModel<T>) -> Complex {
    build_closure(cliques::maximal_cliques(&net.link_adjacency()))
}

/// Čech complex of the open coverage disks with the default tolerance.
pub fn interference_complex<T: Coord>(net: &NetworkModel<T>) -> Result<Complex> {
    interference_complex_with_tolerance(net, T::lit(DEFAULT_EPSILON))
}

/// Čech complex of the open coverage disks.
///
/// Pairs and triples are decided in closed form; larger cells follow from
/// Helly's theorem in the plane (a family of convex sets meets iff every
/// three of them do). Configurations within `eps` of tangency are rejected.
pub fn interference_complex_with_tolerance<T: Coord>(net: &NetworkModel<T>, eps: T) -> Result<Complex> {
    let nodes = net.nodes();
    let n = nodes.len();
    let mut pair = vec![vec![false; n]; n];
    for i in 0..n {
        pair[i][i] = true;
        for j in (i + 1)..n {
            let hit = disks_meet(&nodes[i], &nodes[j], eps).map_err(|margin| Error::Degenerate {
                cell: Cell::from_sorted(vec![nodes[i].id, nodes[j].id]),
                margin,
            })?;
            pair[i][j] = hit;
            pair[j][i] = hit;
        }
    }
    let mut triple: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !pair[i][j] {
                continue;
            }
            for k in (j + 1)..n {
                if !(pair[i][k] && pair[j][k]) {
                    continue;
                }
                let hit = three_disks_meet(&nodes[i], &nodes[j], &nodes[k], eps).map_err(|margin| {
                    Error::Degenerate { cell: Cell::from_sorted(vec![nodes[i].id, nodes[j].id, nodes[k].id]), margin }
                })?;
                if hit {
                    triple.insert((i, j, k));
                }
            }
        }
    }
    let compatible = |members: &[usize], w: usize| -> bool {
        members.iter().all(|&a| pair[a][w])
            && members.iter().enumerate().all(|(x, &a)| {
                members[x + 1..].iter().all(|&b| {
                    let mut t = [a, b, w];
                    t.sort_unstable();
                    triple.contains(&(t[0], t[1], t[2]))
                })
            })
    };
    let facets = cliques::maximal_hereditary_sets(n, compatible);
    Ok(build_closure(
        facets.into_iter().map(|f| Cell::new(f.into_iter().map(|i| nodes[i].id.0)).expect("distinct node ids")),
    ))
}

/// Maximal collections of mutually interfering nodes.
pub fn maximal_interference_sets<T: Coord>(net: &NetworkModel<T>) -> Result<Vec<Cell>> {
    Ok(interference_complex(net)?.facets())
}

/// Open-disk intersection for a pair. `Err(margin)` when within `eps` of tangency.
pub fn disks_meet<T: Coord>(a: &NodeGeom<T>, b: &NodeGeom<T>, eps: T) -> Result<bool, f64> {
    let margin = a.radius + b.radius - a.distance(b);
    if margin.abs() <= eps {
        return Err(margin.to_f64().unwrap_or(f64::NAN));
    }
    Ok(margin > T::zero())
}

/// Common point of three pairwise-intersecting open disks.
///
/// The intersection is non-empty iff one disk's center lies inside the other
/// two, one disk is contained in another (the triple then reduces to a pair),
/// or a crossing point of two boundary circles lies inside the third disk.
/// `Err(margin)` flags a crossing point within `eps` of the third circle when
/// no decisive witness exists.
pub fn three_disks_meet<T: Coord>(a: &NodeGeom<T>, b: &NodeGeom<T>, c: &NodeGeom<T>, eps: T) -> Result<bool, f64> {
    let disks = [a, b, c];
    let inside = |p: (T, T), d: &NodeGeom<T>| d.radius - (p.0 - d.x).hypot(p.1 - d.y);

    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let center = (disks[i].x, disks[i].y);
        if inside(center, disks[j]) > eps && inside(center, disks[k]) > eps {
            return Ok(true);
        }
        for j in (0..3).filter(|&j| j != i) {
            if disks[i].distance(disks[j]) + disks[i].radius <= disks[j].radius {
                return Ok(true);
            }
        }
    }

    let mut near: Option<T> = None;
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        for p in circle_crossings(disks[i], disks[j]) {
            let m = inside(p, disks[k]);
            if m > eps {
                return Ok(true);
            }
            if m.abs() <= eps {
                near = Some(m);
            }
        }
    }
    match near {
        Some(m) => Err(m.to_f64().unwrap_or(f64::NAN)),
        None => Ok(false),
    }
}

/// Crossing points of two boundary circles, empty unless they cross.
fn circle_crossings<T: Coord>(a: &NodeGeom<T>, b: &NodeGeom<T>) -> Vec<(T, T)> {
    let d = a.distance(b);
    if d <= T::zero() || d >= a.radius + b.radius || d <= (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let two = T::lit(2.0);
    // Distance from a's center to the radical axis along the center line.
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (two * d);
    let h = (a.radius * a.radius - along * along).max(T::zero()).sqrt();
    let (ux, uy) = ((b.x - a.x) / d, (b.y - a.y) / d);
    let (mx, my) = (a.x + along * ux, a.y + along * uy);
    vec![(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(spec: &[(f64, f64, f64)]) -> NetworkModel<f64> {
        NetworkModel::new(spec.iter().enumerate().map(|(i, &(x, y, r))| NodeGeom::new(i as u32, x, y, r)).collect())
            .unwrap()
    }

    fn keys(x: &Complex) -> Vec<String> {
        x.cells().map(Cell::key).collect()
    }

    #[test]
    fn collinear_path_link_graph() {
        let n = net(&[(0.0, 0.0, 150.0), (100.0, 0.0, 150.0), (200.0, 0.0, 150.0)]);
        assert_eq!(keys(&link_graph(&n)), ["0", "1", "2", "0,1", "1,2"]);
        assert_eq!(keys(&link_complex(&n)), ["0", "1", "2", "0,1", "1,2"]);
    }

    #[test]
    fn single_node_link_graph() {
        let n = net(&[(3.0, 4.0, 1.0)]);
        assert_eq!(keys(&link_graph(&n)), ["0"]);
    }

    #[test]
    fn asymmetric_range_gives_no_link() {
        let n = net(&[(0.0, 0.0, 300.0), (100.0, 0.0, 50.0)]);
        assert_eq!(link_graph(&n).count_of_dim(1), 0);
    }

    #[test]
    fn mutual_range_gives_triangle() {
        let n = net(&[(0.0, 0.0, 10.0), (1.0, 0.0, 10.0), (0.0, 1.0, 10.0)]);
        assert_eq!(link_complex(&n).f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn square_without_diagonals_is_hollow() {
        let n = net(&[(0.0, 0.0, 1.2), (1.0, 0.0, 1.2), (1.0, 1.0, 1.2), (0.0, 1.0, 1.2)]);
        assert_eq!(link_complex(&n).f_vector(), vec![4, 4]);
    }

    #[test]
    fn overlapping_pair_interferes() {
        let n = net(&[(0.0, 0.0, 100.0), (150.0, 0.0, 100.0)]);
        assert_eq!(interference_complex(&n).unwrap().f_vector(), vec![2, 1]);
    }

    #[test]
    fn equilateral_triangle_is_hollow() {
        let s = 1.9;
        let n = net(&[(0.0, 0.0, 1.0), (s, 0.0, 1.0), (s / 2.0, s * 3f64.sqrt() / 2.0, 1.0)]);
        assert_eq!(interference_complex(&n).unwrap().f_vector(), vec![3, 3]);
    }

    #[test]
    fn coincident_nodes_fill_the_simplex() {
        let n = net(&[(1.0, 1.0, 2.0), (1.0, 1.0, 2.0), (1.0, 1.0, 2.0)]);
        let x = interference_complex(&n).unwrap();
        assert_eq!(x.f_vector(), vec![3, 3, 1]);
        assert_eq!(maximal_interference_sets(&n).unwrap(), vec![Cell::new([0, 1, 2]).unwrap()]);
    }

    #[test]
    fn path_geometry_interference_facets() {
        let n = net(&[(0.0, 0.0, 60.0), (100.0, 0.0, 60.0), (200.0, 0.0, 60.0)]);
        let f = maximal_interference_sets(&n).unwrap();
        assert_eq!(f, vec![Cell::new([0, 1]).unwrap(), Cell::new([1, 2]).unwrap()]);
    }

    #[test]
    fn isolated_nodes_are_vertex_facets() {
        let n = net(&[(0.0, 0.0, 1.0), (100.0, 0.0, 1.0)]);
        assert_eq!(maximal_interference_sets(&n).unwrap(), vec![Cell::vertex(0), Cell::vertex(1)]);
    }

    #[test]
    fn tangent_disks_are_degenerate() {
        let n = net(&[(0.0, 0.0, 1.0), (2.0, 0.0, 1.0)]);
        assert!(matches!(interference_complex(&n), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn small_disk_inside_lens() {
        // Third disk sits inside the lens without reaching any crossing point.
        let n = net(&[(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.5, 0.0, 0.1)]);
        assert_eq!(interference_complex(&n).unwrap().f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn works_in_single_precision() {
        let n: NetworkModel<f32> = NetworkModel::new(vec![
            NodeGeom::new(0, 0.0, 0.0, 150.0),
            NodeGeom::new(1, 100.0, 0.0, 150.0),
            NodeGeom::new(2, 200.0, 0.0, 150.0),
        ])
        .unwrap();
        assert_eq!(link_complex(&n).f_vector(), vec![3, 2]);
        assert_eq!(interference_complex(&n).unwrap().f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn rejects_bad_networks() {
        assert!(NetworkModel::<f64>::new(vec![]).is_err());
        assert!(NetworkModel::new(vec![NodeGeom::new(0, 0.0, 0.0, 0.0)]).is_err());
        assert!(NetworkModel::new(vec![NodeGeom::new(0, f64::NAN, 0.0, 1.0)]).is_err());
        assert!(NetworkModel::new(vec![NodeGeom::new(0, 0.0, 0.0, 1.0), NodeGeom::new(0, 1.0, 0.0, 1.0)]).is_err());
    }
}
