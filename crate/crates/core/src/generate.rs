//! Seeded network generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Coord, NetworkModel, NodeGeom};

/// `count` nodes placed uniformly in `[0, area]²`, all with `radius`.
pub fn random_geometric<T: Coord>(count: usize, area: f64, radius: f64, seed: u64) -> Result<NetworkModel<T>> {
    random_geometric_radii(count, area, (radius, radius), seed)
}

/// Like [`random_geometric`] with radii uniform in `[lo, hi]`.
pub fn random_geometric_radii<T: Coord>(
    count: usize,
    area: f64,
    radii: (f64, f64),
    seed: u64,
) -> Result<NetworkModel<T>> {
    if count == 0 {
        return Err(Error::InvalidNetwork("node count must be positive".into()));
    }
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::InvalidNetwork("area side must be positive".into()));
    }
    let (lo, hi) = radii;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidNetwork("radius range must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..count as u32)
        .map(|id| {
            let x = rng.gen_range(0.0..area);
            let y = rng.gen_range(0.0..area);
            let r = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            NodeGeom::new(id, T::lit(x), T::lit(y), T::lit(r))
        })
        .collect();
    NetworkModel::new(nodes)
}

/// Shape of a two-cluster network joined by bridge nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dumbbell {
    pub left: usize,
    pub right: usize,
    /// One or two bridge nodes.
    pub bridges: usize,
}

/// Radio range used by [`dumbbell`], in meters.
pub const DUMBBELL_RANGE: f64 = 100.0;

/// Two tight clusters, each a clique in the link graph, with no direct
/// links between them. Every bridge node is in range of every cluster node
/// and out of range of the other bridge.
///
/// Ids run left cluster, then bridges, then right cluster.
pub fn dumbbell<T: Coord>(shape: Dumbbell, seed: u64) -> Result<NetworkModel<T>> {
    const SPREAD: f64 = 10.0;
    const OFFSET: f64 = 62.0;
    const BRIDGE_Y: f64 = 55.0;
    if shape.left == 0 || shape.right == 0 || !(1..=2).contains(&shape.bridges) {
        return Err(Error::InvalidNetwork("dumbbell needs non-empty clusters and one or two bridges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cluster = |cx: f64| -> (f64, f64) {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = SPREAD * rng.gen_range(0.0f64..1.0).sqrt();
        (cx + r * angle.cos(), r * angle.sin())
    };
    let mut pts: Vec<(f64, f64)> = (0..shape.left).map(|_| cluster(-OFFSET)).collect();
    match shape.bridges {
        1 => pts.push((0.0, 0.0)),
        _ => pts.extend([(0.0, -BRIDGE_Y), (0.0, BRIDGE_Y)]),
    }
    pts.extend((0..shape.right).map(|_| cluster(OFFSET)));
    let range = T::lit(DUMBBELL_RANGE);
    NetworkModel::new(
        pts.into_iter().enumerate().map(|(i, (x, y))| NodeGeom::new(i as u32, T::lit(x), T::lit(y), range)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::VertexId;
    use crate::geometry::link_complex;

    #[test]
    fn generator_is_reproducible() {
        let a: NetworkModel<f64> = random_geometric(30, 500.0, 120.0, 11).unwrap();
        let b: NetworkModel<f64> = random_geometric(30, 500.0, 120.0, 11).unwrap();
        assert_eq!(a, b);
        let c: NetworkModel<f64> = random_geometric(30, 500.0, 120.0, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn dumbbell_topology() {
        for bridges in 1..=2 {
            let net: NetworkModel<f64> = dumbbell(Dumbbell { left: 6, right: 9, bridges }, 4).unwrap();
            let adj = net.link_adjacency();
            let left: Vec<VertexId> = (0..6).map(VertexId).collect();
            let bridge: Vec<VertexId> = (6..6 + bridges as u32).map(VertexId).collect();
            let right: Vec<VertexId> = (6 + bridges as u32..15 + bridges as u32).map(VertexId).collect();
            for a in &left {
                assert!(right.iter().all(|b| !adj[a].contains(b)));
                assert_eq!(adj[a].len(), 5 + bridges);
            }
            for b in &bridge {
                assert_eq!(adj[b].len(), 15);
            }
            let x = link_complex(&net);
            assert_eq!(x.facets().len(), 2 * bridges);
        }
    }
}
