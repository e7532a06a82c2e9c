//! Packet-forwarding load on the link graph.
//!
//! The bundled simulator routes each packet along a shortest hop-count path,
//! breaking ties toward the smallest next-hop id. Traces use the CSV schema
//! `packet_id,src,dst,hop_node,action`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::VertexId;
use crate::error::{Error, Result};
use crate::geometry::{Coord, NetworkModel};
use crate::homology::LocalHomologyScore;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Send,
    Forward,
    Recv,
    Drop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub packet_id: u64,
    pub src: VertexId,
    pub dst: VertexId,
    pub hop_node: VertexId,
    pub action: Action,
}

/// Shortest-path router over a fixed adjacency.
struct Router {
    ids: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
    dist_to: HashMap<usize, Vec<u32>>,
}

impl Router {
    fn new(adjacency: &BTreeMap<VertexId, BTreeSet<VertexId>>) -> Self {
        let ids: Vec<VertexId> = adjacency.keys().copied().collect();
        let pos: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        // Neighbor lists inherit ascending id order from the BTreeSet.
        let adj = adjacency.values().map(|nb| nb.iter().map(|v| pos[v]).collect()).collect();
        Self { ids, adj, dist_to: HashMap::new() }
    }

    fn distances(&mut self, dst: usize) -> &[u32] {
        let adj = &self.adj;
        self.dist_to.entry(dst).or_insert_with(|| {
            let mut d = vec![u32::MAX; adj.len()];
            d[dst] = 0;
            let mut q = VecDeque::from([dst]);
            while let Some(u) = q.pop_front() {
                for &w in &adj[u] {
                    if d[w] == u32::MAX {
                        d[w] = d[u] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
    }

    fn route(&mut self, packet_id: u64, src: usize, dst: usize, out: &mut Vec<TraceRecord>) {
        let (s, t) = (self.ids[src], self.ids[dst]);
        let rec = |hop: VertexId, action| TraceRecord { packet_id, src: s, dst: t, hop_node: hop, action };
        out.push(rec(s, Action::Send));
        let dist = self.distances(dst).to_vec();
        if dist[src] == u32::MAX {
            out.push(rec(s, Action::Drop));
            return;
        }
        let mut cur = src;
        while cur != dst {
            cur = *self.adj[cur].iter().find(|&&w| dist[w] + 1 == dist[cur]).expect("BFS predecessor exists");
            out.push(rec(self.ids[cur], if cur == dst { Action::Recv } else { Action::Forward }));
        }
    }
}

/// Uniform random traffic: `packets` packets with independent uniform
/// source and destination, redrawing the destination until it differs.
pub fn simulate<T: Coord>(net: &NetworkModel<T>, packets: u64, seed: u64) -> Result<Vec<TraceRecord>> {
    simulate_on(&net.link_adjacency(), packets, seed)
}

pub fn simulate_on(
    adjacency: &BTreeMap<VertexId, BTreeSet<VertexId>>,
    packets: u64,
    seed: u64,
) -> Result<Vec<TraceRecord>> {
    if packets == 0 {
        return Ok(Vec::new());
    }
    let n = adjacency.len();
    if n < 2 {
        return Err(Error::Validation("traffic simulation needs at least two nodes".into()));
    }
    let mut router = Router::new(adjacency);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for id in 0..packets {
        let src = rng.gen_range(0..n);
        let dst = loop {
            let d = rng.gen_range(0..n);
            if d != src {
                break d;
            }
        };
        router.route(id, src, dst, &mut out);
    }
    Ok(out)
}

/// Every packet from `src` to `dst`.
pub fn simulate_between<T: Coord>(
    net: &NetworkModel<T>,
    src: VertexId,
    dst: VertexId,
    packets: u64,
) -> Result<Vec<TraceRecord>> {
    let adjacency = net.link_adjacency();
    for v in [src, dst] {
        if !adjacency.contains_key(&v) {
            return Err(Error::UnknownNode(v));
        }
    }
    if src == dst {
        return Err(Error::Validation("source and destination must differ".into()));
    }
    let mut router = Router::new(&adjacency);
    let (s, t) = (router.ids.binary_search(&src).unwrap(), router.ids.binary_search(&dst).unwrap());
    let mut out = Vec::new();
    for id in 0..packets {
        router.route(id, s, t, &mut out);
    }
    Ok(out)
}

pub fn write_trace<W: Write>(w: W, trace: &[TraceRecord]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for r in trace {
        wr.serialize(r).map_err(Error::from_csv)?;
    }
    if trace.is_empty() {
        wr.write_record(["packet_id", "src", "dst", "hop_node", "action"]).map_err(Error::from_csv)?;
    }
    wr.flush()?;
    Ok(())
}

/// Parses and validates a trace. When `known` is given, every node id must
/// belong to it.
pub fn ingest_trace<R: Read>(r: R, known: Option<&BTreeSet<VertexId>>) -> Result<Vec<TraceRecord>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rd.headers().map_err(Error::from_csv)?.clone();
    let expected = ["packet_id", "src", "dst", "hop_node", "action"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse { line: 1, message: format!("expected header {}", expected.join(",")) });
    }
    let mut sends: HashMap<u64, u64> = HashMap::new();
    let mut recvs: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(Error::from_csv)?;
        let line = row.position().map_or(0, |p| p.line());
        let rec: TraceRecord =
            row.deserialize(Some(&headers)).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if let Some(known) = known {
            for v in [rec.src, rec.dst, rec.hop_node] {
                if !known.contains(&v) {
                    return Err(Error::Parse { line, message: format!("unknown node id {v}") });
                }
            }
        }
        let seen = match rec.action {
            Action::Send => Some(("send", &mut sends)),
            Action::Recv => Some(("recv", &mut recvs)),
            _ => None,
        };
        if let Some((what, seen)) = seen {
            if let Some(first) = seen.insert(rec.packet_id, line) {
                return Err(Error::Validation(format!(
                    "packet {}: duplicate {what} at line {line} (first at line {first})",
                    rec.packet_id
                )));
            }
        }
        out.push(rec);
    }
    let ids: BTreeSet<u64> = out.iter().map(|r| r.packet_id).collect();
    if let Some(missing) = ids.iter().find(|id| !sends.contains_key(id)) {
        return Err(Error::Validation(format!("packet {missing}: no send record")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeLoad {
    pub node: VertexId,
    pub forwarded: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForwardingStats {
    pub total_packets: u64,
    /// Forward counts for every node seen in the trace.
    pub counts: BTreeMap<VertexId, u64>,
}

impl ForwardingStats {
    pub fn total_forwards(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn probability(&self, n: VertexId) -> f64 {
        if self.total_packets == 0 {
            return 0.0;
        }
        self.counts.get(&n).copied().unwrap_or(0) as f64 / self.total_packets as f64
    }

    /// Nodes by descending forward count, ties by ascending id.
    pub fn ranked(&self) -> Vec<NodeLoad> {
        let mut v: Vec<NodeLoad> = self
            .counts
            .iter()
            .map(|(&node, &forwarded)| NodeLoad { node, forwarded, probability: self.probability(node) })
            .collect();
        v.sort_by(|a, b| b.forwarded.cmp(&a.forwarded).then(a.node.cmp(&b.node)));
        v
    }
}

pub fn forwarding_stats(trace: &[TraceRecord]) -> ForwardingStats {
    let mut counts: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut packets = BTreeSet::new();
    for r in trace {
        packets.insert(r.packet_id);
        for v in [r.src, r.dst, r.hop_node] {
            counts.entry(v).or_insert(0);
        }
        if r.action == Action::Forward {
            *counts.get_mut(&r.hop_node).unwrap() += 1;
        }
    }
    ForwardingStats { total_packets: packets.len() as u64, counts }
}

/// How the top forwarders are picked from the forward counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TopRule {
    /// Nodes whose count lies in the top `top_percent` of `[0, max count]`.
    #[default]
    Range,
    /// The `ceil(top_percent% of nodes)` busiest nodes, extended by ties.
    Rank,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationConfig {
    pub bins: usize,
    pub top_percent: f64,
    pub top_rule: TopRule,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self { bins: 10, top_percent: 5.0, top_rule: TopRule::Range }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Binning {
    pub method: &'static str,
    pub bins: usize,
    pub max_count: u64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinReport {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub nodes: usize,
    /// Empirical `P(LH_1 = v | count in bin)`, keyed by `v`.
    pub distribution: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub binning: Binning,
    pub per_bin: Vec<BinReport>,
    pub top_percent: f64,
    pub top_rule: TopRule,
    pub top_bin: Vec<VertexId>,
    /// Every top forwarder has `LH_1 >= 1`.
    pub top_bin_high_lh: bool,
    /// Nodes with `LH_1 >= 1` outside the top forwarders.
    pub high_lh_outside_top: Vec<VertexId>,
    pub high_lh_outside_top_count: usize,
    pub mean_lh1_nodes: f64,
    pub mean_lh1_cells: f64,
}

/// Relates forward counts to `LH_1` per node.
///
/// Bins are equal-width over `[0, max count]`. The top forwarders are chosen
/// by [`TopRule`]; nodes that forward nothing are never among them.
pub fn correlate(
    stats: &ForwardingStats,
    lh: &[LocalHomologyScore],
    cfg: &CorrelationConfig,
) -> Result<CorrelationReport> {
    if cfg.bins == 0 {
        return Err(Error::Validation("bin count must be positive".into()));
    }
    if !(cfg.top_percent > 0.0 && cfg.top_percent <= 100.0) {
        return Err(Error::Validation("top percent must lie in (0, 100]".into()));
    }
    let node_lh: BTreeMap<VertexId, usize> =
        lh.iter().filter(|s| s.cell.dim() == 0).map(|s| (s.cell.vertices()[0], s.get(1))).collect();
    if let Some(&missing) = stats.counts.keys().find(|n| !node_lh.contains_key(n)) {
        return Err(Error::MissingScore(missing));
    }
    let counts: BTreeMap<VertexId, u64> =
        node_lh.keys().map(|&n| (n, stats.counts.get(&n).copied().unwrap_or(0))).collect();

    let max_count = counts.values().copied().max().unwrap_or(0);
    let bins = cfg.bins;
    let bin_of = |c: u64| {
        if max_count == 0 {
            0
        } else {
            ((c as u128 * bins as u128) / max_count as u128).min(bins as u128 - 1) as usize
        }
    };
    let width = max_count as f64 / bins as f64;
    let mut tallies: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); bins];
    for (n, &c) in &counts {
        *tallies[bin_of(c)].entry(node_lh[n]).or_insert(0) += 1;
    }
    let per_bin = tallies
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let total: usize = t.values().sum();
            BinReport {
                index: i,
                lower: i as f64 * width,
                upper: (i + 1) as f64 * width,
                nodes: total,
                distribution: t.iter().map(|(v, &k)| (v.to_string(), k as f64 / total as f64)).collect(),
            }
        })
        .collect();

    let top: BTreeSet<VertexId> = match cfg.top_rule {
        TopRule::Range => {
            let floor = max_count as f64 * (1.0 - cfg.top_percent / 100.0);
            counts.iter().filter(|(_, &c)| c > 0 && c as f64 >= floor).map(|(&n, _)| n).collect()
        }
        TopRule::Rank => {
            let mut ranked: Vec<u64> = counts.values().copied().collect();
            ranked.sort_unstable_by(|a, b| b.cmp(a));
            let take = ((ranked.len() as f64 * cfg.top_percent / 100.0).ceil() as usize).clamp(1, ranked.len().max(1));
            let cutoff = ranked.get(take.wrapping_sub(1)).copied().unwrap_or(0);
            counts.iter().filter(|(_, &c)| c > 0 && c >= cutoff).map(|(&n, _)| n).collect()
        }
    };

    let high_lh_outside_top: Vec<VertexId> =
        node_lh.iter().filter(|(n, &v)| v >= 1 && !top.contains(n)).map(|(&n, _)| n).collect();
    let mean =
        |vals: &[usize]| if vals.is_empty() { 0.0 } else { vals.iter().sum::<usize>() as f64 / vals.len() as f64 };
    let node_vals: Vec<usize> = node_lh.values().copied().collect();
    let cell_vals: Vec<usize> = lh.iter().map(|s| s.get(1)).collect();

    Ok(CorrelationReport {
        binning: Binning { method: "equal-width", bins, max_count, width },
        per_bin,
        top_percent: cfg.top_percent,
        top_rule: cfg.top_rule,
        top_bin_high_lh: top.iter().all(|n| node_lh[n] >= 1),
        top_bin: top.into_iter().collect(),
        high_lh_outside_top_count: high_lh_outside_top.len(),
        high_lh_outside_top,
        mean_lh1_nodes: mean(&node_vals),
        mean_lh1_cells: mean(&cell_vals),
    })
}
