//! The degree-4 Hanoi network (HN4) and the graph action of the shift operator.
//!
//! HN4 on `N = 2^n` vertices is a cycle (the *backbone*, coin ports 2 and 3)
//! plus one hierarchy of long-range edges (ports 0 and 1). Every vertex
//! `1 <= k <= N-1` factors uniquely as `k = 2^k1 * (2*k2 + 1)`: `k1` is its
//! hierarchy level and `k2` its position within the level. Long-range edges
//! join vertices with consecutive `k2` inside one level. Vertex 0 (which has
//! no factorization) and vertex `2^(n-1)` (alone in the top level) carry loops
//! on ports 0 and 1 instead.
//!
//! Two readings of "consecutive `k2`" exist and both are kept behind
//! [`EdgeMode`]:
//!
//! * [`EdgeMode::Paired`] — even `k2` pairs with `k2 + 1`, odd with `k2 - 1`.
//!   Ports 0 and 1 then traverse the same partner edge, which is therefore
//!   doubled (a two-edge multilink).
//! * [`EdgeMode::Chain`] — port 0 steps to `k2 + 1` and port 1 to `k2 - 1`,
//!   modulo the level size, closing each level into a cycle (1-3-5-7-...).
//!
//! In either mode the port map is an involution (the shift operator squares
//! to the identity) and every vertex has total port degree 4.

use std::fmt;

use crate::error::{Error, Result};

/// Number of coin ports per vertex.
pub const NUM_PORTS: usize = 4;

/// Smallest supported network, `N = 4`.
pub const MIN_LEVELS: u32 = 2;
/// Largest supported network, `N = 2^28`; keeps flat indices well inside
/// `usize` and amplitude vectors inside addressable memory.
pub const MAX_LEVELS: u32 = 28;

/// Interpretation of the long-range edges within a hierarchy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EdgeMode {
    /// Disjoint pairs `(k2 even) <-> (k2 + 1)`; the level edge is doubled.
    #[default]
    Paired,
    /// Cycle through consecutive `k2` modulo the level size.
    Chain,
}

impl EdgeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeMode::Paired => "paired",
            EdgeMode::Chain => "chain",
        }
    }
}

impl fmt::Display for EdgeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EdgeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paired" => Ok(EdgeMode::Paired),
            "chain" => Ok(EdgeMode::Chain),
            other => Err(Error::domain(format!(
                "unknown edge mode `{other}` (expected `paired` or `chain`)"
            ))),
        }
    }
}

/// Hierarchy label of a vertex: `k = 2^k1 * (2*k2 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexLabel {
    pub k: usize,
    /// Hierarchy level, the exponent of 2 in `k`.
    pub k1: u32,
    /// Position within the level, counting from 0.
    pub k2: usize,
}

/// Decompose vertex `k` of a `2^n`-vertex network into its `(k1, k2)` label.
///
/// Vertex 0 has no label and yields [`Error::NoFactorization`]; the caller
/// must treat it as the special loop vertex.
pub fn factorize(k: usize, n: u32) -> Result<VertexLabel> {
    if k == 0 {
        return Err(Error::NoFactorization);
    }
    let num_vertices = 1usize << n;
    if k >= num_vertices {
        return Err(Error::domain(format!(
            "vertex {k} out of range for n = {n} (N = {num_vertices})"
        )));
    }
    let k1 = k.trailing_zeros();
    let k2 = (k >> (k1 + 1)) as usize;
    Ok(VertexLabel { k, k1, k2 })
}

/// Inverse of [`factorize`]: rebuild the vertex index from `(k1, k2)`.
pub fn compose(k1: u32, k2: usize, n: u32) -> Result<usize> {
    if k1 > n - 1 {
        return Err(Error::domain(format!(
            "level k1 = {k1} out of range for n = {n} (max {})",
            n - 1
        )));
    }
    let level_size = level_size(k1, n);
    if k2 >= level_size {
        return Err(Error::domain(format!(
            "in-level index k2 = {k2} out of range for level {k1} of n = {n} (size {level_size})"
        )));
    }
    Ok((2 * k2 + 1) << k1)
}

/// Number of vertices in hierarchy level `k1`: `2^(n - k1 - 1)`.
pub fn level_size(k1: u32, n: u32) -> usize {
    1usize << (n - k1 - 1)
}

/// An undirected edge of the network, one row of the edge dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub k: usize,
    pub k_prime: usize,
    pub class: EdgeClass,
}

/// Which port pair carries an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Cycle edge on ports 2/3.
    Backbone,
    /// Long-range edge within a hierarchy level, ports 0/1.
    Level,
    /// Self-loop at vertex 0 or `2^(n-1)`, ports 0/1.
    Loop,
}

impl EdgeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Backbone => "backbone",
            EdgeClass::Level => "level",
            EdgeClass::Loop => "loop",
        }
    }
}

/// Immutable HN4 topology with the full `(port, vertex) -> (port, vertex)`
/// map of the shift operator precomputed as a flat permutation.
///
/// Flat index convention (vertex-major): `k * 4 + port`. The same layout is
/// used for the amplitude vector of a walker state, so the table doubles as
/// the shift permutation on amplitudes.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    n: u32,
    num_vertices: usize,
    edge_mode: EdgeMode,
    // Involution on {0..N-1} x {0..3}: table[k * 4 + a] = k' * 4 + a'.
    table: Vec<usize>,
}

impl NetworkTopology {
    pub fn new(n: u32, edge_mode: EdgeMode) -> Result<Self> {
        if !(MIN_LEVELS..=MAX_LEVELS).contains(&n) {
            return Err(Error::domain(format!(
                "n = {n} out of range (need {MIN_LEVELS} <= n <= {MAX_LEVELS})"
            )));
        }
        let num_vertices = 1usize << n;
        let mut table = vec![0usize; NUM_PORTS * num_vertices];
        for k in 0..num_vertices {
            for port in 0..NUM_PORTS {
                let (tp, tk) = raw_shift_target(port, k, n, edge_mode)?;
                table[k * NUM_PORTS + port] = tk * NUM_PORTS + tp;
            }
        }
        let topo = NetworkTopology { n, num_vertices, edge_mode, table };
        debug_assert!(topo.table.iter().enumerate().all(|(i, &j)| topo.table[j] == i));
        Ok(topo)
    }

    pub fn levels(&self) -> u32 {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edge_mode(&self) -> EdgeMode {
        self.edge_mode
    }

    /// Where the shift operator sends basis state `|port>|k>`.
    pub fn shift_target(&self, port: usize, k: usize) -> (usize, usize) {
        let t = self.table[k * NUM_PORTS + port];
        (t % NUM_PORTS, t / NUM_PORTS)
    }

    /// The shift as a flat permutation on `4N` amplitude slots
    /// (vertex-major layout, coin fastest). Self-inverse.
    pub fn shift_permutation(&self) -> &[usize] {
        &self.table
    }

    /// Deduplicated undirected edge list: one row per orbit of the port
    /// involution. A doubled level edge (both ports of a vertex leading to
    /// the same partner) therefore appears as two identical rows, so port
    /// degrees stay readable from the dump: every vertex totals 4, with a
    /// loop contributing 2 to its endpoint.
    pub fn dump_edges(&self) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(self.table.len() / 2);
        for (i, &j) in self.table.iter().enumerate() {
            if i >= j {
                continue; // orbit already emitted (loops pair two distinct slots, so i != j)
            }
            let (k, port) = (i / NUM_PORTS, i % NUM_PORTS);
            let k_prime = j / NUM_PORTS;
            let class = if port >= 2 {
                EdgeClass::Backbone
            } else if k == k_prime {
                EdgeClass::Loop
            } else {
                EdgeClass::Level
            };
            edges.push(Edge { k: k.min(k_prime), k_prime: k.max(k_prime), class });
        }
        edges
    }
}

/// Case analysis behind the precomputed table; `n` and `k` already validated
/// by the constructor.
fn raw_shift_target(port: usize, k: usize, n: u32, mode: EdgeMode) -> Result<(usize, usize)> {
    let num_vertices = 1usize << n;
    match port {
        2 => Ok((3, (k + 1) % num_vertices)),
        3 => Ok((2, (k + num_vertices - 1) % num_vertices)),
        0 | 1 => {
            let flipped = 1 - port;
            // Loop vertices: 0 (unlabelled) and 2^(n-1) (alone in its level).
            if k == 0 || k == num_vertices / 2 {
                return Ok((flipped, k));
            }
            let label = factorize(k, n)?;
            let level_len = level_size(label.k1, n);
            let k2_next = match mode {
                EdgeMode::Paired => {
                    if label.k2 % 2 == 0 {
                        label.k2 + 1
                    } else {
                        label.k2 - 1
                    }
                }
                EdgeMode::Chain => {
                    if port == 0 {
                        (label.k2 + 1) % level_len
                    } else {
                        (label.k2 + level_len - 1) % level_len
                    }
                }
            };
            Ok((flipped, compose(label.k1, k2_next, n)?))
        }
        _ => Err(Error::domain(format!("port {port} out of range (0..=3)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        let l = factorize(3, 4).unwrap();
        assert_eq!((l.k1, l.k2), (0, 1));
        let l = factorize(12, 4).unwrap();
        assert_eq!((l.k1, l.k2), (2, 1));
        let l = factorize(8, 4).unwrap();
        assert_eq!((l.k1, l.k2), (3, 0));
    }

    #[test]
    fn factorize_rejects_vertex_zero_and_out_of_range() {
        assert!(matches!(factorize(0, 4), Err(Error::NoFactorization)));
        assert!(matches!(factorize(16, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(0, 0, 4).unwrap(), 1);
        assert_eq!(compose(1, 2, 4).unwrap(), 10);
        assert_eq!(compose(2, 1, 4).unwrap(), 12);
        assert!(compose(4, 0, 4).is_err());
        assert!(compose(0, 8, 4).is_err());
    }

    #[test]
    fn factorize_compose_roundtrip_exhaustive() {
        for n in MIN_LEVELS..=12 {
            for k in 1..(1usize << n) {
                let l = factorize(k, n).unwrap();
                assert_eq!(compose(l.k1, l.k2, n).unwrap(), k);
            }
        }
    }

    #[test]
    fn shift_examples_paired() {
        let topo = NetworkTopology::new(4, EdgeMode::Paired).unwrap();
        assert_eq!(topo.shift_target(0, 3), (1, 1));
        assert_eq!(topo.shift_target(0, 0), (1, 0));
        assert_eq!(topo.shift_target(2, 5), (3, 6));
        // Loop at 2^(n-1).
        assert_eq!(topo.shift_target(0, 8), (1, 8));
        assert_eq!(topo.shift_target(1, 8), (0, 8));
        // Backbone wraps modulo N.
        assert_eq!(topo.shift_target(2, 15), (3, 0));
        assert_eq!(topo.shift_target(3, 0), (2, 15));
    }

    #[test]
    fn shift_examples_chain() {
        let topo = NetworkTopology::new(4, EdgeMode::Chain).unwrap();
        // 1 -> 3 -> 5 -> 7 along level 0.
        assert_eq!(topo.shift_target(0, 1), (1, 3));
        assert_eq!(topo.shift_target(0, 3), (1, 5));
        assert_eq!(topo.shift_target(0, 5), (1, 7));
        // Port 1 walks the level cycle backwards, wrapping at the start.
        assert_eq!(topo.shift_target(1, 1), (0, 15));
        assert_eq!(topo.shift_target(2, 5), (3, 6));
    }

    #[test]
    fn involution_and_bijection_exhaustive() {
        for n in MIN_LEVELS..=12 {
            for mode in [EdgeMode::Paired, EdgeMode::Chain] {
                let topo = NetworkTopology::new(n, mode).unwrap();
                let mut seen = vec![false; NUM_PORTS << n];
                for k in 0..topo.num_vertices() {
                    for port in 0..NUM_PORTS {
                        let (tp, tk) = topo.shift_target(port, k);
                        assert_eq!(topo.shift_target(tp, tk), (port, k), "S^2 != I at n={n} {mode}");
                        let slot = tk * NUM_PORTS + tp;
                        assert!(!seen[slot], "duplicate image at n={n} {mode}");
                        seen[slot] = true;
                    }
                }
                assert!(seen.into_iter().all(|s| s));
            }
        }
    }

    #[test]
    fn backbone_is_a_single_cycle() {
        for mode in [EdgeMode::Paired, EdgeMode::Chain] {
            let topo = NetworkTopology::new(6, mode).unwrap();
            let mut k = 0usize;
            for step in 1..=topo.num_vertices() {
                let (_, next) = topo.shift_target(2, k);
                k = next;
                if k == 0 {
                    assert_eq!(step, topo.num_vertices());
                }
            }
            assert_eq!(k, 0);
        }
    }

    #[test]
    fn paired_ports_move_identically() {
        let topo = NetworkTopology::new(8, EdgeMode::Paired).unwrap();
        for k in 0..topo.num_vertices() {
            let (_, via0) = topo.shift_target(0, k);
            let (_, via1) = topo.shift_target(1, k);
            assert_eq!(via0, via1, "level edge not doubled at k={k}");
        }
    }

    #[test]
    fn edge_dump_n2_paired() {
        let topo = NetworkTopology::new(2, EdgeMode::Paired).unwrap();
        let edges = topo.dump_edges();
        assert_eq!(edges.len(), 8);
        let count = |k: usize, kp: usize, class: EdgeClass| {
            edges.iter().filter(|e| e.k == k && e.k_prime == kp && e.class == class).count()
        };
        assert_eq!(count(0, 1, EdgeClass::Backbone), 1);
        assert_eq!(count(1, 2, EdgeClass::Backbone), 1);
        assert_eq!(count(2, 3, EdgeClass::Backbone), 1);
        assert_eq!(count(0, 3, EdgeClass::Backbone), 1);
        assert_eq!(count(0, 0, EdgeClass::Loop), 1);
        assert_eq!(count(2, 2, EdgeClass::Loop), 1);
        // The single level pair 1-3 is carried by both ports.
        assert_eq!(count(1, 3, EdgeClass::Level), 2);
    }

    #[test]
    fn edge_dump_degree_and_loops() {
        for mode in [EdgeMode::Paired, EdgeMode::Chain] {
            let topo = NetworkTopology::new(4, mode).unwrap();
            let edges = topo.dump_edges();
            assert_eq!(edges.len(), 32); // 4N / 2 involution orbits
            let loops: Vec<usize> =
                edges.iter().filter(|e| e.class == EdgeClass::Loop).map(|e| e.k).collect();
            assert_eq!(loops, vec![0, 8]);
            // Total port degree 4 everywhere; a loop contributes 2.
            let mut degree = vec![0usize; topo.num_vertices()];
            for e in &edges {
                degree[e.k] += 1;
                degree[e.k_prime] += 1;
            }
            assert!(degree.iter().all(|&d| d == 4), "degree mismatch in {mode}");
        }
    }

    #[test]
    fn edge_dump_n4_chain_level0_cycle() {
        let topo = NetworkTopology::new(4, EdgeMode::Chain).unwrap();
        let level0: Vec<(usize, usize)> = topo
            .dump_edges()
            .into_iter()
            .filter(|e| e.class == EdgeClass::Level && e.k % 2 == 1)
            .map(|e| (e.k, e.k_prime))
            .collect();
        let expected = [(1, 3), (3, 5), (5, 7), (7, 9), (9, 11), (11, 13), (13, 15), (1, 15)];
        assert_eq!(level0.len(), expected.len());
        for pair in expected {
            assert!(level0.contains(&pair), "missing level-0 edge {pair:?}");
        }
    }

    #[test]
    fn rejects_undersized_network() {
        assert!(NetworkTopology::new(1, EdgeMode::Paired).is_err());
    }
}
