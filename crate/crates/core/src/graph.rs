//! Weighted MaxCut instances: parsing, seeded generation and exhaustive cut search.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest qubit count accepted by the exhaustive enumerators.
pub const ENUMERATION_GUARD: usize = 24;

const RANDOM_GRAPH_ATTEMPTS: u64 = 100;

/// A computational basis state, equivalently a graph bipartition.
///
/// Bit `i` of `index` is the value of qubit (node) `i`. The textual form lists
/// qubit 0 first, so `"001"` on three qubits has only node 2 set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    index: usize,
    num_qubits: usize,
}

impl BasisState {
    pub fn new(index: usize, num_qubits: usize) -> Result<Self> {
        if num_qubits >= usize::BITS as usize || index >> num_qubits != 0 {
            return Err(Error::invalid(format!(
                "basis index {index} does not fit in {num_qubits} qubits"
            )));
        }
        Ok(Self { index, num_qubits })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn bit(&self, qubit: usize) -> bool {
        (self.index >> qubit) & 1 == 1
    }

    /// The state with every bit flipped.
    pub fn complement(&self) -> Self {
        let mask = (1usize << self.num_qubits) - 1;
        Self {
            index: !self.index & mask,
            num_qubits: self.num_qubits,
        }
    }

    pub(crate) fn expect_len(&self, n: usize) -> Result<()> {
        if self.num_qubits != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: self.num_qubits,
            });
        }
        Ok(())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut index = 0usize;
        for (q, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << q,
                other => return Err(Error::invalid(format!("bad bit {other:?} in {s:?}"))),
            }
        }
        BasisState::new(index, s.chars().count())
    }
}

impl Serialize for BasisState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph with `u < v` on every edge and no duplicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    num_nodes: usize,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Validates and normalizes an edge list. Endpoints are reordered so that
    /// `u < v`; zero-weight edges are dropped since they mean "no edge".
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            let (u, v) = if a <= b { (a, b) } else { (b, a) };
            if u == v {
                return Err(Error::InvalidGraph(format!("self loop on node {u}")));
            }
            if v >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "node {v} out of range for {num_nodes} nodes"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) has invalid weight {w}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            if w > 0.0 {
                out.push(Edge { u, v, weight: w });
            }
        }
        Ok(Self { num_nodes, edges: out })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Parses either the JSON form or the plain `u v w` edge list.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse_edge_list(text)
        }
    }

    /// Plain text, one `u v w` edge per line, `#` comments. The node count is
    /// one more than the largest index mentioned.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut triples = Vec::new();
        let mut max_node = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected \"u v w\", found {} field(s)", fields.len()),
                });
            }
            let node = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node index {s:?}"),
                })
            };
            let u = node(fields[0])?;
            let v = node(fields[1])?;
            let w = fields[2].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad weight {:?}", fields[2]),
            })?;
            max_node = max_node.max(Some(u.max(v)));
            triples.push((u, v, w, line_no));
        }
        let num_nodes = max_node.map_or(0, |m| m + 1);
        // Validate edge by edge so the error can name the offending line.
        let mut accepted = Vec::with_capacity(triples.len());
        for (u, v, w, line_no) in triples {
            accepted.push((u, v, w));
            if let Err(e) = Self::new(num_nodes, accepted.iter().copied()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                });
            }
        }
        let graph = Self::new(num_nodes.max(1), accepted)?;
        Ok(graph)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::new(parsed.n, parsed.edges)
    }

    pub fn to_json(&self) -> String {
        let edges: Vec<(usize, usize, f64)> = self.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
        serde_json::json!({ "n": self.num_nodes, "edges": edges }).to_string()
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# {} nodes\n", self.num_nodes);
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.weight));
        }
        out
    }

    /// Seeded random instance. Each pair is kept with probability `density`
    /// and given an integer weight uniform in `[1, max_weight]`.
    pub fn random(n: usize, max_weight: u32, density: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("random graph needs at least two nodes"));
        }
        if max_weight == 0 {
            return Err(Error::invalid("max_weight must be at least 1"));
        }
        if !(density > 0.0 && density <= 1.0) {
            return Err(Error::invalid(format!("density must lie in (0, 1], got {density}")));
        }
        for attempt in 0..RANDOM_GRAPH_ATTEMPTS {
            let sub_seed = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < density {
                        edges.push((u, v, f64::from(rng.gen_range(1..=max_weight))));
                    }
                }
            }
            if !edges.is_empty() {
                return Self::new(n, edges);
            }
        }
        Err(Error::EmptyGraph)
    }

    /// Total weight of edges whose endpoints fall in different parts.
    pub fn cut_value(&self, partition: &BasisState) -> Result<f64> {
        partition.expect_len(self.num_nodes)?;
        Ok(self.cut_of_index(partition.index()))
    }

    fn cut_of_index(&self, x: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| ((x >> e.u) ^ (x >> e.v)) & 1 == 1)
            .map(|e| e.weight)
            .sum()
    }

    /// Exhaustive maximum cut over all `2^n` bipartitions.
    pub fn brute_force_maxcut(&self) -> Result<MaxCutSolution> {
        let n = self.num_nodes;
        if n > ENUMERATION_GUARD {
            return Err(Error::TooManyQubits {
                num_qubits: n,
                guard: ENUMERATION_GUARD,
            });
        }
        let cuts: Vec<f64> = (0..1usize << n).map(|x| self.cut_of_index(x)).collect();
        let best = cuts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-9 * best.abs().max(1.0);
        let optimal = cuts
            .iter()
            .enumerate()
            .filter(|(_, &c)| best - c <= tol)
            .map(|(x, _)| BasisState {
                index: x,
                num_qubits: n,
            })
            .collect();
        Ok(MaxCutSolution { value: best, optimal })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxCutSolution {
    pub value: f64,
    /// Every optimal bitstring, both members of each flip pair included.
    pub optimal: Vec<BasisState>,
}

impl MaxCutSolution {
    /// One representative per flip pair (node 0 in part `0`).
    pub fn up_to_flip(&self) -> Vec<BasisState> {
        self.optimal.iter().copied().filter(|b| !b.bit(0)).collect()
    }
}
