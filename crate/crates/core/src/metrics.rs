//! Network statistics over directed/undirected, weighted/unweighted graphs:
//! density, clustering, largest weakly connected component, average shortest
//! path length, modularity, homophily, degree distributions with a power-law
//! exponent estimator, and greedy modularity-maximizing community detection.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ties::{BinaryGraph, TieGraph};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("graph must have at least {needed} nodes, has {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("metric undefined on a graph without edge weight")]
    EmptyGraph,
    #[error("no reachable ordered pair inside the largest component")]
    NoReachablePair,
    #[error("homophily requires at least two groups")]
    SingleGroup,
    #[error("degree list is empty")]
    EmptyDegrees,
    #[error("all degrees equal k_min; the exponent estimate diverges")]
    DegenerateDegrees,
    #[error("degree {0} below k_min")]
    DegreeBelowKmin(usize),
}

/// Dense weighted graph. `weight(u, v)` is the weight of the edge `u -> v`;
/// undirected graphs keep the matrix symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    directed: bool,
    w: Vec<f64>,
}

impl Graph {
    pub fn directed(n: usize) -> Self {
        Graph {
            n,
            directed: true,
            w: vec![0.0; n * n],
        }
    }

    pub fn undirected(n: usize) -> Self {
        Graph {
            n,
            directed: false,
            w: vec![0.0; n * n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.w[u * self.n + v]
    }

    /// Sets the weight of `u -> v`; mirrors it for undirected graphs.
    /// Self-loops are ignored.
    pub fn set_edge(&mut self, u: usize, v: usize, weight: f64) {
        if u == v {
            return;
        }
        debug_assert!(weight >= 0.0);
        self.w[u * self.n + v] = weight;
        if !self.directed {
            self.w[v * self.n + u] = weight;
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, 1.0);
    }

    /// Total edge weight over ordered pairs (the modularity normalizer).
    pub fn total_weight(&self) -> f64 {
        let mut sum = 0.0;
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v {
                    sum += self.weight(u, v);
                }
            }
        }
        sum
    }

    pub fn out_strength(&self, u: usize) -> f64 {
        (0..self.n).map(|v| self.weight(u, v)).sum()
    }

    pub fn in_strength(&self, u: usize) -> f64 {
        (0..self.n).map(|v| self.weight(v, u)).sum()
    }

    /// Neighbors of `u` along outgoing support.
    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| v != u && self.weight(u, v) > 0.0)
            .collect()
    }

    /// Underlying undirected support: `u` and `v` touch in either direction.
    pub fn touches(&self, u: usize, v: usize) -> bool {
        self.weight(u, v) > 0.0 || self.weight(v, u) > 0.0
    }

    /// The tie matrix as a directed weighted graph: an edge `v -> u` for the
    /// tie from `v` to `u`.
    pub fn from_ties(ties: &TieGraph) -> Self {
        let n = ties.len();
        let mut g = Graph::directed(n);
        for (from, to, w) in ties.pairs() {
            g.set_edge(from, to, w);
        }
        g
    }

    pub fn from_binary(b: &BinaryGraph) -> Self {
        let n = b.len();
        let mut g = Graph::undirected(n);
        for (a, c) in b.edges() {
            g.add_edge(a, c);
        }
        g
    }
}

/// Total assignment of nodes to communities `1..=C`, every community
/// non-empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    communities: usize,
}

impl Partition {
    /// Builds a partition from raw labels, compacting them to `1..=C` in
    /// order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut next = 0usize;
        let assignment = labels
            .iter()
            .map(|&l| {
                *remap.entry(l).or_insert_with(|| {
                    next += 1;
                    next
                })
            })
            .collect();
        Partition {
            assignment,
            communities: next,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (1..=n).collect(),
            communities: n,
        }
    }

    pub fn one_community(n: usize) -> Self {
        Partition {
            assignment: vec![1; n],
            communities: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn community_count(&self) -> usize {
        self.communities
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.assignment
    }

    /// Community sizes indexed by community id - 1.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.communities];
        for &c in &self.assignment {
            sizes[c - 1] += 1;
        }
        sizes
    }
}

/// Average edge weight over all possible edges.
pub fn density(g: &Graph) -> Result<f64, MetricError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricError::TooSmall { needed: 2, got: n });
    }
    let pairs = (n * (n - 1)) as f64;
    if g.is_directed() {
        Ok(g.total_weight() / pairs)
    } else {
        let mut sum = 0.0;
        for u in 0..n {
            for v in u + 1..n {
                sum += g.weight(u, v);
            }
        }
        Ok(2.0 * sum / pairs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult {
    pub per_node: Vec<f64>,
    pub global: f64,
}

/// Local and global clustering. Directed graphs count weighted closed
/// 3-cycles through each node's out-degree; undirected graphs count edges
/// between neighbors. Nodes with (out-)degree at most one get zero.
pub fn clustering(g: &Graph) -> ClusteringResult {
    let n = g.node_count();
    let mut per_node = vec![0.0; n];
    if g.is_directed() {
        for u in 0..n {
            let k_out = g.out_strength(u);
            if k_out <= 1.0 {
                continue;
            }
            let mut cycles = 0.0;
            for v in 0..n {
                if v == u {
                    continue;
                }
                for v2 in 0..n {
                    if v2 == v || v2 == u {
                        continue;
                    }
                    cycles += g.weight(u, v) * g.weight(v, v2) * g.weight(v2, u);
                }
            }
            per_node[u] = cycles / (k_out * (k_out - 1.0));
        }
    } else {
        for u in 0..n {
            let k = g.out_strength(u);
            if k <= 1.0 {
                continue;
            }
            let neighbors = g.out_neighbors(u);
            let mut between = 0usize;
            for (i, &v) in neighbors.iter().enumerate() {
                for &v2 in &neighbors[i + 1..] {
                    if g.weight(v, v2) > 0.0 {
                        between += 1;
                    }
                }
            }
            per_node[u] = 2.0 * between as f64 / (k * (k - 1.0));
        }
    }
    let global = if n == 0 {
        0.0
    } else {
        per_node.iter().sum::<f64>() / n as f64
    };
    ClusteringResult { per_node, global }
}

/// Weakly connected components as node lists, largest first.
pub fn weak_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for v in 0..n {
                if !seen[v] && g.touches(u, v) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

/// Size of the largest weakly connected component as a fraction of the node
/// count.
pub fn lcc_fraction(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    weak_components(g)[0].len() as f64 / n as f64
}

/// Mean directed hop distance over reachable ordered pairs inside the
/// largest weakly connected component.
pub fn aspl(g: &Graph) -> Result<f64, MetricError> {
    let lcc = weak_components(g).into_iter().next().unwrap_or_default();
    if lcc.len() < 2 {
        return Err(MetricError::NoReachablePair);
    }
    let in_lcc: std::collections::BTreeSet<usize> = lcc.iter().copied().collect();
    let mut total = 0u64;
    let mut pairs = 0u64;
    for &src in &lcc {
        // BFS over directed support, unweighted hop counts.
        let mut dist: BTreeMap<usize, u64> = BTreeMap::new();
        dist.insert(src, 0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for v in 0..g.node_count() {
                if v != u && g.weight(u, v) > 0.0 && in_lcc.contains(&v) {
                    dist.entry(v).or_insert_with(|| {
                        queue.push_back(v);
                        d + 1
                    });
                }
            }
        }
        for (&dst, &d) in &dist {
            if dst != src {
                total += d;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(MetricError::NoReachablePair);
    }
    Ok(total as f64 / pairs as f64)
}

/// Modularity of a partition: observed within-community weight against the
/// degree-product expectation, normalized by total edge weight.
pub fn modularity(g: &Graph, partition: &Partition) -> Result<f64, MetricError> {
    let n = g.node_count();
    debug_assert_eq!(partition.len(), n);
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(MetricError::EmptyGraph);
    }
    let k_out: Vec<f64> = (0..n).map(|u| g.out_strength(u)).collect();
    let k_in: Vec<f64> = (0..n).map(|u| g.in_strength(u)).collect();
    let mut q = 0.0;
    for u in 0..n {
        for v in 0..n {
            if partition.community_of(u) == partition.community_of(v) {
                q += g.weight(u, v) - k_out[u] * k_in[v] / total;
            }
        }
    }
    Ok(q / total)
}

/// Observed cross-group weight over its expectation under random mixing.
/// Below one indicates homophily, one random mixing, above one heterophily.
pub fn homophily(g: &Graph, groups: &Partition) -> Result<f64, MetricError> {
    let n = g.node_count();
    debug_assert_eq!(groups.len(), n);
    if groups.community_count() < 2 {
        return Err(MetricError::SingleGroup);
    }
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(MetricError::EmptyGraph);
    }
    let mut cross = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u != v && groups.community_of(u) != groups.community_of(v) {
                cross += g.weight(u, v);
            }
        }
    }
    let share: f64 = groups
        .sizes()
        .iter()
        .map(|&s| (s as f64 / n as f64).powi(2))
        .sum();
    let expected = total * (1.0 - share);
    if expected <= 0.0 {
        return Err(MetricError::SingleGroup);
    }
    Ok(cross / expected)
}

/// Greedy agglomerative modularity maximization. Starts from singleton
/// communities and repeatedly merges the pair with the largest modularity
/// gain; ties break toward the lexicographically smallest community pair.
/// Stops when no merge improves modularity.
pub fn detect_communities(g: &Graph) -> Partition {
    let n = g.node_count();
    if n == 0 {
        return Partition::from_labels(&[]);
    }
    let total = g.total_weight();
    if total <= 0.0 {
        return Partition::singletons(n);
    }

    // Community-level aggregates: cross weights and strength sums.
    let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|u| Some(vec![u])).collect();
    let mut weight_between = vec![0.0; n * n]; // weight_between[a*n+b] = sum of a->b edges
    let mut k_out: Vec<f64> = (0..n).map(|u| g.out_strength(u)).collect();
    let mut k_in: Vec<f64> = (0..n).map(|u| g.in_strength(u)).collect();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                weight_between[u * n + v] = g.weight(u, v);
            }
        }
    }

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        let alive: Vec<usize> = (0..n).filter(|&c| members[c].is_some()).collect();
        if alive.len() < 2 {
            break;
        }
        for (i, &a) in alive.iter().enumerate() {
            for &b in &alive[i + 1..] {
                let joint = weight_between[a * n + b] + weight_between[b * n + a];
                let expected = (k_out[a] * k_in[b] + k_out[b] * k_in[a]) / total;
                let dq = (joint - expected) / total;
                let better = match best {
                    None => true,
                    Some((bq, ba, bb)) => {
                        dq > bq + 1e-15
                            || ((dq - bq).abs() <= 1e-15 && (a, b) < (ba, bb))
                    }
                };
                if better {
                    best = Some((dq, a, b));
                }
            }
        }
        match best {
            Some((dq, a, b)) if dq > 1e-12 => {
                // Merge b into a.
                let moved = members[b].take().expect("community b is alive");
                members[a].as_mut().expect("community a is alive").extend(moved);
                for c in 0..n {
                    if c == a || c == b {
                        continue;
                    }
                    weight_between[a * n + c] += weight_between[b * n + c];
                    weight_between[c * n + a] += weight_between[c * n + b];
                    weight_between[b * n + c] = 0.0;
                    weight_between[c * n + b] = 0.0;
                }
                weight_between[a * n + b] = 0.0;
                weight_between[b * n + a] = 0.0;
                k_out[a] += k_out[b];
                k_in[a] += k_in[b];
                k_out[b] = 0.0;
                k_in[b] = 0.0;
            }
            _ => break,
        }
    }

    let mut labels = vec![0usize; n];
    for (c, m) in members.iter().enumerate() {
        if let Some(nodes) = m {
            for &u in nodes {
                labels[u] = c + 1;
            }
        }
    }
    Partition::from_labels(&labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    Undirected,
}

/// Integer degrees counted over edge support (nonzero entries).
pub fn degree_sequence(g: &Graph, direction: Direction) -> Vec<usize> {
    let n = g.node_count();
    (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| {
                    v != u
                        && match direction {
                            Direction::Out => g.weight(u, v) > 0.0,
                            Direction::In => g.weight(v, u) > 0.0,
                            Direction::Undirected => g.touches(u, v),
                        }
                })
                .count()
        })
        .collect()
}

/// Empirical degree mass function; sums to one.
pub fn degree_histogram(degrees: &[usize]) -> Result<BTreeMap<usize, f64>, MetricError> {
    if degrees.is_empty() {
        return Err(MetricError::EmptyDegrees);
    }
    let n = degrees.len() as f64;
    let mut hist = BTreeMap::new();
    for &k in degrees {
        *hist.entry(k).or_insert(0.0) += 1.0;
    }
    for v in hist.values_mut() {
        *v /= n;
    }
    Ok(hist)
}

/// Discrete maximum-likelihood power-law exponent for degrees at or above a
/// fixed `k_min`: `1 + n / sum(ln(k_i / (k_min - 1/2)))`. A sample entirely
/// at `k_min` is rejected as degenerate (the true estimate diverges).
pub fn fit_power_law(degrees: &[usize], k_min: usize) -> Result<f64, MetricError> {
    if degrees.is_empty() {
        return Err(MetricError::EmptyDegrees);
    }
    debug_assert!(k_min >= 1);
    if let Some(&bad) = degrees.iter().find(|&&k| k < k_min) {
        return Err(MetricError::DegreeBelowKmin(bad));
    }
    if degrees.iter().all(|&k| k == k_min) {
        return Err(MetricError::DegenerateDegrees);
    }
    let shift = k_min as f64 - 0.5;
    let log_sum: f64 = degrees.iter().map(|&k| (k as f64 / shift).ln()).sum();
    Ok(1.0 + degrees.len() as f64 / log_sum)
}

/// One row of the evaluation pipeline, tagged with the graph variant it was
/// computed on. Metrics that are undefined on the given graph stay `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub variant: String,
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub clustering: f64,
    pub lcc: f64,
    pub aspl: Option<f64>,
    pub modularity: Option<f64>,
    pub communities: usize,
    pub homophily: Option<f64>,
    pub degree_histogram: BTreeMap<usize, f64>,
    pub power_law_exponent: Option<f64>,
}

/// Runs the full metric suite on an unweighted undirected graph (the
/// binarized reporting form). Homophily is computed against `groups` when at
/// least two groups are present.
pub fn full_report(
    g: &Graph,
    groups: Option<&Partition>,
    variant: impl Into<String>,
) -> Result<MetricsReport, MetricError> {
    let n = g.node_count();
    let degrees = degree_sequence(g, Direction::Undirected);
    let edges = degrees.iter().sum::<usize>() / 2;
    let partition = detect_communities(g);
    let modularity_value = modularity(g, &partition).ok();
    let positive_degrees: Vec<usize> = degrees.iter().copied().filter(|&k| k >= 1).collect();
    let exponent = fit_power_law(&positive_degrees, 1).ok();
    Ok(MetricsReport {
        variant: variant.into(),
        nodes: n,
        edges,
        density: density(g)?,
        clustering: clustering(g).global,
        lcc: lcc_fraction(g),
        aspl: aspl(g).ok(),
        modularity: modularity_value,
        communities: partition.community_count(),
        homophily: groups.and_then(|gr| homophily(g, gr).ok()),
        degree_histogram: degree_histogram(&degrees)?,
        power_law_exponent: exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle_pair() -> Graph {
        let mut g = Graph::undirected(6);
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            g.add_edge(a, b);
        }
        g
    }

    #[test]
    fn density_goldens() {
        // Complete unweighted directed graph.
        let mut g = Graph::directed(4);
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
        assert_abs_diff_eq!(density(&g).unwrap(), 1.0, epsilon = 1e-12);

        // Empty graph.
        let empty = Graph::directed(4);
        assert_abs_diff_eq!(density(&empty).unwrap(), 0.0, epsilon = 1e-12);

        // 3 nodes, two ordered pairs at weight 0.5.
        let mut h = Graph::directed(3);
        h.set_edge(0, 1, 0.5);
        h.set_edge(2, 0, 0.5);
        assert_abs_diff_eq!(density(&h).unwrap(), 1.0 / 6.0, epsilon = 1e-12);

        assert!(density(&Graph::directed(1)).is_err());
    }

    #[test]
    fn clustering_triangle_and_star() {
        let mut tri = Graph::undirected(3);
        tri.add_edge(0, 1);
        tri.add_edge(1, 2);
        tri.add_edge(2, 0);
        let c = clustering(&tri);
        assert!(c.per_node.iter().all(|&k| (k - 1.0).abs() < 1e-12));
        assert_abs_diff_eq!(c.global, 1.0, epsilon = 1e-12);

        let mut star = Graph::undirected(4);
        star.add_edge(0, 1);
        star.add_edge(0, 2);
        star.add_edge(0, 3);
        assert_abs_diff_eq!(clustering(&star).global, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn clustering_four_cycle_with_chord() {
        // Cycle 0-1-2-3 plus chord 1-3: the chord endpoints sit in two
        // triangles over three neighbors, the others in one over two.
        let mut g = Graph::undirected(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)] {
            g.add_edge(a, b);
        }
        let c = clustering(&g);
        assert_abs_diff_eq!(c.per_node[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.per_node[1], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.per_node[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.per_node[3], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.global, 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn lcc_goldens() {
        let mut g = Graph::directed(5);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        assert_abs_diff_eq!(lcc_fraction(&g), 0.6, epsilon = 1e-12);

        let connected = triangle_pair();
        assert_abs_diff_eq!(lcc_fraction(&connected), 0.5, epsilon = 1e-12);

        let empty = Graph::undirected(4);
        assert_abs_diff_eq!(lcc_fraction(&empty), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn aspl_goldens() {
        // Undirected path on 3 nodes.
        let mut path = Graph::undirected(3);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        assert_abs_diff_eq!(aspl(&path).unwrap(), 4.0 / 3.0, epsilon = 1e-12);

        // Complete graph.
        let mut k4 = Graph::undirected(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v);
            }
        }
        assert_abs_diff_eq!(aspl(&k4).unwrap(), 1.0, epsilon = 1e-12);

        // Directed 3-cycle.
        let mut cyc = Graph::directed(3);
        cyc.add_edge(0, 1);
        cyc.add_edge(1, 2);
        cyc.add_edge(2, 0);
        assert_abs_diff_eq!(aspl(&cyc).unwrap(), 1.5, epsilon = 1e-12);

        let empty = Graph::undirected(3);
        assert_eq!(aspl(&empty), Err(MetricError::NoReachablePair));
    }

    #[test]
    fn modularity_two_triangles() {
        let g = triangle_pair();
        let p = Partition::from_labels(&[1, 1, 1, 2, 2, 2]);
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn modularity_one_community_is_zero() {
        let g = triangle_pair();
        let p = Partition::one_community(6);
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), 0.0, epsilon = 1e-12);
        assert!(modularity(&Graph::undirected(3), &Partition::one_community(3)).is_err());
    }

    #[test]
    fn homophily_goldens() {
        // Two groups, zero cross-group edges.
        let g = triangle_pair();
        let groups = Partition::from_labels(&[1, 1, 1, 2, 2, 2]);
        assert_abs_diff_eq!(homophily(&g, &groups).unwrap(), 0.0, epsilon = 1e-12);

        // Complete directed graph on 6 nodes, two equal groups: 1 + 1/(n-1).
        let mut k6 = Graph::directed(6);
        for u in 0..6 {
            for v in 0..6 {
                if u != v {
                    k6.add_edge(u, v);
                }
            }
        }
        assert_abs_diff_eq!(homophily(&k6, &groups).unwrap(), 1.2, epsilon = 1e-12);

        // All edges cross-group: complete bipartite on 2+2.
        let mut b = Graph::undirected(4);
        for (u, v) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            b.add_edge(u, v);
        }
        let two = Partition::from_labels(&[1, 1, 2, 2]);
        assert_abs_diff_eq!(homophily(&b, &two).unwrap(), 2.0, epsilon = 1e-12);

        // Single group is a domain error.
        assert_eq!(
            homophily(&g, &Partition::one_community(6)),
            Err(MetricError::SingleGroup)
        );
    }

    #[test]
    fn detect_communities_recovers_structure() {
        let g = triangle_pair();
        let p = detect_communities(&g);
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.community_of(0), p.community_of(1));
        assert_eq!(p.community_of(0), p.community_of(2));
        assert_eq!(p.community_of(3), p.community_of(4));
        assert_eq!(p.community_of(3), p.community_of(5));
        assert_ne!(p.community_of(0), p.community_of(3));

        // Complete graph collapses to one community.
        let mut k5 = Graph::undirected(5);
        for u in 0..5 {
            for v in u + 1..5 {
                k5.add_edge(u, v);
            }
        }
        assert_eq!(detect_communities(&k5).community_count(), 1);
    }

    #[test]
    fn detect_communities_barbell() {
        // Two K4 blocks joined by one bridge.
        let mut g = Graph::undirected(8);
        for base in [0, 4] {
            for u in base..base + 4 {
                for v in u + 1..base + 4 {
                    g.add_edge(u, v);
                }
            }
        }
        g.add_edge(3, 4);
        let p = detect_communities(&g);
        assert_eq!(p.community_count(), 2);
        for u in 1..4 {
            assert_eq!(p.community_of(0), p.community_of(u));
        }
        for u in 5..8 {
            assert_eq!(p.community_of(4), p.community_of(u));
        }
    }

    #[test]
    fn degree_histogram_and_fit() {
        let hist = degree_histogram(&[2, 2, 2, 2]).unwrap();
        assert_eq!(hist.len(), 1);
        assert_abs_diff_eq!(hist[&2], 1.0, epsilon = 1e-12);

        let gamma = fit_power_law(&[1, 1, 2, 3, 5], 1).unwrap();
        let log_sum = (1.0f64 / 0.5).ln() * 2.0
            + (2.0f64 / 0.5).ln()
            + (3.0f64 / 0.5).ln()
            + (5.0f64 / 0.5).ln();
        assert_abs_diff_eq!(gamma, 1.0 + 5.0 / log_sum, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma, 1.7281, epsilon = 1e-4);

        assert_eq!(
            fit_power_law(&[3, 3, 3], 3),
            Err(MetricError::DegenerateDegrees)
        );
        assert_eq!(fit_power_law(&[], 1), Err(MetricError::EmptyDegrees));
    }
}
