//! Brute-force reference implementations of the network metrics, plus
//! seeded random generators for graphs and round batches. Compiled only for
//! test suites (behind the `oracles` feature); the metric functions here are
//! literal formula transcriptions, independent of the production code paths.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::metrics::{Graph, Partition};

/// Direct transcription of the density formulas.
pub fn density(g: &Graph) -> Option<f64> {
    let n = g.node_count();
    if n < 2 {
        return None;
    }
    if g.is_directed() {
        let mut sum = 0.0;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    sum += g.weight(u, v);
                }
            }
        }
        Some(sum / (n as f64 * (n as f64 - 1.0)))
    } else {
        let mut sum = 0.0;
        for u in 0..n {
            for v in 0..n {
                if u < v {
                    sum += g.weight(u, v);
                }
            }
        }
        Some(2.0 * sum / (n as f64 * (n as f64 - 1.0)))
    }
}

/// Literal triple-loop clustering: directed closed 3-cycles, or undirected
/// edges between neighbors.
pub fn clustering(g: &Graph) -> (Vec<f64>, f64) {
    let n = g.node_count();
    let mut per_node = vec![0.0; n];
    for u in 0..n {
        if g.is_directed() {
            let k_out: f64 = (0..n).map(|v| g.weight(u, v)).sum();
            if k_out > 1.0 {
                let mut num = 0.0;
                for v in 0..n {
                    for v2 in 0..n {
                        if v != v2 && v != u && v2 != u {
                            num += g.weight(u, v) * g.weight(v, v2) * g.weight(v2, u);
                        }
                    }
                }
                per_node[u] = num / (k_out * (k_out - 1.0));
            }
        } else {
            let k: f64 = (0..n).map(|v| g.weight(u, v)).sum();
            if k > 1.0 {
                let mut edges_between = 0usize;
                for v in 0..n {
                    for v2 in v + 1..n {
                        if v != u
                            && v2 != u
                            && g.weight(u, v) > 0.0
                            && g.weight(u, v2) > 0.0
                            && g.weight(v, v2) > 0.0
                        {
                            edges_between += 1;
                        }
                    }
                }
                per_node[u] = 2.0 * edges_between as f64 / (k * (k - 1.0));
            }
        }
    }
    let global = if n == 0 {
        0.0
    } else {
        per_node.iter().sum::<f64>() / n as f64
    };
    (per_node, global)
}

/// Union-find over the undirected support.
fn components_union_find(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && (g.weight(u, v) > 0.0 || g.weight(v, u) > 0.0) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
    }
    (0..n).map(|u| find(&mut parent, u)).collect()
}

pub fn lcc_fraction(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let roots = components_union_find(g);
    let mut counts = std::collections::BTreeMap::new();
    for r in &roots {
        *counts.entry(*r).or_insert(0usize) += 1;
    }
    *counts.values().max().unwrap() as f64 / n as f64
}

/// Largest-component membership mask.
fn lcc_mask(g: &Graph) -> Vec<bool> {
    let roots = components_union_find(g);
    let mut counts = std::collections::BTreeMap::new();
    for r in &roots {
        *counts.entry(*r).or_insert(0usize) += 1;
    }
    let best_root = counts
        .iter()
        .max_by_key(|(root, count)| (**count, usize::MAX - **root))
        .map(|(root, _)| *root)
        .unwrap();
    roots.iter().map(|r| *r == best_root).collect()
}

/// Floyd-Warshall hop distances over directed support, averaged over finite
/// ordered pairs inside the largest weakly connected component.
pub fn aspl(g: &Graph) -> Option<f64> {
    let n = g.node_count();
    if n == 0 {
        return None;
    }
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![INF; n * n];
    for u in 0..n {
        dist[u * n + u] = 0;
        for v in 0..n {
            if u != v && g.weight(u, v) > 0.0 {
                dist[u * n + v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = dist[i * n + k] + dist[k * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                }
            }
        }
    }
    let mask = lcc_mask(g);
    let mut total = 0u64;
    let mut pairs = 0u64;
    for u in 0..n {
        for v in 0..n {
            if u != v && mask[u] && mask[v] && dist[u * n + v] < INF {
                total += dist[u * n + v];
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        None
    } else {
        Some(total as f64 / pairs as f64)
    }
}

/// Double-loop modularity, exactly as the defining sum reads.
pub fn modularity(g: &Graph, partition: &Partition) -> Option<f64> {
    let n = g.node_count();
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                total += g.weight(u, v);
            }
        }
    }
    if total <= 0.0 {
        return None;
    }
    let mut q = 0.0;
    for u in 0..n {
        for v in 0..n {
            if partition.community_of(u) != partition.community_of(v) {
                continue;
            }
            let k_out: f64 = (0..n).map(|x| g.weight(u, x)).sum();
            let k_in: f64 = (0..n).map(|x| g.weight(x, v)).sum();
            q += g.weight(u, v) - k_out * k_in / total;
        }
    }
    Some(q / total)
}

/// Double-loop homophily: observed cross-group weight over the random-mixing
/// expectation.
pub fn homophily(g: &Graph, groups: &Partition) -> Option<f64> {
    let n = g.node_count();
    if groups.community_count() < 2 {
        return None;
    }
    let mut total = 0.0;
    let mut cross = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            total += g.weight(u, v);
            if groups.community_of(u) != groups.community_of(v) {
                cross += g.weight(u, v);
            }
        }
    }
    if total <= 0.0 {
        return None;
    }
    let mut share = 0.0;
    for size in groups.sizes() {
        share += (size as f64 / n as f64) * (size as f64 / n as f64);
    }
    let expected = total * (1.0 - share);
    if expected <= 0.0 {
        return None;
    }
    Some(cross / expected)
}

/// Enumerates every set partition of `n` nodes via restricted growth
/// strings. Usable up to n = 8 or so.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut labels = vec![0usize; n];
    loop {
        out.push(Partition::from_labels(
            &labels.iter().map(|l| l + 1).collect::<Vec<_>>(),
        ));
        // Next restricted growth string.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prefix = labels[..i].iter().copied().max().unwrap();
            if labels[i] <= max_prefix {
                labels[i] += 1;
                for l in labels.iter_mut().skip(i + 1) {
                    *l = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Exhaustive modularity maximization over all partitions.
pub fn best_partition(g: &Graph) -> Option<(Partition, f64)> {
    let n = g.node_count();
    let mut best: Option<(Partition, f64)> = None;
    for p in all_partitions(n) {
        if let Some(q) = modularity(g, &p) {
            let better = match &best {
                None => true,
                Some((_, bq)) => q > *bq + 1e-12,
            };
            if better {
                best = Some((p, q));
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphClass {
    pub directed: bool,
    pub weighted: bool,
}

pub const GRAPH_CLASSES: [GraphClass; 4] = [
    GraphClass {
        directed: false,
        weighted: false,
    },
    GraphClass {
        directed: false,
        weighted: true,
    },
    GraphClass {
        directed: true,
        weighted: false,
    },
    GraphClass {
        directed: true,
        weighted: true,
    },
];

/// A random graph with 2..=8 nodes and uniform edge probability.
pub fn random_graph(rng: &mut ChaCha12Rng, class: GraphClass) -> Graph {
    let n = rng.gen_range(2..=8);
    let p: f64 = rng.gen_range(0.1..0.9);
    let mut g = if class.directed {
        Graph::directed(n)
    } else {
        Graph::undirected(n)
    };
    for u in 0..n {
        let start = if class.directed { 0 } else { u + 1 };
        for v in start..n {
            if u == v {
                continue;
            }
            if rng.gen::<f64>() < p {
                let w = if class.weighted {
                    rng.gen_range(0.05..=1.0)
                } else {
                    1.0
                };
                g.set_edge(u, v, w);
            }
        }
    }
    g
}

/// Random-but-valid round fixtures for fuzzing the reward functions.
pub mod fuzz {
    use std::collections::BTreeSet;

    use rand::Rng;
    use rand_chacha::ChaCha12Rng;

    use crate::rewards::TopicState;
    use crate::types::{Action, ActionId, ActionIndex, ActionType, RoundBatch, Tone, UserId, Vote};

    const TOPICS: [&str; 6] = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"];

    /// Two consecutive valid rounds plus the resolution index and a topic
    /// state consistent with them: every agent contributes exactly
    /// `n_actions` slots, targets resolve, votes land on same-round public
    /// content by other authors, and the topic-state invariants hold.
    pub struct RoundFixture {
        pub roster: Vec<UserId>,
        pub n_actions: u32,
        pub prev: RoundBatch,
        pub cur: RoundBatch,
        pub index: ActionIndex,
        pub topics: TopicState,
    }

    fn random_tone(rng: &mut ChaCha12Rng) -> Tone {
        match rng.gen_range(0..3) {
            0 => Tone::Supportive,
            1 => Tone::Neutral,
            _ => Tone::Critical,
        }
    }

    fn fill_batch(
        rng: &mut ChaCha12Rng,
        roster: &[UserId],
        n_actions: u32,
        round: u32,
        next_id: &mut u64,
        prev: Option<&RoundBatch>,
        index: &mut ActionIndex,
    ) -> RoundBatch {
        let mut batch = RoundBatch::new(round);
        let prev_public: Vec<ActionId> = prev
            .map(|b| b.public_actions().map(|a| a.id).collect())
            .unwrap_or_default();
        for sender in roster {
            for _ in 0..n_actions {
                let id = ActionId(*next_id);
                *next_id += 1;
                let kind = match rng.gen_range(0..10) {
                    0..=3 => ActionType::Post,
                    4..=5 => {
                        if prev_public.is_empty() {
                            ActionType::Post
                        } else {
                            ActionType::Com
                        }
                    }
                    6..=7 => {
                        if roster.len() > 1 {
                            ActionType::Dm
                        } else {
                            ActionType::Post
                        }
                    }
                    _ => ActionType::Not,
                };
                let topic = if kind == ActionType::Not {
                    None
                } else {
                    Some(TOPICS[rng.gen_range(0..TOPICS.len())].to_string())
                };
                let recipient = if kind == ActionType::Dm {
                    let others: Vec<&UserId> =
                        roster.iter().filter(|u| *u != sender).collect();
                    Some(others[rng.gen_range(0..others.len())].clone())
                } else {
                    None
                };
                let target_id = if kind == ActionType::Com {
                    Some(prev_public[rng.gen_range(0..prev_public.len())])
                } else {
                    None
                };
                let mut mentions = BTreeSet::new();
                if kind.is_public() && roster.len() > 1 && rng.gen::<f64>() < 0.3 {
                    let others: Vec<&UserId> =
                        roster.iter().filter(|u| *u != sender).collect();
                    mentions.insert(others[rng.gen_range(0..others.len())].clone());
                }
                let action = Action {
                    id,
                    round,
                    kind,
                    sender: sender.clone(),
                    recipient,
                    target_id,
                    topic,
                    mentions,
                    tone: random_tone(rng),
                    content: String::new(),
                    sentiment: rng.gen_range(-1.0..=1.0),
                };
                index.insert_action(&action);
                batch.actions.push(action);
            }
        }
        // Votes on this round's public content, never on own items.
        let public: Vec<(ActionId, UserId)> = batch
            .public_actions()
            .map(|a| (a.id, a.sender.clone()))
            .collect();
        for voter in roster {
            for (content_id, author) in &public {
                if author == voter || rng.gen::<f64>() < 0.5 {
                    continue;
                }
                batch.votes.push(Vote {
                    voter: voter.clone(),
                    content_id: *content_id,
                    value: rng.gen_range(-1..=1),
                    round,
                });
            }
        }
        batch
    }

    pub fn random_round(rng: &mut ChaCha12Rng) -> RoundFixture {
        let agents = rng.gen_range(2..=6);
        let n_actions = rng.gen_range(1..=4);
        let roster: Vec<UserId> = (0..agents)
            .map(|i| UserId::new(format!("f{i:02}")))
            .collect();
        let mut index = ActionIndex::new();
        let mut next_id = 1;
        let prev = fill_batch(rng, &roster, n_actions, 1, &mut next_id, None, &mut index);
        let cur = fill_batch(
            rng,
            &roster,
            n_actions,
            2,
            &mut next_id,
            Some(&prev),
            &mut index,
        );

        // Topic state consistent with both rounds: everything that appeared
        // is platform-known; per-user histories are random subsets.
        let mut topics = TopicState::new();
        for batch in [&prev, &cur] {
            for a in &batch.actions {
                if let Some(t) = &a.topic {
                    topics.record_platform(t);
                }
            }
        }
        for user in &roster {
            for t in TOPICS {
                if topics.platform_topics().contains(t) && rng.gen::<f64>() < 0.4 {
                    topics.record_exposure(user, t);
                }
            }
        }
        RoundFixture {
            roster,
            n_actions,
            prev,
            cur,
            index,
            topics,
        }
    }
}
