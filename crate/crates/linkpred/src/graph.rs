//! Snapshot graphs over a fixed node universe.
//!
//! A [`DualDataset`] holds two aligned snapshot sequences over the same
//! nodes: a growing friendship network and an evolving interaction
//! network. Nodes are dense `u32` indices; the original string
//! identifiers from the input files live in a side table on the dataset.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Dense node index, contiguous `0..N` after ingestion.
pub type NodeId = u32;

/// Canonical unordered node pair (smaller id first), packed into a `u64`.
///
/// Self-pairs are rejected at construction, so every `Pair` is a valid
/// potential edge key.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair(u64);

impl Pair {
    /// Canonicalizes `(a, b)`. Panics on a self-pair, which is a
    /// programming error everywhere in this crate: ingestion and the
    /// generators drop self-loops before pairs are formed.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        assert!(a != b, "self-pair ({a},{a}) is not a valid edge key");
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Pair(((lo as u64) << 32) | hi as u64)
    }

    pub fn nodes(self) -> (NodeId, NodeId) {
        ((self.0 >> 32) as NodeId, self.0 as NodeId)
    }
}

impl std::fmt::Debug for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.nodes();
        write!(f, "({a},{b})")
    }
}

/// Half-open time window `[start, end)` in seconds since the epoch.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn contains(&self, ts: i64) -> bool {
        ts >= self.start && ts < self.end
    }

    pub fn length(&self) -> i64 {
        self.end - self.start
    }
}

/// Which network a snapshot sequence describes.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum NetworkKind {
    Friendship,
    Interaction,
}

impl NetworkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Friendship => "friendship",
            NetworkKind::Interaction => "interaction",
        }
    }
}

/// One binary undirected graph observed in a single time window.
///
/// Neighbor lists are sorted, self-loops are rejected and each edge is
/// stored once under its canonical orientation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Snapshot {
    index: usize,
    window: TimeWindow,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Snapshot {
    /// Builds a snapshot from an edge iterator. Duplicate pairs collapse
    /// to one edge; a self-loop is an error.
    pub fn from_edges<I>(
        index: usize,
        window: TimeWindow,
        node_count: usize,
        edges: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adj = vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "self-loop ({a},{a}) in snapshot {index}"
                )));
            }
            for n in [a, b] {
                if n as usize >= node_count {
                    return Err(Error::OutOfRange {
                        what: "node id",
                        got: n as usize,
                        max: node_count,
                    });
                }
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        debug_assert!(edge_count % 2 == 0);
        Ok(Snapshot {
            index,
            window,
            adj,
            edge_count: edge_count / 2,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn contains_edge(&self, a: NodeId, b: NodeId) -> bool {
        if a == b || a as usize >= self.adj.len() || b as usize >= self.adj.len() {
            return false;
        }
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn contains_pair(&self, p: Pair) -> bool {
        let (a, b) = p.nodes();
        self.contains_edge(a, b)
    }

    /// Canonical edges in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeId;
            list.iter()
                .skip_while(move |&&v| v < u)
                .map(move |&v| Pair::new(u, v))
        })
    }

    pub fn edge_set(&self) -> HashSet<Pair> {
        self.edges().collect()
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Snapshot) -> bool {
        self.edges().all(|p| other.contains_pair(p))
    }
}

/// Ordered list of snapshots with consecutive equal-length windows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SnapshotSequence {
    kind: NetworkKind,
    node_count: usize,
    snapshots: Vec<Snapshot>,
}

impl SnapshotSequence {
    /// Validates window alignment and, for friendship sequences, the
    /// monotone-growth invariant `edges(t) ⊆ edges(t+1)`.
    pub fn new(kind: NetworkKind, node_count: usize, snapshots: Vec<Snapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidParameter(
                "a snapshot sequence needs at least one snapshot".into(),
            ));
        }
        let interval = snapshots[0].window().length();
        if interval <= 0 {
            return Err(Error::InvalidParameter(
                "snapshot window must have positive length".into(),
            ));
        }
        for (i, s) in snapshots.iter().enumerate() {
            if s.node_count() != node_count {
                return Err(Error::InvalidParameter(format!(
                    "snapshot {i} has node count {} but the sequence declares {node_count}",
                    s.node_count()
                )));
            }
            if s.index() != i {
                return Err(Error::InvalidParameter(format!(
                    "snapshot at position {i} carries index {}",
                    s.index()
                )));
            }
            if s.window().length() != interval {
                return Err(Error::InvalidParameter(format!(
                    "snapshot {i} window length {} differs from interval {interval}",
                    s.window().length()
                )));
            }
            if i > 0 && snapshots[i - 1].window().end != s.window().start {
                return Err(Error::InvalidParameter(format!(
                    "snapshot {i} window is not consecutive with snapshot {}",
                    i - 1
                )));
            }
        }
        if kind == NetworkKind::Friendship {
            for w in snapshots.windows(2) {
                if !w[0].is_subgraph_of(&w[1]) {
                    return Err(Error::InvalidParameter(format!(
                        "friendship snapshot {} is not a subgraph of snapshot {}",
                        w[0].index(),
                        w[1].index()
                    )));
                }
            }
        }
        Ok(SnapshotSequence {
            kind,
            node_count,
            snapshots,
        })
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, t: usize) -> Result<&Snapshot> {
        self.snapshots.get(t).ok_or(Error::OutOfRange {
            what: "snapshot index",
            got: t,
            max: self.snapshots.len(),
        })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Union of all snapshots' edges.
    pub fn aggregate_edges(&self) -> HashSet<Pair> {
        let mut all = HashSet::new();
        for s in &self.snapshots {
            all.extend(s.edges());
        }
        all
    }
}

/// Aligned friendship and interaction sequences plus the id ↔ original
/// identifier side table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualDataset {
    friendships: SnapshotSequence,
    interactions: SnapshotSequence,
    node_names: Vec<String>,
}

impl DualDataset {
    pub fn new(
        friendships: SnapshotSequence,
        interactions: SnapshotSequence,
        node_names: Vec<String>,
    ) -> Result<Self> {
        if friendships.kind() != NetworkKind::Friendship
            || interactions.kind() != NetworkKind::Interaction
        {
            return Err(Error::InvalidParameter(
                "dataset sequences must be (friendship, interaction)".into(),
            ));
        }
        if friendships.node_count() != interactions.node_count() {
            return Err(Error::InvalidParameter(format!(
                "node counts differ: friendships {} vs interactions {}",
                friendships.node_count(),
                interactions.node_count()
            )));
        }
        if friendships.len() != interactions.len() {
            return Err(Error::InvalidParameter(format!(
                "snapshot counts differ: friendships {} vs interactions {}",
                friendships.len(),
                interactions.len()
            )));
        }
        for (f, i) in friendships.snapshots().iter().zip(interactions.snapshots()) {
            if f.window() != i.window() {
                return Err(Error::InvalidParameter(format!(
                    "windows differ at snapshot {}",
                    f.index()
                )));
            }
        }
        if node_names.len() != friendships.node_count() {
            return Err(Error::InvalidParameter(format!(
                "side table has {} names for {} nodes",
                node_names.len(),
                friendships.node_count()
            )));
        }
        let mut seen = HashSet::with_capacity(node_names.len());
        for name in &node_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::NodeCollision(name.clone()));
            }
        }
        Ok(DualDataset {
            friendships,
            interactions,
            node_names,
        })
    }

    pub fn friendships(&self) -> &SnapshotSequence {
        &self.friendships
    }

    pub fn interactions(&self) -> &SnapshotSequence {
        &self.interactions
    }

    pub fn node_count(&self) -> usize {
        self.friendships.node_count()
    }

    pub fn snapshot_count(&self) -> usize {
        self.friendships.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node_names[id as usize]
    }

    /// Fraction of friend pairs at `t` that have an interaction edge at
    /// `t + 1`. Returns 0 when there are no friend pairs at `t`.
    pub fn fraction_friends_interacting(&self, t: usize) -> Result<f64> {
        self.check_transition(t)?;
        let friends = self.friendships.snapshot(t)?;
        let next = self.interactions.snapshot(t + 1)?;
        let total = friends.edge_count();
        if total == 0 {
            return Ok(0.0);
        }
        let hits = friends.edges().filter(|&p| next.contains_pair(p)).count();
        Ok(hits as f64 / total as f64)
    }

    /// Fraction of interaction edges at `t + 1` whose endpoints are
    /// friends at `t`. Returns 0 when there are no interactions at `t + 1`.
    pub fn fraction_interactions_between_friends(&self, t: usize) -> Result<f64> {
        self.check_transition(t)?;
        let friends = self.friendships.snapshot(t)?;
        let next = self.interactions.snapshot(t + 1)?;
        let total = next.edge_count();
        if total == 0 {
            return Ok(0.0);
        }
        let hits = next.edges().filter(|&p| friends.contains_pair(p)).count();
        Ok(hits as f64 / total as f64)
    }

    fn check_transition(&self, t: usize) -> Result<()> {
        let last = self.snapshot_count().saturating_sub(1);
        if t >= last {
            return Err(Error::OutOfRange {
                what: "transition index",
                got: t,
                max: last,
            });
        }
        Ok(())
    }
}

/// Keep only nodes whose degree in the union of all friendship snapshots
/// is at least `threshold`, re-indexing the survivors densely and
/// dropping every edge incident to a removed node in both sequences.
///
/// Signals an error instead of returning an empty universe.
pub fn filter_by_aggregate_degree(ds: &DualDataset, threshold: usize) -> Result<DualDataset> {
    let n = ds.node_count();
    let mut degree = vec![0usize; n];
    for p in ds.friendships().aggregate_edges() {
        let (a, b) = p.nodes();
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }

    let mut remap: Vec<Option<NodeId>> = vec![None; n];
    let mut names = Vec::new();
    for v in 0..n {
        if degree[v] >= threshold {
            remap[v] = Some(names.len() as NodeId);
            names.push(ds.node_name(v as NodeId).to_string());
        }
    }
    if names.is_empty() {
        return Err(Error::EmptyFilterResult { threshold });
    }

    let kept = names.len();
    let rebuild = |seq: &SnapshotSequence| -> Result<SnapshotSequence> {
        let snapshots = seq
            .snapshots()
            .iter()
            .map(|s| {
                let edges = s.edges().filter_map(|p| {
                    let (a, b) = p.nodes();
                    match (remap[a as usize], remap[b as usize]) {
                        (Some(a2), Some(b2)) => Some((a2, b2)),
                        _ => None,
                    }
                });
                Snapshot::from_edges(s.index(), s.window(), kept, edges)
            })
            .collect::<Result<Vec<_>>>()?;
        SnapshotSequence::new(seq.kind(), kept, snapshots)
    };

    DualDataset::new(
        rebuild(ds.friendships())?,
        rebuild(ds.interactions())?,
        names,
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn window(t: usize) -> TimeWindow {
        TimeWindow {
            start: t as i64 * 100,
            end: (t as i64 + 1) * 100,
        }
    }

    pub(crate) fn seq(
        kind: NetworkKind,
        n: usize,
        per_snapshot: &[Vec<(NodeId, NodeId)>],
    ) -> SnapshotSequence {
        let snaps = per_snapshot
            .iter()
            .enumerate()
            .map(|(t, edges)| Snapshot::from_edges(t, window(t), n, edges.iter().copied()).unwrap())
            .collect();
        SnapshotSequence::new(kind, n, snaps).unwrap()
    }

    pub(crate) fn dataset(
        n: usize,
        friends: &[Vec<(NodeId, NodeId)>],
        inter: &[Vec<(NodeId, NodeId)>],
    ) -> DualDataset {
        let names = (0..n).map(|i| format!("n{i}")).collect();
        DualDataset::new(
            seq(NetworkKind::Friendship, n, friends),
            seq(NetworkKind::Interaction, n, inter),
            names,
        )
        .unwrap()
    }

    #[test]
    fn pair_is_canonical() {
        assert_eq!(Pair::new(3, 1), Pair::new(1, 3));
        assert_eq!(Pair::new(1, 3).nodes(), (1, 3));
    }

    #[test]
    #[should_panic]
    fn pair_rejects_self() {
        let _ = Pair::new(2, 2);
    }

    #[test]
    fn snapshot_dedups_and_sorts() {
        let s = Snapshot::from_edges(0, window(0), 4, vec![(2, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(s.edge_count(), 2);
        assert!(s.contains_edge(1, 2));
        assert!(s.contains_edge(2, 1));
        assert!(!s.contains_edge(0, 1));
        assert_eq!(s.neighbors(1), &[2]);
        let edges: Vec<_> = s.edges().collect();
        assert_eq!(edges, vec![Pair::new(0, 3), Pair::new(1, 2)]);
    }

    #[test]
    fn snapshot_rejects_self_loop() {
        assert!(Snapshot::from_edges(0, window(0), 3, vec![(1, 1)]).is_err());
    }

    #[test]
    fn friendship_sequence_must_be_monotone() {
        let snaps = vec![
            Snapshot::from_edges(0, window(0), 3, vec![(0, 1)]).unwrap(),
            Snapshot::from_edges(1, window(1), 3, vec![(1, 2)]).unwrap(),
        ];
        assert!(SnapshotSequence::new(NetworkKind::Friendship, 3, snaps.clone()).is_err());
        assert!(SnapshotSequence::new(NetworkKind::Interaction, 3, snaps).is_ok());
    }

    #[test]
    fn windows_must_be_consecutive() {
        let snaps = vec![
            Snapshot::from_edges(0, window(0), 2, vec![]).unwrap(),
            Snapshot::from_edges(1, window(2), 2, vec![]).unwrap(),
        ];
        assert!(SnapshotSequence::new(NetworkKind::Interaction, 2, snaps).is_err());
    }

    #[test]
    fn fraction_friends_interacting_examples() {
        // friendships {(a,b)}, interactions at t+1 {(a,b)} -> 1.0
        let ds = dataset(4, &[vec![(0, 1)], vec![(0, 1)]], &[vec![], vec![(0, 1)]]);
        assert_eq!(ds.fraction_friends_interacting(0).unwrap(), 1.0);

        // friendships {(a,b),(c,d)}, interactions at t+1 {(a,b)} -> 0.5
        let ds = dataset(
            4,
            &[vec![(0, 1), (2, 3)], vec![(0, 1), (2, 3)]],
            &[vec![], vec![(0, 1)]],
        );
        assert_eq!(ds.fraction_friends_interacting(0).unwrap(), 0.5);

        // empty denominator -> 0
        let ds = dataset(4, &[vec![], vec![]], &[vec![], vec![(0, 1)]]);
        assert_eq!(ds.fraction_friends_interacting(0).unwrap(), 0.0);
    }

    #[test]
    fn fraction_interactions_between_friends_examples() {
        let ds = dataset(4, &[vec![(0, 1)], vec![(0, 1)]], &[vec![], vec![(0, 1)]]);
        assert_eq!(ds.fraction_interactions_between_friends(0).unwrap(), 1.0);

        let ds = dataset(
            4,
            &[vec![(0, 1)], vec![(0, 1)]],
            &[vec![], vec![(0, 1), (2, 3)]],
        );
        assert_eq!(ds.fraction_interactions_between_friends(0).unwrap(), 0.5);

        let ds = dataset(4, &[vec![(0, 1)], vec![(0, 1)]], &[vec![], vec![]]);
        assert_eq!(ds.fraction_interactions_between_friends(0).unwrap(), 0.0);
    }

    #[test]
    fn fraction_rejects_last_snapshot() {
        let ds = dataset(2, &[vec![], vec![]], &[vec![], vec![]]);
        assert!(ds.fraction_friends_interacting(1).is_err());
        assert!(ds.fraction_friends_interacting(0).is_ok());
    }

    #[test]
    fn fractions_invariant_under_relabeling() {
        let ds = dataset(
            5,
            &[vec![(0, 1), (2, 3)], vec![(0, 1), (2, 3), (1, 4)]],
            &[vec![(0, 2)], vec![(0, 1), (2, 4)]],
        );
        // reverse all node ids
        let flip = |edges: &[(NodeId, NodeId)]| -> Vec<(NodeId, NodeId)> {
            edges.iter().map(|&(a, b)| (4 - a, 4 - b)).collect()
        };
        let relabeled = dataset(
            5,
            &[flip(&[(0, 1), (2, 3)]), flip(&[(0, 1), (2, 3), (1, 4)])],
            &[flip(&[(0, 2)]), flip(&[(0, 1), (2, 4)])],
        );
        assert_eq!(
            ds.fraction_friends_interacting(0).unwrap(),
            relabeled.fraction_friends_interacting(0).unwrap()
        );
        assert_eq!(
            ds.fraction_interactions_between_friends(0).unwrap(),
            relabeled.fraction_interactions_between_friends(0).unwrap()
        );
    }

    #[test]
    fn filter_threshold_zero_is_identity() {
        let ds = dataset(
            4,
            &[vec![(0, 1)], vec![(0, 1), (2, 3)]],
            &[vec![(1, 2)], vec![]],
        );
        let filtered = filter_by_aggregate_degree(&ds, 0).unwrap();
        assert_eq!(filtered, ds);
    }

    #[test]
    fn filter_star_keeps_only_center() {
        // center 0 with 5 leaves; threshold 2 keeps only the center and no edges
        let star: Vec<(NodeId, NodeId)> = (1..=5).map(|v| (0, v)).collect();
        let ds = dataset(6, &[star.clone()], &[vec![]]);
        let filtered = filter_by_aggregate_degree(&ds, 2).unwrap();
        assert_eq!(filtered.node_count(), 1);
        assert_eq!(filtered.node_name(0), "n0");
        assert_eq!(filtered.friendships().snapshot(0).unwrap().edge_count(), 0);
    }

    #[test]
    fn filter_empty_result_is_signaled() {
        let ds = dataset(3, &[vec![(0, 1)]], &[vec![]]);
        assert!(matches!(
            filter_by_aggregate_degree(&ds, 10),
            Err(Error::EmptyFilterResult { threshold: 10 })
        ));
    }

    #[test]
    fn filter_drops_interaction_edges_of_removed_nodes() {
        // node 3 has friendship degree 0 and only interacts; threshold 1 removes it
        let ds = dataset(4, &[vec![(0, 1), (1, 2)]], &[vec![(0, 3), (0, 1)]]);
        let filtered = filter_by_aggregate_degree(&ds, 1).unwrap();
        assert_eq!(filtered.node_count(), 3);
        let inter = filtered.interactions().snapshot(0).unwrap();
        assert_eq!(inter.edge_count(), 1);
        assert!(inter.contains_edge(0, 1));
    }

    #[test]
    fn filter_applies_again_when_degrees_survive() {
        // triangle: all degrees 2, threshold 2 keeps everything, so a second
        // application is a no-op
        let ds = dataset(3, &[vec![(0, 1), (1, 2), (0, 2)]], &[vec![]]);
        let once = filter_by_aggregate_degree(&ds, 2).unwrap();
        let twice = filter_by_aggregate_degree(&once, 2).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once, ds);
    }
}
