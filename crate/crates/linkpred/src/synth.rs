//! Synthetic coupled friendship/interaction generator for self-contained
//! experiments. Friendships grow monotonically; interactions at snapshot
//! `tau` are drawn pairwise-independently with probability `q_friend`
//! for pairs that are friends at the previous snapshot (at `tau` itself
//! for the first snapshot), `q_nonfriend` otherwise, plus a persistence
//! boost for pairs that interacted at `tau - 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{
    DualDataset, NetworkKind, NodeId, Pair, Snapshot, SnapshotSequence, TimeWindow,
};

const SYNTH_INTERVAL_SECS: i64 = 90 * 86_400;

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub nodes: usize,
    pub snapshots: usize,
    /// New friendship edges added per snapshot (snapshot 0 included).
    pub friendship_growth: usize,
    /// Interaction probability for a current friend pair.
    pub q_friend: f64,
    /// Interaction probability for a non-friend pair.
    pub q_nonfriend: f64,
    /// Added to the base probability when the pair interacted in the
    /// previous snapshot (clamped to 1).
    pub persistence_boost: f64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::SyntheticInfeasible("need at least 2 nodes".into()));
        }
        if self.snapshots == 0 {
            return Err(Error::SyntheticInfeasible(
                "need at least 1 snapshot".into(),
            ));
        }
        for (name, p) in [
            ("q_friend", self.q_friend),
            ("q_nonfriend", self.q_nonfriend),
            ("persistence_boost", self.persistence_boost),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::SyntheticInfeasible(format!(
                    "{name} must lie in [0,1], got {p}"
                )));
            }
        }
        if self.q_friend < self.q_nonfriend {
            return Err(Error::SyntheticInfeasible(
                "q_friend must be at least q_nonfriend".into(),
            ));
        }
        let total_pairs = self.nodes as u64 * (self.nodes as u64 - 1) / 2;
        let demanded = self.friendship_growth as u64 * self.snapshots as u64;
        if demanded > total_pairs {
            return Err(Error::SyntheticInfeasible(format!(
                "growth rate {} over {} snapshots exceeds the {total_pairs} available pairs",
                self.friendship_growth, self.snapshots
            )));
        }
        Ok(())
    }
}

/// Deterministic in `seed`: the same spec and seed always produce the
/// same dataset.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<DualDataset> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = spec.nodes;
    let window = |t: usize| TimeWindow {
        start: t as i64 * SYNTH_INTERVAL_SECS,
        end: (t as i64 + 1) * SYNTH_INTERVAL_SECS,
    };

    let mut friend_edges: HashSet<Pair> = HashSet::new();
    let mut friend_snaps = Vec::with_capacity(spec.snapshots);
    for t in 0..spec.snapshots {
        for _ in 0..spec.friendship_growth {
            loop {
                let a = rng.gen_range(0..n as NodeId);
                let b = rng.gen_range(0..n as NodeId);
                if a != b && friend_edges.insert(Pair::new(a, b)) {
                    break;
                }
            }
        }
        friend_snaps.push(Snapshot::from_edges(
            t,
            window(t),
            n,
            friend_edges.iter().map(|p| p.nodes()),
        )?);
    }

    let mut inter_snaps: Vec<Snapshot> = Vec::with_capacity(spec.snapshots);
    for t in 0..spec.snapshots {
        let friend_ref = &friend_snaps[t.saturating_sub(1)];
        let prev_inter = if t > 0 {
            Some(&inter_snaps[t - 1])
        } else {
            None
        };
        let mut edges = Vec::new();
        for a in 0..n as NodeId {
            for b in (a + 1)..n as NodeId {
                let mut p = if friend_ref.contains_edge(a, b) {
                    spec.q_friend
                } else {
                    spec.q_nonfriend
                };
                if let Some(prev) = prev_inter {
                    if prev.contains_edge(a, b) {
                        p = (p + spec.persistence_boost).min(1.0);
                    }
                }
                if p > 0.0 && rng.gen::<f64>() < p {
                    edges.push((a, b));
                }
            }
        }
        inter_snaps.push(Snapshot::from_edges(t, window(t), n, edges)?);
    }

    DualDataset::new(
        SnapshotSequence::new(NetworkKind::Friendship, n, friend_snaps)?,
        SnapshotSequence::new(NetworkKind::Interaction, n, inter_snaps)?,
        (0..n).map(|i| format!("n{i}")).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec() -> SyntheticSpec {
        SyntheticSpec {
            nodes: 40,
            snapshots: 5,
            friendship_growth: 30,
            q_friend: 0.5,
            q_nonfriend: 0.01,
            persistence_boost: 0.2,
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = base_spec();
        let a = generate_synthetic(&spec, 11).unwrap();
        let b = generate_synthetic(&spec, 11).unwrap();
        let c = generate_synthetic(&spec, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn friendships_grow_by_rate() {
        let spec = base_spec();
        let ds = generate_synthetic(&spec, 3).unwrap();
        for t in 0..spec.snapshots {
            let count = ds.friendships().snapshot(t).unwrap().edge_count();
            assert_eq!(count, spec.friendship_growth * (t + 1));
        }
    }

    #[test]
    fn q_nonfriend_zero_means_all_interactions_among_friends() {
        let spec = SyntheticSpec {
            q_nonfriend: 0.0,
            ..base_spec()
        };
        let ds = generate_synthetic(&spec, 7).unwrap();
        for t in 0..spec.snapshots - 1 {
            // interactions exist (q_friend is high), and all are between friends
            let frac = ds.fraction_interactions_between_friends(t).unwrap();
            let count = ds.interactions().snapshot(t + 1).unwrap().edge_count();
            assert!(count > 0, "expected interactions at t+1={}", t + 1);
            assert_eq!(frac, 1.0, "t = {t}");
        }
    }

    #[test]
    fn growth_zero_means_static_empty_friendships() {
        let spec = SyntheticSpec {
            friendship_growth: 0,
            q_nonfriend: 0.05,
            q_friend: 0.5,
            ..base_spec()
        };
        let ds = generate_synthetic(&spec, 1).unwrap();
        for t in 0..spec.snapshots {
            assert_eq!(ds.friendships().snapshot(t).unwrap().edge_count(), 0);
        }
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        assert!(generate_synthetic(
            &SyntheticSpec {
                nodes: 4,
                friendship_growth: 10,
                snapshots: 3,
                ..base_spec()
            },
            0
        )
        .is_err());
        assert!(generate_synthetic(
            &SyntheticSpec {
                q_friend: 1.5,
                ..base_spec()
            },
            0
        )
        .is_err());
        assert!(generate_synthetic(
            &SyntheticSpec {
                q_friend: 0.01,
                q_nonfriend: 0.5,
                ..base_spec()
            },
            0
        )
        .is_err());
        assert!(generate_synthetic(
            &SyntheticSpec {
                nodes: 1,
                ..base_spec()
            },
            0
        )
        .is_err());
    }

    #[test]
    fn persistence_boost_raises_repeat_rate() {
        // with boost 1.0 every interacting pair must re-interact
        let spec = SyntheticSpec {
            nodes: 30,
            snapshots: 4,
            friendship_growth: 20,
            q_friend: 0.4,
            q_nonfriend: 0.02,
            persistence_boost: 1.0,
        };
        let ds = generate_synthetic(&spec, 5).unwrap();
        for t in 0..spec.snapshots - 1 {
            let cur = ds.interactions().snapshot(t).unwrap();
            let next = ds.interactions().snapshot(t + 1).unwrap();
            for p in cur.edges() {
                assert!(next.contains_pair(p), "pair {p:?} dropped at t+1={}", t + 1);
            }
        }
    }
}
