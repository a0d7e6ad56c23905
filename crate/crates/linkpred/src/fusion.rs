//! Convex-combination fusion of interaction score maps with friendship
//! information, and the grid search over the combination weight.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{evaluate_transition, MetricRow, PoolAccumulator};
use crate::graph::{Snapshot, SnapshotSequence};
use crate::scores::ScoreMap;

/// Friendship link predictor used to fill in predicted friendships.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FriendPredictor {
    Aa,
    Katz,
}

/// How friendship information enters the interaction prediction.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum FusionMode {
    None,
    CurrentFriends,
    PredictedFriends(FriendPredictor),
}

impl FusionMode {
    pub fn label(&self) -> &'static str {
        match self {
            FusionMode::None => "none",
            FusionMode::CurrentFriends => "current",
            FusionMode::PredictedFriends(FriendPredictor::Aa) => "predicted_aa",
            FusionMode::PredictedFriends(FriendPredictor::Katz) => "predicted_katz",
        }
    }
}

/// Fusion weight on the friendship side; `1 - alpha` goes to the
/// interaction scores.
#[derive(Copy, Clone, Debug)]
pub struct FusionConfig {
    pub mode: FusionMode,
    pub alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0,1], got {alpha}"
        )));
    }
    Ok(())
}

/// The friendship side of a fusion: either the binary current-friendship
/// snapshot or an augmented real-valued matrix.
#[derive(Copy, Clone)]
pub enum FriendSide<'a> {
    Current(&'a Snapshot),
    Augmented(&'a ScoreMap),
}

impl FriendSide<'_> {
    fn node_count(&self) -> usize {
        match self {
            FriendSide::Current(s) => s.node_count(),
            FriendSide::Augmented(m) => m.node_count(),
        }
    }
}

fn fuse_with(scores: &ScoreMap, friends: FriendSide, alpha: f64) -> Result<ScoreMap> {
    check_alpha(alpha)?;
    if scores.node_count() != friends.node_count() {
        return Err(Error::InvalidParameter(format!(
            "fusion universes differ: scores {} vs friendships {}",
            scores.node_count(),
            friends.node_count()
        )));
    }
    let mut out = ScoreMap::with_capacity(scores.node_count(), scores.len());
    for (p, s) in scores.iter() {
        let f = match friends {
            FriendSide::Current(snap) => {
                if snap.contains_pair(p) {
                    1.0
                } else {
                    0.0
                }
            }
            FriendSide::Augmented(m) => m.get(p),
        };
        out.set(p, (1.0 - alpha) * s + alpha * f);
    }
    match friends {
        FriendSide::Current(snap) => {
            for p in snap.edges() {
                if !scores.contains(p) {
                    out.set(p, (1.0 - alpha) * 0.0 + alpha * 1.0);
                }
            }
        }
        FriendSide::Augmented(m) => {
            for (p, f) in m.iter() {
                if !scores.contains(p) {
                    out.set(p, (1.0 - alpha) * 0.0 + alpha * f);
                }
            }
        }
    }
    Ok(out)
}

/// `out(a,b) = (1-alpha) * scores(a,b) + alpha * F(a,b)` where `F` is the
/// binary friendship indicator at the prediction time.
pub fn fuse_current(scores: &ScoreMap, friends: &Snapshot, alpha: f64) -> Result<ScoreMap> {
    fuse_with(scores, FriendSide::Current(friends), alpha)
}

/// Augmented friendship matrix: friendship edges keep the value 1;
/// everywhere else the zeros are replaced by the normalized predicted
/// friendship scores.
pub fn build_augmented_friendship(friends: &Snapshot, predicted: &ScoreMap) -> Result<ScoreMap> {
    if predicted.node_count() != friends.node_count() {
        return Err(Error::InvalidParameter(format!(
            "augmentation universes differ: predictions {} vs friendships {}",
            predicted.node_count(),
            friends.node_count()
        )));
    }
    for (p, v) in predicted.iter() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "predicted friendship score for {p:?} is {v}; normalize to [0,1] first"
            )));
        }
    }
    let mut out =
        ScoreMap::with_capacity(friends.node_count(), predicted.len() + friends.edge_count());
    for (p, v) in predicted.iter() {
        if !friends.contains_pair(p) {
            out.set(p, v);
        }
    }
    for p in friends.edges() {
        out.set(p, 1.0);
    }
    Ok(out)
}

/// Convex combination against an augmented friendship matrix.
pub fn fuse_predicted(scores: &ScoreMap, augmented: &ScoreMap, alpha: f64) -> Result<ScoreMap> {
    fuse_with(scores, FriendSide::Augmented(augmented), alpha)
}

/// How metrics are combined across prediction steps.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    /// Mean of the per-transition metrics.
    Mean,
    /// Pool every transition's candidates, then compute metrics once.
    Pooled,
}

/// One transition to fuse and evaluate: `scores` predicts interactions
/// at `t + 1`, `friends` is the friendship side at time `t`.
pub struct TransitionInput<'a> {
    pub t: usize,
    pub scores: &'a ScoreMap,
    pub friends: FriendSide<'a>,
}

/// Per-alpha evaluation detail retained by the grid search.
#[derive(Clone, Debug)]
pub struct AlphaOutcome {
    pub alpha: f64,
    /// Per-transition metrics, in ascending `t`.
    pub rows: Vec<MetricRow>,
    /// Present when the aggregate is [`Aggregate::Pooled`].
    pub pooled: Option<MetricRow>,
    /// The selection statistic: mean GMAUC over transitions, or the
    /// pooled GMAUC.
    pub aggregate_gmauc: f64,
}

#[derive(Clone, Debug)]
pub struct GridSearchOutcome {
    pub best_alpha: f64,
    pub per_alpha: Vec<AlphaOutcome>,
}

/// Evaluates every alpha in `grid` across all transitions and returns
/// the alpha with the highest aggregate GMAUC, ties broken toward the
/// smaller alpha.
pub fn grid_search_alpha(
    transitions: &[TransitionInput],
    interactions: &SnapshotSequence,
    grid: &[f64],
    aggregate: Aggregate,
) -> Result<GridSearchOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid is empty".into()));
    }
    for &alpha in grid {
        check_alpha(alpha)?;
    }
    if transitions.is_empty() {
        return Err(Error::InvalidParameter("no transitions to evaluate".into()));
    }

    let per_alpha: Vec<AlphaOutcome> = grid
        .par_iter()
        .map(|&alpha| evaluate_alpha(alpha, transitions, interactions, aggregate))
        .collect::<Result<Vec<_>>>()?;

    let mut best = &per_alpha[0];
    for outcome in &per_alpha[1..] {
        let better = outcome.aggregate_gmauc > best.aggregate_gmauc
            || (outcome.aggregate_gmauc == best.aggregate_gmauc && outcome.alpha < best.alpha);
        if better {
            best = outcome;
        }
    }
    Ok(GridSearchOutcome {
        best_alpha: best.alpha,
        per_alpha,
    })
}

fn evaluate_alpha(
    alpha: f64,
    transitions: &[TransitionInput],
    interactions: &SnapshotSequence,
    aggregate: Aggregate,
) -> Result<AlphaOutcome> {
    let mut rows = Vec::with_capacity(transitions.len());
    let mut pool = PoolAccumulator::new();
    for tr in transitions {
        let fused = fuse_with(tr.scores, tr.friends, alpha).map_err(|e| e.at(alpha, tr.t))?;
        let row = evaluate_transition(&fused, interactions, tr.t).map_err(|e| e.at(alpha, tr.t))?;
        if aggregate == Aggregate::Pooled {
            pool.add_transition(&fused, interactions, tr.t)
                .map_err(|e| e.at(alpha, tr.t))?;
        }
        rows.push(row);
    }
    let (pooled, aggregate_gmauc) = match aggregate {
        Aggregate::Mean => {
            let mean = rows.iter().map(|r| r.gmauc).sum::<f64>() / rows.len() as f64;
            (None, mean)
        }
        Aggregate::Pooled => {
            let row = pool
                .finish(None)
                .map_err(|e| e.at(alpha, transitions[0].t))?;
            let g = row.gmauc;
            (Some(row), g)
        }
    };
    Ok(AlphaOutcome {
        alpha,
        rows,
        pooled,
        aggregate_gmauc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::seq;
    use crate::graph::{NetworkKind, NodeId, Pair, TimeWindow};
    use proptest::prelude::*;

    fn snap(n: usize, edges: &[(NodeId, NodeId)]) -> Snapshot {
        Snapshot::from_edges(0, TimeWindow { start: 0, end: 1 }, n, edges.iter().copied()).unwrap()
    }

    fn map(n: usize, entries: &[((NodeId, NodeId), f64)]) -> ScoreMap {
        let mut m = ScoreMap::new(n);
        for &((a, b), v) in entries {
            m.set(Pair::new(a, b), v);
        }
        m
    }

    #[test]
    fn alpha_zero_is_identity() {
        let friends = snap(4, &[(0, 1), (2, 3)]);
        let scores = map(4, &[((0, 1), 0.5), ((1, 2), 0.25)]);
        let fused = fuse_current(&scores, &friends, 0.0).unwrap();
        assert_eq!(fused, scores);
    }

    #[test]
    fn friend_pair_arithmetic() {
        // alpha 0.1, interaction score 0.5, friend pair: 0.9*0.5 + 0.1
        let friends = snap(3, &[(0, 1)]);
        let scores = map(3, &[((0, 1), 0.5)]);
        let fused = fuse_current(&scores, &friends, 0.1).unwrap();
        assert!((fused.get(Pair::new(0, 1)) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_is_friendship_matrix() {
        let friends = snap(4, &[(0, 1)]);
        let scores = map(4, &[((1, 2), 0.7)]);
        let fused = fuse_current(&scores, &friends, 1.0).unwrap();
        assert_eq!(fused.get(Pair::new(0, 1)), 1.0);
        assert_eq!(fused.get(Pair::new(1, 2)), 0.0);
        let mut friendship_matrix = ScoreMap::new(4);
        friendship_matrix.set(Pair::new(0, 1), 1.0);
        assert_eq!(fused, friendship_matrix);
    }

    #[test]
    fn augmented_keeps_edges_at_one_and_fills_zeros() {
        let friends = snap(4, &[(0, 1)]);
        let predicted = map(4, &[((0, 1), 0.8), ((1, 2), 0.3)]);
        let aug = build_augmented_friendship(&friends, &predicted).unwrap();
        assert_eq!(aug.get(Pair::new(0, 1)), 1.0); // edge stays 1 regardless
        assert_eq!(aug.get(Pair::new(1, 2)), 0.3); // zero replaced
        assert_eq!(aug.get(Pair::new(2, 3)), 0.0); // unscored stays 0
    }

    #[test]
    fn augmented_rejects_unnormalized_predictions() {
        let friends = snap(3, &[(0, 1)]);
        let predicted = map(3, &[((1, 2), 1.5)]);
        assert!(build_augmented_friendship(&friends, &predicted).is_err());
    }

    #[test]
    fn fuse_predicted_alpha_one_equals_augmented() {
        let friends = snap(4, &[(0, 1)]);
        let predicted = map(4, &[((1, 2), 0.3)]);
        let aug = build_augmented_friendship(&friends, &predicted).unwrap();
        let scores = map(4, &[((2, 3), 0.9)]);
        let fused = fuse_predicted(&scores, &aug, 1.0).unwrap();
        assert_eq!(fused, aug);
    }

    #[test]
    fn fuse_predicted_with_zero_predictions_equals_fuse_current() {
        let friends = snap(5, &[(0, 1), (2, 3)]);
        let scores = map(5, &[((0, 1), 0.5), ((1, 2), 0.25), ((3, 4), 0.125)]);
        let aug = build_augmented_friendship(&friends, &ScoreMap::new(5)).unwrap();
        for alpha in [0.0, 0.1, 0.3, 0.7, 1.0] {
            let a = fuse_current(&scores, &friends, alpha).unwrap();
            let b = fuse_predicted(&scores, &aug, alpha).unwrap();
            assert_eq!(a, b, "alpha {alpha}");
        }
    }

    #[test]
    fn rejects_alpha_outside_unit_interval() {
        let friends = snap(2, &[(0, 1)]);
        let scores = ScoreMap::new(2);
        assert!(fuse_current(&scores, &friends, -0.1).is_err());
        assert!(fuse_current(&scores, &friends, 1.1).is_err());
    }

    #[test]
    fn rejects_mismatched_universes() {
        let friends = snap(3, &[(0, 1)]);
        let scores = ScoreMap::new(5);
        assert!(fuse_current(&scores, &friends, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn bounds_are_preserved(
            alpha in 0.0f64..=1.0,
            values in proptest::collection::vec((0u8..20, 0.0f64..=1.0), 0..30),
        ) {
            let n = 25usize;
            let mut scores = ScoreMap::new(n);
            for (i, &(off, v)) in values.iter().enumerate() {
                let a = (i % (n - 1)) as NodeId;
                let b = a + 1 + off as NodeId % (n as NodeId - 1 - a);
                scores.set(Pair::new(a, b), v);
            }
            let friends = snap(n, &[(0, 1), (3, 7), (10, 20)]);
            let fused = fuse_current(&scores, &friends, alpha).unwrap();
            for (_, v) in fused.iter() {
                prop_assert!((0.0..=1.0).contains(&v), "value {v} escapes [0,1]");
            }
        }

        #[test]
        fn friend_pairs_gain_exactly_alpha_times_headroom(
            alpha in 0.01f64..=0.99,
            s in 0.0f64..=1.0,
        ) {
            let friends = snap(3, &[(0, 1)]);
            let scores = map(3, &[((0, 1), s)]);
            let fused = fuse_current(&scores, &friends, alpha).unwrap();
            let base = fuse_current(&scores, &friends, 0.0).unwrap();
            let gain = fused.get(Pair::new(0, 1)) - base.get(Pair::new(0, 1));
            prop_assert!((gain - alpha * (1.0 - s)).abs() <= 1e-15);
            if s < 1.0 {
                prop_assert!(gain > 0.0);
            }
        }
    }

    #[test]
    fn friend_pair_never_ranks_below_equal_scored_nonfriend() {
        let friends = snap(4, &[(0, 1)]);
        for s in [0.0, 0.2, 0.5, 1.0] {
            let scores = map(4, &[((0, 1), s), ((2, 3), s)]);
            let fused = fuse_current(&scores, &friends, 0.4).unwrap();
            assert!(fused.get(Pair::new(0, 1)) >= fused.get(Pair::new(2, 3)));
        }
    }

    #[test]
    fn grid_with_single_zero_alpha_is_baseline() {
        // truth at t+1 = {(0,1),(2,3)}: (0,1) previously observed, (2,3) new
        let inter = seq(
            NetworkKind::Interaction,
            4,
            &[vec![(0, 1)], vec![(0, 1), (1, 2)], vec![(0, 1), (2, 3)]],
        );
        let friends = snap(4, &[(0, 2)]);
        let scores = map(4, &[((0, 1), 0.9), ((1, 2), 0.3)]);
        let transitions = vec![TransitionInput {
            t: 1,
            scores: &scores,
            friends: FriendSide::Current(&friends),
        }];
        let out = grid_search_alpha(&transitions, &inter, &[0.0], Aggregate::Mean).unwrap();
        assert_eq!(out.best_alpha, 0.0);
        let direct = evaluate_transition(&scores, &inter, 1).unwrap();
        assert_eq!(out.per_alpha[0].rows[0], direct);
    }

    /// Interactions at t+1 copy friendships at t exactly while the
    /// interaction scores are wide-range noise, so only alpha = 1 ranks
    /// perfectly and the grid search must pick it.
    #[test]
    fn grid_search_prefers_pure_friendships_on_copy_data() {
        use rand::{Rng, SeedableRng};
        let n = 16usize;
        // growing friendship sequence
        let f0: Vec<(NodeId, NodeId)> = vec![(0, 1), (2, 3), (4, 5), (6, 7)];
        let mut f1 = f0.clone();
        f1.extend([(8, 9), (10, 11), (0, 2)]);
        let mut f2 = f1.clone();
        f2.extend([(12, 13), (14, 15), (1, 3)]);
        let mut f3 = f2.clone();
        f3.extend([(4, 6), (5, 7)]);
        let friends = seq(
            NetworkKind::Friendship,
            n,
            &[f0.clone(), f1.clone(), f2.clone(), f3.clone()],
        );
        // interactions: a few one-off pairs at t=0 (to populate the
        // previously-observed pool with negatives), then copies of F
        let i0: Vec<(NodeId, NodeId)> = vec![(0, 15), (1, 14), (2, 13)];
        let inter = seq(
            NetworkKind::Interaction,
            n,
            &[i0.clone(), f0.clone(), f1.clone(), f2.clone()],
        );
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        let mut noise = |_: usize| {
            let mut m = ScoreMap::new(n);
            for a in 0..n as NodeId {
                for b in (a + 1)..n as NodeId {
                    m.set(Pair::new(a, b), rng.gen_range(0.0..50.0));
                }
            }
            m
        };
        let s1 = noise(1);
        let s2 = noise(2);
        let f_at: Vec<&Snapshot> = (0..4).map(|t| friends.snapshot(t).unwrap()).collect();
        let transitions = vec![
            TransitionInput {
                t: 1,
                scores: &s1,
                friends: FriendSide::Current(f_at[1]),
            },
            TransitionInput {
                t: 2,
                scores: &s2,
                friends: FriendSide::Current(f_at[2]),
            },
        ];
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let out = grid_search_alpha(&transitions, &inter, &grid, Aggregate::Mean).unwrap();
        assert_eq!(
            out.best_alpha,
            1.0,
            "per-alpha: {:?}",
            out.per_alpha
                .iter()
                .map(|a| (a.alpha, a.aggregate_gmauc))
                .collect::<Vec<_>>()
        );
        let at_one = out.per_alpha.iter().find(|a| a.alpha == 1.0).unwrap();
        assert!((at_one.aggregate_gmauc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_search_validates_inputs() {
        let inter = seq(NetworkKind::Interaction, 3, &[vec![(0, 1)], vec![(0, 1)]]);
        let scores = map(3, &[((0, 1), 0.5)]);
        let friends = snap(3, &[(0, 1)]);
        let transitions = vec![TransitionInput {
            t: 0,
            scores: &scores,
            friends: FriendSide::Current(&friends),
        }];
        assert!(grid_search_alpha(&transitions, &inter, &[], Aggregate::Mean).is_err());
        assert!(grid_search_alpha(&transitions, &inter, &[1.5], Aggregate::Mean).is_err());
        assert!(grid_search_alpha(&[], &inter, &[0.5], Aggregate::Mean).is_err());
    }

    #[test]
    fn grid_search_errors_carry_alpha_and_t_context() {
        // t out of range: the error must point at the failing grid point
        let inter = seq(NetworkKind::Interaction, 3, &[vec![(0, 1)], vec![(0, 1)]]);
        let scores = map(3, &[((0, 1), 0.5)]);
        let friends = snap(3, &[(0, 1)]);
        let transitions = vec![TransitionInput {
            t: 5,
            scores: &scores,
            friends: FriendSide::Current(&friends),
        }];
        let err = grid_search_alpha(&transitions, &inter, &[0.3], Aggregate::Mean).unwrap_err();
        match err {
            Error::EvalContext { alpha, t, .. } => {
                assert_eq!(alpha, 0.3);
                assert_eq!(t, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
