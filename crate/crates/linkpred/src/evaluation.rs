//! Split new/previously-observed evaluation: PRAUC on new pairs, AUC on
//! previously observed pairs, and the chance-corrected geometric mean
//! (GMAUC) combining them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{Pair, SnapshotSequence};
use crate::scores::ScoreMap;

/// Candidate pairs at prediction time `t`, split by interaction history:
/// a pair is previously observed if it interacted in any snapshot up to
/// and including `t`; every other unordered pair over the universe is new.
#[derive(Clone, Debug)]
pub struct PairSplit {
    node_count: usize,
    prev: HashSet<Pair>,
}

impl PairSplit {
    pub fn previously_observed(&self, p: Pair) -> bool {
        self.prev.contains(&p)
    }

    pub fn prev_pairs(&self) -> &HashSet<Pair> {
        &self.prev
    }

    pub fn total_pairs(&self) -> u64 {
        let n = self.node_count as u64;
        n * (n - 1) / 2
    }

    pub fn prev_count(&self) -> u64 {
        self.prev.len() as u64
    }

    pub fn new_count(&self) -> u64 {
        self.total_pairs() - self.prev_count()
    }
}

pub fn split_pairs(interactions: &SnapshotSequence, t: usize) -> Result<PairSplit> {
    if t >= interactions.len() {
        return Err(Error::OutOfRange {
            what: "snapshot index",
            got: t,
            max: interactions.len(),
        });
    }
    let mut prev = HashSet::new();
    for tau in 0..=t {
        prev.extend(interactions.snapshot(tau)?.edges());
    }
    Ok(PairSplit {
        node_count: interactions.node_count(),
        prev,
    })
}

/// Ranked items grouped into maximal blocks of equal score, descending.
struct Blocks {
    /// (positives, negatives) per block.
    blocks: Vec<(u64, u64)>,
    positives: u64,
    negatives: u64,
}

impl Blocks {
    /// `explicit` holds scored items; `zero_pos`/`zero_neg` count items
    /// with an implicit score of exactly 0 (the sparse-map default).
    fn build(mut explicit: Vec<(f64, bool)>, zero_pos: u64, zero_neg: u64) -> Blocks {
        explicit.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        let mut blocks = Vec::new();
        let mut positives = 0u64;
        let mut negatives = 0u64;
        let mut zero_done = zero_pos == 0 && zero_neg == 0;
        let mut i = 0;
        while i < explicit.len() {
            let score = explicit[i].0;
            if !zero_done && score < 0.0 {
                blocks.push((zero_pos, zero_neg));
                positives += zero_pos;
                negatives += zero_neg;
                zero_done = true;
                continue;
            }
            let mut pos = 0u64;
            let mut neg = 0u64;
            while i < explicit.len() && explicit[i].0 == score {
                if explicit[i].1 {
                    pos += 1;
                } else {
                    neg += 1;
                }
                i += 1;
            }
            if !zero_done && score == 0.0 {
                pos += zero_pos;
                neg += zero_neg;
                zero_done = true;
            }
            blocks.push((pos, neg));
            positives += pos;
            negatives += neg;
        }
        if !zero_done {
            blocks.push((zero_pos, zero_neg));
            positives += zero_pos;
            negatives += zero_neg;
        }
        Blocks {
            blocks,
            positives,
            negatives,
        }
    }

    fn check_nondegenerate(&self, context: &str) -> Result<()> {
        if self.positives == 0 {
            return Err(Error::UndefinedMetric(format!(
                "{context}: no positive pairs"
            )));
        }
        if self.negatives == 0 {
            return Err(Error::UndefinedMetric(format!(
                "{context}: no negative pairs"
            )));
        }
        Ok(())
    }

    /// Mann-Whitney AUC with ties counted as 1/2, via block counting.
    /// Equal by construction to the exhaustive pairwise definition.
    fn auc(&self, context: &str) -> Result<f64> {
        self.check_nondegenerate(context)?;
        let mut wins = 0.0f64;
        let mut neg_below = self.negatives;
        for &(pos, neg) in &self.blocks {
            neg_below -= neg;
            wins += pos as f64 * neg_below as f64 + 0.5 * pos as f64 * neg as f64;
        }
        Ok(wins / (self.positives as f64 * self.negatives as f64))
    }

    /// Average precision with tied blocks treated as single steps of the
    /// PR curve: every positive in a block contributes the precision at
    /// the block's end. Deterministic and independent of within-tie order.
    /// The recall weight is divided out per block so that a scorer which
    /// leaves all candidates tied gets bitwise exactly the positive-class
    /// prevalence `P/(P+N)` (the chance level the GMAUC correction
    /// subtracts).
    fn average_precision(&self, context: &str) -> Result<f64> {
        self.check_nondegenerate(context)?;
        let mut seen_pos = 0u64;
        let mut seen_all = 0u64;
        let mut sum = 0.0f64;
        for &(pos, neg) in &self.blocks {
            seen_pos += pos;
            seen_all += pos + neg;
            if pos > 0 {
                let recall_step = pos as f64 / self.positives as f64;
                let precision = seen_pos as f64 / seen_all as f64;
                sum += recall_step * precision;
            }
        }
        Ok(sum)
    }
}

fn gather(
    scores: &ScoreMap,
    positives: &HashSet<Pair>,
    negatives: &HashSet<Pair>,
) -> Result<Blocks> {
    if let Some(p) = positives.intersection(negatives).next() {
        return Err(Error::InvalidParameter(format!(
            "pair {p:?} appears in both positives and negatives"
        )));
    }
    let mut explicit = Vec::with_capacity(positives.len() + negatives.len());
    for &p in positives {
        explicit.push((scores.get(p), true));
    }
    for &p in negatives {
        explicit.push((scores.get(p), false));
    }
    Ok(Blocks::build(explicit, 0, 0))
}

/// ROC AUC over explicit positive/negative pair sets. Pairs absent from
/// the score map score 0.
pub fn auc(scores: &ScoreMap, positives: &HashSet<Pair>, negatives: &HashSet<Pair>) -> Result<f64> {
    gather(scores, positives, negatives)?.auc("auc")
}

/// PR AUC (average precision) over explicit positive/negative pair sets.
pub fn prauc(
    scores: &ScoreMap,
    positives: &HashSet<Pair>,
    negatives: &HashSet<Pair>,
) -> Result<f64> {
    gather(scores, positives, negatives)?.average_precision("prauc")
}

/// Chance-corrected geometric mean of PRAUC on new pairs and AUC on
/// previously observed pairs. `r = P/(P+N)` is the PRAUC chance level;
/// both factors clamp at 0, so a predictor at or below chance on either
/// side scores 0.
pub fn gmauc(prauc_new: f64, auc_prev: f64, p_new: u64, n_new: u64) -> Result<f64> {
    if p_new + n_new == 0 {
        return Err(Error::UndefinedMetric("gmauc: empty new-pair pool".into()));
    }
    let r = p_new as f64 / (p_new + n_new) as f64;
    if r >= 1.0 {
        return Err(Error::UndefinedMetric(
            "gmauc: every new pair is positive, chance correction is undefined".into(),
        ));
    }
    let pr_term = ((prauc_new - r) / (1.0 - r)).max(0.0);
    let auc_term = (2.0 * (auc_prev - 0.5)).max(0.0);
    Ok((pr_term * auc_term).sqrt().clamp(0.0, 1.0))
}

/// Metric values for one evaluated transition (or a pooled set of them).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    /// Prediction time; `None` for a row pooled across transitions.
    pub t: Option<usize>,
    pub prauc_new: f64,
    pub auc_prev: f64,
    pub gmauc: f64,
    pub p_new: u64,
    pub n_new: u64,
    pub p_prev: u64,
    pub n_prev: u64,
}

/// One labeled evaluation: which predictor and fusion setting produced
/// the scores, plus the metric values.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub predictor: String,
    pub mode: String,
    pub alpha: f64,
    pub row: MetricRow,
}

pub const CSV_HEADER: &str =
    "predictor,mode,alpha,t,prauc_new,auc_prev,gmauc,p_new,n_new,p_prev,n_prev";

impl EvalReport {
    pub fn csv_row(&self) -> String {
        let t = match self.row.t {
            Some(t) => t.to_string(),
            None => "pooled".to_string(),
        };
        format!(
            "{},{},{:.2},{},{:.6},{:.6},{:.6},{},{},{},{}",
            self.predictor,
            self.mode,
            self.alpha,
            t,
            self.row.prauc_new,
            self.row.auc_prev,
            self.row.gmauc,
            self.row.p_new,
            self.row.n_new,
            self.row.p_prev,
            self.row.n_prev,
        )
    }
}

/// Accumulates (score, label) pools for one or more transitions, keeping
/// unscored pairs as counts instead of materializing the full pair
/// universe. Finishing yields the same numbers as a dense evaluation.
#[derive(Default)]
pub struct PoolAccumulator {
    new_explicit: Vec<(f64, bool)>,
    prev_explicit: Vec<(f64, bool)>,
    new_zero_pos: u64,
    new_zero_neg: u64,
    prev_zero_pos: u64,
    prev_zero_neg: u64,
}

impl PoolAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one transition: `scores` predicts interactions at `t + 1`.
    pub fn add_transition(
        &mut self,
        scores: &ScoreMap,
        interactions: &SnapshotSequence,
        t: usize,
    ) -> Result<()> {
        if t + 1 >= interactions.len() {
            return Err(Error::OutOfRange {
                what: "transition index",
                got: t,
                max: interactions.len().saturating_sub(1),
            });
        }
        if scores.node_count() != interactions.node_count() {
            return Err(Error::InvalidParameter(format!(
                "score universe {} does not match dataset universe {}",
                scores.node_count(),
                interactions.node_count()
            )));
        }
        let split = split_pairs(interactions, t)?;
        let truth = interactions.snapshot(t + 1)?;

        let mut stored_new_pos = 0u64;
        let mut stored_new_neg = 0u64;
        let mut stored_prev_pos = 0u64;
        let mut stored_prev_neg = 0u64;
        for (p, v) in scores.iter() {
            let label = truth.contains_pair(p);
            if split.previously_observed(p) {
                self.prev_explicit.push((v, label));
                if label {
                    stored_prev_pos += 1;
                } else {
                    stored_prev_neg += 1;
                }
            } else {
                self.new_explicit.push((v, label));
                if label {
                    stored_new_pos += 1;
                } else {
                    stored_new_neg += 1;
                }
            }
        }

        let mut p_prev_total = 0u64;
        let mut p_new_total = 0u64;
        for p in truth.edges() {
            if split.previously_observed(p) {
                p_prev_total += 1;
            } else {
                p_new_total += 1;
            }
        }
        let n_prev_total = split.prev_count() - p_prev_total;
        let n_new_total = split.new_count() - p_new_total;

        self.prev_zero_pos += p_prev_total - stored_prev_pos;
        self.prev_zero_neg += n_prev_total - stored_prev_neg;
        self.new_zero_pos += p_new_total - stored_new_pos;
        self.new_zero_neg += n_new_total - stored_new_neg;
        Ok(())
    }

    /// Computes PRAUC-new, AUC-prev and GMAUC over everything added.
    pub fn finish(self, t: Option<usize>) -> Result<MetricRow> {
        let new_blocks = Blocks::build(self.new_explicit, self.new_zero_pos, self.new_zero_neg);
        let prev_blocks = Blocks::build(self.prev_explicit, self.prev_zero_pos, self.prev_zero_neg);
        let prauc_new = new_blocks.average_precision("prauc over new pairs")?;
        let auc_prev = prev_blocks.auc("auc over previously observed pairs")?;
        let g = gmauc(
            prauc_new,
            auc_prev,
            new_blocks.positives,
            new_blocks.negatives,
        )?;
        Ok(MetricRow {
            t,
            prauc_new,
            auc_prev,
            gmauc: g,
            p_new: new_blocks.positives,
            n_new: new_blocks.negatives,
            p_prev: prev_blocks.positives,
            n_prev: prev_blocks.negatives,
        })
    }
}

/// Evaluates one score map against the interactions that actually occur
/// at `t + 1`.
pub fn evaluate_transition(
    scores: &ScoreMap,
    interactions: &SnapshotSequence,
    t: usize,
) -> Result<MetricRow> {
    let mut acc = PoolAccumulator::new();
    acc.add_transition(scores, interactions, t)?;
    acc.finish(Some(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::seq;
    use crate::graph::{NetworkKind, NodeId};

    fn pairs(ps: &[(NodeId, NodeId)]) -> HashSet<Pair> {
        ps.iter().map(|&(a, b)| Pair::new(a, b)).collect()
    }

    fn map(n: usize, entries: &[((NodeId, NodeId), f64)]) -> ScoreMap {
        let mut m = ScoreMap::new(n);
        for &((a, b), v) in entries {
            m.set(Pair::new(a, b), v);
        }
        m
    }

    /// Exhaustive O(P*N) Mann-Whitney oracle.
    pub(crate) fn auc_oracle(pos: &[f64], neg: &[f64]) -> f64 {
        let mut wins = 0.0;
        for &p in pos {
            for &n in neg {
                if p > n {
                    wins += 1.0;
                } else if p == n {
                    wins += 0.5;
                }
            }
        }
        wins / (pos.len() as f64 * neg.len() as f64)
    }

    #[test]
    fn split_pairs_any_past_rule() {
        // pair interacts only at tau = 0; at t = 3 it is still previously observed
        let inter = seq(
            NetworkKind::Interaction,
            4,
            &[vec![(0, 1)], vec![], vec![], vec![], vec![]],
        );
        let split = split_pairs(&inter, 3).unwrap();
        assert!(split.previously_observed(Pair::new(0, 1)));
        assert!(!split.previously_observed(Pair::new(2, 3)));
        assert_eq!(split.total_pairs(), 6);
        assert_eq!(split.prev_count(), 1);
        assert_eq!(split.new_count(), 5);
    }

    #[test]
    fn split_pairs_empty_start() {
        let inter = seq(NetworkKind::Interaction, 3, &[vec![], vec![]]);
        let split = split_pairs(&inter, 0).unwrap();
        assert_eq!(split.prev_count(), 0);
        assert_eq!(split.new_count(), 3);
        assert!(split_pairs(&inter, 2).is_err());
    }

    #[test]
    fn auc_separated_and_tied() {
        let scores = map(
            6,
            &[((0, 1), 0.9), ((0, 2), 0.8), ((0, 3), 0.1), ((0, 4), 0.2)],
        );
        let pos = pairs(&[(0, 1), (0, 2)]);
        let neg = pairs(&[(0, 3), (0, 4)]);
        assert_eq!(auc(&scores, &pos, &neg).unwrap(), 1.0);

        // all scores equal -> 0.5 by the tie rule
        let flat = map(6, &[((0, 1), 0.5), ((0, 2), 0.5), ((0, 3), 0.5)]);
        let pos = pairs(&[(0, 1)]);
        let neg = pairs(&[(0, 2), (0, 3)]);
        assert_eq!(auc(&flat, &pos, &neg).unwrap(), 0.5);
    }

    #[test]
    fn auc_interleaved_example() {
        // pos {0.9, 0.7}, neg {0.8, 0.6} -> 3/4
        let scores = map(
            6,
            &[((0, 1), 0.9), ((0, 2), 0.7), ((0, 3), 0.8), ((0, 4), 0.6)],
        );
        let pos = pairs(&[(0, 1), (0, 2)]);
        let neg = pairs(&[(0, 3), (0, 4)]);
        assert_eq!(auc(&scores, &pos, &neg).unwrap(), 0.75);
        assert_eq!(auc_oracle(&[0.9, 0.7], &[0.8, 0.6]), 0.75);
    }

    #[test]
    fn auc_matches_exhaustive_oracle_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(99);
        for _ in 0..50 {
            let np = rng.gen_range(1..30);
            let nn = rng.gen_range(1..30);
            // coarse grid of scores so ties actually occur
            let pos: Vec<f64> = (0..np).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect();
            let neg: Vec<f64> = (0..nn).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect();
            let mut m = ScoreMap::new(200);
            let mut pset = HashSet::new();
            let mut nset = HashSet::new();
            for (i, &s) in pos.iter().enumerate() {
                let p = Pair::new(0, i as NodeId + 1);
                m.set(p, s);
                pset.insert(p);
            }
            for (i, &s) in neg.iter().enumerate() {
                let p = Pair::new(1, i as NodeId + 2);
                m.set(p, s);
                nset.insert(p);
            }
            let fast = auc(&m, &pset, &nset).unwrap();
            let slow = auc_oracle(&pos, &neg);
            assert!((fast - slow).abs() <= 1e-12, "fast {fast} vs slow {slow}");
        }
    }

    #[test]
    fn prauc_all_positives_first_is_one() {
        let scores = map(6, &[((0, 1), 0.9), ((0, 2), 0.8), ((0, 3), 0.1)]);
        let pos = pairs(&[(0, 1), (0, 2)]);
        let neg = pairs(&[(0, 3)]);
        assert_eq!(prauc(&scores, &pos, &neg).unwrap(), 1.0);
    }

    #[test]
    fn prauc_single_inversion_example() {
        // pos {0.8}, neg {0.9}: the positive arrives at rank 2 -> AP = 0.5
        let scores = map(6, &[((0, 1), 0.8), ((0, 2), 0.9)]);
        let pos = pairs(&[(0, 1)]);
        let neg = pairs(&[(0, 2)]);
        assert_eq!(prauc(&scores, &pos, &neg).unwrap(), 0.5);
    }

    #[test]
    fn prauc_all_tied_equals_prevalence() {
        let scores = ScoreMap::new(10); // everything scores the implicit 0
        let pos = pairs(&[(0, 1), (0, 2), (0, 3)]);
        let neg = pairs(&[(1, 2), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]);
        let ap = prauc(&scores, &pos, &neg).unwrap();
        assert_eq!(ap, 0.3);
    }

    #[test]
    fn metrics_reject_degenerate_pools() {
        let scores = map(4, &[((0, 1), 0.5)]);
        let empty = HashSet::new();
        let some = pairs(&[(0, 1)]);
        assert!(auc(&scores, &empty, &some).is_err());
        assert!(auc(&scores, &some, &empty).is_err());
        assert!(prauc(&scores, &empty, &some).is_err());
        let overlap = pairs(&[(0, 1)]);
        assert!(auc(&scores, &some, &overlap).is_err());
    }

    #[test]
    fn gmauc_annihilation_and_perfection() {
        // chance-level AUC kills the product regardless of PRAUC
        assert_eq!(gmauc(0.9, 0.5, 10, 90).unwrap(), 0.0);
        // below-chance corrected PRAUC clamps to zero
        assert_eq!(gmauc(0.05, 0.9, 10, 90).unwrap(), 0.0);
        // perfect predictor
        assert_eq!(gmauc(1.0, 1.0, 10, 90).unwrap(), 1.0);
        // a persistence-only predictor leaves PRAUC at chance -> 0
        let r = 10.0 / 100.0;
        assert_eq!(gmauc(r, 0.698, 10, 90).unwrap(), 0.0);
    }

    #[test]
    fn gmauc_guards() {
        assert!(gmauc(0.5, 0.7, 0, 0).is_err());
        assert!(gmauc(0.5, 0.7, 5, 0).is_err());
        let g = gmauc(0.3, 0.8, 10, 90).unwrap();
        assert!((0.0..=1.0).contains(&g));
    }

    #[test]
    fn sparse_evaluation_equals_dense() {
        // scoring only some pairs must give the same metrics as a map
        // where the remaining pairs are explicit zeros is impossible by
        // construction (zeros are never stored), so compare against
        // explicit-set evaluation over the full universe
        let inter = seq(
            NetworkKind::Interaction,
            5,
            &[vec![(0, 1), (2, 3)], vec![(0, 1), (1, 2)]],
        );
        let scores = map(5, &[((0, 1), 0.9), ((1, 2), 0.4), ((3, 4), 0.2)]);
        let row = evaluate_transition(&scores, &inter, 0).unwrap();

        let split = split_pairs(&inter, 0).unwrap();
        let truth = inter.snapshot(1).unwrap();
        let mut new_pos = HashSet::new();
        let mut new_neg = HashSet::new();
        let mut prev_pos = HashSet::new();
        let mut prev_neg = HashSet::new();
        for a in 0..5u32 {
            for b in (a + 1)..5u32 {
                let p = Pair::new(a, b);
                match (split.previously_observed(p), truth.contains_pair(p)) {
                    (true, true) => prev_pos.insert(p),
                    (true, false) => prev_neg.insert(p),
                    (false, true) => new_pos.insert(p),
                    (false, false) => new_neg.insert(p),
                };
            }
        }
        assert_eq!(row.p_new, new_pos.len() as u64);
        assert_eq!(row.n_new, new_neg.len() as u64);
        assert_eq!(row.p_prev, prev_pos.len() as u64);
        assert_eq!(row.n_prev, prev_neg.len() as u64);
        assert_eq!(row.prauc_new, prauc(&scores, &new_pos, &new_neg).unwrap());
        assert_eq!(row.auc_prev, auc(&scores, &prev_pos, &prev_neg).unwrap());
    }

    #[test]
    fn metrics_invariant_under_monotone_transforms() {
        let inter = seq(
            NetworkKind::Interaction,
            6,
            &[vec![(0, 1), (2, 3)], vec![(0, 1), (1, 2), (4, 5)]],
        );
        let base = map(
            6,
            &[((0, 1), 0.75), ((1, 2), 0.5), ((3, 4), 0.25), ((2, 3), 0.5)],
        );
        let row = evaluate_transition(&base, &inter, 0).unwrap();
        let transforms: [&dyn Fn(f64) -> f64; 3] =
            [&|x| 0.5 * x + 0.2, &|x| x * x * x + 1.0, &|x| x.exp()];
        for f in transforms {
            let mut m = ScoreMap::new(6);
            for a in 0..6u32 {
                for b in (a + 1)..6u32 {
                    let p = Pair::new(a, b);
                    m.set(p, f(base.get(p)));
                }
            }
            let r2 = evaluate_transition(&m, &inter, 0).unwrap();
            assert!((r2.prauc_new - row.prauc_new).abs() < 1e-12);
            assert!((r2.auc_prev - row.auc_prev).abs() < 1e-12);
            assert!((r2.gmauc - row.gmauc).abs() < 1e-12);
        }
    }

    #[test]
    fn metrics_depend_only_on_score_label_multisets() {
        // move the same multiset of (score, label) items onto different
        // pair identities; every metric must be unchanged
        let scores_a = map(
            8,
            &[((0, 1), 0.9), ((0, 2), 0.4), ((0, 3), 0.4), ((0, 4), 0.1)],
        );
        let pos_a = pairs(&[(0, 1), (0, 3)]);
        let neg_a = pairs(&[(0, 2), (0, 4), (5, 6)]);
        let scores_b = map(
            8,
            &[((6, 7), 0.9), ((1, 2), 0.4), ((3, 4), 0.4), ((2, 5), 0.1)],
        );
        let pos_b = pairs(&[(6, 7), (3, 4)]);
        let neg_b = pairs(&[(1, 2), (2, 5), (0, 7)]);
        assert_eq!(
            auc(&scores_a, &pos_a, &neg_a).unwrap(),
            auc(&scores_b, &pos_b, &neg_b).unwrap()
        );
        assert_eq!(
            prauc(&scores_a, &pos_a, &neg_a).unwrap(),
            prauc(&scores_b, &pos_b, &neg_b).unwrap()
        );
    }

    #[test]
    fn csv_row_shape() {
        let report = EvalReport {
            predictor: "ewma".into(),
            mode: "current".into(),
            alpha: 0.1,
            row: MetricRow {
                t: Some(3),
                prauc_new: 0.25,
                auc_prev: 0.75,
                gmauc: 0.5,
                p_new: 1,
                n_new: 2,
                p_prev: 3,
                n_prev: 4,
            },
        };
        assert_eq!(
            report.csv_row(),
            "ewma,current,0.10,3,0.250000,0.750000,0.500000,1,2,3,4"
        );
        assert_eq!(
            CSV_HEADER.split(',').count(),
            report.csv_row().split(',').count()
        );
    }
}
