//! Dynamic link predictors over an interaction snapshot sequence. Each
//! takes the history up to snapshot `t` and produces scores for the
//! edges expected at `t + 1`.

use crate::error::{Error, Result};
use crate::graph::{NodeId, Pair, SnapshotSequence};
use crate::scores::ScoreMap;
use crate::spectral::spectral_blocks;
use crate::static_predictors::{adamic_adar, katz, CandidatePairs, KatzConfig};

/// Smoothing weight for the exponentially-weighted moving average.
#[derive(Copy, Clone, Debug)]
pub struct EwmaConfig {
    pub lambda: f64,
}

impl Default for EwmaConfig {
    fn default() -> Self {
        EwmaConfig { lambda: 0.5 }
    }
}

impl EwmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ewma lambda must lie in (0,1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Block-model predictor parameters: number of blocks, the weight given
/// to the block-density score against the smoothed adjacency, and the
/// seed for the spectral clustering step.
#[derive(Copy, Clone, Debug)]
pub struct SbmConfig {
    pub blocks: usize,
    pub mix: f64,
    pub seed: u64,
}

impl Default for SbmConfig {
    fn default() -> Self {
        SbmConfig {
            blocks: 10,
            mix: 0.5,
            seed: 42,
        }
    }
}

impl SbmConfig {
    pub fn validate(&self, node_count: usize) -> Result<()> {
        if self.blocks < 1 || self.blocks > node_count {
            return Err(Error::InvalidParameter(format!(
                "block count must satisfy 1 <= k <= {node_count}, got {}",
                self.blocks
            )));
        }
        if !(0.0..=1.0).contains(&self.mix) {
            return Err(Error::InvalidParameter(format!(
                "mix must lie in [0,1], got {}",
                self.mix
            )));
        }
        Ok(())
    }
}

fn check_t(seq: &SnapshotSequence, t: usize) -> Result<()> {
    if t >= seq.len() {
        return Err(Error::OutOfRange {
            what: "snapshot index",
            got: t,
            max: seq.len(),
        });
    }
    Ok(())
}

/// EWMA recursion over score maps: `S_0 = X_0`, `S_tau = lambda*X_tau +
/// (1-lambda)*S_{tau-1}`.
fn ewma_fold<F>(t: usize, lambda: f64, mut snapshot_scores: F) -> Result<ScoreMap>
where
    F: FnMut(usize) -> Result<ScoreMap>,
{
    let mut acc = snapshot_scores(0)?;
    for tau in 1..=t {
        let x = snapshot_scores(tau)?;
        if lambda == 1.0 {
            acc = x;
            continue;
        }
        acc.scale(1.0 - lambda);
        for (p, v) in x.iter() {
            acc.add(p, lambda * v);
        }
    }
    Ok(acc)
}

fn snapshot_as_scores(seq: &SnapshotSequence, tau: usize) -> Result<ScoreMap> {
    let snap = seq.snapshot(tau)?;
    let mut m = ScoreMap::with_capacity(seq.node_count(), snap.edge_count());
    for p in snap.edges() {
        m.set(p, 1.0);
    }
    Ok(m)
}

/// Exponentially-weighted moving average of the binary snapshots up to
/// `t`. Only pairs that interacted at some `tau <= t` carry a nonzero
/// score, so this predictor never proposes a new pair.
pub fn ewma_scores(seq: &SnapshotSequence, t: usize, cfg: &EwmaConfig) -> Result<ScoreMap> {
    cfg.validate()?;
    check_t(seq, t)?;
    ewma_fold(t, cfg.lambda, |tau| snapshot_as_scores(seq, tau))
}

/// EWMA applied to the per-snapshot Adamic-Adar score sequences.
pub fn ts_aa_scores(seq: &SnapshotSequence, t: usize, cfg: &EwmaConfig) -> Result<ScoreMap> {
    cfg.validate()?;
    check_t(seq, t)?;
    ewma_fold(t, cfg.lambda, |tau| {
        adamic_adar(seq.snapshot(tau)?, CandidatePairs::All)
    })
}

/// EWMA applied to the per-snapshot truncated Katz score sequences.
pub fn ts_katz_scores(
    seq: &SnapshotSequence,
    t: usize,
    cfg: &EwmaConfig,
    katz_cfg: &KatzConfig,
) -> Result<ScoreMap> {
    cfg.validate()?;
    katz_cfg.validate()?;
    check_t(seq, t)?;
    ewma_fold(t, cfg.lambda, |tau| {
        katz(seq.snapshot(tau)?, katz_cfg, CandidatePairs::All)
    })
}

/// Simplified dynamic block-model predictor: spectral clustering of the
/// EWMA-smoothed adjacency into `k` blocks, block-pair density
/// estimates, and a `mix`-weighted combination of block density with the
/// smoothed per-pair score. Unlike the plain EWMA this assigns nonzero
/// scores to never-observed pairs whenever their block pair is active.
pub fn sbm_scores(
    seq: &SnapshotSequence,
    t: usize,
    ewma_cfg: &EwmaConfig,
    sbm_cfg: &SbmConfig,
) -> Result<ScoreMap> {
    sbm_cfg.validate(seq.node_count())?;
    let w = ewma_scores(seq, t, ewma_cfg)?;
    let n = seq.node_count();
    let labels = spectral_blocks(&w, n, sbm_cfg.blocks, sbm_cfg.seed);
    let k = labels.iter().copied().max().map_or(1, |m| m + 1);

    // block-pair means of W: within-block over unordered pairs, cross-block
    // over the full bipartite pair set
    let mut sizes = vec![0u64; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    let mut sums = vec![0.0f64; k * k];
    for (p, v) in w.iter_sorted() {
        let (a, b) = p.nodes();
        let (g, h) = (labels[a as usize], labels[b as usize]);
        let (lo, hi) = if g <= h { (g, h) } else { (h, g) };
        sums[lo * k + hi] += v;
    }
    let mut theta = vec![0.0f64; k * k];
    for g in 0..k {
        for h in g..k {
            let pairs = if g == h {
                sizes[g] * sizes[g].saturating_sub(1) / 2
            } else {
                sizes[g] * sizes[h]
            };
            let density = if pairs == 0 {
                0.0
            } else {
                sums[g * k + h] / pairs as f64
            };
            theta[g * k + h] = density;
            theta[h * k + g] = density;
        }
    }

    let mut out = ScoreMap::with_capacity(n, w.len());
    for a in 0..n as NodeId {
        for b in (a + 1)..n as NodeId {
            let p = Pair::new(a, b);
            let block_score = theta[labels[a as usize] * k + labels[b as usize]];
            let s = sbm_cfg.mix * block_score + (1.0 - sbm_cfg.mix) * w.get(p);
            if s != 0.0 {
                out.set(p, s);
            }
        }
    }
    Ok(out)
}
