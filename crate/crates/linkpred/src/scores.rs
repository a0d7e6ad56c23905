//! Sparse pairwise score maps.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Pair};

/// Sparse map from canonical node pairs to real-valued scores over a
/// universe of `node_count` nodes. A pair that is absent scores 0. An
/// explicitly stored 0 (normalization maps the minimum there) means the
/// same thing, so equality compares maps as functions rather than by
/// stored support.
#[derive(Clone, Debug)]
pub struct ScoreMap {
    node_count: usize,
    entries: HashMap<Pair, f64>,
}

impl PartialEq for ScoreMap {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.iter().all(|(p, v)| other.get(p) == v)
            && other.iter().all(|(p, v)| self.get(p) == v)
    }
}

impl ScoreMap {
    pub fn new(node_count: usize) -> Self {
        ScoreMap {
            node_count,
            entries: HashMap::new(),
        }
    }

    pub fn with_capacity(node_count: usize, capacity: usize) -> Self {
        ScoreMap {
            node_count,
            entries: HashMap::with_capacity(capacity),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: Pair) -> f64 {
        self.entries.get(&p).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, p: Pair) -> bool {
        self.entries.contains_key(&p)
    }

    pub fn set(&mut self, p: Pair, value: f64) {
        debug_assert!(!value.is_nan(), "score for {p:?} is NaN");
        self.entries.insert(p, value);
    }

    /// Adds `delta` to the stored value (treating absent as 0).
    pub fn add(&mut self, p: Pair, delta: f64) {
        *self.entries.entry(p).or_insert(0.0) += delta;
    }

    /// Multiplies every stored value by `factor`. Scaling by 0 clears the
    /// support entirely.
    pub fn scale(&mut self, factor: f64) {
        if factor == 0.0 {
            self.entries.clear();
            return;
        }
        for v in self.entries.values_mut() {
            *v *= factor;
        }
    }

    /// Unordered iteration. Use [`ScoreMap::iter_sorted`] wherever the
    /// visit order can affect output (float reductions, serialization).
    pub fn iter(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        self.entries.iter().map(|(&p, &v)| (p, v))
    }

    /// Entries in ascending canonical pair order.
    pub fn iter_sorted(&self) -> Vec<(Pair, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|&(p, _)| p);
        v
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.values().copied()
    }

    /// Writes the line-oriented `u v score` export, pairs ascending,
    /// scores as 9-significant-digit decimals.
    pub fn export<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (p, v) in self.iter_sorted() {
            let (a, b) = p.nodes();
            writeln!(w, "{a} {b} {}", fmt_sig9(v))?;
        }
        Ok(())
    }

    /// Parses the export format back into a map over `node_count` nodes.
    pub fn import<R: BufRead>(r: R, node_count: usize) -> Result<Self> {
        let mut map = ScoreMap::new(node_count);
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<scores>", e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_ascii_whitespace();
            let bad = |msg: &str| Error::MalformedLine {
                path: "<scores>".into(),
                line: i + 1,
                msg: msg.into(),
            };
            let a: NodeId = it
                .next()
                .ok_or_else(|| bad("missing first node"))?
                .parse()
                .map_err(|_| bad("first node is not an integer"))?;
            let b: NodeId = it
                .next()
                .ok_or_else(|| bad("missing second node"))?
                .parse()
                .map_err(|_| bad("second node is not an integer"))?;
            let score: f64 = it
                .next()
                .ok_or_else(|| bad("missing score"))?
                .parse()
                .map_err(|_| bad("score is not a number"))?;
            if it.next().is_some() {
                return Err(bad("trailing fields"));
            }
            if a == b {
                return Err(bad("self-pair"));
            }
            if a as usize >= node_count || b as usize >= node_count {
                return Err(bad("node id outside the universe"));
            }
            map.set(Pair::new(a, b), score);
        }
        Ok(map)
    }
}

/// Plain decimal with 9 significant digits.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
