//! Timestamped edge-list ingestion into aligned snapshot sequences.
//!
//! Input format, both files: UTF-8 text, one record per line,
//! whitespace-separated `<user_a> <user_b> [unix_timestamp]`. Lines
//! starting with `#` are comments. In the friendship file the timestamp
//! is optional (a missing timestamp, or the literal `\N` used by the
//! common wall-post dumps, means the tie existed when the trace began).
//! In the interaction file the timestamp is mandatory.
//!
//! Friendship edges accumulate: an edge first seen in window `t` is
//! present in every snapshot from `t` on. Interactions are binarized per
//! window: at least one post between a pair inside window `t` yields one
//! undirected edge in snapshot `t` only. Post direction is discarded and
//! self-posts are dropped.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{
    DualDataset, NetworkKind, NodeId, Pair, Snapshot, SnapshotSequence, TimeWindow,
};

/// Windowing parameters. Snapshots cover `[start, start + T*interval)`
/// where `T = floor((end - start) / interval)`; the trailing partial
/// window, if any, is discarded.
#[derive(Copy, Clone, Debug)]
pub struct IngestOptions {
    pub start: i64,
    pub end: i64,
    pub interval_secs: i64,
}

impl IngestOptions {
    pub fn snapshot_count(&self) -> usize {
        ((self.end - self.start) / self.interval_secs) as usize
    }

    fn validate(&self) -> Result<()> {
        if self.start >= self.end {
            return Err(Error::InvalidParameter(format!(
                "start ({}) must be before end ({})",
                self.start, self.end
            )));
        }
        if self.interval_secs <= 0 {
            return Err(Error::InvalidParameter("interval must be positive".into()));
        }
        if self.snapshot_count() == 0 {
            return Err(Error::InvalidParameter(
                "the interval is longer than [start, end): no complete snapshot window".into(),
            ));
        }
        Ok(())
    }
}

/// Counters describing what ingestion did with the raw records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub nodes: usize,
    pub snapshots: usize,
    pub friendship_records: usize,
    pub interaction_records: usize,
    /// Friendship records with no timestamp, assigned to snapshot 0.
    pub crawl_time_friendships: usize,
    /// Friendship records stamped before `start`, assigned to snapshot 0.
    pub early_friendships: usize,
    /// Records stamped at or after the last full window's end.
    pub skipped_friendships: usize,
    pub skipped_interactions: usize,
    pub self_loops_dropped: usize,
}

struct NodeTable {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
}

impl NodeTable {
    fn new() -> Self {
        NodeTable {
            ids: HashMap::new(),
            names: Vec::new(),
        }
    }

    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as NodeId;
        self.ids.insert(name.to_string(), id);
        self.names.push(name.to_string());
        id
    }
}

struct RawRecord {
    a: NodeId,
    b: NodeId,
    timestamp: Option<i64>,
}

fn read_records(
    path: &Path,
    table: &mut NodeTable,
    timestamp_required: bool,
) -> Result<Vec<RawRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::MalformedLine {
            path: PathBuf::from(path),
            line: i + 1,
            msg,
        };
        let fields: Vec<&str> = trimmed.split_ascii_whitespace().collect();
        let timestamp = match fields.len() {
            2 if !timestamp_required => None,
            2 => return Err(bad("missing mandatory timestamp".into())),
            3 => {
                if fields[2] == r"\N" {
                    if timestamp_required {
                        return Err(bad(r"timestamp \N is not allowed here".into()));
                    }
                    None
                } else {
                    Some(
                        fields[2]
                            .parse::<i64>()
                            .map_err(|_| bad(format!("bad timestamp {:?}", fields[2])))?,
                    )
                }
            }
            n => return Err(bad(format!("expected 2 or 3 fields, found {n}"))),
        };
        records.push(RawRecord {
            a: table.intern(fields[0]),
            b: table.intern(fields[1]),
            timestamp,
        });
    }
    Ok(records)
}

/// Reads both edge files and builds the aligned snapshot sequences.
pub fn ingest_edges(
    friend_file: &Path,
    interaction_file: &Path,
    opts: IngestOptions,
) -> Result<(DualDataset, IngestStats)> {
    opts.validate()?;
    let t_count = opts.snapshot_count();
    let effective_end = opts.start + t_count as i64 * opts.interval_secs;

    let mut table = NodeTable::new();
    let friends = read_records(friend_file, &mut table, false)?;
    let interactions = read_records(interaction_file, &mut table, true)?;

    let mut stats = IngestStats {
        snapshots: t_count,
        friendship_records: friends.len(),
        interaction_records: interactions.len(),
        ..IngestStats::default()
    };

    // earliest window each friendship pair is present from
    let mut first_seen: HashMap<Pair, usize> = HashMap::new();
    for rec in &friends {
        if rec.a == rec.b {
            stats.self_loops_dropped += 1;
            continue;
        }
        let t = match rec.timestamp {
            None => {
                stats.crawl_time_friendships += 1;
                0
            }
            Some(ts) if ts < opts.start => {
                stats.early_friendships += 1;
                0
            }
            Some(ts) if ts >= effective_end => {
                stats.skipped_friendships += 1;
                continue;
            }
            Some(ts) => ((ts - opts.start) / opts.interval_secs) as usize,
        };
        first_seen
            .entry(Pair::new(rec.a, rec.b))
            .and_modify(|cur| *cur = (*cur).min(t))
            .or_insert(t);
    }

    let mut per_window: Vec<Vec<Pair>> = vec![Vec::new(); t_count];
    for rec in &interactions {
        if rec.a == rec.b {
            stats.self_loops_dropped += 1;
            continue;
        }
        let ts = rec.timestamp.expect("interaction timestamps are mandatory");
        if ts < opts.start || ts >= effective_end {
            stats.skipped_interactions += 1;
            continue;
        }
        let t = ((ts - opts.start) / opts.interval_secs) as usize;
        per_window[t].push(Pair::new(rec.a, rec.b));
    }

    let n = table.names.len();
    stats.nodes = n;
    let window = |t: usize| TimeWindow {
        start: opts.start + t as i64 * opts.interval_secs,
        end: opts.start + (t as i64 + 1) * opts.interval_secs,
    };

    let friend_snaps = (0..t_count)
        .map(|t| {
            let edges = first_seen
                .iter()
                .filter(|&(_, &first)| first <= t)
                .map(|(&p, _)| p.nodes());
            Snapshot::from_edges(t, window(t), n, edges)
        })
        .collect::<Result<Vec<_>>>()?;
    let inter_snaps = (0..t_count)
        .map(|t| Snapshot::from_edges(t, window(t), n, per_window[t].iter().map(|p| p.nodes())))
        .collect::<Result<Vec<_>>>()?;

    let ds = DualDataset::new(
        SnapshotSequence::new(NetworkKind::Friendship, n, friend_snaps)?,
        SnapshotSequence::new(NetworkKind::Interaction, n, inter_snaps)?,
        table.names,
    )?;
    Ok((ds, stats))
}
