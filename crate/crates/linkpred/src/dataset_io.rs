//! Versioned on-disk format for [`DualDataset`].
//!
//! Line-oriented UTF-8 text:
//!
//! ```text
//! #linkpred-dataset v1
//! meta nodes <N> snapshots <T> start <unix> interval <secs>
//! n <id> <name>            one per node, id ascending
//! f <first_t> <u> <v>      friendship edge, present from snapshot first_t on
//! i <t> <u> <v>            interaction edge in snapshot t
//! ```
//!
//! Friendship sequences are monotone, so storing the first snapshot each
//! edge appears in reproduces the sequence exactly. Edge lines are sorted,
//! making the writer deterministic and save/load an exact round trip.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{DualDataset, NetworkKind, NodeId, Snapshot, SnapshotSequence, TimeWindow};

const MAGIC: &str = "#linkpred-dataset v1";

pub fn save(ds: &DualDataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_dataset(ds, &mut w).map_err(|e| Error::io(path, e))
}

fn write_dataset<W: Write>(ds: &DualDataset, w: &mut W) -> std::io::Result<()> {
    let first = ds.friendships().snapshot(0).expect("sequence is non-empty");
    writeln!(w, "{MAGIC}")?;
    writeln!(
        w,
        "meta nodes {} snapshots {} start {} interval {}",
        ds.node_count(),
        ds.snapshot_count(),
        first.window().start,
        first.window().length(),
    )?;
    for (id, name) in ds.node_names().iter().enumerate() {
        writeln!(w, "n {id} {name}")?;
    }

    // first snapshot in which each friendship edge appears
    let mut firsts = Vec::new();
    for t in 0..ds.snapshot_count() {
        let snap = ds.friendships().snapshot(t).expect("index in range");
        for p in snap.edges() {
            if t == 0
                || !ds
                    .friendships()
                    .snapshot(t - 1)
                    .expect("index in range")
                    .contains_pair(p)
            {
                let (u, v) = p.nodes();
                firsts.push((t, u, v));
            }
        }
    }
    firsts.sort_unstable();
    for (t, u, v) in firsts {
        writeln!(w, "f {t} {u} {v}")?;
    }

    for t in 0..ds.snapshot_count() {
        let snap = ds.interactions().snapshot(t).expect("index in range");
        for p in snap.edges() {
            let (u, v) = p.nodes();
            writeln!(w, "i {t} {u} {v}")?;
        }
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<DualDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    read_dataset(&mut reader, path)
}

fn read_dataset<R: BufRead>(r: &mut R, path: &Path) -> Result<DualDataset> {
    let fail = |msg: String| Error::DatasetFormat {
        path: path.to_path_buf(),
        msg,
    };

    let mut lines = r.lines();
    let magic = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| fail("empty file".into()))?;
    if magic.trim_end() != MAGIC {
        return Err(fail(format!("bad magic header {magic:?}")));
    }
    let meta = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| fail("missing meta line".into()))?;
    let fields: Vec<&str> = meta.split_ascii_whitespace().collect();
    if fields.len() != 9
        || fields[0] != "meta"
        || fields[1] != "nodes"
        || fields[3] != "snapshots"
        || fields[5] != "start"
        || fields[7] != "interval"
    {
        return Err(fail(format!("bad meta line {meta:?}")));
    }
    let parse_int = |s: &str, what: &str| -> Result<i64> {
        s.parse()
            .map_err(|_| fail(format!("bad {what} value {s:?}")))
    };
    let n = parse_int(fields[2], "nodes")? as usize;
    let t_count = parse_int(fields[4], "snapshots")? as usize;
    let start = parse_int(fields[6], "start")?;
    let interval = parse_int(fields[8], "interval")?;
    if t_count == 0 || interval <= 0 {
        return Err(fail("meta declares no usable snapshots".into()));
    }

    let mut names: Vec<String> = Vec::with_capacity(n);
    let mut friend_firsts: Vec<(usize, NodeId, NodeId)> = Vec::new();
    let mut inter_edges: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); t_count];

    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        let bad = |msg: String| Error::MalformedLine {
            path: path.to_path_buf(),
            line: lineno + 3,
            msg,
        };
        match fields.first().copied() {
            Some("n") => {
                if fields.len() != 3 {
                    return Err(bad("node line needs `n <id> <name>`".into()));
                }
                let id: usize = fields[1].parse().map_err(|_| bad("bad node id".into()))?;
                if id != names.len() {
                    return Err(bad(format!(
                        "node ids must be dense and ascending; expected {}, found {id}",
                        names.len()
                    )));
                }
                names.push(fields[2].to_string());
            }
            Some(kind @ ("f" | "i")) => {
                if fields.len() != 4 {
                    return Err(bad(format!("edge line needs `{kind} <t> <u> <v>`")));
                }
                let t: usize = fields[1]
                    .parse()
                    .map_err(|_| bad("bad snapshot index".into()))?;
                let u: NodeId = fields[2].parse().map_err(|_| bad("bad node id".into()))?;
                let v: NodeId = fields[3].parse().map_err(|_| bad("bad node id".into()))?;
                if t >= t_count {
                    return Err(bad(format!("snapshot index {t} out of range")));
                }
                if u as usize >= n || v as usize >= n {
                    return Err(bad("node id outside the declared universe".into()));
                }
                if kind == "f" {
                    friend_firsts.push((t, u, v));
                } else {
                    inter_edges[t].push((u, v));
                }
            }
            _ => return Err(bad(format!("unknown record {line:?}"))),
        }
    }

    if names.len() != n {
        return Err(fail(format!(
            "expected {n} node lines, found {}",
            names.len()
        )));
    }

    let window = |t: usize| TimeWindow {
        start: start + t as i64 * interval,
        end: start + (t as i64 + 1) * interval,
    };
    let friend_snaps = (0..t_count)
        .map(|t| {
            let edges = friend_firsts
                .iter()
                .filter(|&&(first, _, _)| first <= t)
                .map(|&(_, u, v)| (u, v));
            Snapshot::from_edges(t, window(t), n, edges)
        })
        .collect::<Result<Vec<_>>>()?;
    let inter_snaps = (0..t_count)
        .map(|t| Snapshot::from_edges(t, window(t), n, inter_edges[t].iter().copied()))
        .collect::<Result<Vec<_>>>()?;

    DualDataset::new(
        SnapshotSequence::new(NetworkKind::Friendship, n, friend_snaps)?,
        SnapshotSequence::new(NetworkKind::Interaction, n, inter_snaps)?,
        names,
    )
}
