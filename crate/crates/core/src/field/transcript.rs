//! Field-mode run records and the rank-based secrecy and decodability tests.
//!
//! Feedback is public but carries no field content; it appears here only as
//! the per-transmission reception flags.
//!
//! Text format, one record per line:
//!
//! ```text
//! # seccap-transcript v1
//! basis W1:4:m W2:4:m T1:9:r T2:9:r
//! node M relay in=1,2 out=3 owes=
//! node D dest in=3 out= owes=W1,W2
//! tx 3 17 L- 00010000...
//! ```
//!
//! `basis` lists blocks as `name:len:kind` (`m` message, `r` randomness) in
//! column order. `tx` lines are `link slot flags hex`; flags are `L`/`-` for
//! the legitimate receiver and `E`/`-` for that link's eavesdropper.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::linalg::Echelon;
use super::row::CoeffRow;
use super::FieldError;

pub const HEADER: &str = "# seccap-transcript v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisBlock {
    pub name: String,
    pub len: usize,
    pub message: bool,
}

/// Column layout: named blocks, message blocks first by convention.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BasisLayout {
    blocks: Vec<BasisBlock>,
}

impl BasisLayout {
    pub fn new(blocks: Vec<BasisBlock>) -> Self {
        Self { blocks }
    }

    pub fn blocks(&self) -> &[BasisBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len).sum()
    }

    /// Starting column of block `name`.
    pub fn offset(&self, name: &str) -> Option<usize> {
        let mut off = 0;
        for b in &self.blocks {
            if b.name == name {
                return Some(off);
            }
            off += b.len;
        }
        None
    }

    pub fn block(&self, name: &str) -> Option<&BasisBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// Per-column message flag.
    pub fn message_mask(&self) -> Vec<bool> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(b.message).take(b.len))
            .collect()
    }

    /// Column range of block `name`.
    pub fn columns(&self, name: &str) -> Option<std::ops::Range<usize>> {
        let off = self.offset(name)?;
        Some(off..off + self.block(name)?.len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Source,
    Relay,
    Dest,
}

impl NodeRole {
    fn tag(self) -> &'static str {
        match self {
            NodeRole::Source => "source",
            NodeRole::Relay => "relay",
            NodeRole::Dest => "dest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeInfo {
    pub name: String,
    pub role: NodeRole,
    pub incoming: Vec<u8>,
    pub outgoing: Vec<u8>,
    /// Message blocks this node must decode.
    pub owes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub link: u8,
    pub slot: u64,
    pub legit: bool,
    pub eav: bool,
    pub row: CoeffRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub layout: BasisLayout,
    pub nodes: Vec<NodeInfo>,
    pub transmissions: Vec<Transmission>,
}

impl Transcript {
    pub fn new(layout: BasisLayout, nodes: Vec<NodeInfo>) -> Self {
        Self {
            layout,
            nodes,
            transmissions: Vec::new(),
        }
    }

    pub fn push(&mut self, t: Transmission) {
        self.transmissions.push(t);
    }

    pub fn node(&self, name: &str) -> Option<&NodeInfo> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn destinations(&self) -> impl Iterator<Item = &NodeInfo> {
        self.nodes.iter().filter(|n| n.role == NodeRole::Dest)
    }

    pub fn links(&self) -> Vec<u8> {
        let mut l: Vec<u8> = self.transmissions.iter().map(|t| t.link).collect();
        l.extend(self.nodes.iter().flat_map(|n| n.incoming.iter().copied()));
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Every row must match the basis dimension.
    pub fn validate(&self) -> Result<(), FieldError> {
        let dim = self.layout.dim();
        for (i, t) in self.transmissions.iter().enumerate() {
            if t.row.len() != dim {
                return Err(FieldError::Malformed(format!(
                    "transmission {i} has {} coefficients, basis has {dim}",
                    t.row.len()
                )));
            }
        }
        for n in &self.nodes {
            for b in &n.owes {
                match self.layout.block(b) {
                    Some(bl) if bl.message => {}
                    _ => {
                        return Err(FieldError::Malformed(format!(
                            "node {} owes unknown message block {b}",
                            n.name
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Distinct rows the eavesdropper on `link` received.
    pub fn eavesdropper_rows(&self, link: u8) -> Vec<CoeffRow> {
        let mut seen = HashSet::new();
        self.transmissions
            .iter()
            .filter(|t| t.link == link && t.eav && !t.row.is_zero())
            .filter(|t| seen.insert(t.row.as_slice()))
            .map(|t| t.row.clone())
            .collect()
    }

    /// Distinct rows a legitimate node received over its incoming links.
    pub fn received_rows(&self, node: &NodeInfo) -> Vec<CoeffRow> {
        let mut seen = HashSet::new();
        self.transmissions
            .iter()
            .filter(|t| t.legit && node.incoming.contains(&t.link) && !t.row.is_zero())
            .filter(|t| seen.insert(t.row.as_slice()))
            .map(|t| t.row.clone())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(HEADER);
        s.push('\n');
        s.push_str("basis");
        for b in self.layout.blocks() {
            let _ = write!(s, " {}:{}:{}", b.name, b.len, if b.message { 'm' } else { 'r' });
        }
        s.push('\n');
        let join = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        for n in &self.nodes {
            let _ = writeln!(
                s,
                "node {} {} in={} out={} owes={}",
                n.name,
                n.role.tag(),
                join(&n.incoming),
                join(&n.outgoing),
                n.owes.join(",")
            );
        }
        for t in &self.transmissions {
            let _ = writeln!(
                s,
                "tx {} {} {}{} {}",
                t.link,
                t.slot,
                if t.legit { 'L' } else { '-' },
                if t.eav { 'E' } else { '-' },
                t.row.to_hex()
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Transcript, FieldError> {
        let bad = |line: usize, what: &str| FieldError::Malformed(format!("line {}: {what}", line + 1));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(bad(0, "missing header")),
        }
        let mut tr = Transcript::default();
        let mut have_basis = false;
        for (ln, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("basis") => {
                    let mut blocks = Vec::new();
                    for f in parts {
                        let mut it = f.split(':');
                        let (Some(name), Some(len), Some(kind), None) = (it.next(), it.next(), it.next(), it.next())
                        else {
                            return Err(bad(ln, "basis block must be name:len:kind"));
                        };
                        let len = len.parse().map_err(|_| bad(ln, "bad block length"))?;
                        let message = match kind {
                            "m" => true,
                            "r" => false,
                            _ => return Err(bad(ln, "block kind must be m or r")),
                        };
                        blocks.push(BasisBlock {
                            name: name.to_string(),
                            len,
                            message,
                        });
                    }
                    tr.layout = BasisLayout::new(blocks);
                    have_basis = true;
                }
                Some("node") => {
                    let f: Vec<&str> = parts.collect();
                    if f.len() != 5 {
                        return Err(bad(ln, "node needs name role in= out= owes="));
                    }
                    let role = match f[1] {
                        "source" => NodeRole::Source,
                        "relay" => NodeRole::Relay,
                        "dest" => NodeRole::Dest,
                        _ => return Err(bad(ln, "unknown node role")),
                    };
                    let field = |s: &str, key: &str| -> Result<String, FieldError> {
                        s.strip_prefix(key)
                            .map(str::to_string)
                            .ok_or_else(|| bad(ln, &format!("expected {key}")))
                    };
                    let links = |s: String| -> Result<Vec<u8>, FieldError> {
                        s.split(',')
                            .filter(|x| !x.is_empty())
                            .map(|x| x.parse().map_err(|_| bad(ln, "bad link id")))
                            .collect()
                    };
                    tr.nodes.push(NodeInfo {
                        name: f[0].to_string(),
                        role,
                        incoming: links(field(f[2], "in=")?)?,
                        outgoing: links(field(f[3], "out=")?)?,
                        owes: field(f[4], "owes=")?
                            .split(',')
                            .filter(|x| !x.is_empty())
                            .map(str::to_string)
                            .collect(),
                    });
                }
                Some("tx") => {
                    let f: Vec<&str> = parts.collect();
                    if f.len() != 4 || f[2].len() != 2 {
                        return Err(bad(ln, "tx needs link slot flags hex"));
                    }
                    let flags = f[2].as_bytes();
                    let legit = match flags[0] {
                        b'L' => true,
                        b'-' => false,
                        _ => return Err(bad(ln, "bad legit flag")),
                    };
                    let eav = match flags[1] {
                        b'E' => true,
                        b'-' => false,
                        _ => return Err(bad(ln, "bad eavesdropper flag")),
                    };
                    tr.transmissions.push(Transmission {
                        link: f[0].parse().map_err(|_| bad(ln, "bad link"))?,
                        slot: f[1].parse().map_err(|_| bad(ln, "bad slot"))?,
                        legit,
                        eav,
                        row: CoeffRow::from_hex(f[3]).ok_or_else(|| bad(ln, "bad hex row"))?,
                    });
                }
                _ => return Err(bad(ln, "unknown record")),
            }
        }
        if !have_basis {
            return Err(FieldError::Malformed("missing basis line".into()));
        }
        tr.validate()?;
        Ok(tr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecrecyVerdict {
    pub link: u8,
    pub rows: usize,
    pub rank: usize,
    /// Rank of the randomness block alone.
    pub randomness_rank: usize,
    pub secure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeVerdict {
    pub node: String,
    pub owed: usize,
    pub rank: usize,
    /// `rank - rank(randomness block)`: dimension of pure-message functionals
    /// in the received span.
    pub message_rank: usize,
    /// Owed symbols not in the received span.
    pub missing: usize,
    pub decodable: bool,
}

// Keeps only columns some row touches, randomness columns first.
fn compact(rows: &[CoeffRow], extra_cols: &[usize], mask: &[bool]) -> (Vec<usize>, usize) {
    let mut used = vec![false; mask.len()];
    for r in rows {
        let (lo, hi) = r.span();
        for (c, &b) in r.as_slice()[lo..hi].iter().enumerate() {
            if b != 0 {
                used[lo + c] = true;
            }
        }
    }
    for &c in extra_cols {
        used[c] = true;
    }
    let rand: Vec<usize> = (0..mask.len()).filter(|&c| used[c] && !mask[c]).collect();
    let split = rand.len();
    let mut map = rand;
    map.extend((0..mask.len()).filter(|&c| used[c] && mask[c]));
    (map, split)
}

fn eliminate(rows: &[CoeffRow], map: &[usize]) -> Echelon {
    let mut e = Echelon::new(map.len());
    for r in rows {
        e.insert(r.gather(map));
    }
    e
}

/// Perfect-secrecy test against the eavesdropper on `eav_link`: secure iff
/// the message columns add no rank to its observations.
pub fn check_secrecy(tr: &Transcript, eav_link: u8) -> Result<SecrecyVerdict, FieldError> {
    tr.validate()?;
    let rows = tr.eavesdropper_rows(eav_link);
    let mask = tr.layout.message_mask();
    let (map, split) = compact(&rows, &[], &mask);
    let e = eliminate(&rows, &map);
    let randomness_rank = e.pivot_columns().iter().filter(|&&c| c < split).count();
    Ok(SecrecyVerdict {
        link: eav_link,
        rows: rows.len(),
        rank: e.rank(),
        randomness_rank,
        secure: randomness_rank == e.rank(),
    })
}

/// Decodability test for node `dest`: every owed message symbol must be a
/// linear functional of what it received.
pub fn check_decodability(tr: &Transcript, dest: &str) -> Result<DecodeVerdict, FieldError> {
    tr.validate()?;
    let node = tr
        .node(dest)
        .ok_or_else(|| FieldError::Malformed(format!("no node named {dest}")))?;
    let owed_cols: Vec<usize> = node
        .owes
        .iter()
        .flat_map(|b| tr.layout.columns(b).expect("validated"))
        .collect();
    let rows = tr.received_rows(node);
    let mask = tr.layout.message_mask();
    let (map, split) = compact(&rows, &owed_cols, &mask);
    let e = eliminate(&rows, &map);
    let randomness_rank = e.pivot_columns().iter().filter(|&&c| c < split).count();
    let width = map.len();
    let missing = owed_cols
        .iter()
        .filter(|&&c| {
            let pos = map.iter().position(|&m| m == c).expect("owed column kept");
            !e.contains(&CoeffRow::unit(width, pos))
        })
        .count();
    Ok(DecodeVerdict {
        node: node.name.clone(),
        owed: owed_cols.len(),
        rank: e.rank(),
        message_rank: e.rank() - randomness_rank,
        missing,
        decodable: missing == 0,
    })
}

/// Rows a relay emits must lie in the span of rows it received.
pub fn relay_rows_in_span(tr: &Transcript, relay: &str) -> Result<bool, FieldError> {
    let node = tr
        .node(relay)
        .ok_or_else(|| FieldError::Malformed(format!("no node named {relay}")))?;
    let received = tr.received_rows(node);
    let mut e = Echelon::new(tr.layout.dim());
    for r in received {
        e.insert(r);
    }
    Ok(tr
        .transmissions
        .iter()
        .filter(|t| node.outgoing.contains(&t.link))
        .all(|t| e.contains(&t.row)))
}
