//! Per-topology orchestration of key-sharing and message phases.
//!
//! A run first executes every link's channel process in counting form.
//! Field mode then attaches coefficient rows to the logged slots, so both
//! modes see the same random stream.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::field::{
    check_decodability, check_secrecy, expand_rows, BasisBlock, BasisLayout, CoeffRow, CoefficientSource,
    DecodeVerdict, NodeInfo, NodeRole, SecrecyVerdict, Transcript, Transmission,
};
use crate::lp::{check_feasible, RegionPoint, Weights};
use crate::models::{build_lp, NetworkModel, Topology};

use super::channel::LinkChannel;
use super::phases::{
    run_key_sharing_broadcast, run_message_phase, run_relay_until, run_ry_source_phase, ArqResult, KeyPool,
    MessagePhase, SourcePhase,
};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Counting,
    Field,
}

impl SimMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "counting" => Some(SimMode::Counting),
            "field" => Some(SimMode::Field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub net: NetworkModel,
    /// Rates and auxiliaries to run at; must be feasible for `net`.
    pub point: RegionPoint,
    /// Slot budget per link.
    pub n: u64,
    pub seed: u64,
    pub mode: SimMode,
    /// Margin the point was scaled by; links may overrun the horizon by
    /// `(1 - margin) * n` slots before the run counts as truncated.
    pub margin: f64,
    /// Use raw received key packets as pads, skipping amplification.
    pub unsafe_raw_keys: bool,
}

impl SimConfig {
    pub fn new(net: NetworkModel, point: RegionPoint, n: u64, seed: u64) -> Self {
        Self {
            net,
            point,
            n,
            seed,
            mode: SimMode::Counting,
            margin: 0.95,
            unsafe_raw_keys: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LinkReport {
    pub link: u8,
    pub key_slots: u64,
    pub message_slots: u64,
    pub total_slots: u64,
    pub key_target: usize,
    /// Secret key packets distilled (per-link eavesdropper hypothesis).
    pub key_generated: usize,
    /// Ciphertexts that eavesdropper caught.
    pub key_consumed: usize,
    pub messages: usize,
    pub sends: usize,
    /// Key-phase packets the legitimate receiver holds.
    pub backing: usize,
    pub exhausted: bool,
    pub shortfall: bool,
}

/// Where randomness came from and how much of it was spent.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RandomnessReport {
    /// Symbols available to the first finite-budget sender (the source for
    /// RY, relay `M1` for X).
    pub budget: usize,
    pub arq_raw: usize,
    /// `ceil(sends * (1 - delta*delta_e))` on the budget-limited link.
    pub expansion_used: usize,
    pub total_used: usize,
    /// X only: `(k1/dE1 + k2/dE2) * n` at the operating point.
    pub expected_budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub topology: Topology,
    pub n: u64,
    pub seed: u64,
    pub mode: SimMode,
    pub margin: f64,
    pub target_rates: [f64; 2],
    pub messages: [usize; 2],
    pub delivered: [usize; 2],
    /// Slots the run occupied: the horizon, or the longest per-link
    /// timeline if one ran past it. Links run in parallel, and a run limited
    /// by randomness rather than time still occupies the whole horizon.
    pub slots_used_total: u64,
    pub rates: [f64; 2],
    pub links: Vec<LinkReport>,
    pub randomness: Option<RandomnessReport>,
    pub truncated: bool,
    pub key_exhausted: bool,
    pub shortfall: bool,
    pub unsafe_raw_keys: bool,
    pub secrecy: Vec<SecrecyVerdict>,
    pub decodability: Vec<DecodeVerdict>,
}

impl SimReport {
    pub fn sum_rate(&self) -> f64 {
        self.rates[0] + self.rates[1]
    }

    /// Truncation, key exhaustion or randomness shortfall.
    pub fn flagged(&self) -> bool {
        self.truncated || self.key_exhausted || self.shortfall
    }

    /// Every verdict passed (vacuously true in counting mode).
    pub fn verified(&self) -> bool {
        self.secrecy.iter().all(|v| v.secure) && self.decodability.iter().all(|v| v.decodable)
    }

    pub fn link(&self, link: u8) -> Option<&LinkReport> {
        self.links.iter().find(|l| l.link == link)
    }
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub report: SimReport,
    pub transcript: Option<Transcript>,
}

#[derive(Debug, Clone)]
enum KeyPhase {
    Broadcast(KeyPool),
    Source(SourcePhase),
}

#[derive(Debug, Clone)]
struct LinkRun {
    key: KeyPhase,
    msg: MessagePhase,
}

impl LinkRun {
    fn key_slots(&self) -> u64 {
        match &self.key {
            KeyPhase::Broadcast(p) => p.slots_used,
            KeyPhase::Source(s) => s.arq.slots_used + s.broadcast.slots_used,
        }
    }

    fn secret(&self) -> usize {
        match &self.key {
            KeyPhase::Broadcast(p) => p.secret_count,
            KeyPhase::Source(s) => s.secret_count,
        }
    }

    fn report(&self, link: u8) -> LinkReport {
        let (target, sends, backing, shortfall) = match &self.key {
            KeyPhase::Broadcast(p) => (p.target, p.sends.len(), p.backing_count(), p.shortfall),
            KeyPhase::Source(s) => (
                s.target,
                s.broadcast.sends.len(),
                s.backing_count,
                s.shortfall,
            ),
        };
        let key_slots = self.key_slots();
        LinkReport {
            link,
            key_slots,
            message_slots: self.msg.slots_used,
            total_slots: key_slots + self.msg.slots_used,
            key_target: target,
            key_generated: self.secret(),
            key_consumed: self.msg.key_consumed,
            messages: self.msg.messages,
            sends,
            backing,
            exhausted: self.msg.exhausted,
            shortfall,
        }
    }
}

struct Counts {
    n1: usize,
    n2: usize,
    keys: BTreeMap<u8, usize>,
    extra: usize,
    budget: usize,
}

fn counts(cfg: &SimConfig) -> Counts {
    let n = cfg.n as f64;
    let layout = cfg.net.layout();
    let floor = |x: f64| (x * n + 1e-9).floor().max(0.0) as usize;
    let ceil = |x: f64| (x * n - 1e-9).ceil().max(0.0) as usize;
    let mut keys = BTreeMap::new();
    for link in 1..=cfg.net.topology().link_count() as u8 {
        let k = cfg.point.aux(layout.names()[layout.key(link as usize)]).unwrap_or(0.0);
        keys.insert(link, ceil(k));
    }
    Counts {
        n1: floor(cfg.point.r1),
        n2: floor(cfg.point.r2),
        keys,
        extra: floor(cfg.point.aux("e").unwrap_or(0.0)),
        budget: cfg.net.d0().map_or(0, floor),
    }
}

fn point_vector(net: &NetworkModel, p: &RegionPoint) -> Result<Vec<f64>, SimError> {
    let layout = net.layout();
    let mut x = vec![p.r1, p.r2];
    for name in &layout.names()[2..] {
        x.push(p.aux(name).ok_or(SimError::MissingVariable(name.to_string()))?);
    }
    Ok(x)
}

/// Runs one trial of the achieving scheme.
pub fn run_scheme(cfg: &SimConfig) -> Result<SimRun, SimError> {
    let x = point_vector(&cfg.net, &cfg.point)?;
    if !check_feasible(&build_lp(&cfg.net, Weights::SUM), &x, 1e-9) {
        return Err(SimError::InfeasiblePoint {
            r1: cfg.point.r1,
            r2: cfg.point.r2,
        });
    }
    if !(cfg.margin > 0.0 && cfg.margin <= 1.0) {
        return Err(SimError::BadMargin(cfg.margin));
    }
    let topo = cfg.net.topology();
    let c = counts(cfg);
    let mut report = SimReport {
        topology: topo,
        n: cfg.n,
        seed: cfg.seed,
        mode: cfg.mode,
        margin: cfg.margin,
        target_rates: [cfg.point.r1, cfg.point.r2],
        messages: [c.n1, c.n2],
        delivered: [0, 0],
        slots_used_total: 0,
        rates: [0.0, 0.0],
        links: Vec::new(),
        randomness: None,
        truncated: cfg.n == 0,
        key_exhausted: false,
        shortfall: false,
        unsafe_raw_keys: cfg.unsafe_raw_keys,
        secrecy: Vec::new(),
        decodability: Vec::new(),
    };
    if cfg.n == 0 {
        return Ok(SimRun {
            report,
            transcript: None,
        });
    }

    let mut chans: Vec<LinkChannel> = (1..=topo.link_count() as u8)
        .map(|l| LinkChannel::new(cfg.net.channel(l as usize), cfg.seed, l))
        .collect();
    macro_rules! chan {
        ($l:expr) => {
            &mut chans[$l as usize - 1]
        };
    }

    let k = |l: u8| c.keys[&l];
    let mut runs: BTreeMap<u8, LinkRun> = BTreeMap::new();
    match topo {
        Topology::Y => {
            for (l, msgs) in [(1u8, c.n1), (2, c.n2)] {
                let pool = run_key_sharing_broadcast(k(l), chan!(l))?;
                let msg = run_message_phase(msgs, pool.secret_count, chan!(l))?;
                runs.insert(l, LinkRun { key: KeyPhase::Broadcast(pool), msg });
            }
            let backing = backing_of(&runs[&1]) + backing_of(&runs[&2]);
            let pool = run_relay_until(backing, k(3), chan!(3));
            let msg = run_message_phase(c.n1 + c.n2, pool.secret_count, chan!(3))?;
            runs.insert(3, LinkRun { key: KeyPhase::Broadcast(pool), msg });
        }
        Topology::Ry => {
            let e = c.extra.min(c.budget);
            let src = run_ry_source_phase(c.budget, e, k(3), chan!(3))?;
            let msg = run_message_phase(c.n1 + c.n2, src.secret_count, chan!(3))?;
            report.randomness = Some(RandomnessReport {
                budget: src.budget,
                arq_raw: e,
                expansion_used: src.randomness_used - e,
                total_used: src.randomness_used,
                expected_budget: None,
            });
            let backing = src.backing_count;
            runs.insert(3, LinkRun { key: KeyPhase::Source(src), msg });
            for (l, msgs) in [(1u8, c.n1), (2, c.n2)] {
                let pool = run_relay_until(backing, k(l), chan!(l));
                let msg = run_message_phase(msgs, pool.secret_count, chan!(l))?;
                runs.insert(l, LinkRun { key: KeyPhase::Broadcast(pool), msg });
            }
        }
        Topology::X => {
            for (l, msgs) in [(1u8, c.n1), (2, c.n2)] {
                let pool = run_key_sharing_broadcast(k(l), chan!(l))?;
                let msg = run_message_phase(msgs, pool.secret_count, chan!(l))?;
                runs.insert(l, LinkRun { key: KeyPhase::Broadcast(pool), msg });
            }
            let p = backing_of(&runs[&1]) + backing_of(&runs[&2]);
            if c.extra > p {
                report.shortfall = true;
            }
            let e = c.extra.min(p);
            let src = run_ry_source_phase(p, e, k(3), chan!(3))?;
            let msg = run_message_phase(c.n1 + c.n2, src.secret_count, chan!(3))?;
            let kv = |l: usize| cfg.point.aux(&format!("k{l}")).unwrap_or(0.0);
            let de = |l: usize| cfg.net.channel(l).delta_e;
            let expected: f64 = [1, 2]
                .into_iter()
                .filter(|&l| de(l) > 0.0)
                .map(|l| kv(l) / de(l))
                .sum::<f64>()
                * cfg.n as f64;
            report.randomness = Some(RandomnessReport {
                budget: p,
                arq_raw: e,
                expansion_used: src.randomness_used - e,
                total_used: src.randomness_used,
                expected_budget: Some(expected),
            });
            let backing = src.backing_count;
            runs.insert(3, LinkRun { key: KeyPhase::Source(src), msg });
            for (l, msgs) in [(4u8, c.n1), (5, c.n2)] {
                let pool = run_relay_until(backing, k(l), chan!(l));
                let msg = run_message_phase(msgs, pool.secret_count, chan!(l))?;
                runs.insert(l, LinkRun { key: KeyPhase::Broadcast(pool), msg });
            }
        }
    }

    report.links = runs.iter().map(|(&l, r)| r.report(l)).collect();
    report.slots_used_total = report.links.iter().map(|l| l.total_slots).max().unwrap_or(0).max(cfg.n);
    let allowance = cfg.n + ((1.0 - cfg.margin) * cfg.n as f64).floor() as u64;
    report.truncated = report.links.iter().any(|l| l.total_slots > allowance);
    report.key_exhausted = report.links.iter().any(|l| l.exhausted);
    report.shortfall |= report.links.iter().any(|l| l.shortfall);
    report.delivered = [c.n1, c.n2];
    if report.slots_used_total > 0 {
        let t = report.slots_used_total as f64;
        report.rates = [c.n1 as f64 / t, c.n2 as f64 / t];
    }

    let transcript = match cfg.mode {
        SimMode::Counting => None,
        SimMode::Field => {
            let tr = build_transcript(cfg, &c, &runs);
            for l in 1..=topo.link_count() as u8 {
                report.secrecy.push(check_secrecy(&tr, l)?);
            }
            let dests: Vec<String> = tr.destinations().map(|d| d.name.clone()).collect();
            for d in dests {
                report.decodability.push(check_decodability(&tr, &d)?);
            }
            Some(tr)
        }
    };
    Ok(SimRun { report, transcript })
}

fn backing_of(run: &LinkRun) -> usize {
    match &run.key {
        KeyPhase::Broadcast(p) => p.backing_count(),
        KeyPhase::Source(s) => s.backing_count,
    }
}

/// Runs `seeds` consecutive seeds starting at `cfg.seed`, in parallel.
pub fn run_seeds(cfg: &SimConfig, seeds: u64) -> Vec<Result<SimRun, SimError>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).max(1);
    let mut out: Vec<Option<Result<SimRun, SimError>>> = (0..seeds).map(|_| None).collect();
    let next = std::sync::atomic::AtomicU64::new(0);
    let results = std::sync::Mutex::new(&mut out);
    std::thread::scope(|s| {
        for _ in 0..workers.min(seeds as usize) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= seeds {
                    break;
                }
                let mut c = cfg.clone();
                c.seed = cfg.seed.wrapping_add(i);
                let r = run_scheme(&c);
                results.lock().expect("no panics while holding the lock")[i as usize] = Some(r);
            });
        }
    });
    out.into_iter().map(|r| r.expect("every seed ran")).collect()
}

// ---- field rows ----

struct Builder<'a> {
    cfg: &'a SimConfig,
    tr: Transcript,
    dim: usize,
}

impl Builder<'_> {
    fn source(&self, link: u8) -> CoefficientSource {
        CoefficientSource::new(self.cfg.seed ^ 0x5eed_0000_0000 ^ ((link as u64) << 32))
    }

    fn units(&self, offset: usize, count: usize) -> Vec<CoeffRow> {
        (0..count).map(|i| CoeffRow::unit(self.dim, offset + i)).collect()
    }

    fn push(&mut self, link: u8, slot: u64, legit: bool, eav: bool, row: &CoeffRow) {
        self.tr.push(Transmission {
            link,
            slot,
            legit,
            eav,
            row: row.clone(),
        });
    }

    /// Emits broadcast rows; returns what the legitimate receiver holds.
    fn broadcast(&mut self, link: u8, pool: &KeyPool, rows: &[CoeffRow], slot0: u64) -> Vec<CoeffRow> {
        for (i, o) in pool.sends.iter().enumerate() {
            self.push(link, slot0 + i as u64, o.legit_received, o.eav_received, &rows[i]);
        }
        pool.backing.iter().map(|&i| rows[i].clone()).collect()
    }

    fn arq(&mut self, link: u8, arq: &ArqResult, rows: &[CoeffRow], slot0: u64) {
        for (s, (p, o)) in arq.attempts.iter().enumerate() {
            self.push(link, slot0 + s as u64, o.legit_received, o.eav_received, &rows[*p]);
        }
    }

    /// Pads for `messages` ciphertexts from what the receiver holds.
    fn keys(&self, held: &[CoeffRow], secret: usize, messages: usize, src: &mut CoefficientSource) -> Vec<CoeffRow> {
        if messages == 0 {
            return Vec::new();
        }
        if self.cfg.unsafe_raw_keys {
            return (0..messages)
                .map(|i| {
                    if held.is_empty() {
                        CoeffRow::zeros(self.dim)
                    } else {
                        held[i % held.len()].clone()
                    }
                })
                .collect();
        }
        let secret = secret.min(held.len());
        if secret == 0 {
            return vec![CoeffRow::zeros(self.dim); messages];
        }
        let distilled = expand_rows(held, secret, src);
        expand_rows(&distilled, messages, src)
    }

    fn ciphertexts(&self, msg_cols: &[usize], keys: &[CoeffRow]) -> Vec<CoeffRow> {
        msg_cols
            .iter()
            .zip(keys)
            .map(|(&c, k)| {
                let mut r = k.clone();
                r.set(c, r.get(c) ^ 1);
                r
            })
            .collect()
    }

    /// Key phase then message phase of one broadcast-keyed link.
    fn keyed_link(&mut self, link: u8, run: &LinkRun, send_rows: &[CoeffRow], msg_cols: &[usize]) -> Vec<CoeffRow> {
        let KeyPhase::Broadcast(pool) = &run.key else {
            unreachable!("broadcast-keyed link")
        };
        let held = self.broadcast(link, pool, send_rows, 0);
        let mut src = self.source(link);
        let keys = self.keys(&held, pool.secret_count, msg_cols.len(), &mut src);
        let ct = self.ciphertexts(msg_cols, &keys);
        self.arq(link, &run.msg.arq, &ct, pool.sends.len() as u64);
        held
    }

    /// Budget-limited link: raw rows by ARQ, then combinations of `rest`.
    fn source_link(&mut self, link: u8, run: &LinkRun, raw: &[CoeffRow], rest: &[CoeffRow], msg_cols: &[usize]) -> Vec<CoeffRow> {
        let KeyPhase::Source(sp) = &run.key else {
            unreachable!("budget-limited link")
        };
        let mut src = self.source(link);
        self.arq(link, &sp.arq, raw, 0);
        let sends = if rest.is_empty() {
            Vec::new()
        } else {
            expand_rows(rest, sp.broadcast.sends.len(), &mut src)
        };
        let mut held = raw.to_vec();
        held.extend(self.broadcast(link, &sp.broadcast, &sends, sp.arq.slots_used));
        let keys = self.keys(&held, sp.secret_count, msg_cols.len(), &mut src);
        let ct = self.ciphertexts(msg_cols, &keys);
        self.arq(link, &run.msg.arq, &ct, sp.arq.slots_used + sp.broadcast.slots_used);
        held
    }

    /// Relay broadcast of combinations of `pool`.
    fn relay_link(&mut self, link: u8, run: &LinkRun, pool: &[CoeffRow], msg_cols: &[usize]) -> Vec<CoeffRow> {
        let KeyPhase::Broadcast(kp) = &run.key else {
            unreachable!("relay link")
        };
        let mut src = self.source(link + 100);
        let sends = if pool.is_empty() {
            Vec::new()
        } else {
            expand_rows(pool, kp.sends.len(), &mut src)
        };
        self.keyed_link(link, run, &sends, msg_cols)
    }
}

fn block(name: &str, len: usize, message: bool) -> BasisBlock {
    BasisBlock {
        name: name.into(),
        len,
        message,
    }
}

fn node(name: &str, role: NodeRole, incoming: &[u8], outgoing: &[u8], owes: &[&str]) -> NodeInfo {
    NodeInfo {
        name: name.into(),
        role,
        incoming: incoming.to_vec(),
        outgoing: outgoing.to_vec(),
        owes: owes.iter().map(|s| s.to_string()).collect(),
    }
}

fn sends_of(run: &LinkRun) -> usize {
    match &run.key {
        KeyPhase::Broadcast(p) => p.sends.len(),
        KeyPhase::Source(s) => s.broadcast.sends.len(),
    }
}

fn build_transcript(cfg: &SimConfig, c: &Counts, runs: &BTreeMap<u8, LinkRun>) -> Transcript {
    let topo = cfg.net.topology();
    let (n1, n2) = (c.n1, c.n2);
    let w1: Vec<usize> = (0..n1).collect();
    let w2: Vec<usize> = (n1..n1 + n2).collect();
    let both: Vec<usize> = (0..n1 + n2).collect();
    use NodeRole::*;
    let (layout, nodes) = match topo {
        Topology::Y | Topology::X => {
            let t1 = sends_of(&runs[&1]);
            let t2 = sends_of(&runs[&2]);
            let layout = BasisLayout::new(vec![
                block("W1", n1, true),
                block("W2", n2, true),
                block("T1", t1, false),
                block("T2", t2, false),
            ]);
            let nodes = if topo == Topology::Y {
                vec![
                    node("S1", Source, &[], &[1], &[]),
                    node("S2", Source, &[], &[2], &[]),
                    node("M", Relay, &[1, 2], &[3], &[]),
                    node("D", Dest, &[3], &[], &["W1", "W2"]),
                ]
            } else {
                vec![
                    node("S1", Source, &[], &[1], &[]),
                    node("S2", Source, &[], &[2], &[]),
                    node("M1", Relay, &[1, 2], &[3], &[]),
                    node("M2", Relay, &[3], &[4, 5], &[]),
                    node("D1", Dest, &[4], &[], &["W1"]),
                    node("D2", Dest, &[5], &[], &["W2"]),
                ]
            };
            (layout, nodes)
        }
        Topology::Ry => {
            let layout = BasisLayout::new(vec![
                block("W1", n1, true),
                block("W2", n2, true),
                block("D0", c.budget, false),
            ]);
            let nodes = vec![
                node("S", Source, &[], &[3], &[]),
                node("M", Relay, &[3], &[1, 2], &[]),
                node("D1", Dest, &[1], &[], &["W1"]),
                node("D2", Dest, &[2], &[], &["W2"]),
            ];
            (layout, nodes)
        }
    };
    let dim = layout.dim();
    let mut b = Builder {
        cfg,
        tr: Transcript::new(layout, nodes),
        dim,
    };
    let off = n1 + n2;
    match topo {
        Topology::Y => {
            let t1 = sends_of(&runs[&1]);
            let t2 = sends_of(&runs[&2]);
            let u1 = b.units(off, t1);
            let u2 = b.units(off + t1, t2);
            let mut m = b.keyed_link(1, &runs[&1], &u1, &w1);
            m.extend(b.keyed_link(2, &runs[&2], &u2, &w2));
            b.relay_link(3, &runs[&3], &m, &both);
        }
        Topology::Ry => {
            let e = match &runs[&3].key {
                KeyPhase::Source(s) => s.arq.packets,
                KeyPhase::Broadcast(_) => 0,
            };
            let raw = b.units(off, e);
            let rest = b.units(off + e, c.budget - e);
            let m = b.source_link(3, &runs[&3], &raw, &rest, &both);
            b.relay_link(1, &runs[&1], &m, &w1);
            b.relay_link(2, &runs[&2], &m, &w2);
        }
        Topology::X => {
            let t1 = sends_of(&runs[&1]);
            let t2 = sends_of(&runs[&2]);
            let u1 = b.units(off, t1);
            let u2 = b.units(off + t1, t2);
            let mut m1 = b.keyed_link(1, &runs[&1], &u1, &w1);
            m1.extend(b.keyed_link(2, &runs[&2], &u2, &w2));
            let e = match &runs[&3].key {
                KeyPhase::Source(s) => s.arq.packets,
                KeyPhase::Broadcast(_) => 0,
            };
            let (raw, rest) = m1.split_at(e);
            let m2 = b.source_link(3, &runs[&3], raw, rest, &both);
            b.relay_link(4, &runs[&4], &m2, &w1);
            b.relay_link(5, &runs[&5], &m2, &w2);
        }
    }
    b.tr
}
