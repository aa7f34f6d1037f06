//! Single-link protocol phases. Each phase consumes slots from a
//! [`LinkChannel`] and logs every slot so field rows can be attached later.

use serde::Serialize;

use super::channel::{LinkChannel, SlotOutcome};
use super::SimError;

/// Sends that fit the expansion bound: `floor(backing / (1 - delta*delta_e))`.
pub fn expansion_bound(backing: usize, ch: &LinkChannel) -> usize {
    let q = ch.params.either_receives();
    if q <= 0.0 {
        // nobody ever receives; any number of sends is harmless
        return usize::MAX;
    }
    ((backing as f64) / q + 1e-9).floor() as usize
}

/// Outcome of retransmit-until-acknowledged delivery of a packet batch.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ArqResult {
    pub packets: usize,
    pub slots_used: u64,
    pub eav_catch_count: usize,
    /// Per packet: the eavesdropper saw at least one copy.
    pub eav_flags: Vec<bool>,
    /// `(packet index, outcome)` for every slot, in slot order.
    #[serde(skip)]
    pub attempts: Vec<(usize, SlotOutcome)>,
}

pub fn run_arq(packet_count: usize, ch: &mut LinkChannel) -> Result<ArqResult, SimError> {
    if packet_count == 0 {
        return Ok(ArqResult::default());
    }
    if ch.params.delta >= 1.0 {
        return Err(SimError::DeadLink { link: ch.link });
    }
    let start = ch.slots_used();
    let mut r = ArqResult {
        packets: packet_count,
        eav_flags: vec![false; packet_count],
        ..ArqResult::default()
    };
    for p in 0..packet_count {
        loop {
            let o = ch.transmit();
            r.attempts.push((p, o));
            r.eav_flags[p] |= o.eav_received;
            if o.legit_received {
                break;
            }
        }
    }
    r.eav_catch_count = r.eav_flags.iter().filter(|&&f| f).count();
    r.slots_used = ch.slots_used() - start;
    Ok(r)
}

/// A link's distilled key material: packets the legitimate receiver got
/// and the eavesdropper missed, plus every packet sent to get there.
///
/// When the sends are combinations of a finite pool of `dims` symbols, the
/// secret dimension is `min(union, dims) - min(eav, dims)`, where `union`
/// counts sends anyone received. It equals the plain tally while
/// `union <= dims`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct KeyPool {
    pub link: u8,
    pub target: usize,
    pub secret_count: usize,
    /// Send indices the legitimate receiver got.
    pub backing: Vec<usize>,
    #[serde(skip)]
    pub sends: Vec<SlotOutcome>,
    pub slots_used: u64,
    /// Sends the eavesdropper got.
    pub eav_count: usize,
    /// Sends the legitimate receiver or the eavesdropper got.
    pub union_count: usize,
    /// Size of the symbol pool the sends combine, if finite.
    pub dims: Option<usize>,
    /// Stopped before reaching `target`.
    pub shortfall: bool,
}

impl KeyPool {
    fn empty(link: u8, dims: Option<usize>) -> Self {
        Self {
            link,
            dims,
            ..Self::default()
        }
    }

    fn record(&mut self, o: SlotOutcome) {
        if o.legit_received {
            self.backing.push(self.sends.len());
        }
        self.eav_count += o.eav_received as usize;
        self.union_count += (o.legit_received || o.eav_received) as usize;
        let tally = self.union_count - self.eav_count;
        self.secret_count = match self.dims {
            None => tally,
            Some(d) => self.union_count.min(d) - self.eav_count.min(d),
        };
        self.sends.push(o);
        self.slots_used += 1;
    }

    /// No further send can raise `secret_count`.
    fn saturated(&self) -> bool {
        self.dims.is_some_and(|d| self.union_count >= d)
    }

    pub fn backing_count(&self) -> usize {
        self.backing.len()
    }
}

/// Broadcasts fresh random packets until `k_target` of them are secret.
pub fn run_key_sharing_broadcast(k_target: usize, ch: &mut LinkChannel) -> Result<KeyPool, SimError> {
    let mut pool = KeyPool::empty(ch.link, None);
    pool.target = k_target;
    if k_target == 0 {
        return Ok(pool);
    }
    if ch.params.delta_e <= 0.0 || ch.params.delta >= 1.0 {
        return Err(SimError::KeyUnreachable { link: ch.link });
    }
    while pool.secret_count < k_target {
        pool.record(ch.transmit());
    }
    Ok(pool)
}

/// Sends exactly `send_count` combinations of a relay's `backing` packets.
pub fn run_relay_expansion(backing: usize, send_count: usize, ch: &mut LinkChannel) -> Result<KeyPool, SimError> {
    let bound = expansion_bound(backing, ch);
    if send_count > bound {
        return Err(SimError::ExpansionBound {
            link: ch.link,
            requested: send_count,
            bound,
        });
    }
    let mut pool = KeyPool::empty(ch.link, Some(backing));
    for _ in 0..send_count {
        pool.record(ch.transmit());
    }
    pool.target = pool.secret_count;
    Ok(pool)
}

/// Relay broadcast driven by the secret tally: sends combinations of
/// `backing` packets until `k_target` are secret, stopping early (and
/// flagging a shortfall) once the pool is saturated.
pub fn run_relay_until(backing: usize, k_target: usize, ch: &mut LinkChannel) -> KeyPool {
    let mut pool = KeyPool::empty(ch.link, Some(backing));
    pool.target = k_target;
    // with no chance of a secret send the loop would never end
    let live = ch.params.secret_per_slot() > 0.0;
    while live && pool.secret_count < k_target && !pool.saturated() {
        pool.record(ch.transmit());
    }
    pool.shortfall = pool.secret_count < k_target;
    pool
}

/// Source (or first relay) phase with a finite randomness budget: `e_count`
/// raw packets by ARQ, then combinations of the other `budget - e_count`
/// packets until the combined secret dimension reaches
/// `k3_target + ceil(e_count * (1-delta)*delta_e / (1-delta*delta_e))`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SourcePhase {
    pub budget: usize,
    pub arq: ArqResult,
    pub broadcast: KeyPool,
    pub target: usize,
    /// Raw packets the eavesdropper missed plus secret broadcasts.
    pub secret_count: usize,
    /// Raw packets plus received broadcasts, as held by the receiver.
    pub backing_count: usize,
    /// Randomness symbols revealed to anyone: raw packets plus the
    /// broadcast union, capped by the pool.
    pub randomness_used: usize,
    pub shortfall: bool,
}

pub fn run_ry_source_phase(
    d0_budget: usize,
    e_count: usize,
    k3_target: usize,
    ch: &mut LinkChannel,
) -> Result<SourcePhase, SimError> {
    if e_count > d0_budget {
        return Err(SimError::ExtraExceedsBudget {
            extra: e_count,
            budget: d0_budget,
        });
    }
    let arq = run_arq(e_count, ch)?;
    let raw_secret = e_count - arq.eav_catch_count;
    let target = k3_target + (e_count as f64 * ch.params.arq_secret_fraction() - 1e-9).ceil().max(0.0) as usize;
    let rest = d0_budget - e_count;
    let mut bc = KeyPool::empty(ch.link, Some(rest));
    bc.target = target.saturating_sub(raw_secret);
    let live = ch.params.secret_per_slot() > 0.0;
    while live && raw_secret + bc.secret_count < target && !bc.saturated() {
        bc.record(ch.transmit());
    }
    let secret_count = raw_secret + bc.secret_count;
    bc.shortfall = secret_count < target;
    Ok(SourcePhase {
        budget: d0_budget,
        target,
        secret_count,
        backing_count: e_count + bc.backing_count(),
        randomness_used: e_count + bc.union_count.min(rest),
        shortfall: bc.shortfall,
        arq,
        broadcast: bc,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MessagePhase {
    pub messages: usize,
    pub arq: ArqResult,
    pub slots_used: u64,
    /// Key packets the eavesdropper effectively learned.
    pub key_consumed: usize,
    pub key_available: usize,
    /// More ciphertexts caught than secret key packets available.
    pub exhausted: bool,
}

/// One-time-padded ARQ delivery of `messages` packets against a pool of
/// `pool_secret` secret key packets.
pub fn run_message_phase(messages: usize, pool_secret: usize, ch: &mut LinkChannel) -> Result<MessagePhase, SimError> {
    let arq = run_arq(messages, ch)?;
    Ok(MessagePhase {
        messages,
        slots_used: arq.slots_used,
        key_consumed: arq.eav_catch_count,
        key_available: pool_secret,
        exhausted: arq.eav_catch_count > pool_secret,
        arq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ChannelParams;

    fn link(d: f64, de: f64, seed: u64) -> LinkChannel {
        LinkChannel::new(ChannelParams::new(d, de).unwrap(), seed, 1)
    }

    #[test]
    fn arq_perfect_link_uses_one_slot_each() {
        let mut ch = link(0.0, 0.3, 1);
        let r = run_arq(1000, &mut ch).unwrap();
        assert_eq!(r.slots_used, 1000);
        let frac = r.eav_catch_count as f64 / 1000.0;
        assert!((frac - 0.7).abs() < 0.06);
    }

    #[test]
    fn arq_blind_eavesdropper() {
        let mut ch = link(0.6, 1.0, 2);
        let r = run_arq(500, &mut ch).unwrap();
        assert_eq!(r.eav_catch_count, 0);
        assert!(r.slots_used >= 500);
    }

    #[test]
    fn arq_rejects_dead_link_and_zero_is_empty() {
        let mut ch = link(1.0, 0.5, 2);
        assert_eq!(run_arq(0, &mut ch).unwrap(), ArqResult::default());
        assert!(matches!(run_arq(1, &mut ch), Err(SimError::DeadLink { link: 1 })));
    }

    #[test]
    fn key_sharing_edge_cases() {
        let mut ch = link(0.2, 0.0, 3);
        assert!(run_key_sharing_broadcast(1, &mut ch).is_err());
        let p = run_key_sharing_broadcast(0, &mut ch).unwrap();
        assert_eq!((p.secret_count, p.slots_used), (0, 0));
        let mut ch = link(0.0, 1.0, 3);
        let p = run_key_sharing_broadcast(50, &mut ch).unwrap();
        assert_eq!(p.slots_used, 50);
        assert_eq!(p.backing_count(), 50);
    }

    #[test]
    fn relay_expansion_bound() {
        let mut ch = link(0.0, 0.0, 4);
        assert_eq!(expansion_bound(100, &ch), 100);
        assert!(run_relay_expansion(100, 100, &mut ch).is_ok());
        assert!(matches!(
            run_relay_expansion(100, 101, &mut ch),
            Err(SimError::ExpansionBound { bound: 100, .. })
        ));
        assert_eq!(run_relay_expansion(100, 0, &mut ch).unwrap().secret_count, 0);
    }

    #[test]
    fn relay_until_flags_shortfall() {
        let mut ch = link(0.5, 0.5, 5);
        let p = run_relay_until(10, 1000, &mut ch);
        assert!(p.shortfall);
        assert_eq!(p.union_count, 10);
        assert!(p.secret_count <= 10 - p.eav_count.min(10));

    }

    #[test]
    fn pool_secret_matches_dimension_count() {
        // past saturation the eavesdropper's view eats into the pool
        let mut ch = link(0.5, 0.5, 8);
        let mut p = run_relay_expansion(40, 0, &mut ch).unwrap();
        for _ in 0..200 {
            p.record(ch.transmit());
            let d = 40;
            let expect = p.union_count.min(d) - p.eav_count.min(d);
            assert_eq!(p.secret_count, expect);
            if p.union_count <= d {
                assert_eq!(p.secret_count, p.sends.iter().filter(|o| o.secret()).count());
            }
        }
    }

    #[test]
    fn source_phase_budget_checks() {
        let mut ch = link(0.3, 0.15, 6);
        assert!(run_ry_source_phase(5, 6, 0, &mut ch).is_err());
        let s = run_ry_source_phase(1000, 1000, 0, &mut ch).unwrap();
        assert!(s.broadcast.sends.is_empty());
        assert_eq!(s.randomness_used, 1000);
        let s = run_ry_source_phase(4000, 0, 50, &mut ch).unwrap();
        assert!(s.secret_count >= 50 && s.randomness_used <= 4000);
    }

    #[test]
    fn message_phase_accounting() {
        let mut ch = link(0.2, 1.0, 7);
        let m = run_message_phase(100, 0, &mut ch).unwrap();
        assert_eq!(m.key_consumed, 0);
        assert!(!m.exhausted);
        let m = run_message_phase(0, 0, &mut ch).unwrap();
        assert_eq!(m.slots_used, 0);
        let mut ch = link(0.0, 0.0, 7);
        let m = run_message_phase(10, 3, &mut ch).unwrap();
        assert!(m.exhausted);
    }
}
