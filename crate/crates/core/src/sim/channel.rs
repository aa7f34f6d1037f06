use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::models::ChannelParams;

/// What one slot delivered to the legitimate receiver and to the
/// eavesdropper on the same link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlotOutcome {
    pub legit_received: bool,
    pub eav_received: bool,
}

impl SlotOutcome {
    /// Legitimate node got it, eavesdropper did not.
    pub fn secret(&self) -> bool {
        self.legit_received && !self.eav_received
    }
}

/// One link's erasure process with its own random stream.
///
/// Every slot draws the legitimate outcome first and the eavesdropper's
/// second, so the stream depends only on the number of slots used.
#[derive(Debug, Clone)]
pub struct LinkChannel {
    pub link: u8,
    pub params: ChannelParams,
    rng: ChaCha8Rng,
    slots: u64,
}

impl LinkChannel {
    /// Stream `link` of the ChaCha generator seeded with `seed`.
    pub fn new(params: ChannelParams, seed: u64, link: u8) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(link as u64);
        Self {
            link,
            params,
            rng,
            slots: 0,
        }
    }

    pub fn transmit(&mut self) -> SlotOutcome {
        let legit: f64 = self.rng.gen();
        let eav: f64 = self.rng.gen();
        self.slots += 1;
        SlotOutcome {
            legit_received: legit >= self.params.delta,
            eav_received: eav >= self.params.delta_e,
        }
    }

    pub fn slots_used(&self) -> u64 {
        self.slots
    }
}
