//! Capacity-region linear programs for the Y, RY and X networks.
//!
//! Link numbering follows the usual convention for these topologies:
//!
//! * Y: links 1 and 2 carry `S1 -> M` and `S2 -> M`, link 3 is `M -> D`.
//! * RY: link 3 is `S -> M`, links 1 and 2 are `M -> D1` and `M -> D2`.
//! * X: links 1, 2 are `S1 -> M1`, `S2 -> M1`; link 3 is `M1 -> M2`;
//!   links 4, 5 are `M2 -> D1`, `M2 -> D2`.
//!
//! Every constraint is stored multiplied through by its (nonnegative)
//! denominators, so erasure probabilities of exactly 0 or 1 need no special
//! casing. A dead eavesdropper channel (`delta_e = 1`) removes all secrecy
//! cost; a perfect one (`delta_e = 0`) forces the link key to zero.

mod baselines;
pub mod presets;
mod scheme_lp;

pub use baselines::{
    build_link_sharing_lp, build_path_sharing_region, link_sharing_layout, path_sharing_value,
    single_session_capacity, LinkSharingRegion,
};
pub use scheme_lp::{build_lp, build_ry_lp, build_x_lp, build_y_lp, lift_rates, scheme_rows, RowKind, SchemeRegion, TaggedRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("link {link}: {field} = {value} is outside [0, 1]")]
    Probability {
        link: usize,
        field: &'static str,
        value: f64,
    },
    #[error("{topology} network needs {expected} links, got {found}")]
    LinkCount {
        topology: Topology,
        expected: usize,
        found: usize,
    },
    #[error("d0 must be a finite nonnegative rate, got {0}")]
    BadD0(f64),
    #[error("d0 is required for the RY network")]
    MissingD0,
    #[error("d0 only applies to the RY network")]
    UnexpectedD0,
    #[error("expected a {expected} network, got {found}")]
    WrongTopology { expected: Topology, found: Topology },
    #[error("session must be 1 or 2, got {0}")]
    BadSession(u8),
    #[error("rate pair ({r1}, {r2}) is outside the capacity region")]
    OutsideRegion { r1: f64, r2: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Y,
    Ry,
    X,
}

impl Topology {
    pub fn link_count(self) -> usize {
        match self {
            Topology::Y | Topology::Ry => 3,
            Topology::X => 5,
        }
    }

    /// The link every message crosses.
    pub const SHARED_LINK: usize = 3;

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "y" => Some(Topology::Y),
            "ry" => Some(Topology::Ry),
            "x" => Some(Topology::X),
            _ => None,
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Topology::Y => "Y",
            Topology::Ry => "RY",
            Topology::X => "X",
        })
    }
}

/// One erasure link: legitimate and eavesdropper erasure probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub delta: f64,
    pub delta_e: f64,
}

impl ChannelParams {
    pub const fn new_unchecked(delta: f64, delta_e: f64) -> Self {
        Self { delta, delta_e }
    }

    pub fn new(delta: f64, delta_e: f64) -> Result<Self, ModelError> {
        let ch = Self { delta, delta_e };
        ch.validate(0)?;
        Ok(ch)
    }

    pub fn validate(&self, link: usize) -> Result<(), ModelError> {
        for (field, value) in [("delta", self.delta), ("delta_e", self.delta_e)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::Probability { link, field, value });
            }
        }
        Ok(())
    }

    /// `1 - delta * delta_e`: probability that at least one of the two
    /// receivers gets a transmission.
    pub fn either_receives(&self) -> f64 {
        1.0 - self.delta * self.delta_e
    }

    /// Probability that the legitimate node receives and the eavesdropper
    /// misses a single transmission.
    pub fn secret_per_slot(&self) -> f64 {
        (1.0 - self.delta) * self.delta_e
    }

    /// Fraction of ARQ-delivered packets the eavesdropper also gets.
    pub fn arq_catch_fraction(&self) -> f64 {
        let q = self.either_receives();
        if q == 0.0 {
            0.0
        } else {
            (1.0 - self.delta_e) / q
        }
    }

    /// Fraction of ARQ-delivered packets the eavesdropper misses.
    pub fn arq_secret_fraction(&self) -> f64 {
        let q = self.either_receives();
        if q == 0.0 {
            0.0
        } else {
            self.secret_per_slot() / q
        }
    }
}

/// One of the three two-session topologies with its link parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "topology", rename_all = "lowercase")]
pub enum NetworkModel {
    Y { channels: [ChannelParams; 3] },
    Ry { channels: [ChannelParams; 3], d0: f64 },
    X { channels: [ChannelParams; 5] },
}

impl NetworkModel {
    pub fn new(topology: Topology, channels: &[ChannelParams], d0: Option<f64>) -> Result<Self, ModelError> {
        let expected = topology.link_count();
        if channels.len() != expected {
            return Err(ModelError::LinkCount {
                topology,
                expected,
                found: channels.len(),
            });
        }
        for (i, ch) in channels.iter().enumerate() {
            ch.validate(i + 1)?;
        }
        match (topology, d0) {
            (Topology::Ry, None) => return Err(ModelError::MissingD0),
            (Topology::Ry, Some(d)) if !(d.is_finite() && d >= 0.0) => return Err(ModelError::BadD0(d)),
            (Topology::Y | Topology::X, Some(_)) => return Err(ModelError::UnexpectedD0),
            _ => {}
        }
        Ok(match topology {
            Topology::Y => NetworkModel::Y {
                channels: channels.try_into().expect("length checked"),
            },
            Topology::Ry => NetworkModel::Ry {
                channels: channels.try_into().expect("length checked"),
                d0: d0.expect("checked above"),
            },
            Topology::X => NetworkModel::X {
                channels: channels.try_into().expect("length checked"),
            },
        })
    }

    pub fn y(channels: [(f64, f64); 3]) -> Result<Self, ModelError> {
        Self::new(Topology::Y, &to_params(&channels), None)
    }

    pub fn ry(channels: [(f64, f64); 3], d0: f64) -> Result<Self, ModelError> {
        Self::new(Topology::Ry, &to_params(&channels), Some(d0))
    }

    pub fn x(channels: [(f64, f64); 5]) -> Result<Self, ModelError> {
        Self::new(Topology::X, &to_params(&channels), None)
    }

    pub fn topology(&self) -> Topology {
        match self {
            NetworkModel::Y { .. } => Topology::Y,
            NetworkModel::Ry { .. } => Topology::Ry,
            NetworkModel::X { .. } => Topology::X,
        }
    }

    pub fn channels(&self) -> &[ChannelParams] {
        match self {
            NetworkModel::Y { channels } | NetworkModel::Ry { channels, .. } => channels,
            NetworkModel::X { channels } => channels,
        }
    }

    /// Link parameters by 1-based link number.
    pub fn channel(&self, link: usize) -> ChannelParams {
        self.channels()[link - 1]
    }

    pub fn d0(&self) -> Option<f64> {
        match self {
            NetworkModel::Ry { d0, .. } => Some(*d0),
            _ => None,
        }
    }

    /// Copy with one link replaced (1-based).
    pub fn with_channel(&self, link: usize, ch: ChannelParams) -> Result<Self, ModelError> {
        let mut channels = self.channels().to_vec();
        channels[link - 1] = ch;
        Self::new(self.topology(), &channels, self.d0())
    }

    pub fn with_d0(&self, d0: f64) -> Result<Self, ModelError> {
        Self::new(self.topology(), self.channels(), Some(d0))
    }

    pub fn layout(&self) -> VariableLayout {
        VariableLayout::for_topology(self.topology())
    }

    pub fn expect(&self, topology: Topology) -> Result<(), ModelError> {
        if self.topology() == topology {
            Ok(())
        } else {
            Err(ModelError::WrongTopology {
                expected: topology,
                found: self.topology(),
            })
        }
    }
}

fn to_params(channels: &[(f64, f64)]) -> Vec<ChannelParams> {
    channels
        .iter()
        .map(|&(d, de)| ChannelParams::new_unchecked(d, de))
        .collect()
}

/// Column names of the capacity LP for one topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    names: &'static [&'static str],
}

impl VariableLayout {
    const Y: &'static [&'static str] = &["R1", "R2", "k1", "k2", "k3"];
    const RY: &'static [&'static str] = &["R1", "R2", "k1", "k2", "k3", "e"];
    const X: &'static [&'static str] = &["R1", "R2", "k1", "k2", "k3", "k4", "k5", "e"];

    pub fn for_topology(t: Topology) -> Self {
        let names = match t {
            Topology::Y => Self::Y,
            Topology::Ry => Self::RY,
            Topology::X => Self::X,
        };
        Self { names }
    }

    pub fn names(&self) -> &'static [&'static str] {
        self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    /// Column of the key variable for a 1-based link.
    pub fn key(&self, link: usize) -> usize {
        self.index(&format!("k{link}")).expect("link has a key variable")
    }

    pub fn extra_randomness(&self) -> Option<usize> {
        self.index("e")
    }
}

pub const R1: usize = 0;
pub const R2: usize = 1;
