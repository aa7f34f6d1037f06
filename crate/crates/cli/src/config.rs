//! Run configuration: a JSON file, overridden key by key by flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use seccap_core::lp::Weights;
use seccap_core::models::{ChannelParams, NetworkModel, Topology};
use seccap_core::sim::SimMode;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ANGLES: usize = 64;
pub const DEFAULT_N: u64 = 10_000;
pub const DEFAULT_MARGIN: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub delta: f64,
    pub delta_e: f64,
}

/// On-disk schema. Every key is optional so flags can fill the gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub links: Option<Vec<LinkSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("invalid config: {e}"))
    }

    /// Flag values win over file values.
    pub fn overlay(mut self, flags: FileConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(topology, links, d0, angles, weights, n, seed, margin, mode, out);
        self
    }
}

/// Validated configuration with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub net: NetworkModel,
    pub angles: usize,
    pub weights: Weights,
    pub n: u64,
    pub seed: u64,
    pub margin: f64,
    pub mode: SimMode,
    pub out: Option<PathBuf>,
}

fn probability(key: &str, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        bail!("{key} = {v} is outside [0, 1]");
    }
    Ok(v)
}

impl RunConfig {
    pub fn from_file_config(fc: &FileConfig) -> Result<Self> {
        let topo_name = fc.topology.as_deref().ok_or_else(|| anyhow!("missing key \"topology\""))?;
        let topology =
            Topology::parse(topo_name).ok_or_else(|| anyhow!("topology: unknown value {topo_name:?}, expected y, ry or x"))?;
        let links = fc.links.as_ref().ok_or_else(|| anyhow!("missing key \"links\""))?;
        if links.len() != topology.link_count() {
            bail!(
                "links: topology {topology} needs {} links, got {}",
                topology.link_count(),
                links.len()
            );
        }
        let mut channels = Vec::with_capacity(links.len());
        for (i, l) in links.iter().enumerate() {
            let d = probability(&format!("links[{i}].delta"), l.delta)?;
            let de = probability(&format!("links[{i}].delta_e"), l.delta_e)?;
            channels.push(ChannelParams::new(d, de).map_err(|e| anyhow!("links[{i}]: {e}"))?);
        }
        let d0 = match (topology, fc.d0) {
            (Topology::Ry, None) => bail!("missing key \"d0\": topology ry needs a randomness rate"),
            (Topology::Ry, Some(v)) if !(v.is_finite() && v >= 0.0) => bail!("d0 = {v} must be finite and nonnegative"),
            (Topology::Ry, Some(v)) => Some(v),
            (_, Some(_)) => bail!("d0: only topology ry takes a randomness rate"),
            (_, None) => None,
        };
        let net = NetworkModel::new(topology, &channels, d0).map_err(|e| anyhow!("network: {e}"))?;

        let angles = fc.angles.unwrap_or(DEFAULT_ANGLES);
        if angles < 2 {
            bail!("angles = {angles} must be at least 2");
        }
        let weights = match fc.weights {
            None => Weights::SUM,
            Some([a, b]) => {
                if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0) {
                    bail!("weights = [{a}, {b}] must be nonnegative, finite and not both zero");
                }
                Weights::new(a, b)
            }
        };
        let margin = fc.margin.unwrap_or(DEFAULT_MARGIN);
        if !(margin > 0.0 && margin <= 1.0) {
            bail!("margin = {margin} must lie in (0, 1]");
        }
        let mode = match fc.mode.as_deref() {
            None => SimMode::Counting,
            Some(m) => SimMode::parse(m).ok_or_else(|| anyhow!("mode: unknown value {m:?}, expected counting or field"))?,
        };
        Ok(Self {
            net,
            angles,
            weights,
            n: fc.n.unwrap_or(DEFAULT_N),
            seed: fc.seed.unwrap_or(0),
            margin,
            mode,
            out: fc.out.clone(),
        })
    }

    /// Fully populated file form; parses back to an equal config.
    pub fn to_file_config(&self) -> FileConfig {
        FileConfig {
            topology: Some(self.net.topology().to_string().to_ascii_lowercase()),
            links: Some(
                self.net
                    .channels()
                    .iter()
                    .map(|c| LinkSpec { delta: c.delta, delta_e: c.delta_e })
                    .collect(),
            ),
            d0: self.net.d0(),
            angles: Some(self.angles),
            weights: Some([self.weights.w1, self.weights.w2]),
            n: Some(self.n),
            seed: Some(self.seed),
            margin: Some(self.margin),
            mode: Some(
                match self.mode {
                    SimMode::Counting => "counting",
                    SimMode::Field => "field",
                }
                .into(),
            ),
            out: self.out.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_config()).expect("plain data serializes")
    }
}

/// Parses `a,b` into two floats.
pub fn parse_pair(key: &str, s: &str) -> Result<(f64, f64)> {
    let mut it = s.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        bail!("{key}: expected two comma-separated numbers, got {s:?}");
    };
    let a: f64 = a.parse().map_err(|_| anyhow!("{key}: {a:?} is not a number"))?;
    let b: f64 = b.parse().map_err(|_| anyhow!("{key}: {b:?} is not a number"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Y: &str = r#"{"topology":"y","links":[{"delta":0.2,"delta_e":0.05},{"delta":0.3,"delta_e":0.05},{"delta":0.25,"delta_e":0.05}]}"#;

    #[test]
    fn defaults() {
        let c = RunConfig::from_file_config(&FileConfig::parse(Y).unwrap()).unwrap();
        assert_eq!((c.angles, c.seed, c.n, c.margin), (64, 0, 10_000, 0.95));
        assert_eq!(c.mode, SimMode::Counting);
        assert_eq!(c.weights, Weights::SUM);
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = FileConfig::parse(Y).unwrap();
        let flags = FileConfig { seed: Some(9), ..FileConfig::default() };
        let c = RunConfig::from_file_config(&file.overlay(flags)).unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("link", "0.2, 0.05").unwrap(), (0.2, 0.05));
        assert!(parse_pair("link", "0.2").is_err());
        assert!(parse_pair("link", "0.2,x").is_err());
        assert!(parse_pair("link", "1,2,3").is_err());
    }
}
