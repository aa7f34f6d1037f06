use serde::Serialize;

use super::{solve_lp, LinearProgram, LpError};

/// Two traced points closer than this (in the rate plane) are the same vertex.
pub const DEDUP_DISTANCE: f64 = 1e-7;

/// Objective weights `(w1, w2)` on the two session rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    pub w1: f64,
    pub w2: f64,
}

impl Weights {
    pub const SESSION1: Weights = Weights { w1: 1.0, w2: 0.0 };
    pub const SESSION2: Weights = Weights { w1: 0.0, w2: 1.0 };
    pub const SUM: Weights = Weights { w1: 1.0, w2: 1.0 };

    pub fn new(w1: f64, w2: f64) -> Self {
        Self { w1, w2 }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    /// `count` angles spread uniformly over `[0, pi/2]`, endpoints included.
    pub fn sweep(count: usize) -> Vec<Weights> {
        match count {
            0 => Vec::new(),
            1 => vec![Self::from_angle(0.0)],
            _ => (0..count)
                .map(|i| {
                    let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (count - 1) as f64;
                    Self::from_angle(theta)
                })
                .collect(),
        }
    }

    pub fn dot(&self, r1: f64, r2: f64) -> f64 {
        self.w1 * r1 + self.w2 * r2
    }
}

/// One vertex of a traced capacity region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPoint {
    pub r1: f64,
    pub r2: f64,
    /// Remaining LP variables in layout order.
    pub aux: Vec<(String, f64)>,
}

impl RegionPoint {
    pub fn rates(r1: f64, r2: f64) -> Self {
        Self {
            r1,
            r2,
            aux: Vec::new(),
        }
    }

    pub fn aux(&self, name: &str) -> Option<f64> {
        self.aux.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn distance(&self, other: &RegionPoint) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }
}

/// Anything that produces a rate-region LP for a weight pair. Columns 0 and 1
/// of the produced LP must be `R1` and `R2`.
pub trait RegionModel {
    fn lp(&self, weights: Weights) -> LinearProgram;

    /// Names for every LP column, in order.
    fn variable_names(&self) -> Vec<String>;

    /// Solves for the region vertex maximizing `weights`.
    fn solve(&self, weights: Weights) -> Result<(f64, RegionPoint), LpError> {
        let lp = self.lp(weights);
        let sol = solve_lp(&lp)?.into_optimal(&lp)?;
        Ok((sol.value, self.point_from(&sol.point)))
    }

    fn point_from(&self, x: &[f64]) -> RegionPoint {
        let names = self.variable_names();
        RegionPoint {
            r1: x[0],
            r2: x[1],
            aux: names
                .into_iter()
                .zip(x.iter().copied())
                .skip(2)
                .collect(),
        }
    }
}

/// Traces the region frontier by sweeping linear objectives.
///
/// Solves for `num_angles` weight vectors on the quarter circle plus the pure
/// objectives `(1,0)`, `(0,1)` and `(1,1)`, removes duplicate vertices and
/// returns them sorted by decreasing `r1` (ties by increasing `r2`).
pub fn trace_region<M: RegionModel + ?Sized>(model: &M, num_angles: usize) -> Result<Vec<RegionPoint>, LpError> {
    let mut weights = Weights::sweep(num_angles.max(2));
    weights.extend([Weights::SESSION1, Weights::SESSION2, Weights::SUM]);

    let mut points: Vec<RegionPoint> = Vec::new();
    for w in weights {
        let (_, p) = model.solve(w)?;
        if !points.iter().any(|q| q.distance(&p) < DEDUP_DISTANCE) {
            points.push(p);
        }
    }
    points.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(a.r2.total_cmp(&b.r2)));
    Ok(points)
}
