//! Time-sharing baselines: whole-network (path) sharing and shared-link
//! sharing. A source that is not transmitting its own session is never
//! used as a randomness source for the other one.

use crate::lp::{solve_lp, LinearProgram, RegionModel, RegionPoint, Sense, Weights, DEDUP_DISTANCE};

use super::scheme_lp::{build_lp, RowKind, RowSet};
use super::{ModelError, NetworkModel, Topology, R1, R2};

/// Largest rate of `session` alone, with the other session's rate and its
/// source's key pinned to zero.
pub fn single_session_capacity(net: &NetworkModel, session: u8) -> Result<f64, ModelError> {
    if session != 1 && session != 2 {
        return Err(ModelError::BadSession(session));
    }
    let (w, other_rate) = if session == 1 {
        (Weights::SESSION1, R2)
    } else {
        (Weights::SESSION2, R1)
    };
    let mut lp = build_lp(net, w);
    lp.fix(other_rate, 0.0);
    match net.topology() {
        Topology::Y | Topology::X => {
            let other_source_link = if session == 1 { 2 } else { 1 };
            lp.fix(net.layout().key(other_source_link), 0.0);
        }
        Topology::Ry => {}
    }
    let sol = solve_lp(&lp)?.into_optimal(&lp)?;
    Ok(sol.value)
}

/// Weighted value of the best path-sharing point, `max(w1*C1, w2*C2)`.
pub fn path_sharing_value(c1: f64, c2: f64, w: Weights) -> f64 {
    (w.w1 * c1).max(w.w2 * c2)
}

/// Segment from `(C1, 0)` to `(0, C2)` sampled at `samples` evenly spaced
/// time splits, sorted by decreasing `r1`.
pub fn build_path_sharing_region(net: &NetworkModel, samples: usize) -> Result<Vec<RegionPoint>, ModelError> {
    let c1 = single_session_capacity(net, 1)?;
    let c2 = single_session_capacity(net, 2)?;
    let samples = samples.max(2);
    let mut out: Vec<RegionPoint> = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = 1.0 - i as f64 / (samples - 1) as f64;
        let p = RegionPoint::rates(t * c1, (1.0 - t) * c2);
        if !out.iter().any(|q| q.distance(&p) < DEDUP_DISTANCE) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Column names of the link-sharing LP. Shared-link quantities carry a
/// `_1`/`_2` session suffix; `t` is session 1's share of the shared link.
pub fn link_sharing_layout(topology: Topology) -> &'static [&'static str] {
    match topology {
        Topology::Y => &["R1", "R2", "k1", "k2", "k3_1", "k3_2", "t"],
        Topology::Ry => &["R1", "R2", "k1", "k2", "k3_1", "k3_2", "e_1", "e_2", "t"],
        Topology::X => &["R1", "R2", "k1", "k2", "k4", "k5", "k3_1", "k3_2", "e_1", "e_2", "t"],
    }
}

fn col(topology: Topology, name: &str) -> usize {
    link_sharing_layout(topology)
        .iter()
        .position(|n| *n == name)
        .expect("known column")
}

/// Two single-session copies of the capacity LP joined by the shared-link
/// split `t` in `[0, 1]`. For RY the source randomness is split in the
/// same proportion.
pub fn build_link_sharing_lp(net: &NetworkModel, w: Weights) -> LinearProgram {
    let topo = net.topology();
    let names = link_sharing_layout(topo);
    let c = |n: &str| col(topo, n);
    let t = c("t");
    let mut set = RowSet::new(names.len());
    let c3 = net.channel(3);
    for s in [1usize, 2] {
        let rate = if s == 1 { R1 } else { R2 };
        let first = s == 1;
        let k3 = c(&format!("k3_{s}"));
        match topo {
            Topology::Y => {
                let k = c(&format!("k{s}"));
                set.key(s, net.channel(s), k, &[rate], None);
                set.time(s, net.channel(s), k, &[rate], None);
                set.key(3, c3, k3, &[rate], None);
                set.time(3, c3, k3, &[rate], None);
                set.share_last(t, first);
                set.relay(net, 3, k3, &[(s, k)], None);
            }
            Topology::Ry => {
                let k = c(&format!("k{s}"));
                let e = c(&format!("e_{s}"));
                let b3 = c3.secret_per_slot();
                set.key(3, c3, k3, &[rate], Some((e, b3)));
                set.time(3, c3, k3, &[rate], Some(e));
                set.share_last(t, first);
                let q3 = c3.either_receives();
                let d0 = net.d0().expect("RY has d0");
                set.push(RowKind::SourceBudget { link: 3 }, q3, &[(k3, q3), (e, b3)], Sense::Le, d0 * b3);
                set.share_last(t, first);
                set.key(s, net.channel(s), k, &[rate], None);
                set.time(s, net.channel(s), k, &[rate], None);
                set.relay(net, s, k, &[(3, k3)], Some((e, 1.0)));
            }
            Topology::X => {
                let src = c(&format!("k{s}"));
                let leaf_link = s + 3;
                let leaf = c(&format!("k{leaf_link}"));
                let e = c(&format!("e_{s}"));
                set.key(s, net.channel(s), src, &[rate], None);
                set.time(s, net.channel(s), src, &[rate], None);
                set.key(3, c3, k3, &[rate], Some((e, c3.secret_per_slot())));
                set.time(3, c3, k3, &[rate], Some(e));
                set.share_last(t, first);
                set.relay(net, 3, k3, &[(s, src)], Some((e, -1.0)));
                set.key(leaf_link, net.channel(leaf_link), leaf, &[rate], None);
                set.time(leaf_link, net.channel(leaf_link), leaf, &[rate], None);
                set.relay(net, leaf_link, leaf, &[(3, k3)], Some((e, 1.0)));
            }
        }
    }
    let mut objective = vec![0.0; names.len()];
    objective[R1] = w.w1;
    objective[R2] = w.w2;
    let mut lp = LinearProgram::new(names.len()).with_objective(objective);
    lp.constraints = set.into_rows().into_iter().map(|r| r.constraint).collect();
    let mut bound = vec![0.0; names.len()];
    bound[t] = 1.0;
    lp.push(bound, Sense::Le, 1.0);
    lp
}

/// The link-sharing baseline as a [`RegionModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSharingRegion {
    pub net: NetworkModel,
}

impl LinkSharingRegion {
    pub fn new(net: NetworkModel) -> Self {
        Self { net }
    }
}

impl RegionModel for LinkSharingRegion {
    fn lp(&self, weights: Weights) -> LinearProgram {
        build_link_sharing_lp(&self.net, weights)
    }

    fn variable_names(&self) -> Vec<String> {
        link_sharing_layout(self.net.topology())
            .iter()
            .map(|s| s.to_string())
            .collect()
    }
}
