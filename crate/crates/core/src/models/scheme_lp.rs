use crate::lp::{solve_lp, Constraint, LinearProgram, RegionModel, RegionPoint, Sense, Weights};

use super::{ChannelParams, ModelError, NetworkModel, Topology, VariableLayout, R1, R2};

/// What a capacity-LP row constrains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// Key generated on `link` covers what the eavesdropper there sees.
    KeySufficiency { link: usize },
    /// Slots spent on `link` fit in the horizon.
    Time { link: usize },
    /// A relay's key on `link` is limited by randomness arriving over `upstream`.
    RelayBudget { link: usize, upstream: Vec<usize> },
    /// The finite source randomness feeding `link`.
    SourceBudget { link: usize },
}

impl RowKind {
    pub fn link(&self) -> usize {
        match self {
            RowKind::KeySufficiency { link }
            | RowKind::Time { link }
            | RowKind::RelayBudget { link, .. }
            | RowKind::SourceBudget { link } => *link,
        }
    }
}

/// A capacity-LP row together with the factor it was multiplied by when its
/// denominators were cleared. Dividing the row by `scale` (when positive)
/// gives it back in key-per-slot units for key rows, and in fractions of
/// the horizon for time rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedRow {
    pub kind: RowKind,
    pub scale: f64,
    pub constraint: Constraint,
}

pub(super) struct RowSet {
    width: usize,
    rows: Vec<TaggedRow>,
}

impl RowSet {
    pub(super) fn new(width: usize) -> Self {
        Self { width, rows: Vec::new() }
    }

    pub(super) fn push(&mut self, kind: RowKind, scale: f64, terms: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut coeffs = vec![0.0; self.width];
        for &(col, v) in terms {
            coeffs[col] += v;
        }
        self.rows.push(TaggedRow {
            kind,
            scale,
            constraint: Constraint::new(coeffs, sense, rhs),
        });
    }

    /// `k * q + extra - sum(R) * (1 - dE) >= 0`
    pub(super) fn key(&mut self, link: usize, ch: ChannelParams, key: usize, rates: &[usize], extra: Option<(usize, f64)>) {
        let q = ch.either_receives();
        let mut terms = vec![(key, q)];
        terms.extend(rates.iter().map(|&r| (r, -(1.0 - ch.delta_e))));
        terms.extend(extra);
        self.push(RowKind::KeySufficiency { link }, q, &terms, Sense::Ge, 0.0);
    }

    /// `sum(R) * dE + k + e * dE <= (1 - d) * dE`
    pub(super) fn time(&mut self, link: usize, ch: ChannelParams, key: usize, rates: &[usize], extra: Option<usize>) {
        let mut terms = vec![(key, 1.0)];
        terms.extend(rates.iter().map(|&r| (r, ch.delta_e)));
        terms.extend(extra.map(|e| (e, ch.delta_e)));
        let cap = ch.secret_per_slot();
        self.push(RowKind::Time { link }, cap, &terms, Sense::Le, cap);
    }

    /// Relay key on `link` limited to `(extra + k_up/dE_up) * b`, where
    /// `extra` is the relay's directly-delivered randomness (e column with
    /// the given sign). Upstream links with `dE = 0` carry no key and are
    /// dropped, which is exact because their time rows pin `k = 0`.
    pub(super) fn relay(
        &mut self,
        net: &NetworkModel,
        link: usize,
        key: usize,
        upstream: &[(usize, usize)],
        extra: Option<(usize, f64)>,
    ) {
        let ch = net.channel(link);
        let live: Vec<(usize, usize, f64)> = upstream
            .iter()
            .map(|&(l, col)| (l, col, net.channel(l).delta_e))
            .filter(|&(_, _, de)| de > 0.0)
            .collect();
        let clear: f64 = live.iter().map(|&(_, _, de)| de).product();
        let q = ch.either_receives();
        let feed = ch.secret_per_slot();
        let mut terms = vec![(key, q * clear)];
        for &(_, col, de) in &live {
            terms.push((col, -feed * clear / de));
        }
        if let Some((e, sign)) = extra {
            terms.push((e, -sign * feed * clear));
        }
        let kind = RowKind::RelayBudget {
            link,
            upstream: upstream.iter().map(|&(l, _)| l).collect(),
        };
        self.push(kind, q * clear, &terms, Sense::Le, 0.0);
    }

    /// Rewrites the last row's right-hand side `c` as `c * t` (`first`) or
    /// `c * (1 - t)`, with `t` in column `t_col`.
    pub(super) fn share_last(&mut self, t_col: usize, first: bool) {
        let row = &mut self.rows.last_mut().expect("a row was pushed").constraint;
        let c = row.rhs;
        if first {
            row.coeffs[t_col] -= c;
            row.rhs = 0.0;
        } else {
            row.coeffs[t_col] += c;
        }
    }

    pub(super) fn into_rows(self) -> Vec<TaggedRow> {
        self.rows
    }
}

/// Every row of the capacity LP for `net`, tagged by role.
pub fn scheme_rows(net: &NetworkModel) -> Vec<TaggedRow> {
    let layout = net.layout();
    let k = |j| layout.key(j);
    let mut set = RowSet::new(layout.len());
    let both = [R1, R2];
    match net.topology() {
        Topology::Y => {
            let c3 = net.channel(3);
            set.key(1, net.channel(1), k(1), &[R1], None);
            set.key(2, net.channel(2), k(2), &[R2], None);
            set.key(3, c3, k(3), &both, None);
            set.time(1, net.channel(1), k(1), &[R1], None);
            set.time(2, net.channel(2), k(2), &[R2], None);
            set.time(3, c3, k(3), &both, None);
            set.relay(net, 3, k(3), &[(1, k(1)), (2, k(2))], None);
        }
        Topology::Ry => {
            let e = layout.extra_randomness().expect("RY has e");
            let c3 = net.channel(3);
            let d0 = net.d0().expect("RY has d0");
            set.key(3, c3, k(3), &both, Some((e, c3.secret_per_slot())));
            set.key(1, net.channel(1), k(1), &[R1], None);
            set.key(2, net.channel(2), k(2), &[R2], None);
            set.time(3, c3, k(3), &both, Some(e));
            set.time(1, net.channel(1), k(1), &[R1], None);
            set.time(2, net.channel(2), k(2), &[R2], None);
            let q3 = c3.either_receives();
            let b = c3.secret_per_slot();
            set.push(
                RowKind::SourceBudget { link: 3 },
                q3,
                &[(k(3), q3), (e, b)],
                Sense::Le,
                d0 * b,
            );
            set.relay(net, 1, k(1), &[(3, k(3))], Some((e, 1.0)));
            set.relay(net, 2, k(2), &[(3, k(3))], Some((e, 1.0)));
        }
        Topology::X => {
            let e = layout.extra_randomness().expect("X has e");
            let c3 = net.channel(3);
            set.key(1, net.channel(1), k(1), &[R1], None);
            set.key(2, net.channel(2), k(2), &[R2], None);
            set.key(3, c3, k(3), &both, Some((e, c3.secret_per_slot())));
            set.key(4, net.channel(4), k(4), &[R1], None);
            set.key(5, net.channel(5), k(5), &[R2], None);
            set.time(1, net.channel(1), k(1), &[R1], None);
            set.time(2, net.channel(2), k(2), &[R2], None);
            set.time(4, net.channel(4), k(4), &[R1], None);
            set.time(5, net.channel(5), k(5), &[R2], None);
            set.time(3, c3, k(3), &both, Some(e));
            set.relay(net, 3, k(3), &[(1, k(1)), (2, k(2))], Some((e, -1.0)));
            set.relay(net, 4, k(4), &[(3, k(3))], Some((e, 1.0)));
            set.relay(net, 5, k(5), &[(3, k(3))], Some((e, 1.0)));
        }
    }
    set.rows
}

fn assemble(net: &NetworkModel, w: Weights) -> LinearProgram {
    let layout = net.layout();
    let mut objective = vec![0.0; layout.len()];
    objective[R1] = w.w1;
    objective[R2] = w.w2;
    let mut lp = LinearProgram::new(layout.len()).with_objective(objective);
    lp.constraints = scheme_rows(net).into_iter().map(|r| r.constraint).collect();
    lp
}

/// Capacity LP of whichever topology `net` is, maximizing `w . (R1, R2)`.
pub fn build_lp(net: &NetworkModel, w: Weights) -> LinearProgram {
    assemble(net, w)
}

pub fn build_y_lp(net: &NetworkModel, w: Weights) -> Result<LinearProgram, ModelError> {
    net.expect(Topology::Y)?;
    Ok(assemble(net, w))
}

pub fn build_ry_lp(net: &NetworkModel, w: Weights) -> Result<LinearProgram, ModelError> {
    net.expect(Topology::Ry)?;
    Ok(assemble(net, w))
}

pub fn build_x_lp(net: &NetworkModel, w: Weights) -> Result<LinearProgram, ModelError> {
    net.expect(Topology::X)?;
    Ok(assemble(net, w))
}

/// The network's own capacity region as a [`RegionModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeRegion {
    pub net: NetworkModel,
}

impl SchemeRegion {
    pub fn new(net: NetworkModel) -> Self {
        Self { net }
    }
}

impl RegionModel for SchemeRegion {
    fn lp(&self, weights: Weights) -> LinearProgram {
        build_lp(&self.net, weights)
    }

    fn variable_names(&self) -> Vec<String> {
        VariableLayout::for_topology(self.net.topology())
            .names()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }
}

/// Finds auxiliary values (keys, `e`) making `(r1, r2)` feasible.
pub fn lift_rates(net: &NetworkModel, r1: f64, r2: f64) -> Result<RegionPoint, ModelError> {
    if !(r1.is_finite() && r2.is_finite() && r1 >= 0.0 && r2 >= 0.0) {
        return Err(ModelError::OutsideRegion { r1, r2 });
    }
    let mut lp = build_lp(net, Weights::new(0.0, 0.0));
    lp.fix(R1, r1);
    lp.fix(R2, r2);
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(ModelError::OutsideRegion { r1, r2 });
    }
    let region = SchemeRegion::new(net.clone());
    let mut p = region.point_from(&sol.point);
    // the equality rows hold to solver tolerance; report the requested pair
    p.r1 = r1;
    p.r2 = r2;
    Ok(p)
}
