//! Choosing the point a finite-horizon run aims at.
//!
//! At an LP vertex at least one key row is tight, so a finite run exhausts
//! its key about half the time. Rates are therefore scaled by a margin and
//! the auxiliaries re-solved to leave every key row a surplus of `z`
//! standard deviations of its own fluctuation, with `z` as large as the
//! constraints allow. Time rows keep the same surplus against timeline
//! fluctuation so finite runs stay inside the horizon.

use crate::lp::{solve_lp, LinearProgram, RegionModel, RegionPoint, Sense, Weights};
use crate::models::{build_lp, scheme_rows, ModelError, NetworkModel, RowKind, SchemeRegion, R1, R2};

/// Upper bound on the lift multiplier; keeps the lift LP bounded when no
/// row fluctuates at all.
pub const Z_CAP: f64 = 1000.0;

/// Key surplus beyond which leftover slack goes to the timelines instead.
pub const KEY_SIGMAS: f64 = 5.0;

/// Vertex maximizing `w`, rates scaled by `margin`, auxiliaries lifted for
/// horizon `n`.
pub fn operating_point(net: &NetworkModel, w: Weights, margin: f64, n: u64) -> Result<RegionPoint, ModelError> {
    let region = SchemeRegion::new(net.clone());
    let (_, vertex) = region.solve(w)?;
    lift_for_horizon(net, &vertex, margin, n)
}

/// Same, starting from a user rate pair (auxiliaries found by the LP).
pub fn operating_point_for_rates(
    net: &NetworkModel,
    r1: f64,
    r2: f64,
    margin: f64,
    n: u64,
) -> Result<RegionPoint, ModelError> {
    let base = crate::models::lift_rates(net, r1, r2)?;
    lift_for_horizon(net, &base, margin, n)
}

fn point_vector(p: &RegionPoint) -> Vec<f64> {
    let mut x = vec![p.r1, p.r2];
    x.extend(p.aux.iter().map(|(_, v)| *v));
    x
}

/// Scales `base`'s rates by `margin` and re-solves auxiliaries for the
/// largest uniform fluctuation surplus.
pub fn lift_for_horizon(net: &NetworkModel, base: &RegionPoint, margin: f64, n: u64) -> Result<RegionPoint, ModelError> {
    let mut scaled = base.clone();
    scaled.r1 *= margin;
    scaled.r2 *= margin;
    for (_, v) in scaled.aux.iter_mut() {
        *v *= margin;
    }
    if n == 0 {
        return Ok(scaled);
    }
    let x0 = point_vector(&scaled);
    let nf = n as f64;
    let layout = net.layout();
    let width = layout.len();
    // z: key and budget surplus; zt: timeline surplus, maximized second
    let z = width;
    let zt = width + 1;
    let mut lp = LinearProgram::new(width + 2);

    for row in scheme_rows(net) {
        let mut coeffs = row.constraint.coeffs.clone();
        coeffs.extend([0.0, 0.0]);
        let link = row.kind.link();
        let ch = net.channel(link);
        let spread = match &row.kind {
            RowKind::KeySufficiency { .. } => {
                let need_cleared: f64 = -(row.constraint.coeffs[R1] * x0[R1] + row.constraint.coeffs[R2] * x0[R2]);
                let q = ch.either_receives();
                if q > 0.0 {
                    let a = ch.arq_catch_fraction();
                    -(row.scale * ((need_cleared / q).max(0.0) * (1.0 - a) / nf).sqrt())
                } else {
                    0.0
                }
            }
            RowKind::RelayBudget { upstream, .. } => {
                let own = x0[layout.key(link)];
                let p = ch.secret_per_slot();
                let mut up_var = 0.0;
                for &u in upstream {
                    let de = net.channel(u).delta_e;
                    if de > 0.0 {
                        up_var += x0[layout.key(u)] * (1.0 - de) / (de * de);
                    }
                }
                let tau = (own * (1.0 - p) / nf).sqrt() + ch.arq_secret_fraction() * (up_var / nf).sqrt();
                row.scale * tau
            }
            RowKind::SourceBudget { .. } => {
                let e = layout.extra_randomness().map_or(0.0, |c| x0[c]);
                let total = x0[layout.key(link)] + e * ch.arq_secret_fraction();
                row.scale * (total * (1.0 - ch.secret_per_slot()) / nf).sqrt()
            }
            RowKind::Time { .. } => {
                // key slots are negative binomial, ARQ slots geometric per packet
                let p = ch.secret_per_slot();
                if p > 0.0 {
                    let kc = layout.key(link);
                    let k = x0[kc];
                    let arq_packets: f64 = (0..width)
                        .filter(|&c| c != kc)
                        .map(|c| row.constraint.coeffs[c] * x0[c])
                        .sum::<f64>()
                        / ch.delta_e;
                    let var = k * (1.0 - p) / (p * p * nf) + arq_packets * ch.delta / ((1.0 - ch.delta).powi(2) * nf);
                    row.scale * var.max(0.0).sqrt()
                } else {
                    0.0
                }
            }
        };
        let col = if matches!(row.kind, RowKind::Time { .. }) { zt } else { z };
        coeffs[col] = spread;
        lp.push(coeffs, row.constraint.sense, row.constraint.rhs);
    }
    for (col, bound) in [(z, KEY_SIGMAS), (zt, Z_CAP)] {
        let mut cap = vec![0.0; width + 2];
        cap[col] = 1.0;
        lp.push(cap, Sense::Le, bound);
    }
    lp.fix(R1, scaled.r1);
    lp.fix(R2, scaled.r2);

    lp.objective[z] = 1.0;
    let first = solve_lp(&lp)?;
    if !first.is_optimal() {
        return Ok(scaled);
    }
    let z_best = first.point[z];
    let mut floor = vec![0.0; width + 2];
    floor[z] = 1.0;
    lp.push(floor, Sense::Ge, z_best - 1e-9 * z_best.max(1.0));
    lp.objective[z] = 0.0;
    lp.objective[zt] = 1.0;
    let second = solve_lp(&lp)?;
    let sol = if second.is_optimal() { second } else { first };
    let region = SchemeRegion::new(net.clone());
    let mut p = region.point_from(&sol.point[..width]);
    p.r1 = scaled.r1;
    p.r2 = scaled.r2;
    // guard against solver round-off pushing the point outside its own LP
    let check = build_lp(net, Weights::SUM);
    if crate::lp::check_feasible(&check, &point_vector(&p), 1e-9) {
        Ok(p)
    } else {
        Ok(scaled)
    }
}

/// Lift multiplier achieved by `p` (for diagnostics): the smallest key-row
/// surplus in standard deviations.
pub fn surplus_sigmas(net: &NetworkModel, p: &RegionPoint, n: u64) -> f64 {
    let x = point_vector(p);
    let nf = n as f64;
    let mut worst = f64::INFINITY;
    for row in scheme_rows(net) {
        if let RowKind::KeySufficiency { link } = row.kind {
            let ch = net.channel(link);
            let q = ch.either_receives();
            let need = -(row.constraint.coeffs[R1] * x[R1] + row.constraint.coeffs[R2] * x[R2]);
            if q <= 0.0 || need <= 0.0 {
                continue;
            }
            let sd = ((need / q) * (1.0 - ch.arq_catch_fraction()) / nf).sqrt() * row.scale;
            if sd > 0.0 {
                worst = worst.min(row.constraint.lhs(&x) / sd);
            }
        }
    }
    worst
}
