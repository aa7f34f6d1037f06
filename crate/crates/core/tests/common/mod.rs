//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls the crate's solver or elimination code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seccap_core::lp::{LinearProgram, Sense};

pub const TOL: f64 = 1e-12;

/// Per-link quantities written straight from the inequalities.
#[derive(Clone, Copy, Debug)]
pub struct Link {
    pub d: f64,
    pub de: f64,
}

impl Link {
    pub fn new(d: f64, de: f64) -> Self {
        Self { d, de }
    }
    /// `(1 - dE) / (1 - d dE)`
    pub fn catch(&self) -> f64 {
        (1.0 - self.de) / (1.0 - self.d * self.de)
    }
    /// `(1 - d) dE`
    pub fn p(&self) -> f64 {
        (1.0 - self.d) * self.de
    }
    /// `(1 - d) dE / (1 - d dE)`
    pub fn b(&self) -> f64 {
        self.p() / (1.0 - self.d * self.de)
    }
    /// Largest key whose time row still holds with `r` messages.
    pub fn key_room(&self, r: f64) -> f64 {
        self.p() * (1.0 - r / (1.0 - self.d))
    }
}

pub fn links(v: &[(f64, f64)]) -> Vec<Link> {
    v.iter().map(|&(d, de)| Link::new(d, de)).collect()
}

/// Y feasibility of `(r1, r2)` by eliminating the keys. With
/// `only_session = Some(s)` the other source's key is forced to zero.
pub fn y_feasible(l: &[Link], r1: f64, r2: f64, only_session: Option<u8>) -> bool {
    let r = [r1, r2];
    let mut kmax = [0.0; 2];
    for j in 0..2 {
        let room = l[j].key_room(r[j]);
        let need = r[j] * l[j].catch();
        if need > room + TOL {
            return false;
        }
        kmax[j] = room.max(0.0);
    }
    if let Some(s) = only_session {
        kmax[(2 - s) as usize] = 0.0;
        if r[(2 - s) as usize] > 0.0 {
            return false;
        }
    }
    let sum = r1 + r2;
    let need3 = sum * l[2].catch();
    let time3 = l[2].key_room(sum);
    let relay = (kmax[0] / l[0].de + kmax[1] / l[1].de) * l[2].b();
    need3 <= time3 + TOL && need3 <= relay + TOL
}

/// Shared-link feasibility in `(k3, e)` common to RY and X, where the
/// downstream keys need `e + k3/dE3 >= backing_need` and the source holds
/// `d0` randomness. Exhaustive vertex check of a bounded polygon.
fn shared_link_feasible(l3: Link, sum: f64, d0: f64, backing_need: f64) -> bool {
    let t = 1.0 - sum / (1.0 - l3.d);
    if t < -TOL {
        return false;
    }
    // rows as a*k3 + b*e <= c
    let rows: [(f64, f64, f64); 6] = [
        (-1.0, -l3.b(), -sum * l3.catch()),
        (1.0 / l3.p(), 1.0 / (1.0 - l3.d), t),
        (1.0, l3.b(), d0 * l3.b()),
        (-1.0 / l3.de, -1.0, -backing_need),
        (-1.0, 0.0, 0.0),
        (0.0, -1.0, 0.0),
    ];
    let ok = |k: f64, e: f64| rows.iter().all(|&(a, b, c)| a * k + b * e <= c + 1e-11);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a1, b1, c1) = rows[i];
            let (a2, b2, c2) = rows[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-15 {
                continue;
            }
            let k = (c1 * b2 - c2 * b1) / det;
            let e = (a1 * c2 - a2 * c1) / det;
            if ok(k, e) {
                return true;
            }
        }
    }
    false
}

fn downstream_need(dl: &[Link; 2], r: [f64; 2]) -> Option<f64> {
    let mut need = 0.0f64;
    for j in 0..2 {
        let k = r[j] * dl[j].catch();
        if k > dl[j].key_room(r[j]) + TOL {
            return None;
        }
        if k > 0.0 {
            need = need.max(k / dl[j].b());
        }
    }
    Some(need)
}

/// RY feasibility: downstream keys at their minimum, then the `(k3, e)`
/// polygon.
pub fn ry_feasible(l: &[Link], d0: f64, r1: f64, r2: f64) -> bool {
    let Some(need) = downstream_need(&[l[0], l[1]], [r1, r2]) else {
        return false;
    };
    shared_link_feasible(l[2], r1 + r2, d0, need)
}

/// X feasibility: source keys at their time limit (they only feed the
/// first relay's budget), downstream keys at their minimum.
pub fn x_feasible(l: &[Link], r1: f64, r2: f64) -> bool {
    let r = [r1, r2];
    let mut budget = 0.0;
    for j in 0..2 {
        let room = l[j].key_room(r[j]);
        if r[j] * l[j].catch() > room + TOL {
            return false;
        }
        budget += room.max(0.0) / l[j].de;
    }
    let Some(need) = downstream_need(&[l[3], l[4]], r) else {
        return false;
    };
    shared_link_feasible(l[2], r1 + r2, budget, need)
}

/// Largest `r1 + r2` over the grid of spacing `step` for a downward-closed
/// convex region, via a staircase walk.
pub fn grid_max_sum(step: f64, feasible: impl Fn(f64, f64) -> bool) -> f64 {
    let cells = (1.0 / step).round() as i64;
    let mut best = f64::NEG_INFINITY;
    let mut top = cells;
    for i in 0..=cells {
        let r1 = i as f64 * step;
        if !feasible(r1, 0.0) {
            break;
        }
        while top > 0 && !feasible(r1, top as f64 * step) {
            top -= 1;
        }
        best = best.max(r1 + top as f64 * step);
    }
    best
}

/// Largest grid `r` with `feasible(r)`, for a downward-closed set.
pub fn grid_max_1d(step: f64, feasible: impl Fn(f64) -> bool) -> f64 {
    let cells = (1.0 / step).round() as i64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=cells {
        let r = i as f64 * step;
        if !feasible(r) {
            break;
        }
        best = r;
    }
    best
}

// ---- LP vertex enumeration ----

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn point_ok(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    if x.iter().any(|&v| v < -tol) {
        return false;
    }
    lp.constraints.iter().all(|c| {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match c.sense {
            Sense::Le => lhs <= c.rhs + tol,
            Sense::Ge => lhs >= c.rhs - tol,
            Sense::Eq => (lhs - c.rhs).abs() <= tol,
        }
    })
}

fn subsets(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Best objective over every basic solution (`num_vars` tight rows chosen
/// from constraints and bounds). `None` when no basic solution is feasible.
pub fn vertex_enumeration_max(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars;
    let mut rows: Vec<(Vec<f64>, f64)> = lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    subsets(rows.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if point_ok(lp, &x, 1e-9) {
                let v: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
    });
    best
}

/// Random LP over `vars` variables with a bounding row, mixed senses, and
/// possibly an empty feasible set.
pub fn random_lp(rng: &mut ChaCha8Rng, vars: usize, rows: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(vars);
    for v in lp.objective.iter_mut() {
        *v = rng.gen_range(-1.0..2.0);
    }
    lp.push(vec![1.0; vars], Sense::Le, rng.gen_range(1.0..10.0));
    for _ in 0..rows {
        let coeffs: Vec<f64> = (0..vars).map(|_| (rng.gen_range(-2.0..3.0f64) * 4.0).round() / 4.0).collect();
        let roll: f64 = rng.gen();
        let (sense, rhs) = if roll < 0.7 {
            (Sense::Le, rng.gen_range(0.0..5.0))
        } else if roll < 0.9 {
            (Sense::Ge, rng.gen_range(0.0..1.5))
        } else {
            (Sense::Eq, rng.gen_range(0.0..2.0))
        };
        lp.push(coeffs, sense, rhs);
    }
    lp
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- GF(2^8) by shift-and-xor ----

/// Carry-less multiply reduced by x^8 + x^4 + x^3 + x + 1.
pub fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let hi = a & 0x80;
        a <<= 1;
        if hi != 0 {
            a ^= 0x1B;
        }
        b >>= 1;
    }
    p
}

/// Determinant as the permutation sum; signs vanish in characteristic 2.
pub fn gf_det(m: &[Vec<u8>]) -> u8 {
    fn rec(m: &[Vec<u8>], row: usize, used: &mut Vec<bool>, acc: u8) -> u8 {
        if row == m.len() {
            return acc;
        }
        let mut s = 0u8;
        for c in 0..m.len() {
            if !used[c] && m[row][c] != 0 {
                used[c] = true;
                s ^= rec(m, row + 1, used, gf_mul(acc, m[row][c]));
                used[c] = false;
            }
        }
        s
    }
    if m.is_empty() {
        return 1;
    }
    rec(m, 0, &mut vec![false; m.len()], 1)
}

/// All `k`-subsets of `0..n`.
pub fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    subsets(n, k, &mut |s| out.push(s.to_vec()));
    out
}

/// Rank as the largest nonsingular square minor.
pub fn subset_rank(m: &[Vec<u8>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    for r in (1..=rows.min(cols)).rev() {
        for rs in all_subsets(rows, r) {
            for cs in all_subsets(cols, r) {
                let minor: Vec<Vec<u8>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                if gf_det(&minor) != 0 {
                    return r;
                }
            }
        }
    }
    0
}
