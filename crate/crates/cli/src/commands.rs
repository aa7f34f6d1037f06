//! The four subcommands. Each returns its primary artifact (CSV, JSON or a
//! table) plus a human summary and an exit status.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use anyhow::anyhow;
use seccap_core::lp::{check_feasible, trace_region, RegionModel, RegionPoint, Weights};
use seccap_core::models::{
    build_lp, build_path_sharing_region, path_sharing_value, single_session_capacity, LinkSharingRegion, SchemeRegion,
    Topology,
};
use seccap_core::sim::{operating_point, operating_point_for_rates, run_seeds, SimConfig, SimMode, SimReport};
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{frontier_csv, frontier_svg, num, Csv, Series};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_LP: u8 = 2;
pub const EXIT_SIM_FLAG: u8 = 3;
pub const EXIT_SECRECY: u8 = 4;

/// Largest horizon `verify` accepts; elimination cost grows with the
/// transcript.
pub const VERIFY_MAX_N: u64 = 10_000;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub err: anyhow::Error,
}

impl Failure {
    pub fn input(err: anyhow::Error) -> Self {
        Self { code: EXIT_INPUT, err }
    }

    fn lp(err: anyhow::Error) -> Self {
        Self { code: EXIT_LP, err }
    }
}

/// Options that live outside the config file.
#[derive(Debug, Clone, Default)]
pub struct Extras {
    pub svg: Option<PathBuf>,
    pub point: Option<(f64, f64)>,
    pub seeds: u64,
    pub unsafe_raw_keys: bool,
}

#[derive(Debug)]
pub struct Output {
    pub code: u8,
    /// Goes to `--out` or stdout.
    pub primary: String,
    /// Human-readable lines; stdout when `primary` went to a file, else stderr.
    pub summary: String,
    pub svg: Option<String>,
}

fn solve_or_fail<M: RegionModel + ?Sized>(model: &M, topo: Topology, w: Weights) -> Result<(f64, RegionPoint), Failure> {
    model
        .solve(w)
        .map_err(|e| Failure::lp(anyhow!("{topo} network, weights ({}, {}): {e}", w.w1, w.w2)))
}

fn trace_or_fail<M: RegionModel + ?Sized>(model: &M, topo: Topology, angles: usize) -> Result<Vec<RegionPoint>, Failure> {
    trace_region(model, angles).map_err(|e| {
        // re-run the sweep to name the weight that broke
        let culprit = Weights::sweep(angles)
            .into_iter()
            .chain([Weights::SESSION1, Weights::SESSION2, Weights::SUM])
            .find_map(|w| solve_or_fail(model, topo, w).err());
        culprit.unwrap_or_else(|| Failure::lp(anyhow!("{topo} network: {e}")))
    })
}

fn point_vector(p: &RegionPoint) -> Vec<f64> {
    let mut x = vec![p.r1, p.r2];
    x.extend(p.aux.iter().map(|(_, v)| *v));
    x
}

pub fn region(cfg: &RunConfig, extras: &Extras) -> Result<Output, Failure> {
    let topo = cfg.net.topology();
    let model = SchemeRegion::new(cfg.net.clone());
    let pts = trace_or_fail(&model, topo, cfg.angles)?;
    let lp = build_lp(&cfg.net, Weights::SUM);
    for p in &pts {
        if !check_feasible(&lp, &point_vector(p), 1e-9) {
            return Err(Failure::lp(anyhow!(
                "{topo} network: frontier point ({}, {}) fails its own LP",
                p.r1,
                p.r2
            )));
        }
    }
    let best = pts.iter().map(|p| p.r1 + p.r2).fold(0.0, f64::max);
    let summary = format!(
        "{topo} region: {} frontier vertices from {} angles, max sum-rate {}\n",
        pts.len(),
        cfg.angles,
        num(best)
    );
    let svg = extras.svg.as_ref().map(|_| {
        frontier_svg(
            &format!("{topo} network secret-message region"),
            &[Series { label: "scheme", points: pts.iter().map(|p| (p.r1, p.r2)).collect(), stroke: "black", dash: None }],
        )
    });
    Ok(Output { code: EXIT_OK, primary: frontier_csv(&pts), summary, svg })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b.abs() < 1e-12 {
        if a.abs() < 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

pub fn compare(cfg: &RunConfig, extras: &Extras) -> Result<Output, Failure> {
    let topo = cfg.net.topology();
    let scheme = SchemeRegion::new(cfg.net.clone());
    let link = LinkSharingRegion::new(cfg.net.clone());
    let cap = |s: u8| {
        single_session_capacity(&cfg.net, s).map_err(|e| Failure::lp(anyhow!("{topo} network, session {s}: {e}")))
    };
    let (c1, c2) = (cap(1)?, cap(2)?);

    let mut csv = Csv::new(&[
        "angle",
        "theta",
        "w1",
        "w2",
        "scheme",
        "link_sharing",
        "path_sharing",
        "scheme_over_link",
        "scheme_over_path",
    ]);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    let weights = Weights::sweep(cfg.angles);
    let last = weights.len().saturating_sub(1).max(1);
    for (i, w) in weights.into_iter().enumerate() {
        let vs = solve_or_fail(&scheme, topo, w)?.0;
        let vl = solve_or_fail(&link, topo, w)?.0;
        let vp = path_sharing_value(c1, c2, w);
        let r = [ratio(vs, vl), ratio(vs, vp)];
        for k in 0..2 {
            lo[k] = lo[k].min(r[k]);
            hi[k] = hi[k].max(r[k]);
        }
        csv.row(&[
            i.to_string(),
            num(FRAC_PI_2 * i as f64 / last as f64),
            num(w.w1),
            num(w.w2),
            num(vs),
            num(vl),
            num(vp),
            num(r[0]),
            num(r[1]),
        ]);
    }
    let blank = || String::new();
    for (label, v) in [("min", lo), ("max", hi)] {
        csv.row(&[label.into(), blank(), blank(), blank(), blank(), blank(), blank(), num(v[0]), num(v[1])]);
    }
    let summary = format!(
        "{topo} compare over {} angles: scheme/link-sharing in [{}, {}], scheme/path-sharing in [{}, {}]\n",
        cfg.angles,
        num(lo[0]),
        num(hi[0]),
        num(lo[1]),
        num(hi[1])
    );
    let svg = match &extras.svg {
        None => None,
        Some(_) => {
            let s = trace_or_fail(&scheme, topo, cfg.angles)?;
            let l = trace_or_fail(&link, topo, cfg.angles)?;
            let p = build_path_sharing_region(&cfg.net, cfg.angles)
                .map_err(|e| Failure::lp(anyhow!("{topo} network, path sharing: {e}")))?;
            let xy = |v: &[RegionPoint]| v.iter().map(|q| (q.r1, q.r2)).collect::<Vec<_>>();
            Some(frontier_svg(
                &format!("{topo} network: scheme vs time sharing"),
                &[
                    Series { label: "scheme", points: xy(&s), stroke: "black", dash: None },
                    Series { label: "link sharing", points: xy(&l), stroke: "#1f5fbf", dash: Some("6 3") },
                    Series { label: "path sharing", points: xy(&p), stroke: "#bf3f1f", dash: Some("2 3") },
                ],
            ))
        }
    };
    Ok(Output { code: EXIT_OK, primary: csv.finish(), summary, svg })
}

/// Operating point shared by `simulate` and `verify`.
fn pick_point(cfg: &RunConfig, extras: &Extras) -> Result<RegionPoint, Failure> {
    match extras.point {
        Some((r1, r2)) => operating_point_for_rates(&cfg.net, r1, r2, cfg.margin, cfg.n)
            .map_err(|e| Failure::input(anyhow!("point ({r1}, {r2}): {e}"))),
        None => {
            let w = cfg.weights;
            operating_point(&cfg.net, w, cfg.margin, cfg.n).map_err(|e| {
                Failure::lp(anyhow!("{} network, weights ({}, {}): {e}", cfg.net.topology(), w.w1, w.w2))
            })
        }
    }
}

fn run_all(cfg: &RunConfig, extras: &Extras, mode: SimMode) -> Result<(RegionPoint, Vec<SimReport>), Failure> {
    let point = pick_point(cfg, extras)?;
    let mut sc = SimConfig::new(cfg.net.clone(), point.clone(), cfg.n, cfg.seed);
    sc.mode = mode;
    sc.margin = cfg.margin;
    sc.unsafe_raw_keys = extras.unsafe_raw_keys;
    let mut reports = Vec::new();
    for r in run_seeds(&sc, extras.seeds.max(1)) {
        reports.push(r.map_err(|e| Failure::input(anyhow!("simulation: {e}")))?.report);
    }
    Ok((point, reports))
}

fn verdict_code(reports: &[SimReport]) -> u8 {
    if reports.iter().any(|r| !r.verified()) {
        EXIT_SECRECY
    } else if reports.iter().any(SimReport::flagged) {
        EXIT_SIM_FLAG
    } else {
        EXIT_OK
    }
}

fn flags_of(r: &SimReport) -> String {
    let mut f = Vec::new();
    if r.truncated {
        f.push("truncated");
    }
    if r.key_exhausted {
        f.push("key-exhausted");
    }
    if r.shortfall {
        f.push("shortfall");
    }
    if f.is_empty() {
        "-".into()
    } else {
        f.join("+")
    }
}

pub fn simulate(cfg: &RunConfig, extras: &Extras) -> Result<Output, Failure> {
    let (point, reports) = run_all(cfg, extras, cfg.mode)?;
    let k = reports.len() as f64;
    let mean = [0, 1].map(|i| reports.iter().map(|r| r.rates[i]).sum::<f64>() / k);
    let target = point.r1 + point.r2;
    let gap = if target > 0.0 { (mean[0] + mean[1] - target) / target } else { f64::NAN };
    let flagged = reports.iter().filter(|r| r.flagged()).count();

    let mut summary = String::new();
    let topo = cfg.net.topology();
    summary.push_str(&format!(
        "{topo} simulate: n = {}, {} seed(s) from {}, margin {}, {} mode\n",
        cfg.n,
        reports.len(),
        cfg.seed,
        cfg.margin,
        if cfg.mode == SimMode::Field { "field" } else { "counting" }
    ));
    summary.push_str(&format!(
        "LP rates at margin 1: ({}, {}); target ({}, {})\n",
        num(point.r1 / cfg.margin),
        num(point.r2 / cfg.margin),
        num(point.r1),
        num(point.r2)
    ));
    summary.push_str(&format!(
        "empirical mean ({}, {}), sum {} vs target {}, relative gap {}\n",
        num(mean[0]),
        num(mean[1]),
        num(mean[0] + mean[1]),
        num(target),
        if gap.is_nan() { "n/a".to_string() } else { format!("{:+.3}%", 100.0 * gap) }
    ));
    for r in &reports {
        summary.push_str(&format!(
            "seed {}: rates ({}, {}), slots {}, flags {}\n",
            r.seed,
            num(r.rates[0]),
            num(r.rates[1]),
            r.slots_used_total,
            flags_of(r)
        ));
        if let (Topology::Ry, Some(rr)) = (topo, &r.randomness) {
            summary.push_str(&format!(
                "  D0 accounting: e = {} raw + MDS share {} = {} used <= D0*n = {}{}\n",
                rr.arq_raw,
                rr.expansion_used,
                rr.total_used,
                rr.budget,
                if rr.total_used <= rr.budget { "" } else { "  OVER BUDGET" }
            ));
        }
    }
    summary.push_str(&format!("{flagged}/{} run(s) flagged\n", reports.len()));

    let doc = json!({
        "config": cfg.to_file_config(),
        "seeds": reports.len(),
        "unsafe_raw_keys": extras.unsafe_raw_keys,
        "operating_point": point,
        "target_sum_rate": target,
        "mean_rates": mean,
        "relative_gap": if gap.is_nan() { None } else { Some(gap) },
        "flagged_runs": flagged,
        "reports": reports,
    });
    let primary = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    Ok(Output { code: verdict_code(&reports), primary, summary, svg: None })
}

pub fn verify(cfg: &RunConfig, extras: &Extras) -> Result<Output, Failure> {
    if cfg.n > VERIFY_MAX_N {
        return Err(Failure::input(anyhow!("n = {} is above the verify limit {VERIFY_MAX_N}", cfg.n)));
    }
    let (_, reports) = run_all(cfg, extras, SimMode::Field)?;
    let mut t = String::new();
    t.push_str("seed  eavesdropper  rows  rank  randomness_rank  secure\n");
    for r in &reports {
        for v in &r.secrecy {
            t.push_str(&format!(
                "{:<5} link {:<7} {:>5} {:>5} {:>16}  {}\n",
                r.seed,
                v.link,
                v.rows,
                v.rank,
                v.randomness_rank,
                if v.secure { "yes" } else { "NO" }
            ));
        }
    }
    t.push_str("\nseed  destination  owed  rank  message_rank  missing  decodable\n");
    for r in &reports {
        for d in &r.decodability {
            t.push_str(&format!(
                "{:<5} {:<12} {:>5} {:>5} {:>13} {:>8}  {}\n",
                r.seed,
                d.node,
                d.owed,
                d.rank,
                d.message_rank,
                d.missing,
                if d.decodable { "yes" } else { "NO" }
            ));
        }
    }
    let bad = reports.iter().filter(|r| !r.verified()).count();
    let flagged = reports.iter().filter(|r| r.flagged()).count();
    let summary = format!(
        "{} verify: {}/{} run(s) fully verified, {flagged} flagged\n",
        cfg.net.topology(),
        reports.len() - bad,
        reports.len()
    );
    let code = if bad > 0 { EXIT_SECRECY } else { EXIT_OK };
    Ok(Output { code, primary: t, summary, svg: None })
}
