mod common;

use proptest::prelude::*;
use rand::Rng;
use seccap_core::field::{
    cauchy_mds, check_decodability, check_secrecy, gf256, independent_of, matrix_rank, privacy_amplify, rank,
    relay_rows_in_span, BasisBlock, BasisLayout, CoeffRow, FieldError, NodeInfo, NodeRole, Transcript, Transmission,
};
use seccap_core::lp::Weights;
use seccap_core::models::{presets, NetworkModel};
use seccap_core::sim::{operating_point, run_scheme, run_seeds, SimConfig, SimMode, SimRun};

#[test]
fn multiplication_matches_shift_xor_on_all_pairs() {
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            assert_eq!(gf256::mul(a, b), common::gf_mul(a, b), "{a} * {b}");
        }
    }
}

#[test]
fn every_nonzero_element_has_an_inverse() {
    for a in 1..=255u8 {
        let i = gf256::inv(a);
        assert_eq!(common::gf_mul(a, i), 1, "inv({a}) = {i}");
    }
}

#[test]
fn field_axioms_on_random_triples() {
    let mut rng = common::rng(7);
    for _ in 0..10_000 {
        let (a, b, c): (u8, u8, u8) = (rng.gen(), rng.gen(), rng.gen());
        let m = gf256::mul;
        assert_eq!(m(a, m(b, c)), m(m(a, b), c));
        assert_eq!(m(a, b ^ c), m(a, b) ^ m(a, c));
        assert_eq!(m(a, b), m(b, a));
        assert_eq!(m(a, 1), a);
        assert_eq!(m(a, 0), 0);
    }
}

#[test]
fn cauchy_minors_are_nonsingular_up_to_five() {
    for r in 1..=5 {
        for c in 1..=5 {
            let m = cauchy_mds(r, c).unwrap();
            for k in 1..=r.min(c) {
                for rs in common::all_subsets(r, k) {
                    for cs in common::all_subsets(c, k) {
                        assert_ne!(common::gf_det(&m.minor(&rs, &cs)), 0, "{r}x{c} rows {rs:?} cols {cs:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn cauchy_small_shapes() {
    let one = cauchy_mds(1, 1).unwrap();
    assert_ne!(one.get(0, 0), 0);
    let three = cauchy_mds(3, 3).unwrap();
    assert_ne!(common::gf_det(&three.minor(&[0, 1, 2], &[0, 1, 2])), 0);
    let wide = cauchy_mds(4, 6).unwrap();
    for rs in common::all_subsets(4, 2) {
        for cs in common::all_subsets(6, 2) {
            assert_ne!(common::gf_det(&wide.minor(&rs, &cs)), 0);
        }
    }
    assert!(cauchy_mds(128, 128).is_ok());
    assert!(matches!(cauchy_mds(200, 57), Err(FieldError::CauchyTooLarge { rows: 200, cols: 57 })));
}

fn random_matrix(rng: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<u8>> {
    // low-rank rows mixed in so deficient cases show up
    let basis_len = rng.gen_range(1..=rows);
    let basis: Vec<Vec<u8>> = (0..basis_len).map(|_| (0..cols).map(|_| rng.gen()).collect()).collect();
    (0..rows)
        .map(|_| {
            let mut row = vec![0u8; cols];
            for b in &basis {
                let c: u8 = rng.gen();
                for (x, &y) in row.iter_mut().zip(b) {
                    *x ^= common::gf_mul(c, y);
                }
            }
            row
        })
        .collect()
}

#[test]
fn rank_matches_largest_nonsingular_minor() {
    let mut rng = common::rng(11);
    for case in 0..200 {
        let m = random_matrix(&mut rng, 5, 8);
        assert_eq!(matrix_rank(&m), common::subset_rank(&m), "case {case}: {m:?}");
    }
}

fn rows_of(m: &[Vec<u8>]) -> Vec<CoeffRow> {
    m.iter().map(|r| CoeffRow::from_vec(r.clone())).collect()
}

fn arb_rows() -> impl Strategy<Value = Vec<CoeffRow>> {
    (1usize..=8, 1usize..=10, any::<u64>()).prop_map(|(r, c, seed)| rows_of(&random_matrix(&mut common::rng(seed), r, c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prop_rank_monotone_under_added_rows(rows in arb_rows(), extra in any::<u64>()) {
        let width = rows[0].len();
        let mut rng = common::rng(extra);
        let mut more = rows.clone();
        more.push(CoeffRow::from_vec((0..width).map(|_| rng.gen()).collect()));
        let (a, b) = (rank(&rows), rank(&more));
        prop_assert!(b == a || b == a + 1);
        prop_assert!(a <= rows.len().min(width));
    }

    #[test]
    fn prop_rank_invariant_under_scaling(rows in arb_rows(), c in 1u8..=255, pick in any::<prop::sample::Index>()) {
        let mut scaled = rows.clone();
        let i = pick.index(scaled.len());
        scaled[i].scale(c);
        prop_assert_eq!(rank(&rows), rank(&scaled));
        let mut dup = rows.clone();
        dup.push(rows[i].clone());
        prop_assert_eq!(rank(&rows), rank(&dup));
    }

    /// Dropping eavesdropper observations never breaks secrecy.
    #[test]
    fn prop_secrecy_monotone_in_observations(seed in any::<u64>(), drop in any::<prop::sample::Index>()) {
        let tr = random_pad_transcript(seed);
        let before = check_secrecy(&tr, 1).unwrap();
        let eav: Vec<usize> = (0..tr.transmissions.len()).filter(|&i| tr.transmissions[i].eav).collect();
        if !eav.is_empty() {
            let mut fewer = tr.clone();
            fewer.transmissions[eav[drop.index(eav.len())]].eav = false;
            let after = check_secrecy(&fewer, 1).unwrap();
            prop_assert!(!before.secure || after.secure);
            prop_assert!(after.rank <= before.rank);
        }
    }
}

// basis: W (message, 3) then T (key, 3); sends random combinations
fn random_pad_transcript(seed: u64) -> Transcript {
    let mut rng = common::rng(seed);
    let mut tr = two_node_transcript(3, 3);
    for slot in 0..rng.gen_range(1..8u64) {
        tr.push(Transmission {
            link: 1,
            slot,
            legit: rng.gen(),
            eav: rng.gen(),
            row: CoeffRow::from_vec((0..6).map(|_| if rng.gen_bool(0.6) { rng.gen() } else { 0 }).collect()),
        });
    }
    tr
}

fn two_node_transcript(msg: usize, key: usize) -> Transcript {
    let layout = BasisLayout::new(vec![
        BasisBlock { name: "W".into(), len: msg, message: true },
        BasisBlock { name: "T".into(), len: key, message: false },
    ]);
    let nodes = vec![
        NodeInfo { name: "S".into(), role: NodeRole::Source, incoming: vec![], outgoing: vec![1], owes: vec![] },
        NodeInfo { name: "D".into(), role: NodeRole::Dest, incoming: vec![1], outgoing: vec![], owes: vec!["W".into()] },
    ];
    Transcript::new(layout, nodes)
}

fn send(tr: &mut Transcript, slot: u64, legit: bool, eav: bool, row: Vec<u8>) {
    tr.push(Transmission { link: 1, slot, legit, eav, row: CoeffRow::from_vec(row) });
}

#[test]
fn privacy_amplification_examples() {
    let received: Vec<CoeffRow> = (0..4).map(|i| CoeffRow::unit(4, i)).collect();
    let eav = vec![received[2].clone()];
    let out = privacy_amplify(&received, 3).unwrap();
    assert_eq!(out.len(), 3);
    assert!(independent_of(&eav, &out));
    let greedy = privacy_amplify(&received, 4).unwrap();
    assert!(!independent_of(&eav, &greedy));
    assert!(privacy_amplify(&received, 0).unwrap().is_empty());
    assert!(matches!(
        privacy_amplify(&received, 5),
        Err(FieldError::AmplifyTooMany { requested: 5, rank: 4 })
    ));
    let mut dup = received.clone();
    dup.push(received[0].clone());
    assert!(privacy_amplify(&dup, 5).is_err());
}

#[test]
fn one_time_pad_is_secure_and_leak_is_caught() {
    let mut tr = two_node_transcript(1, 1);
    send(&mut tr, 0, true, false, vec![0, 1]);
    send(&mut tr, 1, true, true, vec![1, 1]);
    let v = check_secrecy(&tr, 1).unwrap();
    assert!(v.secure);
    assert_eq!((v.rows, v.rank, v.randomness_rank), (1, 1, 1));
    let d = check_decodability(&tr, "D").unwrap();
    assert!(d.decodable);
    assert_eq!(d.missing, 0);

    // the eavesdropper also caught the key
    tr.transmissions[0].eav = true;
    let v = check_secrecy(&tr, 1).unwrap();
    assert!(!v.secure);
    assert_eq!(v.rank, 2);
}

#[test]
fn empty_observation_is_secure() {
    let tr = two_node_transcript(2, 2);
    let v = check_secrecy(&tr, 1).unwrap();
    assert!(v.secure);
    assert_eq!(v.rows, 0);
    let d = check_decodability(&tr, "D").unwrap();
    assert!(!d.decodable);
    assert_eq!(d.missing, 2);
}

#[test]
fn decodability_needs_every_owed_symbol() {
    let mut tr = two_node_transcript(2, 1);
    // W1 + T and W2 + T: the span holds W1 - W2 but neither alone
    send(&mut tr, 0, true, false, vec![1, 0, 1]);
    send(&mut tr, 1, true, false, vec![0, 1, 1]);
    let d = check_decodability(&tr, "D").unwrap();
    assert_eq!((d.rank, d.message_rank, d.missing), (2, 1, 2));
    assert!(!d.decodable);
    send(&mut tr, 2, true, false, vec![0, 0, 1]);
    assert!(check_decodability(&tr, "D").unwrap().decodable);
    // a send lost to the receiver does not count
    let mut lost = tr.clone();
    lost.transmissions[2].legit = false;
    assert!(!check_decodability(&lost, "D").unwrap().decodable);
    assert!(check_decodability(&tr, "nobody").is_err());
}

fn field_run(net: NetworkModel, n: u64, seed: u64, margin: f64) -> SimRun {
    let p = operating_point(&net, Weights::SUM, margin, n).unwrap();
    let mut cfg = SimConfig::new(net, p, n, seed);
    cfg.mode = SimMode::Field;
    cfg.margin = margin;
    run_scheme(&cfg).unwrap()
}

#[test]
fn transcript_text_round_trips() {
    for net in [presets::y_network(), presets::ry_network(), presets::x_network()] {
        let run = field_run(net, 400, 3, 0.9);
        let tr = run.transcript.expect("field mode keeps the transcript");
        tr.validate().unwrap();
        let text = tr.to_text();
        let back = Transcript::from_text(&text).unwrap();
        assert_eq!(back, tr);
        assert_eq!(back.to_text(), text);
    }
    assert!(Transcript::from_text("not a transcript").is_err());
}

#[test]
fn relays_only_forward_what_they_hold() {
    let cases = [
        (presets::y_network(), vec!["M"]),
        (presets::ry_network(), vec!["M"]),
        (presets::x_network(), vec!["M1", "M2"]),
    ];
    for (net, relays) in cases {
        for seed in 0..3 {
            let tr = field_run(net.clone(), 400, seed, 0.9).transcript.unwrap();
            for r in &relays {
                assert!(relay_rows_in_span(&tr, r).unwrap(), "{} relay {r} seed {seed}", net.topology());
            }
        }
    }
}

#[test]
fn raw_keys_leak_somewhere() {
    let net = presets::y_network();
    let p = operating_point(&net, Weights::SUM, 1.0, 300).unwrap();
    let mut cfg = SimConfig::new(net, p, 300, 0);
    cfg.mode = SimMode::Field;
    cfg.margin = 1.0;
    cfg.unsafe_raw_keys = true;
    let insecure = run_seeds(&cfg, 20)
        .into_iter()
        .map(Result::unwrap)
        .filter(|r| r.report.secrecy.iter().any(|v| !v.secure))
        .count();
    assert!(insecure > 0);
}

#[test]
fn y_field_runs_decode_across_seeds() {
    let net = presets::y_network();
    let n = 2000;
    let p = operating_point(&net, Weights::SUM, 0.9, n).unwrap();
    let mut cfg = SimConfig::new(net, p, n, 0);
    cfg.mode = SimMode::Field;
    cfg.margin = 0.9;
    for (seed, run) in run_seeds(&cfg, 50).into_iter().enumerate() {
        let rep = run.unwrap().report;
        assert!(rep.decodability.iter().all(|d| d.decodable), "seed {seed}: {:?}", rep.decodability);
        if !rep.key_exhausted {
            assert!(rep.secrecy.iter().all(|v| v.secure), "seed {seed}");
        }
    }
}
