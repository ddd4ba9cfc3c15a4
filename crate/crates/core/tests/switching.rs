mod common;

use level2::admissible::enumerate_v;
use level2::catalog::{build, Family};
use level2::engine::*;
use level2::iso::is_isomorphic;
use level2::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn six_vertex_figure() {
    let (left, right) = common::six_vertex_figure();
    let inst = SwitchingInstance::new(left.clone(), Family::Circulant(3), &(0..6).collect::<Vec<_>>()).unwrap();
    assert_eq!(apply(&inst).unwrap(), right);
    assert_eq!(apply_prose(&inst, Theorem::SixVertex).unwrap(), right);
    assert!(verify_r_cospectral(&left, &right).unwrap());
    assert!(!is_isomorphic(&left, &right).unwrap());
}

#[test]
fn fano_figure() {
    let (left, right) = common::fano_figure();
    let inst = SwitchingInstance::new(left.clone(), Family::Fano, &(0..7).collect::<Vec<_>>()).unwrap();
    assert_eq!(apply(&inst).unwrap(), right);
    assert_eq!(apply_prose(&inst, Theorem::Fano).unwrap(), right);
    assert!(verify_r_cospectral(&left, &right).unwrap());
    assert!(!is_isomorphic(&left, &right).unwrap());
}

#[test]
fn cube_figure() {
    let (left, drawn, computed) = common::cube_figure();
    let inst = SwitchingInstance::new(left.clone(), Family::Cube, &(0..8).collect::<Vec<_>>()).unwrap();
    let h = apply(&inst).unwrap();
    assert_eq!(h, computed);
    assert_eq!(apply_prose(&inst, Theorem::Cube).unwrap(), computed);
    assert!(is_isomorphic(&h, &drawn).unwrap());
    assert!(verify_r_cospectral(&left, &h).unwrap());
    assert!(!is_isomorphic(&left, &h).unwrap());
}

/// Each method's combinatorial statement agrees with the matrix product
/// on random planted hosts, and the result is R-cospectral.
#[test]
fn prose_matches_matrix_on_planted_hosts() {
    let cases: Vec<(Theorem, usize)> = vec![
        (Theorem::Sun, 3),
        (Theorem::Sun, 5),
        (Theorem::Sun, 7),
        (Theorem::FirstFamily, 3),
        (Theorem::FirstFamily, 5),
        (Theorem::FirstFamily, 7),
        (Theorem::SecondFamily, 5),
        (Theorem::SecondFamily, 6),
        (Theorem::SecondFamily, 7),
        (Theorem::TenVertex(TenCase::A), 5),
        (Theorem::TenVertex(TenCase::B), 5),
        (Theorem::TenVertex(TenCase::C), 5),
        (Theorem::SixVertex, 3),
        (Theorem::TwelveVertex, 6),
        (Theorem::Fano, 0),
        (Theorem::Cube, 0),
    ];
    for (theorem, m) in cases {
        let family = theorem.family(m);
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64 * 1000 + 17);
        for trial in 0..200 {
            let b = random_theorem_b(theorem, m, &mut rng).unwrap();
            let outside = rng.gen_range(1..6);
            let profile = random_profile(family, outside, &mut rng).unwrap();
            let (g, inst) = gen_planted(family, &b, &profile, rng.gen()).unwrap();
            let h = apply(&inst).unwrap();
            assert_eq!(apply_prose(&inst, theorem).unwrap(), h, "{theorem:?} m={m} trial {trial}");
            assert!(verify_r_cospectral(&g, &h).unwrap());
        }
    }
}

#[test]
fn prose_rejects_wrong_shapes() {
    let b = build_named_b(NamedB::FirstFamily, 5).unwrap();
    let (_, inst) = gen_planted(Family::Circulant(5), &b, &[0], 1).unwrap();
    let err = apply_prose(&inst, Theorem::Sun).unwrap_err().to_string();
    assert!(err.contains("not of the required shape"), "{err}");
    assert!(apply_prose(&inst, Theorem::FirstFamily).is_ok());
}

#[test]
fn detection_recovers_planted_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for family in [Family::Gm4, Family::Circulant(3), Family::Fano, Family::Cube] {
        let r = build(family).unwrap();
        let vs: Vec<_> = enumerate_v(&r).unwrap();
        for _ in 0..3 {
            let theorem = match family {
                Family::Circulant(_) => Theorem::SixVertex,
                Family::Fano => Theorem::Fano,
                Family::Cube => Theorem::Cube,
                _ => Theorem::Sun,
            };
            let b = if family == Family::Gm4 { Graph::empty(4) } else { random_theorem_b(theorem, 3, &mut rng).unwrap() };
            let profile: Vec<_> = (0..6).map(|_| vs[rng.gen_range(0..vs.len())].0).collect();
            let (g, inst) = gen_planted(family, &b, &profile, rng.gen()).unwrap();
            let found = find_switching_sets(&g, family, &SearchLimits::default()).unwrap();
            let mut want = inst.vertices();
            want.sort_unstable();
            assert!(
                found.iter().any(|f| {
                    let mut v = f.vertices();
                    v.sort_unstable();
                    v == want
                }),
                "{family}: planted set not found"
            );
            for f in &found {
                f.validate().unwrap();
            }
        }
    }
}

#[test]
fn kneser_fano_instance() {
    let inst = find_kneser_fano_instance(4, 2).unwrap();
    assert_eq!(inst.host.order(), 35);
    let (h, cospectral, iso) = switch_and_verify(&inst).unwrap();
    assert!(cospectral);
    assert!(!iso);
    assert_eq!(apply_prose(&inst, Theorem::Fano).unwrap(), h);
    assert!(find_kneser_fano_instance(5, 3).is_ok());
}

#[test]
fn planted_fano_in_large_host_is_found() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let profile = random_profile(Family::Fano, 193, &mut rng).unwrap();
    let (g, inst) = gen_planted(Family::Fano, &fano_case_b().0, &profile, 99).unwrap();
    assert_eq!(g.order(), 200);
    let found = find_switching_sets(&g, Family::Fano, &SearchLimits::default()).unwrap();
    let mut want = inst.vertices();
    want.sort_unstable();
    assert!(found.iter().any(|f| {
        let mut v = f.vertices();
        v.sort_unstable();
        v == want
    }));
}

#[test]
fn sun_switching_commutes_with_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [3, 5, 7] {
        let family = Family::Circulant(m);
        for _ in 0..20 {
            let b = random_theorem_b(Theorem::Sun, m, &mut rng).unwrap();
            let profile = random_profile(family, 4, &mut rng).unwrap();
            let (g, inst) = gen_planted(family, &b, &profile, rng.gen()).unwrap();
            let co = SwitchingInstance::new(g.complement(), family, &inst.vertices()).unwrap();
            assert_eq!(apply(&co).unwrap(), apply(&inst).unwrap().complement());
        }
    }
}

#[test]
fn zero_profile_isolates_the_set() {
    let b = build_named_b(NamedB::Sun, 5).unwrap();
    let (g, inst) = gen_planted(Family::Circulant(5), &b, &[0; 6], 4).unwrap();
    for u in inst.outside() {
        assert!(inst.vertices().iter().all(|&v| !g.has_edge(u, v)));
    }
}

#[test]
fn gm_planted_hosts_stay_cospectral() {
    for seed in 0..200 {
        let (g, cells) = gen_planted_gm(&[4, 2], 8, seed).unwrap();
        let h = apply_gm(&g, &cells).unwrap();
        assert!(verify_r_cospectral(&g, &h).unwrap());
        let (g, cells) = gen_planted_wqh(&[2, 3], 6, seed).unwrap();
        if let Ok(h) = apply_wqh(&g, &cells) {
            assert!(verify_r_cospectral(&g, &h).unwrap());
        }
    }
}
