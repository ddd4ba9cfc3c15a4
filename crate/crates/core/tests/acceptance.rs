//! Acceptance run: one line per criterion, non-zero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use level2::admissible::{
    enumerate_b_bruteforce, enumerate_b_normalized, enumerate_b_patched, enumerate_v, write_b_file, BlockGrid,
    Column,
};
use level2::catalog::{build, cube_geometry, Family};
use level2::engine::*;
use level2::equivalence::{class_table, classes, classes_weighted, GroupChoice, SymmetryGroup};
use level2::iso::is_isomorphic;
use level2::linalg::indecomposable_blocks;
use level2::reducibility::{verify_certificate, FactorizationCertificate, Reducer, DEFAULT_DEPTH};
use level2::{Graph, ScaledOrthogonal};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn families() -> Vec<Family> {
    let mut v = vec![Family::Gm4];
    v.extend((2..=6).map(Family::Circulant));
    v.extend([Family::Fano, Family::Cube]);
    v
}

/// `Rᵀv` computed densely from the scaled entries, if it is a 01-vector.
fn image_oracle(r: &ScaledOrthogonal, v: Column) -> Option<Column> {
    let n = r.size();
    let mut out = 0;
    for j in 0..n {
        let s: i32 = (0..n).filter(|&i| v >> i & 1 == 1).map(|i| r.at(i, j)).sum();
        match s {
            0 => {}
            2 => out |= 1 << j,
            _ => return None,
        }
    }
    Some(out)
}

fn v_oracle(r: &ScaledOrthogonal) -> BTreeSet<Column> {
    (0..1 << r.size()).filter(|&v| image_oracle(r, v).is_some()).collect()
}

/// `RᵀBR` densely; true when it is an adjacency matrix.
fn b_oracle(r: &ScaledOrthogonal, b: &Graph) -> bool {
    let n = r.size();
    let a: Vec<i64> = b.adjacency_i64();
    let m = |i: usize, j: usize| r.at(i, j) as i64;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0;
            for k in 0..n {
                for l in 0..n {
                    s += m(k, i) * a[k * n + l] * m(l, j);
                }
            }
            let ok = match (i == j, s) {
                (true, 0) => true,
                (false, 0) | (false, 4) => true,
                _ => false,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn c1_catalog() -> Check {
    for f in families() {
        let r = build(f).map_err(|e| e.to_string())?;
        let n = r.size();
        for i in 0..n {
            let row: i32 = (0..n).map(|j| r.at(i, j)).sum();
            ensure(row == 2, || format!("{f}: row {i} sums to {row}"))?;
            for k in 0..n {
                let d: i32 = (0..n).map(|j| r.at(i, j) * r.at(k, j)).sum();
                ensure(d == if i == k { 4 } else { 0 }, || format!("{f}: (MMᵀ)[{i}][{k}] = {d}"))?;
            }
        }
        ensure(r.entries().iter().any(|x| x % 2 != 0), || format!("{f}: level below 2"))?;
        let blocks = indecomposable_blocks(&r.to_int_matrix());
        ensure(blocks.len() == 1, || format!("{f}: {} blocks", blocks.len()))?;
    }
    Ok(format!("{} families", families().len()))
}

fn c2_v_sets() -> Check {
    let lib = |f: Family| -> Result<BTreeSet<Column>, String> {
        let r = build(f).map_err(|e| e.to_string())?;
        let got: BTreeSet<Column> = enumerate_v(&r).map_err(|e| e.to_string())?.into_iter().map(|(v, _)| v).collect();
        ensure(got == v_oracle(&r), || format!("{f}: library V differs from dense check"))?;
        Ok(got)
    };
    // Fano: 0, 1, the seven shifts of 1101000 and of 0010111.
    let shifts = |pattern: &[usize]| -> Vec<Column> {
        (0..7).map(|i| pattern.iter().fold(0, |a, &p| a | 1 << ((p + i) % 7))).collect()
    };
    let mut fano: BTreeSet<Column> = [0, 0x7f].into_iter().collect();
    fano.extend(shifts(&[0, 1, 3]));
    fano.extend(shifts(&[2, 4, 5, 6]));
    let got = lib(Family::Fano)?;
    ensure(got.len() == 16 && got == fano, || "Fano V is not 0, 1, lines and their complements".into())?;
    // Cube: 0, 1 and the 4-sets whose coordinates sum to zero.
    let coords = cube_geometry().coords;
    let mut cube: BTreeSet<Column> = [0, 0xff].into_iter().collect();
    for s in 0u32..256 {
        if s.count_ones() == 4 {
            let x = (0..8).filter(|&i| s >> i & 1 == 1).fold(0u8, |a, i| a ^ coords[i]);
            if x == 0 {
                cube.insert(s as Column);
            }
        }
    }
    ensure(cube.len() == 16, || format!("cube oracle found {} sets", cube.len()))?;
    let got = lib(Family::Cube)?;
    ensure(got == cube, || "cube V is not 0, 1 and the affine planes".into())?;
    for m in 2..=6 {
        let got = lib(Family::Circulant(m))?;
        let parity: BTreeSet<Column> = (0..1 << (2 * m))
            .filter(|&v: &Column| {
                let p = |i: usize| (v >> (2 * i) & 3).count_ones() % 2;
                (0..m).all(|i| p(i) == p(0))
            })
            .collect();
        ensure(got.len() == 1 << (m + 1) && got == parity, || format!("R_{}: parity rule fails", 2 * m))?;
    }
    Ok("Fano 16, cube 16, R_2m 2^(m+1) for m = 2..6".into())
}

fn c3_r8() -> Check {
    let r = build(Family::Circulant(4)).unwrap();
    let t = Instant::now();
    let brute = enumerate_b_bruteforce(&r).map_err(|e| e.to_string())?;
    let tb = t.elapsed();
    let t = Instant::now();
    let patched = enumerate_b_patched(4, 1 << 20).map_err(|e| e.to_string())?;
    let tp = t.elapsed();
    let keys = |v: &[Graph]| v.iter().map(Graph::key).collect::<BTreeSet<_>>();
    ensure(brute.len() == 3584, || format!("brute force found {}", brute.len()))?;
    ensure(keys(&brute) == keys(&patched), || "brute force and patching disagree".into())?;
    ensure(brute.iter().all(|b| b_oracle(&r, b)), || "a listed B fails the dense check".into())?;
    ensure(tb <= Duration::from_secs(600) && tp <= Duration::from_secs(10), || format!("too slow: {tb:?}, {tp:?}"))?;
    Ok(format!("3584 by both, brute {tb:.1?}, patched {tp:.1?}"))
}

fn c4_cube() -> Check {
    let r = build(Family::Cube).unwrap();
    let bs = enumerate_b_bruteforce(&r).map_err(|e| e.to_string())?;
    ensure(bs.len() == 1504, || format!("|B| = {}", bs.len()))?;
    ensure(bs.iter().all(|b| b_oracle(&r, b)), || "a listed B fails the dense check".into())?;
    let group = SymmetryGroup::new(Family::Cube, GroupChoice::Maximal).unwrap();
    let cs = classes(&bs, &group);
    ensure(cs.len() == 40, || format!("{} classes", cs.len()))?;
    ensure(cs.iter().map(|c| c.members).sum::<u64>() == 1504, || "class sizes do not add up".into())?;
    Ok("1504 matrices, 40 classes".into())
}

/// Irreducible classes, with every certificate re-verified.
fn irreducible_classes(family: Family) -> Result<(usize, usize), String> {
    let (gs, weight) = match family {
        Family::Circulant(m) if m >= 5 => (
            enumerate_b_normalized(m).map_err(|e| e.to_string())?.iter().map(BlockGrid::to_graph).collect(),
            1u64 << (m * (m - 1) / 2 + 1),
        ),
        f => (enumerate_b_bruteforce(&build(f).unwrap()).map_err(|e| e.to_string())?, 1),
    };
    let group = SymmetryGroup::new(family, GroupChoice::Maximal).unwrap();
    let cs = classes_weighted(&gs, &group, weight);
    let reducer = Reducer::new(family).map_err(|e| e.to_string())?;
    let results: Vec<Option<FactorizationCertificate>> = cs
        .par_iter()
        .map(|c| reducer.search(&c.canonical, DEFAULT_DEPTH).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    for cert in results.iter().flatten() {
        verify_certificate(cert).map_err(|e| format!("{family}: certificate fails: {e}"))?;
        let round = FactorizationCertificate::parse_all(&cert.to_text()).map_err(|e| e.to_string())?;
        ensure(round.len() == 1 && &round[0] == cert, || "certificate text does not round-trip".into())?;
    }
    Ok((results.iter().filter(|r| r.is_none()).count(), cs.len()))
}

fn c5_reducibility() -> Check {
    let want = [
        (Family::Circulant(3), 1),
        (Family::Circulant(4), 0),
        (Family::Cube, 0),
        (Family::Fano, 2),
        (Family::Circulant(5), 3),
        (Family::Circulant(6), 18),
    ];
    let mut parts = Vec::new();
    for (f, w) in want {
        let t = Instant::now();
        let (irr, total) = irreducible_classes(f)?;
        ensure(irr == w, || format!("{f}: {irr} irreducible classes, expected {w}"))?;
        parts.push(format!("{f} {irr}/{total} ({:.1?})", t.elapsed()));
    }
    // The single six-vertex irreducible class is the drawn switching set.
    let group = SymmetryGroup::new(Family::Circulant(3), GroupChoice::Maximal).unwrap();
    let six = build_named_b(NamedB::SixVertex, 3).unwrap();
    let reducer = Reducer::new(Family::Circulant(3)).unwrap();
    ensure(reducer.search(&group.canonical(&six), DEFAULT_DEPTH).unwrap().is_none(), || {
        "R_6: the irreducible class is not the six-vertex set".into()
    })?;
    // Every raw matrix of the small families, not only representatives.
    for f in [Family::Circulant(3), Family::Circulant(4), Family::Fano, Family::Cube] {
        let reducer = Reducer::new(f).unwrap();
        let bs = enumerate_b_bruteforce(&build(f).unwrap()).unwrap();
        let bad = bs
            .par_iter()
            .filter_map(|b| match reducer.search(b, DEFAULT_DEPTH) {
                Ok(Some(c)) => verify_certificate(&c).err().map(|e| e.to_string()),
                Ok(None) => None,
                Err(e) => Some(e.to_string()),
            })
            .collect::<Vec<_>>();
        ensure(bad.is_empty(), || format!("{f}: {}", bad[0]))?;
    }
    Ok(parts.join(", "))
}

fn c6_sun() -> Check {
    for m in [3, 5] {
        let f = Family::Circulant(m);
        let b = build_named_b(NamedB::Sun, m).unwrap();
        let reducer = Reducer::new(f).unwrap();
        ensure(reducer.search(&b, 6).unwrap().is_none(), || format!("sun m={m} is reducible"))?;
    }
    Ok("m = 3, 5 irreducible at depth 6".into())
}

fn c7_example() -> Check {
    let b = Graph::from_edges(8, &(0..8).map(|i| (i, (i + 2) % 8)).collect::<Vec<_>>());
    let cert = Reducer::new(Family::Circulant(4))
        .unwrap()
        .search(&b, DEFAULT_DEPTH)
        .unwrap()
        .ok_or("example matrix reported irreducible")?;
    verify_certificate(&cert).map_err(|e| e.to_string())?;
    ensure(cert.factors.len() == 2, || format!("{} factors", cert.factors.len()))?;
    // GM-switching on four vertices is R_4 in either of its two forms.
    let is_gm = |f: Family| matches!(f, Family::Gm4 | Family::Circulant(2));
    ensure(
        cert.factors.iter().all(|f| f.pieces.iter().all(|p| is_gm(p.0))),
        || format!("factors {:?} are not all GM", cert.factors),
    )?;
    // Pairs C_1..C_4 are {0,1}, …, {6,7}: first C1∪C2 and C3∪C4, then C2∪C4.
    let sets = |k: usize| -> BTreeSet<BTreeSet<usize>> {
        cert.factors[k].pieces.iter().map(|p| p.1.iter().copied().collect()).collect()
    };
    let want_first: BTreeSet<BTreeSet<usize>> = [[0, 1, 2, 3], [4, 5, 6, 7]].map(BTreeSet::from).into();
    let want_second: BTreeSet<BTreeSet<usize>> = [BTreeSet::from([2, 3, 6, 7])].into();
    let found = [sets(0), sets(1)];
    ensure(
        found == [want_first.clone(), want_second.clone()] || found == [want_second, want_first],
        || format!("GM steps on {found:?}"),
    )?;
    let texts: Vec<String> = cert.factors.iter().map(|f| f.to_text()).collect();
    Ok(texts.join(" then "))
}

fn c8_property_suite() -> Check {
    let cases: Vec<(Theorem, usize)> = vec![
        (Theorem::Sun, 3),
        (Theorem::Sun, 5),
        (Theorem::FirstFamily, 5),
        (Theorem::FirstFamily, 7),
        (Theorem::SecondFamily, 5),
        (Theorem::SecondFamily, 6),
        (Theorem::TenVertex(TenCase::A), 5),
        (Theorem::TenVertex(TenCase::B), 5),
        (Theorem::TenVertex(TenCase::C), 5),
        (Theorem::SixVertex, 3),
        (Theorem::TwelveVertex, 6),
        (Theorem::Fano, 0),
        (Theorem::Cube, 0),
    ];
    let mut total = 0;
    for (theorem, m) in cases {
        let family = theorem.family(m);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + m as u64);
        for trial in 0..200 {
            let b = random_theorem_b(theorem, m, &mut rng).unwrap();
            let outside = rng.gen_range(1..8);
            let profile = random_profile(family, outside, &mut rng).unwrap();
            let (g, inst) = gen_planted(family, &b, &profile, rng.gen()).unwrap();
            let h = apply(&inst).map_err(|e| e.to_string())?;
            let prose = apply_prose(&inst, theorem).map_err(|e| format!("{theorem:?}: {e}"))?;
            ensure(prose == h, || format!("{theorem:?} m={m} trial {trial}: prose differs from QᵀAQ"))?;
            ensure(verify_r_cospectral(&g, &h).unwrap(), || format!("{theorem:?} trial {trial}: not cospectral"))?;
            total += 1;
        }
    }
    // GM and WQH: the swap rule against dense conjugation.
    let mut gm = 0;
    for seed in 0..200 {
        let (g, cells) = gen_planted_gm(&[4, 2], 6, seed).unwrap();
        let h = apply_gm(&g, &cells).map_err(|e| e.to_string())?;
        let (q, s) = gm_matrix(g.order(), &cells);
        ensure(conjugate_scaled(&g, &q, s).map_err(|e| e.to_string())? == h, || "GM swap differs from QᵀAQ".into())?;
        ensure(verify_r_cospectral(&g, &h).unwrap(), || "GM output not cospectral".into())?;
        gm += 1;
    }
    let (mut wqh, mut seed) = (0, 0);
    while wqh < 200 {
        seed += 1;
        let (g, cells) = gen_planted_wqh(&[2, 3], 6, seed).unwrap();
        let Ok(h) = apply_wqh(&g, &cells) else { continue };
        let (q, s) = wqh_matrix(g.order(), &cells);
        ensure(conjugate_scaled(&g, &q, s).map_err(|e| e.to_string())? == h, || "WQH swap differs from QᵀAQ".into())?;
        ensure(verify_r_cospectral(&g, &h).unwrap(), || "WQH output not cospectral".into())?;
        wqh += 1;
    }
    Ok(format!("{} instances", total + gm + wqh))
}

fn c9_kneser() -> Check {
    let g = gen_kneser2(4, 2).map_err(|e| e.to_string())?;
    ensure(g.order() == 35, || format!("K2(4,2) has {} vertices", g.order()))?;
    let inst = find_kneser_fano_instance(4, 2).map_err(|e| e.to_string())?;
    let (h, cospectral, iso) = switch_and_verify(&inst).map_err(|e| e.to_string())?;
    ensure(cospectral, || "switched Kneser graph is not cospectral".into())?;
    ensure(!iso, || "switched Kneser graph is isomorphic".into())?;
    ensure(h != g, || "switching changed nothing".into())?;
    Ok("35 vertices, mate found".into())
}

fn c10_figures() -> Check {
    let (l, r) = common::six_vertex_figure();
    let (fl, fr) = common::fano_figure();
    let (cl, cd, _) = common::cube_figure();
    for (name, a, b) in [("six-vertex", l, r), ("Fano", fl, fr), ("cube", cl, cd)] {
        ensure(verify_r_cospectral(&a, &b).unwrap(), || format!("{name}: not R-cospectral"))?;
        ensure(!is_isomorphic(&a, &b).unwrap(), || format!("{name}: isomorphic"))?;
    }
    Ok("three pairs".into())
}

/// Catalog, class and certificate files for a few families.
fn artefacts() -> Vec<String> {
    let mut out = Vec::new();
    for f in [Family::Circulant(3), Family::Fano, Family::Cube, Family::Circulant(5)] {
        let r = build(f).unwrap();
        out.push(format!("{:?}", r.entries()));
        let (gs, weight) = match f {
            Family::Circulant(5) => (
                enumerate_b_normalized(5).unwrap().iter().map(BlockGrid::to_graph).collect::<Vec<_>>(),
                1 << 11,
            ),
            _ => (enumerate_b_bruteforce(&r).unwrap(), 1),
        };
        out.push(write_b_file(f, "test", &gs));
        let group = SymmetryGroup::new(f, GroupChoice::Maximal).unwrap();
        let cs = classes_weighted(&gs, &group, weight);
        out.push(class_table(f, GroupChoice::Maximal, &cs));
        let reducer = Reducer::new(f).unwrap();
        let certs: Vec<String> = cs
            .par_iter()
            .filter_map(|c| reducer.search(&c.canonical, DEFAULT_DEPTH).unwrap())
            .map(|c| c.to_text())
            .collect();
        out.push(certs.concat());
    }
    out
}

fn c11_determinism() -> Check {
    let run = |k: usize| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(artefacts);
    let one = run(1);
    let eight = run(8);
    ensure(one == eight, || "outputs differ between 1 and 8 workers".into())?;
    let bytes: usize = one.iter().map(String::len).sum();
    Ok(format!("{} files, {bytes} bytes identical", one.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("catalog validity", c1_catalog, Duration::from_secs(1)),
        ("V counts and characterizations", c2_v_sets, Duration::from_secs(1)),
        ("|B_R8| = 3584 by brute force and patching", c3_r8, Duration::from_secs(610)),
        ("|B_cube| = 1504, 40 classes", c4_cube, Duration::from_secs(600)),
        ("reducibility theorems", c5_reducibility, Duration::from_secs(7200)),
        ("sun irreducibility", c6_sun, Duration::from_secs(60)),
        ("example factorization", c7_example, Duration::from_secs(1)),
        ("R-cospectrality property suite", c8_property_suite, Duration::from_secs(300)),
        ("Kneser application", c9_kneser, Duration::from_secs(30)),
        ("figure fixtures", c10_figures, Duration::from_secs(1)),
        ("determinism across worker counts", c11_determinism, Duration::from_secs(7200)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let took = t.elapsed();
        let (verdict, detail) = match result {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.1?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {name} [{took:.2?}]: {detail}", i + 1);
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
