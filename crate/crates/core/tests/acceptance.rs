//! End-to-end acceptance checks, one test per criterion.
//!
//! Every test prints a single `[criterion N] PASS|FAIL` line followed by
//! the individual sub-checks, then asserts. Tolerances are fixed here.

use std::collections::BTreeSet;
use std::time::Instant;

use jellyfish::arith;
use jellyfish::class_numbers::{self, hurwitz_h, hurwitz_h_formula, r3, HurwitzValue};
use jellyfish::hypergeometric::{self, CharacterTable};
use jellyfish::legendre::{annotate_swarm, isogeny_apply, isogeny_codomain, psi};
use jellyfish::real_agm::{self, BigReal};
use jellyfish::swarm::{self, AdmissiblePair};
use jellyfish::{CurvePoint, Field, LegendreCurve, Swarm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COMPLEX_TOLERANCE: f64 = 1e-8;
const EVANS_GREENE_SAMPLES: usize = 1000;
const EVANS_GREENE_SEED: u64 = 0x5eed_0103;
const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";

/// Collects sub-check outcomes and prints the criterion line.
struct Criterion {
    number: u32,
    title: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Self {
        Criterion { number, title, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) -> bool {
        self.checks.push((what.into(), ok));
        ok
    }

    fn finish(self) {
        let passed = self.checks.iter().all(|(_, ok)| *ok);
        println!("[criterion {}] {} {}", self.number, if passed { "PASS" } else { "FAIL" }, self.title);
        for (what, ok) in &self.checks {
            println!("    {} {what}", if *ok { "ok  " } else { "FAIL" });
        }
        let failed: Vec<&str> = self.checks.iter().filter(|(_, ok)| !ok).map(|(w, _)| w.as_str()).collect();
        assert!(failed.is_empty(), "criterion {} failed: {failed:?}", self.number);
    }
}

fn field(q: u64) -> Field {
    Field::from_order(q).unwrap()
}

fn pair(k: &Field, a: u64, b: u64) -> AdmissiblePair {
    AdmissiblePair::from_encodings(k, a, b).unwrap()
}

fn encodings(pairs: &[AdmissiblePair]) -> Vec<(u32, u32)> {
    pairs.iter().map(|p| (p.a.encoding(), p.b.encoding())).collect()
}

/// Prime powers `q = 3 (mod 4)` up to `limit`.
fn orders_up_to(limit: u64) -> Vec<u64> {
    (3..=limit).filter(|&n| n % 4 == 3 && arith::prime_power(n).is_some()).collect()
}

fn primes_3_mod_4(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| n % 4 == 3 && arith::is_prime(n)).collect()
}

#[test]
fn criterion_01_component_counts() {
    let mut c = Criterion::new(1, "component counts d(F_q)");
    let table: [(u64, usize); 32] = [
        (3, 0), (7, 1), (11, 3), (19, 8), (23, 5), (31, 10), (43, 7), (47, 4),
        (59, 7), (67, 30), (71, 25), (79, 18), (83, 6), (103, 41), (107, 9), (127, 54),
        (131, 46), (139, 33), (151, 45), (163, 38), (167, 11), (179, 14), (191, 14), (199, 101),
        (211, 120), (223, 18), (227, 12), (239, 40), (251, 31), (263, 17), (271, 34), (283, 35),
    ];
    for (q, d) in table {
        let t = Instant::now();
        let got = Swarm::build(&field(q)).unwrap().d();
        c.check(format!("q = {q}: d = {got}, expected {d}, {:?}", t.elapsed()), got == d);
    }
    for (q, d) in [(27, 39), (243, 1210), (343, 1539), (1331, 8778)] {
        let t = Instant::now();
        let got = Swarm::build(&field(q)).unwrap().d();
        c.check(format!("q = {q}: d = {got}, expected {d}, {:?}", t.elapsed()), got == d);
    }
    c.finish();
}

#[test]
fn criterion_02_structure() {
    let mut c = Criterion::new(2, "swarm structure for every q = 3 mod 4 up to 343");
    for q in orders_up_to(343) {
        let s = Swarm::build(&field(q)).unwrap();
        let verdict = s.verify_structure();
        let stats = s.stats();
        c.check(
            format!("q = {q}: {} nodes, d = {}, {verdict:?}", stats.node_count, stats.d),
            verdict.is_ok() && stats.divisibility_holds && stats.node_count as u64 == (q - 1) * (q - 3) / 2,
        );
    }
    c.finish();
}

#[test]
fn criterion_03_f19() {
    let mut c = Criterion::new(3, "the swarm over F_19");
    let k = field(19);
    let mut s = Swarm::build(&k).unwrap();
    annotate_swarm(&mut s).unwrap();
    c.check(format!("d = {}", s.d()), s.d() == 8);
    let mut small = 0;
    let mut large = 0;
    for jf in s.jellyfish() {
        let ann = jf.annotation.as_ref().unwrap();
        let lambdas: Vec<u32> = ann.curves.iter().map(|cv| cv.lambda.encoding()).collect();
        let js: BTreeSet<u32> = ann.curves.iter().map(|cv| cv.j.encoding()).collect();
        let group = (ann.group.n1, ann.group.n2);
        let ok = match jf.size() {
            12 => {
                small += 1;
                ann.trace == -4 && group == (2, 12) && lambdas == [6, 9, 16, 17]
            }
            36 => {
                large += 1;
                ann.trace == 4 && group == (2, 8) && lambdas == [4, 5, 7, 11]
            }
            _ => false,
        };
        c.check(
            format!("jellyfish {}: {} nodes, trace {}, Z/{} x Z/{}, lambdas {lambdas:?}", jf.id, jf.size(), ann.trace, group.0, group.1),
            ok,
        );
        c.check(format!("jellyfish {}: j-values {js:?}", jf.id), js == BTreeSet::from([5, 15]));
    }
    c.check(format!("{small} twelve-node and {large} thirty-six-node jellyfish"), small == 6 && large == 2);
    let m_minus = class_numbers::m_fq(&s, -4).unwrap();
    let m_plus = class_numbers::m_fq(&s, 4).unwrap();
    let h15 = hurwitz_h(15).unwrap();
    c.check(format!("M(-4) = {m_minus}, M(4) = {m_plus}"), m_minus == 2 && m_plus == 2);
    c.check(format!("H(15) = {h15}"), h15 == HurwitzValue::new(2, 1));
    c.finish();
}

#[test]
fn criterion_04_named_orbits() {
    let mut c = Criterion::new(4, "named orbits");
    let t = Instant::now();

    let k = field(7);
    let o = swarm::orbit(&k, pair(&k, 1, 2));
    c.check(
        format!("F_7 (1,2): cycle {:?}", encodings(&o.cycle)),
        o.preperiod.is_empty() && encodings(&o.cycle) == [(1, 2), (5, 3), (4, 1), (6, 5), (2, 4), (3, 6)],
    );

    for (q, start, len, size, head, tail) in [
        (67u64, (1u64, 17u64), 9usize, 18usize, [(1u32, 17u32), (9, 33)], [(65u32, 15u32), (40, 29)]),
        (83, (1, 3), 410, 820, [(1, 3), (2, 13)], [(37, 12), (66, 19)]),
    ] {
        let k = field(q);
        let p = pair(&k, start.0, start.1);
        let o = swarm::orbit(&k, p);
        let cyc = encodings(&o.cycle);
        let s = Swarm::build(&k).unwrap();
        let jf_size = s.jellyfish_of(p).unwrap().size();
        c.check(
            format!("F_{q} {start:?}: cycle length {}, jellyfish of {jf_size} nodes", cyc.len()),
            o.preperiod.is_empty() && cyc.len() == len && jf_size == size,
        );
        c.check(
            format!("F_{q} {start:?}: cycle begins {:?} and ends {:?}", &cyc[..2], &cyc[cyc.len() - 2..]),
            cyc[..2] == head && cyc[cyc.len() - 2..] == tail,
        );
    }
    let elapsed = t.elapsed();
    c.check(format!("elapsed {elapsed:?}"), elapsed.as_secs_f64() < 1.0);
    c.finish();
}

#[test]
fn criterion_05_isogenies() {
    let mut c = Criterion::new(5, "2-isogenies along every swarm edge");
    for q in [19u64, 23, 31] {
        let k = field(q);
        let s = Swarm::build(&k).unwrap();
        let mut failures = Vec::new();
        for v in 0..s.node_count() as u32 {
            let edge = s.pair(v);
            let dom = psi(&k, edge).unwrap();
            let cod = isogeny_codomain(&k, edge).unwrap();
            let pts = dom.points();
            let img: Vec<CurvePoint> = pts.iter().map(|&p| isogeny_apply(&k, edge, p).unwrap()).collect();
            let on_codomain = img.iter().all(|p| cod.contains(p));
            let mut homomorphism = true;
            'outer: for i in 0..pts.len() {
                for j in i..pts.len() {
                    if isogeny_apply(&k, edge, dom.add(pts[i], pts[j])).unwrap() != cod.add(img[i], img[j]) {
                        homomorphism = false;
                        break 'outer;
                    }
                }
            }
            let kernel: BTreeSet<CurvePoint> =
                pts.iter().zip(&img).filter(|(_, i)| i.is_identity()).map(|(p, _)| *p).collect();
            let expected_kernel =
                BTreeSet::from([CurvePoint::Identity, CurvePoint::Affine { x: k.zero(), y: k.zero() }]);
            let image: BTreeSet<CurvePoint> = img.iter().copied().collect();
            let index_two = cod.point_count_enumerated() == 2 * image.len() as u64;
            if !(on_codomain && homomorphism && kernel == expected_kernel && index_two) {
                failures.push(edge);
            }
        }
        c.check(format!("q = {q}: {} edges, {} failures {failures:?}", s.node_count(), failures.len()), failures.is_empty());
    }
    c.finish();
}

#[test]
fn criterion_06_two_sylow() {
    let mut c = Criterion::new(6, "2-Sylow shape and 2-descent on square-lambda curves");
    for q in primes_3_mod_4(7, 199) {
        let k = field(q);
        let squares: BTreeSet<_> = k.elements().skip(1).map(|a| k.square(a)).filter(|&l| l != k.one()).collect();
        let mut bad = Vec::new();
        for &lam in &squares {
            let e = LegendreCurve::new(&k, lam).unwrap();
            let shape_ok = matches!(e.two_sylow_shape(), Ok((2, s2)) if s2 >= 4 && s2.is_power_of_two());
            let pts = e.points();
            let doubles: BTreeSet<CurvePoint> = pts.iter().map(|&p| e.double(p)).collect();
            let descent_ok = pts.iter().all(|&p| e.halvable(p) == doubles.contains(&p));
            if !(shape_ok && descent_ok) {
                bad.push(lam.encoding());
            }
        }
        c.check(format!("q = {q}: {} curves, failing lambdas {bad:?}", squares.len()), bad.is_empty());
    }
    c.finish();
}

#[test]
fn criterion_07_class_number_identity() {
    let mut c = Criterion::new(7, "H((4q - s^2)/4) = M(s) for primes 11..199");
    let t = Instant::now();
    for q in primes_3_mod_4(11, 199) {
        let report = class_numbers::verify_schoof_identity(q).unwrap();
        let rows: Vec<String> = report.rows.iter().map(|r| format!("s={} H={} M={}", r.s, r.h, r.m)).collect();
        c.check(format!("q = {q}: {}", rows.join(", ")), report.passed() && !report.rows.is_empty());
    }
    let elapsed = t.elapsed();
    c.check(format!("elapsed {elapsed:?}"), elapsed.as_secs() < 60);
    c.finish();
}

#[test]
fn criterion_08_class_number_oracles() {
    let mut c = Criterion::new(8, "class-number oracles");
    let mismatches: Vec<u64> = (3..=10_000u64)
        .filter(|n| n % 4 == 0 || n % 4 == 3)
        .filter(|&n| hurwitz_h(n).unwrap() != hurwitz_h_formula(n).unwrap())
        .collect();
    c.check(format!("forms vs conductor formula, N <= 10000: mismatches {mismatches:?}"), mismatches.is_empty());
    let h = |n: u64| hurwitz_h(n).unwrap();
    let bad: Vec<u64> = (1..=2000u64)
        .filter(|&n| {
            let r = r3(n).unwrap();
            let ok = if n % 8 == 7 {
                r == 0
            } else if n % 8 == 3 {
                HurwitzValue::new(r, 24) == h(n)
            } else if n % 4 == 0 {
                r == r3(n / 4).unwrap()
            } else {
                HurwitzValue::new(r, 12) == h(4 * n)
            };
            !ok
        })
        .collect();
    c.check(format!("three-squares relation, n <= 2000: failures {bad:?}"), bad.is_empty());
    c.finish();
}

#[test]
fn criterion_09_hypergeometric() {
    let mut c = Criterion::new(9, "finite-field hypergeometric identities");
    for q in [7u64, 11, 19, 23, 31] {
        let k = field(q);
        let phi_m1 = k.phi(k.neg(k.one())) as i64;

        // I(a, b) against q * 2F1(1 - b^2/a^2), both exact integers
        let (mut total, mut equal) = (0, 0);
        for a in k.elements().skip(1) {
            for b in k.elements().skip(1) {
                if a == b || a == k.neg(b) {
                    continue;
                }
                total += 1;
                let lhs = hypergeometric::i_fq(&k, a, b).unwrap();
                let v = hypergeometric::greene_2f1_phi(&k, hypergeometric::i_fq_argument(&k, a, b));
                // q * (num / q) = num
                if lhs == v.num {
                    equal += 1;
                }
            }
        }
        c.check(format!("q = {q}: I(a,b) = q 2F1(1 - b^2/a^2) on {equal} of {total} pairs"), equal == total);

        let trace_bad: Vec<u32> = k
            .elements()
            .skip(2)
            .filter(|&lam| {
                let v = hypergeometric::greene_2f1_phi(&k, lam);
                let n = q as i64 + 1 + phi_m1 * q as i64 * v.num / v.den as i64;
                n as u64 != LegendreCurve::new(&k, lam).unwrap().point_count_enumerated()
            })
            .map(|l| l.encoding())
            .collect();
        c.check(format!("q = {q}: trace formula vs enumeration, failing lambdas {trace_bad:?}"), trace_bad.is_empty());

        let t = CharacterTable::new(&k);
        let worst = k
            .elements()
            .skip(1)
            .map(|lam| {
                let full = t.greene_2f1_full(t.phi(), t.phi(), t.trivial(), lam);
                (full - num_complex::Complex64::new(hypergeometric::greene_2f1_phi(&k, lam).value(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        c.check(format!("q = {q}: full definition vs phi-sum, max deviation {worst:.2e}"), worst < COMPLEX_TOLERANCE);
    }

    for q in [7u64, 11, 19] {
        let t = CharacterTable::new(&field(q));
        let mut worst = 0.0f64;
        let mut checked = 0;
        for a in t.characters() {
            for b in t.characters() {
                for x in t.field().elements() {
                    if let Ok(r) = t.evans_greene_check(a, b, x) {
                        worst = worst.max(r);
                        checked += 1;
                    }
                }
            }
        }
        c.check(format!("q = {q}: quadratic transformation on {checked} triples, max residual {worst:.2e}"), worst < COMPLEX_TOLERANCE && checked > 0);
    }

    let t = CharacterTable::new(&field(103));
    let mut rng = ChaCha8Rng::seed_from_u64(EVANS_GREENE_SEED);
    let (mut worst, mut checked) = (0.0f64, 0);
    while checked < EVANS_GREENE_SAMPLES {
        let a = t.character(rng.gen_range(0..102));
        let b = t.character(rng.gen_range(0..102));
        let x = t.field().elem(rng.gen_range(0..103)).unwrap();
        if let Ok(r) = t.evans_greene_check(a, b, x) {
            worst = worst.max(r);
            checked += 1;
        }
    }
    c.check(format!("q = 103: quadratic transformation on {checked} sampled triples, max residual {worst:.2e}"), worst < COMPLEX_TOLERANCE);
    c.finish();
}

#[test]
fn criterion_10_lower_bound() {
    let mut c = Criterion::new(10, "d(F_q) > sqrt(q)/2 spot checks");
    for (q, d) in [(47u64, 4usize), (383, 14), (983, 25), (1907, 38), (7703, 87)] {
        let t = Instant::now();
        let got = Swarm::build(&field(q)).unwrap().d();
        let bound = (q as f64).sqrt() / 2.0;
        c.check(
            format!("q = {q}: d = {got} (expected {d}) vs sqrt(q)/2 = {bound:.4}, {:?}", t.elapsed()),
            got == d && got as f64 > bound,
        );
    }
    c.finish();
}

#[test]
fn criterion_11_euler_pi() {
    let mut c = Criterion::new(11, "Euler's pi approximations");
    let digits = 50;
    let pi = BigReal::parse(PI_50, digits).unwrap();
    let p: Vec<BigReal> = (1..=5).map(|n| real_agm::euler_pi(n, digits).unwrap()).collect();
    c.check(format!("p_1 = {}", p[0].to_decimal(40)), p[0].to_decimal(40) == BigReal::from_int(4, 40).to_decimal(40));
    for (n, prefix) in [(2, "3.18767"), (3, "3.14168")] {
        let s = p[n - 1].to_decimal_truncated(20);
        c.check(format!("p_{n} = {s}... starts with {prefix}"), s.starts_with(prefix));
    }
    for (n, places) in [(4usize, 11u32), (5, 20)] {
        let got = p[n - 1].to_decimal_truncated(places);
        let want = pi.to_decimal_truncated(places);
        c.check(format!("p_{n} = {got} vs pi = {want} ({places} places)"), got == want);
    }
    c.finish();
}
