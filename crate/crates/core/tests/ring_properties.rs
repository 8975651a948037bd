//! Property tests for finite local rings, presented algebras and groups.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use udr::group::{extend_and_verify_hom, FiniteGroup};
use udr::local_ring::{hom_enumerate, FiniteLocalRing, RingElement};
use udr::presented::{etale_check, nilpotent_witness, q_fiber, IntegerPolynomialPresentation, QFiber, Verdict};
use udr::Limits;

fn pres(p: u64, vars: &[&str], rels: &[&str]) -> IntegerPolynomialPresentation {
    IntegerPolynomialPresentation::parse(p, vars, rels).unwrap()
}

const RING_COUNT: usize = 15;

fn ring(i: usize) -> FiniteLocalRing {
    let limits = Limits::default();
    let trunc = |p, vars: &[&str], rels: &[&str], m| FiniteLocalRing::from_truncated_presentation(&pres(p, vars, rels), m, &limits).unwrap();
    match i {
        0 => FiniteLocalRing::galois_ring(2, 1, 1).unwrap(),
        1 => FiniteLocalRing::galois_ring(2, 2, 1).unwrap(),
        2 => FiniteLocalRing::galois_ring(2, 3, 1).unwrap(),
        3 => FiniteLocalRing::galois_ring(3, 2, 1).unwrap(),
        4 => FiniteLocalRing::galois_ring(3, 3, 1).unwrap(),
        5 => FiniteLocalRing::galois_ring(2, 1, 2).unwrap(),
        6 => FiniteLocalRing::galois_ring(2, 2, 2).unwrap(),
        7 => FiniteLocalRing::galois_ring(3, 2, 2).unwrap(),
        8 => FiniteLocalRing::galois_ring(2, 1, 3).unwrap(),
        9 => FiniteLocalRing::galois_ring(2, 2, 1).unwrap().dual_numbers().unwrap(),
        10 => FiniteLocalRing::galois_ring(3, 1, 1).unwrap().dual_numbers().unwrap(),
        11 => trunc(2, &["X"], &["X^2 - 2*X"], 2),
        12 => trunc(3, &["X"], &["X^3"], 2),
        13 => trunc(2, &["X", "Y"], &["X^2", "Y^2"], 2),
        _ => trunc(5, &["X"], &["X^2 - 5"], 2),
    }
}

fn element(r: &FiniteLocalRing, seed: &[u64]) -> RingElement {
    let p = r.p();
    let coords: Vec<u64> = r.orders().iter().zip(seed.iter().cycle()).map(|(&k, &s)| s % p.pow(k)).collect();
    r.element(&coords).unwrap()
}

fn seed() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, 1..9)
}

#[test]
fn structure_constants_satisfy_ring_laws() {
    for i in 0..RING_COUNT {
        let r = ring(i);
        let n = r.rank();
        let basis: Vec<RingElement> = (0..n)
            .map(|j| {
                let mut c = vec![0; n];
                c[j] = 1;
                r.element(&c).unwrap()
            })
            .collect();
        for a in &basis {
            assert_eq!(r.mul(&r.one(), a), *a, "{r}");
            for b in &basis {
                assert_eq!(r.mul(a, b), r.mul(b, a), "{r}");
                for c in &basis {
                    assert_eq!(r.mul(&r.mul(a, b), c), r.mul(a, &r.mul(b, c)), "{r}");
                }
            }
        }
    }
}

#[test]
fn quotients_respect_operations_on_all_pairs() {
    let limits = Limits::default();
    for i in [1, 2, 6, 9, 10, 11, 12] {
        let r = ring(i);
        let elems = r.enumerate_elements(&limits).unwrap();
        let gen = elems.iter().find(|x| !r.is_unit(x) && !r.is_zero(x)).unwrap().clone();
        let (q, map) = r.quotient_ring(&r.ideal_span(&[gen])).unwrap();
        for x in &elems {
            for y in &elems {
                let (px, py) = (map.project(&q, x), map.project(&q, y));
                assert_eq!(map.project(&q, &r.add(x, y)), q.add(&px, &py));
                assert_eq!(map.project(&q, &r.mul(x, y)), q.mul(&px, &py));
            }
        }
    }
}

#[test]
fn homomorphisms_are_multiplicative_on_basis_pairs() {
    let limits = Limits::default();
    for (s, t) in [(1, 1), (2, 1), (9, 9), (9, 1), (11, 1), (6, 6), (5, 6), (12, 4), (13, 9)] {
        let (src, tgt) = (ring(s), ring(t));
        let n = src.rank();
        let basis: Vec<RingElement> = (0..n)
            .map(|j| {
                let mut c = vec![0; n];
                c[j] = 1;
                src.element(&c).unwrap()
            })
            .collect();
        for h in hom_enumerate(&src, &tgt, &limits).unwrap() {
            assert_eq!(h.apply(&tgt, &src.one()), tgt.one());
            for a in &basis {
                for b in &basis {
                    assert_eq!(h.apply(&tgt, &src.mul(a, b)), tgt.mul(&h.apply(&tgt, a), &h.apply(&tgt, b)));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn non_units_are_the_maximal_ideal_and_nilpotent(i in 0..RING_COUNT, s in seed()) {
        let r = ring(i);
        let x = element(&r, &s);
        let in_kernel = r.reduce(&x).iter().all(|&c| c == 0);
        prop_assert_eq!(!r.is_unit(&x), in_kernel);
        prop_assert_eq!(r.maximal_ideal().contains(&x), in_kernel);
        if in_kernel {
            prop_assert!(r.is_zero(&r.pow(&x, r.cardinality() as u64)));
        }
    }

    #[test]
    fn sampled_quotient_is_a_ring_map(i in 0..RING_COUNT, g in seed(), a in seed(), b in seed()) {
        let r = ring(i);
        let mut gen = element(&r, &g);
        if r.is_unit(&gen) {
            gen = match r.maximal_ideal().generators().first() {
                Some(t) => r.mul(&gen, t),
                None => r.zero(),
            };
        }
        let (q, map) = r.quotient_ring(&r.ideal_span(&[gen])).unwrap();
        let (x, y) = (element(&r, &a), element(&r, &b));
        let (px, py) = (map.project(&q, &x), map.project(&q, &y));
        prop_assert_eq!(map.project(&q, &r.add(&x, &y)), q.add(&px, &py));
        prop_assert_eq!(map.project(&q, &r.mul(&x, &y)), q.mul(&px, &py));
        prop_assert_eq!(map.project(&q, &map.lift(&r, &px)), px);
    }

    #[test]
    fn exact_divide_inverts_multiplication(i in 0..RING_COUNT, a in seed(), x in seed()) {
        let r = ring(i);
        let a = element(&r, &a);
        let x = element(&r, &x);
        if !r.is_zero_divisor(&a).unwrap() {
            prop_assert_eq!(r.exact_divide(&r.mul(&a, &x), &a).unwrap(), x);
        }
    }

    #[test]
    fn precision_model_agrees_with_higher_precision(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 2u32..6,
        extra in 1u32..4,
        a in -500i64..500,
        b in -500i64..500,
        c in -500i64..500,
        v in 1u32..3,
    ) {
        let low = FiniteLocalRing::witt_precision_model(p, n, 1).unwrap();
        let high = FiniteLocalRing::witt_precision_model(p, n + extra, 1).unwrap();
        let eval = |r: &FiniteLocalRing| -> Option<RingElement> {
            let pv = r.from_int(p.pow(v) as i64);
            let num = r.add(&r.mul(&r.from_int(a), &pv), &r.mul(&r.from_int(b), &r.mul(&pv, &pv)));
            let q = r.exact_divide(&num, &pv).ok()?;
            Some(r.sub(&r.mul(&q, &r.from_int(c)), &r.mul(&r.from_int(a), &r.from_int(b))))
        };
        if let (Some(lo), Some(hi)) = (eval(&low), eval(&high)) {
            let m = p.pow(lo.prec);
            prop_assert!(lo.prec <= n);
            prop_assert_eq!(lo.coords[0] % m, hi.coords[0] % m);
        }
    }
}

// ---- presented algebras ----------------------------------------------------------

fn linear_product(roots: &[i64]) -> String {
    roots.iter().map(|a| format!("(X - ({a}))")).collect::<Vec<_>>().join("*")
}

fn bivariate(a: i64, b: i64, c: i64, d: i64, e: i64) -> Vec<String> {
    vec![format!("(X - ({a}))*(X - ({b}))"), format!("(Y - ({c}))*(Y - ({d})) + ({e})*(X - ({a}))")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fiber_multiplication_is_a_commutative_ring(
        a in -2i64..=2, b in -2i64..=2, c in -2i64..=2, d in -2i64..=2, e in -2i64..=2,
        xs in prop::collection::vec(-3i64..=3, 12),
    ) {
        let rels = bivariate(a, b, c, d, e);
        let refs: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
        let pr = pres(3, &["X", "Y"], &refs);
        let QFiber::Finite(alg) = q_fiber(&pr, &Limits::default()).unwrap() else { panic!("finite") };
        let dim = alg.dim();
        let vec_of = |k: usize| -> Vec<BigRational> {
            (0..dim).map(|i| BigRational::from_integer(BigInt::from(xs[(k * dim + i) % xs.len()]))).collect()
        };
        let (x, y, z) = (vec_of(0), vec_of(1), vec_of(2));
        prop_assert_eq!(alg.mul(&x, &y), alg.mul(&y, &x));
        prop_assert_eq!(alg.mul(&alg.mul(&x, &y), &z), alg.mul(&x, &alg.mul(&y, &z)));
        prop_assert_eq!(alg.mul(&alg.one(), &x), x.clone());
        let (px, py) = (alg.poly_of(&x), alg.poly_of(&y));
        let mut f = px.clone();
        f.terms.clear();
        for (m1, c1) in &px.terms {
            for (m2, c2) in &py.terms {
                *f.terms.entry(m1.mul(m2)).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        f.terms.retain(|_, c| !c.is_zero());
        let nf = alg.normal_form(&f);
        prop_assert_eq!(alg.normal_form(&nf), nf.clone());
        prop_assert_eq!(alg.coords(&nf), alg.mul(&x, &y));
    }

    #[test]
    fn nilpotent_witnesses_vanish(
        a in -2i64..=2, c in -2i64..=2, d in -2i64..=2, e in -2i64..=2,
    ) {
        // (X - a)^2 makes the fiber non-reduced.
        let rels = bivariate(a, a, c, d, e);
        let refs: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
        let pr = pres(2, &["X", "Y"], &refs);
        let QFiber::Finite(alg) = q_fiber(&pr, &Limits::default()).unwrap() else { panic!("finite") };
        let (x, w) = nilpotent_witness(&alg).unwrap();
        prop_assert!(x.iter().any(|c| !c.is_zero()));
        prop_assert!(alg.pow(&x, alg.dim() as u32).iter().all(|c| c.is_zero()));
        prop_assert!(alg.pow(&x, w.vanishing_power).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn quotients_of_etale_fibers_stay_etale(
        roots in prop::collection::btree_set(-4i64..=4, 1..=4),
        keep in prop::collection::vec(any::<bool>(), 4),
        extra in prop::collection::vec(-4i64..=4, 0..=2),
    ) {
        let roots: Vec<i64> = roots.into_iter().collect();
        let base = linear_product(&roots);
        prop_assert_eq!(etale_check(&pres(5, &["X"], &[&base]), &Limits::default()).unwrap().verdict, Verdict::Pass);
        let kept: Vec<i64> = roots.iter().zip(&keep).filter(|(_, &k)| k).map(|(&r, _)| r).collect();
        if kept.is_empty() {
            return Ok(());
        }
        let mut factors = kept.clone();
        factors.extend(&extra);
        let g = linear_product(&factors);
        let report = etale_check(&pres(5, &["X"], &[&base, &g]), &Limits::default()).unwrap();
        prop_assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn etale_check_ignores_variable_and_relation_order(
        a in -2i64..=2, b in -2i64..=2, c in -2i64..=2, d in -2i64..=2, e in -2i64..=2, extra in -2i64..=2,
    ) {
        let mut rels = bivariate(a, b, c, d, e);
        rels.push(format!("X*Y - ({extra})*Y"));
        let refs: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
        let pr = pres(3, &["X", "Y"], &refs);
        let reversed: Vec<&str> = refs.iter().rev().copied().collect();
        let swapped = pr.permute_variables(&[1, 0]).unwrap();
        let limits = Limits::default();
        let base = etale_check(&pr, &limits).unwrap();
        for other in [pres(3, &["X", "Y"], &reversed), swapped] {
            let r = etale_check(&other, &limits).unwrap();
            prop_assert_eq!(r.verdict, base.verdict);
            prop_assert_eq!(r.dim, base.dim);
            prop_assert_eq!(r.omega_rank, base.omega_rank);
            prop_assert_eq!(r.reduced, base.reduced);
        }
    }
}

// ---- groups -----------------------------------------------------------------------

fn small_groups() -> Vec<FiniteGroup> {
    let c = |n| FiniteGroup::cyclic(n).unwrap();
    vec![
        c(1),
        c(2),
        c(3),
        c(4),
        c(6),
        FiniteGroup::dihedral(3).unwrap(),
        FiniteGroup::dihedral(4).unwrap(),
        FiniteGroup::symmetric(3).unwrap(),
        FiniteGroup::symmetric(4).unwrap(),
        FiniteGroup::quaternion8().unwrap(),
        FiniteGroup::direct_product(&c(2), &c(2)).unwrap(),
        FiniteGroup::direct_product(&c(2), &FiniteGroup::symmetric(3).unwrap()).unwrap(),
        FiniteGroup::direct_product(&c(3), &c(4)).unwrap(),
    ]
}

#[test]
fn words_reproduce_elements() {
    for g in small_groups().iter().chain([FiniteGroup::symmetric(5).unwrap()].iter()) {
        for a in 0..g.order() {
            let prod = g.word(a).iter().fold(g.identity(), |acc, &i| g.mul(acc, g.generators()[i]));
            assert_eq!(prod, a, "{}", g.name());
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn abelianization_divides_order() {
    for g in small_groups() {
        let ab = g.abelianization();
        assert_eq!(g.order() as u64 % ab.iter().product::<u64>(), 0, "{}", g.name());
    }
    for a in 1..=8u64 {
        for b in 1..=8u64 {
            let g = FiniteGroup::direct_product(&FiniteGroup::cyclic(a as usize).unwrap(), &FiniteGroup::cyclic(b as usize).unwrap()).unwrap();
            let d = gcd(a, b);
            let want: Vec<u64> = [d, a * b / d].into_iter().filter(|&x| x > 1).collect();
            assert_eq!(g.abelianization(), want, "C{a} x C{b}");
        }
    }
}

/// The map determined by generator images through a breadth-first search
/// of our own, and whether it respects left multiplication by generators.
fn hom_oracle(g: &FiniteGroup, h: &FiniteGroup, images: &[usize]) -> bool {
    let mut phi: Vec<Option<usize>> = vec![None; g.order()];
    phi[g.identity()] = Some(h.identity());
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(a) = queue.pop_front() {
        for (i, &s) in g.generators().iter().enumerate() {
            let b = g.mul(s, a);
            let img = h.mul(images[i], phi[a].unwrap());
            match phi[b] {
                None => {
                    phi[b] = Some(img);
                    queue.push_back(b);
                }
                Some(existing) if existing != img => return false,
                _ => {}
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hom_extension_matches_oracle(gi in 0usize..13, hi in 0usize..13, picks in prop::collection::vec(0usize..1000, 4)) {
        let groups = small_groups();
        let (g, h) = (&groups[gi], &groups[hi]);
        let images: Vec<usize> = (0..g.generators().len()).map(|i| picks[i % picks.len()] % h.order()).collect();
        let check = extend_and_verify_hom(g, h, &images).unwrap();
        prop_assert_eq!(check.is_hom(), hom_oracle(g, h, &images));
    }
}
