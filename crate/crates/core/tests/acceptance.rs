//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line;
//! run with `cargo test --test acceptance -- --nocapture` to see them.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udr::group::FiniteGroup;
use udr::local_ring::{AdditiveMap, FiniteLocalRing, RingElement};
use udr::poly::parse_poly;
use udr::presented::{etale_check, nilpotent_witness, q_fiber, r_alpha_presentation, Dimension, IntegerPolynomialPresentation, QFiber, Verdict};
use udr::representation::{
    def_set, hom_vs_derivation, kahler_extension, maranda_average, maranda_decide, residual_rep, square_zero_extension,
    tangent_space, Matrix, Representation,
};
use udr::udr_checks::{one_dim_udr_crosscheck, order_lower_bound};
use udr::Limits;

fn verdict_line(name: &str, ok: bool, detail: &str) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn pres(p: u64, vars: &[&str], rels: &[&str]) -> IntegerPolynomialPresentation {
    IntegerPolynomialPresentation::parse(p, vars, rels).unwrap()
}

fn field(p: u64, r: u32) -> Arc<FiniteLocalRing> {
    Arc::new(FiniteLocalRing::galois_ring(p, 1, r).unwrap())
}

fn galois(p: u64, m: u32) -> Arc<FiniteLocalRing> {
    Arc::new(FiniteLocalRing::galois_ring(p, m, 1).unwrap())
}

fn ints(ring: &FiniteLocalRing, n: usize, xs: &[i64]) -> Matrix {
    Matrix::from_ints(ring, n, xs).unwrap()
}

// ---------------------------------------------------------------------------

#[test]
fn etale_vectors() {
    let limits = Limits::default();
    let mut cases: Vec<(String, IntegerPolynomialPresentation, Verdict)> = vec![
        ("Z[X]/(X^2)".into(), pres(2, &["X"], &["X^2"]), Verdict::FailNotReduced),
        ("Z[X]".into(), pres(2, &["X"], &[]), Verdict::FailNotFinite),
        ("Z[X]/(X^2 - 5), p = 5".into(), pres(5, &["X"], &["X^2 - 5"]), Verdict::Pass),
    ];
    for (p, k) in [(2u64, 1u32), (2, 2), (3, 1)] {
        let rel = format!("X^{} - 1", p.pow(k));
        cases.push((format!("Z[X]/({rel}), p = {p}"), pres(p, &["X"], &[&rel]), Verdict::Pass));
    }
    for (p, r) in [(2u64, 1u32), (2, 2), (5, 1)] {
        let c = p.pow(r);
        let rel = format!("X^2 - {c}*X");
        cases.push((format!("Z[X]/({rel}), p = {p}"), pres(p, &["X"], &[&rel]), Verdict::Pass));
        let lin = format!("{c}*X");
        cases.push((format!("Z[X]/(X^2, {lin}), p = {p}"), pres(p, &["X"], &["X^2", &lin]), Verdict::Pass));
    }
    let mut wrong = Vec::new();
    for (name, pr, want) in &cases {
        let got = etale_check(pr, &limits).unwrap().verdict;
        if got != *want {
            wrong.push(format!("{name}: {got:?}"));
        }
    }
    let mut witnesses = 0;
    for alpha in 0..3 {
        let pr = r_alpha_presentation(alpha, 2).unwrap();
        let report = etale_check(&pr, &limits).unwrap();
        let QFiber::Finite(a) = q_fiber(&pr, &limits).unwrap() else {
            wrong.push(format!("R_{alpha} infinite"));
            continue;
        };
        let (v, w) = nilpotent_witness(&a).unwrap();
        let zero = |x: &[BigRational]| x.iter().all(|c| c.is_zero());
        let k = w.vanishing_power;
        let verified = !zero(&v) && k >= 2 && zero(&a.pow(&v, k)) && !zero(&a.pow(&v, k - 1));
        if report.verdict != Verdict::FailNotReduced || report.witness.as_ref() != Some(&w) || !verified {
            wrong.push(format!("R_{alpha}: {:?}", report.verdict));
        } else {
            witnesses += 1;
        }
    }
    let total = cases.len() + 3;
    verdict_line(
        "etale vectors",
        wrong.is_empty(),
        &format!("{}/{total} exact verdicts, {witnesses}/3 nilpotent witnesses re-verified {wrong:?}", total - wrong.len()),
    );
}

// ---------------------------------------------------------------------------

type QPolyU = Vec<BigRational>;

fn trim(mut f: QPolyU) -> QPolyU {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn poly_rem(a: &QPolyU, b: &QPolyU) -> QPolyU {
    let mut r = trim(a.clone());
    let b = trim(b.clone());
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &c * bc;
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &QPolyU, b: &QPolyU) -> QPolyU {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn derivative(f: &QPolyU) -> QPolyU {
    trim(f.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

fn render_univariate(coeffs: &[i64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| format!("({c})*X^{i}"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn mul_univariate(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A random univariate polynomial of degree 1..=4, with a repeated factor
/// about half the time.
fn random_univariate(rng: &mut ChaCha8Rng) -> Vec<i64> {
    let lin = |rng: &mut ChaCha8Rng| vec![rng.gen_range(-3..=3), 1];
    match rng.gen_range(0..4) {
        0 => {
            let l = lin(rng);
            let sq = mul_univariate(&l, &l);
            if rng.gen_bool(0.5) {
                mul_univariate(&sq, &lin(rng))
            } else {
                sq
            }
        }
        1 => {
            let mut f = mul_univariate(&lin(rng), &lin(rng));
            f = mul_univariate(&f, &lin(rng));
            f
        }
        _ => {
            let deg = rng.gen_range(1..=4);
            let mut f: Vec<i64> = (0..deg).map(|_| rng.gen_range(-4..=4)).collect();
            f.push(rng.gen_range(1..=2));
            f
        }
    }
}

#[test]
fn reducedness_criteria_agree() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let primes = [2u64, 3, 5];
    let mut presentations: Vec<(IntegerPolynomialPresentation, Option<Vec<Vec<i64>>>)> = Vec::new();
    for (p, vars, rels) in [
        (2, vec!["X"], vec!["X^2"]),
        (2, vec!["X"], vec!["X^2 - 1"]),
        (2, vec!["X"], vec!["X^4 - 1"]),
        (3, vec!["X"], vec!["X^3 - 1"]),
        (5, vec!["X"], vec!["X^2 - 5"]),
        (2, vec!["X"], vec!["X^2 - 2*X"]),
        (2, vec!["X"], vec!["X^2 - 4*X"]),
        (5, vec!["X"], vec!["X^2 - 5*X"]),
        (2, vec!["X"], vec!["X^2", "2*X"]),
    ] {
        presentations.push((pres(p, &vars, &rels), None));
    }
    for alpha in 0..3 {
        presentations.push((r_alpha_presentation(alpha, 2).unwrap(), None));
    }
    let mut random = 0;
    while random < 60 {
        let p = primes[rng.gen_range(0..primes.len())];
        if rng.gen_bool(0.5) {
            let nrel = rng.gen_range(1..=2);
            let mut polys = vec![random_univariate(&mut rng)];
            if nrel == 2 {
                let common = &polys[0];
                let other = mul_univariate(common, &[rng.gen_range(-2..=2), 1]);
                polys.push(other);
            }
            let rels: Vec<String> = polys.iter().map(|f| render_univariate(f)).collect();
            let refs: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
            presentations.push((pres(p, &["X"], &refs), Some(polys)));
        } else {
            let (a, b, c, d) =
                (rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            let e: i64 = rng.gen_range(-2..=2);
            let f1 = format!("(X - ({a}))*(X - ({b}))");
            let f2 = format!("(Y - ({c}))*(Y - ({d})) + ({e})*(X - ({a}))");
            let mut rels = vec![f1, f2];
            if rng.gen_bool(0.3) {
                rels.push(format!("X*Y - ({})*Y", rng.gen_range(-2..=2)));
            }
            let refs: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
            presentations.push((pres(p, &["X", "Y"], &refs), None));
        }
        random += 1;
    }
    let mut disagreements = Vec::new();
    let (mut reduced, mut nonreduced, mut gcd_checked) = (0, 0, 0);
    for (pr, univariate) in &presentations {
        let report = match etale_check(pr, &limits) {
            Ok(r) => r,
            Err(e) => {
                disagreements.push(format!("{pr}: {e}"));
                continue;
            }
        };
        let Dimension::Finite(dim) = report.dim else {
            disagreements.push(format!("{pr}: not finite"));
            continue;
        };
        let by_trace = report.trace_det.as_deref() != Some("0");
        let by_jacobian = report.omega_rank == Some(0);
        if by_trace != by_jacobian || report.reduced != Some(by_trace) {
            disagreements.push(format!("{pr}: trace {by_trace}, jacobian {by_jacobian}"));
        }
        if by_trace {
            reduced += 1;
        } else {
            nonreduced += 1;
        }
        if let Some(polys) = univariate {
            let q: Vec<QPolyU> = polys
                .iter()
                .map(|f| f.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
                .collect();
            let g = q.iter().skip(1).fold(trim(q[0].clone()), |acc, f| poly_gcd(&acc, f));
            let deg = g.len().saturating_sub(1);
            let squarefree = poly_gcd(&g, &derivative(&g)).len() <= 1;
            if deg != dim || squarefree != by_trace {
                disagreements.push(format!("{pr}: gcd criterion says degree {deg}, squarefree {squarefree}"));
            }
            gcd_checked += 1;
        }
    }
    let ok = disagreements.is_empty() && reduced > 0 && nonreduced > 0 && random >= 50;
    verdict_line(
        "reducedness criteria agree",
        ok,
        &format!(
            "{} presentations ({random} random; {reduced} reduced, {nonreduced} not), {gcd_checked} also by gcd(f, f'), disagreements {disagreements:?}",
            presentations.len()
        ),
    );
}

// ---------------------------------------------------------------------------

fn class_count(residual: &Representation, ring: &Arc<FiniteLocalRing>) -> usize {
    def_set(residual, ring.clone(), &Limits::default()).unwrap().class_count
}

#[test]
fn unique_deformation_when_p_coprime() {
    let c3 = Arc::new(FiniteGroup::cyclic(3).unwrap());
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let f2 = field(2, 1);
    let f3 = field(3, 1);
    let f5 = field(5, 1);
    let f2_dual = Arc::new(FiniteLocalRing::galois_ring(2, 1, 1).unwrap().dual_numbers().unwrap());

    let c3_reps = vec![
        Representation::trivial(c3.clone(), f2.clone(), 1),
        Representation::trivial(c3.clone(), f2.clone(), 2),
        residual_rep(c3.clone(), f2.clone(), vec![ints(&f2, 2, &[0, 1, 1, 1])]).unwrap(),
    ];
    let c2_reps = vec![
        Representation::trivial(c2.clone(), f3.clone(), 1),
        residual_rep(c2.clone(), f3.clone(), vec![ints(&f3, 1, &[-1])]).unwrap(),
        Representation::trivial(c2.clone(), f3.clone(), 2),
        residual_rep(c2.clone(), f3.clone(), vec![ints(&f3, 2, &[1, 0, 0, -1])]).unwrap(),
        residual_rep(c2.clone(), f3.clone(), vec![ints(&f3, 2, &[-1, 0, 0, -1])]).unwrap(),
    ];
    let s3_p5 = vec![
        Representation::trivial(s3.clone(), f5.clone(), 1),
        residual_rep(s3.clone(), f5.clone(), vec![ints(&f5, 1, &[-1]), ints(&f5, 1, &[1])]).unwrap(),
        residual_rep(s3.clone(), f5.clone(), vec![ints(&f5, 2, &[0, 1, 1, 0]), ints(&f5, 2, &[0, -1, 1, -1])]).unwrap(),
    ];
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut run = |reps: &[Representation], rings: &[Arc<FiniteLocalRing>]| {
        for rho in reps {
            for ring in rings {
                let n = class_count(rho, ring);
                checked += 1;
                if n != 1 {
                    bad.push(format!("{} dim {} over {ring}: {n}", rho.group().name(), rho.dim()));
                }
            }
        }
    };
    run(&c3_reps, &[galois(2, 2), galois(2, 3), f2_dual.clone()]);
    run(&c2_reps, &[galois(3, 2)]);
    run(&s3_p5, &[galois(5, 2)]);
    verdict_line(
        "unique deformation when p does not divide |G|",
        bad.is_empty(),
        &format!("{checked} (representation, ring) pairs with |Def| = 1 {bad:?}"),
    );

    // S3 with p = 2 is outside the hypothesis (2 divides 6); shown for contrast.
    let s3_p2 = [
        ("trivial", Representation::trivial(s3.clone(), f2.clone(), 1)),
        ("two-dim irreducible", residual_rep(s3.clone(), f2.clone(), vec![ints(&f2, 2, &[0, 1, 1, 0]), ints(&f2, 2, &[0, 1, 1, 1])]).unwrap()),
    ];
    let counts: Vec<String> = s3_p2
        .iter()
        .flat_map(|(name, rho)| {
            [galois(2, 2), galois(2, 3), f2_dual.clone()]
                .into_iter()
                .map(move |ring| format!("{name}/{}={}", ring.cardinality(), class_count(rho, &ring)))
        })
        .collect();
    println!("INFO  S3 with p = 2 (2 divides |G|), class counts: {}", counts.join(", "));
}

// ---------------------------------------------------------------------------

#[test]
fn one_dim_deformation_counts() {
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let c3 = Arc::new(FiniteGroup::cyclic(3).unwrap());
    let c4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let f3 = field(3, 1);
    let sign = residual_rep(s3.clone(), f3.clone(), vec![ints(&f3, 1, &[-1]), ints(&f3, 1, &[1])]).unwrap();
    let cases = [
        ("C2 over Z/4", Representation::trivial(c2.clone(), field(2, 1), 1), galois(2, 2), 2u128),
        ("C2 over Z/8", Representation::trivial(c2, field(2, 1), 1), galois(2, 3), 4),
        ("C3 over Z/9", Representation::trivial(c3, f3.clone(), 1), galois(3, 2), 3),
        ("C4 over Z/8", Representation::trivial(c4, field(2, 1), 1), galois(2, 3), 4),
        ("S3 sign over Z/9", sign, galois(3, 2), 1),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, rho, ring, want) in cases {
        let c = one_dim_udr_crosscheck(&rho, ring, &Limits::default()).unwrap();
        ok &= c.def_count as u128 == want && c.predicted == want;
        lines.push(format!("{name} {}/{}/{want}", c.def_count, c.predicted));
    }
    verdict_line("one-dimensional counts (|Def| / predicted / expected)", ok, &lines.join(", "));
}

// ---------------------------------------------------------------------------

/// Entries of a matrix over `Z/p^N`, as integers.
fn int_entries(m: &Matrix) -> Vec<i128> {
    m.entries().iter().map(|x| x.coords[0] as i128).collect()
}

fn int_mul(a: &[i128], b: &[i128], n: usize, modulus: i128) -> Vec<i128> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum::<i128>().rem_euclid(modulus);
        }
    }
    out
}

fn random_unit_matrix(ring: &FiniteLocalRing, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let xs: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..64)).collect();
        let m = ints(ring, n, &xs);
        if m.is_invertible(ring) {
            return m;
        }
    }
}

/// `I + 2 X` for random `X`.
fn random_congruent_to_identity(ring: &FiniteLocalRing, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let xs: Vec<i64> = (0..n * n).map(|i| 2 * rng.gen_range(0..32) + i64::from(i % (n + 1) == 0)).collect();
    ints(ring, n, &xs)
}

/// Matrices `T` with `T^order = I`: diagonal roots of unity and, in
/// dimension two, a permutation or rotation.
fn torsion_types(ring: &FiniteLocalRing, n: usize, order: usize) -> Vec<Matrix> {
    let modulus = ring.cardinality() as i64;
    let roots: Vec<i64> = (1..modulus)
        .filter(|&u| (0..order).fold(1i64, |acc, _| acc * u % modulus) == 1)
        .collect();
    let mut out = Vec::new();
    if n == 1 {
        for &u in &roots {
            out.push(ints(ring, 1, &[u]));
        }
    } else {
        for &a in &roots {
            for &b in &roots {
                out.push(ints(ring, 2, &[a, 0, 0, b]));
            }
        }
        out.push(ints(ring, 2, &[0, 1, 1, 0]));
        if order == 4 {
            out.push(ints(ring, 2, &[0, -1, 1, 0]));
        }
    }
    out
}

fn conjugate_by(ring: &FiniteLocalRing, k: &Matrix, t: &Matrix) -> Matrix {
    k.mul(ring, t).mul(ring, &k.inverse(ring).unwrap())
}

/// `ρ₁(h) B₀ ≡ B₀ ρ₂(h)` for all `h`, checked with plain integers.
fn certificate_holds(g1: &Matrix, g2: &Matrix, b0: &Matrix, n: usize, order: usize, modulus: i128) -> bool {
    let (a, b, c) = (int_entries(g1), int_entries(g2), int_entries(b0));
    let reduce = |v: Vec<i128>| v.into_iter().map(|x| x.rem_euclid(modulus)).collect::<Vec<_>>();
    let mut identity = vec![0i128; n * n];
    for i in 0..n {
        identity[i * n + i] = 1;
    }
    let c_mod2: Vec<i128> = c.iter().map(|x| x.rem_euclid(2)).collect();
    if c_mod2 != identity {
        return false;
    }
    let (mut pa, mut pb) = (identity.clone(), identity);
    for _ in 0..order {
        if reduce(int_mul(&pa, &c, n, modulus)) != reduce(int_mul(&c, &pb, n, modulus)) {
            return false;
        }
        pa = int_mul(&pa, &a, n, modulus);
        pb = int_mul(&pb, &b, n, modulus);
    }
    true
}

fn trace_det(m: &Matrix, modulus: i128) -> (i128, i128) {
    let e = int_entries(m);
    if e.len() == 1 {
        (e[0].rem_euclid(modulus), e[0].rem_euclid(modulus))
    } else {
        ((e[0] + e[3]).rem_euclid(modulus), (e[0] * e[3] - e[1] * e[2]).rem_euclid(modulus))
    }
}

#[test]
fn averaging_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let limits = Limits::default();
    let (mut certified, mut rejected, mut failures) = (0, 0, Vec::new());
    for order in [2usize, 4] {
        let group = Arc::new(FiniteGroup::cyclic(order).unwrap());
        let r = order.trailing_zeros();
        let n_prec = r + 4;
        let ring = Arc::new(FiniteLocalRing::witt_precision_model(2, n_prec, 1).unwrap());
        let j_modulus = 2 * order as i128;
        let cert_modulus = 1i128 << (n_prec - r);
        for n in [1usize, 2] {
            let types = torsion_types(&ring, n, order);
            let rep = |m: Matrix| Representation::from_generator_images(group.clone(), ring.clone(), vec![m]).unwrap();
            for _ in 0..30 {
                let t = &types[rng.gen_range(0..types.len())];
                let k0 = random_unit_matrix(&ring, n, &mut rng);
                let rho = conjugate_by(&ring, &k0, t);
                let k = random_congruent_to_identity(&ring, n, &mut rng);
                let rho1 = rep(conjugate_by(&ring, &k, &rho));
                let rho2 = rep(rho.clone());
                let perturbation: Vec<i64> = (0..n * n).map(|_| j_modulus as i64 * rng.gen_range(0..8)).collect();
                let a = k.add(&ring, &ints(&ring, n, &perturbation));
                match maranda_average(&rho1, &rho2, &a) {
                    Ok(cert)
                        if cert.precision == n_prec - r
                            && certificate_holds(rho1.matrix(1), rho2.matrix(1), &cert.b0, n, order, cert_modulus) =>
                    {
                        certified += 1
                    }
                    other => failures.push(format!("C{order} n={n}: {other:?}")),
                }
            }
            let mut made = 0;
            while made < 30 {
                let t1 = &types[rng.gen_range(0..types.len())];
                let t2 = &types[rng.gen_range(0..types.len())];
                if trace_det(t1, j_modulus) == trace_det(t2, j_modulus) {
                    continue;
                }
                let k1 = random_unit_matrix(&ring, n, &mut rng);
                let k2 = random_unit_matrix(&ring, n, &mut rng);
                let rho1 = rep(conjugate_by(&ring, &k1, t1));
                let rho2 = rep(conjugate_by(&ring, &k2, t2));
                match maranda_decide(&rho1, &rho2, &limits) {
                    Ok(d) if !d.equivalent => rejected += 1,
                    other => failures.push(format!("C{order} n={n} inequivalent pair: {:?}", other.map(|d| d.equivalent))),
                }
                made += 1;
            }
        }
    }
    verdict_line(
        "averaging round trip",
        failures.is_empty() && certified >= 100 && rejected >= 100,
        &format!("{certified} certificates exact at precision N - r, {rejected} inequivalent pairs rejected {failures:?}"),
    );
}

// ---------------------------------------------------------------------------

fn is_power_of(mut x: usize, q: usize) -> bool {
    while x > 1 && x.is_multiple_of(q) {
        x /= q;
    }
    x == 1
}

#[test]
fn tangent_counts_are_q_powers() {
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let c3 = Arc::new(FiniteGroup::cyclic(3).unwrap());
    let v4 = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(2).unwrap()).unwrap());
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let q8 = Arc::new(FiniteGroup::quaternion8().unwrap());
    let (f2, f3, f4) = (field(2, 1), field(3, 1), field(2, 2));
    let omega = Matrix::from_entries(&f4, 1, vec![f4.element(&[0, 1]).unwrap()]).unwrap();
    let reps: Vec<(&str, Representation)> = vec![
        ("C2 trivial F2", Representation::trivial(c2.clone(), f2.clone(), 1)),
        ("C2 trivial F2^2", Representation::trivial(c2.clone(), f2.clone(), 2)),
        ("C2 regular F2", residual_rep(c2.clone(), f2.clone(), vec![ints(&f2, 2, &[0, 1, 1, 0])]).unwrap()),
        ("C3 trivial F3", Representation::trivial(c3.clone(), f3.clone(), 1)),
        ("C3 trivial F3^2", Representation::trivial(c3.clone(), f3.clone(), 2)),
        ("C3 irreducible F2^2", residual_rep(c3.clone(), f2.clone(), vec![ints(&f2, 2, &[0, 1, 1, 1])]).unwrap()),
        ("C3 character F4", residual_rep(c3.clone(), f4.clone(), vec![omega]).unwrap()),
        ("C2xC2 trivial F2", Representation::trivial(v4.clone(), f2.clone(), 1)),
        (
            "C2xC2 unipotent F2^2",
            residual_rep(v4.clone(), f2.clone(), vec![ints(&f2, 2, &[1, 1, 0, 1]), ints(&f2, 2, &[1, 0, 0, 1])]).unwrap(),
        ),
        ("S3 trivial F2", Representation::trivial(s3.clone(), f2.clone(), 1)),
        ("S3 sign F3", residual_rep(s3.clone(), f3.clone(), vec![ints(&f3, 1, &[-1]), ints(&f3, 1, &[1])]).unwrap()),
        (
            "S3 irreducible F2^2",
            residual_rep(s3.clone(), f2.clone(), vec![ints(&f2, 2, &[0, 1, 1, 0]), ints(&f2, 2, &[0, 1, 1, 1])]).unwrap(),
        ),
        ("Q8 trivial F2", Representation::trivial(q8.clone(), f2.clone(), 1)),
        ("Q8 trivial F3", Representation::trivial(q8.clone(), f3.clone(), 1)),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, rho) in &reps {
        let q = rho.ring().cardinality() as usize;
        match tangent_space(rho, &Limits::default()) {
            Ok(t) => {
                let good = is_power_of(t.def.class_count, q) && q.pow(t.dimension) == t.def.class_count;
                ok &= good;
                lines.push(format!("{name} {}={q}^{}", t.def.class_count, t.dimension));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("{name} error {e}"));
            }
        }
    }
    verdict_line(
        "tangent counts are powers of q",
        ok && reps.len() >= 10,
        &format!("{} representations: {}", reps.len(), lines.join(", ")),
    );
}

// ---------------------------------------------------------------------------

#[test]
fn order_bound_example() {
    let limits = Limits::default();
    let s = pres(2, &["X"], &["X^2 - 4*X"]);
    let f1 = vec![parse_poly("0", &s.vars).unwrap()];
    let f2 = vec![parse_poly("4", &s.vars).unwrap()];
    let res = order_lower_bound(&s, &s, &f1, &f2, &limits).unwrap();
    // Re-check both memberships of f2(X) - f1(X) = 4 in truncations of S.
    let member = |level: u32, prec: u32| {
        let t = FiniteLocalRing::from_truncated_presentation(&s, prec, &limits).unwrap();
        let ideal = t.scale_ideal(1 << level, &t.maximal_ideal());
        ideal.contains(&t.from_int(4))
    };
    let l = res.congruence_level;
    let congruent = res.congruence_precisions.iter().all(|&n| member(l, n));
    let strict = res.non_congruence_precisions.iter().all(|&n| !member(l + 1, n));
    let ok = res.claim == "4 | |G|"
        && res.congruence_precisions.len() >= 2
        && res.non_congruence_precisions.len() >= 2
        && congruent
        && strict;
    verdict_line(
        "order bound example",
        ok,
        &format!(
            "claim \"{}\", congruence re-verified at precisions {:?}, non-congruence at {:?}",
            res.claim, res.congruence_precisions, res.non_congruence_precisions
        ),
    );
}

// ---------------------------------------------------------------------------

fn brute_is_hom(source: &FiniteLocalRing, target: &FiniteLocalRing, g: &AdditiveMap) -> bool {
    let elems = source.enumerate_elements(&Limits::default()).unwrap();
    if g.apply(target, &source.one()) != target.one() {
        return false;
    }
    let images: Vec<RingElement> = elems.iter().map(|x| g.apply(target, x)).collect();
    for (x, gx) in elems.iter().zip(&images) {
        for (y, gy) in elems.iter().zip(&images) {
            if g.apply(target, &source.mul(x, y)) != target.mul(gx, gy) {
                return false;
            }
        }
    }
    true
}

fn random_module_map(
    source: &FiniteLocalRing,
    target: &FiniteLocalRing,
    module: &[RingElement],
    rng: &mut ChaCha8Rng,
) -> AdditiveMap {
    let images = (0..source.rank())
        .map(|i| {
            let mut x = module.iter().fold(target.zero(), |acc, m| target.add(&acc, &target.scale(m, rng.gen_range(0..9))));
            for _ in 0..8 {
                let mut v = vec![target.zero(); source.rank()];
                v[i] = x.clone();
                if AdditiveMap::new(source, target, v).is_ok() {
                    break;
                }
                x = target.scale(&x, source.p() as i64);
            }
            x
        })
        .collect();
    AdditiveMap::new(source, target, images).unwrap()
}

#[test]
fn derivations_match_homomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let limits = Limits::default();
    let bases: Vec<FiniteLocalRing> = vec![
        FiniteLocalRing::galois_ring(2, 2, 1).unwrap(),
        FiniteLocalRing::galois_ring(2, 3, 1).unwrap(),
        FiniteLocalRing::galois_ring(3, 2, 1).unwrap(),
        FiniteLocalRing::galois_ring(2, 1, 2).unwrap(),
        FiniteLocalRing::galois_ring(2, 2, 2).unwrap(),
        FiniteLocalRing::galois_ring(2, 1, 1).unwrap().dual_numbers().unwrap(),
        FiniteLocalRing::galois_ring(2, 2, 1).unwrap().dual_numbers().unwrap(),
        FiniteLocalRing::from_truncated_presentation(&pres(2, &["X"], &["X^2 - 2*X"]), 2, &limits).unwrap(),
        FiniteLocalRing::from_truncated_presentation(&pres(3, &["X"], &["X^2 - 3"]), 2, &limits).unwrap(),
    ];
    let (mut cases, mut agree, mut homs, mut brute) = (0, 0, 0, 0);
    let mut mismatches = Vec::new();
    while cases < 240 {
        let base = &bases[rng.gen_range(0..bases.len())];
        let k = rng.gen_range(1..=2usize);
        let nrel = rng.gen_range(0..=2usize);
        let relations: Vec<Vec<RingElement>> = (0..nrel)
            .map(|_| {
                (0..k)
                    .map(|_| {
                        let coords: Vec<u64> = (0..base.rank()).map(|_| rng.gen_range(0..9)).collect();
                        base.full(coords)
                    })
                    .collect()
            })
            .collect();
        let names: Vec<&str> = ["M1", "M2"][..k].to_vec();
        let Ok(ext) = square_zero_extension(base, &relations, &names) else { continue };
        if ext.ring.cardinality() > 256 || ext.module_cardinality() == 1 {
            continue;
        }
        let s = &ext.ring;
        let module = ext.module_ideal.additive_generators();
        let (source, f): (&FiniteLocalRing, AdditiveMap) = if rng.gen_bool(0.5) {
            (base, ext.inclusion.clone())
        } else {
            (s.as_ref(), AdditiveMap::identity(s))
        };
        let d = if rng.gen_bool(0.2) {
            AdditiveMap::zero(source, s)
        } else {
            random_module_map(source, s, &module, &mut rng)
        };
        let g = f.add(s, &d);
        let (is_hom, is_der) = hom_vs_derivation(source, s, &f, &g, &ext.module_ideal).unwrap();
        cases += 1;
        homs += usize::from(is_hom);
        let oracle_ok = if source.cardinality() * source.cardinality() <= 4096 {
            brute += 1;
            brute_is_hom(source, s, &g) == is_hom
        } else {
            true
        };
        if is_hom == is_der && oracle_ok {
            agree += 1;
        } else {
            mismatches.push(format!("{source} -> {s}: hom {is_hom}, derivation {is_der}, brute ok {oracle_ok}"));
        }
    }
    // Kähler extensions supply genuine derivations of every size.
    let mut kahler_cases = 0;
    for (p, rel) in [(2u64, "X^2"), (2, "X^2 - 2*X"), (3, "X^2 - 3*X")] {
        let kx = kahler_extension(&pres(p, &["X"], &[rel]), 2, &limits).unwrap();
        let s = &kx.extension.ring;
        for c in 0..(p * p) as i64 {
            let g = kx.extension.inclusion.add(s, &AdditiveMap { images: kx.universal.images.iter().map(|x| s.scale(x, c)).collect() });
            let (h, dv) = hom_vs_derivation(&kx.base, s, &kx.extension.inclusion, &g, &kx.extension.module_ideal).unwrap();
            kahler_cases += 1;
            if !(h && dv) {
                mismatches.push(format!("Kahler {rel} C = {c}: hom {h}, derivation {dv}"));
            }
        }
    }
    // x + e y -> x + C e y on Z/8[e].
    let z8e = FiniteLocalRing::galois_ring(2, 3, 1).unwrap().dual_numbers().unwrap();
    let eps = z8e.generators().last().unwrap().clone();
    let ideal = z8e.ideal_span(std::slice::from_ref(&eps));
    let id = AdditiveMap::identity(&z8e);
    let mut family_ok = 0;
    for c in 0..8 {
        let g = AdditiveMap::new(&z8e, &z8e, vec![z8e.one(), z8e.scale(&eps, c)]).unwrap();
        let (h, dv) = hom_vs_derivation(&z8e, &z8e, &id, &g, &ideal).unwrap();
        if h && dv && brute_is_hom(&z8e, &z8e, &g) {
            family_ok += 1;
        }
    }
    let ok = mismatches.is_empty() && agree >= 200 && homs > 0 && homs < cases && family_ok == 8;
    verdict_line(
        "derivations match homomorphisms",
        ok,
        &format!(
            "{agree}/{cases} random perturbations agree ({homs} homomorphisms, {brute} also brute-forced), {kahler_cases} Kahler multiples, Z/8[e] family {family_ok}/8 {mismatches:?}"
        ),
    );
}

// ---------------------------------------------------------------------------

fn jobs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn run_cli(command: &str, job: &PathBuf, extra: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_udr"))
        .arg(command)
        .arg(job)
        .args(extra)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn cli_reports_deterministic() {
    let mut jobs: Vec<PathBuf> = std::fs::read_dir(jobs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    jobs.sort();
    let cache = tempfile::tempdir().unwrap();
    let cache_dir = cache.path().to_str().unwrap().to_string();
    let mut bad = Vec::new();
    for job in &jobs {
        let text = std::fs::read_to_string(job).unwrap();
        let command = udr::cli::parse_job(&text).unwrap().command.unwrap().name();
        let (a, ca) = run_cli(command, job, &["--no-cache", "--threads", "1"]);
        let (b, cb) = run_cli(command, job, &["--no-cache", "--threads", "8"]);
        let (c, cc) = run_cli(command, job, &["--cache-dir", &cache_dir, "--threads", "2"]);
        let (d, cd) = run_cli(command, job, &["--cache-dir", &cache_dir, "--threads", "3"]);
        let expected_code = if command == "etale-check" && String::from_utf8_lossy(&a).contains("\"FAIL_") { 2 } else { 0 };
        if a.is_empty() || a != b || a != c || a != d || [ca, cb, cc, cd].iter().any(|&x| x != expected_code) {
            bad.push(job.file_name().unwrap().to_string_lossy().to_string());
        }
    }
    verdict_line(
        "CLI reports are byte-identical across thread counts and cache hits",
        bad.is_empty() && !jobs.is_empty(),
        &format!("{} jobs, 4 runs each {bad:?}", jobs.len()),
    );
}
