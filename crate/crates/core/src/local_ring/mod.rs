//! Finite commutative local rings with residue field F_{p^r}.
//!
//! A ring is stored as an additive basis `e_1..e_N` over Z/p^m, where `e_i`
//! has additive order `p^{k_i}`, together with structure constants
//! `e_i e_j = sum_k c_ijk e_k`. Galois rings, truncated presentations,
//! quotients and square-zero extensions all reduce to this one shape, so
//! ideals, quotients and enumeration are uniform linear algebra over Z/p^m.
//!
//! Rings in [`Mode::PrecisionModel`] stand in for a characteristic-zero ring
//! `R` that is free over W(k): the table is that of `R/p^N R`, and each
//! element carries the exponent up to which it is actually known.

mod fingerprint;
mod hom;
mod ideal;
mod presentation;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::zmod::{fp_left_kernel, is_prime, Howell, QuotientModule, Zpm};
use crate::{Error, Limits, Result};

pub use fingerprint::{compare_fingerprints, FingerprintComparison, RingFingerprint};
pub use hom::{hom_enumerate, hom_from_generator_images, AdditiveMap, RingHom};
pub use ideal::Ideal;
pub(crate) use presentation::{presentation_truncation, residue_points};

/// Parameters of the Galois ring GR(p^m, r) = (Z/p^m)[Y]/(h).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GaloisRingSpec {
    pub p: u64,
    pub m: u32,
    pub r: u32,
    /// Coefficients of the monic modulus `h`, lowest degree first
    /// (length `r + 1`).
    pub modulus: Vec<u64>,
}

impl GaloisRingSpec {
    /// Validates the parameters; when `h` is omitted a built-in irreducible
    /// polynomial is used (available for `r <= 4`).
    pub fn new(p: u64, m: u32, r: u32, h: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 || r == 0 {
            return Err(Error::InvalidParameter("precision and residue degree must be at least 1".into()));
        }
        let z = Zpm::new(p, m)?;
        let modulus = match h {
            Some(h) => {
                if h.len() != r as usize + 1 || h[r as usize] % z.modulus != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "modulus must be monic of degree {r} (given lowest degree first)"
                    )));
                }
                let h: Vec<u64> = h.iter().map(|&c| c % z.modulus).collect();
                let hbar: Vec<u64> = h.iter().map(|&c| c % p).collect();
                if !fp_irreducible(p, &hbar) {
                    return Err(Error::ReducibleModulus { p });
                }
                h
            }
            None => {
                if r > 4 {
                    return Err(Error::NoBuiltinModulus(r));
                }
                builtin_modulus(p, r)
            }
        };
        Ok(GaloisRingSpec { p, m, r, modulus })
    }

    pub fn zpm(&self) -> Zpm {
        Zpm::new(self.p, self.m).expect("validated")
    }

    /// Same residue field at another precision.
    pub fn with_precision(&self, m: u32) -> Result<Self> {
        let z = Zpm::new(self.p, m)?;
        Ok(GaloisRingSpec { m, modulus: self.modulus.iter().map(|&c| c % z.modulus).collect(), ..self.clone() })
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }
}

/// Monic polynomials over F_p of degree `d`, lowest coefficient first, in
/// lexicographic order of their coefficient vectors read from the top.
fn monic_polys(p: u64, d: u32) -> Vec<Vec<u64>> {
    let count = p.pow(d);
    (0..count)
        .map(|mut idx| {
            let mut v = vec![0u64; d as usize + 1];
            for c in v.iter_mut().take(d as usize) {
                *c = idx % p;
                idx /= p;
            }
            v[d as usize] = 1;
            v
        })
        .collect()
}

fn fp_poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let z = Zpm::new(p, 1).expect("prime");
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = z.inv(b[db]).expect("nonzero lead");
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = z.mul(top, lead_inv);
            let shift = r.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = z.sub(r[shift + i], z.mul(f, bc));
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by all monic polynomials of degree up to half.
pub(crate) fn fp_irreducible(p: u64, h: &[u64]) -> bool {
    let d = h.len() as u32 - 1;
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        for f in monic_polys(p, k) {
            if fp_poly_rem(p, h, &f).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible polynomial of degree `r` over F_p in the
/// enumeration order of `monic_polys`.
fn builtin_modulus(p: u64, r: u32) -> Vec<u64> {
    monic_polys(p, r)
        .into_iter()
        .find(|h| fp_irreducible(p, h))
        .expect("irreducible polynomials exist in every degree")
}

/// Whether elements carry precision bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactFinite,
    PrecisionModel,
}

/// Element of a [`FiniteLocalRing`]: coordinates on the additive basis and
/// the exponent up to which they are known.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    pub coords: Vec<u64>,
    pub prec: u32,
}

/// A finite local ring with residue field F_{p^r}; see the module docs.
#[derive(Debug, Clone)]
pub struct FiniteLocalRing {
    spec: GaloisRingSpec,
    z: Zpm,
    orders: Vec<u32>,
    /// Sparse structure constants, indexed by `i * N + j`.
    table: Vec<Vec<(usize, u64)>>,
    one: Vec<u64>,
    /// Images of `1, Y, ..., Y^{r-1}`.
    base_powers: Vec<Vec<u64>>,
    /// Reduction of each basis element, as coordinates in F_p^r.
    reduction: Vec<Vec<u64>>,
    generators: Vec<Vec<u64>>,
    generator_names: Vec<String>,
    basis_names: Vec<String>,
    mode: Mode,
    words: Arc<Words>,
}

/// Monomials in the multipliers `[y if r > 1] ++ generators` spanning the
/// ring additively, and each basis element as a combination of them.
#[derive(Debug, Clone, Default)]
pub(crate) struct Words {
    pub exponents: Vec<Vec<u32>>,
    pub basis_exprs: Vec<Vec<u64>>,
}

pub(crate) struct RawRing {
    pub spec: GaloisRingSpec,
    pub orders: Vec<u32>,
    pub dense: Vec<Vec<Vec<u64>>>,
    pub one: Vec<u64>,
    pub base_powers: Vec<Vec<u64>>,
    pub reduction: Vec<Vec<u64>>,
    pub generators: Vec<Vec<u64>>,
    pub generator_names: Vec<String>,
    pub basis_names: Vec<String>,
    pub mode: Mode,
}

impl FiniteLocalRing {
    /// Builds and validates a ring from its parts.
    pub(crate) fn from_raw(raw: RawRing) -> Result<Self> {
        let spec = raw.spec;
        let z = spec.zpm();
        let n = raw.orders.len();
        if n == 0 {
            return Err(Error::NotLocal("the zero ring is not local".into()));
        }
        if raw.orders.iter().any(|&k| k == 0 || k > spec.m) {
            return Err(Error::RingAxiom("basis orders must lie in 1..=m".into()));
        }
        let mut table = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = raw.dense[i][j][k] % z.p.pow(raw.orders[k]);
                    if c != 0 {
                        table[i * n + j].push((k, c));
                    }
                }
            }
        }
        let reduce_vec = |v: &[u64]| -> Vec<u64> {
            v.iter().zip(&raw.orders).map(|(&x, &k)| x % z.p.pow(k)).collect()
        };
        let ring = FiniteLocalRing {
            one: reduce_vec(&raw.one),
            base_powers: raw.base_powers.iter().map(|v| reduce_vec(v)).collect(),
            reduction: raw.reduction.iter().map(|v| v.iter().map(|&x| x % spec.p).collect()).collect(),
            generators: raw.generators.iter().map(|v| reduce_vec(v)).collect(),
            generator_names: raw.generator_names,
            basis_names: raw.basis_names,
            mode: raw.mode,
            orders: raw.orders,
            table,
            z,
            spec,
            words: Arc::new(Words::default()),
        };
        ring.validate()?;
        let words = ring.compute_words()?;
        Ok(FiniteLocalRing { words: Arc::new(words), ..ring })
    }

    fn validate(&self) -> Result<()> {
        let n = self.rank();
        let p = self.z.p;
        for i in 0..n {
            for j in 0..n {
                if self.table[i * n + j] != self.table[j * n + i] {
                    return Err(Error::RingAxiom(format!("not commutative on basis pair ({i}, {j})")));
                }
                let prod = self.basis_product(i, j);
                let killed = self.scale_coords(&prod, self.z.p.pow(self.orders[i]));
                if killed.iter().any(|&c| c != 0) {
                    return Err(Error::RingAxiom(format!(
                        "structure constants incompatible with additive order of basis element {i}"
                    )));
                }
            }
        }
        for i in 0..n {
            let e = self.unit_vector(i);
            if self.mul_coords(&self.one, &e) != e {
                return Err(Error::RingAxiom(format!("unity fails on basis element {i}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = self.basis_product(i, j);
                for k in 0..n {
                    let left = self.mul_coords(&ij, &self.unit_vector(k));
                    let jk = self.basis_product(j, k);
                    let right = self.mul_coords(&self.unit_vector(i), &jk);
                    if left != right {
                        return Err(Error::RingAxiom(format!("not associative on basis triple ({i}, {j}, {k})")));
                    }
                }
            }
        }
        let r = self.spec.r as usize;
        if self.base_powers.len() != r || self.base_powers[0] != self.one {
            return Err(Error::RingAxiom("base embedding must start at 1".into()));
        }
        if r > 1 {
            let y = &self.base_powers[1];
            for j in 2..r {
                if self.mul_coords(&self.base_powers[j - 1], y) != self.base_powers[j] {
                    return Err(Error::RingAxiom("base embedding is not multiplicative".into()));
                }
            }
            // h(y) = 0
            let mut acc = self.mul_coords(&self.base_powers[r - 1], y);
            for (j, &h) in self.spec.modulus.iter().take(r).enumerate() {
                acc = self.add_coords(&acc, &self.scale_coords(&self.base_powers[j], h));
            }
            if acc.iter().any(|&c| c != 0) {
                return Err(Error::RingAxiom("base generator does not satisfy the modulus".into()));
            }
        }
        // Reduction: a ring map onto F_q sending y^j to the j-th basis vector.
        if self.reduction.len() != n || self.reduction.iter().any(|v| v.len() != r) {
            return Err(Error::RingAxiom("reduction map has the wrong shape".into()));
        }
        for (j, yj) in self.base_powers.iter().enumerate() {
            let mut expect = vec![0u64; r];
            expect[j] = 1;
            if self.reduce_coords(yj) != expect {
                return Err(Error::RingAxiom("reduction does not fix the residue field".into()));
            }
        }
        for i in 0..n {
            if self.orders[i] == 0 {
                continue;
            }
            for j in 0..n {
                let lhs = self.reduce_coords(&self.basis_product(i, j));
                let rhs = self.residue_mul(&self.reduction[i], &self.reduction[j]);
                if lhs != rhs {
                    return Err(Error::RingAxiom(format!("reduction is not multiplicative on ({i}, {j})")));
                }
            }
        }
        // Locality: the kernel of the reduction must be nil.
        let length: u32 = self.orders.iter().sum();
        for g in self.kernel_generators() {
            if !self.is_nilpotent_coords(&g, length) {
                return Err(Error::NotLocal(format!(
                    "{} is in the kernel of the reduction but not nilpotent",
                    self.render_coords(&g)
                )));
            }
        }
        let _ = p;
        Ok(())
    }

    fn compute_words(&self) -> Result<Words> {
        let mut multipliers: Vec<Vec<u64>> = Vec::new();
        if self.spec.r > 1 {
            multipliers.push(self.base_powers[1].clone());
        }
        multipliers.extend(self.generators.iter().cloned());
        let nm = multipliers.len();
        let mut exponents: Vec<Vec<u32>> = vec![vec![0; nm]];
        let mut elems: Vec<Vec<u64>> = vec![self.one.clone()];
        let target = self.log_cardinality();
        let mut span = Howell::new(self.z, self.rank(), &[self.embed(&self.one)]);
        let mut head = 0;
        while head < elems.len() && span.log_cardinality() < target {
            let (cur, ce) = (elems[head].clone(), exponents[head].clone());
            head += 1;
            for (t, mult) in multipliers.iter().enumerate() {
                let prod = self.mul_coords(&cur, mult);
                let emb = self.embed(&prod);
                if !span.contains(&emb) {
                    let mut e = ce.clone();
                    e[t] += 1;
                    exponents.push(e);
                    elems.push(prod);
                    let gens: Vec<Vec<u64>> = elems.iter().map(|x| self.embed(x)).collect();
                    span = Howell::new(self.z, self.rank(), &gens);
                }
            }
        }
        if span.log_cardinality() < target {
            return Err(Error::RingAxiom("designated generators do not generate the ring".into()));
        }
        let gens: Vec<Vec<u64>> = elems.iter().map(|x| self.embed(x)).collect();
        let tracked = Howell::with_tracking(self.z, self.rank(), &gens);
        let basis_exprs = (0..self.rank())
            .map(|i| {
                tracked
                    .solve(&self.embed(&self.unit_vector(i)))
                    .ok_or_else(|| Error::Internal("basis element outside generated span".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Words { exponents, basis_exprs })
    }

    /// GR(p^m, r) itself.
    pub fn galois(spec: GaloisRingSpec) -> Result<Self> {
        let z = spec.zpm();
        let r = spec.r as usize;
        // Powers Y^0..Y^{2r-2} reduced modulo h.
        let mut powers: Vec<Vec<u64>> = Vec::new();
        let mut cur = vec![0u64; r];
        cur[0] = 1;
        for _ in 0..(2 * r - 1) {
            powers.push(cur.clone());
            let mut next = vec![0u64; r];
            for j in 0..r - 1 {
                next[j + 1] = cur[j];
            }
            let top = cur[r - 1];
            for j in 0..r {
                next[j] = z.sub(next[j], z.mul(top, spec.modulus[j]));
            }
            cur = next;
        }
        let dense: Vec<Vec<Vec<u64>>> =
            (0..r).map(|i| (0..r).map(|j| powers[i + j].clone()).collect()).collect();
        let unit = |i: usize| {
            let mut v = vec![0u64; r];
            v[i] = 1;
            v
        };
        let names: Vec<String> = (0..r)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "Y".to_string(),
                _ => format!("Y^{i}"),
            })
            .collect();
        FiniteLocalRing::from_raw(RawRing {
            orders: vec![spec.m; r],
            dense,
            one: unit(0),
            base_powers: (0..r).map(unit).collect(),
            reduction: (0..r).map(unit).collect(),
            generators: Vec::new(),
            generator_names: Vec::new(),
            basis_names: names,
            mode: Mode::ExactFinite,
            spec,
        })
    }

    /// Convenience constructor for GR(p^m, r) with the built-in modulus.
    pub fn galois_ring(p: u64, m: u32, r: u32) -> Result<Self> {
        FiniteLocalRing::galois(GaloisRingSpec::new(p, m, r, None)?)
    }

    /// W(F_{p^r}) known modulo `p^n`, with precision tracking.
    pub fn witt_precision_model(p: u64, n: u32, r: u32) -> Result<Self> {
        let ring = FiniteLocalRing::galois_ring(p, n, r)?;
        Ok(FiniteLocalRing { mode: Mode::PrecisionModel, ..ring })
    }

    /// The residue field F_{p^r} as a ring.
    pub fn residue_field(&self) -> FiniteLocalRing {
        let spec = self.spec.with_precision(1).expect("precision 1 is valid");
        FiniteLocalRing::galois(spec).expect("residue field is valid")
    }

    /// `R[ε] = R[E]/(E^2)`, with `E` appended to the generators.
    pub fn dual_numbers(&self) -> Result<FiniteLocalRing> {
        let n = self.rank();
        let lift = |v: &[u64], shift: usize| {
            let mut out = vec![0u64; 2 * n];
            out[shift..shift + n].copy_from_slice(v);
            out
        };
        let mut dense = vec![vec![vec![0u64; 2 * n]; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.basis_product(i, j);
                dense[i][j] = lift(&prod, 0);
                dense[i][n + j] = lift(&prod, n);
                dense[n + i][j] = lift(&prod, n);
            }
        }
        let mut orders = self.orders.clone();
        orders.extend(self.orders.iter().copied());
        let mut generators: Vec<Vec<u64>> = self.generators.iter().map(|g| lift(g, 0)).collect();
        generators.push(lift(&self.one, n));
        let mut generator_names = self.generator_names.clone();
        generator_names.push("E".into());
        let mut basis_names = self.basis_names.clone();
        basis_names.extend(self.basis_names.iter().map(|b| if b == "1" { "E".into() } else { format!("{b}*E") }));
        let mut reduction = self.reduction.clone();
        reduction.extend(std::iter::repeat_n(vec![0u64; self.spec.r as usize], n));
        FiniteLocalRing::from_raw(RawRing {
            spec: self.spec.clone(),
            orders,
            dense,
            one: lift(&self.one, 0),
            base_powers: self.base_powers.iter().map(|b| lift(b, 0)).collect(),
            reduction,
            generators,
            generator_names,
            basis_names,
            mode: Mode::ExactFinite,
        })
    }

    pub fn spec(&self) -> &GaloisRingSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn zpm(&self) -> Zpm {
        self.z
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of additive basis elements.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// p-exponents of the additive orders of the basis elements.
    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generators(&self) -> Vec<RingElement> {
        self.generators.iter().map(|g| self.full(g.clone())).collect()
    }

    pub(crate) fn words(&self) -> &Words {
        &self.words
    }

    /// log_p of the number of elements.
    pub fn log_cardinality(&self) -> u32 {
        self.orders.iter().sum()
    }

    pub fn cardinality(&self) -> u128 {
        (self.z.p as u128).pow(self.log_cardinality())
    }

    /// Exponent `e` with characteristic `p^e`.
    pub fn characteristic_exponent(&self) -> u32 {
        self.additive_order_exp(&self.one)
    }

    // ---- raw coordinate arithmetic -------------------------------------------------

    pub(crate) fn unit_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.rank()];
        v[i] = 1 % self.z.p.pow(self.orders[i]);
        v
    }

    pub(crate) fn normalize_coords(&self, v: &mut [u64]) {
        for (x, &k) in v.iter_mut().zip(&self.orders) {
            *x %= self.z.p.pow(k);
        }
    }

    pub(crate) fn add_coords(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((&x, &y), &k)| ((x as u128 + y as u128) % self.z.p.pow(k) as u128) as u64)
            .collect()
    }

    pub(crate) fn neg_coords(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &k)| {
                let q = self.z.p.pow(k);
                (q - x % q) % q
            })
            .collect()
    }

    pub(crate) fn sub_coords(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.add_coords(a, &self.neg_coords(b))
    }

    pub(crate) fn scale_coords(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &k)| ((x as u128 * c as u128) % self.z.p.pow(k) as u128) as u64)
            .collect()
    }

    pub(crate) fn basis_product(&self, i: usize, j: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.rank()];
        for &(k, c) in &self.table[i * self.rank() + j] {
            out[k] = c;
        }
        out
    }

    pub(crate) fn mul_coords(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.rank();
        let modulus = self.z.modulus as u128;
        let mut acc = vec![0u128; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let ab = (ai as u128 * bj as u128) % modulus;
                for &(k, c) in &self.table[i * n + j] {
                    acc[k] = (acc[k] + ab * c as u128) % modulus;
                }
            }
        }
        acc.iter().zip(&self.orders).map(|(&x, &k)| (x % self.z.p.pow(k) as u128) as u64).collect()
    }

    pub(crate) fn is_zero_coords(a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    fn pow_coords(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_coords(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_coords(&base, &base);
            }
        }
        acc
    }

    fn is_nilpotent_coords(&self, a: &[u64], bound: u32) -> bool {
        let mut x = a.to_vec();
        let mut reach = 1u32;
        while reach < bound.max(1) {
            x = self.mul_coords(&x, &x);
            reach = reach.saturating_mul(2);
        }
        Self::is_zero_coords(&x)
    }

    /// Injective embedding of the additive group into (Z/p^m)^N.
    pub(crate) fn embed(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &k)| self.z.mul(x, self.z.p_pow(self.z.m - k)))
            .collect()
    }

    pub(crate) fn decode(&self, v: &[u64]) -> Vec<u64> {
        v.iter()
            .zip(&self.orders)
            .map(|(&x, &k)| x / self.z.p.pow(self.z.m - k))
            .collect()
    }

    pub(crate) fn reduce_coords(&self, a: &[u64]) -> Vec<u64> {
        let p = self.z.p;
        let r = self.spec.r as usize;
        let mut out = vec![0u64; r];
        for (x, red) in a.iter().zip(&self.reduction) {
            let xm = x % p;
            if xm == 0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(red) {
                *o = (*o + xm * c) % p;
            }
        }
        out
    }

    /// Product in F_q on coordinates with respect to `1, ȳ, ..., ȳ^{r-1}`.
    pub(crate) fn residue_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.z.p;
        let r = self.spec.r as usize;
        let mut prod = vec![0u64; 2 * r - 1];
        for i in 0..r {
            for j in 0..r {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        for d in (r..prod.len()).rev() {
            let top = prod[d];
            if top != 0 {
                for j in 0..r {
                    let h = self.spec.modulus[j] % p;
                    prod[d - r + j] = (prod[d - r + j] + p * p - top * h % p) % p;
                }
            }
            prod[d] = 0;
        }
        prod.truncate(r);
        prod
    }

    fn kernel_generators(&self) -> Vec<Vec<u64>> {
        let n = self.rank();
        let mut gens: Vec<Vec<u64>> = (0..n).map(|i| self.scale_coords(&self.unit_vector(i), self.z.p)).collect();
        gens.retain(|g| !Self::is_zero_coords(g));
        for v in fp_left_kernel(self.z.p, &self.reduction, self.spec.r as usize) {
            let mut w = v;
            self.normalize_coords(&mut w);
            if !Self::is_zero_coords(&w) {
                gens.push(w);
            }
        }
        gens
    }

    pub(crate) fn additive_order_exp(&self, a: &[u64]) -> u32 {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &k)| if x == 0 { 0 } else { k - self.z.val(x).min(k) })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn render_coords(&self, a: &[u64]) -> String {
        let parts: Vec<String> = a
            .iter()
            .zip(&self.basis_names)
            .filter(|(x, _)| **x != 0)
            .map(|(x, b)| if b == "1" { x.to_string() } else if *x == 1 { b.clone() } else { format!("{x}*{b}") })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    // ---- elements ------------------------------------------------------------------

    /// Wraps coordinates as a fully known element.
    pub fn full(&self, mut coords: Vec<u64>) -> RingElement {
        self.normalize_coords(&mut coords);
        RingElement { coords, prec: self.spec.m }
    }

    /// Element from coordinates; errors on a length mismatch.
    pub fn element(&self, coords: &[u64]) -> Result<RingElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        Ok(self.full(coords.to_vec()))
    }

    /// Element known only modulo `p^prec` (precision-model rings).
    pub fn with_precision(&self, x: &RingElement, prec: u32) -> RingElement {
        let prec = prec.min(x.prec).min(self.spec.m);
        let q = self.z.p.pow(prec);
        let coords = x.coords.iter().map(|&c| c % q).collect();
        RingElement { coords, prec }
    }

    pub fn zero(&self) -> RingElement {
        self.full(vec![0; self.rank()])
    }

    pub fn one(&self) -> RingElement {
        self.full(self.one.clone())
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        let c = self.z.reduce_signed(n as i128);
        self.full(self.scale_coords(&self.one, c))
    }

    /// Image of the residue generator `Y` (equal to 1 when `r = 1`).
    pub fn base_generator(&self) -> RingElement {
        if self.spec.r > 1 {
            self.full(self.base_powers[1].clone())
        } else {
            self.one()
        }
    }

    fn tracked(&self, coords: Vec<u64>, prec: u32) -> RingElement {
        let prec = prec.min(self.spec.m);
        let mut out = RingElement { coords, prec };
        if self.mode == Mode::PrecisionModel && prec < self.spec.m {
            let q = self.z.p.pow(prec);
            for c in out.coords.iter_mut() {
                *c %= q;
            }
        }
        out
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.tracked(self.add_coords(&a.coords, &b.coords), a.prec.min(b.prec))
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.tracked(self.sub_coords(&a.coords, &b.coords), a.prec.min(b.prec))
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        self.tracked(self.neg_coords(&a.coords), a.prec)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.tracked(self.mul_coords(&a.coords, &b.coords), a.prec.min(b.prec))
    }

    pub fn scale(&self, a: &RingElement, n: i64) -> RingElement {
        self.tracked(self.scale_coords(&a.coords, self.z.reduce_signed(n as i128)), a.prec)
    }

    pub fn pow(&self, a: &RingElement, e: u64) -> RingElement {
        self.tracked(self.pow_coords(&a.coords, e), a.prec)
    }

    pub fn is_zero(&self, a: &RingElement) -> bool {
        Self::is_zero_coords(&a.coords)
    }

    /// Equality up to the smaller of the two precisions.
    pub fn eq_at(&self, a: &RingElement, b: &RingElement) -> bool {
        let d = self.sub(a, b);
        self.is_zero(&d)
    }

    /// Reduction to the residue field, as coordinates on `1, ȳ, ..., ȳ^{r-1}`.
    pub fn reduce(&self, a: &RingElement) -> Vec<u64> {
        self.reduce_coords(&a.coords)
    }

    /// The section F_q → R sending `sum c_j ȳ^j` to `sum c_j y^j` with
    /// `0 <= c_j < p`.
    pub fn section(&self, residue: &[u64]) -> RingElement {
        let mut acc = vec![0u64; self.rank()];
        for (c, b) in residue.iter().zip(&self.base_powers) {
            acc = self.add_coords(&acc, &self.scale_coords(b, c % self.z.p));
        }
        self.full(acc)
    }

    /// Units are exactly the elements with nonzero reduction.
    pub fn is_unit(&self, a: &RingElement) -> bool {
        self.reduce(a).iter().any(|&c| c != 0)
    }

    /// Multiplicative inverse, at the precision of `a`.
    pub fn invert(&self, a: &RingElement) -> Result<RingElement> {
        if !self.is_unit(a) {
            return Err(Error::NotUnit);
        }
        let images: Vec<Vec<u64>> = (0..self.rank()).map(|i| self.embed(&self.basis_product_with(&a.coords, i))).collect();
        let h = Howell::with_tracking(self.z, self.rank(), &images);
        let c = h
            .solve(&self.embed(&self.one))
            .ok_or_else(|| Error::Internal("unit without inverse".into()))?;
        let mut y = vec![0u64; self.rank()];
        for (i, ci) in c.iter().enumerate() {
            y = self.add_coords(&y, &self.scale_coords(&self.unit_vector(i), *ci));
        }
        Ok(self.tracked(y, a.prec))
    }

    fn basis_product_with(&self, a: &[u64], i: usize) -> Vec<u64> {
        self.mul_coords(a, &self.unit_vector(i))
    }

    /// Whether `a` kills some nonzero element, decided by the size of `aR`.
    pub fn is_zero_divisor(&self, a: &RingElement) -> Result<bool> {
        if self.mode != Mode::ExactFinite {
            return Err(Error::Unsupported("zero-divisor test requires an exact finite ring".into()));
        }
        let images: Vec<Vec<u64>> = (0..self.rank()).map(|i| self.embed(&self.basis_product_with(&a.coords, i))).collect();
        let h = Howell::new(self.z, self.rank(), &images);
        Ok(h.log_cardinality() < self.log_cardinality())
    }

    /// The unique `x` with `a x = b`.
    ///
    /// In an exact finite ring a non-zero-divisor is a unit. In a precision
    /// model `a` must be `p^v u` with `u` a unit; the quotient loses `v`
    /// digits of precision.
    pub fn exact_divide(&self, b: &RingElement, a: &RingElement) -> Result<RingElement> {
        match self.mode {
            Mode::ExactFinite => {
                if self.is_zero_divisor(a)? {
                    return Err(Error::ZeroDivisor);
                }
                let inv = self.invert(a)?;
                Ok(self.mul(b, &inv))
            }
            Mode::PrecisionModel => {
                let prec_a = a.prec;
                let v = a.coords.iter().map(|&c| if c == 0 { prec_a } else { self.z.val(c) }).min().unwrap_or(prec_a);
                if v >= prec_a {
                    return Err(Error::PrecisionExhausted("divisor is zero at its precision".into()));
                }
                let pv = self.z.p.pow(v);
                let u = RingElement { coords: a.coords.iter().map(|&c| c / pv).collect(), prec: prec_a - v };
                if !self.is_unit(&u) {
                    return Err(Error::ZeroDivisor);
                }
                let prec_out = b.prec.min(prec_a).saturating_sub(v);
                if prec_out == 0 {
                    return Err(Error::PrecisionExhausted(format!("dividing by p^{v} leaves no known digits")));
                }
                let b_at = self.with_precision(b, b.prec.min(prec_a));
                if b_at.coords.iter().any(|&c| c % pv != 0) {
                    return Err(Error::NotDivisible);
                }
                let shifted = RingElement { coords: b_at.coords.iter().map(|&c| c / pv).collect(), prec: prec_out };
                let uinv = self.invert(&u)?;
                Ok(self.with_precision(&self.mul(&shifted, &uinv), prec_out))
            }
        }
    }

    /// All elements in lexicographic coordinate order.
    pub fn enumerate_elements(&self, limits: &Limits) -> Result<Vec<RingElement>> {
        limits.check_elements("ring elements", self.cardinality())?;
        let radices: Vec<u64> = self.orders.iter().map(|&k| self.z.p.pow(k)).collect();
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        let mut digits = vec![0u64; self.rank()];
        loop {
            out.push(self.full(digits.clone()));
            let mut i = self.rank();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Renders an element on the basis names, e.g. `1 + 3*X`.
    pub fn render(&self, a: &RingElement) -> String {
        self.render_coords(&a.coords)
    }

    /// `R / I` and the natural surjection.
    pub fn quotient_ring(&self, ideal: &Ideal) -> Result<(FiniteLocalRing, QuotientMap)> {
        if ideal.contains(&self.one()) {
            return Err(Error::UnitIdeal);
        }
        let gens: Vec<Vec<u64>> = ideal.additive_generators().iter().map(|g| g.coords.clone()).collect();
        let qm = QuotientModule::new(self.z, &self.orders, &gens);
        let new_m = *qm.orders.iter().max().expect("proper quotient is nonzero");
        let spec = self.spec.with_precision(new_m)?;
        let n = qm.orders.len();
        let mut dense = vec![vec![vec![0u64; n]; n]; n];
        for s in 0..n {
            for t in 0..n {
                dense[s][t] = qm.project(&self.mul_coords(&qm.basis[s], &qm.basis[t]));
            }
        }
        let basis_names = qm.basis.iter().map(|b| self.render_coords(b)).collect();
        let reduction = qm.basis.iter().map(|b| self.reduce_coords(b)).collect();
        let ring = FiniteLocalRing::from_raw(RawRing {
            spec,
            orders: qm.orders.clone(),
            dense,
            one: qm.project(&self.one),
            base_powers: self.base_powers.iter().map(|b| qm.project(b)).collect(),
            reduction,
            generators: self.generators.iter().map(|g| qm.project(g)).collect(),
            generator_names: self.generator_names.clone(),
            basis_names,
            mode: Mode::ExactFinite,
        })?;
        Ok((ring, QuotientMap { module: qm }))
    }
}

impl fmt::Display for FiniteLocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "local ring over GR({}^{}, {}) with basis [{}] of orders [{}]",
            self.spec.p,
            self.spec.m,
            self.spec.r,
            self.basis_names.join(", "),
            self.orders.iter().map(|k| format!("{}^{k}", self.spec.p)).collect::<Vec<_>>().join(", ")
        )
    }
}

/// The natural surjection `R → R/I`.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    module: QuotientModule,
}

impl QuotientMap {
    pub fn project(&self, target: &FiniteLocalRing, x: &RingElement) -> RingElement {
        target.full(self.module.project(&x.coords))
    }

    /// A preimage under the surjection.
    pub fn lift(&self, source: &FiniteLocalRing, y: &RingElement) -> RingElement {
        source.full(self.module.lift(&y.coords))
    }
}
