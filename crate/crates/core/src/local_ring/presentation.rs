//! Finite rings `(Z/p^m)[X_1..X_t]/(f_1..f_s)` from integer presentations.
//!
//! A strong Gröbner basis over the chain ring Z/p^m gives, for every
//! standard monomial α, the order `p^{e_α}` of its class, where `e_α` is the
//! smallest valuation of a leading coefficient whose leading monomial
//! divides α. The classes of the monomials with `e_α > 0` form the additive
//! basis.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::poly::{IntPoly, Monomial};
use crate::presented::IntegerPolynomialPresentation;
use crate::zmod::Zpm;
use crate::{Error, Limits, Result};

use super::{FiniteLocalRing, GaloisRingSpec, Mode, RawRing};

type ZPoly = BTreeMap<Monomial, u64>;

fn to_zpoly(z: &Zpm, f: &IntPoly) -> ZPoly {
    let q = BigInt::from(z.modulus);
    f.terms
        .iter()
        .filter_map(|(m, c)| {
            let r = c.mod_floor(&q).to_u64().expect("reduced below modulus");
            (r != 0).then(|| (m.clone(), r))
        })
        .collect()
}

/// Subtracts `q · x^shift · g` from `f`, skipping the leading term of `g`
/// when `skip_lead` is set.
fn sub_shifted(z: &Zpm, f: &mut ZPoly, q: u64, shift: &Monomial, g: &ZPoly, skip_lead: bool) {
    let lead = g.keys().next_back().cloned();
    for (mono, &c) in g {
        if skip_lead && Some(mono) == lead.as_ref() {
            continue;
        }
        let key = mono.mul(shift);
        let cur = f.get(&key).copied().unwrap_or(0);
        let v = z.sub(cur, z.mul(q, c));
        if v == 0 {
            f.remove(&key);
        } else {
            f.insert(key, v);
        }
    }
}

fn scale(z: &Zpm, f: &ZPoly, c: u64) -> ZPoly {
    f.iter()
        .filter_map(|(m, &a)| {
            let v = z.mul(a, c);
            (v != 0).then(|| (m.clone(), v))
        })
        .collect()
}

fn lead(f: &ZPoly) -> (&Monomial, u64) {
    let (m, c) = f.iter().next_back().expect("nonzero polynomial");
    (m, *c)
}

pub(crate) struct StrongBasis {
    z: Zpm,
    polys: Vec<ZPoly>,
}

impl StrongBasis {
    fn best_reducer(&self, alpha: &Monomial) -> Option<(usize, u32)> {
        self.polys
            .iter()
            .enumerate()
            .filter(|(_, g)| lead(g).0.divides(alpha))
            .map(|(i, g)| (i, self.z.val(lead(g).1)))
            .min_by_key(|&(i, v)| (v, i))
    }

    /// Canonical remainder: each surviving coefficient `c` of `x^α` satisfies
    /// `c < p^{e_α}`.
    fn normal_form(&self, f: &ZPoly) -> ZPoly {
        let z = &self.z;
        let mut f = f.clone();
        let mut rem = ZPoly::new();
        while let Some((alpha, c)) = f.pop_last() {
            match self.best_reducer(&alpha) {
                Some((gi, e)) => {
                    let g = &self.polys[gi];
                    let (lm, lc) = lead(g);
                    let pe = z.p_pow_int(e);
                    let c0 = c % pe;
                    let (_, u) = z.split(lc);
                    let q = z.mul((c - c0) / pe, z.inv(u).expect("unit"));
                    if q != 0 {
                        let shift = alpha.div(lm);
                        sub_shifted(z, &mut f, q, &shift, g, true);
                    }
                    if c0 != 0 {
                        rem.insert(alpha, c0);
                    }
                }
                None => {
                    rem.insert(alpha, c);
                }
            }
        }
        rem
    }

    fn compute(z: Zpm, gens: Vec<ZPoly>, degree_cap: u32) -> Result<StrongBasis> {
        let mut basis = StrongBasis { z, polys: Vec::new() };
        let mut queue: Vec<ZPoly> = gens;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        loop {
            while let Some(f) = queue.pop() {
                let h = basis.normal_form(&f);
                if h.is_empty() {
                    continue;
                }
                let deg = lead(&h).0.degree();
                if deg > degree_cap {
                    return Err(Error::NotFiniteAtCap {
                        cap: degree_cap,
                        detail: format!("Gröbner basis element of degree {deg}"),
                    });
                }
                let v = z.val(lead(&h).1);
                if v > 0 {
                    let ann = scale(&z, &h, z.p_pow(z.m - v));
                    if !ann.is_empty() {
                        queue.push(ann);
                    }
                }
                let idx = basis.polys.len();
                for j in 0..idx {
                    pairs.push((j, idx));
                }
                basis.polys.push(h);
            }
            let Some((i, j)) = pairs.pop() else { break };
            let (f, g) = (&basis.polys[i], &basis.polys[j]);
            let ((lf, cf), (lg, cg)) = (lead(f), lead(g));
            let gamma = lf.lcm(lg);
            if gamma.degree() > degree_cap {
                return Err(Error::NotFiniteAtCap { cap: degree_cap, detail: format!("S-polynomial of degree {}", gamma.degree()) });
            }
            let (vf, uf) = z.split(cf);
            let (vg, ug) = z.split(cg);
            let top = vf.max(vg);
            let mut s = ZPoly::new();
            let af = z.mul(z.p_pow(top - vf), z.inv(uf).expect("unit"));
            let ag = z.mul(z.p_pow(top - vg), z.inv(ug).expect("unit"));
            sub_shifted(&z, &mut s, z.neg(af), &gamma.div(lf), f, false);
            sub_shifted(&z, &mut s, ag, &gamma.div(lg), g, false);
            if !s.is_empty() {
                queue.push(s);
            }
        }
        basis.polys.sort_by(|a, b| lead(a).0.cmp(lead(b).0).then(a.cmp(b)));
        Ok(basis)
    }

    fn order_of(&self, alpha: &Monomial) -> u32 {
        self.best_reducer(alpha).map(|(_, e)| e).unwrap_or(self.z.m).min(self.z.m)
    }
}

/// Additive structure of a truncated presentation: standard monomials with
/// their orders and the normal-form reducer.
pub(crate) struct Truncation {
    pub basis: StrongBasis,
    pub standard: Vec<(Monomial, u32)>,
}

pub(crate) fn truncate(pres: &IntegerPolynomialPresentation, m: u32, limits: &Limits) -> Result<Truncation> {
    let z = Zpm::new(pres.p, m)?;
    let t = pres.nvars();
    let gens: Vec<ZPoly> = pres.relations.iter().map(|f| to_zpoly(&z, f)).filter(|f| !f.is_empty()).collect();
    let basis = StrongBasis::compute(z, gens, limits.degree)?;
    for i in 0..t {
        let has_unit_power = basis.polys.iter().any(|g| {
            let (lm, lc) = lead(g);
            (lm.pure_power_of() == Some(i) || lm.is_one()) && z.is_unit(lc)
        });
        if !has_unit_power {
            return Err(Error::NotFiniteAtCap {
                cap: limits.degree,
                detail: format!("no power of {} is reducible modulo {}^{}", pres.vars[i], pres.p, m),
            });
        }
    }
    let mut standard = Vec::new();
    let mut frontier = vec![Monomial::one(t)];
    let mut seen = std::collections::BTreeSet::new();
    while let Some(alpha) = frontier.pop() {
        if !seen.insert(alpha.clone()) {
            continue;
        }
        let e = basis.order_of(&alpha);
        if e == 0 {
            continue;
        }
        standard.push((alpha.clone(), e));
        limits.check_elements("standard monomials", standard.len() as u128)?;
        for i in 0..t {
            frontier.push(alpha.mul(&Monomial::var(i, t)));
        }
    }
    if standard.is_empty() {
        return Err(Error::NotLocal("the presentation defines the zero ring".into()));
    }
    standard.sort();
    Ok(Truncation { basis, standard })
}

impl Truncation {
    fn coords(&self, f: &ZPoly) -> Vec<u64> {
        let nf = self.basis.normal_form(f);
        self.standard
            .iter()
            .map(|(alpha, e)| nf.get(alpha).copied().unwrap_or(0) % self.basis.z.p.pow(*e))
            .collect()
    }
}

pub(crate) fn residue_points(pres: &IntegerPolynomialPresentation, limits: &Limits) -> Result<Vec<Vec<u64>>> {
    let p = pres.p;
    let t = pres.nvars() as u32;
    let count = (p as u128).checked_pow(t).unwrap_or(u128::MAX);
    limits.check_elements("residue points", count)?;
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for mut idx in 0..count as u64 {
        let mut a = Vec::with_capacity(t as usize);
        for _ in 0..t {
            a.push(idx % p);
            idx /= p;
        }
        let images: Vec<IntPoly> = a.iter().map(|&x| IntPoly::constant(0, BigInt::from(x))).collect();
        let vanishes = pres.relations.iter().all(|f| {
            let v = f.substitute(&images);
            v.terms.values().fold(BigInt::from(0), |acc, c| acc + c).mod_floor(&pb) == BigInt::from(0)
        });
        if vanishes {
            out.push(a);
        }
    }
    Ok(out)
}

fn build(pres: &IntegerPolynomialPresentation, m: u32, limits: &Limits, mode: Mode) -> Result<FiniteLocalRing> {
    if pres.r != 1 {
        return Err(Error::Unsupported("truncated presentations require residue degree 1".into()));
    }
    let tr = truncate(pres, m, limits)?;
    let points = residue_points(pres, limits)?;
    let point = match points.as_slice() {
        [a] => a.clone(),
        [] => return Err(Error::NotLocal("no residue point over F_p".into())),
        _ => return Err(Error::NotLocal(format!("{} residue points over F_p", points.len()))),
    };
    let t = pres.nvars();
    let n = tr.standard.len();
    let z = tr.basis.z;
    let mono_poly = |alpha: &Monomial| -> ZPoly { [(alpha.clone(), 1u64)].into_iter().collect() };
    let mut dense = vec![vec![vec![0u64; n]; n]; n];
    for i in 0..n {
        for j in i..n {
            let prod = tr.standard[i].0.mul(&tr.standard[j].0);
            let c = tr.coords(&mono_poly(&prod));
            dense[i][j] = c.clone();
            dense[j][i] = c;
        }
    }
    let reduction: Vec<Vec<u64>> = tr
        .standard
        .iter()
        .map(|(alpha, _)| {
            let v = alpha.0.iter().zip(&point).fold(1u64, |acc, (&k, &a)| acc * a.pow(k) % z.p);
            vec![v]
        })
        .collect();
    let generators: Vec<Vec<u64>> = (0..t).map(|i| tr.coords(&mono_poly(&Monomial::var(i, t)))).collect();
    let one = tr.coords(&mono_poly(&Monomial::one(t)));
    let spec = GaloisRingSpec::new(pres.p, m, 1, None)?;
    let orders: Vec<u32> = tr.standard.iter().map(|(_, e)| *e).collect();
    if mode == Mode::PrecisionModel && orders.iter().any(|&e| e != m) {
        return Err(Error::Hypothesis(format!(
            "truncation modulo {}^{m} is not free, so the ring has p-torsion",
            pres.p
        )));
    }
    FiniteLocalRing::from_raw(RawRing {
        spec,
        orders,
        dense,
        one: one.clone(),
        base_powers: vec![one],
        reduction,
        generators,
        generator_names: pres.vars.clone(),
        basis_names: tr.standard.iter().map(|(a, _)| a.render(&pres.vars)).collect(),
        mode,
    })
}

/// Standard monomials of the truncation modulo `p^m` with the p-exponents
/// of their additive orders, without any locality requirement.
pub(crate) fn presentation_truncation(
    pres: &IntegerPolynomialPresentation,
    m: u32,
    limits: &Limits,
) -> Result<Vec<(Monomial, u32)>> {
    Ok(truncate(pres, m, limits)?.standard)
}

impl FiniteLocalRing {
    /// `R / p^m R` for a presented ring `R`, with the variables as designated
    /// generators and standard monomials (in increasing graded order) as
    /// basis.
    pub fn from_truncated_presentation(pres: &IntegerPolynomialPresentation, m: u32, limits: &Limits) -> Result<Self> {
        build(pres, m, limits, Mode::ExactFinite)
    }

    /// Model of a p-torsion-free presented ring at working precision `n`;
    /// elements carry their known precision.
    pub fn precision_model(pres: &IntegerPolynomialPresentation, n: u32, limits: &Limits) -> Result<Self> {
        build(pres, n, limits, Mode::PrecisionModel)
    }

    /// Image of an integer polynomial in the variables.
    pub fn eval_poly(&self, f: &IntPoly) -> Result<super::RingElement> {
        if f.nvars != self.generators.len() {
            return Err(Error::InvalidParameter("polynomial has the wrong number of variables".into()));
        }
        let q = BigInt::from(self.z.modulus);
        let mut acc = self.zero();
        for (mono, c) in &f.terms {
            let mut term = self.from_int(c.mod_floor(&q).to_i64().expect("fits"));
            for (i, &k) in mono.0.iter().enumerate() {
                if k > 0 {
                    term = self.mul(&term, &self.pow(&self.full(self.generators[i].clone()), k as u64));
                }
            }
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }
}
