//! Buchberger's algorithm over the rationals in degrevlex order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::{IntPoly, Monomial, Poly};
use crate::{Error, Limits, Result};

/// Polynomial with rational coefficients.
pub type QPoly = Poly<BigRational>;

pub(crate) fn from_int(f: &IntPoly) -> QPoly {
    f.map_coeffs(|c| Some(BigRational::from_integer(c.clone())))
}

pub(crate) fn lead(f: &QPoly) -> (&Monomial, &BigRational) {
    f.leading().expect("nonzero polynomial")
}

fn make_monic(f: &QPoly) -> QPoly {
    let inv = lead(f).1.recip();
    f.map_coeffs(|c| Some(c * &inv))
}

/// `f -= c · x^shift · g`
pub(crate) fn sub_scaled(f: &mut QPoly, c: &BigRational, shift: &Monomial, g: &QPoly) {
    for (m, a) in &g.terms {
        let key = m.mul(shift);
        let v = f.terms.get(&key).cloned().unwrap_or_else(BigRational::zero) - c * a;
        if v.is_zero() {
            f.terms.remove(&key);
        } else {
            f.terms.insert(key, v);
        }
    }
}

pub(crate) fn coefficient_bits(c: &BigRational) -> u64 {
    c.numer().bits().max(c.denom().bits())
}

fn check_swell(f: &QPoly, limits: &Limits) -> Result<()> {
    for c in f.terms.values() {
        let bits = coefficient_bits(c);
        if bits > limits.coefficient_bits {
            return Err(Error::CoefficientSwell { bits, cap: limits.coefficient_bits });
        }
    }
    Ok(())
}

/// Full reduction of `f` by `basis` (every term, not just the leading one).
pub(crate) fn reduce(f: &QPoly, basis: &[QPoly]) -> QPoly {
    let mut f = f.clone();
    let mut rem: BTreeMap<Monomial, BigRational> = BTreeMap::new();
    while let Some((m, c)) = f.terms.pop_last() {
        match basis.iter().find(|g| lead(g).0.divides(&m)) {
            Some(g) => {
                let (lm, lc) = lead(g);
                let q = &c / lc;
                let shift = m.div(lm);
                let mut tail = g.clone();
                tail.terms.pop_last();
                sub_scaled(&mut f, &q, &shift, &tail);
            }
            None => {
                rem.insert(m, c);
            }
        }
    }
    Poly { nvars: f.nvars, terms: rem }
}

fn s_poly(f: &QPoly, g: &QPoly) -> QPoly {
    let (lf, cf) = lead(f);
    let (lg, cg) = lead(g);
    let gamma = lf.lcm(lg);
    let mut s = Poly::zero(f.nvars);
    sub_scaled(&mut s, &-cf.recip(), &gamma.div(lf), f);
    sub_scaled(&mut s, &cg.recip(), &gamma.div(lg), g);
    s
}

/// Reduced Gröbner basis of the ideal generated by `gens`: monic, sorted by
/// leading monomial.
pub fn groebner_basis(gens: &[IntPoly], limits: &Limits) -> Result<Vec<QPoly>> {
    let nvars = gens.first().map(|g| g.nvars).unwrap_or(0);
    let mut basis: Vec<QPoly> = Vec::new();
    for g in gens {
        let h = reduce(&from_int(g), &basis);
        if !h.is_zero() {
            basis.push(make_monic(&h));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while !pairs.is_empty() {
        // Normal selection strategy: smallest lcm first.
        let (pos, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = lead(&basis[a.0]).0.lcm(lead(&basis[a.1]).0);
                let lb = lead(&basis[b.0]).0.lcm(lead(&basis[b.1]).0);
                la.cmp(&lb).then(a.cmp(b))
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(pos);
        let (li, lj) = (lead(&basis[i]).0, lead(&basis[j]).0);
        if li.is_coprime(lj) {
            continue;
        }
        let gamma = li.lcm(lj);
        if gamma.degree() > limits.degree {
            return Err(Error::NotFiniteAtCap {
                cap: limits.degree,
                detail: format!("S-polynomial of degree {}", gamma.degree()),
            });
        }
        let h = reduce(&s_poly(&basis[i], &basis[j]), &basis);
        if h.is_zero() {
            continue;
        }
        check_swell(&h, limits)?;
        let idx = basis.len();
        basis.push(make_monic(&h));
        for k in 0..idx {
            pairs.push((k, idx));
        }
    }
    // Minimalize then interreduce.
    let mut minimal: Vec<QPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lg = lead(g).0;
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let lh = lead(h).0;
            j != i && lh.divides(lg) && (lh != lg || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<QPoly> = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<QPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone()).collect();
        let mut tail = g.clone();
        let (lm, lc) = tail.terms.pop_last().expect("nonzero");
        let mut r = reduce(&tail, &others);
        r.terms.insert(lm, lc);
        check_swell(&r, limits)?;
        reduced.push(make_monic(&r));
    }
    reduced.sort_by(|a, b| lead(a).0.cmp(lead(b).0));
    if reduced.iter().any(|g| lead(g).0.is_one()) {
        reduced = vec![QPoly {
            nvars,
            terms: [(Monomial::one(nvars), BigRational::one())].into_iter().collect(),
        }];
    }
    Ok(reduced)
}

/// Renders a rational polynomial, highest term first.
pub(crate) fn render_qpoly(f: &QPoly, names: &[String]) -> String {
    if f.terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in f.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if a.is_integer() { a.numer().to_string() } else { format!("({a})") };
        if m.is_one() {
            s.push_str(&coeff);
        } else if a.is_one() {
            s.push_str(&m.render(names));
        } else {
            s.push_str(&format!("{coeff}*{}", m.render(names)));
        }
    }
    s
}
