use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::poly::{IntPoly, Monomial, Poly};
use crate::{Error, Limits, Result};

use super::groebner::{from_int, groebner_basis, lead, reduce, render_qpoly, QPoly};
use super::IntegerPolynomialPresentation;

/// `Q[X_1..X_t]/(f)` when finite-dimensional, on its standard monomials.
#[derive(Debug, Clone)]
pub struct QFiberAlgebra {
    pub vars: Vec<String>,
    pub groebner: Vec<QPoly>,
    /// Standard monomials in increasing degrevlex order.
    pub basis: Vec<Monomial>,
    table: Vec<Vec<Vec<BigRational>>>,
}

/// The rational fiber: either a finite-dimensional algebra or evidence of
/// infinite dimension.
#[derive(Debug, Clone)]
pub enum QFiber {
    Finite(QFiberAlgebra),
    /// No power of these variables is a leading monomial, so all their
    /// powers are standard.
    Infinite { groebner: Vec<QPoly>, unbounded: Vec<String> },
}

pub type QVec = Vec<BigRational>;

pub fn q_fiber(pres: &IntegerPolynomialPresentation, limits: &Limits) -> Result<QFiber> {
    let t = pres.nvars();
    let gb = groebner_basis(&pres.relations, limits)?;
    let unbounded: Vec<String> = (0..t)
        .filter(|&i| !gb.iter().any(|g| lead(g).0.pure_power_of() == Some(i) || lead(g).0.is_one()))
        .map(|i| pres.vars[i].clone())
        .collect();
    if !unbounded.is_empty() {
        return Ok(QFiber::Infinite { groebner: gb, unbounded });
    }
    let mut basis = Vec::new();
    if !gb.iter().any(|g| lead(g).0.is_one()) {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![Monomial::one(t)];
        while let Some(alpha) = frontier.pop() {
            if !seen.insert(alpha.clone()) || gb.iter().any(|g| lead(g).0.divides(&alpha)) {
                continue;
            }
            basis.push(alpha.clone());
            limits.check_elements("standard monomials", basis.len() as u128)?;
            for i in 0..t {
                frontier.push(alpha.mul(&Monomial::var(i, t)));
            }
        }
    }
    basis.sort();
    let mut alg = QFiberAlgebra { vars: pres.vars.clone(), groebner: gb, basis, table: Vec::new() };
    let d = alg.dim();
    let mut table = vec![vec![Vec::new(); d]; d];
    for i in 0..d {
        for j in i..d {
            let prod = alg.basis[i].mul(&alg.basis[j]);
            let c = alg.coords(&Poly { nvars: t, terms: [(prod, BigRational::one())].into_iter().collect() });
            table[i][j] = c.clone();
            table[j][i] = c;
        }
    }
    alg.table = table;
    Ok(QFiber::Finite(alg))
}

impl QFiberAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn normal_form(&self, f: &QPoly) -> QPoly {
        reduce(f, &self.groebner)
    }

    pub fn coords(&self, f: &QPoly) -> QVec {
        let nf = self.normal_form(f);
        self.basis.iter().map(|b| nf.terms.get(b).cloned().unwrap_or_else(BigRational::zero)).collect()
    }

    pub fn coords_of_int(&self, f: &IntPoly) -> QVec {
        self.coords(&from_int(f))
    }

    pub fn poly_of(&self, x: &[BigRational]) -> QPoly {
        let terms = self
            .basis
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| (b.clone(), c.clone()))
            .collect();
        Poly { nvars: self.nvars(), terms }
    }

    pub fn render(&self, x: &[BigRational]) -> String {
        render_qpoly(&self.poly_of(x), &self.vars)
    }

    pub fn one(&self) -> QVec {
        self.coords(&Poly { nvars: self.nvars(), terms: [(Monomial::one(self.nvars()), BigRational::one())].into_iter().collect() })
    }

    pub fn var(&self, i: usize) -> QVec {
        let t = self.nvars();
        self.coords(&Poly { nvars: t, terms: [(Monomial::var(i, t), BigRational::one())].into_iter().collect() })
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> QVec {
        let d = self.dim();
        let mut out = vec![BigRational::zero(); d];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                for (o, c) in out.iter_mut().zip(&self.table[i][j]) {
                    if !c.is_zero() {
                        *o += &ab * c;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[BigRational], e: u32) -> QVec {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Matrix of multiplication by `x`; column `j` holds `x · b_j`.
    pub fn mult_matrix(&self, x: &[BigRational]) -> Vec<QVec> {
        let d = self.dim();
        let cols: Vec<QVec> = (0..d)
            .map(|j| {
                let mut e = vec![BigRational::zero(); d];
                e[j] = BigRational::one();
                self.mul(x, &e)
            })
            .collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn trace(&self, x: &[BigRational]) -> BigRational {
        let m = self.mult_matrix(x);
        (0..self.dim()).fold(BigRational::zero(), |acc, i| acc + &m[i][i])
    }
}

/// Gram matrix of the trace form on the standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceForm {
    pub gram: Vec<QVec>,
    pub det: BigRational,
}

pub fn trace_form(a: &QFiberAlgebra) -> TraceForm {
    let d = a.dim();
    let basis_traces: Vec<BigRational> = (0..d)
        .map(|k| {
            let mut e = vec![BigRational::zero(); d];
            e[k] = BigRational::one();
            a.trace(&e)
        })
        .collect();
    let gram: Vec<QVec> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    a.table[i][j]
                        .iter()
                        .zip(&basis_traces)
                        .fold(BigRational::zero(), |acc, (c, t)| acc + c * t)
                })
                .collect()
        })
        .collect();
    let det = determinant(&gram);
    TraceForm { gram, det }
}

/// `dim_Q` of the cokernel of the Jacobian map `A^s → A^t`, i.e. of the
/// module of Kähler differentials of `A` over Q.
pub fn omega_rank(pres: &IntegerPolynomialPresentation, a: &QFiberAlgebra) -> usize {
    let t = pres.nvars();
    let d = a.dim();
    let mut rows: Vec<QVec> = Vec::new();
    for f in &pres.relations {
        let grads: Vec<QVec> = (0..t).map(|j| a.coords_of_int(&f.derivative(j))).collect();
        for k in 0..d {
            let mut bk = vec![BigRational::zero(); d];
            bk[k] = BigRational::one();
            let row: QVec = grads.iter().flat_map(|g| a.mul(&bk, g)).collect();
            rows.push(row);
        }
    }
    t * d - rank(&rows)
}

/// A nonzero nilpotent element and the least power killing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotentWitness {
    pub element: String,
    pub vanishing_power: u32,
}

/// A nonzero element of the radical of the trace form, preferring a
/// variable, certified nilpotent by powering.
pub fn nilpotent_witness(a: &QFiberAlgebra) -> Result<(QVec, NilpotentWitness)> {
    let tf = trace_form(a);
    let kernel = nullspace(&tf.gram);
    if kernel.is_empty() {
        return Err(Error::Hypothesis("the trace form is nondegenerate, so the algebra is reduced".into()));
    }
    let in_kernel = |x: &QVec| tf.gram.iter().all(|row| row.iter().zip(x).fold(BigRational::zero(), |acc, (g, c)| acc + g * c).is_zero());
    let candidate = (0..a.nvars())
        .map(|i| a.var(i))
        .find(|x| x.iter().any(|c| !c.is_zero()) && in_kernel(x))
        .unwrap_or_else(|| kernel[0].clone());
    let d = a.dim() as u32;
    let mut pw = candidate.clone();
    for e in 1..=d {
        if pw.iter().all(|c| c.is_zero()) {
            let w = NilpotentWitness { element: a.render(&candidate), vanishing_power: e };
            return Ok((candidate, w));
        }
        pw = a.mul(&pw, &candidate);
    }
    Err(Error::Internal("trace-form radical element is not nilpotent".into()))
}

// ---- rational linear algebra -----------------------------------------------------

fn echelon(rows: &[QVec]) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub(crate) fn rank(rows: &[QVec]) -> usize {
    echelon(rows).1.len()
}

/// Basis of `{v : M v = 0}`.
pub(crate) fn nullspace(m: &[QVec]) -> Vec<QVec> {
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let (rref, pivots) = echelon(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in rref.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub(crate) fn determinant(m: &[QVec]) -> BigRational {
    let n = m.len();
    let mut a: Vec<QVec> = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if pr != c {
            a.swap(pr, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let pivot_row = a[c].clone();
            for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
    }
    det
}
