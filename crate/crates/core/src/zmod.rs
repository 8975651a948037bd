//! Arithmetic and linear algebra over the chain ring Z/p^m.
//!
//! Submodules of (Z/p^m)^n are kept in Howell form: echelon rows whose pivots
//! are powers of p, entries above each pivot reduced modulo it, and closed
//! under the saturation `p^(m-v) * row`. With that closure, membership is a
//! single top-down reduction and every element of the span has a unique
//! expansion `sum c_j row_j` with `0 <= c_j < p^(m - v_j)`.
//!
//! Quotients `(Z/p^m)^n / L` are put in Smith form so that the quotient has
//! an explicit basis of cyclic summands.

use crate::{Error, Result};

/// The ring Z/p^m with `p^m < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zpm {
    pub p: u64,
    pub m: u32,
    pub modulus: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Zpm {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("precision must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..m {
            modulus = modulus
                .checked_mul(p)
                .filter(|&v| v < (1u64 << 62))
                .ok_or_else(|| Error::InvalidParameter(format!("{p}^{m} is too large")))?;
        }
        Ok(Zpm { p, m, modulus })
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u64 {
        (x % self.modulus as u128) as u64
    }

    #[inline]
    pub fn reduce_signed(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 + b as u128)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 + self.modulus as u128 - (b % self.modulus) as u128)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    /// `p^e`, saturating to 0 once `e >= m`.
    pub fn p_pow(&self, e: u32) -> u64 {
        if e >= self.m {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// `p^e` as an integer, without reduction.
    pub fn p_pow_int(&self, e: u32) -> u64 {
        self.p.pow(e)
    }

    /// p-adic valuation of a residue; `m` for zero.
    pub fn val(&self, x: u64) -> u32 {
        let mut x = x % self.modulus;
        if x == 0 {
            return self.m;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Splits a nonzero residue as `p^v * u` with `u` a unit.
    pub fn split(&self, x: u64) -> (u32, u64) {
        let v = self.val(x);
        if v >= self.m {
            return (self.m, 0);
        }
        (v, (x % self.modulus) / self.p.pow(v))
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    /// Inverse of a unit.
    pub fn inv(&self, u: u64) -> Option<u64> {
        let (mut old_r, mut r) = ((u % self.modulus) as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        if old_r != 1 {
            return None;
        }
        Some(self.reduce_signed(old_s))
    }

    /// The same prime at a different precision.
    pub fn with_precision(&self, m: u32) -> Result<Zpm> {
        Zpm::new(self.p, m)
    }
}

fn axpy(z: &Zpm, y: &mut [u64], a: u64, x: &[u64]) {
    if a == 0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = z.sub(*yi, z.mul(a, xi));
    }
}

fn scale(z: &Zpm, a: u64, x: &[u64]) -> Vec<u64> {
    x.iter().map(|&xi| z.mul(a, xi)).collect()
}

/// A row of a Howell form; `aug` records the row as a combination of the
/// original generators when tracking was requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HowellRow {
    pub pivot: usize,
    pub val: u32,
    pub v: Vec<u64>,
    pub aug: Vec<u64>,
}

/// Canonical Howell form of a submodule of (Z/p^m)^ncols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Howell {
    pub z: Zpm,
    pub ncols: usize,
    pub naug: usize,
    pub rows: Vec<HowellRow>,
}

impl Howell {
    /// Howell form of the span of `gens`.
    pub fn new(z: Zpm, ncols: usize, gens: &[Vec<u64>]) -> Howell {
        Self::build(z, ncols, gens, false)
    }

    /// Like [`Howell::new`], but each row also carries its expression in the
    /// generators so that [`Howell::solve`] can return coefficients.
    pub fn with_tracking(z: Zpm, ncols: usize, gens: &[Vec<u64>]) -> Howell {
        Self::build(z, ncols, gens, true)
    }

    fn build(z: Zpm, ncols: usize, gens: &[Vec<u64>], track: bool) -> Howell {
        let naug = if track { gens.len() } else { 0 };
        let mut work: Vec<(Vec<u64>, Vec<u64>)> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut aug: Vec<u64> = vec![0; naug];
                if track {
                    aug[i] = 1;
                }
                (g.iter().map(|&x| x % z.modulus).collect::<Vec<u64>>(), aug)
            })
            .filter(|(v, aug)| v.iter().any(|&x| x != 0) || (track && aug.iter().any(|&x| x != 0)))
            .collect();
        let mut rows: Vec<HowellRow> = Vec::new();
        for col in 0..ncols {
            let best = work
                .iter()
                .enumerate()
                .filter(|(_, (v, _))| v[col] != 0)
                .min_by_key(|(i, (v, _))| (z.val(v[col]), *i))
                .map(|(i, _)| i);
            let Some(bi) = best else { continue };
            let (mut pv, mut pa) = work.remove(bi);
            let (val, u) = z.split(pv[col]);
            let uinv = z.inv(u).expect("unit part is invertible");
            pv = scale(&z, uinv, &pv);
            pa = scale(&z, uinv, &pa);
            let pp = z.p_pow_int(val);
            for (wv, wa) in work.iter_mut() {
                let e = wv[col];
                if e == 0 {
                    continue;
                }
                let f = e / pp;
                axpy(&z, wv, f, &pv);
                axpy(&z, wa, f, &pa);
            }
            if val > 0 {
                let s = z.p_pow(z.m - val);
                let sv = scale(&z, s, &pv);
                if sv.iter().any(|&x| x != 0) {
                    let sa = scale(&z, s, &pa);
                    work.push((sv, sa));
                }
            }
            for r in rows.iter_mut() {
                let q = r.v[col] / pp;
                if q != 0 {
                    axpy(&z, &mut r.v, q, &pv);
                    axpy(&z, &mut r.aug, q, &pa);
                }
            }
            rows.push(HowellRow { pivot: col, val, v: pv, aug: pa });
            work.retain(|(v, _)| v.iter().any(|&x| x != 0));
        }
        Howell { z, ncols, naug, rows }
    }

    /// Number of elements in the span.
    pub fn cardinality(&self) -> u128 {
        self.rows
            .iter()
            .map(|r| (self.z.p as u128).pow(self.z.m - r.val))
            .product()
    }

    /// log_p of the cardinality.
    pub fn log_cardinality(&self) -> u32 {
        self.rows.iter().map(|r| self.z.m - r.val).sum()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.reduce(x).is_some()
    }

    /// Reduces `x` against the rows; `Some(coefficients on the rows)` when
    /// `x` is in the span.
    pub fn reduce(&self, x: &[u64]) -> Option<Vec<u64>> {
        let z = &self.z;
        let mut x: Vec<u64> = x.iter().map(|&a| a % z.modulus).collect();
        let mut coeffs = vec![0u64; self.rows.len()];
        for (ri, r) in self.rows.iter().enumerate() {
            let e = x[r.pivot];
            if e == 0 {
                continue;
            }
            let pp = z.p_pow_int(r.val);
            if !e.is_multiple_of(pp) {
                return None;
            }
            let q = e / pp;
            axpy(z, &mut x, q, &r.v);
            coeffs[ri] = q;
        }
        if x.iter().all(|&a| a == 0) {
            Some(coeffs)
        } else {
            None
        }
    }

    /// Expresses `x` as a combination of the original generators (requires
    /// tracking).
    pub fn solve(&self, x: &[u64]) -> Option<Vec<u64>> {
        let coeffs = self.reduce(x)?;
        let z = &self.z;
        let mut out = vec![0u64; self.naug];
        for (c, r) in coeffs.iter().zip(&self.rows) {
            for (o, &a) in out.iter_mut().zip(&r.aug) {
                *o = z.add(*o, z.mul(*c, a));
            }
        }
        Some(out)
    }

    /// Every element of the span exactly once, in a deterministic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let z = &self.z;
        let radices: Vec<u64> = self.rows.iter().map(|r| z.p.pow(z.m - r.val)).collect();
        let mut out = Vec::new();
        let mut digits = vec![0u64; self.rows.len()];
        loop {
            let mut v = vec![0u64; self.ncols];
            for (d, r) in digits.iter().zip(&self.rows) {
                if *d != 0 {
                    for (vi, &ri) in v.iter_mut().zip(&r.v) {
                        *vi = z.add(*vi, z.mul(*d, ri));
                    }
                }
            }
            out.push(v);
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return out;
                }
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

/// Explicit description of `(⊕ Z/p^{k_i}) / span(gens)` as a direct sum of
/// cyclic groups.
#[derive(Debug, Clone)]
pub struct QuotientModule {
    pub z: Zpm,
    /// Orders (as p-exponents) of the ambient coordinates.
    pub ambient_orders: Vec<u32>,
    /// Orders of the kept quotient generators.
    pub orders: Vec<u32>,
    /// Columns of the coordinate change, one per kept generator.
    coord_cols: Vec<Vec<u64>>,
    /// Kept generators written in ambient coordinates.
    pub basis: Vec<Vec<u64>>,
}

impl QuotientModule {
    pub fn new(z: Zpm, ambient_orders: &[u32], gens: &[Vec<u64>]) -> QuotientModule {
        let n = ambient_orders.len();
        let mut mat: Vec<Vec<u64>> = gens.iter().map(|g| g.iter().map(|&x| x % z.modulus).collect()).collect();
        for (i, &k) in ambient_orders.iter().enumerate() {
            if k < z.m {
                let mut row = vec![0; n];
                row[i] = z.p_pow(k);
                mat.push(row);
            }
        }
        mat.retain(|r| r.iter().any(|&x| x != 0));
        let mut v = identity(n);
        let mut vinv = identity(n);
        let mut t = 0;
        let mut exps = vec![z.m; n];
        while t < n && t < mat.len() {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in mat.iter().enumerate().skip(t) {
                for (j, &e) in row.iter().enumerate().skip(t) {
                    if e != 0 {
                        let val = z.val(e);
                        if best.is_none_or(|b| val < b.0) {
                            best = Some((val, i, j));
                        }
                    }
                }
            }
            let Some((val, bi, bj)) = best else { break };
            mat.swap(t, bi);
            if bj != t {
                for row in mat.iter_mut() {
                    row.swap(t, bj);
                }
                for row in v.iter_mut() {
                    row.swap(t, bj);
                }
                vinv.swap(t, bj);
            }
            let (_, u) = z.split(mat[t][t]);
            let uinv = z.inv(u).expect("unit");
            mat[t] = scale(&z, uinv, &mat[t]);
            let pp = z.p_pow_int(val);
            let pivot_row = mat[t].clone();
            for (i, row) in mat.iter_mut().enumerate() {
                if i != t && row[t] != 0 {
                    let f = row[t] / pp;
                    axpy(&z, row, f, &pivot_row);
                }
            }
            for j in (t + 1)..n {
                let e = mat[t][j];
                if e == 0 {
                    continue;
                }
                let f = e / pp;
                for row in mat.iter_mut() {
                    let c = row[t];
                    row[j] = z.sub(row[j], z.mul(f, c));
                }
                for row in v.iter_mut() {
                    let c = row[t];
                    row[j] = z.sub(row[j], z.mul(f, c));
                }
                let rj = vinv[j].clone();
                for (a, b) in vinv[t].iter_mut().zip(&rj) {
                    *a = z.add(*a, z.mul(f, *b));
                }
            }
            exps[t] = val;
            t += 1;
        }
        let mut orders = Vec::new();
        let mut coord_cols = Vec::new();
        let mut basis = Vec::new();
        for (tt, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            orders.push(e);
            coord_cols.push(v.iter().map(|row| row[tt]).collect());
            let b: Vec<u64> = vinv[tt]
                .iter()
                .zip(ambient_orders)
                .map(|(&x, &k)| x % z.p.pow(k))
                .collect();
            basis.push(b);
        }
        QuotientModule { z, ambient_orders: ambient_orders.to_vec(), orders, coord_cols, basis }
    }

    /// Image of an ambient vector in quotient coordinates.
    pub fn project(&self, x: &[u64]) -> Vec<u64> {
        let z = &self.z;
        self.coord_cols
            .iter()
            .zip(&self.orders)
            .map(|(col, &e)| {
                let mut acc: u128 = 0;
                for (&a, &c) in x.iter().zip(col) {
                    acc = (acc + a as u128 * c as u128) % z.modulus as u128;
                }
                (acc as u64) % z.p.pow(e)
            })
            .collect()
    }

    /// A preimage of quotient coordinates in ambient coordinates.
    pub fn lift(&self, y: &[u64]) -> Vec<u64> {
        let z = &self.z;
        let mut out = vec![0u64; self.ambient_orders.len()];
        for (&c, b) in y.iter().zip(&self.basis) {
            for (o, &bi) in out.iter_mut().zip(b) {
                *o = z.add(*o, z.mul(c, bi));
            }
        }
        out.iter().zip(&self.ambient_orders).map(|(&x, &k)| x % z.p.pow(k)).collect()
    }

    pub fn log_cardinality(&self) -> u32 {
        self.orders.iter().sum()
    }
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| {
            let mut r = vec![0; n];
            r[i] = 1;
            r
        })
        .collect()
}

/// Solves for the F_p-nullspace of an `rows x cols` matrix (right kernel of
/// the map x ↦ x·M for row vectors x of length `rows`).
pub(crate) fn fp_left_kernel(p: u64, mat: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    let z = Zpm::new(p, 1).expect("prime");
    let rows = mat.len();
    // Transpose and row-reduce to find x with x·M = 0.
    let mut a: Vec<Vec<u64>> = (0..cols).map(|j| (0..rows).map(|i| mat[i][j] % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..rows {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = z.inv(a[r][c]).expect("field");
        a[r] = scale(&z, inv, &a[r]);
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                axpy(&z, row, f, &prow);
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..rows).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u64; rows];
            x[f] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                x[pc] = z.neg(a[ri][f]);
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations_and_inverses() {
        let z = Zpm::new(2, 3).unwrap();
        assert_eq!(z.val(4), 2);
        assert_eq!(z.val(0), 3);
        assert_eq!(z.split(6), (1, 3));
        assert_eq!(z.inv(3), Some(3));
        assert_eq!(z.inv(2), None);
        assert!(Zpm::new(4, 2).is_err());
    }

    #[test]
    fn howell_saturates() {
        // span{(2, 1)} over Z/4 contains (0, 2) = 2*(2,1).
        let z = Zpm::new(2, 2).unwrap();
        let h = Howell::new(z, 2, &[vec![2, 1]]);
        assert!(h.contains(&[0, 2]));
        assert!(!h.contains(&[0, 1]));
        assert_eq!(h.cardinality(), 4);
        assert_eq!(h.elements().len(), 4);
    }

    #[test]
    fn howell_tracking_solves() {
        let z = Zpm::new(3, 2).unwrap();
        let gens = vec![vec![3, 1, 0], vec![0, 3, 1]];
        let h = Howell::with_tracking(z, 3, &gens);
        let target = vec![6, 5, 1];
        let c = h.solve(&target).unwrap();
        for j in 0..3 {
            let v = (c[0] * gens[0][j] + c[1] * gens[1][j]) % 9;
            assert_eq!(v, target[j]);
        }
    }

    #[test]
    fn quotient_of_z8_by_4() {
        let z = Zpm::new(2, 3).unwrap();
        let q = QuotientModule::new(z, &[3], &[vec![4]]);
        assert_eq!(q.orders, vec![2]);
        assert_eq!(q.project(&[5]), vec![1]);
        assert_eq!(q.project(&q.lift(&[3])), vec![3]);
    }

    #[test]
    fn quotient_mixed_orders() {
        // (Z/4 ⊕ Z/4) / <(2, 2)> has order 8.
        let z = Zpm::new(2, 2).unwrap();
        let q = QuotientModule::new(z, &[2, 2], &[vec![2, 2]]);
        assert_eq!(q.log_cardinality(), 3);
        assert_eq!(q.project(&[2, 2]).iter().sum::<u64>(), 0);
    }

    #[test]
    fn fp_kernel() {
        let k = fp_left_kernel(2, &[vec![1], vec![1], vec![0]], 1);
        assert_eq!(k.len(), 2);
    }
}
