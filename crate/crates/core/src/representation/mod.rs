//! Representations of finite groups over finite local rings, their lifts,
//! strict equivalence classes, and the averaging argument.
//!
//! A lift of `ρ̄ : G → GL_n(k)` to `R` is a representation over `R` whose
//! entrywise reduction is `ρ̄`. Two lifts are strictly equivalent when they
//! are conjugate by a matrix congruent to `I_n` modulo `m_R`.

use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::group::{extend_and_verify_hom, FiniteGroup, HomCheck, Monoid};
use crate::local_ring::{FiniteLocalRing, RingElement};
use crate::{Error, Result};

mod deform;
mod derivation;
mod maranda;

pub use deform::{
    are_strictly_equivalent, def_set, enumerate_lifts, kernel_group, tangent_space, DefSet, DefSetReport, TangentSpace,
};
pub use derivation::{
    derivation_check, hom_family, hom_vs_derivation, kahler_extension, square_zero_extension, HomFamilyMember,
    KahlerExtension, SquareZeroExtension,
};
pub use maranda::{
    maranda_average, maranda_decide, normalize_intertwiner, working_precision, MarandaCertificate, MarandaDecision,
    MarandaDecisionReport,
};

/// Square matrix over a [`FiniteLocalRing`], entries in row-major order.
///
/// Matrices do not own their ring; every operation takes it explicitly.
/// The derived ordering (entry coordinates, row-major) is the canonical
/// order used for orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    entries: Vec<RingElement>,
}

impl Matrix {
    pub fn from_entries(ring: &FiniteLocalRing, n: usize, entries: Vec<RingElement>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!("{n}x{n} matrix needs {} entries", n * n)));
        }
        if entries.iter().any(|e| e.coords.len() != ring.rank()) {
            return Err(Error::InvalidParameter("matrix entry from a different ring".into()));
        }
        Ok(Matrix { n, entries })
    }

    /// Entries given as integers (multiples of 1).
    pub fn from_ints(ring: &FiniteLocalRing, n: usize, entries: &[i64]) -> Result<Self> {
        Matrix::from_entries(ring, n, entries.iter().map(|&c| ring.from_int(c)).collect())
    }

    pub fn identity(ring: &FiniteLocalRing, n: usize) -> Self {
        Matrix::scalar(ring, n, &ring.one())
    }

    pub fn zero(ring: &FiniteLocalRing, n: usize) -> Self {
        Matrix { n, entries: vec![ring.zero(); n * n] }
    }

    pub fn scalar(ring: &FiniteLocalRing, n: usize, c: &RingElement) -> Self {
        let mut m = Matrix::zero(ring, n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// `I_n + c E_{ij}`.
    pub fn elementary(ring: &FiniteLocalRing, n: usize, i: usize, j: usize, c: &RingElement) -> Self {
        let mut m = Matrix::identity(ring, n);
        m.entries[i * n + j] = ring.add(&m.entries[i * n + j], c);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&RingElement) -> RingElement) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, ring: &FiniteLocalRing, other: &Matrix) -> Matrix {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| ring.add(a, b)).collect();
        Matrix { n: self.n, entries }
    }

    pub fn sub(&self, ring: &FiniteLocalRing, other: &Matrix) -> Matrix {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| ring.sub(a, b)).collect();
        Matrix { n: self.n, entries }
    }

    pub fn scale(&self, ring: &FiniteLocalRing, c: &RingElement) -> Matrix {
        self.map(|x| ring.mul(c, x))
    }

    pub fn mul(&self, ring: &FiniteLocalRing, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ring.mul(self.get(i, 0), other.get(0, j));
                for k in 1..n {
                    acc = ring.add(&acc, &ring.mul(self.get(i, k), other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Matrix { n, entries }
    }

    pub fn pow(&self, ring: &FiniteLocalRing, e: usize) -> Matrix {
        (0..e).fold(Matrix::identity(ring, self.n), |acc, _| acc.mul(ring, self))
    }

    /// Gauss–Jordan with unit pivots; over a local ring a matrix is
    /// invertible exactly when its reduction is.
    pub fn inverse(&self, ring: &FiniteLocalRing) -> Result<Matrix> {
        let n = self.n;
        let mut a: Vec<Vec<RingElement>> = (0..n).map(|i| self.entries[i * n..(i + 1) * n].to_vec()).collect();
        let mut b: Vec<Vec<RingElement>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| ring.is_unit(&a[r][c])).ok_or(Error::SingularMatrix)?;
            a.swap(c, piv);
            b.swap(c, piv);
            let inv = ring.invert(&a[c][c])?;
            for j in 0..n {
                a[c][j] = ring.mul(&a[c][j], &inv);
                b[c][j] = ring.mul(&b[c][j], &inv);
            }
            for r in 0..n {
                if r == c || ring.is_zero(&a[r][c]) {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = ring.sub(&a[r][j], &ring.mul(&f, &a[c][j]));
                    b[r][j] = ring.sub(&b[r][j], &ring.mul(&f, &b[c][j]));
                }
            }
        }
        Ok(Matrix { n, entries: b.into_iter().flatten().collect() })
    }

    pub fn is_invertible(&self, ring: &FiniteLocalRing) -> bool {
        self.inverse(ring).is_ok()
    }

    /// Entrywise equality up to the known precision of each entry.
    pub fn eq_at(&self, ring: &FiniteLocalRing, other: &Matrix) -> bool {
        self.n == other.n && self.entries.iter().zip(&other.entries).all(|(a, b)| ring.eq_at(a, b))
    }

    /// Entrywise reduction, as a matrix over the residue field `field`.
    pub fn reduce(&self, ring: &FiniteLocalRing, field: &FiniteLocalRing) -> Matrix {
        self.map(|x| field.full(ring.reduce(x)))
    }

    /// Entrywise section of a residue matrix.
    pub fn section(field_matrix: &Matrix, ring: &FiniteLocalRing) -> Matrix {
        field_matrix.map(|x| ring.section(&x.coords))
    }

    /// Whether the reduction is `I_n`.
    pub fn is_congruent_to_identity(&self, ring: &FiniteLocalRing) -> bool {
        let n = self.n;
        let one = ring.reduce(&ring.one());
        (0..n).all(|i| {
            (0..n).all(|j| {
                let r = ring.reduce(self.get(i, j));
                if i == j {
                    r == one
                } else {
                    r.iter().all(|&c| c == 0)
                }
            })
        })
    }

    /// Smallest precision among the entries.
    pub fn precision(&self) -> u32 {
        self.entries.iter().map(|e| e.prec).min().unwrap_or(u32::MAX)
    }

    /// JSON rows; an entry is an integer when the ring has rank 1 and a
    /// coordinate list otherwise.
    pub fn to_json(&self, ring: &FiniteLocalRing) -> Value {
        let entry = |x: &RingElement| {
            if ring.rank() == 1 {
                Value::from(x.coords[0])
            } else {
                Value::from(x.coords.clone())
            }
        };
        Value::Array(
            (0..self.n)
                .map(|i| Value::Array((0..self.n).map(|j| entry(self.get(i, j))).collect()))
                .collect(),
        )
    }

    pub fn render(&self, ring: &FiniteLocalRing) -> String {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let cells: Vec<String> = (0..self.n).map(|j| ring.render(self.get(i, j))).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// `GL_n(R)` under multiplication, as a target for group homomorphisms.
pub struct MatrixMonoid<'a> {
    pub ring: &'a FiniteLocalRing,
    pub n: usize,
}

impl Monoid for MatrixMonoid<'_> {
    type Elem = Matrix;
    fn identity(&self) -> Matrix {
        Matrix::identity(self.ring, self.n)
    }
    fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(self.ring, b)
    }
}

/// A homomorphism `G → GL_n(R)`, stored as the matrix of every element.
#[derive(Clone)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    ring: Arc<FiniteLocalRing>,
    n: usize,
    matrices: Vec<Matrix>,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation")
            .field("group", &self.group.name())
            .field("n", &self.n)
            .field("generator_images", &self.generator_images().iter().map(|m| m.render(&self.ring)).collect::<Vec<_>>())
            .finish()
    }
}

impl Representation {
    /// Extends generator images along the word table and verifies the
    /// result on all pairs of elements.
    pub fn from_generator_images(group: Arc<FiniteGroup>, ring: Arc<FiniteLocalRing>, images: Vec<Matrix>) -> Result<Self> {
        let n = images.first().map(|m| m.dim()).unwrap_or(1);
        if images.iter().any(|m| m.dim() != n) {
            return Err(Error::InvalidParameter("generator images have different sizes".into()));
        }
        for (k, m) in images.iter().enumerate() {
            if !m.is_invertible(&ring) {
                return Err(Error::NotHomomorphism(format!(
                    "image of generator {} is singular",
                    group.label(group.generators()[k])
                )));
            }
        }
        let monoid = MatrixMonoid { ring: &ring, n };
        match extend_and_verify_hom(&group, &monoid, &images)? {
            HomCheck::Hom(matrices) => Ok(Representation { group, ring, n, matrices }),
            HomCheck::NotHom { a, b } => Err(Error::NotHomomorphism(format!(
                "rho({} * {}) != rho({}) rho({})",
                group.label(a),
                group.label(b),
                group.label(a),
                group.label(b)
            ))),
        }
    }

    /// Element-indexed matrices already known to be multiplicative.
    pub(crate) fn from_verified(group: Arc<FiniteGroup>, ring: Arc<FiniteLocalRing>, n: usize, matrices: Vec<Matrix>) -> Self {
        Representation { group, ring, n, matrices }
    }

    pub fn trivial(group: Arc<FiniteGroup>, ring: Arc<FiniteLocalRing>, n: usize) -> Self {
        let matrices = vec![Matrix::identity(&ring, n); group.order()];
        Representation { group, ring, n, matrices }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn ring(&self) -> &Arc<FiniteLocalRing> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn generator_images(&self) -> Vec<Matrix> {
        self.group.generators().iter().map(|&g| self.matrices[g].clone()).collect()
    }

    /// Entrywise reduction to the residue field `field`.
    pub fn reduce_to(&self, field: Arc<FiniteLocalRing>) -> Representation {
        let matrices = self.matrices.iter().map(|m| m.reduce(&self.ring, &field)).collect();
        Representation { group: self.group.clone(), ring: field, n: self.n, matrices }
    }

    /// Push-forward along a ring homomorphism given entrywise.
    pub fn push_forward(&self, target: Arc<FiniteLocalRing>, f: impl Fn(&RingElement) -> RingElement) -> Representation {
        let matrices = self.matrices.iter().map(|m| m.map(&f)).collect();
        Representation { group: self.group.clone(), ring: target, n: self.n, matrices }
    }

    /// `K ρ K^{-1}`.
    pub fn conjugate(&self, k: &Matrix, k_inv: &Matrix) -> Representation {
        let matrices = self.matrices.iter().map(|m| k.mul(&self.ring, m).mul(&self.ring, k_inv)).collect();
        Representation { group: self.group.clone(), ring: self.ring.clone(), n: self.n, matrices }
    }

    /// Generator images as JSON integer matrices.
    pub fn to_json(&self) -> Value {
        Value::Array(self.generator_images().iter().map(|m| m.to_json(&self.ring)).collect())
    }
}

/// `ρ̄ : G → GL_n(k)` from generator images over a residue field.
pub fn residual_rep(group: Arc<FiniteGroup>, field: Arc<FiniteLocalRing>, images: Vec<Matrix>) -> Result<Representation> {
    if !is_field(&field) {
        return Err(Error::InvalidParameter("a residual representation must be defined over a field".into()));
    }
    Representation::from_generator_images(group, field, images)
}

pub(crate) fn is_field(ring: &FiniteLocalRing) -> bool {
    ring.log_cardinality() == ring.spec().r
}

/// Checks that `field` is the residue field of `ring` (same `p`, degree and
/// modulus modulo `p`).
pub(crate) fn check_residue_field(field: &FiniteLocalRing, ring: &FiniteLocalRing) -> Result<()> {
    let (a, b) = (field.spec(), ring.spec());
    let same = is_field(field)
        && a.p == b.p
        && a.r == b.r
        && a.modulus.iter().zip(&b.modulus).all(|(x, y)| x % a.p == y % a.p);
    if !same {
        return Err(Error::InvalidParameter("the residual representation is not over the residue field of the ring".into()));
    }
    Ok(())
}

/// A representation over `R` together with its verified reduction `ρ̄`.
#[derive(Debug, Clone)]
pub struct Lift {
    rep: Representation,
}

impl Lift {
    pub fn new(residual: &Representation, rep: Representation) -> Result<Lift> {
        check_residue_field(residual.ring(), rep.ring())?;
        if !Arc::ptr_eq(residual.group(), rep.group()) && residual.group().cayley_table() != rep.group().cayley_table() {
            return Err(Error::InvalidParameter("lift and residual representation have different groups".into()));
        }
        if rep.dim() != residual.dim() {
            return Err(Error::InvalidParameter("lift and residual representation have different dimensions".into()));
        }
        for &g in residual.group().generators() {
            if rep.matrix(g).reduce(rep.ring(), residual.ring()) != *residual.matrix(g) {
                return Err(Error::Hypothesis(format!(
                    "reduction differs from the residual representation at {}",
                    residual.group().label(g)
                )));
            }
        }
        Ok(Lift { rep })
    }

    pub(crate) fn from_verified(rep: Representation) -> Lift {
        Lift { rep }
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn into_rep(self) -> Representation {
        self.rep
    }

    /// Canonical sort key: generator images in order.
    pub fn key(&self) -> Vec<Matrix> {
        self.rep.generator_images()
    }
}
