//! Averaging an approximate intertwiner into an exact one.
//!
//! For lifts `ρ₁, ρ₂` over `R`, `J = |G| m_R`, and `A ≡ I` with
//! `ρ₁(g) A ≡ A ρ₂(g) mod J`, the matrix
//!
//! ```text
//! B₀ = (1/|G|) Σ_g ρ₁(g) A ρ₂(g)⁻¹
//! ```
//!
//! satisfies `ρ₁ B₀ = B₀ ρ₂` and `B₀ ≡ I mod m_R`. Dividing by `|G| = p^r s`
//! costs `r` digits of precision, so when `p | |G|` the ring must be a
//! precision model.

use std::sync::Arc;

use serde::Serialize;

use crate::local_ring::{FiniteLocalRing, Ideal, Mode, RingElement};
use crate::{Error, Limits, Result};

use super::{are_strictly_equivalent, Matrix, Representation};

/// Default working precision `r + 4` for `|G| = p^r s`.
pub fn working_precision(group_order: usize, p: u64) -> u32 {
    let mut n = group_order as u64;
    let mut r = 0;
    while n.is_multiple_of(p) {
        n /= p;
        r += 1;
    }
    r + 4
}

/// An exact conjugator `B₀` with `ρ₁ = B₀ ρ₂ B₀⁻¹`, valid modulo
/// `p^precision`.
#[derive(Debug, Clone)]
pub struct MarandaCertificate {
    pub b0: Matrix,
    pub precision: u32,
    /// `r` in `|G| = p^r s`.
    pub p_exponent: u32,
}

impl MarandaCertificate {
    /// Re-checks `ρ₁(h) B₀ = B₀ ρ₂(h)` for every `h` at the declared precision
    /// and `B₀ ≡ I mod m_R`.
    pub fn verify(&self, rho1: &Representation, rho2: &Representation) -> bool {
        let ring = rho1.ring();
        let at = |m: &Matrix| m.map(|x| ring.with_precision(x, self.precision));
        let b0 = at(&self.b0);
        b0.is_congruent_to_identity(ring)
            && (0..rho1.group().order()).all(|h| {
                let lhs = at(&rho1.matrix(h).mul(ring, &b0));
                let rhs = at(&b0.mul(ring, rho2.matrix(h)));
                lhs == rhs
            })
    }

    pub fn to_json(&self, ring: &FiniteLocalRing) -> serde_json::Value {
        serde_json::json!({
            "b0": self.b0.to_json(ring),
            "precision": self.precision,
        })
    }
}

fn check_pair(rho1: &Representation, rho2: &Representation) -> Result<()> {
    let (a, b) = (rho1.ring(), rho2.ring());
    if rho1.dim() != rho2.dim() || rho1.group().cayley_table() != rho2.group().cayley_table() {
        return Err(Error::InvalidParameter("representations have different groups or dimensions".into()));
    }
    if a.spec() != b.spec() || a.orders() != b.orders() || a.mode() != b.mode() {
        return Err(Error::InvalidParameter("representations are over different rings".into()));
    }
    Ok(())
}

/// `J = |G| m_R`.
fn averaging_ideal(ring: &FiniteLocalRing, group_order: usize) -> Ideal {
    ring.scale_ideal(group_order as i64, &ring.maximal_ideal())
}

/// Averages `A` over the group; see the module docs for the hypotheses.
pub fn maranda_average(rho1: &Representation, rho2: &Representation, a: &Matrix) -> Result<MarandaCertificate> {
    check_pair(rho1, rho2)?;
    let ring = rho1.ring();
    let group = rho1.group();
    let order = group.order();
    let (r, _) = group.p_part(ring.p())?;
    let precision = ring.spec().m;
    if r > 0 {
        if ring.mode() != Mode::PrecisionModel {
            return Err(Error::Unsupported(format!(
                "{} divides |G| = {order}: averaging needs a precision-model ring",
                ring.p()
            )));
        }
        if r >= precision {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by |G| = {order} needs more than {precision} digits"
            )));
        }
    }
    if a.dim() != rho1.dim() || !a.is_congruent_to_identity(ring) {
        return Err(Error::Hypothesis("A must be congruent to the identity modulo the maximal ideal".into()));
    }
    let j = averaging_ideal(ring, order);
    for h in 0..order {
        let diff = rho1.matrix(h).mul(ring, a).sub(ring, &a.mul(ring, rho2.matrix(h)));
        if !diff.entries().iter().all(|x| j.contains(x)) {
            return Err(Error::Hypothesis(format!(
                "rho1(g) A and A rho2(g) are not congruent modulo |G| m at g = {}",
                group.label(h)
            )));
        }
    }
    let mut b = Matrix::zero(ring, rho1.dim());
    for h in 0..order {
        let term = rho1.matrix(h).mul(ring, a).mul(ring, rho2.matrix(group.inverse(h)));
        b = b.add(ring, &term);
    }
    let divisor = ring.from_int(order as i64);
    let entries = b.entries().iter().map(|x| ring.exact_divide(x, &divisor)).collect::<Result<Vec<RingElement>>>()?;
    let b0 = Matrix::from_entries(ring, rho1.dim(), entries)?;
    let cert = MarandaCertificate { precision: b0.precision(), b0, p_exponent: r };
    if !cert.verify(rho1, rho2) {
        return Err(Error::Internal("averaged matrix fails the conjugation identity".into()));
    }
    Ok(cert)
}

/// Outcome of deciding strict equivalence through the quotient `R / J`.
#[derive(Debug, Clone)]
pub struct MarandaDecision {
    pub equivalent: bool,
    pub certificate: Option<MarandaCertificate>,
    /// The quotient `R / |G| m_R` where the finite search ran.
    pub quotient: Arc<FiniteLocalRing>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarandaDecisionReport {
    pub equivalent: bool,
    pub quotient_cardinality: u128,
    pub certificate: Option<serde_json::Value>,
}

impl MarandaDecision {
    pub fn report(&self, ring: &FiniteLocalRing) -> MarandaDecisionReport {
        MarandaDecisionReport {
            equivalent: self.equivalent,
            quotient_cardinality: self.quotient.cardinality(),
            certificate: self.certificate.as_ref().map(|c| c.to_json(ring)),
        }
    }
}

/// Decides strict equivalence of two lifts over `R` by a finite search over
/// `R / |G| m_R`, certifying a positive answer by averaging.
pub fn maranda_decide(rho1: &Representation, rho2: &Representation, limits: &Limits) -> Result<MarandaDecision> {
    check_pair(rho1, rho2)?;
    let ring = rho1.ring();
    let j = averaging_ideal(ring, rho1.group().order());
    let (quotient, qmap) = ring.quotient_ring(&j)?;
    let quotient = Arc::new(quotient);
    let down = |rho: &Representation| rho.push_forward(quotient.clone(), |x| qmap.project(&quotient, x));
    let (q1, q2) = (down(rho1), down(rho2));
    match are_strictly_equivalent(&q1, &q2, limits)? {
        None => Ok(MarandaDecision { equivalent: false, certificate: None, quotient }),
        Some(kbar) => {
            let a = kbar.map(|x| qmap.lift(ring, x));
            let cert = maranda_average(rho1, rho2, &a)?;
            Ok(MarandaDecision { equivalent: true, certificate: Some(cert), quotient })
        }
    }
}

/// Splits an exact intertwiner `B` (with `ρ₁ B = B ρ₂`) whose reduction is
/// a nonzero scalar as `B = u B₀` with `u` a unit and `B₀ ≡ I`.
///
/// A non-scalar reduction is reported as a hypothesis failure.
pub fn normalize_intertwiner(rho1: &Representation, rho2: &Representation, b: &Matrix) -> Result<(RingElement, Matrix)> {
    check_pair(rho1, rho2)?;
    let ring = rho1.ring();
    let n = rho1.dim();
    for &g in rho1.group().generators() {
        if !rho1.matrix(g).mul(ring, b).eq_at(ring, &b.mul(ring, rho2.matrix(g))) {
            return Err(Error::Hypothesis("B does not intertwine the two representations".into()));
        }
    }
    let lambda = ring.reduce(b.get(0, 0));
    let scalar = (0..n).all(|i| {
        (0..n).all(|j| {
            let r = ring.reduce(b.get(i, j));
            if i == j {
                r == lambda
            } else {
                r.iter().all(|&c| c == 0)
            }
        })
    });
    if !scalar {
        return Err(Error::Hypothesis("the reduction of B is not a scalar matrix".into()));
    }
    if lambda.iter().all(|&c| c == 0) {
        return Err(Error::Hypothesis("the reduction of B is zero".into()));
    }
    let u = b.get(0, 0).clone();
    let b0 = b.scale(ring, &ring.invert(&u)?);
    Ok((u, b0))
}
