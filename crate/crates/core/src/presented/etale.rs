use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::local_ring::presentation_truncation;
use crate::poly::{IntPoly, Monomial};
use crate::{Error, Limits, Result};

use super::groebner::render_qpoly;
use super::qfiber::{nilpotent_witness, omega_rank, q_fiber, trace_form, NilpotentWitness, QFiber, QFiberAlgebra};
use super::IntegerPolynomialPresentation;

/// Dimension of the rational fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Finite(usize),
    Infinite,
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(d) => s.serialize_u64(*d as u64),
            Dimension::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL_NOT_FINITE")]
    FailNotFinite,
    #[serde(rename = "FAIL_NOT_REDUCED")]
    FailNotReduced,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self != Verdict::Pass
    }
}

/// Whether the rational fiber is a finite étale Q-algebra, with the
/// evidence either way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaleReport {
    pub finite_dimensional: bool,
    pub dim: Dimension,
    /// Determinant of the trace form, as an exact rational string.
    pub trace_det: Option<String>,
    /// `dim_Q` of the module of differentials.
    pub omega_rank: Option<usize>,
    pub reduced: Option<bool>,
    pub verdict: Verdict,
    pub witness: Option<NilpotentWitness>,
    /// Variables none of whose powers reduce, when infinite-dimensional.
    pub unbounded_variables: Vec<String>,
    pub groebner_basis: Vec<String>,
}

/// Decides whether `Q[X]/(f)` is finite-dimensional and reduced. The trace
/// form and the differential module must agree on reducedness; if they do
/// not, the result is an internal error.
pub fn etale_check(pres: &IntegerPolynomialPresentation, limits: &Limits) -> Result<EtaleReport> {
    match q_fiber(pres, limits)? {
        QFiber::Infinite { groebner, unbounded } => Ok(EtaleReport {
            finite_dimensional: false,
            dim: Dimension::Infinite,
            trace_det: None,
            omega_rank: None,
            reduced: None,
            verdict: Verdict::FailNotFinite,
            witness: None,
            unbounded_variables: unbounded,
            groebner_basis: groebner.iter().map(|g| render_qpoly(g, &pres.vars)).collect(),
        }),
        QFiber::Finite(a) => finite_report(pres, &a),
    }
}

fn finite_report(pres: &IntegerPolynomialPresentation, a: &QFiberAlgebra) -> Result<EtaleReport> {
    let tf = trace_form(a);
    let omega = omega_rank(pres, a);
    let by_trace = !tf.det.is_zero();
    let by_omega = omega == 0;
    if by_trace != by_omega {
        return Err(Error::Internal(format!(
            "trace determinant {} and differential rank {omega} disagree on reducedness",
            tf.det
        )));
    }
    let witness = if by_trace { None } else { Some(nilpotent_witness(a)?.1) };
    Ok(EtaleReport {
        finite_dimensional: true,
        dim: Dimension::Finite(a.dim()),
        trace_det: Some(tf.det.to_string()),
        omega_rank: Some(omega),
        reduced: Some(by_trace),
        verdict: if by_trace { Verdict::Pass } else { Verdict::FailNotReduced },
        witness,
        unbounded_variables: Vec::new(),
        groebner_basis: a.groebner.iter().map(|g| render_qpoly(g, &pres.vars)).collect(),
    })
}

/// `Z_p[X, Y]` modulo all monomials of degree 5, `X^4` and
/// `Y^4 - X^2 Y^2 - α X^3 Y`.
pub fn r_alpha_presentation(alpha: i64, p: u64) -> Result<IntegerPolynomialPresentation> {
    let mut rels: Vec<IntPoly> = Monomial::of_degree(2, 5).into_iter().map(|m| IntPoly::monomial(m, BigInt::from(1))).collect();
    let mono = |a: u32, b: u32, c: i64| IntPoly::monomial(Monomial(vec![a, b]), BigInt::from(c));
    rels.push(mono(4, 0, 1));
    rels.push(mono(0, 4, 1).sub(&mono(2, 2, 1)).sub(&mono(3, 1, alpha)));
    IntegerPolynomialPresentation::new(p, vec!["X".into(), "Y".into()], rels)
}

fn unique_residue_point(pres: &IntegerPolynomialPresentation, limits: &Limits, what: &str) -> Result<Vec<u64>> {
    let pts = crate::local_ring::residue_points(pres, limits)?;
    match pts.as_slice() {
        [a] => Ok(a.clone()),
        _ => Err(Error::Hypothesis(format!("{what} has {} residue points over F_{}, expected one", pts.len(), pres.p))),
    }
}

/// Whether `X_i ↦ images[i]` defines a local homomorphism from `source` to
/// `target`: every source relation must vanish in the rational fiber of the
/// target, every normal form met on the way must be p-integral, and the
/// residue points must correspond.
pub fn verify_presented_hom(
    source: &IntegerPolynomialPresentation,
    target: &IntegerPolynomialPresentation,
    images: &[IntPoly],
    limits: &Limits,
) -> Result<bool> {
    if source.p != target.p {
        return Err(Error::InvalidParameter("source and target use different primes".into()));
    }
    if images.len() != source.nvars() || images.iter().any(|f| f.nvars != target.nvars()) {
        return Err(Error::InvalidParameter("one image per source variable, in the target variables".into()));
    }
    let a = match q_fiber(target, limits)? {
        QFiber::Finite(a) => a,
        QFiber::Infinite { .. } => {
            return Err(Error::Hypothesis("target rational fiber is not finite-dimensional".into()))
        }
    };
    let p = BigInt::from(source.p);
    let mut all_vanish = true;
    for f in &source.relations {
        let image = f.substitute(images);
        let coords = a.coords_of_int(&image);
        if coords.iter().any(|c| c.denom().is_multiple_of(&p)) {
            return Err(Error::NotIntegral(format!(
                "normal form of the image of {} has a denominator divisible by {}",
                f.render(&source.vars),
                source.p
            )));
        }
        if coords.iter().any(|c| !c.is_zero()) {
            all_vanish = false;
        }
    }
    let src_pt = unique_residue_point(source, limits, "source")?;
    let tgt_pt = unique_residue_point(target, limits, "target")?;
    let tgt_images: Vec<IntPoly> = tgt_pt.iter().map(|&x| IntPoly::constant(0, BigInt::from(x))).collect();
    let residue_ok = images.iter().zip(&src_pt).all(|(img, &a_i)| {
        let v = img.substitute(&tgt_images);
        let c = v.terms.values().fold(BigInt::zero(), |acc, c| acc + c);
        c.mod_floor(&p) == BigInt::from(a_i)
    });
    Ok(all_vanish && residue_ok)
}

/// Whether the ring is a finitely generated free module over W(k): the
/// rational fiber must be finite-dimensional (exact) and the truncation
/// modulo `p^precision` must be free of rank equal to that dimension
/// (certified only at this precision).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WMembershipReport {
    pub finite_dimensional: bool,
    pub rational_dim: Dimension,
    pub precision: u32,
    pub truncation_finite: Option<bool>,
    pub truncation_rank: Option<usize>,
    pub p_torsion_detected: Option<bool>,
    pub torsion_witness: Option<String>,
    pub verdict: String,
    pub caveat: String,
}

pub fn w_membership_check(pres: &IntegerPolynomialPresentation, precision: u32, limits: &Limits) -> Result<WMembershipReport> {
    let caveat = format!("torsion-freeness is certified only modulo {}^{precision}", pres.p);
    let dim = match q_fiber(pres, limits)? {
        QFiber::Finite(a) => a.dim(),
        QFiber::Infinite { .. } => {
            return Ok(WMembershipReport {
                finite_dimensional: false,
                rational_dim: Dimension::Infinite,
                precision,
                truncation_finite: None,
                truncation_rank: None,
                p_torsion_detected: None,
                torsion_witness: None,
                verdict: "not finite free over W(k)".into(),
                caveat,
            })
        }
    };
    let (finite, rank, torsion, witness) = match presentation_truncation(pres, precision, limits) {
        Ok(standard) => {
            let short = standard.iter().find(|(_, e)| *e < precision);
            let witness = short.map(|(m, e)| format!("{}^{e} * {} = 0 with {} != 0", pres.p, m.render(&pres.vars), m.render(&pres.vars)));
            let torsion = short.is_some() || standard.len() != dim;
            let witness = witness.or_else(|| {
                (standard.len() != dim)
                    .then(|| format!("truncation has rank {} but the rational fiber has dimension {dim}", standard.len()))
            });
            (Some(true), Some(standard.len()), Some(torsion), witness)
        }
        Err(Error::NotFiniteAtCap { .. }) => (
            Some(false),
            None,
            Some(true),
            Some(format!("truncation modulo {}^{precision} is infinite although the rational fiber is finite", pres.p)),
        ),
        Err(e) => return Err(e),
    };
    let member = torsion == Some(false);
    Ok(WMembershipReport {
        finite_dimensional: true,
        rational_dim: Dimension::Finite(dim),
        precision,
        truncation_finite: finite,
        truncation_rank: rank,
        p_torsion_detected: torsion,
        torsion_witness: witness,
        verdict: if member { format!("finite free over W(k) (certified at precision {precision})") } else { "not finite free over W(k)".into() },
        caveat,
    })
}
