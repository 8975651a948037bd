//! Checks on whether a ring can be a universal deformation ring of a
//! finite group representation, and what such a group must look like.
//!
//! None of these procedures ever concludes that a ring *is* universal:
//! verdicts are one-sided, and every negative verdict carries a
//! certificate that can be re-checked.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::local_ring::FiniteLocalRing;
use crate::poly::IntPoly;
use crate::presented::{
    etale_check, q_fiber, verify_presented_hom, w_membership_check, EtaleReport, IntegerPolynomialPresentation, QFiber,
};
use crate::representation::{def_set, enumerate_lifts, kernel_group, Matrix, Representation};
use crate::{Error, Limits, Result};

/// Whether the ring is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    /// Not a universal deformation ring, nor a quotient of one.
    Excluded,
    /// The necessary condition holds; membership is not decided.
    Unknown,
}

/// What is known about a ring from the literature, for the catalogued
/// families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogStatus {
    KnownMember,
    KnownNonMember,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub family: String,
    pub status: CatalogStatus,
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryConditionVerdict {
    pub etale: EtaleReport,
    pub membership: Membership,
    pub interpretation: String,
    /// Machine-checkable reason for an exclusion.
    pub certificate: Option<String>,
    pub catalog: Option<CatalogEntry>,
}

const EXCLUDED: &str = "NOT a universal deformation ring of any finite group representation, nor a quotient of one";
const UNKNOWN: &str = "necessary condition satisfied; membership unknown";

/// The rational fiber of a universal deformation ring (or of a quotient of
/// one) is a finite étale algebra; failing that excludes the ring.
pub fn necessary_condition(pres: &IntegerPolynomialPresentation, limits: &Limits) -> Result<NecessaryConditionVerdict> {
    let etale = etale_check(pres, limits)?;
    let (membership, interpretation) =
        if etale.verdict.is_fail() { (Membership::Excluded, EXCLUDED) } else { (Membership::Unknown, UNKNOWN) };
    let certificate = if !etale.finite_dimensional {
        Some(format!(
            "no power of {} reduces modulo the rational Groebner basis, so the rational fiber is infinite-dimensional",
            etale.unbounded_variables.join(", ")
        ))
    } else {
        etale.witness.as_ref().map(|w| {
            format!("({})^{} = 0 with {} != 0 in the rational fiber", w.element, w.vanishing_power, w.element)
        })
    };
    Ok(NecessaryConditionVerdict {
        catalog: catalog_lookup(pres),
        etale,
        membership,
        interpretation: interpretation.to_string(),
        certificate,
    })
}

fn single(p: u64, rels: &[String]) -> IntegerPolynomialPresentation {
    let rels: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
    IntegerPolynomialPresentation::parse(p, &["X"], &rels).expect("catalog presentation parses")
}

/// Catalogued single-variable families at prime `p`, with small parameters.
pub fn catalog(p: u64) -> Vec<(IntegerPolynomialPresentation, CatalogEntry)> {
    let entry = |family: String, status: CatalogStatus, tag: &str| CatalogEntry { family, status, tag: tag.to_string() };
    let mut out = Vec::new();
    for k in 0..=3u32 {
        let q = p.pow(k);
        out.push((
            single(p, &[format!("X^{q} - 1")]),
            entry(format!("W(k)[Z/{q}]"), CatalogStatus::KnownMember, "one-dimensional representations"),
        ));
    }
    out.push((single(p, &["X^2".into()]), entry("W(k)[ε]".into(), CatalogStatus::KnownNonMember, "excluded example")));
    out.push((single(p, &[]), entry("W(k)[[X]]".into(), CatalogStatus::KnownNonMember, "excluded example")));
    for r in 1..=6u32 {
        let pr = p.pow(r);
        out.push((
            single(p, &["X^2".into(), format!("{pr}*X")]),
            entry(format!("W(k)[X]/(X^2, p^{r} X)"), CatalogStatus::KnownMember, "square-zero member"),
        ));
        out.push((
            single(p, &[format!("X^2 - {pr}*X")]),
            entry(format!("W(k)[X]/(X^2 - p^{r} X)"), CatalogStatus::Open, "open problem"),
        ));
        let known = r == 1 && p == 3;
        out.push((
            single(p, &[format!("{pr}*X")]),
            entry(
                format!("W(k)[[X]]/(p^{r} X)"),
                if known { CatalogStatus::KnownMember } else { CatalogStatus::Open },
                if known { "known member" } else { "open problem" },
            ),
        ));
        if r > 1 {
            let known = r == 2 && p == 5;
            out.push((
                single(p, &[format!("X^{r} - {p}")]),
                entry(
                    format!("W(k)[p^(1/{r})]"),
                    if known { CatalogStatus::KnownMember } else { CatalogStatus::Open },
                    if known { "known member" } else { "open problem" },
                ),
            ));
        }
    }
    out
}

/// Matches a one-variable presentation (any variable name) against the
/// catalog.
pub fn catalog_lookup(pres: &IntegerPolynomialPresentation) -> Option<CatalogEntry> {
    if pres.nvars() != 1 || pres.r != 1 {
        return None;
    }
    let renamed = IntegerPolynomialPresentation::new(pres.p, vec!["X".into()], pres.relations.clone()).ok()?;
    catalog(pres.p).into_iter().find(|(c, _)| *c == renamed).map(|(_, e)| e)
}

/// A lower bound `p^{r+1} | |G|` from two distinct homomorphisms that agree
/// modulo `p^r m_S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderBoundResult {
    pub p: u64,
    /// Largest `r` with `f₁ ≡ f₂ mod p^r m_S`.
    pub congruence_level: u32,
    pub divisor: u64,
    pub claim: String,
    /// Truncation precisions at which `f₁ - f₂ ∈ p^r m_S` was re-checked.
    pub congruence_precisions: Vec<u32>,
    /// Truncation precisions at which `f₁ - f₂ ∉ p^{r+1} m_S` was re-checked.
    pub non_congruence_precisions: Vec<u32>,
    pub differences: Vec<String>,
}

const MAX_LEVEL: u32 = 30;

/// Whether every `d` lies in `p^level m_S`, decided in `S / p^prec`.
fn in_scaled_maximal(
    target: &IntegerPolynomialPresentation,
    diffs: &[IntPoly],
    level: u32,
    prec: u32,
    limits: &Limits,
) -> Result<bool> {
    let t = FiniteLocalRing::from_truncated_presentation(target, prec, limits)?;
    let ideal = t.scale_ideal(target.p.pow(level) as i64, &t.maximal_ideal());
    for d in diffs {
        if !ideal.contains(&t.eval_poly(d)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f_i : R → S` given by the images of the variables of `R`. `S` must be
/// p-torsion-free (checked on its truncation at the working precision).
///
/// Membership `f₁ - f₂ ∈ p^ℓ m_S` is tested in `S / p^{ℓ+2}`: since
/// `p^{ℓ+2} S ⊆ p^ℓ m_S`, the truncation does not change the answer.
pub fn order_lower_bound(
    source: &IntegerPolynomialPresentation,
    target: &IntegerPolynomialPresentation,
    f1: &[IntPoly],
    f2: &[IntPoly],
    limits: &Limits,
) -> Result<OrderBoundResult> {
    for (name, f) in [("f1", f1), ("f2", f2)] {
        if !verify_presented_hom(source, target, f, limits)? {
            return Err(Error::NotHomomorphism(format!("{name} is not a homomorphism")));
        }
    }
    let diffs: Vec<IntPoly> = f1.iter().zip(f2).map(|(a, b)| a.sub(b)).collect();
    let algebra = match q_fiber(target, limits)? {
        QFiber::Finite(a) => a,
        QFiber::Infinite { .. } => return Err(Error::Hypothesis("target is not finite over W(k)".into())),
    };
    if diffs.iter().all(|d| algebra.coords_of_int(d).iter().all(|c| c.is_zero())) {
        return Err(Error::InvalidParameter("f1 and f2 are equal".into()));
    }
    let check_torsion = |prec: u32| -> Result<()> {
        let report = w_membership_check(target, prec, limits)?;
        if report.p_torsion_detected != Some(false) {
            return Err(Error::Hypothesis(format!(
                "target has p-torsion: {}",
                report.torsion_witness.unwrap_or_default()
            )));
        }
        Ok(())
    };
    check_torsion(2)?;
    let mut level = 0;
    while in_scaled_maximal(target, &diffs, level, level + 2, limits)? {
        level += 1;
        if level > MAX_LEVEL {
            return Err(Error::Internal("congruence level did not stabilise".into()));
        }
    }
    if level == 0 {
        return Err(Error::Hypothesis("f1 and f2 differ modulo the maximal ideal".into()));
    }
    let r = level - 1;
    check_torsion(r + 4)?;
    let congruence_precisions = vec![r + 2, r + 3];
    let non_congruence_precisions = vec![r + 3, r + 4];
    for &prec in &congruence_precisions {
        if !in_scaled_maximal(target, &diffs, r, prec, limits)? {
            return Err(Error::Internal(format!("congruence at level {r} not confirmed at precision {prec}")));
        }
    }
    for &prec in &non_congruence_precisions {
        if in_scaled_maximal(target, &diffs, r + 1, prec, limits)? {
            return Err(Error::Internal(format!("non-congruence at level {} not confirmed at precision {prec}", r + 1)));
        }
    }
    let divisor = target.p.pow(r + 1);
    Ok(OrderBoundResult {
        p: target.p,
        congruence_level: r,
        divisor,
        claim: format!("{divisor} | |G|"),
        congruence_precisions,
        non_congruence_precisions,
        differences: diffs.iter().map(|d| d.render(&target.vars)).collect(),
    })
}

/// Deformation count of a one-dimensional `ρ̄` against the homomorphism
/// count from the group ring of the p-part of the abelianization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneDimCrosscheck {
    /// Invariant factors `p^{k_i}` of the p-part of `G^ab`.
    pub abelian_p_part: Vec<u64>,
    pub def_count: usize,
    pub predicted: u128,
    pub agree: bool,
}

pub fn one_dim_udr_crosscheck(
    residual: &Representation,
    ring: Arc<FiniteLocalRing>,
    limits: &Limits,
) -> Result<OneDimCrosscheck> {
    if residual.dim() != 1 {
        return Err(Error::InvalidParameter("the cross-check needs a one-dimensional representation".into()));
    }
    let p = ring.p();
    let abelian_p_part: Vec<u64> = residual
        .group()
        .abelianization()
        .into_iter()
        .map(|d| {
            let mut q = 1;
            let mut d = d;
            while d % p == 0 {
                d /= p;
                q *= p;
            }
            q
        })
        .filter(|&q| q > 1)
        .collect();
    let elements = ring.enumerate_elements(limits)?;
    let one = ring.one();
    let predicted = abelian_p_part
        .iter()
        .map(|&q| elements.iter().filter(|x| ring.pow(x, q) == one).count() as u128)
        .product();
    let def_count = def_set(residual, ring, limits)?.class_count;
    Ok(OneDimCrosscheck { agree: def_count as u128 == predicted, abelian_p_part, def_count, predicted })
}

/// The averaging bound `|Def(R)| <= |Def(R / |G| m_R)|`, tested on a
/// precision model `R` of working precision `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitenessBound {
    pub group_order: usize,
    pub p_exponent: u32,
    pub precision: u32,
    /// Precision `N - r` at which equivalences of lifts are certified.
    pub certified_precision: u32,
    pub quotient_cardinality: u128,
    /// `|Def(R / J)|`, the certified upper bound.
    pub bound: usize,
    /// Lifts over `R` at working precision.
    pub lift_count: usize,
    /// Classes of those lifts at the certified precision.
    pub classes_at_certified_precision: usize,
    /// Whether classes at the certified precision inject into `Def(R / J)`.
    pub injective: bool,
}

fn canonical_key(rep: &Representation, kernel: &[(Matrix, Matrix)]) -> Vec<Matrix> {
    let ring = rep.ring();
    let gens = rep.generator_images();
    kernel
        .iter()
        .map(|(k, ki)| gens.iter().map(|x| k.mul(ring, x).mul(ring, ki)).collect::<Vec<_>>())
        .min()
        .unwrap_or(gens)
}

fn kernel_with_inverses(ring: &FiniteLocalRing, n: usize, limits: &Limits) -> Result<Vec<(Matrix, Matrix)>> {
    kernel_group(ring, n, limits)?
        .into_iter()
        .map(|k| {
            let ki = k.inverse(ring)?;
            Ok((k, ki))
        })
        .collect()
}

pub fn finiteness_bound_check(residual: &Representation, ring: Arc<FiniteLocalRing>, limits: &Limits) -> Result<FinitenessBound> {
    let group = residual.group();
    let order = group.order();
    let p = ring.p();
    let (r, _) = group.p_part(p)?;
    let precision = ring.spec().m;
    if r >= precision {
        return Err(Error::PrecisionExhausted(format!("|G| = {order} needs precision above {precision}")));
    }
    let certified_precision = precision - r;
    let j = ring.scale_ideal(order as i64, &ring.maximal_ideal());
    let (quotient, to_quotient) = ring.quotient_ring(&j)?;
    let quotient = Arc::new(quotient);
    let bound = def_set(residual, quotient.clone(), limits)?.class_count;
    let pk = ring.from_int(p.pow(certified_precision) as i64);
    let (coarse, to_coarse) = ring.quotient_ring(&ring.ideal_span(&[pk]))?;
    let coarse = Arc::new(coarse);
    let lifts = enumerate_lifts(residual, ring.clone(), limits)?;
    let n = residual.dim();
    let kq = kernel_with_inverses(&quotient, n, limits)?;
    let kc = kernel_with_inverses(&coarse, n, limits)?;
    let mut classes: BTreeMap<Vec<Matrix>, Vec<Matrix>> = BTreeMap::new();
    let mut injective = true;
    for l in &lifts {
        let c = canonical_key(&l.rep().push_forward(coarse.clone(), |x| to_coarse.project(&coarse, x)), &kc);
        let q = canonical_key(&l.rep().push_forward(quotient.clone(), |x| to_quotient.project(&quotient, x)), &kq);
        classes.insert(c, q);
    }
    let mut seen: BTreeMap<&Vec<Matrix>, usize> = BTreeMap::new();
    for q in classes.values() {
        let count = seen.entry(q).or_default();
        *count += 1;
        if *count > 1 {
            injective = false;
        }
    }
    Ok(FinitenessBound {
        group_order: order,
        p_exponent: r,
        precision,
        certified_precision,
        quotient_cardinality: quotient.cardinality(),
        bound,
        lift_count: lifts.len(),
        classes_at_certified_precision: classes.len(),
        injective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::poly::parse_poly;

    fn pres(p: u64, rels: &[&str]) -> IntegerPolynomialPresentation {
        IntegerPolynomialPresentation::parse(p, &["X"], rels).unwrap()
    }

    #[test]
    fn necessary_condition_vectors() {
        let l = Limits::default();
        let v = necessary_condition(&pres(2, &["X^2"]), &l).unwrap();
        assert_eq!(v.membership, Membership::Excluded);
        assert!(v.certificate.unwrap().contains("X"));
        assert_eq!(v.catalog.unwrap().status, CatalogStatus::KnownNonMember);
        assert_eq!(necessary_condition(&pres(2, &["X^4 - 1"]), &l).unwrap().membership, Membership::Unknown);
        assert_eq!(necessary_condition(&pres(2, &["X^2", "4*X"]), &l).unwrap().membership, Membership::Unknown);
        let open = necessary_condition(&pres(2, &["X^2 - 4*X"]), &l).unwrap();
        assert_eq!(open.membership, Membership::Unknown);
        assert_eq!(open.catalog.unwrap().tag, "open problem");
        let renamed = IntegerPolynomialPresentation::parse(5, &["T"], &["T^2 - 5"]).unwrap();
        assert_eq!(catalog_lookup(&renamed).unwrap().status, CatalogStatus::KnownMember);
    }

    fn x(src: &str) -> IntPoly {
        parse_poly(src, &["X".to_string()]).unwrap()
    }

    #[test]
    fn order_bounds() {
        let l = Limits::default();
        let s = pres(2, &["X^2 - 4*X"]);
        let b = order_lower_bound(&s, &s, &[x("0")], &[x("4")], &l).unwrap();
        assert_eq!((b.congruence_level, b.claim.as_str()), (1, "4 | |G|"));
        let d = pres(3, &["X^2"]);
        let b = order_lower_bound(&d, &d, &[x("X")], &[x("4*X")], &l).unwrap();
        assert_eq!((b.congruence_level, b.divisor), (1, 9));
        assert!(matches!(order_lower_bound(&s, &s, &[x("4")], &[x("4")], &l), Err(Error::InvalidParameter(_))));
    }

    fn trivial(g: FiniteGroup, p: u64, n: usize) -> Representation {
        Representation::trivial(Arc::new(g), Arc::new(FiniteLocalRing::galois_ring(p, 1, 1).unwrap()), n)
    }

    #[test]
    fn one_dimensional() {
        let l = Limits::default();
        let z = |p, m| Arc::new(FiniteLocalRing::galois_ring(p, m, 1).unwrap());
        let c = one_dim_udr_crosscheck(&trivial(FiniteGroup::cyclic(2).unwrap(), 2, 1), z(2, 3), &l).unwrap();
        assert_eq!((c.def_count, c.predicted), (4, 4));
        let c = one_dim_udr_crosscheck(&trivial(FiniteGroup::cyclic(3).unwrap(), 3, 1), z(3, 2), &l).unwrap();
        assert_eq!((c.def_count, c.predicted), (3, 3));
    }

    #[test]
    fn finiteness_bounds() {
        let l = Limits::default();
        let zp = |p, n| Arc::new(FiniteLocalRing::witt_precision_model(p, n, 1).unwrap());
        let b = finiteness_bound_check(&trivial(FiniteGroup::cyclic(2).unwrap(), 2, 1), zp(2, 4), &l).unwrap();
        assert_eq!((b.bound, b.lift_count, b.classes_at_certified_precision), (2, 4, 2));
        assert!(b.injective);
        let b = finiteness_bound_check(&trivial(FiniteGroup::cyclic(3).unwrap(), 2, 1), zp(2, 4), &l).unwrap();
        assert_eq!(b.bound, 1);
    }
}
