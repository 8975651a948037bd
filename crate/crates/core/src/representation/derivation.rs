//! Derivations into square-zero ideals and the homomorphisms they perturb.
//!
//! For `f : R → S` and `I ⊲ S` with `I² = 0`, an additive `g ≡ f mod I` is a
//! ring homomorphism exactly when `g - f` is a derivation along `f`.

use std::sync::Arc;

use crate::local_ring::{presentation_truncation, AdditiveMap, FiniteLocalRing, Ideal, Mode, RawRing, RingElement};
use crate::poly::IntPoly;
use crate::presented::IntegerPolynomialPresentation;
use crate::zmod::QuotientModule;
use crate::{Error, Limits, Result};

fn check_square_zero(target: &FiniteLocalRing, ideal: &Ideal) -> Result<()> {
    if !target.ideal_product(ideal, ideal).is_zero() {
        return Err(Error::Hypothesis("the ideal does not square to zero".into()));
    }
    Ok(())
}

/// Whether `d : R → I` is a base-linear derivation along `f`:
/// `d(xy) = f(x) d(y) + d(x) f(y)` on all basis pairs and `d(y) = 0` for the
/// residue generator `y`.
pub fn derivation_check(
    source: &FiniteLocalRing,
    target: &FiniteLocalRing,
    f: &AdditiveMap,
    ideal: &Ideal,
    d: &AdditiveMap,
) -> Result<bool> {
    check_square_zero(target, ideal)?;
    if d.images.iter().any(|x| !ideal.contains(x)) {
        return Err(Error::InvalidParameter("derivation values must lie in the ideal".into()));
    }
    if !target.is_zero(&d.apply(target, &source.one())) || !target.is_zero(&d.apply(target, &source.base_generator())) {
        return Ok(false);
    }
    let n = source.rank();
    for i in 0..n {
        for j in i..n {
            let lhs = d.apply(target, &source.full(source.basis_product(i, j)));
            let rhs = target.add(&target.mul(&f.images[i], &d.images[j]), &target.mul(&d.images[i], &f.images[j]));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(g is a homomorphism, g - f is a derivation)` for a verified
/// homomorphism `f` and an additive `g ≡ f mod I`.
pub fn hom_vs_derivation(
    source: &FiniteLocalRing,
    target: &FiniteLocalRing,
    f: &AdditiveMap,
    g: &AdditiveMap,
    ideal: &Ideal,
) -> Result<(bool, bool)> {
    if let Some(why) = f.first_violation(source, target) {
        return Err(Error::NotHomomorphism(why));
    }
    check_square_zero(target, ideal)?;
    let d = g.sub(target, f);
    if d.images.iter().any(|x| !ideal.contains(x)) {
        return Err(Error::Hypothesis("g is not congruent to f modulo the ideal".into()));
    }
    Ok((g.is_ring_hom(source, target), derivation_check(source, target, f, ideal, &d)?))
}

/// `S = R ⊕ M` with `M² = 0`, for `M = R^k / (relations)`.
#[derive(Debug, Clone)]
pub struct SquareZeroExtension {
    pub ring: Arc<FiniteLocalRing>,
    /// `R → S`, `x ↦ (x, 0)`.
    pub inclusion: AdditiveMap,
    /// `M` as an ideal of `S`.
    pub module_ideal: Ideal,
    /// Images in `S` of the standard generators of `R^k`.
    pub module_generators: Vec<RingElement>,
    base_rank: usize,
    module: QuotientModule,
}

impl SquareZeroExtension {
    /// The element of `S` represented by a vector in `R^k`.
    pub fn module_element(&self, v: &[RingElement]) -> RingElement {
        let ambient: Vec<u64> = v.iter().flat_map(|x| x.coords.iter().copied()).collect();
        let mut coords = vec![0u64; self.base_rank];
        coords.extend(self.module.project(&ambient));
        self.ring.full(coords)
    }

    /// Number of elements of `M`.
    pub fn module_cardinality(&self) -> u128 {
        self.module_ideal.cardinality()
    }
}

/// Builds `R ⊕ M` for the `R`-module `M` with `k` generators named `names`
/// and the given relation vectors in `R^k`.
pub fn square_zero_extension(
    base: &FiniteLocalRing,
    relations: &[Vec<RingElement>],
    names: &[&str],
) -> Result<SquareZeroExtension> {
    if base.mode() != Mode::ExactFinite {
        return Err(Error::Unsupported("square-zero extensions need an exact finite ring".into()));
    }
    let k = names.len();
    let nb = base.rank();
    if relations.iter().any(|rel| rel.len() != k || rel.iter().any(|x| x.coords.len() != nb)) {
        return Err(Error::InvalidParameter(format!("module relations must be vectors of {k} ring elements")));
    }
    let ambient_orders: Vec<u32> = (0..k).flat_map(|_| base.orders().iter().copied()).collect();
    let block_mul = |e: &[u64], v: &[u64]| -> Vec<u64> {
        v.chunks(nb).flat_map(|blk| base.mul_coords(e, blk)).collect()
    };
    let mut submodule: Vec<Vec<u64>> = Vec::new();
    for rel in relations {
        let flat: Vec<u64> = rel.iter().flat_map(|x| x.coords.iter().copied()).collect();
        for i in 0..nb {
            submodule.push(block_mul(&base.unit_vector(i), &flat));
        }
    }
    let module = QuotientModule::new(base.zpm(), &ambient_orders, &submodule);
    let t = module.orders.len();
    let n = nb + t;
    let lift = |v: &[u64], at: usize| {
        let mut out = vec![0u64; n];
        out[at..at + v.len()].copy_from_slice(v);
        out
    };
    let mut dense = vec![vec![vec![0u64; n]; n]; n];
    for i in 0..nb {
        for j in 0..nb {
            dense[i][j] = lift(&base.basis_product(i, j), 0);
        }
        for s in 0..t {
            let act = lift(&module.project(&block_mul(&base.unit_vector(i), &module.basis[s])), nb);
            dense[i][nb + s] = act.clone();
            dense[nb + s][i] = act;
        }
    }
    let mut orders = base.orders().to_vec();
    orders.extend(module.orders.iter().copied());
    let r = base.spec().r as usize;
    let y = base.base_generator();
    let base_powers: Vec<Vec<u64>> = (0..r).map(|j| lift(&base.pow(&y, j as u64).coords, 0)).collect();
    let mut reduction: Vec<Vec<u64>> = (0..nb).map(|i| base.reduce(&base.full(base.unit_vector(i)))).collect();
    reduction.extend(std::iter::repeat_n(vec![0u64; r], t));
    let std_gens: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            let mut v = vec![0u64; k * nb];
            v[j * nb..(j + 1) * nb].copy_from_slice(&base.one().coords);
            lift(&module.project(&v), nb)
        })
        .collect();
    let mut generators: Vec<Vec<u64>> = base.generators().iter().map(|g| lift(&g.coords, 0)).collect();
    generators.extend(std_gens.iter().cloned());
    let mut generator_names = base.generator_names().to_vec();
    generator_names.extend(names.iter().map(|s| s.to_string()));
    let mut basis_names = base.basis_names().to_vec();
    for b in &module.basis {
        let parts: Vec<String> = b
            .chunks(nb)
            .zip(names)
            .filter(|(blk, _)| blk.iter().any(|&c| c != 0))
            .map(|(blk, name)| {
                let x = base.full(blk.to_vec());
                if x == base.one() {
                    name.to_string()
                } else {
                    format!("({})*{name}", base.render(&x))
                }
            })
            .collect();
        basis_names.push(parts.join(" + "));
    }
    let ring = FiniteLocalRing::from_raw(RawRing {
        spec: base.spec().clone(),
        orders,
        dense,
        one: lift(&base.one().coords, 0),
        base_powers,
        reduction,
        generators,
        generator_names,
        basis_names,
        mode: Mode::ExactFinite,
    })
    .map_err(|e| Error::InvalidParameter(format!("inconsistent module table: {e}")))?;
    let inclusion = AdditiveMap { images: (0..nb).map(|i| ring.full(ring.unit_vector(i))).collect() };
    let module_basis: Vec<RingElement> = (nb..n).map(|i| ring.full(ring.unit_vector(i))).collect();
    let module_ideal = ring.ideal_span(&module_basis);
    let module_generators = std_gens.into_iter().map(|v| ring.full(v)).collect();
    Ok(SquareZeroExtension { ring: Arc::new(ring), inclusion, module_ideal, module_generators, base_rank: nb, module })
}

/// One member `x ↦ x + C d(x)` of a family of perturbed inclusions.
#[derive(Debug, Clone)]
pub struct HomFamilyMember {
    pub scalar: i64,
    pub map: AdditiveMap,
    pub is_hom: bool,
    pub is_derivation: bool,
}

/// The maps `x ↦ x + C d(x)` for each scalar `C`, each checked both as a
/// homomorphism and through its derivation part.
pub fn hom_family(
    base: &FiniteLocalRing,
    ext: &SquareZeroExtension,
    d: &AdditiveMap,
    scalars: &[i64],
) -> Result<Vec<HomFamilyMember>> {
    let s = &ext.ring;
    scalars
        .iter()
        .map(|&c| {
            let images = ext
                .inclusion
                .images
                .iter()
                .zip(&d.images)
                .map(|(x, dx)| s.add(x, &s.scale(dx, c)))
                .collect();
            let map = AdditiveMap { images };
            let (is_hom, is_derivation) = hom_vs_derivation(base, s, &ext.inclusion, &map, &ext.module_ideal)?;
            Ok(HomFamilyMember { scalar: c, map, is_hom, is_derivation })
        })
        .collect()
}

/// A truncated presented ring `R`, its module of differentials `Ω_R` as a
/// square-zero extension, and the universal derivation `d : R → Ω_R`.
#[derive(Debug, Clone)]
pub struct KahlerExtension {
    pub base: Arc<FiniteLocalRing>,
    pub extension: SquareZeroExtension,
    pub universal: AdditiveMap,
}

/// `Ω_R = ⊕ R dX_i / (df : f a relation)` for `R = Z[X]/(f) / p^m`.
pub fn kahler_extension(pres: &IntegerPolynomialPresentation, m: u32, limits: &Limits) -> Result<KahlerExtension> {
    let base = FiniteLocalRing::from_truncated_presentation(pres, m, limits)?;
    let t = pres.nvars();
    let names: Vec<String> = pres.vars.iter().map(|v| format!("d{v}")).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let relations = pres
        .relations
        .iter()
        .map(|f| (0..t).map(|i| base.eval_poly(&f.derivative(i))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let ext = square_zero_extension(&base, &relations, &name_refs)?;
    let s = &ext.ring;
    let standard = presentation_truncation(pres, m, limits)?;
    let images = standard
        .iter()
        .map(|(alpha, _)| {
            let mut acc = s.zero();
            for i in 0..t {
                let k = alpha.0[i];
                if k == 0 {
                    continue;
                }
                let mut lower = alpha.clone();
                lower.0[i] -= 1;
                let coeff = base.eval_poly(&IntPoly::monomial(lower, 1.into()))?;
                let term = s.mul(&ext.inclusion.apply(s, &coeff), &ext.module_generators[i]);
                acc = s.add(&acc, &s.scale(&term, k as i64));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let universal = AdditiveMap::new(&base, s, images)?;
    if !derivation_check(&base, s, &ext.inclusion, &ext.module_ideal, &universal)? {
        return Err(Error::Internal("universal derivation fails the Leibniz rule".into()));
    }
    Ok(KahlerExtension { base: Arc::new(base), extension: ext, universal })
}
