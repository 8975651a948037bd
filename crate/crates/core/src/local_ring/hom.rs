use rayon::prelude::*;

use crate::{Error, Limits, Result};

use super::{FiniteLocalRing, RingElement};

/// An additive map `R → S` given by the images of the additive basis of `R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdditiveMap {
    pub images: Vec<RingElement>,
}

impl AdditiveMap {
    /// Checks that every image is killed by the additive order of its basis
    /// element, so the map is well defined.
    pub fn new(source: &FiniteLocalRing, target: &FiniteLocalRing, images: Vec<RingElement>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::InvalidParameter(format!(
                "additive map needs {} images, got {}",
                source.rank(),
                images.len()
            )));
        }
        for (img, &k) in images.iter().zip(source.orders()) {
            let killed = target.scale_coords(&img.coords, source.z.p.pow(k));
            if !FiniteLocalRing::is_zero_coords(&killed) {
                return Err(Error::NotHomomorphism(format!(
                    "image {} is not killed by p^{k}",
                    target.render(img)
                )));
            }
        }
        Ok(AdditiveMap { images })
    }

    pub fn zero(source: &FiniteLocalRing, target: &FiniteLocalRing) -> Self {
        AdditiveMap { images: vec![target.zero(); source.rank()] }
    }

    pub fn identity(ring: &FiniteLocalRing) -> Self {
        AdditiveMap { images: (0..ring.rank()).map(|i| ring.full(ring.unit_vector(i))).collect() }
    }

    pub fn apply(&self, target: &FiniteLocalRing, x: &RingElement) -> RingElement {
        let mut acc = vec![0u64; target.rank()];
        for (&c, img) in x.coords.iter().zip(&self.images) {
            if c != 0 {
                acc = target.add_coords(&acc, &target.scale_coords(&img.coords, c));
            }
        }
        target.full(acc)
    }

    pub fn add(&self, target: &FiniteLocalRing, other: &AdditiveMap) -> AdditiveMap {
        AdditiveMap { images: self.images.iter().zip(&other.images).map(|(a, b)| target.add(a, b)).collect() }
    }

    pub fn sub(&self, target: &FiniteLocalRing, other: &AdditiveMap) -> AdditiveMap {
        AdditiveMap { images: self.images.iter().zip(&other.images).map(|(a, b)| target.sub(a, b)).collect() }
    }

    /// Whether the map is a unital base-algebra homomorphism, checked on all
    /// pairs of basis elements.
    pub fn is_ring_hom(&self, source: &FiniteLocalRing, target: &FiniteLocalRing) -> bool {
        self.first_violation(source, target).is_none()
    }

    pub(crate) fn first_violation(&self, source: &FiniteLocalRing, target: &FiniteLocalRing) -> Option<String> {
        if !compatible_bases(source, target) {
            return Some("source and target have different residue fields".into());
        }
        for (img, &k) in self.images.iter().zip(source.orders()) {
            if !target.is_zero(&target.scale(img, source.z.p.pow(k) as i64)) {
                return Some("not additive".into());
            }
        }
        if self.apply(target, &source.one()) != target.one() {
            return Some("1 is not sent to 1".into());
        }
        if self.apply(target, &source.base_generator()) != target.base_generator() {
            return Some("not linear over the Galois ring".into());
        }
        let n = source.rank();
        for i in 0..n {
            for j in i..n {
                let lhs = self.apply(target, &source.full(source.basis_product(i, j)));
                let rhs = target.mul(&self.images[i], &self.images[j]);
                if lhs != rhs {
                    return Some(format!(
                        "f({} * {}) != f({}) * f({})",
                        source.basis_names[i], source.basis_names[j], source.basis_names[i], source.basis_names[j]
                    ));
                }
            }
        }
        None
    }
}

/// A base-algebra homomorphism, recorded both by the images of the
/// designated generators and as an additive map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingHom {
    pub generator_images: Vec<RingElement>,
    pub map: AdditiveMap,
}

impl RingHom {
    pub fn apply(&self, target: &FiniteLocalRing, x: &RingElement) -> RingElement {
        self.map.apply(target, x)
    }
}

fn compatible_bases(source: &FiniteLocalRing, target: &FiniteLocalRing) -> bool {
    let (a, b) = (&source.spec, &target.spec);
    if a.p != b.p || a.r != b.r {
        return false;
    }
    let q = a.p.pow(a.m.min(b.m));
    a.modulus.iter().zip(&b.modulus).all(|(x, y)| x % q == y % q)
}

/// Builds the candidate map determined by generator images and verifies it.
fn candidate(source: &FiniteLocalRing, target: &FiniteLocalRing, gen_images: &[RingElement]) -> Option<RingHom> {
    let words = source.words();
    let mut mults: Vec<&RingElement> = Vec::new();
    let y = target.base_generator();
    if source.spec.r > 1 {
        mults.push(&y);
    }
    mults.extend(gen_images.iter());
    let word_images: Vec<RingElement> = words
        .exponents
        .iter()
        .map(|e| {
            let mut acc = target.one();
            for (&k, m) in e.iter().zip(&mults) {
                if k > 0 {
                    acc = target.mul(&acc, &target.pow(m, k as u64));
                }
            }
            acc
        })
        .collect();
    let images: Vec<RingElement> = words
        .basis_exprs
        .iter()
        .map(|expr| {
            let mut acc = vec![0u64; target.rank()];
            for (&c, w) in expr.iter().zip(&word_images) {
                if c != 0 {
                    acc = target.add_coords(&acc, &target.scale_coords(&w.coords, c));
                }
            }
            target.full(acc)
        })
        .collect();
    let map = AdditiveMap { images };
    if map.first_violation(source, target).is_some() {
        return None;
    }
    for (g, img) in source.generators().iter().zip(gen_images) {
        if map.apply(target, g) != *img {
            return None;
        }
    }
    Some(RingHom { generator_images: gen_images.to_vec(), map })
}

/// The homomorphism sending the designated generators of `source` to
/// `images`, if there is one.
pub fn hom_from_generator_images(
    source: &FiniteLocalRing,
    target: &FiniteLocalRing,
    images: &[RingElement],
) -> Result<RingHom> {
    if images.len() != source.generators.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} generator images, got {}",
            source.generators.len(),
            images.len()
        )));
    }
    if !compatible_bases(source, target) {
        return Err(Error::NotHomomorphism("source and target have different residue fields".into()));
    }
    candidate(source, target, images)
        .ok_or_else(|| Error::NotHomomorphism("generator images do not extend to a ring map".into()))
}

/// All local base-algebra homomorphisms `source → target`, sorted by
/// generator images.
///
/// Each generator must go to an element with the same reduction, so the
/// candidates are `section(reduction) + m_S` per generator.
pub fn hom_enumerate(source: &FiniteLocalRing, target: &FiniteLocalRing, limits: &Limits) -> Result<Vec<RingHom>> {
    if !compatible_bases(source, target) {
        return Ok(Vec::new());
    }
    let m_s = target.maximal_ideal();
    let ng = source.generators.len() as u32;
    let fiber = m_s.cardinality();
    limits.check_maps("candidate homomorphisms", fiber.checked_pow(ng).unwrap_or(u128::MAX))?;
    let m_elems = m_s.elements(limits)?;
    let fibers: Vec<Vec<RingElement>> = source
        .generators()
        .iter()
        .map(|g| {
            let base = target.section(&source.reduce(g));
            let mut f: Vec<RingElement> = m_elems.iter().map(|x| target.add(&base, x)).collect();
            f.sort();
            f
        })
        .collect();
    let total = fiber.pow(ng) as usize;
    let mut homs: Vec<RingHom> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut choice = Vec::with_capacity(fibers.len());
            for f in fibers.iter().rev() {
                choice.push(f[idx % f.len()].clone());
                idx /= f.len();
            }
            choice.reverse();
            candidate(source, target, &choice)
        })
        .collect();
    homs.sort();
    Ok(homs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endomorphisms_of_z4() {
        let r = FiniteLocalRing::galois_ring(2, 2, 1).unwrap();
        let homs = hom_enumerate(&r, &r, &Limits::default()).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map, AdditiveMap::identity(&r));
    }

    #[test]
    fn endomorphisms_of_dual_numbers_over_z4() {
        let r = FiniteLocalRing::galois_ring(2, 2, 1).unwrap().dual_numbers().unwrap();
        let homs = hom_enumerate(&r, &r, &Limits::default()).unwrap();
        // Brute force: ε may go to any z in m with z^2 = 0.
        let m = r.maximal_ideal().elements(&Limits::default()).unwrap();
        let expected = m.iter().filter(|z| r.is_zero(&r.mul(z, z))).count();
        assert_eq!(homs.len(), expected);
        assert_eq!(expected, 8);
    }

    #[test]
    fn no_maps_from_characteristic_two_into_z4() {
        let f2 = FiniteLocalRing::galois_ring(2, 1, 1).unwrap().dual_numbers().unwrap();
        let z4 = FiniteLocalRing::galois_ring(2, 2, 1).unwrap();
        assert!(hom_enumerate(&f2, &z4, &Limits::default()).unwrap().is_empty());
        // The other direction has the maps ε ↦ 0 and ε ↦ ε.
        let z4e = z4.dual_numbers().unwrap();
        let f2e = f2;
        assert_eq!(hom_enumerate(&z4e, &f2e, &Limits::default()).unwrap().len(), 2);
    }

    #[test]
    fn frobenius_is_not_linear() {
        let f4 = FiniteLocalRing::galois_ring(2, 1, 2).unwrap();
        let y = f4.base_generator();
        let frob = AdditiveMap { images: vec![f4.one(), f4.mul(&y, &y)] };
        assert!(!frob.is_ring_hom(&f4, &f4));
        assert!(AdditiveMap::identity(&f4).is_ring_hom(&f4, &f4));
    }
}
