use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::group::{extend_and_verify_hom, HomCheck};
use crate::local_ring::{FiniteLocalRing, RingElement};
use crate::{Error, Limits, Result};

use super::{check_residue_field, is_field, Lift, Matrix, MatrixMonoid, Representation};

fn power_count(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Digits of `idx` in base `radix`, most significant first.
fn digits(mut idx: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % radix;
        idx /= radix;
    }
    out
}

fn perturbation(ring: &FiniteLocalRing, n: usize, m: &[RingElement], idx: usize) -> Matrix {
    let entries = digits(idx, m.len(), n * n).into_iter().map(|d| m[d].clone()).collect();
    Matrix::from_entries(ring, n, entries).expect("n*n entries")
}

/// The kernel of `GL_n(R) → GL_n(k)`: all `I_n + M` with `M ∈ M_n(m_R)`,
/// in canonical order.
pub fn kernel_group(ring: &FiniteLocalRing, n: usize, limits: &Limits) -> Result<Vec<Matrix>> {
    let m = ring.maximal_ideal().elements(limits)?;
    let count = power_count(m.len(), n * n);
    limits.check_elements("kernel group matrices", count)?;
    let id = Matrix::identity(ring, n);
    let mut out: Vec<Matrix> = (0..count as usize)
        .into_par_iter()
        .map(|idx| id.add(ring, &perturbation(ring, n, &m, idx)))
        .collect();
    out.sort();
    Ok(out)
}

/// All lifts of `residual` to `ring`, in canonical order.
///
/// Each generator ranges over its fiber `section(ρ̄(g)) + M_n(m_R)`,
/// pre-filtered by `X^{ord(g)} = I`; every surviving tuple is extended along
/// words and verified on all pairs of group elements.
pub fn enumerate_lifts(residual: &Representation, ring: Arc<FiniteLocalRing>, limits: &Limits) -> Result<Vec<Lift>> {
    check_residue_field(residual.ring(), &ring)?;
    let group = residual.group().clone();
    let n = residual.dim();
    let m = ring.maximal_ideal().elements(limits)?;
    let fiber_size = power_count(m.len(), n * n);
    limits.check_elements("lift fiber", fiber_size)?;
    let gens = group.generators().to_vec();
    limits.check_maps("lift candidates", fiber_size.checked_pow(gens.len() as u32).unwrap_or(u128::MAX))?;
    let id = Matrix::identity(&ring, n);
    let fibers: Vec<Vec<Matrix>> = gens
        .iter()
        .map(|&g| {
            let base = Matrix::section(residual.matrix(g), &ring);
            let ord = group.element_order(g);
            (0..fiber_size as usize)
                .into_par_iter()
                .filter_map(|idx| {
                    let x = base.add(&ring, &perturbation(&ring, n, &m, idx));
                    x.pow(&ring, ord).eq_at(&ring, &id).then_some(x)
                })
                .collect()
        })
        .collect();
    let total: usize = fibers.iter().map(|f| f.len()).product();
    let monoid = MatrixMonoid { ring: &ring, n };
    let found: Vec<Vec<Matrix>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rest = idx;
            let mut images = vec![id.clone(); fibers.len()];
            for (slot, fiber) in images.iter_mut().zip(&fibers).rev() {
                *slot = fiber[rest % fiber.len()].clone();
                rest /= fiber.len();
            }
            match extend_and_verify_hom(&group, &monoid, &images) {
                Ok(HomCheck::Hom(all)) => Some(all),
                _ => None,
            }
        })
        .collect();
    let mut lifts: Vec<Lift> = found
        .into_iter()
        .map(|all| Lift::from_verified(Representation::from_verified(group.clone(), ring.clone(), n, all)))
        .collect();
    lifts.sort_by_cached_key(|l| l.key());
    Ok(lifts)
}

/// Strict-equivalence classes of lifts.
#[derive(Debug, Clone)]
pub struct DefSet {
    /// Lexicographically least member of each class, in canonical order.
    pub representatives: Vec<Lift>,
    pub orbit_sizes: Vec<usize>,
    pub lift_count: usize,
    pub class_count: usize,
    /// Order of the conjugating group `I_n + M_n(m_R)`.
    pub kernel_order: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefSetReport {
    pub dimension: usize,
    pub ring: String,
    pub lift_count: usize,
    pub class_count: usize,
    pub kernel_order: usize,
    pub orbit_sizes: Vec<usize>,
    /// Generator images of each representative.
    pub representatives: Vec<Value>,
}

impl DefSet {
    pub fn report(&self) -> DefSetReport {
        let (dimension, ring) = match self.representatives.first() {
            Some(l) => (l.rep().dim(), l.rep().ring().to_string()),
            None => (0, String::new()),
        };
        DefSetReport {
            dimension,
            ring,
            lift_count: self.lift_count,
            class_count: self.class_count,
            kernel_order: self.kernel_order,
            orbit_sizes: self.orbit_sizes.clone(),
            representatives: self.representatives.iter().map(|l| l.rep().to_json()).collect(),
        }
    }
}

/// Orbits of the lifts of `residual` to `ring` under conjugation by the
/// kernel group.
pub fn def_set(residual: &Representation, ring: Arc<FiniteLocalRing>, limits: &Limits) -> Result<DefSet> {
    let lifts = enumerate_lifts(residual, ring.clone(), limits)?;
    let n = residual.dim();
    let kernel = kernel_group(&ring, n, limits)?;
    let keys: Vec<Vec<Matrix>> = lifts.iter().map(|l| l.key()).collect();
    let canonical: Vec<Vec<Matrix>> = if n == 1 {
        keys.clone()
    } else {
        let inverses = kernel.iter().map(|k| k.inverse(&ring)).collect::<Result<Vec<_>>>()?;
        keys.par_iter()
            .map(|key| {
                kernel
                    .iter()
                    .zip(&inverses)
                    .map(|(k, ki)| key.iter().map(|x| k.mul(&ring, x).mul(&ring, ki)).collect::<Vec<_>>())
                    .min()
                    .expect("kernel group contains I")
            })
            .collect()
    };
    let mut classes: BTreeMap<Vec<Matrix>, usize> = BTreeMap::new();
    for c in canonical {
        *classes.entry(c).or_default() += 1;
    }
    let mut representatives = Vec::with_capacity(classes.len());
    let mut orbit_sizes = Vec::with_capacity(classes.len());
    for (key, size) in classes {
        let idx = keys.binary_search(&key).map_err(|_| Error::Internal("orbit minimum is not a lift".into()))?;
        representatives.push(lifts[idx].clone());
        orbit_sizes.push(size);
    }
    Ok(DefSet {
        class_count: representatives.len(),
        lift_count: lifts.len(),
        kernel_order: kernel.len(),
        representatives,
        orbit_sizes,
    })
}

/// Deformations to the dual numbers `k[ε]`.
#[derive(Debug, Clone)]
pub struct TangentSpace {
    pub def: DefSet,
    pub q: u64,
    /// `log_q` of the class count.
    pub dimension: u32,
}

pub fn tangent_space(residual: &Representation, limits: &Limits) -> Result<TangentSpace> {
    let field = residual.ring();
    if !is_field(field) {
        return Err(Error::InvalidParameter("tangent space needs a residual representation over a field".into()));
    }
    let dual = Arc::new(field.dual_numbers()?);
    let def = def_set(residual, dual, limits)?;
    let q = field.spec().q();
    let mut count = def.class_count as u64;
    let mut dimension = 0;
    while count.is_multiple_of(q) && count > 1 {
        count /= q;
        dimension += 1;
    }
    if count != 1 {
        return Err(Error::Internal(format!("{} classes over k[ε] is not a power of {q}", def.class_count)));
    }
    Ok(TangentSpace { def, q, dimension })
}

/// A `K ≡ I mod m_R` with `ρ₁ = K ρ₂ K⁻¹`, the first in canonical order, or
/// `None` when no such matrix exists.
pub fn are_strictly_equivalent(rho1: &Representation, rho2: &Representation, limits: &Limits) -> Result<Option<Matrix>> {
    if rho1.dim() != rho2.dim() || rho1.group().cayley_table() != rho2.group().cayley_table() {
        return Err(Error::InvalidParameter("representations have different groups or dimensions".into()));
    }
    let ring = rho1.ring();
    if ring.spec() != rho2.ring().spec() || ring.orders() != rho2.ring().orders() {
        return Err(Error::InvalidParameter("representations are over different rings".into()));
    }
    let gens = rho1.group().generators();
    let reductions_agree = gens.iter().all(|&g| {
        let (a, b) = (rho1.matrix(g), rho2.matrix(g));
        a.entries().iter().zip(b.entries()).all(|(x, y)| ring.reduce(x) == ring.reduce(y))
    });
    if !reductions_agree {
        return Ok(None);
    }
    let kernel = kernel_group(ring, rho1.dim(), limits)?;
    Ok(kernel
        .into_par_iter()
        .find_first(|k| {
            gens.iter().all(|&g| k.mul(ring, rho2.matrix(g)).eq_at(ring, &rho1.matrix(g).mul(ring, k)))
        }))
}
