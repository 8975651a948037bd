//! Finite groups as Cayley tables.
//!
//! Canonical generators per family:
//!
//! | family | generators |
//! |---|---|
//! | `cyclic(n)` | `g` |
//! | `dihedral(n)` (order `2n`) | rotation `r`, reflection `s` |
//! | `symmetric(n)` | transposition `(0 1)`, cycle `(0 1 ... n-1)` |
//! | `quaternion8` | `i`, `j` |
//! | `direct_product(G, H)` | generators of `G`, then of `H` |
//! | `from_cayley_table` | greedy: each element not yet generated, in index order |

use std::collections::VecDeque;

use serde::Serialize;

use crate::zmod::is_prime;
use crate::{Error, Result};

/// Largest group order accepted.
pub const MAX_ORDER: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    /// Shortest word in the generators (as generator positions) per element.
    words: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl FiniteGroup {
    fn assemble(name: String, table: Vec<Vec<usize>>, generators: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::GroupAxiom("no identity element".into()))?;
        let inverse = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| Error::GroupAxiom(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[identity] = Some(Vec::new());
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for (gi, &g) in generators.iter().enumerate() {
                let y = table[x][g];
                if words[y].is_none() {
                    let mut w = words[x].clone().expect("visited");
                    w.push(gi);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        let words = words
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::GroupAxiom("generators do not generate the group".into()))?;
        Ok(FiniteGroup { name, table, identity, inverse, generators, words, labels })
    }

    fn check_order(n: usize) -> Result<()> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::InvalidParameter(format!("group order must lie in 1..={MAX_ORDER}")));
        }
        Ok(())
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::check_order(n)?;
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|k| if k == 0 { "e".into() } else { format!("g^{k}") }).collect();
        let gens = if n == 1 { vec![] } else { vec![1] };
        Self::assemble(format!("C{n}"), table, gens, labels)
    }

    /// Symmetries of the regular `n`-gon, of order `2n`; element `k + n e` is
    /// `r^k s^e`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dihedral group needs n >= 1".into()));
        }
        Self::check_order(2 * n)?;
        let table = (0..2 * n)
            .map(|x| {
                let (a, e) = (x % n, x / n);
                (0..2 * n)
                    .map(|y| {
                        let (b, f) = (y % n, y / n);
                        let k = if e == 0 { (a + b) % n } else { (a + n - b) % n };
                        k + n * ((e + f) % 2)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..2 * n)
            .map(|x| {
                let (k, e) = (x % n, x / n);
                match (k, e) {
                    (0, 0) => "e".into(),
                    (k, 0) => format!("r^{k}"),
                    (0, _) => "s".into(),
                    (k, _) => format!("r^{k}s"),
                }
            })
            .collect();
        let gens = if n == 1 { vec![1] } else { vec![1, n] };
        Self::assemble(format!("D{n}"), table, gens, labels)
    }

    /// Permutations of `0..n` in lexicographic order, composed as
    /// `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if !(1..=5).contains(&n) {
            return Err(Error::InvalidParameter("symmetric groups are supported for n <= 5".into()));
        }
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..n).collect(), 0, &mut perms);
        perms.sort();
        let index = |p: &Vec<usize>| perms.binary_search(p).expect("permutation");
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| index(&(0..n).map(|i| s[t[i]]).collect())).collect())
            .collect();
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(index(&swap));
        }
        if n >= 3 {
            gens.push(index(&(0..n).map(|i| (i + 1) % n).collect()));
        }
        let labels = perms.iter().map(|p| format!("{p:?}")).collect();
        Self::assemble(format!("S{n}"), table, gens, labels)
    }

    /// Elements in the order `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion8() -> Result<Self> {
        // unit products on {1, i, j, k} as (unit, negated)
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, neg) = UNIT[x / 2][y / 2];
                        let sign = (x % 2) ^ (y % 2) ^ (neg as usize);
                        2 * u + sign
                    })
                    .collect()
            })
            .collect();
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
        Self::assemble("Q8".into(), table, vec![2, 4], labels)
    }

    /// `G × H`; element `(g, h)` has index `g |H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let (ng, nh) = (g.order(), h.order());
        Self::check_order(ng * nh)?;
        let table = (0..ng * nh)
            .map(|x| {
                (0..ng * nh)
                    .map(|y| g.table[x / nh][y / nh] * nh + h.table[x % nh][y % nh])
                    .collect()
            })
            .collect();
        let mut gens: Vec<usize> = g.generators.iter().map(|&a| a * nh + h.identity).collect();
        gens.extend(h.generators.iter().map(|&b| g.identity * nh + b));
        let labels = (0..ng * nh).map(|x| format!("({}, {})", g.labels[x / nh], h.labels[x % nh])).collect();
        Self::assemble(format!("{}x{}", g.name, h.name), table, gens, labels)
    }

    /// Validates a raw multiplication table: Latin square, identity, and
    /// associativity (exhaustive up to order 256, on a deterministic sample
    /// of triples beyond).
    pub fn from_cayley_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        Self::check_order(n)?;
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::GroupAxiom("table must be square with entries below its size".into()));
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                row_seen[table[i][j]] = true;
                col_seen[table[j][i]] = true;
            }
            if row_seen.contains(&false) || col_seen.contains(&false) {
                return Err(Error::GroupAxiom(format!("row or column {i} is not a permutation")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::GroupAxiom(format!("not associative on ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        } else {
            let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % n as u64) as usize
            };
            for _ in 0..2_000_000 {
                let (a, b, c) = (next(), next(), next());
                if !assoc(a, b, c) {
                    return Err(Error::GroupAxiom(format!("not associative on ({a}, {b}, {c})")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x))
            .ok_or_else(|| Error::GroupAxiom("no identity element".into()))?;
        let mut gens = Vec::new();
        let mut generated = vec![false; n];
        generated[identity] = true;
        for x in 0..n {
            if !generated[x] {
                gens.push(x);
                generated = closure(&table, identity, &gens);
            }
        }
        let labels = (0..n).map(|x| x.to_string()).collect();
        Self::assemble(format!("G{n}"), table, gens, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Shortest word for `a`, as positions in [`FiniteGroup::generators`].
    pub fn word(&self, a: usize) -> &[usize] {
        &self.words[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn cayley_table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// `(r, s)` with `|G| = p^r s` and `p ∤ s`.
    pub fn p_part(&self, p: u64) -> Result<(u32, u64)> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut s = self.order() as u64;
        let mut r = 0;
        while s.is_multiple_of(p) {
            s /= p;
            r += 1;
        }
        Ok((r, s))
    }

    /// Members of the commutator subgroup, as a membership mask.
    pub fn commutator_subgroup(&self) -> Vec<bool> {
        let n = self.order();
        let mut comms: Vec<usize> = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(a, b), self.mul(self.inverse(a), self.inverse(b)));
                if !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        closure(&self.table, self.identity, &comms)
    }

    /// Invariant factors `d_1 | d_2 | ...` of `G / [G, G]` (empty when
    /// trivial).
    pub fn abelianization(&self) -> Vec<u64> {
        let comm = self.commutator_subgroup();
        let n = self.order();
        let k = comm.iter().filter(|&&b| b).count();
        let q_order = (n / k) as u64;
        // order of each coset gN, counted once per coset
        let coset_order = |a: usize| {
            let mut x = a;
            let mut e = 1u64;
            while !comm[x] {
                x = self.mul(x, a);
                e += 1;
            }
            e
        };
        let orders: Vec<u64> = (0..n).map(coset_order).collect();
        let mut factors_by_prime: Vec<Vec<u64>> = Vec::new();
        for q in prime_factors(q_order) {
            // |Q[q^j]| for j = 0, 1, ...
            let mut counts = vec![1u64];
            let mut j = 1;
            loop {
                let qj = q.pow(j);
                let c = orders.iter().filter(|&&o| qj % o == 0).count() as u64 / k as u64;
                counts.push(c);
                if c == *counts.iter().rev().nth(1).unwrap() {
                    counts.pop();
                    break;
                }
                j += 1;
            }
            // number of cyclic factors of order at least q^j
            let at_least: Vec<u32> = counts.windows(2).map(|w| ilog(q, w[1] / w[0])).collect();
            let mut exps: Vec<u32> = Vec::new();
            for (j, &cnt) in at_least.iter().enumerate() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..(cnt - next) {
                    exps.push(j as u32 + 1);
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            factors_by_prime.push(exps.iter().map(|&e| q.pow(e)).collect());
        }
        let len = factors_by_prime.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut out: Vec<u64> = (0..len)
            .map(|i| factors_by_prime.iter().map(|f| f.get(i).copied().unwrap_or(1)).product())
            .collect();
        out.sort_unstable();
        out
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

fn closure(table: &[Vec<usize>], identity: usize, gens: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; table.len()];
    seen[identity] = true;
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = table[x][g];
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn ilog(q: u64, mut x: u64) -> u32 {
    let mut e = 0;
    while x > 1 {
        x /= q;
        e += 1;
    }
    e
}

/// A multiplicative target for homomorphisms out of a finite group.
pub trait Monoid {
    type Elem: Clone + PartialEq;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

impl Monoid for FiniteGroup {
    type Elem = usize;
    fn identity(&self) -> usize {
        self.identity
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.table[*a][*b]
    }
}

/// Result of extending generator images along the word table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HomCheck<E> {
    /// Image of every element, indexed like the group.
    Hom(Vec<E>),
    /// `f(ab) != f(a) f(b)` for this pair.
    NotHom { a: usize, b: usize },
}

impl<E> HomCheck<E> {
    pub fn is_hom(&self) -> bool {
        matches!(self, HomCheck::Hom(_))
    }
}

/// Extends `images` of the generators to all of `G` and verifies
/// multiplicativity on every pair.
pub fn extend_and_verify_hom<M: Monoid>(g: &FiniteGroup, target: &M, images: &[M::Elem]) -> Result<HomCheck<M::Elem>> {
    if images.len() != g.generators.len() {
        return Err(Error::InvalidParameter(format!(
            "{} generator images given, {} generators",
            images.len(),
            g.generators.len()
        )));
    }
    let all: Vec<M::Elem> = (0..g.order())
        .map(|x| g.word(x).iter().fold(target.identity(), |acc, &gi| target.mul(&acc, &images[gi])))
        .collect();
    Ok(verify_all_pairs(g, target, all))
}

/// All-pairs multiplicativity check of a total element map.
pub fn verify_all_pairs<M: Monoid>(g: &FiniteGroup, target: &M, all: Vec<M::Elem>) -> HomCheck<M::Elem> {
    let n = g.order();
    for a in 0..n {
        for b in 0..n {
            if all[g.mul(a, b)] != target.mul(&all[a], &all[b]) {
                return HomCheck::NotHom { a, b };
            }
        }
    }
    HomCheck::Hom(all)
}
