//! Ordered-monomial arithmetic in universal enveloping algebras.
//!
//! Elements are stored in normal form: linear combinations of monomials
//! x_1^{a_1} ... x_n^{a_n} with generators in fixed basis order. Products are
//! straightened with the rewriting rule x_j x_i = x_i x_j + [x_j, x_i]
//! (for j > i), recursively, with memoization shared through the context.

use crate::error::{Error, Result};
use crate::lie::LiePresentation;
use crate::scalar::{Ring, Scalar};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// Exponent vector of an ordered monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn generator(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded-lex: total degree first, then lexicographic on exponents.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// The ordered list of all monomials of total degree <= cap, used as the
/// column order for every dense computation downstream.
#[derive(Debug)]
pub struct MonomialBasis {
    pub dim: usize,
    pub cap: usize,
    pub monomials: Vec<Monomial>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(dim: usize, cap: usize, limit: usize) -> Result<Self> {
        let mut count = 1usize;
        // C(dim + cap, dim), computed incrementally with overflow checks
        let mut check = 1u128;
        for i in 1..=dim {
            check = check * (cap + i) as u128 / i as u128;
            if check > limit as u128 {
                return Err(Error::ResourceLimit(check as usize, limit));
            }
        }
        count = count.max(check as usize);
        let mut monomials = Vec::with_capacity(count);
        let mut cur = vec![0u32; dim];
        collect(&mut cur, 0, cap, &mut monomials);
        monomials.sort();
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.0.clone(), i))
            .collect();
        Ok(MonomialBasis { dim, cap, monomials, index })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(&m.0).copied()
    }

    /// Column indices of the monomials of exact total degree d.
    pub fn indices_of_degree(&self, d: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.monomials[i].degree() == d)
            .collect()
    }
}

fn collect(cur: &mut Vec<u32>, pos: usize, left: usize, out: &mut Vec<Monomial>) {
    if pos == cur.len() {
        out.push(Monomial(cur.clone()));
        return;
    }
    for e in 0..=left {
        cur[pos] = e as u32;
        collect(cur, pos + 1, left - e, out);
    }
    cur[pos] = 0;
}

type SparseTerms = Vec<(Vec<u32>, Scalar)>;

/// Shared context: coefficient ring, structure constants reduced into it,
/// and the straightening memo table.
pub struct UeaCtx {
    pub name: String,
    pub ring: Ring,
    pub dim: usize,
    /// table[i][j] = coordinates of [x_i, x_j] in the coefficient ring.
    table: Vec<Vec<Vec<Scalar>>>,
    memo: RwLock<HashMap<(Vec<u32>, usize), SparseTerms>>,
}

impl std::fmt::Debug for UeaCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UeaCtx({}, {}, dim {})", self.name, self.ring, self.dim)
    }
}

impl UeaCtx {
    pub fn from_presentation(pres: &LiePresentation, ring: Ring) -> Result<Arc<Self>> {
        let l = pres.dim();
        let mut table = vec![vec![Vec::new(); l]; l];
        for i in 0..l {
            for j in 0..l {
                let mut row = Vec::with_capacity(l);
                for q in pres.bracket(i, j) {
                    row.push(Scalar::from_rational(ring, q)?);
                }
                table[i][j] = row;
            }
        }
        Ok(Arc::new(UeaCtx {
            name: pres.name.clone(),
            ring,
            dim: l,
            table,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    /// Context from an already-reduced scalar table, e.g. the induced bracket
    /// of a cotangent Lie algebra.
    pub fn from_scalar_table(name: String, ring: Ring, table: Vec<Vec<Vec<Scalar>>>) -> Arc<Self> {
        let dim = table.len();
        Arc::new(UeaCtx { name, ring, dim, table, memo: RwLock::new(HashMap::new()) })
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i][j]
    }

    /// Normal form of m . x_j, as sparse terms.
    fn mono_right_gen(&self, m: &[u32], j: usize) -> SparseTerms {
        let key = (m.to_vec(), j);
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return hit.clone();
        }
        let result = match m.iter().rposition(|&e| e > 0) {
            Some(k) if k > j => {
                // m = m1 . x_k with k > j: straighten x_k x_j
                let mut m1 = m.to_vec();
                m1[k] -= 1;
                let mut acc: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
                for (n, c) in self.mono_right_gen(&m1, j) {
                    for (n2, c2) in self.mono_right_gen(&n, k) {
                        accumulate(&mut acc, n2, c.mul(&c2));
                    }
                }
                for (t, ct) in self.table[k][j].iter().enumerate() {
                    if ct.is_zero() {
                        continue;
                    }
                    for (n2, c2) in self.mono_right_gen(&m1, t) {
                        accumulate(&mut acc, n2, ct.mul(&c2));
                    }
                }
                acc.into_iter().collect()
            }
            _ => {
                let mut out = m.to_vec();
                out[j] += 1;
                vec![(out, Scalar::one(self.ring))]
            }
        };
        self.memo
            .write()
            .unwrap()
            .insert(key, result.clone());
        result
    }
}

fn accumulate(acc: &mut BTreeMap<Vec<u32>, Scalar>, key: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&c);
            if s.is_zero() {
                e.remove();
            } else {
                e.insert(s);
            }
        }
    }
}

/// An element of the enveloping algebra, in PBW normal form.
#[derive(Clone, Debug)]
pub struct Uea {
    pub ctx: Arc<UeaCtx>,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Uea {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Uea {
    pub fn zero(ctx: &Arc<UeaCtx>) -> Self {
        Uea { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<UeaCtx>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::one(ctx.dim), Scalar::one(ctx.ring));
        Uea { ctx: ctx.clone(), terms }
    }

    pub fn generator(ctx: &Arc<UeaCtx>, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::generator(ctx.dim, i), Scalar::one(ctx.ring));
        Uea { ctx: ctx.clone(), terms }
    }

    pub fn monomial(ctx: &Arc<UeaCtx>, m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Uea { ctx: ctx.clone(), terms }
    }

    /// Degree-one element with the given F_p coordinate vector.
    pub fn from_lin(ctx: &Arc<UeaCtx>, v: &[u64]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, &c) in v.iter().enumerate() {
            let s = Scalar::from_u64(ctx.ring, c);
            if !s.is_zero() {
                terms.insert(Monomial::generator(ctx.dim, i), s);
            }
        }
        Uea { ctx: ctx.clone(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    fn check_ctx(&self, other: &Uea) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx),
            "elements from different contexts"
        );
    }

    pub fn add(&self, other: &Uea) -> Uea {
        self.check_ctx(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Uea) -> Uea {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Uea {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.neg()))
            .collect();
        Uea { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, c: &Scalar) -> Uea {
        if c.is_zero() {
            return Uea::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, x)| {
                let y = x.mul(c);
                if y.is_zero() {
                    None
                } else {
                    Some((m.clone(), y))
                }
            })
            .collect();
        Uea { ctx: self.ctx.clone(), terms }
    }

    /// self . x_j
    pub fn mul_gen(&self, j: usize) -> Uea {
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (n, c2) in self.ctx.mono_right_gen(&m.0, j) {
                add_term(&mut terms, Monomial(n), c.mul(&c2));
            }
        }
        Uea { ctx: self.ctx.clone(), terms }
    }

    pub fn mul(&self, other: &Uea) -> Uea {
        self.check_ctx(other);
        let mut out = Uea::zero(&self.ctx);
        for (m, c) in &other.terms {
            let mut part = self.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    part = part.mul_gen(i);
                }
            }
            out = out.add(&part.scale(c));
        }
        out
    }

    pub fn pow(&self, e: u64) -> Uea {
        let mut out = Uea::one(&self.ctx);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn commutator(&self, other: &Uea) -> Uea {
        self.mul(other).sub(&other.mul(self))
    }

    /// The counit: coefficient of the empty monomial.
    pub fn counit(&self) -> Scalar {
        self.terms
            .get(&Monomial::one(self.ctx.dim))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ctx.ring))
    }

    /// Dense coordinate vector over the monomial basis; the coefficient ring
    /// must be modular. Errors if a term exceeds the basis cap.
    pub fn vectorize(&self, basis: &MonomialBasis) -> Result<Vec<u64>> {
        let mut v = vec![0u64; basis.len()];
        for (m, c) in &self.terms {
            let idx = basis
                .index_of(m)
                .ok_or(Error::DegreeOverflow(m.degree(), basis.cap))?;
            v[idx] = c.residue().expect("modular ring");
        }
        Ok(v)
    }

    pub fn from_vector(ctx: &Arc<UeaCtx>, basis: &MonomialBasis, v: &[u64]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, &c) in v.iter().enumerate() {
            let s = Scalar::from_u64(ctx.ring, c);
            if !s.is_zero() {
                terms.insert(basis.monomials[i].clone(), s);
            }
        }
        Uea { ctx: ctx.clone(), terms }
    }

    /// Applies the algebra endomorphism determined by generator images.
    /// Images must live in the same context.
    pub fn apply_hom(&self, images: &[Uea]) -> Uea {
        let mut out = Uea::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut part = Uea::one(&self.ctx);
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    part = part.mul(&images[i]);
                }
            }
            out = out.add(&part.scale(c));
        }
        out
    }

    /// Rebuilds the element in another context through a coefficient map.
    pub fn convert(
        &self,
        ctx: &Arc<UeaCtx>,
        f: impl Fn(&Scalar) -> Result<Scalar>,
    ) -> Result<Uea> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let c2 = f(c)?;
            if !c2.is_zero() {
                terms.insert(m.clone(), c2);
            }
        }
        Ok(Uea { ctx: ctx.clone(), terms })
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&c);
            if s.is_zero() {
                e.remove();
            } else {
                e.insert(s);
            }
        }
    }
}

/// Checks that generator images define a Lie homomorphism into the algebra:
/// images[i] images[j] - images[j] images[i] must equal the image of
/// [x_i, x_j]. Returns the first failing pair.
pub fn hom_witness(ctx: &Arc<UeaCtx>, images: &[Uea]) -> Option<(usize, usize)> {
    for i in 0..ctx.dim {
        for j in (i + 1)..ctx.dim {
            let lhs = images[i].commutator(&images[j]);
            let mut rhs = Uea::zero(ctx);
            for (t, c) in ctx.bracket(i, j).iter().enumerate() {
                rhs = rhs.add(&images[t].scale(c));
            }
            if !lhs.sub(&rhs).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}
