//! The commutative side: symmetric algebra of the Lie algebra basis,
//! Kirillov-Kostant bracket, invariant subspaces, symmetrization into the
//! enveloping algebra, principal symbols, and a bounded-degree regular
//! sequence probe.

use crate::error::{Error, Result};
use crate::linalg::nullspace_field;
use crate::pbw::{Monomial, MonomialBasis, Uea, UeaCtx};
use crate::scalar::{Ring, Scalar};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Sparse commutative polynomial in the basis symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct SymElement {
    pub ring: Ring,
    pub dim: usize,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl SymElement {
    pub fn zero(ring: Ring, dim: usize) -> Self {
        SymElement { ring, dim, terms: BTreeMap::new() }
    }

    pub fn one(ring: Ring, dim: usize) -> Self {
        let mut s = Self::zero(ring, dim);
        s.add_term(Monomial::one(dim), Scalar::one(ring));
        s
    }

    pub fn variable(ring: Ring, dim: usize, i: usize) -> Self {
        let mut s = Self::zero(ring, dim);
        s.add_term(Monomial::generator(dim, i), Scalar::one(ring));
        s
    }

    /// Linear combination of the variables.
    pub fn from_lin(ring: Ring, v: &[u64]) -> Self {
        let dim = v.len();
        let mut s = Self::zero(ring, dim);
        for (i, &c) in v.iter().enumerate() {
            s.add_term(Monomial::generator(dim, i), Scalar::from_u64(ring, c));
        }
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add(&self, other: &SymElement) -> SymElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymElement) -> SymElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymElement {
        SymElement {
            ring: self.ring,
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> SymElement {
        let mut out = Self::zero(self.ring, self.dim);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &SymElement) -> SymElement {
        let mut out = Self::zero(self.ring, self.dim);
        for (m, c) in &self.terms {
            for (n, c2) in &other.terms {
                let prod: Vec<u32> = m.0.iter().zip(&n.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(prod), c.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> SymElement {
        let mut out = Self::one(self.ring, self.dim);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable i.
    pub fn partial(&self, i: usize) -> SymElement {
        let mut out = Self::zero(self.ring, self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut n = m.0.clone();
            n[i] -= 1;
            out.add_term(Monomial(n), c.mul(&Scalar::from_u64(self.ring, e as u64)));
        }
        out
    }

    /// Dense scalar coefficient vector over the given monomial columns.
    pub fn coeff_vector(&self, columns: &[Monomial]) -> Vec<Scalar> {
        columns
            .iter()
            .map(|m| {
                self.terms
                    .get(m)
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(self.ring))
            })
            .collect()
    }

    pub fn convert(&self, ring: Ring, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<SymElement> {
        let mut out = Self::zero(ring, self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Reduction of a rational polynomial into a modular ring.
    pub fn reduce_mod(&self, ring: Ring) -> Result<SymElement> {
        self.convert(ring, |c| match c {
            Scalar::Rational(q) => Scalar::from_rational(ring, q),
            _ => Err(Error::RingMismatch(c.ring().to_string(), "Q".into())),
        })
    }
}

/// All monomials of exact total degree d, in the global graded-lex order.
pub fn monomials_of_degree(dim: usize, d: usize) -> Vec<Monomial> {
    let basis = MonomialBasis::new(dim, d, usize::MAX).expect("no limit");
    basis
        .indices_of_degree(d)
        .into_iter()
        .map(|i| basis.monomials[i].clone())
        .collect()
}

/// Kirillov-Kostant bracket: the biderivation extending
/// {x_i, x_j} = [x_i, x_j]. The structure constants come from the context.
pub fn kk_bracket(ctx: &UeaCtx, a: &SymElement, b: &SymElement) -> SymElement {
    let mut out = SymElement::zero(a.ring, a.dim);
    for i in 0..ctx.dim {
        let da = a.partial(i);
        if da.is_zero() {
            continue;
        }
        for j in 0..ctx.dim {
            if i == j {
                continue;
            }
            let db = b.partial(j);
            if db.is_zero() {
                continue;
            }
            let mut cij = SymElement::zero(a.ring, a.dim);
            for (k, c) in ctx.bracket(i, j).iter().enumerate() {
                cij.add_term(Monomial::generator(a.dim, k), c.clone());
            }
            out = out.add(&da.mul(&db).mul(&cij));
        }
    }
    out
}

/// Echelon basis of the degree-d invariants: {s homogeneous of degree d :
/// {x_i, s} = 0 for all basis elements x_i}.
pub fn invariant_basis(ctx: &UeaCtx, d: usize) -> Vec<SymElement> {
    let ring = ctx.ring;
    let dim = ctx.dim;
    let cols = monomials_of_degree(dim, d);
    // unknowns: coefficients over `cols`; equations: every coefficient of
    // {x_i, candidate} vanishes, for every i
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let images: Vec<Vec<SymElement>> = (0..dim)
        .map(|i| {
            let xi = SymElement::variable(ring, dim, i);
            cols.iter()
                .map(|m| {
                    let mono = SymElement {
                        ring,
                        dim,
                        terms: [(m.clone(), Scalar::one(ring))].into_iter().collect(),
                    };
                    kk_bracket(ctx, &xi, &mono)
                })
                .collect()
        })
        .collect();
    for per_gen in &images {
        for t in &cols {
            let row: Vec<Scalar> = per_gen
                .iter()
                .map(|img| {
                    img.terms
                        .get(t)
                        .cloned()
                        .unwrap_or_else(|| Scalar::zero(ring))
                })
                .collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = nullspace_field(ring, &rows, cols.len());
    kernel
        .into_iter()
        .map(|v| {
            let mut s = SymElement::zero(ring, dim);
            for (m, c) in cols.iter().zip(v) {
                s.add_term(m.clone(), c);
            }
            s
        })
        .collect()
}

/// Symmetrization of a single monomial: the average over all orderings of
/// its letters, straightened. Direct enumeration path.
fn symmetrize_direct(ctx: &Arc<UeaCtx>, m: &[u32]) -> Uea {
    let k: u32 = m.iter().sum();
    if k == 0 {
        return Uea::one(ctx);
    }
    // sum over distinct words, each counted once; a word from a multiset with
    // multiplicities a_i stands for a_1! ... a_n! equal permutations
    fn walk(ctx: &Arc<UeaCtx>, left: &mut Vec<u32>, prefix: &Uea, acc: &mut Uea) {
        if left.iter().all(|&e| e == 0) {
            *acc = acc.add(prefix);
            return;
        }
        for i in 0..left.len() {
            if left[i] == 0 {
                continue;
            }
            left[i] -= 1;
            let next = prefix.mul_gen(i);
            walk(ctx, left, &next, acc);
            left[i] += 1;
        }
    }
    let mut acc = Uea::zero(ctx);
    let mut left = m.to_vec();
    // the walk visits each distinct word once; every word stands for
    // prod a_i! equal permutations, so the weight is prod a_i! / k!
    walk(ctx, &mut left, &Uea::one(ctx), &mut acc);
    let mut weight = Scalar::one(ctx.ring);
    for &a in m {
        for j in 2..=a as u64 {
            weight = weight.mul(&Scalar::from_u64(ctx.ring, j));
        }
    }
    let mut fact = Scalar::one(ctx.ring);
    for j in 2..=k as u64 {
        fact = fact.mul(&Scalar::from_u64(ctx.ring, j));
    }
    acc.scale(&weight.mul(&fact.inv().expect("degree < p checked by caller")))
}

/// Recursive average: beta(m) = (1/k) sum_i a_i x_i beta(m - e_i).
fn symmetrize_recursive(
    ctx: &Arc<UeaCtx>,
    m: &[u32],
    memo: &mut std::collections::HashMap<Vec<u32>, Uea>,
) -> Uea {
    let k: u64 = m.iter().map(|&e| e as u64).sum();
    if k == 0 {
        return Uea::one(ctx);
    }
    if let Some(hit) = memo.get(m) {
        return hit.clone();
    }
    let mut acc = Uea::zero(ctx);
    for i in 0..m.len() {
        if m[i] == 0 {
            continue;
        }
        let mut rest = m.to_vec();
        rest[i] -= 1;
        let tail = symmetrize_recursive(ctx, &rest, memo);
        let xi = Uea::generator(ctx, i);
        acc = acc.add(&xi.mul(&tail).scale(&Scalar::from_u64(ctx.ring, m[i] as u64)));
    }
    let inv = Scalar::from_u64(ctx.ring, k)
        .inv()
        .expect("degree < p checked by caller");
    let out = acc.scale(&inv);
    memo.insert(m.to_vec(), out.clone());
    out
}

/// The symmetrization map into the enveloping algebra. Over a modular ring
/// the degree must stay below p so that k! is invertible.
pub fn symmetrize(ctx: &Arc<UeaCtx>, s: &SymElement) -> Result<Uea> {
    if let Some(p) = ctx.ring.prime() {
        if s.degree() as u64 >= p {
            return Err(Error::Invertibility(s.degree(), p));
        }
    }
    let mut memo = std::collections::HashMap::new();
    let mut out = Uea::zero(ctx);
    for (m, c) in &s.terms {
        let beta = if m.degree() <= 8 {
            symmetrize_direct(ctx, &m.0)
        } else {
            symmetrize_recursive(ctx, &m.0, &mut memo)
        };
        out = out.add(&beta.scale(c));
    }
    Ok(out)
}

/// Top-degree terms of a nonzero element, read commutatively.
pub fn principal_symbol(u: &Uea) -> Result<SymElement> {
    if u.is_zero() {
        return Err(Error::Validation("principal symbol of zero".into()));
    }
    let d = u.degree();
    let mut s = SymElement::zero(u.ctx.ring, u.ctx.dim);
    for (m, c) in &u.terms {
        if m.degree() == d {
            s.add_term(m.clone(), c.clone());
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ProbeReport {
    pub checked_degree: usize,
    /// Per-degree dimensions of the ideal slice, 0..=checked_degree.
    pub ideal_dims: Vec<usize>,
    /// Koszul (inclusion-exclusion) prediction per degree.
    pub predicted_dims: Vec<i64>,
    pub first_failure: Option<usize>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Bounded-degree necessary condition for f_1..f_m to be a regular sequence:
/// the degreewise dimension of the ideal they generate must match the count
/// a regular sequence would give (from the Koszul/Hilbert series).
pub fn regular_sequence_probe(
    ring: Ring,
    dim: usize,
    f: &[SymElement],
    d: usize,
) -> Result<ProbeReport> {
    for s in f {
        if !s.is_homogeneous() || s.is_zero() {
            return Err(Error::NonHomogeneous);
        }
    }
    let degs: Vec<usize> = f.iter().map(|s| s.degree()).collect();
    // predicted quotient Hilbert series: prod (1 - t^{d_i}) / (1 - t)^dim
    let mut numer = vec![0i64; d + 1];
    numer[0] = 1;
    for &di in &degs {
        let mut next = numer.clone();
        for e in di..=d {
            next[e] -= numer[e - di];
        }
        numer = next;
    }
    let full = |e: usize| -> i64 {
        // C(dim - 1 + e, dim - 1)
        let mut c = 1i64;
        for i in 1..dim {
            c = c * (e + i) as i64 / i as i64;
        }
        c
    };
    let mut quotient = vec![0i64; d + 1];
    for e in 0..=d {
        let mut q = 0i64;
        for j in 0..=e {
            q += numer[j] * full(e - j);
        }
        quotient[e] = q;
    }
    let predicted_dims: Vec<i64> = (0..=d).map(|e| full(e) - quotient[e]).collect();
    let mut ideal_dims = Vec::with_capacity(d + 1);
    let mut first_failure = None;
    for e in 0..=d {
        let cols = monomials_of_degree(dim, e);
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for (s, &di) in f.iter().zip(&degs) {
            if di > e {
                continue;
            }
            for m in monomials_of_degree(dim, e - di) {
                let mono = SymElement {
                    ring,
                    dim,
                    terms: [(m, Scalar::one(ring))].into_iter().collect(),
                };
                rows.push(s.mul(&mono).coeff_vector(&cols));
            }
        }
        let rank = crate::linalg::rref_field(ring, &rows).len();
        ideal_dims.push(rank);
        if first_failure.is_none() && rank as i64 != predicted_dims[e] {
            first_failure = Some(e);
        }
    }
    Ok(ProbeReport { checked_degree: d, ideal_dims, predicted_dims, first_failure })
}
