//! Cotangent Lie algebras of the center: the quotient of the center's
//! augmentation ideal by its square, either inside the full enveloping
//! algebra (kind M) or inside the quotient by the ideal generated by chosen
//! central elements (kind N). Also: the canonical map from the Lie algebra,
//! character twists, induced automorphisms, characteristic-polynomial sweeps
//! across primes, and invariant comparison of two algebras.

use crate::center::{center_basis, CenterChunk, ModularEnv};
use crate::error::{Error, Result};
use crate::files::AutomorphismFile;
use crate::lie::{Character, FpLie, LiePresentation};
use crate::linalg::{charpoly, echelonize, solve_in_span, CosetSpace, EchelonBasis};
use crate::pbw::{hom_witness, Monomial, MonomialBasis, Uea, UeaCtx};
use crate::scalar::{addmod, mulmod, submod, Ring, Scalar};
use crate::sym::{symmetrize, SymElement};
use std::sync::Arc;

pub const DEFAULT_MONOMIAL_LIMIT: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CotangentKind {
    /// m/m^2 inside the full enveloping algebra.
    M,
    /// n/n^2 inside the quotient by the ideal generated by the supplied
    /// central elements.
    N,
}

/// Counit-zero rows of the center basis, re-echelonized. This is the
/// augmentation ideal of the center within the degree budget.
pub fn augmentation_ideal(chunk: &CenterChunk) -> EchelonBasis {
    let rows: Vec<Vec<u64>> = chunk
        .basis
        .rows
        .iter()
        .filter(|r| r[0] == 0)
        .cloned()
        .collect();
    echelonize(chunk.p, &rows).expect("prime checked upstream")
}

enum Machinery {
    M {
        coset: CosetSpace,
    },
    N {
        /// Monomial space modulo the generated ideal J.
        quot: CosetSpace,
        /// n modulo n^2, in quotient coordinates.
        ncoset: CosetSpace,
    },
}

impl Machinery {
    fn class_of_row(&self, v: &[u64]) -> Result<Vec<u64>> {
        match self {
            Machinery::M { coset } => coset.class_coords(v),
            Machinery::N { quot, ncoset } => ncoset.class_coords(&quot.class_coords(v)?),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Machinery::M { coset } => coset.dim(),
            Machinery::N { ncoset, .. } => ncoset.dim(),
        }
    }
}

/// Picks one representative row per class with class coordinates e_k,
/// preferring low-degree candidates so later bracket computations stay
/// inside the degree budget.
fn low_degree_reps(
    p: u64,
    candidates: &[Vec<u64>],
    degrees: &[usize],
    class_of_row: impl Fn(&[u64]) -> Result<Vec<u64>>,
    dim: usize,
    ambient: usize,
) -> Result<Vec<Vec<u64>>> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by_key(|&i| degrees[i]);
    let sorted: Vec<&Vec<u64>> = order.iter().map(|&i| &candidates[i]).collect();
    let classes: Vec<Vec<u64>> = sorted
        .iter()
        .map(|r| class_of_row(r))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut target = vec![0u64; dim];
        target[k] = 1;
        let coeffs = solve_in_span(p, &classes, &target).ok_or(Error::OutsideSpan)?;
        let mut row = vec![0u64; ambient];
        for (c, r) in coeffs.iter().zip(&sorted) {
            if *c == 0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(r.iter()) {
                *x = addmod(*x, mulmod(*c, *y, p), p);
            }
        }
        out.push(row);
    }
    Ok(out)
}

pub struct CotangentAlgebra {
    pub p: u64,
    pub d: usize,
    pub kind: CotangentKind,
    pub dim: usize,
    /// Induced bracket as an F_p Lie algebra on the class basis.
    pub fp: FpLie,
    /// Row i = class of -i(x_i): the canonical map from the Lie algebra.
    pub canonical: Vec<Vec<u64>>,
    /// Central representatives in the enveloping algebra, one per class.
    pub reps: Vec<Uea>,
    mbasis: MonomialBasis,
    machinery: Machinery,
}

impl CotangentAlgebra {
    /// Class coordinates of a central element of the enveloping algebra.
    pub fn class_of(&self, u: &Uea) -> Result<Vec<u64>> {
        let v = u
            .vectorize(&self.mbasis)
            .map_err(|_| Error::DegreeCapTooSmall { got: self.d, need: u.degree() })?;
        self.machinery.class_of_row(&v)
    }

    /// True when the class with these coordinates brackets to zero with
    /// every basis class.
    pub fn is_central_class(&self, v: &[u64]) -> bool {
        (0..self.dim).all(|j| {
            let mut unit = vec![0u64; self.dim];
            unit[j] = 1;
            self.fp.bracket_vec(v, &unit).iter().all(|&x| x == 0)
        })
    }

    pub fn canonical_bijective(&self) -> bool {
        self.canonical.len() == self.dim
            && matches!(echelonize(self.p, &self.canonical), Ok(b) if b.rank() == self.dim)
    }

    /// First basis pair where the canonical map fails to be a homomorphism
    /// (None = it is one).
    pub fn canonical_hom_witness(&self, g: &FpLie) -> Option<(usize, usize)> {
        for i in 0..g.dim {
            for j in (i + 1)..g.dim {
                let lhs = self.fp.bracket_vec(&self.canonical[i], &self.canonical[j]);
                let mut rhs = vec![0u64; self.dim];
                for (k, &c) in g.table[i][j].iter().enumerate() {
                    for (t, &x) in self.canonical[k].iter().enumerate() {
                        rhs[t] = addmod(rhs[t], mulmod(c, x, self.p), self.p);
                    }
                }
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Re-echelonizes with the column order reversed, so pivots land on the
/// highest monomial of each row and tails stay in lower degree. The result
/// spans the same space but is degree-graded: row degree = pivot degree.
fn degree_graded_rows(p: u64, rows: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let rev: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().rev().cloned().collect())
        .collect();
    let ech = echelonize(p, &rev)?;
    Ok(ech
        .rows
        .iter()
        .map(|r| r.iter().rev().cloned().collect())
        .collect())
}

fn row_degree(mbasis: &MonomialBasis, row: &[u64]) -> usize {
    row.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, _)| mbasis.monomials[i].degree())
        .max()
        .unwrap_or(0)
}

/// Normal form in the bounded-degree model of the quotient by the ideal
/// generated by the central elements: reduces against the echelonized span
/// of {g_i . monomial, degree <= d}.
pub fn quotient_normal_form(u: &Uea, ideal: &EchelonBasis, mbasis: &MonomialBasis) -> Result<Uea> {
    let v = u
        .vectorize(mbasis)
        .map_err(|_| Error::DegreeCapTooSmall { got: mbasis.cap, need: u.degree() })?;
    let reduced = ideal.reduce(&v);
    Ok(Uea::from_vector(&u.ctx, mbasis, &reduced))
}

/// Span of {g . m : g in generators, m monomial, deg(g . m) <= d}.
pub fn generated_ideal(
    env: &ModularEnv,
    generators: &[Uea],
    mbasis: &MonomialBasis,
) -> Result<EchelonBasis> {
    let d = mbasis.cap;
    let mut basis = EchelonBasis::empty(env.p, mbasis.len());
    for g in generators {
        let gd = g.degree();
        if gd > d {
            return Err(Error::DegreeCapTooSmall { got: d, need: gd });
        }
        let sub = MonomialBasis::new(env.dim(), d - gd, usize::MAX)?;
        for m in &sub.monomials {
            let prod = g.mul(&Uea::monomial(
                &env.ctx_p,
                m.clone(),
                Scalar::one(env.ctx_p.ring),
            ));
            basis.insert(&prod.vectorize(mbasis)?);
        }
    }
    Ok(basis)
}

/// Builds the cotangent Lie algebra at one prime. `generators` are the
/// central elements defining the quotient for kind N (ignored for kind M).
/// The degree budget must reach 2p (and twice the largest generator degree)
/// so the square of the augmentation ideal is visible; `allow_small_d`
/// overrides the guard.
pub fn cotangent_algebra(
    env: &ModularEnv,
    generators: &[Uea],
    d: usize,
    kind: CotangentKind,
    allow_small_d: bool,
) -> Result<CotangentAlgebra> {
    let p = env.p;
    let mut need = 2 * p as usize;
    if kind == CotangentKind::N {
        for g in generators {
            need = need.max(2 * g.degree());
        }
    }
    if d < need && !allow_small_d {
        return Err(Error::DegreeCapTooSmall { got: d, need });
    }
    if kind == CotangentKind::N {
        for (k, g) in generators.iter().enumerate() {
            for i in 0..env.dim() {
                if !g.commutator(&Uea::generator(&env.ctx_p, i)).is_zero() {
                    return Err(Error::NotCentral(format!("generator {}", k)));
                }
            }
        }
    }
    let chunk = center_basis(env, d, DEFAULT_MONOMIAL_LIMIT)?;
    let aug = augmentation_ideal(&chunk);
    let graded = degree_graded_rows(p, &aug.rows)?;
    let m_elems: Vec<Uea> = graded
        .iter()
        .map(|r| Uea::from_vector(&env.ctx_p, &chunk.mbasis, r))
        .collect();
    let m_degs: Vec<usize> = graded
        .iter()
        .map(|r| row_degree(&chunk.mbasis, r))
        .collect();
    // pairwise products with degree sum within budget span the square
    let mut sq_rows: Vec<Vec<u64>> = Vec::new();
    for i in 0..m_elems.len() {
        for j in i..m_elems.len() {
            if m_degs[i] + m_degs[j] > d {
                continue;
            }
            sq_rows.push(m_elems[i].mul(&m_elems[j]).vectorize(&chunk.mbasis)?);
        }
    }
    let ambient = chunk.mbasis.len();
    let machinery = match kind {
        CotangentKind::M => {
            let mut msq = EchelonBasis::empty(p, ambient);
            for r in &sq_rows {
                msq.insert(r);
            }
            Machinery::M { coset: CosetSpace::new(msq, &graded) }
        }
        CotangentKind::N => {
            let ideal = generated_ideal(env, generators, &chunk.mbasis)?;
            let units: Vec<Vec<u64>> = (0..chunk.mbasis.len())
                .map(|i| {
                    let mut v = vec![0u64; chunk.mbasis.len()];
                    v[i] = 1;
                    v
                })
                .collect();
            let quot = CosetSpace::new(ideal, &units);
            let n_rows: Vec<Vec<u64>> = graded
                .iter()
                .map(|r| quot.class_coords(r))
                .collect::<Result<_>>()?;
            let mut nsq = EchelonBasis::empty(p, quot.dim());
            for r in &sq_rows {
                nsq.insert(&quot.class_coords(r)?);
            }
            let ncoset = CosetSpace::new(nsq, &n_rows);
            Machinery::N { quot, ncoset }
        }
    };
    let dim = machinery.dim();
    // central representatives in the enveloping algebra, one per class, of
    // the lowest degree the augmentation rows allow
    let rep_rows = low_degree_reps(
        p,
        &graded,
        &m_degs,
        |r| machinery.class_of_row(r),
        dim,
        chunk.mbasis.len(),
    )?;
    let reps: Vec<Uea> = rep_rows
        .iter()
        .map(|r| Uea::from_vector(&env.ctx_p, &chunk.mbasis, r))
        .collect();
    let mut partial = CotangentAlgebra {
        p,
        d,
        kind,
        dim,
        fp: FpLie::from_table(p, vec![vec![vec![0; dim]; dim]; dim]),
        canonical: Vec::new(),
        reps,
        mbasis: chunk.mbasis,
        machinery,
    };
    // induced bracket: deformation bracket upstairs, then class coordinates
    let mut table = vec![vec![vec![0u64; dim]; dim]; dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let br = env.deformation_bracket(&partial.reps[i], &partial.reps[j])?;
            let coords = partial.class_of(&br)?;
            for (k, &c) in coords.iter().enumerate() {
                table[i][j][k] = c;
                table[j][i][k] = submod(0, c, p);
            }
        }
    }
    partial.fp = FpLie::from_table(p, table);
    for i in 0..env.dim() {
        let mut unit = vec![0u64; env.dim()];
        unit[i] = 1;
        let img = env.p_center_image(&unit).neg();
        partial.canonical.push(partial.class_of(&img)?);
    }
    Ok(partial)
}

/// Symmetrizes the invariants bundled with a presentation and reduces them
/// mod p; each result is checked central.
pub fn invariant_generators(pres: &LiePresentation, env: &ModularEnv) -> Result<Vec<Uea>> {
    let ctx_q = UeaCtx::from_presentation(pres, Ring::Rational)?;
    let mut out = Vec::new();
    for inv in &pres.invariants {
        let mut s = SymElement::zero(Ring::Rational, pres.dim());
        for (exps, c) in &inv.terms {
            s.add_term(Monomial(exps.clone()), Scalar::Rational(c.clone()));
        }
        let beta = symmetrize(&ctx_q, &s)?;
        let reduced = beta.convert(&env.ctx_p, |c| match c {
            Scalar::Rational(q) => Scalar::from_rational(Ring::ModP(env.p), q),
            _ => unreachable!(),
        })?;
        for i in 0..env.dim() {
            if !reduced.commutator(&Uea::generator(&env.ctx_p, i)).is_zero() {
                return Err(Error::NotCentral(inv.name.clone()));
            }
        }
        out.push(reduced);
    }
    Ok(out)
}

/// A generator-image presentation of an (endo/auto)morphism of the
/// enveloping algebra, with the verifications the reports rely on.
pub struct VerifiedAut {
    pub name: String,
    pub images: Vec<Uea>,
    /// Degree-1 parts of the images span the Lie algebra; when false, all
    /// conclusions hold only for an endomorphism.
    pub surjective_deg1: bool,
    /// Declared finite order, verified on generators within degree budget.
    pub order_verified: Option<u64>,
}

/// Verifies that the images define an algebra homomorphism, flags probable
/// non-surjectivity, and checks the declared finite order.
pub fn verify_automorphism(
    ctx: &Arc<UeaCtx>,
    name: &str,
    images: Vec<Uea>,
    order: Option<u64>,
) -> Result<VerifiedAut> {
    if hom_witness(ctx, &images).is_some() {
        return Err(Error::UnverifiedHom);
    }
    let p = ctx.ring.prime();
    let deg1: Vec<Vec<u64>> = images
        .iter()
        .map(|u| {
            let mut v = vec![0u64; ctx.dim];
            for (m, c) in &u.terms {
                if m.degree() == 1 {
                    let i = m.0.iter().position(|&e| e == 1).unwrap();
                    v[i] = c.residue().unwrap_or(0);
                }
            }
            v
        })
        .collect();
    let surjective_deg1 = match p {
        Some(p) => echelonize(p, &deg1)?.rank() == ctx.dim,
        // over Q only linear images are rank-checked; anything else is
        // conservatively flagged
        None => {
            let rows: Vec<Vec<Scalar>> = images
                .iter()
                .map(|u| {
                    let mut v = vec![Scalar::zero(ctx.ring); ctx.dim];
                    for (m, c) in &u.terms {
                        if m.degree() == 1 {
                            let i = m.0.iter().position(|&e| e == 1).unwrap();
                            v[i] = c.clone();
                        }
                    }
                    v
                })
                .collect();
            crate::linalg::rref_field(ctx.ring, &rows).len() == ctx.dim
        }
    };
    let mut order_verified = None;
    if let Some(m) = order {
        let mut ok = true;
        for i in 0..ctx.dim {
            let mut u = Uea::generator(ctx, i);
            for _ in 0..m {
                u = u.apply_hom(&images);
            }
            if u != Uea::generator(ctx, i) {
                ok = false;
                break;
            }
        }
        if ok {
            order_verified = Some(m);
        }
    }
    Ok(VerifiedAut {
        name: name.to_string(),
        images,
        surjective_deg1,
        order_verified,
    })
}

/// Reduction of a rational automorphism file to generator images over F_p.
pub fn automorphism_images_mod_p(
    file: &AutomorphismFile,
    env: &ModularEnv,
) -> Result<Vec<Uea>> {
    let terms = file.image_terms(env.dim())?;
    let mut out = Vec::new();
    for img in terms {
        let mut u = Uea::zero(&env.ctx_p);
        for (exps, c) in img {
            let s = Scalar::from_rational(Ring::ModP(env.p), &c)?;
            u = u.add(&Uea::monomial(&env.ctx_p, Monomial(exps), s));
        }
        out.push(u);
    }
    Ok(out)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InducedAut {
    /// Row i = class coordinates of the image of representative i.
    pub matrix: Vec<Vec<u64>>,
    pub invertible: bool,
    /// None = the matrix respects the induced bracket.
    pub bracket_witness: Option<(usize, usize)>,
    /// Coefficients c_0..c_n of det(tI - matrix).
    pub charpoly: Vec<u64>,
}

impl InducedAut {
    pub fn is_lie_automorphism(&self) -> bool {
        self.invertible && self.bracket_witness.is_none()
    }
}

/// The matrix induced on the cotangent classes by a verified morphism of the
/// enveloping algebra.
pub fn induced_automorphism(cot: &CotangentAlgebra, aut: &VerifiedAut) -> Result<InducedAut> {
    let p = cot.p;
    let mut matrix = Vec::with_capacity(cot.dim);
    for r in &cot.reps {
        let img = r.apply_hom(&aut.images);
        let coords = cot.class_of(&img).map_err(|e| {
            Error::PreservationFailure(format!(
                "image of a representative left the model ({e}); increase the degree budget or check the morphism"
            ))
        })?;
        matrix.push(coords);
    }
    let invertible = echelonize(p, &matrix)?.rank() == cot.dim;
    let mut bracket_witness = None;
    'outer: for i in 0..cot.dim {
        for j in (i + 1)..cot.dim {
            let lhs = cot.fp.bracket_vec(&matrix[i], &matrix[j]);
            let mut rhs = vec![0u64; cot.dim];
            for (k, &c) in cot.fp.table[i][j].iter().enumerate() {
                for (t, &x) in matrix[k].iter().enumerate() {
                    rhs[t] = addmod(rhs[t], mulmod(c, x, p), p);
                }
            }
            if lhs != rhs {
                bracket_witness = Some((i, j));
                break 'outer;
            }
        }
    }
    let cp = charpoly(p, &matrix);
    Ok(InducedAut { matrix, invertible, bracket_witness, charpoly: cp })
}

/// Conjugates the induced matrix back to Lie-algebra coordinates through the
/// canonical map (kind N with bijective canonical map): returns C T C^{-1},
/// the matrix of the induced action on the g-part.
pub fn matrix_on_g(cot: &CotangentAlgebra, induced: &InducedAut) -> Result<Vec<Vec<u64>>> {
    if !cot.canonical_bijective() {
        return Err(Error::Validation(
            "canonical map is not bijective; no g-part coordinates".into(),
        ));
    }
    let p = cot.p;
    let n = cot.dim;
    // rows of the result X solve X C = C T
    let ct = mat_mul_mod(&cot.canonical, &induced.matrix, p);
    let gens: Vec<Vec<u64>> = transpose(&cot.canonical);
    let mut x = vec![vec![0u64; n]; n];
    for (i, row) in ct.iter().enumerate() {
        // solve row = x_i . C, i.e. C^T x_i^T = row^T
        let coords = solve_in_span(p, &gens, row).ok_or(Error::OutsideSpan)?;
        x[i] = coords;
    }
    Ok(x)
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0u64; m]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = addmod(out[i][j], mulmod(aik, b[k][j], p), p);
            }
        }
    }
    out
}

fn transpose(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TwistReport {
    pub character: Vec<u64>,
    /// Matrix of the induced map from the untwisted to the twisted cotangent.
    pub matrix: Vec<Vec<u64>>,
    pub invertible: bool,
    pub structure_preserved: bool,
    pub center_preserved: bool,
}

impl TwistReport {
    pub fn passed(&self) -> bool {
        self.invertible && self.structure_preserved && self.center_preserved
    }
}

/// The automorphism x -> x - chi(x) of the enveloping algebra of a nilpotent
/// restricted Lie algebra, and the verification that it induces a Lie
/// isomorphism from the cotangent onto the cotangent of the twisted ideal.
pub fn character_twist(
    env: &ModularEnv,
    chi: &Character,
    d: usize,
) -> Result<TwistReport> {
    if !env.restricted.fp.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    chi.validate(&env.restricted.fp)?;
    let p = env.p;
    let images: Vec<Uea> = (0..env.dim())
        .map(|i| {
            Uea::generator(&env.ctx_p, i).sub(
                &Uea::one(&env.ctx_p).scale(&Scalar::from_u64(Ring::ModP(p), chi.values[i])),
            )
        })
        .collect();
    let aut = verify_automorphism(&env.ctx_p, "character-twist", images, None)?;
    let chunk = center_basis(env, d, DEFAULT_MONOMIAL_LIMIT)?;
    // the twist must map the center into itself
    let mut center_preserved = true;
    for r in 0..chunk.dim() {
        let img = chunk.element(r).apply_hom(&aut.images);
        match img.vectorize(&chunk.mbasis) {
            Ok(v) => {
                if !chunk.basis.contains(&v) {
                    center_preserved = false;
                }
            }
            Err(_) => center_preserved = false,
        }
    }
    let cot = cotangent_algebra(env, &[], d, CotangentKind::M, false)?;
    // twisted ideal I = phi(m); its square; its cotangent
    let aug = augmentation_ideal(&chunk);
    let graded = degree_graded_rows(p, &aug.rows)?;
    let twisted: Vec<Uea> = graded
        .iter()
        .map(|r| Uea::from_vector(&env.ctx_p, &chunk.mbasis, r).apply_hom(&aut.images))
        .collect();
    let t_rows: Vec<Vec<u64>> = twisted
        .iter()
        .map(|u| u.vectorize(&chunk.mbasis))
        .collect::<Result<_>>()?;
    let t_basis = echelonize(p, &t_rows)?;
    let t_degs: Vec<usize> = t_rows.iter().map(|r| row_degree(&chunk.mbasis, r)).collect();
    let mut tsq = EchelonBasis::empty(p, chunk.mbasis.len());
    for i in 0..twisted.len() {
        for j in i..twisted.len() {
            if t_degs[i] + t_degs[j] > d {
                continue;
            }
            tsq.insert(&twisted[i].mul(&twisted[j]).vectorize(&chunk.mbasis)?);
        }
    }
    let tcoset = CosetSpace::new(tsq, &t_basis.rows);
    // induced map: class of phi(rep_i) in the twisted cotangent
    let mut matrix = Vec::new();
    for r in &cot.reps {
        let img = r.apply_hom(&aut.images).vectorize(&chunk.mbasis)?;
        matrix.push(tcoset.class_coords(&img)?);
    }
    let tdim = tcoset.dim();
    let invertible = matrix.len() == tdim && echelonize(p, &matrix)?.rank() == tdim;
    // twisted structure constants via deformation brackets of low-degree
    // twisted representatives
    let t_reps: Vec<Uea> = low_degree_reps(
        p,
        &t_rows,
        &t_degs,
        |r| tcoset.class_coords(r),
        tdim,
        chunk.mbasis.len(),
    )?
    .iter()
    .map(|r| Uea::from_vector(&env.ctx_p, &chunk.mbasis, r))
    .collect();
    let mut structure_preserved = true;
    for i in 0..cot.dim {
        for j in (i + 1)..cot.dim {
            // image of [e_i, e_j]
            let mut rhs = vec![0u64; tdim];
            for (k, &c) in cot.fp.table[i][j].iter().enumerate() {
                for (t, &x) in matrix[k].iter().enumerate() {
                    rhs[t] = addmod(rhs[t], mulmod(c, x, p), p);
                }
            }
            // bracket of images, computed in the twisted cotangent
            let mut a = Uea::zero(&env.ctx_p);
            let mut b = Uea::zero(&env.ctx_p);
            for (k, &c) in matrix[i].iter().enumerate() {
                a = a.add(&t_reps[k].scale(&Scalar::from_u64(Ring::ModP(p), c)));
            }
            for (k, &c) in matrix[j].iter().enumerate() {
                b = b.add(&t_reps[k].scale(&Scalar::from_u64(Ring::ModP(p), c)));
            }
            let br = env.deformation_bracket(&a, &b)?;
            let lhs = tcoset.class_coords(&br.vectorize(&chunk.mbasis)?)?;
            if lhs != rhs {
                structure_preserved = false;
            }
        }
    }
    Ok(TwistReport {
        character: chi.values.clone(),
        matrix,
        invertible,
        structure_preserved,
        center_preserved,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepEntry {
    pub prime: u64,
    /// None when the prime was skipped as bad.
    pub charpoly: Option<Vec<u64>>,
    pub equals_identity_poly: Option<bool>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub verdict: String,
}

/// Characteristic polynomials of the induced matrix on the kind-N cotangent
/// across primes, with the identity-kernel verdict.
pub fn charpoly_sweep(
    pres: &LiePresentation,
    aut: &AutomorphismFile,
    primes: &[u64],
    d_override: Option<usize>,
) -> Result<SweepReport> {
    let bad = pres.bad_primes();
    let mut entries = Vec::new();
    let mut any_good = false;
    let mut any_nonidentity = false;
    let mut all_identity = true;
    for &p in primes {
        let skip = p < 3 || bad.contains(&p) || {
            // denominators of the automorphism must be invertible too
            aut.image_terms(pres.dim())?
                .iter()
                .flatten()
                .any(|(_, c)| Scalar::from_rational(Ring::ModP(p), c).is_err())
        };
        if skip {
            entries.push(SweepEntry { prime: p, charpoly: None, equals_identity_poly: None });
            continue;
        }
        let env = ModularEnv::new(pres, p)?;
        let gens = invariant_generators(pres, &env)?;
        let d = d_override.unwrap_or(2 * p as usize + 2);
        let cot = cotangent_algebra(&env, &gens, d, CotangentKind::N, false)?;
        let images = automorphism_images_mod_p(aut, &env)?;
        let vaut = verify_automorphism(&env.ctx_p, &aut.name, images, aut.order)?;
        let induced = induced_automorphism(&cot, &vaut)?;
        let ident = crate::linalg::t_minus_one_power(p, cot.dim);
        let is_ident = induced.charpoly == ident;
        any_good = true;
        if is_ident {
            // stays in the running for "indistinguishable"
        } else {
            any_nonidentity = true;
        }
        all_identity &= is_ident;
        entries.push(SweepEntry {
            prime: p,
            charpoly: Some(induced.charpoly),
            equals_identity_poly: Some(is_ident),
        });
    }
    if !any_good {
        return Err(Error::NoGoodPrimes);
    }
    let verdict = if any_nonidentity {
        "kernel-detectable".to_string()
    } else if all_identity {
        "indistinguishable-from-identity-up-to-computed-primes".to_string()
    } else {
        unreachable!()
    };
    Ok(SweepReport { entries, verdict })
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct InvariantTable {
    pub dim: usize,
    pub center_dim: usize,
    pub derived_dims: Vec<usize>,
    pub killing_rank: usize,
    pub abelianization_dim: usize,
}

impl InvariantTable {
    pub fn of(fp: &FpLie) -> Self {
        InvariantTable {
            dim: fp.dim,
            center_dim: fp.center_dim(),
            derived_dims: fp.derived_series_dims(),
            killing_rank: fp.killing_rank(),
            abelianization_dim: fp.abelianization_dim(),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CompareEntry {
    pub prime: u64,
    pub table_m_a: InvariantTable,
    pub table_m_b: InvariantTable,
    pub table_n_a: Option<InvariantTable>,
    pub table_n_b: Option<InvariantTable>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CompareReport {
    pub entries: Vec<CompareEntry>,
    pub verdict: String,
}

/// Per-prime invariant tables of the cotangent algebras of two presentations;
/// verdict DISTINGUISHED when any invariant differs.
pub fn compare_invariants(
    a: &LiePresentation,
    b: &LiePresentation,
    primes: &[u64],
    d_override: Option<usize>,
) -> Result<CompareReport> {
    let mut entries = Vec::new();
    let mut distinguished = false;
    for &p in primes {
        if a.bad_primes().contains(&p) || b.bad_primes().contains(&p) || p < 3 {
            continue;
        }
        let d = d_override.unwrap_or(2 * p as usize + 2);
        let mut tables = Vec::new();
        let mut ntables = Vec::new();
        for pres in [a, b] {
            let env = ModularEnv::new(pres, p)?;
            let cot_m = cotangent_algebra(&env, &[], d, CotangentKind::M, false)?;
            tables.push(InvariantTable::of(&cot_m.fp));
            let ntab = match invariant_generators(pres, &env) {
                Ok(gens) => {
                    let cot_n = cotangent_algebra(&env, &gens, d, CotangentKind::N, false)?;
                    Some(InvariantTable::of(&cot_n.fp))
                }
                Err(_) => None,
            };
            ntables.push(ntab);
        }
        let tb = tables.pop().unwrap();
        let ta = tables.pop().unwrap();
        let nb = ntables.pop().unwrap();
        let na = ntables.pop().unwrap();
        if ta != tb {
            distinguished = true;
        }
        if let (Some(x), Some(y)) = (&na, &nb) {
            if x != y {
                distinguished = true;
            }
        }
        entries.push(CompareEntry {
            prime: p,
            table_m_a: ta,
            table_m_b: tb,
            table_n_a: na,
            table_n_b: nb,
        });
    }
    if entries.is_empty() {
        return Err(Error::NoGoodPrimes);
    }
    let verdict = if distinguished { "DISTINGUISHED" } else { "INCONCLUSIVE" }.to_string();
    Ok(CompareReport { entries, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::files::{builtin_automorphism, builtin_presentation};

    fn env(name: &str, p: u64) -> ModularEnv {
        ModularEnv::new(&builtin_presentation(name).unwrap(), p).unwrap()
    }

    fn sl2_delta(env: &ModularEnv) -> Uea {
        let pres = builtin_presentation("sl2").unwrap();
        invariant_generators(&pres, env).unwrap().remove(0)
    }

    #[test]
    fn augmentation_ideal_sl2_p3() {
        let env = env("sl2", 3);
        let chunk = center_basis(&env, 3, 100_000).unwrap();
        let aug = augmentation_ideal(&chunk);
        assert_eq!(aug.rank(), 4);
        for r in &aug.rows {
            assert_eq!(r[0], 0);
        }
    }

    #[test]
    fn augmentation_ideal_heis3() {
        let env = env("heis3", 3);
        let chunk = center_basis(&env, 3, 100_000).unwrap();
        // monomials in x^3, y^3, z of degree <= 3, minus constants:
        // z, z^2, z^3, x^3, y^3 — five of them
        assert_eq!(augmentation_ideal(&chunk).rank(), 5);
    }

    #[test]
    fn cotangent_m_sl2() {
        let e = env("sl2", 3);
        let cot = cotangent_algebra(&e, &[], 8, CotangentKind::M, false).unwrap();
        assert_eq!(cot.dim, 4);
        assert!(cot.fp.antisymmetry_ok());
        assert_eq!(cot.fp.jacobi_witness(), None);
        // one-dimensional center spanned by the Casimir class
        assert_eq!(cot.fp.center_dim(), 1);
        let delta = sl2_delta(&e);
        let dclass = cot.class_of(&delta).unwrap();
        assert!(dclass.iter().any(|&c| c != 0));
        assert!(cot.is_central_class(&dclass));
        // canonical map is a homomorphism onto the g-part
        assert_eq!(cot.canonical_hom_witness(&e.restricted.fp), None);
        assert_eq!(echelonize(3, &cot.canonical).unwrap().rank(), 3);
    }

    #[test]
    fn cotangent_n_sl2() {
        let e = env("sl2", 3);
        let delta = sl2_delta(&e);
        let cot = cotangent_algebra(&e, &[delta], 8, CotangentKind::N, false).unwrap();
        assert_eq!(cot.dim, 3);
        assert!(cot.canonical_bijective());
        assert_eq!(cot.canonical_hom_witness(&e.restricted.fp), None);
        assert_eq!(cot.fp.center_dim(), 0);
        // simple: derived algebra is everything
        assert_eq!(cot.fp.derived_series_dims(), vec![3, 3]);
        assert_eq!(cot.fp.killing_rank(), 3);
    }

    #[test]
    fn cotangent_m_heis3_is_abelian() {
        let e = env("heis3", 3);
        let cot = cotangent_algebra(&e, &[], 8, CotangentKind::M, false).unwrap();
        assert_eq!(cot.dim, 3);
        assert!(cot
            .fp
            .table
            .iter()
            .all(|row| row.iter().all(|v| v.iter().all(|&x| x == 0))));
    }

    #[test]
    fn degree_guard() {
        let e = env("sl2", 3);
        assert!(matches!(
            cotangent_algebra(&e, &[], 4, CotangentKind::M, false),
            Err(Error::DegreeCapTooSmall { got: 4, need: 6 })
        ));
        assert!(cotangent_algebra(&e, &[], 4, CotangentKind::M, true).is_ok());
    }

    #[test]
    fn quotient_normal_form_examples() {
        let e = env("sl2", 3);
        let mb = MonomialBasis::new(3, 4, 100_000).unwrap();
        let delta = sl2_delta(&e);
        let ideal = generated_ideal(&e, &[delta.clone()], &mb).unwrap();
        assert!(quotient_normal_form(&delta, &ideal, &mb).unwrap().is_zero());
        // 4fe = Delta - h^2 - 2h, so 4fe and 2h^2 + h (over F_3) share a coset
        let f = Uea::generator(&e.ctx_p, 1);
        let eg = Uea::generator(&e.ctx_p, 0);
        let h = Uea::generator(&e.ctx_p, 2);
        let fe4 = f.mul(&eg).scale(&Scalar::from_u64(Ring::ModP(3), 4));
        let got = quotient_normal_form(&fe4, &ideal, &mb).unwrap();
        let expect = h
            .mul(&h)
            .scale(&Scalar::from_u64(Ring::ModP(3), 2))
            .add(&h);
        assert_eq!(got, quotient_normal_form(&expect, &ideal, &mb).unwrap());
        // the normal form differs from the input by an ideal element
        let diff = fe4.sub(&got).vectorize(&mb).unwrap();
        assert!(ideal.contains(&diff));
        // e is not congruent to zero
        assert!(!quotient_normal_form(&eg, &ideal, &mb).unwrap().is_zero());
        // idempotence
        let again = quotient_normal_form(&got, &ideal, &mb).unwrap();
        assert_eq!(again, got);
    }

    #[test]
    fn induced_identity_is_identity() {
        let e = env("sl2", 3);
        let delta = sl2_delta(&e);
        let cot = cotangent_algebra(&e, &[delta], 8, CotangentKind::N, false).unwrap();
        let file = builtin_automorphism("identity").unwrap();
        let images = automorphism_images_mod_p(&file, &e).unwrap();
        let aut = verify_automorphism(&e.ctx_p, "identity", images, Some(1)).unwrap();
        assert!(aut.surjective_deg1);
        assert_eq!(aut.order_verified, Some(1));
        let ind = induced_automorphism(&cot, &aut).unwrap();
        let mut ident = vec![vec![0u64; 3]; 3];
        for (i, row) in ident.iter_mut().enumerate() {
            row[i] = 1;
        }
        assert_eq!(ind.matrix, ident);
        assert!(ind.is_lie_automorphism());
    }

    #[test]
    fn induced_cartan_on_m_kind() {
        let e = env("sl2", 3);
        let cot = cotangent_algebra(&e, &[], 8, CotangentKind::M, false).unwrap();
        let file = builtin_automorphism("cartan").unwrap();
        let images = automorphism_images_mod_p(&file, &e).unwrap();
        let aut = verify_automorphism(&e.ctx_p, "cartan", images, Some(2)).unwrap();
        assert_eq!(aut.order_verified, Some(2));
        let ind = induced_automorphism(&cot, &aut).unwrap();
        assert!(ind.is_lie_automorphism());
        // eigenvalues 1, 1, -1, -1: charpoly (t-1)^2 (t+1)^2 = (t^2-1)^2
        // = t^4 - 2t^2 + 1 -> coefficients [1, 0, -2, 0, 1] = [1,0,1,0,1] mod 3
        assert_eq!(ind.charpoly, vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn induced_aut_matches_reduced_matrix_on_g_part() {
        // for a Lie algebra automorphism, the induced matrix on the kind-N
        // cotangent is the automorphism's matrix mod p, transported through
        // the canonical map
        for (name, order) in [("cartan", Some(2)), ("torus4", None)] {
            for p in [3u64, 5] {
                let e = env("sl2", p);
                let delta = sl2_delta(&e);
                let cot = cotangent_algebra(&e, &[delta], 2 * p as usize + 2, CotangentKind::N, false)
                    .unwrap();
                let file = builtin_automorphism(name).unwrap();
                let images = automorphism_images_mod_p(&file, &e).unwrap();
                let aut = verify_automorphism(&e.ctx_p, name, images, order).unwrap();
                let ind = induced_automorphism(&cot, &aut).unwrap();
                let on_g = matrix_on_g(&cot, &ind).unwrap();
                // expected: reduction of the rational image matrix mod p
                let rows = file.image_matrix(3).unwrap();
                let expect: Vec<Vec<u64>> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|q| {
                                Scalar::from_rational(Ring::ModP(p), q)
                                    .unwrap()
                                    .residue()
                                    .unwrap()
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(on_g, expect, "{} at p={}", name, p);
            }
        }
    }

    #[test]
    fn induced_aut_is_functorial() {
        let e = env("sl2", 5);
        let delta = sl2_delta(&e);
        let cot = cotangent_algebra(&e, &[delta], 12, CotangentKind::N, false).unwrap();
        let f1 = builtin_automorphism("cartan").unwrap();
        let f2 = builtin_automorphism("torus4").unwrap();
        let im1 = automorphism_images_mod_p(&f1, &e).unwrap();
        let im2 = automorphism_images_mod_p(&f2, &e).unwrap();
        let a1 = verify_automorphism(&e.ctx_p, "cartan", im1.clone(), None).unwrap();
        let a2 = verify_automorphism(&e.ctx_p, "torus4", im2.clone(), None).unwrap();
        // composite phi1 after phi2: x -> phi1(phi2(x))
        let comp: Vec<Uea> = im2.iter().map(|u| u.apply_hom(&im1)).collect();
        let ac = verify_automorphism(&e.ctx_p, "comp", comp, None).unwrap();
        let t1 = induced_automorphism(&cot, &a1).unwrap().matrix;
        let t2 = induced_automorphism(&cot, &a2).unwrap().matrix;
        let tc = induced_automorphism(&cot, &ac).unwrap().matrix;
        // with rows as images, T_{phi1 . phi2} = T_{phi2} T_{phi1}
        assert_eq!(tc, mat_mul_mod(&t2, &t1, 5));
    }

    #[test]
    fn charpoly_sweep_identity_and_cartan() {
        let pres = builtin_presentation("sl2").unwrap();
        let id = builtin_automorphism("identity").unwrap();
        let sweep = charpoly_sweep(&pres, &id, &[3, 5], None).unwrap();
        assert_eq!(sweep.verdict, "indistinguishable-from-identity-up-to-computed-primes");
        for e in &sweep.entries {
            assert_eq!(e.equals_identity_poly, Some(true));
        }
        let cartan = builtin_automorphism("cartan").unwrap();
        let sweep2 = charpoly_sweep(&pres, &cartan, &[3, 5], None).unwrap();
        assert_eq!(sweep2.verdict, "kernel-detectable");
        // eigenvalues (1, -1, -1): (t-1)(t+1)^2 = t^3 + t^2 - t - 1
        let e3 = &sweep2.entries[0];
        assert_eq!(e3.charpoly, Some(vec![2, 2, 1, 1]));
    }

    #[test]
    fn charpoly_sweep_torus() {
        let pres = builtin_presentation("sl2").unwrap();
        let torus = builtin_automorphism("torus4").unwrap();
        let sweep = charpoly_sweep(&pres, &torus, &[3, 5], None).unwrap();
        // at p=3: 4 = 1, the reduction is the identity; at p=5 the
        // eigenvalues are (4, 4^{-1}, 1) = (4, 4, 1)
        assert_eq!(sweep.verdict, "kernel-detectable");
        assert_eq!(sweep.entries[0].equals_identity_poly, Some(true));
        // (t-4)^2 (t-1) = t^3 - 9t^2 + 24t - 16 -> [-16, 24, -9, 1] = [4, 4, 1, 1] mod 5
        assert_eq!(sweep.entries[1].charpoly, Some(vec![4, 4, 1, 1]));
    }

    #[test]
    fn twist_identity_character() {
        let e = env("heis3", 3);
        let chi = Character { values: vec![0, 0, 0] };
        let report = character_twist(&e, &chi, 6).unwrap();
        assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn twist_nontrivial_character() {
        let e = env("heis3", 3);
        let chi = Character { values: vec![1, 0, 0] };
        let report = character_twist(&e, &chi, 6).unwrap();
        assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn twist_rejects_bad_inputs() {
        let e = env("heis3", 3);
        // z spans the derived subalgebra: not a character
        let chi = Character { values: vec![0, 0, 1] };
        assert!(matches!(character_twist(&e, &chi, 6), Err(Error::InvalidCharacter(_, _))));
        let e2 = env("sl2", 3);
        let chi0 = Character { values: vec![0, 0, 0] };
        assert!(matches!(character_twist(&e2, &chi0, 6), Err(Error::NotNilpotent)));
    }

    #[test]
    fn compare_sl2_heis3_distinguished() {
        let a = builtin_presentation("sl2").unwrap();
        let b = builtin_presentation("heis3").unwrap();
        let report = compare_invariants(&a, &b, &[3], None).unwrap();
        assert_eq!(report.verdict, "DISTINGUISHED");
        let e = &report.entries[0];
        assert_eq!(e.table_m_a.dim, 4);
        assert_eq!(e.table_m_b.dim, 3);
        assert_eq!(e.table_n_a.as_ref().unwrap().killing_rank, 3);
        assert_eq!(e.table_n_b.as_ref().unwrap().killing_rank, 0);
    }

    #[test]
    fn compare_same_algebra_inconclusive() {
        let a = builtin_presentation("sl2").unwrap();
        let b = builtin_presentation("sl2").unwrap();
        let report = compare_invariants(&a, &b, &[3], None).unwrap();
        assert_eq!(report.verdict, "INCONCLUSIVE");
    }

    #[test]
    fn compare_heis3_abelian3() {
        // both cotangents come out abelian: documents that the invariant
        // tables are not complete
        let a = builtin_presentation("heis3").unwrap();
        let b = builtin_presentation("abelian3").unwrap();
        let report = compare_invariants(&a, &b, &[3], None).unwrap();
        let e = &report.entries[0];
        assert_eq!(e.table_m_a.derived_dims.last(), Some(&0));
        assert_eq!(e.table_m_b.derived_dims.last(), Some(&0));
    }
}
