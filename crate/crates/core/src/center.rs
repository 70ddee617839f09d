//! The modular side: p-center map, bounded-degree center of the enveloping
//! algebra over F_p, the deformation Poisson bracket through Z/p^2 lifts,
//! and the Kac-Radul verification.

use crate::error::{Error, Result};
use crate::lie::{LiePresentation, Restricted};
use crate::linalg::{nullspace, EchelonBasis};
use crate::pbw::{MonomialBasis, Uea, UeaCtx};
use crate::scalar::{divide_exact_by_p, lift_canonical, Ring, Scalar};
use crate::sym::SymElement;
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Everything needed to compute at one prime: the restricted structure and
/// enveloping-algebra contexts over F_p and Z/p^2. The Z/p^2 structure
/// constants are genuine reductions of the rational ones (not lifts of the
/// mod-p values), so the lifted algebra is an honest Lie algebra over Z/p^2.
pub struct ModularEnv {
    pub name: String,
    pub p: u64,
    pub restricted: Restricted,
    pub ctx_p: Arc<UeaCtx>,
    pub ctx_p2: Arc<UeaCtx>,
    pub bad_primes: BTreeSet<u64>,
}

impl ModularEnv {
    pub fn new(pres: &LiePresentation, p: u64) -> Result<Self> {
        let restricted = Restricted::new(pres, p)?;
        let ctx_p = UeaCtx::from_presentation(pres, Ring::ModP(p))?;
        let ctx_p2 = UeaCtx::from_presentation(pres, Ring::ModPSq(p))?;
        Ok(ModularEnv {
            name: pres.name.clone(),
            p,
            restricted,
            ctx_p,
            ctx_p2,
            bad_primes: pres.bad_primes(),
        })
    }

    pub fn dim(&self) -> usize {
        self.ctx_p.dim
    }

    /// i(v) = v^p - v^{[p]} for v in the Lie algebra, over F_p.
    pub fn p_center_image(&self, v: &[u64]) -> Uea {
        let vp = Uea::from_lin(&self.ctx_p, v).pow(self.p);
        let pow = self.restricted.pmap_extend(v);
        vp.sub(&Uea::from_lin(&self.ctx_p, &pow))
    }

    /// Multiplicative extension of the p-center map to Sym over F_p:
    /// a monomial x^a goes to prod i(x_j)^{a_j}; scalars are fixed by the
    /// Frobenius on F_p-points.
    pub fn p_center_embed(&self, s: &SymElement) -> Result<Uea> {
        if s.ring != Ring::ModP(self.p) {
            return Err(Error::RingMismatch(
                s.ring.to_string(),
                Ring::ModP(self.p).to_string(),
            ));
        }
        let mut out = Uea::zero(&self.ctx_p);
        for (m, c) in &s.terms {
            let mut part = Uea::one(&self.ctx_p);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut unit = vec![0u64; self.dim()];
                unit[i] = 1;
                part = part.mul(&self.p_center_image(&unit).pow(e as u64));
            }
            out = out.add(&part.scale(c));
        }
        Ok(out)
    }

    fn lift(&self, a: &Uea) -> Uea {
        a.convert(&self.ctx_p2, lift_canonical)
            .expect("input over F_p")
    }

    /// {a, b} = (1/p)[lift a, lift b] mod p, with canonical coefficient
    /// lifts. A divisibility failure means an input was not central.
    pub fn deformation_bracket(&self, a: &Uea, b: &Uea) -> Result<Uea> {
        let comm = self.lift(a).commutator(&self.lift(b));
        comm.convert(&self.ctx_p, divide_exact_by_p)
    }

    /// Same bracket with the canonical lifts offset by p times arbitrary
    /// elements; the result must not depend on the offsets when the inputs
    /// are central.
    pub fn deformation_bracket_offset(
        &self,
        a: &Uea,
        b: &Uea,
        ra: &Uea,
        rb: &Uea,
    ) -> Result<Uea> {
        let p2 = Ring::ModPSq(self.p);
        let pscale = Scalar::from_u64(p2, self.p);
        let za = self.lift(a).add(&self.lift(ra).scale(&pscale));
        let zb = self.lift(b).add(&self.lift(rb).scale(&pscale));
        za.commutator(&zb).convert(&self.ctx_p, divide_exact_by_p)
    }
}

/// Echelon basis of Z(Ug_p) within filtration degree <= d, in monomial
/// coordinates, plus counit values of the rows.
pub struct CenterChunk {
    pub p: u64,
    pub d: usize,
    pub basis: EchelonBasis,
    pub counits: Vec<u64>,
    pub mbasis: MonomialBasis,
    pub ctx: Arc<UeaCtx>,
}

impl CenterChunk {
    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn element(&self, row: usize) -> Uea {
        Uea::from_vector(&self.ctx, &self.mbasis, &self.basis.rows[row])
    }

    /// dim of the center intersected with filtration degree <= e.
    pub fn filtered_dim(&self, e: usize) -> usize {
        let high: Vec<usize> = (0..self.mbasis.len())
            .filter(|&i| self.mbasis.monomials[i].degree() > e)
            .collect();
        self.basis.rank() - self.basis.rank_on_columns(&high)
    }

    /// Re-checks centrality of every row; returns offending row indices.
    pub fn certify(&self, env: &ModularEnv) -> Vec<usize> {
        let mut bad = Vec::new();
        for r in 0..self.dim() {
            let u = self.element(r);
            for i in 0..env.dim() {
                if !u.commutator(&Uea::generator(&env.ctx_p, i)).is_zero() {
                    bad.push(r);
                    break;
                }
            }
        }
        bad
    }
}

/// Center of the enveloping algebra within degree <= d, as the simultaneous
/// kernel of ad(x_i) over all basis generators (sufficient: ad extends to
/// derivations, so killing the generators kills the whole algebra action).
pub fn center_basis(env: &ModularEnv, d: usize, limit: usize) -> Result<CenterChunk> {
    let l = env.dim();
    let mbasis = MonomialBasis::new(l, d, limit)?;
    let n = mbasis.len();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for i in 0..l {
        let gen = Uea::generator(&env.ctx_p, i);
        // ad(x_i) preserves the filtration, so columns stay within the cap
        let mut mat = vec![vec![0u64; n]; n];
        for (cm, m) in mbasis.monomials.iter().enumerate() {
            let mono = Uea::monomial(&env.ctx_p, m.clone(), Scalar::one(env.ctx_p.ring));
            let image = gen.commutator(&mono).vectorize(&mbasis)?;
            for (t, &x) in image.iter().enumerate() {
                mat[t][cm] = x;
            }
        }
        rows.extend(mat.into_iter().filter(|r| r.iter().any(|&x| x != 0)));
    }
    let basis = nullspace(env.p, &rows, n)?;
    let counits = basis.rows.iter().map(|r| r[0]).collect();
    Ok(CenterChunk {
        p: env.p,
        d,
        basis,
        counits,
        mbasis,
        ctx: env.ctx_p.clone(),
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KacRadulReport {
    pub basis_pairs: usize,
    pub sampled_pairs: usize,
    pub witnesses: Vec<String>,
}

impl KacRadulReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Verifies {i(a), i(b)} = -i([a, b]) for all basis pairs and a sample of
/// random pairs.
pub fn kac_radul_check(
    env: &ModularEnv,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<KacRadulReport> {
    let l = env.dim();
    let p = env.p;
    let mut witnesses = Vec::new();
    let mut basis_pairs = 0;
    let mut check = |a: &[u64], b: &[u64], label: String| -> Result<()> {
        let lhs = env.deformation_bracket(&env.p_center_image(a), &env.p_center_image(b))?;
        let w = env.restricted.fp.bracket_vec(a, b);
        let rhs = env.p_center_image(&w).neg();
        if lhs != rhs {
            witnesses.push(label);
        }
        Ok(())
    };
    for i in 0..l {
        for j in (i + 1)..l {
            let mut a = vec![0u64; l];
            let mut b = vec![0u64; l];
            a[i] = 1;
            b[j] = 1;
            check(&a, &b, format!("basis pair ({}, {})", i, j))?;
            basis_pairs += 1;
        }
    }
    for s in 0..samples {
        let a: Vec<u64> = (0..l).map(|_| rng.gen_range(0..p)).collect();
        let b: Vec<u64> = (0..l).map(|_| rng.gen_range(0..p)).collect();
        check(&a, &b, format!("sample {} ({:?}, {:?})", s, a, b))?;
    }
    Ok(KacRadulReport { basis_pairs, sampled_pairs: samples, witnesses })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FreenessReport {
    pub degree_cap: usize,
    /// (degree, dim of center slice, predicted count) per degree.
    pub per_degree: Vec<(usize, usize, i64)>,
    pub products_independent: bool,
    pub first_mismatch: Option<usize>,
}

impl FreenessReport {
    pub fn passed(&self) -> bool {
        self.products_independent && self.first_mismatch.is_none()
    }
}

/// Compares the filtered dimensions of the center against the module basis
/// {i(Sym monomial) . g^alpha, 0 <= alpha_i < p} predicted by freeness over
/// the p-center.
pub fn center_freeness_report(
    env: &ModularEnv,
    chunk: &CenterChunk,
    generators: &[Uea],
    d: usize,
) -> Result<FreenessReport> {
    let p = env.p;
    let l = env.dim();
    for (k, g) in generators.iter().enumerate() {
        for i in 0..l {
            if !g.commutator(&Uea::generator(&env.ctx_p, i)).is_zero() {
                return Err(Error::NotCentral(format!("generator {}", k)));
            }
        }
    }
    let gdegs: Vec<usize> = generators.iter().map(|g| g.degree()).collect();
    // all exponent profiles alpha with alpha_i < p and weighted degree <= d
    let mut alphas: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..generators.len() {
        let mut next = Vec::new();
        for a in &alphas {
            for e in 0..p {
                let mut b = a.clone();
                b.push(e);
                next.push(b);
            }
        }
        alphas = next;
    }
    let mut products: Vec<(usize, Vec<u64>)> = Vec::new();
    for alpha in &alphas {
        let wdeg: usize = alpha
            .iter()
            .zip(&gdegs)
            .map(|(&a, &dg)| a as usize * dg)
            .sum();
        if wdeg > d {
            continue;
        }
        let mut galpha = Uea::one(&env.ctx_p);
        for (g, &a) in generators.iter().zip(alpha) {
            galpha = galpha.mul(&g.pow(a));
        }
        let budget = (d - wdeg) / p as usize;
        let sym_basis = MonomialBasis::new(l, budget, usize::MAX)?;
        for m in &sym_basis.monomials {
            let s = SymElement {
                ring: Ring::ModP(p),
                dim: l,
                terms: [(m.clone(), Scalar::one(Ring::ModP(p)))].into_iter().collect(),
            };
            let prod = env.p_center_embed(&s)?.mul(&galpha);
            let deg = p as usize * m.degree() + wdeg;
            products.push((deg, prod.vectorize(&chunk.mbasis)?));
        }
    }
    let mut span = EchelonBasis::empty(p, chunk.mbasis.len());
    let mut independent = true;
    for (_, v) in &products {
        if span.insert(v).is_none() {
            independent = false;
        }
    }
    let mut per_degree = Vec::new();
    let mut first_mismatch = None;
    for e in 0..=d {
        let actual = chunk.filtered_dim(e);
        let predicted = products.iter().filter(|(deg, _)| *deg <= e).count() as i64;
        if actual as i64 != predicted && first_mismatch.is_none() {
            first_mismatch = Some(e);
        }
        per_degree.push((e, actual, predicted));
    }
    Ok(FreenessReport {
        degree_cap: d,
        per_degree,
        products_independent: independent,
        first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::files::builtin_presentation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn env(name: &str, p: u64) -> ModularEnv {
        ModularEnv::new(&builtin_presentation(name).unwrap(), p).unwrap()
    }

    fn casimir(ctx: &Arc<UeaCtx>) -> Uea {
        let e = Uea::generator(ctx, 0);
        let f = Uea::generator(ctx, 1);
        let h = Uea::generator(ctx, 2);
        f.mul(&e)
            .scale(&Scalar::from_u64(ctx.ring, 4))
            .add(&h.mul(&h))
            .add(&h.scale(&Scalar::from_u64(ctx.ring, 2)))
    }

    #[test]
    fn p_center_image_sl2() {
        let env = env("sl2", 5);
        // h -> h^5 - h, e -> e^5
        let h_img = env.p_center_image(&[0, 0, 1]);
        let h = Uea::generator(&env.ctx_p, 2);
        assert_eq!(h_img, h.pow(5).sub(&h));
        let e_img = env.p_center_image(&[1, 0, 0]);
        assert_eq!(e_img, Uea::generator(&env.ctx_p, 0).pow(5));
        // centrality
        for img in [&h_img, &e_img] {
            for i in 0..3 {
                assert!(img.commutator(&Uea::generator(&env.ctx_p, i)).is_zero());
            }
        }
    }

    #[test]
    fn p_center_image_abelian() {
        let env = env("abelian2", 3);
        let v = env.p_center_image(&[1, 2]);
        assert_eq!(v, Uea::from_lin(&env.ctx_p, &[1, 2]).pow(3));
    }

    #[test]
    fn p_center_image_is_additive() {
        // i(a + b) = i(a) + i(b): the Jacobson corrections of (a+b)^{[p]}
        // must cancel against the cross terms of (a+b)^p
        for (name, p) in [("sl2", 3), ("heis3", 3), ("b2", 3)] {
            let env = env(name, p);
            let l = env.dim();
            for i in 0..l {
                for j in (i + 1)..l {
                    let mut a = vec![0u64; l];
                    let mut b = vec![0u64; l];
                    a[i] = 1;
                    b[j] = 2;
                    let mut ab = vec![0u64; l];
                    ab[i] = 1;
                    ab[j] = 2;
                    let got = env.p_center_image(&ab);
                    let expect = env.p_center_image(&a).add(&env.p_center_image(&b));
                    assert_eq!(got, expect, "{} pair ({}, {})", name, i, j);
                }
            }
        }
    }

    #[test]
    fn p_center_embed_multiplies() {
        let env = env("sl2", 5);
        let r = Ring::ModP(5);
        let ef = SymElement::variable(r, 3, 0).mul(&SymElement::variable(r, 3, 1));
        let got = env.p_center_embed(&ef).unwrap();
        let expect = env
            .p_center_image(&[1, 0, 0])
            .mul(&env.p_center_image(&[0, 1, 0]));
        assert_eq!(got, expect);
        assert_eq!(
            env.p_center_embed(&SymElement::one(r, 3)).unwrap(),
            Uea::one(&env.ctx_p)
        );
    }

    #[test]
    fn center_basis_sl2_p3() {
        let env = env("sl2", 3);
        let chunk = center_basis(&env, 3, 100_000).unwrap();
        assert_eq!(chunk.dim(), 5);
        assert!(chunk.certify(&env).is_empty());
        // span contains 1, Delta, e^3, f^3, h^3 - h
        let candidates = [
            Uea::one(&env.ctx_p),
            casimir(&env.ctx_p),
            Uea::generator(&env.ctx_p, 0).pow(3),
            Uea::generator(&env.ctx_p, 1).pow(3),
            Uea::generator(&env.ctx_p, 2)
                .pow(3)
                .sub(&Uea::generator(&env.ctx_p, 2)),
        ];
        let mut span = EchelonBasis::empty(3, chunk.mbasis.len());
        for c in &candidates {
            let v = c.vectorize(&chunk.mbasis).unwrap();
            assert!(chunk.basis.contains(&v));
            span.insert(&v);
        }
        assert_eq!(span.rank(), 5);
    }

    #[test]
    fn center_basis_trivial_cases() {
        let env2 = env("abelian2", 3);
        let chunk = center_basis(&env2, 2, 100_000).unwrap();
        assert_eq!(chunk.dim(), 6);
        let env3 = env("heis3", 3);
        let chunk3 = center_basis(&env3, 1, 100_000).unwrap();
        // {1, z}
        assert_eq!(chunk3.dim(), 2);
        let z = Uea::generator(&env3.ctx_p, 2).vectorize(&chunk3.mbasis).unwrap();
        assert!(chunk3.basis.contains(&z));
    }

    #[test]
    fn filtered_dims_sl2_p3() {
        let env = env("sl2", 3);
        let chunk = center_basis(&env, 6, 200_000).unwrap();
        let dims: Vec<usize> = (0..=6).map(|e| chunk.filtered_dim(e)).collect();
        // free-module count over degrees 0..6 for generators of degree 3
        // (p-center) and 2 (Casimir powers < 3)
        assert_eq!(dims, vec![1, 1, 2, 5, 6, 9, 15]);
    }

    #[test]
    fn deformation_bracket_examples() {
        let env = env("sl2", 5);
        let z = env.p_center_image(&[0, 0, 1]); // h^5 - h
        let x = env.p_center_image(&[1, 0, 0]); // e^5
        let got = env.deformation_bracket(&z, &x).unwrap();
        // {h^p - h, e^p} = -2 e^5: equals -i([h, e]) = -i(2e) = -(2e)^5 = -32 e^5
        let expect = Uea::generator(&env.ctx_p, 0)
            .pow(5)
            .scale(&Scalar::from_i64(Ring::ModP(5), -2));
        assert_eq!(got, expect);
        // antisymmetry on the diagonal
        assert!(env.deformation_bracket(&z, &z).unwrap().is_zero());
    }

    #[test]
    fn deformation_bracket_heisenberg_z_is_poisson_central() {
        let env = env("heis3", 3);
        let x3 = env.p_center_image(&[1, 0, 0]);
        let z = Uea::generator(&env.ctx_p, 2);
        assert!(env.deformation_bracket(&x3, &z).unwrap().is_zero());
        // and {x^3, y^3} = -z^3
        let y3 = env.p_center_image(&[0, 1, 0]);
        let got = env.deformation_bracket(&x3, &y3).unwrap();
        assert_eq!(got, Uea::generator(&env.ctx_p, 2).pow(3).neg());
    }

    #[test]
    fn non_central_inputs_fail_divisibility() {
        let env = env("sl2", 5);
        let e = Uea::generator(&env.ctx_p, 0);
        let f = Uea::generator(&env.ctx_p, 1);
        assert!(matches!(
            env.deformation_bracket(&e, &f),
            Err(Error::NotDivisible(_))
        ));
    }

    #[test]
    fn lift_independence() {
        let env = env("sl2", 3);
        let a = env.p_center_image(&[0, 0, 1]);
        let b = casimir(&env.ctx_p);
        let base = env.deformation_bracket(&a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let ra = Uea::from_lin(
                &env.ctx_p,
                &[rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)],
            )
            .pow(2);
            let rb = Uea::generator(&env.ctx_p, rng.gen_range(0..3));
            let got = env.deformation_bracket_offset(&a, &b, &ra, &rb).unwrap();
            assert_eq!(got, base);
        }
    }

    #[test]
    fn deformation_bracket_leibniz() {
        let env = env("sl2", 3);
        let a = env.p_center_image(&[0, 0, 1]);
        let b = casimir(&env.ctx_p);
        let c = env.p_center_image(&[1, 0, 0]);
        let lhs = env.deformation_bracket(&a, &b.mul(&c)).unwrap();
        let rhs = env
            .deformation_bracket(&a, &b)
            .unwrap()
            .mul(&c)
            .add(&b.mul(&env.deformation_bracket(&a, &c).unwrap()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn kac_radul_small_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (name, p) in [("sl2", 3u64), ("heis3", 3), ("heis3", 5), ("b2", 3), ("abelian2", 3)] {
            let env = env(name, p);
            let report = kac_radul_check(&env, 3, &mut rng).unwrap();
            assert!(report.passed(), "{} p={} witnesses {:?}", name, p, report.witnesses);
        }
    }

    #[test]
    fn freeness_sl2_p3() {
        let env = env("sl2", 3);
        let chunk = center_basis(&env, 4, 200_000).unwrap();
        let delta = casimir(&env.ctx_p);
        let report = center_freeness_report(&env, &chunk, &[delta.clone()], 4).unwrap();
        assert!(report.passed(), "{:?}", report);
        // a wrong generator (Delta^2) misses Delta itself at degree 2
        let report2 = center_freeness_report(&env, &chunk, &[delta.mul(&delta)], 4).unwrap();
        assert!(!report2.passed());
        assert_eq!(report2.first_mismatch, Some(2));
    }

    #[test]
    fn freeness_rejects_non_central_generator() {
        let env = env("sl2", 3);
        let chunk = center_basis(&env, 3, 100_000).unwrap();
        let e = Uea::generator(&env.ctx_p, 0);
        assert!(matches!(
            center_freeness_report(&env, &chunk, &[e], 3),
            Err(Error::NotCentral(_))
        ));
    }

    #[test]
    fn freeness_abelian_rank_one() {
        let env = env("abelian2", 3);
        let chunk = center_basis(&env, 2, 100_000).unwrap();
        // no extra generators: predicted count is i(Sym) only
        let report = center_freeness_report(&env, &chunk, &[], 2).unwrap();
        // center is everything (dim 6 at d=2) but i(Sym) gives only constants
        // below degree 3, so freeness fails at degree 1 — the chosen
        // generator list (none) does not generate; this documents that the
        // report tests the supplied generators, not an intrinsic property
        assert_eq!(report.first_mismatch, Some(1));
    }
}
