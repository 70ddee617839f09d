//! Randomized property suites over the small bundled algebras.

use modlie::center::ModularEnv;
use modlie::files::builtin_presentation;
use modlie::pbw::{Monomial, Uea, UeaCtx};
use modlie::scalar::{Ring, Scalar};
use modlie::sym::{kk_bracket, symmetrize, SymElement};
use num_rational::BigRational;
use num_traits::FromPrimitive;
use proptest::prelude::*;
use std::sync::Arc;

const ALGEBRAS: &[&str] = &["sl2", "heis3", "b2"];

fn ctx_for(idx: usize, p: u64) -> Arc<UeaCtx> {
    let pres = builtin_presentation(ALGEBRAS[idx % ALGEBRAS.len()]).unwrap();
    UeaCtx::from_presentation(&pres, Ring::ModP(p)).unwrap()
}

fn element(ctx: &Arc<UeaCtx>, terms: &[(Vec<u32>, u64)]) -> Uea {
    let mut u = Uea::zero(ctx);
    for (exps, c) in terms {
        let exps: Vec<u32> = (0..ctx.dim).map(|i| exps.get(i).copied().unwrap_or(0) % 3).collect();
        u = u.add(&Uea::monomial(
            ctx,
            Monomial(exps),
            Scalar::from_u64(ctx.ring, *c),
        ));
    }
    u
}

fn sym_element(ctx: &Arc<UeaCtx>, terms: &[(Vec<u32>, u64)]) -> SymElement {
    let mut s = SymElement::zero(ctx.ring, ctx.dim);
    for (exps, c) in terms {
        let exps: Vec<u32> = (0..ctx.dim).map(|i| exps.get(i).copied().unwrap_or(0) % 2).collect();
        s.add_term(Monomial(exps), Scalar::from_u64(ctx.ring, *c));
    }
    s
}

fn terms_strategy() -> impl Strategy<Value = Vec<(Vec<u32>, u64)>> {
    proptest::collection::vec(
        (proptest::collection::vec(0u32..3, 3), 0u64..7),
        1..4,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(
        idx in 0usize..3,
        ta in terms_strategy(),
        tb in terms_strategy(),
        tc in terms_strategy(),
    ) {
        let ctx = ctx_for(idx, 7);
        let a = element(&ctx, &ta);
        let b = element(&ctx, &tb);
        let c = element(&ctx, &tc);
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn commutator_satisfies_jacobi(
        idx in 0usize..3,
        ta in terms_strategy(),
        tb in terms_strategy(),
        tc in terms_strategy(),
    ) {
        let ctx = ctx_for(idx, 5);
        let a = element(&ctx, &ta);
        let b = element(&ctx, &tb);
        let c = element(&ctx, &tc);
        let j = a.commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn counit_is_multiplicative(
        idx in 0usize..3,
        ta in terms_strategy(),
        tb in terms_strategy(),
    ) {
        let ctx = ctx_for(idx, 5);
        let a = element(&ctx, &ta);
        let b = element(&ctx, &tb);
        let ea = a.counit();
        let eb = b.counit();
        prop_assert_eq!(a.mul(&b).counit(), ea.mul(&eb));
    }

    #[test]
    fn kk_bracket_leibniz_and_antisymmetry(
        idx in 0usize..3,
        ta in terms_strategy(),
        tb in terms_strategy(),
        tc in terms_strategy(),
    ) {
        let ctx = ctx_for(idx, 7);
        let a = sym_element(&ctx, &ta);
        let b = sym_element(&ctx, &tb);
        let c = sym_element(&ctx, &tc);
        let lhs = kk_bracket(&ctx, &a.mul(&b), &c);
        let rhs = a.mul(&kk_bracket(&ctx, &b, &c)).add(&kk_bracket(&ctx, &a, &c).mul(&b));
        prop_assert_eq!(lhs, rhs);
        let anti = kk_bracket(&ctx, &a, &b).add(&kk_bracket(&ctx, &b, &a));
        prop_assert!(anti.is_zero());
    }

    #[test]
    fn symmetrization_is_linear_over_q(
        idx in 0usize..3,
        ta in terms_strategy(),
        tb in terms_strategy(),
        k in 1u64..5,
    ) {
        let pres = builtin_presentation(ALGEBRAS[idx % ALGEBRAS.len()]).unwrap();
        let ctx = UeaCtx::from_presentation(&pres, Ring::Rational).unwrap();
        let to_sym = |terms: &[(Vec<u32>, u64)]| {
            let mut s = SymElement::zero(Ring::Rational, ctx.dim);
            for (exps, c) in terms {
                let exps: Vec<u32> =
                    (0..ctx.dim).map(|i| exps.get(i).copied().unwrap_or(0) % 2).collect();
                s.add_term(
                    Monomial(exps),
                    Scalar::Rational(BigRational::from_u64(*c).unwrap()),
                );
            }
            s
        };
        let a = to_sym(&ta);
        let b = to_sym(&tb);
        let kk = Scalar::Rational(BigRational::from_u64(k).unwrap());
        let lhs = symmetrize(&ctx, &a.scale(&kk).add(&b)).unwrap();
        let rhs = symmetrize(&ctx, &a).unwrap().scale(&kk).add(&symmetrize(&ctx, &b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kac_radul_on_random_vectors(
        idx in 0usize..3,
        a in proptest::collection::vec(0u64..5, 3),
        b in proptest::collection::vec(0u64..5, 3),
    ) {
        let pres = builtin_presentation(ALGEBRAS[idx % ALGEBRAS.len()]).unwrap();
        let env = ModularEnv::new(&pres, 5).unwrap();
        let l = env.dim();
        let av: Vec<u64> = (0..l).map(|i| a.get(i).copied().unwrap_or(0)).collect();
        let bv: Vec<u64> = (0..l).map(|i| b.get(i).copied().unwrap_or(0)).collect();
        let lhs = env
            .deformation_bracket(&env.p_center_image(&av), &env.p_center_image(&bv))
            .unwrap();
        let w = env.restricted.fp.bracket_vec(&av, &bv);
        let rhs = env.p_center_image(&w).neg();
        prop_assert_eq!(lhs, rhs);
    }
}
