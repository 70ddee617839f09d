#[test]
fn sl3_invariants_are_central_generators() {
    use modlie::center::ModularEnv;
    use modlie::cotangent::invariant_generators;
    use modlie::files::builtin_presentation;
    let pres = builtin_presentation("sl3").unwrap();
    for p in [3u64, 5] {
        let env = ModularEnv::new(&pres, p).unwrap();
        let gens = invariant_generators(&pres, &env).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].degree(), 2);
        assert_eq!(gens[1].degree(), 3);
    }
}
