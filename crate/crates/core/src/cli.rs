//! Command-line front end: argument parsing, prime sweeps, and assembly of
//! the canonical reports. All numeric output goes through the report; the
//! only other channels are usage errors and the exit code.

use crate::center::{center_basis, center_freeness_report, kac_radul_check, ModularEnv};
use crate::cotangent::{
    automorphism_images_mod_p, character_twist, charpoly_sweep, compare_invariants,
    cotangent_algebra, invariant_generators, matrix_on_g, induced_automorphism,
    verify_automorphism, CotangentKind, DEFAULT_MONOMIAL_LIMIT,
};
use crate::error::{Error, Result};
use crate::files::{AutomorphismFile, BUILTIN_ALGEBRAS, BUILTIN_AUTOMORPHISMS};
use crate::lie::{Character, LiePresentation, Restricted};
use crate::pbw::{Monomial, Uea};
use crate::report::{sha256_hex, Report};
use crate::scalar::{is_prime, Ring, Scalar};
use crate::sym::{regular_sequence_probe, SymElement};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "modlie", version, about = "Exact modular Lie theory toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an algebra file; check antisymmetry, Jacobi, realization and
    /// restricted structure at each requested prime.
    Validate {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Basis of the center of the mod-p enveloping algebra up to a degree.
    Center {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Filtered dimensions of the center against the free-module prediction.
    Freeness {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Comma-separated invariant names to use as generators (default all).
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Check {i(a), i(b)} = -i([a, b]) on basis pairs and random samples.
    KacRadul {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Cotangent Lie algebra of the center (m/m^2 or n/n^2) at each prime.
    Cotangent {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value = "m")]
        kind: String,
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Verify the sl2 center relation
    /// (D+1)^p - 2(D+1)^{(p+1)/2} + (D+1) = 4xy + z^2.
    Sl2Suite {
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Twist the augmentation ideal by characters of a nilpotent algebra and
    /// verify the induced cotangent isomorphism.
    Twist {
        #[arg(long)]
        algebra: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Explicit characters, semicolon-separated value lists ("1,0,0;2,0,0").
        #[arg(long)]
        characters: Option<String>,
        /// Random characters per prime when none are given explicitly.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Matrix induced on the cotangent by a generator-image morphism.
    InducedAut {
        #[arg(long)]
        algebra: String,
        /// Automorphism file (or builtin name) with generator images.
        #[arg(long)]
        images: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value = "n")]
        kind: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Characteristic polynomials of the induced matrix across primes, with
    /// the identity-kernel verdict.
    CharpolySweep {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        images: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Invariant tables of the cotangent algebras of two inputs.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(short, long)]
        primes: Option<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Bounded-degree regular-sequence probe on the declared invariants.
    ProbeAssumption {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        /// Probe mod this prime instead of over the rationals.
        #[arg(short, long)]
        prime: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
}

struct AlgebraInput {
    spec: String,
    text: String,
    pres: LiePresentation,
}

fn load_algebra_input(spec: &str) -> Result<AlgebraInput> {
    let text = match BUILTIN_ALGEBRAS.iter().find(|(n, _)| *n == spec) {
        Some((_, t)) => t.to_string(),
        None => std::fs::read_to_string(spec)?,
    };
    let pres = crate::files::parse_algebra(&text)?;
    Ok(AlgebraInput { spec: spec.to_string(), text, pres })
}

fn load_automorphism_input(spec: &str) -> Result<(String, AutomorphismFile)> {
    let text = match BUILTIN_AUTOMORPHISMS.iter().find(|(n, _)| *n == spec) {
        Some((_, t)) => t.to_string(),
        None => std::fs::read_to_string(spec)?,
    };
    Ok((text.clone(), crate::files::parse_automorphism(&text)?))
}

fn parse_primes(s: Option<&str>) -> Result<Vec<u64>> {
    let s = s.unwrap_or("3,5,7");
    if let Some(k) = s.strip_prefix("first:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime count {:?}", k)))?;
        let mut out = Vec::new();
        let mut p = 3u64;
        while out.len() < k {
            if is_prime(p) {
                out.push(p);
            }
            p += 2;
        }
        return Ok(out);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad prime {:?}", t)))
        })
        .collect()
}

fn parse_kind(s: &str) -> Result<CotangentKind> {
    match s {
        "m" | "M" => Ok(CotangentKind::M),
        "n" | "N" => Ok(CotangentKind::N),
        other => Err(Error::Parse(format!("kind must be m or n, got {:?}", other))),
    }
}

/// Splits the requested primes into usable ones and skip warnings.
fn usable_primes(pres: &LiePresentation, primes: &[u64], warnings: &mut Vec<String>) -> Vec<u64> {
    let bad = pres.bad_primes();
    let mut out = Vec::new();
    for &p in primes {
        if !is_prime(p) || p < 3 {
            warnings.push(format!("prime {} excluded by the p >= 3 policy", p));
        } else if bad.contains(&p) {
            warnings.push(format!("prime {} excluded: bad reduction of the input", p));
        } else {
            if p as usize <= pres.dim() {
                warnings.push(format!(
                    "p = {} <= dim = {}: small-prime regime, conclusions are computational only",
                    p,
                    pres.dim()
                ));
            }
            out.push(p);
        }
    }
    out
}

fn base_warnings(pres: &LiePresentation, warnings: &mut Vec<String>) {
    let bad = pres.bad_primes();
    if !bad.is_empty() {
        warnings.push(format!("bad primes of the input: {:?}", bad));
    }
    if pres.assumption_asserted {
        warnings.push(
            "assumption-asserted: the declared invariants are asserted (not proved here) to \
             generate the invariant ring"
                .to_string(),
        );
    }
}

fn format_scalar(c: &Scalar) -> String {
    match c {
        Scalar::Rational(q) => q.to_string(),
        _ => c.residue().map(|r| r.to_string()).unwrap_or_else(|| "?".into()),
    }
}

fn format_uea(u: &Uea, names: &[String]) -> String {
    if u.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in &u.terms {
        let mut factors = Vec::new();
        let coeff = format_scalar(c);
        if m.degree() == 0 {
            parts.push(coeff);
            continue;
        }
        if coeff != "1" {
            factors.push(coeff);
        }
        for (i, &e) in m.0.iter().enumerate() {
            if e == 1 {
                factors.push(names[i].clone());
            } else if e > 1 {
                factors.push(format!("{}^{}", names[i], e));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

/// Named subset of the declared invariants, symmetrized and reduced mod p.
fn selected_generators(
    pres: &LiePresentation,
    env: &ModularEnv,
    names: Option<&str>,
) -> Result<Vec<Uea>> {
    let all = invariant_generators(pres, env)?;
    match names {
        None => Ok(all),
        Some(list) => {
            let wanted: Vec<&str> = list.split(',').map(|s| s.trim()).collect();
            let mut out = Vec::new();
            for w in wanted {
                let idx = pres
                    .invariants
                    .iter()
                    .position(|inv| inv.name == w)
                    .ok_or_else(|| Error::Parse(format!("unknown invariant {:?}", w)))?;
                out.push(all[idx].clone());
            }
            Ok(out)
        }
    }
}

fn set_algebra_inputs(report: &mut Report, input: &AlgebraInput) {
    report.inputs.algebra = Some(input.spec.clone());
    report.inputs.algebra_sha256 = Some(sha256_hex(&input.text));
    report.inputs.basis = Some(input.pres.basis.clone());
}

fn verdict_exit(verdict: &str) -> i32 {
    if verdict == "FAIL" {
        1
    } else {
        0
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Validate { algebra, primes, out } => cmd_validate(&algebra, primes.as_deref(), out.as_deref()),
        Command::Center { algebra, primes, max_degree, out } => {
            cmd_center(&algebra, primes.as_deref(), max_degree, out.as_deref())
        }
        Command::Freeness { algebra, primes, max_degree, generators, out } => cmd_freeness(
            &algebra,
            primes.as_deref(),
            max_degree,
            generators.as_deref(),
            out.as_deref(),
        ),
        Command::KacRadul { algebra, primes, samples, seed, out } => {
            cmd_kac_radul(&algebra, primes.as_deref(), samples, seed, out.as_deref())
        }
        Command::Cotangent { algebra, primes, max_degree, kind, generators, out } => cmd_cotangent(
            &algebra,
            primes.as_deref(),
            max_degree,
            &kind,
            generators.as_deref(),
            out.as_deref(),
        ),
        Command::Sl2Suite { primes, out } => cmd_sl2_suite(primes.as_deref(), out.as_deref()),
        Command::Twist { algebra, primes, max_degree, characters, samples, seed, out } => cmd_twist(
            &algebra,
            primes.as_deref(),
            max_degree,
            characters.as_deref(),
            samples,
            seed,
            out.as_deref(),
        ),
        Command::InducedAut { algebra, images, primes, max_degree, kind, out } => cmd_induced_aut(
            &algebra,
            &images,
            primes.as_deref(),
            max_degree,
            &kind,
            out.as_deref(),
        ),
        Command::CharpolySweep { algebra, images, primes, max_degree, out } => cmd_charpoly_sweep(
            &algebra,
            &images,
            primes.as_deref(),
            max_degree,
            out.as_deref(),
        ),
        Command::Compare { a, b, primes, max_degree, out } => {
            cmd_compare(&a, &b, primes.as_deref(), max_degree, out.as_deref())
        }
        Command::ProbeAssumption { algebra, max_degree, prime, out } => {
            cmd_probe(&algebra, max_degree, prime, out.as_deref())
        }
    }
}

fn cmd_validate(algebra: &str, primes: Option<&str>, out: Option<&str>) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("validate");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    base_warnings(&input.pres, &mut report.warnings);
    let v = input.pres.validate();
    let mut restricted_entries = Vec::new();
    let mut all_ok = v.passed();
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let entry = match Restricted::new(&input.pres, p) {
            Ok(r) => {
                let rr = crate::lie::verify_restricted(&r, &input.pres);
                all_ok &= rr.passed();
                json!({
                    "prime": p,
                    "ok": rr.passed(),
                    "ad_witnesses": rr.ad_witnesses,
                    "realization_witnesses": rr.realization_witnesses,
                })
            }
            Err(e) => {
                report
                    .warnings
                    .push(format!("prime {}: restricted structure unavailable ({})", p, e));
                json!({ "prime": p, "ok": Value::Null, "skipped": e.to_string() })
            }
        };
        restricted_entries.push(entry);
    }
    report.results = json!({
        "antisymmetry_witness": v.antisymmetry_witness,
        "jacobi_witness": v.jacobi_witness,
        "realization_witness": v.realization_witness,
        "has_realization": v.has_realization,
        "bad_primes": input.pres.bad_primes(),
        "restricted": restricted_entries,
    });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_center(
    algebra: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("center");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    base_warnings(&input.pres, &mut report.warnings);
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let d = max_degree.unwrap_or(2 * p as usize);
        let chunk = center_basis(&env, d, DEFAULT_MONOMIAL_LIMIT)?;
        let noncentral = chunk.certify(&env);
        all_ok &= noncentral.is_empty();
        let basis_strings: Vec<String> = (0..chunk.dim())
            .map(|r| format_uea(&chunk.element(r), &input.pres.basis))
            .collect();
        let filtered: Vec<usize> = (0..=d).map(|e| chunk.filtered_dim(e)).collect();
        entries.push(json!({
            "prime": p,
            "max_degree": d,
            "dimension": chunk.dim(),
            "filtered_dims": filtered,
            "basis": basis_strings,
            "noncentral_rows": noncentral,
        }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_freeness(
    algebra: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    generators: Option<&str>,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("freeness");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    if let Some(g) = generators {
        report.inputs.extra.insert("generators".into(), Value::from(g));
    }
    base_warnings(&input.pres, &mut report.warnings);
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let d = max_degree.unwrap_or(2 * p as usize);
        let chunk = center_basis(&env, d, DEFAULT_MONOMIAL_LIMIT)?;
        let gens = selected_generators(&input.pres, &env, generators)?;
        let fr = center_freeness_report(&env, &chunk, &gens, d)?;
        all_ok &= fr.passed();
        entries.push(json!({ "prime": p, "report": fr, "passed": fr.passed() }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_kac_radul(
    algebra: &str,
    primes: Option<&str>,
    samples: usize,
    seed: u64,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("kac-radul");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.extra.insert("samples".into(), Value::from(samples));
    report.provenance.seed = Some(seed);
    base_warnings(&input.pres, &mut report.warnings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let kr = kac_radul_check(&env, samples, &mut rng)?;
        all_ok &= kr.passed();
        entries.push(json!({ "prime": p, "report": kr, "passed": kr.passed() }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_cotangent(
    algebra: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    kind: &str,
    generators: Option<&str>,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let kind = parse_kind(kind)?;
    let mut report = Report::new("cotangent");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    report
        .inputs
        .extra
        .insert("kind".into(), Value::from(format!("{:?}", kind)));
    if let Some(g) = generators {
        report.inputs.extra.insert("generators".into(), Value::from(g));
    }
    base_warnings(&input.pres, &mut report.warnings);
    let mut entries = Vec::new();
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let d = max_degree.unwrap_or(2 * p as usize + 2);
        let gens = match kind {
            CotangentKind::M => Vec::new(),
            CotangentKind::N => selected_generators(&input.pres, &env, generators)?,
        };
        let cot = cotangent_algebra(&env, &gens, d, kind, false)?;
        let rep_strings: Vec<String> = cot
            .reps
            .iter()
            .map(|u| format_uea(u, &input.pres.basis))
            .collect();
        entries.push(json!({
            "prime": p,
            "max_degree": d,
            "dimension": cot.dim,
            "table": cot.fp.table,
            "representatives": rep_strings,
            "canonical_map": cot.canonical,
            "canonical_bijective": cot.canonical_bijective(),
            "canonical_is_hom": cot.canonical_hom_witness(&env.restricted.fp).is_none(),
            "center_dim": cot.fp.center_dim(),
        }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = "PASS".to_string();
    report.emit(out)?;
    Ok(0)
}

/// The sl2 relation: with D = 4fe + h^2 + 2h, x = e^p, y = f^p, z = h^p - h,
/// (D+1)^p - 2(D+1)^{(p+1)/2} + (D+1) = 4xy + z^2 in the mod-p enveloping
/// algebra.
pub fn sl2_relation_holds(p: u64) -> Result<bool> {
    let pres = crate::files::builtin_presentation("sl2")?;
    let env = ModularEnv::new(&pres, p)?;
    let ctx = &env.ctx_p;
    let e = Uea::generator(ctx, 0);
    let f = Uea::generator(ctx, 1);
    let h = Uea::generator(ctx, 2);
    let four = Scalar::from_u64(Ring::ModP(p), 4);
    let two = Scalar::from_u64(Ring::ModP(p), 2);
    let delta = f
        .mul(&e)
        .scale(&four)
        .add(&h.mul(&h))
        .add(&h.scale(&two));
    let dp1 = delta.add(&Uea::one(ctx));
    let lhs = dp1
        .pow(p)
        .sub(&dp1.pow((p + 1) / 2).scale(&two))
        .add(&dp1);
    let x = e.pow(p);
    let y = f.pow(p);
    let z = h.pow(p).sub(&h);
    let rhs = x.mul(&y).scale(&four).add(&z.mul(&z));
    Ok(lhs == rhs)
}

fn cmd_sl2_suite(primes: Option<&str>, out: Option<&str>) -> Result<i32> {
    let primes = parse_primes(primes)?;
    let mut report = Report::new("sl2-suite");
    report.inputs.algebra = Some("sl2".to_string());
    report.inputs.primes = Some(primes.clone());
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &primes {
        if !is_prime(p) || p < 3 {
            report
                .warnings
                .push(format!("prime {} excluded by the p >= 3 policy", p));
            continue;
        }
        let holds = sl2_relation_holds(p)?;
        all_ok &= holds;
        entries.push(json!({ "prime": p, "relation_holds": holds }));
    }
    if entries.is_empty() {
        return Err(Error::NoGoodPrimes);
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn parse_characters(s: &str, dim: usize) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for part in s.split(';') {
        let vals: Vec<u64> = part
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad character value {:?}", t)))
            })
            .collect::<Result<_>>()?;
        if vals.len() != dim {
            return Err(Error::Parse(format!(
                "character has {} values for dimension {}",
                vals.len(),
                dim
            )));
        }
        out.push(vals);
    }
    Ok(out)
}

/// Random characters: uniform combinations of a basis of the functionals
/// vanishing on the derived subalgebra.
fn random_characters(
    env: &ModularEnv,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<u64>>> {
    let fp = &env.restricted.fp;
    let l = fp.dim;
    let mut rows = Vec::new();
    for i in 0..l {
        for j in (i + 1)..l {
            rows.push(fp.table[i][j].clone());
        }
    }
    let null = crate::linalg::nullspace(env.p, &rows, l)?;
    let mut out = Vec::new();
    for _ in 0..count {
        let mut chi = vec![0u64; l];
        for row in &null.rows {
            let c = rng.gen_range(0..env.p);
            for (x, &y) in chi.iter_mut().zip(row) {
                *x = crate::scalar::addmod(*x, crate::scalar::mulmod(c, y, env.p), env.p);
            }
        }
        out.push(chi);
    }
    Ok(out)
}

fn cmd_twist(
    algebra: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    characters: Option<&str>,
    samples: usize,
    seed: u64,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("twist");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    report.provenance.seed = Some(seed);
    if let Some(c) = characters {
        report.inputs.extra.insert("characters".into(), Value::from(c));
    } else {
        report.inputs.extra.insert("samples".into(), Value::from(samples));
    }
    base_warnings(&input.pres, &mut report.warnings);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let d = max_degree.unwrap_or(2 * p as usize + 2);
        let chis = match characters {
            Some(s) => parse_characters(s, env.dim())?,
            None => random_characters(&env, samples, &mut rng)?,
        };
        let mut per_char = Vec::new();
        for values in chis {
            let chi = Character { values };
            let tw = character_twist(&env, &chi, d)?;
            all_ok &= tw.passed();
            per_char.push(json!({ "report": tw, "passed": tw.passed() }));
        }
        entries.push(json!({ "prime": p, "max_degree": d, "characters": per_char }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_induced_aut(
    algebra: &str,
    images: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    kind: &str,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let (aut_text, aut_file) = load_automorphism_input(images)?;
    let primes = parse_primes(primes)?;
    let kind = parse_kind(kind)?;
    let mut report = Report::new("induced-aut");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    report.inputs.extra.insert("images".into(), Value::from(images));
    report
        .inputs
        .extra
        .insert("images_sha256".into(), Value::from(sha256_hex(&aut_text)));
    report
        .inputs
        .extra
        .insert("kind".into(), Value::from(format!("{:?}", kind)));
    base_warnings(&input.pres, &mut report.warnings);
    let mut entries = Vec::new();
    let mut all_ok = true;
    for &p in &usable_primes(&input.pres, &primes, &mut report.warnings) {
        let env = ModularEnv::new(&input.pres, p)?;
        let d = max_degree.unwrap_or(2 * p as usize + 2);
        let gens = match kind {
            CotangentKind::M => Vec::new(),
            CotangentKind::N => invariant_generators(&input.pres, &env)?,
        };
        let cot = cotangent_algebra(&env, &gens, d, kind, false)?;
        let imgs = automorphism_images_mod_p(&aut_file, &env)?;
        let vaut = verify_automorphism(&env.ctx_p, &aut_file.name, imgs, aut_file.order)?;
        if !vaut.surjective_deg1 {
            report.warnings.push(format!(
                "prime {}: degree-1 parts of the images do not span; treating as an endomorphism",
                p
            ));
        }
        let induced = induced_automorphism(&cot, &vaut)?;
        all_ok &= induced.is_lie_automorphism();
        let on_g = if cot.canonical_bijective() {
            Some(matrix_on_g(&cot, &induced)?)
        } else {
            None
        };
        entries.push(json!({
            "prime": p,
            "max_degree": d,
            "induced": induced,
            "is_lie_automorphism": induced.is_lie_automorphism(),
            "matrix_on_g": on_g,
            "order_verified": vaut.order_verified,
        }));
    }
    report.results = json!({ "per_prime": entries });
    report.verdict = if all_ok { "PASS" } else { "FAIL" }.to_string();
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

fn cmd_charpoly_sweep(
    algebra: &str,
    images: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let (aut_text, aut_file) = load_automorphism_input(images)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("charpoly-sweep");
    set_algebra_inputs(&mut report, &input);
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    report.inputs.extra.insert("images".into(), Value::from(images));
    report
        .inputs
        .extra
        .insert("images_sha256".into(), Value::from(sha256_hex(&aut_text)));
    base_warnings(&input.pres, &mut report.warnings);
    let sweep = charpoly_sweep(&input.pres, &aut_file, &primes, max_degree)?;
    for e in &sweep.entries {
        if e.charpoly.is_none() {
            report
                .warnings
                .push(format!("prime {} skipped: bad reduction", e.prime));
        }
    }
    report.verdict = sweep.verdict.clone();
    report.results = json!({ "sweep": sweep });
    report.emit(out)?;
    Ok(0)
}

fn cmd_compare(
    a: &str,
    b: &str,
    primes: Option<&str>,
    max_degree: Option<usize>,
    out: Option<&str>,
) -> Result<i32> {
    let ia = load_algebra_input(a)?;
    let ib = load_algebra_input(b)?;
    let primes = parse_primes(primes)?;
    let mut report = Report::new("compare");
    report.inputs.algebra = Some(format!("{} vs {}", ia.spec, ib.spec));
    report.inputs.primes = Some(primes.clone());
    report.inputs.max_degree = max_degree;
    report
        .inputs
        .extra
        .insert("a_sha256".into(), Value::from(sha256_hex(&ia.text)));
    report
        .inputs
        .extra
        .insert("b_sha256".into(), Value::from(sha256_hex(&ib.text)));
    base_warnings(&ia.pres, &mut report.warnings);
    base_warnings(&ib.pres, &mut report.warnings);
    let cmp = compare_invariants(&ia.pres, &ib.pres, &primes, max_degree)?;
    report.verdict = cmp.verdict.clone();
    report.results = json!({ "comparison": cmp });
    report.emit(out)?;
    Ok(0)
}

fn cmd_probe(
    algebra: &str,
    max_degree: usize,
    prime: Option<u64>,
    out: Option<&str>,
) -> Result<i32> {
    let input = load_algebra_input(algebra)?;
    let mut report = Report::new("probe-assumption");
    set_algebra_inputs(&mut report, &input);
    report.inputs.max_degree = Some(max_degree);
    base_warnings(&input.pres, &mut report.warnings);
    if input.pres.invariants.is_empty() {
        return Err(Error::Validation("no invariants declared in the input".into()));
    }
    let ring = match prime {
        None => Ring::Rational,
        Some(p) => {
            if !is_prime(p) || p < 3 {
                return Err(Error::InvalidPrime(p));
            }
            report.inputs.primes = Some(vec![p]);
            Ring::ModP(p)
        }
    };
    let dim = input.pres.dim();
    let mut f = Vec::new();
    for inv in &input.pres.invariants {
        let mut s = SymElement::zero(ring, dim);
        for (exps, c) in &inv.terms {
            let coeff = match ring {
                Ring::Rational => Scalar::Rational(c.clone()),
                _ => Scalar::from_rational(ring, c)?,
            };
            s.add_term(Monomial(exps.clone()), coeff);
        }
        f.push(s);
    }
    let probe = regular_sequence_probe(ring, dim, &f, max_degree)?;
    report.warnings.push(format!(
        "necessary-condition probe only: checked up to degree {}, no claim beyond",
        max_degree
    ));
    report.verdict = if probe.passed() { "PASS" } else { "FAIL" }.to_string();
    report.results = json!({ "probe": probe });
    report.emit(out)?;
    Ok(verdict_exit(&report.verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_parsing() {
        assert_eq!(parse_primes(None).unwrap(), vec![3, 5, 7]);
        assert_eq!(parse_primes(Some("11, 13")).unwrap(), vec![11, 13]);
        assert_eq!(parse_primes(Some("first:4")).unwrap(), vec![3, 5, 7, 11]);
        assert!(parse_primes(Some("x")).is_err());
    }

    #[test]
    fn sl2_relation_small_primes() {
        for p in [3, 5] {
            assert!(sl2_relation_holds(p).unwrap(), "p = {}", p);
        }
    }

    #[test]
    fn uea_formatting() {
        let pres = crate::files::builtin_presentation("sl2").unwrap();
        let env = ModularEnv::new(&pres, 3).unwrap();
        let e = Uea::generator(&env.ctx_p, 0);
        let h = Uea::generator(&env.ctx_p, 2);
        let u = e
            .mul(&e)
            .scale(&Scalar::from_u64(Ring::ModP(3), 2))
            .add(&h)
            .add(&Uea::one(&env.ctx_p));
        assert_eq!(format_uea(&u, &pres.basis), "1 + h + 2*e^2");
        assert_eq!(format_uea(&Uea::zero(&env.ctx_p), &pres.basis), "0");
    }

    #[test]
    fn random_characters_are_valid() {
        let pres = crate::files::builtin_presentation("heis3").unwrap();
        let env = ModularEnv::new(&pres, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for values in random_characters(&env, 10, &mut rng).unwrap() {
            Character { values }.validate(&env.restricted.fp).unwrap();
        }
    }
}
