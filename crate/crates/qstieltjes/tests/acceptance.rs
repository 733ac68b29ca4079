//! Acceptance suite: every criterion below runs at the stated tolerance and
//! prints one PASS/FAIL line (visible with `cargo test -- --nocapture`).
//!
//! Exact mode means bit-exact rational equality; float mode runs at P = 60
//! digits with tol = 10^-45.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qstieltjes::family::FamilySpec;
use qstieltjes::functional::{
    boundary_check, bruteforce_qmoment, moment_recurrence_residual, pearson_residual,
    pearson_residual_with, recurrence_residual_on,
};
use qstieltjes::hyper::{verify_identity, IdentityCheck};
use qstieltjes::lattice::{
    fwd_diff, lattice_x_int, qfactorial, qfalling_int, qfalling_poch, qgamma,
    qpochhammer, GridFunction,
};
use qstieltjes::orthopoly::{
    build_basis, diff_orthogonality_check, hypergeometric_eq_residual, lambda_by_leading_action,
    orthogonality_check, pade_check, rodrigues_proportionality,
};
use qstieltjes::point::EvalPoint;
use qstieltjes::poly::LatticePoly;
use qstieltjes::scalar::{Mode, QContext, Scalar};
use qstieltjes::stieltjes::{compare_representations, theorem_sample};

const SEED: u64 = 0x5eed_cafe;
const PRECISION: usize = 60;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A random rational roughly in (lo, hi), with a small denominator.
fn rat_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> BigRational {
    let den = rng.gen_range(7..24i64);
    let lo_n = (lo * den as f64).ceil() as i64;
    let hi_n = (hi * den as f64).floor() as i64;
    let num = rng.gen_range(lo_n..=hi_n.max(lo_n));
    rat(num, den)
}

fn rand_q(rng: &mut ChaCha8Rng) -> BigRational {
    rat_in(rng, 0.25, 0.8)
}

/// One random instance of each family. Exact mode draws integer
/// gamma/alpha/beta; float mode draws generic rationals.
fn draw_family(rng: &mut ChaCha8Rng, kind: &str, mode: Mode) -> FamilySpec {
    let q = rand_q(rng);
    let one = BigRational::new(1.into(), 1.into());
    match kind {
        "charlier" => {
            // 0 < (1-q) mu < 1
            let mu = rat_in(rng, 0.1, 0.9) / (&one - &q);
            let ctx = context(q, mode);
            FamilySpec::charlier(ctx, mu).expect("valid draw")
        }
        "kravchuk" => {
            let p = rat_in(rng, 0.15, 0.85);
            let n = rng.gen_range(2..=7u32);
            FamilySpec::kravchuk(context(q, mode), p, n).expect("valid draw")
        }
        "meixner" => {
            let mu = rat_in(rng, 0.1, 0.8);
            let gamma = match mode {
                Mode::Exact => rat(rng.gen_range(1..=4i64), 1),
                Mode::Float => rat_in(rng, 0.4, 3.5),
            };
            FamilySpec::meixner(context(q, mode), mu, gamma).expect("valid draw")
        }
        "hahn" => {
            let (alpha, beta) = match mode {
                Mode::Exact => (rat(rng.gen_range(0..=3i64), 1), rat(rng.gen_range(0..=3i64), 1)),
                Mode::Float => (rat_in(rng, -0.6, 2.5), rat_in(rng, -0.6, 2.5)),
            };
            let n = rng.gen_range(2..=7u32);
            FamilySpec::hahn(context(q, mode), alpha, beta, n).expect("valid draw")
        }
        other => panic!("unknown family {other}"),
    }
}

fn context(q: BigRational, mode: Mode) -> QContext {
    match mode {
        Mode::Exact => QContext::exact(q).unwrap(),
        Mode::Float => QContext::float(q, PRECISION).unwrap(),
    }
}

/// The mode each family is graded in: finite supports exactly, infinite
/// supports at 60 digits.
fn native_mode(kind: &str) -> Mode {
    match kind {
        "kravchuk" | "hahn" => Mode::Exact,
        _ => Mode::Float,
    }
}

const FAMILIES: [&str; 4] = ["charlier", "kravchuk", "meixner", "hahn"];

fn t_grid(fam: &FamilySpec, count: usize) -> Vec<EvalPoint> {
    qstieltjes::stieltjes::sweep_points(fam, count)
}

fn tol(ctx: &QContext) -> Scalar {
    ctx.tol().unwrap_or_else(|| ctx.zero())
}

/// `residual <= tol`, where exact mode demands exact zero.
fn ok(ctx: &QContext, residual: &Scalar) -> bool {
    if ctx.is_exact() {
        residual.is_zero()
    } else {
        residual < &tol(ctx)
    }
}

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {name} failed: {detail}");
}

#[test]
fn criterion_1_moment_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_desc = String::new();
    let mut all_ok = true;
    for kind in FAMILIES {
        let mode = native_mode(kind);
        for _ in 0..10 {
            let fam = draw_family(&mut rng, kind, mode);
            let ctx = fam.ctx();
            for k in 0..=8u32 {
                let closed = fam.closed_moment(k).unwrap();
                let brute = bruteforce_qmoment(&fam, k).unwrap();
                let good = match mode {
                    Mode::Exact => (closed.clone() - brute).is_zero(),
                    Mode::Float => {
                        let rel = (&closed - &brute).abs() / closed.abs().max_with(&ctx.one());
                        rel < tol(ctx)
                    }
                };
                if !good {
                    all_ok = false;
                    worst_desc = format!("{} k={k}", fam);
                }
            }
        }
    }
    report(
        "1 (closed moments = brute-force lattice sums)",
        all_ok,
        &worst_desc,
    );
}

#[test]
fn criterion_2_difference_equation_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut all_ok = true;
    let mut detail = String::new();
    for kind in FAMILIES {
        let mode = native_mode(kind);
        for _ in 0..5 {
            let fam = draw_family(&mut rng, kind, mode);
            let ctx = fam.ctx();
            let cq = fam.c_constant().unwrap();
            for pt in t_grid(&fam, 20) {
                let sample = theorem_sample(&fam, &pt).unwrap();
                let fit_err = (&sample.fitted_constant - &cq).abs();
                if !ok(ctx, &sample.residual) || !ok(ctx, &fit_err) {
                    all_ok = false;
                    detail = format!("{} t={} residual={}", fam, pt.t(), sample.residual);
                }
            }
        }
    }
    report("2 (first-order non-homogeneous difference equation)", all_ok, &detail);
}

#[test]
fn criterion_3_non_homogeneity_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut all_ok = true;
    let mut detail = String::new();
    for kind in FAMILIES {
        let mode = native_mode(kind);
        let fam = draw_family(&mut rng, kind, mode);
        let ctx = fam.ctx();
        let cq = fam.c_constant().unwrap();
        // |C_q| > 10 tol (float); nonzero exactly (exact)
        let nonzero = if ctx.is_exact() {
            !cq.is_zero()
        } else {
            cq.abs() > ctx.int(10) * tol(ctx)
        };
        if !nonzero {
            all_ok = false;
            detail = format!("{}: C_q too small", fam);
        }
        // dropping C_q leaves the constant itself, the same at every t
        let mut fitted = Vec::new();
        for pt in t_grid(&fam, 6) {
            let s = theorem_sample(&fam, &pt).unwrap();
            let res_omitting = (&s.fitted_constant - &cq).abs() + cq.abs();
            let against_cq = (res_omitting - cq.abs()).abs();
            if !ok(ctx, &against_cq) {
                all_ok = false;
                detail = format!("{}: homogeneous residual differs from C_q", fam);
            }
            fitted.push(s.fitted_constant);
        }
        for f in &fitted[1..] {
            let spread = (f - &fitted[0]).abs();
            if !ok(ctx, &spread) {
                all_ok = false;
                detail = format!("{}: fitted constant varies across t", fam);
            }
        }
    }
    report("3 (C_q is a genuine nonzero constant)", all_ok, &detail);
}

#[test]
fn criterion_4_representation_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut all_ok = true;
    let mut detail = String::new();
    for kind in FAMILIES {
        let mode = native_mode(kind);
        let fam = draw_family(&mut rng, kind, mode);
        let ctx = fam.ctx();
        for pt in t_grid(&fam, 20) {
            let rep = compare_representations(&fam, &pt).unwrap();
            let ratio_err = (&rep.fitted_ratio - &ctx.one()).abs();
            if !ok(ctx, &rep.max_rel_diff) || !ok(ctx, &ratio_err) {
                all_ok = false;
                detail = format!("{} t={}: diff={}", fam, pt.t(), rep.max_rel_diff);
            }
        }
    }
    report(
        "4 (lattice sum = both hypergeometric closed forms)",
        all_ok,
        &detail,
    );
}

#[test]
fn criterion_5_moment_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut all_ok = true;
    let mut detail = String::new();
    for kind in FAMILIES {
        let mode = native_mode(kind);
        for _ in 0..3 {
            let fam = draw_family(&mut rng, kind, mode);
            let ctx = fam.ctx();
            for k in 1..=8u32 {
                let r = moment_recurrence_residual(&fam, k).unwrap();
                if !ok(ctx, &r) {
                    all_ok = false;
                    detail = format!("{} k={k}: {r}", fam);
                }
            }
        }
    }
    report("5 (three-term moment recurrence)", all_ok, &detail);
}

#[test]
fn criterion_6_pearson_and_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut all_ok = true;
    let mut detail = String::new();
    for kind in FAMILIES {
        let mode = native_mode(kind);
        for _ in 0..3 {
            let fam = draw_family(&mut rng, kind, mode);
            let ctx = fam.ctx();
            let pr = pearson_residual(&fam).unwrap();
            let bc = boundary_check(&fam, 6).unwrap();
            let boundary_good = match fam.support_end() {
                Some(_) => bc.is_zero() || (!ctx.is_exact() && bc < tol(ctx)),
                None => bc < tol(ctx),
            };
            if !ok(ctx, &pr) || !boundary_good {
                all_ok = false;
                detail = format!("{}: pearson={pr} boundary={bc}", fam);
            }
        }
    }
    report("6 (Pearson equation and boundary vanishing)", all_ok, &detail);
}

#[test]
fn criterion_7_classical_property_suite() {
    let mut failures: Vec<String> = Vec::new();
    let fams = [
        FamilySpec::parse("charlier:q=1/2,mu=1/2", Mode::Float, PRECISION).unwrap(),
        FamilySpec::parse("meixner:q=2/5,mu=1/3,gamma=2", Mode::Float, PRECISION).unwrap(),
        FamilySpec::parse("kravchuk:q=1/2,p=1/3,N=7", Mode::Exact, 0).unwrap(),
        FamilySpec::parse("hahn:q=3/7,alpha=1,beta=2,N=8", Mode::Exact, 0).unwrap(),
    ];
    for fam in &fams {
        let ctx = fam.ctx();
        let basis = build_basis(fam, 6).unwrap();
        let mut check = |name: &str, r: &Scalar| {
            if !ok(ctx, r) {
                failures.push(format!("{}: {name}={r}", fam));
            }
        };
        let r = orthogonality_check(&basis, fam).unwrap();
        check("orthogonality", &r);
        let r = diff_orthogonality_check(&basis, fam).unwrap();
        check("diff-orthogonality", &r);
        // TTRR identity on the grid
        let m_end = fam.support_end().unwrap_or(10);
        let mut ttrr_worst = ctx.zero();
        for n in 1..=5usize {
            for s in 0..=m_end {
                let w = lattice_x_int(s, ctx);
                let lhs = &w * basis.polys[n].eval(&w);
                let rhs = basis.polys[n + 1].eval(&w)
                    + &basis.beta[n] * basis.polys[n].eval(&w)
                    + &basis.gamma[n] * basis.polys[n - 1].eval(&w);
                ttrr_worst = ttrr_worst.max_with(&(lhs - rhs).abs());
            }
        }
        check("ttrr", &ttrr_worst);
        for n in 1..=6u32 {
            let (lambda, r) = hypergeometric_eq_residual(&basis, fam, n).unwrap();
            check("eigenvalue-equation", &r);
            let balance = lambda_by_leading_action(fam, n).unwrap();
            let rel = (&lambda - &balance).abs() / balance.abs().max_with(&ctx.one());
            check("lambda-balance", &rel);
        }
        for n in 1..=4u32 {
            let r = rodrigues_proportionality(&basis, fam, n).unwrap();
            check("rodrigues", &r);
        }
        for n in 1..=5u32 {
            let r = pade_check(&basis, fam, n).unwrap();
            check("pade", &r);
        }
        // gamma_n = |P_n|^2/|P_{n-1}|^2 > 0
        if basis.gamma[1..].iter().any(|g| g.signum() <= 0) {
            failures.push(format!("{}: non-positive gamma_n", fam));
        }
    }
    report(
        "7 (classical characterization suite)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_8_q_calculus_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, good: bool| {
        if !good {
            failures.push(name.to_string());
        }
    };

    // Gamma_q triple identity + falling-factorial dual forms + difference
    // actions, 20 random exact draws each
    for _ in 0..20 {
        let ctx = QContext::exact(rand_q(&mut rng)).unwrap();
        let s = rng.gen_range(0..=10i64);
        let k = rng.gen_range(0..=s.min(6)) as u32;
        // Gamma_q(s+1) = q^{C(s,2)/2}[s]_q! = (q;q)_s/(1-q)^s
        let g = qgamma(&rat(s + 1, 1), &ctx).unwrap();
        let via_fact = ctx.q_pow(&(rat(s, 1) * rat(s - 1, 1) / rat(4, 1))).unwrap()
            * qfactorial(s as u32, &ctx);
        let via_poch =
            qpochhammer(&ctx.q(), s as u32, &ctx) / (ctx.one() - ctx.q()).pow_i(s);
        check("gamma-triple", (&g - &via_fact).is_zero() && (g - via_poch).is_zero());
        // dual forms of the q-falling factorial
        let lhs = qfalling_int(s, k, &ctx);
        let rhs = qfalling_poch(&rat(s, 1), k, &ctx).unwrap();
        check("falling-dual", (lhs - rhs).is_zero());
        // Delta action on the falling basis
        if k >= 1 {
            let f = GridFunction::sample(0, 8, |u| qfalling_int(u, k, &ctx));
            let df = fwd_diff(&f, &ctx).unwrap();
            let expect = ctx.q_pow_half(3 - 2 * k as i64)
                * lattice_x_int(k as i64, &ctx)
                * qfalling_int(4, k - 1, &ctx);
            check("delta-action", (df.get(4).unwrap() - &expect).is_zero());
        }
    }

    // transformation identities, 20 random draws each
    for _ in 0..20 {
        let ectx = QContext::exact(rand_q(&mut rng)).unwrap();
        let fctx = QContext::float(rand_q(&mut rng), PRECISION).unwrap();
        let r = verify_identity(
            &IdentityCheck::ChuVandermonde {
                s: rng.gen_range(0..=9u32),
                t: ectx.from_rational(&rat_in(&mut rng, 2.0, 9.0)),
            },
            &ectx,
        )
        .unwrap();
        check("chu-vandermonde", r.is_zero());

        let r = verify_identity(
            &IdentityCheck::Heine {
                a: fctx.from_rational(&rat_in(&mut rng, 0.1, 3.0)),
                c: fctx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
                z: fctx.from_rational(&rat_in(&mut rng, 0.05, 0.9)),
            },
            &fctx,
        )
        .unwrap();
        check("heine", r < tol(&fctx));

        let r = verify_identity(
            &IdentityCheck::Jackson {
                a: fctx.from_rational(&rat_in(&mut rng, 0.1, 2.0)),
                b: fctx.from_rational(&rat_in(&mut rng, 0.1, 2.0)),
                c: fctx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
                z: fctx.from_rational(&rat_in(&mut rng, 0.05, 0.45)),
            },
            &fctx,
        )
        .unwrap();
        check("jackson", r < tol(&fctx));

        let r = verify_identity(
            &IdentityCheck::QBinomial {
                a: fctx.from_rational(&rat_in(&mut rng, 0.1, 3.0)),
                z: fctx.from_rational(&rat_in(&mut rng, 0.05, 0.9)),
            },
            &fctx,
        )
        .unwrap();
        check("q-binomial", r < tol(&fctx));

        let r = verify_identity(
            &IdentityCheck::Phi32Transform {
                n: rng.gen_range(1..=6u32),
                a: ectx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
                b: ectx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
                c: ectx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
                d: ectx.from_rational(&rat_in(&mut rng, 0.1, 0.9)),
            },
            &ectx,
        )
        .unwrap();
        check("phi32", r.is_zero());

        let r = verify_identity(
            &IdentityCheck::PochhammerShift {
                a: ectx.from_rational(&rat_in(&mut rng, 0.1, 4.0)),
                n: rng.gen_range(0..=8u32),
            },
            &ectx,
        )
        .unwrap();
        check("pochhammer-shift", r.is_zero());
    }
    report(
        "8 (q-calculus identity suite)",
        failures.is_empty(),
        &failures.join(", "),
    );
}

#[test]
fn criterion_9_negative_controls() {
    let mut all_ok = true;
    let mut detail = String::new();
    let fam = FamilySpec::parse("kravchuk:q=1/2,p=1/3,N=4", Mode::Float, PRECISION).unwrap();
    let ctx = fam.ctx();
    let blowup = ctx.pow10(6) * tol(ctx);

    // 1% perturbation of tau must trip the Pearson check
    let tau = fam.tau_poly();
    let bad = LatticePoly::new(vec![tau.coeff(0) * ctx.rat(101, 100), tau.coeff(1)]);
    let r = pearson_residual_with(&fam, &bad).unwrap();
    if r <= blowup {
        all_ok = false;
        detail = format!("tau control too quiet: {r}");
    }

    // 1% perturbation of C_q leaves a residual of 0.01 |C_q|
    let cq = fam.c_constant().unwrap();
    let pt = EvalPoint::new(ctx.int(5), ctx).unwrap();
    let s = theorem_sample(&fam, &pt).unwrap();
    let residual_with_bad_cq = (&s.fitted_constant - &cq * ctx.rat(101, 100)).abs();
    if residual_with_bad_cq <= blowup {
        all_ok = false;
        detail = format!("C_q control too quiet: {residual_with_bad_cq}");
    }

    // 1% perturbation of a moment must trip the recurrence
    let u0 = fam.closed_moment(0).unwrap();
    let u1 = fam.closed_moment(1).unwrap() * ctx.rat(101, 100);
    let u2 = fam.closed_moment(2).unwrap();
    let r = recurrence_residual_on(&fam, 1, &u0, &u1, &u2);
    if r <= blowup {
        all_ok = false;
        detail = format!("moment control too quiet: {r}");
    }

    report("9 (negative controls trip the checks)", all_ok, &detail);
}
