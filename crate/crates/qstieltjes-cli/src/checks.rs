//! The verification battery behind `verify-*`, `moments`, `polys` and
//! `pade`: each check runs a library operation over a sweep and folds the
//! residuals into a [`CheckRow`].

use std::sync::Mutex;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qstieltjes::family::FamilySpec;
use qstieltjes::functional::{
    boundary_check, moment_recurrence_residual, pearson_residual, pearson_residual_with,
    recurrence_residual_on, MomentSequence,
};
use qstieltjes::hyper::{verify_identity, IdentityCheck, IdentityTag};
use qstieltjes::lattice::{
    fwd_diff, lattice_x_int, qfactorial, qfalling_int, qfalling_poch, qgamma, qpochhammer,
    GridFunction,
};
use qstieltjes::orthopoly::{
    build_basis, diff_orthogonality_check, hypergeometric_eq_residual, lambda_by_leading_action,
    orthogonality_check, pade_check, rodrigues_proportionality, OrthoBasis,
};
use qstieltjes::poly::LatticePoly;
use qstieltjes::scalar::{QContext, Scalar};
use qstieltjes::stieltjes::{compare_representations, sweep_points, theorem_sample};
use qstieltjes::{QError, Result};

use crate::report::{CheckRow, SampleRow};

/// Which quantity a negative-control run corrupts by 1%.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturb {
    Tau,
    Constant,
    Moment,
}

/// Sweep configuration shared by the verify subcommands.
pub struct RunCfg {
    /// Pass/fail threshold; exact mode uses exact zero.
    pub tol: Scalar,
    pub points: usize,
    pub k_max: u32,
    pub seed: u64,
    pub jobs: usize,
    pub perturb: Option<Perturb>,
}

impl RunCfg {
    fn passes(&self, residual: &Scalar) -> bool {
        residual <= &self.tol
    }
}

fn fold(name: &str, anchor: &str, cfg: &RunCfg, samples: Vec<SampleRow>, worst: Scalar) -> CheckRow {
    CheckRow {
        name: name.to_string(),
        anchor: anchor.to_string(),
        residual: worst.serialize(),
        tol: cfg.tol.serialize(),
        pass: cfg.passes(&worst),
        samples,
    }
}

/// Run `f` over the items, optionally across threads, preserving order.
fn run_sweep<T, R, F>(items: Vec<T>, jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Send + Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let slots: Mutex<Vec<Option<Result<R>>>> =
        Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for worker in 0..jobs.min(items.len()) {
            let f = &f;
            let items = &items;
            let slots = &slots;
            scope.spawn(move || {
                let mut i = worker;
                while i < items.len() {
                    let r = f(&items[i]);
                    slots.lock().unwrap()[i] = Some(r);
                    i += jobs;
                }
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

fn max_residual(ctx: &QContext, rows: &[(String, Scalar, Option<String>)]) -> Scalar {
    rows.iter()
        .fold(ctx.zero(), |acc, (_, r, _)| acc.max_with(r))
}

fn to_samples(rows: Vec<(String, Scalar, Option<String>)>) -> Vec<SampleRow> {
    rows.into_iter()
        .map(|(sample, residual, detail)| SampleRow {
            sample,
            residual: residual.serialize(),
            detail,
        })
        .collect()
}

/// qcore identities: the Gamma_q triple identity, the two q-falling forms,
/// and the forward-difference action on the falling basis.
pub fn check_lattice_calculus(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let mut rows = Vec::new();
    for s in 0..=8i64 {
        let g = qgamma(&BigRational::from_integer((s + 1).into()), ctx)?;
        let c2_half = BigRational::new((s * (s - 1)).into(), 4.into());
        let via_fact = ctx.q_pow(&c2_half)? * qfactorial(s as u32, ctx);
        let via_poch = qpochhammer(&ctx.q(), s as u32, ctx) / (ctx.one() - ctx.q()).pow_i(s);
        let r = (&g - &via_fact).abs().max_with(&(&g - &via_poch).abs()) / g.abs();
        rows.push((format!("gamma-triple s={s}"), r, None));
    }
    for (s, k) in [(5i64, 3u32), (8, 4), (10, 6), (3, 0)] {
        let lhs = qfalling_int(s, k, ctx);
        let rhs = qfalling_poch(&BigRational::from_integer(s.into()), k, ctx)?;
        let r = (&lhs - &rhs).abs() / lhs.abs().max_with(&ctx.one());
        rows.push((format!("falling-dual s={s},k={k}"), r, None));
    }
    for k in 1..=3u32 {
        let f = GridFunction::sample(0, 7, |u| qfalling_int(u, k, ctx));
        let df = fwd_diff(&f, ctx)?;
        let mut worst = ctx.zero();
        for s in 1..=5i64 {
            let expect = ctx.q_pow_half(3 - 2 * k as i64)
                * lattice_x_int(k as i64, ctx)
                * qfalling_int(s, k - 1, ctx);
            worst = worst.max_with(&(df.get(s).unwrap() - &expect).abs());
        }
        rows.push((format!("delta-action k={k}"), worst, None));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("q-calculus identities", "lattice-calculus", cfg, to_samples(rows), worst))
}

fn rat_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> BigRational {
    let den = rng.gen_range(7..24i64);
    let lo_n = (lo * den as f64).ceil() as i64;
    let hi_n = (hi * den as f64).floor() as i64;
    let num = rng.gen_range(lo_n..=hi_n.max(lo_n));
    BigRational::new(num.into(), den.into())
}

/// Random draws for one identity; float-only identities return None in
/// exact mode.
fn draw_identity(
    tag: IdentityTag,
    ctx: &QContext,
    rng: &mut ChaCha8Rng,
) -> Option<IdentityCheck> {
    let exact = ctx.is_exact();
    let sc = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| ctx.from_rational(&rat_in(rng, lo, hi));
    match tag {
        IdentityTag::ChuVandermonde => Some(IdentityCheck::ChuVandermonde {
            s: rng.gen_range(0..=9u32),
            t: sc(rng, 2.0, 9.0),
        }),
        IdentityTag::Heine if !exact => Some(IdentityCheck::Heine {
            a: sc(rng, 0.1, 3.0),
            c: sc(rng, 0.1, 0.9),
            z: sc(rng, 0.05, 0.9),
        }),
        IdentityTag::Jackson if !exact => Some(IdentityCheck::Jackson {
            a: sc(rng, 0.1, 2.0),
            b: sc(rng, 0.1, 2.0),
            c: sc(rng, 0.1, 0.9),
            z: sc(rng, 0.05, 0.45),
        }),
        IdentityTag::QBinomial if !exact => Some(IdentityCheck::QBinomial {
            a: sc(rng, 0.1, 3.0),
            z: sc(rng, 0.05, 0.9),
        }),
        IdentityTag::Phi32Transform => Some(IdentityCheck::Phi32Transform {
            n: rng.gen_range(1..=6u32),
            a: sc(rng, 0.1, 0.9),
            b: sc(rng, 0.1, 0.9),
            c: sc(rng, 0.1, 0.9),
            d: sc(rng, 0.1, 0.9),
        }),
        IdentityTag::PochhammerShift => Some(IdentityCheck::PochhammerShift {
            a: sc(rng, 0.1, 4.0),
            n: rng.gen_range(0..=8u32),
        }),
        _ => None,
    }
}

/// The transformation-identity battery over `draws` random draws per tag.
pub fn check_identities(ctx: &QContext, cfg: &RunCfg, draws: usize) -> Result<Vec<CheckRow>> {
    let mut out = Vec::new();
    for tag in IdentityTag::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ tag.name().len() as u64);
        // a draw can land exactly on a pole of one side; redraw a few times
        // before treating the error as real (deterministic under the seed)
        let mut rows: Vec<(String, Scalar, Option<String>)> = Vec::new();
        let mut supported = true;
        for i in 0..draws {
            let mut result = None;
            for _ in 0..16 {
                let Some(check) = draw_identity(tag, ctx, &mut rng) else {
                    supported = false; // float-only identity in exact mode
                    break;
                };
                match verify_identity(&check, ctx) {
                    Ok(r) => {
                        result = Some(Ok(r));
                        break;
                    }
                    Err(e @ (QError::Pole(_) | QError::Precondition(_))) => {
                        result = Some(Err(e)); // keep the last error, retry
                    }
                    Err(e) => return Err(e),
                }
            }
            if !supported {
                break;
            }
            let r = result.expect("at least one attempt ran")?;
            rows.push((format!("draw {i}"), r, None));
        }
        if !supported || rows.is_empty() {
            continue;
        }
        let worst = max_residual(ctx, &rows);
        out.push(fold(
            &format!("identity {tag}"),
            "hyper-identities",
            cfg,
            to_samples(rows),
            worst,
        ));
    }
    Ok(out)
}

/// Pearson (both forms), with the optional 1% tau corruption.
pub fn check_pearson(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let r = match cfg.perturb {
        Some(Perturb::Tau) => {
            let ctx = fam.ctx();
            let tau = fam.tau_poly();
            let bad = LatticePoly::new(vec![tau.coeff(0) * ctx.rat(101, 100), tau.coeff(1)]);
            pearson_residual_with(fam, &bad)?
        }
        _ => pearson_residual(fam)?,
    };
    Ok(fold("pearson equation", "pearson", cfg, vec![], r))
}

pub fn check_boundary(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let r = boundary_check(fam, cfg.k_max)?;
    Ok(fold("boundary vanishing", "boundary", cfg, vec![], r))
}

pub fn check_adjoint(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let mut worst = ctx.zero();
    let mut rows = Vec::new();
    for (name, p) in [
        ("p=1", LatticePoly::one(ctx)),
        ("p=w", LatticePoly::w(ctx)),
        ("p=w^2", LatticePoly::w_pow(2, ctx)),
    ] {
        let r = qstieltjes::functional::adjoint_check(fam, &p)?;
        worst = worst.max_with(&r);
        rows.push((name.to_string(), r, None));
    }
    Ok(fold("summation by parts", "adjoint", cfg, to_samples(rows), worst))
}

/// Closed moments against the brute-force lattice sums, k = 0..=k_max.
/// Sample details carry both values with provenance; truncated sums also
/// report the lattice horizon and certified tail bound.
pub fn check_moments(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let closed = MomentSequence::closed(fam, cfg.k_max)?;
    let brute = MomentSequence::brute_force(fam, cfg.k_max)?;
    let truncation = brute.truncation.as_ref().map(|t| {
        format!(" truncated_at={} tail_bound={}", t.m_end, t.tail_bound.serialize())
    });
    let mut rows = Vec::new();
    for k in 0..=cfg.k_max as usize {
        let c = &closed.values[k];
        let b = &brute.values[k];
        let r = (c - b).abs() / c.abs().max_with(&ctx.one());
        rows.push((
            format!("k={k}"),
            r,
            Some(format!(
                "closed-form={} brute-force={}{}",
                c.serialize(),
                b.serialize(),
                truncation.as_deref().unwrap_or("")
            )),
        ));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("closed vs brute-force moments", "moments-closed-vs-brute", cfg, to_samples(rows), worst))
}

/// The Gamma_k + Psi_k = Xi_k recurrence for k = 1..=k_max, with the
/// optional 1% moment corruption.
pub fn check_recurrence(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let mut rows = Vec::new();
    for k in 1..=cfg.k_max {
        let r = if cfg.perturb == Some(Perturb::Moment) {
            let u_km1 = fam.closed_moment(k - 1)?;
            let u_k = fam.closed_moment(k)? * ctx.rat(101, 100);
            let u_kp1 = fam.closed_moment(k + 1)?;
            recurrence_residual_on(fam, k, &u_km1, &u_k, &u_kp1)
        } else {
            moment_recurrence_residual(fam, k)?
        };
        rows.push((format!("k={k}"), r, None));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("moment recurrence", "moment-recurrence", cfg, to_samples(rows), worst))
}

/// Lattice sum vs both closed hypergeometric forms over the sweep.
pub fn check_representations(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let pts = sweep_points(fam, cfg.points);
    let reps = run_sweep(pts, cfg.jobs, |pt| {
        let rep = compare_representations(fam, pt)?;
        Ok((pt.t().serialize(), rep))
    })?;
    let mut rows = Vec::new();
    for (t, rep) in reps {
        let ratio_err = (&rep.fitted_ratio - &ctx.one()).abs();
        let r = rep.max_rel_diff.max_with(&ratio_err);
        rows.push((
            format!("t={t}"),
            r,
            Some(format!("ratio={}", rep.fitted_ratio.serialize())),
        ));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("stieltjes representations", "stieltjes-representations", cfg, to_samples(rows), worst))
}

/// The central difference-equation sweep; rows carry
/// {t, residual, fitted_constant, C_q}.
pub fn check_theorem(fam: &FamilySpec, cfg: &RunCfg) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let cq = fam.c_constant()?;
    let target = if cfg.perturb == Some(Perturb::Constant) {
        &cq * ctx.rat(101, 100)
    } else {
        cq.clone()
    };
    let pts = sweep_points(fam, cfg.points);
    let samples = run_sweep(pts, cfg.jobs, |pt| {
        let s = theorem_sample(fam, pt)?;
        Ok((pt.t().serialize(), s))
    })?;
    let mut rows = Vec::new();
    for (t, s) in samples {
        let r = (&s.fitted_constant - &target).abs();
        rows.push((
            format!("t={t}"),
            r,
            Some(format!(
                "fitted_constant={} c_q={}",
                s.fitted_constant.serialize(),
                cq.serialize()
            )),
        ));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("difference equation", "difference-equation", cfg, to_samples(rows), worst))
}

fn basis_depth(fam: &FamilySpec, requested: u32) -> u32 {
    match fam.support_end() {
        Some(m) => requested.min(m as u32),
        None => requested,
    }
}

/// The orthopoly battery: orthogonality, difference orthogonality, TTRR,
/// the eigenvalue equation, Rodrigues proportionality and the Pade system.
pub fn check_orthopoly(fam: &FamilySpec, cfg: &RunCfg) -> Result<Vec<CheckRow>> {
    let ctx = fam.ctx();
    let n_max = basis_depth(fam, 6);
    let basis = build_basis(fam, n_max)?;
    let mut out = Vec::new();

    let r = orthogonality_check(&basis, fam)?;
    out.push(fold("orthogonality", "orthogonality", cfg, vec![], r));

    let r = diff_orthogonality_check(&basis, fam)?;
    out.push(fold("difference orthogonality", "difference-orthogonality", cfg, vec![], r));

    out.push(check_ttrr(&basis, fam, cfg));

    let mut rows = Vec::new();
    for n in 1..=n_max {
        let (lambda, r) = hypergeometric_eq_residual(&basis, fam, n)?;
        let balance = lambda_by_leading_action(fam, n)?;
        let rel = (&lambda - &balance).abs() / balance.abs().max_with(&ctx.one());
        rows.push((
            format!("n={n}"),
            r.max_with(&rel),
            Some(format!("lambda={}", lambda.serialize())),
        ));
    }
    let worst = max_residual(ctx, &rows);
    out.push(fold("eigenvalue equation", "eigenvalue-equation", cfg, to_samples(rows), worst));

    let mut rows = Vec::new();
    for n in 1..=n_max.min(4) {
        let r = rodrigues_proportionality(&basis, fam, n)?;
        rows.push((format!("n={n}"), r, None));
    }
    let worst = max_residual(ctx, &rows);
    out.push(fold("rodrigues proportionality", "rodrigues", cfg, to_samples(rows), worst));

    let mut rows = Vec::new();
    for n in 1..=n_max.min(5) {
        let r = pade_check(&basis, fam, n)?;
        rows.push((format!("n={n}"), r, None));
    }
    let worst = max_residual(ctx, &rows);
    out.push(fold("pade interpolation system", "pade", cfg, to_samples(rows), worst));
    Ok(out)
}

fn check_ttrr(basis: &OrthoBasis, fam: &FamilySpec, cfg: &RunCfg) -> CheckRow {
    let ctx = fam.ctx();
    let m_end = fam.support_end().unwrap_or(10);
    let mut worst = ctx.zero();
    let top = basis.polys.len() - 1;
    for n in 1..top {
        for s in 0..=m_end {
            let w = lattice_x_int(s, ctx);
            let lhs = &w * basis.polys[n].eval(&w);
            let rhs = basis.polys[n + 1].eval(&w)
                + &basis.beta[n] * basis.polys[n].eval(&w)
                + &basis.gamma[n] * basis.polys[n - 1].eval(&w);
            worst = worst.max_with(&(lhs - rhs).abs());
        }
    }
    fold("three-term recurrence", "ttrr", cfg, vec![], worst)
}

/// The whole ordered battery for `verify-all`.
pub fn verify_all(
    fam: &FamilySpec,
    cfg: &RunCfg,
    identity_draws: usize,
    keep_going: bool,
) -> Result<Vec<CheckRow>> {
    let mut out: Vec<CheckRow> = Vec::new();
    let mut halted = false;

    macro_rules! push {
        ($row:expr) => {
            if !halted {
                let row = $row;
                let pass = row.pass;
                out.push(row);
                if !pass && !keep_going {
                    halted = true;
                }
            }
        };
    }

    push!(check_lattice_calculus(fam, cfg)?);
    if !halted {
        for row in check_identities(fam.ctx(), cfg, identity_draws)? {
            push!(row);
        }
    }
    push!(check_pearson(fam, cfg)?);
    push!(check_boundary(fam, cfg)?);
    push!(check_adjoint(fam, cfg)?);
    push!(check_moments(fam, cfg)?);
    push!(check_recurrence(fam, cfg)?);
    push!(check_representations(fam, cfg)?);
    push!(check_theorem(fam, cfg)?);
    if !halted {
        for row in check_orthopoly(fam, cfg)? {
            push!(row);
        }
    }
    Ok(out)
}

/// Per-n basis data for the `polys` subcommand.
pub fn polys_rows(fam: &FamilySpec, cfg: &RunCfg, n_max: u32) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let depth = basis_depth(fam, n_max);
    let basis = build_basis(fam, depth)?;
    let mut rows = Vec::new();
    for n in 0..=depth as usize {
        let (lambda, residual) = if n >= 1 {
            let (l, r) = hypergeometric_eq_residual(&basis, fam, n as u32)?;
            (l.serialize(), r)
        } else {
            ("0".to_string(), ctx.zero())
        };
        rows.push((
            format!("n={n}"),
            residual,
            Some(format!(
                "alpha={} beta={} gamma={} norm_sq={} lambda={lambda}",
                basis.alpha[n].serialize(),
                basis.beta[n].serialize(),
                basis.gamma[n].serialize(),
                basis.norm_sq[n].serialize(),
            )),
        ));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("orthogonal basis data", "eigenvalue-equation", cfg, to_samples(rows), worst))
}

/// Per-n Pade residuals for the `pade` subcommand.
pub fn pade_rows(fam: &FamilySpec, cfg: &RunCfg, n_max: u32) -> Result<CheckRow> {
    let ctx = fam.ctx();
    let depth = basis_depth(fam, n_max);
    let basis = build_basis(fam, depth)?;
    let mut rows = Vec::new();
    for n in 1..=depth {
        let r = pade_check(&basis, fam, n)?;
        rows.push((format!("n={n}"), r, None));
    }
    let worst = max_residual(ctx, &rows);
    Ok(fold("pade interpolation system", "pade", cfg, to_samples(rows), worst))
}

/// Exit-code class for a numerical error (pole/divergence/truncation -> 3,
/// anything argument-shaped -> 2).
pub fn error_exit_code(err: &QError) -> i32 {
    match err {
        QError::Parse(_) | QError::Precondition(_) | QError::UnsupportedExactInput(_) => 2,
        _ => 3,
    }
}
