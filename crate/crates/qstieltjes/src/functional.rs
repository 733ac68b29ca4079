//! The q-moment functional as a concrete lattice sum.
//!
//! Brute-force q-moments and power moments (the oracles for the closed
//! forms), the functional calculus checks (Pearson in both forms, boundary
//! vanishing, summation by parts), and the three-term moment recurrence
//! Gamma_k + Psi_k = Xi_k that re-proves the difference equation one moment
//! at a time.

use crate::error::{QError, Result};
use crate::family::FamilySpec;
use crate::lattice::{lattice_x_int, qfalling_int, GridFunction, MAX_ITER};
use crate::poly::LatticePoly;
use crate::scalar::Scalar;

/// Which basis a moment sequence is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentBasis {
    /// q-moments u_k^q = <U, [s]^{(k)}>.
    QFalling,
    /// power moments u_k = <U, x^k>.
    Power,
}

/// How a moment sequence was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    BruteForce,
}

/// Truncation metadata for sums over infinite supports.
#[derive(Debug, Clone)]
pub struct Truncation {
    /// Last lattice index included.
    pub m_end: i64,
    /// Bound on the omitted tail mass.
    pub tail_bound: Scalar,
}

/// An ordered moment sequence u_0..u_{k_max} with provenance.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    pub basis: MomentBasis,
    pub provenance: Provenance,
    pub values: Vec<Scalar>,
    pub truncation: Option<Truncation>,
}

impl MomentSequence {
    /// Closed-form q-moments u_0..u_{k_max}.
    pub fn closed(fam: &FamilySpec, k_max: u32) -> Result<Self> {
        let values = (0..=k_max)
            .map(|k| fam.closed_moment(k))
            .collect::<Result<Vec<_>>>()?;
        let seq = MomentSequence {
            basis: MomentBasis::QFalling,
            provenance: Provenance::ClosedForm,
            values,
            truncation: None,
        };
        seq.check_u0()?;
        Ok(seq)
    }

    /// Brute-force q-moments from the lattice sum.
    pub fn brute_force(fam: &FamilySpec, k_max: u32) -> Result<Self> {
        let mut truncation: Option<Truncation> = None;
        let mut values = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            let (v, tr) = lattice_moment(fam, k, Integrand::QFalling)?;
            values.push(v);
            truncation = merge_truncation(truncation, tr);
        }
        let seq = MomentSequence {
            basis: MomentBasis::QFalling,
            provenance: Provenance::BruteForce,
            values,
            truncation,
        };
        seq.check_u0()?;
        Ok(seq)
    }

    /// Power moments <U, x^k> from the lattice sum, k = 0..=k_max.
    pub fn power(fam: &FamilySpec, k_max: u32) -> Result<Self> {
        let mut truncation: Option<Truncation> = None;
        let mut values = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            let (v, tr) = lattice_moment(fam, k, Integrand::Power)?;
            values.push(v);
            truncation = merge_truncation(truncation, tr);
        }
        let seq = MomentSequence {
            basis: MomentBasis::Power,
            provenance: Provenance::BruteForce,
            values,
            truncation,
        };
        seq.check_u0()?;
        Ok(seq)
    }

    fn check_u0(&self) -> Result<()> {
        if self.values[0].signum() <= 0 {
            return Err(QError::MomentInconsistency("u_0 must be positive".into()));
        }
        Ok(())
    }

    /// <U, p> for a polynomial in w, via the power moments of this sequence.
    pub fn pair_poly(&self, p: &LatticePoly) -> Result<Scalar> {
        if self.basis != MomentBasis::Power {
            return Err(QError::Precondition(
                "polynomial pairing needs power-basis moments".into(),
            ));
        }
        if p.degree() >= self.values.len() {
            return Err(QError::Precondition(format!(
                "moment sequence too short for degree {}",
                p.degree()
            )));
        }
        let mut acc = self.values[0].zero_like();
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = acc + c * &self.values[i];
            }
        }
        Ok(acc)
    }
}

fn merge_truncation(a: Option<Truncation>, b: Option<Truncation>) -> Option<Truncation> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(Truncation {
            m_end: x.m_end.max(y.m_end),
            tail_bound: x.tail_bound.max_with(&y.tail_bound),
        }),
    }
}

enum Integrand {
    QFalling,
    Power,
}

/// Shared kernel: sum f_k(s) rho(s) q^{s-1/2} over the support, where f_k is
/// either [s]^{(k)} or x(s)^k. Finite supports sum exactly; infinite supports
/// truncate adaptively (ten consecutive negligible terms with a contracting
/// ratio), float mode only.
fn lattice_moment(
    fam: &FamilySpec,
    k: u32,
    integrand: Integrand,
) -> Result<(Scalar, Option<Truncation>)> {
    let ctx = fam.ctx();
    let eval = |s: i64| match integrand {
        Integrand::QFalling => qfalling_int(s, k, ctx),
        Integrand::Power => lattice_x_int(s, ctx).pow_i(k as i64),
    };
    match fam.support_end() {
        Some(m) => {
            let weights = fam.weight_grid(m)?;
            let mut acc = ctx.zero();
            let mut measure = ctx.q_pow_half(-1); // q^{s-1/2} at s=0
            for (s, rho) in weights.iter().enumerate() {
                acc = acc + eval(s as i64) * rho * &measure;
                measure = measure * ctx.q();
            }
            Ok((acc, None))
        }
        None => {
            if ctx.is_exact() {
                return Err(QError::UnsupportedExactInput(
                    "brute-force moment over an infinite support".into(),
                ));
            }
            let target = ctx.series_target();
            let mut acc = ctx.zero();
            // rho(s) q^{s-1/2}, advanced by weight_ratio(s) * q each step
            let mut mass = fam.weight(0)? * ctx.q_pow_half(-1);
            let mut term_prev: Option<Scalar> = None;
            let mut quiet = 0u32;
            for s in 0..MAX_ITER as i64 {
                let term = eval(s) * &mass;
                acc = acc + &term;
                let small = term.abs() < &target * &acc.abs().max_with(&ctx.one());
                let contracting = match &term_prev {
                    Some(p) if !p.is_zero() => term.abs() < ctx.rat(3, 4) * p.abs(),
                    _ => false,
                };
                if small && contracting {
                    quiet += 1;
                    if quiet >= 10 {
                        // ratio <= 3/4 certified over the quiet run
                        let tail = term.abs() * ctx.int(3);
                        return Ok((
                            acc,
                            Some(Truncation {
                                m_end: s,
                                tail_bound: tail,
                            }),
                        ));
                    }
                } else {
                    quiet = 0;
                }
                term_prev = Some(term);
                mass = mass * fam.weight_ratio(s)? * ctx.q();
            }
            Err(QError::Truncation(format!(
                "moment k={k} did not converge within the iteration cap"
            )))
        }
    }
}

/// Brute-force q-moment u_k^q = sum_s [s]^{(k)} rho(s) q^{s-1/2}.
pub fn bruteforce_qmoment(fam: &FamilySpec, k: u32) -> Result<Scalar> {
    lattice_moment(fam, k, Integrand::QFalling).map(|(v, _)| v)
}

/// Power moment <U, x^k>.
pub fn power_moment(fam: &FamilySpec, k: u32) -> Result<Scalar> {
    lattice_moment(fam, k, Integrand::Power).map(|(v, _)| v)
}

/// <U, f> for a grid function starting at s = 0 and covering the support
/// (finite families) or a truncation of it.
pub fn apply_functional(fam: &FamilySpec, f: &GridFunction) -> Result<Scalar> {
    let ctx = fam.ctx();
    if f.start != 0 {
        return Err(QError::Precondition(
            "grid function must start at s = 0".into(),
        ));
    }
    if let Some(m) = fam.support_end() {
        if f.end() < m {
            return Err(QError::Precondition(format!(
                "grid covers s <= {}, support needs s <= {m}",
                f.end()
            )));
        }
    }
    let m_end = match fam.support_end() {
        Some(m) => m,
        None => f.end(),
    };
    let weights = fam.weight_grid(m_end)?;
    let mut acc = ctx.zero();
    let mut measure = ctx.q_pow_half(-1);
    for (s, rho) in weights.iter().enumerate() {
        acc = acc + &f.values[s] * rho * &measure;
        measure = measure * ctx.q();
    }
    Ok(acc)
}

/// Truncation horizon for residual grids over infinite supports: grow until
/// the unnormalized weight profile drops below the series target.
fn profile_horizon(fam: &FamilySpec) -> Result<i64> {
    if let Some(m) = fam.support_end() {
        return Ok(m);
    }
    let ctx = fam.ctx();
    let target = ctx.series_target();
    let mut val = ctx.one();
    for s in 0..MAX_ITER as i64 {
        if val.abs() < target {
            return Ok(s);
        }
        val = val * fam.weight_ratio(s)?;
    }
    Err(QError::Truncation(
        "weight profile does not decay within the iteration cap".into(),
    ))
}

/// Max relative residual of both Pearson forms over the support:
/// Delta[sigma rho] = tau rho and Nabla[p rho] = tau rho.
pub fn pearson_residual(fam: &FamilySpec) -> Result<Scalar> {
    pearson_residual_with(fam, &fam.tau_poly())
}

/// Pearson residual against an arbitrary tau candidate (negative controls
/// perturb tau and expect this to blow up).
pub fn pearson_residual_with(fam: &FamilySpec, tau: &LatticePoly) -> Result<Scalar> {
    let ctx = fam.ctx();
    let m_end = profile_horizon(fam)?;
    let rho = fam.weight_profile(m_end)?;
    let rho_at = |s: i64| -> Scalar {
        if s < 0 || s > m_end {
            ctx.zero()
        } else {
            rho[s as usize].clone()
        }
    };
    let mut worst = ctx.zero();
    let mut scale = ctx.one();
    for s in 0..=m_end {
        let w = lattice_x_int(s, ctx);
        let step = ctx.q_pow_half(2 * s - 1); // x(s+1/2) - x(s-1/2)
        let tau_rho = tau.eval(&w) * &rho[s as usize];
        // form 1: forward difference of sigma rho
        let d1 = (fam.sigma_at(s + 1) * rho_at(s + 1) - fam.sigma_at(s) * &rho[s as usize])
            / &step
            - &tau_rho;
        // form 2: backward difference of p rho
        let d2 = (fam.p_at_with(tau, s) * &rho[s as usize]
            - fam.p_at_with(tau, s - 1) * rho_at(s - 1))
            / &step
            - &tau_rho;
        worst = worst.max_with(&d1.abs()).max_with(&d2.abs());
        scale = scale.max_with(&tau_rho.abs());
    }
    Ok(worst / scale)
}

/// Max over k <= k_max of |sigma(x(s)) rho(s) x(s-1/2)^k| at s = 0 and at
/// s = M+1 (one past the support, or past the truncation horizon).
pub fn boundary_check(fam: &FamilySpec, k_max: u32) -> Result<Scalar> {
    let ctx = fam.ctx();
    let m_end = profile_horizon(fam)?;
    let mut worst = ctx.zero();
    for s in [0i64, m_end + 1] {
        let rho = match fam.support_end() {
            // extended weight vanishes identically past a finite support
            Some(m) if s > m => ctx.zero(),
            _ => {
                if s == 0 {
                    ctx.one()
                } else {
                    // profile value one step past the horizon
                    let prof = fam.weight_profile(s - 1)?;
                    prof.last().unwrap() * fam.weight_ratio(s - 1)?
                }
            }
        };
        let sig = fam.sigma_at(s);
        let edge = lattice_x_half(ctx, 2 * s - 1);
        let mut xk = ctx.one();
        for _ in 0..=k_max {
            worst = worst.max_with(&(&sig * &rho * &xk).abs());
            xk = xk * &edge;
        }
    }
    Ok(worst)
}

fn lattice_x_half(ctx: &crate::scalar::QContext, k: i64) -> Scalar {
    crate::lattice::lattice_x_half(k, ctx)
}

/// Summation-by-parts residual: the grid realization of <Nabla(p U), f>
/// against -<U, p Delta f>, maximized over the probe functions f = w^j,
/// j = 0..=3. Zero boundary terms make the two sides agree.
pub fn adjoint_check(fam: &FamilySpec, p: &LatticePoly) -> Result<Scalar> {
    let ctx = fam.ctx();
    let m_end = profile_horizon(fam)?;
    let rho = fam.weight_profile(m_end)?;
    let rho_at = |s: i64| -> Scalar {
        if s < 0 || s > m_end {
            ctx.zero()
        } else {
            rho[s as usize].clone()
        }
    };
    let mut worst = ctx.zero();
    let mut scale = ctx.one();
    for j in 0..=3u32 {
        let f = |s: i64| lattice_x_int(s, ctx).pow_i(j as i64);
        // LHS: sum_{s=0}^{M+1} [p(s) rho(s) - p(s-1) rho(s-1)] f(s)
        let mut lhs = ctx.zero();
        for s in 0..=m_end + 1 {
            let diff = p.eval(&lattice_x_int(s, ctx)) * rho_at(s)
                - p.eval(&lattice_x_int(s - 1, ctx)) * rho_at(s - 1);
            lhs = lhs + diff * f(s);
        }
        // RHS: -sum_{s=0}^{M} p(s) rho(s) [f(s+1) - f(s)]
        let mut rhs = ctx.zero();
        for s in 0..=m_end {
            rhs = rhs - p.eval(&lattice_x_int(s, ctx)) * rho_at(s) * (f(s + 1) - f(s));
        }
        worst = worst.max_with(&(&lhs - &rhs).abs());
        scale = scale.max_with(&lhs.abs()).max_with(&rhs.abs());
    }
    Ok(worst / scale)
}

/// The three linear forms of the moment recurrence, evaluated on
/// (u_{k-1}, u_k, u_{k+1}): Gamma_k + Psi_k = Xi_k holds exactly for
/// classical moments.
pub fn recurrence_terms(
    fam: &FamilySpec,
    k: u32,
    u_km1: &Scalar,
    u_k: &Scalar,
    u_kp1: &Scalar,
) -> (Scalar, Scalar, Scalar) {
    let ctx = fam.ctx();
    let tc = fam.tilde_coeffs();
    let (a2, a1, a0, b1, b0) = (&tc.a2, &tc.a1, &tc.a0, &tc.b1, &tc.b0);
    let k = k as i64;
    let half = ctx.rat(1, 2);
    let one = ctx.one();
    let q = ctx.q();
    let qn = |m: i64| crate::lattice::qnumber_int(m, ctx);
    let qh = |num: i64| ctx.q_pow_half(num); // q^{num/2}

    let gamma = -(a2 * qh(3 * k - 2) + &half * b1 * (&q - &one) * qh(3 * k - 3))
        * qn(k + 2)
        * u_kp1
        - qn(k + 1)
            * (ctx.int(2) * a2 * qh(2 * k - 2) * qn(k) - a2 * qh(3 * k - 3)
                + a1 * qh(k - 1)
                + &half * b1 * qh(k - 2) * (qh(2 * k - 2) + qh(2 * k) - &one)
                + &half * b0 * qh(k - 2) * (&q - &one))
            * u_k
        - qn(k)
            * (a2 * qh(k - 2) * qn(k - 1).pow_i(2)
                + (a1 + &half * b1 * qh(2 * k - 3)) * qn(k - 1)
                + (a0 + &half * b0 * qh(2 * k - 3)) * qh(2 - k))
            * u_km1;

    let psi = (a2 * qh(2 * k - 3) * (&q + &one) + &half * b1 * qh(2 * k - 4) * (&q * &q - &one))
        * u_kp1
        + (a2 * (qh(k - 4) * (&q + &one) * qn(k) - qh(-3))
            + a1 * qh(-1)
            + &half * b1 * (qh(k - 1) * (&one - qh(-4)) * qn(k) + qh(-4))
            + &half * b0 * (&q - &one) / &q)
            * u_k;

    let xi = b1 * qh(2 * k) * u_kp1 + (b1 * qh(k - 1) * qn(k) + b0) * u_k;

    (gamma, psi, xi)
}

/// |Gamma_k + Psi_k - Xi_k| relative to the largest of the three terms,
/// with moments from the closed forms.
pub fn moment_recurrence_residual(fam: &FamilySpec, k: u32) -> Result<Scalar> {
    if k == 0 {
        return Err(QError::Precondition(
            "the recurrence references u_{k-1}; k >= 1 required".into(),
        ));
    }
    let u_km1 = fam.closed_moment(k - 1)?;
    let u_k = fam.closed_moment(k)?;
    let u_kp1 = fam.closed_moment(k + 1)?;
    Ok(recurrence_residual_on(fam, k, &u_km1, &u_k, &u_kp1))
}

/// The same residual on caller-supplied moments (negative controls).
pub fn recurrence_residual_on(
    fam: &FamilySpec,
    k: u32,
    u_km1: &Scalar,
    u_k: &Scalar,
    u_kp1: &Scalar,
) -> Scalar {
    let ctx = fam.ctx();
    let (gamma, psi, xi) = recurrence_terms(fam, k, u_km1, u_k, u_kp1);
    let scale = gamma
        .abs()
        .max_with(&psi.abs())
        .max_with(&xi.abs())
        .max_with(&ctx.one());
    (gamma + psi - xi).abs() / scale
}
