//! Basic hypergeometric series r_phi_s and the transformation identities
//! used by the closed Stieltjes forms.
//!
//! The series convention is
//!
//! ```text
//! r_phi_s(a1..ar; b1..bs; q, z)
//!   = sum_k [prod (ai;q)_k / prod (bj;q)_k] * [(-1)^k q^C(k,2)]^{1+s-r} * z^k/(q;q)_k
//! ```
//!
//! with the bracketed factor applied exactly as written for any r, s (this is
//! what makes 1phi1 and 2phi2 well defined here; texts differ on this point,
//! so the unit tests pin the convention). Parameters equal to zero are
//! allowed: (0;q)_k = 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{QError, Result};
use crate::lattice::{qexp, qpochhammer, qpochhammer_inf, SeriesResult, MAX_ITER};
use crate::scalar::{QContext, Scalar};

/// How many initial indices are scanned when deciding whether a parameter is
/// `q^{-n}` (termination) or a lower parameter hits a pole.
const SCAN_CAP: u32 = 4096;

/// Parameters of a basic hypergeometric series r_phi_s at argument z.
#[derive(Debug, Clone)]
pub struct HyperSpec {
    pub upper: Vec<Scalar>,
    pub lower: Vec<Scalar>,
    pub arg: Scalar,
}

impl HyperSpec {
    pub fn new(upper: Vec<Scalar>, lower: Vec<Scalar>, arg: Scalar) -> Self {
        HyperSpec { upper, lower, arg }
    }

    /// Smallest n with some upper parameter equal to q^{-n}, if any.
    pub fn termination_order(&self, ctx: &QContext) -> Option<u32> {
        self.upper
            .iter()
            .filter_map(|a| q_negative_power(a, ctx))
            .min()
    }
}

/// Detect `v = q^{-n}` for some 0 <= n < SCAN_CAP.
///
/// In float mode "equal" means within a near-machine threshold well below
/// any honest parameter separation.
fn q_negative_power(v: &Scalar, ctx: &QContext) -> Option<u32> {
    if v.signum() <= 0 {
        return None;
    }
    let near = ctx.pow10(-(ctx.precision() as i64 - 6).max(30));
    let mut vq = v.clone();
    for n in 0..SCAN_CAP {
        let d = &vq - ctx.one();
        let hit = if ctx.is_exact() {
            d.is_zero()
        } else {
            d.abs() < near
        };
        if hit {
            return Some(n);
        }
        if vq < ctx.one() {
            // v q^n only decreases from here; no hit possible
            return None;
        }
        vq = vq * ctx.q();
    }
    None
}

/// Evaluate the series. Terminating series are summed exactly (tail bound
/// zero, exact in exact mode); non-terminating series require float mode and
/// stop once the term is below tolerance with a geometric tail bound.
pub fn eval_hyper(spec: &HyperSpec, ctx: &QContext) -> Result<SeriesResult> {
    let extra = 1 + spec.lower.len() as i64 - spec.upper.len() as i64;
    let termination = spec.termination_order(ctx);

    // A lower parameter q^{-m} poisons terms k >= m+1 unless termination
    // comes first.
    for b in &spec.lower {
        if let Some(m) = q_negative_power(b, ctx) {
            let ok = matches!(termination, Some(n) if n <= m);
            if !ok {
                return Err(QError::Pole(format!(
                    "lower parameter q^-{m} hits a pole before termination"
                )));
            }
        }
    }

    if termination.is_none() && ctx.is_exact() {
        return Err(QError::UnsupportedExactInput(
            "non-terminating hypergeometric series".into(),
        ));
    }

    let mut sum = ctx.zero();
    let mut term = ctx.one();
    let mut qk = ctx.one(); // q^k
    let cap = termination.map(|n| n as usize).unwrap_or(MAX_ITER);
    let target = if termination.is_none() {
        Some(ctx.series_target())
    } else {
        None
    };

    for k in 0..=cap {
        sum = sum + &term;
        if k == cap {
            if termination.is_some() {
                return Ok(SeriesResult {
                    value: sum,
                    terms_used: k + 1,
                    tail_bound: ctx.zero(),
                });
            }
            break;
        }

        // ratio from term k to k+1, and a bound valid for every later ratio:
        // each |1 - a q^m| <= 1 + |a| q^k, each |1 - b q^m| >= 1 - |b| q^k
        // for m >= k, and the bracketed factor only shrinks further.
        let mut ratio = spec.arg.clone();
        let mut bound = spec.arg.abs();
        let mut bound_valid = true;
        for a in &spec.upper {
            ratio = ratio * (ctx.one() - a * &qk);
            bound = bound * (ctx.one() + (a * &qk).abs());
        }
        for b in &spec.lower {
            ratio = ratio / (ctx.one() - b * &qk);
            let gap = ctx.one() - (b * &qk).abs();
            if gap.signum() <= 0 {
                bound_valid = false;
            } else {
                bound = bound / gap;
            }
        }
        match extra {
            0 => {}
            e => {
                let f = -&qk;
                ratio = ratio * f.pow_i(e);
                bound = bound * qk.abs().pow_i(e);
            }
        }
        let qq = ctx.one() - ctx.q() * &qk;
        ratio = ratio / &qq;
        bound = bound / qq;
        term = term * &ratio;
        qk = qk * ctx.q();

        if let Some(target) = &target {
            if bound_valid && bound < ctx.one() {
                // |tail beyond term_{k+1}| <= |term_{k+1}| bound/(1-bound)
                let tail = term.abs() * &bound / (ctx.one() - &bound);
                if tail < target * &sum.abs().max_with(&ctx.one()) {
                    return Ok(SeriesResult {
                        value: sum + &term,
                        terms_used: k + 2,
                        tail_bound: tail,
                    });
                }
            }
            if k > 256 && ratio.abs() >= ctx.one() {
                return Err(QError::Divergence(format!(
                    "term ratio {} at k={k} does not fall below 1",
                    ratio.abs()
                )));
            }
        }
    }
    Err(QError::Truncation(
        "hypergeometric series did not meet the tail target".into(),
    ))
}

/// The transformation identities checked by `verify_identity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityTag {
    ChuVandermonde,
    Heine,
    Jackson,
    QBinomial,
    Phi32Transform,
    PochhammerShift,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 6] = [
        IdentityTag::ChuVandermonde,
        IdentityTag::Heine,
        IdentityTag::Jackson,
        IdentityTag::QBinomial,
        IdentityTag::Phi32Transform,
        IdentityTag::PochhammerShift,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityTag::ChuVandermonde => "chu-vandermonde",
            IdentityTag::Heine => "heine",
            IdentityTag::Jackson => "jackson",
            IdentityTag::QBinomial => "q-binomial",
            IdentityTag::Phi32Transform => "phi32",
            IdentityTag::PochhammerShift => "pochhammer-shift",
        }
    }
}

impl fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityTag {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        IdentityTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| QError::Parse(format!("unknown identity `{s}`")))
    }
}

/// One identity instance: the tag plus the concrete parameters of both sides.
#[derive(Debug, Clone)]
pub enum IdentityCheck {
    /// 2phi1(q^-s, q; q t; q, q^s t) = (t;q)_s / (q t;q)_s, with t = q^{-z}.
    ChuVandermonde { s: u32, t: Scalar },
    /// 2phi1(a, 0; c; q, z) = e_q(z) 1phi1(c/a; c; q, a z), a != 0, |z| < 1.
    Heine { a: Scalar, c: Scalar, z: Scalar },
    /// 2phi1(a, b; c; q, z) = (az;q)_inf/(z;q)_inf 2phi2(a, c/b; c, az; q, bz), b != 0.
    Jackson {
        a: Scalar,
        b: Scalar,
        c: Scalar,
        z: Scalar,
    },
    /// 1phi0(a; -; q, z) = (az;q)_inf/(z;q)_inf, |z| < 1.
    QBinomial { a: Scalar, z: Scalar },
    /// 3phi2(q^-n, a, b; c, d; q, q)
    ///   = b^n (d/b;q)_n/(d;q)_n 3phi2(q^-n, b, c/a; c, q^{1-n} b/d; q, a q/d).
    Phi32Transform {
        n: u32,
        a: Scalar,
        b: Scalar,
        c: Scalar,
        d: Scalar,
    },
    /// (a q^-n;q)_n = (q/a;q)_n (-a)^n q^{-n(n+1)/2}.
    PochhammerShift { a: Scalar, n: u32 },
}

impl IdentityCheck {
    pub fn tag(&self) -> IdentityTag {
        match self {
            IdentityCheck::ChuVandermonde { .. } => IdentityTag::ChuVandermonde,
            IdentityCheck::Heine { .. } => IdentityTag::Heine,
            IdentityCheck::Jackson { .. } => IdentityTag::Jackson,
            IdentityCheck::QBinomial { .. } => IdentityTag::QBinomial,
            IdentityCheck::Phi32Transform { .. } => IdentityTag::Phi32Transform,
            IdentityCheck::PochhammerShift { .. } => IdentityTag::PochhammerShift,
        }
    }
}

fn require_float(ctx: &QContext, what: &str) -> Result<()> {
    if ctx.is_exact() {
        return Err(QError::Precondition(format!(
            "{what} involves infinite products/series; float mode required"
        )));
    }
    Ok(())
}

fn require_unit_disc(z: &Scalar, ctx: &QContext, what: &str) -> Result<()> {
    if z.abs() >= ctx.one() {
        return Err(QError::Precondition(format!("{what} requires |z| < 1")));
    }
    Ok(())
}

/// Relative residual |LHS - RHS| / max(|LHS|, |RHS|, 1) of the identity.
pub fn verify_identity(check: &IdentityCheck, ctx: &QContext) -> Result<Scalar> {
    let (lhs, rhs) = match check {
        IdentityCheck::ChuVandermonde { s, t } => {
            let qt = ctx.q() * t;
            let lhs = eval_hyper(
                &HyperSpec::new(
                    vec![ctx.q().pow_i(-(*s as i64)), ctx.q()],
                    vec![qt.clone()],
                    ctx.q().pow_i(*s as i64) * t,
                ),
                ctx,
            )?
            .value;
            let den = qpochhammer(&qt, *s, ctx);
            if den.is_zero() {
                return Err(QError::Pole("(qt;q)_s vanishes".into()));
            }
            let rhs = qpochhammer(t, *s, ctx) / den;
            (lhs, rhs)
        }
        IdentityCheck::Heine { a, c, z } => {
            require_float(ctx, "Heine transformation")?;
            if a.is_zero() {
                return Err(QError::Precondition("Heine requires a != 0".into()));
            }
            require_unit_disc(z, ctx, "Heine transformation")?;
            let lhs = eval_hyper(
                &HyperSpec::new(vec![a.clone(), ctx.zero()], vec![c.clone()], z.clone()),
                ctx,
            )?
            .value;
            let rhs = qexp(z, ctx)?.value
                * eval_hyper(
                    &HyperSpec::new(vec![c / a], vec![c.clone()], a * z),
                    ctx,
                )?
                .value;
            (lhs, rhs)
        }
        IdentityCheck::Jackson { a, b, c, z } => {
            require_float(ctx, "Jackson transformation")?;
            if b.is_zero() {
                return Err(QError::Precondition("Jackson requires b != 0".into()));
            }
            require_unit_disc(z, ctx, "Jackson transformation")?;
            let lhs = eval_hyper(
                &HyperSpec::new(vec![a.clone(), b.clone()], vec![c.clone()], z.clone()),
                ctx,
            )?
            .value;
            let az = a * z;
            let pref =
                qpochhammer_inf(&az, ctx)?.value / qpochhammer_inf(z, ctx)?.value;
            let rhs = pref
                * eval_hyper(
                    &HyperSpec::new(
                        vec![a.clone(), c / b],
                        vec![c.clone(), az.clone()],
                        b * z,
                    ),
                    ctx,
                )?
                .value;
            (lhs, rhs)
        }
        IdentityCheck::QBinomial { a, z } => {
            require_float(ctx, "q-binomial theorem")?;
            require_unit_disc(z, ctx, "q-binomial theorem")?;
            let lhs = eval_hyper(&HyperSpec::new(vec![a.clone()], vec![], z.clone()), ctx)?
                .value;
            let rhs =
                qpochhammer_inf(&(a * z), ctx)?.value / qpochhammer_inf(z, ctx)?.value;
            (lhs, rhs)
        }
        IdentityCheck::Phi32Transform { n, a, b, c, d } => {
            let qn = ctx.q().pow_i(-(*n as i64));
            let lhs = eval_hyper(
                &HyperSpec::new(
                    vec![qn.clone(), a.clone(), b.clone()],
                    vec![c.clone(), d.clone()],
                    ctx.q(),
                ),
                ctx,
            )?
            .value;
            let den = qpochhammer(d, *n, ctx);
            if den.is_zero() || a.is_zero() || b.is_zero() || d.is_zero() {
                return Err(QError::Precondition(
                    "3phi2 transform needs nonzero a, b, d and (d;q)_n != 0".into(),
                ));
            }
            let pref = b.pow_i(*n as i64) * qpochhammer(&(d / b), *n, ctx) / den;
            let rhs = pref
                * eval_hyper(
                    &HyperSpec::new(
                        vec![qn, b.clone(), c / a],
                        vec![c.clone(), ctx.q().pow_i(1 - *n as i64) * b / d],
                        a * ctx.q() / d,
                    ),
                    ctx,
                )?
                .value;
            (lhs, rhs)
        }
        IdentityCheck::PochhammerShift { a, n } => {
            if a.is_zero() {
                return Err(QError::Precondition(
                    "Pochhammer shift requires a != 0".into(),
                ));
            }
            let lhs = qpochhammer(&(a * ctx.q().pow_i(-(*n as i64))), *n, ctx);
            let nn = *n as i64;
            let rhs = qpochhammer(&(ctx.q() / a), *n, ctx)
                * (-a).pow_i(nn)
                * ctx.q_pow_half(-nn * (nn + 1));
            (lhs, rhs)
        }
    };
    let scale = lhs.abs().max_with(&rhs.abs()).max_with(&ctx.one());
    Ok((lhs - rhs).abs() / scale)
}
