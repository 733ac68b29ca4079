//! Lattice geometry and q-calculus primitives.
//!
//! The non-uniform lattice is `x(s) = (q^s - 1)/(q - 1)`. Everything here is
//! rational in `r = q^{1/2}` for integer and half-integer arguments, so the
//! exact backend applies whenever the exponents are half-integers.
//!
//! Provided: [`lattice_x`], [`qnumber`], [`qfactorial`], [`qpochhammer`],
//! [`qpochhammer_inf`], [`qfalling`] (with its q-Pochhammer closed form
//! [`qfalling_poch`]), [`qgamma`], [`qgamma_tilde`], [`qexp`], and the grid
//! difference operators [`fwd_diff`] / [`bwd_diff`] on [`GridFunction`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{QError, Result};
use crate::scalar::{QContext, Scalar};

/// Iteration cap for adaptive truncation of infinite sums/products.
pub(crate) const MAX_ITER: usize = 200_000;

/// A value obtained by (possibly truncated) summation or multiplication,
/// together with the number of terms consumed and a bound on the omitted tail.
///
/// `tail_bound` is exactly zero for terminating series evaluated in full.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: Scalar,
    pub terms_used: usize,
    pub tail_bound: Scalar,
}

/// A function sampled on the integer lattice points `s = start ..= start+len-1`.
///
/// `tail_bound` certifies the mass omitted when the grid truncates an
/// infinite support.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub start: i64,
    pub values: Vec<Scalar>,
    pub tail_bound: Option<Scalar>,
}

impl GridFunction {
    pub fn new(start: i64, values: Vec<Scalar>) -> Self {
        GridFunction {
            start,
            values,
            tail_bound: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn get(&self, s: i64) -> Option<&Scalar> {
        if s < self.start {
            return None;
        }
        self.values.get((s - self.start) as usize)
    }

    /// Sample a scalar function on `start ..= end`.
    pub fn sample(start: i64, end: i64, mut f: impl FnMut(i64) -> Scalar) -> Self {
        GridFunction::new(start, (start..=end).map(&mut f).collect())
    }
}

pub(crate) fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// s(s-1)/2 as a rational, for rational s.
pub(crate) fn binom2(s: &BigRational) -> BigRational {
    s * (s - big(1)) / big(2)
}

/// x(s) = (q^s - 1)/(q - 1) for rational s.
///
/// Exact mode accepts integer and half-integer s only.
pub fn lattice_x(s: &BigRational, ctx: &QContext) -> Result<Scalar> {
    let qs = ctx.q_pow(s)?;
    Ok((qs - ctx.one()) / (ctx.q() - ctx.one()))
}

/// x(s) for integer s.
pub fn lattice_x_int(s: i64, ctx: &QContext) -> Scalar {
    lattice_x(&big(s), ctx).expect("integer lattice point is always representable")
}

/// x(k/2) for integer k: the half-integer lattice points used by the
/// difference operators.
pub fn lattice_x_half(k: i64, ctx: &QContext) -> Scalar {
    (ctx.q_pow_half(k) - ctx.one()) / (ctx.q() - ctx.one())
}

/// The symmetric q-number [s]_q = (q^{s/2} - q^{-s/2})/(q^{1/2} - q^{-1/2}).
pub fn qnumber(s: &BigRational, ctx: &QContext) -> Result<Scalar> {
    let half = s / big(2);
    let qh = ctx.q_pow(&half)?;
    let r = ctx.r();
    Ok((&qh - qh.recip()) / (&r - r.recip()))
}

/// [s]_q for integer s (always representable).
pub fn qnumber_int(s: i64, ctx: &QContext) -> Scalar {
    let qh = ctx.q_pow_half(s);
    let r = ctx.r();
    (&qh - qh.recip()) / (&r - r.recip())
}

/// [n]_q! = [n]_q [n-1]_q ... [1]_q, with [0]_q! = 1.
pub fn qfactorial(n: u32, ctx: &QContext) -> Scalar {
    let mut acc = ctx.one();
    for k in 1..=n {
        acc = acc * qnumber_int(k as i64, ctx);
    }
    acc
}

/// (a;q)_k = prod_{j<k} (1 - a q^j).
pub fn qpochhammer(a: &Scalar, k: u32, ctx: &QContext) -> Scalar {
    let mut acc = ctx.one();
    let mut aqj = a.clone();
    let q = ctx.q();
    for _ in 0..k {
        acc = acc * (ctx.one() - &aqj);
        aqj = aqj * &q;
    }
    acc
}

/// (a;q)_infinity, truncated with a certified multiplicative tail bound.
///
/// Float mode only; the tail bound `|value| * |a q^J| / (1-q)` is carried in
/// the result.
pub fn qpochhammer_inf(a: &Scalar, ctx: &QContext) -> Result<SeriesResult> {
    if ctx.is_exact() {
        return Err(QError::UnsupportedExactInput(
            "infinite q-Pochhammer product".into(),
        ));
    }
    let target = ctx.series_target();
    let q = ctx.q();
    let one_minus_q = ctx.one() - &q;
    let mut acc = ctx.one();
    let mut aqj = a.clone();
    for j in 0..MAX_ITER {
        if aqj.abs() < &target * &acc.abs() {
            let bound = &acc.abs() * &aqj.abs() / &one_minus_q;
            return Ok(SeriesResult {
                value: acc,
                terms_used: j,
                tail_bound: bound,
            });
        }
        acc = acc * (ctx.one() - &aqj);
        aqj = aqj * &q;
    }
    Err(QError::Truncation(
        "q-Pochhammer product did not meet the tail target".into(),
    ))
}

/// The q-falling factorial [s]_q^{(k)} = x(s) x(s-1) ... x(s-k+1).
pub fn qfalling(s: &BigRational, k: u32, ctx: &QContext) -> Result<Scalar> {
    let mut acc = ctx.one();
    for j in 0..k {
        acc = acc * lattice_x(&(s - big(j as i64)), ctx)?;
    }
    Ok(acc)
}

/// [s]_q^{(k)} for integer s.
pub fn qfalling_int(s: i64, k: u32, ctx: &QContext) -> Scalar {
    let mut acc = ctx.one();
    for j in 0..k {
        acc = acc * lattice_x_int(s - j as i64, ctx);
    }
    acc
}

/// The q-Pochhammer closed form of the q-falling factorial:
/// [s]_q^{(k)} = (q^{-s};q)_k (q-1)^{-k} q^{k(s-(k-1)/2)}.
pub fn qfalling_poch(s: &BigRational, k: u32, ctx: &QContext) -> Result<Scalar> {
    if k == 0 {
        return Ok(ctx.one());
    }
    let q_neg_s = ctx.q_pow(&-s)?;
    let poch = qpochhammer(&q_neg_s, k, ctx);
    let kk = big(k as i64);
    let expo = &kk * (s - (&kk - big(1)) / big(2));
    let power = ctx.q_pow(&expo)?;
    Ok(poch * power / (ctx.q() - ctx.one()).pow_i(k as i64))
}

/// Gamma_q(s) = (1-q)^{1-s} (q;q)_inf / (q^s;q)_inf.
///
/// Integer s >= 1 evaluates exactly as (q;q)_{s-1}/(1-q)^{s-1}; integer
/// s <= 0 is a pole. Non-integer s requires float mode.
pub fn qgamma(s: &BigRational, ctx: &QContext) -> Result<Scalar> {
    if s.denom().is_one() {
        let n = s
            .numer()
            .to_i64()
            .ok_or_else(|| QError::Precondition("gamma argument too large".into()))?;
        if n <= 0 {
            return Err(QError::Pole(format!("Gamma_q({n})")));
        }
        let poch = qpochhammer(&ctx.q(), (n - 1) as u32, ctx);
        return Ok(poch / (ctx.one() - ctx.q()).pow_i(n - 1));
    }
    if ctx.is_exact() {
        return Err(QError::UnsupportedExactInput(format!(
            "Gamma_q at non-integer argument {s}"
        )));
    }
    let qs = ctx.q_pow(s)?;
    let num = qpochhammer_inf(&ctx.q(), ctx)?.value;
    let den = qpochhammer_inf(&qs, ctx)?.value;
    if den.is_zero() {
        return Err(QError::Pole(format!("Gamma_q({s})")));
    }
    let pw = ctx.pow_rat(&(ctx.one() - ctx.q()), &(big(1) - s))?;
    Ok(pw * num / den)
}

/// The adjusted q-gamma used by the q-Hahn weight:
/// Gamma~_q(s) = q^{-(s-1)(s-2)/4} Gamma_q(s) for 0 < q < 1.
pub fn qgamma_tilde(s: &BigRational, ctx: &QContext) -> Result<Scalar> {
    let e = -(s - big(1)) * (s - big(2)) / big(4);
    Ok(ctx.q_pow(&e)? * qgamma(s, ctx)?)
}

/// The q-exponential e_q(z) = sum_{n>=0} z^n/(q;q)_n, for |z| < 1.
///
/// The partial sum carries a geometric tail bound; in float mode summation
/// stops once the bound clears the context tolerance, in exact mode once it
/// clears a fixed 10^-75 target (the sum itself stays rational).
pub fn qexp(z: &Scalar, ctx: &QContext) -> Result<SeriesResult> {
    if z.abs() >= ctx.one() {
        return Err(QError::Divergence(format!(
            "e_q(z) requires |z| < 1, got |z| = {}",
            z.abs()
        )));
    }
    let target = ctx.series_target();
    let mut sum = ctx.zero();
    let mut term = ctx.one();
    let mut qn = ctx.q();
    for n in 0..MAX_ITER {
        sum = sum + &term;
        term = term * z / (ctx.one() - &qn);
        qn = qn * ctx.q();
        // every later ratio is bounded by |z|/(1 - q^{n+2}), already below 1
        let ratio_cap = z.abs() / (ctx.one() - &qn);
        if ratio_cap < ctx.one() {
            let tail = term.abs() / (ctx.one() - &ratio_cap);
            if tail < &target * &sum.abs().max_with(&ctx.one()) {
                return Ok(SeriesResult {
                    value: sum,
                    terms_used: n + 1,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(QError::Truncation("e_q(z) tail target not met".into()))
}

/// Forward difference Delta f(s) = (f(s+1) - f(s)) / (x(s+1/2) - x(s-1/2)).
///
/// The output loses the last grid point.
pub fn fwd_diff(f: &GridFunction, ctx: &QContext) -> Result<GridFunction> {
    if f.len() < 2 {
        return Err(QError::SupportTooSmall("fwd_diff needs >= 2 points".into()));
    }
    let values = (0..f.len() - 1)
        .map(|i| {
            let s = f.start + i as i64;
            let dx = nabla_x_mid(s, ctx);
            (&f.values[i + 1] - &f.values[i]) / dx
        })
        .collect();
    Ok(GridFunction::new(f.start, values))
}

/// Backward difference Nabla f(s) = (f(s) - f(s-1)) / (x(s+1/2) - x(s-1/2)).
///
/// The output loses the first grid point.
pub fn bwd_diff(f: &GridFunction, ctx: &QContext) -> Result<GridFunction> {
    if f.len() < 2 {
        return Err(QError::SupportTooSmall("bwd_diff needs >= 2 points".into()));
    }
    let values = (1..f.len())
        .map(|i| {
            let s = f.start + i as i64;
            let dx = nabla_x_mid(s, ctx);
            (&f.values[i] - &f.values[i - 1]) / dx
        })
        .collect();
    Ok(GridFunction::new(f.start + 1, values))
}

/// x(s+1/2) - x(s-1/2) = q^{s-1/2}, the step that both difference operators
/// divide by.
pub fn nabla_x_mid(s: i64, ctx: &QContext) -> Scalar {
    ctx.q_pow_half(2 * s - 1)
}
