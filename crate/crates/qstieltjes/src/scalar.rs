//! Scalar backends and the evaluation context.
//!
//! Every quantity in this crate is a [`Scalar`] attached to a [`QContext`].
//! Two backends are provided:
//!
//! - **exact**: elements `a + b*r` of the quadratic field Q(r), `r = q^{1/2}`,
//!   with `a`, `b` arbitrary-precision rationals. All arithmetic is closed
//!   (no rounding). When `q` is a perfect square of a rational the field
//!   degenerates to Q and `b` is identically zero.
//! - **float**: arbitrary-precision binary floats with a configured decimal
//!   precision `P` (default 60) and comparison tolerance `10^-(P-15)`.
//!
//! Half-integer powers of `q` show up everywhere on this lattice (the
//! symmetric q-number, `x(s +- 1/2)`, the `q^{s-1/2}` measure factor), which
//! is why the exact field is built over `r` rather than `q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QError, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Which backend a context (and all scalars created by it) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// The quadratic field Q(r), r^2 = q, shared by all exact scalars of a context.
#[derive(Debug)]
pub(crate) struct ExactField {
    pub q: BigRational,
    /// `Some(r)` when `sqrt(q)` is itself rational; scalars then keep `b = 0`.
    pub rational_root: Option<BigRational>,
}

#[derive(Clone)]
enum Repr {
    Exact {
        a: BigRational,
        b: BigRational,
        field: Arc<ExactField>,
    },
    Float {
        v: BigFloat,
        prec: usize,
    },
}

/// An exact `a + b*r` element or an arbitrary-precision float.
#[derive(Clone)]
pub struct Scalar {
    repr: Repr,
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

fn bits_for_digits(digits: usize) -> usize {
    // 10^d needs d*log2(10) bits; add guard bits for intermediate rounding.
    (digits as f64 * 3.3219280948873626).ceil() as usize + 64
}

impl Scalar {
    fn exact(a: BigRational, b: BigRational, field: Arc<ExactField>) -> Self {
        debug_assert!(field.rational_root.is_none() || b.is_zero());
        Scalar {
            repr: Repr::Exact { a, b, field },
        }
    }

    fn float(v: BigFloat, prec: usize) -> Self {
        Scalar {
            repr: Repr::Float { v, prec },
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Exact { a, b, .. } => a.is_zero() && b.is_zero(),
            Repr::Float { v, .. } => v.is_zero(),
        }
    }

    /// Sign of the value: -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match &self.repr {
            Repr::Exact { a, b, field } => {
                if b.is_zero() {
                    rat_sign(a)
                } else if a.is_zero() {
                    rat_sign(b)
                } else {
                    let sa = rat_sign(a);
                    let sb = rat_sign(b);
                    if sa == sb {
                        sa
                    } else {
                        // a + b*sqrt(q) with opposite signs: compare a^2 vs b^2 q.
                        let lhs = a * a;
                        let rhs = b * b * &field.q;
                        match lhs.cmp(&rhs) {
                            Ordering::Greater => sa,
                            Ordering::Less => sb,
                            Ordering::Equal => 0,
                        }
                    }
                }
            }
            Repr::Float { v, .. } => {
                if v.is_zero() {
                    0
                } else if v.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Integer power by repeated squaring; negative exponents invert.
    pub fn pow_i(&self, e: i64) -> Scalar {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = base.one_like();
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &sq;
            }
            n >>= 1;
            if n > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// The larger of two scalars (same backend).
    pub fn max_with(&self, other: &Scalar) -> Scalar {
        if self < other {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Scalar {
        match &self.repr {
            Repr::Exact { a, b, field } => {
                if b.is_zero() {
                    Scalar::exact(a.recip(), BigRational::zero(), field.clone())
                } else {
                    // 1/(a+b r) = (a - b r)/(a^2 - b^2 q)
                    let den = a * a - b * b * &field.q;
                    Scalar::exact(a / &den, -(b / &den), field.clone())
                }
            }
            Repr::Float { v, prec } => {
                Scalar::float(BigFloat::from_i64(1, *prec).div(v, *prec, RM), *prec)
            }
        }
    }

    fn one_like(&self) -> Scalar {
        match &self.repr {
            Repr::Exact { field, .. } => Scalar::exact(
                BigRational::one(),
                BigRational::zero(),
                field.clone(),
            ),
            Repr::Float { prec, .. } => Scalar::float(BigFloat::from_i64(1, *prec), *prec),
        }
    }

    pub(crate) fn zero_like(&self) -> Scalar {
        match &self.repr {
            Repr::Exact { field, .. } => {
                Scalar::exact(BigRational::zero(), BigRational::zero(), field.clone())
            }
            Repr::Float { prec, .. } => Scalar::float(BigFloat::from_i64(0, *prec), *prec),
        }
    }

    /// The rational part when this is an exact scalar with `b = 0`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Exact { a, b, .. } if b.is_zero() => Some(a),
            _ => None,
        }
    }

    /// Approximate f64 value, for diagnostics and adaptive heuristics only.
    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Exact { a, b, field } => {
                let fa = a.to_f64().unwrap_or(f64::NAN);
                if b.is_zero() {
                    fa
                } else {
                    let fq = field.q.to_f64().unwrap_or(f64::NAN);
                    fa + b.to_f64().unwrap_or(f64::NAN) * fq.sqrt()
                }
            }
            Repr::Float { v, .. } => {
                // astro-float exposes no direct f64 conversion; go through text.
                format!("{v}").parse().unwrap_or(f64::NAN)
            }
        }
    }

    /// Serialize: decimal string (float mode) or `num/den` / `a+b r` (exact mode).
    pub fn serialize(&self) -> String {
        format!("{self}")
    }
}

fn rat_sign(x: &BigRational) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn fmt_rat(x: &BigRational) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Exact { a, b, .. } => {
                if b.is_zero() {
                    write!(f, "{}", fmt_rat(a))
                } else if a.is_zero() {
                    write!(f, "{} r", fmt_rat(b))
                } else if b.is_negative() {
                    write!(f, "{}-{} r", fmt_rat(a), fmt_rat(&-b))
                } else {
                    write!(f, "{}+{} r", fmt_rat(a), fmt_rat(b))
                }
            }
            Repr::Float { v, .. } => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(self, rhs)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(&self, rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(self, &rhs)
            }
        }
    };
}

fn mode_mismatch() -> ! {
    panic!("mixed exact/float scalars in one expression")
}

fn add_impl(x: &Scalar, y: &Scalar) -> Scalar {
    match (&x.repr, &y.repr) {
        (Repr::Exact { a, b, field }, Repr::Exact { a: a2, b: b2, .. }) => {
            Scalar::exact(a + a2, b + b2, field.clone())
        }
        (Repr::Float { v, prec }, Repr::Float { v: v2, prec: p2 }) => {
            let p = (*prec).max(*p2);
            Scalar::float(v.add(v2, p, RM), p)
        }
        _ => mode_mismatch(),
    }
}

fn sub_impl(x: &Scalar, y: &Scalar) -> Scalar {
    match (&x.repr, &y.repr) {
        (Repr::Exact { a, b, field }, Repr::Exact { a: a2, b: b2, .. }) => {
            Scalar::exact(a - a2, b - b2, field.clone())
        }
        (Repr::Float { v, prec }, Repr::Float { v: v2, prec: p2 }) => {
            let p = (*prec).max(*p2);
            Scalar::float(v.sub(v2, p, RM), p)
        }
        _ => mode_mismatch(),
    }
}

fn mul_impl(x: &Scalar, y: &Scalar) -> Scalar {
    match (&x.repr, &y.repr) {
        (Repr::Exact { a, b, field }, Repr::Exact { a: a2, b: b2, .. }) => Scalar::exact(
            a * a2 + b * b2 * &field.q,
            a * b2 + b * a2,
            field.clone(),
        ),
        (Repr::Float { v, prec }, Repr::Float { v: v2, prec: p2 }) => {
            let p = (*prec).max(*p2);
            Scalar::float(v.mul(v2, p, RM), p)
        }
        _ => mode_mismatch(),
    }
}

fn div_impl(x: &Scalar, y: &Scalar) -> Scalar {
    match (&x.repr, &y.repr) {
        (Repr::Exact { .. }, Repr::Exact { .. }) => x * &y.recip(),
        (Repr::Float { v, prec }, Repr::Float { v: v2, prec: p2 }) => {
            let p = (*prec).max(*p2);
            Scalar::float(v.div(v2, p, RM), p)
        }
        _ => mode_mismatch(),
    }
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.repr {
            Repr::Exact { a, b, field } => Scalar::exact(-a, -b, field.clone()),
            Repr::Float { v, prec } => Scalar::float(v.neg(), *prec),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Evaluation context: the base `q`, the mode, and the float precision.
///
/// Cheap to clone (shared innards).
#[derive(Clone)]
pub struct QContext {
    mode: Mode,
    q_rat: BigRational,
    precision: usize,
    prec_bits: usize,
    field: Option<Arc<ExactField>>,
    consts: Option<Arc<Mutex<Consts>>>,
}

impl fmt::Debug for QContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QContext")
            .field("mode", &self.mode)
            .field("q", &fmt_rat(&self.q_rat).to_string())
            .field("precision", &self.precision)
            .finish()
    }
}

/// Default decimal precision for float mode.
pub const DEFAULT_PRECISION: usize = 60;
/// Minimum accepted decimal precision for float mode.
pub const MIN_PRECISION: usize = 30;

impl QContext {
    /// Exact context over Q(r), r = q^{1/2}. Requires 0 < q < 1.
    pub fn exact(q: BigRational) -> Result<Self> {
        Self::check_q(&q)?;
        let field = Arc::new(ExactField {
            rational_root: rational_sqrt(&q),
            q: q.clone(),
        });
        Ok(QContext {
            mode: Mode::Exact,
            q_rat: q,
            precision: 0,
            prec_bits: 0,
            field: Some(field),
            consts: None,
        })
    }

    /// Float context with `precision` decimal digits (>= 30). Requires 0 < q < 1.
    pub fn float(q: BigRational, precision: usize) -> Result<Self> {
        Self::check_q(&q)?;
        if precision < MIN_PRECISION {
            return Err(QError::Precondition(format!(
                "float precision must be >= {MIN_PRECISION} digits, got {precision}"
            )));
        }
        let consts = Consts::new().map_err(|e| QError::Precondition(format!("{e:?}")))?;
        Ok(QContext {
            mode: Mode::Float,
            q_rat: q,
            precision,
            prec_bits: bits_for_digits(precision),
            field: None,
            consts: Some(Arc::new(Mutex::new(consts))),
        })
    }

    fn check_q(q: &BigRational) -> Result<()> {
        if !q.is_positive() || q >= &BigRational::one() {
            return Err(QError::Precondition(format!(
                "q must satisfy 0 < q < 1, got {}",
                fmt_rat(q)
            )));
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    /// Decimal precision (0 in exact mode).
    pub fn precision(&self) -> usize {
        self.precision
    }

    /// The rational value of q this context was built from.
    pub fn q_rational(&self) -> &BigRational {
        &self.q_rat
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        match self.mode {
            Mode::Exact => Scalar::exact(
                BigRational::from_integer(BigInt::from(n)),
                BigRational::zero(),
                self.field.clone().unwrap(),
            ),
            Mode::Float => Scalar::float(BigFloat::from_i64(n, self.prec_bits), self.prec_bits),
        }
    }

    pub fn rat(&self, num: i64, den: i64) -> Scalar {
        self.from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(&self, x: &BigRational) -> Scalar {
        match self.mode {
            Mode::Exact => Scalar::exact(x.clone(), BigRational::zero(), self.field.clone().unwrap()),
            Mode::Float => {
                let n = self.bigint_float(x.numer());
                let d = self.bigint_float(x.denom());
                Scalar::float(n.div(&d, self.prec_bits, RM), self.prec_bits)
            }
        }
    }

    fn bigint_float(&self, n: &BigInt) -> BigFloat {
        let mut cc = self.consts.as_ref().unwrap().lock().unwrap();
        BigFloat::parse(&n.to_string(), Radix::Dec, self.prec_bits, RM, &mut cc)
    }

    pub fn q(&self) -> Scalar {
        self.from_rational(&self.q_rat.clone())
    }

    /// r = q^{1/2}.
    pub fn r(&self) -> Scalar {
        self.q_pow_half(1)
    }

    /// q^{k/2} for any integer k (negative allowed).
    pub fn q_pow_half(&self, k: i64) -> Scalar {
        match self.mode {
            Mode::Exact => {
                let field = self.field.clone().unwrap();
                let r = match &field.rational_root {
                    Some(r0) => Scalar::exact(r0.clone(), BigRational::zero(), field.clone()),
                    None => Scalar::exact(BigRational::zero(), BigRational::one(), field.clone()),
                };
                r.pow_i(k)
            }
            Mode::Float => {
                let q = self.q();
                if k % 2 == 0 {
                    q.pow_i(k / 2)
                } else {
                    let r = match &q.repr {
                        Repr::Float { v, prec } => Scalar::float(v.sqrt(*prec, RM), *prec),
                        _ => unreachable!(),
                    };
                    q.pow_i(k.div_euclid(2)) * if k.rem_euclid(2) == 1 { r } else { self.one() }
                }
            }
        }
    }

    /// q^e for a rational exponent e. Exact mode requires denominator 1 or 2.
    pub fn q_pow(&self, e: &BigRational) -> Result<Scalar> {
        let two = BigInt::from(2);
        let scaled = e * BigRational::from_integer(two);
        if scaled.denom().is_one() {
            let k = scaled.numer().to_i64().ok_or_else(|| {
                QError::Precondition(format!("exponent {e} too large"))
            })?;
            return Ok(self.q_pow_half(k));
        }
        match self.mode {
            Mode::Exact => Err(QError::UnsupportedExactInput(format!(
                "q^({e}) is not representable in Q(r)"
            ))),
            Mode::Float => self.pow_rat(&self.q(), e),
        }
    }

    /// base^e for positive base and rational e (float mode only unless e is an integer).
    pub fn pow_rat(&self, base: &Scalar, e: &BigRational) -> Result<Scalar> {
        if e.denom().is_one() {
            let k = e.numer().to_i64().ok_or_else(|| {
                QError::Precondition(format!("exponent {e} too large"))
            })?;
            return Ok(base.pow_i(k));
        }
        match (&base.repr, self.mode) {
            (Repr::Float { v, prec }, Mode::Float) => {
                if !v.is_positive() {
                    return Err(QError::Precondition(
                        "rational power of a non-positive base".into(),
                    ));
                }
                let ef = self.from_rational(e);
                let ev = match &ef.repr {
                    Repr::Float { v, .. } => v.clone(),
                    _ => unreachable!(),
                };
                let mut cc = self.consts.as_ref().unwrap().lock().unwrap();
                Ok(Scalar::float(v.pow(&ev, *prec, RM, &mut cc), *prec))
            }
            _ => Err(QError::UnsupportedExactInput(format!(
                "non-integer power ^({e}) in exact mode"
            ))),
        }
    }

    /// Comparison tolerance 10^-(P-15); `None` in exact mode (comparisons are exact).
    pub fn tol(&self) -> Option<Scalar> {
        match self.mode {
            Mode::Exact => None,
            Mode::Float => {
                let exp = -(self.precision as i64 - 15);
                Some(self.pow10(exp))
            }
        }
    }

    /// Truncation target 10^-(P-5) for adaptive series and products: well
    /// below the comparison tolerance, so truncated quantities still clear
    /// residual checks with margin. In exact mode (where only explicitly
    /// tail-bounded partial sums occur) a fixed 10^-75 target is used.
    pub fn series_target(&self) -> Scalar {
        match self.mode {
            Mode::Exact => self.pow10(-75),
            Mode::Float => self.pow10(-(self.precision as i64 - 5)),
        }
    }

    /// 10^e at context precision (float mode), exact rational power of 10 otherwise.
    pub fn pow10(&self, e: i64) -> Scalar {
        self.int(10).pow_i(e)
    }

    /// `|x| < tol` in float mode, `x == 0` in exact mode.
    pub fn is_small(&self, x: &Scalar) -> bool {
        match self.tol() {
            None => x.is_zero(),
            Some(t) => x.abs() < t,
        }
    }

    /// Parse a rational literal `n` or `n/d` into a scalar of this context.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        Ok(self.from_rational(&parse_rational(s)?))
    }
}

/// Parse `n` or `n/d` (optionally signed) into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| QError::Parse(format!("bad rational literal `{s}`")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| QError::Parse(format!("bad rational literal `{s}`")))?;
    if d.is_zero() {
        return Err(QError::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_field_arithmetic_closes() {
        // q = 1/2: r is irrational, elements are genuine pairs.
        let ctx = QContext::exact(q(1, 2)).unwrap();
        let r = ctx.r();
        assert!((&r * &r - ctx.q()).is_zero());
        let x = ctx.rat(3, 4) + ctx.rat(2, 5) * &r;
        let y = x.recip();
        assert!((&x * &y - ctx.one()).is_zero());
        // signs on mixed pairs: 3/4 - 1/2 r > 0 since 9/16 > 1/8
        let m = ctx.rat(3, 4) - ctx.rat(1, 2) * &r;
        assert_eq!(m.signum(), 1);
        let n = ctx.rat(1, 2) - ctx.rat(3, 4) * &r;
        assert_eq!(n.signum(), -1);
    }

    #[test]
    fn exact_perfect_square_degenerates_to_rationals() {
        let ctx = QContext::exact(q(1, 4)).unwrap();
        let r = ctx.r();
        assert_eq!(r.as_rational().unwrap(), &q(1, 2));
        assert_eq!(ctx.q_pow_half(3).as_rational().unwrap(), &q(1, 8));
    }

    #[test]
    fn q_outside_unit_interval_rejected() {
        assert!(QContext::exact(q(3, 2)).is_err());
        assert!(QContext::exact(q(1, 1)).is_err());
        assert!(QContext::float(q(-1, 2), 60).is_err());
    }

    #[test]
    fn float_powers_and_tolerance() {
        let ctx = QContext::float(q(1, 2), 60).unwrap();
        let r = ctx.r();
        let diff = &r * &r - ctx.q();
        assert!(ctx.is_small(&diff));
        // q^{5/3} via general rational power
        let e = q(5, 3);
        let v = ctx.q_pow(&e).unwrap();
        let check = v.pow_i(3) - ctx.q().pow_i(5);
        assert!(ctx.is_small(&check));
        assert!(ctx.tol().unwrap() < ctx.pow10(-44));
    }

    #[test]
    fn exact_rejects_irrational_exponent() {
        let ctx = QContext::exact(q(1, 2)).unwrap();
        assert!(ctx.q_pow(&q(1, 3)).is_err());
        assert!(ctx.q_pow(&q(7, 2)).is_ok());
    }

    #[test]
    fn pow_i_handles_negatives() {
        let ctx = QContext::exact(q(1, 2)).unwrap();
        let v = ctx.rat(2, 3).pow_i(-3);
        assert_eq!(v.as_rational().unwrap(), &q(27, 8));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let ctx = QContext::exact(q(1, 2)).unwrap();
        let v = ctx.parse("-7/3").unwrap();
        assert_eq!(format!("{v}"), "-7/3");
        let w = ctx.rat(1, 2) + ctx.rat(3, 4) * ctx.r();
        assert_eq!(format!("{w}"), "1/2+3/4 r");
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(QContext::float(q(1, 2), 20).is_err());
        assert!(QContext::float(q(1, 2), 30).is_ok());
    }
}
