//! Off-lattice evaluation points parameterized by t = q^{-z}.
//!
//! Every Stieltjes-side quantity is rational in t (and r = q^{1/2}), so
//! working through t keeps exact mode available and avoids branch choices
//! of q^z for non-integer z. The shift z -> z-1 is t -> q t.

use crate::error::{QError, Result};
use crate::scalar::{QContext, Scalar};

/// A point z off the lattice, stored as t = q^{-z} (real, nonzero).
#[derive(Debug, Clone)]
pub struct EvalPoint {
    t: Scalar,
}

impl EvalPoint {
    pub fn new(t: Scalar, _ctx: &QContext) -> Result<Self> {
        if t.is_zero() {
            return Err(QError::Precondition("evaluation point t must be nonzero".into()));
        }
        Ok(EvalPoint { t })
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }

    /// x(z) = (1 - t)/(t (q - 1)).
    pub fn x_z(&self, ctx: &QContext) -> Scalar {
        (ctx.one() - &self.t) / (&self.t * (ctx.q() - ctx.one()))
    }

    /// q^{1-z} = q t, the shifted lower parameter of every closed form.
    pub fn q_one_minus_z(&self, ctx: &QContext) -> Scalar {
        ctx.q() * &self.t
    }

    /// The point z - 1, i.e. t -> q t.
    pub fn shifted(&self, ctx: &QContext) -> EvalPoint {
        EvalPoint {
            t: ctx.q() * &self.t,
        }
    }

    /// 1 / nabla x(z+1/2) = t q^{1/2}, the factor normalizing the backward
    /// difference in z.
    pub fn inv_nabla_x(&self, ctx: &QContext) -> Scalar {
        &self.t * ctx.q_pow_half(1)
    }

    /// x(z) - x(s) = (1 - q^s t)/(t (q-1)) for an integer lattice point s.
    pub fn x_gap(&self, s: i64, ctx: &QContext) -> Scalar {
        (ctx.one() - ctx.q().pow_i(s) * &self.t) / (&self.t * (ctx.q() - ctx.one()))
    }

    /// Reject points on (or, in float mode, within 10^-6 of) the pole set
    /// { q^{-s} : 0 <= s <= s_max }.
    pub fn assert_off_poles(&self, s_max: Option<i64>, ctx: &QContext) -> Result<()> {
        if self.t.signum() < 0 {
            return Ok(()); // poles are all positive
        }
        let zone = if ctx.is_exact() {
            ctx.zero()
        } else {
            ctx.pow10(-6)
        };
        let mut qs_t = self.t.clone();
        let mut s = 0i64;
        loop {
            if let Some(m) = s_max {
                if s > m {
                    break;
                }
            }
            let gap = (ctx.one() - &qs_t).abs();
            if if ctx.is_exact() { gap.is_zero() } else { gap <= zone } {
                return Err(QError::Pole(format!(
                    "t is within the exclusion zone of the lattice pole q^-{s}"
                )));
            }
            // once q^s t < 1/2 the remaining gaps only grow toward 1
            if s_max.is_none() && qs_t < ctx.rat(1, 2) {
                break;
            }
            qs_t = qs_t * ctx.q();
            s += 1;
            if s > 100_000 {
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ctx() -> QContext {
        QContext::exact(BigRational::new(BigInt::from(1), BigInt::from(2))).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let c = ctx();
        let pt = EvalPoint::new(c.int(3), &c).unwrap();
        // x(z) = (1-3)/(3(1/2-1)) = 4/3
        assert_eq!(pt.x_z(&c).as_rational().unwrap(),
                   &BigRational::new(BigInt::from(4), BigInt::from(3)));
        assert_eq!(pt.q_one_minus_z(&c).as_rational().unwrap(),
                   &BigRational::new(BigInt::from(3), BigInt::from(2)));
        // x(z) - x(2) = 4/3 - 3/2 = -1/6
        assert_eq!(pt.x_gap(2, &c).as_rational().unwrap(),
                   &BigRational::new(BigInt::from(-1), BigInt::from(6)));
        let sh = pt.shifted(&c);
        assert_eq!(sh.t().as_rational().unwrap(),
                   &BigRational::new(BigInt::from(3), BigInt::from(2)));
    }

    #[test]
    fn pole_detection() {
        let c = ctx();
        // t = q^{-3} = 8 is a pole for any support containing s = 3
        let pt = EvalPoint::new(c.int(8), &c).unwrap();
        assert!(pt.assert_off_poles(Some(5), &c).is_err());
        assert!(pt.assert_off_poles(Some(2), &c).is_ok());
        // infinite support: t = 8 still collides with s = 3
        assert!(pt.assert_off_poles(None, &c).is_err());
        // negative t never collides
        let nt = EvalPoint::new(c.int(-5), &c).unwrap();
        assert!(nt.assert_off_poles(None, &c).is_ok());
        assert!(EvalPoint::new(c.zero(), &c).is_err());
    }

    #[test]
    fn float_exclusion_zone() {
        let c = QContext::float(BigRational::new(BigInt::from(1), BigInt::from(2)), 60).unwrap();
        // within 10^-6 of the pole at q^{-2} = 4
        let near = c.int(4) + c.pow10(-7);
        let pt = EvalPoint::new(near, &c).unwrap();
        assert!(pt.assert_off_poles(Some(4), &c).is_err());
        let far = c.int(4) + c.rat(1, 100);
        let pt = EvalPoint::new(far, &c).unwrap();
        assert!(pt.assert_off_poles(Some(4), &c).is_ok());
    }
}
