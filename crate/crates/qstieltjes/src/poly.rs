//! Dense polynomials in the lattice variable `w = x(s)`.
//!
//! These carry the Pearson data (sigma, tau, p, sigma~), the constructed
//! orthogonal polynomials, and the falling-basis/power-basis change of basis.


use crate::lattice::{big, lattice_x, lattice_x_int};
use crate::scalar::{QContext, Scalar};

/// A polynomial in `w = x(s)`, coefficients ascending by degree.
///
/// The coefficient vector is never empty; the zero polynomial stores one
/// zero coefficient.
#[derive(Debug, Clone)]
pub struct LatticePoly {
    coeffs: Vec<Scalar>,
}

impl LatticePoly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        LatticePoly { coeffs }
    }

    pub fn zero(ctx: &QContext) -> Self {
        LatticePoly::new(vec![ctx.zero()])
    }

    pub fn one(ctx: &QContext) -> Self {
        LatticePoly::new(vec![ctx.one()])
    }

    pub fn constant(c: Scalar) -> Self {
        LatticePoly::new(vec![c])
    }

    /// The monomial `w`.
    pub fn w(ctx: &QContext) -> Self {
        LatticePoly::new(vec![ctx.zero(), ctx.one()])
    }

    /// `w^k`.
    pub fn w_pow(k: usize, ctx: &QContext) -> Self {
        let mut coeffs = vec![ctx.zero(); k + 1];
        coeffs[k] = ctx.one();
        LatticePoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `w^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    /// Index of the last coefficient that is not exactly zero.
    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && self.coeffs[d].is_zero() {
            d -= 1;
        }
        d
    }

    /// Degree ignoring coefficients below the context tolerance.
    pub fn degree_within(&self, ctx: &QContext) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && ctx.is_small(&self.coeffs[d]) {
            d -= 1;
        }
        d
    }

    /// Drop trailing coefficients that are exactly zero.
    pub fn trimmed(mut self) -> Self {
        let d = self.degree();
        self.coeffs.truncate(d + 1);
        self
    }

    pub fn eval(&self, w: &Scalar) -> Scalar {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * w + c;
        }
        acc
    }

    /// Evaluate at the integer lattice point `w = x(s)`.
    pub fn eval_at_s(&self, s: i64, ctx: &QContext) -> Scalar {
        self.eval(&lattice_x_int(s, ctx))
    }

    pub fn add(&self, rhs: &LatticePoly) -> LatticePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = rhs.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        LatticePoly::new(coeffs)
    }

    pub fn sub(&self, rhs: &LatticePoly) -> LatticePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = rhs.coeffs.get(i).unwrap_or(&zero);
                a - b
            })
            .collect();
        LatticePoly::new(coeffs)
    }

    pub fn scale(&self, c: &Scalar) -> LatticePoly {
        LatticePoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, rhs: &LatticePoly) -> LatticePoly {
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + a * b;
            }
        }
        LatticePoly::new(coeffs)
    }
}

/// The polynomial `q^s = (q-1) w + 1` in the lattice variable.
pub fn qs_as_poly(ctx: &QContext) -> LatticePoly {
    LatticePoly::new(vec![ctx.one(), ctx.q() - ctx.one()])
}

/// `nabla x(s+1/2) = q^{-1/2}(q-1) w + q^{-1/2}` as a polynomial in w.
pub fn nabla_x_shift_poly(ctx: &QContext) -> LatticePoly {
    let rinv = ctx.q_pow_half(-1);
    LatticePoly::new(vec![rinv.clone(), rinv * (ctx.q() - ctx.one())])
}

/// The q-falling factorial `[s]^{(k)}` expanded in powers of `w = x(s)`:
/// the product of `q^{-j} w + x(-j)` over `j < k`.
pub fn qfalling_as_poly(k: u32, ctx: &QContext) -> LatticePoly {
    let mut acc = LatticePoly::one(ctx);
    for j in 0..k {
        let factor = LatticePoly::new(vec![
            lattice_x(&big(-(j as i64)), ctx).expect("integer point"),
            ctx.q_pow_half(-2 * (j as i64)),
        ]);
        acc = acc.mul(&factor);
    }
    acc
}

/// Change-of-basis rows: `rows[k]` holds the power-basis coefficients of
/// `[s]^{(k)}` for `k = 0..=n`. The matrix is triangular with unit-like
/// diagonal, so it also drives the inverse conversion.
pub fn falling_to_power_rows(n: u32, ctx: &QContext) -> Vec<Vec<Scalar>> {
    (0..=n)
        .map(|k| qfalling_as_poly(k, ctx).coeffs().to_vec())
        .collect()
}

/// Express `w^m` in the falling basis: coefficients `c_k` with
/// `w^m = sum_k c_k [s]^{(k)}`, by back-substitution through the triangular
/// change of basis.
pub fn power_in_falling_basis(m: u32, ctx: &QContext) -> Vec<Scalar> {
    let rows = falling_to_power_rows(m, ctx);
    let mut target = vec![ctx.zero(); m as usize + 1];
    target[m as usize] = ctx.one();
    let mut out = vec![ctx.zero(); m as usize + 1];
    for k in (0..=m as usize).rev() {
        let lead = &rows[k][k];
        let c = &target[k] / lead;
        for (i, r) in rows[k].iter().enumerate() {
            target[i] = &target[i] - &c * r;
        }
        out[k] = c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::qfalling_int;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ctx() -> QContext {
        QContext::exact(BigRational::new(BigInt::from(2), BigInt::from(5))).unwrap()
    }

    #[test]
    fn eval_matches_horner_expansion() {
        let c = ctx();
        // 3 - 2w + w^2 at w = x(2)
        let p = LatticePoly::new(vec![c.int(3), c.int(-2), c.one()]);
        let w = lattice_x_int(2, &c);
        let direct = c.int(3) - c.int(2) * &w + &w * &w;
        assert!((p.eval(&w) - direct).is_zero());
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn qs_poly_represents_q_to_s() {
        let c = ctx();
        let p = qs_as_poly(&c);
        for s in 0..6 {
            let expect = c.q().pow_i(s);
            assert!((p.eval_at_s(s, &c) - expect).is_zero());
        }
    }

    #[test]
    fn falling_poly_matches_pointwise_product() {
        let c = ctx();
        for k in 0..=5u32 {
            let p = qfalling_as_poly(k, &c);
            assert_eq!(p.degree(), k as usize);
            for s in 0..8i64 {
                assert!((p.eval_at_s(s, &c) - qfalling_int(s, k, &c)).is_zero());
            }
        }
    }

    #[test]
    fn power_in_falling_basis_round_trips() {
        let c = ctx();
        for m in 0..=5u32 {
            let coeffs = power_in_falling_basis(m, &c);
            for s in 0..8i64 {
                let recomposed = coeffs
                    .iter()
                    .enumerate()
                    .fold(c.zero(), |acc, (k, ck)| {
                        acc + ck * qfalling_int(s, k as u32, &c)
                    });
                let direct = lattice_x_int(s, &c).pow_i(m as i64);
                assert!((recomposed - direct).is_zero(), "m={m} s={s}");
            }
        }
    }
}
