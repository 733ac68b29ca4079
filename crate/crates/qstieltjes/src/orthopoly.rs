//! Monic orthogonal polynomials from power moments, and the classical
//! characterization checks: discrete orthogonality, orthogonality of the
//! differences, the hypergeometric-type difference equation, the
//! Rodrigues-type representation, the three-term recurrence, and the Pade
//! interpolation conditions.
//!
//! Polynomials are built by the Stieltjes procedure (inner-product ratios
//! through the moment functional); Hankel determinants appear only as a
//! small-order oracle.

use crate::error::{QError, Result};
use crate::family::FamilySpec;
use crate::functional::MomentSequence;
use crate::lattice::{lattice_x_int, GridFunction, MAX_ITER};
use crate::poly::LatticePoly;
use crate::scalar::{QContext, Scalar};

/// Monic orthogonal polynomials P_0..P_n with norms and the three-term
/// recurrence data x P_n = alpha_n P_{n+1} + beta_n P_n + gamma_n P_{n-1}
/// (alpha_n = 1 for monic polynomials).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    pub polys: Vec<LatticePoly>,
    /// Squared norms <U, P_k^2>, all positive.
    pub norm_sq: Vec<Scalar>,
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
    pub gamma: Vec<Scalar>,
    /// The power moments the construction consumed.
    pub moments: MomentSequence,
}

/// Build P_0..P_{n_max} by the Stieltjes recurrence
/// P_{k+1} = (w - beta_k) P_k - gamma_k P_{k-1} with
/// beta_k = <w P_k, P_k>/<P_k, P_k>, gamma_k = |P_k|^2/|P_{k-1}|^2.
pub fn build_basis(fam: &FamilySpec, n_max: u32) -> Result<OrthoBasis> {
    if let Some(m) = fam.support_end() {
        if (n_max as i64) > m {
            return Err(QError::Precondition(format!(
                "n_max={n_max} needs more than the {} support points",
                m + 1
            )));
        }
    }
    let ctx = fam.ctx();
    let moments = MomentSequence::power(fam, 2 * n_max + 2)?;
    let pair = |a: &LatticePoly, b: &LatticePoly| moments.pair_poly(&a.mul(b));

    let mut polys = vec![LatticePoly::one(ctx)];
    let mut norm_sq: Vec<Scalar> = Vec::new();
    let mut beta = Vec::new();
    let mut gamma = vec![ctx.zero()];
    let w = LatticePoly::w(ctx);

    for k in 0..=n_max as usize {
        let p_k = polys[k].clone();
        let nrm = pair(&p_k, &p_k)?;
        if nrm.signum() <= 0 {
            return Err(QError::MomentInconsistency(format!(
                "norm^2 of P_{k} is not positive"
            )));
        }
        let b_k = pair(&w.mul(&p_k), &p_k)? / &nrm;
        if k > 0 {
            gamma.push(&nrm / &norm_sq[k - 1]);
        }
        norm_sq.push(nrm);
        beta.push(b_k.clone());
        if k < n_max as usize {
            let shifted = w.mul(&p_k).sub(&p_k.scale(&b_k));
            let next = if k > 0 {
                shifted.sub(&polys[k - 1].scale(&gamma[k]))
            } else {
                shifted
            };
            polys.push(next.trimmed());
        }
    }
    let alpha = vec![ctx.one(); beta.len()];
    Ok(OrthoBasis {
        polys,
        norm_sq,
        alpha,
        beta,
        gamma,
        moments,
    })
}

fn sqrt_scale(x: &Scalar, ctx: &QContext) -> Scalar {
    if ctx.is_exact() {
        // exact-mode residuals are compared against exact zero; the scale
        // only has to be positive
        x.clone()
    } else {
        ctx.pow_rat(x, &num_rational::BigRational::new(1.into(), 2.into()))
            .expect("positive norm")
    }
}

/// Max over k != m of |<U, P_k P_m>| / (|P_k| |P_m|).
pub fn orthogonality_check(basis: &OrthoBasis, fam: &FamilySpec) -> Result<Scalar> {
    let ctx = fam.ctx();
    let n = basis.polys.len();
    let mut worst = ctx.zero();
    for k in 0..n {
        for m in 0..k {
            let ip = basis.moments.pair_poly(&basis.polys[k].mul(&basis.polys[m]))?;
            let scale = sqrt_scale(&(&basis.norm_sq[k] * &basis.norm_sq[m]), ctx);
            worst = worst.max_with(&(ip.abs() / scale));
        }
    }
    Ok(worst)
}

/// Grid horizon for pointwise checks: the support end, or the point where
/// the weight profile has decayed below the series target (capped for the
/// infinite families; the omitted tail is far below tolerance).
fn check_horizon(fam: &FamilySpec, cap: i64) -> Result<i64> {
    match fam.support_end() {
        Some(m) => Ok(m),
        None => {
            let ctx = fam.ctx();
            let target = ctx.series_target();
            let mut val = ctx.one();
            for s in 0..MAX_ITER as i64 {
                if val.abs() < target || s >= cap {
                    return Ok(s);
                }
                val = val * fam.weight_ratio(s)?;
            }
            Err(QError::Truncation("weight profile does not decay".into()))
        }
    }
}

/// rho_1(s) = rho(s+1) sigma(s+1): the weight orthogonalizing the first
/// differences.
fn rho1(fam: &FamilySpec, s: i64, profile: &[Scalar]) -> Scalar {
    let ctx = fam.ctx();
    let rho = |j: i64| -> Scalar {
        if j < 0 || j as usize >= profile.len() {
            ctx.zero()
        } else {
            profile[j as usize].clone()
        }
    };
    rho(s + 1) * fam.sigma_at(s + 1)
}

/// Max normalized off-diagonal of
/// sum_s (Delta P_k/Delta x)(Delta P_m/Delta x) rho_1(s) Delta x(s),
/// Delta x(s) = q^s.
pub fn diff_orthogonality_check(basis: &OrthoBasis, fam: &FamilySpec) -> Result<Scalar> {
    diff_orthogonality_with(basis, fam, true)
}

/// Same sum with `with_sigma = false` dropping the sigma(s+1) factor from
/// rho_1 — the negative control showing the check is sensitive.
pub fn diff_orthogonality_with(
    basis: &OrthoBasis,
    fam: &FamilySpec,
    with_sigma: bool,
) -> Result<Scalar> {
    let ctx = fam.ctx();
    let m_end = check_horizon(fam, 220)?;
    let profile = fam.weight_profile(m_end)?;
    let n = basis.polys.len();

    // Delta P_k / Delta x sampled on s = 0..m_end-1
    let dp: Vec<Vec<Scalar>> = basis
        .polys
        .iter()
        .map(|p| {
            (0..m_end)
                .map(|s| {
                    (p.eval_at_s(s + 1, ctx) - p.eval_at_s(s, ctx)) / ctx.q().pow_i(s)
                })
                .collect()
        })
        .collect();

    let pairing = |k: usize, m: usize| -> Scalar {
        let mut acc = ctx.zero();
        for s in 0..m_end {
            let r1 = if with_sigma {
                rho1(fam, s, &profile)
            } else {
                let j = (s + 1) as usize;
                if j < profile.len() {
                    profile[j].clone()
                } else {
                    ctx.zero()
                }
            };
            acc = acc + &dp[k][s as usize] * &dp[m][s as usize] * r1 * ctx.q().pow_i(s);
        }
        acc
    };

    let mut worst = ctx.zero();
    let diags: Vec<Scalar> = (1..n).map(|k| pairing(k, k)).collect();
    for k in 1..n {
        for m in 1..k {
            let off = pairing(k, m);
            let scale = sqrt_scale(&(&diags[k - 1] * &diags[m - 1]), ctx);
            worst = worst.max_with(&(off.abs() / scale));
        }
    }
    Ok(worst)
}

/// The hypergeometric-type operator
/// L[y](s) = sigma(s) Delta/Delta x(s-1/2) [ Nabla y / Nabla x ](s)
///           + tau(s) Delta y(s)/Delta x(s)
/// applied to a polynomial on the grid.
fn apply_difference_operator(
    fam: &FamilySpec,
    y: &LatticePoly,
    s: i64,
) -> Scalar {
    let ctx = fam.ctx();
    let tau = fam.tau_poly();
    let yv = |u: i64| y.eval_at_s(u, ctx);
    // g(u) = [y(u) - y(u-1)] / [x(u) - x(u-1)], x(u)-x(u-1) = q^{u-1}
    let g = |u: i64| (yv(u) - yv(u - 1)) / ctx.q().pow_i(u - 1);
    let w = lattice_x_int(s, ctx);
    fam.sigma_at(s) * (g(s + 1) - g(s)) / ctx.q_pow_half(2 * s - 1)
        + tau.eval(&w) * (yv(s + 1) - yv(s)) / ctx.q().pow_i(s)
}

/// Fit lambda_n from L[P_n] = -lambda_n P_n at one interior non-root point,
/// then report the max normalized residual of L[P_n] + lambda_n P_n over the
/// interior grid.
pub fn hypergeometric_eq_residual(
    basis: &OrthoBasis,
    fam: &FamilySpec,
    n: u32,
) -> Result<(Scalar, Scalar)> {
    if n as usize >= basis.polys.len() {
        return Err(QError::Precondition(format!("basis holds fewer than {n} polynomials")));
    }
    let ctx = fam.ctx();
    let p_n = &basis.polys[n as usize];
    let m_end = check_horizon(fam, 40)?;
    if m_end < 2 {
        return Err(QError::Precondition("support too small for the interior grid".into()));
    }
    // interior points s = 1..=m_end-1
    let mut lambda: Option<Scalar> = None;
    let threshold = match ctx.tol() {
        Some(t) => t,
        None => ctx.zero(),
    };
    for s in 1..m_end {
        let pv = p_n.eval_at_s(s, ctx);
        if pv.abs() > threshold {
            lambda = Some(-apply_difference_operator(fam, p_n, s) / pv);
            break;
        }
    }
    let lambda = lambda.ok_or_else(|| {
        QError::Fit(format!("P_{n} vanishes on the whole interior grid"))
    })?;

    let mut worst = ctx.zero();
    let mut scale = ctx.one();
    for s in 1..m_end {
        let lp = apply_difference_operator(fam, p_n, s);
        let pv = p_n.eval_at_s(s, ctx);
        worst = worst.max_with(&(&lp + &lambda * &pv).abs());
        scale = scale.max_with(&lp.abs());
    }
    Ok((lambda, worst / scale))
}

/// lambda_n recovered from the leading-coefficient balance: apply L to the
/// monomial w^n and take minus the n-th divided difference (the leading
/// coefficient of the degree-n image).
pub fn lambda_by_leading_action(fam: &FamilySpec, n: u32) -> Result<Scalar> {
    let ctx = fam.ctx();
    let mono = LatticePoly::w_pow(n as usize, ctx);
    let pts: Vec<(Scalar, Scalar)> = (1..=n as i64 + 1)
        .map(|s| {
            (
                lattice_x_int(s, ctx),
                apply_difference_operator(fam, &mono, s),
            )
        })
        .collect();
    let mut dd: Vec<Scalar> = pts.iter().map(|(_, v)| v.clone()).collect();
    let xs: Vec<Scalar> = pts.iter().map(|(x, _)| x.clone()).collect();
    for level in 1..=n as usize {
        dd = (0..dd.len() - 1)
            .map(|i| (&dd[i + 1] - &dd[i]) / (&xs[i + level] - &xs[i]))
            .collect();
    }
    Ok(-dd[0].clone())
}

/// The Rodrigues-type construction: (1/rho(s)) applied to the n-fold
/// composition of backward differences over the shifted lattices
/// x_k(s) = x(s + k/2), acting on rho_n(s) = rho(s+n) prod_m sigma(s+m).
///
/// The normalizing constant is left free; callers compare the result to
/// P_n by a proportionality fit.
pub fn rodrigues_poly(fam: &FamilySpec, n: u32) -> Result<GridFunction> {
    let ctx = fam.ctx();
    let m_end = check_horizon(fam, 40)?;
    let nn = n as i64;

    // unnormalized weight, extended by zero outside the support
    let profile = fam.weight_profile(fam.support_end().unwrap_or(m_end + nn))?;
    let rho = |j: i64| -> Scalar {
        if j < 0 || j as usize >= profile.len() {
            ctx.zero()
        } else {
            profile[j as usize].clone()
        }
    };

    // rho_n on j = -n ..= m_end
    let mut values: Vec<Scalar> = (-nn..=m_end)
        .map(|j| {
            let mut v = rho(j + nn);
            for m in 1..=nn {
                v = v * fam.sigma_at(j + m);
            }
            v
        })
        .collect();
    let mut start = -nn;

    // apply Nabla/Nabla x_k for k = n down to 1; each pass trims the front
    for k in (1..=nn).rev() {
        values = (1..values.len())
            .map(|i| {
                let j = start + i as i64;
                // x_k(j) - x_k(j-1) = q^{j + k/2 - 1}
                (&values[i] - &values[i - 1]) / ctx.q_pow_half(2 * (j - 1) + k)
            })
            .collect();
        start += 1;
        if values.is_empty() {
            return Err(QError::SupportTooSmall("rodrigues grid exhausted".into()));
        }
    }
    debug_assert_eq!(start, 0);

    let out = (0..values.len())
        .map(|i| {
            let s = i as i64;
            let r = rho(s);
            if r.is_zero() {
                ctx.zero()
            } else {
                &values[i] / r
            }
        })
        .collect();
    Ok(GridFunction::new(0, out))
}

/// Proportionality fit of a Rodrigues grid against P_n: the relative spread
/// of the pointwise ratio (zero/small means proportional).
pub fn rodrigues_proportionality(
    basis: &OrthoBasis,
    fam: &FamilySpec,
    n: u32,
) -> Result<Scalar> {
    if n as usize >= basis.polys.len() {
        return Err(QError::Precondition(format!("basis holds fewer than {n} polynomials")));
    }
    let ctx = fam.ctx();
    let grid = rodrigues_poly(fam, n)?;
    let p_n = &basis.polys[n as usize];
    let threshold = match ctx.tol() {
        Some(t) => t,
        None => ctx.zero(),
    };
    let mut reference: Option<Scalar> = None;
    let mut worst = ctx.zero();
    let end = match fam.support_end() {
        Some(m) => m.min(grid.end()),
        None => grid.end(),
    };
    for s in 0..=end {
        let pv = p_n.eval_at_s(s, ctx);
        if pv.abs() <= threshold {
            continue; // a root of P_n carries no ratio information
        }
        let ratio = grid.get(s).unwrap() / pv;
        match &reference {
            None => reference = Some(ratio),
            Some(r0) => {
                worst = worst.max_with(&((&ratio - r0).abs() / r0.abs()));
            }
        }
    }
    if reference.is_none() {
        return Err(QError::Fit(format!("P_{n} vanished on the whole grid")));
    }
    Ok(worst)
}

/// The Pade interpolation conditions: with P_n's power coefficients a_i,
/// the residual max_{j<n} |sum_i a_i u_{i+j}| (normalized by the largest
/// summand) — the coefficient of z^{-(j+1)} in P_n(z) S(z) - Q_{n-1}(z).
pub fn pade_check(basis: &OrthoBasis, fam: &FamilySpec, n: u32) -> Result<Scalar> {
    if n as usize >= basis.polys.len() {
        return Err(QError::Precondition(format!("basis holds fewer than {n} polynomials")));
    }
    let ctx = fam.ctx();
    let coeffs = basis.polys[n as usize].coeffs();
    let u = &basis.moments.values;
    if u.len() < 2 * n as usize {
        return Err(QError::Precondition("moment sequence too short".into()));
    }
    let mut worst = ctx.zero();
    for j in 0..n as usize {
        let mut acc = ctx.zero();
        let mut scale = ctx.one();
        for (i, a) in coeffs.iter().enumerate() {
            let term = a * &u[i + j];
            scale = scale.max_with(&term.abs());
            acc = acc + term;
        }
        worst = worst.max_with(&(acc.abs() / scale));
    }
    Ok(worst)
}

/// Q_{n-1}(z) = <U, (P_n(z) - P_n(x))/(z - x)> as a polynomial in z:
/// sum_m a_m sum_{i<m} z^i u_{m-1-i}.
pub fn pade_numerator(basis: &OrthoBasis, n: u32) -> Result<LatticePoly> {
    if n == 0 || n as usize >= basis.polys.len() {
        return Err(QError::Precondition("need 1 <= n <= basis size".into()));
    }
    let u = &basis.moments.values;
    let coeffs = basis.polys[n as usize].coeffs();
    let ctx_zero = u[0].zero_like();
    let mut out = vec![ctx_zero; n as usize];
    for (m, a) in coeffs.iter().enumerate() {
        for i in 0..m {
            out[i] = &out[i] + a * &u[m - 1 - i];
        }
    }
    Ok(LatticePoly::new(out).trimmed())
}

/// Determinant of the Hankel matrix (u_{i+j})_{0<=i,j<size-1} of a moment
/// sequence, by column-subset dynamic programming (small sizes only).
pub fn hankel_det(values: &[Scalar], size: usize) -> Result<Scalar> {
    if size == 0 || values.len() < 2 * size - 1 {
        return Err(QError::Precondition("moment sequence too short".into()));
    }
    let zero = values[0].zero_like();
    // dp over subsets of columns, row by row
    let full = 1usize << size;
    let mut dp = vec![None::<Scalar>; full];
    dp[0] = Some(values[0].zero_like().pow_i(0)); // one
    for mask in 0..full {
        let row = (mask as u32).count_ones() as usize;
        let Some(cur) = dp[mask].clone() else { continue };
        if row == size {
            continue;
        }
        for col in 0..size {
            if mask & (1 << col) != 0 {
                continue;
            }
            // parity: inversions added = chosen columns above `col`
            let above = (mask >> (col + 1)).count_ones();
            let signed = if above % 2 == 0 {
                &cur * &values[row + col]
            } else {
                -(&cur * &values[row + col])
            };
            let nxt = mask | (1 << col);
            dp[nxt] = Some(match dp[nxt].take() {
                None => signed,
                Some(acc) => acc + signed,
            });
        }
    }
    Ok(dp[full - 1].clone().unwrap_or(zero))
}
