//! Faure's digit-wise formula for the local discrepancy on the grid
//! `(λ/b^n, N/b^n)`, and the λ-sums built from it.
//!
//! `EpsilonContext` and the λ-sum functions index `Σ = (σ_0, …, σ_{n−1})`
//! exactly as the pattern stores it: `ν_j` pairs `σ_i` with the digit `N_i`
//! and the `j`-th term uses `σ_{j−1}`. With the point construction of
//! [`crate::pointset`] that indexing describes the set built from the
//! reversed word, so [`faure_local_discrepancy`] reverses before evaluating.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::Error;
use crate::perm::{Permutation, SigmaPattern};
use crate::phi::{phi, phi_aggregate, PhiKind};
use crate::rational::Rational;

/// Digits of `λ` (most significant first) and `N` (least significant first)
/// together with the pattern they are read against.
#[derive(Clone, Debug)]
pub struct EpsilonContext<'a> {
    pattern: &'a SigmaPattern,
    lambda: u64,
    big_n: u64,
    pow: Vec<u64>,
}

impl<'a> EpsilonContext<'a> {
    pub fn new(pattern: &'a SigmaPattern, lambda: u64, big_n: u64) -> Result<Self, Error> {
        let b = pattern.base() as u64;
        let n = pattern.len();
        let pow: Vec<u64> = (0..=n as u32)
            .map(|e| b.checked_pow(e))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::OutOfRange(format!("b^n overflows for b={b}, n={n}")))?;
        let scale = pow[n];
        for (name, v) in [("lambda", lambda), ("N", big_n)] {
            if v == 0 || v > scale {
                return Err(Error::OutOfRange(format!("{name} = {v} not in 1..={scale}")));
            }
        }
        Ok(EpsilonContext {
            pattern,
            lambda,
            big_n,
            pow,
        })
    }

    fn b(&self) -> u64 {
        self.pattern.base() as u64
    }

    fn n(&self) -> usize {
        self.pattern.len()
    }

    /// `(λ_1, …, λ_n)` with `λ = λ_1 b^{n−1} + … + λ_n`.
    pub fn lambda_digits(&self) -> Vec<usize> {
        let n = self.n();
        (1..=n)
            .map(|i| ((self.lambda / self.pow[n - i]) % self.b()) as usize)
            .collect()
    }

    /// `(N_0, …, N_{n−1})` with `N = N_0 + N_1 b + …`.
    pub fn n_digits(&self) -> Vec<usize> {
        (0..self.n())
            .map(|i| ((self.big_n / self.pow[i]) % self.b()) as usize)
            .collect()
    }

    /// `ν_j = σ_j(N_j) b^{n−j−1} + … + σ_{n−1}(N_{n−1})`.
    pub fn nu(&self, j: usize) -> u64 {
        let n = self.n();
        let digits = self.n_digits();
        (j..n)
            .map(|i| self.pattern.component(i).apply(digits[i]) as u64 * self.pow[n - 1 - i])
            .sum()
    }

    /// `Λ_{j−1} = λ_j b^{n−j} + … + λ_n`, i.e. `λ mod b^{n−j+1}`.
    pub fn big_lambda(&self, j: usize) -> u64 {
        self.lambda % self.pow[self.n() + 1 - j]
    }

    fn is_full(&self) -> bool {
        let scale = self.pow[self.n()];
        self.lambda == scale || self.big_n == scale
    }
}

/// `ε_j(λ, N, Σ)` for `1 ≤ j ≤ n`.
pub fn faure_epsilon(ctx: &EpsilonContext<'_>, j: usize) -> Result<usize, Error> {
    let n = ctx.n();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    if ctx.is_full() {
        return Ok(0);
    }
    if j == n {
        return Ok((ctx.lambda % ctx.b()) as usize);
    }
    let big_lambda = ctx.big_lambda(j);
    let nu = ctx.nu(j);
    if big_lambda <= nu {
        return Ok(0);
    }
    // ν + (h−1)b^{n−j} < Λ ≤ ν + h·b^{n−j}
    let step = ctx.pow[n - j];
    let h = (big_lambda - nu).div_ceil(step);
    Ok(if h < ctx.b() { h as usize } else { 0 })
}

fn epsilons(ctx: &EpsilonContext<'_>) -> Vec<usize> {
    (1..=ctx.n())
        .map(|j| faure_epsilon(ctx, j).expect("j in range"))
        .collect()
}

/// `Σ_{j=1}^n φ_{b,ε_j}^{σ_{j−1}}(N/b^j)` in the pattern's own indexing.
pub fn faure_sum_as_indexed(pattern: &SigmaPattern, lambda: u64, big_n: u64) -> Result<Rational, Error> {
    let ctx = EpsilonContext::new(pattern, lambda, big_n)?;
    let b = pattern.base() as u64;
    Ok(epsilons(&ctx)
        .into_iter()
        .enumerate()
        .map(|(i, eps)| {
            let x = Rational::frac(big_n as i64, b.pow(i as u32 + 1) as i64);
            phi(eps, pattern.component(i), &x).expect("ε is a digit")
        })
        .sum())
}

/// `E(λ/b^n, N/b^n)` of the scrambled set built from `pattern`, by the
/// digit formula.
pub fn faure_local_discrepancy(pattern: &SigmaPattern, lambda: u64, big_n: u64) -> Result<Rational, Error> {
    faure_sum_as_indexed(&pattern.reversed(), lambda, big_n)
}

/// `b^j·φ_{b,h}^σ(r/b^j)` for `0 ≤ r < b^j`, as an integer.
fn phi_scaled(h: usize, sigma: &[usize], r: u64, bj: u64, b: u64) -> i128 {
    if r == 0 || h == 0 {
        return 0;
    }
    let cell = (r * b / bj) as usize;
    let seen = &sigma[..=cell];
    let (r, bj, h) = (r as i128, bj as i128, h as i128);
    if h as usize <= sigma[cell] {
        let below = seen.iter().filter(|&&v| (v as i128) < h).count() as i128;
        below * bj - h * r
    } else {
        let above = seen.iter().filter(|&&v| (v as i128) >= h).count() as i128;
        (b as i128 - h) * r - above * bj
    }
}

/// `b^n·E(λ/b^n, N/b^n)` by the digit formula (reversed word), in integers.
fn faure_scaled(reversed: &SigmaPattern, lambda: u64, big_n: u64) -> i128 {
    let ctx = EpsilonContext::new(reversed, lambda, big_n).expect("grid pair in range");
    let b = ctx.b();
    let n = ctx.n();
    let mut total = 0i128;
    for j in 1..=n {
        let eps = faure_epsilon(&ctx, j).expect("j in range");
        let bj = ctx.pow[j];
        let v = phi_scaled(eps, reversed.component(j - 1).images(), big_n % bj, bj, b);
        total += v * ctx.pow[n - j] as i128;
    }
    total
}

/// Which point set an L2 computation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `R^Σ`, `N = b^n` points
    Scrambled,
    /// `R^Σ ∪ R^{Σ*}`, `N = 2b^n` points
    Symmetrized,
}

/// `∫∫E²` from the digit formula.
///
/// On the cell `(X−h, X]×(Y−h, Y]` with `h = 1/b^n` the count is constant, so
/// `E(x,y) = E(X,Y) + N(XY − xy)` and each cell integrates in closed form.
/// Accumulates `18·b^{4n}·∫∫E²` exactly.
pub fn faure_l2_sq(pattern: &SigmaPattern, target: Target, cap: u64) -> Result<Rational, Error> {
    let b = pattern.base() as u64;
    let n = pattern.len();
    let scale = (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if scale > cap as u128 {
        return Err(Error::SizeCapExceeded { points: scale, cap });
    }
    let scale = scale as u64;
    let first = pattern.reversed();
    let second = pattern.star().reversed();
    let m: i128 = match target {
        Target::Scrambled => 1,
        Target::Symmetrized => 2,
    };
    let total: i128 = (1..=scale)
        .into_par_iter()
        .map(|lambda| {
            let l = lambda as i128;
            (1..=scale)
                .map(|big_n| {
                    let mut e = faure_scaled(&first, lambda, big_n);
                    if target == Target::Symmetrized {
                        e += faure_scaled(&second, lambda, big_n);
                    }
                    let y = big_n as i128;
                    18 * e * e
                        + 9 * m * e * (2 * l + 2 * y - 1)
                        + m * m * (6 * l * l + 6 * y * y + 2 + 9 * l * y - 6 * l - 6 * y)
                })
                .sum::<i128>()
        })
        .sum();
    let s2 = BigInt::from(scale) * BigInt::from(scale);
    Rational::new(BigInt::from(total), BigInt::from(18) * &s2 * &s2)
}

fn grid_x(big_n: u64, b: u64, j: usize) -> Rational {
    Rational::integer(big_n) / Rational::integer(BigInt::from(b).pow(j as u32))
}

/// `Σ_{λ=1}^{b^n} φ_{b,ε_i(λ,N,Σ₁)}^{σ_i}(N/b^i)·φ_{b,ε_j(λ,N,Σ₂)}^{σ_j}(N/b^j)`.
#[allow(clippy::too_many_arguments)]
pub fn product_lambda_sum(
    first: &SigmaPattern,
    second: &SigmaPattern,
    sigma_i: &Permutation,
    sigma_j: &Permutation,
    i: usize,
    j: usize,
    big_n: u64,
) -> Result<Rational, Error> {
    let b = first.base() as u64;
    let scale = b.pow(first.len() as u32);
    let (xi, xj) = (grid_x(big_n, b, i), grid_x(big_n, b, j));
    let mut total = Rational::zero();
    for lambda in 1..=scale {
        let e1 = faure_epsilon(&EpsilonContext::new(first, lambda, big_n)?, i)?;
        let e2 = faure_epsilon(&EpsilonContext::new(second, lambda, big_n)?, j)?;
        total += phi(e1, sigma_i, &xi)? * phi(e2, sigma_j, &xj)?;
    }
    Ok(total)
}

/// `b^{n−2}·φ_b^{σ_i}(N/b^i)·φ_b^{σ_j}(N/b^j)`.
pub fn product_lambda_sum_closed(
    n: usize,
    sigma_i: &Permutation,
    sigma_j: &Permutation,
    i: usize,
    j: usize,
    big_n: u64,
) -> Result<Rational, Error> {
    let b = sigma_i.base() as u64;
    let factor = Rational::integer(BigInt::from(b).pow(n as u32)) / Rational::from(b * b);
    Ok(factor
        * phi_aggregate(sigma_i, PhiKind::Sum, &grid_x(big_n, b, i))?
        * phi_aggregate(sigma_j, PhiKind::Sum, &grid_x(big_n, b, j))?)
}

/// `Σ_λ φ_{b,ε_j(λ,N,Σ)}^σ(N/b^j)·φ_{b,ε_j(λ,N,Σ*)}^σ̄(N/b^j)`.
pub fn conjugate_lambda_sum(pattern: &SigmaPattern, big_n: u64, j: usize) -> Result<Rational, Error> {
    let star = pattern.star();
    let b = pattern.base() as u64;
    let x = grid_x(big_n, b, j);
    let scale = b.pow(pattern.len() as u32);
    let mut total = Rational::zero();
    for lambda in 1..=scale {
        let e1 = faure_epsilon(&EpsilonContext::new(pattern, lambda, big_n)?, j)?;
        let e2 = faure_epsilon(&EpsilonContext::new(&star, lambda, big_n)?, j)?;
        total += phi(e1, pattern.sigma(), &x)? * phi(e2, pattern.sigma_bar(), &x)?;
    }
    Ok(total)
}

/// Closed form of [`conjugate_lambda_sum`] in terms of `ν_j` and the tilde aggregates.
pub fn conjugate_lambda_sum_closed(pattern: &SigmaPattern, big_n: u64, j: usize) -> Result<Rational, Error> {
    let n = pattern.len();
    let ctx = EpsilonContext::new(pattern, 1, big_n)?;
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let b = pattern.base() as u64;
    let x = grid_x(big_n, b, j);
    let sigma = pattern.sigma();
    let tilde = phi_aggregate(sigma, PhiKind::Tilde, &x)?;
    let pow = |e: usize| Rational::integer(BigInt::from(b).pow(e as u32));
    let head = pow(n - 1) * &tilde;
    if j == n {
        return Ok(head);
    }
    let nu = ctx.nu(j) as i128;
    let span = b.pow((n - j) as u32) as i128;
    Ok(if 2 * nu < span - 1 {
        let t1 = phi_aggregate(sigma, PhiKind::Tilde1, &x)?;
        head + pow(j - 1) * Rational::from(span - 1 - 2 * nu) * (t1 - &tilde)
    } else {
        let t2 = phi_aggregate(sigma, PhiKind::Tilde2, &x)?;
        head + pow(j - 1) * Rational::from(2 * nu + 1 - span) * (t2 - &tilde)
    })
}

fn conjugate_sum_raw(pattern: &SigmaPattern, swap: bool) -> Result<Rational, Error> {
    let star = pattern.star();
    let b = pattern.base() as u64;
    let n = pattern.len();
    let scale = b.pow(n as u32);
    let (left, right) = if swap {
        (pattern.sigma_bar(), pattern.sigma())
    } else {
        (pattern.sigma(), pattern.sigma_bar())
    };
    let mut total = Rational::zero();
    for big_n in 1..=scale {
        for lambda in 1..=scale {
            let c1 = EpsilonContext::new(pattern, lambda, big_n)?;
            let c2 = EpsilonContext::new(&star, lambda, big_n)?;
            for j in 1..=n {
                let x = grid_x(big_n, b, j);
                let (e1, e2) = (faure_epsilon(&c1, j)?, faure_epsilon(&c2, j)?);
                total += phi(e1, left, &x)? * phi(e2, right, &x)?;
            }
        }
    }
    Ok(total)
}

/// `(2/b^{2n}) Σ_j Σ_{λ,N} φ_{b,ε_j(Σ)}^σ(N/b^j)·φ_{b,ε_j(Σ*)}^σ̄(N/b^j)`,
/// brute-forced over the grid.
pub fn conjugate_sum_brute(pattern: &SigmaPattern) -> Result<Rational, Error> {
    let b = pattern.base() as u64;
    let scale = b.pow(pattern.len() as u32) as i64;
    Ok(conjugate_sum_raw(pattern, false)? * Rational::frac(2, scale * scale))
}

/// The double λ,N-sum with `σ` and `σ̄` exchanged in the superscripts
/// (without the `2/b^{2n}` factor), next to the unswapped one.
pub fn conjugate_sums_both_orders(pattern: &SigmaPattern) -> Result<(Rational, Rational), Error> {
    Ok((conjugate_sum_raw(pattern, false)?, conjugate_sum_raw(pattern, true)?))
}

/// `Σ_{N=1}^{b^j} f(N/b^j)` for an aggregate `f`.
pub fn phi_grid_sum(sigma: &Permutation, kind: PhiKind, j: usize) -> Result<Rational, Error> {
    let poly = crate::phi::phi_as_piecewise(sigma, kind)?;
    let b = sigma.base() as u64;
    let bj = b.pow(j as u32);
    // the piecewise form is continuous at 1 and vanishes there, as does the periodic one
    Ok((1..=bj).map(|k| poly.eval(&grid_x(k, b, j))).sum())
}
