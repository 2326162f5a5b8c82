//! Closed forms for the squared L2 discrepancy and the constant `c_b^σ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Error;
use crate::perm::Permutation;
use crate::phi::{capital_phi, PhiConstants, PhiKind};
use crate::rational::Rational;

fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

fn pow_b(b: usize, e: usize) -> Rational {
    Rational::integer(BigInt::from(b).pow(e as u32))
}

/// `(−1)^b`.
fn sign_b(b: usize) -> i64 {
    if b.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn require_symmetric(sigma: &Permutation) -> Result<(), Error> {
    if sigma.commutes_with_tau() {
        Ok(())
    } else {
        Err(Error::NotReversalSymmetric(sigma.to_string()))
    }
}

/// How `c_b^σ` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CMethod {
    /// `2Φ^{(2)} + Φ̃ + ½Φ̃₁ + ½Φ̃₂` from exact integrals
    Definition,
    /// the double-sum closed form
    Closed,
    /// `b²/360 + 1/24 − 2/(45b²)`, identity only
    IdFormula,
}

impl fmt::Display for CMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CMethod::Definition => "def",
            CMethod::Closed => "closed",
            CMethod::IdFormula => "id-formula",
        })
    }
}

impl FromStr for CMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "def" | "definition" => Ok(CMethod::Definition),
            "closed" => Ok(CMethod::Closed),
            "id-formula" | "id" => Ok(CMethod::IdFormula),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Denominator of the parity correction in the closed form of `c_b^σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityTerm {
    /// `(1−(−1)^b)/(16b²)`; agrees with the integral definition
    Validated,
    /// `(1−(−1)^b)/(16b³)`; disagrees for odd `b`
    AsPrinted,
}

/// `c_b^σ = 2Φ^{(2)} + Φ̃ + ½Φ̃₁ + ½Φ̃₂`, from exact integrals. Defined for
/// every permutation.
pub fn c_constant_definition(sigma: &Permutation) -> Rational {
    let p = PhiConstants::compute(sigma);
    Rational::from(2) * p.square_sum + p.tilde + (p.tilde1 + p.tilde2) / Rational::from(2)
}

/// The σ-independent part of the closed form.
pub fn c_closed_offset(b: usize, parity: ParityTerm) -> Rational {
    let bi = b as i64;
    let poly = 16 - 12 * bi - 111 * bi.pow(2) + 228 * bi.pow(3) - 112 * bi.pow(4);
    let parity_den = match parity {
        ParityTerm::Validated => 16 * bi * bi,
        ParityTerm::AsPrinted => 16 * bi * bi * bi,
    };
    r(poly, 72 * bi * bi) - r(1 - sign_b(b), parity_den)
}

/// `Σ_{k1,k2} max(σ(k1),σ(k2))·(b/2·(max(k1,k2) + max(k1+k2, b−1)) − k1² − k1)`.
pub fn c_closed_double_sum(sigma: &Permutation) -> Rational {
    let b = sigma.base();
    let half_b = r(b as i64, 2);
    let mut total = Rational::zero();
    for k1 in 0..b {
        for k2 in 0..b {
            let m = sigma.apply(k1).max(sigma.apply(k2));
            if m == 0 {
                continue;
            }
            let inner = &half_b * Rational::from(k1.max(k2) + (k1 + k2).max(b - 1))
                - Rational::from(k1 * k1 + k1);
            total += Rational::from(m) * inner;
        }
    }
    total
}

/// Closed form of `c_b^σ` with the validated parity term.
pub fn c_constant_closed(sigma: &Permutation) -> Result<Rational, Error> {
    c_constant_closed_with(sigma, ParityTerm::Validated)
}

pub fn c_constant_closed_with(sigma: &Permutation, parity: ParityTerm) -> Result<Rational, Error> {
    require_symmetric(sigma)?;
    let b = sigma.base();
    Ok(c_closed_offset(b, parity) + r(4, 1) / pow_b(b, 3) * c_closed_double_sum(sigma))
}

/// `c_b^{id} = b²/360 + 1/24 − 2/(45b²)`.
pub fn c_id(b: usize) -> Result<Rational, Error> {
    if b < 2 {
        return Err(Error::BaseTooSmall(b));
    }
    let b = b as i64;
    Ok(r(b * b, 360) + r(1, 24) - r(2, 45 * b * b))
}

/// `c_b^σ` by the chosen method.
pub fn c_constant(sigma: &Permutation, method: CMethod) -> Result<Rational, Error> {
    match method {
        CMethod::Definition => Ok(c_constant_definition(sigma)),
        CMethod::Closed => c_constant_closed(sigma),
        CMethod::IdFormula if sigma.is_identity() => c_id(sigma.base()),
        CMethod::IdFormula => Err(Error::OutOfRange(format!(
            "the id formula only applies to the identity, got {sigma}"
        ))),
    }
}

/// `(2b^n L2(R^{Σ,sym}))² = n·c + 11/8 + 1/b^n + (1 − 9(−1)^b)/(144b^{2n})`.
pub fn sym_l2_sq_closed(sigma: &Permutation, n: usize, method: CMethod) -> Result<Rational, Error> {
    require_symmetric(sigma)?;
    let b = sigma.base();
    let c = c_constant(sigma, method)?;
    let bn = pow_b(b, n);
    Ok(Rational::from(n) * c + r(11, 8) + Rational::one() / &bn
        + r(1 - 9 * sign_b(b), 144) / (&bn * &bn))
}

/// `n/24 + 11/8 + 1/2^n − 1/(9·2^{2n+1})`.
pub fn base2_l2_sq(n: usize) -> Rational {
    let two_n = pow_b(2, n);
    Rational::from(n) / Rational::from(24) + r(11, 8) + Rational::one() / &two_n
        - Rational::one() / (Rational::from(18) * &two_n * &two_n)
}

/// `(b^n L2(R^Σ))²` where `l` components of `Σ` equal `σ`.
pub fn scrambled_l2_sq_closed(sigma: &Permutation, n: usize, l: usize) -> Result<Rational, Error> {
    require_symmetric(sigma)?;
    if l > n {
        return Err(Error::OutOfRange(format!("l = {l} exceeds n = {n}")));
    }
    let b = sigma.base();
    let phi = capital_phi(sigma, PhiKind::Sum)?;
    let phi2 = capital_phi(sigma, PhiKind::SquareSum)?;
    let bn = pow_b(b, n);
    let (n_i, l_i) = (n as i64, l as i64);
    let spread = (n_i - 2 * l_i).pow(2) - n_i;
    Ok(&phi * &phi * Rational::from(spread)
        + &phi * (Rational::one() - Rational::one() / (Rational::from(2) * &bn)) * Rational::from(2 * l_i - n_i)
        + Rational::from(n) * phi2
        + r(3, 8)
        + Rational::one() / (Rational::from(4) * &bn)
        - Rational::one() / (Rational::from(72) * &bn * &bn))
}

/// `A_b(j, id)`.
pub fn a_b_j_id(b: usize, j: usize) -> Rational {
    let bi = b as i64;
    let num = if b.is_multiple_of(2) { bi.pow(3) + 2 * bi } else { bi.pow(3) - bi };
    -Rational::from(num) / (Rational::from(36) * pow_b(b, 2 * j))
}

/// `Ā_b(j, id)`.
pub fn abar_b_j_id(b: usize, j: usize) -> Rational {
    let bi = b as i64;
    let num = if b.is_multiple_of(2) { bi.pow(3) - 4 * bi } else { bi.pow(3) - bi };
    -Rational::from(num) / (Rational::from(36) * pow_b(b, 2 * j))
}

/// `b^j(∫f + A/2)` for `f ∈ {φ̃, φ̃₁, φ̃₂}`; the claimed value of
/// `Σ_{N=1}^{b^j} f(N/b^j)`.
pub fn tilde_grid_sum_claim(sigma: &Permutation, kind: PhiKind, j: usize) -> Result<Rational, Error> {
    let b = sigma.base();
    let a = match kind {
        PhiKind::Tilde => a_b_j_id(b, j),
        PhiKind::Tilde1 | PhiKind::Tilde2 => abar_b_j_id(b, j),
        other => return Err(Error::OutOfRange(format!("no grid-sum claim for {other}"))),
    };
    let integral = capital_phi(sigma, kind)? * Rational::from(b);
    Ok(pow_b(b, j) * (integral + a / Rational::from(2)))
}

/// `Φ̃ − ½Φ̃₁ − ½Φ̃₂`, computed from the integrals.
pub fn tilde_gap(sigma: &Permutation) -> Rational {
    let p = PhiConstants::compute(sigma);
    p.tilde - (p.tilde1 + p.tilde2) / Rational::from(2)
}

/// The value `tilde_gap` takes on the reversal-symmetric class.
pub fn tilde_gap_claim(b: usize) -> Rational {
    if b.is_multiple_of(2) {
        r(-1, 24)
    } else {
        let b2 = (b * b) as i64;
        r(-(b2 - 1), 24 * b2)
    }
}

/// Closed form of `(2/b^{2n}) Σ_j Σ_{λ,N} φ_{ε_j(Σ)}^σ φ_{ε_j(Σ*)}^σ̄`.
pub fn conjugate_sum_closed(sigma: &Permutation, n: usize) -> Rational {
    let b = sigma.base();
    let p = PhiConstants::compute(sigma);
    let half = r(1, 2);
    let lead = &p.tilde + &half * &p.tilde1 + &half * &p.tilde2;
    let gap = &p.tilde - &half * &p.tilde1 - &half * &p.tilde2;
    let b2n = pow_b(b, 2 * n);
    let nl = Rational::from(n) * lead;
    if b.is_multiple_of(2) {
        nl + gap - r(1, 36) - Rational::one() / (Rational::from(18) * b2n)
    } else {
        let b2 = (b * b) as i64;
        nl + (r(-1, 36) + r(b2, b2 - 1) * gap) * (Rational::one() - Rational::one() / b2n)
    }
}

/// `n(Φ̃ + ½Φ̃₁ + ½Φ̃₂) − 5/72 + (1 − 9(−1)^b)/(144b^{2n})`.
pub fn conjugate_sum_simple(sigma: &Permutation, n: usize) -> Rational {
    let b = sigma.base();
    let p = PhiConstants::compute(sigma);
    let lead = p.tilde + (p.tilde1 + p.tilde2) / Rational::from(2);
    Rational::from(n) * lead - r(5, 72) + r(1 - 9 * sign_b(b), 144) / pow_b(b, 2 * n)
}

/// Bounds `lo ≤ ln x ≤ hi` for rational `x ∈ [1, 2]` from
/// `ln x = 2 Σ z^{2k+1}/(2k+1)`, `z = (x−1)/(x+1)`, using `terms` terms.
fn ln_bounds_unit(x: &Rational, terms: usize) -> (Rational, Rational) {
    let z = (x - &Rational::one()) / (x + &Rational::one());
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += &power / &Rational::from(2 * k + 1);
        power *= &z2;
    }
    // tail ≤ z^{2K+1}/((2K+1)(1−z²)); every term is nonnegative
    let tail = &power / &(Rational::from(2 * terms + 1) * (Rational::one() - &z2));
    let lo = Rational::from(2) * &sum;
    let hi = Rational::from(2) * (sum + tail);
    (lo, hi)
}

/// Rational bounds on `ln b`.
fn ln_bounds(b: usize, terms: usize) -> (Rational, Rational) {
    let m = usize::BITS - 1 - b.leading_zeros();
    let t = Rational::from(b) / pow_b(2, m as usize);
    let (lo2, hi2) = ln_bounds_unit(&Rational::from(2), terms);
    let (lot, hit) = ln_bounds_unit(&t, terms);
    let m = Rational::from(m);
    (&m * &lo2 + lot, &m * &hi2 + hit)
}

/// `⌊sqrt(q)⌋` for rational `q ≥ 0`.
fn floor_sqrt(q: &Rational) -> BigInt {
    q.floor().sqrt()
}

/// `sqrt(c/ln b)` truncated to `digits` decimal places, certified by
/// interval bounds on `ln b`.
pub fn leading_constant_of(c: &Rational, b: usize, digits: u32) -> Result<String, Error> {
    if b < 2 {
        return Err(Error::BaseTooSmall(b));
    }
    if c.is_negative() {
        return Err(Error::OutOfRange(format!("c = {c} is negative")));
    }
    let scale = Rational::integer(BigInt::from(10).pow(2 * digits));
    let mut terms = 16;
    loop {
        let (lo, hi) = ln_bounds(b, terms);
        // larger log gives the smaller quotient
        let low = floor_sqrt(&(c * &scale / &hi));
        let high = floor_sqrt(&(c * &scale / &lo));
        if low == high {
            return Ok(crate::rational::format_fixed(&low, digits, false));
        }
        terms *= 2;
        if terms > 1 << 16 {
            return Err(Error::OutOfRange("leading constant did not converge".into()));
        }
    }
}

/// `sqrt(c_b^σ / ln b)` truncated to `digits` places.
pub fn leading_constant(sigma: &Permutation, digits: u32) -> Result<String, Error> {
    let c = c_constant_closed(sigma).or_else(|_| Ok::<_, Error>(c_constant_definition(sigma)))?;
    leading_constant_of(&c, sigma.base(), digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{parse_cycles, reversal_symmetric};

    fn id(b: usize) -> Permutation {
        Permutation::identity(b).unwrap()
    }

    fn table(b: usize, cycles: &str) -> Permutation {
        parse_cycles(cycles, b).unwrap().extend()
    }

    #[test]
    fn c_examples() {
        assert_eq!(c_constant_definition(&id(2)), r(1, 24));
        assert_eq!(c_constant_definition(&id(3)), r(5, 81));
        assert_eq!(c_constant_definition(&table(5, "(0,1)")), r(29, 375));
        assert_eq!(c_constant_closed(&id(2)).unwrap(), r(1, 24));
        assert_eq!(c_constant_closed(&id(3)).unwrap(), r(5, 81));
        assert_eq!(c_constant_closed(&table(5, "(0,1)")).unwrap(), r(29, 375));
        assert_eq!(c_closed_double_sum(&id(2)), r(3, 1));
        assert_eq!(c_closed_double_sum(&id(3)), r(83, 2));
        assert_eq!(c_closed_double_sum(&table(5, "(0,1)")), r(772, 1));
        assert_eq!(c_closed_offset(2, ParityTerm::Validated), r(-35, 24));
    }

    #[test]
    fn printed_parity_term_breaks_odd_bases() {
        assert_eq!(c_constant_closed_with(&id(3), ParityTerm::AsPrinted).unwrap(), r(23, 324));
        assert_eq!(c_constant_closed_with(&id(4), ParityTerm::AsPrinted).unwrap(), r(1, 12));
    }

    #[test]
    fn closed_form_requires_symmetry() {
        let s = Permutation::new(vec![1, 0, 2]).unwrap();
        assert!(matches!(c_constant_closed(&s), Err(Error::NotReversalSymmetric(_))));
        assert!(sym_l2_sq_closed(&s, 1, CMethod::Definition).is_err());
        assert!(scrambled_l2_sq_closed(&s, 1, 1).is_err());
    }

    #[test]
    fn c_id_examples() {
        assert_eq!(c_id(2).unwrap(), r(1, 24));
        assert_eq!(c_id(3).unwrap(), r(5, 81));
        assert_eq!(c_id(4).unwrap(), r(1, 12));
        assert!(c_id(1).is_err());
        assert!(c_constant(&table(5, "(0,1)"), CMethod::IdFormula).is_err());
    }

    #[test]
    fn closed_equals_definition_small_bases() {
        for b in 2..=8 {
            for s in reversal_symmetric(b).unwrap() {
                assert_eq!(c_constant_closed(&s).unwrap(), c_constant_definition(&s), "{s}");
            }
        }
    }

    #[test]
    fn sym_closed_examples() {
        assert_eq!(sym_l2_sq_closed(&id(2), 1, CMethod::Definition).unwrap(), r(137, 72));
        assert_eq!(sym_l2_sq_closed(&id(3), 1, CMethod::Definition).unwrap(), r(16, 9));
        for n in 1..=10 {
            assert_eq!(sym_l2_sq_closed(&id(2), n, CMethod::Closed).unwrap(), base2_l2_sq(n));
        }
        assert_eq!(base2_l2_sq(1), r(137, 72));
    }

    #[test]
    fn scrambled_closed_examples() {
        assert_eq!(scrambled_l2_sq_closed(&id(2), 1, 1).unwrap(), r(91, 144));
        assert!(scrambled_l2_sq_closed(&id(2), 1, 2).is_err());
    }

    #[test]
    fn a_constants() {
        assert_eq!(a_b_j_id(2, 1), r(-1, 12));
        assert_eq!(a_b_j_id(3, 1), r(-2, 27));
        assert_eq!(abar_b_j_id(2, 1), r(0, 1));
        assert_eq!(abar_b_j_id(3, 2), r(-24, 36 * 81));
    }

    #[test]
    fn tilde_gap_examples() {
        assert_eq!(tilde_gap(&id(2)), r(-1, 24));
        assert_eq!(tilde_gap(&id(3)), r(-1, 27));
        for s in reversal_symmetric(4).unwrap() {
            assert_eq!(tilde_gap(&s), r(-1, 24));
        }
    }

    #[test]
    fn conjugate_sum_simple_form_on_symmetric_class() {
        for b in 2..=7 {
            for s in reversal_symmetric(b).unwrap() {
                for n in 1..=3 {
                    assert_eq!(conjugate_sum_closed(&s, n), conjugate_sum_simple(&s, n));
                }
            }
        }
    }

    #[test]
    fn leading_constant_examples() {
        assert_eq!(leading_constant(&id(2), 6).unwrap(), "0.245178");
        assert_eq!(leading_constant(&table(8, "(0,2,3,1)"), 6).unwrap(), "0.212330");
        assert_eq!(
            leading_constant(&table(26, "(0,7,12,5)(1,2,11,10)(3,4,9,8)"), 6).unwrap(),
            "0.198792"
        );
        assert_eq!(leading_constant(&table(5, "(0,1)"), 7).unwrap(), "0.2192028");
        assert_eq!(leading_constant_of(&Rational::zero(), 7, 6).unwrap(), "0.000000");
    }

    #[test]
    fn ln_bounds_bracket() {
        for b in [2usize, 3, 7, 26, 1000] {
            let (lo, hi) = ln_bounds(b, 30);
            let ln = (b as f64).ln();
            assert!(lo.to_f64() <= ln + 1e-12 && ln - 1e-12 <= hi.to_f64());
            assert!(lo < hi);
        }
    }
}
