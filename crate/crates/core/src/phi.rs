//! Faure's functions `φ_{b,h}^σ`, their aggregates, and the Φ constants.
//!
//! Each `φ_{b,h}^σ` is linear on the cells `[k/b, (k+1)/b)`, so every
//! aggregate used here (sums and pairwise products) is a piecewise
//! polynomial of degree at most two on the same cells. Aggregates are
//! materialized once per `(σ, kind)` and integrated exactly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::Error;
use crate::perm::Permutation;
use crate::rational::Rational;

/// Which combination of the `φ_{b,h}^σ` to form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PhiKind {
    /// `φ_{b,h}^σ` for one digit `h`
    Single(usize),
    /// `φ_b^σ = Σ_h φ_{b,h}^σ`
    Sum,
    /// `φ_b^{σ,(2)} = Σ_h (φ_{b,h}^σ)²`
    SquareSum,
    /// `φ̃_b^σ = Σ_h φ_{b,h}^σ φ_{b,h}^σ̄`
    Tilde,
    /// `φ̃_{b,1}^σ = Σ_{h<b−1} φ_{b,h+1}^σ φ_{b,h}^σ̄`
    Tilde1,
    /// `φ̃_{b,2}^σ = Σ_{h<b−1} φ_{b,h}^σ φ_{b,h+1}^σ̄`
    Tilde2,
}

impl PhiKind {
    fn check(self, b: usize) -> Result<(), Error> {
        match self {
            PhiKind::Single(h) if h >= b => Err(Error::DigitOutOfRange { digit: h, base: b }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiKind::Single(h) => write!(f, "single:{h}"),
            PhiKind::Sum => f.write_str("sum"),
            PhiKind::SquareSum => f.write_str("square-sum"),
            PhiKind::Tilde => f.write_str("tilde"),
            PhiKind::Tilde1 => f.write_str("tilde1"),
            PhiKind::Tilde2 => f.write_str("tilde2"),
        }
    }
}

impl FromStr for PhiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s.trim() {
            "sum" => PhiKind::Sum,
            "square-sum" | "square_sum" | "sq" => PhiKind::SquareSum,
            "tilde" => PhiKind::Tilde,
            "tilde1" => PhiKind::Tilde1,
            "tilde2" => PhiKind::Tilde2,
            other => {
                let h = other
                    .strip_prefix("single:")
                    .and_then(|h| h.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown phi kind {other:?}")))?;
                PhiKind::Single(h)
            }
        })
    }
}

/// Polynomial `c0 + c1·x + c2·x²` on each cell `[k/b, (k+1)/b]`, `k = 0..b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    base: usize,
    cells: Vec<[Rational; 3]>,
}

impl PiecewisePoly {
    pub fn zero(base: usize) -> Self {
        PiecewisePoly {
            base,
            cells: vec![[Rational::zero(), Rational::zero(), Rational::zero()]; base],
        }
    }

    pub fn from_cells(base: usize, cells: Vec<[Rational; 3]>) -> Result<Self, Error> {
        if cells.len() != base {
            return Err(Error::OutOfRange(format!(
                "{} cells for base {base}",
                cells.len()
            )));
        }
        Ok(PiecewisePoly { base, cells })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Coefficients `[c0, c1, c2]` on cell `k`.
    pub fn cell(&self, k: usize) -> &[Rational; 3] {
        &self.cells[k]
    }

    pub fn degree(&self) -> usize {
        self.cells
            .iter()
            .map(|c| (0..3).rev().find(|&i| !c[i].is_zero()).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Value at `x ∈ [0, 1]`; `x = 1` reads the last cell.
    pub fn eval(&self, x: &Rational) -> Rational {
        let k = (x * &Rational::from(self.base))
            .floor()
            .try_into()
            .unwrap_or(usize::MAX)
            .min(self.base - 1);
        let [c0, c1, c2] = &self.cells[k];
        c0 + &(x * &(c1 + &(c2 * x)))
    }

    /// Exact `∫_0^1`.
    pub fn integral(&self) -> Rational {
        let b = Rational::from(self.base);
        let b2 = &b * &b;
        let b3 = &b2 * &b;
        self.cells
            .iter()
            .enumerate()
            .map(|(k, [c0, c1, c2])| {
                let k = k as i64;
                // ∫_{k/b}^{(k+1)/b} x^j dx for j = 0, 1, 2
                let m0 = &Rational::one() / &b;
                let m1 = Rational::from(2 * k + 1) / (Rational::from(2) * &b2);
                let m2 = Rational::from(3 * k * k + 3 * k + 1) / (Rational::from(3) * &b3);
                c0 * &m0 + c1 * &m1 + c2 * &m2
            })
            .sum()
    }

    fn add_assign(&mut self, other: &PiecewisePoly) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            for i in 0..3 {
                a[i] += &b[i];
            }
        }
    }

    /// Product of two piecewise linear functions.
    fn mul_linear(&self, other: &PiecewisePoly) -> PiecewisePoly {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| {
                debug_assert!(a[2].is_zero() && b[2].is_zero());
                [
                    &a[0] * &b[0],
                    &a[0] * &b[1] + &a[1] * &b[0],
                    &a[1] * &b[1],
                ]
            })
            .collect();
        PiecewisePoly {
            base: self.base,
            cells,
        }
    }
}

/// `φ_{b,h}^σ(x)` straight from the counting definition, with periodic
/// extension and `φ(0) = 0`.
pub fn phi(h: usize, sigma: &Permutation, x: &Rational) -> Result<Rational, Error> {
    let b = sigma.base();
    if h >= b {
        return Err(Error::DigitOutOfRange { digit: h, base: b });
    }
    let frac = x - &Rational::integer(x.floor());
    if frac.is_zero() {
        return Ok(Rational::zero());
    }
    // frac ∈ [(k−1)/b, k/b) with k = cell + 1
    let cell: usize = (&frac * &Rational::from(b))
        .floor()
        .try_into()
        .expect("cell index fits");
    let seen = &sigma.images()[..=cell];
    Ok(if h <= sigma.apply(cell) {
        let below = seen.iter().filter(|&&v| v < h).count();
        Rational::from(below) - Rational::from(h) * frac
    } else {
        let above = seen.iter().filter(|&&v| v >= h).count();
        Rational::from(b - h) * frac - Rational::from(above)
    })
}

/// Pointwise value of an aggregate, computed from [`phi`].
pub fn phi_aggregate(sigma: &Permutation, kind: PhiKind, x: &Rational) -> Result<Rational, Error> {
    let b = sigma.base();
    kind.check(b)?;
    let bar = sigma.conjugate();
    let f = |h: usize, s: &Permutation| phi(h, s, x).expect("digit in range");
    Ok(match kind {
        PhiKind::Single(h) => f(h, sigma),
        PhiKind::Sum => (0..b).map(|h| f(h, sigma)).sum(),
        PhiKind::SquareSum => (0..b)
            .map(|h| {
                let v = f(h, sigma);
                &v * &v
            })
            .sum(),
        PhiKind::Tilde => (0..b).map(|h| f(h, sigma) * f(h, &bar)).sum(),
        PhiKind::Tilde1 => (0..b - 1).map(|h| f(h + 1, sigma) * f(h, &bar)).sum(),
        PhiKind::Tilde2 => (0..b - 1).map(|h| f(h, sigma) * f(h + 1, &bar)).sum(),
    })
}

/// Cell-wise linear form of `φ_{b,h}^σ`.
fn single_piecewise(h: usize, sigma: &Permutation) -> PiecewisePoly {
    let b = sigma.base();
    let mut below = 0usize;
    let cells = (0..b)
        .map(|cell| {
            let v = sigma.apply(cell);
            if v < h {
                below += 1;
            }
            if h <= v {
                [Rational::from(below), Rational::from(-(h as i64)), Rational::zero()]
            } else {
                let above = cell + 1 - below;
                [
                    Rational::from(-(above as i64)),
                    Rational::from(b - h),
                    Rational::zero(),
                ]
            }
        })
        .collect();
    PiecewisePoly { base: b, cells }
}

fn build_piecewise(sigma: &Permutation, kind: PhiKind) -> PiecewisePoly {
    let b = sigma.base();
    let singles: Vec<PiecewisePoly> = (0..b).map(|h| single_piecewise(h, sigma)).collect();
    let bar_singles = || -> Vec<PiecewisePoly> {
        let bar = sigma.conjugate();
        (0..b).map(|h| single_piecewise(h, &bar)).collect()
    };
    let mut acc = PiecewisePoly::zero(b);
    match kind {
        PhiKind::Single(h) => return singles[h].clone(),
        PhiKind::Sum => singles.iter().for_each(|s| acc.add_assign(s)),
        PhiKind::SquareSum => singles.iter().for_each(|s| acc.add_assign(&s.mul_linear(s))),
        PhiKind::Tilde => {
            let bars = bar_singles();
            for h in 0..b {
                acc.add_assign(&singles[h].mul_linear(&bars[h]));
            }
        }
        PhiKind::Tilde1 => {
            let bars = bar_singles();
            for h in 0..b - 1 {
                acc.add_assign(&singles[h + 1].mul_linear(&bars[h]));
            }
        }
        PhiKind::Tilde2 => {
            let bars = bar_singles();
            for h in 0..b - 1 {
                acc.add_assign(&singles[h].mul_linear(&bars[h + 1]));
            }
        }
    }
    acc
}

type CacheKey = (Vec<usize>, PhiKind);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<PiecewisePoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<PiecewisePoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

// Bounds memory when sweeping many permutations.
const CACHE_LIMIT: usize = 1 << 16;

/// Exact piecewise form of an aggregate on `[0, 1]` (cached).
pub fn phi_as_piecewise(sigma: &Permutation, kind: PhiKind) -> Result<Arc<PiecewisePoly>, Error> {
    kind.check(sigma.base())?;
    let key = (sigma.images().to_vec(), kind);
    if let Some(p) = cache().read().expect("phi cache poisoned").get(&key) {
        return Ok(Arc::clone(p));
    }
    let built = Arc::new(build_piecewise(sigma, kind));
    let mut guard = cache().write().expect("phi cache poisoned");
    if guard.len() >= CACHE_LIMIT {
        guard.clear();
    }
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

/// `(1/b) ∫_0^1` of the aggregate, exactly.
pub fn capital_phi(sigma: &Permutation, kind: PhiKind) -> Result<Rational, Error> {
    let poly = phi_as_piecewise(sigma, kind)?;
    Ok(poly.integral() / Rational::from(sigma.base()))
}

/// Closed form `Φ_b^σ = (1/b²) Σ σ(k)k − (1/b)((b−1)/2)²`.
pub fn capital_phi_linear(sigma: &Permutation) -> Rational {
    let b = sigma.base() as i64;
    let dot: i64 = sigma
        .images()
        .iter()
        .enumerate()
        .map(|(k, &v)| (k * v) as i64)
        .sum();
    Rational::frac(dot, b * b) - Rational::frac((b - 1) * (b - 1), 4 * b)
}

/// The five Φ constants of one permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiConstants {
    pub sum: Rational,
    pub square_sum: Rational,
    pub tilde: Rational,
    pub tilde1: Rational,
    pub tilde2: Rational,
}

impl PhiConstants {
    pub fn compute(sigma: &Permutation) -> PhiConstants {
        let get = |k| capital_phi(sigma, k).expect("kind valid for every base");
        PhiConstants {
            sum: get(PhiKind::Sum),
            square_sum: get(PhiKind::SquareSum),
            tilde: get(PhiKind::Tilde),
            tilde1: get(PhiKind::Tilde1),
            tilde2: get(PhiKind::Tilde2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{reversal_symmetric, Permutation};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn id(b: usize) -> Permutation {
        Permutation::identity(b).unwrap()
    }

    fn tau(b: usize) -> Permutation {
        Permutation::tau(b).unwrap()
    }

    fn random_perm(b: usize, rng: &mut ChaCha8Rng) -> Permutation {
        let mut v: Vec<usize> = (0..b).collect();
        v.shuffle(rng);
        Permutation::new(v).unwrap()
    }

    fn samples(count: i64) -> impl Iterator<Item = Rational> {
        (0..=count).map(move |i| r(i, count))
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1, &id(2), &r(1, 2)).unwrap(), r(1, 2));
        assert_eq!(phi(2, &tau(3), &r(1, 3)).unwrap(), r(-2, 3));
        for x in samples(17) {
            assert!(phi(0, &id(5), &x).unwrap().is_zero());
            assert!(phi(0, &tau(4), &x).unwrap().is_zero());
        }
        assert!(phi(3, &id(3), &r(1, 2)).is_err());
        // periodic
        assert_eq!(phi(1, &id(2), &r(5, 2)).unwrap(), r(1, 2));
        assert_eq!(phi(1, &id(2), &r(-1, 2)).unwrap(), r(1, 2));
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(phi_aggregate(&id(2), PhiKind::Tilde, &r(1, 2)).unwrap(), r(-1, 4));
        assert_eq!(phi_aggregate(&id(2), PhiKind::SquareSum, &r(1, 2)).unwrap(), r(1, 4));
        for b in 2..7 {
            assert!(phi_aggregate(&id(b), PhiKind::Sum, &Rational::zero()).unwrap().is_zero());
        }
    }

    #[test]
    fn piecewise_examples() {
        let single = phi_as_piecewise(&id(2), PhiKind::Single(1)).unwrap();
        assert_eq!(single.cell(0), &[r(0, 1), r(1, 1), r(0, 1)]);
        assert_eq!(single.cell(1), &[r(1, 1), r(-1, 1), r(0, 1)]);
        let tilde = phi_as_piecewise(&id(2), PhiKind::Tilde).unwrap();
        assert_eq!(tilde.cell(0), &[r(0, 1), r(0, 1), r(-1, 1)]);
        assert_eq!(tilde.degree(), 2);
        assert_eq!(single.degree(), 1);
    }

    #[test]
    fn capital_phi_examples() {
        assert_eq!(capital_phi(&id(2), PhiKind::SquareSum).unwrap(), r(1, 24));
        assert_eq!(capital_phi(&id(2), PhiKind::Tilde).unwrap(), r(-1, 24));
        assert_eq!(capital_phi(&id(2), PhiKind::Tilde1).unwrap(), r(0, 1));
        let gap = capital_phi(&id(2), PhiKind::Tilde).unwrap()
            - capital_phi(&id(2), PhiKind::Tilde1).unwrap() / Rational::from(2)
            - capital_phi(&id(2), PhiKind::Tilde2).unwrap() / Rational::from(2);
        assert_eq!(gap, r(-1, 24));
    }

    #[test]
    fn tilde_integral_for_identity() {
        // ∫φ̃_b^id = −1/(90b) − 7b³/720 for even b, 7/(720b) − 7b³/720 for odd b
        for b in 2..=12i64 {
            let integral = phi_as_piecewise(&id(b as usize), PhiKind::Tilde).unwrap().integral();
            let expected = if b % 2 == 0 {
                r(-1, 90 * b) - r(7 * b * b * b, 720)
            } else {
                r(7, 720 * b) - r(7 * b * b * b, 720)
            };
            assert_eq!(integral, expected, "b = {b}");
        }
    }

    #[test]
    fn linear_phi_examples() {
        assert_eq!(capital_phi_linear(&id(2)), r(1, 8));
        assert_eq!(capital_phi_linear(&tau(2)), r(-1, 8));
        assert_eq!(capital_phi_linear(&id(3)), r(2, 9));
        assert_eq!(capital_phi(&id(3), PhiKind::Sum).unwrap(), r(2, 9));
    }

    #[test]
    fn linear_phi_matches_integration_on_all_small_permutations() {
        for b in 2..=7usize {
            let mut v: Vec<usize> = (0..b).collect();
            loop {
                let s = Permutation::new(v.clone()).unwrap();
                assert_eq!(capital_phi(&s, PhiKind::Sum).unwrap(), capital_phi_linear(&s));
                if !crate::perm::next_lexicographic(&mut v) {
                    break;
                }
            }
        }
        // b = 8 through the reversal-symmetric class plus random draws
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for s in reversal_symmetric(8).unwrap().into_iter().take(64) {
            assert_eq!(capital_phi(&s, PhiKind::Sum).unwrap(), capital_phi_linear(&s));
        }
        for _ in 0..64 {
            let s = random_perm(8, &mut rng);
            assert_eq!(capital_phi(&s, PhiKind::Sum).unwrap(), capital_phi_linear(&s));
        }
    }

    #[test]
    fn piecewise_agrees_with_pointwise_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kinds = [
            PhiKind::Single(1),
            PhiKind::Sum,
            PhiKind::SquareSum,
            PhiKind::Tilde,
            PhiKind::Tilde1,
            PhiKind::Tilde2,
        ];
        for b in [2usize, 3, 5, 6] {
            let s = random_perm(b, &mut rng);
            for kind in kinds {
                let poly = phi_as_piecewise(&s, kind).unwrap();
                for x in samples(400) {
                    let direct = phi_aggregate(&s, kind, &x).unwrap();
                    // x = 1 is periodic zero pointwise; the piecewise form is continuous there
                    if x == Rational::one() {
                        assert!(poly.eval(&x).is_zero());
                        continue;
                    }
                    assert_eq!(poly.eval(&x), direct, "b={b} {kind} x={x}");
                }
            }
        }
    }

    #[test]
    fn conjugate_reflection_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for b in 2..=7usize {
            for _ in 0..6 {
                let s = random_perm(b, &mut rng);
                let bar = s.conjugate();
                assert!(phi_as_piecewise(&bar, PhiKind::Single(0)).unwrap().integral().is_zero());
                for h in 1..b {
                    let lhs = phi_as_piecewise(&bar, PhiKind::Single(h)).unwrap();
                    let rhs = phi_as_piecewise(&s, PhiKind::Single(b - h)).unwrap();
                    for k in 0..b {
                        let neg: Vec<Rational> = rhs.cell(k).iter().map(|c| -c).collect();
                        assert_eq!(lhs.cell(k).to_vec(), neg);
                    }
                }
                let sum = phi_as_piecewise(&s, PhiKind::Sum).unwrap();
                let sum_bar = phi_as_piecewise(&bar, PhiKind::Sum).unwrap();
                for k in 0..b {
                    let neg: Vec<Rational> = sum.cell(k).iter().map(|c| -c).collect();
                    assert_eq!(sum_bar.cell(k).to_vec(), neg);
                }
                assert_eq!(
                    *phi_as_piecewise(&s, PhiKind::SquareSum).unwrap(),
                    *phi_as_piecewise(&bar, PhiKind::SquareSum).unwrap()
                );
            }
        }
    }

    #[test]
    fn breakpoint_values_telescope() {
        // φ_{b,h}^σ(k/b) = (1/b) Σ_{l<k} slope_l
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for b in 2..=9usize {
            let s = random_perm(b, &mut rng);
            for h in 0..b {
                let poly = phi_as_piecewise(&s, PhiKind::Single(h)).unwrap();
                let mut acc = Rational::zero();
                for k in 0..=b {
                    let at = phi(h, &s, &r(k as i64, b as i64)).unwrap();
                    assert_eq!(at, &acc / &Rational::from(b));
                    if k < b {
                        acc += &poly.cell(k)[1];
                    }
                }
            }
        }
    }

    #[test]
    fn kind_parsing() {
        for k in ["sum", "square-sum", "tilde", "tilde1", "tilde2", "single:3"] {
            assert_eq!(k.parse::<PhiKind>().unwrap().to_string(), k);
        }
        assert!("single:x".parse::<PhiKind>().is_err());
        assert!(capital_phi(&id(3), PhiKind::Single(3)).is_err());
    }
}
