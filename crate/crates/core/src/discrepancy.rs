//! Local discrepancy and exact integrated squared discrepancy.
//!
//! All boxes are half-open: a point counts in `[0,x)×[0,y)` only if both
//! coordinates are strictly below the corner.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::pointset::PointSet;
use crate::rational::Rational;

/// Smallest integer `m` with `m ≥ x·scale`.
fn ceil_scaled(x: &Rational, scale: u64) -> BigInt {
    let scaled = x * &Rational::from(scale);
    -(-scaled).floor()
}

/// Number of points (with multiplicity) in `[0,x)×[0,y)`.
pub fn count_box(ps: &PointSet, x: &Rational, y: &Rational) -> usize {
    // p/scale < x  ⇔  p < ⌈x·scale⌉ for integer p
    let tx = ceil_scaled(x, ps.scale());
    let ty = ceil_scaled(y, ps.scale());
    let (tx, ty) = (clamp_threshold(&tx), clamp_threshold(&ty));
    ps.points()
        .iter()
        .filter(|p| (p.x as i128) < tx && (p.y as i128) < ty)
        .count()
}

fn clamp_threshold(t: &BigInt) -> i128 {
    t.to_i128()
        .unwrap_or(if t.sign() == num_bigint::Sign::Minus { i128::MIN } else { i128::MAX })
}

/// `E(x,y) = A([0,x)×[0,y)) − N·x·y`.
pub fn local_discrepancy(ps: &PointSet, x: &Rational, y: &Rational) -> Rational {
    Rational::from(count_box(ps, x, y)) - Rational::from(ps.len()) * x * y
}

/// `x(n)`: the smallest `m/b^n ≥ x` with `m ≥ 1`.
pub fn grid_round(x: &Rational, b: usize, n: usize) -> Rational {
    let scale = (b as u64).pow(n as u32);
    let m = ceil_scaled(x, scale).max(BigInt::from(1));
    Rational::integer(m) / Rational::from(scale)
}

/// `∫_0^1∫_0^1 E(x,y)² dx dy`, exactly, by the pairwise expansion
/// `Σ_{m,m'} (1−max x)(1−max y) − (N/2) Σ_m (1−x²)(1−y²) + N²/9`.
///
/// Coordinates are integers over `s = scale`, so the sum is accumulated as
/// `18s⁴·∫∫E²` in machine integers.
pub fn warnock_l2_sq(ps: &PointSet) -> Rational {
    let s = ps.scale() as i128;
    let n = ps.len() as i128;
    let pts = ps.points();
    let pair_sum: i128 = pts
        .par_iter()
        .map(|p| {
            pts.iter()
                .map(|q| (s - p.x.max(q.x) as i128) * (s - p.y.max(q.y) as i128))
                .sum::<i128>()
        })
        .sum();
    let single_sum: i128 = pts
        .iter()
        .map(|p| {
            let (x, y) = (p.x as i128, p.y as i128);
            (s * s - x * x) * (s * s - y * y)
        })
        .sum();
    let s2 = BigInt::from(s * s);
    let s4 = &s2 * &s2;
    let total = BigInt::from(18) * &s2 * BigInt::from(pair_sum) - BigInt::from(9 * n) * BigInt::from(single_sum)
        + BigInt::from(2 * n * n) * &s4;
    Rational::new(total, BigInt::from(18) * s4).expect("nonzero denominator")
}

/// `∫∫E²` by exact integration over the rectangles cut out by the distinct
/// point coordinates; the counting function is constant on each of them.
pub fn piecewise_l2_sq(ps: &PointSet) -> Rational {
    let s = ps.scale();
    let breaks = |coord: fn(&crate::pointset::GridPoint) -> u64| {
        let mut v: Vec<u64> = ps.points().iter().map(coord).collect();
        v.push(0);
        v.push(s);
        v.sort_unstable();
        v.dedup();
        v
    };
    let xs = breaks(|p| p.x);
    let ys = breaks(|p| p.y);
    let n = Rational::from(ps.len());
    let scale = Rational::from(s);
    let mut total = Rational::zero();
    for wx in xs.windows(2) {
        let (x0, x1) = (Rational::from(wx[0]) / &scale, Rational::from(wx[1]) / &scale);
        for wy in ys.windows(2) {
            let (y0, y1) = (Rational::from(wy[0]) / &scale, Rational::from(wy[1]) / &scale);
            // on the open rectangle a point counts iff its coordinates are ≤ the lower corner
            let a = Rational::from(
                ps.points()
                    .iter()
                    .filter(|p| p.x <= wx[0] && p.y <= wy[0])
                    .count(),
            );
            let m1 = |lo: &Rational, hi: &Rational| hi - lo;
            let m2 = |lo: &Rational, hi: &Rational| (hi * hi - lo * lo) / Rational::from(2);
            let m3 = |lo: &Rational, hi: &Rational| (hi * hi * hi - lo * lo * lo) / Rational::from(3);
            // ∫∫ (a − Nxy)² = a²·|Δx||Δy| − 2aN·∫x∫y + N²·∫x²∫y²
            total += &a * &a * m1(&x0, &x1) * m1(&y0, &y1)
                - Rational::from(2) * &a * &n * m2(&x0, &x1) * m2(&y0, &y1)
                + &n * &n * m3(&x0, &x1) * m3(&y0, &y1);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{Permutation, SigmaPattern};
    use crate::pointset::{scrambled_hammersley, symmetrized, GridPoint, Label, DEFAULT_SIZE_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn classical(b: usize, n: usize) -> PointSet {
        let p = SigmaPattern::constant(Permutation::identity(b).unwrap(), n).unwrap();
        scrambled_hammersley(&p, DEFAULT_SIZE_CAP).unwrap()
    }

    fn sym_id(b: usize, n: usize) -> PointSet {
        let p = SigmaPattern::constant(Permutation::identity(b).unwrap(), n).unwrap();
        symmetrized(&p, DEFAULT_SIZE_CAP).unwrap()
    }

    #[test]
    fn count_box_examples() {
        let ps = classical(2, 2);
        assert_eq!(count_box(&ps, &r(3, 4), &r(1, 2)), 2);
        assert_eq!(count_box(&ps, &r(1, 1), &r(1, 1)), 4);
        // (0,0) plus the doubled (1/3,1/3)
        assert_eq!(count_box(&sym_id(3, 1), &r(2, 5), &r(2, 5)), 3);
        // boundary points do not count
        assert_eq!(count_box(&ps, &r(1, 2), &r(1, 2)), 1);
    }

    #[test]
    fn local_discrepancy_examples() {
        assert_eq!(local_discrepancy(&classical(2, 2), &r(3, 4), &r(1, 2)), r(1, 2));
        // A = 1 from (0,0); N·x·y = 1/2
        assert_eq!(local_discrepancy(&classical(2, 1), &r(1, 2), &r(1, 2)), r(1, 2));
        for (b, n) in [(2, 3), (3, 2), (5, 1)] {
            assert!(local_discrepancy(&sym_id(b, n), &r(1, 1), &r(1, 1)).is_zero());
        }
    }

    #[test]
    fn grid_round_examples() {
        assert_eq!(grid_round(&r(1, 3), 2, 2), r(2, 4));
        assert_eq!(grid_round(&r(1, 4), 2, 2), r(1, 4));
        assert_eq!(grid_round(&r(1, 1), 3, 3), r(1, 1));
        assert_eq!(grid_round(&r(1, 1000), 3, 2), r(1, 9));
    }

    #[test]
    fn warnock_examples() {
        assert_eq!(warnock_l2_sq(&classical(2, 1)), r(91, 144));
        assert_eq!(warnock_l2_sq(&sym_id(2, 1)), r(137, 72));
        assert_eq!(warnock_l2_sq(&sym_id(3, 1)), r(16, 9));
    }

    #[test]
    fn rectangle_oracle_matches_warnock() {
        let two = PointSet::from_grid(2, 1, Label::Scrambled, vec![GridPoint { x: 0, y: 0 }, GridPoint { x: 1, y: 1 }])
            .unwrap();
        assert_eq!(piecewise_l2_sq(&two), r(91, 144));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (b, n) in [(2, 1), (2, 3), (3, 2), (4, 2), (5, 1)] {
            assert_eq!(piecewise_l2_sq(&sym_id(b, n)), warnock_l2_sq(&sym_id(b, n)));
            // arbitrary multisets, not only nets
            let scale = (b as u64).pow(n as u32);
            let pts = (0..rng.gen_range(1..12))
                .map(|_| GridPoint { x: rng.gen_range(0..scale), y: rng.gen_range(0..scale) })
                .collect();
            let ps = PointSet::from_grid(b, n, Label::Scrambled, pts).unwrap();
            assert_eq!(piecewise_l2_sq(&ps), warnock_l2_sq(&ps));
        }
    }

    #[test]
    fn symmetrized_discrepancy_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (b, n) in [(2, 3), (3, 2), (4, 2), (5, 2)] {
            let sigma = crate::perm::reversal_symmetric(b).unwrap().pop().unwrap();
            for p in SigmaPattern::all_words(&sigma, n) {
                let sym = symmetrized(&p, DEFAULT_SIZE_CAP).unwrap();
                let one = scrambled_hammersley(&p, DEFAULT_SIZE_CAP).unwrap();
                let two = scrambled_hammersley(&p.star(), DEFAULT_SIZE_CAP).unwrap();
                for _ in 0..200 {
                    let x = r(rng.gen_range(1..=997), 997);
                    let y = r(rng.gen_range(1..=1009), 1009);
                    assert_eq!(
                        local_discrepancy(&sym, &x, &y),
                        local_discrepancy(&one, &x, &y) + local_discrepancy(&two, &x, &y)
                    );
                }
            }
        }
    }
}
