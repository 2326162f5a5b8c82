//! Digit-scrambled Hammersley point sets and their symmetrization.
//!
//! Every coordinate of these sets is a multiple of `1/b^n`, so points are
//! stored as integer grid numerators over the common scale `b^n`.

use serde::Serialize;

use crate::error::Error;
use crate::perm::SigmaPattern;
use crate::rational::Rational;

/// Default bound on `b^n`; keeps the quadratic exact oracle tractable.
pub const DEFAULT_SIZE_CAP: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Scrambled,
    ScrambledStar,
    Symmetrized,
}

/// A point `(x/scale, y/scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GridPoint {
    pub x: u64,
    pub y: u64,
}

/// A multiset of grid points in `[0,1)^2` with scale `b^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    base: usize,
    n: usize,
    scale: u64,
    label: Label,
    points: Vec<GridPoint>,
}

impl PointSet {
    /// Builds a point set from raw grid numerators; mostly for tests and
    /// hand-made configurations.
    pub fn from_grid(
        base: usize,
        n: usize,
        label: Label,
        points: Vec<GridPoint>,
    ) -> Result<Self, Error> {
        let scale = grid_scale(base, n, u64::MAX)?;
        if let Some(p) = points.iter().find(|p| p.x >= scale || p.y >= scale) {
            return Err(Error::OutOfRange(format!(
                "grid point ({}, {}) outside [0, {scale})",
                p.x, p.y
            )));
        }
        Ok(PointSet {
            base,
            n,
            scale,
            label,
            points,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `b^n`, the common denominator of all coordinates.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// Cardinality counted with multiplicity.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> Vec<(Rational, Rational)> {
        let s = Rational::from(self.scale);
        self.points
            .iter()
            .map(|p| (Rational::from(p.x) / &s, Rational::from(p.y) / &s))
            .collect()
    }

    /// Points sorted, for multiset comparisons.
    pub fn multiset(&self) -> Vec<GridPoint> {
        let mut v = self.points.clone();
        v.sort_unstable();
        v
    }
}

fn grid_scale(b: usize, n: usize, cap: u64) -> Result<u64, Error> {
    if b < 2 {
        return Err(Error::BaseTooSmall(b));
    }
    let points = (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if points > cap as u128 {
        return Err(Error::SizeCapExceeded { points, cap });
    }
    Ok(points as u64)
}

/// `R_{b,n}^Σ`: for each digit tuple `(a_0, …, a_{n−1})` the point with
/// `y = Σ a_i/b^{i+1}` and `x = Σ σ_{n−1−i}(a_{n−1−i})/b^{i+1}`.
///
/// Points are emitted in the order of `a_{n−1}…a_0` read as a base-`b`
/// integer.
pub fn scrambled_hammersley(pattern: &SigmaPattern, cap: u64) -> Result<PointSet, Error> {
    let b = pattern.base();
    let n = pattern.len();
    let scale = grid_scale(b, n, cap)?;
    let bb = b as u64;
    let mut pow = vec![1u64; n];
    for i in 1..n {
        pow[i] = pow[i - 1] * bb;
    }
    let components: Vec<&[usize]> = (0..n).map(|i| pattern.component(i).images()).collect();
    let points = (0..scale)
        .map(|t| {
            let (mut x, mut y, mut rest) = (0u64, 0u64, t);
            for k in 0..n {
                let a = (rest % bb) as usize;
                rest /= bb;
                // a_k sits at position k+1 of y and position n−k of x
                y += a as u64 * pow[n - 1 - k];
                x += components[k][a] as u64 * pow[k];
            }
            GridPoint { x, y }
        })
        .collect();
    Ok(PointSet {
        base: b,
        n,
        scale,
        label: Label::Scrambled,
        points,
    })
}

/// `R^{Σ,sym} = R^Σ ∪ R^{Σ*}` as a multiset of `2b^n` points.
pub fn symmetrized(pattern: &SigmaPattern, cap: u64) -> Result<PointSet, Error> {
    let mut first = scrambled_hammersley(pattern, cap)?;
    let second = scrambled_hammersley(&pattern.star(), cap)?;
    first.points.extend(second.points);
    first.label = Label::Symmetrized;
    Ok(first)
}

/// Maps every point `(x, y)` to `(1 − 1/b^n − x, y)`.
pub fn reflect_x(ps: &PointSet) -> PointSet {
    let top = ps.scale - 1;
    PointSet {
        points: ps
            .points
            .iter()
            .map(|p| GridPoint { x: top - p.x, y: p.y })
            .collect(),
        label: match ps.label {
            Label::Scrambled => Label::ScrambledStar,
            Label::ScrambledStar => Label::Scrambled,
            Label::Symmetrized => Label::Symmetrized,
        },
        ..ps.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{parse_cycles, Permutation};

    fn pattern(b: usize, word: &str) -> SigmaPattern {
        SigmaPattern::parse(Permutation::identity(b).unwrap(), word).unwrap()
    }

    fn pts(v: &[(u64, u64)]) -> Vec<GridPoint> {
        let mut out: Vec<_> = v.iter().map(|&(x, y)| GridPoint { x, y }).collect();
        out.sort();
        out
    }

    #[test]
    fn classical_examples() {
        let one = scrambled_hammersley(&pattern(2, "s"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(one.multiset(), pts(&[(0, 0), (1, 1)]));
        let two = scrambled_hammersley(&pattern(2, "ss"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(two.scale(), 4);
        assert_eq!(two.multiset(), pts(&[(0, 0), (1, 2), (2, 1), (3, 3)]));
        // natural digit order
        assert_eq!(two.points()[1], GridPoint { x: 1, y: 2 });
        let star = scrambled_hammersley(&pattern(3, "c"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(star.multiset(), pts(&[(2, 0), (1, 1), (0, 2)]));
    }

    #[test]
    fn symmetrized_examples() {
        let s2 = symmetrized(&pattern(2, "s"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(s2.multiset(), pts(&[(0, 0), (1, 1), (1, 0), (0, 1)]));
        let s3 = symmetrized(&pattern(3, "s"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(
            s3.multiset(),
            pts(&[(0, 0), (1, 1), (2, 2), (2, 0), (1, 1), (0, 2)])
        );
        assert_eq!(s3.multiset().iter().filter(|p| p.x == 1 && p.y == 1).count(), 2);
        let sigma = parse_cycles("(0,1)", 5).unwrap().extend();
        let p = SigmaPattern::parse(sigma, "ss").unwrap();
        assert_eq!(symmetrized(&p, DEFAULT_SIZE_CAP).unwrap().len(), 50);
    }

    #[test]
    fn reflection_examples() {
        let one = scrambled_hammersley(&pattern(2, "s"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(reflect_x(&one).multiset(), pts(&[(1, 0), (0, 1)]));
        let three = scrambled_hammersley(&pattern(3, "s"), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(reflect_x(&three).multiset(), pts(&[(2, 0), (1, 1), (0, 2)]));
        assert_eq!(reflect_x(&reflect_x(&three)), three);
    }

    #[test]
    fn size_cap() {
        let p = pattern(2, "sssss");
        assert!(matches!(
            scrambled_hammersley(&p, 16),
            Err(Error::SizeCapExceeded { points: 32, cap: 16 })
        ));
        assert!(scrambled_hammersley(&p, 32).is_ok());
    }

    #[test]
    fn symmetrization_is_union_with_reflection() {
        for b in 2..=5usize {
            let sigmas = crate::perm::reversal_symmetric(b).unwrap();
            for n in 1..=3usize {
                for sigma in sigmas.iter().take(4) {
                    for p in SigmaPattern::all_words(sigma, n) {
                        let base = scrambled_hammersley(&p, DEFAULT_SIZE_CAP).unwrap();
                        let mut expected = base.points().to_vec();
                        expected.extend(reflect_x(&base).points().iter().copied());
                        expected.sort();
                        let sym = symmetrized(&p, DEFAULT_SIZE_CAP).unwrap();
                        assert_eq!(sym.multiset(), expected);
                        assert_eq!(sym.len() as u64, 2 * base.scale());
                    }
                }
            }
        }
    }

    #[test]
    fn rows_and_columns_hold_one_point() {
        for b in 2..=5usize {
            let sigma = Permutation::new((0..b).rev().collect()).unwrap();
            for n in 1..=3 {
                for p in SigmaPattern::all_words(&sigma, n) {
                    let ps = scrambled_hammersley(&p, DEFAULT_SIZE_CAP).unwrap();
                    let mut xs: Vec<_> = ps.points().iter().map(|q| q.x).collect();
                    let mut ys: Vec<_> = ps.points().iter().map(|q| q.y).collect();
                    xs.sort();
                    ys.sort();
                    let all: Vec<u64> = (0..ps.scale()).collect();
                    assert_eq!(xs, all);
                    assert_eq!(ys, all);
                }
            }
        }
    }
}
