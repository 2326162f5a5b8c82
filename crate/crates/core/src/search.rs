//! Exhaustive minimization of `c_b^σ` over `B_b(τ)`.
//!
//! The closed form is `c = offset(b) + 2·S/b³` with the integer
//! `S = Σ_{k1,k2} max(σ(k1),σ(k2))·W(k1,k2)`,
//! `W = b(max(k1,k2) + max(k1+k2, b−1)) − 2k1² − 2k1`,
//! so comparing `S` compares `c` exactly. Lower halves are enumerated by
//! Heap's algorithm; one swap changes four images and `S` is updated from the
//! terms touching them.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::formulas::{c_closed_offset, c_constant_closed, leading_constant_of, ParityTerm};
use crate::perm::{parse_cycles, PartialPermutation};
use crate::rational::Rational;

/// Full runs at or above this base need `allow_long`.
pub const LONG_RUN_BASE: usize = 22;

const RECHECK_INTERVAL: u64 = 1 << 14;
const PROGRESS_INTERVAL: u64 = 1_000_000;
// single-core release cost per permutation, measured at b = 20, 21
const NANOS_PER_PERM_PER_DIGIT: f64 = 20.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Full,
    /// evaluate one given lower half
    Verify(Vec<usize>),
    /// `count` lower halves drawn with a seeded generator
    Sample { count: usize, seed: u64 },
}

impl SearchMode {
    pub fn label(&self) -> &'static str {
        match self {
            SearchMode::Full => "full",
            SearchMode::Verify(_) => "verify",
            SearchMode::Sample { .. } => "sample",
        }
    }
}

pub type ProgressFn = Arc<dyn Fn(u64, u128) + Send + Sync>;

#[derive(Clone, Default)]
pub struct SearchOptions {
    /// worker threads; `None` uses the global pool
    pub threads: Option<usize>,
    /// permit full runs at `b ≥ LONG_RUN_BASE`
    pub allow_long: bool,
    /// refuse runs scanning more than this many permutations
    pub budget: Option<u128>,
    /// called with (scanned so far, total) about every 10⁶ permutations
    pub progress: Option<ProgressFn>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub base: usize,
    pub min_c: Rational,
    pub minimizers: Vec<PartialPermutation>,
    pub g: usize,
    pub max_c: Rational,
    pub maximizers: Vec<PartialPermutation>,
    pub scanned: u128,
    #[serde(skip)]
    pub elapsed: Duration,
    pub mode: SearchMode,
}

/// Precomputed weights for one base.
#[derive(Clone, Debug)]
pub struct Objective {
    b: usize,
    // V[k][l] = W(k,l) + W(l,k) off the diagonal, W(k,k) on it
    v: Vec<i64>,
}

impl Objective {
    pub fn new(b: usize) -> Result<Self, Error> {
        if b < 2 {
            return Err(Error::BaseTooSmall(b));
        }
        let bi = b as i64;
        let w = |k1: usize, k2: usize| {
            let (k1, k2) = (k1 as i64, k2 as i64);
            bi * (k1.max(k2) + (k1 + k2).max(bi - 1)) - 2 * k1 * k1 - 2 * k1
        };
        let mut v = vec![0i64; b * b];
        for k in 0..b {
            for l in 0..b {
                v[k * b + l] = if k == l { w(k, k) } else { w(k, l) + w(l, k) };
            }
        }
        Ok(Objective { b, v })
    }

    pub fn base(&self) -> usize {
        self.b
    }

    /// `S` for a full image vector, from scratch.
    pub fn full(&self, images: &[usize]) -> i64 {
        let b = self.b;
        let mut s = 0i64;
        for k in 0..b {
            let row = &self.v[k * b..(k + 1) * b];
            s += images[k] as i64 * row[k];
            for l in k + 1..b {
                s += images[k].max(images[l]) as i64 * row[l];
            }
        }
        s
    }

    /// Terms of `S` that involve at least one index of `changed`.
    fn touching(&self, images: &[usize], changed: &[usize; 4], mask: &[bool]) -> i64 {
        let b = self.b;
        let mut s = 0i64;
        for (i, &k) in changed.iter().enumerate() {
            let row = &self.v[k * b..(k + 1) * b];
            let sk = images[k];
            s += sk as i64 * row[k];
            for l in 0..b {
                if !mask[l] {
                    s += sk.max(images[l]) as i64 * row[l];
                }
            }
            for &l in &changed[i + 1..] {
                s += sk.max(images[l]) as i64 * row[l];
            }
        }
        s
    }

    /// `c = offset(b) + 2S/b³`.
    pub fn to_c(&self, s: i64) -> Rational {
        let b3 = (self.b as i64).pow(3);
        c_closed_offset(self.b, ParityTerm::Validated) + Rational::frac(2 * s, b3)
    }
}

fn extend_into(b: usize, lower: &[usize], images: &mut [usize]) {
    for (k, &v) in lower.iter().enumerate() {
        images[k] = v;
        images[b - 1 - k] = b - 1 - v;
    }
    if b % 2 == 1 {
        images[b / 2] = b / 2;
    }
}

/// Extremes seen by one worker.
#[derive(Clone, Debug)]
struct Extremes {
    min: i64,
    argmin: Vec<Vec<usize>>,
    max: i64,
    argmax: Vec<Vec<usize>>,
    scanned: u128,
}

impl Extremes {
    fn empty() -> Self {
        Extremes {
            min: i64::MAX,
            argmin: Vec::new(),
            max: i64::MIN,
            argmax: Vec::new(),
            scanned: 0,
        }
    }

    /// Returns true when `s` sets a new strict minimum.
    fn offer(&mut self, s: i64, lower: &[usize]) -> bool {
        self.scanned += 1;
        let mut improved = false;
        if s < self.min {
            self.min = s;
            self.argmin.clear();
            improved = true;
        }
        if s == self.min {
            self.argmin.push(lower.to_vec());
        }
        if s > self.max {
            self.max = s;
            self.argmax.clear();
        }
        if s == self.max {
            self.argmax.push(lower.to_vec());
        }
        improved
    }

    fn merge(mut self, other: Extremes) -> Extremes {
        self.scanned += other.scanned;
        match other.min.cmp(&self.min) {
            std::cmp::Ordering::Less => {
                self.min = other.min;
                self.argmin = other.argmin;
            }
            std::cmp::Ordering::Equal => self.argmin.extend(other.argmin),
            std::cmp::Ordering::Greater => {}
        }
        match other.max.cmp(&self.max) {
            std::cmp::Ordering::Greater => {
                self.max = other.max;
                self.argmax = other.argmax;
            }
            std::cmp::Ordering::Equal => self.argmax.extend(other.argmax),
            std::cmp::Ordering::Less => {}
        }
        self
    }
}

struct Progress<'a> {
    counter: &'a AtomicU64,
    total: u128,
    callback: Option<&'a ProgressFn>,
}

impl Progress<'_> {
    fn tick(&self, steps: u64) {
        let before = self.counter.fetch_add(steps, Ordering::Relaxed);
        if let Some(cb) = self.callback {
            if (before + steps) / PROGRESS_INTERVAL != before / PROGRESS_INTERVAL {
                cb(before + steps, self.total);
            }
        }
    }
}

/// All lower halves with `lower[0] = first`, by Heap's algorithm on the
/// remaining positions.
fn scan_branch(obj: &Objective, first: usize, progress: &Progress<'_>) -> Extremes {
    let b = obj.b;
    let m = b / 2;
    let mut lower: Vec<usize> = std::iter::once(first).chain((0..m).filter(|&v| v != first)).collect();
    let mut images = vec![0usize; b];
    extend_into(b, &lower, &mut images);
    let mut s = obj.full(&images);
    let mut ext = Extremes::empty();
    ext.offer(s, &lower);

    let k = m.saturating_sub(1);
    let mut c = vec![0usize; k];
    let mut mask = vec![false; b];
    let mut since_check = 0u64;
    let mut pending = 1u64;
    let mut i = 1usize;
    while i < k {
        if c[i] < i {
            let (a, bpos) = if i.is_multiple_of(2) { (0, i) } else { (c[i], i) };
            // positions in `lower` are offset by one
            let (p, q) = (a + 1, bpos + 1);
            let changed = [p, q, b - 1 - p, b - 1 - q];
            for &x in &changed {
                mask[x] = true;
            }
            let before = obj.touching(&images, &changed, &mask);
            lower.swap(p, q);
            images.swap(p, q);
            images.swap(b - 1 - p, b - 1 - q);
            let after = obj.touching(&images, &changed, &mask);
            for &x in &changed {
                mask[x] = false;
            }
            s += after - before;

            since_check += 1;
            let improved = ext.offer(s, &lower);
            if improved || since_check >= RECHECK_INTERVAL {
                assert_eq!(s, obj.full(&images), "incremental objective drifted at {lower:?}");
                since_check = 0;
            }
            pending += 1;
            if pending >= 4096 {
                progress.tick(pending);
                pending = 0;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    progress.tick(pending);
    ext
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// Rough single-core wall time of a full run, in seconds.
pub fn estimate_full_secs(b: usize) -> f64 {
    factorial(b / 2) as f64 * b as f64 * NANOS_PER_PERM_PER_DIGIT * 1e-9
}

fn finish(obj: &Objective, ext: Extremes, mode: SearchMode, start: Instant) -> Result<SearchResult, Error> {
    let b = obj.b;
    let to_partial = |mut v: Vec<Vec<usize>>| -> Result<Vec<PartialPermutation>, Error> {
        v.sort();
        v.dedup();
        v.into_iter().map(|lower| PartialPermutation::new(b, lower)).collect()
    };
    let minimizers = to_partial(ext.argmin)?;
    Ok(SearchResult {
        base: b,
        min_c: obj.to_c(ext.min),
        g: minimizers.len(),
        minimizers,
        max_c: obj.to_c(ext.max),
        maximizers: to_partial(ext.argmax)?,
        scanned: ext.scanned,
        elapsed: start.elapsed(),
        mode,
    })
}

fn run_full(obj: &Objective, options: &SearchOptions) -> Extremes {
    let m = obj.b / 2;
    let counter = AtomicU64::new(0);
    let progress = Progress {
        counter: &counter,
        total: factorial(m),
        callback: options.progress.as_ref(),
    };
    (0..m.max(1))
        .into_par_iter()
        .map(|first| {
            if m == 0 {
                Extremes::empty()
            } else {
                scan_branch(obj, first, &progress)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Extremes::empty(), Extremes::merge)
}

/// Minimum (and maximum) of `c_b^σ` over `B_b(τ)` or a part of it.
pub fn search_min_c(b: usize, mode: SearchMode, options: &SearchOptions) -> Result<SearchResult, Error> {
    let obj = Objective::new(b)?;
    let m = b / 2;
    let start = Instant::now();
    let total = match &mode {
        SearchMode::Full => factorial(m),
        SearchMode::Verify(_) => 1,
        SearchMode::Sample { count, .. } => *count as u128,
    };
    if let Some(budget) = options.budget {
        if total > budget {
            return Err(Error::BudgetExceeded { total, budget });
        }
    }
    let ext = match &mode {
        SearchMode::Full => {
            if b >= LONG_RUN_BASE && !options.allow_long {
                return Err(Error::LongRunNotAllowed {
                    base: b,
                    total,
                    estimate_secs: estimate_full_secs(b).ceil() as u64,
                });
            }
            match options.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?
                    .install(|| run_full(&obj, options)),
                None => run_full(&obj, options),
            }
        }
        SearchMode::Verify(lower) => {
            let partial = PartialPermutation::new(b, lower.clone())?;
            let mut ext = Extremes::empty();
            ext.offer(obj.full(partial.extend().images()), partial.lower());
            ext
        }
        SearchMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut lower: Vec<usize> = (0..m).collect();
            let mut images = vec![0usize; b];
            let mut ext = Extremes::empty();
            for _ in 0..*count {
                lower.shuffle(&mut rng);
                extend_into(b, &lower, &mut images);
                ext.offer(obj.full(&images), &lower);
            }
            ext
        }
    };
    finish(&obj, ext, mode, start)
}

/// Pass/fail of one printed row against the computation.
#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub b: usize,
    pub cycles: String,
    pub claimed_c: Rational,
    pub computed_c: Rational,
    pub c_ok: bool,
    pub claimed_leading: Option<String>,
    pub computed_leading: String,
    pub leading_ok: Option<bool>,
    /// `None` outside full mode
    pub min_ok: Option<bool>,
    pub claimed_g: usize,
    pub computed_g: Option<usize>,
    pub g_ok: Option<bool>,
}

impl RowReport {
    pub fn all_pass(&self) -> bool {
        self.c_ok
            && self.leading_ok.unwrap_or(true)
            && self.min_ok.unwrap_or(true)
            && self.g_ok.unwrap_or(true)
    }
}

/// Checks a row: the listed permutation's `c` (and leading constant when
/// given); in full mode also the minimum and `g`.
pub fn verify_table_row(
    b: usize,
    cycles: &str,
    claimed_c: &Rational,
    claimed_g: usize,
    claimed_leading: Option<&str>,
    full: bool,
    options: &SearchOptions,
) -> Result<RowReport, Error> {
    let partial = parse_cycles(cycles, b)?;
    let sigma = partial.extend();
    let computed_c = c_constant_closed(&sigma)?;
    let computed_leading = leading_constant_of(&computed_c, b, 6)?;
    let (min_ok, computed_g) = if full {
        let res = search_min_c(b, SearchMode::Full, options)?;
        (
            Some(res.min_c == *claimed_c && res.minimizers.contains(&partial)),
            Some(res.g),
        )
    } else {
        (None, None)
    };
    Ok(RowReport {
        b,
        cycles: cycles.to_string(),
        c_ok: computed_c == *claimed_c,
        claimed_c: claimed_c.clone(),
        computed_c,
        leading_ok: claimed_leading.map(|l| l == computed_leading),
        claimed_leading: claimed_leading.map(str::to_string),
        computed_leading,
        min_ok,
        claimed_g,
        g_ok: computed_g.map(|g| g == claimed_g),
        computed_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::c_constant_definition;
    use crate::perm::{enumerate_b, Permutation};

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn full(b: usize) -> SearchResult {
        search_min_c(b, SearchMode::Full, &SearchOptions::default()).unwrap()
    }

    #[test]
    fn small_rows() {
        let two = full(2);
        assert_eq!(two.min_c, r(1, 24));
        assert_eq!(two.g, 1);
        assert!(two.minimizers[0].extend().is_identity());
        let four = full(4);
        assert_eq!((four.min_c.clone(), four.g), (r(1, 12), 2));
        let eight = full(8);
        assert_eq!((eight.min_c.clone(), eight.g), (r(3, 32), 2));
        assert!(eight.minimizers.contains(&parse_cycles("(0,2,3,1)", 8).unwrap()));
        assert_eq!(eight.scanned, 24);
        assert_eq!(full(3).scanned, 1);
    }

    #[test]
    fn objective_matches_closed_form() {
        for b in 2..=9 {
            let obj = Objective::new(b).unwrap();
            for p in enumerate_b(b).unwrap() {
                let sigma = p.extend();
                let c = obj.to_c(obj.full(sigma.images()));
                assert_eq!(c, c_constant_closed(&sigma).unwrap());
                assert_eq!(c, c_constant_definition(&sigma));
            }
        }
    }

    #[test]
    fn heap_scan_visits_every_lower_half_once() {
        for b in [6usize, 9, 12] {
            let res = full(b);
            assert_eq!(res.scanned, factorial(b / 2));
            // brute force over the lexicographic enumeration
            let obj = Objective::new(b).unwrap();
            let values: Vec<(i64, Vec<usize>)> = enumerate_b(b)
                .unwrap()
                .map(|p| (obj.full(p.extend().images()), p.lower().to_vec()))
                .collect();
            let min = values.iter().map(|v| v.0).min().unwrap();
            let max = values.iter().map(|v| v.0).max().unwrap();
            let argmin: Vec<_> = values.iter().filter(|v| v.0 == min).map(|v| v.1.clone()).collect();
            assert_eq!(res.min_c, obj.to_c(min));
            assert_eq!(res.max_c, obj.to_c(max));
            let got: Vec<Vec<usize>> = res.minimizers.iter().map(|p| p.lower().to_vec()).collect();
            assert_eq!(got, argmin);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let one = search_min_c(14, SearchMode::Full, &SearchOptions { threads: Some(1), ..Default::default() })
            .unwrap();
        let three = search_min_c(14, SearchMode::Full, &SearchOptions { threads: Some(3), ..Default::default() })
            .unwrap();
        assert_eq!(one.min_c, three.min_c);
        assert_eq!(one.minimizers, three.minimizers);
        assert_eq!(one.maximizers, three.maximizers);
    }

    #[test]
    fn gates() {
        assert!(matches!(
            search_min_c(22, SearchMode::Full, &SearchOptions::default()),
            Err(Error::LongRunNotAllowed { base: 22, .. })
        ));
        assert!(matches!(
            search_min_c(12, SearchMode::Full, &SearchOptions { budget: Some(10), ..Default::default() }),
            Err(Error::BudgetExceeded { total: 720, budget: 10 })
        ));
    }

    #[test]
    fn verify_and_sample_modes() {
        let lower = parse_cycles("(0,2)(1,4)", 11).unwrap().lower().to_vec();
        let v = search_min_c(11, SearchMode::Verify(lower), &SearchOptions::default()).unwrap();
        assert_eq!(v.min_c, r(415, 3993));
        assert_eq!(v.scanned, 1);
        let a = search_min_c(16, SearchMode::Sample { count: 50, seed: 3 }, &SearchOptions::default()).unwrap();
        let b = search_min_c(16, SearchMode::Sample { count: 50, seed: 3 }, &SearchOptions::default()).unwrap();
        assert_eq!(a.minimizers, b.minimizers);
        assert!(a.min_c >= r(23, 192));
    }

    #[test]
    fn row_reports() {
        let opts = SearchOptions::default();
        let rep = verify_table_row(2, "id", &r(1, 24), 1, Some("0.245178"), true, &opts).unwrap();
        assert!(rep.all_pass());
        let rep = verify_table_row(17, "(0,3,5,6,4,2)(1,7)", &r(584, 4913), 2, Some("0.204829"), true, &opts)
            .unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        let rep = verify_table_row(9, "(0,1,3)", &r(26, 243), 4, None, false, &opts).unwrap();
        assert!(rep.c_ok && rep.g_ok.is_none());
        assert!(verify_table_row(9, "(0,9)", &r(1, 1), 1, None, false, &opts).is_err());
    }

    #[test]
    fn even_base_maxima() {
        // observed data, kept as a regression check
        for b in [4usize, 6, 8, 10] {
            let res = full(b);
            let m = b / 2;
            let id = PartialPermutation::identity(b).unwrap();
            let rev = PartialPermutation::new(b, (0..m).rev().collect()).unwrap();
            let mut expected = vec![id, rev];
            expected.sort_by(|a, b| a.lower().cmp(b.lower()));
            expected.dedup();
            assert_eq!(res.maximizers, expected, "b = {b}");
        }
        let id7 = Permutation::identity(7).unwrap();
        let res = full(7);
        assert_eq!(res.maximizers.len(), 1);
        assert_eq!(res.maximizers[0].extend(), id7);
    }
}
