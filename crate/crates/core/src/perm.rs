//! Digit permutations of `{0, …, b−1}`, the reversal `τ(k) = b−1−k`,
//! the reversal-symmetric classes and scrambling patterns.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A bijection of `{0, …, b−1}`; the base is `images.len()`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let b = images.len();
        if b < 2 {
            return Err(Error::BaseTooSmall(b));
        }
        let mut seen = vec![false; b];
        for &v in &images {
            if v >= b {
                return Err(Error::InvalidPermutation(format!("image {v} >= base {b}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("image {v} repeated")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(b: usize) -> Result<Self, Error> {
        Self::new((0..b).collect())
    }

    /// The reversal `τ(k) = b − 1 − k`.
    pub fn tau(b: usize) -> Result<Self, Error> {
        Self::new((0..b).rev().collect())
    }

    pub fn base(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| k == v)
    }

    /// `σ̄ = τ ∘ σ`, i.e. `k ↦ b − 1 − σ(k)`.
    pub fn conjugate(&self) -> Permutation {
        let b = self.base();
        Permutation {
            images: self.images.iter().map(|&v| b - 1 - v).collect(),
        }
    }

    /// Membership in `A_b(τ)`: `σ(b−1−k) = b−1−σ(k)` for every digit.
    pub fn commutes_with_tau(&self) -> bool {
        let b = self.base();
        (0..b).all(|k| self.images[b - 1 - k] == b - 1 - self.images[k])
    }

    /// Exchanges the images of the complementary digits `d` and `b−1−d`.
    /// Requires `σ ∈ A_b(τ)`; the result stays in `A_b(τ)`.
    pub fn complementary_swap(&self, d: usize) -> Result<Permutation, Error> {
        let b = self.base();
        if d >= b {
            return Err(Error::DigitOutOfRange { digit: d, base: b });
        }
        if !self.commutes_with_tau() {
            return Err(Error::NotReversalSymmetric(self.to_string()));
        }
        let mut images = self.images.clone();
        images.swap(d, b - 1 - d);
        Ok(Permutation { images })
    }

    /// Inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.base()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v] = k;
        }
        Permutation { images }
    }

    /// Parses `"[0,2,1,3]"` or `"0,2,1,3"`.
    pub fn parse_images(text: &str) -> Result<Permutation, Error> {
        let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
        let images = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad image {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::new(images)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self, Error> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Every `σ ∈ A_b(τ)`: a permutation of the lower half, extended by
/// reflection, composed with any subset of complementary swaps.
/// Yields `2^⌊b/2⌋ · ⌊b/2⌋!` permutations in a fixed order.
pub fn reversal_symmetric(b: usize) -> Result<Vec<Permutation>, Error> {
    let m = b / 2;
    let mut out = Vec::new();
    for partial in enumerate_b(b)? {
        let base = partial.extend();
        for mask in 0u64..(1u64 << m) {
            let mut images = base.images.clone();
            for d in (0..m).filter(|d| mask >> d & 1 == 1) {
                images.swap(d, b - 1 - d);
            }
            out.push(Permutation { images });
        }
    }
    Ok(out)
}

/// A permutation of the lower digits `{0, …, ⌊b/2⌋−1}`, standing for the
/// member of `B_b(τ)` it extends to.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialPermutation {
    base: usize,
    lower: Vec<usize>,
}

impl PartialPermutation {
    pub fn new(base: usize, lower: Vec<usize>) -> Result<Self, Error> {
        if base < 2 {
            return Err(Error::BaseTooSmall(base));
        }
        let m = base / 2;
        if lower.len() != m {
            return Err(Error::InvalidPermutation(format!(
                "base {base} needs {m} lower-half images, got {}",
                lower.len()
            )));
        }
        let mut seen = vec![false; m];
        for &v in &lower {
            if v >= m || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{lower:?} is not a permutation of 0..{m}"
                )));
            }
        }
        Ok(PartialPermutation { base, lower })
    }

    pub fn identity(base: usize) -> Result<Self, Error> {
        Self::new(base, (0..base / 2).collect())
    }

    /// Recovers the lower half of `σ ∈ B_b(τ)`.
    pub fn from_permutation(sigma: &Permutation) -> Result<Self, Error> {
        if !sigma.commutes_with_tau() {
            return Err(Error::NotReversalSymmetric(sigma.to_string()));
        }
        let b = sigma.base();
        Self::new(b, sigma.images[..b / 2].to_vec())
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    /// Full permutation with `σ(b−1−k) = b−1−σ(k)`; the middle digit of an
    /// odd base is fixed.
    pub fn extend(&self) -> Permutation {
        let b = self.base;
        let mut images = vec![0; b];
        for (k, &v) in self.lower.iter().enumerate() {
            images[k] = v;
            images[b - 1 - k] = b - 1 - v;
        }
        if b % 2 == 1 {
            images[b / 2] = b / 2;
        }
        Permutation { images }
    }

    /// Cycle notation as used in published tables: fixed points omitted,
    /// each cycle led by its smallest digit, `id` for the identity.
    pub fn cycles(&self) -> String {
        let m = self.lower.len();
        let mut seen = vec![false; m];
        let mut out = String::new();
        for start in 0..m {
            if seen[start] || self.lower[start] == start {
                continue;
            }
            out.push('(');
            let mut k = start;
            let mut first = true;
            while !seen[k] {
                seen[k] = true;
                if !first {
                    out.push(',');
                }
                out.push_str(&k.to_string());
                first = false;
                k = self.lower[k];
            }
            out.push(')');
        }
        if out.is_empty() {
            "id".to_string()
        } else {
            out
        }
    }
}

impl fmt::Display for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

impl fmt::Debug for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.base, self.lower)
    }
}

/// Parses cycle notation such as `"(0,3,5,6,4,2)(1,7)"` or `"id"` into a
/// lower-half permutation. Each cycle `(a,b,c)` maps `a→b→c→a`.
pub fn parse_cycles(text: &str, b: usize) -> Result<PartialPermutation, Error> {
    if b < 2 {
        return Err(Error::BaseTooSmall(b));
    }
    let m = b / 2;
    let mut lower: Vec<usize> = (0..m).collect();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() || compact == "id" {
        return PartialPermutation::new(b, lower);
    }
    let mut used = vec![false; b];
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| Error::Parse(format!("malformed cycle notation {text:?}")))?;
        let (inner, tail) = body;
        if inner.contains('(') {
            return Err(Error::Parse(format!("nested parenthesis in {text:?}")));
        }
        let digits = inner
            .split(',')
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad digit {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for &d in &digits {
            // for odd bases the middle digit may only appear as a fixed point
            let middle_fixed = b % 2 == 1 && d == m && digits.len() == 1;
            if d >= m && !middle_fixed {
                return Err(Error::DigitOutOfRange { digit: d, base: b });
            }
            if std::mem::replace(&mut used[d], true) {
                return Err(Error::Parse(format!("digit {d} repeated in {text:?}")));
            }
        }
        if digits.len() > 1 {
            for (i, &d) in digits.iter().enumerate() {
                lower[d] = digits[(i + 1) % digits.len()];
            }
        }
        rest = tail;
    }
    PartialPermutation::new(b, lower)
}

/// Reads a full permutation of `0..b` from user input: `"id"`, an image
/// list `"[0,2,1,3]"`, or lower-half cycle notation extended by `τ`.
pub fn parse_sigma(text: &str, b: usize) -> Result<Permutation, Error> {
    let t = text.trim();
    if t.starts_with('[') {
        let sigma = Permutation::parse_images(t)?;
        if sigma.base() != b {
            return Err(Error::InvalidPermutation(format!(
                "{t} has {} images, expected {b}",
                sigma.base()
            )));
        }
        return Ok(sigma);
    }
    Ok(parse_cycles(t, b)?.extend())
}

/// Enumerates `B_b(τ)` as lower-half permutations in lexicographic order;
/// `⌊b/2⌋!` items.
pub fn enumerate_b(b: usize) -> Result<LexPermutations, Error> {
    if b < 2 {
        return Err(Error::BaseTooSmall(b));
    }
    Ok(LexPermutations {
        base: b,
        current: Some((0..b / 2).collect()),
    })
}

/// Lexicographic permutation stream (the classical next-permutation step).
#[derive(Debug, Clone)]
pub struct LexPermutations {
    base: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for LexPermutations {
    type Item = PartialPermutation;

    fn next(&mut self) -> Option<PartialPermutation> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        if next_lexicographic(&mut next) {
            self.current = Some(next);
        }
        Some(PartialPermutation {
            base: self.base,
            lower: cur,
        })
    }
}

/// Advances `v` to its lexicographic successor; false when `v` was last.
pub fn next_lexicographic(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// One component choice in a scrambling pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    /// the base permutation `σ`
    S,
    /// its conjugate `σ̄ = τ∘σ`
    C,
}

impl Letter {
    pub fn flip(self) -> Letter {
        match self {
            Letter::S => Letter::C,
            Letter::C => Letter::S,
        }
    }
}

/// `Σ = (σ_0, …, σ_{n−1}) ∈ {σ, σ̄}^n`, encoded as `σ` plus a word over
/// `{s, c}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaPattern {
    sigma: Permutation,
    sigma_bar: Permutation,
    word: Vec<Letter>,
}

impl SigmaPattern {
    pub fn new(sigma: Permutation, word: Vec<Letter>) -> Result<Self, Error> {
        if word.is_empty() {
            return Err(Error::InvalidWord(String::new()));
        }
        let sigma_bar = sigma.conjugate();
        Ok(SigmaPattern {
            sigma,
            sigma_bar,
            word,
        })
    }

    /// `word` is a string such as `"sscs"`.
    pub fn parse(sigma: Permutation, word: &str) -> Result<Self, Error> {
        let letters = word
            .trim()
            .chars()
            .map(|ch| match ch {
                's' => Ok(Letter::S),
                'c' => Ok(Letter::C),
                _ => Err(Error::InvalidWord(word.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sigma, letters)
    }

    /// `Σ = (σ, …, σ)` of length `n`.
    pub fn constant(sigma: Permutation, n: usize) -> Result<Self, Error> {
        Self::new(sigma, vec![Letter::S; n])
    }

    /// All `2^n` patterns over `σ` of length `n`, in binary order
    /// (`s` = 0, index 0 most significant).
    pub fn all_words(sigma: &Permutation, n: usize) -> Vec<SigmaPattern> {
        (0u64..(1u64 << n))
            .map(|mask| {
                let word = (0..n)
                    .map(|i| {
                        if mask >> (n - 1 - i) & 1 == 1 {
                            Letter::C
                        } else {
                            Letter::S
                        }
                    })
                    .collect();
                SigmaPattern::new(sigma.clone(), word).expect("n >= 1")
            })
            .collect()
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn sigma_bar(&self) -> &Permutation {
        &self.sigma_bar
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn word_string(&self) -> String {
        self.word
            .iter()
            .map(|l| match l {
                Letter::S => 's',
                Letter::C => 'c',
            })
            .collect()
    }

    pub fn base(&self) -> usize {
        self.sigma.base()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `σ_i`.
    pub fn component(&self, i: usize) -> &Permutation {
        match self.word[i] {
            Letter::S => &self.sigma,
            Letter::C => &self.sigma_bar,
        }
    }

    /// `l(Σ)`: how many components equal `σ`.
    pub fn l(&self) -> usize {
        self.word.iter().filter(|&&w| w == Letter::S).count()
    }

    /// `Σ*` with `σ_i* = τ∘σ_i`.
    pub fn star(&self) -> SigmaPattern {
        SigmaPattern {
            sigma: self.sigma.clone(),
            sigma_bar: self.sigma_bar.clone(),
            word: self.word.iter().map(|w| w.flip()).collect(),
        }
    }

    /// The same components in reverse index order.
    pub fn reversed(&self) -> SigmaPattern {
        let mut word = self.word.clone();
        word.reverse();
        SigmaPattern {
            sigma: self.sigma.clone(),
            sigma_bar: self.sigma_bar.clone(),
            word,
        }
    }
}
