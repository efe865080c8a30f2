//! Subshifts of finite type: admissible words, periodic points and the
//! two-sided `d_beta` metric.
//!
//! Points of the shift space are only ever represented by periodic orbits
//! and finite cylinder words. Everything computed downstream (sums, suprema,
//! integrals of locally constant data) is determined by those.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Enumerations above this many words are refused.
pub const MAX_ENUMERATION: f64 = 5.0e7;

/// A one-step subshift of finite type given by a 0/1 transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    k: usize,
    adjacency: Vec<Vec<bool>>,
    primitivity_exponent: Option<usize>,
}

impl Sft {
    /// Builds the shift from a square 0/1 matrix. Every symbol must have at
    /// least one successor and one predecessor.
    pub fn new(matrix: Vec<Vec<u8>>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 {
            return Err(invalid("transition matrix is empty"));
        }
        let mut adjacency = Vec::with_capacity(k);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != k {
                return Err(invalid(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            let mut r = Vec::with_capacity(k);
            for &e in row {
                match e {
                    0 => r.push(false),
                    1 => r.push(true),
                    _ => return Err(invalid(format!("entry {e} in row {i} is not 0 or 1"))),
                }
            }
            adjacency.push(r);
        }
        for i in 0..k {
            if !adjacency[i].iter().any(|&b| b) {
                return Err(invalid(format!("symbol {i} has no successor")));
            }
            if !(0..k).any(|j| adjacency[j][i]) {
                return Err(invalid(format!("symbol {i} has no predecessor")));
            }
        }
        let primitivity_exponent = primitivity_exponent(&adjacency);
        Ok(Self {
            k,
            adjacency,
            primitivity_exponent,
        })
    }

    /// The full shift on `k` symbols.
    pub fn full(k: usize) -> Result<Self> {
        Self::new(vec![vec![1; k]; k])
    }

    /// The golden-mean shift: the word `11` is forbidden.
    pub fn golden_mean() -> Self {
        Self::new(vec![vec![1, 1], vec![1, 0]]).expect("valid matrix")
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        from < self.k && to < self.k && self.adjacency[from][to]
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.adjacency
            .iter()
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }

    /// Successors of a symbol in increasing order.
    pub fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).filter(move |&j| self.adjacency[from][j])
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent.is_some()
    }

    /// Smallest `m` with `A^m` entrywise positive, if the matrix is primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        self.primitivity_exponent
    }

    pub fn is_admissible(&self, symbols: &[usize]) -> bool {
        symbols.iter().all(|&s| s < self.k) && symbols.windows(2).all(|p| self.adjacency[p[0]][p[1]])
    }

    /// Wraps a symbol sequence as a [`Word`] after checking admissibility.
    pub fn word(&self, symbols: Vec<usize>) -> Result<Word> {
        if !self.is_admissible(&symbols) {
            return Err(invalid(format!("word {symbols:?} is not admissible")));
        }
        Ok(Word(symbols))
    }

    /// Wraps a cycle as a [`PeriodicPoint`], checking the closing transition.
    pub fn periodic_point(&self, cycle: Vec<usize>) -> Result<PeriodicPoint> {
        if cycle.is_empty() {
            return Err(invalid("a periodic point needs a non-empty cycle"));
        }
        let closes = self.allows(*cycle.last().unwrap(), cycle[0]);
        if !self.is_admissible(&cycle) || !closes {
            return Err(invalid(format!("cycle {cycle:?} is not admissible")));
        }
        Ok(PeriodicPoint::from_cycle(self.k, cycle))
    }

    /// Number of admissible words of length `n`, i.e. the entry sum of
    /// `A^(n-1)`, as a float so that huge counts saturate gracefully.
    pub fn word_count(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let mut v = vec![1.0f64; self.k];
        for _ in 1..n {
            v = (0..self.k)
                .map(|i| self.successors(i).map(|j| v[j]).sum())
                .collect();
        }
        v.iter().sum()
    }

    /// `trace(A^n)`, computed by boolean-free integer matrix powers.
    pub fn trace_power(&self, n: usize) -> u128 {
        let k = self.k;
        let a: Vec<Vec<u128>> = self
            .adjacency
            .iter()
            .map(|r| r.iter().map(|&b| b as u128).collect())
            .collect();
        let mut p = identity_u128(k);
        for _ in 0..n {
            p = mul_u128(&p, &a);
        }
        (0..k).map(|i| p[i][i]).sum()
    }

    /// Sum of all entries of `A^n`.
    pub fn entry_sum_power(&self, n: usize) -> u128 {
        let k = self.k;
        let a: Vec<Vec<u128>> = self
            .adjacency
            .iter()
            .map(|r| r.iter().map(|&b| b as u128).collect())
            .collect();
        let mut p = identity_u128(k);
        for _ in 0..n {
            p = mul_u128(&p, &a);
        }
        p.iter().flatten().sum()
    }

    /// Shortest admissible path of symbols strictly between `from` and `to`
    /// (so that `from, path.., to` is admissible). `None` if unreachable.
    fn bridge(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if self.allows(from, to) {
            return Some(Vec::new());
        }
        // parent[s] is None for symbols reached in one step from `from`
        let mut parent: Vec<Option<usize>> = vec![None; self.k];
        let mut seen = vec![false; self.k];
        let mut queue = VecDeque::new();
        for s in self.successors(from) {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(cur) = queue.pop_front() {
            if self.allows(cur, to) {
                let mut path = vec![cur];
                let mut node = cur;
                while let Some(p) = parent[node] {
                    path.push(p);
                    node = p;
                }
                path.reverse();
                return Some(path);
            }
            for s in self.successors(cur) {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = Some(cur);
                    queue.push_back(s);
                }
            }
        }
        None
    }

    /// A periodic point whose forward orbit starts with `word`: the word is
    /// closed up by a shortest admissible return path.
    pub fn periodic_extension(&self, word: &[usize]) -> Result<PeriodicPoint> {
        if word.is_empty() || !self.is_admissible(word) {
            return Err(invalid(format!("word {word:?} is not admissible")));
        }
        let bridge = self
            .bridge(*word.last().unwrap(), word[0])
            .ok_or_else(|| Error::UnsupportedInput(format!("word {word:?} cannot be closed into a cycle")))?;
        let mut cycle = word.to_vec();
        cycle.extend(bridge);
        Ok(PeriodicPoint::from_cycle(self.k, cycle))
    }

    /// Depth-first enumeration of admissible words of length `n` in
    /// lexicographic order, handed to `visit` one at a time.
    pub fn for_each_word<F: FnMut(&[usize])>(&self, n: usize, mut visit: F) -> Result<()> {
        if n == 0 {
            return Err(invalid("word length must be at least 1"));
        }
        if self.word_count(n) > MAX_ENUMERATION {
            return Err(Error::ResourceLimit(format!(
                "{} words of length {n} exceed the enumeration limit",
                self.word_count(n)
            )));
        }
        let mut buf = Vec::with_capacity(n);
        self.extend_words(&mut buf, n, &mut visit);
        Ok(())
    }

    fn extend_words<F: FnMut(&[usize])>(&self, buf: &mut Vec<usize>, n: usize, visit: &mut F) {
        if buf.len() == n {
            visit(buf);
            return;
        }
        let candidates: Vec<usize> = match buf.last() {
            None => (0..self.k).collect(),
            Some(&last) => self.successors(last).collect(),
        };
        for s in candidates {
            buf.push(s);
            self.extend_words(buf, n, visit);
            buf.pop();
        }
    }
}

fn identity_u128(k: usize) -> Vec<Vec<u128>> {
    (0..k)
        .map(|i| (0..k).map(|j| (i == j) as u128).collect())
        .collect()
}

fn mul_u128(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).fold(0u128, |acc, l| acc.saturating_add(a[i][l].saturating_mul(b[l][j]))))
                .collect()
        })
        .collect()
}

/// Smallest `m ≤ (k-1)^2 + 1` with `A^m > 0`; by Wielandt's bound no larger
/// exponent needs checking.
fn primitivity_exponent(adj: &[Vec<bool>]) -> Option<usize> {
    let k = adj.len();
    let bound = (k - 1) * (k - 1) + 1;
    let mut p = adj.to_vec();
    for m in 1..=bound {
        if p.iter().flatten().all(|&b| b) {
            return Some(m);
        }
        p = (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|l| p[i][l] && adj[l][j])).collect())
            .collect();
    }
    None
}

/// An admissible finite word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.0)
    }
}

fn write_symbols(f: &mut fmt::Formatter<'_>, symbols: &[usize]) -> fmt::Result {
    let wide = symbols.iter().any(|&s| s > 9);
    for (i, s) in symbols.iter().enumerate() {
        if wide && i > 0 {
            write!(f, ".")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// Renders a symbol sequence compactly (`0110`, or dot-separated when some
/// symbol has two digits).
pub fn format_symbols(symbols: &[usize]) -> String {
    struct S<'a>(&'a [usize]);
    impl fmt::Display for S<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_symbols(f, self.0)
        }
    }
    S(symbols).to_string()
}

/// The bi-infinite sequence repeating `cycle`, read from position `offset`.
///
/// `symbol(0)` is the current coordinate; shifting advances the offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    k: usize,
    cycle: Vec<usize>,
    offset: usize,
}

impl PeriodicPoint {
    fn from_cycle(k: usize, cycle: Vec<usize>) -> Self {
        Self {
            k,
            cycle,
            offset: 0,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    /// The repeating block, starting at the current coordinate.
    pub fn cycle(&self) -> Vec<usize> {
        (0..self.cycle.len()).map(|i| self.symbol(i as isize)).collect()
    }

    pub fn period_length(&self) -> usize {
        self.cycle.len()
    }

    /// Minimal period of the underlying sequence.
    pub fn minimal_period(&self) -> usize {
        let p = self.cycle.len();
        (1..=p)
            .find(|&d| p % d == 0 && (0..p).all(|i| self.cycle[i] == self.cycle[(i + d) % p]))
            .unwrap_or(p)
    }

    /// Coordinate `i` of the two-sided sequence.
    pub fn symbol(&self, i: isize) -> usize {
        let p = self.cycle.len() as isize;
        let idx = (self.offset as isize + i).rem_euclid(p);
        self.cycle[idx as usize]
    }

    /// The first `n` forward coordinates.
    pub fn forward(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.symbol(i as isize)).collect()
    }

    /// `σ^m` applied to the point.
    pub fn shifted(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.offset = (self.offset + m) % self.cycle.len();
        out
    }
}

impl fmt::Display for PeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        write_symbols(f, &self.cycle())?;
        write!(f, ")^inf")
    }
}

/// All admissible words of length `n`, in lexicographic order.
pub fn admissible_words(sft: &Sft, n: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    sft.for_each_word(n, |w| out.push(Word(w.to_vec())))?;
    Ok(out)
}

/// All admissible cycles of length `n` (the closing transition included),
/// in lexicographic order. Their number is `trace(A^n)`.
pub fn periodic_points(sft: &Sft, n: usize) -> Result<Vec<PeriodicPoint>> {
    let mut out = Vec::new();
    sft.for_each_word(n, |w| {
        if sft.allows(w[n - 1], w[0]) {
            out.push(PeriodicPoint::from_cycle(sft.k, w.to_vec()));
        }
    })?;
    Ok(out)
}

/// `β^{-n}` for the smallest `n ≥ 0` at which `x` and `y` disagree at
/// coordinate `n` or `-n`; zero when the sequences coincide.
pub fn d_beta(x: &PeriodicPoint, y: &PeriodicPoint, beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(invalid(format!("beta must exceed 1, got {beta}")));
    }
    if x.k != y.k {
        return Err(invalid(format!(
            "points over alphabets of size {} and {}",
            x.k, y.k
        )));
    }
    let p = x.period_length();
    let q = y.period_length();
    let horizon = p / gcd(p, q) * q;
    for n in 0..=horizon as isize {
        if x.symbol(n) != y.symbol(n) || x.symbol(-n) != y.symbol(-n) {
            return Ok(beta.powi(-(n as i32)));
        }
    }
    Ok(0.0)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
