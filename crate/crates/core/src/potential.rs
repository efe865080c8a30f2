//! Discrete-time potentials: locally constant functions on cylinders and
//! (additive, almost additive, asymptotically additive) families of them.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::symbolic::{format_symbols, PeriodicPoint, Sft};

/// Tables larger than this (in `k^depth` slots) are refused.
const MAX_TABLE: usize = 1 << 26;

/// Word enumeration limit for exact sup-norm defects.
pub const DEFECT_ENUMERATION_LIMIT: f64 = 1.0e7;

/// A function on the shift space that depends only on the first `depth`
/// coordinates. Values are stored for every admissible `depth`-word.
#[derive(Clone, PartialEq)]
pub struct LocallyConstantFunction {
    k: usize,
    depth: usize,
    // dense table indexed by the base-k code of the word; NaN marks
    // inadmissible words
    table: Vec<f64>,
}

impl fmt::Debug for LocallyConstantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocallyConstantFunction")
            .field("k", &self.k)
            .field("depth", &self.depth)
            .field("entries", &self.entries().count())
            .finish()
    }
}

fn encode(k: usize, symbols: &[usize]) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * k + s)
}

fn decode(k: usize, depth: usize, mut code: usize) -> Vec<usize> {
    let mut out = vec![0; depth];
    for slot in out.iter_mut().rev() {
        *slot = code % k;
        code /= k;
    }
    out
}

impl LocallyConstantFunction {
    fn empty(sft: &Sft, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(invalid("depth must be at least 1"));
        }
        let k = sft.alphabet_size();
        let slots = (k as f64).powi(depth as i32);
        if slots > MAX_TABLE as f64 {
            return Err(Error::ResourceLimit(format!(
                "a depth-{depth} table over {k} symbols has {slots} slots"
            )));
        }
        Ok(Self {
            k,
            depth,
            table: vec![f64::NAN; k.pow(depth as u32)],
        })
    }

    /// Tabulates `f` on every admissible word of length `depth`.
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(sft: &Sft, depth: usize, mut f: F) -> Result<Self> {
        Self::try_from_fn(sft, depth, |w| Ok(f(w)))
    }

    pub fn try_from_fn<F: FnMut(&[usize]) -> Result<f64>>(
        sft: &Sft,
        depth: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut out = Self::empty(sft, depth)?;
        let mut failure = None;
        sft.for_each_word(depth, |w| {
            if failure.is_some() {
                return;
            }
            match f(w) {
                Ok(v) => out.table[encode(out.k, w)] = v,
                Err(e) => failure = Some(e),
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    pub fn constant(sft: &Sft, c: f64) -> Self {
        Self::from_fn(sft, 1, |_| c).expect("depth-1 table always fits")
    }

    /// Indicator of the 1-cylinder of `symbol`.
    pub fn indicator(sft: &Sft, symbol: usize) -> Self {
        Self::from_fn(sft, 1, |w| (w[0] == symbol) as u8 as f64).expect("depth-1 table")
    }

    /// Builds from explicit `(word, value)` pairs; every admissible word of
    /// length `depth` must be present exactly once.
    pub fn from_table<I>(sft: &Sft, depth: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut out = Self::empty(sft, depth)?;
        for (w, v) in entries {
            if w.len() != depth || !sft.is_admissible(&w) {
                return Err(invalid(format!(
                    "word {} is not an admissible word of length {depth}",
                    format_symbols(&w)
                )));
            }
            if !v.is_finite() {
                return Err(invalid(format!("value for {} is not finite", format_symbols(&w))));
            }
            let slot = &mut out.table[encode(out.k, &w)];
            if !slot.is_nan() {
                return Err(invalid(format!("word {} listed twice", format_symbols(&w))));
            }
            *slot = v;
        }
        let mut missing = None;
        sft.for_each_word(depth, |w| {
            if missing.is_none() && out.table[encode(out.k, w)].is_nan() {
                missing = Some(w.to_vec());
            }
        })?;
        if let Some(w) = missing {
            return Err(invalid(format!("no value for word {}", format_symbols(&w))));
        }
        Ok(out)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    /// Value on the cylinder named by the first `depth` symbols of `symbols`.
    ///
    /// Panics if fewer than `depth` symbols are supplied.
    pub fn value(&self, symbols: &[usize]) -> f64 {
        self.table[encode(self.k, &symbols[..self.depth])]
    }

    /// Like [`value`](Self::value) but `None` for short or inadmissible input.
    pub fn get(&self, symbols: &[usize]) -> Option<f64> {
        if symbols.len() < self.depth || symbols[..self.depth].iter().any(|&s| s >= self.k) {
            return None;
        }
        let v = self.value(symbols);
        (!v.is_nan()).then_some(v)
    }

    /// Value at a periodic point.
    pub fn at(&self, point: &PeriodicPoint) -> f64 {
        self.value(&point.forward(self.depth))
    }

    /// `(word, value)` pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .map(|(code, &v)| (decode(self.k, self.depth, code), v))
    }

    pub fn min(&self) -> f64 {
        self.entries().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries().map(|(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// The same function tabulated at a larger depth.
    pub fn refine(&self, sft: &Sft, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(invalid(format!(
                "cannot refine depth {} down to {depth}",
                self.depth
            )));
        }
        Self::from_fn(sft, depth, |w| self.value(w))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            k: self.k,
            depth: self.depth,
            table: self.table.iter().map(|&v| if v.is_nan() { v } else { f(v) }).collect(),
        }
    }

    /// `constant + Σ coeff·f` tabulated at the largest depth involved.
    pub fn linear_combination(
        sft: &Sft,
        terms: &[(f64, &LocallyConstantFunction)],
        constant: f64,
    ) -> Result<Self> {
        let depth = terms.iter().map(|(_, f)| f.depth).max().unwrap_or(1);
        Self::from_fn(sft, depth, |w| {
            constant + terms.iter().map(|(c, f)| c * f.value(w)).sum::<f64>()
        })
    }
}

/// Birkhoff sum `Σ_{j<n} f(σ^j w)` along a finite word.
pub fn birkhoff_sum(f: &LocallyConstantFunction, w: &[usize], n: usize) -> Result<f64> {
    let need = n + f.depth() - 1;
    if n == 0 {
        return Err(invalid("birkhoff sums need n ≥ 1"));
    }
    if w.len() < need {
        return Err(invalid(format!(
            "word of length {} is too short for {n} terms of a depth-{} function",
            w.len(),
            f.depth()
        )));
    }
    Ok((0..n).map(|j| f.value(&w[j..])).sum())
}

/// Additivity class of a family.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// Birkhoff sums of a locally constant generator.
    Additive(LocallyConstantFunction),
    /// Additive up to a uniform constant, when one is known.
    AlmostAdditive { claimed_constant: Option<f64> },
    Asymptotic,
}

type Evaluator = Arc<dyn Fn(&[usize], usize) -> Result<f64> + Send + Sync>;

/// A sequence `(f_n)` of functions evaluated on cylinders. `f_n` depends on
/// the first `n + lookahead` coordinates.
#[derive(Clone)]
pub struct PotentialFamily {
    kind: FamilyKind,
    lookahead: usize,
    eval: Evaluator,
}

impl fmt::Debug for PotentialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFamily")
            .field("kind", &self.kind)
            .field("lookahead", &self.lookahead)
            .finish_non_exhaustive()
    }
}

impl PotentialFamily {
    pub fn additive(generator: LocallyConstantFunction) -> Self {
        let g = generator.clone();
        Self {
            lookahead: generator.depth() - 1,
            kind: FamilyKind::Additive(generator),
            eval: Arc::new(move |w, n| birkhoff_sum(&g, w, n)),
        }
    }

    pub fn almost_additive<F>(claimed_constant: Option<f64>, lookahead: usize, f: F) -> Self
    where
        F: Fn(&[usize], usize) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            kind: FamilyKind::AlmostAdditive { claimed_constant },
            lookahead,
            eval: Arc::new(f),
        }
    }

    pub fn asymptotic<F>(lookahead: usize, f: F) -> Self
    where
        F: Fn(&[usize], usize) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            kind: FamilyKind::Asymptotic,
            lookahead,
            eval: Arc::new(f),
        }
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn lookahead(&self) -> usize {
        self.lookahead
    }

    /// Number of coordinates `f_n` reads.
    pub fn window(&self, n: usize) -> usize {
        n + self.lookahead
    }

    /// `f_n` on the cylinder named by the leading symbols of `w`.
    pub fn value(&self, w: &[usize], n: usize) -> Result<f64> {
        if n == 0 {
            return Err(invalid("family index n must be at least 1"));
        }
        if w.len() < self.window(n) {
            return Err(invalid(format!(
                "f_{n} needs {} symbols, got {}",
                self.window(n),
                w.len()
            )));
        }
        (self.eval)(w, n)
    }
}

/// `sup |f_{m+n}(x) − f_m(x) − f_n(σ^m x)|` over all admissible words and
/// all `m + n ≤ n_max`, by exhaustive enumeration. May be `+∞`.
pub fn almost_additivity_constant(sft: &Sft, fam: &PotentialFamily, n_max: usize) -> Result<f64> {
    if n_max < 2 {
        return Err(invalid("n_max must be at least 2"));
    }
    let mut worst: f64 = 0.0;
    for total in 2..=n_max {
        let mut failure = None;
        sft.for_each_word(fam.window(total), |w| {
            if failure.is_some() {
                return;
            }
            let res = (|| -> Result<f64> {
                let whole = fam.value(w, total)?;
                let mut local: f64 = 0.0;
                for m in 1..total {
                    let d = whole - fam.value(w, m)? - fam.value(&w[m..], total - m)?;
                    local = local.max(if d.is_nan() { f64::INFINITY } else { d.abs() });
                }
                Ok(local)
            })();
            match res {
                Ok(v) => worst = worst.max(v),
                Err(e) => failure = Some(e),
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(worst)
}

/// The depth-`N` candidate generator `x ↦ f_N(x)/N`.
pub fn cuneo_candidate(sft: &Sft, fam: &PotentialFamily, n: usize) -> Result<LocallyConstantFunction> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    LocallyConstantFunction::try_from_fn(sft, fam.window(n), |w| Ok(fam.value(w, n)? / n as f64))
}

fn defect_window(fam: &PotentialFamily, g: &LocallyConstantFunction, n: usize) -> usize {
    (n + g.depth() - 1).max(fam.window(n))
}

fn check_defect_args(g: &LocallyConstantFunction, n: usize) -> Result<()> {
    if n == 0 || n < g.depth() {
        return Err(invalid(format!(
            "defect index n = {n} must be at least the generator depth {}",
            g.depth()
        )));
    }
    Ok(())
}

/// `(1/n) · max |f_n − S_n g|` over every admissible cylinder of the needed
/// length. Exact for locally constant data.
pub fn equivalence_defect(
    sft: &Sft,
    fam: &PotentialFamily,
    g: &LocallyConstantFunction,
    n: usize,
) -> Result<f64> {
    check_defect_args(g, n)?;
    let len = defect_window(fam, g, n);
    let count = sft.word_count(len);
    if count > DEFECT_ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "{count} cylinders of length {len} exceed the defect enumeration limit"
        )));
    }
    let mut worst: f64 = 0.0;
    let mut failure = None;
    sft.for_each_word(len, |w| {
        if failure.is_some() {
            return;
        }
        match fam.value(w, n) {
            Ok(v) => {
                let s: f64 = (0..n).map(|j| g.value(&w[j..])).sum();
                worst = worst.max((v - s).abs());
            }
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(worst / n as f64),
    }
}

/// The defect maximised over the given periodic points only: a lower bound
/// for [`equivalence_defect`], used when enumeration is out of reach.
pub fn equivalence_defect_sampled(
    fam: &PotentialFamily,
    g: &LocallyConstantFunction,
    n: usize,
    samples: &[PeriodicPoint],
) -> Result<f64> {
    check_defect_args(g, n)?;
    if samples.is_empty() {
        return Err(invalid("no sample points"));
    }
    let len = defect_window(fam, g, n);
    let mut worst: f64 = 0.0;
    for p in samples {
        let w = p.forward(len);
        let s: f64 = (0..n).map(|j| g.value(&w[j..])).sum();
        worst = worst.max((fam.value(&w, n)? - s).abs());
    }
    Ok(worst / n as f64)
}

/// Deterministic sample of periodic points: the periodic extensions of all
/// admissible words of the longest length whose count stays within `budget`.
pub fn cylinder_samples(sft: &Sft, budget: usize) -> Result<Vec<PeriodicPoint>> {
    let mut len = 1;
    while len < 64 && sft.word_count(len + 1) <= budget as f64 {
        len += 1;
    }
    let mut out = Vec::new();
    let mut failure = None;
    sft.for_each_word(len, |w| match sft.periodic_extension(w) {
        Ok(p) => out.push(p),
        Err(e) => {
            if failure.is_none() {
                failure = Some(e)
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Defect computed exactly when the enumeration fits, otherwise on
/// [`cylinder_samples`]. The flag reports which.
pub fn equivalence_defect_auto(
    sft: &Sft,
    fam: &PotentialFamily,
    g: &LocallyConstantFunction,
    n: usize,
    samples: &[PeriodicPoint],
) -> Result<(f64, bool)> {
    let len = defect_window(fam, g, n);
    if sft.word_count(len) <= DEFECT_ENUMERATION_LIMIT.min(2.0e5) {
        Ok((equivalence_defect(sft, fam, g, n)?, true))
    } else {
        Ok((equivalence_defect_sampled(fam, g, n, samples)?, false))
    }
}

/// Renders `(n, defect)` pairs as CSV.
pub fn defect_trace_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("n,defect\n");
    for (n, d) in rows {
        out.push_str(&format!("{n},{}\n", crate::numeric::fmt15(*d)));
    }
    out
}
