//! Suspension flows over a shift of finite type under a locally constant
//! roof: the flow map, roof-flight integrals `I_g`, induced measures,
//! Abramov's entropy formula and flow pressure as a pressure root.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, numeric, Result};
use crate::numeric::{decreasing_root, simpson};
use crate::potential::LocallyConstantFunction;
use crate::symbolic::{format_symbols, PeriodicPoint, Sft};
use crate::transfer::{pressure, GibbsMarkovMeasure};

/// Quadrature panels per unit of roof height.
pub const PANELS_PER_UNIT: usize = 64;
/// Root tolerance for flow pressure and related pressure roots.
pub const ROOT_TOL: f64 = 1e-12;
/// Bracket expansions allowed before a pressure root is declared missing.
pub const MAX_BRACKET_EXPANSIONS: usize = 60;

/// A strictly positive locally constant roof.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofFunction {
    tau: LocallyConstantFunction,
    inf: f64,
    sup: f64,
}

impl RoofFunction {
    pub fn new(tau: LocallyConstantFunction) -> Result<Self> {
        let inf = tau.min();
        let sup = tau.max();
        if !(inf > 0.0) || !sup.is_finite() {
            return Err(invalid(format!("roof values must be positive and finite, got range [{inf}, {sup}]")));
        }
        Ok(Self { tau, inf, sup })
    }

    pub fn function(&self) -> &LocallyConstantFunction {
        &self.tau
    }

    pub fn depth(&self) -> usize {
        self.tau.depth()
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn value(&self, w: &[usize]) -> f64 {
        self.tau.value(w)
    }

    pub fn at(&self, x: &PeriodicPoint) -> f64 {
        self.tau.at(x)
    }
}

/// A point `(x, s)` of the suspension space with `0 ≤ s < τ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub base: PeriodicPoint,
    pub height: f64,
}

impl fmt::Display for FlowPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.base, self.height)
    }
}

/// The suspension of a shift of finite type under a roof.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspensionFlow {
    base: Sft,
    roof: RoofFunction,
}

impl SuspensionFlow {
    pub fn new(base: Sft, tau: LocallyConstantFunction) -> Result<Self> {
        if tau.alphabet_size() != base.alphabet_size() {
            return Err(invalid("roof and base use different alphabets"));
        }
        Ok(Self {
            base,
            roof: RoofFunction::new(tau)?,
        })
    }

    /// Suspension under a constant roof.
    pub fn constant_roof(base: Sft, height: f64) -> Result<Self> {
        let tau = LocallyConstantFunction::constant(&base, height);
        Self::new(base, tau)
    }

    /// Suspension under a roof depending on the current symbol only.
    pub fn symbol_roof(base: Sft, heights: &[f64]) -> Result<Self> {
        if heights.len() != base.alphabet_size() {
            return Err(invalid("one roof height per symbol is required"));
        }
        let tau = LocallyConstantFunction::from_fn(&base, 1, |w| heights[w[0]])?;
        Self::new(base, tau)
    }

    pub fn base(&self) -> &Sft {
        &self.base
    }

    pub fn roof(&self) -> &RoofFunction {
        &self.roof
    }

    /// `τ_n(x) = Σ_{k<n} τ(σ^k x)`.
    pub fn tau_n(&self, x: &PeriodicPoint, n: usize) -> f64 {
        let w = x.forward(n + self.roof.depth() - 1);
        (0..n).map(|j| self.roof.value(&w[j..])).sum()
    }

    /// Validated flow point.
    pub fn point(&self, base: PeriodicPoint, height: f64) -> Result<FlowPoint> {
        if base.alphabet_size() != self.base.alphabet_size() {
            return Err(invalid("point and flow use different alphabets"));
        }
        let top = self.roof.at(&base);
        if !(0.0..top).contains(&height) {
            return Err(invalid(format!("height {height} outside [0, {top})")));
        }
        Ok(FlowPoint { base, height })
    }

    /// `φ_t(x, s)`: raise the height by `t`, passing to `(σx, s − τ(x))` at
    /// each roof crossing.
    pub fn flow_map(&self, p: &FlowPoint, t: f64) -> Result<FlowPoint> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid(format!("flow time must be finite and nonnegative, got {t}")));
        }
        let mut x = p.base.clone();
        let mut s = p.height + t;
        loop {
            let r = self.roof.at(&x);
            if s < r {
                return Ok(FlowPoint { base: x, height: s });
            }
            s -= r;
            x = x.shifted(1);
        }
    }

    /// Number of roof crossings of the orbit of `(x, 0)` up to time `t`:
    /// the unique `n` with `τ_n(x) ≤ t < τ_{n+1}(x)`.
    pub fn crossings(&self, x: &PeriodicPoint, t: f64) -> usize {
        let mut n = 0;
        let mut acc = 0.0;
        let mut y = x.clone();
        loop {
            let r = self.roof.at(&y);
            if acc + r > t {
                return n;
            }
            acc += r;
            n += 1;
            y = y.shifted(1);
        }
    }
}

/// Nondecreasing `C¹` profiles on `[0, 1]` with `ψ(0) = 0`, `ψ(1) = 1` and
/// `ψ′(0) = ψ′(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpProfile {
    /// `3u² − 2u³`.
    #[default]
    Smoothstep,
    /// `6u⁵ − 15u⁴ + 10u³`.
    Smootherstep,
    /// `u − sin(2πu)/(2π)`.
    SineSquared,
}

impl BumpProfile {
    pub const ALL: [BumpProfile; 3] = [Self::Smoothstep, Self::Smootherstep, Self::SineSquared];

    pub fn id(&self) -> &'static str {
        match self {
            Self::Smoothstep => "smoothstep",
            Self::Smootherstep => "smootherstep",
            Self::SineSquared => "sine-squared",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.id() == id)
            .ok_or_else(|| invalid(format!("unknown bump profile '{id}'")))
    }

    pub fn psi(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Self::Smoothstep => u * u * (3.0 - 2.0 * u),
            Self::Smootherstep => u * u * u * (u * (6.0 * u - 15.0) + 10.0),
            Self::SineSquared => u - (2.0 * std::f64::consts::PI * u).sin() / (2.0 * std::f64::consts::PI),
        }
    }

    pub fn dpsi(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            Self::Smoothstep => 6.0 * u * (1.0 - u),
            Self::Smootherstep => 30.0 * u * u * (1.0 - u) * (1.0 - u),
            Self::SineSquared => 1.0 - (2.0 * std::f64::consts::PI * u).cos(),
        }
    }
}

type FlowClosure = Arc<dyn Fn(&[usize], f64) -> f64 + Send + Sync>;

/// A function on the suspension space.
#[derive(Clone)]
pub enum FlowFunction {
    /// `b(x, s) = ξ(x)/τ(x) · ψ′(s/τ(x))`, whose roof-flight integral is `ξ`.
    Lifted {
        xi: LocallyConstantFunction,
        profile: BumpProfile,
    },
    /// Values on a uniform height grid over each cylinder, linearly
    /// interpolated in the height.
    Sampled(SampledFlowFunction),
    /// An explicit formula in the cylinder word (of length `depth`) and the
    /// height.
    Formula { depth: usize, f: FlowClosure },
}

impl fmt::Debug for FlowFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lifted { xi, profile } => f
                .debug_struct("Lifted")
                .field("xi", xi)
                .field("profile", profile)
                .finish(),
            Self::Sampled(s) => f.debug_tuple("Sampled").field(s).finish(),
            Self::Formula { depth, .. } => f.debug_struct("Formula").field("depth", depth).finish(),
        }
    }
}

/// Tabulated flow function: for each admissible `depth`-word `w`, values at
/// heights `j·τ(w)/intervals` for `j = 0..=intervals`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFlowFunction {
    depth: usize,
    intervals: usize,
    rows: Vec<(Vec<usize>, Vec<f64>)>,
}

/// Serialized form of a sampled flow function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTable {
    pub depth: usize,
    pub rows: Vec<SampledRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRow {
    pub word: String,
    pub heights: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFlowFunction {
    /// Samples `f(w, s)` on `intervals + 1` equally spaced heights over each
    /// cylinder of length `depth` (at least the roof depth).
    pub fn sample<F: Fn(&[usize], f64) -> f64>(
        flow: &SuspensionFlow,
        depth: usize,
        intervals: usize,
        f: F,
    ) -> Result<Self> {
        if depth < flow.roof.depth() {
            return Err(invalid(format!(
                "sampling depth {depth} is below the roof depth {}",
                flow.roof.depth()
            )));
        }
        if intervals == 0 {
            return Err(invalid("at least one height interval is required"));
        }
        let mut rows = Vec::new();
        flow.base.for_each_word(depth, |w| {
            let top = flow.roof.value(w);
            let values = (0..=intervals)
                .map(|j| f(w, top * j as f64 / intervals as f64))
                .collect();
            rows.push((w.to_vec(), values));
        })?;
        Ok(Self {
            depth,
            intervals,
            rows,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    fn row(&self, w: &[usize]) -> &[f64] {
        let key = &w[..self.depth];
        let idx = self
            .rows
            .binary_search_by(|(word, _)| word.as_slice().cmp(key))
            .expect("admissible cylinder");
        &self.rows[idx].1
    }

    fn eval(&self, w: &[usize], s: f64, top: f64) -> f64 {
        let row = self.row(w);
        let pos = (s / top * self.intervals as f64).clamp(0.0, self.intervals as f64);
        let j = (pos.floor() as usize).min(self.intervals - 1);
        let frac = pos - j as f64;
        row[j] * (1.0 - frac) + row[j + 1] * frac
    }

    pub fn to_table(&self, flow: &SuspensionFlow) -> SampledTable {
        let rows = self
            .rows
            .iter()
            .map(|(w, values)| {
                let top = flow.roof.value(w);
                SampledRow {
                    word: format_symbols(w),
                    heights: (0..=self.intervals)
                        .map(|j| top * j as f64 / self.intervals as f64)
                        .collect(),
                    values: values.clone(),
                }
            })
            .collect();
        SampledTable {
            depth: self.depth,
            rows,
        }
    }

    /// Rebuilds a sampled function from its table. Every admissible cylinder
    /// must appear once, with a uniform grid matching the roof.
    pub fn from_table(flow: &SuspensionFlow, table: &SampledTable) -> Result<Self> {
        let k = flow.base.alphabet_size();
        let mut rows: Vec<(Vec<usize>, Vec<f64>)> = Vec::with_capacity(table.rows.len());
        let mut intervals = None;
        for row in &table.rows {
            let w = parse_word(&row.word, k)?;
            if w.len() != table.depth || !flow.base.is_admissible(&w) {
                return Err(invalid(format!("'{}' is not an admissible {}-word", row.word, table.depth)));
            }
            if row.values.len() < 2 || row.values.len() != row.heights.len() {
                return Err(invalid(format!("row '{}' has a malformed grid", row.word)));
            }
            let m = row.values.len() - 1;
            if *intervals.get_or_insert(m) != m {
                return Err(invalid("rows use different grid sizes"));
            }
            let top = flow.roof.value(&w);
            for (j, h) in row.heights.iter().enumerate() {
                if (h - top * j as f64 / m as f64).abs() > 1e-9 * top {
                    return Err(invalid(format!("row '{}' is not on a uniform roof grid", row.word)));
                }
            }
            rows.push((w, row.values.clone()));
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if rows.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(invalid("duplicate cylinder rows"));
        }
        let expected = flow.base.word_count(table.depth);
        if rows.len() as f64 != expected {
            return Err(invalid(format!("{} rows for {expected} cylinders", rows.len())));
        }
        Ok(Self {
            depth: table.depth,
            intervals: intervals.unwrap_or(1),
            rows,
        })
    }
}

fn parse_word(s: &str, k: usize) -> Result<Vec<usize>> {
    let parts: Vec<&str> = if s.contains(char::is_whitespace) || s.contains(',') {
        s.split(|c: char| c.is_whitespace() || c == ',').filter(|p| !p.is_empty()).collect()
    } else {
        s.split("").filter(|p| !p.is_empty()).collect()
    };
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .ok()
                .filter(|&v| v < k)
                .ok_or_else(|| invalid(format!("bad symbol '{p}' in word '{s}'")))
        })
        .collect()
}

impl FlowFunction {
    /// The constant function.
    pub fn constant(c: f64) -> Self {
        Self::Formula {
            depth: 1,
            f: Arc::new(move |_, _| c),
        }
    }

    pub fn formula<F>(depth: usize, f: F) -> Self
    where
        F: Fn(&[usize], f64) -> f64 + Send + Sync + 'static,
    {
        Self::Formula {
            depth: depth.max(1),
            f: Arc::new(f),
        }
    }

    /// Cylinder length the function reads.
    pub fn depth(&self) -> usize {
        match self {
            Self::Lifted { xi, .. } => xi.depth(),
            Self::Sampled(s) => s.depth,
            Self::Formula { depth, .. } => *depth,
        }
    }

    /// Value at height `s ∈ [0, τ(w)]` over the cylinder word `w`, which
    /// must be long enough for both the function and the roof.
    pub fn eval_on(&self, flow: &SuspensionFlow, w: &[usize], s: f64) -> f64 {
        match self {
            Self::Lifted { xi, profile } => {
                let top = flow.roof.value(w);
                xi.value(w) / top * profile.dpsi(s / top)
            }
            Self::Sampled(t) => t.eval(w, s, flow.roof.value(w)),
            Self::Formula { f, .. } => f(w, s),
        }
    }

    pub fn eval(&self, flow: &SuspensionFlow, p: &FlowPoint) -> f64 {
        let w = p.base.forward(self.depth().max(flow.roof.depth()));
        self.eval_on(flow, &w, p.height)
    }

    /// `∫_{s0}^{s1} g(w, s) ds` within one roof flight.
    pub fn segment_integral(&self, flow: &SuspensionFlow, w: &[usize], s0: f64, s1: f64) -> Result<f64> {
        if s1 <= s0 {
            return Ok(0.0);
        }
        match self {
            Self::Lifted { xi, profile } => {
                let top = flow.roof.value(w);
                Ok(xi.value(w) * (profile.psi(s1 / top) - profile.psi(s0 / top)))
            }
            Self::Sampled(t) => {
                // the trapezoid rule on grid-aligned pieces is exact for the
                // piecewise linear interpolant
                let top = flow.roof.value(w);
                let step = top / t.intervals as f64;
                let j0 = (s0 / step).floor() as usize;
                let j1 = ((s1 / step).ceil() as usize).min(t.intervals);
                let mut acc = 0.0;
                for j in j0..j1 {
                    let a = (j as f64 * step).max(s0);
                    let b = ((j + 1) as f64 * step).min(s1);
                    if b > a {
                        acc += 0.5 * (b - a) * (t.eval(w, a, top) + t.eval(w, b, top));
                    }
                }
                Ok(acc)
            }
            Self::Formula { f, .. } => {
                let panels = ((s1 - s0) * PANELS_PER_UNIT as f64).ceil() as usize;
                let panels = panels.max(PANELS_PER_UNIT);
                let h = (s1 - s0) / panels as f64;
                if !(h > 0.0) {
                    return Err(numeric("quadrature panel width underflowed"));
                }
                Ok(simpson(|s| f(w, s), s0, s1, panels))
            }
        }
    }
}

/// The roof-flight integral `I_g(w) = ∫_0^{τ(w)} g(w, s) ds`.
pub fn i_g(flow: &SuspensionFlow, g: &FlowFunction, w: &[usize]) -> Result<f64> {
    match g {
        FlowFunction::Lifted { xi, .. } => Ok(xi.value(w)),
        _ => g.segment_integral(flow, w, 0.0, flow.roof.value(w)),
    }
}

/// `I_g` as a locally constant function on the base.
pub fn i_g_function(flow: &SuspensionFlow, g: &FlowFunction) -> Result<LocallyConstantFunction> {
    if let FlowFunction::Lifted { xi, .. } = g {
        if xi.depth() >= flow.roof.depth() {
            return Ok(xi.clone());
        }
    }
    let depth = g.depth().max(flow.roof.depth());
    LocallyConstantFunction::try_from_fn(&flow.base, depth, |w| i_g(flow, g, w))
}

/// `∫_0^t g(φ_s p) ds`, integrating whole roof flights through `I_g` and the
/// partial flights at either end directly.
pub fn orbit_integral(flow: &SuspensionFlow, g: &FlowFunction, p: &FlowPoint, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("integration time must be nonnegative, got {t}")));
    }
    let depth = g.depth().max(flow.roof.depth());
    let mut x = p.base.clone();
    let mut s = p.height;
    let mut remaining = t;
    let mut acc = 0.0;
    while remaining > 0.0 {
        let w = x.forward(depth);
        let top = flow.roof.value(&w);
        let end = (s + remaining).min(top);
        acc += if s == 0.0 && end == top {
            i_g(flow, g, &w)?
        } else {
            g.segment_integral(flow, &w, s, end)?
        };
        remaining -= end - s;
        if end < top {
            break;
        }
        x = x.shifted(1);
        s = 0.0;
    }
    Ok(acc)
}

/// The flow-invariant measure induced by a base measure `ν`:
/// `∫ g dμ = ∫ I_g dν / ∫ τ dν`.
#[derive(Debug, Clone)]
pub struct InducedMeasure<'a> {
    flow: &'a SuspensionFlow,
    nu: &'a GibbsMarkovMeasure,
    mean_roof: f64,
}

impl InducedMeasure<'_> {
    pub fn mean_roof(&self) -> f64 {
        self.mean_roof
    }

    pub fn base_measure(&self) -> &GibbsMarkovMeasure {
        self.nu
    }

    pub fn integrate(&self, g: &FlowFunction) -> Result<f64> {
        let ig = i_g_function(self.flow, g)?;
        Ok(self.nu.integrate(&ig) / self.mean_roof)
    }

    /// Flow entropy by Abramov's formula.
    pub fn entropy(&self) -> f64 {
        self.nu.entropy() / self.mean_roof
    }
}

pub fn induce_measure<'a>(flow: &'a SuspensionFlow, nu: &'a GibbsMarkovMeasure) -> InducedMeasure<'a> {
    InducedMeasure {
        flow,
        nu,
        mean_roof: nu.integrate(flow.roof.function()),
    }
}

/// `h_ν(T) / ∫ τ dν`.
pub fn abramov_entropy(flow: &SuspensionFlow, nu: &GibbsMarkovMeasure) -> f64 {
    nu.entropy() / nu.integrate(flow.roof.function())
}

/// The unique `s` with `P(φ − s·ρ) = 0` for a strictly positive `ρ`.
pub fn pressure_root(sft: &Sft, phi: &LocallyConstantFunction, rho: &LocallyConstantFunction) -> Result<f64> {
    let rho_min = rho.min();
    if !(rho_min > 0.0) {
        return Err(invalid("the root weight must be strictly positive"));
    }
    let h_top = pressure(sft, &LocallyConstantFunction::constant(sft, 0.0))?;
    let guess = (phi.sup_norm() + h_top) / rho_min;
    let diff = |s: f64| -> Result<f64> {
        let psi = LocallyConstantFunction::linear_combination(sft, &[(1.0, phi), (-s, rho)], 0.0)?;
        pressure(sft, &psi)
    };
    decreasing_root(diff, -guess, guess, ROOT_TOL, MAX_BRACKET_EXPANSIONS)
}

/// Flow pressure of `g`: the root of `P(I_g − s·τ) = 0`.
pub fn flow_pressure(flow: &SuspensionFlow, g: &FlowFunction) -> Result<f64> {
    let ig = i_g_function(flow, g)?;
    pressure_root(&flow.base, &ig, flow.roof.function())
}

/// The lift `b(x, s) = ξ(x)/τ(x) · ψ′(s/τ(x))` with `I_b = ξ`.
pub fn lift(flow: &SuspensionFlow, xi: &LocallyConstantFunction, profile: BumpProfile) -> Result<FlowFunction> {
    if xi.alphabet_size() != flow.base.alphabet_size() {
        return Err(invalid("ξ and the flow use different alphabets"));
    }
    Ok(FlowFunction::Lifted {
        xi: xi.clone(),
        profile,
    })
}

/// A named suspension flow with an invariant base measure.
#[derive(Debug, Clone)]
pub struct FlowMeasurePair {
    pub name: &'static str,
    pub flow: SuspensionFlow,
    pub nu: GibbsMarkovMeasure,
}

/// Six reference pairs covering symbol and two-symbol roofs, Bernoulli,
/// Parry, Gibbs, higher-order Markov and periodic-orbit measures.
pub fn bundled_pairs() -> Vec<FlowMeasurePair> {
    let full2 = Sft::full(2).expect("full shift");
    let full3 = Sft::full(3).expect("full shift");
    let golden = Sft::golden_mean();
    let build = || -> Result<Vec<FlowMeasurePair>> {
        let uneven = SuspensionFlow::symbol_roof(full2.clone(), &[1.0, 2.0])?;
        let word_roof = LocallyConstantFunction::from_fn(&full2, 2, |w| [1.0, 1.5, 0.5, 2.0][2 * w[0] + w[1]])?;
        let gibbs_phi = LocallyConstantFunction::from_fn(&full2, 2, |w| 0.7 * w[0] as f64 - 0.4 * (w[0] * w[1]) as f64)?;
        let order_two = |w: &[usize], a: usize| 1.0 + w[0] as f64 + 0.5 * w[1] as f64 + 0.25 * a as f64;
        Ok(vec![
            FlowMeasurePair {
                name: "full2-roof12-bernoulli",
                flow: uneven.clone(),
                nu: GibbsMarkovMeasure::bernoulli(&full2, &[0.5, 0.5])?,
            },
            FlowMeasurePair {
                name: "golden-roof2-parry",
                flow: SuspensionFlow::constant_roof(golden.clone(), 2.0)?,
                nu: crate::transfer::gibbs_measure(&golden, &LocallyConstantFunction::constant(&golden, 0.0))?,
            },
            FlowMeasurePair {
                name: "full2-wordroof-gibbs",
                flow: SuspensionFlow::new(full2.clone(), word_roof)?,
                nu: crate::transfer::gibbs_measure(&full2, &gibbs_phi)?,
            },
            FlowMeasurePair {
                name: "full3-roof123-bernoulli",
                flow: SuspensionFlow::symbol_roof(full3.clone(), &[1.0, 2.0, 3.0])?,
                nu: GibbsMarkovMeasure::bernoulli(&full3, &[0.2, 0.3, 0.5])?,
            },
            FlowMeasurePair {
                name: "golden-roof-half-markov2",
                flow: SuspensionFlow::symbol_roof(golden.clone(), &[0.5, 1.5])?,
                nu: GibbsMarkovMeasure::from_kernel(&golden, 2, order_two)?,
            },
            FlowMeasurePair {
                name: "full2-roof12-orbit011",
                flow: uneven,
                nu: GibbsMarkovMeasure::periodic_orbit(&full2.periodic_point(vec![0, 1, 1])?)?,
            },
        ])
    };
    build().expect("bundled pairs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::gibbs_measure;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn full2() -> Sft {
        Sft::full(2).unwrap()
    }

    #[test]
    fn roof_must_be_positive() {
        let sft = full2();
        assert!(SuspensionFlow::symbol_roof(sft.clone(), &[1.0, 0.0]).is_err());
        assert!(SuspensionFlow::symbol_roof(sft, &[1.0, -2.0]).is_err());
    }

    #[test]
    fn unit_roof_flow_map() {
        let flow = SuspensionFlow::constant_roof(full2(), 1.0).unwrap();
        let x = flow.base().periodic_point(vec![0, 1, 1]).unwrap();
        let p = flow.point(x.clone(), 0.0).unwrap();
        let q = flow.flow_map(&p, 1.0).unwrap();
        assert_eq!(q.base, x.shifted(1));
        assert_eq!(q.height, 0.0);
        let q = flow.flow_map(&flow.point(x.clone(), 0.25).unwrap(), 0.5).unwrap();
        assert_eq!(q.base, x);
        assert_eq!(q.height, 0.75);
        assert!(flow.flow_map(&p, -1.0).is_err());
    }

    #[test]
    fn golden_mean_crossings() {
        let flow = SuspensionFlow::symbol_roof(Sft::golden_mean(), &[1.0, 2.0]).unwrap();
        let x = flow.base().periodic_point(vec![0, 1, 0]).unwrap();
        let q = flow.flow_map(&flow.point(x.clone(), 0.0).unwrap(), 3.5).unwrap();
        assert_eq!(q.base, x.shifted(2));
        assert!((q.height - 0.5).abs() < 1e-15);
        assert_eq!(flow.crossings(&x, 3.5), 2);
    }

    #[test]
    fn profiles_are_bumps() {
        for p in BumpProfile::ALL {
            assert_eq!(p.psi(0.0), 0.0);
            assert!((p.psi(1.0) - 1.0).abs() < 1e-15);
            assert!(p.dpsi(0.0).abs() < 1e-15 && p.dpsi(1.0).abs() < 1e-12);
            let area = simpson(|u| p.dpsi(u), 0.0, 1.0, 512);
            assert!((area - 1.0).abs() < 1e-10);
            assert_eq!(BumpProfile::from_id(p.id()).unwrap(), p);
        }
    }

    #[test]
    fn i_g_cases() {
        let flow = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.0]).unwrap();
        assert_eq!(i_g(&flow, &FlowFunction::constant(0.0), &[0]).unwrap(), 0.0);
        let height = FlowFunction::formula(1, |_, s| s);
        assert!((i_g(&flow, &height, &[1]).unwrap() - 2.0).abs() < 1e-9);
        let sampled = FlowFunction::Sampled(SampledFlowFunction::sample(&flow, 1, 8, |_, s| s).unwrap());
        assert!((i_g(&flow, &sampled, &[1]).unwrap() - 2.0).abs() < 1e-12);
        let xi = LocallyConstantFunction::from_fn(flow.base(), 2, |w| w[0] as f64 - 0.5 * w[1] as f64).unwrap();
        let b = lift(&flow, &xi, BumpProfile::Smoothstep).unwrap();
        assert_eq!(i_g(&flow, &b, &[1, 1]).unwrap(), 0.5);
    }

    #[test]
    fn lift_of_roof_is_smoothstep_density() {
        let flow = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.0]).unwrap();
        let b = lift(&flow, flow.roof().function(), BumpProfile::Smoothstep).unwrap();
        let u: f64 = 0.3;
        assert!((b.eval_on(&flow, &[1], 2.0 * u) - 6.0 * u * (1.0 - u)).abs() < 1e-15);
        let quad = simpson(|s| b.eval_on(&flow, &[1], s), 0.0, 2.0, 128);
        assert!((quad - 2.0).abs() < 1e-9);
    }

    #[test]
    fn birkhoff_roof_identity() {
        let flow = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.5]).unwrap();
        let xi = LocallyConstantFunction::from_fn(flow.base(), 2, |w| 0.7 * w[0] as f64 - 0.2 + 0.1 * w[1] as f64).unwrap();
        let b = lift(&flow, &xi, BumpProfile::Smootherstep).unwrap();
        let x = flow.base().periodic_point(vec![0, 1, 1, 0, 1]).unwrap();
        let n = 7;
        let w = x.forward(n + 1);
        let direct: f64 = (0..n).map(|j| xi.value(&w[j..])).sum();
        let along = orbit_integral(&flow, &b, &flow.point(x.clone(), 0.0).unwrap(), flow.tau_n(&x, n)).unwrap();
        assert!((direct - along).abs() < 1e-12);
    }

    #[test]
    fn induced_measure_example() {
        let flow = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.0]).unwrap();
        let nu = GibbsMarkovMeasure::bernoulli(flow.base(), &[0.5, 0.5]).unwrap();
        let mu = induce_measure(&flow, &nu);
        assert!((mu.integrate(&FlowFunction::constant(1.0)).unwrap() - 1.0).abs() < 1e-9);
        let ind1 = FlowFunction::formula(1, |w, _| (w[0] == 1) as u8 as f64);
        assert!((mu.integrate(&ind1).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn abramov_examples() {
        let sft = Sft::golden_mean();
        let parry = gibbs_measure(&sft, &LocallyConstantFunction::constant(&sft, 0.0)).unwrap();
        let flow = SuspensionFlow::constant_roof(sft.clone(), 2.0).unwrap();
        assert!((abramov_entropy(&flow, &parry) - GOLDEN.ln() / 2.0).abs() < 1e-12);
        let fixed = GibbsMarkovMeasure::periodic_orbit(&sft.periodic_point(vec![0]).unwrap()).unwrap();
        assert_eq!(abramov_entropy(&flow, &fixed), 0.0);
    }

    #[test]
    fn flow_pressure_examples() {
        let unit = SuspensionFlow::constant_roof(full2(), 1.0).unwrap();
        let p = flow_pressure(&unit, &FlowFunction::constant(0.0)).unwrap();
        assert!((p - 2f64.ln()).abs() < 1e-10);
        let p = flow_pressure(&unit, &FlowFunction::constant(0.75)).unwrap();
        assert!((p - 2f64.ln() - 0.75).abs() < 1e-9);
        let uneven = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.0]).unwrap();
        let p = flow_pressure(&uneven, &FlowFunction::constant(0.0)).unwrap();
        assert!((p - GOLDEN.ln()).abs() < 1e-10);
    }

    #[test]
    fn sampled_table_round_trip() {
        let flow = SuspensionFlow::symbol_roof(full2(), &[1.0, 2.0]).unwrap();
        let g = SampledFlowFunction::sample(&flow, 2, 4, |w, s| w[1] as f64 + s * s).unwrap();
        let table = g.to_table(&flow);
        let json = serde_json::to_string(&table).unwrap();
        let back: SampledTable = serde_json::from_str(&json).unwrap();
        assert_eq!(SampledFlowFunction::from_table(&flow, &back).unwrap(), g);
    }
}
