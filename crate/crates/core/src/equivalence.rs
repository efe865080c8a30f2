//! Flow families and the equivalence pipeline: from a flow family `a_t` to
//! an additive representative `b`, through the induced discrete family, its
//! candidate generator and the roof lift, with defects measured at each stage.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::MatrixCocycle;
use crate::error::{invalid, Result};
use crate::numeric::fmt15;
use crate::potential::{
    cuneo_candidate, cylinder_samples, equivalence_defect_auto, LocallyConstantFunction, PotentialFamily,
};
use crate::suspension::{lift, orbit_integral, BumpProfile, FlowFunction, FlowPoint, SuspensionFlow};
use crate::symbolic::{format_symbols, PeriodicPoint};

/// Additivity class of a flow family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowFamilyClass {
    Additive,
    AlmostAdditive,
    Asymptotic,
}

/// A family `(a_t)_{t ≥ 0}` of functions on the suspension space.
pub trait FlowFamily: Send + Sync {
    /// `a_t(p)` for `t ≥ 0`.
    fn value(&self, flow: &SuspensionFlow, p: &FlowPoint, t: f64) -> Result<f64>;

    fn class(&self) -> FlowFamilyClass;

    /// The generating function, when the family is known to be additive.
    fn generator(&self) -> Option<&FlowFunction> {
        None
    }

    /// How many symbols beyond the `n` crossed ones `a_{τ_n(x)}(x)` reads.
    fn lookahead(&self, flow: &SuspensionFlow) -> usize {
        flow.roof().depth() - 1
    }

    fn name(&self) -> String;
}

/// `a_t = ∫_0^t b∘φ_s ds`.
#[derive(Debug, Clone)]
pub struct AdditiveFlowFamily {
    b: FlowFunction,
}

impl AdditiveFlowFamily {
    pub fn new(b: FlowFunction) -> Self {
        Self { b }
    }
}

impl FlowFamily for AdditiveFlowFamily {
    fn value(&self, flow: &SuspensionFlow, p: &FlowPoint, t: f64) -> Result<f64> {
        orbit_integral(flow, &self.b, p, t)
    }

    fn class(&self) -> FlowFamilyClass {
        FlowFamilyClass::Additive
    }

    fn generator(&self) -> Option<&FlowFunction> {
        Some(&self.b)
    }

    fn lookahead(&self, flow: &SuspensionFlow) -> usize {
        self.b.depth().max(flow.roof().depth()) - 1
    }

    fn name(&self) -> String {
        "additive".into()
    }
}

/// `a_t = rate · t`.
#[derive(Debug, Clone)]
pub struct LinearFlowFamily {
    rate: f64,
    generator: FlowFunction,
}

impl LinearFlowFamily {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            generator: FlowFunction::constant(rate),
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl FlowFamily for LinearFlowFamily {
    fn value(&self, _: &SuspensionFlow, _: &FlowPoint, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.rate * t)
    }

    fn class(&self) -> FlowFamilyClass {
        FlowFamilyClass::Additive
    }

    fn generator(&self) -> Option<&FlowFunction> {
        Some(&self.generator)
    }

    fn name(&self) -> String {
        format!("linear({})", fmt15(self.rate))
    }
}

/// The flow family of a matrix cocycle over the base: with
/// `L_n(x) = log ‖M^{(n)}(x)‖`, the potential `A(x, s)` interpolates linearly
/// between `L_n` and `L_{n+1}` during the `n`-th roof flight, and
/// `a_t(x, s) = A(x, s + t) − A(x, s)`.
#[derive(Debug, Clone)]
pub struct CocycleFlowFamily {
    cocycle: MatrixCocycle,
}

impl CocycleFlowFamily {
    pub fn new(cocycle: MatrixCocycle) -> Self {
        Self { cocycle }
    }

    pub fn cocycle(&self) -> &MatrixCocycle {
        &self.cocycle
    }

    /// `A(x, s)` for a base point `x` and any `s ≥ 0`.
    fn potential(&self, flow: &SuspensionFlow, x: &PeriodicPoint, s: f64) -> Result<f64> {
        let n = flow.crossings(x, s);
        let start = flow.tau_n(x, n);
        let top = flow.roof().at(&x.shifted(n));
        let frac = ((s - start) / top).clamp(0.0, 1.0);
        let w = x.forward(n + 1);
        let l_n = if n == 0 { 0.0 } else { self.cocycle.log_norm(&w, n)? };
        if frac == 0.0 {
            return Ok(l_n);
        }
        let l_next = self.cocycle.log_norm(&w, n + 1)?;
        Ok(l_n + frac * (l_next - l_n))
    }
}

impl FlowFamily for CocycleFlowFamily {
    fn value(&self, flow: &SuspensionFlow, p: &FlowPoint, t: f64) -> Result<f64> {
        check_time(t)?;
        check_symbols(flow, self.cocycle.symbols())?;
        Ok(self.potential(flow, &p.base, p.height + t)? - self.potential(flow, &p.base, p.height)?)
    }

    fn class(&self) -> FlowFamilyClass {
        if self.cocycle.is_positive() {
            FlowFamilyClass::AlmostAdditive
        } else {
            FlowFamilyClass::Asymptotic
        }
    }

    fn name(&self) -> String {
        format!("cocycle(d={}, symbols={})", self.cocycle.dim(), self.cocycle.symbols())
    }
}

/// `a_t = ∫_0^t b∘φ_s ds + ω(φ_t p) − ω(p)` with the continuous bounded
/// distortion `ω(x, s) = d(x) · sin²(π s / τ(x))`, `d ≥ 0`. The family stays
/// within `max d` of the additive family of `b`.
#[derive(Debug, Clone)]
pub struct BoundedDistortionFamily {
    b: FlowFunction,
    distortion: LocallyConstantFunction,
}

impl BoundedDistortionFamily {
    pub fn new(b: FlowFunction, distortion: LocallyConstantFunction) -> Result<Self> {
        if distortion.min() < 0.0 {
            return Err(invalid("distortion amplitudes must be nonnegative"));
        }
        Ok(Self { b, distortion })
    }

    /// `log C₂ − log C₁`: the width of the range of `ω`.
    pub fn envelope(&self) -> f64 {
        self.distortion.max()
    }

    fn omega(&self, flow: &SuspensionFlow, p: &FlowPoint) -> f64 {
        let w = p.base.forward(self.distortion.depth().max(flow.roof().depth()));
        let top = flow.roof().value(&w);
        self.distortion.value(&w) * (std::f64::consts::PI * p.height / top).sin().powi(2)
    }
}

impl FlowFamily for BoundedDistortionFamily {
    fn value(&self, flow: &SuspensionFlow, p: &FlowPoint, t: f64) -> Result<f64> {
        check_time(t)?;
        let end = flow.flow_map(p, t)?;
        Ok(orbit_integral(flow, &self.b, p, t)? + self.omega(flow, &end) - self.omega(flow, p))
    }

    fn class(&self) -> FlowFamilyClass {
        FlowFamilyClass::AlmostAdditive
    }

    fn generator(&self) -> Option<&FlowFunction> {
        Some(&self.b)
    }

    fn lookahead(&self, flow: &SuspensionFlow) -> usize {
        self.b
            .depth()
            .max(self.distortion.depth())
            .max(flow.roof().depth())
            - 1
    }

    fn name(&self) -> String {
        "bounded-distortion".into()
    }
}

type FlowEvaluator = Arc<dyn Fn(&SuspensionFlow, &FlowPoint, f64) -> Result<f64> + Send + Sync>;

/// A flow family given by an arbitrary evaluator.
#[derive(Clone)]
pub struct ClosureFlowFamily {
    class: FlowFamilyClass,
    lookahead: usize,
    name: String,
    f: FlowEvaluator,
}

impl fmt::Debug for ClosureFlowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureFlowFamily")
            .field("class", &self.class)
            .field("lookahead", &self.lookahead)
            .field("name", &self.name)
            .finish()
    }
}

impl ClosureFlowFamily {
    pub fn new<F>(name: impl Into<String>, class: FlowFamilyClass, lookahead: usize, f: F) -> Self
    where
        F: Fn(&SuspensionFlow, &FlowPoint, f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            class,
            lookahead,
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl FlowFamily for ClosureFlowFamily {
    fn value(&self, flow: &SuspensionFlow, p: &FlowPoint, t: f64) -> Result<f64> {
        check_time(t)?;
        (self.f)(flow, p, t)
    }

    fn class(&self) -> FlowFamilyClass {
        self.class
    }

    fn lookahead(&self, flow: &SuspensionFlow) -> usize {
        self.lookahead.max(flow.roof().depth() - 1)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("family time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

fn check_symbols(flow: &SuspensionFlow, symbols: usize) -> Result<()> {
    if symbols != flow.base().alphabet_size() {
        return Err(invalid(format!(
            "cocycle has {symbols} matrices for a {}-symbol base",
            flow.base().alphabet_size()
        )));
    }
    Ok(())
}

/// The discrete family `c_n(x) = a_{τ_n(x)}(x, 0)`.
pub fn induced_sequence(flow: &SuspensionFlow, a: Arc<dyn FlowFamily>) -> PotentialFamily {
    let lookahead = a.lookahead(flow);
    let class = a.class();
    let flow = flow.clone();
    let eval = move |w: &[usize], n: usize| -> Result<f64> {
        let x = flow.base().periodic_extension(w)?;
        let t = flow.tau_n(&x, n);
        a.value(&flow, &FlowPoint { base: x, height: 0.0 }, t)
    };
    match class {
        FlowFamilyClass::Asymptotic => PotentialFamily::asymptotic(lookahead, eval),
        FlowFamilyClass::Additive => PotentialFamily::almost_additive(Some(0.0), lookahead, eval),
        FlowFamilyClass::AlmostAdditive => PotentialFamily::almost_additive(None, lookahead, eval),
    }
}

/// Structured samples: every admissible `depth`-cylinder, realised as its
/// periodic extension, at `heights` equally spaced heights below the roof.
pub fn flow_samples(flow: &SuspensionFlow, depth: usize, heights: usize) -> Result<Vec<FlowPoint>> {
    if heights == 0 {
        return Err(invalid("at least one height per roof is required"));
    }
    let mut bases = Vec::new();
    let mut failure = None;
    flow.base().for_each_word(depth.max(1), |w| match flow.base().periodic_extension(w) {
        Ok(p) => bases.push(p),
        Err(e) => failure = failure.take().or(Some(e)),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(heights_over(flow, bases, heights))
}

fn heights_over(flow: &SuspensionFlow, bases: Vec<PeriodicPoint>, heights: usize) -> Vec<FlowPoint> {
    let mut out = Vec::with_capacity(bases.len() * heights);
    for x in bases {
        let top = flow.roof().at(&x);
        for j in 0..heights {
            out.push(FlowPoint {
                base: x.clone(),
                height: top * j as f64 / heights as f64,
            });
        }
    }
    out
}

fn check_curve_args(flow: &SuspensionFlow, times: &[f64], samples: &[FlowPoint]) -> Result<()> {
    if samples.is_empty() {
        return Err(invalid("no sample points"));
    }
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid("times must be positive and strictly increasing"));
    }
    let covered: BTreeSet<usize> = samples.iter().map(|p| p.base.symbol(0)).collect();
    if covered.len() < flow.base().alphabet_size() {
        return Err(invalid(format!(
            "samples cover {} of {} one-cylinders",
            covered.len(),
            flow.base().alphabet_size()
        )));
    }
    Ok(())
}

/// `(1/t) · max_p |a_t(p) − ∫_0^t b∘φ_s(p) ds|` over the samples, per time.
pub fn flow_defect(
    flow: &SuspensionFlow,
    a: &dyn FlowFamily,
    b: &FlowFunction,
    times: &[f64],
    samples: &[FlowPoint],
) -> Result<Vec<(f64, f64)>> {
    check_curve_args(flow, times, samples)?;
    times
        .iter()
        .map(|&t| {
            let worst = samples
                .par_iter()
                .map(|p| Ok((a.value(flow, p, t)? - orbit_integral(flow, b, p, t)?).abs()))
                .try_reduce(|| 0.0, |x, y| Ok(f64::max(x, y)))?;
            Ok((t, worst / t))
        })
        .collect()
}

/// `(1/t) · max_x |a_t(x) − a_{τ_n(x)}(x)|` over the base points of the
/// samples, with `n` the number of roof crossings before `t`.
pub fn crossing_defect(
    flow: &SuspensionFlow,
    a: &dyn FlowFamily,
    times: &[f64],
    samples: &[FlowPoint],
) -> Result<Vec<(f64, f64)>> {
    check_curve_args(flow, times, samples)?;
    let mut bases: Vec<&PeriodicPoint> = samples.iter().map(|p| &p.base).collect();
    bases.dedup();
    times
        .iter()
        .map(|&t| {
            let worst = bases
                .par_iter()
                .map(|x| {
                    let p = FlowPoint {
                        base: (*x).clone(),
                        height: 0.0,
                    };
                    let n = flow.crossings(x, t);
                    Ok((a.value(flow, &p, t)? - a.value(flow, &p, flow.tau_n(x, n))?).abs())
                })
                .try_reduce(|| 0.0, |u, v| Ok(f64::max(u, v)))?;
            Ok((t, worst / t))
        })
        .collect()
}

/// Settings of [`equivalence_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Level of the candidate generator.
    pub n: usize,
    /// Largest flow time; defaults to `64 · sup τ`.
    pub horizon: Option<f64>,
    pub profile: BumpProfile,
    /// Heights per roof flight in the sample grid.
    pub heights: usize,
    /// Cap on the number of base cylinders sampled.
    pub cylinder_budget: usize,
    /// Declared bound for the final flow defect.
    pub threshold: Option<f64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            n: 8,
            horizon: None,
            profile: BumpProfile::Smoothstep,
            heights: 8,
            cylinder_budget: 512,
            threshold: None,
        }
    }
}

/// One point of the discrete defect curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteDefect {
    pub n: usize,
    pub defect: f64,
    /// False when the value is a maximum over sampled cylinders only.
    pub exact: bool,
}

/// Outcome of [`equivalence_pipeline`].
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub family: String,
    pub n: usize,
    pub horizon: f64,
    pub profile: &'static str,
    pub xi_depth: usize,
    /// `(word, ξ(word))` over the admissible cylinders.
    pub xi: Vec<(String, f64)>,
    pub discrete_defect: Vec<DiscreteDefect>,
    pub flow_defect: Vec<(f64, f64)>,
    pub crossing_defect: Vec<(f64, f64)>,
    pub samples: usize,
    pub threshold: Option<f64>,
    pub success: Option<bool>,
    #[serde(skip)]
    pub b: FlowFunction,
}

impl EquivalenceReport {
    pub fn final_flow_defect(&self) -> f64 {
        self.flow_defect.last().map_or(f64::NAN, |p| p.1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn flow_defect_csv(&self) -> String {
        let mut out = String::from("t,flow_defect,crossing_defect\n");
        for ((t, d), (_, c)) in self.flow_defect.iter().zip(&self.crossing_defect) {
            out.push_str(&format!("{},{},{}\n", fmt15(*t), fmt15(*d), fmt15(*c)));
        }
        out
    }

    pub fn discrete_defect_csv(&self) -> String {
        let mut out = String::from("n,defect,exact\n");
        for d in &self.discrete_defect {
            out.push_str(&format!("{},{},{}\n", d.n, fmt15(d.defect), d.exact));
        }
        out
    }
}

/// Flow times `sup τ · 2^k` up to the horizon, ending exactly at it.
pub fn horizon_times(sup_tau: f64, horizon: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let mut t = sup_tau;
    while t < horizon * (1.0 - 1e-12) {
        times.push(t);
        t *= 2.0;
    }
    times.push(horizon);
    times
}

/// Runs the full chain `a ↦ c ↦ ξ = c_N/N ↦ b = lift(ξ)` and measures the
/// discrete defect of `ξ` against `c` and the flow defect of `b` against `a`.
///
/// Suprema are taken over structured samples and are lower bounds for the
/// true sup-norms; they are exact for locally constant and lifted data.
pub fn equivalence_pipeline(
    flow: &SuspensionFlow,
    a: Arc<dyn FlowFamily>,
    options: &PipelineOptions,
) -> Result<EquivalenceReport> {
    let sup_tau = flow.roof().sup();
    let horizon = options.horizon.unwrap_or(64.0 * sup_tau);
    if options.n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    if !(horizon > sup_tau) {
        return Err(invalid(format!("horizon {horizon} must exceed sup τ = {sup_tau}")));
    }
    let sft = flow.base();
    let c = induced_sequence(flow, a.clone());
    let xi = cuneo_candidate(sft, &c, options.n)?;
    let b = lift(flow, &xi, options.profile)?;

    let n_max = (horizon / flow.roof().inf()).floor() as usize;
    let base_samples = cylinder_samples(sft, options.cylinder_budget)?;
    let mut discrete_defect = Vec::new();
    let mut n = xi.depth();
    while n <= n_max.max(xi.depth()) {
        let (defect, exact) = equivalence_defect_auto(sft, &c, &xi, n, &base_samples)?;
        discrete_defect.push(DiscreteDefect { n, defect, exact });
        n *= 2;
    }

    let depth = xi.depth();
    let samples = if sft.word_count(depth) <= options.cylinder_budget as f64 {
        flow_samples(flow, depth, options.heights)?
    } else {
        heights_over(flow, base_samples, options.heights)
    };
    let times = horizon_times(sup_tau, horizon);
    let flow_curve = flow_defect(flow, a.as_ref(), &b, &times, &samples)?;
    let crossing_curve = crossing_defect(flow, a.as_ref(), &times, &samples)?;
    let final_defect = flow_curve.last().map_or(f64::NAN, |p| p.1);

    Ok(EquivalenceReport {
        family: a.name(),
        n: options.n,
        horizon,
        profile: options.profile.id(),
        xi_depth: xi.depth(),
        xi: xi.entries().map(|(w, v)| (format_symbols(&w), v)).collect(),
        discrete_defect,
        flow_defect: flow_curve,
        crossing_defect: crossing_curve,
        samples: samples.len(),
        threshold: options.threshold,
        success: options.threshold.map(|th| final_defect <= th),
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Sft;

    fn uneven() -> SuspensionFlow {
        SuspensionFlow::symbol_roof(Sft::full(2).unwrap(), &[1.0, 2.0]).unwrap()
    }

    #[test]
    fn induced_sequence_of_lift_is_birkhoff_sum() {
        let flow = uneven();
        let xi = LocallyConstantFunction::from_fn(flow.base(), 2, |w| 0.5 + w[0] as f64 - 0.3 * w[1] as f64).unwrap();
        let b = lift(&flow, &xi, BumpProfile::Smoothstep).unwrap();
        let c = induced_sequence(&flow, Arc::new(AdditiveFlowFamily::new(b)));
        let w = [0, 1, 1, 0, 1, 0];
        let direct: f64 = (0..5).map(|j| xi.value(&w[j..])).sum();
        assert!((c.value(&w, 5).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn induced_sequence_of_linear_family() {
        let flow = uneven();
        let c = induced_sequence(&flow, Arc::new(LinearFlowFamily::new(0.4)));
        assert!((c.value(&[1, 0, 1], 3).unwrap() - 0.4 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn induced_sequence_of_cocycle_matches_products() {
        let flow = uneven();
        let cocycle = MatrixCocycle::bundled_positive();
        let c = induced_sequence(&flow, Arc::new(CocycleFlowFamily::new(cocycle.clone())));
        let w = [1, 0, 0, 1, 1, 0, 1, 0, 0, 1];
        for n in 1..=10 {
            assert!((c.value(&w, n).unwrap() - cocycle.log_norm(&w, n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_family_against_zero() {
        let flow = uneven();
        let samples = flow_samples(&flow, 2, 8).unwrap();
        let curve = flow_defect(
            &flow,
            &LinearFlowFamily::new(1.0),
            &FlowFunction::constant(0.0),
            &[1.0, 3.0, 10.0],
            &samples,
        )
        .unwrap();
        for (_, d) in curve {
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flow_defect_argument_checks() {
        let flow = uneven();
        let a = LinearFlowFamily::new(1.0);
        let b = FlowFunction::constant(1.0);
        let samples = flow_samples(&flow, 1, 8).unwrap();
        assert!(flow_defect(&flow, &a, &b, &[1.0], &[]).is_err());
        assert!(flow_defect(&flow, &a, &b, &[2.0, 1.0], &samples).is_err());
        let only_zero: Vec<FlowPoint> = samples.iter().filter(|p| p.base.symbol(0) == 0).cloned().collect();
        assert!(flow_defect(&flow, &a, &b, &[1.0], &only_zero).is_err());
    }

    #[test]
    fn bounded_distortion_stays_in_envelope() {
        let flow = uneven();
        let xi = LocallyConstantFunction::from_fn(flow.base(), 1, |w| [0.3, -0.2][w[0]]).unwrap();
        let b = lift(&flow, &xi, BumpProfile::Smoothstep).unwrap();
        let d = LocallyConstantFunction::from_fn(flow.base(), 1, |w| [0.4, 0.9][w[0]]).unwrap();
        let fam = BoundedDistortionFamily::new(b.clone(), d).unwrap();
        let samples = flow_samples(&flow, 3, 8).unwrap();
        let times = [0.7, 2.0, 5.5, 16.0];
        for (t, v) in flow_defect(&flow, &fam, &b, &times, &samples).unwrap() {
            assert!(v <= fam.envelope() / t + 1e-12);
        }
    }

    #[test]
    fn pipeline_closes_on_lifted_family() {
        let flow = uneven();
        let xi0 = LocallyConstantFunction::from_fn(flow.base(), 1, |w| [0.8, -0.35][w[0]]).unwrap();
        let b0 = lift(&flow, &xi0, BumpProfile::Smoothstep).unwrap();
        let options = PipelineOptions {
            n: 1,
            threshold: Some(1e-8),
            ..PipelineOptions::default()
        };
        let report = equivalence_pipeline(&flow, Arc::new(AdditiveFlowFamily::new(b0)), &options).unwrap();
        assert!(report.flow_defect.iter().all(|(_, d)| *d < 1e-8));
        assert!(report.discrete_defect.iter().all(|d| d.defect < 1e-12));
        assert_eq!(report.success, Some(true));
        assert!(report.to_json().contains("\"profile\": \"smoothstep\""));
    }

    #[test]
    fn horizon_grid() {
        assert_eq!(horizon_times(2.0, 128.0), vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]);
        assert_eq!(horizon_times(2.0, 10.0), vec![2.0, 4.0, 8.0, 10.0]);
    }
}
