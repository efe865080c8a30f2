//! Time-one orbit averages of smooth flows on the line and the torus: the
//! averaging operator, the embedding equation `∫_0^1 b∘φ_s ds = b̃`, the
//! orbit-derivative obstruction, coboundary lifts and the resolvent
//! construction for uniquely ergodic time-one maps.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, numeric, Result};
use crate::numeric::simpson;

/// Frequencies with `|n·α − round(n·α)|` below this are resonant.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Multipliers smaller than this in modulus are treated as vanishing.
pub const DIVISOR_TOL: f64 = 1e-12;
/// Simpson panels per unit time for numerical orbit averages.
pub const AVERAGE_PANELS: usize = 64;
/// Finite-difference step for orbit derivatives of general functions.
pub const FD_STEP: f64 = 1e-6;
/// Times at which coboundary lifts are certified.
pub const CERTIFICATE_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const CERTIFICATE_TOL: f64 = 1e-7;
pub const RESOLVENT_TOL: f64 = 1e-10;
const CERTIFICATE_PANELS_PER_UNIT: usize = 1024;

/// The linear flow `x ↦ x + tα mod 1` on the `n`-torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusLinearFlow {
    alpha: Vec<f64>,
}

impl TorusLinearFlow {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|a| !a.is_finite()) {
            return Err(invalid("direction must be a non-empty finite vector"));
        }
        Ok(Self { alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `n·α`.
    pub fn frequency(&self, n: &[i64]) -> f64 {
        n.iter().zip(&self.alpha).map(|(&k, a)| k as f64 * a).sum()
    }

    /// The averaging multiplier `(e^{2πiθ} − 1)/(2πiθ)` at `θ = n·α`, and 1
    /// when `θ = 0`.
    pub fn multiplier(&self, n: &[i64]) -> Complex64 {
        multiplier(self.frequency(n))
    }

    /// Is `n·α` within [`RESONANCE_TOL`] of a nonzero integer?
    pub fn is_resonant(&self, n: &[i64]) -> bool {
        let theta = self.frequency(n);
        let r = theta.round();
        r != 0.0 && (theta - r).abs() <= RESONANCE_TOL
    }
}

/// `(e^{2πiθ} − 1)/(2πiθ) = e^{iπθ} · sin(πθ)/(πθ)`, stable near `θ = 0`.
pub fn multiplier(theta: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let x = PI * theta;
    Complex64::from_polar(x.sin() / x, x)
}

/// The flow `x ↦ e^t x` on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarExpFlow {
    PositiveHalfLine,
    RealLine,
}

/// The flows the lab works with.
#[derive(Debug, Clone, PartialEq)]
pub enum RealFlow {
    Torus(TorusLinearFlow),
    Exp(ScalarExpFlow),
}

impl RealFlow {
    pub fn dim(&self) -> usize {
        match self {
            Self::Torus(f) => f.dim(),
            Self::Exp(_) => 1,
        }
    }

    /// `φ_t(x)` for any real `t`.
    pub fn apply(&self, x: &[f64], t: f64) -> Vec<f64> {
        match self {
            Self::Torus(f) => x
                .iter()
                .zip(&f.alpha)
                .map(|(xi, a)| (xi + t * a).rem_euclid(1.0))
                .collect(),
            Self::Exp(_) => x.iter().map(|xi| t.exp() * xi).collect(),
        }
    }
}

/// A real trigonometric polynomial `Σ c_n e^{2πi n·x}` with `c_{−n} = conj(c_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

/// One stored coefficient, for serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigTerm {
    pub frequency: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl Serialize for TrigPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms().serialize(s)
    }
}

fn negate(n: &[i64]) -> Vec<i64> {
    n.iter().map(|k| -k).collect()
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_mode(&vec![0; dim], Complex64::new(c, 0.0)).expect("zero frequency");
        p
    }

    /// `amp · cos(2π n·x)`.
    pub fn cosine(n: &[i64], amp: f64) -> Self {
        let mut p = Self::zero(n.len());
        if n.iter().all(|&k| k == 0) {
            return Self::constant(n.len(), amp);
        }
        p.add_mode(n, Complex64::new(amp / 2.0, 0.0)).expect("valid mode");
        p
    }

    /// `amp · sin(2π n·x)`.
    pub fn sine(n: &[i64], amp: f64) -> Self {
        let mut p = Self::zero(n.len());
        if n.iter().all(|&k| k == 0) {
            return p;
        }
        p.add_mode(n, Complex64::new(0.0, -amp / 2.0)).expect("valid mode");
        p
    }

    /// Builds a polynomial from explicit coefficients, which must be
    /// conjugate-symmetric to within `1e-12`.
    pub fn from_coefficients(dim: usize, coeffs: BTreeMap<Vec<i64>, Complex64>) -> Result<Self> {
        for (n, c) in &coeffs {
            if n.len() != dim {
                return Err(invalid(format!("frequency {n:?} does not have {dim} components")));
            }
            let partner = coeffs.get(&negate(n)).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > 1e-12 * (1.0 + c.norm()) {
                return Err(invalid(format!(
                    "coefficients at {n:?} and its negative are not conjugate"
                )));
            }
        }
        let mut p = Self { dim, coeffs };
        p.prune();
        Ok(p)
    }

    /// Adds `c e^{2πi n·x} + conj(c) e^{−2πi n·x}` (or just the real part of
    /// `c` at `n = 0`).
    pub fn add_mode(&mut self, n: &[i64], c: Complex64) -> Result<()> {
        if n.len() != self.dim {
            return Err(invalid(format!("frequency {n:?} does not have {} components", self.dim)));
        }
        if n.iter().all(|&k| k == 0) {
            *self.coeffs.entry(n.to_vec()).or_default() += Complex64::new(c.re, 0.0);
        } else {
            *self.coeffs.entry(n.to_vec()).or_default() += c;
            *self.coeffs.entry(negate(n)).or_default() += c.conj();
        }
        self.prune();
        Ok(())
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficient(&self, n: &[i64]) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.coeffs
    }

    pub fn terms(&self) -> Vec<TrigTerm> {
        self.coeffs
            .iter()
            .map(|(n, c)| TrigTerm {
                frequency: n.clone(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    /// The mean `c_0`.
    pub fn mean(&self) -> f64 {
        self.coefficient(&vec![0; self.dim]).re
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(n, c)| {
                let phase: f64 = n.iter().zip(x).map(|(&k, xi)| k as f64 * xi).sum();
                (c * Complex64::from_polar(1.0, 2.0 * PI * phase)).re
            })
            .sum()
    }

    /// Applies a multiplier to every coefficient.
    pub fn map_coefficients<F: Fn(&[i64], Complex64) -> Complex64>(&self, f: F) -> Self {
        let mut p = Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(n, c)| (n.clone(), f(n, *c))).collect(),
        };
        p.prune();
        p
    }

    /// Largest coefficientwise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|n| (self.coefficient(n) - other.coefficient(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Orbit derivative `d/dt f(x + tα)|_{t=0}`.
    pub fn derivative_along(&self, flow: &TorusLinearFlow) -> Self {
        self.map_coefficients(|n, c| c * Complex64::new(0.0, 2.0 * PI * flow.frequency(n)))
    }
}

/// `constant + log_coeff · log x + Σ c_d x^d` on the line; `log` and
/// negative powers need the positive half-line.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExpObservable {
    pub constant: f64,
    pub log_coeff: f64,
    pub powers: BTreeMap<i32, f64>,
}

impl ExpObservable {
    pub fn log() -> Self {
        Self {
            log_coeff: 1.0,
            ..Self::default()
        }
    }

    /// `c x^d` for `d ≠ 0`.
    pub fn monomial(d: i32, c: f64) -> Self {
        let mut powers = BTreeMap::new();
        if d == 0 {
            return Self {
                constant: c,
                ..Self::default()
            };
        }
        powers.insert(d, c);
        Self {
            powers,
            ..Self::default()
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.constant;
        if self.log_coeff != 0.0 {
            v += self.log_coeff * x.ln();
        }
        v + self.powers.iter().map(|(&d, c)| c * x.powi(d)).sum::<f64>()
    }

    fn check_domain(&self, flow: ScalarExpFlow) -> Result<()> {
        let needs_half_line = self.log_coeff != 0.0 || self.powers.keys().any(|&d| d < 0);
        if needs_half_line && flow == ScalarExpFlow::RealLine {
            return Err(invalid("log and negative powers need the positive half-line"));
        }
        Ok(())
    }

    /// `∫_0^1 f(e^s x) ds`: `log x ↦ log x + 1/2`, `x^d ↦ x^d (e^d − 1)/d`.
    pub fn average(&self) -> Self {
        Self {
            constant: self.constant + 0.5 * self.log_coeff,
            log_coeff: self.log_coeff,
            powers: self
                .powers
                .iter()
                .map(|(&d, c)| (d, c * (d as f64).exp_m1() / d as f64))
                .collect(),
        }
    }

    /// Orbit derivative `x f′(x)`: `log x ↦ 1`, `x^d ↦ d x^d`.
    pub fn orbit_derivative(&self) -> Self {
        Self {
            constant: self.log_coeff,
            log_coeff: 0.0,
            powers: self.powers.iter().map(|(&d, c)| (d, c * d as f64)).collect(),
        }
    }
}

type RealFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on the phase space of a [`RealFlow`].
#[derive(Clone)]
pub enum Observable {
    Trig(TrigPolynomial),
    Exp(ExpObservable),
    Function(RealFn),
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trig(p) => f.debug_tuple("Trig").field(p).finish(),
            Self::Exp(e) => f.debug_tuple("Exp").field(e).finish(),
            Self::Function(_) => f.write_str("Function"),
        }
    }
}

impl Observable {
    pub fn function<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Trig(p) => p.eval(x),
            Self::Exp(e) => e.eval(x[0]),
            Self::Function(f) => f(x),
        }
    }
}

/// The time-one average `𝓛f = ∫_0^1 f∘φ_s ds`: coefficientwise for
/// trigonometric polynomials on torus flows, in closed form for exponential
/// observables, by Simpson quadrature otherwise.
pub fn average_operator(flow: &RealFlow, f: &Observable) -> Result<Observable> {
    match (flow, f) {
        (RealFlow::Torus(t), Observable::Trig(p)) => {
            check_dim(t, p)?;
            Ok(Observable::Trig(p.map_coefficients(|n, c| c * t.multiplier(n))))
        }
        (RealFlow::Exp(e), Observable::Exp(g)) => {
            g.check_domain(*e)?;
            Ok(Observable::Exp(g.average()))
        }
        _ => {
            let flow = flow.clone();
            let f = f.clone();
            Ok(Observable::function(move |x| {
                simpson(|s| f.eval(&flow.apply(x, s)), 0.0, 1.0, AVERAGE_PANELS)
            }))
        }
    }
}

fn check_dim(flow: &TorusLinearFlow, p: &TrigPolynomial) -> Result<()> {
    if flow.dim() != p.dim() {
        return Err(invalid(format!(
            "polynomial on T^{} for a flow on T^{}",
            p.dim(),
            flow.dim()
        )));
    }
    Ok(())
}

/// Why the embedding equation has no trigonometric solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    /// Active frequencies with `n·α` a nonzero integer.
    pub resonant: Vec<Vec<i64>>,
    /// Other active frequencies whose multiplier nearly vanishes.
    pub small_divisors: Vec<(Vec<i64>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EmbeddingOutcome {
    Solved {
        b: TrigPolynomial,
        /// Coefficientwise distance between `𝓛b` and `b̃`.
        round_trip_error: f64,
    },
    Obstructed(ObstructionReport),
}

/// Solves `𝓛b = b̃` coefficientwise, `b_n = b̃_n / m_n`.
pub fn solve_embedding(flow: &TorusLinearFlow, btilde: &TrigPolynomial) -> Result<EmbeddingOutcome> {
    check_dim(flow, btilde)?;
    let mut report = ObstructionReport {
        resonant: Vec::new(),
        small_divisors: Vec::new(),
    };
    for n in btilde.coefficients().keys() {
        if flow.is_resonant(n) {
            report.resonant.push(n.clone());
        } else {
            let m = flow.multiplier(n).norm();
            if m <= DIVISOR_TOL {
                report.small_divisors.push((n.clone(), m));
            }
        }
    }
    if !report.resonant.is_empty() || !report.small_divisors.is_empty() {
        return Ok(EmbeddingOutcome::Obstructed(report));
    }
    let b = btilde.map_coefficients(|n, c| c / flow.multiplier(n));
    let image = b.map_coefficients(|n, c| c * flow.multiplier(n));
    Ok(EmbeddingOutcome::Solved {
        round_trip_error: image.distance(btilde),
        b,
    })
}

/// Orbit-derivative estimate at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSample {
    pub point: Vec<f64>,
    pub derivative: f64,
    pub converged: bool,
}

/// Outcome of the orbit-derivative test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BbpReport {
    pub samples: Vec<DerivativeSample>,
    pub excluded: usize,
    /// Mean of the derivative over the samples (the uniform measure for
    /// sample grids on the torus).
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Some derivative estimates did not settle across the step grid.
    pub inconclusive: bool,
    /// Set when the mean is decisively nonzero: no continuous `b` can have
    /// `b̃` as its time-one average.
    pub obstruction: Option<String>,
}

/// Settings of [`bbp_test`].
#[derive(Debug, Clone)]
pub struct BbpOptions {
    /// Decreasing finite-difference steps.
    pub steps: Vec<f64>,
    /// Agreement required between the last two extrapolated estimates.
    pub convergence_tol: f64,
    /// A mean above this in modulus is an obstruction.
    pub zero_tol: f64,
}

impl Default for BbpOptions {
    fn default() -> Self {
        Self {
            steps: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            convergence_tol: 1e-6,
            zero_tol: 1e-6,
        }
    }
}

/// Estimates `lim_{t→0} (b̃(φ_t x) − b̃(x))/t` at each sample by central
/// differences over the step grid with Richardson extrapolation. Samples
/// for which `exclude` holds (discontinuity loci) are skipped. An invariant
/// measure must give this derivative mean zero whenever `b̃` is a time-one
/// average of a continuous function.
pub fn bbp_test(
    flow: &RealFlow,
    btilde: &Observable,
    samples: &[Vec<f64>],
    exclude: Option<&dyn Fn(&[f64]) -> bool>,
    options: &BbpOptions,
) -> Result<BbpReport> {
    let steps = &options.steps;
    if steps.len() < 2 || steps.iter().any(|h| !(*h > 0.0)) || steps.windows(2).any(|p| p[1] >= p[0]) {
        return Err(invalid("at least two positive decreasing steps are required"));
    }
    let mut out = Vec::new();
    let mut excluded = 0;
    for x in samples {
        if x.len() != flow.dim() {
            return Err(invalid(format!("sample {x:?} has the wrong dimension")));
        }
        if exclude.is_some_and(|e| e(x)) {
            excluded += 1;
            continue;
        }
        let central: Vec<f64> = steps
            .iter()
            .map(|&h| (btilde.eval(&flow.apply(x, h)) - btilde.eval(&flow.apply(x, -h))) / (2.0 * h))
            .collect();
        let extrapolated: Vec<f64> = steps
            .windows(2)
            .zip(central.windows(2))
            .map(|(h, d)| {
                let r2 = (h[0] / h[1]).powi(2);
                (r2 * d[1] - d[0]) / (r2 - 1.0)
            })
            .collect();
        let last = extrapolated[extrapolated.len() - 1];
        let converged = if extrapolated.len() >= 2 {
            let prev = extrapolated[extrapolated.len() - 2];
            (last - prev).abs() <= options.convergence_tol * (1.0 + last.abs())
        } else {
            (last - central[central.len() - 1]).abs() <= options.convergence_tol * (1.0 + last.abs())
        };
        out.push(DerivativeSample {
            point: x.clone(),
            derivative: last,
            converged,
        });
    }
    if out.is_empty() {
        return Err(invalid("every sample was excluded"));
    }
    let mean = out.iter().map(|s| s.derivative).sum::<f64>() / out.len() as f64;
    let min = out.iter().map(|s| s.derivative).fold(f64::INFINITY, f64::min);
    let max = out.iter().map(|s| s.derivative).fold(f64::NEG_INFINITY, f64::max);
    let inconclusive = out.iter().any(|s| !s.converged);
    let obstruction = (!inconclusive && mean.abs() > options.zero_tol)
        .then(|| format!("derivative ≈ {mean:.15} has nonzero mean"));
    Ok(BbpReport {
        samples: out,
        excluded,
        mean,
        min,
        max,
        inconclusive,
        obstruction,
    })
}

/// Worst residual of `∫_0^t b∘φ_s ds = g∘φ_t − g` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateRow {
    pub t: f64,
    pub max_residual: f64,
}

/// A function `b` with `∫_0^t b∘φ_s ds = g∘φ_t − g`, and the residuals
/// that certify it.
#[derive(Debug, Clone)]
pub struct CoboundaryLift {
    pub b: Observable,
    pub certificate: Vec<CertificateRow>,
}

impl CoboundaryLift {
    pub fn worst_residual(&self) -> f64 {
        self.certificate.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

/// The orbit derivative `b(x) = d/ds g(φ_s x)|_{s=0}`, analytic for
/// trigonometric and exponential observables and by central differences of
/// step [`FD_STEP`] otherwise, certified at [`CERTIFICATE_TIMES`].
pub fn coboundary_lift(flow: &RealFlow, g: &Observable, samples: &[Vec<f64>]) -> Result<CoboundaryLift> {
    let b = match (flow, g) {
        (RealFlow::Torus(t), Observable::Trig(p)) => {
            check_dim(t, p)?;
            Observable::Trig(p.derivative_along(t))
        }
        (RealFlow::Exp(e), Observable::Exp(o)) => {
            o.check_domain(*e)?;
            Observable::Exp(o.orbit_derivative())
        }
        _ => finite_difference_derivative(flow, g, FD_STEP),
    };
    let lift = certify(flow, b, g, samples)?;
    let worst = lift.worst_residual();
    if !(worst <= CERTIFICATE_TOL) {
        return Err(numeric(format!("coboundary certificate failed with residual {worst:e}")));
    }
    Ok(lift)
}

/// Central-difference orbit derivative of `g` with step `h`.
pub fn finite_difference_derivative(flow: &RealFlow, g: &Observable, h: f64) -> Observable {
    let flow = flow.clone();
    let g = g.clone();
    Observable::function(move |x| (g.eval(&flow.apply(x, h)) - g.eval(&flow.apply(x, -h))) / (2.0 * h))
}

/// Residuals of `∫_0^t b∘φ_s ds = g∘φ_t − g` over the samples, relative to
/// the size of the increment once it exceeds 1.
pub fn certify(flow: &RealFlow, b: Observable, g: &Observable, samples: &[Vec<f64>]) -> Result<CoboundaryLift> {
    if samples.is_empty() {
        return Err(invalid("no sample points"));
    }
    let certificate = CERTIFICATE_TIMES
        .iter()
        .map(|&t| {
            let panels = CERTIFICATE_PANELS_PER_UNIT * t.ceil() as usize;
            let max_residual = samples
                .iter()
                .map(|x| {
                    let lhs = simpson(|s| b.eval(&flow.apply(x, s)), 0.0, t, panels);
                    let rhs = g.eval(&flow.apply(x, t)) - g.eval(x);
                    (lhs - rhs).abs() / rhs.abs().max(1.0)
                })
                .fold(0.0, f64::max);
            CertificateRow { t, max_residual }
        })
        .collect();
    Ok(CoboundaryLift { b, certificate })
}

/// Solution of `𝓛a − λa = b` and the centred function `c = a − λ∫a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSolution {
    pub lambda: f64,
    pub a: TrigPolynomial,
    pub c: TrigPolynomial,
    /// Coefficientwise residual of the defining identity.
    pub residual: f64,
}

/// Solves `∫_0^1 a∘φ_s ds − λa = b` on the circle by `a_n = b_n/(m_n − λ)`.
pub fn resolvent_solve(flow: &TorusLinearFlow, b: &TrigPolynomial, lambda: f64) -> Result<ResolventSolution> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(invalid(format!("λ must exceed 1, got {lambda}")));
    }
    if flow.dim() != 1 {
        return Err(invalid("the resolvent construction is for circle rotations"));
    }
    check_dim(flow, b)?;
    let a = b.map_coefficients(|n, c| c / (flow.multiplier(n) - lambda));
    let image = a.map_coefficients(|n, c| c * (flow.multiplier(n) - lambda));
    let residual = image.distance(b);
    if !(residual <= RESOLVENT_TOL) {
        return Err(numeric(format!("resolvent residual {residual:e} exceeds tolerance")));
    }
    let mut c = a.clone();
    c.add_mode(&[0], Complex64::new(-lambda * a.mean(), 0.0))?;
    Ok(ResolventSolution {
        lambda,
        a,
        c,
        residual,
    })
}

/// A uniform grid with `per_axis` points per coordinate on `[0, 1)^dim`,
/// offset by half a cell.
pub fn torus_grid(dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |i| {
                    let mut q = p.clone();
                    q.push((i as f64 + 0.5) / per_axis as f64);
                    q
                })
            })
            .collect();
    }
    out
}

/// Sawtooth `(Σ x_i) mod 1`.
pub fn sawtooth(x: &[f64]) -> f64 {
    x.iter().sum::<f64>().rem_euclid(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ce1() -> TorusLinearFlow {
        TorusLinearFlow::new(vec![2f64.sqrt() - 1.0, (3f64.sqrt() - 1.0) / 4.0]).unwrap()
    }

    #[test]
    fn multiplier_limits() {
        assert_eq!(multiplier(0.0), Complex64::new(1.0, 0.0));
        assert!(multiplier(1.0).norm() < 1e-15);
        let th: f64 = 0.3;
        let direct = (Complex64::new(0.0, 2.0 * PI * th).exp() - 1.0) / Complex64::new(0.0, 2.0 * PI * th);
        assert!((multiplier(th) - direct).norm() < 1e-15);
    }

    #[test]
    fn exa_and_exb_closed_forms() {
        let half = RealFlow::Exp(ScalarExpFlow::PositiveHalfLine);
        let Observable::Exp(avg) = average_operator(&half, &Observable::Exp(ExpObservable::log())).unwrap() else {
            panic!("analytic average expected");
        };
        assert_eq!(avg.constant, 0.5);
        assert_eq!(avg.log_coeff, 1.0);
        let line = RealFlow::Exp(ScalarExpFlow::RealLine);
        let Observable::Exp(avg) = average_operator(&line, &Observable::Exp(ExpObservable::monomial(3, 2.0))).unwrap() else {
            panic!("analytic average expected");
        };
        assert!((avg.powers[&3] - 2.0 * (3f64.exp() - 1.0) / 3.0).abs() < 1e-12);
        assert!(average_operator(&line, &Observable::Exp(ExpObservable::log())).is_err());
    }

    #[test]
    fn numeric_average_agrees_with_closed_form() {
        let flow = RealFlow::Exp(ScalarExpFlow::PositiveHalfLine);
        let f = Observable::function(|x| x[0].ln());
        let avg = average_operator(&flow, &f).unwrap();
        for x in [0.3, 1.0, 7.5] {
            assert!((avg.eval(&[x]) - (x.ln() + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_of_constant_and_cosine() {
        let flow = TorusLinearFlow::new(vec![2f64.sqrt() - 1.0]).unwrap();
        let EmbeddingOutcome::Solved { b, .. } = solve_embedding(&flow, &TrigPolynomial::constant(1, 2.5)).unwrap() else {
            panic!("constant embeds");
        };
        assert_eq!(b, TrigPolynomial::constant(1, 2.5));
        let btilde = TrigPolynomial::cosine(&[1], 1.0);
        let EmbeddingOutcome::Solved { b, round_trip_error } = solve_embedding(&flow, &btilde).unwrap() else {
            panic!("cosine embeds");
        };
        assert!(round_trip_error < 1e-12);
        let Observable::Trig(back) = average_operator(&RealFlow::Torus(flow), &Observable::Trig(b)).unwrap() else {
            panic!()
        };
        assert!(back.distance(&btilde) < 1e-12);
    }

    #[test]
    fn resonant_mode_is_reported() {
        let flow = TorusLinearFlow::new(vec![0.5]).unwrap();
        let btilde = TrigPolynomial::cosine(&[2], 1.0);
        match solve_embedding(&flow, &btilde).unwrap() {
            EmbeddingOutcome::Obstructed(r) => {
                assert!(r.resonant.contains(&vec![2]) && r.resonant.contains(&vec![-2]));
            }
            EmbeddingOutcome::Solved { .. } => panic!("expected an obstruction"),
        }
    }

    #[test]
    fn ce1_sawtooth_is_obstructed() {
        let t = ce1();
        let s = t.alpha()[0] + t.alpha()[1];
        let flow = RealFlow::Torus(t);
        let grid = torus_grid(2, 16);
        let exclude = |x: &[f64]| {
            let d = (x[0] + x[1]).rem_euclid(1.0);
            d.min(1.0 - d) < 0.05
        };
        let report = bbp_test(&flow, &Observable::function(sawtooth), &grid, Some(&exclude), &BbpOptions::default()).unwrap();
        assert!(report.excluded > 0);
        assert!(!report.inconclusive);
        assert!((report.mean - s).abs() < 1e-6);
        assert!(report.obstruction.is_some());
    }

    #[test]
    fn bbp_on_constant_and_cosine() {
        let flow = RealFlow::Torus(ce1());
        let grid = torus_grid(2, 12);
        let r = bbp_test(&flow, &Observable::Trig(TrigPolynomial::constant(2, 3.0)), &grid, None, &BbpOptions::default()).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!(r.obstruction.is_none());
        let cosine = Observable::Trig(TrigPolynomial::cosine(&[1, 1], 1.0));
        let r = bbp_test(&flow, &cosine, &grid, None, &BbpOptions::default()).unwrap();
        assert!(r.mean.abs() < 1e-8);
        assert!(r.obstruction.is_none() && !r.inconclusive);
    }

    #[test]
    fn coboundary_lifts() {
        let t = ce1();
        let flow = RealFlow::Torus(t.clone());
        let grid = torus_grid(2, 5);
        let constant = coboundary_lift(&flow, &Observable::Trig(TrigPolynomial::constant(2, 4.0)), &grid).unwrap();
        let Observable::Trig(b) = &constant.b else { panic!() };
        assert_eq!(b, &TrigPolynomial::zero(2));

        let n = [2, -1];
        let lift = coboundary_lift(&flow, &Observable::Trig(TrigPolynomial::sine(&n, 1.0)), &grid).unwrap();
        let expect = TrigPolynomial::cosine(&n, 2.0 * PI * t.frequency(&n));
        let Observable::Trig(b) = &lift.b else { panic!() };
        assert!(b.distance(&expect) < 1e-14);

        let half = RealFlow::Exp(ScalarExpFlow::PositiveHalfLine);
        let lift = coboundary_lift(&half, &Observable::Exp(ExpObservable::log()), &[vec![0.5], vec![3.0]]).unwrap();
        assert_eq!(lift.b.eval(&[2.0]), 1.0);
        assert!(lift.worst_residual() < 1e-12);

        let smooth = Observable::function(|x: &[f64]| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        assert!(coboundary_lift(&flow, &smooth, &grid).unwrap().worst_residual() < 1e-7);
    }

    #[test]
    fn finite_difference_residuals_are_second_order() {
        let flow = RealFlow::Torus(ce1());
        let grid = torus_grid(2, 4);
        let g = Observable::function(|x: &[f64]| (2.0 * PI * (x[0] + 2.0 * x[1])).sin());
        let r1 = certify(&flow, finite_difference_derivative(&flow, &g, 1e-2), &g, &grid).unwrap().worst_residual();
        let r2 = certify(&flow, finite_difference_derivative(&flow, &g, 5e-3), &g, &grid).unwrap().worst_residual();
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn resolvent_examples() {
        let flow = TorusLinearFlow::new(vec![2f64.sqrt() - 1.0]).unwrap();
        let s = resolvent_solve(&flow, &TrigPolynomial::constant(1, 3.0), 2.5).unwrap();
        assert!((s.a.mean() - 3.0 / (1.0 - 2.5)).abs() < 1e-15);
        let s = resolvent_solve(&flow, &TrigPolynomial::zero(1), 2.0).unwrap();
        assert_eq!(s.a, TrigPolynomial::zero(1));
        assert_eq!(s.c, TrigPolynomial::zero(1));
        let s = resolvent_solve(&flow, &TrigPolynomial::cosine(&[1], 1.0), 2.0).unwrap();
        assert!(s.residual < 1e-10);
        assert!(resolvent_solve(&flow, &TrigPolynomial::constant(1, 1.0), 1.0).is_err());
    }

    #[test]
    fn converse_failure_witness() {
        let flow = RealFlow::Torus(ce1());
        let avg = average_operator(&flow, &Observable::function(sawtooth)).unwrap();
        let gap = torus_grid(2, 20)
            .iter()
            .map(|x| (avg.eval(x) - sawtooth(x)).abs())
            .fold(0.0, f64::max);
        assert!(gap > 1e-3);
    }

    #[test]
    fn conjugate_symmetry_is_enforced() {
        let mut c = BTreeMap::new();
        c.insert(vec![1], Complex64::new(1.0, 1.0));
        assert!(TrigPolynomial::from_coefficients(1, c.clone()).is_err());
        c.insert(vec![-1], Complex64::new(1.0, -1.0));
        let p = TrigPolynomial::from_coefficients(1, c).unwrap();
        let x: f64 = 0.2;
        let expect = 2.0 * ((2.0 * PI * x).cos() - (2.0 * PI * x).sin());
        assert!((p.eval(&[x]) - expect).abs() < 1e-14);
    }
}
