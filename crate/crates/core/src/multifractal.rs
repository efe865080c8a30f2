//! Level sets of ratios of flow averages: the pressure-root function
//! `T_u(q)`, the `u`-dimension `inf_q T_u(q)`, its conditional variational
//! counterpart over equilibrium measures, and the range of attainable ratios.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::equivalence::{flow_samples, induced_sequence, FlowFamily};
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect, convex_minimum, fmt15};
use crate::potential::{cuneo_candidate, LocallyConstantFunction};
use crate::suspension::{i_g_function, pressure_root, FlowFunction, SuspensionFlow};
use crate::symbolic::{periodic_points, Sft};
use crate::transfer::{gibbs_measure, pressure, GibbsMarkovMeasure};

/// Bound on `|q|` for the minimisation of `T_u`.
pub const Q_LIMIT: f64 = 1e3;
/// Tolerance in `q` for the minimisation of `T_u`.
pub const Q_TOL: f64 = 1e-8;
pub const MAX_GOLDEN_STEPS: usize = 200;
/// Accepted violation of the ratio constraint by a witness measure.
pub const CONSTRAINT_TOL: f64 = 1e-6;
/// Longest period of the orbits scanned for the ratio interval.
pub const INTERVAL_MAX_PERIOD: usize = 12;
/// Inverse temperatures of the extreme Gibbs measures in the ratio scan.
pub const INTERVAL_EXTREME_Q: f64 = 50.0;
const MAX_INTERVAL_ORBITS: u128 = 200_000;
const SWEEP_Q: (f64, f64, usize) = (-32.0, 32.0, 65);
const INTERVAL_SLACK: f64 = 1e-9;

/// A ratio problem on the base: the level sets of `∫A/∫B` weighted by `U`.
/// `A`, `B` and `U` are the roof-flight integrals (or their representatives)
/// of the flow data.
#[derive(Debug, Clone)]
pub struct SpectrumProblem {
    sft: Sft,
    a: LocallyConstantFunction,
    b: LocallyConstantFunction,
    u: LocallyConstantFunction,
    interval: (f64, f64),
}

/// Outcome of the pressure-formula dimension at one ratio value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SpectrumValue {
    Value { dim: f64, q_star: f64 },
    /// The ratio is not attained by any invariant measure.
    Empty,
}

impl SpectrumValue {
    pub fn dim(&self) -> Option<f64> {
        match self {
            Self::Value { dim, .. } => Some(*dim),
            Self::Empty => None,
        }
    }
}

/// An equilibrium measure meeting the ratio constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    /// `h_ν / ∫U dν`, the entropy-to-`u` ratio of the induced flow measure.
    pub dim: f64,
    /// Parameter of the equilibrium measure `ν_q`.
    pub q: f64,
    pub t: f64,
    pub entropy: f64,
    pub u_integral: f64,
    /// `∫A dν / ∫B dν`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CvpValue {
    Witness(Witness),
    /// No equilibrium measure of the sweep meets the constraint.
    NoWitness,
}

impl CvpValue {
    pub fn dim(&self) -> Option<f64> {
        match self {
            Self::Witness(w) => Some(w.dim),
            Self::NoWitness => None,
        }
    }
}

impl SpectrumProblem {
    /// A problem from base representatives. `U` must be strictly positive and
    /// `∫B` positive for every periodic-orbit measure scanned.
    pub fn from_representatives(
        sft: &Sft,
        a: LocallyConstantFunction,
        b: LocallyConstantFunction,
        u: LocallyConstantFunction,
    ) -> Result<Self> {
        let k = sft.alphabet_size();
        if [&a, &b, &u].iter().any(|f| f.alphabet_size() != k) {
            return Err(invalid("representatives and base use different alphabets"));
        }
        if !(u.min() > 0.0) {
            return Err(invalid("the weight U must be strictly positive"));
        }
        if !sft.is_primitive() {
            return Err(Error::UnsupportedInput("the transition matrix is not primitive".into()));
        }
        let mut problem = Self {
            sft: sft.clone(),
            a,
            b,
            u,
            interval: (f64::NAN, f64::NAN),
        };
        problem.interval = problem.scan_interval()?;
        Ok(problem)
    }

    /// A problem from flow data: `a` and `b` enter through the candidate
    /// generators of their induced sequences at level `n`, `u` through `I_u`.
    pub fn from_flow(
        flow: &SuspensionFlow,
        a: Arc<dyn FlowFamily>,
        b: Arc<dyn FlowFamily>,
        u: &FlowFunction,
        n: usize,
    ) -> Result<Self> {
        let sft = flow.base();
        let samples = flow_samples(flow, u.depth().max(flow.roof().depth()), 8)?;
        if samples.iter().any(|p| !(u.eval(flow, p) > 0.0)) {
            return Err(invalid("u must be strictly positive"));
        }
        let a_rep = cuneo_candidate(sft, &induced_sequence(flow, a), n)?;
        let b_rep = cuneo_candidate(sft, &induced_sequence(flow, b), n)?;
        let u_rep = i_g_function(flow, u)?;
        Self::from_representatives(sft, a_rep, b_rep, u_rep)
    }

    /// Frequency of symbol 1 on the full two-shift with unit roof and weight:
    /// `A = 1_{[1]}`, `B = U = 1`.
    pub fn bernoulli_indicator() -> Self {
        let sft = Sft::full(2).expect("full shift");
        let a = LocallyConstantFunction::indicator(&sft, 1);
        let one = LocallyConstantFunction::constant(&sft, 1.0);
        Self::from_representatives(&sft, a, one.clone(), one).expect("valid problem")
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn a(&self) -> &LocallyConstantFunction {
        &self.a
    }

    pub fn b(&self) -> &LocallyConstantFunction {
        &self.b
    }

    pub fn u(&self) -> &LocallyConstantFunction {
        &self.u
    }

    fn constraint(&self, q: f64, alpha: f64) -> Result<LocallyConstantFunction> {
        LocallyConstantFunction::linear_combination(&self.sft, &[(q, &self.a), (-q * alpha, &self.b)], 0.0)
    }

    /// `T_u(q)`: the root `t` of `P(q(A − αB) − tU) = 0`.
    pub fn t_u(&self, q: f64, alpha: f64) -> Result<f64> {
        pressure_root(&self.sft, &self.constraint(q, alpha)?, &self.u)
    }

    /// `T_u(0)`, the largest value the spectrum takes.
    pub fn peak(&self) -> Result<f64> {
        self.t_u(0.0, 0.0)
    }

    /// Ratio interval: extremes of `∫A/∫B` over periodic-orbit measures and
    /// extreme equilibrium measures. An inner approximation of the set of
    /// attainable ratios.
    pub fn alpha_interval(&self) -> (f64, f64) {
        self.interval
    }

    fn scan_interval(&self) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut total: u128 = 0;
        for p in 1..=INTERVAL_MAX_PERIOD {
            total += self.sft.trace_power(p);
            if total > MAX_INTERVAL_ORBITS {
                break;
            }
            for x in periodic_points(&self.sft, p)? {
                let mu = GibbsMarkovMeasure::periodic_orbit(&x)?;
                let r = self.ratio(&mu)?;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let mid = 0.5 * (lo + hi);
        for q in [-INTERVAL_EXTREME_Q, INTERVAL_EXTREME_Q] {
            let mu = gibbs_measure(&self.sft, &self.constraint(q, mid)?)?;
            let r = self.ratio(&mu)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok((lo, hi))
    }

    /// `∫A dμ / ∫B dμ`; refuses measures with `∫B ≤ 0`.
    pub fn ratio(&self, mu: &GibbsMarkovMeasure) -> Result<f64> {
        let ib = mu.integrate(&self.b);
        if !(ib > 0.0) {
            return Err(Error::UnsupportedInput(format!(
                "B has nonpositive average {ib} for some invariant measure"
            )));
        }
        Ok(mu.integrate(&self.a) / ib)
    }

    fn outside(&self, alpha: f64) -> bool {
        let (lo, hi) = self.interval;
        let slack = INTERVAL_SLACK * (1.0 + lo.abs().max(hi.abs()));
        alpha < lo - slack || alpha > hi + slack
    }

    /// `dim_u` of the level set `{ratio = α}` as `inf_q T_u(q)`.
    pub fn spectrum_dim(&self, alpha: f64) -> Result<SpectrumValue> {
        if self.outside(alpha) {
            return Ok(SpectrumValue::Empty);
        }
        let m = convex_minimum(|q| self.t_u(q, alpha), Q_LIMIT, Q_TOL, MAX_GOLDEN_STEPS)?;
        Ok(SpectrumValue::Value {
            dim: m.value,
            q_star: m.x,
        })
    }

    fn witness_at(&self, q: f64, alpha: f64) -> Result<(Witness, f64)> {
        let phi = self.constraint(q, alpha)?;
        let t = pressure_root(&self.sft, &phi, &self.u)?;
        let potential = LocallyConstantFunction::linear_combination(&self.sft, &[(1.0, &phi), (-t, &self.u)], 0.0)?;
        let mu = gibbs_measure(&self.sft, &potential)?;
        let ia = mu.integrate(&self.a);
        let ib = mu.integrate(&self.b);
        let iu = mu.integrate(&self.u);
        let entropy = mu.entropy();
        let witness = Witness {
            dim: entropy / iu,
            q,
            t,
            entropy,
            u_integral: iu,
            ratio: ia / ib,
        };
        Ok((witness, ia - alpha * ib))
    }

    /// The conditional variational value: `h_ν / ∫U dν` for the equilibrium
    /// measure `ν_q` of `q(A − αB) − T_u(q)U` satisfying `∫A dν = α∫B dν`.
    /// The search runs over this one-parameter family, so the value is a
    /// lower bound for the supremum over all invariant measures.
    pub fn cvp_dim(&self, alpha: f64) -> Result<CvpValue> {
        let (q_lo, q_hi, points) = SWEEP_Q;
        let grid: Vec<f64> = (0..points)
            .map(|i| q_lo + (q_hi - q_lo) * i as f64 / (points - 1) as f64)
            .collect();
        let sweep: Vec<(Witness, f64)> = grid
            .iter()
            .map(|&q| self.witness_at(q, alpha))
            .collect::<Result<_>>()?;
        // the constraint integral is nondecreasing in q
        let mut best: Option<(Witness, f64)> = None;
        for (w, g) in &sweep {
            if g.abs() <= CONSTRAINT_TOL && best.as_ref().is_none_or(|(b, _)| w.q.abs() < b.q.abs()) {
                best = Some((*w, *g));
            }
        }
        if best.is_none() {
            if let Some(i) = sweep.windows(2).position(|p| p[0].1 < 0.0 && p[1].1 > 0.0) {
                let q = bisect(|q| Ok(self.witness_at(q, alpha)?.1), grid[i], grid[i + 1], 1e-13)?;
                best = Some(self.witness_at(q, alpha)?);
            }
        }
        Ok(match best {
            Some((w, g)) if g.abs() <= CONSTRAINT_TOL => CvpValue::Witness(w),
            _ => CvpValue::NoWitness,
        })
    }

    /// Both formulas over a grid of ratio values.
    pub fn spectrum(&self, alphas: &[f64]) -> Result<SpectrumResult> {
        let rows = alphas
            .par_iter()
            .map(|&alpha| {
                let formula2 = self.spectrum_dim(alpha)?;
                let formula1 = match formula2 {
                    SpectrumValue::Empty => CvpValue::NoWitness,
                    SpectrumValue::Value { .. } => self.cvp_dim(alpha)?,
                };
                Ok(SpectrumRow {
                    alpha,
                    formula2,
                    formula1,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumResult {
            alpha_interval: self.interval,
            peak: self.peak()?,
            formula1_is_lower_bound: true,
            rows,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub formula2: SpectrumValue,
    pub formula1: CvpValue,
}

/// Spectrum over a grid of ratio values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub alpha_interval: (f64, f64),
    pub peak: f64,
    /// The conditional variational values come from a one-parameter family
    /// of equilibrium measures.
    pub formula1_is_lower_bound: bool,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumResult {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt15).unwrap_or_else(|| "empty".into());
        let mut out = String::from("alpha,dim_formula2,dim_formula1,q_star,witness_params\n");
        for r in &self.rows {
            let q_star = match r.formula2 {
                SpectrumValue::Value { q_star, .. } => fmt15(q_star),
                SpectrumValue::Empty => String::new(),
            };
            let params = match r.formula1 {
                CvpValue::Witness(w) => format!(
                    "q={};t={};entropy={};u_integral={};ratio={}",
                    fmt15(w.q),
                    fmt15(w.t),
                    fmt15(w.entropy),
                    fmt15(w.u_integral),
                    fmt15(w.ratio)
                ),
                CvpValue::NoWitness => "none".into(),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt15(r.alpha),
                opt(r.formula2.dim()),
                match r.formula1 {
                    CvpValue::Witness(w) => fmt15(w.dim),
                    CvpValue::NoWitness => "none".into(),
                },
                q_star,
                params
            ));
        }
        out
    }
}

/// Discrete-time spectrum of the Birkhoff ratio `S_n f / S_n g` with unit
/// weight, through the Legendre transform of `q ↦ P(q(f − αg))`: the
/// equilibrium parameter is located where `∫(f − αg) dμ_q` changes sign.
/// Returns `None` when no parameter in `[-limit, limit]` balances the ratio.
pub fn discrete_spectrum(
    sft: &Sft,
    f: &LocallyConstantFunction,
    g: &LocallyConstantFunction,
    alpha: f64,
    limit: f64,
) -> Result<Option<f64>> {
    let phi = LocallyConstantFunction::linear_combination(sft, &[(1.0, f), (-alpha, g)], 0.0)?;
    let drift = |q: f64| -> Result<f64> {
        let mu = gibbs_measure(sft, &phi.map(|v| q * v))?;
        Ok(mu.integrate(&phi))
    };
    let (d_lo, d_hi) = (drift(-limit)?, drift(limit)?);
    if d_lo > 0.0 || d_hi < 0.0 {
        return Ok(None);
    }
    let q = if d_lo == d_hi {
        0.0
    } else {
        bisect(drift, -limit, limit, 1e-13)?
    };
    Ok(Some(pressure(sft, &phi.map(|v| q * v))?))
}
