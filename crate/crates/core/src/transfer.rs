//! Topological pressure and Gibbs–Markov equilibrium measures of locally
//! constant potentials, through the Perron data of the weighted transfer
//! matrix on the word graph.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, numeric, Error, Result};
use crate::numeric::fmt15;
use crate::potential::{cuneo_candidate, LocallyConstantFunction, PotentialFamily};
use crate::symbolic::{PeriodicPoint, Sft};

/// Power iteration gives up after this many steps.
pub const MAX_POWER_STEPS: usize = 100_000;
const RAYLEIGH_TOL: f64 = 1e-13;

/// The graph whose vertices are the admissible `order`-words, with an edge
/// `w → w'` whenever `w'` is a one-step shift-successor of `w`.
#[derive(Debug, Clone)]
pub struct WordGraph {
    order: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
}

impl WordGraph {
    pub fn new(sft: &Sft, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(invalid("word graph order must be at least 1"));
        }
        let mut states = Vec::new();
        sft.for_each_word(order, |w| states.push(w.to_vec()))?;
        let index: HashMap<Vec<usize>, usize> =
            states.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut successors = vec![Vec::new(); states.len()];
        let mut predecessors = vec![Vec::new(); states.len()];
        let mut next = vec![0; order];
        for (i, w) in states.iter().enumerate() {
            next[..order - 1].copy_from_slice(&w[1..]);
            for a in sft.successors(w[order - 1]) {
                next[order - 1] = a;
                let j = index[&next];
                successors[i].push(j);
                predecessors[j].push(i);
            }
        }
        Ok(Self {
            order,
            states,
            index,
            successors,
            predecessors,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn state_index(&self, w: &[usize]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// A locally constant function of depth at most `order`, read per state.
    pub fn tabulate(&self, f: &LocallyConstantFunction) -> Result<Vec<f64>> {
        if f.depth() > self.order {
            return Err(invalid(format!(
                "function depth {} exceeds graph order {}",
                f.depth(),
                self.order
            )));
        }
        Ok(self.states.iter().map(|w| f.value(w)).collect())
    }
}

/// Leading eigendata of a weighted transfer matrix.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub log_eigenvalue: f64,
    /// Right eigenvector, normalised to sum 1.
    pub right: Vec<f64>,
    /// Left eigenvector, normalised to sum 1.
    pub left: Vec<f64>,
    pub iterations: usize,
}

/// `L[w → w'] = exp(φ(w))` on the edges of a [`WordGraph`].
#[derive(Debug, Clone)]
pub struct WeightedTransferMatrix {
    graph: Arc<WordGraph>,
    log_weights: Vec<f64>,
}

impl WeightedTransferMatrix {
    pub fn new(graph: Arc<WordGraph>, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() != graph.len() {
            return Err(invalid(format!(
                "{} weights for {} states",
                log_weights.len(),
                graph.len()
            )));
        }
        if log_weights.iter().any(|v| !v.is_finite()) {
            return Err(numeric("potential has a non-finite value"));
        }
        Ok(Self { graph, log_weights })
    }

    pub fn from_potential(sft: &Sft, phi: &LocallyConstantFunction, order: usize) -> Result<Self> {
        let graph = Arc::new(WordGraph::new(sft, order.max(phi.depth()))?);
        let w = graph.tabulate(phi)?;
        Self::new(graph, w)
    }

    pub fn graph(&self) -> &Arc<WordGraph> {
        &self.graph
    }

    /// Dense copy of the matrix, for inspection and testing.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.graph.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for &j in self.graph.successors(i) {
                m[(i, j)] = self.log_weights[i].exp();
            }
        }
        m
    }

    /// Perron eigenvalue and eigenvectors by power iteration. Weights are
    /// shifted by their maximum so the iteration works with entries ≤ 1.
    pub fn perron(&self) -> Result<PerronData> {
        let n = self.graph.len();
        let shift = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|v| (v - shift).exp()).collect();
        let g = &self.graph;

        let (right, lam_r, it_r) = power_iterate(n, |v, out| {
            for i in 0..n {
                out[i] = w[i] * g.successors[i].iter().map(|&j| v[j]).sum::<f64>();
            }
        })?;
        let (left, _, it_l) = power_iterate(n, |v, out| {
            for j in 0..n {
                out[j] = g.predecessors[j].iter().map(|&i| v[i] * w[i]).sum::<f64>();
            }
        })?;
        Ok(PerronData {
            log_eigenvalue: lam_r.ln() + shift,
            right,
            left,
            iterations: it_r.max(it_l),
        })
    }

    /// The equilibrium measure: the stationary Markov chain
    /// `P(w → w') = L[w,w'] r(w') / (λ r(w))`, `π ∝ l · r`.
    pub fn gibbs(&self, sft: &Sft) -> Result<GibbsMarkovMeasure> {
        let perron = self.perron()?;
        let g = &self.graph;
        let lambda = perron.log_eigenvalue;
        let mut transitions = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            let ri = perron.right[i];
            let row: Vec<(usize, f64)> = g.successors[i]
                .iter()
                .map(|&j| {
                    let p = (self.log_weights[i] - lambda).exp() * perron.right[j] / ri;
                    (j, p)
                })
                .collect();
            // renormalise away the last few ulps of iteration error
            let total: f64 = row.iter().map(|(_, p)| p).sum();
            transitions.push(row.into_iter().map(|(j, p)| (j, p / total)).collect());
        }
        let mut stationary: Vec<f64> = perron
            .left
            .iter()
            .zip(&perron.right)
            .map(|(l, r)| l * r)
            .collect();
        let total: f64 = stationary.iter().sum();
        stationary.iter_mut().for_each(|p| *p /= total);
        GibbsMarkovMeasure::assemble(
            sft.alphabet_size(),
            g.order,
            g.states.clone(),
            transitions,
            stationary,
        )
    }
}

/// Normalised power iteration for a nonnegative operator, shifted by the
/// running eigenvalue estimate. Returns the
/// eigenvector (sum 1), the eigenvalue and the iteration count.
fn power_iterate<F: FnMut(&[f64], &mut [f64])>(n: usize, mut apply: F) -> Result<(Vec<f64>, f64, usize)> {
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut prev_lambda = f64::NAN;
    for step in 1..=MAX_POWER_STEPS {
        apply(&v, &mut next);
        let lambda: f64 = next.iter().sum();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(numeric(format!("power iteration produced eigenvalue {lambda}")));
        }
        let mut change: f64 = 0.0;
        for (a, b) in v.iter_mut().zip(&next) {
            // iterate (L + λI)/(2λ): same fixed point, no oscillation when
            // other eigenvalues lie near −λ or on the circle |z| = λ
            let nb = 0.5 * (b / lambda + *a);
            change = change.max((nb - *a).abs());
            *a = nb;
        }
        if (lambda - prev_lambda).abs() <= RAYLEIGH_TOL * lambda && change <= RAYLEIGH_TOL {
            return Ok((v, lambda, step));
        }
        prev_lambda = lambda;
    }
    Err(numeric(format!(
        "power iteration did not converge in {MAX_POWER_STEPS} steps"
    )))
}

fn require_primitive(sft: &Sft) -> Result<()> {
    if !sft.is_primitive() {
        return Err(Error::UnsupportedInput(
            "the transition matrix is not primitive".into(),
        ));
    }
    Ok(())
}

/// Topological pressure: log of the Perron eigenvalue of the weighted
/// transfer matrix at order `max(depth(φ), 1)`.
pub fn pressure(sft: &Sft, phi: &LocallyConstantFunction) -> Result<f64> {
    pressure_at_order(sft, phi, phi.depth())
}

/// Pressure computed on the word graph of a given order (at least the depth
/// of `φ`). The value does not depend on the order.
pub fn pressure_at_order(sft: &Sft, phi: &LocallyConstantFunction, order: usize) -> Result<f64> {
    require_primitive(sft)?;
    if order < phi.depth() {
        return Err(invalid(format!(
            "order {order} is below the potential depth {}",
            phi.depth()
        )));
    }
    Ok(WeightedTransferMatrix::from_potential(sft, phi, order)?
        .perron()?
        .log_eigenvalue)
}

/// The Gibbs–Markov equilibrium measure of `φ`.
pub fn gibbs_measure(sft: &Sft, phi: &LocallyConstantFunction) -> Result<GibbsMarkovMeasure> {
    require_primitive(sft)?;
    WeightedTransferMatrix::from_potential(sft, phi, phi.depth())?.gibbs(sft)
}

pub fn entropy(mu: &GibbsMarkovMeasure) -> f64 {
    mu.entropy()
}

pub fn integrate(mu: &GibbsMarkovMeasure, f: &LocallyConstantFunction) -> f64 {
    mu.integrate(f)
}

/// Pressure of a non-additive family through its candidate generator at
/// level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPressure {
    pub value: f64,
    pub n: usize,
}

pub fn family_pressure(sft: &Sft, fam: &PotentialFamily, n: usize) -> Result<FamilyPressure> {
    let candidate = cuneo_candidate(sft, fam, n)?;
    Ok(FamilyPressure {
        value: pressure(sft, &candidate)?,
        n,
    })
}

/// A stationary Markov measure on the shift, of some order: the chain runs on
/// `order`-words with overlapping transitions.
///
/// Equilibrium measures built by [`gibbs_measure`] are of this form, as are
/// Bernoulli measures and the measures carried by periodic orbits.
#[derive(Debug, Clone)]
pub struct GibbsMarkovMeasure {
    k: usize,
    order: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    transitions: Vec<Vec<(usize, f64)>>,
    stationary: Vec<f64>,
    entropy: f64,
}

impl GibbsMarkovMeasure {
    fn assemble(
        k: usize,
        order: usize,
        states: Vec<Vec<usize>>,
        transitions: Vec<Vec<(usize, f64)>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let index = states.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let entropy = -stationary
            .iter()
            .zip(&transitions)
            .map(|(pi, row)| {
                pi * row
                    .iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(_, p)| p * p.ln())
                    .sum::<f64>()
            })
            .sum::<f64>();
        Ok(Self {
            k,
            order,
            states,
            index,
            transitions,
            stationary,
            entropy: entropy.max(0.0),
        })
    }

    /// A Markov measure of the given order from nonnegative transition
    /// weights `weight(state, next_symbol)`, normalised per state. The
    /// stationary law is obtained by a direct linear solve; the chain must be
    /// irreducible on the states that carry weight.
    pub fn from_kernel<F>(sft: &Sft, order: usize, mut weight: F) -> Result<Self>
    where
        F: FnMut(&[usize], usize) -> f64,
    {
        let graph = WordGraph::new(sft, order)?;
        let n = graph.len();
        let mut transitions = Vec::with_capacity(n);
        for (i, w) in graph.states.iter().enumerate() {
            let mut row = Vec::new();
            for &j in &graph.successors[i] {
                let a = graph.states[j][order - 1];
                let x = weight(w, a);
                if !(x >= 0.0) || !x.is_finite() {
                    return Err(invalid(format!("transition weight {x} is not a nonnegative number")));
                }
                if x > 0.0 {
                    row.push((j, x));
                }
            }
            let total: f64 = row.iter().map(|(_, x)| x).sum();
            if total <= 0.0 {
                return Err(invalid(format!("state {w:?} has no outgoing weight")));
            }
            transitions.push(row.into_iter().map(|(j, x)| (j, x / total)).collect::<Vec<_>>());
        }
        // (Pᵀ − I) π = 0 with the last equation replaced by Σ π = 1
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, row) in transitions.iter().enumerate() {
            for &(j, p) in row {
                m[(j, i)] += p;
            }
            m[(i, i)] -= 1.0;
        }
        for j in 0..n {
            m[(n - 1, j)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[n - 1] = 1.0;
        let pi = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| numeric("the chain has no unique stationary law"))?;
        if pi.iter().any(|&p| p < -1e-12) {
            return Err(numeric("stationary solve produced negative mass"));
        }
        let stationary: Vec<f64> = pi.iter().map(|p| p.max(0.0)).collect();
        Self::assemble(sft.alphabet_size(), order, graph.states, transitions, stationary)
    }

    /// The Bernoulli measure with the given symbol probabilities on a full
    /// shift.
    pub fn bernoulli(sft: &Sft, probs: &[f64]) -> Result<Self> {
        if probs.len() != sft.alphabet_size() {
            return Err(invalid("one probability per symbol is required"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 || probs.iter().any(|&p| p < 0.0) {
            return Err(invalid("probabilities must be nonnegative and sum to 1"));
        }
        Self::from_kernel(sft, 1, |_, a| probs[a])
    }

    /// The invariant probability carried by the orbit of a periodic point.
    pub fn periodic_orbit(point: &PeriodicPoint) -> Result<Self> {
        let p = point.minimal_period();
        let states: Vec<Vec<usize>> = (0..p).map(|i| point.shifted(i).forward(p)).collect();
        let transitions = (0..p).map(|i| vec![((i + 1) % p, 1.0)]).collect();
        let stationary = vec![1.0 / p as f64; p];
        Self::assemble(point.alphabet_size(), p, states, transitions, stationary)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Outgoing `(state index, probability)` pairs of a state.
    pub fn transitions(&self, state: usize) -> &[(usize, f64)] {
        &self.transitions[state]
    }

    /// Entropy rate `−Σ π_i P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Measure of the cylinder `[w]`.
    pub fn cylinder(&self, w: &[usize]) -> f64 {
        if w.iter().any(|&s| s >= self.k) {
            return 0.0;
        }
        if w.len() <= self.order {
            return self
                .states
                .iter()
                .zip(&self.stationary)
                .filter(|(s, _)| s.starts_with(w))
                .map(|(_, p)| p)
                .sum();
        }
        let Some(&mut_state) = self.index.get(&w[..self.order]) else {
            return 0.0;
        };
        let mut state = mut_state;
        let mut mass = self.stationary[state];
        for j in 1..=w.len() - self.order {
            let target = &w[j..j + self.order];
            match self.transitions[state]
                .iter()
                .find(|(t, _)| self.states[*t] == target)
            {
                Some(&(t, p)) => {
                    state = t;
                    mass *= p;
                }
                None => return 0.0,
            }
        }
        mass
    }

    /// `∫ f dμ` for a locally constant `f` of any depth.
    pub fn integrate(&self, f: &LocallyConstantFunction) -> f64 {
        let depth = f.depth();
        let mut total = 0.0;
        let mut buf = Vec::with_capacity(depth.max(self.order));
        for (i, s) in self.states.iter().enumerate() {
            let mass = self.stationary[i];
            if mass == 0.0 {
                continue;
            }
            if depth <= self.order {
                total += mass * f.value(s);
            } else {
                buf.clear();
                buf.extend_from_slice(s);
                total += self.extend_integral(f, &mut buf, i, mass);
            }
        }
        total
    }

    fn extend_integral(&self, f: &LocallyConstantFunction, buf: &mut Vec<usize>, state: usize, mass: f64) -> f64 {
        if buf.len() >= f.depth() {
            return mass * f.value(buf);
        }
        let mut acc = 0.0;
        for &(t, p) in &self.transitions[state] {
            if p == 0.0 {
                continue;
            }
            buf.push(self.states[t][self.order - 1]);
            acc += self.extend_integral(f, buf, t, mass * p);
            buf.pop();
        }
        acc
    }

    /// Largest violation of `π P = π`.
    pub fn stationarity_defect(&self) -> f64 {
        let mut image = vec![0.0; self.states.len()];
        for (i, row) in self.transitions.iter().enumerate() {
            for &(j, p) in row {
                image[j] += self.stationary[i] * p;
            }
        }
        image
            .iter()
            .zip(&self.stationary)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One row of a pressure sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSweepRow {
    pub parameter: f64,
    pub pressure: f64,
    pub entropy: f64,
    pub integral: f64,
}

/// Pressure, equilibrium entropy and `∫ f dμ_t` along `φ_t = t·f` for each
/// parameter `t`.
pub fn pressure_sweep(sft: &Sft, f: &LocallyConstantFunction, params: &[f64]) -> Result<Vec<PressureSweepRow>> {
    use rayon::prelude::*;
    params
        .par_iter()
        .map(|&t| {
            let phi = f.map(|v| t * v);
            let mu = gibbs_measure(sft, &phi)?;
            Ok(PressureSweepRow {
                parameter: t,
                pressure: pressure(sft, &phi)?,
                entropy: mu.entropy(),
                integral: mu.integrate(f),
            })
        })
        .collect()
}

pub fn pressure_sweep_csv(rows: &[PressureSweepRow]) -> String {
    let mut out = String::from("parameter,pressure,entropy,integral\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt15(r.parameter),
            fmt15(r.pressure),
            fmt15(r.entropy),
            fmt15(r.integral)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{spectral_radius, MatrixCocycle};

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn full_shift_pressure() {
        let sft = Sft::full(2).unwrap();
        let p = pressure(&sft, &LocallyConstantFunction::constant(&sft, 0.0)).unwrap();
        assert!((p - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_pressure() {
        let sft = Sft::golden_mean();
        let p = pressure(&sft, &LocallyConstantFunction::constant(&sft, 0.0)).unwrap();
        assert!((p - GOLDEN.ln()).abs() < 1e-12);
        assert!((p - 0.481212).abs() < 1e-6);
    }

    #[test]
    fn normalised_bernoulli_potential() {
        let sft = Sft::full(2).unwrap();
        for p in [0.1f64, 0.37, 0.5, 0.9] {
            let phi = LocallyConstantFunction::from_fn(&sft, 1, |w| if w[0] == 0 { p.ln() } else { (1.0f64 - p).ln() }).unwrap();
            assert!(pressure(&sft, &phi).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn non_primitive_is_refused() {
        let sft = Sft::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let phi = LocallyConstantFunction::constant(&sft, 0.0);
        assert!(matches!(pressure(&sft, &phi), Err(Error::UnsupportedInput(_))));
        assert!(matches!(gibbs_measure(&sft, &phi), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn uniform_gibbs_is_fair_coin() {
        let sft = Sft::full(2).unwrap();
        let mu = gibbs_measure(&sft, &LocallyConstantFunction::constant(&sft, 0.0)).unwrap();
        assert!((mu.cylinder(&[0]) - 0.5).abs() < 1e-12);
        assert!((mu.cylinder(&[1, 1]) - 0.25).abs() < 1e-12);
        assert!((mu.entropy() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn biased_gibbs_is_bernoulli() {
        let sft = Sft::full(2).unwrap();
        let phi = LocallyConstantFunction::from_fn(&sft, 1, |w| [(1.0f64 / 3.0).ln(), (2.0f64 / 3.0).ln()][w[0]]).unwrap();
        let mu = gibbs_measure(&sft, &phi).unwrap();
        assert!((mu.cylinder(&[0]) - 1.0 / 3.0).abs() < 1e-12);
        assert!((mu.cylinder(&[1, 0, 1]) - 4.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn parry_measure() {
        let sft = Sft::golden_mean();
        let mu = gibbs_measure(&sft, &LocallyConstantFunction::constant(&sft, 0.0)).unwrap();
        // Parry: right eigenvector (φ, 1), left (φ, 1); π ∝ (φ², 1)
        let pi0 = GOLDEN * GOLDEN / (GOLDEN * GOLDEN + 1.0);
        assert!((mu.cylinder(&[0]) - pi0).abs() < 1e-12);
        // P(0→1) = 1/φ², so μ[01] = π0 / φ²
        assert!((mu.cylinder(&[0, 1]) - pi0 / (GOLDEN * GOLDEN)).abs() < 1e-12);
        assert!((mu.entropy() - GOLDEN.ln()).abs() < 1e-12);
        let ind01 = LocallyConstantFunction::from_fn(&sft, 2, |w| (w == [0, 1]) as u8 as f64).unwrap();
        assert!((mu.integrate(&ind01) - pi0 / (GOLDEN * GOLDEN)).abs() < 1e-12);
    }

    #[test]
    fn integrate_basics() {
        let sft = Sft::full(2).unwrap();
        let mu = GibbsMarkovMeasure::bernoulli(&sft, &[0.5, 0.5]).unwrap();
        assert!((mu.integrate(&LocallyConstantFunction::constant(&sft, 3.25)) - 3.25).abs() < 1e-14);
        assert!((mu.integrate(&LocallyConstantFunction::indicator(&sft, 1)) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn periodic_orbit_measure() {
        let sft = Sft::full(2).unwrap();
        let fixed = GibbsMarkovMeasure::periodic_orbit(&sft.periodic_point(vec![1]).unwrap()).unwrap();
        assert_eq!(fixed.entropy(), 0.0);
        let orbit = GibbsMarkovMeasure::periodic_orbit(&sft.periodic_point(vec![0, 0, 1]).unwrap()).unwrap();
        assert!((orbit.integrate(&LocallyConstantFunction::indicator(&sft, 1)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((orbit.cylinder(&[0, 1, 0, 0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(orbit.cylinder(&[1, 1]), 0.0);
    }

    #[test]
    fn equilibrium_identity_depth_three() {
        let sft = Sft::golden_mean();
        let phi = LocallyConstantFunction::from_fn(&sft, 3, |w| 0.3 * w[0] as f64 - 0.7 * w[2] as f64 + 0.1).unwrap();
        let p = pressure(&sft, &phi).unwrap();
        let mu = gibbs_measure(&sft, &phi).unwrap();
        assert!((mu.entropy() + mu.integrate(&phi) - p).abs() < 1e-9);
        assert!(mu.stationarity_defect() < 1e-12);
    }

    #[test]
    fn family_pressure_cases() {
        let sft = Sft::full(2).unwrap();
        let g = LocallyConstantFunction::from_fn(&sft, 1, |w| [0.2, -0.4][w[0]]).unwrap();
        let fp = family_pressure(&sft, &PotentialFamily::additive(g.clone()), 3).unwrap();
        assert!((fp.value - pressure(&sft, &g).unwrap()).abs() < 1e-11);
        assert_eq!(fp.n, 3);

        let c = 0.8;
        let fam = PotentialFamily::asymptotic(0, move |_, n| Ok(c * n as f64));
        let fp = family_pressure(&sft, &fam, 4).unwrap();
        assert!((fp.value - (2f64.ln() + c)).abs() < 1e-12);
    }

    #[test]
    fn family_pressure_scalar_cocycle() {
        let sft = Sft::full(2).unwrap();
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let rho = spectral_radius(&m).ln();
        let fam = MatrixCocycle::new(vec![m.clone(), m]).unwrap().log_norm_family();
        let target = 2f64.ln() + rho;
        // symmetric matrix: ‖M^n‖ = ρ^n, so every level is exact
        for n in [1, 4, 8] {
            assert!((family_pressure(&sft, &fam, n).unwrap().value - target).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_csv_shape() {
        let sft = Sft::full(2).unwrap();
        let rows = pressure_sweep(&sft, &LocallyConstantFunction::indicator(&sft, 1), &[0.0, 1.0]).unwrap();
        let csv = pressure_sweep_csv(&rows);
        assert!(csv.starts_with("parameter,pressure,entropy,integral\n0,0.693147180559945,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
