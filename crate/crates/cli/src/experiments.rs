//! Preparation and execution of each experiment kind.

use std::sync::Arc;

use serde_json::{json, Value};
use thermoflow::embedding::{
    average_operator, bbp_test, certify, resolvent_solve, sawtooth, solve_embedding, torus_grid, BbpOptions,
    EmbeddingOutcome, ExpObservable, Observable, RealFlow, ScalarExpFlow, TorusLinearFlow, TrigPolynomial,
};
use thermoflow::equivalence::{
    equivalence_pipeline, AdditiveFlowFamily, BoundedDistortionFamily, CocycleFlowFamily, FlowFamily,
    LinearFlowFamily, PipelineOptions,
};
use thermoflow::multifractal::SpectrumProblem;
use thermoflow::numeric::{fmt15, simpson};
use thermoflow::suspension::{abramov_entropy, flow_pressure, i_g_function, lift, BumpProfile, FlowFunction, SuspensionFlow};
use thermoflow::transfer::{pressure_sweep, pressure_sweep_csv};
use thermoflow::{gibbs_measure, pressure, LocallyConstantFunction, Sft};

use crate::config::{EmbeddingMode, ExperimentConfig, FamilyKind, Kind};
use crate::inputs::Inputs;
use crate::InputError;

const DEFAULT_SWEEP: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
const DEFAULT_GRID: usize = 16;
const DEFAULT_EXCLUSION: f64 = 0.05;
const DEFAULT_SUSPENSION_TOL: f64 = 1e-9;
const AVERAGE_CHECK_PANELS: usize = 4096;

/// Loaded inputs of one experiment.
pub enum Prepared {
    Pressure {
        sft: Sft,
        potential: LocallyConstantFunction,
        parameters: Vec<f64>,
    },
    Suspension {
        flow: SuspensionFlow,
        xi: Option<LocallyConstantFunction>,
        profile: BumpProfile,
    },
    Equivalence {
        flow: SuspensionFlow,
        family: Arc<dyn FlowFamily>,
        options: PipelineOptions,
    },
    Spectrum {
        problem: SpectrumProblem,
        alphas: Vec<f64>,
    },
    Bbp {
        flow: TorusLinearFlow,
        observable: Observable,
        sawtooth: bool,
        grid: usize,
        width: f64,
    },
    Solve {
        flow: TorusLinearFlow,
        btilde: TrigPolynomial,
    },
    Resolvent {
        flow: TorusLinearFlow,
        b: TrigPolynomial,
        lambda: f64,
    },
    Average {
        domain: ScalarExpFlow,
        observable: ExpObservable,
    },
    Coboundary {
        flow: TorusLinearFlow,
        g: TrigPolynomial,
        grid: usize,
    },
}

/// What a run produced.
pub struct RunOutput {
    pub label: String,
    pub value: f64,
    pub note: Option<String>,
    pub pass: Option<bool>,
    pub files: Vec<(String, FileBody)>,
}

pub enum FileBody {
    Csv(String),
    Json(Value),
}

fn need<'a, T>(value: &'a Option<T>, field: &str, kind: &str) -> Result<&'a T, InputError> {
    value
        .as_ref()
        .ok_or_else(|| InputError(format!("{kind} experiments need `{field}`")))
}

fn torus(direction: &Option<Vec<f64>>) -> Result<TorusLinearFlow, InputError> {
    Ok(TorusLinearFlow::new(need(direction, "direction", "embedding")?.clone())?)
}

fn exp_observable(spec: &str) -> Result<ExpObservable, InputError> {
    if spec == "log" {
        return Ok(ExpObservable::log());
    }
    if let Some(d) = spec.strip_prefix("power:") {
        let d: i32 = d
            .parse()
            .map_err(|_| InputError(format!("bad power in observable '{spec}'")))?;
        if d == 0 {
            return Err(InputError("power 0 is a constant; use a nonzero power".into()));
        }
        return Ok(ExpObservable::monomial(d, 1.0));
    }
    Err(InputError(format!("unknown observable '{spec}' (expected log or power:<d>)")))
}

/// Loads and checks everything an experiment needs.
pub fn prepare(config: &ExperimentConfig, inputs: &Inputs) -> Result<Prepared, InputError> {
    match config.kind {
        Kind::Pressure => {
            let sft = inputs.sft(need(&config.sft, "sft", "pressure")?)?;
            let potential = match &config.potential {
                Some(p) => inputs.table(p, &sft)?,
                None => LocallyConstantFunction::constant(&sft, 0.0),
            };
            if !sft.is_primitive() {
                return Err(InputError("the transition matrix is not primitive".into()));
            }
            Ok(Prepared::Pressure {
                sft,
                potential,
                parameters: config.parameters.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec()),
            })
        }
        Kind::Suspension => {
            let flow = inputs.flow(need(&config.flow, "flow", "suspension")?)?;
            let xi = config
                .potential
                .as_ref()
                .map(|p| inputs.table(p, flow.base()))
                .transpose()?;
            Ok(Prepared::Suspension {
                flow,
                xi,
                profile: config.profile.unwrap_or_default(),
            })
        }
        Kind::Equivalence => {
            let flow = inputs.flow(need(&config.flow, "flow", "equivalence")?)?;
            let profile = config.profile.unwrap_or_default();
            let family: Arc<dyn FlowFamily> = match need(&config.family, "family", "equivalence")? {
                FamilyKind::Cocycle => {
                    let cocycle = inputs.cocycle(need(&config.cocycle, "cocycle", "cocycle-family")?)?;
                    if cocycle.symbols() != flow.base().alphabet_size() {
                        return Err(InputError("the cocycle needs one matrix per base symbol".into()));
                    }
                    Arc::new(CocycleFlowFamily::new(cocycle))
                }
                FamilyKind::Linear => Arc::new(LinearFlowFamily::new(*need(&config.rate, "rate", "linear-family")?)),
                FamilyKind::Lifted => {
                    let xi = inputs.table(need(&config.xi, "xi", "lifted-family")?, flow.base())?;
                    Arc::new(AdditiveFlowFamily::new(lift(&flow, &xi, profile)?))
                }
                FamilyKind::BoundedDistortion => {
                    let xi = inputs.table(need(&config.xi, "xi", "bounded-distortion")?, flow.base())?;
                    let d = inputs.table(need(&config.distortion, "distortion", "bounded-distortion")?, flow.base())?;
                    Arc::new(BoundedDistortionFamily::new(lift(&flow, &xi, profile)?, d)?)
                }
            };
            let defaults = PipelineOptions::default();
            let options = PipelineOptions {
                n: config.n.unwrap_or(defaults.n),
                horizon: config.horizon,
                profile,
                heights: config.heights.unwrap_or(defaults.heights),
                cylinder_budget: config.cylinder_budget.unwrap_or(defaults.cylinder_budget),
                threshold: config.threshold,
            };
            if options.n == 0 || options.heights == 0 || options.cylinder_budget == 0 {
                return Err(InputError("n, heights and cylinder_budget must be positive".into()));
            }
            Ok(Prepared::Equivalence { flow, family, options })
        }
        Kind::Spectrum => {
            let sft = inputs.sft(need(&config.sft, "sft", "spectrum")?)?;
            let a = inputs.table(need(&config.a, "a", "spectrum")?, &sft)?;
            let b = inputs.table(need(&config.b, "b", "spectrum")?, &sft)?;
            let u = match &config.u {
                Some(u) => inputs.table(u, &sft)?,
                None => LocallyConstantFunction::constant(&sft, 1.0),
            };
            let alphas = need(&config.alphas, "alphas", "spectrum")?.clone();
            if alphas.is_empty() {
                return Err(InputError("`alphas` is empty".into()));
            }
            Ok(Prepared::Spectrum {
                problem: SpectrumProblem::from_representatives(&sft, a, b, u)?,
                alphas,
            })
        }
        Kind::Embedding => match need(&config.mode, "mode", "embedding")? {
            EmbeddingMode::Bbp => {
                let flow = torus(&config.direction)?;
                let (observable, is_sawtooth) = match (&config.observable, &config.trig) {
                    (Some(o), None) if o == "sawtooth" => (Observable::function(sawtooth), true),
                    (None, Some(t)) => (Observable::Trig(inputs.trig(t)?), false),
                    _ => return Err(InputError("bbp needs `observable: sawtooth` or a `trig` file".into())),
                };
                if let Observable::Trig(p) = &observable {
                    if p.dim() != flow.dim() {
                        return Err(InputError("trig polynomial and direction differ in dimension".into()));
                    }
                }
                Ok(Prepared::Bbp {
                    flow,
                    observable,
                    sawtooth: is_sawtooth,
                    grid: config.grid.unwrap_or(DEFAULT_GRID).max(1),
                    width: config.exclusion_width.unwrap_or(DEFAULT_EXCLUSION),
                })
            }
            EmbeddingMode::Solve => Ok(Prepared::Solve {
                flow: torus(&config.direction)?,
                btilde: inputs.trig(need(&config.trig, "trig", "solve")?)?,
            }),
            EmbeddingMode::Resolvent => Ok(Prepared::Resolvent {
                flow: torus(&config.direction)?,
                b: inputs.trig(need(&config.trig, "trig", "resolvent")?)?,
                lambda: *need(&config.lambda, "lambda", "resolvent")?,
            }),
            EmbeddingMode::Average => Ok(Prepared::Average {
                domain: config.domain.unwrap_or(ScalarExpFlow::PositiveHalfLine),
                observable: exp_observable(need(&config.observable, "observable", "average")?)?,
            }),
            EmbeddingMode::Coboundary => Ok(Prepared::Coboundary {
                flow: torus(&config.direction)?,
                g: inputs.trig(need(&config.trig, "trig", "coboundary")?)?,
                grid: config.grid.unwrap_or(DEFAULT_GRID).max(1),
            }),
        },
    }
}

fn within(value: f64, config: &ExperimentConfig) -> Option<bool> {
    match (config.expected, config.tolerance) {
        (Some(e), Some(tol)) => Some((value - e).abs() <= tol),
        _ => None,
    }
}

fn below(value: f64, bound: Option<f64>) -> Option<bool> {
    bound.map(|b| value <= b)
}

fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x && y),
    }
}

/// Executes a prepared experiment.
pub fn run(config: &ExperimentConfig, prepared: Prepared) -> Result<RunOutput, InputError> {
    match prepared {
        Prepared::Pressure {
            sft,
            potential,
            parameters,
        } => {
            let value = pressure(&sft, &potential)?;
            let mu = gibbs_measure(&sft, &potential)?;
            let rows = pressure_sweep(&sft, &potential, &parameters)?;
            let summary = json!({
                "pressure": value,
                "entropy": mu.entropy(),
                "integral": mu.integrate(&potential),
                "alphabet_size": sft.alphabet_size(),
                "potential_depth": potential.depth(),
            });
            Ok(RunOutput {
                label: "pressure".into(),
                value,
                note: None,
                pass: within(value, config),
                files: vec![
                    ("summary.json".into(), FileBody::Json(summary)),
                    ("pressure.csv".into(), FileBody::Csv(pressure_sweep_csv(&rows))),
                ],
            })
        }
        Prepared::Suspension { flow, xi, profile } => {
            let g = match &xi {
                Some(xi) => lift(&flow, xi, profile)?,
                None => FlowFunction::constant(0.0),
            };
            let value = flow_pressure(&flow, &g)?;
            let ig = i_g_function(&flow, &g)?;
            let tau = flow.roof().function();
            let potential = LocallyConstantFunction::linear_combination(flow.base(), &[(1.0, &ig), (-value, tau)], 0.0)?;
            let nu = gibbs_measure(flow.base(), &potential)?;
            let mean_roof = nu.integrate(tau);
            let entropy = abramov_entropy(&flow, &nu);
            let integral = nu.integrate(&ig) / mean_roof;
            let residual = (entropy + integral - value).abs();
            let tol = config.tolerance.unwrap_or(DEFAULT_SUSPENSION_TOL);
            let summary = json!({
                "flow_pressure": value,
                "base_entropy": nu.entropy(),
                "mean_roof": mean_roof,
                "flow_entropy": entropy,
                "flow_integral": integral,
                "variational_residual": residual,
                "profile": profile.id(),
            });
            Ok(RunOutput {
                label: "flow pressure".into(),
                value,
                note: Some(format!("variational residual {}", crate::output::human(residual))),
                pass: and(within(value, config), Some(residual <= tol)),
                files: vec![("summary.json".into(), FileBody::Json(summary))],
            })
        }
        Prepared::Equivalence { flow, family, options } => {
            let report = equivalence_pipeline(&flow, family, &options)?;
            let value = report.final_flow_defect();
            let json = serde_json::to_value(&report).map_err(|e| InputError(e.to_string()))?;
            let crossing = {
                let mut out = String::from("t,defect\n");
                for (t, d) in &report.crossing_defect {
                    out.push_str(&format!("{},{}\n", fmt15(*t), fmt15(*d)));
                }
                out
            };
            Ok(RunOutput {
                label: format!("flow defect (T = {})", fmt15(report.horizon)),
                value,
                note: None,
                pass: and(below(value, options.threshold), within(value, config)),
                files: vec![
                    ("report.json".into(), FileBody::Json(json)),
                    ("flow_defect.csv".into(), FileBody::Csv(report.flow_defect_csv())),
                    ("crossing_defect.csv".into(), FileBody::Csv(crossing)),
                    ("discrete_defect.csv".into(), FileBody::Csv(report.discrete_defect_csv())),
                ],
            })
        }
        Prepared::Spectrum { problem, alphas } => {
            let result = problem.spectrum(&alphas)?;
            let gap = result
                .rows
                .iter()
                .filter_map(|r| Some((r.formula2.dim()? - r.formula1.dim()?).abs()))
                .fold(0.0, f64::max);
            let empty = result.rows.iter().filter(|r| r.formula2.dim().is_none()).count();
            let json = serde_json::to_value(&result).map_err(|e| InputError(e.to_string()))?;
            Ok(RunOutput {
                label: "duality gap".into(),
                value: gap,
                note: Some(format!("peak {}, {empty} empty level sets", fmt15(result.peak))),
                pass: below(gap, config.tolerance),
                files: vec![
                    ("spectrum.json".into(), FileBody::Json(json)),
                    ("spectrum.csv".into(), FileBody::Csv(result.to_csv())),
                ],
            })
        }
        Prepared::Bbp {
            flow,
            observable,
            sawtooth: is_sawtooth,
            grid,
            width,
        } => {
            let samples = torus_grid(flow.dim(), grid);
            let exclude = move |x: &[f64]| {
                let d = x.iter().sum::<f64>().rem_euclid(1.0);
                d.min(1.0 - d) < width
            };
            let report = bbp_test(
                &RealFlow::Torus(flow.clone()),
                &observable,
                &samples,
                is_sawtooth.then_some(&exclude as &dyn Fn(&[f64]) -> bool),
                &BbpOptions::default(),
            )?;
            let obstructed = report.obstruction.is_some();
            let note = if obstructed {
                format!("obstruction: derivative ≈ {}", fmt15(report.mean))
            } else if report.inconclusive {
                "inconclusive: derivative estimates did not settle".into()
            } else {
                "no obstruction: derivative has mean zero".into()
            };
            let expectation = config.expect_obstruction.map(|e| e == obstructed);
            let json = json!({
                "direction": flow.alpha(),
                "report": serde_json::to_value(&report).map_err(|e| InputError(e.to_string()))?,
            });
            Ok(RunOutput {
                label: "mean orbit derivative".into(),
                value: report.mean,
                note: Some(note),
                pass: and(expectation, within(report.mean, config)),
                files: vec![("report.json".into(), FileBody::Json(json))],
            })
        }
        Prepared::Solve { flow, btilde } => match solve_embedding(&flow, &btilde)? {
            EmbeddingOutcome::Solved { b, round_trip_error } => {
                let json = json!({"status": "solved", "btilde": btilde, "b": b, "round_trip_error": round_trip_error});
                Ok(RunOutput {
                    label: "round-trip error".into(),
                    value: round_trip_error,
                    note: None,
                    pass: and(
                        config.expect_obstruction.map(|e| !e),
                        below(round_trip_error, config.tolerance),
                    ),
                    files: vec![("report.json".into(), FileBody::Json(json))],
                })
            }
            EmbeddingOutcome::Obstructed(report) => {
                let count = report.resonant.len() + report.small_divisors.len();
                let json = json!({"status": "obstructed", "btilde": btilde, "obstruction": report});
                Ok(RunOutput {
                    label: "obstructed frequencies".into(),
                    value: count as f64,
                    note: Some(format!("obstruction: {count} resonant or small-divisor frequencies")),
                    pass: Some(config.expect_obstruction == Some(true)),
                    files: vec![("report.json".into(), FileBody::Json(json))],
                })
            }
        },
        Prepared::Resolvent { flow, b, lambda } => {
            let solution = resolvent_solve(&flow, &b, lambda)?;
            let avg = average_operator(&RealFlow::Torus(flow), &Observable::Trig(solution.a.clone()))?;
            let table: Vec<Value> = torus_grid(1, 32)
                .iter()
                .map(|x| {
                    let r = avg.eval(x) - lambda * solution.a.eval(x) - b.eval(x);
                    json!({"x": x[0], "residual": r})
                })
                .collect();
            let json = json!({"solution": solution, "pointwise_residuals": table});
            Ok(RunOutput {
                label: "resolvent residual".into(),
                value: solution.residual,
                note: None,
                pass: below(solution.residual, config.tolerance),
                files: vec![("report.json".into(), FileBody::Json(json))],
            })
        }
        Prepared::Average { domain, observable } => {
            let flow = RealFlow::Exp(domain);
            let analytic = average_operator(&flow, &Observable::Exp(observable.clone()))?;
            let points: Vec<f64> = match domain {
                ScalarExpFlow::PositiveHalfLine => (1..=16).map(|i| 0.25 * i as f64).collect(),
                ScalarExpFlow::RealLine => (-8..=8).map(|i| 0.25 * i as f64).collect(),
            };
            let mut worst: f64 = 0.0;
            let rows: Vec<Value> = points
                .iter()
                .map(|&x| {
                    let exact = analytic.eval(&[x]);
                    let quad = simpson(|s| observable.eval(s.exp() * x), 0.0, 1.0, AVERAGE_CHECK_PANELS);
                    let err = (exact - quad).abs() / exact.abs().max(1.0);
                    worst = worst.max(err);
                    json!({"x": x, "average": exact, "quadrature": quad})
                })
                .collect();
            let Observable::Exp(closed) = analytic else {
                return Err(InputError("no closed form for this observable".into()));
            };
            let json = json!({"domain": domain, "observable": observable, "average": closed, "checks": rows});
            Ok(RunOutput {
                label: "closed form vs quadrature".into(),
                value: worst,
                note: None,
                pass: below(worst, config.tolerance),
                files: vec![("report.json".into(), FileBody::Json(json))],
            })
        }
        Prepared::Coboundary { flow, g, grid } => {
            let b = g.derivative_along(&flow);
            let real = RealFlow::Torus(flow.clone());
            let lift = certify(&real, Observable::Trig(b.clone()), &Observable::Trig(g.clone()), &torus_grid(flow.dim(), grid))?;
            let worst = lift.worst_residual();
            let json = json!({"g": g, "b": b, "certificate": lift.certificate});
            Ok(RunOutput {
                label: "certificate residual".into(),
                value: worst,
                note: None,
                pass: below(worst, config.tolerance),
                files: vec![("report.json".into(), FileBody::Json(json))],
            })
        }
    }
}
