use std::sync::Arc;

use thermoflow::equivalence::{
    equivalence_pipeline, AdditiveFlowFamily, BoundedDistortionFamily, CocycleFlowFamily, FlowFamily, PipelineOptions,
};
use thermoflow::suspension::{lift, BumpProfile, SuspensionFlow};
use thermoflow::{LocallyConstantFunction, MatrixCocycle, Sft};

fn uneven() -> SuspensionFlow {
    SuspensionFlow::symbol_roof(Sft::full(2).unwrap(), &[1.0, 2.0]).unwrap()
}

fn bundled() -> Vec<(SuspensionFlow, Arc<dyn FlowFamily>)> {
    let flow = uneven();
    let xi = LocallyConstantFunction::from_fn(flow.base(), 2, |w| 0.5 + w[0] as f64 - 0.75 * w[1] as f64).unwrap();
    let b = lift(&flow, &xi, BumpProfile::Smoothstep).unwrap();
    let d = LocallyConstantFunction::from_fn(flow.base(), 1, |w| 1.0 + w[0] as f64).unwrap();
    let golden = SuspensionFlow::symbol_roof(Sft::golden_mean(), &[0.5, 1.5]).unwrap();
    vec![
        (flow.clone(), Arc::new(CocycleFlowFamily::new(MatrixCocycle::bundled_positive()))),
        (flow, Arc::new(BoundedDistortionFamily::new(b, d).unwrap())),
        (golden, Arc::new(CocycleFlowFamily::new(MatrixCocycle::bundled_positive()))),
    ]
}

#[test]
fn pipeline_closure_for_lifted_generators() {
    for flow in [uneven(), SuspensionFlow::symbol_roof(Sft::golden_mean(), &[0.5, 1.5]).unwrap()] {
        for profile in BumpProfile::ALL {
            let xi = LocallyConstantFunction::from_fn(flow.base(), 1, |w| 1.5 - 2.0 * w[0] as f64).unwrap();
            let b0 = lift(&flow, &xi, profile).unwrap();
            let options = PipelineOptions {
                n: 1,
                profile,
                ..PipelineOptions::default()
            };
            let report = equivalence_pipeline(&flow, Arc::new(AdditiveFlowFamily::new(b0)), &options).unwrap();
            for (t, d) in &report.flow_defect {
                assert!(*d < 1e-8, "t={t} defect={d}");
            }
        }
    }
}

#[test]
fn crossing_defect_decays() {
    for (flow, family) in bundled() {
        let report = equivalence_pipeline(&flow, family.clone(), &PipelineOptions::default()).unwrap();
        let first = report.crossing_defect.first().unwrap().1;
        let last = report.crossing_defect.last().unwrap().1;
        assert!(last <= first / 4.0, "{}: {first} -> {last}", family.name());
    }
}

#[test]
fn flow_defect_curve_is_cauchy_like() {
    for (flow, family) in bundled() {
        let report = equivalence_pipeline(&flow, family.clone(), &PipelineOptions::default()).unwrap();
        let sup = flow.roof().sup();
        let tail: Vec<f64> = report.flow_defect.iter().filter(|(t, _)| *t >= 4.0 * sup).map(|p| p.1).collect();
        let gaps: Vec<f64> = tail.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
        for g in gaps.windows(2) {
            assert!(g[1] <= g[0], "{}: gaps {gaps:?}", family.name());
        }
    }
}

#[test]
fn cocycle_flow_defect_decays() {
    let flow = uneven();
    let sup = flow.roof().sup();
    let report = equivalence_pipeline(
        &flow,
        Arc::new(CocycleFlowFamily::new(MatrixCocycle::bundled_positive())),
        &PipelineOptions::default(),
    )
    .unwrap();
    let at = |t: f64| report.flow_defect.iter().find(|p| (p.0 - t).abs() < 1e-9).unwrap().1;
    assert!(at(64.0 * sup) < 0.25 * at(4.0 * sup));
}
