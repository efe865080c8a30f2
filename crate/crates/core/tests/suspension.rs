use proptest::prelude::*;
use thermoflow::suspension::{
    abramov_entropy, bundled_pairs, flow_pressure, i_g_function, lift, orbit_integral, pressure_root, BumpProfile,
    FlowFunction, FlowPoint, SuspensionFlow,
};
use thermoflow::{pressure, LocallyConstantFunction, Sft};

fn flows() -> Vec<SuspensionFlow> {
    let full2 = Sft::full(2).unwrap();
    vec![
        SuspensionFlow::symbol_roof(full2.clone(), &[1.0, 2.0]).unwrap(),
        SuspensionFlow::symbol_roof(Sft::golden_mean(), &[0.5, 1.5]).unwrap(),
        SuspensionFlow::new(
            full2.clone(),
            LocallyConstantFunction::from_fn(&full2, 2, |w| [1.0, 1.5, 0.5, 2.0][2 * w[0] + w[1]]).unwrap(),
        )
        .unwrap(),
    ]
}

fn point(flow: &SuspensionFlow, word: &[usize], frac: f64) -> Option<FlowPoint> {
    let base = flow.base().periodic_extension(word).ok()?;
    let top = flow.roof().at(&base);
    flow.point(base, frac * top).ok()
}

proptest! {
    #[test]
    fn flow_semigroup(
        f in 0usize..3,
        word in prop::collection::vec(0usize..2, 1..8),
        frac in 0.0f64..1.0,
        t in 0.0f64..20.0,
        s in 0.0f64..20.0,
    ) {
        let flow = &flows()[f];
        let Some(p) = point(flow, &word, frac) else { return Ok(()) };
        let direct = flow.flow_map(&p, t + s).unwrap();
        let composed = flow.flow_map(&flow.flow_map(&p, t).unwrap(), s).unwrap();
        prop_assert_eq!(&direct.base, &composed.base);
        prop_assert!((direct.height - composed.height).abs() < 1e-12);
    }

    #[test]
    fn orbit_integrals_are_additive(
        f in 0usize..3,
        word in prop::collection::vec(0usize..2, 1..8),
        frac in 0.0f64..1.0,
        t in 0.0f64..15.0,
        s in 0.0f64..15.0,
        profile in 0usize..3,
    ) {
        let flow = &flows()[f];
        let Some(p) = point(flow, &word, frac) else { return Ok(()) };
        let xi = LocallyConstantFunction::from_fn(flow.base(), 2, |w| 0.3 + w[0] as f64 - 0.8 * w[1] as f64).unwrap();
        let b = lift(flow, &xi, BumpProfile::ALL[profile]).unwrap();
        let whole = orbit_integral(flow, &b, &p, t + s).unwrap();
        let split = orbit_integral(flow, &b, &p, t).unwrap()
            + orbit_integral(flow, &b, &flow.flow_map(&p, t).unwrap(), s).unwrap();
        prop_assert!((whole - split).abs() < 1e-9);
    }
}

#[test]
fn birkhoff_roof_identity() {
    for flow in flows() {
        let sft = flow.base();
        let xi = LocallyConstantFunction::from_fn(sft, 2, |w| 1.0 - 0.5 * w[0] as f64 + 0.25 * w[1] as f64).unwrap();
        let roof = flow.roof().function().clone();
        let tau_fn = roof.clone();
        let xi_fn = xi.clone();
        let quadrature = FlowFunction::formula(2, move |w, s| {
            let top = tau_fn.value(w);
            xi_fn.value(w) / top * BumpProfile::Smoothstep.dpsi(s / top)
        });
        for profile in BumpProfile::ALL {
            let b = lift(&flow, &xi, profile).unwrap();
            for word in [vec![0], vec![0, 1], vec![1, 1, 0], vec![0, 1, 0, 1, 1]] {
                let Ok(x) = sft.periodic_extension(&word) else { continue };
                for n in 1..=7 {
                    let p = flow.point(x.clone(), 0.0).unwrap();
                    let t = flow.tau_n(&x, n);
                    let symbols = x.forward(n + 1);
                    let expect: f64 = (0..n).map(|k| xi.value(&symbols[k..])).sum();
                    // split each flight at a third of the horizon to exercise partial segments
                    let split = orbit_integral(&flow, &b, &p, t / 3.0).unwrap()
                        + orbit_integral(&flow, &b, &flow.flow_map(&p, t / 3.0).unwrap(), t - t / 3.0).unwrap();
                    assert!((split - expect).abs() < 1e-9, "{profile:?} {word:?} n={n}");
                    let quad = orbit_integral(&flow, &quadrature, &p, t).unwrap();
                    assert!((quad - expect).abs() < 1e-9, "quadrature {word:?} n={n}");
                }
            }
        }
    }
}

#[test]
fn abramov_consistency() {
    for pair in bundled_pairs() {
        let sft = pair.flow.base();
        let depth = pair.flow.roof().depth().max(pair.nu.order());
        let mut mean_roof = 0.0;
        sft.for_each_word(depth, |w| mean_roof += pair.nu.cylinder(w) * pair.flow.roof().value(w))
            .unwrap();
        let h = abramov_entropy(&pair.flow, &pair.nu);
        assert!((h * mean_roof - pair.nu.entropy()).abs() < 1e-9, "{}", pair.name);
    }
}

#[test]
fn unit_roof_flow_pressure_is_base_pressure() {
    for sft in [Sft::full(2).unwrap(), Sft::golden_mean(), Sft::full(3).unwrap()] {
        let flow = SuspensionFlow::constant_roof(sft.clone(), 1.0).unwrap();
        let xi = LocallyConstantFunction::from_fn(&sft, 2, |w| 0.4 * w[0] as f64 - 0.9 * w[1] as f64).unwrap();
        for g in [
            lift(&flow, &xi, BumpProfile::SineSquared).unwrap(),
            FlowFunction::formula(1, |w, s| w[0] as f64 * s),
        ] {
            let ig = i_g_function(&flow, &g).unwrap();
            assert!((flow_pressure(&flow, &g).unwrap() - pressure(&sft, &ig).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn flow_pressure_root_against_scalar_equation() {
    // P(−s·τ) = 0 for τ = (1, 2) on the full shift reads e^{−s} + e^{−2s} = 1
    let flow = SuspensionFlow::symbol_roof(Sft::full(2).unwrap(), &[1.0, 2.0]).unwrap();
    let root = flow_pressure(&flow, &FlowFunction::constant(0.0)).unwrap();
    assert!(((-root).exp() + (-2.0 * root).exp() - 1.0).abs() < 1e-10);
    let sft = flow.base();
    let again = pressure_root(sft, &LocallyConstantFunction::constant(sft, 0.0), flow.roof().function()).unwrap();
    assert_eq!(root, again);
}
