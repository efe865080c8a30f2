use nalgebra::DMatrix;
use thermoflow::potential::{
    almost_additivity_constant, cuneo_candidate, cylinder_samples, equivalence_defect, equivalence_defect_auto,
};
use thermoflow::{LocallyConstantFunction, MatrixCocycle, PotentialFamily, Sft};

fn cocycles() -> Vec<(Sft, MatrixCocycle)> {
    let full2 = Sft::full(2).unwrap();
    let full3 = Sft::full(3).unwrap();
    vec![
        (full2.clone(), MatrixCocycle::bundled_positive()),
        (
            full3,
            MatrixCocycle::new(vec![
                DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 1.0]),
                DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 1.0]),
                DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 3.0]),
            ])
            .unwrap(),
        ),
        (
            full2,
            MatrixCocycle::new(vec![
                DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0]),
                DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 3.0, 1.0]),
            ])
            .unwrap(),
        ),
    ]
}

#[test]
fn additive_families_have_zero_defect() {
    for sft in [Sft::full(2).unwrap(), Sft::golden_mean()] {
        let g = LocallyConstantFunction::from_fn(&sft, 3, |w| w[0] as f64 - 0.5 * w[1] as f64 + 0.125 * w[2] as f64)
            .unwrap();
        let fam = PotentialFamily::additive(g.clone());
        for n in 3..=10 {
            assert_eq!(equivalence_defect(&sft, &fam, &g, n).unwrap(), 0.0);
        }
    }
}

#[test]
fn candidate_defect_decreases_for_cocycles() {
    for (sft, cocycle) in cocycles() {
        let fam = cocycle.log_norm_family();
        let samples = cylinder_samples(&sft, 512).unwrap();
        let coarse = cuneo_candidate(&sft, &fam, 2).unwrap();
        let fine = cuneo_candidate(&sft, &fam, 8).unwrap();
        let (d_coarse, _) = equivalence_defect_auto(&sft, &fam, &coarse, 16, &samples).unwrap();
        let (d_fine, _) = equivalence_defect_auto(&sft, &fam, &fine, 64, &samples).unwrap();
        assert!(d_fine < d_coarse, "{d_fine} !< {d_coarse}");
    }
}

#[test]
fn almost_additivity_constant_stabilizes() {
    let sft = Sft::full(2).unwrap();
    let fam = MatrixCocycle::bundled_positive().log_norm_family();
    let c10 = almost_additivity_constant(&sft, &fam, 10).unwrap();
    let c12 = almost_additivity_constant(&sft, &fam, 12).unwrap();
    assert!(c12 >= c10);
    assert!(c12 - c10 < 1e-8, "{c10} {c12}");
}

#[test]
fn rank_one_cocycle_constant_is_exact() {
    // M_a = u_a v_aᵀ gives log‖M^{(n)}‖ = Σ log(v·u) terms plus boundary terms only
    let u = [[1.0, 2.0], [3.0, 1.0]];
    let v = [[2.0, 1.0], [1.0, 1.0]];
    let m = |a: usize| DMatrix::from_fn(2, 2, |i, j| u[a][i] * v[a][j]);
    let cocycle = MatrixCocycle::new(vec![m(0), m(1)]).unwrap();
    let sft = Sft::full(2).unwrap();
    let fam = cocycle.log_norm_family();
    let c6 = almost_additivity_constant(&sft, &fam, 6).unwrap();
    let c10 = almost_additivity_constant(&sft, &fam, 10).unwrap();
    assert!((c10 - c6).abs() < 1e-12, "{c6} {c10}");
}
