use sdym_core::numeric::{bpst_instanton, check_derivatives, evolutionary_rep, flow_residual_scaling, halton_points};
use sdym_core::prolong::extract_determining_system;
use sdym_core::solver::solve_ansatz;
use sdym_core::GaugeAlgebra;

#[test]
fn every_ansatz_basis_element_flows_at_second_order() {
    let g = GaugeAlgebra::su2();
    let sys = extract_determining_system(&g);
    let sol = solve_ansatz(2, 1, &g, &sys).unwrap();
    assert_eq!(sol.dimension(), 30);
    let f = bpst_instanton(1.0, [0.3, -0.2, 0.1, 0.4]).unwrap();
    let pts = halton_points(40, 3);
    for (i, gen) in sol.basis.iter().enumerate() {
        let q = evolutionary_rep(gen, &f).unwrap();
        let s = flow_residual_scaling(&f, &q, &[1e-1, 1e-2, 1e-3], &g.to_f64(), &pts)
            .unwrap()
            .fitted_slope;
        assert!((1.9..=2.1).contains(&s), "basis element {i}: slope {s}");
    }
}

#[test]
fn instanton_derivatives_match_central_differences() {
    let f = bpst_instanton(0.7, [-0.5, 0.2, 0.0, 1.0]).unwrap();
    let c = check_derivatives(&f, &halton_points(50, 100), 1e-4);
    assert!(c.within(1e-6), "{c:?}");
}
