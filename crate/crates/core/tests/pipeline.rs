use liouvillian::algebra::q;
use liouvillian::parser::parse_problem;
use liouvillian::pipeline::{run_propagator, run_solve, verify_report, Report, Target};

fn comparison<'a>(rep: &'a Report, quantity: &str) -> &'a liouvillian::pipeline::report::Comparison {
    rep.comparisons.iter().find(|c| c.quantity == quantity).unwrap_or_else(|| panic!("no comparison '{quantity}'"))
}

fn all_pass(rep: &Report) {
    for c in &rep.checks {
        assert!(c.pass, "{}: {} > {}", c.name, c.max_residual, c.tolerance);
    }
}

#[test]
fn ince_printed_data_agrees_except_the_case_label() {
    let rep = run_solve(&Target::ince(q(1), q(1))).unwrap();
    all_pass(&rep);
    for quantity in [
        "algebraic_b1",
        "algebraic_b0",
        "r",
        "case2_e_sets",
        "case2_e_infinity",
        "case2_d",
        "case2_theta",
        "case2_p",
        "case2_omegas",
        "case2_solutions",
        "case2_back_substituted",
        "mu0",
        "mu1",
    ] {
        assert!(comparison(&rep, quantity).structural, "{quantity}");
    }
    // case 1 already succeeds on the reduced form
    assert_eq!(rep.kovacic.as_ref().unwrap().case_label, "Case1");
    assert!(!comparison(&rep, "case_label").structural);
}

#[test]
fn ince_kappa_solutions_solve_the_equation() {
    for kappa in [(5, 3), (5, 4)] {
        let lambda = q(kappa.0) / q(kappa.1);
        let rep = run_solve(&Target::ince(lambda, q(1))).unwrap();
        all_pass(&rep);
        for quantity in ["algebraic_b0", "r", "case2_solutions", "solutions", "mu0", "mu1"] {
            assert!(comparison(&rep, quantity).structural, "κ = {kappa:?}: {quantity}");
        }
        assert!(rep.checks.iter().any(|c| c.name == "case2_solution_1_ode"));
    }
}

#[test]
fn tn_family() {
    let zero = run_solve(&Target::Tn { n: 0 }).unwrap();
    all_pass(&zero);
    assert_eq!(zero.values["lambda1"], "1/2");
    assert_eq!(zero.values["wronskian"], "-1");

    let minus_two = run_solve(&Target::Tn { n: -2 }).unwrap();
    all_pass(&minus_two);
    assert!(minus_two.checks.iter().any(|c| c.name == "exponents_s2_minus_s_plus_1"));
    assert_eq!(comparison(&minus_two, "solutions").verdict, "discrepant");

    let minus_four = run_solve(&Target::Tn { n: -4 }).unwrap();
    assert_eq!(minus_four.kovacic.as_ref().unwrap().case_label, "UnsupportedStructure");
    all_pass(&minus_four);
}

#[test]
fn reduced_zero_has_a_polynomial_basis() {
    let rep = run_solve(&Target::Reduced { r: "0".into(), var: "tau".into() }).unwrap();
    all_pass(&rep);
    assert_eq!(rep.solutions, vec!["1".to_string(), "tau".to_string()]);
}

#[test]
fn ince_propagator() {
    let rep = run_propagator(&Target::ince(q(1), q(1))).unwrap();
    all_pass(&rep);
    for name in ["schrodinger_pde", "rk4_alpha", "rk4_beta", "rk4_gamma"] {
        assert!(rep.checks.iter().any(|c| c.name == name), "{name}");
    }
    assert_eq!(comparison(&rep, "beta").verdict, "agrees");
    assert_ne!(comparison(&rep, "alpha").verdict, "discrepant");
    // the printed γ is not the y² coefficient of a solution
    assert_eq!(rep.values["printed_gamma_verdict"], "disagree");
}

#[test]
fn toys_match_their_printed_alpha_and_beta() {
    for id in [1, 2, 3, 5] {
        let rep = run_propagator(&Target::toy(id, &Default::default()).unwrap()).unwrap();
        all_pass(&rep);
        assert!(comparison(&rep, "alpha").structural, "toy {id} alpha");
        assert!(comparison(&rep, "beta").structural, "toy {id} beta");
    }
}

#[test]
fn toy_four_is_inconsistent() {
    let rep = run_propagator(&Target::toy(4, &Default::default()).unwrap()).unwrap();
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert!(failed.contains(&"riccati_alpha"));
    assert!(failed.contains(&"mu0_slope_at_zero"));
}

#[test]
fn toy_parameters_are_bound() {
    let mut set = std::collections::BTreeMap::new();
    set.insert("a0".to_string(), q(3));
    let rep = run_propagator(&Target::toy(2, &set).unwrap()).unwrap();
    all_pass(&rep);
    assert_eq!(rep.target, "toy --id 2 --set a0=3");
    assert!(Target::toy(2, &[("zz".to_string(), q(1))].into()).is_err());
}

#[test]
fn verify_round_trip() {
    let rep = run_propagator(&Target::ince(q(1), q(1))).unwrap();
    let back = Report::from_json(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
    assert!(verify_report(&back).unwrap().passed());

    let mut tampered = back.clone();
    tampered.mu0 = Some("sin(t)*cosh(2*t)+cos(t)*sinh(t)".into());
    assert!(!verify_report(&tampered).unwrap().passed());

    let mut empty = back;
    empty.checks.clear();
    let out = verify_report(&empty).unwrap();
    assert!(out.passed());
    assert!(!out.warnings.is_empty());
}

#[test]
fn problem_file_propagator() {
    let spec = parse_problem(
        "kind: hamiltonian\na: 1/2\nb: 1/2\nc: 0\n",
    )
    .unwrap();
    let rep = run_propagator(&Target::File { spec, name: "oscillator".into() }).unwrap();
    all_pass(&rep);
}
