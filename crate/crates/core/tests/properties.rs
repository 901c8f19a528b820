use liouvillian::verify::properties::*;

const SEED: u64 = 20_240_601;

fn ok(o: PropertyOutcome) {
    assert!(o.passed, "{}: {}", o.name, o.detail);
}

#[test]
fn gaussian_rationals_form_a_field() {
    ok(field_axioms(SEED, 1000));
}

#[test]
fn pretty_print_then_parse_is_identity() {
    ok(parser_round_trip(SEED, 1000));
}

#[test]
fn simplify_is_idempotent_and_value_preserving() {
    ok(simplify_idempotent(SEED, 500));
}

#[test]
fn derivative_of_integral() {
    ok(differentiate_integrate(SEED, 200));
}

#[test]
fn normalized_rational_functions_are_fixed_points() {
    ok(normalization_idempotent(SEED, 500));
}

#[test]
fn finite_differences_converge_at_their_order() {
    ok(fd_convergence());
}

#[test]
fn rk4_is_fourth_order() {
    ok(rk4_convergence());
}

#[test]
fn other_seeds() {
    for seed in [1, 2, 3] {
        ok(field_axioms(seed, 200));
        ok(parser_round_trip(seed, 200));
    }
}
