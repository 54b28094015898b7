mod common;

#[test]
fn objective_on_the_two_truck_edge() {
    common::objective_pair().unwrap();
}

#[test]
fn random_rollouts_conserve_distance_and_respect_the_mask() {
    let audit = common::audit_rollouts(100).unwrap();
    common::conservation(&audit).unwrap();
    common::mask_soundness(&audit).unwrap();
}

#[test]
fn random_factories_are_reproducible() {
    let a = common::random_factory(3).make().unwrap();
    let b = common::random_factory(3).make().unwrap();
    assert_eq!(a.trucks(), b.trucks());
}
