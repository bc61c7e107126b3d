//! Finite-difference checks of the free Green tensors.

mod common;

#[test]
fn helmholtz_residual_vanishes_away_from_the_source() {
    let r = common::helmholtz_residual();
    assert!(r < 1e-6, "{r}");
}

#[test]
fn electric_and_magnetic_columns_are_divergence_free() {
    let r = common::divergence_residual();
    assert!(r < 1e-6, "{r}");
}

#[test]
fn curl_of_electric_block_is_the_mixed_block() {
    let r = common::curl_residual();
    assert!(r < 1e-6, "{r}");
}

#[test]
fn mixed_blocks_are_antisymmetric() {
    assert!(common::antisymmetry_exact());
}

#[test]
fn blocks_are_reciprocal() {
    assert!(common::reciprocity_exact());
}
