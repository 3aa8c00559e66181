use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::maps::{sample_generators, GeneratorData};

/// The certified `r = 2`, height 5 tuple sampled from seed 1.
pub fn fixture() -> Vec<GeneratorData> {
    sample_generators(2, 5, &mut ChaCha8Rng::seed_from_u64(1)).expect("fixture tuple")
}

/// The line through the first two inverse base points of generator `g`,
/// contracted by the pullback under that generator.
pub fn contracted_line(gens: &[GeneratorData], g: usize) -> crate::equidist::PlaneCurve {
    let q = gens[g].inverse_base_points();
    let [a, b] = [&q[0], &q[1]].map(|p| p.coords().clone());
    let cross = [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ];
    crate::equidist::PlaneCurve::new(crate::poly::HomPoly::linear(&cross)).expect("a line")
}
