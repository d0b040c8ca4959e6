//! Fixtures shared by the criterion benchmarks in `benches/`.

use learndim_core::classes::{density_class, sample_language, DensityClass, SampleMode};
use learndim_core::entropy::Probability;
use learndim_core::gale::Rate;

pub fn prob(p: i64, q: i64) -> Probability {
    Probability::from_ratio(p, q).expect("valid probability")
}

pub fn rate(p: i64, q: i64) -> Rate {
    Rate::from_ratio(p, q).expect("valid rate")
}

pub fn quarter_density() -> DensityClass {
    density_class(prob(1, 4)).expect("valid class")
}

/// A fixed member of the density-1/4 class through block `n_max`.
pub fn quarter_member(n_max: u32) -> Vec<bool> {
    sample_language(&quarter_density(), n_max, 0, SampleMode::Uniform)
        .expect("sample")
        .bits()
        .to_vec()
}
