//! Shared fixtures for the kernel benchmarks.

use ricci_core::{make_profile, ProfileFamily, WarpedMetric};

pub const SIZES: [usize; 3] = [101, 501, 2001];

pub fn perturbed(n: usize) -> WarpedMetric {
    make_profile(ProfileFamily::Perturbed { eps: 0.3, k: 1 }, n).expect("valid profile")
}
