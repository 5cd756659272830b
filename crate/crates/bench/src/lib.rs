//! Shared fixtures for the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wildtame_core::nfengine::RecordLibrary;
use wildtame_core::{DataSources, IntMatrix};

/// Deterministic pseudo-random square matrix with entries in [-bound, bound].
pub fn fixture_matrix(n: usize, bound: i64, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<i64> = (0..n * n).map(|_| rng.random_range(-bound..=bound)).collect();
    IntMatrix::from_i64(n, n, &data)
}

/// Data sources backed by the repository's record directory.
pub fn repo_sources() -> DataSources {
    let mut lib = RecordLibrary::new();
    lib.load_dir(&std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")).expect("data directory");
    DataSources::new(lib)
}
