pub mod curve;
pub mod dn;
pub mod elementary;
pub mod poncelet;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::manifest::Tolerances;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub tol: Tolerances,
    pub seed: u64,
    pub jobs: usize,
}

impl Ctx {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// What a subcommand produced: the main document, the raw input it read
/// (for the manifest digest) and an optional figure.
#[derive(Debug, Default)]
pub struct Output {
    pub body: Vec<u8>,
    pub input: Option<Vec<u8>>,
    pub svg: Option<(PathBuf, Vec<u8>)>,
}

/// Order-preserving map over `jobs` scoped threads.
pub fn par_map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
