#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Where the data-parallel loops of the verifiers run.
///
/// Without the `parallel` feature, `Parallel` silently falls back to the
/// sequential path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// The result of `f` at the smallest index for which it returns `Some`.
pub(crate) fn find_first<T, F>(exec: Execution, range: std::ops::Range<usize>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().find_map_first(f);
    }
    let _ = exec;
    range.into_iter().find_map(f)
}

/// Sums per-chunk histograms of length `bins`. `fill` receives a chunk of
/// `0..n` and the histogram to increment.
pub(crate) fn tally<F>(exec: Execution, n: usize, bins: usize, fill: F) -> Vec<u32>
where
    F: Fn(std::ops::Range<usize>, &mut [u32]) + Sync + Send,
{
    const CHUNK: usize = 64;
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && n > CHUNK {
        let chunks = n.div_ceil(CHUNK);
        return (0..chunks)
            .into_par_iter()
            .fold(
                || vec![0u32; bins],
                |mut acc, c| {
                    fill(c * CHUNK..((c + 1) * CHUNK).min(n), &mut acc);
                    acc
                },
            )
            .reduce(
                || vec![0u32; bins],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
    }
    let _ = exec;
    let mut acc = vec![0u32; bins];
    fill(0..n, &mut acc);
    acc
}
