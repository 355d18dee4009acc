//! Deterministic work splitting for scans and counting loops.

/// Applies `f` to every value in `[lo, hi]`, splitting the range into at most
/// `jobs` contiguous chunks. Results come back in range order regardless of
/// which thread produced them.
pub(crate) fn map_range<R, F>(lo: u64, hi: u64, jobs: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync,
{
    if lo > hi {
        return Vec::new();
    }
    let len = hi - lo + 1;
    let jobs = jobs.max(1).min(len as usize);
    if jobs == 1 {
        return (lo..=hi).map(f).collect();
    }
    let chunk = len.div_ceil(jobs as u64);
    let bounds: Vec<(u64, u64)> = (0..jobs as u64)
        .map(|i| {
            let start = lo + i * chunk;
            let end = hi.min(start + chunk - 1);
            (start, end)
        })
        .filter(|(s, e)| s <= e)
        .collect();
    let mut chunks: Vec<Vec<R>> = Vec::new();
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(s, e)| scope.spawn(move || (s..=e).map(f).collect::<Vec<R>>()))
            .collect();
        chunks = handles.into_iter().map(|h| h.join().expect("worker panicked")).collect();
    });
    chunks.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_job_count() {
        let sequential = map_range(3, 1000, 1, |x| x * x);
        for jobs in [2, 3, 7, 64] {
            assert_eq!(map_range(3, 1000, jobs, |x| x * x), sequential);
        }
    }

    #[test]
    fn empty_and_tiny_ranges() {
        assert!(map_range(5, 4, 4, |x| x).is_empty());
        assert_eq!(map_range(5, 5, 4, |x| x), vec![5]);
    }
}
