//! Deterministic per-cell parallelism.
//!
//! Per-cell work is embarrassingly parallel; results are collected in cell
//! order so output never depends on scheduling. `DIRAC_LAB_THREADS` caps the
//! worker count (0 or unset = auto). Reductions over floating-point values
//! stay sequential elsewhere; only pure maps go through here.

pub const THREADS_ENV: &str = "DIRAC_LAB_THREADS";

/// Effective worker count for `items` independent tasks.
pub fn worker_count(items: usize) -> usize {
    let auto = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(auto);
    cap.max(1).min(items.max(1))
}

/// Map `f` over `0..items`, preserving index order in the output.
pub fn map_indexed<T, F>(items: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = worker_count(items);
    if workers <= 1 || items < 64 {
        return (0..items).map(f).collect();
    }
    let chunk = items.div_ceil(workers);
    let mut out: Vec<Option<T>> = (0..items).map(|_| None).collect();
    let fref = &f;
    std::thread::scope(|scope| {
        let mut rest = out.as_mut_slice();
        let mut start = 0;
        let mut handles = Vec::new();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = start;
            handles.push(scope.spawn(move || {
                for (off, slot) in head.iter_mut().enumerate() {
                    *slot = Some(fref(base + off));
                }
            }));
            rest = tail;
            start += take;
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    out.into_iter().map(|v| v.expect("slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let v = map_indexed(1000, |i| i * 2);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, i * 2);
        }
    }
}
