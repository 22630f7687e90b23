//! Deterministic fan-out of independent sweep cells: results come back in
//! input order regardless of scheduling, so CSV output is reproducible for
//! any `--jobs` value.

pub fn map_cells<C, T, F>(jobs: usize, cells: Vec<C>, f: F) -> Vec<T>
where
    C: Send,
    T: Send,
    F: Fn(C) -> T + Sync,
{
    if jobs <= 1 || cells.len() <= 1 {
        return cells.into_iter().map(f).collect();
    }
    let n = cells.len();
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let indexed: Vec<(usize, C)> = cells.into_iter().enumerate().collect();
    let chunk = n.div_ceil(jobs);
    std::thread::scope(|scope| {
        let mut slot_rest: &mut [Option<T>] = &mut slots;
        let mut cell_iter = indexed.into_iter();
        let fref = &f;
        for _ in 0..jobs {
            let batch: Vec<(usize, C)> = cell_iter.by_ref().take(chunk).collect();
            if batch.is_empty() {
                break;
            }
            let (head, tail) = slot_rest.split_at_mut(batch.len());
            slot_rest = tail;
            scope.spawn(move || {
                for ((_, cell), slot) in batch.into_iter().zip(head.iter_mut()) {
                    *slot = Some(fref(cell));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("cell computed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_across_job_counts() {
        let cells: Vec<usize> = (0..37).collect();
        let serial = map_cells(1, cells.clone(), |c| c * c);
        for jobs in [2usize, 3, 8] {
            let parallel = map_cells(jobs, cells.clone(), |c| c * c);
            assert_eq!(serial, parallel);
        }
    }
}
