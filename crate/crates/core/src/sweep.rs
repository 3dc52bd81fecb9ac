//! Data-parallel helpers. With the `parallel` feature disabled every path is sequential.

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with rayon, otherwise `Sequential`.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over `items`.
pub fn par_map<T, U, F>(items: &[T], exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec.effective() {
        Execution::Sequential => map_sequential(items, f),
        #[cfg(feature = "parallel")]
        Execution::Parallel => map_parallel(items, f),
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => unreachable!("effective() downgrades without rayon"),
    }
}

pub fn map_sequential<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Calls `f(row_index, row)` for each `width`-sized row of `out`.
pub(crate) fn for_each_row<T, F>(out: &mut [T], width: usize, exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            out.par_chunks_mut(width).enumerate().for_each(|(r, row)| f(r, row));
        }
        _ => out.chunks_mut(width).enumerate().for_each(|(r, row)| f(r, row)),
    }
}

/// `n` points from `lo` to `hi`, evenly spaced or log-spaced.
pub fn grid(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                if log {
                    (lo.ln() + s * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + s * (hi - lo)
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = par_map(&xs, Execution::Sequential, |x| x * x);
        let b = par_map(&xs, Execution::Parallel, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 998001);
    }

    #[test]
    fn rows_are_visited_once() {
        let mut buf = vec![0usize; 12];
        for_each_row(&mut buf, 4, Execution::Parallel, |r, row| row.iter_mut().for_each(|x| *x += r));
        assert_eq!(buf, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 1.0, 3, false), vec![0.0, 0.5, 1.0]);
        let g = grid(0.01, 10.0, 4, true);
        assert!((g[1] - 0.1).abs() < 1e-15 && (g[3] - 10.0).abs() < 1e-13);
    }
}
