//! Data-parallel substrate for trial loops and state-space sweeps.
//!
//! With the `parallel` feature (default) the work runs on rayon; without it
//! the same helpers fall back to plain iteration. Both paths produce
//! identical results: trial reductions are integer-valued (exactly
//! associative) and vector reductions merge per-chunk partials in a fixed
//! chunk order, so the outcome does not depend on thread count or
//! scheduling. The `*_seq` variants are always available; the benchmark
//! suite uses them to compare the two executions on the real workloads.

/// Additive accumulators reduced across trials.
pub trait Accumulate: Send {
    fn zero() -> Self;
    fn merge(&mut self, other: Self);
}

impl Accumulate for u64 {
    fn zero() -> Self {
        0
    }
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<const N: usize> Accumulate for [u64; N] {
    fn zero() -> Self {
        [0; N]
    }
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

impl Accumulate for Vec<u64> {
    fn zero() -> Self {
        Vec::new()
    }
    fn merge(&mut self, other: Self) {
        if self.is_empty() {
            *self = other;
            return;
        }
        if other.len() > self.len() {
            self.resize(other.len(), 0);
        }
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

impl<A: Accumulate, B: Accumulate> Accumulate for (A, B) {
    fn zero() -> Self {
        (A::zero(), B::zero())
    }
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

impl<A: Accumulate, B: Accumulate, C: Accumulate> Accumulate for (A, B, C) {
    fn zero() -> Self {
        (A::zero(), B::zero(), C::zero())
    }
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
        self.2.merge(other.2);
    }
}

/// Runs `per_item(i)` for `i in 0..count` and merges the results.
pub fn map_merge_seq<T, F>(count: u64, per_item: F) -> T
where
    T: Accumulate,
    F: Fn(u64) -> T + Sync + Send,
{
    let mut acc = T::zero();
    for i in 0..count {
        acc.merge(per_item(i));
    }
    acc
}

#[cfg(feature = "parallel")]
pub fn map_merge<T, F>(count: u64, per_item: F) -> T
where
    T: Accumulate,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(per_item)
        .reduce(T::zero, |mut a, b| {
            a.merge(b);
            a
        })
}

#[cfg(not(feature = "parallel"))]
pub fn map_merge<T, F>(count: u64, per_item: F) -> T
where
    T: Accumulate,
    F: Fn(u64) -> T + Sync + Send,
{
    map_merge_seq(count, per_item)
}

/// Ordered map: element `i` of the output comes from input index `i`.
pub fn map_collect_seq<T, F>(count: usize, per_item: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(per_item).collect()
}

#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(count: usize, per_item: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(per_item).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(count: usize, per_item: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_collect_seq(count, per_item)
}

/// Splits `0..total` into fixed-size chunks, maps each chunk to a partial
/// `Vec<f64>`, and adds the partials in chunk order. The chunk size is a
/// constant of the call, so the float reduction order is identical for the
/// sequential and parallel paths and for any thread count.
pub fn chunked_vector_sum<F>(total: usize, chunk: usize, out_len: usize, per_chunk: F) -> Vec<f64>
where
    F: Fn(std::ops::Range<usize>) -> Vec<f64> + Sync,
{
    assert!(chunk > 0);
    let ranges: Vec<_> = (0..total.div_ceil(chunk))
        .map(|k| (k * chunk)..((k + 1) * chunk).min(total))
        .collect();
    let partials = map_collect(ranges.len(), |k| per_chunk(ranges[k].clone()));
    let mut out = vec![0.0; out_len];
    for part in partials {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_seq() {
        let f = |i: u64| [i, 2 * i];
        assert_eq!(map_merge::<[u64; 2], _>(1000, f), map_merge_seq(1000, f));
    }

    #[test]
    fn chunked_sum_is_chunk_order_stable() {
        let per = |r: std::ops::Range<usize>| {
            let mut v = vec![0.0; 8];
            for i in r {
                v[i % 8] += (i as f64).sqrt();
            }
            v
        };
        let a = chunked_vector_sum(1000, 64, 8, &per);
        let b = chunked_vector_sum(1000, 64, 8, &per);
        assert_eq!(a, b);
    }
}
