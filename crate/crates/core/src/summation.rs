//! Deterministic reductions.
//!
//! Every integral in the crate goes through [`pairwise_sum`] or
//! [`pairwise_dot`]. The recursion splits at a fixed midpoint, so the result
//! depends only on the input order, never on thread count.

const BLOCK: usize = 16;

/// Balanced-tree sum.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Balanced-tree sum of element-wise products.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= BLOCK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    pairwise_dot(&a[..mid], &b[..mid]) + pairwise_dot(&a[mid..], &b[mid..])
}

/// Balanced-tree sum of `f(i)` for `i` in `range`.
pub fn pairwise_sum_by(range: std::ops::Range<usize>, f: &impl Fn(usize) -> f64) -> f64 {
    let len = range.end - range.start;
    if len <= BLOCK {
        return range.map(f).sum();
    }
    let mid = range.start + len / 2;
    pairwise_sum_by(range.start..mid, f) + pairwise_sum_by(mid..range.end, f)
}

/// Neumaier-compensated accumulator, used by the slow reference paths.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
