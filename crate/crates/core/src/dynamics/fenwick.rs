/// Fenwick tree over non-negative `f64` rates with point assignment and
/// prefix-sum sampling.
#[derive(Debug, Clone)]
pub(crate) struct RateTree {
    tree: Vec<f64>,
    values: Vec<f64>,
    top_bit: usize,
}

impl RateTree {
    pub fn new(len: usize) -> Self {
        let top_bit = if len == 0 { 0 } else { 1 << (usize::BITS - 1 - len.leading_zeros()) };
        Self { tree: vec![0.0; len + 1], values: vec![0.0; len], top_bit }
    }

    pub fn set(&mut self, i: usize, value: f64) {
        debug_assert!(value >= 0.0 && value.is_finite());
        let delta = value - self.values[i];
        if delta == 0.0 {
            return;
        }
        self.values[i] = value;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    /// Rebuilds internal sums from the stored values, discarding drift.
    pub fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        for i in 0..self.values.len() {
            let k = i + 1;
            self.tree[k] += self.values[i];
            let parent = k + (k & k.wrapping_neg());
            if parent < self.tree.len() {
                let carried = self.tree[k];
                self.tree[parent] += carried;
            }
        }
    }

    pub fn total(&self) -> f64 {
        let mut k = self.values.len();
        let mut acc = 0.0;
        while k > 0 {
            acc += self.tree[k];
            k -= k & k.wrapping_neg();
        }
        acc
    }

    /// Index `i` with prefix(i) <= target < prefix(i+1), skipping zero-rate
    /// slots. Returns `None` only when every value is zero.
    pub fn find(&self, target: f64) -> Option<usize> {
        let mut pos = 0;
        let mut rem = target;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= rem {
                rem -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // `pos` is the count of slots fully below target; rounding can land
        // on a zero slot or run off the end.
        let idx = pos.min(self.values.len().saturating_sub(1));
        if self.values.get(idx).copied().unwrap_or(0.0) > 0.0 {
            return Some(idx);
        }
        (idx..self.values.len())
            .chain((0..idx).rev())
            .find(|&i| self.values[i] > 0.0)
    }
}
