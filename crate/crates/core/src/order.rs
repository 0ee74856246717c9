//! Range order statistics over a fixed sequence.
//!
//! A persistent segment tree indexed by value rank. Version `t` contains the
//! first `t` elements, so any contiguous range `[start, end)` is the
//! difference of versions `end` and `start`. Queries cost `O(log n)`.

#[derive(Clone, Copy, Debug, Default)]
struct Node {
    left: u32,
    right: u32,
    count: u32,
    sum: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct OrderIndex {
    by_rank: Vec<f64>,
    nodes: Vec<Node>,
    roots: Vec<u32>,
}

impl OrderIndex {
    pub(crate) fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut rank = vec![0usize; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let by_rank = order.iter().map(|&i| values[i]).collect();

        let depth = (usize::BITS - n.max(1).leading_zeros()) as usize + 1;
        let mut index = OrderIndex {
            by_rank,
            nodes: Vec::with_capacity(1 + n * depth),
            roots: Vec::with_capacity(n + 1),
        };
        // node 0 is the shared empty tree
        index.nodes.push(Node::default());
        index.roots.push(0);
        for (t, &v) in values.iter().enumerate() {
            let prev = index.roots[t];
            let root = index.insert(prev, 0, n, rank[t], v);
            index.roots.push(root);
        }
        index
    }

    fn insert(&mut self, prev: u32, lo: usize, hi: usize, rank: usize, value: f64) -> u32 {
        let mut node = self.nodes[prev as usize];
        node.count += 1;
        node.sum += value;
        if hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rank < mid {
                node.left = self.insert(node.left, lo, mid, rank, value);
            } else {
                node.right = self.insert(node.right, mid, hi, rank, value);
            }
        }
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    /// The `k`-th smallest value (1-based) in `[start, end)` together with
    /// the sum of the `k` smallest values.
    pub(crate) fn kth(&self, start: usize, end: usize, k: usize) -> (f64, f64) {
        debug_assert!(start < end && end < self.roots.len());
        debug_assert!(k >= 1 && k <= end - start);
        let (mut a, mut b) = (self.roots[start], self.roots[end]);
        let (mut lo, mut hi) = (0, self.by_rank.len());
        let mut k = k as u32;
        let mut below = 0.0;
        while hi - lo > 1 {
            let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
            let (la, lb) = (self.nodes[na.left as usize], self.nodes[nb.left as usize]);
            let left_count = lb.count - la.count;
            let mid = lo + (hi - lo) / 2;
            if k <= left_count {
                a = na.left;
                b = nb.left;
                hi = mid;
            } else {
                below += lb.sum - la.sum;
                k -= left_count;
                a = na.right;
                b = nb.right;
                lo = mid;
            }
        }
        let value = self.by_rank[lo];
        (value, below + value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(values: &[f64], start: usize, end: usize, k: usize) -> (f64, f64) {
        let mut v = values[start..end].to_vec();
        v.sort_by(f64::total_cmp);
        (v[k - 1], v[..k].iter().sum())
    }

    #[test]
    fn single_element() {
        let idx = OrderIndex::new(&[3.5]);
        assert_eq!(idx.kth(0, 1, 1), (3.5, 3.5));
    }

    #[test]
    fn ties_are_counted_separately() {
        let values = [2.0, 2.0, 1.0, 2.0];
        let idx = OrderIndex::new(&values);
        assert_eq!(idx.kth(0, 4, 1), (1.0, 1.0));
        assert_eq!(idx.kth(0, 4, 3), (2.0, 5.0));
        assert_eq!(idx.kth(1, 3, 2), (2.0, 3.0));
    }

    proptest! {
        #[test]
        fn matches_sorting(values in prop::collection::vec(-50i32..50, 1..40), a in 0usize..40, b in 0usize..40, k in 1usize..40) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let n = values.len();
            let (start, end) = { let (a, b) = (a % n, b % n); (a.min(b), a.max(b) + 1) };
            let k = 1 + (k - 1) % (end - start);
            let idx = OrderIndex::new(&values);
            let (v, s) = idx.kth(start, end, k);
            let (nv, ns) = naive(&values, start, end, k);
            prop_assert_eq!(v, nv);
            prop_assert!((s - ns).abs() < 1e-9);
        }
    }
}
