use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Huffman coding tree over `n` leaves. Internal nodes are numbered
/// `0..n-1` with the root last; each leaf stores the internal nodes on its
/// root-to-leaf path and the branch bit taken at each of them.
#[derive(Debug, Clone)]
pub struct HuffmanTree {
    offsets: Vec<usize>,
    points: Vec<u32>,
    bits: Vec<u8>,
    internal: usize,
}

impl HuffmanTree {
    /// Builds the tree from leaf counts. Equal counts are merged in order of
    /// node id, leaves `0..n` first and internal nodes in creation order.
    pub fn new(frequency: &[u64]) -> Self {
        let n = frequency.len();
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            frequency.iter().enumerate().map(|(i, &f)| Reverse((f, i))).collect();
        // parent[node] and the bit leading to it, nodes 0..n leaves, n.. internal
        let mut parent = vec![usize::MAX; 2 * n.max(1)];
        let mut bit = vec![0u8; 2 * n.max(1)];
        let mut next = n;
        while heap.len() > 1 {
            let Reverse((fa, a)) = heap.pop().unwrap();
            let Reverse((fb, b)) = heap.pop().unwrap();
            parent[a] = next;
            parent[b] = next;
            bit[b] = 1;
            heap.push(Reverse((fa + fb, next)));
            next += 1;
        }
        let internal = next - n;

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut points = Vec::new();
        let mut bits = Vec::new();
        let mut path = Vec::new();
        for leaf in 0..n {
            path.clear();
            let mut node = leaf;
            while parent[node] != usize::MAX {
                path.push(((parent[node] - n) as u32, bit[node]));
                node = parent[node];
            }
            for &(p, b) in path.iter().rev() {
                points.push(p);
                bits.push(b);
            }
            offsets.push(points.len());
        }
        HuffmanTree { offsets, points, bits, internal }
    }

    pub fn leaves(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn internal_nodes(&self) -> usize {
        self.internal
    }

    /// Internal nodes from the root down to `leaf`.
    pub fn points(&self, leaf: usize) -> &[u32] {
        &self.points[self.offsets[leaf]..self.offsets[leaf + 1]]
    }

    /// Branch bits along [`points`](Self::points).
    pub fn code(&self, leaf: usize) -> &[u8] {
        &self.bits[self.offsets[leaf]..self.offsets[leaf + 1]]
    }

    /// `Pr(leaf | u)` where branch 0 at node `p` has probability
    /// `σ(u·θ_p)`, with `θ` the row-major internal-node vectors.
    pub fn leaf_probability(&self, leaf: usize, u: &[f64], theta: &[f64]) -> f64 {
        let k = u.len();
        self.points(leaf)
            .iter()
            .zip(self.code(leaf))
            .map(|(&p, &b)| {
                let x = dot(u, &theta[p as usize * k..(p as usize + 1) * k]);
                let s = if b == 0 { x } else { -x };
                sigmoid(s)
            })
            .product()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow.
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_codes() {
        // counts 5, 1, 1, 2: leaves 1 and 2 merge first, then with 3, then with 0
        let t = HuffmanTree::new(&[5, 1, 1, 2]);
        assert_eq!(t.internal_nodes(), 3);
        assert_eq!(t.code(0).len(), 1);
        assert_eq!(t.code(3).len(), 2);
        assert_eq!(t.code(1).len(), 3);
        assert_eq!(t.code(0), &[1]);
        assert_eq!(t.code(1), &[0, 1, 0]);
        assert_eq!(t.code(2), &[0, 1, 1]);
        assert_eq!(t.points(1), &[2, 1, 0]);
    }

    #[test]
    fn prefix_free() {
        let t = HuffmanTree::new(&[3, 0, 7, 7, 1, 0, 2, 9]);
        for a in 0..t.leaves() {
            for b in 0..t.leaves() {
                if a != b {
                    let (ca, cb) = (t.code(a), t.code(b));
                    assert!(!cb.starts_with(ca));
                }
            }
        }
    }

    #[test]
    fn single_leaf() {
        let t = HuffmanTree::new(&[4]);
        assert_eq!(t.internal_nodes(), 0);
        assert!(t.code(0).is_empty());
        assert_eq!(t.leaf_probability(0, &[1.0], &[]), 1.0);
    }

    #[test]
    fn stable_log_sigmoid() {
        for x in [-800.0, -30.0, -1.0, 0.0, 2.0, 40.0, 800.0] {
            let direct = sigmoid(x).ln();
            if direct.is_finite() {
                assert!((log_sigmoid(x) - direct).abs() < 1e-12);
            }
            assert!(log_sigmoid(x).is_finite());
        }
    }
}
