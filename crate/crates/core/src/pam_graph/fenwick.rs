/// Binary indexed tree over non-negative integer weights, 1-based, growable.
#[derive(Clone, Debug, Default)]
pub struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    pub fn new() -> Self {
        Self { tree: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    pub fn total(&self) -> u64 {
        self.prefix(self.len())
    }

    /// Appends a new slot holding `w`.
    pub fn push(&mut self, w: u64) {
        let i = self.tree.len();
        let low = i & i.wrapping_neg();
        let node = w + self.prefix(i - 1) - self.prefix(i - low);
        self.tree.push(node);
    }

    pub fn add(&mut self, mut i: usize, w: u64) {
        while i < self.tree.len() {
            self.tree[i] += w;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index i with prefix(i) > r; requires r < total().
    pub fn find(&self, mut r: u64) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        pos + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_matches_linear_scan() {
        let weights = [3u64, 0, 5, 1, 0, 0, 7, 2, 4];
        let mut f = Fenwick::new();
        for w in weights {
            f.push(w);
        }
        f.add(2, 2);
        let mut w = weights.to_vec();
        w[1] += 2;
        assert_eq!(f.total(), w.iter().sum::<u64>());
        let mut acc = 0;
        for (i, &wi) in w.iter().enumerate() {
            for r in acc..acc + wi {
                assert_eq!(f.find(r), i + 1);
            }
            acc += wi;
        }
    }
}
