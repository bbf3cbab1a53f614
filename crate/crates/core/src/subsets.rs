//! k-subset enumeration in revolving-door order, with ranking and unranking.
//!
//! Consecutive subsets differ by exactly one element leaving and one entering, so a running
//! subset sum is maintained with one subtraction and one addition per step.
//! Subsets are sorted, 0-based index lists.

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let num = (n - i) as u128;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i as u128 + 1),
            None => {
                // fall back to the slower but overflow-free order of operations
                let g = gcd(acc, i as u128 + 1);
                let (a, d) = (acc / g, (i as u128 + 1) / g);
                match a.checked_mul(num / d) {
                    Some(v) if num % d == 0 => v,
                    _ => return u128::MAX,
                }
            }
        };
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Rank of a sorted subset of `{0..n}` in revolving-door order.
pub fn rank(subset: &[usize]) -> u128 {
    // r = sum_{i=1..k} (-1)^{k-i} (C(t_i, i) - 1) with 1-based t_i, computed by the recursion
    let k = subset.len();
    let mut r: i128 = 0;
    let mut sign: i128 = 1;
    for i in (1..=k).rev() {
        let t = subset[i - 1] as u64 + 1;
        r += sign * (binomial(t, i as u64) as i128 - 1);
        sign = -sign;
    }
    r as u128
}

/// Subset of `{0..n}` of size `k` at position `r` in revolving-door order.
pub fn unrank(n: usize, k: usize, r: u128) -> Vec<usize> {
    let mut out = vec![0usize; k];
    let mut r = r;
    let mut x = n as u64;
    for i in (1..=k).rev() {
        while binomial(x, i as u64) > r {
            x -= 1;
        }
        out[i - 1] = x as usize; // 1-based value x + 1
        r = binomial(x + 1, i as u64) - r - 1;
    }
    out
}

/// Iterator over all k-subsets of `{0..n}` in revolving-door order.
///
/// Yields the current subset together with the swap `(left, entered)` that produced it
/// (`None` for the first subset).
pub struct RevolvingDoor {
    n: usize,
    k: usize,
    pos: u128,
    end: u128,
    current: Vec<usize>,
    started: bool,
}

impl RevolvingDoor {
    pub fn new(n: usize, k: usize) -> Self {
        Self::starting_at(n, k, 0, binomial(n as u64, k as u64))
    }

    /// Iterates `count` subsets starting at rank `start`.
    pub fn starting_at(n: usize, k: usize, start: u128, count: u128) -> Self {
        let total = binomial(n as u64, k as u64);
        let start = start.min(total);
        let end = start + count.min(total - start);
        let current = if start < end { unrank(n, k, start) } else { Vec::new() };
        RevolvingDoor { n, k, pos: start, end, current, started: false }
    }

    pub fn current(&self) -> &[usize] {
        &self.current
    }
}

impl Iterator for RevolvingDoor {
    type Item = (Vec<usize>, Option<(usize, usize)>);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            if self.pos >= self.end {
                return None;
            }
            return Some((self.current.clone(), None));
        }
        if self.pos + 1 >= self.end {
            self.pos = self.end;
            return None;
        }
        self.pos += 1;
        let next = unrank(self.n, self.k, self.pos);
        let left = self.current.iter().find(|v| !next.contains(v)).copied();
        let entered = next.iter().find(|v| !self.current.contains(v)).copied();
        self.current = next;
        let swap = left.zip(entered);
        Some((self.current.clone(), swap))
    }
}

/// Lexicographic comparison of sorted index lists.
pub fn lex_less(a: &[usize], b: &[usize]) -> bool {
    a < b
}
