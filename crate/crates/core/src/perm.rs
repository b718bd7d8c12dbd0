//! Permutations of `{0, ..., n-1}` in one-line notation.

use std::fmt;

/// A permutation stored in one-line notation: `self.0[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&j| self.0[j]).collect())
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i8 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(i, &j)| *i == j).map(|(i, _)| i)
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_points().next().is_none()
    }

    /// Position of this permutation in [`all_perms`] order.
    pub fn rank(&self) -> usize {
        let n = self.0.len();
        let mut rank = 0;
        let mut fact = (1..n).product::<usize>();
        let mut remaining: Vec<usize> = (0..n).collect();
        for (k, &v) in self.0.iter().enumerate() {
            let pos = remaining.iter().position(|&x| x == v).unwrap();
            rank += pos * fact;
            remaining.remove(pos);
            if k + 1 < n {
                fact /= n - 1 - k;
            }
        }
        rank
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All permutations of `{0, ..., n-1}` in lexicographic one-line order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_in_order() {
        let ps = all_perms(3);
        let one_line: Vec<Vec<usize>> = ps.iter().map(|p| p.0.clone()).collect();
        assert_eq!(
            one_line,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        let signs: Vec<i8> = ps.iter().map(Perm::sign).collect();
        assert_eq!(signs, vec![1, -1, -1, 1, 1, -1]);
        for (k, p) in ps.iter().enumerate() {
            assert_eq!(p.rank(), k);
        }
    }

    #[test]
    fn counts_and_inverse() {
        assert_eq!(all_perms(0).len(), 1);
        assert_eq!(all_perms(4).len(), 24);
        for p in all_perms(4) {
            assert_eq!(p.compose(&p.inverse()), Perm::identity(4));
        }
        let derangements = all_perms(4).into_iter().filter(Perm::is_derangement).count();
        assert_eq!(derangements, 9);
    }
}
