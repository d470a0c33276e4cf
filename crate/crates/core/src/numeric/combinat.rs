use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{NumericError, Scalar};

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer<S: Scalar>(a: &S, k: u32) -> S {
    let mut acc = S::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc = acc * &term;
        term = term + S::one();
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Product of factorials of the parts, `lambda!`.
pub fn multi_factorial(parts: &[u32]) -> BigInt {
    parts.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k))
}

/// `N! / lambda!`.
pub fn multinomial(n: u32, lambda: &MultiIndex) -> Result<BigInt, NumericError> {
    if lambda.degree() != n {
        return Err(NumericError::DegreeMismatch {
            expected: n,
            found: lambda.degree(),
        });
    }
    Ok(factorial(n) / multi_factorial(lambda.parts()))
}

/// Point of `{lambda in N_0^{d+1} : |lambda| = N}`.
///
/// Ordering is graded lexicographic on the tail `(lambda_1, ..., lambda_d)`:
/// smaller tail degree first, then lexicographically *descending*. For a fixed
/// total degree this is plain descending lex on all parts, which puts
/// `(N, 0, ..., 0)` first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    parts: Vec<u32>,
}

impl MultiIndex {
    pub fn new(parts: Vec<u32>) -> Self {
        Self { parts }
    }

    /// Builds `(N - |tail|, tail...)`.
    pub fn from_tail(n: u32, tail: &[u32]) -> Result<Self, NumericError> {
        let s: u32 = tail.iter().sum();
        if s > n {
            return Err(NumericError::DegreeExceeded { bound: n, found: s });
        }
        let mut parts = Vec::with_capacity(tail.len() + 1);
        parts.push(n - s);
        parts.extend_from_slice(tail);
        Ok(Self { parts })
    }

    /// Like [`MultiIndex::new`] but rejects a total other than `n`.
    pub fn with_degree(parts: Vec<u32>, n: u32) -> Result<Self, NumericError> {
        let idx = Self { parts };
        if idx.degree() != n {
            return Err(NumericError::DegreeMismatch {
                expected: n,
                found: idx.degree(),
            });
        }
        Ok(idx)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `lambda' = (lambda_1, ..., lambda_d)`.
    pub fn tail(&self) -> &[u32] {
        &self.parts[1..]
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `x^lambda` evaluated at a point, i.e. `prod_k values[k]^lambda_k`.
    pub fn power_of<S: Scalar>(&self, values: &[S]) -> S {
        self.parts
            .iter()
            .zip(values)
            .fold(S::one(), |acc, (&k, v)| acc * v.powi(k))
    }

    /// `lambda + v_i - v_j`, or `None` when part `j` is already zero.
    pub fn moved(&self, i: usize, j: usize) -> Option<Self> {
        if i == j {
            return Some(self.clone());
        }
        if self.parts[j] == 0 {
            return None;
        }
        let mut parts = self.parts.clone();
        parts[j] -= 1;
        parts[i] += 1;
        Some(Self { parts })
    }

    /// Whether `self - other` is a permutation of `(1, -1, 0, ..., 0)`.
    pub fn is_adjacent(&self, other: &Self) -> bool {
        if self.parts.len() != other.parts.len() {
            return false;
        }
        let mut plus = 0;
        let mut minus = 0;
        for (a, b) in self.parts.iter().zip(&other.parts) {
            match *a as i64 - *b as i64 {
                0 => {}
                1 => plus += 1,
                -1 => minus += 1,
                _ => return false,
            }
        }
        plus == 1 && minus == 1
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: u32 = self.tail().iter().sum();
        let db: u32 = other.tail().iter().sum();
        da.cmp(&db)
            .then_with(|| other.tail().cmp(self.tail()))
            .then_with(|| self.parts.len().cmp(&other.parts.len()))
            .then_with(|| self.parts[0].cmp(&other.parts[0]))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All of `{lambda in N_0^{d+1} : |lambda| = N}` in graded-lex order.
pub fn enumerate_lattice(d: usize, n: u32) -> Vec<MultiIndex> {
    fn fill(slot: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if slot + 1 == cur.len() {
            cur[slot] = remaining;
            out.push(MultiIndex::new(cur.clone()));
            return;
        }
        for v in (0..=remaining).rev() {
            cur[slot] = v;
            fill(slot + 1, remaining - v, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0; d + 1];
    fill(0, n, &mut cur, &mut out);
    out
}

/// The simplex lattice with a position lookup keyed by the tail `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexLattice {
    d: usize,
    n: u32,
    points: Vec<MultiIndex>,
    index: HashMap<Vec<u32>, usize>,
}

impl SimplexLattice {
    pub fn new(d: usize, n: u32) -> Self {
        let points = enumerate_lattice(d, n);
        let index = points
            .iter()
            .enumerate()
            .map(|(k, p)| (p.tail().to_vec(), k))
            .collect();
        Self { d, n, points, index }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position_of_tail(&self, tail: &[u32]) -> Option<usize> {
        self.index.get(tail).copied()
    }

    pub fn position(&self, lambda: &MultiIndex) -> Option<usize> {
        if lambda.degree() != self.n {
            return None;
        }
        self.position_of_tail(lambda.tail())
    }
}

/// A `d x d` nonnegative integer matrix with entry sum at most `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelMatrix {
    d: usize,
    entries: Vec<u32>,
    row_sums: Vec<u32>,
    col_sums: Vec<u32>,
    total: u32,
}

impl KernelMatrix {
    pub fn from_entries(d: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), d * d, "kernel matrix must be d x d");
        let mut row_sums = vec![0; d];
        let mut col_sums = vec![0; d];
        for i in 0..d {
            for j in 0..d {
                row_sums[i] += entries[i * d + j];
                col_sums[j] += entries[i * d + j];
            }
        }
        let total = row_sums.iter().sum();
        Self {
            d,
            entries,
            row_sums,
            col_sums,
            total,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.d + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn row_sums(&self) -> &[u32] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u32] {
        &self.col_sums
    }

    pub fn total(&self) -> u32 {
        self.total
    }
}

/// Borrowed state handed to [`for_each_kernel`] visitors.
#[derive(Clone, Copy, Debug)]
pub struct KernelView<'a> {
    pub d: usize,
    pub entries: &'a [u32],
    pub row_sums: &'a [u32],
    pub col_sums: &'a [u32],
    pub total: u32,
}

/// Visits every `d x d` matrix with total at most `n`, row `i` sum at most
/// `row_caps[i]` and column `j` sum at most `col_caps[j]`.
///
/// Caps are enforced while filling entries, so branches that would exceed a
/// cap are never entered.
pub fn for_each_kernel<F>(d: usize, n: u32, row_caps: &[u32], col_caps: &[u32], mut visit: F)
where
    F: FnMut(KernelView<'_>),
{
    assert_eq!(row_caps.len(), d, "row caps must have length d");
    assert_eq!(col_caps.len(), d, "column caps must have length d");

    struct State<'c> {
        d: usize,
        row_caps: &'c [u32],
        col_caps: &'c [u32],
        entries: Vec<u32>,
        row_sums: Vec<u32>,
        col_sums: Vec<u32>,
    }

    fn go<F: FnMut(KernelView<'_>)>(st: &mut State<'_>, pos: usize, budget: u32, visit: &mut F) {
        let d = st.d;
        if pos == d * d {
            let view = KernelView {
                d,
                entries: &st.entries,
                row_sums: &st.row_sums,
                col_sums: &st.col_sums,
                total: st.row_sums.iter().sum(),
            };
            visit(view);
            return;
        }
        let (i, j) = (pos / d, pos % d);
        let room = budget
            .min(st.row_caps[i] - st.row_sums[i])
            .min(st.col_caps[j] - st.col_sums[j]);
        for a in 0..=room {
            st.entries[pos] = a;
            st.row_sums[i] += a;
            st.col_sums[j] += a;
            go(st, pos + 1, budget - a, visit);
            st.row_sums[i] -= a;
            st.col_sums[j] -= a;
        }
        st.entries[pos] = 0;
    }

    let mut st = State {
        d,
        row_caps,
        col_caps,
        entries: vec![0; d * d],
        row_sums: vec![0; d],
        col_sums: vec![0; d],
    };
    go(&mut st, 0, n, &mut visit);
}

/// Collecting form of [`for_each_kernel`].
pub fn enumerate_kernels(d: usize, n: u32, row_caps: &[u32], col_caps: &[u32]) -> Vec<KernelMatrix> {
    let mut out = Vec::new();
    for_each_kernel(d, n, row_caps, col_caps, |k| {
        out.push(KernelMatrix {
            d,
            entries: k.entries.to_vec(),
            row_sums: k.row_sums.to_vec(),
            col_sums: k.col_sums.to_vec(),
            total: k.total,
        })
    });
    out
}

/// Binomial coefficient as a plain integer; callers stay at desk scale.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Exact;
    use std::collections::HashSet;

    fn q(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&q(5), 0), q(1));
        assert_eq!(pochhammer(&q(-2), 3), q(0));
        assert_eq!(pochhammer(&q(-3), 2), q(6));
        assert_eq!(pochhammer(&Exact::from_ratio(1, 2), 2), Exact::from_ratio(3, 4));
    }

    #[test]
    fn multinomial_examples() {
        let m = |p: Vec<u32>| MultiIndex::new(p);
        assert_eq!(multinomial(2, &m(vec![2, 0])).unwrap(), BigInt::from(1));
        assert_eq!(multinomial(2, &m(vec![1, 1])).unwrap(), BigInt::from(2));
        assert_eq!(multinomial(3, &m(vec![1, 1, 1])).unwrap(), BigInt::from(6));
        assert!(matches!(
            multinomial(3, &m(vec![1, 1])),
            Err(NumericError::DegreeMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn lattice_examples() {
        let l = enumerate_lattice(1, 2);
        let parts: Vec<_> = l.iter().map(|x| x.parts().to_vec()).collect();
        assert_eq!(parts, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_lattice(2, 3).len(), 10);
        let z = enumerate_lattice(2, 0);
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].parts(), &[0, 0, 0]);
    }

    #[test]
    fn lattice_order_is_graded_on_tail() {
        let l = enumerate_lattice(2, 2);
        let parts: Vec<_> = l.iter().map(|x| x.parts().to_vec()).collect();
        assert_eq!(
            parts,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        let mut sorted = l.clone();
        sorted.sort();
        assert_eq!(sorted, l);
    }

    #[test]
    fn lattice_sizes_match_binomial() {
        for d in 1..=4 {
            for n in 0..=6 {
                let l = enumerate_lattice(d, n);
                assert_eq!(l.len() as u64, binomial(n as u64 + d as u64, d as u64));
                let set: HashSet<_> = l.iter().collect();
                assert_eq!(set.len(), l.len());
                assert!(l.iter().all(|x| x.degree() == n && x.len() == d + 1));
            }
        }
    }

    #[test]
    fn adjacency_and_moves() {
        let a = MultiIndex::new(vec![1, 1, 0]);
        assert!(a.is_adjacent(&MultiIndex::new(vec![0, 2, 0])));
        assert!(a.is_adjacent(&MultiIndex::new(vec![1, 0, 1])));
        assert!(!a.is_adjacent(&a));
        assert!(!a.is_adjacent(&MultiIndex::new(vec![0, 0, 2])));
        assert_eq!(a.moved(2, 0), Some(MultiIndex::new(vec![0, 1, 1])));
        assert_eq!(a.moved(0, 2), None);
    }

    #[test]
    fn from_tail_bounds() {
        assert_eq!(MultiIndex::from_tail(3, &[1, 1]).unwrap().parts(), &[1, 1, 1]);
        assert!(MultiIndex::from_tail(1, &[1, 1]).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(enumerate_kernels(1, 5, &[2], &[3]).len(), 3);
        let only_zero = enumerate_kernels(2, 2, &[0, 0], &[2, 2]);
        assert_eq!(only_zero.len(), 1);
        assert_eq!(only_zero[0].total(), 0);
    }

    /// Independent count: scan every d x d matrix with entries in 0..=n.
    fn brute_force_kernels(d: usize, n: u32, rows: &[u32], cols: &[u32]) -> HashSet<Vec<u32>> {
        let cells = d * d;
        let base = n as usize + 1;
        let mut out = HashSet::new();
        for code in 0..base.pow(cells as u32) {
            let mut c = code;
            let entries: Vec<u32> = (0..cells)
                .map(|_| {
                    let v = (c % base) as u32;
                    c /= base;
                    v
                })
                .collect();
            let total: u32 = entries.iter().sum();
            let row_ok = (0..d).all(|i| (0..d).map(|j| entries[i * d + j]).sum::<u32>() <= rows[i]);
            let col_ok = (0..d).all(|j| (0..d).map(|i| entries[i * d + j]).sum::<u32>() <= cols[j]);
            if total <= n && row_ok && col_ok {
                out.insert(entries);
            }
        }
        out
    }

    #[test]
    fn kernel_count_matches_brute_force() {
        // 2x2, all caps 2: the oracle gives 15 = C(2+4, 4).
        let oracle = brute_force_kernels(2, 2, &[2, 2], &[2, 2]);
        assert_eq!(oracle.len(), 15);
        let got = enumerate_kernels(2, 2, &[2, 2], &[2, 2]);
        assert_eq!(got.len(), 15);

        for d in 1..=2usize {
            for n in 0..=5u32 {
                let caps = vec![n; d];
                let oracle = brute_force_kernels(d, n, &caps, &caps);
                let got = enumerate_kernels(d, n, &caps, &caps);
                let set: HashSet<Vec<u32>> = got.iter().map(|k| k.entries().to_vec()).collect();
                assert_eq!(set.len(), got.len(), "duplicates for d={d} n={n}");
                assert_eq!(set, oracle, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn kernel_caps_prune_exactly() {
        let oracle = brute_force_kernels(2, 4, &[1, 3], &[2, 0]);
        let got = enumerate_kernels(2, 4, &[1, 3], &[2, 0]);
        let set: HashSet<Vec<u32>> = got.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(set, oracle);
        for k in &got {
            assert!(k.row_sums()[0] <= 1 && k.row_sums()[1] <= 3);
            assert!(k.col_sums()[0] <= 2 && k.col_sums()[1] == 0);
        }
    }
}
