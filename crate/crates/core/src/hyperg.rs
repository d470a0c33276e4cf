//! Evaluation of the polynomials `P(m, mt)` and the table-level checks.
//!
//! Two independent evaluation routes live here: the matrix-indexed
//! hypergeometric sum over kernel matrices, and coefficient extraction from
//! the product generating function. A third route, through the bilinear
//! pairing of the two weight bases, lives in [`crate::liemod`].

use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

use crate::kappa::ParameterSet;
use crate::numeric::{
    factorial, for_each_kernel, multi_factorial, pochhammer, MultiIndex, Scalar, SimplexLattice,
};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergError {
    #[error("|m| = {sum} exceeds N = {n}")]
    DegreeExceeded { sum: u32, n: u32 },
    #[error("point has {found} coordinates, parameter set has d = {d}")]
    DimensionMismatch { d: usize, found: usize },
    #[error("degree points disagree on N ({0} vs {1})")]
    DegreeMismatch(u32, u32),
    #[error("table has shape {rows}x{cols}, expected {expected}x{expected}")]
    TableShape { rows: usize, cols: usize, expected: usize },
}

/// `m = (m_1, ..., m_d)` with `|m| <= N`; `m_0 = N - |m|` is implied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreePoint {
    m: Vec<u32>,
    n: u32,
}

impl DegreePoint {
    pub fn new(m: Vec<u32>, n: u32) -> Result<Self, HypergError> {
        let sum: u32 = m.iter().sum();
        if sum > n {
            return Err(HypergError::DegreeExceeded { sum, n });
        }
        Ok(Self { m, n })
    }

    pub fn from_index(lambda: &MultiIndex) -> Self {
        Self {
            m: lambda.tail().to_vec(),
            n: lambda.degree(),
        }
    }

    pub fn coords(&self) -> &[u32] {
        &self.m
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn m0(&self) -> u32 {
        self.n - self.m.iter().sum::<u32>()
    }

    pub fn to_index(&self) -> MultiIndex {
        let mut parts = vec![self.m0()];
        parts.extend_from_slice(&self.m);
        MultiIndex::new(parts)
    }
}

fn check_points<S: Scalar>(
    kappa: &ParameterSet<S>,
    m: &DegreePoint,
    mt: &DegreePoint,
) -> Result<(), HypergError> {
    let d = kappa.d();
    for p in [m, mt] {
        if p.m.len() != d {
            return Err(HypergError::DimensionMismatch { d, found: p.m.len() });
        }
    }
    if m.n != mt.n {
        return Err(HypergError::DegreeMismatch(m.n, mt.n));
    }
    Ok(())
}

/// `(-k)_j` for `j = 0..=k`.
fn negative_pochhammers<S: Scalar>(k: u32) -> Vec<S> {
    let a = -S::from_i64(k as i64);
    (0..=k).map(|j| pochhammer(&a, j)).collect()
}

/// Sums the kernel-matrix series for `P(m, mt)`.
///
/// Only matrices with row sums at most `mt_i` and column sums at most `m_j`
/// are visited, since `(-m_j)_k` vanishes for `k > m_j`.
pub fn eval_hypergeometric<S: Scalar>(
    kappa: &ParameterSet<S>,
    m: &DegreePoint,
    mt: &DegreePoint,
) -> Result<S, HypergError> {
    check_points(kappa, m, mt)?;
    let d = kappa.d();
    let n = m.n;
    let omega = kappa.omega();

    let col_poch: Vec<Vec<S>> = m.m.iter().map(|&k| negative_pochhammers(k)).collect();
    let row_poch: Vec<Vec<S>> = mt.m.iter().map(|&k| negative_pochhammers(k)).collect();
    let inv_n_poch: Vec<S> = negative_pochhammers::<S>(n).iter().map(S::recip).collect();
    // omega_{ij}^a / a!
    let cap = n as usize;
    let weights: Vec<Vec<S>> = (0..d * d)
        .map(|c| {
            let w = &omega[(c / d, c % d)];
            let mut out = Vec::with_capacity(cap + 1);
            let mut acc = S::one();
            out.push(acc.clone());
            for a in 1..=cap {
                acc = acc * w / S::from_i64(a as i64);
                out.push(acc.clone());
            }
            out
        })
        .collect();

    let mut total = S::zero();
    for_each_kernel(d, n, &mt.m, &m.m, |k| {
        let mut term = inv_n_poch[k.total as usize].clone();
        for (c, &a) in k.entries.iter().enumerate() {
            if a > 0 {
                term = term * &weights[c][a as usize];
            }
        }
        if term.is_zero() {
            return;
        }
        for (j, &s) in k.col_sums.iter().enumerate() {
            term = term * &col_poch[j][s as usize];
        }
        for (i, &s) in k.row_sums.iter().enumerate() {
            term = term * &row_poch[i][s as usize];
        }
        total += term;
    });
    Ok(total)
}

/// Reads `P(m, mt)` off the generating function
/// `prod_{i=0}^d (1 + sum_j u_{i,j} z_j)^{mt_i}`.
///
/// The product is expanded factor by factor, discarding every monomial not
/// dominated by `z^m`, and the coefficient of `z^m` is divided by
/// `N! / (m_0! m!)`.
pub fn eval_generating<S: Scalar>(
    kappa: &ParameterSet<S>,
    m: &DegreePoint,
    mt: &DegreePoint,
) -> Result<S, HypergError> {
    check_points(kappa, m, mt)?;
    let d = kappa.d();
    let target = &m.m;
    let mut exps = vec![mt.m0()];
    exps.extend_from_slice(&mt.m);

    let mut poly: HashMap<Vec<u32>, S> = HashMap::new();
    poly.insert(vec![0; d], S::one());
    for (i, &e) in exps.iter().enumerate() {
        let row: Vec<S> = (1..=d).map(|j| kappa.u_at(i, j).clone()).collect();
        for _ in 0..e {
            let mut next: HashMap<Vec<u32>, S> = HashMap::with_capacity(poly.len() * (d + 1));
            for (alpha, c) in &poly {
                *next.entry(alpha.clone()).or_insert_with(S::zero) += c;
                for j in 0..d {
                    if alpha[j] < target[j] && !row[j].is_zero() {
                        let mut beta = alpha.clone();
                        beta[j] += 1;
                        *next.entry(beta).or_insert_with(S::zero) += c.clone() * &row[j];
                    }
                }
            }
            poly = next;
        }
    }
    let coeff = poly.remove(target).unwrap_or_else(S::zero);
    let multinomial = factorial(m.n) / multi_factorial(m.to_index().parts());
    Ok(coeff / S::from_bigint(&multinomial))
}

/// Dense table of `P(n', nt')` over the lattice, rows indexed by `n` and
/// columns by `nt`, both in graded-lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialTable<S> {
    kappa: ParameterSet<S>,
    lattice: SimplexLattice,
    values: Vec<Vec<S>>,
}

impl<S: Scalar> PolynomialTable<S> {
    /// Wraps precomputed values, e.g. read back from a file.
    pub fn from_values(kappa: ParameterSet<S>, n: u32, values: Vec<Vec<S>>) -> Result<Self, HypergError> {
        let lattice = SimplexLattice::new(kappa.d(), n);
        let expected = lattice.len();
        let cols = values.iter().map(Vec::len).find(|&c| c != expected).unwrap_or(expected);
        if values.len() != expected || cols != expected {
            return Err(HypergError::TableShape { rows: values.len(), cols, expected });
        }
        Ok(Self { kappa, lattice, values })
    }

    pub fn kappa(&self) -> &ParameterSet<S> {
        &self.kappa
    }

    pub fn degree(&self) -> u32 {
        self.lattice.degree()
    }

    pub fn lattice(&self) -> &SimplexLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.values[row][col]
    }

    pub fn value(&self, n: &MultiIndex, nt: &MultiIndex) -> Option<&S> {
        let r = self.lattice.position(n)?;
        let c = self.lattice.position(nt)?;
        Some(&self.values[r][c])
    }

    pub fn transpose(&self) -> Vec<Vec<S>> {
        let len = self.lattice.len();
        (0..len).map(|c| (0..len).map(|r| self.values[r][c].clone()).collect()).collect()
    }

    /// Test hook: overwrite one entry.
    #[doc(hidden)]
    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.values[row][col] = value;
    }
}

/// All `P(n', nt')` for `n, nt` in the lattice of degree `n`, computed by
/// the hypergeometric sum. Rows are evaluated in parallel.
pub fn table<S: Scalar>(kappa: &ParameterSet<S>, n: u32) -> PolynomialTable<S> {
    let lattice = SimplexLattice::new(kappa.d(), n);
    let points: Vec<DegreePoint> = lattice.points().iter().map(DegreePoint::from_index).collect();
    let values: Vec<Vec<S>> = points
        .par_iter()
        .map(|row| {
            points
                .iter()
                .map(|col| eval_hypergeometric(kappa, row, col).expect("lattice points are in range"))
                .collect()
        })
        .collect();
    PolynomialTable {
        kappa: kappa.clone(),
        lattice,
        values,
    }
}

/// `w^lambda / lambda!` for every lattice point.
fn weights<S: Scalar>(lattice: &SimplexLattice, w: &[S]) -> Vec<S> {
    lattice
        .points()
        .iter()
        .map(|l| l.power_of(w) / S::from_bigint(&multi_factorial(l.parts())))
        .collect()
}

/// Both orthogonality relations for a table, without recomputing entries.
///
/// Columns: `N! sum_n P(n',a') P(n',b') pt^n/n! = delta_{a,b} a!/(N! nu^N p^a)`.
/// Rows: `N! sum_a P(n',a') P(k',a') p^a/a! = delta_{n,k} n!/(N! nu^N pt^n)`.
pub fn check_orthogonality_table<S: Scalar>(table: &PolynomialTable<S>, eps: f64) -> CheckReport {
    let kappa = table.kappa();
    let lattice = table.lattice();
    let n = lattice.degree();
    let len = lattice.len();
    let mut report = CheckReport::new("orthogonality", n);

    let n_fact = S::from_bigint(&factorial(n));
    let nu_n = kappa.nu().powi(n);
    let wt = weights(lattice, kappa.pt());
    let w = weights(lattice, kappa.p());
    let v = table.values();

    for a in 0..len {
        for b in a..len {
            let sum = (0..len).fold(S::zero(), |acc, r| acc + v[r][a].clone() * &v[r][b] * &wt[r]);
            let lhs = n_fact.clone() * sum;
            let rhs = if a == b {
                (n_fact.clone() * &nu_n * &w[a]).recip()
            } else {
                S::zero()
            };
            let pts = lattice.points();
            report.compare(|| format!("columns {} {}", pts[a], pts[b]), &lhs, &rhs, eps);
        }
    }
    for r in 0..len {
        for k in r..len {
            let sum = (0..len).fold(S::zero(), |acc, c| acc + v[r][c].clone() * &v[k][c] * &w[c]);
            let lhs = n_fact.clone() * sum;
            let rhs = if r == k {
                (n_fact.clone() * &nu_n * &wt[r]).recip()
            } else {
                S::zero()
            };
            let pts = lattice.points();
            report.compare(|| format!("rows {} {}", pts[r], pts[k]), &lhs, &rhs, eps);
        }
    }
    report
}

pub fn check_orthogonality<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    check_orthogonality_table(&table(kappa, n), eps)
}

/// `P_kappa(m, mt) = P_{b(kappa)}(mt, m)` over the whole lattice.
pub fn check_duality<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let direct = table(kappa, n);
    let dual = table(&kappa.involute(), n).transpose();
    let mut report = CheckReport::new("duality", n);
    let pts = direct.lattice().points();
    for (r, row) in direct.values().iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            report.compare(|| format!("{} {}", pts[r], pts[c]), x, &dual[r][c], eps);
        }
    }
    report
}

/// One-variable reduction: `sum_a (-m)_a (-mt)_a omega^a / ((-N)_a a!)`.
pub fn eval_univariate<S: Scalar>(omega: &S, n: u32, m: u32, mt: u32) -> S {
    let neg = |k: u32| -S::from_i64(k as i64);
    (0..=m.min(mt)).fold(S::zero(), |acc, a| {
        let num = pochhammer(&neg(m), a) * pochhammer(&neg(mt), a) * omega.powi(a);
        let den = pochhammer(&neg(n), a) * S::from_bigint(&factorial(a));
        acc + num / den
    })
}
