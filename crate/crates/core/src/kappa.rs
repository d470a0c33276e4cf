//! The parameter space of multivariate Krawtchouk polynomials.
//!
//! A point is a 4-tuple `(nu, P, P~, U)` with `P = diag(p)`, `P~ = diag(pt)`
//! and a bordered matrix `U` (first row and column all ones) subject to
//! `nu P U P~ U^t = I`. [`ParameterSet`] values can only be obtained through
//! [`RawParameters::validate`] or the constructors in this module, all of
//! which validate, so downstream code never re-checks these conditions.

use std::fmt;

use thiserror::Error;

use crate::matrix::Mat;
use crate::numeric::{Approx, Exact, Scalar, DEFAULT_EPS};

/// Unvalidated parameter data, as read from a file or assembled by hand.
#[derive(Clone, Debug, PartialEq)]
pub struct RawParameters<S> {
    pub d: usize,
    pub nu: S,
    pub p: Vec<S>,
    pub pt: Vec<S>,
    pub u: Vec<Vec<S>>,
}

/// Which diagonal a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagonal {
    P,
    Pt,
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagonal::P => write!(f, "p"),
            Diagonal::Pt => write!(f, "pt"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Dimension { what: &'static str, expected: usize, found: usize },
    NuZero,
    /// Condition (i): `p_0` or `pt_0` differs from `1/nu`.
    HeadNotInverseNu { which: Diagonal },
    /// Condition (ii): border entry of `U` is not one.
    BorderNotOne { i: usize, j: usize },
    /// Condition (iii): entry of `nu P U P~ U^t - I`.
    MatrixEquation { i: usize, j: usize, residual: String },
    ZeroWeight { which: Diagonal, index: usize },
    SumNotOne { which: Diagonal, sum: String },
}

impl Violation {
    /// Short tag of the violated condition.
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::Dimension { .. } => "dimension",
            Violation::NuZero => "nu",
            Violation::HeadNotInverseNu { .. } => "i",
            Violation::BorderNotOne { .. } => "ii",
            Violation::MatrixEquation { .. } => "iii",
            Violation::ZeroWeight { .. } => "nonzero-weights",
            Violation::SumNotOne { .. } => "sum-to-one",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { what, expected, found } => {
                write!(f, "{what} has size {found}, expected {expected}")
            }
            Violation::NuZero => write!(f, "nu is zero"),
            Violation::HeadNotInverseNu { which } => write!(f, "(i) {which}_0 != 1/nu"),
            Violation::BorderNotOne { i, j } => write!(f, "(ii) u[{i}][{j}] != 1"),
            Violation::MatrixEquation { i, j, residual } => {
                write!(f, "(iii) (nu P U Pt U^t - I)[{i}][{j}] = {residual}")
            }
            Violation::ZeroWeight { which, index } => write!(f, "{which}[{index}] is zero"),
            Violation::SumNotOne { which, sum } => write!(f, "sum of {which} is {sum}, not 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KappaError {
    #[error("invalid parameter set: {0}")]
    Invalid(ValidationReport),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("{which}[{index}] is zero")]
    ZeroWeight { which: Diagonal, index: usize },
    #[error("weights sum to {0}, not 1")]
    SumNotOne(String),
    #[error("Gram-Schmidt breakdown at column {index}: {reason}")]
    GramSchmidt { index: usize, reason: &'static str },
    #[error("division by zero: {0} vanishes")]
    VanishingFactor(String),
    #[error("q must not be 0 or 1")]
    ForbiddenQ,
}

impl<S: Scalar> RawParameters<S> {
    /// Validates with the default tolerance.
    pub fn validate(self) -> Result<ParameterSet<S>, KappaError> {
        self.validate_with(DEFAULT_EPS)
    }

    /// Validates; `eps` is ignored in exact mode.
    pub fn validate_with(self, eps: f64) -> Result<ParameterSet<S>, KappaError> {
        let report = self.violations(eps);
        if report.is_empty() {
            Ok(self.seal())
        } else {
            Err(KappaError::Invalid(ValidationReport { violations: report }))
        }
    }

    /// Every violated condition. Empty iff the data is a valid point.
    pub fn violations(&self, eps: f64) -> Vec<Violation> {
        let d = self.d;
        let n = d + 1;
        let mut out = Vec::new();
        if d == 0 {
            out.push(Violation::Dimension { what: "d", expected: 1, found: 0 });
            return out;
        }
        let dims = [("p", self.p.len()), ("pt", self.pt.len()), ("u", self.u.len())];
        for (what, found) in dims {
            if found != n {
                out.push(Violation::Dimension { what, expected: n, found });
            }
        }
        for row in &self.u {
            if row.len() != n {
                out.push(Violation::Dimension { what: "u row", expected: n, found: row.len() });
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.nu.is_negligible(eps) {
            out.push(Violation::NuZero);
            return out;
        }
        let inv_nu = self.nu.recip();
        if !self.p[0].close_to(&inv_nu, eps) {
            out.push(Violation::HeadNotInverseNu { which: Diagonal::P });
        }
        if !self.pt[0].close_to(&inv_nu, eps) {
            out.push(Violation::HeadNotInverseNu { which: Diagonal::Pt });
        }
        for j in 0..n {
            if !self.u[0][j].close_to(&S::one(), eps) {
                out.push(Violation::BorderNotOne { i: 0, j });
            }
            if j > 0 && !self.u[j][0].close_to(&S::one(), eps) {
                out.push(Violation::BorderNotOne { i: j, j: 0 });
            }
        }
        let lhs = matrix_equation_lhs(&self.nu, &self.p, &self.pt, &Mat::from_rows(self.u.clone()));
        let id = Mat::identity(n);
        for (i, j) in lhs.mismatches(&id, eps) {
            let residual = (lhs[(i, j)].clone() - &id[(i, j)]).to_canonical();
            out.push(Violation::MatrixEquation { i, j, residual });
        }
        for (which, v) in [(Diagonal::P, &self.p), (Diagonal::Pt, &self.pt)] {
            for (index, x) in v.iter().enumerate() {
                if x.is_negligible(eps) {
                    out.push(Violation::ZeroWeight { which, index });
                }
            }
            let sum = v.iter().fold(S::zero(), |a, b| a + b);
            if !sum.close_to(&S::one(), eps) {
                out.push(Violation::SumNotOne { which, sum: sum.to_canonical() });
            }
        }
        out
    }

    fn seal(self) -> ParameterSet<S> {
        ParameterSet {
            d: self.d,
            nu: self.nu,
            p: self.p,
            pt: self.pt,
            u: Mat::from_rows(self.u),
        }
    }

    /// Seals without validating. Only for detector tests that need a
    /// deliberately broken point.
    #[doc(hidden)]
    pub fn seal_unchecked(self) -> ParameterSet<S> {
        self.seal()
    }
}

/// `nu P U P~ U^t`.
fn matrix_equation_lhs<S: Scalar>(nu: &S, p: &[S], pt: &[S], u: &Mat<S>) -> Mat<S> {
    let pu = &Mat::diag(p) * u;
    let ptut = &Mat::diag(pt) * &u.transpose();
    (&pu * &ptut).scale(nu)
}

/// A validated point `(nu, P, P~, U)` of dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet<S> {
    d: usize,
    nu: S,
    p: Vec<S>,
    pt: Vec<S>,
    u: Mat<S>,
}

impl<S: Scalar> ParameterSet<S> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> &S {
        &self.nu
    }

    /// Diagonal of `P`, length `d + 1`.
    pub fn p(&self) -> &[S] {
        &self.p
    }

    /// Diagonal of `P~`, length `d + 1`.
    pub fn pt(&self) -> &[S] {
        &self.pt
    }

    pub fn u(&self) -> &Mat<S> {
        &self.u
    }

    pub fn u_at(&self, i: usize, j: usize) -> &S {
        &self.u[(i, j)]
    }

    /// `omega_{i,j} = 1 - u_{i,j}` for `1 <= i, j <= d`, as a `d x d` matrix.
    pub fn omega(&self) -> Mat<S> {
        let mut w = Mat::zeros(self.d, self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                w[(i, j)] = S::one() - &self.u[(i + 1, j + 1)];
            }
        }
        w
    }

    /// The bispectral involution `(nu, P, P~, U) -> (nu, P~, P, U^t)`.
    pub fn involute(&self) -> Self {
        let out = Self {
            d: self.d,
            nu: self.nu.clone(),
            p: self.pt.clone(),
            pt: self.p.clone(),
            u: self.u.transpose(),
        };
        debug_assert!(out.to_raw().violations(DEFAULT_EPS).is_empty());
        out
    }

    pub fn to_raw(&self) -> RawParameters<S> {
        RawParameters {
            d: self.d,
            nu: self.nu.clone(),
            p: self.p.clone(),
            pt: self.pt.clone(),
            u: self.u.to_rows(),
        }
    }

    /// `nu P U P~ U^t`; equals the identity for every sealed value.
    pub fn matrix_equation_lhs(&self) -> Mat<S> {
        matrix_equation_lhs(&self.nu, &self.p, &self.pt, &self.u)
    }
}

impl ParameterSet<Exact> {
    /// The same point in floating arithmetic.
    pub fn to_approx(&self) -> ParameterSet<Approx> {
        ParameterSet {
            d: self.d,
            nu: Approx::from_rational(&self.nu),
            p: self.p.iter().map(Approx::from_rational).collect(),
            pt: self.pt.iter().map(Approx::from_rational).collect(),
            u: self.u.map(Approx::from_rational),
        }
    }
}

fn check_weights<S: Scalar>(p: &[S]) -> Result<(), KappaError> {
    if p.len() < 2 {
        return Err(KappaError::ZeroDimension);
    }
    if let Some(index) = p.iter().position(|x| x.is_negligible(DEFAULT_EPS)) {
        return Err(KappaError::ZeroWeight { which: Diagonal::P, index });
    }
    let sum = p.iter().fold(S::zero(), |a, b| a + b);
    if !sum.close_to(&S::one(), DEFAULT_EPS) {
        return Err(KappaError::SumNotOne(sum.to_canonical()));
    }
    Ok(())
}

/// Builds `U` by Gram-Schmidt from `P` alone.
///
/// Columns start from `w_0 = (1, ..., 1)` and the standard basis vectors
/// `e_1, ..., e_d` in index order, are orthogonalized for
/// `<a, b> = a^t P b`, and are rescaled so their first coordinate is 1.
/// Then `P~ = p_0 (U^t P U)^{-1}` and `nu = 1/p_0`.
pub fn griffiths_from_p<S: Scalar>(p: &[S]) -> Result<ParameterSet<S>, KappaError> {
    check_weights(p)?;
    let n = p.len();
    let inner = |a: &[S], b: &[S]| {
        a.iter()
            .zip(b)
            .zip(p)
            .fold(S::zero(), |acc, ((x, y), w)| acc + x.clone() * y * w)
    };
    let mut cols: Vec<Vec<S>> = vec![vec![S::one(); n]];
    let mut norms: Vec<S> = vec![inner(&cols[0], &cols[0])];
    for j in 1..n {
        let mut w: Vec<S> = (0..n).map(|k| if k == j { S::one() } else { S::zero() }).collect();
        let e = w.clone();
        for (prev, norm) in cols.iter().zip(&norms) {
            if norm.is_negligible(DEFAULT_EPS) {
                return Err(KappaError::GramSchmidt { index: j - 1, reason: "zero norm" });
            }
            let c = inner(&e, prev) / norm.clone();
            for (wk, pk) in w.iter_mut().zip(prev) {
                *wk -= c.clone() * pk;
            }
        }
        if w[0].is_negligible(DEFAULT_EPS) {
            return Err(KappaError::GramSchmidt { index: j, reason: "zero leading coordinate" });
        }
        let lead = w[0].clone();
        let w: Vec<S> = w.into_iter().map(|x| x / lead.clone()).collect();
        let norm = inner(&w, &w);
        if norm.is_negligible(DEFAULT_EPS) {
            return Err(KappaError::GramSchmidt { index: j, reason: "zero norm" });
        }
        cols.push(w);
        norms.push(norm);
    }
    let p0 = p[0].clone();
    let pt: Vec<S> = norms.iter().map(|q| p0.clone() / q.clone()).collect();
    // columns become U's columns
    let u: Vec<Vec<S>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
    RawParameters {
        d: n - 1,
        nu: p0.recip(),
        p: p.to_vec(),
        pt,
        u,
    }
    .validate()
}

fn nonzero<S: Scalar>(x: S, name: &str) -> Result<S, KappaError> {
    if x.is_negligible(DEFAULT_EPS) {
        Err(KappaError::VanishingFactor(name.to_string()))
    } else {
        Ok(x)
    }
}

/// The bivariate family of Hoare and Rahman, parametrized by four numbers.
///
/// Some combinations divide by zero; the first vanishing factor is named in
/// the error.
pub fn family_hoare_rahman<S: Scalar>(a: [S; 4]) -> Result<ParameterSet<S>, KappaError> {
    let [p1, p2, p3, p4] = a;
    let s = nonzero(p1.clone() + &p2 + &p3 + &p4, "p1+p2+p3+p4")?;
    let s12 = nonzero(p1.clone() + &p2, "p1+p2")?;
    let s13 = nonzero(p1.clone() + &p3, "p1+p3")?;
    let s24 = nonzero(p2.clone() + &p4, "p2+p4")?;
    let s34 = nonzero(p3.clone() + &p4, "p3+p4")?;
    let p1 = nonzero(p1, "p1")?;
    let p2 = nonzero(p2, "p2")?;
    let p3 = nonzero(p3, "p3")?;
    let p4 = nonzero(p4, "p4")?;
    let one = S::one();

    let u11 = one.clone() - s12.clone() * &s13 / (p1.clone() * &s);
    let u12 = one.clone() - s12.clone() * &s24 / (p2.clone() * &s);
    let u21 = one.clone() - s13.clone() * &s34 / (p3.clone() * &s);
    let u22 = one.clone() - s24.clone() * &s34 / (p4.clone() * &s);

    let w1 = p1.clone() * &p2 * &s / (s12.clone() * &s13 * &s24);
    let w2 = p3.clone() * &p4 * &s / (s13.clone() * &s24 * &s34);
    let wt1 = p1 * &p3 * &s / (s12.clone() * &s13 * &s34);
    let wt2 = p2 * &p4 * &s / (s12 * &s24 * &s34);
    let w0 = nonzero(one.clone() - &w1 - &w2, "p0 = 1-p_1-p_2")?;

    RawParameters {
        d: 2,
        nu: w0.recip(),
        p: vec![w0.clone(), w1, w2],
        pt: vec![w0, wt1, wt2],
        u: vec![
            vec![one.clone(), one.clone(), one.clone()],
            vec![one.clone(), u11, u12],
            vec![one, u21, u22],
        ],
    }
    .validate()
}

/// The family of Milch: `P` is free, `P~` and a near-triangular `U` are
/// explicit in the partial sums `1 - p_1 - ... - p_k`.
pub fn family_milch<S: Scalar>(p: &[S]) -> Result<ParameterSet<S>, KappaError> {
    check_weights(p)?;
    let n = p.len();
    let d = n - 1;
    // tails[k] = 1 - sum_{j=1..k} p_j
    let mut tails = vec![S::one()];
    for k in 1..=d {
        let t = tails[k - 1].clone() - &p[k];
        tails.push(nonzero(t, &format!("1-p_1-...-p_{k}"))?);
    }
    let p0 = p[0].clone();
    let mut pt = vec![p0.clone()];
    for k in 1..=d {
        pt.push(p[k].clone() * &p0 / (tails[k].clone() * &tails[k - 1]));
    }
    let mut u = vec![vec![S::zero(); n]; n];
    for (i, row) in u.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = match i.cmp(&j) {
                std::cmp::Ordering::Less if i == 0 => S::one(),
                std::cmp::Ordering::Less => S::zero(),
                std::cmp::Ordering::Greater => S::one(),
                std::cmp::Ordering::Equal if i == 0 => S::one(),
                std::cmp::Ordering::Equal => -(tails[i].clone() / p[i].clone()),
            };
        }
    }
    RawParameters { d, nu: p0.recip(), p: p.to_vec(), pt, u }.validate()
}

/// The family built from a single ratio `q` with `P = P~`.
pub fn family_ds<S: Scalar>(q: S, d: usize) -> Result<ParameterSet<S>, KappaError> {
    if d == 0 {
        return Err(KappaError::ZeroDimension);
    }
    if q.is_negligible(DEFAULT_EPS) || q.close_to(&S::one(), DEFAULT_EPS) {
        return Err(KappaError::ForbiddenQ);
    }
    let qinv = q.recip();
    let p0 = qinv.powi(d as u32);
    let mut p = vec![p0.clone()];
    for k in 1..=d {
        // q^{-d+k-1} (q - 1)
        p.push(qinv.powi((d + 1 - k) as u32) * (q.clone() - S::one()));
    }
    let anti = (S::one() - q).recip();
    let n = d + 1;
    let u: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i + j).cmp(&(d + 1)) {
                    std::cmp::Ordering::Less => S::one(),
                    std::cmp::Ordering::Equal => anti.clone(),
                    std::cmp::Ordering::Greater => S::zero(),
                })
                .collect()
        })
        .collect();
    RawParameters { d, nu: p0.recip(), p: p.clone(), pt: p, u }.validate()
}
