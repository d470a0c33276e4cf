//! Difference operators on the simplex lattice `{m : |m| <= N}`: the two
//! commuting families with the polynomials as joint eigenfunctions, and the
//! universal operator with eigenvalue `-|m|`.
//!
//! Operators are kept as stencils, one affine coefficient per shift, so
//! the term count and boundary behaviour can be read off directly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::hyperg::{self, PolynomialTable};
use crate::kappa::ParameterSet;
use crate::numeric::{Scalar, SimplexLattice};
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BispecError {
    #[error("operator index {index} out of range 1..={d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("nonzero coefficient at {point} points outside the lattice along {shift:?}")]
    LeavesLattice { point: String, shift: Vec<i32> },
    #[error("function has {found} values, lattice has {expected} points")]
    LengthMismatch { expected: usize, found: usize },
    #[error("operator is for d = {op_d}, N = {op_n}; lattice is d = {d}, N = {n}")]
    LatticeMismatch { op_d: usize, op_n: u32, d: usize, n: u32 },
}

/// `constant + slack (N - |x|) + sum_l coords[l] x_l` on points `x` of the
/// lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineCoeff<S> {
    pub constant: S,
    pub slack: S,
    pub coords: Vec<S>,
}

impl<S: Scalar> AffineCoeff<S> {
    pub fn zero(d: usize) -> Self {
        Self { constant: S::zero(), slack: S::zero(), coords: vec![S::zero(); d] }
    }

    pub fn constant(d: usize, c: S) -> Self {
        Self { constant: c, ..Self::zero(d) }
    }

    pub fn eval(&self, n: u32, x: &[u32]) -> S {
        let total: u32 = x.iter().sum();
        let mut acc = self.constant.clone();
        if !self.slack.is_zero() {
            acc += self.slack.clone() * S::from_i64(n as i64 - total as i64);
        }
        for (c, &xi) in self.coords.iter().zip(x) {
            if xi != 0 && !c.is_zero() {
                acc += c.clone() * S::from_i64(xi as i64);
            }
        }
        acc
    }

    /// Unique form `(c, a)` with value `c + sum_l a_l x_l`.
    pub fn normalized(&self, n: u32) -> (S, Vec<S>) {
        let c = self.constant.clone() + self.slack.clone() * S::from_i64(n as i64);
        let a = self.coords.iter().map(|x| x.clone() - &self.slack).collect();
        (c, a)
    }

    pub fn is_zero(&self, n: u32, eps: f64) -> bool {
        let (c, a) = self.normalized(n);
        c.is_negligible(eps) && a.iter().all(|x| x.is_negligible(eps))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            constant: self.constant.clone() + &other.constant,
            slack: self.slack.clone() + &other.slack,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        Self {
            constant: self.constant.clone() * k,
            slack: self.slack.clone() * k,
            coords: self.coords.iter().map(|a| a.clone() * k).collect(),
        }
    }

    /// Largest coefficient gap between the normalized forms.
    pub fn residual(&self, other: &Self, n: u32) -> f64 {
        let (c1, a1) = self.normalized(n);
        let (c2, a2) = other.normalized(n);
        a1.iter()
            .zip(&a2)
            .map(|(x, y)| (x.clone() - y).magnitude())
            .fold((c1 - c2).magnitude(), f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StencilTerm<S> {
    pub shift: Vec<i32>,
    pub coeff: AffineCoeff<S>,
}

/// `(L F)(x) = sum_s c_s(x) F(x + s)`, with an optional eigenvalue given as
/// an affine function of the dual point.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceOperator<S> {
    pub label: String,
    pub d: usize,
    pub n: u32,
    pub terms: Vec<StencilTerm<S>>,
    pub eigenvalue: Option<AffineCoeff<S>>,
}

fn unit_shift(d: usize, plus: Option<usize>, minus: Option<usize>) -> Vec<i32> {
    let mut s = vec![0; d];
    if let Some(k) = plus {
        s[k - 1] += 1;
    }
    if let Some(l) = minus {
        s[l - 1] -= 1;
    }
    s
}

impl<S: Scalar> DifferenceOperator<S> {
    fn new(label: String, d: usize, n: u32, eigenvalue: Option<AffineCoeff<S>>) -> Self {
        Self { label, d, n, terms: Vec::new(), eigenvalue }
    }

    /// Adds a term unless its coefficient vanishes identically.
    fn push(&mut self, shift: Vec<i32>, coeff: AffineCoeff<S>) {
        if !coeff.is_zero(self.n, 0.0) {
            self.terms.push(StencilTerm { shift, coeff });
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, shift: &[i32]) -> Option<&StencilTerm<S>> {
        self.terms.iter().find(|t| t.shift == shift)
    }

    /// `d^2 + d + 1`.
    pub fn max_terms(&self) -> usize {
        self.d * self.d + self.d + 1
    }

    /// Coefficients by shift, summed over duplicate shifts.
    pub fn by_shift(&self) -> BTreeMap<Vec<i32>, AffineCoeff<S>> {
        let mut out: BTreeMap<Vec<i32>, AffineCoeff<S>> = BTreeMap::new();
        for t in &self.terms {
            let entry = out.entry(t.shift.clone()).or_insert_with(|| AffineCoeff::zero(self.d));
            *entry = entry.add(&t.coeff);
        }
        out
    }

    /// Largest coefficient gap between two operators, shift by shift.
    pub fn residual(&self, other: &Self) -> f64 {
        let a = self.by_shift();
        let b = other.by_shift();
        let zero = AffineCoeff::zero(self.d);
        a.keys()
            .chain(b.keys())
            .map(|s| a.get(s).unwrap_or(&zero).residual(b.get(s).unwrap_or(&zero), self.n))
            .fold(0.0, f64::max)
    }
}

/// Shared shape of both families. `outer` carries the weight in front
/// (`pt_i` or `p_i`), `inner` the weights indexed by `k` and `j`, and
/// `w(k)` the `u` entry tying `k` to the fixed index `i`.
fn recurrence<S: Scalar>(
    label: String,
    nu: &S,
    n: u32,
    outer: &S,
    inner: &[S],
    w: impl Fn(usize) -> S,
    i: usize,
) -> DifferenceOperator<S> {
    let d = inner.len() - 1;
    let mut eig = AffineCoeff::constant(d, -S::from_ratio(n as i64, d as i64 + 1));
    eig.coords[i - 1] = S::one();
    let mut op = DifferenceOperator::new(label, d, n, Some(eig));

    for l in 1..=d {
        let mut c = AffineCoeff::zero(d);
        c.coords[l - 1] = outer.clone() * w(l);
        op.push(unit_shift(d, None, Some(l)), c);
    }
    for k in 1..=d {
        let mut c = AffineCoeff::zero(d);
        c.slack = nu.clone() * outer * &inner[k] * w(k);
        op.push(unit_shift(d, Some(k), None), c);
    }
    let mut diag = AffineCoeff::zero(d);
    let shift = S::from_ratio(n as i64, d as i64 + 1);
    for j in 1..=d {
        let a = outer.clone() * (nu.clone() * &inner[j] * w(j) * w(j) - S::one());
        diag.coords[j - 1] = a.clone();
        diag.constant -= a * &shift;
    }
    op.push(vec![0; d], diag);
    for k in 1..=d {
        for l in (1..=d).filter(|&l| l != k) {
            let mut c = AffineCoeff::zero(d);
            c.coords[l - 1] = nu.clone() * outer * &inner[k] * w(k) * w(l);
            op.push(unit_shift(d, Some(k), Some(l)), c);
        }
    }
    op
}

fn check_i<S: Scalar>(kappa: &ParameterSet<S>, i: usize) -> Result<(), BispecError> {
    if i == 0 || i > kappa.d() {
        return Err(BispecError::IndexOutOfRange { index: i, d: kappa.d() });
    }
    Ok(())
}

/// `L_i`, acting on `mt` with eigenvalue `m_i - N/(d+1)`.
pub fn operator_mtilde<S: Scalar>(kappa: &ParameterSet<S>, n: u32, i: usize) -> Result<DifferenceOperator<S>, BispecError> {
    check_i(kappa, i)?;
    let u = kappa.u();
    Ok(recurrence(format!("L_{i}"), kappa.nu(), n, &kappa.pt()[i], kappa.p(), |k| u[(k, i)].clone(), i))
}

/// `M_i`, acting on `m` with eigenvalue `mt_i - N/(d+1)`.
pub fn operator_m<S: Scalar>(kappa: &ParameterSet<S>, n: u32, i: usize) -> Result<DifferenceOperator<S>, BispecError> {
    check_i(kappa, i)?;
    let u = kappa.u();
    Ok(recurrence(format!("M_{i}"), kappa.nu(), n, &kappa.p()[i], kappa.pt(), |k| u[(i, k)].clone(), i))
}

/// The universal operator in `mt`, eigenvalue `-|m|`.
pub fn operator_universal<S: Scalar>(kappa: &ParameterSet<S>, n: u32) -> DifferenceOperator<S> {
    let d = kappa.d();
    let p = kappa.p();
    let eig = AffineCoeff { constant: S::zero(), slack: S::zero(), coords: vec![-S::one(); d] };
    let mut op = DifferenceOperator::new("universal".into(), d, n, Some(eig));
    for l in 1..=d {
        let mut c = AffineCoeff::zero(d);
        c.coords[l - 1] = p[0].clone();
        op.push(unit_shift(d, None, Some(l)), c);
    }
    for l in 1..=d {
        let mut c = AffineCoeff::zero(d);
        c.slack = p[l].clone();
        op.push(unit_shift(d, Some(l), None), c);
    }
    let diag = AffineCoeff {
        constant: -S::from_i64(n as i64),
        slack: p[0].clone(),
        coords: p[1..].to_vec(),
    };
    op.push(vec![0; d], diag);
    for k in 1..=d {
        for l in (1..=d).filter(|&l| l != k) {
            let mut c = AffineCoeff::zero(d);
            c.coords[l - 1] = p[k].clone();
            op.push(unit_shift(d, Some(k), Some(l)), c);
        }
    }
    op
}

/// `(L F)(x) = sum_s c_s(x) F(x + s)` over the lattice, with `F` indexed
/// like `lattice.points()`.
pub fn apply<S: Scalar>(op: &DifferenceOperator<S>, lattice: &SimplexLattice, f: &[S]) -> Result<Vec<S>, BispecError> {
    if lattice.d() != op.d || lattice.degree() != op.n {
        return Err(BispecError::LatticeMismatch { op_d: op.d, op_n: op.n, d: lattice.d(), n: lattice.degree() });
    }
    if f.len() != lattice.len() {
        return Err(BispecError::LengthMismatch { expected: lattice.len(), found: f.len() });
    }
    let mut out = Vec::with_capacity(f.len());
    let mut target = vec![0u32; op.d];
    for x in lattice.points() {
        let tail = x.tail();
        let mut acc = S::zero();
        for t in &op.terms {
            let c = t.coeff.eval(op.n, tail);
            if c.is_zero() {
                continue;
            }
            let mut inside = true;
            for (k, (&a, &s)) in tail.iter().zip(&t.shift).enumerate() {
                let v = a as i64 + s as i64;
                if v < 0 {
                    inside = false;
                    break;
                }
                target[k] = v as u32;
            }
            let pos = if inside { lattice.position_of_tail(&target) } else { None };
            match pos {
                Some(pos) => acc += c * &f[pos],
                None => return Err(BispecError::LeavesLattice { point: x.to_string(), shift: t.shift.clone() }),
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Both families and the universal operator on a precomputed table: rows
/// are eigenfunctions of `L_i` and the universal operator, columns of `M_i`.
pub fn check_eigen_table<S: Scalar>(table: &PolynomialTable<S>, eps: f64) -> CheckReport {
    let kappa = table.kappa();
    let n = table.degree();
    let d = kappa.d();
    let lattice = table.lattice();
    let pts = lattice.points();
    let columns = table.transpose();
    let mut report = CheckReport::new("recurrence", n);

    let run = |op: &DifferenceOperator<S>, lines: &[Vec<S>], report: &mut CheckReport| {
        let eig = op.eigenvalue.as_ref().expect("canonical operator");
        for (r, line) in lines.iter().enumerate() {
            let ev = eig.eval(n, pts[r].tail());
            match apply(op, lattice, line) {
                Ok(got) => {
                    for (c, g) in got.iter().enumerate() {
                        let want = ev.clone() * &line[c];
                        report.compare(|| format!("{} at {} for {}", op.label, pts[c], pts[r]), g, &want, eps);
                    }
                }
                Err(e) => report.fail(op.label.clone(), e.to_string()),
            }
        }
    };
    for i in 1..=d {
        run(&operator_mtilde(kappa, n, i).expect("in range"), table.values(), &mut report);
        run(&operator_m(kappa, n, i).expect("in range"), &columns, &mut report);
    }
    report
}

pub fn check_eigen<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    check_eigen_table(&hyperg::table(kappa, n), eps)
}

/// Eigenvalue `-|m|` of the universal operator on every row, and the
/// coefficient identity `universal = -sum_i L_i - dN/(d+1)`.
pub fn check_universal_table<S: Scalar>(table: &PolynomialTable<S>, eps: f64) -> CheckReport {
    let kappa = table.kappa();
    let n = table.degree();
    let lattice = table.lattice();
    let pts = lattice.points();
    let mut report = CheckReport::new("universal", n);
    let op = operator_universal(kappa, n);
    for (r, row) in table.values().iter().enumerate() {
        let ev = -S::from_i64(pts[r].tail().iter().sum::<u32>() as i64);
        match apply(&op, lattice, row) {
            Ok(got) => {
                for (c, g) in got.iter().enumerate() {
                    let want = ev.clone() * &row[c];
                    report.compare(|| format!("universal at {} for {}", pts[c], pts[r]), g, &want, eps);
                }
            }
            Err(e) => report.fail("universal".into(), e.to_string()),
        }
    }
    report.absorb(check_universal_identity(kappa, n, eps));
    report
}

pub fn check_universal<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    check_universal_table(&hyperg::table(kappa, n), eps)
}

/// `-sum_i L_i - dN/(d+1)` as a stencil.
pub fn summed_recurrence<S: Scalar>(kappa: &ParameterSet<S>, n: u32) -> DifferenceOperator<S> {
    let d = kappa.d();
    let mut out = DifferenceOperator::new("-sum L_i - dN/(d+1)".into(), d, n, None);
    let mut acc: BTreeMap<Vec<i32>, AffineCoeff<S>> = BTreeMap::new();
    for i in 1..=d {
        for (s, c) in operator_mtilde(kappa, n, i).expect("in range").by_shift() {
            let e = acc.entry(s).or_insert_with(|| AffineCoeff::zero(d));
            *e = e.add(&c.scale(&-S::one()));
        }
    }
    let e = acc.entry(vec![0; d]).or_insert_with(|| AffineCoeff::zero(d));
    e.constant -= S::from_ratio(d as i64 * n as i64, d as i64 + 1);
    for (s, c) in acc {
        out.push(s, c);
    }
    out
}

pub fn check_universal_identity<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("universal identity", n);
    let lhs = summed_recurrence(kappa, n).by_shift();
    let rhs = operator_universal(kappa, n).by_shift();
    let zero = AffineCoeff::zero(d);
    let mut shifts: Vec<&Vec<i32>> = lhs.keys().chain(rhs.keys()).collect();
    shifts.sort();
    shifts.dedup();
    for s in shifts {
        let (a, b) = (lhs.get(s).unwrap_or(&zero), rhs.get(s).unwrap_or(&zero));
        let (ca, va) = a.normalized(n);
        let (cb, vb) = b.normalized(n);
        report.compare(|| format!("shift {s:?} constant"), &ca, &cb, eps);
        for (l, (x, y)) in va.iter().zip(&vb).enumerate() {
            report.compare(|| format!("shift {s:?} coefficient of x_{}", l + 1), x, y, eps);
        }
    }
    report
}

fn delta<S: Scalar>(len: usize, at: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[at] = S::one();
    v
}

/// Pairwise commutation within each family, as operators on every
/// indicator function of the lattice.
pub fn check_commute<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("commute", n);
    if d == 1 {
        report.note("single generator per family, commutation is vacuous");
        return report;
    }
    let lattice = SimplexLattice::new(d, n);
    let families: [Vec<DifferenceOperator<S>>; 2] = [
        (1..=d).map(|i| operator_mtilde(kappa, n, i).expect("in range")).collect(),
        (1..=d).map(|i| operator_m(kappa, n, i).expect("in range")).collect(),
    ];
    for ops in &families {
        for a in 0..d {
            for b in a + 1..d {
                let (x, y) = (&ops[a], &ops[b]);
                let parts: Vec<CheckReport> = (0..lattice.len())
                    .into_par_iter()
                    .map(|at| {
                        let mut r = CheckReport::new("commute", n);
                        let f = delta::<S>(lattice.len(), at);
                        let xy = apply(x, &lattice, &apply(y, &lattice, &f).expect("stays inside"));
                        let yx = apply(y, &lattice, &apply(x, &lattice, &f).expect("stays inside"));
                        match (xy, yx) {
                            (Ok(xy), Ok(yx)) => {
                                for (c, (g, h)) in xy.iter().zip(&yx).enumerate() {
                                    r.compare(
                                        || format!("[{}, {}] delta_{} at {}", x.label, y.label, lattice.points()[at], lattice.points()[c]),
                                        g,
                                        h,
                                        eps,
                                    );
                                }
                            }
                            (Err(e), _) | (_, Err(e)) => r.fail(format!("{} {}", x.label, y.label), e.to_string()),
                        }
                        r
                    })
                    .collect();
                for r in parts {
                    report.checked += r.checked;
                    report.max_residual = report.max_residual.max(r.max_residual);
                    report.pass &= r.pass;
                    report.failures.extend(r.failures);
                }
            }
        }
    }
    report
}

/// Term counts, boundary vanishing at every lattice point, and
/// `M_i(kappa) = L_i(b(kappa))` coefficient by coefficient.
pub fn check_stencils<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("stencil", n);
    let lattice = SimplexLattice::new(d, n);
    let dual = kappa.involute();
    let mut ops = Vec::new();
    for i in 1..=d {
        let l = operator_mtilde(kappa, n, i).expect("in range");
        let m = operator_m(kappa, n, i).expect("in range");
        let mirrored = operator_mtilde(&dual, n, i).expect("in range");
        let res = m.residual(&mirrored);
        report.checked += 1;
        report.max_residual = report.max_residual.max(res);
        if res > eps {
            report.fail(format!("M_{i} vs L_{i} of the involuted set"), format!("residual {res:e}"));
        }
        ops.push(l);
        ops.push(m);
    }
    ops.push(operator_universal(kappa, n));

    for op in &ops {
        let bound = op.max_terms();
        report.require(op.len() <= bound, || format!("{} term count", op.label), || format!("{} > {bound}", op.len()));
        for x in lattice.points() {
            let tail = x.tail();
            let total: u32 = tail.iter().sum();
            for t in &op.terms {
                let outward = t.shift.iter().zip(tail).any(|(&s, &a)| a as i64 + s as i64 <= -1)
                    || total as i64 + t.shift.iter().map(|&s| s as i64).sum::<i64>() > n as i64;
                if outward {
                    let c = t.coeff.eval(n, tail);
                    report.require(
                        c.is_negligible(eps),
                        || format!("{} at {x} along {:?}", op.label, t.shift),
                        || format!("outward coefficient {}", c.to_canonical()),
                    );
                }
            }
        }
    }
    let counts: Vec<String> = ops.iter().map(|o| format!("{}:{}", o.label, o.len())).collect();
    report.note(format!("attained term counts (bound {}): {}", d * d + d + 1, counts.join(" ")));
    report
}
