//! Homogeneous polynomials in `x_0, ..., x_d` and the `gl_{d+1}` action
//! `beta . f = sum_{i,j} beta_{i,j} x_i d/dx_j f`.

use std::collections::BTreeMap;

use crate::matrix::Mat;
use crate::numeric::{MultiIndex, Scalar};

use super::LieError;

/// Sparse homogeneous polynomial of degree `n` in `nvars` variables.
/// Exact zeros are dropped on insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogPoly<S> {
    nvars: usize,
    n: u32,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HomogPoly<S> {
    pub fn zero(nvars: usize, n: u32) -> Self {
        Self { nvars, n, terms: BTreeMap::new() }
    }

    pub fn monomial(lambda: MultiIndex) -> Self {
        Self::term(lambda, S::one())
    }

    pub fn term(lambda: MultiIndex, c: S) -> Self {
        let mut out = Self::zero(lambda.len(), lambda.degree());
        out.add_term(lambda, c);
        out
    }

    /// Degree-one form `sum_k coeffs[k] x_k`.
    pub fn linear(coeffs: &[S]) -> Self {
        let nvars = coeffs.len();
        let mut out = Self::zero(nvars, 1);
        for (k, c) in coeffs.iter().enumerate() {
            let mut parts = vec![0; nvars];
            parts[k] = 1;
            out.add_term(MultiIndex::new(parts), c.clone());
        }
        out
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::term(MultiIndex::new(vec![0; nvars]), c)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, lambda: &MultiIndex) -> S {
        self.terms.get(lambda).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, lambda: MultiIndex, c: S) {
        debug_assert_eq!(lambda.len(), self.nvars);
        debug_assert_eq!(lambda.degree(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = Self::zero(self.nvars, self.n);
        for (l, c) in &self.terms {
            out.add_term(l.clone(), c.clone() * k);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, LieError> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LieError> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars, self.n + other.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let parts = a.parts().iter().zip(b.parts()).map(|(x, y)| x + y).collect();
                out.add_term(MultiIndex::new(parts), ca.clone() * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, S::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `x_j` by `forms[j]`; the forms share one variable set.
    pub fn substitute(&self, forms: &[Self]) -> Self {
        assert_eq!(forms.len(), self.nvars, "one form per variable");
        let target = forms.first().map_or(0, |f| f.nvars);
        let mut out = Self::zero(target, self.n * forms.first().map_or(0, |f| f.n));
        let mut cache: Vec<Vec<Self>> = forms.iter().map(|f| vec![Self::constant(target, S::one()), f.clone()]).collect();
        for (lambda, c) in &self.terms {
            let mut prod = Self::constant(target, c.clone());
            for (j, &e) in lambda.parts().iter().enumerate() {
                while cache[j].len() <= e as usize {
                    let next = cache[j].last().expect("non-empty").mul(&forms[j]);
                    cache[j].push(next);
                }
                prod = prod.mul(&cache[j][e as usize]);
            }
            for (l, v) in prod.terms {
                out.add_term(l, v);
            }
        }
        out
    }

    pub fn max_residual(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (l, c) in &self.terms {
            worst = worst.max((c.clone() - other.coeff(l)).magnitude());
        }
        for (l, c) in &other.terms {
            if !self.terms.contains_key(l) {
                worst = worst.max(c.magnitude());
            }
        }
        worst
    }

    /// Monomials where the two polynomials differ beyond `eps`.
    pub fn mismatches(&self, other: &Self, eps: f64) -> Vec<MultiIndex> {
        let mut keys: Vec<&MultiIndex> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|l| !(self.coeff(l) - other.coeff(l)).is_negligible(eps))
            .cloned()
            .collect()
    }

    fn same_space(&self, other: &Self) -> Result<(), LieError> {
        if self.nvars != other.nvars || self.n != other.n {
            return Err(LieError::DegreeMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// `beta . f = sum_{i,j} beta_{i,j} x_i d/dx_j f`.
pub fn act<S: Scalar>(beta: &Mat<S>, f: &HomogPoly<S>) -> HomogPoly<S> {
    let n = f.nvars();
    assert_eq!(beta.rows(), n, "matrix size must match variable count");
    let mut out = HomogPoly::zero(n, f.degree());
    for (lambda, c) in f.terms() {
        for j in 0..n {
            let lj = lambda.parts()[j];
            if lj == 0 {
                continue;
            }
            let base = c.clone() * S::from_i64(lj as i64);
            for i in 0..n {
                let b = &beta[(i, j)];
                if b.is_zero() {
                    continue;
                }
                let moved = lambda.moved(i, j).expect("part j is positive");
                out.add_term(moved, base.clone() * b);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Exact;

    fn q(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec())
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let a = HomogPoly::linear(&[q(1), q(2)]);
        let b = HomogPoly::linear(&[q(-1), q(3)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&mi(&[0, 1])), q(5));
        // (x0 + x1)^2
        let sq = HomogPoly::linear(&[q(1), q(1)]).pow(2);
        assert_eq!(sq.coeff(&mi(&[1, 1])), q(2));
        assert_eq!(sq.len(), 3);
        assert!(a.sub(&a).unwrap().is_zero());
        assert!(a.add(&sq).is_err());
    }

    #[test]
    fn action_of_matrix_units() {
        // e_{0,1} . x0 x1^2 = x0 * 2 x0 x1 = 2 x0^2 x1
        let e = Mat::<Exact>::unit(2, 0, 1);
        let f = HomogPoly::monomial(mi(&[1, 2]));
        let g = act(&e, &f);
        assert_eq!(g, HomogPoly::term(mi(&[2, 1]), q(2)));
        // diagonal units count degree in one variable
        let h = act(&Mat::unit(2, 1, 1), &f);
        assert_eq!(h, f.scale(&q(2)));
        // identity is the Euler operator
        assert_eq!(act(&Mat::identity(2), &f), f.scale(&q(3)));
    }

    #[test]
    fn substitution_matches_expansion() {
        // x0 x1 with x0 -> y0 + y1, x1 -> y0 - y1 gives y0^2 - y1^2
        let f = HomogPoly::monomial(mi(&[1, 1]));
        let forms = [HomogPoly::linear(&[q(1), q(1)]), HomogPoly::linear(&[q(1), q(-1)])];
        let g = f.substitute(&forms);
        let mut expect = HomogPoly::zero(2, 2);
        expect.add_term(mi(&[2, 0]), q(1));
        expect.add_term(mi(&[0, 2]), q(-1));
        assert_eq!(g, expect);
    }
}
