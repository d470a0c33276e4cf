//! The dual weight basis `x~^lambda`, the bilinear form and everything
//! checked through them.

use rayon::prelude::*;

use crate::hyperg::{self, DegreePoint, PolynomialTable};
use crate::kappa::ParameterSet;
use crate::matrix::Mat;
use crate::numeric::{factorial, MultiIndex, Scalar, SimplexLattice};
use crate::report::CheckReport;

use super::algebra::{antiauto, basis_phi, off_diagonal_pairs, standard_basis, Conjugator};
use super::poly::{act, HomogPoly};
use super::LieError;

fn check_parts<S: Scalar>(kappa: &ParameterSet<S>, lambda: &MultiIndex) -> Result<(), LieError> {
    if lambda.len() != kappa.d() + 1 {
        return Err(LieError::DimensionMismatch { expected: kappa.d() + 1, found: lambda.len() });
    }
    Ok(())
}

/// The linear forms `x~_k = sum_j x_j R_{j,k}`.
pub fn xtilde_forms<S: Scalar>(kappa: &ParameterSet<S>) -> Vec<HomogPoly<S>> {
    let r = Conjugator::new(kappa).r().clone();
    (0..=kappa.d())
        .map(|k| {
            let col: Vec<S> = (0..=kappa.d()).map(|j| r[(j, k)].clone()).collect();
            HomogPoly::linear(&col)
        })
        .collect()
}

/// `x~^lambda` expanded in the monomial basis.
pub fn xtilde_monomial<S: Scalar>(kappa: &ParameterSet<S>, lambda: &MultiIndex) -> Result<HomogPoly<S>, LieError> {
    check_parts(kappa, lambda)?;
    Ok(HomogPoly::monomial(lambda.clone()).substitute(&xtilde_forms(kappa)))
}

/// Coordinates of `f` in the basis `x~^mu`, returned as a polynomial whose
/// coefficient at `mu` is the coordinate of `x~^mu`.
pub fn to_dual_coords<S: Scalar>(kappa: &ParameterSet<S>, f: &HomogPoly<S>) -> HomogPoly<S> {
    let r_inv = Conjugator::new(kappa).r_inv().clone();
    // x = x~ R^{-1}
    let forms: Vec<HomogPoly<S>> = (0..=kappa.d())
        .map(|j| {
            let col: Vec<S> = (0..=kappa.d()).map(|k| r_inv[(k, j)].clone()).collect();
            HomogPoly::linear(&col)
        })
        .collect();
    f.substitute(&forms)
}

/// `<x^n, x^m> = delta_{n,m} n! / pt^n * nu^N`, extended bilinearly.
pub fn bilinear<S: Scalar>(kappa: &ParameterSet<S>, f: &HomogPoly<S>, g: &HomogPoly<S>) -> Result<S, LieError> {
    if f.degree() != g.degree() {
        return Err(LieError::DegreeMismatch(f.degree(), g.degree()));
    }
    for h in [f, g] {
        if h.nvars() != kappa.d() + 1 {
            return Err(LieError::DimensionMismatch { expected: kappa.d() + 1, found: h.nvars() });
        }
    }
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    let mut total = S::zero();
    for (lambda, c) in small.terms() {
        let other = large.coeff(lambda);
        if other.is_zero() {
            continue;
        }
        total += c.clone() * &other * monomial_norm(kappa.pt(), lambda);
    }
    Ok(total * kappa.nu().powi(f.degree()))
}

/// `lambda! / w^lambda`.
fn monomial_norm<S: Scalar>(w: &[S], lambda: &MultiIndex) -> S {
    let fact = lambda
        .parts()
        .iter()
        .fold(S::one(), |acc, &k| acc * S::from_bigint(&factorial(k)));
    fact / lambda.power_of(w)
}

/// `P(n', nt') = <x^n, x~^nt> / (nu^N N!)`.
pub fn pairing_eval<S: Scalar>(kappa: &ParameterSet<S>, n: &MultiIndex, nt: &MultiIndex) -> Result<S, LieError> {
    check_parts(kappa, n)?;
    if n.degree() != nt.degree() {
        return Err(LieError::DegreeMismatch(n.degree(), nt.degree()));
    }
    let xt = xtilde_monomial(kappa, nt)?;
    let val = bilinear(kappa, &HomogPoly::monomial(n.clone()), &xt)?;
    Ok(val / (kappa.nu().powi(n.degree()) * S::from_bigint(&factorial(n.degree()))))
}

fn xtilde_all<S: Scalar>(kappa: &ParameterSet<S>, lattice: &SimplexLattice) -> Vec<HomogPoly<S>> {
    let forms = xtilde_forms(kappa);
    lattice
        .points()
        .par_iter()
        .map(|l| HomogPoly::monomial(l.clone()).substitute(&forms))
        .collect()
}

/// Full table of [`pairing_eval`] values, rows `n`, columns `nt`.
pub fn pairing_table<S: Scalar>(kappa: &ParameterSet<S>, n: u32) -> PolynomialTable<S> {
    let lattice = SimplexLattice::new(kappa.d(), n);
    let xts = xtilde_all(kappa, &lattice);
    let scale = (kappa.nu().powi(n) * S::from_bigint(&factorial(n))).recip();
    let values: Vec<Vec<S>> = lattice
        .points()
        .par_iter()
        .map(|row| {
            let x = HomogPoly::monomial(row.clone());
            xts.iter()
                .map(|xt| bilinear(kappa, &x, xt).expect("same degree") * &scale)
                .collect()
        })
        .collect();
    PolynomialTable::from_values(kappa.clone(), n, values).expect("square table")
}

fn compare_polys<S: Scalar>(
    report: &mut CheckReport,
    label: impl Fn() -> String,
    lhs: &HomogPoly<S>,
    rhs: &HomogPoly<S>,
    eps: f64,
) {
    report.checked += 1;
    report.max_residual = report.max_residual.max(lhs.max_residual(rhs));
    let bad = lhs.mismatches(rhs, eps);
    if let Some(mu) = bad.first() {
        report.fail(
            label(),
            format!(
                "{} coefficients differ, first at {mu}: {} vs {}",
                bad.len(),
                lhs.coeff(mu).to_canonical(),
                rhs.coeff(mu).to_canonical()
            ),
        );
    }
}

fn centered<S: Scalar>(part: u32, n: u32, d: usize) -> S {
    S::from_i64(part as i64) - S::from_ratio(n as i64, d as i64 + 1)
}

/// Weight equations for both bases: `phi_i` on `x^lambda` and `phi~_i` on
/// `x~^lambda` each scale by `lambda_i - N/(d+1)`.
pub fn check_weights<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("weights", n);
    let lattice = SimplexLattice::new(d, n);
    let conj = Conjugator::new(kappa);
    let xts = xtilde_all(kappa, &lattice);
    for i in 1..=d {
        let phi = basis_phi::<S>(d, i).expect("in range");
        let dphi = conj.conjugate(&phi);
        for (lambda, xt) in lattice.points().iter().zip(&xts) {
            let w: S = centered(lambda.parts()[i], n, d);
            let x = HomogPoly::monomial(lambda.clone());
            compare_polys(&mut report, || format!("phi_{i} x^{lambda}"), &act(&phi, &x), &x.scale(&w), eps);
            compare_polys(&mut report, || format!("phi~_{i} x~^{lambda}"), &act(&dphi, xt), &xt.scale(&w), eps);
        }
    }
    report
}

/// `act([b, c], f) = act(b, act(c, f)) - act(c, act(b, f))` for `b, c` over
/// the standard basis and its conjugate, and `f` over all monomials.
pub fn check_representation<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("representation", n);
    let conj = Conjugator::new(kappa);
    let mut basis = standard_basis::<S>(d);
    let dual: Vec<Mat<S>> = basis.iter().map(|b| conj.conjugate(b)).collect();
    basis.extend(dual);
    let lattice = SimplexLattice::new(d, n);
    for (a, b) in basis.iter().enumerate() {
        for (c, g) in basis.iter().enumerate().skip(a + 1) {
            let br = b.commutator(g);
            for lambda in lattice.points() {
                let f = HomogPoly::monomial(lambda.clone());
                let lhs = act(&br, &f);
                let rhs = act(b, &act(g, &f)).sub(&act(g, &act(b, &f))).expect("same degree");
                compare_polys(&mut report, || format!("[b_{a}, b_{c}] on x^{lambda}"), &lhs, &rhs, eps);
            }
        }
    }
    report
}

/// `<beta.xi, eta> = <xi, a(beta).eta>` for `beta` over `{phi_j, e_{k,l}}`
/// and `xi, eta` over all monomials.
pub fn check_adjointness<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("adjointness", n);
    let lattice = SimplexLattice::new(d, n);
    let monos: Vec<HomogPoly<S>> = lattice.points().iter().map(|l| HomogPoly::monomial(l.clone())).collect();
    for (b, beta) in standard_basis::<S>(d).iter().enumerate() {
        let ab = antiauto(kappa, beta);
        let left: Vec<HomogPoly<S>> = monos.iter().map(|x| act(beta, x)).collect();
        let right: Vec<HomogPoly<S>> = monos.iter().map(|x| act(&ab, x)).collect();
        for (s, xi) in monos.iter().enumerate() {
            for (t, eta) in monos.iter().enumerate() {
                let lhs = bilinear(kappa, &left[s], eta).expect("same degree");
                let rhs = bilinear(kappa, xi, &right[t]).expect("same degree");
                report.compare(
                    || format!("b_{b} x^{} x^{}", lattice.points()[s], lattice.points()[t]),
                    &lhs,
                    &rhs,
                    eps,
                );
            }
        }
    }
    report
}

/// `<x~^n, x~^m> = delta_{n,m} n! / p^n` over all pairs.
pub fn check_dual_norms<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let lattice = SimplexLattice::new(kappa.d(), n);
    let xts = xtilde_all(kappa, &lattice);
    let pts = lattice.points();
    let rows: Vec<CheckReport> = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut r = CheckReport::new("norms", n);
            for b in 0..pts.len() {
                let got = bilinear(kappa, &xts[a], &xts[b]).expect("same degree");
                let want = if a == b { monomial_norm(kappa.p(), &pts[a]) } else { S::zero() };
                r.compare(|| format!("x~^{} x~^{}", pts[a], pts[b]), &got, &want, eps);
            }
            r
        })
        .collect();
    let mut report = CheckReport::new("norms", n);
    for r in rows {
        report.checked += r.checked;
        report.max_residual = report.max_residual.max(r.max_residual);
        report.pass &= r.pass;
        report.failures.extend(r.failures);
    }
    report
}

/// Both transition expansions as polynomial identities, with `P` taken from
/// the kernel sum:
/// `x~^nt = N! sum_n P(n', nt') pt^n / n! x^n` and
/// `x^n = nu^N N! sum_nt P(n', nt') p^nt / nt! x~^nt`.
pub fn check_transition<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let table = hyperg::table(kappa, n);
    check_transition_table(&table, eps)
}

pub fn check_transition_table<S: Scalar>(table: &PolynomialTable<S>, eps: f64) -> CheckReport {
    let kappa = table.kappa();
    let n = table.degree();
    let d = kappa.d();
    let lattice = table.lattice();
    let pts = lattice.points();
    let mut report = CheckReport::new("transition", n);
    let xts = xtilde_all(kappa, lattice);
    let nfact = S::from_bigint(&factorial(n));

    for (c, nt) in pts.iter().enumerate() {
        let mut rhs = HomogPoly::zero(d + 1, n);
        for (r, m) in pts.iter().enumerate() {
            let coeff = nfact.clone() * table.get(r, c) / monomial_norm(kappa.pt(), m);
            rhs.add_term(m.clone(), coeff);
        }
        compare_polys(&mut report, || format!("x~^{nt} in x basis"), &xts[c], &rhs, eps);
    }

    let scale = kappa.nu().powi(n) * &nfact;
    for (r, m) in pts.iter().enumerate() {
        let mut rhs = HomogPoly::zero(d + 1, n);
        for (c, nt) in pts.iter().enumerate() {
            let coeff = scale.clone() * table.get(r, c) / monomial_norm(kappa.p(), nt);
            rhs = rhs.add(&xts[c].scale(&coeff)).expect("same degree");
        }
        compare_polys(&mut report, || format!("x^{m} in x~ basis"), &HomogPoly::monomial(m.clone()), &rhs, eps);
    }
    report
}

/// Expansion of `phi_i . x~^lambda` in the `x~` basis and of
/// `phi~_i . x^lambda` in the `x` basis: support within `lambda` and its
/// adjacent points, with the closed-form coefficients.
pub fn check_adjacency<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let d = kappa.d();
    let (p, pt, nu) = (kappa.p(), kappa.pt(), kappa.nu());
    let u = |a: usize, b: usize| kappa.u_at(a, b).clone();
    let mut report = CheckReport::new("adjacency", n);
    let lattice = SimplexLattice::new(d, n);
    let conj = Conjugator::new(kappa);
    let xts = xtilde_all(kappa, &lattice);
    let mut widest = 0;

    for i in 1..=d {
        let phi = basis_phi::<S>(d, i).expect("in range");
        let dphi = conj.conjugate(&phi);
        for (lambda, xt) in lattice.points().iter().zip(&xts) {
            let lp = lambda.parts();
            // H acting on the x~ basis
            let got = to_dual_coords(kappa, &act(&phi, xt));
            let mut want = HomogPoly::zero(d + 1, n);
            let diag = (1..=d).fold(S::zero(), |acc, j| {
                acc + pt[i].clone() * (nu.clone() * &p[j] * u(j, i) * u(j, i) - S::one()) * centered::<S>(lp[j], n, d)
            });
            want.add_term(lambda.clone(), diag);
            for (k, l) in off_diagonal_pairs(d) {
                if let Some(mu) = lambda.moved(k, l) {
                    let c = nu.clone() * &pt[i] * &p[k] * u(k, i) * u(l, i) * S::from_i64(lp[l] as i64);
                    want.add_term(mu, c);
                }
            }
            support_check(&mut report, || format!("phi_{i} x~^{lambda}"), lambda, &got);
            compare_polys(&mut report, || format!("phi_{i} x~^{lambda} coefficients"), &got, &want, eps);
            widest = widest.max(got.len());

            // H~ acting on the x basis
            let got = act(&dphi, &HomogPoly::monomial(lambda.clone()));
            let mut want = HomogPoly::zero(d + 1, n);
            let diag = (1..=d).fold(S::zero(), |acc, j| {
                acc + p[i].clone() * (nu.clone() * &pt[j] * u(i, j) * u(i, j) - S::one()) * centered::<S>(lp[j], n, d)
            });
            want.add_term(lambda.clone(), diag);
            for (k, l) in off_diagonal_pairs(d) {
                if let Some(mu) = lambda.moved(k, l) {
                    let c = nu.clone() * &p[i] * &pt[k] * u(i, k) * u(i, l) * S::from_i64(lp[l] as i64);
                    want.add_term(mu, c);
                }
            }
            support_check(&mut report, || format!("phi~_{i} x^{lambda}"), lambda, &got);
            compare_polys(&mut report, || format!("phi~_{i} x^{lambda} coefficients"), &got, &want, eps);
            widest = widest.max(got.len());
        }
    }
    let bound = 1 + d * (d + 1);
    report.require(widest <= bound, || "support size".into(), || format!("{widest} > {bound}"));
    report.note(format!("largest support {widest} of at most {bound}"));
    report
}

fn support_check<S: Scalar>(
    report: &mut CheckReport,
    label: impl Fn() -> String,
    lambda: &MultiIndex,
    f: &HomogPoly<S>,
) {
    let stray: Vec<String> = f
        .support()
        .filter(|mu| *mu != lambda && !mu.is_adjacent(lambda))
        .map(|mu| mu.to_string())
        .collect();
    report.require(stray.is_empty(), label, || format!("non-adjacent support {}", stray.join(" ")));
}

/// Kernel sum, generating function and pairing agree on every cell.
pub fn check_threeway<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let mut report = CheckReport::new("threeway", n);
    let hyp = hyperg::table(kappa, n);
    let pair = pairing_table(kappa, n);
    let pts = hyp.lattice().points();
    for (r, m) in pts.iter().enumerate() {
        let dm = DegreePoint::from_index(m);
        for (c, mt) in pts.iter().enumerate() {
            let dmt = DegreePoint::from_index(mt);
            let gen = hyperg::eval_generating(kappa, &dm, &dmt).expect("valid points");
            let h = hyp.get(r, c);
            report.compare(|| format!("generating {m} {mt}"), &gen, h, eps);
            report.compare(|| format!("pairing {m} {mt}"), pair.get(r, c), h, eps);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::{family_ds, family_hoare_rahman, family_milch, griffiths_from_p};
    use crate::numeric::{Approx, Exact};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec())
    }

    fn half() -> ParameterSet<Exact> {
        griffiths_from_p(&[q(1, 2), q(1, 2)]).unwrap()
    }

    fn milch() -> ParameterSet<Exact> {
        family_milch(&[q(1, 2), q(1, 4), q(1, 4)]).unwrap()
    }

    fn ds() -> ParameterSet<Exact> {
        family_ds(q(2, 1), 2).unwrap()
    }

    #[test]
    fn xtilde_examples() {
        let k = half();
        let got = xtilde_monomial(&k, &mi(&[1, 1])).unwrap();
        let mut want = HomogPoly::zero(2, 2);
        want.add_term(mi(&[2, 0]), q(1, 4));
        want.add_term(mi(&[0, 2]), q(-1, 4));
        assert_eq!(got, want);

        // x~_0^N is the multinomial expansion of (sum pt_j x_j)^N
        let k = milch();
        let got = xtilde_monomial(&k, &mi(&[3, 0, 0])).unwrap();
        let want = HomogPoly::linear(k.pt()).pow(3);
        assert_eq!(got, want);
        assert!(xtilde_monomial(&k, &mi(&[1, 1])).is_err());
    }

    #[test]
    fn dual_coords_invert_xtilde() {
        let k = milch();
        for lambda in SimplexLattice::new(2, 2).points() {
            let xt = xtilde_monomial(&k, lambda).unwrap();
            assert_eq!(to_dual_coords(&k, &xt), HomogPoly::monomial(lambda.clone()));
        }
    }

    #[test]
    fn bilinear_examples() {
        let k = half();
        let x = HomogPoly::monomial(mi(&[1, 1]));
        assert_eq!(bilinear(&k, &x, &x).unwrap(), q(16, 1));
        let y = HomogPoly::monomial(mi(&[2, 0]));
        assert_eq!(bilinear(&k, &x, &y).unwrap(), q(0, 1));
        let xt = xtilde_monomial(&k, &mi(&[2, 0])).unwrap();
        assert_eq!(bilinear(&k, &xt, &xt).unwrap(), q(8, 1));
        let lin = HomogPoly::linear(&[q(1, 1), q(1, 1)]);
        assert_eq!(bilinear(&k, &x, &lin), Err(LieError::DegreeMismatch(2, 1)));
    }

    #[test]
    fn pairing_examples() {
        let k = half();
        assert_eq!(pairing_eval(&k, &mi(&[1, 1]), &mi(&[1, 1])).unwrap(), q(0, 1));
        let k = milch();
        for n in SimplexLattice::new(2, 3).points() {
            assert_eq!(pairing_eval(&k, n, &mi(&[3, 0, 0])).unwrap(), q(1, 1));
        }
        let pt = pairing_table(&k, 2);
        assert_eq!(&pt, &hyperg::table(&k, 2));
    }

    #[test]
    fn module_checks_pass() {
        let hr = family_hoare_rahman([q(1, 1), q(2, 1), q(3, 1), q(4, 1)]).unwrap();
        for k in [half(), milch(), ds(), hr] {
            for n in 0..=3 {
                for r in [
                    check_weights(&k, n, 0.0),
                    check_adjointness(&k, n, 0.0),
                    check_dual_norms(&k, n, 0.0),
                    check_transition(&k, n, 0.0),
                    check_adjacency(&k, n, 0.0),
                    check_threeway(&k, n, 0.0),
                ] {
                    assert!(r.pass, "{} N={n}: {:?}", r.check, r.failures);
                    assert!(r.checked > 0);
                }
            }
        }
        let r = check_representation(&milch(), 2, 0.0);
        assert!(r.pass && r.checked >= 50);
    }

    #[test]
    fn adjacency_support_bound_ds() {
        let r = check_adjacency(&ds(), 2, 0.0);
        assert!(r.pass);
        assert!(r.notes[0].ends_with("of at most 7"));
    }

    #[test]
    fn d1_adjacency_is_chain() {
        let r = check_adjacency(&half(), 4, 0.0);
        assert!(r.pass);
        assert!(r.notes[0].contains("of at most 3"));
    }

    #[test]
    fn approx_mode_agrees() {
        let k = milch().to_approx();
        for r in [check_dual_norms(&k, 3, 1e-10), check_transition(&k, 3, 1e-10), check_threeway(&k, 3, 1e-10)] {
            assert!(r.pass, "{}: {:?}", r.check, r.failures);
        }
        let _: Approx = pairing_eval(&k, &mi(&[1, 1, 1]), &mi(&[1, 2, 0])).unwrap();
    }

    #[test]
    fn detectors_fire_on_corrupt_table() {
        let k = milch();
        let mut t = hyperg::table(&k, 2);
        let v = t.get(1, 2).clone() + q(1, 7);
        t.set(1, 2, v);
        assert!(!check_transition_table(&t, 0.0).pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn commutators_act_as_commutators(
            a in proptest::collection::vec(-3i64..=3, 9),
            b in proptest::collection::vec(-3i64..=3, 9),
            f in proptest::collection::vec(-3i64..=3, 10),
        ) {
            let to_mat = |v: &[i64]| Mat::from_rows(v.chunks(3).map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect());
            let (ma, mb) = (to_mat(&a), to_mat(&b));
            let mut poly = HomogPoly::zero(3, 3);
            for (lambda, &c) in SimplexLattice::new(2, 3).points().iter().zip(&f) {
                poly.add_term(lambda.clone(), q(c, 1));
            }
            let lhs = act(&ma.commutator(&mb), &poly);
            let rhs = act(&ma, &act(&mb, &poly)).sub(&act(&mb, &act(&ma, &poly))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn adjointness_on_random_vectors(
            beta in proptest::collection::vec(-3i64..=3, 9),
            xi in proptest::collection::vec(-3i64..=3, 6),
            eta in proptest::collection::vec(-3i64..=3, 6),
        ) {
            let k = milch();
            let mut m = Mat::from_rows(beta.chunks(3).map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect());
            let tr = m.trace() / q(3, 1);
            for i in 0..3 {
                m[(i, i)] -= tr.clone();
            }
            let pts = SimplexLattice::new(2, 2);
            let build = |c: &[i64]| {
                let mut p = HomogPoly::zero(3, 2);
                for (l, &v) in pts.points().iter().zip(c) {
                    p.add_term(l.clone(), q(v, 1));
                }
                p
            };
            let (x, y) = (build(&xi), build(&eta));
            let lhs = bilinear(&k, &act(&m, &x), &y).unwrap();
            let rhs = bilinear(&k, &x, &act(&antiauto(&k, &m), &y)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
