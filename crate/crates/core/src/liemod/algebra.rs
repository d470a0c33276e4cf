//! Matrix realizations in `sl_{d+1}`: the standard Cartan basis, its
//! conjugate under `R = P~ U^t`, and the antiautomorphism
//! `a(beta) = P~ beta^t P~^{-1}`.
//!
//! `R` is used unnormalized. Conjugation does not see a scalar factor on
//! `R`, and `nu P U` is then its exact inverse, so everything stays rational.

use crate::kappa::ParameterSet;
use crate::matrix::Mat;
use crate::numeric::Scalar;
use crate::report::CheckReport;

use super::LieError;

fn check_index(d: usize, i: usize) -> Result<(), LieError> {
    if i > d {
        Err(LieError::IndexOutOfRange { index: i, d })
    } else {
        Ok(())
    }
}

/// `phi_i = e_{i,i} - I/(d+1)`. Index 0 gives `phi_0 = -sum_j phi_j`.
pub fn basis_phi<S: Scalar>(d: usize, i: usize) -> Result<Mat<S>, LieError> {
    check_index(d, i)?;
    let n = d + 1;
    let shift = S::from_ratio(1, n as i64);
    let mut m = Mat::unit(n, i, i);
    for k in 0..n {
        m[(k, k)] -= shift.clone();
    }
    Ok(m)
}

/// Matrix unit `e_{i,j}`, `i != j`.
pub fn basis_e<S: Scalar>(d: usize, i: usize, j: usize) -> Result<Mat<S>, LieError> {
    check_index(d, i)?;
    check_index(d, j)?;
    if i == j {
        return Err(LieError::DiagonalUnit(i));
    }
    Ok(Mat::unit(d + 1, i, j))
}

/// Off-diagonal pairs `(k, l)`, `0 <= k != l <= d`, row-major.
pub fn off_diagonal_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=d).flat_map(move |k| (0..=d).filter(move |&l| l != k).map(move |l| (k, l)))
}

/// The basis `{phi_1..phi_d} U {e_{k,l} : k != l}` of `sl_{d+1}`.
pub fn standard_basis<S: Scalar>(d: usize) -> Vec<Mat<S>> {
    let mut out: Vec<Mat<S>> = (1..=d).map(|i| basis_phi(d, i).expect("in range")).collect();
    out.extend(off_diagonal_pairs(d).map(|(k, l)| Mat::unit(d + 1, k, l)));
    out
}

/// `R = P~ U^t` together with `R^{-1} = nu P U`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conjugator<S> {
    r: Mat<S>,
    r_inv: Mat<S>,
}

impl<S: Scalar> Conjugator<S> {
    pub fn new(kappa: &ParameterSet<S>) -> Self {
        let r = &Mat::diag(kappa.pt()) * &kappa.u().transpose();
        let r_inv = (&Mat::diag(kappa.p()) * kappa.u()).scale(kappa.nu());
        Self { r, r_inv }
    }

    pub fn r(&self) -> &Mat<S> {
        &self.r
    }

    pub fn r_inv(&self) -> &Mat<S> {
        &self.r_inv
    }

    /// `Ad_R(beta) = R beta R^{-1}`.
    pub fn conjugate(&self, beta: &Mat<S>) -> Mat<S> {
        &(&self.r * beta) * &self.r_inv
    }
}

pub fn conjugator<S: Scalar>(kappa: &ParameterSet<S>) -> Conjugator<S> {
    Conjugator::new(kappa)
}

/// `phi~_i = R phi_i R^{-1}`; index 0 gives `phi~_0`.
pub fn dual_phi<S: Scalar>(kappa: &ParameterSet<S>, i: usize) -> Result<Mat<S>, LieError> {
    Ok(Conjugator::new(kappa).conjugate(&basis_phi(kappa.d(), i)?))
}

/// `e~_{i,j} = R e_{i,j} R^{-1}`.
pub fn dual_e<S: Scalar>(kappa: &ParameterSet<S>, i: usize, j: usize) -> Result<Mat<S>, LieError> {
    Ok(Conjugator::new(kappa).conjugate(&basis_e(kappa.d(), i, j)?))
}

/// Closed-form expansion of `phi~_i` (`1 <= i <= d`) in the basis
/// `{phi_j, e_{k,l}}`:
/// `nu sum_{k!=l} p_i pt_k u_{i,k} u_{i,l} e_{k,l} + sum_j p_i (nu pt_j u_{i,j}^2 - 1) phi_j`.
pub fn dual_phi_closed_form<S: Scalar>(kappa: &ParameterSet<S>, i: usize) -> Result<Mat<S>, LieError> {
    let d = kappa.d();
    if i == 0 || i > d {
        return Err(LieError::IndexOutOfRange { index: i, d });
    }
    let (p, pt, nu) = (kappa.p(), kappa.pt(), kappa.nu());
    let u = |a, b| kappa.u_at(a, b).clone();
    let mut out = Mat::zeros(d + 1, d + 1);
    for (k, l) in off_diagonal_pairs(d) {
        out[(k, l)] = nu.clone() * &p[i] * &pt[k] * u(i, k) * u(i, l);
    }
    for j in 1..=d {
        let c = p[i].clone() * (nu.clone() * &pt[j] * u(i, j) * u(i, j) - S::one());
        out = &out + &basis_phi::<S>(d, j)?.scale(&c);
    }
    Ok(out)
}

/// Right-hand side of the dual expansion of `phi_i` (`1 <= i <= d`):
/// `nu sum_{k!=l} pt_i p_k u_{k,i} u_{l,i} e~_{k,l} + sum_j pt_i (nu p_j u_{j,i}^2 - 1) phi~_j`,
/// assembled from the conjugated matrices.
pub fn phi_from_dual_basis<S: Scalar>(kappa: &ParameterSet<S>, i: usize) -> Result<Mat<S>, LieError> {
    let d = kappa.d();
    if i == 0 || i > d {
        return Err(LieError::IndexOutOfRange { index: i, d });
    }
    let conj = Conjugator::new(kappa);
    let (p, pt, nu) = (kappa.p(), kappa.pt(), kappa.nu());
    let u = |a, b| kappa.u_at(a, b).clone();
    let mut out = Mat::zeros(d + 1, d + 1);
    for (k, l) in off_diagonal_pairs(d) {
        let c = nu.clone() * &pt[i] * &p[k] * u(k, i) * u(l, i);
        out = &out + &conj.conjugate(&Mat::unit(d + 1, k, l)).scale(&c);
    }
    for j in 1..=d {
        let c = pt[i].clone() * (nu.clone() * &p[j] * u(j, i) * u(j, i) - S::one());
        out = &out + &conj.conjugate(&basis_phi(d, j)?).scale(&c);
    }
    Ok(out)
}

/// `a(beta) = P~ beta^t P~^{-1}`, entrywise `pt_a beta_{b,a} / pt_b`.
pub fn antiauto<S: Scalar>(kappa: &ParameterSet<S>, beta: &Mat<S>) -> Mat<S> {
    let pt = kappa.pt();
    let n = beta.rows();
    let mut out = Mat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(a, b)] = pt[a].clone() * &beta[(b, a)] / pt[b].clone();
        }
    }
    out
}

fn compare_mats<S: Scalar>(
    report: &mut CheckReport,
    label: impl Fn() -> String,
    lhs: &Mat<S>,
    rhs: &Mat<S>,
    eps: f64,
) {
    report.checked += 1;
    report.max_residual = report.max_residual.max(lhs.max_residual(rhs));
    let bad = lhs.mismatches(rhs, eps);
    if let Some(&(i, j)) = bad.first() {
        report.fail(
            label(),
            format!(
                "{} entries differ, first at ({i},{j}): {} vs {}",
                bad.len(),
                lhs[(i, j)].to_canonical(),
                rhs[(i, j)].to_canonical()
            ),
        );
    }
}

/// Closed forms of both Cartan expansions against explicit conjugation,
/// plus trace zero of every conjugated element.
pub fn check_conjugation<S: Scalar>(kappa: &ParameterSet<S>, eps: f64) -> CheckReport {
    let d = kappa.d();
    let mut report = CheckReport::new("conjugation", 0);
    let conj = Conjugator::new(kappa);
    compare_mats(
        &mut report,
        || "R R^-1 = I".into(),
        &(conj.r() * conj.r_inv()),
        &Mat::identity(d + 1),
        eps,
    );
    for i in 1..=d {
        let by_conj = dual_phi(kappa, i).expect("in range");
        let closed = dual_phi_closed_form(kappa, i).expect("in range");
        compare_mats(&mut report, || format!("phi~_{i} closed form"), &by_conj, &closed, eps);
        report.compare(|| format!("trace phi~_{i}"), &by_conj.trace(), &S::zero(), eps);

        let phi = basis_phi::<S>(d, i).expect("in range");
        let rebuilt = phi_from_dual_basis(kappa, i).expect("in range");
        compare_mats(&mut report, || format!("phi_{i} in dual basis"), &rebuilt, &phi, eps);
    }
    for (k, l) in off_diagonal_pairs(d) {
        let e = dual_e(kappa, k, l).expect("in range");
        report.compare(|| format!("trace e~_{k}{l}"), &e.trace(), &S::zero(), eps);
    }
    report
}

/// Fixed points and transposition rules of the antiautomorphism, its
/// involutivity and product reversal over the full basis and its conjugate.
pub fn check_antiauto<S: Scalar>(kappa: &ParameterSet<S>, eps: f64) -> CheckReport {
    let d = kappa.d();
    let (p, pt) = (kappa.p(), kappa.pt());
    let conj = Conjugator::new(kappa);
    let mut report = CheckReport::new("lemma21", 0);

    for i in 1..=d {
        let phi = basis_phi::<S>(d, i).expect("in range");
        compare_mats(&mut report, || format!("a(phi_{i}) = phi_{i}"), &antiauto(kappa, &phi), &phi, eps);
        let dphi = conj.conjugate(&phi);
        compare_mats(&mut report, || format!("a(phi~_{i}) = phi~_{i}"), &antiauto(kappa, &dphi), &dphi, eps);
    }
    for (i, j) in off_diagonal_pairs(d) {
        let e = Mat::unit(d + 1, i, j);
        let expect = Mat::unit(d + 1, j, i).scale(&(pt[j].clone() / pt[i].clone()));
        compare_mats(&mut report, || format!("a(e_{i}{j})"), &antiauto(kappa, &e), &expect, eps);

        let de = conj.conjugate(&e);
        let expect = conj.conjugate(&Mat::unit(d + 1, j, i)).scale(&(p[j].clone() / p[i].clone()));
        compare_mats(&mut report, || format!("a(e~_{i}{j})"), &antiauto(kappa, &de), &expect, eps);
    }

    let mut basis = standard_basis::<S>(d);
    let dual: Vec<Mat<S>> = basis.iter().map(|b| conj.conjugate(b)).collect();
    basis.extend(dual);
    for (a, x) in basis.iter().enumerate() {
        let twice = antiauto(kappa, &antiauto(kappa, x));
        compare_mats(&mut report, || format!("a(a(b_{a})) = b_{a}"), &twice, x, eps);
    }
    let std_len = d + d * (d + 1);
    for (a, x) in basis[..std_len].iter().enumerate() {
        for (b, y) in basis[..std_len].iter().enumerate() {
            let lhs = antiauto(kappa, &(x * y));
            let rhs = &antiauto(kappa, y) * &antiauto(kappa, x);
            compare_mats(&mut report, || format!("a(b_{a} b_{b}) = a(b_{b}) a(b_{a})"), &lhs, &rhs, eps);
        }
    }
    report
}

/// Generation of `sl_{d+1}` by the two Cartan subalgebras: `phi~_0` is the
/// column-constant matrix `(pt_k)` minus `I/(d+1)`, and for `0 <= i != j <= d`
/// `2 pt_i e_{i,j} = [phi_j,[phi_i,[phi_j,phi~_0]]] - [phi_i,[phi_j,phi~_0]]`.
pub fn check_generation<S: Scalar>(kappa: &ParameterSet<S>, eps: f64) -> CheckReport {
    let d = kappa.d();
    let n = d + 1;
    let pt = kappa.pt();
    let mut report = CheckReport::new("lemma22", 0);
    let conj = Conjugator::new(kappa);

    // phi~_0 = -sum_j phi~_j, taken from the conjugated basis
    let mut dphi0 = Mat::zeros(n, n);
    for j in 1..=d {
        dphi0 = &dphi0 - &conj.conjugate(&basis_phi(d, j).expect("in range"));
    }
    let mut expected = Mat::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            expected[(k, l)] = pt[k].clone();
        }
    }
    let expected = &expected - &Mat::identity(n).scale(&S::from_ratio(1, n as i64));
    compare_mats(&mut report, || "phi~_0 column form".into(), &dphi0, &expected, eps);

    for (i, j) in off_diagonal_pairs(d) {
        let phi_i = basis_phi::<S>(d, i).expect("in range");
        let phi_j = basis_phi::<S>(d, j).expect("in range");
        let inner = phi_j.commutator(&dphi0);
        let a = phi_j.commutator(&phi_i.commutator(&inner));
        let b = phi_i.commutator(&inner);
        let lhs = (&a - &b).scale(&(S::from_i64(2) * &pt[i]).recip());
        compare_mats(&mut report, || format!("e_{i}{j} from brackets"), &lhs, &Mat::unit(n, i, j), eps);
    }
    report
}
