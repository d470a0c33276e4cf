//! Named verification suites over a polynomial table.

use crate::bispec::{check_commute, check_eigen_table, check_stencils, check_universal_table};
use crate::hyperg::{check_duality, check_orthogonality_table, PolynomialTable};
use crate::kappa::ParameterSet;
use crate::liemod;
use crate::numeric::Scalar;
use crate::report::CheckReport;

pub const SUITES: [&str; 12] = [
    "def11",
    "orthogonality",
    "duality",
    "recurrence",
    "universal",
    "commute",
    "lemma21",
    "lemma22",
    "norms",
    "adjacency",
    "transition",
    "threeway",
];

/// Every defining condition of the parameter set, one failure per violation.
pub fn check_definition<S: Scalar>(kappa: &ParameterSet<S>, n: u32, eps: f64) -> CheckReport {
    let mut r = CheckReport::new("def11", n);
    r.checked = 1;
    for v in kappa.to_raw().violations(eps) {
        r.fail(format!("condition {}", v.condition()), v.to_string());
    }
    r
}

fn combine(name: &str, n: u32, parts: Vec<CheckReport>) -> CheckReport {
    let mut r = CheckReport::new(name, n);
    for p in parts {
        r.absorb(p);
    }
    r
}

/// Runs one named suite. Suites that only need the parameter set ignore the
/// table values; the others read `P` from the table without recomputing it.
pub fn run<S: Scalar>(name: &str, table: &PolynomialTable<S>, eps: f64) -> Result<CheckReport, String> {
    let kappa = table.kappa();
    let n = table.degree();
    let report = match name {
        "def11" => check_definition(kappa, n, eps),
        "orthogonality" => check_orthogonality_table(table, eps),
        "duality" => check_duality(kappa, n, eps),
        "recurrence" => combine("recurrence", n, vec![check_eigen_table(table, eps), check_stencils(kappa, n, eps)]),
        "universal" => check_universal_table(table, eps),
        "commute" => check_commute(kappa, n, eps),
        "lemma21" => combine(
            "lemma21",
            n,
            vec![liemod::check_antiauto(kappa, eps), liemod::check_conjugation(kappa, eps)],
        ),
        "lemma22" => liemod::check_generation(kappa, eps),
        "norms" => combine(
            "norms",
            n,
            vec![liemod::check_dual_norms(kappa, n, eps), liemod::check_adjointness(kappa, n, eps)],
        ),
        "adjacency" => combine(
            "adjacency",
            n,
            vec![liemod::check_weights(kappa, n, eps), liemod::check_adjacency(kappa, n, eps)],
        ),
        "transition" => liemod::check_transition_table(table, eps),
        "threeway" => liemod::check_threeway(kappa, n, eps),
        other => return Err(format!("unknown suite {other:?}; expected one of {}", SUITES.join(","))),
    };
    Ok(report)
}

/// Runs several suites and folds them into one report named after the list.
pub fn run_all<S: Scalar>(names: &[&str], table: &PolynomialTable<S>, eps: f64) -> Result<(CheckReport, Vec<CheckReport>), String> {
    let mut all = CheckReport::new(names.join(","), table.degree());
    let mut parts = Vec::with_capacity(names.len());
    for name in names {
        let r = run(name, table, eps)?;
        all.absorb(r.clone());
        parts.push(r);
    }
    Ok((all, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperg::table;
    use crate::kappa::{family_milch, RawParameters};
    use crate::numeric::Exact;

    #[test]
    fn every_suite_passes_on_milch() {
        let k = family_milch(&[Exact::from_ratio(1, 2), Exact::from_ratio(1, 4), Exact::from_ratio(1, 4)]).unwrap();
        let t = table(&k, 2);
        let (all, parts) = run_all(&SUITES, &t, 0.0).unwrap();
        assert!(all.pass, "{:?}", all.failures);
        assert_eq!(parts.len(), 12);
        assert!(run("nope", &t, 0.0).is_err());
    }

    #[test]
    fn definition_lists_violations() {
        let k = family_milch(&[Exact::from_ratio(1, 2), Exact::from_ratio(1, 4), Exact::from_ratio(1, 4)]).unwrap();
        let mut raw: RawParameters<Exact> = k.to_raw();
        raw.u[1][0] = Exact::from_i64(2);
        let r = check_definition(&raw.seal_unchecked(), 1, 0.0);
        assert!(!r.pass);
        assert!(r.failures.iter().any(|f| f.location == "condition ii"));
    }
}
