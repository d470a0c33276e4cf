//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kraw_core::bispec::{check_commute, check_eigen, check_stencils, check_universal, check_universal_identity};
use kraw_core::hyperg::{check_duality, check_orthogonality, eval_hypergeometric, table, DegreePoint};
use kraw_core::kappa::{family_ds, family_hoare_rahman, family_milch, griffiths_from_p};
use kraw_core::liemod::{
    check_adjacency, check_adjointness, check_antiauto, check_conjugation, check_dual_norms, check_generation,
    check_threeway, check_transition, check_weights,
};
use kraw_core::matrix::Mat;
use kraw_core::numeric::{binomial, SimplexLattice};
use kraw_core::{Approx, CheckReport, Exact, ParameterSet, Scalar};

type Kappa = ParameterSet<Exact>;

fn q(n: i64, d: i64) -> Exact {
    Exact::from_ratio(n, d)
}

fn qs(v: &[(i64, i64)]) -> Vec<Exact> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

/// One representative per family available in dimension `d`.
fn representatives(d: usize) -> Vec<(&'static str, Kappa)> {
    let mut out = Vec::new();
    match d {
        1 => {
            out.push(("griffiths", griffiths_from_p(&qs(&[(1, 3), (2, 3)])).unwrap()));
            out.push(("milch", family_milch(&qs(&[(1, 4), (3, 4)])).unwrap()));
            out.push(("ds", family_ds(q(2, 1), 1).unwrap()));
        }
        2 => {
            out.push(("griffiths", griffiths_from_p(&qs(&[(1, 2), (1, 3), (1, 6)])).unwrap()));
            out.push(("milch", family_milch(&qs(&[(1, 2), (1, 4), (1, 4)])).unwrap()));
            out.push(("ds", family_ds(q(2, 1), 2).unwrap()));
            out.push(("hoare-rahman", family_hoare_rahman([q(1, 1), q(2, 1), q(3, 1), q(4, 1)]).unwrap()));
        }
        3 => {
            out.push(("griffiths", griffiths_from_p(&qs(&[(1, 4), (1, 4), (1, 3), (1, 6)])).unwrap()));
            out.push(("milch", family_milch(&qs(&[(1, 2), (1, 6), (1, 6), (1, 6)])).unwrap()));
            out.push(("ds", family_ds(q(3, 1), 3).unwrap()));
        }
        _ => unreachable!(),
    }
    out
}

/// Grid of (d, N ranges) shared by criteria 2 to 4.
fn grid(max_n_low: u32, max_n_d3: u32) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for d in [1, 2] {
        for n in 1..=max_n_low {
            out.push((d, n));
        }
    }
    for n in 1..=max_n_d3 {
        out.push((3, n));
    }
    out
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, detail: String::new() }
    }

    fn take(&mut self, label: &str, r: &CheckReport) {
        if !r.pass {
            self.pass = false;
            if self.detail.is_empty() {
                let first = r.failures.first().map(|f| format!("{}: {}", f.location, f.detail)).unwrap_or_default();
                self.detail = format!("{label} {} N={} failed at {first}", r.check, r.n);
            }
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.pass = false;
            if self.detail.is_empty() {
                self.detail = msg();
            }
        }
    }
}

fn hr_grid() -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            for c in [1, 2, 5] {
                for e in [1, 4] {
                    out.push([a, b, c, e]);
                }
            }
        }
    }
    out.push([1, -2, 3, 5]);
    out.push([2, 7, -1, 3]);
    out
}

fn criterion_1() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut sets: Vec<(String, Kappa)> = Vec::new();
    let mut hr = 0;
    for g in hr_grid() {
        if let Ok(k) = family_hoare_rahman(g.map(|x| q(x, 1))) {
            sets.push((format!("hoare-rahman {g:?}"), k));
            hr += 1;
        }
    }
    o.require(hr >= 20, || format!("only {hr} Hoare-Rahman grids valid"));

    let milch: [&[(i64, i64)]; 10] = [
        &[(1, 2), (1, 4), (1, 4)],
        &[(1, 3), (1, 3), (1, 3)],
        &[(1, 5), (2, 5), (2, 5)],
        &[(3, 4), (1, 8), (1, 8)],
        &[(1, 6), (1, 2), (1, 3)],
        &[(1, 2), (1, 6), (1, 6), (1, 6)],
        &[(1, 4), (1, 4), (1, 4), (1, 4)],
        &[(2, 5), (1, 5), (1, 5), (1, 5)],
        &[(1, 10), (2, 10), (3, 10), (4, 10)],
        &[(3, 7), (2, 7), (1, 7), (1, 7)],
    ];
    for p in milch {
        match family_milch(&qs(p)) {
            Ok(k) => sets.push((format!("milch {p:?}"), k)),
            Err(e) => o.require(false, || format!("milch {p:?}: {e}")),
        }
    }
    for qv in [q(2, 1), q(3, 1), q(1, 2), q(-1, 1)] {
        for d in 1..=3 {
            match family_ds(qv.clone(), d) {
                Ok(k) => sets.push((format!("ds q={qv} d={d}"), k)),
                Err(e) => o.require(false, || format!("ds q={qv} d={d}: {e}")),
            }
        }
    }
    let griffiths: [&[(i64, i64)]; 10] = [
        &[(1, 2), (1, 2)],
        &[(1, 3), (2, 3)],
        &[(3, 5), (2, 5)],
        &[(1, 2), (1, 3), (1, 6)],
        &[(1, 3), (1, 3), (1, 3)],
        &[(1, 5), (3, 10), (1, 2)],
        &[(1, 4), (1, 4), (1, 3), (1, 6)],
        &[(1, 4), (1, 4), (1, 4), (1, 4)],
        &[(1, 10), (2, 10), (3, 10), (4, 10)],
        &[(2, 3), (1, 9), (1, 9), (1, 9)],
    ];
    for p in griffiths {
        match griffiths_from_p(&qs(p)) {
            Ok(k) => sets.push((format!("griffiths {p:?}"), k)),
            Err(e) => o.require(false, || format!("griffiths {p:?}: {e}")),
        }
    }

    for (label, k) in &sets {
        let n = k.d() + 1;
        o.require(k.matrix_equation_lhs() == Mat::identity(n), || format!("{label}: matrix equation fails"));
        let revalidated = k.to_raw().validate_with(0.0);
        o.require(revalidated.as_ref() == Ok(k), || format!("{label}: revalidation fails"));
    }
    (o, format!("{} sets, {hr} Hoare-Rahman", sets.len()))
}

fn criterion_2() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut runs = 0;
    for (d, n) in grid(5, 3) {
        for (label, k) in representatives(d) {
            o.take(label, &check_threeway(&k, n, 0.0));
            runs += 1;
        }
    }
    (o, format!("{runs} (kappa, N) tables"))
}

/// Classical two-point Krawtchouk orthogonality at `p = 1/2`:
/// `sum_x C(N,x) 2^-N K_m(x) K_n(x) = delta_{mn} / C(N,n)`.
fn classical_krawtchouk(o: &mut Outcome) {
    let k = griffiths_from_p(&qs(&[(1, 2), (1, 2)])).unwrap();
    for n in 1..=4u32 {
        let t = table(&k, n);
        let lat = SimplexLattice::new(1, n);
        let at = |m: u32, x: u32| {
            let r = lat.position_of_tail(&[m]).unwrap();
            let c = lat.position_of_tail(&[x]).unwrap();
            t.get(r, c).clone()
        };
        for a in 0..=n {
            for b in 0..=n {
                let mut sum = q(0, 1);
                for x in 0..=n {
                    sum += q(binomial(n as u64, x as u64) as i64, 1 << n) * at(a, x) * at(b, x);
                }
                let want = if a == b { q(1, binomial(n as u64, a as u64) as i64) } else { q(0, 1) };
                o.require(sum == want, || format!("classical Krawtchouk N={n} ({a},{b}): {sum} vs {want}"));
            }
        }
    }
}

fn criterion_3() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut runs = 0;
    for (d, n) in grid(4, 3) {
        for (label, k) in representatives(d) {
            o.take(label, &check_orthogonality(&k, n, 0.0));
            runs += 1;
        }
    }
    classical_krawtchouk(&mut o);
    (o, format!("{runs} tables, classical cross-check"))
}

fn criterion_4() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut counts = Vec::new();
    for d in 1..=3 {
        for (label, k) in representatives(d) {
            for n in 1..=4 {
                o.take(label, &check_eigen(&k, n, 0.0));
                let s = check_stencils(&k, n, 0.0);
                o.take(label, &s);
                if n == 4 {
                    let attained = s.notes[0].split(": ").nth(1).unwrap_or("").replace(' ', ",");
                    counts.push(format!("{label}/d{d}[{attained}]"));
                }
            }
        }
    }
    (o, format!("bound d^2+d+1; attained {}", counts.join(" ")))
}

fn criterion_5() -> (Outcome, String) {
    let mut o = Outcome::new();
    for d in 1..=3 {
        for (label, k) in representatives(d) {
            for n in 1..=4 {
                o.take(label, &check_universal(&k, n, 0.0));
            }
        }
    }
    for (label, k) in representatives(2) {
        for n in 0..=6 {
            o.take(label, &check_universal_identity(&k, n, 0.0));
        }
    }
    (o, "eigenvalue -|m| on every row; d=2 coefficient identity".into())
}

fn criterion_6() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut pairs = 0;
    for d in 2..=3 {
        for (label, k) in representatives(d) {
            for n in 1..=4 {
                let r = check_commute(&k, n, 0.0);
                pairs += r.checked;
                o.take(label, &r);
            }
        }
    }
    (o, format!("{pairs} entries compared"))
}

fn criterion_7() -> (Outcome, String) {
    let mut o = Outcome::new();
    let mut checked = 0;
    for d in 1..=2 {
        for (label, k) in representatives(d) {
            for r in [check_antiauto(&k, 0.0), check_conjugation(&k, 0.0), check_generation(&k, 0.0)] {
                checked += r.checked;
                o.take(label, &r);
            }
            for n in 0..=3 {
                for r in [
                    check_weights(&k, n, 0.0),
                    check_adjointness(&k, n, 0.0),
                    check_dual_norms(&k, n, 0.0),
                    check_transition(&k, n, 0.0),
                    check_adjacency(&k, n, 0.0),
                ] {
                    checked += r.checked;
                    o.take(label, &r);
                }
            }
        }
    }
    (o, format!("{checked} identities"))
}

fn criterion_8() -> (Outcome, String) {
    let mut o = Outcome::new();
    for d in 1..=2 {
        for (label, k) in representatives(d) {
            for n in 1..=4 {
                o.take(label, &check_duality(&k, n, 0.0));
            }
        }
    }
    let mut swaps = 0;
    for g in hr_grid() {
        let Ok(k) = family_hoare_rahman(g.map(|x| q(x, 1))) else { continue };
        let swapped = family_hoare_rahman([g[0], g[2], g[1], g[3]].map(|x| q(x, 1)));
        o.require(swapped.as_ref() == Ok(&k.involute()), || format!("hoare-rahman {g:?}: involution is not p2<->p3"));
        swaps += 1;
    }
    (o, format!("table transposes; {swaps} Hoare-Rahman swaps"))
}

fn criterion_9() -> (Outcome, String) {
    let mut o = Outcome::new();
    let ps = [(1, 2), (1, 3), (2, 5), (3, 4), (1, 7), (5, 6), (-1, 2), (3, 2)];
    let mut cells = 0;
    for &(a, b) in &ps {
        let p1 = q(a, b);
        let k = griffiths_from_p(&[q(1, 1) - &p1, p1.clone()]).unwrap();
        let omega = k.omega()[(0, 0)].clone();
        for n in 1..=6 {
            for mt in 0..=n {
                let got = eval_hypergeometric(&k, &DegreePoint::new(vec![1], n).unwrap(), &DegreePoint::new(vec![mt], n).unwrap())
                    .unwrap();
                let want = q(1, 1) - q(mt as i64, n as i64) * &omega;
                o.require(got == want, || format!("p1={p1} N={n} mt={mt}: {got} vs {want}"));
                cells += 1;
            }
        }
    }
    (o, format!("{} values of p, {cells} cells", ps.len()))
}

fn criterion_10() -> (Outcome, String) {
    let mut o = Outcome::new();
    let eps = 1e-10;
    let mut worst: f64 = 0.0;
    let mut take = |o: &mut Outcome, label: &str, r: CheckReport| {
        worst = worst.max(r.max_residual);
        o.take(label, &r);
        o.require(r.max_residual < eps, || format!("{label} {} N={}: residual {:e}", r.check, r.n, r.max_residual));
    };
    for (d, n) in grid(5, 3) {
        for (label, k) in representatives(d) {
            let ka: ParameterSet<Approx> = k.to_approx();
            take(&mut o, label, check_threeway(&ka, n, eps));
            if n <= 4 {
                take(&mut o, label, check_orthogonality(&ka, n, eps));
            }
        }
    }
    for d in 1..=3 {
        for (label, k) in representatives(d) {
            let ka = k.to_approx();
            for n in 1..=4 {
                take(&mut o, label, check_eigen(&ka, n, eps));
            }
        }
    }
    (o, format!("max residual {worst:.3e}"))
}

type Criterion = fn() -> (Outcome, String);

fn main() -> ExitCode {
    let criteria: [(u32, &str, Criterion, Option<Duration>); 10] = [
        (1, "parameter-set validity", criterion_1, Some(Duration::from_secs(1))),
        (2, "three-way evaluation agreement", criterion_2, Some(Duration::from_secs(60))),
        (3, "orthogonality relations", criterion_3, None),
        (4, "bispectral recurrences", criterion_4, None),
        (5, "universal equation", criterion_5, None),
        (6, "commutativity", criterion_6, None),
        (7, "Lie structure suite", criterion_7, Some(Duration::from_secs(30))),
        (8, "duality", criterion_8, None),
        (9, "one-variable reduction", criterion_9, None),
        (10, "approximate mode", criterion_10, None),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (mut outcome, summary) = run();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            outcome.require(elapsed < limit, || format!("took {elapsed:.2?}, budget {limit:?}"));
        }
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let tail = if outcome.pass { summary } else { outcome.detail };
        println!("criterion {id:>2} [{status}] {name} ({:.2} s): {tail}", elapsed.as_secs_f64());
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
