//! Acceptance suite: one PASS/FAIL line per criterion, then a single verdict.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see the
//! lines when everything passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use bergman_core::conformal::ConformalMap;
use bergman_core::domain::{
    m_psi_apply, m_psi_weak, neighbor_check, transfer_identity_check, transfer_strong_norms, transfer_weak_check,
    vitali_select, DomainSpec,
};
use bergman_core::dyadic::region::{box_area, top_area};
use bergman_core::dyadic::{build_grid, cell_count, Arc, DiskMesh, DyadicInterval, GridId, QuadOrder};
use bergman_core::experiments::{run, Experiment, ExperimentConfig};
use bergman_core::operators::{
    cz_decompose, lambda_grid, maximal_weak_check, sparse_norm_check, weak_type_sweep, BergmanProjector, CellFunction,
    ProjectorOptions,
};
use bergman_core::weights::{apr_and_doubling, regularize_on, reverse_holder_gain, Weight};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn c1_geometry() -> Outcome {
    let mut worst: f64 = 0.0;
    for grid in GridId::BOTH {
        for d in 0..=10 {
            let cells = build_grid(grid, d).map_err(e)?;
            if cells.len() != cell_count(d) {
                return Ok((false, format!("{grid} depth {d}: {} cells", cells.len())));
            }
            for (k, i) in cells.iter().enumerate() {
                if i.flat_index() != k || DyadicInterval::from_flat(grid, k) != *i {
                    return Ok((false, format!("flat index mismatch at {i:?}")));
                }
                if !i.is_root() {
                    let p = i.parent().map_err(e)?;
                    if !p.contains(i) || !p.children().contains(i) {
                        return Ok((false, format!("parent/child broken at {i:?}")));
                    }
                }
                let [a, b] = i.children();
                let (sa, sb) = (a.arc(), b.arc());
                if (sa.length + sb.length - i.length()).abs() > 0.0 || sa.overlaps(&sb) || !i.arc().contains_arc(&sa) {
                    return Ok((false, format!("children do not split {i:?}")));
                }
            }
        }
        let d = 10;
        let mesh = DiskMesh::new(grid, d, QuadOrder::default()).map_err(e)?;
        let delta = DiskMesh::collar(d);
        let total: f64 = mesh.nodes().iter().map(|n| n.weight).sum();
        worst = worst.max((total - (1.0 - delta).powi(2)).abs());
        for c in 0..cell_count(d) {
            let i = DyadicInterval::from_flat(grid, c);
            let l = i.length();
            let t = mesh.integrate_top(&i, |_| 1.0).map_err(e)?;
            worst = worst.max((t - top_area(l)).abs() / top_area(l));
            // the collar strip below the deepest cells closes the box exactly
            let q = mesh.integrate_box(&i, d, |_| 1.0).map_err(e)? + l * (1.0 - (1.0 - delta).powi(2));
            worst = worst.max((q - box_area(l)).abs() / box_area(l));
        }
    }
    Ok((worst <= 1e-12, format!("grids exact at depths 0..10; worst relative area error {worst:.2e}")))
}

fn c2_projection() -> Outcome {
    let mut rows = Vec::new();
    let mut t8 = 0.0;
    for d in 5..=8 {
        let t = Instant::now();
        let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).map_err(e)?;
        let p = BergmanProjector::new(&mesh, ProjectorOptions::default()).map_err(e)?;
        let r = p.reproduction(5).map_err(e)?;
        if d == 8 {
            t8 = t.elapsed().as_secs_f64();
        }
        rows.push(r);
    }
    let at7 = &rows[2];
    let ok7 = at7.monomials.iter().all(|x| *x <= 1e-2);
    let conj_ok = rows.iter().all(|r| r.conj <= 1e-2);
    // n = 0 sits at the quadrature floor; decrease is required for n >= 1 and the maximum
    let decreasing = rows.windows(2).all(|w| {
        (1..=5).all(|n| w[1].monomials[n] < w[0].monomials[n])
            && w[1].monomials.iter().cloned().fold(0.0, f64::max) < w[0].monomials.iter().cloned().fold(0.0, f64::max)
    });
    Ok((
        ok7 && conj_ok && decreasing && t8 <= 60.0,
        format!(
            "depth 7 max error {:.2e}, conj {:.2e}, strictly decreasing {decreasing}, depth 8 in {t8:.1} s",
            at7.certified, at7.conj
        ),
    ))
}

fn catalog_weights() -> Vec<Weight> {
    [
        "const:1",
        "power:0.3",
        "power:-0.4",
        "power:0.7",
        "derivsq:quadratic:0.25",
        "deriv:1:moebius:0.5",
        "derivsq:log_example",
        "prod(power:0.2,derivsq:quadratic:0.2)",
        "pow(derivsq:moebius:0.3,-0.5)",
        "power:-0.2",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

fn random_function(rng: &mut ChaCha8Rng, d: u32) -> CellFunction {
    let lvl = rng.gen_range(0..=3.min(d));
    let j = DyadicInterval::new(GridId::G1, lvl, rng.gen_range(0..1u64 << lvl)).unwrap();
    let ind = CellFunction::indicator(&j, d);
    let vals = ind.values.iter().map(|x| x * rng.gen_range(0.1..2.0) + 0.01 * rng.gen::<f64>()).collect();
    CellFunction::new(GridId::G1, d, vals).unwrap()
}

fn c3_sparse() -> Outcome {
    let d = 6;
    let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).map_err(e)?;
    let ws = catalog_weights();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let w = &ws[rng.gen_range(0..ws.len())];
        let v = &ws[rng.gen_range(0..ws.len())];
        let f = random_function(&mut rng, d);
        for p in [1.5, 2.0, 3.0] {
            let r = sparse_norm_check(&f, w, v, p, &mesh).map_err(e)?;
            worst = worst.max(r.ratio / r.bound);
            if !r.holds() {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, format!("60 checks, {violations} violations, worst ratio/bound {worst:.3e}")))
}

fn c4_counterexample() -> Outcome {
    let mut c = ExperimentConfig::preset(Experiment::CounterexamplePsi1);
    c.depth_min = 6;
    c.depth_max = 10;
    let r = run(&c).map_err(e)?;
    let t = r.table("profile").ok_or("no profile")?;
    let b1 = t.column("b1").ok_or("no b1")?;
    let b2 = t.column("b2").ok_or("no b2")?;
    let growth: Vec<f64> = b1.windows(2).map(|w| w[1] / w[0]).collect();
    let min_growth = growth.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail = &b2[2..];
    let change = tail.iter().cloned().fold(0.0, f64::max) / tail.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    Ok((
        min_growth >= 1.5 && change < 0.05,
        format!("B1 growth per depth {growth:.3?} (need >= 1.5), B2 change over depths 8..10 {change:.4}"),
    ))
}

fn c5_regularization() -> Outcome {
    let d = 6;
    let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).map_err(e)?;
    let v = Weight::derivsq("quadratic:0.25".parse().map_err(e)?);
    let mut worst_avg: f64 = 0.0;
    let mut worst_pm: f64 = 0.0;
    let mut min_tau = f64::INFINITY;
    let mut max_apr: f64 = 0.0;
    for u in catalog_weights() {
        let reg = regularize_on(&u, &v, &mesh).map_err(e)?;
        for c in 0..cell_count(d) {
            let i = DyadicInterval::from_flat(GridId::G1, c);
            let a = mesh.integrate_box(&i, d, |z| u.eval(z) * v.eval(z)).map_err(e)?;
            let b = mesh.integrate_box(&i, d, |z| reg.eval(z) * v.eval(z)).map_err(e)?;
            worst_avg = worst_avg.max((a - b).abs() / a);
        }
        let half = regularize_on(&u.clone().pow(0.5), &v, &mesh).map_err(e)?;
        for c in 0..cell_count(d) {
            let i = DyadicInterval::from_flat(GridId::G1, c);
            let pt = Complex64::from_polar(1.0 - 0.75 * i.length(), std::f64::consts::TAU * i.center());
            worst_pm = worst_pm.max(half.eval(pt) / reg.eval(pt).sqrt());
        }
        let apr = apr_and_doubling(&reg, &mesh, d).map_err(e)?.apr;
        max_apr = max_apr.max(apr);
        min_tau = min_tau.min(reverse_holder_gain(&reg, &v, &mesh, d).map_err(e)?.tau);
    }
    Ok((
        worst_avg <= 1e-10 && worst_pm <= 1.0 + 1e-12 && max_apr.is_finite() && min_tau > 1.0,
        format!("average error {worst_avg:.1e}, power mean {worst_pm:.6}, APR max {max_apr:.3}, min tau {min_tau:.4}"),
    ))
}

fn c6_transfer() -> Outcome {
    let d = 7;
    let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).map_err(e)?;
    let p = BergmanProjector::new(&mesh, ProjectorOptions::default()).map_err(e)?;
    let mut worst_id: f64 = 0.0;
    let mut worst_strong: f64 = 0.0;
    let mut worst_weak: f64 = 0.0;
    let cases = [
        (ConformalMap::Quadratic(Complex64::new(0.25, 0.0)), Weight::one()),
        (ConformalMap::Moebius(Complex64::new(0.5, 0.0)), Weight::Power(0.5)),
    ];
    for (map, u) in cases {
        let dom = DomainSpec::new(map).map_err(e)?;
        for k in 0..=5 {
            let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
            c[k] = Complex64::new(1.0, 0.0);
            worst_id = worst_id.max(transfer_identity_check(&c, &dom, &p).map_err(e)?.max_rel);
        }
        // indicator tests of boxes at level 2 plus one polynomial
        let mut tests: Vec<Vec<Complex64>> = build_grid(GridId::G1, 2)
            .map_err(e)?
            .into_iter()
            .filter(|i| i.level == 2)
            .map(|i| {
                let ind = CellFunction::indicator(&i, d);
                mesh.nodes().iter().map(|n| Complex64::new(ind.values[n.cell], 0.0)).collect()
            })
            .collect();
        tests.push(mesh.nodes().iter().map(|n| n.z * n.z + 1.0).collect());
        let s = transfer_strong_norms(&u, 2.0, &dom, &mesh, &p, &tests).map_err(e)?;
        for (a, b) in &s.per_test {
            worst_strong = worst_strong.max((a - b).abs() / a.max(*b));
        }
        for f in &tests {
            for m in transfer_weak_check(f, &lambda_grid(0.5, 2), &dom, &u, &mesh, &p).map_err(e)? {
                let scale = m.omega.max(m.disk);
                if scale > 0.0 {
                    worst_weak = worst_weak.max((m.omega - m.disk).abs() / scale);
                }
            }
        }
    }
    Ok((
        worst_id <= 1e-2 && worst_strong <= 1e-8 && worst_weak <= 1e-8,
        format!("identity residual {worst_id:.3e}, strong {worst_strong:.1e}, weak {worst_weak:.1e}"),
    ))
}

fn c7_lower_bound() -> Outcome {
    let r = run(&ExperimentConfig::preset(Experiment::LowerBoundTrend)).map_err(e)?;
    let detail = r
        .verdicts
        .iter()
        .map(|v| format!("{} {}", v.check, v.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((r.exit_code() == 0, detail))
}

fn c8_weak_type() -> Outcome {
    let d = 6;
    let mesh = DiskMesh::new(GridId::G1, d, QuadOrder::default()).map_err(e)?;
    let lambdas = lambda_grid(1.0, 4);
    let maps = ["identity", "quadratic:0.25", "quadratic:0.4", "moebius:0.5", "log_example"];
    let us = ["const:1", "power:0.25"];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut weak_fail, mut cz_fail, mut sweep_fail, mut checked) = (0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    for m in maps {
        for u in us {
            let dom = DomainSpec::new(m.parse().map_err(e)?).map_err(e)?;
            let u: Weight = u.parse().map_err(e)?;
            let g = random_function(&mut rng, d);
            let rows = maximal_weak_check(&g, &u, &dom.w(), &mesh, &lambdas).map_err(e)?;
            weak_fail += rows.iter().filter(|r| !r.holds()).count();
            for &l in &lambdas {
                let s = cz_decompose(&g, &dom.w(), l, &mesh).map_err(e)?;
                if !s.family.root_selected {
                    checked += 1;
                    if !s.checks.all_hold() {
                        cz_fail += 1;
                    }
                }
            }
            let rep = weak_type_sweep(&g, &u, &dom.v(), &dom.w(), &mesh, &lambdas).map_err(e)?;
            worst = worst.max(rep.sup_ratio / rep.constant.value);
            if !rep.holds() {
                sweep_fail += 1;
            }
        }
    }
    Ok((
        weak_fail + cz_fail + sweep_fail == 0,
        format!(
            "10 triples: maximal weak failures {weak_fail}, CZ failures {cz_fail} of {checked}, sweep failures {sweep_fail}, worst ratio/constant {worst:.2e}"
        ),
    ))
}

fn c9_uniform_domain() -> Outcome {
    let r = run(&ExperimentConfig::preset(Experiment::UniformDomainEquivalence)).map_err(e)?;
    let t = r.table("profile").ok_or("no profile")?;
    let f = t.column("factor").ok_or("no factor")?;
    let ok = r.verdict("factor-bound").is_some_and(|v| v.pass()) && r.verdict("factor-stability").is_some_and(|v| v.pass());
    Ok((ok, format!("factors over depths 5..8 {f:.4?}")))
}

fn random_dyadic_arc(rng: &mut ChaCha8Rng) -> Arc {
    let lvl = rng.gen_range(2..=6u32);
    let len = (-(lvl as f64)).exp2();
    let start = rng.gen_range(0..1u64 << 7) as f64 / 128.0;
    Arc::new(start, len).unwrap()
}

fn c10_covering() -> Outcome {
    let order = QuadOrder::default();
    let id = DomainSpec::new(ConformalMap::Identity).map_err(e)?;
    let depth = 7;
    let mut min_ratio = f64::INFINITY;
    let mut all_disjoint = true;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs: Vec<Arc> = (0..50).map(|_| random_dyadic_arc(&mut rng)).collect();
        let r = vitali_select(&arcs, &id, depth, order).map_err(e)?;
        all_disjoint &= r.disjoint;
        min_ratio = min_ratio.min(r.ratio);
    }
    let mut max_neighbor: f64 = 0.0;
    let log = DomainSpec::new(ConformalMap::LogExample).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for dom in [&id, &log] {
        for _ in 0..100 {
            let lvl = rng.gen_range(2..=7u32);
            let l1 = (-(lvl as f64)).exp2();
            let l2 = l1 * [1.0, 0.5, 0.25][rng.gen_range(0..3)];
            // straddle angle pi on half the pairs
            let a = if rng.gen_bool(0.5) { 0.5 - l1 } else { rng.gen_range(0..1u64 << lvl) as f64 * l1 };
            let i1 = Arc::new(a, l1).unwrap();
            let i2 = Arc::new(a + l1, l2).unwrap();
            max_neighbor = max_neighbor.max(neighbor_check(&i1, &i2, dom, 8, order).map_err(e)?);
        }
    }
    // weak type of the image maximal operator against the covering constant of each level set
    let mesh = DiskMesh::new(GridId::G1, 6, order).map_err(e)?;
    let quad = DomainSpec::new(ConformalMap::Quadratic(Complex64::new(0.25, 0.0))).map_err(e)?;
    let g = random_function(&mut ChaCha8Rng::seed_from_u64(11), 6);
    let m = m_psi_apply(&g, &quad, &mesh).map_err(e)?;
    let mut weak_ok = true;
    for l in lambda_grid(1.0, 3) {
        let maximal: Vec<Arc> = (0..mesh.cell_count())
            .filter(|&c| m.values[c] > l && (c == 0 || m.values[(c - 1) / 2] <= l))
            .map(|c| DyadicInterval::from_flat(GridId::G1, c).arc())
            .collect();
        let bound = if maximal.is_empty() {
            1.0
        } else {
            1.0 / vitali_select(&maximal, &quad, 6, order).map_err(e)?.ratio
        };
        weak_ok &= m_psi_weak(&g, &quad, &mesh, &[l], bound).map_err(e)?.holds();
    }
    Ok((
        all_disjoint && max_neighbor <= 10.0 && weak_ok,
        format!(
            "disjoint {all_disjoint}, min covering ratio {min_ratio:.4} over 100 seeds, max neighbor ratio {max_neighbor:.4} over 200 pairs, M_psi weak type {weak_ok}"
        ),
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("grid and geometry exactness", c1_geometry),
        ("projection reproduction", c2_projection),
        ("sparse bound", c3_sparse),
        ("counterexample profile", c4_counterexample),
        ("regularization suite", c5_regularization),
        ("transfer identities", c6_transfer),
        ("lower-bound trend", c7_lower_bound),
        ("weak-type suite", c8_weak_type),
        ("uniform-domain equivalence", c9_uniform_domain),
        ("covering and neighbors", c10_covering),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let (ok, detail) = match outcome {
            Ok(x) => x,
            Err(msg) => (false, format!("error: {msg}")),
        };
        println!(
            "criterion {:>2} {:<28} {}  {detail}  [{:.1} s]",
            k + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
