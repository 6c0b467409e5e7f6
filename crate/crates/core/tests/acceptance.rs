//! Acceptance gate: one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonosc_core::exppoly::{
    count_zeros_rect, ky_bound, sector_zero_bound, strip_bound_simple, vallee_poussin_box_bound,
    QuasiPolynomial, Rect, SectorParams, Term,
};
use nonosc_core::fuchs::Verdict;
use nonosc_core::majorant::{
    excluded_boxes_multiple, excluded_boxes_simple, gap_dominance_check, least_concave_majorant,
    BoxCover,
};
use nonosc_core::ode::{parse_ode, Point};
use nonosc_core::verify::{cover_gaps, strip_box, RandomSpec, Battery};
use nonosc_core::{analyze, common_roots, poly_roots, Complex, Polynomial, Tolerances};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    match out {
        Ok(msg) if took <= limit => Ok(format!("{msg} [{:.2}s]", took.as_secs_f64())),
        Ok(msg) => Err(format!("{msg} but took {:.2}s > {:.0}s", took.as_secs_f64(), limit.as_secs_f64())),
        Err(e) => Err(e),
    }
}

fn criterion_1() -> Outcome {
    let golden = include_str!("golden/catalog.tsv");
    let tol = Tolerances::default();
    let mut n = 0;
    for line in golden.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (want, eq) = line.split_once('\t').ok_or("malformed golden line")?;
        let report = analyze(eq, &tol).map_err(|e| format!("{eq}: {e}"))?;
        let got = format!("{:?}", report.verdict);
        if got != want {
            return Err(format!("{eq}: expected {want}, got {got}"));
        }
        if report.verdict == Verdict::GloballyNonOscillating {
            let gap = report.points.iter().filter_map(|p| p.min_real_gap).fold(f64::INFINITY, f64::min);
            if gap < 0.3 {
                return Err(format!("{eq}: exponent gap {gap} < 0.3"));
            }
        }
        n += 1;
    }
    if n != 6 {
        return Err(format!("golden file has {n} equations, expected 6"));
    }
    Ok(format!("{n}/6 verdicts match"))
}

fn count(qp: &QuasiPolynomial, r: Rect) -> Result<usize, String> {
    count_zeros_rect(qp, &r, &Tolerances::default()).map(|z| z.count).map_err(|e| e.to_string())
}

fn criterion_2() -> Outcome {
    let tol = Tolerances::default();
    let sine = QuasiPolynomial::simple(&[c(0.0, 1.0), c(0.0, -1.0)], &[c(0.0, -0.5), c(0.0, 0.5)]).unwrap();
    let cosh = QuasiPolynomial::simple(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let exp = QuasiPolynomial::simple(&[c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap();
    let anchors = [
        (count(&sine, Rect::new(-4.0, 4.0, -1.0, 1.0).unwrap())?, 3),
        (count(&cosh, Rect::new(-1.0, 1.0, 0.0, 2.0).unwrap())?, 1),
        (count(&exp, Rect::new(-7.0, 3.0, -10.0, 10.0).unwrap())?, 0),
        (count(&exp, Rect::new(0.5, 0.6, 100.0, 200.0).unwrap())?, 0),
    ];
    for (i, (got, want)) in anchors.iter().enumerate() {
        if got != want {
            return Err(format!("anchor {i}: got {got}, expected {want}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let degree = rng.gen_range(0..=6);
        let coeffs: Vec<Complex> = (0..=degree)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let p = Polynomial::new(coeffs);
        let roots = poly_roots(&p, &tol).map_err(|e| e.to_string())?;
        // Random box whose edges stay clear of every root.
        let rect = loop {
            let (u0, v0) = (rng.gen_range(-2.0..1.0), rng.gen_range(-2.0..1.0));
            let r = Rect::new(u0, u0 + rng.gen_range(0.2..2.5), v0, v0 + rng.gen_range(0.2..2.5)).unwrap();
            let clear = roots.locations().all(|z| {
                let du = (z.re - r.u_lo).abs().min((z.re - r.u_hi).abs());
                let dv = (z.im - r.v_lo).abs().min((z.im - r.v_hi).abs());
                !(du < 1e-3 && z.im > r.v_lo - 1e-3 && z.im < r.v_hi + 1e-3)
                    && !(dv < 1e-3 && z.re > r.u_lo - 1e-3 && z.re < r.u_hi + 1e-3)
            });
            if clear {
                break r;
            }
        };
        let expected: usize = roots
            .entries
            .iter()
            .filter(|r| rect.contains(r.location, 0.0))
            .map(|r| r.multiplicity)
            .sum();
        let qp = QuasiPolynomial::new(vec![Term { lambda: c(0.0, 0.0), amplitude: p.clone() }])
            .map_err(|e| e.to_string())?;
        let got = count(&qp, rect)?;
        if got != expected {
            return Err(format!("random polynomial {case}: count {got}, roots in box {expected}"));
        }
    }
    Ok("4 anchors and 200 random polynomials exact".into())
}

const ALPHAS: [f64; 3] = [0.0, 0.5, 1.0];

fn strip_spec(alpha: f64) -> RandomSpec {
    RandomSpec {
        seed: 3,
        k_min: 1,
        k_max: 5,
        exponent_box: [-2.5, 2.5, -3.0, 3.0],
        min_gap: 0.3,
        coeff_range: (0.5, 2.0),
        alpha,
        count: 100,
    }
}

/// The shared simple-exponent batch of criteria 3 and 4.
fn simple_batch() -> Vec<(QuasiPolynomial, f64)> {
    (0..100)
        .map(|i| {
            let spec = strip_spec(ALPHAS[i % 3]);
            let mut rng = spec.case_rng(Battery::Strip, i);
            (spec.random_simple(&mut rng), spec.alpha)
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for (i, (qp, alpha)) in simple_batch().iter().enumerate() {
        let bound = strip_bound_simple(qp, *alpha, &tol).map_err(|e| format!("case {i}: {e}"))?;
        let n = count(qp, strip_box(*alpha)).map_err(|e| format!("case {i}: {e}"))?;
        if n as f64 > bound.floor() {
            return Err(format!("case {i}: {n} zeros > floor({bound})"));
        }
        if bound > 0.0 {
            worst = worst.max(n as f64 / bound);
        }
    }
    Ok(format!("100 cases, max count/bound {worst:.3}"))
}

fn check_cover(qp: &QuasiPolynomial, cover: &BoxCover, alpha: f64, tol: &Tolerances) -> Result<(usize, usize), String> {
    if cover.boxes.len() > cover.count_bound {
        return Err(format!("{} boxes > {}", cover.boxes.len(), cover.count_bound));
    }
    if cover.total_width > cover.width_bound + cover.padding + 1e-9 * (1.0 + cover.width_bound) {
        return Err(format!("width {} > {} + {}", cover.total_width, cover.width_bound, cover.padding));
    }
    let amps: Vec<Polynomial> = qp.terms().iter().map(|t| t.amplitude.clone()).collect();
    let common = common_roots(&amps, tol).map_err(|e| e.to_string())?;
    let h = alpha.max(1e-7);
    let mut outside = 0;
    let mut allowed = 0;
    for gap in cover_gaps(cover, h) {
        outside += count(qp, gap)?;
        allowed += common
            .entries
            .iter()
            .filter(|r| gap.contains(r.location, 0.0))
            .map(|r| r.multiplicity)
            .sum::<usize>();
    }
    if outside != allowed {
        return Err(format!("{outside} zeros outside the cover, {allowed} common amplitude zeros there"));
    }
    Ok((cover.boxes.len(), allowed))
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let mut boxes = 0;
    for (i, (qp, alpha)) in simple_batch().iter().enumerate() {
        let cover = excluded_boxes_simple(qp, *alpha, &tol).map_err(|e| format!("simple case {i}: {e}"))?;
        boxes += check_cover(qp, &cover, *alpha, &tol).map_err(|e| format!("simple case {i}: {e}"))?.0;
    }
    let mut common_seen = 0;
    for i in 0..50 {
        let spec = RandomSpec { seed: 4, k_max: 5, ..strip_spec(ALPHAS[i % 3]) };
        let mut rng = spec.case_rng(Battery::Cover, i);
        let mut qp = spec.random_multiple(&mut rng);
        if i % 5 == 0 {
            // Shared amplitude factor: its zeros are zeros of the sum that no dominance excludes.
            let root = c(rng.gen_range(-15.0..15.0), rng.gen_range(-0.4..0.4) * spec.alpha);
            let factor = Polynomial::from_roots(&[root]);
            let terms = qp
                .terms()
                .iter()
                .map(|t| Term { lambda: t.lambda, amplitude: &t.amplitude * &factor })
                .collect();
            qp = QuasiPolynomial::new(terms).unwrap();
        }
        let cover = excluded_boxes_multiple(&qp, spec.alpha, &tol).map_err(|e| format!("multiple case {i}: {e}"))?;
        let (b, common) = check_cover(&qp, &cover, spec.alpha, &tol).map_err(|e| format!("multiple case {i}: {e}"))?;
        boxes += b;
        common_seen += common;
    }
    Ok(format!("150 covers sound, {boxes} boxes, {common_seen} common amplitude zeros outside covers"))
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let spec = RandomSpec { seed: 5, k_max: 5, exponent_box: [-2.5, 2.5, -3.0, 3.0], ..RandomSpec::default() };
    let mut points = 0;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = spec.case_rng(Battery::Dominance, i);
        let qp = spec.random_simple(&mut rng);
        for step in 0..=400 {
            let u = -10.0 + 0.05 * step as f64;
            let g = gap_dominance_check(&qp, u, &tol).map_err(|e| format!("case {i}: {e}"))?;
            if !g.holds {
                continue;
            }
            points += 1;
            worst = worst.max(g.margin);
            // Relative slack only for rounding in the term moduli.
            if g.margin > 2.0 / 3.0 * (1.0 + 1e-12) {
                return Err(format!("case {i}, u = {u}: ratio {}", g.margin));
            }
        }
    }
    if points == 0 {
        return Err("no grid point satisfied the gap condition".into());
    }
    Ok(format!("{points} gap points, worst ratio {worst:.6} <= 2/3"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let n = rng.gen_range(1..=12);
        let mut mus: Vec<f64> = Vec::new();
        while mus.len() < n {
            let m = rng.gen_range(-5.0..5.0);
            if mus.iter().all(|x: &f64| (x - m).abs() > 1e-3) {
                mus.push(m);
            }
        }
        let pts: Vec<(f64, f64)> = mus.iter().map(|&m| (m, rng.gen_range(-5.0..5.0))).collect();
        let u = rng.gen_range(-5.0..5.0);
        let shifted_pts: Vec<(f64, f64)> = pts.iter().map(|&(m, p)| (m, p + u * m)).collect();
        let a = least_concave_majorant(&shifted_pts).map_err(|e| e.to_string())?;
        let b = least_concave_majorant(&pts).map_err(|e| e.to_string())?.shifted(u);
        for &(m, _) in &pts {
            worst = worst.max((a.eval(m) - b.eval(m)).abs());
        }
        if a.indices == b.indices {
            for (s, t) in a.slopes.iter().zip(&b.slopes) {
                worst = worst.max((s - t).abs());
            }
        }
        if worst > 1e-12 {
            return Err(format!("case {case}: discrepancy {worst:e}"));
        }
    }
    Ok(format!("1000 point sets, max discrepancy {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let pm = QuasiPolynomial::simple(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let strip = strip_bound_simple(&pm, 0.0, &tol).map_err(|e| e.to_string())?;
    if (strip - (1.0 + 4.0 * LN_2 / PI)).abs() > 1e-12 {
        return Err(format!("strip bound {strip}"));
    }
    let rot = QuasiPolynomial::simple(&[c(0.0, 0.0), c(0.0, 1.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let ky = ky_bound(&rot, 2.0 * PI).map_err(|e| e.to_string())?;
    if ky != 3.0 {
        return Err(format!("ky bound {ky}"));
    }
    let vp = vallee_poussin_box_bound(2, 1.0, 1.0).map_err(|e| e.to_string())?;
    if (vp - (6.0 + 3.0 / (9.0f64 / 4.0).ln())).abs() > 1e-12 {
        return Err(format!("box bound {vp}"));
    }
    let cover = excluded_boxes_simple(&pm, 0.0, &tol).map_err(|e| e.to_string())?;
    match cover.boxes.as_slice() {
        [b] if b.u_lo == -LN_2 && b.u_hi == LN_2 => {}
        other => return Err(format!("cosh cover {other:?}")),
    }
    Ok(format!("strip {strip:.12}, ky {ky}, box {vp:.12}, cover [-ln2, ln2]"))
}

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let ode = parse_ode("z^2*y'' + z*y' - y = 0").map_err(|e| e.to_string())?;
    let params = SectorParams { alpha: PI / 2.0, beta: 0.0, eps_bound: None };
    let b = sector_zero_bound(&ode, Point::Finite(c(0.0, 0.0)), &params, &tol).map_err(|e| e.to_string())?;
    if !b.value.is_finite() {
        return Err(format!("bound {}", b.value));
    }
    if b.rigorous {
        return Err("sampled constant not flagged as non-rigorous".into());
    }
    // Solutions a z + b/z become a e^t + b e^{-t} in the chart z = e^t.
    let semistrip = Rect::new(-20.0, 0.0, -PI / 2.0, PI / 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut most = 0;
    for i in 0..10 {
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let bb = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let qp = QuasiPolynomial::simple(&[c(1.0, 0.0), c(-1.0, 0.0)], &[a, bb]).unwrap();
        let n = count(&qp, semistrip).map_err(|e| format!("solution {i}: {e}"))?;
        most = most.max(n);
        if n as f64 > b.value {
            return Err(format!("solution {i}: {n} zeros > {}", b.value));
        }
    }
    Ok(format!(
        "bound {:.3} >= max count {most}; C = {} (sampled, non-rigorous), C_EQ = {}, ell = {:.3}",
        b.value, b.coefficient_sup, b.perturbation, b.ell
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 verdict catalog", Duration::from_secs(1), criterion_1),
        ("2 oracle exactness", Duration::from_secs(30), criterion_2),
        ("3 strip bound soundness", Duration::from_secs(300), criterion_3),
        ("4 cover soundness", Duration::from_secs(300), criterion_4),
        ("5 dominance margin", Duration::from_secs(300), criterion_5),
        ("6 shift/hull equivariance", Duration::from_secs(60), criterion_6),
        ("7 anchored values", Duration::from_secs(5), criterion_7),
        ("8 sector bound", Duration::from_secs(60), criterion_8),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        match timed(limit, run) {
            Ok(msg) => println!("criterion {name}: PASS — {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL — {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
