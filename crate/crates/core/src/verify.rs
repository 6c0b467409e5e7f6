//! Seeded random instances and the batteries that check every bound against the zero counter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{
    count_zeros_rect, ky_bound, strip_bound_simple, QuasiPolynomial, Rect, Term,
};
use crate::majorant::{
    excluded_boxes_multiple, excluded_boxes_simple, gap_dominance_check, is_dominant_at, BoxCover,
};
use crate::poly::{Complex, Polynomial};
use crate::tolerances::Tolerances;

/// Env var capping the worker count.
pub const THREADS_ENV: &str = "NONOSC_THREADS";

/// Half-width of the truncated strip used for strip and cover checks.
pub const STRIP_RADIUS: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub k_min: usize,
    pub k_max: usize,
    /// `[re_lo, re_hi, im_lo, im_hi]` for the exponents.
    pub exponent_box: [f64; 4],
    /// Minimum gap between consecutive real parts.
    pub min_gap: f64,
    /// Range of amplitude (and polynomial coefficient) moduli.
    pub coeff_range: (f64, f64),
    /// Strip half-height α.
    pub alpha: f64,
    pub count: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            k_min: 1,
            k_max: 4,
            exponent_box: [-2.0, 2.0, -3.0, 3.0],
            min_gap: 0.3,
            coeff_range: (0.5, 2.0),
            alpha: 1.0,
            count: 100,
        }
    }
}

impl RandomSpec {
    pub fn validate(&self) -> Result<()> {
        let [re_lo, re_hi, im_lo, im_hi] = self.exponent_box;
        let ok = self.k_min >= 1
            && self.k_min <= self.k_max
            && self.min_gap > 0.0
            && re_lo < re_hi
            && im_lo <= im_hi
            && (self.k_max - 1) as f64 * self.min_gap <= re_hi - re_lo
            && self.coeff_range.0 > 0.0
            && self.coeff_range.0 <= self.coeff_range.1
            && self.alpha >= 0.0
            && self.alpha.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("inconsistent random spec: {self:?}")))
        }
    }

    /// Generator for one case; independent of scheduling.
    pub fn case_rng(&self, battery: Battery, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(battery as u64);
        rng.set_word_pos(index as u128 * (1 << 20));
        rng
    }

    fn amplitude<R: Rng>(&self, rng: &mut R) -> Complex {
        let (lo, hi) = self.coeff_range;
        let m = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        Complex::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU))
    }

    /// Exponents with consecutive real parts at least `min_gap` apart (rejection sampling).
    pub fn random_lambdas<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<Complex> {
        let [re_lo, re_hi, im_lo, im_hi] = self.exponent_box;
        loop {
            let mut ls: Vec<Complex> = (0..n)
                .map(|_| {
                    let im = if im_lo == im_hi { im_lo } else { rng.gen_range(im_lo..=im_hi) };
                    Complex::new(rng.gen_range(re_lo..=re_hi), im)
                })
                .collect();
            ls.sort_by(|a, b| a.re.total_cmp(&b.re));
            if ls.windows(2).all(|w| w[1].re - w[0].re >= self.min_gap) {
                return ls;
            }
        }
    }

    pub fn random_simple<R: Rng>(&self, rng: &mut R) -> QuasiPolynomial {
        let k = rng.gen_range(self.k_min..=self.k_max);
        let lambdas = self.random_lambdas(rng, k);
        let amps: Vec<Complex> = (0..k).map(|_| self.amplitude(rng)).collect();
        QuasiPolynomial::simple(&lambdas, &amps).expect("generated terms are valid")
    }

    /// Polynomial amplitudes of degree <= 2 with total dimension in `[k_min, k_max]`.
    pub fn random_multiple<R: Rng>(&self, rng: &mut R) -> QuasiPolynomial {
        let k = rng.gen_range(self.k_min..=self.k_max);
        let mut degrees = Vec::new();
        let mut left = k;
        while left > 0 {
            let d = rng.gen_range(0..=left.min(3) - 1);
            degrees.push(d);
            left -= d + 1;
        }
        let lambdas = self.random_lambdas(rng, degrees.len());
        let terms = lambdas
            .into_iter()
            .zip(degrees)
            .map(|(lambda, d)| Term {
                lambda,
                amplitude: Polynomial::new((0..=d).map(|_| self.amplitude(rng)).collect()),
            })
            .collect();
        QuasiPolynomial::new(terms).expect("generated terms are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    Strip = 1,
    Cover = 2,
    Dominance = 3,
    Ky = 4,
}

impl Battery {
    pub const ALL: [Battery; 4] = [Battery::Strip, Battery::Cover, Battery::Dominance, Battery::Ky];

    pub fn parse_list(which: &str) -> Result<Vec<Battery>> {
        match which {
            "all" => Ok(Self::ALL.to_vec()),
            "strip" => Ok(vec![Battery::Strip]),
            "cover" => Ok(vec![Battery::Cover]),
            "dominance" => Ok(vec![Battery::Dominance]),
            "ky" => Ok(vec![Battery::Ky]),
            other => Err(Error::InvalidInput(format!(
                "unknown battery '{other}' (expected all|strip|cover|dominance|ky)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub battery: Battery,
    pub index: usize,
    /// Bound being tested (or the dominance margin).
    pub bound: Option<f64>,
    pub oracle_count: Option<usize>,
    pub cover_ok: Option<bool>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub seed: u64,
    pub cases: Vec<CaseRecord>,
    pub passed: usize,
    pub failed: usize,
    pub pass_rate: f64,
    pub all_passed: bool,
}

impl VerificationResult {
    fn from_cases(seed: u64, cases: Vec<CaseRecord>) -> Self {
        let passed = cases.iter().filter(|c| c.passed).count();
        let failed = cases.len() - passed;
        Self {
            seed,
            pass_rate: if cases.is_empty() { 1.0 } else { passed as f64 / cases.len() as f64 },
            all_passed: failed == 0,
            passed,
            failed,
            cases,
        }
    }
}

/// Worker count from `NONOSC_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a pool honouring `NONOSC_THREADS`.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn run_verification(spec: &RandomSpec, batteries: &[Battery], tol: &Tolerances) -> Result<VerificationResult> {
    spec.validate()?;
    tol.validate()?;
    let jobs: Vec<(Battery, usize)> = batteries
        .iter()
        .flat_map(|&b| (0..spec.count).map(move |i| (b, i)))
        .collect();
    let cases = with_pool(|| {
        jobs.par_iter()
            .map(|&(b, i)| run_case(spec, b, i, tol))
            .collect::<Vec<_>>()
    });
    Ok(VerificationResult::from_cases(spec.seed, cases))
}

pub fn run_case(spec: &RandomSpec, battery: Battery, index: usize, tol: &Tolerances) -> CaseRecord {
    let mut rng = spec.case_rng(battery, index);
    let outcome = match battery {
        Battery::Strip => strip_case(spec, &mut rng, tol),
        Battery::Cover => cover_case(spec, &mut rng, tol),
        Battery::Dominance => dominance_case(spec, &mut rng, tol),
        Battery::Ky => ky_case(spec, &mut rng, tol),
    };
    match outcome {
        Ok(mut rec) => {
            rec.battery = battery;
            rec.index = index;
            rec
        }
        Err(e) => CaseRecord {
            battery,
            index,
            bound: None,
            oracle_count: None,
            cover_ok: None,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn record(bound: Option<f64>, count: Option<usize>, cover_ok: Option<bool>, passed: bool, detail: String) -> CaseRecord {
    CaseRecord {
        battery: Battery::Strip,
        index: 0,
        bound,
        oracle_count: count,
        cover_ok,
        passed,
        detail,
    }
}

/// The truncated strip; zero height is thickened so the contour is a genuine box.
pub fn strip_box(alpha: f64) -> Rect {
    let h = alpha.max(1e-7);
    Rect { u_lo: -STRIP_RADIUS, u_hi: STRIP_RADIUS, v_lo: -h, v_hi: h }
}

fn strip_case(spec: &RandomSpec, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<CaseRecord> {
    let qp = spec.random_simple(rng);
    let bound = strip_bound_simple(&qp, spec.alpha, tol)?;
    let count = count_zeros_rect(&qp, &strip_box(spec.alpha), tol)?.count;
    let ok = count as f64 <= bound.floor();
    Ok(record(Some(bound), Some(count), None, ok, format!("k={} count={count} bound={bound:.4}", qp.dimension())))
}

/// Slack by which gap boxes are shrunk away from the cover's edges.
pub const EDGE_SLACK: f64 = 1e-9;

/// Complement of the cover inside `[-R, R] × [-h, h]`, shrunk by [`EDGE_SLACK`].
pub fn cover_gaps(cover: &BoxCover, h: f64) -> Vec<Rect> {
    let mut left = -STRIP_RADIUS;
    let mut spans = Vec::new();
    for b in &cover.boxes {
        if b.u_lo > left {
            spans.push((left, b.u_lo.min(STRIP_RADIUS)));
        }
        left = left.max(b.u_hi);
    }
    spans.push((left, STRIP_RADIUS));
    spans
        .into_iter()
        .filter(|(lo, hi)| hi - lo > 4.0 * EDGE_SLACK)
        .map(|(lo, hi)| Rect { u_lo: lo + EDGE_SLACK, u_hi: hi - EDGE_SLACK, v_lo: -h, v_hi: h })
        .collect()
}

/// Zeros of `qp` in `[-R, R] × [-α, α]` outside the cover's boxes.
pub fn zeros_outside_cover(qp: &QuasiPolynomial, cover: &BoxCover, alpha: f64, tol: &Tolerances) -> Result<usize> {
    let mut total = 0;
    for gap in cover_gaps(cover, alpha) {
        total += count_zeros_rect(qp, &gap, tol)?.count;
    }
    Ok(total)
}

fn cover_case(spec: &RandomSpec, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<CaseRecord> {
    // Thin strips have no interior to count in; use at least a modest height.
    let alpha = spec.alpha.max(0.1);
    let simple = spec.random_simple(rng);
    let sc = excluded_boxes_simple(&simple, alpha, tol)?;
    let s_out = zeros_outside_cover(&simple, &sc, alpha, tol)?;
    let s_shape = sc.boxes.len() <= sc.count_bound && sc.total_width <= sc.width_bound * (1.0 + 1e-9) + 1e-12;

    let multi = spec.random_multiple(rng);
    let mc = excluded_boxes_multiple(&multi, alpha, tol)?;
    let m_out = zeros_outside_cover(&multi, &mc, alpha, tol)?;
    let m_shape = mc.boxes.len() <= mc.count_bound && mc.total_width <= mc.width_bound * (1.0 + 1e-9) + 1e-12;

    let ok = s_out == 0 && m_out == 0 && s_shape && m_shape;
    Ok(record(
        Some(sc.width_bound),
        Some(s_out + m_out),
        Some(ok),
        ok,
        format!(
            "simple: {} boxes, width {:.4}/{:.4}, outside {s_out}; multiple: {} boxes, width {:.4}/{:.4}, outside {m_out}",
            sc.boxes.len(), sc.total_width, sc.width_bound, mc.boxes.len(), mc.total_width, mc.width_bound
        ),
    ))
}

/// Relative slack on the 2/3 margin for rounding in the term sums.
const MARGIN_SLACK: f64 = 1e-12;

fn dominance_case(spec: &RandomSpec, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<CaseRecord> {
    let qp = spec.random_simple(rng);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..32 {
        let u = rng.gen_range(-10.0..=10.0);
        let gap = gap_dominance_check(&qp, u, tol)?;
        if !gap.holds {
            continue;
        }
        checked += 1;
        worst = worst.max(gap.margin);
        let dom = is_dominant_at(&qp, Complex::new(u, 0.0));
        if dom != Some(gap.central) || gap.margin > 2.0 / 3.0 * (1.0 + MARGIN_SLACK) {
            return Ok(record(
                Some(gap.margin),
                None,
                None,
                false,
                format!("u={u}: central {} dominant {dom:?} margin {}", gap.central, gap.margin),
            ));
        }
    }
    Ok(record(Some(worst), None, None, true, format!("{checked} gap points, worst margin {worst:.6}")))
}

fn ky_case(spec: &RandomSpec, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<CaseRecord> {
    let qp = spec.random_simple(rng);
    let (cu, cv) = (rng.gen_range(-5.0..=5.0), rng.gen_range(-5.0..=5.0));
    let (hw, hh) = (rng.gen_range(0.5..=3.0), rng.gen_range(0.5..=3.0));
    let rect = Rect { u_lo: cu - hw, u_hi: cu + hw, v_lo: cv - hh, v_hi: cv + hh };
    let bound = ky_bound(&qp, rect.diameter())?;
    let count = count_zeros_rect(&qp, &rect, tol)?.count;
    let ok = count as f64 <= bound.floor();
    Ok(record(Some(bound), Some(count), None, ok, format!("count={count} bound={bound:.4}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_respect_spec() {
        let spec = RandomSpec::default();
        let mut rng = spec.case_rng(Battery::Strip, 3);
        for _ in 0..50 {
            let qp = spec.random_simple(&mut rng);
            assert!((1..=4).contains(&qp.dimension()));
            let mut re: Vec<f64> = qp.lambdas().iter().map(|l| l.re).collect();
            re.sort_by(f64::total_cmp);
            assert!(re.windows(2).all(|w| w[1] - w[0] >= 0.3));
            let m = spec.random_multiple(&mut rng);
            assert!((1..=4).contains(&m.dimension()));
        }
    }

    #[test]
    fn case_streams_are_deterministic_and_distinct() {
        let spec = RandomSpec::default();
        let a: f64 = spec.case_rng(Battery::Ky, 5).gen();
        let b: f64 = spec.case_rng(Battery::Ky, 5).gen();
        let c: f64 = spec.case_rng(Battery::Ky, 6).gen();
        let d: f64 = spec.case_rng(Battery::Strip, 5).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn empty_batch_passes() {
        let spec = RandomSpec { count: 0, ..RandomSpec::default() };
        let r = run_verification(&spec, &Battery::ALL, &Tolerances::default()).unwrap();
        assert!(r.all_passed);
        assert_eq!(r.pass_rate, 1.0);
    }

    #[test]
    fn small_batches_pass() {
        let spec = RandomSpec { count: 6, ..RandomSpec::default() };
        let r = run_verification(&spec, &Battery::ALL, &Tolerances::default()).unwrap();
        for c in &r.cases {
            assert!(c.passed, "{c:?}");
        }
    }
}
