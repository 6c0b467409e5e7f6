//! Simultaneous root finding (Aberth–Ehrlich) with multiplicity clustering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Complex, Polynomial};
use crate::tolerances::Tolerances;

const MAX_ITERATIONS: usize = 800;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub location: Complex,
    pub multiplicity: usize,
}

/// Distinct roots with multiplicities, sorted by real part then imaginary part.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootSet {
    pub entries: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|r| r.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn locations(&self) -> impl Iterator<Item = Complex> + '_ {
        self.entries.iter().map(|r| r.location)
    }

    /// Every root repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<Complex> {
        self.entries
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity))
            .collect()
    }

    fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            a.location
                .re
                .total_cmp(&b.location.re)
                .then(a.location.im.total_cmp(&b.location.im))
        });
    }
}

/// Radius inside which `m` computed roots are accepted as one root of multiplicity `m`.
///
/// A root of multiplicity `m` is only determined to about `eps^(1/m)` in double precision,
/// so the configured radius is widened accordingly for `m >= 2`.
pub fn cluster_radius_for(multiplicity: usize, center: Complex, tol: &Tolerances) -> f64 {
    if multiplicity <= 1 {
        return tol.cluster_radius;
    }
    let intrinsic = 8.0 * f64::EPSILON.powf(1.0 / multiplicity as f64) * center.norm().max(1.0);
    tol.cluster_radius.max(intrinsic)
}

/// Multiplicity of `point` as a root of `p`, read off the Taylor coefficients at `point`.
///
/// Leading Taylor coefficients below `cluster_radius` relative to the largest one count as
/// vanishing. The zero polynomial reports `usize::MAX`.
pub fn multiplicity_at(p: &Polynomial, point: Complex, tol: &Tolerances) -> usize {
    if p.is_zero() {
        return usize::MAX;
    }
    let shifted = p.taylor_shift(point);
    let scale = shifted.scale();
    shifted
        .coeffs()
        .iter()
        .take_while(|c| c.norm() <= tol.cluster_radius * scale)
        .count()
}

/// All roots of `p`, clustered into distinct locations with multiplicities.
pub fn poly_roots(p: &Polynomial, tol: &Tolerances) -> Result<RootSet> {
    let Some(degree) = p.degree() else {
        return Err(Error::InvalidInput(
            "cannot find roots of the zero polynomial".into(),
        ));
    };
    let mut set = RootSet::default();
    if degree == 0 {
        return Ok(set);
    }
    let zeros_at_origin = p.valuation();
    let q = p.shift_down(zeros_at_origin);
    if zeros_at_origin > 0 {
        set.entries.push(Root {
            location: Complex::new(0.0, 0.0),
            multiplicity: zeros_at_origin,
        });
    }
    let raw = match q.degree().unwrap_or(0) {
        0 => Vec::new(),
        1 => vec![-q.coeffs()[0] / q.coeffs()[1]],
        _ => aberth(&q)?,
    };
    for root in cluster(&q, raw, tol) {
        set.entries.push(root);
    }
    for root in &set.entries {
        let r = root.location;
        let residual = p.eval(r).norm();
        let allowed = tol.root_tol * p.scale() * r.norm().max(1.0).powi(degree as i32);
        if !(residual <= allowed) {
            return Err(Error::NonConvergence {
                iterations: MAX_ITERATIONS,
            });
        }
    }
    set.sort();
    Ok(set)
}

/// Roots common to every nonzero polynomial of the list, with the minimum multiplicity.
pub fn common_roots(ps: &[Polynomial], tol: &Tolerances) -> Result<RootSet> {
    let nonzero: Vec<&Polynomial> = ps.iter().filter(|p| !p.is_zero()).collect();
    let Some(pivot) = nonzero
        .iter()
        .min_by_key(|p| p.degree().unwrap_or(0))
        .copied()
    else {
        return Err(Error::InvalidInput(
            "common roots of an empty or all-zero list".into(),
        ));
    };
    let mut out = RootSet::default();
    for root in poly_roots(pivot, tol)?.entries {
        let shared = nonzero
            .iter()
            .map(|q| multiplicity_at(q, root.location, tol))
            .min()
            .unwrap_or(0)
            .min(root.multiplicity);
        if shared > 0 {
            out.entries.push(Root {
                location: root.location,
                multiplicity: shared,
            });
        }
    }
    Ok(out)
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex>> {
    let n = p.degree().expect("nonzero");
    let lead = p.leading().expect("nonzero");
    let monic: Polynomial = p.scaled(lead.inv());
    let c = monic.coeffs();
    // Start on a circle whose radius is the geometric mean of the root moduli.
    let radius = c[0].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex> = (0..n)
        .map(|i| Complex::from_polar(radius, std::f64::consts::TAU * i as f64 / n as f64 + 0.4))
        .collect();
    let abs_coeffs = Polynomial::new(c.iter().map(|a| Complex::new(a.norm(), 0.0)).collect());
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (value, slope) = monic.eval_with_derivative(z[i]);
            // Rounding-level residual: nothing more can be learned at this point.
            let noise = 4.0 * f64::EPSILON * abs_coeffs.eval(Complex::new(z[i].norm(), 0.0)).re;
            if value.norm() <= noise {
                done[i] = true;
                continue;
            }
            let newton = value / slope;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = newton / (Complex::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Coincident iterates; separate them slightly.
                z[i] += Complex::new(1e-8, 1e-8) * radius.max(1.0);
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|d| *d) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Greedy clustering of approximate roots, largest admissible cluster first.
///
/// A group of `m` iterates is merged when its spread about the centroid fits inside
/// [`cluster_radius_for`] at multiplicity `m`.
fn cluster(p: &Polynomial, raw: Vec<Complex>, tol: &Tolerances) -> Vec<Root> {
    let mut free: Vec<usize> = (0..raw.len()).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    loop {
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for &i in &free {
            let mut by_distance = free.clone();
            by_distance.sort_by(|&a, &b| (raw[a] - raw[i]).norm().total_cmp(&(raw[b] - raw[i]).norm()));
            for m in (2..=by_distance.len()).rev() {
                if best.as_ref().is_some_and(|(bm, _, _)| *bm > m) {
                    break;
                }
                let members = &by_distance[..m];
                let center = centroid(&raw, members);
                let spread = members
                    .iter()
                    .map(|&k| (raw[k] - center).norm())
                    .fold(0.0, f64::max);
                if spread <= cluster_radius_for(m, center, tol) {
                    let better = match &best {
                        None => true,
                        Some((bm, bs, _)) => m > *bm || (m == *bm && spread < *bs),
                    };
                    if better {
                        best = Some((m, spread, members.to_vec()));
                    }
                    break;
                }
            }
        }
        match best {
            Some((_, _, members)) => {
                free.retain(|k| !members.contains(k));
                groups.push(members);
            }
            None => break,
        }
    }
    groups.extend(free.into_iter().map(|k| vec![k]));
    groups
        .into_iter()
        .map(|g| {
            let center = centroid(&raw, &g);
            Root {
                location: polish(p, center, g.len()),
                multiplicity: g.len(),
            }
        })
        .collect()
}

fn centroid(raw: &[Complex], members: &[usize]) -> Complex {
    members.iter().map(|&m| raw[m]).sum::<Complex>() / members.len() as f64
}

/// Newton on the `(m-1)`-th derivative, where an `m`-fold root is simple.
fn polish(p: &Polynomial, start: Complex, multiplicity: usize) -> Complex {
    let target = (1..multiplicity).fold(p.clone(), |q, _| q.derivative());
    let step_cap = 1e-3 * start.norm().max(1.0);
    let mut z = start;
    let mut best = (target.eval(z).norm(), z);
    for _ in 0..8 {
        let (value, slope) = target.eval_with_derivative(z);
        if slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        if !(step.norm() < step_cap) {
            break;
        }
        z -= step;
        let residual = target.eval(z).norm();
        if residual < best.0 {
            best = (residual, z);
        } else {
            break;
        }
    }
    best.1
}
