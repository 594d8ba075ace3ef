//! Vector estimates for the map `x -> |x|^{p-2} x` on complex n-vectors,
//! with sampling harnesses that report fitted constants for the displays
//! whose constants are unspecified and hard-check the ones with explicit
//! constants. The nodewise kernels here are the same code path the forward
//! solver applies to gradient fields.

use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VecIneqError {
    #[error("H must be symmetric (H^T = H); entry ({0},{1}) differs")]
    NonSymmetricH(usize, usize),
    #[error("exponent p must lie in (1, inf), got {0}")]
    BadExponent(f64),
    #[error("lemma requires p > 2, got {0}")]
    NeedsPGreaterTwo(f64),
}

#[inline]
pub fn norm_slice(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x -> |x|^{p-2} x`, with the `p < 2` singularity at the origin closed
/// by `pmap(0) = 0`.
pub fn pmap(x: &[Complex64], p: f64) -> Vec<Complex64> {
    let w = pmap_weight(norm_slice(x), p, 0.0);
    x.iter().map(|&z| z * w).collect()
}

/// Fixed-size variant used nodewise on gradient fields.
#[inline]
pub fn pmap3(x: [Complex64; 3], p: f64) -> [Complex64; 3] {
    pmap_reg3(x, p, 0.0)
}

/// Regularized variant with weight `(delta^2 + |x|^2)^{(p-2)/2}`;
/// `delta = 0` recovers [`pmap3`] bitwise.
#[inline]
pub fn pmap_reg3(x: [Complex64; 3], p: f64, delta: f64) -> [Complex64; 3] {
    let g2 = x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr();
    let w = pmap_weight(g2.sqrt(), p, delta);
    [x[0] * w, x[1] * w, x[2] * w]
}

/// The scalar weight `((delta^2 + t^2)^{1/2})^{p-2}` with the zero-input
/// convention that makes `t |-> weight * t` continuous at 0.
#[inline]
pub fn pmap_weight(t: f64, p: f64, delta: f64) -> f64 {
    let s2 = delta * delta + t * t;
    if s2 == 0.0 {
        // pmap(0) = 0 for every p; weight 0 keeps 0 * anything = 0 exact
        return 0.0;
    }
    s2.powf(0.5 * (p - 2.0))
}

fn dot_herm(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(&x, &y)| x * y.conj()).sum()
}

/// Seeded sample source for the inequality harnesses. Pair draws mix
/// independent, near-equal and near-collinear vectors to stress the
/// degenerate directions.
pub struct PairSampler {
    rng: SmallRng,
    dim: usize,
    radius: f64,
}

impl PairSampler {
    pub fn new(seed: u64, dim: usize, radius: f64) -> Self {
        Self {
            rng: SmallRng::seed_from_u64(seed),
            dim,
            radius,
        }
    }

    fn vec_in_ball(&mut self) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..self.dim)
                .map(|_| {
                    Complex64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
                })
                .collect();
            if norm_slice(&v) <= 1.0 {
                return v.iter().map(|&z| z * self.radius).collect();
            }
        }
    }

    pub fn pair(&mut self) -> (Vec<Complex64>, Vec<Complex64>) {
        let xi = self.vec_in_ball();
        match self.rng.gen_range(0u8..3) {
            0 => {
                let zeta = self.vec_in_ball();
                (xi, zeta)
            }
            1 => {
                // near-equal
                let t = 10f64.powf(self.rng.gen_range(-8.0..-1.0));
                let d = self.vec_in_ball();
                let zeta: Vec<Complex64> =
                    xi.iter().zip(&d).map(|(&a, &b)| a + b * t).collect();
                (xi, zeta)
            }
            _ => {
                // near-collinear
                let s = self.rng.gen_range(0.0..1.0);
                let t = 10f64.powf(self.rng.gen_range(-8.0..-2.0));
                let d = self.vec_in_ball();
                let zeta: Vec<Complex64> =
                    xi.iter().zip(&d).map(|(&a, &b)| a * s + b * t).collect();
                (xi, zeta)
            }
        }
    }
}

/// Report for the three monotonicity/Lipschitz displays of the map
/// `x -> |x|^{p-2} x`. The first two displays have unspecified constants
/// and are reported as fitted extremes; the third holds with constant
/// exactly `p` and any violation is counted as a hard failure.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaA1Report {
    pub p: f64,
    pub dim: usize,
    pub samples: usize,
    pub skipped: usize,
    pub max_ratio1: f64,
    pub min_ratio2: f64,
    pub max_ratio2: f64,
    pub third_display_violations: usize,
}

pub fn check_lemma_a1(
    p: f64,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<LemmaA1Report, VecIneqError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(VecIneqError::BadExponent(p));
    }
    let mut sampler = PairSampler::new(seed, dim, 1.5);
    let mut report = LemmaA1Report {
        p,
        dim,
        samples,
        skipped: 0,
        max_ratio1: 0.0,
        min_ratio2: f64::INFINITY,
        max_ratio2: 0.0,
        third_display_violations: 0,
    };
    for _ in 0..samples {
        let (xi, zeta) = sampler.pair();
        let nxi = norm_slice(&xi);
        let nzeta = norm_slice(&zeta);
        let diff: Vec<Complex64> = xi.iter().zip(&zeta).map(|(&a, &b)| a - b).collect();
        let ndiff = norm_slice(&diff);
        if ndiff == 0.0 || nxi + nzeta == 0.0 {
            report.skipped += 1;
            continue;
        }
        let pxi = pmap(&xi, p);
        let pzeta = pmap(&zeta, p);
        let pdiff: Vec<Complex64> = pxi.iter().zip(&pzeta).map(|(&a, &b)| a - b).collect();
        let sum_w = (nxi + nzeta).powf(p - 2.0);

        let r1 = norm_slice(&pdiff) / (sum_w * ndiff);
        report.max_ratio1 = report.max_ratio1.max(r1);

        let mono = dot_herm(&pdiff, &diff).re;
        let r2 = mono / (sum_w * ndiff * ndiff);
        report.min_ratio2 = report.min_ratio2.min(r2);
        report.max_ratio2 = report.max_ratio2.max(r2);

        // | |xi|^p - |zeta|^p | <= p (|xi|^{p-1} + |zeta|^{p-1}) |xi - zeta|,
        // constant exactly p; 1e-12 relative guard for rounding only.
        let lhs = (nxi.powf(p) - nzeta.powf(p)).abs();
        let rhs = p * (nxi.powf(p - 1.0) + nzeta.powf(p - 1.0)) * ndiff;
        if lhs > rhs * (1.0 + 1e-12) {
            report.third_display_violations += 1;
        }
    }
    Ok(report)
}

/// Report for the power-difference bound
/// `| |xi|^{p-2} - |zeta|^{p-2} | <= C R^{mu1} |xi - zeta|^{min(p-2,1)}`
/// verified with the explicit constants `C = 2(p-2), mu1 = p-3` for
/// `p >= 3` and `C = 1, mu1 = 0` for `p in (2,3)`. Violations are hard
/// failures.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaA2Report {
    pub p: f64,
    pub radius: f64,
    pub samples: usize,
    pub mu1: f64,
    pub constant: f64,
    pub violations: usize,
    pub max_ratio: f64,
}

pub fn check_lemma_a2(
    p: f64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LemmaA2Report, VecIneqError> {
    if !(p > 2.0) {
        return Err(VecIneqError::NeedsPGreaterTwo(p));
    }
    let (constant, mu1, expo) = if p >= 3.0 {
        (2.0 * (p - 2.0), p - 3.0, 1.0)
    } else {
        (1.0, 0.0, p - 2.0)
    };
    let mut sampler = PairSampler::new(seed, 3, radius);
    let mut report = LemmaA2Report {
        p,
        radius,
        samples,
        mu1,
        constant,
        violations: 0,
        max_ratio: 0.0,
    };
    for _ in 0..samples {
        let (xi, zeta) = sampler.pair();
        let nxi = norm_slice(&xi);
        let nzeta = norm_slice(&zeta);
        let ndiff = norm_slice(
            &xi.iter()
                .zip(&zeta)
                .map(|(&a, &b)| a - b)
                .collect::<Vec<_>>(),
        );
        if ndiff == 0.0 {
            continue;
        }
        let lhs = (nxi.powf(p - 2.0) - nzeta.powf(p - 2.0)).abs();
        let rhs = constant * radius.powf(mu1) * ndiff.powf(expo);
        if rhs > 0.0 {
            report.max_ratio = report.max_ratio.max(lhs / rhs);
        }
        if lhs > rhs * (1.0 + 1e-12) {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// `tr(A H + B conj(H))` for the rank-one difference matrices
/// `A_jk = |xi|^{p-4} xi_j conj(xi_k) - |zeta|^{p-4} zeta_j conj(zeta_k)`,
/// `B_jk = |xi|^{p-4} xi_j xi_k - |zeta|^{p-4} zeta_j zeta_k`.
pub fn trace_ab(
    xi: [Complex64; 3],
    zeta: [Complex64; 3],
    h: [[Complex64; 3]; 3],
    p: f64,
) -> Result<Complex64, VecIneqError> {
    if !(p > 2.0) {
        return Err(VecIneqError::NeedsPGreaterTwo(p));
    }
    for j in 0..3 {
        for k in (j + 1)..3 {
            let scale = h[j][k].norm().max(h[k][j].norm()).max(1.0);
            if (h[j][k] - h[k][j]).norm() > 1e-13 * scale {
                return Err(VecIneqError::NonSymmetricH(j, k));
            }
        }
    }
    let wxi = rank_one_weight(&xi, p);
    let wzeta = rank_one_weight(&zeta, p);
    let mut tr = Complex64::default();
    for j in 0..3 {
        for k in 0..3 {
            let a = wxi * xi[j] * xi[k].conj() - wzeta * zeta[j] * zeta[k].conj();
            let b = wxi * xi[j] * xi[k] - wzeta * zeta[j] * zeta[k];
            // tr(MH) = sum_{jk} M_jk H_kj; H symmetric so H_kj = H_jk
            tr += a * h[j][k] + b * h[j][k].conj();
        }
    }
    Ok(tr)
}

fn rank_one_weight(x: &[Complex64; 3], p: f64) -> f64 {
    let n = (x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr()).sqrt();
    if n == 0.0 {
        0.0
    } else {
        n.powf(p - 4.0)
    }
}

/// Fitted-constant report for the trace estimate
/// `|tr(AH + B conj(H))| <= C R^{3(p-2)/4} ||H|| |xi-zeta|^{min(p-2,1)/4}`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceAbReport {
    pub p: f64,
    pub radius: f64,
    pub samples: usize,
    pub mu2: f64,
    pub max_ratio: f64,
}

pub fn check_trace_ab(
    p: f64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<TraceAbReport, VecIneqError> {
    if !(p > 2.0) {
        return Err(VecIneqError::NeedsPGreaterTwo(p));
    }
    let mu2 = 3.0 * (p - 2.0) / 4.0;
    let expo = 0.25 * (p - 2.0).min(1.0);
    let mut sampler = PairSampler::new(seed, 3, radius);
    let mut hrng = SmallRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut report = TraceAbReport {
        p,
        radius,
        samples,
        mu2,
        max_ratio: 0.0,
    };
    for _ in 0..samples {
        let (xi, zeta) = sampler.pair();
        let xi: [Complex64; 3] = [xi[0], xi[1], xi[2]];
        let zeta: [Complex64; 3] = [zeta[0], zeta[1], zeta[2]];
        let mut h = [[Complex64::default(); 3]; 3];
        let mut hnorm: f64 = 0.0;
        for j in 0..3 {
            for k in j..3 {
                let v = Complex64::new(hrng.gen_range(-1.0..1.0), hrng.gen_range(-1.0..1.0));
                h[j][k] = v;
                h[k][j] = v;
                hnorm = hnorm.max(v.norm());
            }
        }
        let ndiff = norm_slice(
            &xi.iter()
                .zip(zeta.iter())
                .map(|(&a, &b)| a - b)
                .collect::<Vec<_>>(),
        );
        if ndiff == 0.0 || hnorm == 0.0 {
            continue;
        }
        let tr = trace_ab(xi, zeta, h, p)?;
        let bound = radius.powf(mu2) * hnorm * ndiff.powf(expo);
        report.max_ratio = report.max_ratio.max(tr.norm() / bound);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pmap_at_zero_is_zero_for_all_p() {
        for p in [1.2, 1.5, 2.0, 3.0, 4.7] {
            let y = pmap(&[c(0.0, 0.0); 3], p);
            assert!(y.iter().all(|z| z.norm() == 0.0), "p = {p}");
        }
    }

    #[test]
    fn pmap_cubes_a_doubled_basis_vector() {
        // p = 3, x = (2,0,0) -> (4,0,0)
        let y = pmap(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 3.0);
        assert!((y[0] - c(4.0, 0.0)).norm() < 1e-14);
        assert!(y[1].norm() == 0.0 && y[2].norm() == 0.0);
    }

    #[test]
    fn pmap_norm_and_homogeneity() {
        let x = [c(0.3, -1.1), c(0.0, 0.7), c(-2.0, 0.1)];
        for p in [1.5, 2.5, 3.0] {
            let y = pmap(&x, p);
            let nx = norm_slice(&x);
            assert!((norm_slice(&y) - nx.powf(p - 1.0)).abs() < 1e-12 * nx.powf(p - 1.0));
            // positive homogeneity of degree p-1
            let t = 1.7;
            let xs: Vec<Complex64> = x.iter().map(|&z| z * t).collect();
            let ys = pmap(&xs, p);
            for d in 0..3 {
                assert!((ys[d] - y[d] * t.powf(p - 1.0)).norm() < 1e-12 * norm_slice(&ys));
            }
        }
    }

    #[test]
    fn pmap_monotone_on_samples() {
        let mut sampler = PairSampler::new(7, 3, 1.0);
        for _ in 0..2000 {
            let (xi, zeta) = sampler.pair();
            let d: Vec<Complex64> = xi.iter().zip(&zeta).map(|(&a, &b)| a - b).collect();
            if norm_slice(&d) < 1e-14 {
                continue;
            }
            for p in [1.5, 3.0] {
                let pd: Vec<Complex64> = pmap(&xi, p)
                    .iter()
                    .zip(&pmap(&zeta, p))
                    .map(|(&a, &b)| a - b)
                    .collect();
                assert!(dot_herm(&pd, &d).re > 0.0, "p = {p}");
            }
        }
    }

    #[test]
    fn lemma_a1_identity_case_p2() {
        let r = check_lemma_a1(2.0, 3, 5000, 11).unwrap();
        assert!((r.max_ratio1 - 1.0).abs() < 1e-12);
        assert_eq!(r.third_display_violations, 0);
    }

    #[test]
    fn lemma_a1_in_other_dimensions() {
        for dim in [2usize, 4] {
            let r = check_lemma_a1(3.0, dim, 20000, 3).unwrap();
            assert_eq!(r.third_display_violations, 0);
            assert!(r.min_ratio2 > 0.0);
            assert!(r.max_ratio1.is_finite());
        }
    }

    #[test]
    fn lemma_a2_equality_case() {
        // p = 2.5, xi = e1, zeta = 0: lhs = 1 = |xi - zeta|^{1/2}
        let p = 2.5;
        let xi = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let nxi = norm_slice(&xi);
        let lhs = (nxi.powf(p - 2.0) - 0.0f64).abs();
        let rhs = 1.0f64.powf(p - 2.0);
        assert!((lhs - rhs).abs() < 1e-15);
        let r = check_lemma_a2(p, 1.0, 50_000, 5).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn lemma_a2_explicit_constant_p4() {
        let r = check_lemma_a2(4.0, 2.0, 100_000, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn trace_ab_zero_cases() {
        let xi = [c(0.4, 0.2), c(-1.0, 0.0), c(0.0, 0.3)];
        let h = [[c(1.0, 0.0); 3]; 3];
        // xi = zeta -> A = B = 0
        let t = trace_ab(xi, xi, h, 2.5).unwrap();
        assert!(t.norm() < 1e-14);
        // H = 0 -> 0
        let z = [[Complex64::default(); 3]; 3];
        let t = trace_ab(xi, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], z, 2.5).unwrap();
        assert!(t.norm() == 0.0);
    }

    #[test]
    fn trace_ab_rejects_asymmetric_h() {
        let xi = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let mut h = [[Complex64::default(); 3]; 3];
        h[0][1] = c(1.0, 0.0);
        h[1][0] = c(0.0, 1.0);
        assert!(matches!(
            trace_ab(xi, xi, h, 3.0),
            Err(VecIneqError::NonSymmetricH(0, 1))
        ));
    }

    #[test]
    fn trace_ab_vanishes_as_zeta_approaches_xi() {
        // decay exponent at least min(p-2,1)/4 along a shrinking segment
        let p = 2.5;
        let xi = [c(0.8, 0.1), c(-0.2, 0.4), c(0.3, -0.6)];
        let dir = [c(0.1, -0.3), c(0.5, 0.2), c(-0.2, 0.1)];
        let mut h = [[Complex64::default(); 3]; 3];
        for j in 0..3 {
            for k in j..3 {
                let v = c(0.3 * (j as f64 + 1.0), -0.2 * (k as f64 + 1.0));
                h[j][k] = v;
                h[k][j] = v;
            }
        }
        let ts: Vec<f64> = (1..8).map(|k| 2f64.powi(-k)).collect();
        let vals: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let zeta = [xi[0] + dir[0] * t, xi[1] + dir[1] * t, xi[2] + dir[2] * t];
                trace_ab(xi, zeta, h, p).unwrap().norm()
            })
            .collect();
        let fit = crate::fitting::fit_loglog(&ts, &vals).unwrap();
        assert!(
            fit.slope >= 0.25 * (p - 2.0).min(1.0) - 0.05,
            "slope {}",
            fit.slope
        );
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut a = PairSampler::new(42, 3, 1.0);
        let mut b = PairSampler::new(42, 3, 1.0);
        for _ in 0..100 {
            let (x1, z1) = a.pair();
            let (x2, z2) = b.pair();
            assert_eq!(x1, x2);
            assert_eq!(z1, z2);
        }
    }
}
