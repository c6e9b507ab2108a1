//! Built-in verification batteries: closed-form tables of ball
//! pseudovolumes and a suite of structural invariants.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::AngleConfig;
use crate::complex_linalg::random_unitary;
use crate::error::{Error, Result};
use crate::numerics::{gaussian_vector, RandomStream, Tolerance};
use crate::polytope::Polytope;
use crate::pseudovolume::{pseudovolume, valuation_check};
use crate::smooth::{
    ball_pseudovolume, boundary_mixed_pseudovolume, levi_ball_identity, lower_ball_pseudovolume,
    mc_mixed_pseudovolume, mc_pseudovolume, SupportBody,
};
use crate::volumes::{
    alexandroff_check, mixed_discriminant, mixed_discriminant_laplace, mixed_discriminant_permutation,
    MixedDiscriminantInput,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Tables,
    Invariants,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tables" => Ok(Suite::Tables),
            "invariants" => Ok(Suite::Invariants),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: crate::cone::DEFAULT_SAMPLES,
            seed: 42,
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    /// What the expected value stands for.
    pub reference: String,
    pub value: f64,
    pub expected: f64,
    /// Allowed absolute deviation.
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, reference: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        CheckLine {
            name: name.into(),
            reference: reference.into(),
            value,
            expected,
            tolerance,
            passed: (value - expected).abs() <= tolerance,
        }
    }

    /// A line for a boolean property; value and expected are 1 or 0.
    pub fn flag(name: impl Into<String>, reference: impl Into<String>, ok: bool) -> Self {
        CheckLine {
            name: name.into(),
            reference: reference.into(),
            value: if ok { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            passed: ok,
        }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<44} value={:.10} expected={:.10} tol={:.2e} [{}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.expected,
            self.tolerance,
            self.reference
        )
    }
}

/// Closed forms of `P_n(B_{2n})`, `n = 1..10`, as `(rational, power of π)`.
pub const BALL_TABLE: [(f64, i32); 10] = [
    (1.0, 1),
    (2.0, 1),
    (1.0, 2),
    (4.0 / 3.0, 2),
    (1.0 / 2.0, 3),
    (8.0 / 15.0, 3),
    (1.0 / 6.0, 4),
    (16.0 / 105.0, 4),
    (1.0 / 24.0, 5),
    (32.0 / 945.0, 5),
];

/// Closed forms of `P_n(B_{2n-1})`, `n = 1..10`.
pub const LOWER_BALL_TABLE: [(f64, i32); 10] = [
    (2.0, 0),
    (4.0 / 3.0, 1),
    (32.0 / 15.0, 1),
    (32.0 / 35.0, 2),
    (1024.0 / 945.0, 2),
    (256.0 / 693.0, 3),
    (16384.0 / 45045.0, 3),
    (2048.0 / 19305.0, 4),
    (1048576.0 / 11486475.0, 4),
    (16384.0 / 692835.0, 5),
];

pub fn table_value(entry: (f64, i32)) -> f64 {
    entry.0 * PI.powi(entry.1)
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<Vec<CheckLine>> {
    match suite {
        Suite::Tables => tables(config),
        Suite::Invariants => invariants(config),
    }
}

fn tables(config: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for n in 1..=10 {
        let want = table_value(BALL_TABLE[n - 1]);
        out.push(CheckLine::new(format!("P_{n}(B_{}) closed form", 2 * n), "ball table", ball_pseudovolume(n), want, 1e-12 * want));
    }
    for n in 1..=10 {
        let want = table_value(LOWER_BALL_TABLE[n - 1]);
        out.push(CheckLine::new(
            format!("P_{n}(B_{}) closed form", 2 * n - 1),
            "hyperplane ball table",
            lower_ball_pseudovolume(n),
            want,
            1e-12 * want,
        ));
        out.push(CheckLine::flag(
            format!("P_{n}(B_{}) < P_{n}(B_{})", 2 * n - 1, 2 * n),
            "strict monotonicity in the body",
            lower_ball_pseudovolume(n) < ball_pseudovolume(n),
        ));
    }
    for n in 1..=3 {
        let r = mc_pseudovolume(&SupportBody::ball(n)?, config.samples, RandomStream::new(config.seed, 100 + n as u64))?;
        let want = ball_pseudovolume(n);
        out.push(CheckLine::new(format!("P_{n}(B_{}) Monte Carlo", 2 * n), "ball table", r.value, want, 3.0 * r.std_error + 1e-9 * want));
    }
    for n in 2..=3 {
        let r = mc_pseudovolume(&SupportBody::lower_ball(n)?, config.samples, RandomStream::new(config.seed, 200 + n as u64))?;
        let want = lower_ball_pseudovolume(n);
        out.push(CheckLine::new(
            format!("P_{n}(B_{}) Monte Carlo", 2 * n - 1),
            "hyperplane ball table",
            r.value,
            want,
            3.0 * r.std_error,
        ));
    }
    let b4 = SupportBody::ball(2)?;
    let b3 = SupportBody::lower_ball(2)?;
    let stated = 248.0 / 45.0;
    let interior = mc_mixed_pseudovolume(&[&b4, &b3], config.samples, RandomStream::new(config.seed, 300))?;
    let boundary = boundary_mixed_pseudovolume(&[&b4, &b3], config.samples, RandomStream::new(config.seed, 301))?;
    out.push(CheckLine::new("Q_2(B_4,B_3) interior quadrature", "stated value 248/45", interior.value, stated, 0.01 * stated));
    out.push(CheckLine::new("Q_2(B_4,B_3) boundary quadrature", "stated value 248/45", boundary.value, stated, 0.01 * stated));
    out.push(CheckLine::new(
        "Q_2(B_4,B_3) interior vs boundary",
        "two integral formulas",
        interior.value - boundary.value,
        0.0,
        4.0 * interior.std_error.hypot(boundary.std_error),
    ));
    for n in [1, 3, 7] {
        let (l, r) = levi_ball_identity(n);
        out.push(CheckLine::new(format!("Levi identity n={n}"), "Levi curvature of the sphere is 1", l, r, 1e-12 * l));
    }
    Ok(out)
}

/// `count` standard Gaussian points in `R^{2n}`, restricted to the first
/// `dim` real coordinates after a random rotation when `dim < 2n`.
pub fn random_polytope(n: usize, dim: usize, count: usize, stream: RandomStream, tol: &Tolerance) -> Result<Polytope> {
    let mut rng = stream.chunk_rng(0);
    let frame: Vec<Vec<f64>> = (0..dim).map(|_| gaussian_vector(&mut rng, 2 * n)).collect();
    let pts: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let c = gaussian_vector(&mut rng, dim);
            let mut p = vec![0.0; 2 * n];
            for (ci, f) in c.iter().zip(&frame) {
                p.iter_mut().zip(f).for_each(|(a, b)| *a += ci * b);
            }
            p
        })
        .collect();
    Polytope::hull(n, &pts, tol)
}

/// Random matrix with standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        let g = gaussian_vector(rng, 2);
        Complex64::new(g[0], g[1])
    })
}

/// Random positive definite Hermitian matrix `A A^* + I/10`.
pub fn random_positive_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = random_complex_matrix(rng, n);
    &a * a.adjoint() + DMatrix::identity(n, n) * Complex64::new(0.1, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn invariants(config: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let tol = Tolerance::default();
    let mut out = Vec::new();
    let angles = AngleConfig::new(config.samples, config.seed);
    for i in 0..3u64 {
        let p = random_polytope(2, 4, 7, RandomStream::new(config.seed, 400 + i), &tol)?;
        let mut rng = RandomStream::new(config.seed, 410 + i).chunk_rng(0);
        let u = crate::numerics::unit_vector(&mut rng, 4);
        let c = 0.3 * (rng.random::<f64>() - 0.5);
        let v = valuation_check(&p, &u, c, &angles.for_body(i))?;
        let scale = v.terms.iter().map(|t| t.value.abs()).fold(1.0, f64::max);
        out.push(CheckLine::new(
            format!("valuation residual #{i}"),
            "P(P+) + P(P-) = P(P) + P(P0)",
            v.residual,
            0.0,
            4.0 * v.combined_std_error + 1e-9 * scale,
        ));
    }
    let p = random_polytope(2, 4, 6, RandomStream::new(config.seed, 420), &tol)?;
    let base = pseudovolume(&p, &angles.for_body(20))?.estimate();
    let scaled = pseudovolume(&p.scale(1.7)?, &angles.for_body(21))?.estimate();
    out.push(CheckLine::new(
        "homogeneity P(1.7 K) = 1.7^2 P(K)",
        "degree n homogeneity",
        scaled.value,
        1.7f64.powi(2) * base.value,
        4.0 * scaled.std_error.hypot(1.7f64.powi(2) * base.std_error) + 1e-9 * scaled.value.abs(),
    ));
    let u = random_unitary(2, RandomStream::new(config.seed, 422))?;
    let rotated = pseudovolume(&p.apply_complex(&u)?, &angles.for_body(22))?.estimate();
    out.push(CheckLine::new(
        "unitary invariance",
        "unitary invariance",
        rotated.value,
        base.value,
        4.0 * rotated.std_error.hypot(base.std_error) + 1e-9 * base.value.abs(),
    ));
    let square = Polytope::hull(1, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]], &tol)?;
    let sq = pseudovolume(&square, &angles)?;
    out.push(CheckLine::new("P_1(conv{1,i,-1,-i})", "half the perimeter", sq.value, 2.0 * SQRT_2, 1e-9));
    let mut rng = RandomStream::new(config.seed, 430).chunk_rng(0);
    let mut worst_perm = 0.0f64;
    let mut worst_lap = 0.0f64;
    let mut alexandroff = true;
    for n in [3usize, 4] {
        for _ in 0..10 {
            let ms: Vec<DMatrix<Complex64>> = (0..n).map(|_| random_complex_matrix(&mut rng, n)).collect();
            let input = MixedDiscriminantInput::new(ms.clone())?;
            let d = mixed_discriminant(&input)?;
            let mut rev = ms.clone();
            rev.reverse();
            worst_perm = worst_perm.max(rel(d, mixed_discriminant(&MixedDiscriminantInput::new(rev)?)?));
            worst_lap = worst_lap.max(rel(mixed_discriminant_laplace(&input), mixed_discriminant_permutation(&input)?));
            let m = random_positive_hermitian(&mut rng, n);
            let nn = {
                let a = random_complex_matrix(&mut rng, n);
                (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
            };
            let rest: Vec<_> = (2..n).map(|_| random_positive_hermitian(&mut rng, n)).collect();
            alexandroff &= alexandroff_check(&m, &nn, &rest)?.holds;
        }
    }
    out.push(CheckLine::new("mixed discriminant symmetry", "permutation symmetry", worst_perm, 0.0, 1e-9));
    out.push(CheckLine::new("Laplace path vs permutation path", "mixed minor expansion", worst_lap, 0.0, 1e-10));
    out.push(CheckLine::flag("Alexandroff inequality", "D(M,N,..)^2 >= D(M,M,..) D(N,N,..)", alexandroff));
    Ok(out)
}
