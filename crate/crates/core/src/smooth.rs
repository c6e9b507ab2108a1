//! Smooth convex bodies given by support functions, and their (mixed)
//! pseudovolumes through the complex Monge-Ampère operator.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex_linalg::{norm, to_complex};
use crate::error::{Error, Result};
use crate::numerics::{factorial, gamma, kappa, mean_and_std_error, sphere_area, unit_vector, RandomStream};
use crate::volumes::{mixed_discriminant, MixedDiscriminantInput};

pub type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Returns the matrix `(d^2 h / dz_l dzbar_k)_{l,k}`.
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<Complex64>> + Send + Sync>;
/// Returns the row `(dh/dz_1, ..., dh/dz_n)`.
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Complex64>> + Send + Sync>;

/// Points closer to the origin than this are rejected by derivative routines.
pub const SINGULAR_RADIUS: f64 = 1e-8;
/// Relative step of the central finite differences.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    /// Unit ball of `C^n`.
    Ball2n,
    /// Unit ball of the real hyperplane `{Re z_1 = 0}`.
    Ball2nMinus1,
    Ellipsoid,
    Custom,
}

/// A convex body in `C^n` described by its support function on `R^{2n}`,
/// coordinates ordered `(Re z_1, Im z_1, Re z_2, ...)`.
#[derive(Clone)]
pub struct SupportBody {
    pub ambient_n: usize,
    pub kind: BodyKind,
    h: SupportFn,
    hessian: Option<HessianFn>,
    gradient: Option<GradientFn>,
}

impl fmt::Debug for SupportBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportBody")
            .field("ambient_n", &self.ambient_n)
            .field("kind", &self.kind)
            .field("analytic_hessian", &self.hessian.is_some())
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("ambient dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_point(n: usize, x: &[f64]) -> Result<f64> {
    if x.len() != 2 * n {
        return Err(Error::AmbientMismatch {
            expected: 2 * n,
            found: x.len(),
        });
    }
    let r = norm(x);
    if !(r >= SINGULAR_RADIUS) {
        return Err(Error::SingularPoint);
    }
    Ok(r)
}

/// `d_{z_l} d_{zbar_k}` assembled from a real `2n x 2n` Hessian.
fn complex_from_real_hessian(r: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = r.nrows() / 2;
    DMatrix::from_fn(n, n, |l, k| {
        let (xl, yl, xk, yk) = (2 * l, 2 * l + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            0.25 * (r[(xl, xk)] + r[(yl, yk)]),
            0.25 * (r[(xl, yk)] - r[(yl, xk)]),
        )
    })
}

/// `dh/dz_k = (dh/dx_k - i dh/dy_k) / 2` from a real gradient.
fn complex_from_real_gradient(g: &[f64]) -> Vec<Complex64> {
    g.chunks(2).map(|c| Complex64::new(0.5 * c[0], -0.5 * c[1])).collect()
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

impl SupportBody {
    /// The unit ball `B_{2n}`, `h(z) = |z|`.
    pub fn ball(n: usize) -> Result<Self> {
        check_n(n)?;
        let hessian: HessianFn = Arc::new(move |x: &[f64]| {
            let r = check_point(n, x)?;
            let z = to_complex(x);
            let c = 4.0 * r * r * r;
            Ok(DMatrix::from_fn(n, n, |l, k| {
                let d = if l == k { 2.0 * r * r } else { 0.0 };
                (Complex64::new(d, 0.0) - z[k] * z[l].conj()) / c
            }))
        });
        let gradient: GradientFn = Arc::new(move |x: &[f64]| {
            let r = check_point(n, x)?;
            Ok(to_complex(x).iter().map(|z| z.conj() / (2.0 * r)).collect())
        });
        Ok(SupportBody {
            ambient_n: n,
            kind: BodyKind::Ball2n,
            h: Arc::new(|x: &[f64]| norm(x)),
            hessian: Some(hessian),
            gradient: Some(gradient),
        })
    }

    /// The unit ball `B_{2n-1}` of the hyperplane `Re z_1 = 0`, with
    /// `h(z) = sqrt((Im z_1)^2 + sum_{l>=2} |z_l|^2)`.
    pub fn lower_ball(n: usize) -> Result<Self> {
        check_n(n)?;
        fn lower_h(x: &[f64]) -> f64 {
            (x[1] * x[1] + x[2..].iter().map(|v| v * v).sum::<f64>()).sqrt()
        }
        fn nonsingular(n: usize, x: &[f64]) -> Result<f64> {
            let r = check_point(n, x)?;
            let h = lower_h(x);
            if !(h > 1e-100 * r) || !(h * h * h).is_normal() {
                return Err(Error::SingularPoint);
            }
            Ok(h)
        }
        let hessian: HessianFn = Arc::new(move |x: &[f64]| {
            let h = nonsingular(n, x)?;
            let z = to_complex(x);
            let s = x[1];
            let tail: f64 = z[1..].iter().map(|w| w.norm_sqr()).sum();
            let c = 4.0 * h * h * h;
            let i = Complex64::new(0.0, 1.0);
            Ok(DMatrix::from_fn(n, n, |l, k| match (l, k) {
                (0, 0) => Complex64::new(tail / c, 0.0),
                (l, 0) => -i * s * z[l].conj() / c,
                (0, k) => i * s * z[k] / c,
                (l, k) => {
                    let d = if l == k { 2.0 * h * h } else { 0.0 };
                    (Complex64::new(d, 0.0) - z[k] * z[l].conj()) / c
                }
            }))
        });
        let gradient: GradientFn = Arc::new(move |x: &[f64]| {
            let h = nonsingular(n, x)?;
            let z = to_complex(x);
            let mut g = Vec::with_capacity(n);
            g.push(Complex64::new(0.0, -x[1] / (2.0 * h)));
            g.extend(z[1..].iter().map(|w| w.conj() / (2.0 * h)));
            Ok(g)
        });
        Ok(SupportBody {
            ambient_n: n,
            kind: BodyKind::Ball2nMinus1,
            h: Arc::new(lower_h),
            hessian: Some(hessian),
            gradient: Some(gradient),
        })
    }

    /// Ellipsoid with support function `h(x) = sqrt(x^T Q x)` for a symmetric
    /// positive definite real `2n x 2n` matrix `Q`.
    pub fn ellipsoid(n: usize, q: DMatrix<f64>) -> Result<Self> {
        check_n(n)?;
        if q.shape() != (2 * n, 2 * n) {
            return Err(Error::SizeMismatch(format!(
                "ellipsoid matrix must be {0}x{0}, found {1:?}",
                2 * n,
                q.shape()
            )));
        }
        let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if q.iter().any(|v| !v.is_finite()) || (&q - q.transpose()).amax() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidArgument("ellipsoid matrix must be finite and symmetric".into()));
        }
        let q = (&q + q.transpose()) * 0.5;
        if q.clone().cholesky().is_none() {
            return Err(Error::InvalidArgument("ellipsoid matrix must be positive definite".into()));
        }
        let q = Arc::new(q);
        let qa = Arc::clone(&q);
        let h: SupportFn = Arc::new(move |x: &[f64]| {
            let v = nalgebra::DVector::from_column_slice(x);
            (v.dot(&(&*qa * &v))).max(0.0).sqrt()
        });
        let qb = Arc::clone(&q);
        let hessian: HessianFn = Arc::new(move |x: &[f64]| {
            check_point(n, x)?;
            let v = nalgebra::DVector::from_column_slice(x);
            let qx = &*qb * &v;
            let h = v.dot(&qx).sqrt();
            let real = (&*qb - &qx * qx.transpose() / (h * h)) / h;
            Ok(complex_from_real_hessian(&real))
        });
        let qc = Arc::clone(&q);
        let gradient: GradientFn = Arc::new(move |x: &[f64]| {
            check_point(n, x)?;
            let v = nalgebra::DVector::from_column_slice(x);
            let qx = &*qc * &v;
            let h = v.dot(&qx).sqrt();
            let g: Vec<f64> = qx.iter().map(|c| c / h).collect();
            Ok(complex_from_real_gradient(&g))
        });
        Ok(SupportBody {
            ambient_n: n,
            kind: BodyKind::Ellipsoid,
            h,
            hessian: Some(hessian),
            gradient: Some(gradient),
        })
    }

    /// Image `A(B_{2n})` of the unit ball under an invertible real map.
    pub fn ellipsoid_image(n: usize, a: &DMatrix<f64>) -> Result<Self> {
        Self::ellipsoid(n, a * a.transpose())
    }

    /// A body known only through its support function. Derivatives are
    /// taken by central finite differences unless supplied.
    pub fn custom<F>(n: usize, h: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_n(n)?;
        Ok(SupportBody {
            ambient_n: n,
            kind: BodyKind::Custom,
            h: Arc::new(h),
            hessian: None,
            gradient: None,
        })
    }

    /// The single point `{p}`, `h(x) = <x, p>`.
    pub fn point(n: usize, p: &[f64]) -> Result<Self> {
        check_n(n)?;
        if p.len() != 2 * n {
            return Err(Error::AmbientMismatch {
                expected: 2 * n,
                found: p.len(),
            });
        }
        let pv = p.to_vec();
        let grad = complex_from_real_gradient(p);
        let body = Self::custom(n, move |x: &[f64]| x.iter().zip(&pv).map(|(a, b)| a * b).sum())?;
        Ok(body
            .with_hessian(move |_x: &[f64]| Ok(DMatrix::zeros(n, n)))
            .with_gradient(move |_x: &[f64]| Ok(grad.clone())))
    }

    pub fn with_hessian<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DMatrix<Complex64>> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(f));
        self
    }

    pub fn with_gradient<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(f));
        self
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        (self.h)(x)
    }

    /// Complex Hessian `(d^2 h / dz_l dzbar_k)`, always Hermitian.
    pub fn complex_hessian(&self, x: &[f64]) -> Result<DMatrix<Complex64>> {
        check_point(self.ambient_n, x)?;
        match &self.hessian {
            Some(f) => f(x),
            None => self.complex_hessian_fd(x),
        }
    }

    /// Finite-difference complex Hessian, available for every body.
    pub fn complex_hessian_fd(&self, x: &[f64]) -> Result<DMatrix<Complex64>> {
        let r = check_point(self.ambient_n, x)?;
        let d = x.len();
        let step = FD_STEP * r;
        let mut y = x.to_vec();
        let mut eval = |shifts: &[(usize, f64)]| {
            y.copy_from_slice(x);
            for &(i, s) in shifts {
                y[i] += s;
            }
            (self.h)(&y)
        };
        let h0 = eval(&[]);
        let mut real = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            let v = eval(&[(i, step)]) - 2.0 * h0 + eval(&[(i, -step)]);
            real[(i, i)] = v / (step * step);
            for j in 0..i {
                let v = eval(&[(i, step), (j, step)]) - eval(&[(i, step), (j, -step)])
                    - eval(&[(i, -step), (j, step)])
                    + eval(&[(i, -step), (j, -step)]);
                real[(i, j)] = v / (4.0 * step * step);
                real[(j, i)] = real[(i, j)];
            }
        }
        if real.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIntegrand);
        }
        Ok(hermitize(complex_from_real_hessian(&real)))
    }

    /// The row `(dh/dz_1, ..., dh/dz_n)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let r = check_point(self.ambient_n, x)?;
        if let Some(f) = &self.gradient {
            return f(x);
        }
        let step = FD_STEP * r;
        let mut y = x.to_vec();
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            y[i] = x[i] + step;
            let a = (self.h)(&y);
            y[i] = x[i] - step;
            let b = (self.h)(&y);
            y[i] = x[i];
            g[i] = (a - b) / (2.0 * step);
        }
        Ok(complex_from_real_gradient(&g))
    }

    /// Largest relative defect of `h(λx) = λ h(x)` for `λ ∈ {0.5, 2}` over
    /// sampled directions.
    pub fn homogeneity_defect(&self, samples: usize, stream: RandomStream) -> f64 {
        let dim = 2 * self.ambient_n;
        let mut rng = stream.chunk_rng(0);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = unit_vector(&mut rng, dim);
            let h = self.support(&x);
            for lambda in [0.5, 2.0] {
                let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                let d = (self.support(&y) - lambda * h).abs() / (lambda * h.abs()).max(1e-300);
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest violation of `h(x + y) <= h(x) + h(y)` over sampled pairs.
    pub fn subadditivity_violation(&self, samples: usize, stream: RandomStream) -> f64 {
        let dim = 2 * self.ambient_n;
        let mut rng = stream.chunk_rng(0);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = unit_vector(&mut rng, dim);
            let y: Vec<f64> = unit_vector(&mut rng, dim).iter().map(|v| v * rng.random::<f64>() * 3.0).collect();
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            worst = worst.max(self.support(&s) - self.support(&x) - self.support(&y));
        }
        worst
    }
}

/// A Monte Carlo quadrature value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Largest imaginary part seen in a sampled mixed discriminant.
    pub max_imaginary: f64,
}

/// `P_n(B_{2n}) = 2^n κ_{2n} / κ_n`.
pub fn ball_pseudovolume(n: usize) -> f64 {
    2f64.powi(n as i32) * kappa(2 * n) / kappa(n)
}

/// `P_n(B_{2n-1})`: 2 for `n = 1`, otherwise
/// `2^{n-2} Γ(1/2)^n Γ((n-1)/2) (n-1) / Γ(n + 1/2)`.
pub fn lower_ball_pseudovolume(n: usize) -> f64 {
    if n <= 1 {
        return 2.0;
    }
    let nf = n as f64;
    2f64.powi(n as i32 - 2) * PI.sqrt().powi(n as i32) * gamma((nf - 1.0) / 2.0) * (nf - 1.0) / gamma(nf + 0.5)
}

/// Both sides of the Levi-form identity for the unit ball, whose boundary
/// has Levi curvature identically 1: `P_n(B_{2n})` and
/// `2^{n-1} (n-1)! / (n! κ_n) · area(S^{2n-1})`.
pub fn levi_ball_identity(n: usize) -> (f64, f64) {
    let lhs = ball_pseudovolume(n);
    let rhs = 2f64.powi(n as i32 - 1) * factorial(n - 1) / (factorial(n) * kappa(n)) * sphere_area(2 * n);
    (lhs, rhs)
}

/// Direction sampler on `S^{2n-1}`. `Poles` mixes the uniform law half and
/// half with a law concentrated like `cos θ / sin^n θ` around `±e_1`, where
/// `θ` is the angle to the nearer pole. Returns the point and the weight
/// `uniform density / sampling density`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sampler {
    Uniform,
    Poles,
}

impl Sampler {
    fn for_bodies(n: usize, bodies: &[&SupportBody]) -> Sampler {
        if n >= 2 && bodies.iter().any(|b| b.kind == BodyKind::Ball2nMinus1) {
            Sampler::Poles
        } else {
            Sampler::Uniform
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> (Vec<f64>, f64) {
        let dim = 2 * n;
        if *self == Sampler::Uniform {
            return (unit_vector(rng, dim), 1.0);
        }
        let x = if rng.random::<bool>() {
            unit_vector(rng, dim)
        } else {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let u = 1.0 - rng.random::<f64>();
            let t = u.powf(1.0 / (n as f64 - 1.0));
            let c = (1.0 - t * t).max(0.0).sqrt();
            let w = unit_vector(rng, dim - 1);
            let mut x = Vec::with_capacity(dim);
            x.push(sign * c);
            x.extend(w.iter().map(|v| v * t));
            x
        };
        let c = x[0].abs();
        let s2 = (1.0 - c * c).max(0.0);
        let p = 1.0 / sphere_area(dim);
        let q = (n as f64 - 1.0) * c / (2.0 * sphere_area(dim - 1) * s2.powf(n as f64 / 2.0));
        let weight = if q.is_finite() { 2.0 * p / (p + q) } else { 0.0 };
        (x, weight)
    }
}

struct Moments {
    sum: f64,
    sum_sq: f64,
    max_imag: f64,
}

/// Mean of `f(θ)·weight` over `samples` directions.
fn sphere_mean<F>(n: usize, samples: usize, stream: RandomStream, sampler: Sampler, f: F) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let chunks = stream.map_chunks(samples, |rng, _, count| -> Result<Moments> {
        let mut m = Moments {
            sum: 0.0,
            sum_sq: 0.0,
            max_imag: 0.0,
        };
        for _ in 0..count {
            let (x, w) = sampler.draw(rng, n);
            if w == 0.0 {
                continue;
            }
            let v = f(&x)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteIntegrand);
            }
            m.max_imag = m.max_imag.max(v.im.abs());
            let y = v.re * w;
            m.sum += y;
            m.sum_sq += y * y;
        }
        Ok(m)
    });
    let mut total = Moments {
        sum: 0.0,
        sum_sq: 0.0,
        max_imag: 0.0,
    };
    for c in chunks {
        let c = c?;
        total.sum += c.sum;
        total.sum_sq += c.sum_sq;
        total.max_imag = total.max_imag.max(c.max_imag);
    }
    let (mean, se) = mean_and_std_error(total.sum, total.sum_sq, samples);
    Ok(QuadratureResult {
        value: mean,
        std_error: se,
        samples,
        max_imaginary: total.max_imag,
    })
}

fn scaled(r: QuadratureResult, c: f64) -> QuadratureResult {
    QuadratureResult {
        value: r.value * c,
        std_error: r.std_error * c.abs(),
        ..r
    }
}

fn check_bodies(bodies: &[&SupportBody]) -> Result<usize> {
    let n = bodies.first().ok_or(Error::EmptyInput)?.ambient_n;
    for b in bodies {
        if b.ambient_n != n {
            return Err(Error::AmbientMismatch {
                expected: n,
                found: b.ambient_n,
            });
        }
    }
    if bodies.len() != n {
        return Err(Error::SizeMismatch(format!("expected {n} bodies in C^{n}, got {}", bodies.len())));
    }
    Ok(n)
}

fn reject_segment_hessian(n: usize, bodies: &[&SupportBody]) -> Result<()> {
    if n == 1 && bodies.iter().any(|b| b.kind == BodyKind::Ball2nMinus1) {
        return Err(Error::InvalidArgument(
            "the Monge-Ampère measure of B_1 sits on the singular set; use the boundary formula".into(),
        ));
    }
    Ok(())
}

fn mixed_integrand(matrices: Vec<DMatrix<Complex64>>) -> Result<Complex64> {
    if matrices.len() == 1 {
        return Ok(matrices[0][(0, 0)]);
    }
    if matrices.len() == 2 {
        let (a, b) = (&matrices[0], &matrices[1]);
        return Ok((a[(0, 0)] * b[(1, 1)] + a[(1, 1)] * b[(0, 0)] - a[(0, 1)] * b[(1, 0)] - a[(1, 0)] * b[(0, 1)]) * 0.5);
    }
    mixed_discriminant(&MixedDiscriminantInput { matrices })
}

/// `P_n(A) = (4^n · 2κ_{2n} / κ_n) · E_θ[det Hess_C h_A(θ)]` over the unit
/// sphere.
pub fn mc_pseudovolume(body: &SupportBody, samples: usize, stream: RandomStream) -> Result<QuadratureResult> {
    let n = body.ambient_n;
    reject_segment_hessian(n, &[body])?;
    let sampler = Sampler::for_bodies(n, &[body]);
    let r = sphere_mean(n, samples, stream, sampler, |x| Ok(body.complex_hessian(x)?.determinant()))?;
    Ok(scaled(r, 4f64.powi(n as i32) * 2.0 * kappa(2 * n) / kappa(n)))
}

/// `P_n(A) = (4^n / κ_n) ∫_{B_{2n}} det Hess_C h_A dV` sampled over the
/// solid ball. Radii are drawn with density `∝ r^{n-1/2}`.
pub fn mc_pseudovolume_solid(body: &SupportBody, samples: usize, stream: RandomStream) -> Result<QuadratureResult> {
    let n = body.ambient_n;
    reject_segment_hessian(n, &[body])?;
    let sampler = Sampler::for_bodies(n, &[body]);
    let a = n as f64 + 0.5;
    let dim = 2 * n;
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let chunks = stream.map_chunks(samples, |rng, _, count| -> Result<(f64, f64)> {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let (theta, w) = sampler.draw(rng, n);
            let r = (1.0 - rng.random::<f64>()).powf(1.0 / a);
            if w == 0.0 {
                continue;
            }
            let x: Vec<f64> = theta.iter().map(|v| v * r).collect();
            let d = body.complex_hessian(&x)?.determinant().re;
            if !d.is_finite() {
                return Err(Error::NonFiniteIntegrand);
            }
            let wr = dim as f64 * r.powi(dim as i32 - 1) / (a * r.powf(a - 1.0));
            let y = d * w * wr;
            s += y;
            s2 += y * y;
        }
        Ok((s, s2))
    });
    let (mut s, mut s2) = (0.0, 0.0);
    for c in chunks {
        let (a, b) = c?;
        s += a;
        s2 += b;
    }
    let (mean, se) = mean_and_std_error(s, s2, samples);
    let r = QuadratureResult {
        value: mean,
        std_error: se,
        samples,
        max_imaginary: 0.0,
    };
    Ok(scaled(r, 4f64.powi(n as i32) * kappa(2 * n) / kappa(n)))
}

/// `Q_n(A_1, ..., A_n) = (4^n · 2κ_{2n} / κ_n) · E_θ[D_n(Hess_C h_{A_1}, ...)]`.
pub fn mc_mixed_pseudovolume(bodies: &[&SupportBody], samples: usize, stream: RandomStream) -> Result<QuadratureResult> {
    let n = check_bodies(bodies)?;
    reject_segment_hessian(n, bodies)?;
    let sampler = Sampler::for_bodies(n, bodies);
    let r = sphere_mean(n, samples, stream, sampler, |x| {
        let hs = bodies.iter().map(|b| b.complex_hessian(x)).collect::<Result<Vec<_>>>()?;
        mixed_integrand(hs)
    })?;
    Ok(scaled(r, 4f64.powi(n as i32) * 2.0 * kappa(2 * n) / kappa(n)))
}

/// The matrix `conj(M) + M^T` with `M = z · (dh/dz_1, ..., dh/dz_n)`.
pub fn boundary_matrix(body: &SupportBody, x: &[f64]) -> Result<DMatrix<Complex64>> {
    let g = body.gradient(x)?;
    let z = to_complex(x);
    let n = z.len();
    Ok(DMatrix::from_fn(n, n, |l, k| (z[l] * g[k]).conj() + z[k] * g[l]))
}

/// `Q_n = (4^{n-1} / κ_n) ∫_{S^{2n-1}} D_n(conj(M) + M^T, Hess_C h_{A_2}, ...) dσ`.
pub fn boundary_mixed_pseudovolume(bodies: &[&SupportBody], samples: usize, stream: RandomStream) -> Result<QuadratureResult> {
    let n = check_bodies(bodies)?;
    reject_segment_hessian(n, &bodies[1..])?;
    let sampler = Sampler::for_bodies(n, bodies);
    let r = sphere_mean(n, samples, stream, sampler, |x| {
        let mut ms = Vec::with_capacity(n);
        ms.push(boundary_matrix(bodies[0], x)?);
        for b in &bodies[1..] {
            ms.push(b.complex_hessian(x)?);
        }
        mixed_integrand(ms)
    })?;
    Ok(scaled(r, 4f64.powi(n as i32 - 1) * sphere_area(2 * n) / kappa(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_linalg::random_unitary;
    use crate::complex_linalg::realify;

    fn stream(i: u64) -> RandomStream {
        RandomStream::new(42, i)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    #[test]
    fn closed_forms_match_tables() {
        let t1 = [PI, 2.0 * PI, PI.powi(2), 4.0 * PI.powi(2) / 3.0, PI.powi(3) / 2.0];
        for (i, v) in t1.iter().enumerate() {
            assert!((ball_pseudovolume(i + 1) - v).abs() < 1e-12 * v);
        }
        let t2 = [2.0, 4.0 * PI / 3.0, 32.0 * PI / 15.0, 32.0 * PI.powi(2) / 35.0];
        for (i, v) in t2.iter().enumerate() {
            assert!((lower_ball_pseudovolume(i + 1) - v).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn levi_identity_for_balls() {
        for n in 1..=10 {
            let (l, r) = levi_ball_identity(n);
            assert!((l - r).abs() < 1e-12 * l);
        }
        assert!((levi_ball_identity(7).0 - PI.powi(4) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_hessian_determinants() {
        let mut rng = stream(1).chunk_rng(0);
        for n in 1..=4 {
            let ball = SupportBody::ball(n).unwrap();
            let lower = SupportBody::lower_ball(n).unwrap();
            for _ in 0..20 {
                let r = 0.3 + 2.0 * rng.random::<f64>();
                let x: Vec<f64> = unit_vector(&mut rng, 2 * n).iter().map(|v| v * r).collect();
                let d = ball.complex_hessian(&x).unwrap().determinant();
                let want = 2f64.powi(-(n as i32 + 1)) * r.powi(-(n as i32));
                assert!((d.re - want).abs() < 1e-12 * want && d.im.abs() < 1e-12);
                if n >= 2 {
                    let h = lower.support(&x);
                    let tail: f64 = x[2..].iter().map(|v| v * v).sum();
                    let want = tail / (2.0 * h).powi(n as i32 + 2);
                    let d = lower.complex_hessian(&x).unwrap().determinant();
                    assert!((d.re - want).abs() < 1e-10 * want && d.im.abs() < 1e-12 * want.max(1.0));
                }
            }
        }
    }

    #[test]
    fn finite_differences_match_analytic() {
        let mut rng = stream(2).chunk_rng(0);
        for n in [2, 3] {
            for body in [SupportBody::ball(n).unwrap(), SupportBody::lower_ball(n).unwrap()] {
                for _ in 0..100 {
                    let x = unit_vector(&mut rng, 2 * n);
                    let a = body.complex_hessian(&x).unwrap();
                    let f = body.complex_hessian_fd(&x).unwrap();
                    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
                    assert!(max_diff(&a, &f) < 1e-6 * scale, "{:?}", body.kind);
                    assert!(max_diff(&a, &a.adjoint()) < 1e-15 * scale);
                    let g = body.gradient(&x).unwrap();
                    let gf = SupportBody::custom(n, {
                        let b = body.clone();
                        move |y: &[f64]| b.support(y)
                    })
                    .unwrap()
                    .gradient(&x)
                    .unwrap();
                    for (p, q) in g.iter().zip(&gf) {
                        assert!((p - q).norm() < 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn custom_norm_matches_ball() {
        let n = 2;
        let custom = SupportBody::custom(n, |x: &[f64]| norm(x)).unwrap();
        let ball = SupportBody::ball(n).unwrap();
        let mut rng = stream(3).chunk_rng(0);
        for _ in 0..50 {
            let x = unit_vector(&mut rng, 2 * n);
            let d = max_diff(&custom.complex_hessian(&x).unwrap(), &ball.complex_hessian(&x).unwrap());
            assert!(d < 1e-6);
        }
    }

    #[test]
    fn ellipsoid_hessian_matches_finite_differences() {
        let n = 2;
        let mut rng = stream(4).chunk_rng(0);
        let a = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.5 } else { 0.0 } + 0.3 * rng.random::<f64>());
        let e = SupportBody::ellipsoid_image(n, &a).unwrap();
        for _ in 0..50 {
            let x = unit_vector(&mut rng, 2 * n);
            let an = e.complex_hessian(&x).unwrap();
            let fd = e.complex_hessian_fd(&x).unwrap();
            assert!(max_diff(&an, &fd) < 1e-6);
        }
        assert!(SupportBody::ellipsoid(n, DMatrix::identity(3, 3)).is_err());
        assert!(SupportBody::ellipsoid(n, -DMatrix::<f64>::identity(4, 4)).is_err());
    }

    #[test]
    fn singular_points_are_rejected() {
        let b = SupportBody::ball(2).unwrap();
        assert!(matches!(b.complex_hessian(&[0.0; 4]), Err(Error::SingularPoint)));
        let l = SupportBody::lower_ball(2).unwrap();
        assert!(matches!(l.complex_hessian(&[1.0, 0.0, 0.0, 0.0]), Err(Error::SingularPoint)));
        assert!(matches!(b.complex_hessian(&[1.0; 3]), Err(Error::AmbientMismatch { .. })));
    }

    #[test]
    fn support_function_sanity() {
        for body in [
            SupportBody::ball(2).unwrap(),
            SupportBody::lower_ball(3).unwrap(),
            SupportBody::ellipsoid(2, DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0, 3.0, 4.0])).unwrap(),
        ] {
            assert!(body.homogeneity_defect(200, stream(5)) < 1e-9);
            assert!(body.subadditivity_violation(200, stream(6)) <= 1e-12);
        }
    }

    #[test]
    fn ball_integrand_is_constant() {
        let b = SupportBody::ball(2).unwrap();
        let r = mc_pseudovolume(&b, 20_000, stream(7)).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-9);
        assert!(r.std_error * r.std_error * r.samples as f64 / (r.value * r.value) < 1e-18);
    }

    #[test]
    fn lower_ball_estimates() {
        for n in [2, 3] {
            let b = SupportBody::lower_ball(n).unwrap();
            let r = mc_pseudovolume(&b, 200_000, stream(8)).unwrap();
            let want = lower_ball_pseudovolume(n);
            assert!((r.value - want).abs() < 4.0 * r.std_error, "n={n} {r:?} {want}");
            assert!(r.std_error < 0.01 * want);
        }
        assert!(mc_pseudovolume(&SupportBody::lower_ball(1).unwrap(), 10, stream(0)).is_err());
    }

    #[test]
    fn solid_ball_sampling_agrees_with_sphere() {
        let b = SupportBody::lower_ball(2).unwrap();
        let s = mc_pseudovolume_solid(&b, 200_000, stream(9)).unwrap();
        let want = lower_ball_pseudovolume(2);
        assert!((s.value - want).abs() < 4.0 * s.std_error, "{s:?}");
        let full = mc_pseudovolume_solid(&SupportBody::ball(2).unwrap(), 100_000, stream(10)).unwrap();
        assert!((full.value - 2.0 * PI).abs() < 4.0 * full.std_error);
    }

    #[test]
    fn unitary_image_of_ball() {
        let u = random_unitary(2, stream(11)).unwrap();
        let e = SupportBody::ellipsoid_image(2, &realify(&u)).unwrap();
        let r = mc_pseudovolume(&e, 20_000, stream(12)).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn mixed_ball_and_lower_ball() {
        let b4 = SupportBody::ball(2).unwrap();
        let b3 = SupportBody::lower_ball(2).unwrap();
        // exact symbolic integration of D_2(Hess h_{B_4}, Hess h_{B_3}) over B_4
        let want = 16.0 / 3.0;
        let i = mc_mixed_pseudovolume(&[&b4, &b3], 200_000, stream(13)).unwrap();
        assert!((i.value - want).abs() < 4.0 * i.std_error, "{i:?}");
        assert!(i.max_imaginary < 1e-10);
        let j = mc_mixed_pseudovolume(&[&b3, &b4], 200_000, stream(13)).unwrap();
        assert!((i.value - j.value).abs() < 1e-12 * want);
        let bd = boundary_mixed_pseudovolume(&[&b4, &b3], 200_000, stream(14)).unwrap();
        assert!((bd.value - want).abs() < 4.0 * bd.std_error, "{bd:?}");
        assert!((i.value - bd.value).abs() < 4.0 * (i.std_error.hypot(bd.std_error)));
        let diag = boundary_mixed_pseudovolume(&[&b4, &b4], 10_000, stream(15)).unwrap();
        assert!((diag.value - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn boundary_formula_in_one_variable() {
        let b = boundary_mixed_pseudovolume(&[&SupportBody::ball(1).unwrap()], 1000, stream(16)).unwrap();
        assert!((b.value - PI).abs() < 1e-12);
        let s = boundary_mixed_pseudovolume(&[&SupportBody::lower_ball(1).unwrap()], 200_000, stream(17)).unwrap();
        assert!((s.value - 2.0).abs() < 4.0 * s.std_error);
    }

    #[test]
    fn interior_and_boundary_agree_on_ellipsoids() {
        let mut rng = stream(21).chunk_rng(0);
        for t in 0..3u64 {
            let mut mk = || {
                let a = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 } + 0.4 * (rng.random::<f64>() - 0.5));
                SupportBody::ellipsoid_image(2, &a).unwrap()
            };
            let (e, f) = (mk(), mk());
            let i = mc_mixed_pseudovolume(&[&e, &f], 100_000, stream(22 + t)).unwrap();
            let b = boundary_mixed_pseudovolume(&[&e, &f], 100_000, stream(32 + t)).unwrap();
            assert!((i.value - b.value).abs() < 4.0 * i.std_error.hypot(b.std_error), "{i:?} {b:?}");
        }
    }

    #[test]
    fn point_argument_gives_zero() {
        let p = SupportBody::point(2, &[0.3, -0.2, 0.5, 0.1]).unwrap();
        let b4 = SupportBody::ball(2).unwrap();
        let r = boundary_mixed_pseudovolume(&[&p, &b4], 100_000, stream(18)).unwrap();
        assert!(r.value.abs() < 4.0 * r.std_error + 1e-9, "{r:?}");
        let r = mc_mixed_pseudovolume(&[&b4, &p], 1000, stream(19)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn reproducible_for_fixed_stream() {
        let b3 = SupportBody::lower_ball(2).unwrap();
        let a = mc_pseudovolume(&b3, 70_000, stream(20)).unwrap();
        let b = mc_pseudovolume(&b3, 70_000, stream(20)).unwrap();
        assert_eq!(a, b);
    }
}
