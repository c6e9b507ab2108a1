//! Real-linear algebra inside `C^n`.
//!
//! A point of `C^n` is stored as `2n` real coordinates
//! `(Re z_1, Im z_1, ..., Re z_n, Im z_n)`. Real subspaces are described by
//! orthonormal bases for the real inner product `Re<.,.>`; the Hermitian
//! product is `<z, w> = sum_k z_k conj(w_k)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{RandomStream, Tolerance};

/// Interprets a real `2n`-vector as a complex `n`-vector.
pub fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

pub fn from_complex(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// `<z, w> = sum_k z_k conj(w_k)` for real `2n`-vectors read as complex ones.
pub fn hermitian_product(z: &[f64], w: &[f64]) -> Complex64 {
    z.chunks_exact(2)
        .zip(w.chunks_exact(2))
        .map(|(a, b)| Complex64::new(a[0], a[1]) * Complex64::new(b[0], -b[1]))
        .sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Multiplication by `i` on a real `2n`-vector.
pub fn times_i(v: &[f64]) -> Vec<f64> {
    v.chunks_exact(2).flat_map(|c| [-c[1], c[0]]).collect()
}

/// Ordered orthonormal real basis of an `R`-linear subspace of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub ambient_n: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    /// The zero subspace of `C^n`.
    pub fn zero(ambient_n: usize) -> Self {
        SubspaceBasis {
            ambient_n,
            vectors: Vec::new(),
        }
    }

    /// Wraps vectors that are claimed to be orthonormal; the claim is checked.
    pub fn from_orthonormal(ambient_n: usize, vectors: Vec<Vec<f64>>, tol: &Tolerance) -> Result<Self> {
        for v in &vectors {
            if v.len() != 2 * ambient_n {
                return Err(Error::AmbientMismatch {
                    expected: 2 * ambient_n,
                    found: v.len(),
                });
            }
        }
        let basis = SubspaceBasis { ambient_n, vectors };
        let defect = basis.gram_defect();
        if defect > tol.rank_eps {
            return Err(Error::NonOrthonormalBasis { defect });
        }
        Ok(basis)
    }

    /// Orthonormal basis of the span of arbitrary real `2n`-vectors, with the
    /// rank decided by singular values relative to the largest one.
    pub fn span(ambient_n: usize, vectors: &[Vec<f64>], tol: &Tolerance) -> Result<Self> {
        let dim = 2 * ambient_n;
        for v in vectors {
            if v.len() != dim {
                return Err(Error::AmbientMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        Ok(SubspaceBasis {
            ambient_n,
            vectors: orthonormal_span(dim, vectors, tol.rank_eps),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn real_ambient_dim(&self) -> usize {
        2 * self.ambient_n
    }

    /// `max |Re<v_l, v_j> - delta_lj|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (l, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if l == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|b| dot(b, v)).collect()
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for b in &self.vectors {
            let c = dot(b, v);
            out.iter_mut().zip(b).for_each(|(o, x)| *o += c * x);
        }
        out
    }

    /// Length of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let p = self.project(v);
        v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Orthonormal basis of the orthogonal complement of this subspace inside
    /// `within` (which must contain it).
    pub fn complement_in(&self, within: &SubspaceBasis, tol: &Tolerance) -> SubspaceBasis {
        let residuals: Vec<Vec<f64>> = within
            .vectors
            .iter()
            .map(|w| {
                let p = self.project(w);
                w.iter().zip(&p).map(|(a, b)| a - b).collect()
            })
            .collect();
        SubspaceBasis {
            ambient_n: self.ambient_n,
            vectors: orthonormal_span(self.real_ambient_dim(), &residuals, tol.rank_eps),
        }
    }

    /// Image under a real-linear map given as a `2n x 2n` matrix. The map must
    /// be orthogonal for the result to stay orthonormal.
    pub fn transformed(&self, map: &DMatrix<f64>) -> SubspaceBasis {
        SubspaceBasis {
            ambient_n: self.ambient_n,
            vectors: self.vectors.iter().map(|v| apply_real(map, v)).collect(),
        }
    }
}

pub fn apply_real(map: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (map * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Thin SVD of the `dim x k` matrix whose columns are `vectors`, by one-sided
/// Jacobi rotations. Returns `(sigma, u_columns, v_columns)` sorted by
/// descending singular value. Columns of `u` for zero singular values are zero.
pub(crate) fn jacobi_svd(dim: usize, vectors: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = vectors.len();
    let mut a: Vec<Vec<f64>> = vectors.iter().map(|v| v[..dim].to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut a, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (xp, xq) = (*x, *y);
                        *x = c * xp - s * xq;
                        *y = s * xp + c * xq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let mut s_out = Vec::with_capacity(k);
    let mut u_out = Vec::with_capacity(k);
    let mut v_out = Vec::with_capacity(k);
    for i in order {
        let s = sigma[i];
        u_out.push(if s > 0.0 {
            a[i].iter().map(|x| x / s).collect()
        } else {
            vec![0.0; dim]
        });
        s_out.push(s);
        v_out.push(v[i].clone());
    }
    (s_out, u_out, v_out)
}

/// Orthonormal basis of the span of `vectors` in `R^dim`, ordered by
/// descending singular value.
pub(crate) fn orthonormal_span(dim: usize, vectors: &[Vec<f64>], rank_eps: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() || dim == 0 {
        return Vec::new();
    }
    let (sigma, u, _) = jacobi_svd(dim, vectors);
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax <= 1e-300 {
        return Vec::new();
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (s, col) in sigma.iter().zip(u) {
        if *s <= rank_eps * smax || *s <= 1e-300 {
            break;
        }
        // re-orthogonalize against earlier columns to clean up rounding
        let mut w = col;
        for _ in 0..2 {
            for b in &out {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nw = norm(&w);
        if nw < 0.5 {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= nw);
        out.push(w);
    }
    out
}

/// Volume distortion data of a real subspace `E` of `C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub rho: f64,
    /// `dim_R (E ∩ iE)`.
    pub cr_dim: usize,
    /// `dim_C (E + iE)`.
    pub complex_dim: usize,
    pub equidimensional: bool,
}

/// `A[l][j] = <v_l, v_j>`.
pub fn hermitian_gram(basis: &SubspaceBasis, tol: &Tolerance) -> Result<DMatrix<Complex64>> {
    check_orthonormal(basis, tol)?;
    let d = basis.dim();
    Ok(DMatrix::from_fn(d, d, |l, j| {
        hermitian_product(&basis.vectors[l], &basis.vectors[j])
    }))
}

fn check_orthonormal(basis: &SubspaceBasis, tol: &Tolerance) -> Result<()> {
    let defect = basis.gram_defect();
    if defect > tol.rank_eps.max(1e-12) {
        return Err(Error::NonOrthonormalBasis { defect });
    }
    Ok(())
}

/// Complex rank of the vectors of the basis read as elements of `C^n`.
fn complex_rank(basis: &SubspaceBasis, tol: &Tolerance) -> usize {
    let d = basis.dim();
    if d == 0 {
        return 0;
    }
    let n = basis.ambient_n;
    let m = DMatrix::from_fn(n, d, |r, c| {
        Complex64::new(basis.vectors[c][2 * r], basis.vectors[c][2 * r + 1])
    });
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol.rank_eps * smax).count()
}

/// Volume distortion coefficient `rho(E) = det(<v_l, v_j>)`.
pub fn rho(basis: &SubspaceBasis, tol: &Tolerance) -> Result<DistortionReport> {
    check_orthonormal(basis, tol)?;
    let d = basis.dim();
    if d == 0 {
        return Ok(DistortionReport {
            rho: 1.0,
            cr_dim: 0,
            complex_dim: 0,
            equidimensional: true,
        });
    }
    let complex_dim = complex_rank(basis, tol);
    let cr_dim = 2 * (d - complex_dim);
    let equidimensional = d == complex_dim;
    let rho = if !equidimensional || d > basis.ambient_n {
        0.0
    } else {
        hermitian_gram(basis, tol)?.determinant().re.clamp(0.0, 1.0)
    };
    Ok(DistortionReport {
        rho,
        cr_dim,
        complex_dim,
        equidimensional,
    })
}

/// Splitting of `E` into its maximal complex subspace and the auxiliary
/// vectors `t_l = i v_l - sum_s Re<i v_l, v_s> v_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrDecomposition {
    /// Orthonormal basis of `E ∩ iE`.
    pub complex_part: SubspaceBasis,
    /// The raw vectors `t_1, ..., t_d`, one per basis vector of `E`.
    pub t_vectors: Vec<Vec<f64>>,
    /// Orthonormal basis of the space `E'` spanned by the `t_l`.
    pub prime_basis: SubspaceBasis,
}

pub fn cr_decomposition(basis: &SubspaceBasis, tol: &Tolerance) -> Result<CrDecomposition> {
    check_orthonormal(basis, tol)?;
    let n = basis.ambient_n;
    let dim = 2 * n;
    let d = basis.dim();
    let t_vectors: Vec<Vec<f64>> = basis
        .vectors
        .iter()
        .map(|v| {
            let iv = times_i(v);
            let p = basis.project(&iv);
            iv.iter().zip(&p).map(|(a, b)| a - b).collect()
        })
        .collect();
    if d == 0 {
        return Ok(CrDecomposition {
            complex_part: SubspaceBasis::zero(n),
            t_vectors,
            prime_basis: SubspaceBasis::zero(n),
        });
    }
    let (sigma, u, v) = jacobi_svd(dim, &t_vectors);
    let mut kernel = Vec::new();
    let mut range = Vec::new();
    for ((s, ucol), coeffs) in sigma.iter().zip(u).zip(v) {
        if *s > tol.rank_eps {
            range.push(ucol);
        } else {
            let mut w = vec![0.0; dim];
            for (a, b) in coeffs.iter().zip(&basis.vectors) {
                w.iter_mut().zip(b).for_each(|(o, x)| *o += a * x);
            }
            kernel.push(w);
        }
    }
    Ok(CrDecomposition {
        complex_part: SubspaceBasis {
            ambient_n: n,
            vectors: kernel,
        },
        t_vectors,
        prime_basis: SubspaceBasis {
            ambient_n: n,
            vectors: range,
        },
    })
}

/// `sqrt(det(Re<t_l, t_j>))`, the auxiliary-vector route to `rho`.
pub fn rho_via_t_vectors(basis: &SubspaceBasis, tol: &Tolerance) -> Result<f64> {
    let dec = cr_decomposition(basis, tol)?;
    let d = basis.dim();
    if d == 0 {
        return Ok(1.0);
    }
    if d > basis.ambient_n {
        return Ok(0.0);
    }
    let g = DMatrix::from_fn(d, d, |l, j| dot(&dec.t_vectors[l], &dec.t_vectors[j]));
    Ok(g.determinant().max(0.0).sqrt())
}

/// The block map sending a complex `n x n` matrix to the real `2n x 2n`
/// matrix acting on `(Re z_1, Im z_1, ...)` coordinates.
pub fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Haar-distributed unitary matrix: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(n: usize, stream: RandomStream) -> Result<DMatrix<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("random_unitary needs n >= 1".into()));
    }
    let mut rng = stream.chunk_rng(0);
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / 2f64.sqrt()
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn e(n: usize, k: usize, imaginary: bool) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n];
        v[2 * k + usize::from(imaginary)] = 1.0;
        v
    }

    fn random_basis(n: usize, d: usize, seed: u64) -> SubspaceBasis {
        let mut rng = RandomStream::new(seed, 0).chunk_rng(0);
        let vs: Vec<Vec<f64>> = (0..d)
            .map(|_| crate::numerics::gaussian_vector(&mut rng, 2 * n))
            .collect();
        SubspaceBasis::span(n, &vs, &tol()).unwrap()
    }

    #[test]
    fn gram_of_coordinate_vectors() {
        let b = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), e(2, 1, false)], &tol()).unwrap();
        let a = hermitian_gram(&b, &tol()).unwrap();
        assert!((a.clone() - DMatrix::identity(2, 2)).norm() < 1e-15);

        let b = SubspaceBasis::from_orthonormal(1, vec![e(1, 0, false), e(1, 0, true)], &tol()).unwrap();
        let a = hermitian_gram(&b, &tol()).unwrap();
        assert_eq!(a[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(a[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(a[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gram_matches_direct_summation() {
        let b = random_basis(3, 2, 11);
        let a = hermitian_gram(&b, &tol()).unwrap();
        for l in 0..2 {
            for j in 0..2 {
                let zl = to_complex(&b.vectors[l]);
                let zj = to_complex(&b.vectors[j]);
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    s += zl[k] * zj[k].conj();
                }
                assert!((a[(l, j)] - s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn non_orthonormal_rejected() {
        let v = vec![vec![1.0, 0.0, 1.0, 0.0]];
        assert!(matches!(
            SubspaceBasis::from_orthonormal(2, v, &tol()),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn rho_reference_cases() {
        let real = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), e(2, 1, false)], &tol()).unwrap();
        let r = rho(&real, &tol()).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-14);
        assert!(r.equidimensional);
        assert_eq!(r.cr_dim, 0);

        let line = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), e(2, 0, true)], &tol()).unwrap();
        let r = rho(&line, &tol()).unwrap();
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.cr_dim, 2);
        assert_eq!(r.complex_dim, 1);
        assert!(!r.equidimensional);

        let s = 0.5f64.sqrt();
        let half = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), vec![0.0, s, s, 0.0]], &tol()).unwrap();
        let r = rho(&half, &tol()).unwrap();
        // Brute-force Gram determinant: 1 - |<v1, v2>|^2 with <v1, v2> = -i/sqrt(2).
        let g12 = hermitian_product(&half.vectors[0], &half.vectors[1]);
        assert!((g12 - Complex64::new(0.0, -s)).norm() < 1e-15);
        assert!((r.rho - (1.0 - g12.norm_sqr())).abs() < 1e-14);
        assert!((r.rho - 0.5).abs() < 1e-14);

        for seed in 0..5 {
            let b = random_basis(3, 1, seed);
            assert!((rho(&b, &tol()).unwrap().rho - 1.0).abs() < 1e-12);
        }
        let zero = SubspaceBasis::zero(2);
        assert_eq!(rho(&zero, &tol()).unwrap().rho, 1.0);
    }

    #[test]
    fn rho_closed_form_up_to_three() {
        for seed in 0..20 {
            for d in 1..=3 {
                let b = random_basis(3, d, 100 + seed);
                let closed: f64 = 1.0
                    - (0..d)
                        .flat_map(|l| (l + 1..d).map(move |j| (l, j)))
                        .map(|(l, j)| hermitian_product(&b.vectors[l], &b.vectors[j]).im.powi(2))
                        .sum::<f64>();
                assert!((rho(&b, &tol()).unwrap().rho - closed).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rho_routes_agree() {
        for seed in 0..20 {
            for d in 1..=3 {
                let b = random_basis(3, d, 200 + seed);
                let a = rho(&b, &tol()).unwrap().rho;
                let t = rho_via_t_vectors(&b, &tol()).unwrap();
                assert!((a - t).abs() < 1e-8, "d={d}: {a} vs {t}");
            }
        }
    }

    #[test]
    fn rho_basis_independent() {
        let b = random_basis(2, 2, 5);
        let r0 = rho(&b, &tol()).unwrap().rho;
        let mixed = vec![
            b.vectors[0].iter().zip(&b.vectors[1]).map(|(x, y)| 3.0 * x - y).collect(),
            b.vectors[1].clone(),
        ];
        let b2 = SubspaceBasis::span(2, &mixed, &tol()).unwrap();
        assert!((rho(&b2, &tol()).unwrap().rho - r0).abs() < 1e-8);
        let swapped = SubspaceBasis::from_orthonormal(2, vec![b.vectors[1].clone(), b.vectors[0].clone()], &tol()).unwrap();
        assert!((rho(&swapped, &tol()).unwrap().rho - r0).abs() < 1e-12);
    }

    #[test]
    fn cr_decomposition_cases() {
        let real = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), e(2, 1, false)], &tol()).unwrap();
        let dec = cr_decomposition(&real, &tol()).unwrap();
        assert_eq!(dec.complex_part.dim(), 0);
        assert_eq!(dec.prime_basis.dim(), 2);

        let line = SubspaceBasis::from_orthonormal(2, vec![e(2, 0, false), e(2, 0, true)], &tol()).unwrap();
        let dec = cr_decomposition(&line, &tol()).unwrap();
        assert_eq!(dec.complex_part.dim(), 2);
        assert_eq!(dec.prime_basis.dim(), 0);

        for seed in 0..10 {
            let b = random_basis(2, 2, 300 + seed);
            let r = rho(&b, &tol()).unwrap().rho;
            let dec = cr_decomposition(&b, &tol()).unwrap();
            let (t1, t2) = (&dec.t_vectors[0], &dec.t_vectors[1]);
            assert!(dot(t1, t2).abs() < 1e-12);
            assert!((norm(t1) - r.sqrt()).abs() < 1e-10);
            assert!((norm(t2) - r.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn cr_dimensions_add_up() {
        // E = C e1 + R e2 in C^2: d = 3, E^C = C e1.
        let b = SubspaceBasis::from_orthonormal(
            2,
            vec![e(2, 0, false), e(2, 0, true), e(2, 1, false)],
            &tol(),
        )
        .unwrap();
        let dec = cr_decomposition(&b, &tol()).unwrap();
        assert_eq!(dec.complex_part.dim(), 2);
        assert_eq!(dec.prime_basis.dim(), 1);
        let r = rho(&b, &tol()).unwrap();
        assert_eq!(r.cr_dim, 2);
        assert_eq!(r.complex_dim, 2);
        assert_eq!(r.rho, 0.0);
    }

    #[test]
    fn realify_properties() {
        let m = DMatrix::from_element(1, 1, Complex64::new(0.0, 1.0));
        let r = realify(&m);
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));

        let mut rng = RandomStream::new(3, 3).chunk_rng(0);
        let mut rand_m = |n: usize| {
            DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        };
        for n in 1..=3 {
            let a = rand_m(n);
            let b = rand_m(n);
            assert!((realify(&(&a * &b)) - realify(&a) * realify(&b)).norm() < 1e-12);
            let det = a.determinant().norm_sqr();
            assert!((realify(&a).determinant() - det).abs() < 1e-9 * det.max(1.0));
            assert!((realify(&a).transpose() - realify(&a.adjoint())).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_is_unitary_and_preserves_rho() {
        for seed in 0..10 {
            let u = random_unitary(2, RandomStream::new(seed, 1)).unwrap();
            let err = (&u * u.adjoint() - DMatrix::<Complex64>::identity(2, 2)).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10);
            assert!((realify(&u).determinant() - 1.0).abs() < 1e-10);
            let b = random_basis(2, 2, 400 + seed);
            let ub = b.transformed(&realify(&u));
            let r0 = rho(&b, &tol()).unwrap().rho;
            let r1 = rho(&ub, &tol()).unwrap().rho;
            assert!((r0 - r1).abs() < 1e-8);
        }
    }

    #[test]
    fn orthogonal_swap_breaks_real_similarity() {
        // Swap the coordinates of i e_1 and e_n in R^{2n}.
        for n in 2..=4 {
            let real: Vec<Vec<f64>> = (0..n).map(|k| e(n, k, false)).collect();
            let b = SubspaceBasis::from_orthonormal(n, real, &tol()).unwrap();
            assert!((rho(&b, &tol()).unwrap().rho - 1.0).abs() < 1e-14);
            let mut f = DMatrix::<f64>::identity(2 * n, 2 * n);
            f.swap_rows(1, 2 * n - 2);
            let fb = b.transformed(&f);
            assert_eq!(rho(&fb, &tol()).unwrap().rho, 0.0);
        }
    }
}
