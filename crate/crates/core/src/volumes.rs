//! Face volumes, Minkowski mixed volumes, intrinsic volumes and mixed
//! discriminants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_linalg::{dot, norm, SubspaceBasis};
use crate::cone::AngleConfig;
use crate::error::{Error, Result};
use crate::hull;
use crate::numerics::factorial;
use crate::polytope::{minkowski_sum, Polytope};
use crate::pseudovolume::{intrinsic_phi_volume, Estimate, UnitWeight};

/// `k`-volume of a face from a fan triangulation of its vertices in
/// `hull_basis` coordinates.
pub fn face_volume(p: &Polytope, face_id: usize) -> Result<f64> {
    let face = p.face(face_id)?;
    let k = face.k;
    if k == 0 {
        return Ok(1.0);
    }
    let origin = &p.vertices[face.vertex_ids[0]];
    let coords: Vec<Vec<f64>> = face
        .vertex_ids
        .iter()
        .map(|&i| {
            let d: Vec<f64> = p.vertices[i].iter().zip(origin).map(|(a, b)| a - b).collect();
            face.hull_basis.coordinates(&d)
        })
        .collect();
    simplex_fan_volume(&coords, k, p.tolerance().geom_eps)
}

fn simplex_fan_volume(coords: &[Vec<f64>], k: usize, eps: f64) -> Result<f64> {
    let scale = coords.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::DegenerateFace { expected: k });
    }
    let scaled: Vec<Vec<f64>> = coords
        .iter()
        .map(|c| c.iter().map(|x| x / scale).collect())
        .collect();
    let rank = {
        let m = DMatrix::from_fn(k, coords.len(), |r, c| scaled[c][r] - scaled[0][r]);
        m.singular_values().iter().filter(|&&s| s > 1e-9).count()
    };
    if rank < k {
        return Err(Error::DegenerateFace { expected: k });
    }
    let facets = hull::facets(&scaled, eps).ok_or(Error::DegenerateFace { expected: k })?;
    let lattice = hull::build_lattice(scaled.len(), k, &facets);
    let centroids: Vec<Vec<f64>> = lattice
        .iter()
        .map(|f| {
            let mut c = vec![0.0; k];
            for &i in &f.points {
                c.iter_mut().zip(&scaled[i]).for_each(|(a, b)| *a += b);
            }
            c.iter_mut().for_each(|a| *a /= f.points.len() as f64);
            c
        })
        .collect();
    fn flags(lattice: &[hull::LatticeFace], id: usize) -> Vec<Vec<usize>> {
        let f = &lattice[id];
        if f.dim == 0 {
            return vec![vec![id]];
        }
        f.children
            .iter()
            .flat_map(|&c| flags(lattice, c))
            .map(|mut s| {
                s.push(id);
                s
            })
            .collect()
    }
    let top = lattice.len() - 1;
    let total: f64 = flags(&lattice, top)
        .iter()
        .map(|s| {
            let base = &centroids[s[0]];
            let m = DMatrix::from_fn(k, k, |r, c| centroids[s[c + 1]][r] - base[r]);
            m.determinant().abs()
        })
        .sum();
    Ok(total / factorial(k) * scale.powi(k as i32))
}

fn check_in_subspace(bodies: &[Polytope], subspace: &SubspaceBasis) -> Result<()> {
    let k = subspace.dim();
    if bodies.len() != k {
        return Err(Error::SizeMismatch(format!(
            "{} bodies for a {k}-dimensional subspace",
            bodies.len()
        )));
    }
    for b in bodies {
        if b.ambient_n != subspace.ambient_n {
            return Err(Error::AmbientMismatch {
                expected: subspace.ambient_n,
                found: b.ambient_n,
            });
        }
        let tol = b.tolerance().geom_eps * 1e3;
        for v in &b.affine_basis().vectors {
            let residual = subspace.residual(v);
            if residual > tol {
                return Err(Error::SubspaceMismatch { residual });
            }
        }
    }
    Ok(())
}

fn subset_volume(bodies: &[Polytope], mask: usize, k: usize) -> Result<f64> {
    let parts: Vec<Polytope> = (0..bodies.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| bodies[i].clone())
        .collect();
    let sum = if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        minkowski_sum(&parts)?.0
    };
    Ok(if sum.dim_real == k { sum.volume() } else { 0.0 })
}

/// Mixed volume `V_k(A_1, ..., A_k)` of bodies whose affine hulls are
/// parallel to the `k`-dimensional `subspace`, by polarization of the volumes
/// of all subset sums.
pub fn mixed_volume(bodies: &[Polytope], subspace: &SubspaceBasis) -> Result<f64> {
    check_in_subspace(bodies, subspace)?;
    let k = subspace.dim();
    if k == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for mask in 1usize..(1 << k) {
        let size = mask.count_ones() as usize;
        let v = subset_volume(bodies, mask, k)?;
        total += if (k - size).is_multiple_of(2) { v } else { -v };
    }
    Ok(total / factorial(k))
}

/// Mixed volume by the recursion over facet normals of `A_2 + ... + A_k`:
/// `V(A_1, ..., A_k) = (1/k) sum_u h_{A_1}(u) V(F(A_2, u), ..., F(A_k, u))`.
pub fn mixed_volume_inductive(bodies: &[Polytope], subspace: &SubspaceBasis) -> Result<f64> {
    check_in_subspace(bodies, subspace)?;
    let k = subspace.dim();
    if k == 0 {
        return Ok(1.0);
    }
    if k == 1 {
        let b = &bodies[0];
        return Ok(if b.dim_real == 1 { b.volume() } else { 0.0 });
    }
    let rest = &bodies[1..];
    let s = if rest.len() == 1 {
        rest[0].clone()
    } else {
        minkowski_sum(rest)?.0
    };
    let tol = *bodies[0].tolerance();
    let normals: Vec<Vec<f64>> = if s.dim_real == k {
        s.facet_normals().into_iter().map(|(_, u)| u).collect()
    } else if s.dim_real + 1 == k {
        let c = s.affine_basis().complement_in(subspace, &tol);
        let nu = c.vectors[0].clone();
        let neg: Vec<f64> = nu.iter().map(|x| -x).collect();
        vec![nu, neg]
    } else {
        return Ok(0.0);
    };
    let mut total = 0.0;
    for u in normals {
        let ub = SubspaceBasis {
            ambient_n: subspace.ambient_n,
            vectors: vec![u.clone()],
        };
        let sub = ub.complement_in(subspace, &tol);
        let faces: Vec<Polytope> = rest
            .iter()
            .map(|b| b.face_polytope(b.support(&u).1))
            .collect::<Result<_>>()?;
        let v = mixed_volume_inductive(&faces, &sub)?;
        total += bodies[0].support(&u).0 * v;
    }
    Ok(total / k as f64)
}

/// `v_k(P) = sum_{k-faces} vol_k(Δ) ψ(Δ)`.
pub fn intrinsic_volume(p: &Polytope, k: usize, angles: &AngleConfig) -> Result<Estimate> {
    intrinsic_phi_volume(p, k, &UnitWeight, angles)
}

/// Matrices `M_1, ..., M_n`, all `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDiscriminantInput {
    pub matrices: Vec<DMatrix<Complex64>>,
}

impl MixedDiscriminantInput {
    pub fn new(matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for m in &matrices {
            if m.shape() != (n, n) {
                return Err(Error::SizeMismatch(format!(
                    "{n} matrices must all be {n}x{n}, found {:?}",
                    m.shape()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument("non-finite matrix entry".into()));
            }
        }
        Ok(MixedDiscriminantInput { matrices })
    }

    pub fn from_real(matrices: &[DMatrix<f64>]) -> Result<Self> {
        Self::new(matrices.iter().map(|m| m.map(|x| Complex64::new(x, 0.0))).collect())
    }

    pub fn size(&self) -> usize {
        self.matrices.len()
    }
}

/// Largest size handled by the permutation sum.
pub const PERMUTATION_CAP: usize = 6;

/// All permutations of `0..n` with their signs (Heap's algorithm).
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    let mut out = vec![(a.clone(), sign)];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            out.push((a.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `D_n = (1/n!) sum_{σ,τ} sgn(στ) prod_l m^{(l)}_{σ(l) τ(l)}`.
pub fn mixed_discriminant_permutation(input: &MixedDiscriminantInput) -> Result<Complex64> {
    let n = input.size();
    if n > PERMUTATION_CAP {
        return Err(Error::InvalidArgument(format!(
            "permutation sum supports n <= {PERMUTATION_CAP}, got {n}"
        )));
    }
    let perms = permutations(n);
    let mut total = Complex64::new(0.0, 0.0);
    for (s, ss) in &perms {
        for (t, ts) in &perms {
            let mut prod = Complex64::new(ss * ts, 0.0);
            for (l, m) in input.matrices.iter().enumerate() {
                prod *= m[(s[l], t[l])];
            }
            total += prod;
        }
    }
    Ok(total / factorial(n))
}

fn minor(m: &DMatrix<Complex64>, row: usize, col: usize) -> DMatrix<Complex64> {
    m.clone().remove_row(row).remove_column(col)
}

fn laplace(ms: &[DMatrix<Complex64>]) -> Complex64 {
    let n = ms.len();
    if n == 1 {
        return ms[0][(0, 0)];
    }
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let a = ms[0][(j, k)];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let minors: Vec<DMatrix<Complex64>> = ms[1..].iter().map(|m| minor(m, j, k)).collect();
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            total += a * sign * laplace(&minors);
        }
    }
    total / n as f64
}

/// `D_n` expanded linearly in the entries of `M_1`:
/// `D_n = (1/n) sum_{j,k} (-1)^{j+k} m^{(1)}_{jk} D_{n-1}(M_2^{(jk)}, ...)`.
pub fn mixed_discriminant_laplace(input: &MixedDiscriminantInput) -> Complex64 {
    laplace(&input.matrices)
}

/// `D_n = (1/n!) sum_{∅≠I} (-1)^{n-|I|} det(sum_{l∈I} M_l)`.
pub fn mixed_discriminant_polarized(input: &MixedDiscriminantInput) -> Complex64 {
    let n = input.size();
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 1usize..(1 << n) {
        let mut s = DMatrix::<Complex64>::zeros(n, n);
        for (l, m) in input.matrices.iter().enumerate() {
            if mask >> l & 1 == 1 {
                s += m;
            }
        }
        let d = s.determinant();
        total += if (n - mask.count_ones() as usize).is_multiple_of(2) { d } else { -d };
    }
    total / factorial(n)
}

/// Mixed discriminant, by the permutation sum up to size
/// [`PERMUTATION_CAP`] and by the Laplace expansion beyond.
pub fn mixed_discriminant(input: &MixedDiscriminantInput) -> Result<Complex64> {
    if input.size() <= PERMUTATION_CAP {
        mixed_discriminant_permutation(input)
    } else {
        Ok(mixed_discriminant_laplace(input))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlexandroffReport {
    /// `D(M, N, M_3, ...)^2`.
    pub lhs: f64,
    /// `D(M, M, M_3, ...) D(N, N, M_3, ...)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of `D(M,N,...)^2 >= D(M,M,...) D(N,N,...)`.
pub fn alexandroff_check(
    m: &DMatrix<Complex64>,
    n: &DMatrix<Complex64>,
    rest: &[DMatrix<Complex64>],
) -> Result<AlexandroffReport> {
    let with = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| -> Result<f64> {
        let mut ms = vec![a.clone(), b.clone()];
        ms.extend(rest.iter().cloned());
        Ok(mixed_discriminant(&MixedDiscriminantInput::new(ms)?)?.re)
    };
    let mixed = with(m, n)?;
    let lhs = mixed * mixed;
    let rhs = with(m, m)? * with(n, n)?;
    let slack = 1e-10 * lhs.abs().max(rhs.abs()).max(1.0);
    Ok(AlexandroffReport {
        lhs,
        rhs,
        holds: lhs + slack >= rhs,
    })
}

/// Sum of the `k`-volumes of the facets of a full polytope times the outer
/// normals, which vanishes for every polytope.
pub fn facet_normal_balance(p: &Polytope) -> Vec<f64> {
    let mut total = vec![0.0; 2 * p.ambient_n];
    for (f, u) in p.facet_normals() {
        let v = p.faces[f].volume_k;
        total.iter_mut().zip(&u).for_each(|(a, b)| *a += v * b);
    }
    total
}

/// `(1/d) sum_facets h(u_Δ) vol_{d-1}(Δ)`, equal to `vol_d`.
pub fn pyramid_volume(p: &Polytope) -> f64 {
    if p.dim_real == 0 {
        return 1.0;
    }
    let s: f64 = p
        .facet_normals()
        .iter()
        .map(|(f, u)| dot(u, &p.vertices[p.faces[*f].vertex_ids[0]]) * p.faces[*f].volume_k)
        .sum();
    s / p.dim_real as f64
}
