//! Polytopes in `C^n = R^{2n}` given by vertices, with their full face
//! lattice and per-face geometric data.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::complex_linalg::{self, dot, norm, orthonormal_span, realify, SubspaceBasis};
use crate::error::{Error, Result};
use crate::hull;
use crate::numerics::Tolerance;

/// Largest supported real ambient dimension `2n`.
pub const MAX_REAL_DIM: usize = 8;
/// Largest number of vertex combinations a Minkowski sum may enumerate.
pub const VERTEX_PRODUCT_CAP: usize = 1_000_000;

/// A face of a polytope together with its geometric data.
#[derive(Debug, Clone, Serialize)]
pub struct Face {
    /// Sorted indices into the polytope's vertex list.
    pub vertex_ids: Vec<usize>,
    pub k: usize,
    /// Orthonormal basis of the direction space `E_Δ` of the affine hull.
    pub hull_basis: SubspaceBasis,
    pub volume_k: f64,
    pub rho: f64,
    /// Outer angle when it is known in closed form (the polytope itself and
    /// its facets).
    pub outer_angle: Option<f64>,
    /// Vertex average, a relative-interior point.
    pub centroid: Vec<f64>,
    /// Ids of the `(k-1)`-faces of this face.
    pub children: Vec<usize>,
    /// Ids of the `(k+1)`-faces containing this face.
    pub parents: Vec<usize>,
    /// A direction in the relative interior of the dual cone (zero for the
    /// polytope itself).
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    pub ambient_n: usize,
    pub vertices: Vec<Vec<f64>>,
    /// All faces, sorted by dimension; the last one is the polytope itself.
    pub faces: Vec<Face>,
    pub dim_real: usize,
    tol: Tolerance,
    index: HashMap<Vec<usize>, usize>,
}

/// For each face of a Minkowski sum, the face of every summand it decomposes
/// into.
#[derive(Debug, Clone, Serialize)]
pub struct SummandDecomposition {
    /// `summands[face_id][l]` is a face id of the `l`-th summand.
    pub summands: Vec<Vec<usize>>,
}

/// Result of cutting a polytope by an affine hyperplane `<u, x> = c`.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub plus: Option<Polytope>,
    pub minus: Option<Polytope>,
    pub zero: Option<Polytope>,
}

fn check_points(n: usize, points: &[Vec<f64>]) -> Result<()> {
    if 2 * n > MAX_REAL_DIM {
        return Err(Error::DimensionCapExceeded {
            dim: 2 * n,
            cap: MAX_REAL_DIM,
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for p in points {
        if p.len() != 2 * n {
            return Err(Error::AmbientMismatch {
                expected: 2 * n,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
    }
    Ok(())
}

fn max_abs(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dedupe(points: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
    let scale = max_abs(points).max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let thr = eps * scale;
    let mut start = 0;
    for p in sorted {
        while start < out.len() && out[start][0] < p[0] - thr {
            start += 1;
        }
        let dup = out[start..]
            .iter()
            .any(|q| q.iter().zip(p).all(|(a, b)| (a - b).abs() <= thr));
        if !dup {
            out.push(p.clone());
        }
    }
    out
}

fn mean(points: &[&Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    let mut c = vec![0.0; dim];
    for p in points {
        c.iter_mut().zip(p.iter()).for_each(|(a, b)| *a += b);
    }
    let k = points.len() as f64;
    c.iter_mut().for_each(|a| *a /= k);
    c
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl Polytope {
    /// Convex hull of points in `R^{2n}` computed in floating point.
    pub fn hull(n: usize, points: &[Vec<f64>], tol: &Tolerance) -> Result<Self> {
        check_points(n, points)?;
        let pts = dedupe(points, tol.geom_eps);
        let dim = 2 * n;
        let refs: Vec<&Vec<f64>> = pts.iter().collect();
        let center = mean(&refs);
        let diffs: Vec<Vec<f64>> = pts.iter().map(|p| sub(p, &center)).collect();
        let basis = orthonormal_span(dim, &diffs, tol.rank_eps);
        let d = basis.len();
        let lattice = if d == 0 {
            hull::build_lattice(1, 0, &[])
        } else {
            let mut coords: Vec<Vec<f64>> = diffs
                .iter()
                .map(|v| basis.iter().map(|b| dot(b, v)).collect())
                .collect();
            let s = coords.iter().map(|c| norm(c)).fold(0.0, f64::max);
            coords.iter_mut().for_each(|c| c.iter_mut().for_each(|x| *x /= s));
            let facets = hull::facets(&coords, tol.geom_eps)
                .ok_or(Error::DegenerateFace { expected: d })?;
            hull::build_lattice(pts.len(), d, &facets)
        };
        let pts = if d == 0 { vec![pts[0].clone()] } else { pts };
        Self::from_lattice(n, &pts, d, lattice, tol)
    }

    /// Convex hull of rational points; the face lattice is decided exactly and
    /// the metric data is then evaluated in floating point.
    pub fn hull_exact(n: usize, points: &[Vec<BigRational>], tol: &Tolerance) -> Result<Self> {
        if 2 * n > MAX_REAL_DIM {
            return Err(Error::DimensionCapExceeded {
                dim: 2 * n,
                cap: MAX_REAL_DIM,
            });
        }
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut pts: Vec<Vec<BigRational>> = Vec::new();
        for p in points {
            if p.len() != 2 * n {
                return Err(Error::AmbientMismatch {
                    expected: 2 * n,
                    found: p.len(),
                });
            }
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
        let pivots = exact_pivot_columns(&pts);
        let d = pivots.len();
        let float_pts: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        let lattice = if d == 0 {
            hull::build_lattice(1, 0, &[])
        } else {
            let coords: Vec<Vec<BigRational>> = pts
                .iter()
                .map(|p| pivots.iter().map(|&c| p[c].clone() - pts[0][c].clone()).collect())
                .collect();
            let facets = hull::facets(&coords, 0.0).ok_or(Error::DegenerateFace { expected: d })?;
            hull::build_lattice(pts.len(), d, &facets)
        };
        Self::from_lattice(n, &float_pts, d, lattice, tol)
    }

    fn from_lattice(
        n: usize,
        points: &[Vec<f64>],
        d: usize,
        lattice: Vec<hull::LatticeFace>,
        tol: &Tolerance,
    ) -> Result<Self> {
        // Extreme points are the 0-faces.
        let mut extreme: Vec<usize> = lattice
            .iter()
            .filter(|f| f.dim == 0)
            .map(|f| f.points[0])
            .collect();
        extreme.sort_unstable();
        let mut vid = vec![usize::MAX; points.len()];
        for (i, &p) in extreme.iter().enumerate() {
            vid[p] = i;
        }
        let vertices: Vec<Vec<f64>> = extreme.iter().map(|&p| points[p].clone()).collect();
        let dim = 2 * n;

        let mut faces: Vec<Face> = Vec::with_capacity(lattice.len());
        for lf in &lattice {
            let ids: Vec<usize> = {
                let mut v: Vec<usize> = lf
                    .points
                    .iter()
                    .filter(|&&p| vid[p] != usize::MAX)
                    .map(|&p| vid[p])
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let refs: Vec<&Vec<f64>> = ids.iter().map(|&i| &vertices[i]).collect();
            let centroid = mean(&refs);
            let k = lf.dim;
            let hull_basis = if k == 0 {
                SubspaceBasis::zero(n)
            } else {
                let diffs: Vec<Vec<f64>> = refs.iter().map(|v| sub(v, refs[0])).collect();
                let mut b = orthonormal_span(dim, &diffs, 0.0);
                if b.len() < k {
                    return Err(Error::DegenerateFace { expected: k });
                }
                b.truncate(k);
                SubspaceBasis {
                    ambient_n: n,
                    vectors: b,
                }
            };
            let volume_k = if k == 0 {
                1.0
            } else {
                lf.children
                    .iter()
                    .map(|&c| {
                        let child: &Face = &faces[c];
                        let h = child.hull_basis.residual(&sub(&centroid, &child.centroid));
                        h * child.volume_k
                    })
                    .sum::<f64>()
                    / k as f64
            };
            let rho = complex_linalg::rho(&hull_basis, tol)?.rho;
            let outer_angle = if k == d {
                Some(1.0)
            } else if k + 1 == d {
                Some(0.5)
            } else {
                None
            };
            faces.push(Face {
                vertex_ids: ids,
                k,
                hull_basis,
                volume_k,
                rho,
                outer_angle,
                centroid,
                children: lf.children.clone(),
                parents: Vec::new(),
                witness: vec![0.0; dim],
            });
        }
        for id in 0..faces.len() {
            for c in faces[id].children.clone() {
                faces[c].parents.push(id);
            }
        }
        let top = faces.len() - 1;
        if d > 0 {
            let facet_ids: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].k + 1 == d).collect();
            let center = faces[top].centroid.clone();
            let normals: Vec<Vec<f64>> = facet_ids
                .iter()
                .map(|&f| {
                    let face = &faces[f];
                    let w = sub(&center, &face.centroid);
                    let p = face.hull_basis.project(&w);
                    let out: Vec<f64> = w.iter().zip(&p).map(|(a, b)| b - a).collect();
                    let l = norm(&out);
                    out.iter().map(|x| x / l).collect()
                })
                .collect();
            for id in 0..top {
                let ids = faces[id].vertex_ids.clone();
                let mut w = vec![0.0; dim];
                for (&f, nrm) in facet_ids.iter().zip(&normals) {
                    if is_sorted_subset(&ids, &faces[f].vertex_ids) {
                        w.iter_mut().zip(nrm).for_each(|(a, b)| *a += b);
                    }
                }
                faces[id].witness = w;
            }
        }
        let index = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.vertex_ids.clone(), i))
            .collect();
        Ok(Polytope {
            ambient_n: n,
            vertices,
            faces,
            dim_real: d,
            tol: *tol,
            index,
        })
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn top_id(&self) -> usize {
        self.faces.len() - 1
    }

    /// Basis of the direction space `E_Γ` of the affine hull.
    pub fn affine_basis(&self) -> &SubspaceBasis {
        &self.faces[self.top_id()].hull_basis
    }

    /// `dim_R Γ` volume of the polytope inside its affine hull.
    pub fn volume(&self) -> f64 {
        self.faces[self.top_id()].volume_k
    }

    pub fn face(&self, id: usize) -> Result<&Face> {
        self.faces.get(id).ok_or(Error::FaceNotFound(id))
    }

    pub fn face_ids_of_dim(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&i| self.faces[i].k == k)
    }

    /// Face id for an exact vertex set.
    pub fn find_face(&self, vertex_ids: &[usize]) -> Option<usize> {
        self.index.get(vertex_ids).copied()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim_real)
            .map(|k| self.face_ids_of_dim(k).count())
            .collect()
    }

    /// `sum_{k=-1}^{d} (-1)^k f_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .fold(-1i64, |acc, (k, &f)| if k % 2 == 0 { acc + f as i64 } else { acc - f as i64 })
    }

    /// `h(u) = max_v Re<u, v>` and the face where it is attained.
    pub fn support(&self, u: &[f64]) -> (f64, usize) {
        let values: Vec<f64> = self.vertices.iter().map(|v| dot(u, v)).collect();
        let h = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let thr = self.tol.geom_eps * norm(u) * max_abs(&self.vertices);
        let set: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= h - thr).collect();
        let id = self.find_face(&set).unwrap_or_else(|| {
            (0..self.faces.len())
                .find(|&i| is_sorted_subset(&set, &self.faces[i].vertex_ids))
                .unwrap_or(self.top_id())
        });
        (h, id)
    }

    /// Outward unit normals of the facets, inside `E_Γ`.
    pub fn facet_normals(&self) -> Vec<(usize, Vec<f64>)> {
        if self.dim_real == 0 {
            return Vec::new();
        }
        self.face_ids_of_dim(self.dim_real - 1)
            .map(|f| (f, self.faces[f].witness.clone()))
            .collect()
    }

    /// The face as a polytope of its own.
    pub fn face_polytope(&self, id: usize) -> Result<Polytope> {
        let face = self.face(id)?;
        let pts: Vec<Vec<f64>> = face.vertex_ids.iter().map(|&i| self.vertices[i].clone()).collect();
        Polytope::hull(self.ambient_n, &pts, &self.tol)
    }

    /// `λ Γ`; the face lattice is kept for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("scale factor {lambda} must be >= 0")));
        }
        if lambda == 0.0 {
            return Polytope::hull(self.ambient_n, &[vec![0.0; 2 * self.ambient_n]], &self.tol);
        }
        let mut out = self.clone();
        out.vertices.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x *= lambda));
        for f in out.faces.iter_mut() {
            f.volume_k *= lambda.powi(f.k as i32);
            f.centroid.iter_mut().for_each(|x| *x *= lambda);
        }
        Ok(out)
    }

    /// `Γ + t`; the face lattice is kept.
    pub fn translate(&self, t: &[f64]) -> Result<Polytope> {
        if t.len() != 2 * self.ambient_n {
            return Err(Error::AmbientMismatch {
                expected: 2 * self.ambient_n,
                found: t.len(),
            });
        }
        let mut out = self.clone();
        out.vertices.iter_mut().for_each(|v| v.iter_mut().zip(t).for_each(|(x, s)| *x += s));
        for f in out.faces.iter_mut() {
            f.centroid.iter_mut().zip(t).for_each(|(x, s)| *x += s);
        }
        Ok(out)
    }

    /// Image under a real-linear map of `R^{2n}`; the hull is recomputed.
    pub fn apply_linear(&self, map: &DMatrix<f64>) -> Result<Polytope> {
        let dim = 2 * self.ambient_n;
        if map.shape() != (dim, dim) {
            return Err(Error::SizeMismatch(format!(
                "expected a {dim}x{dim} map, got {:?}",
                map.shape()
            )));
        }
        let pts: Vec<Vec<f64>> = self.vertices.iter().map(|v| complex_linalg::apply_real(map, v)).collect();
        Polytope::hull(self.ambient_n, &pts, &self.tol)
    }

    /// Image under a complex-linear map of `C^n`.
    pub fn apply_complex(&self, m: &DMatrix<Complex64>) -> Result<Polytope> {
        self.apply_linear(&realify(m))
    }

    /// Intersections with the closed halfspaces `<u, x> >= c`, `<u, x> <= c`
    /// and with the hyperplane itself.
    pub fn split(&self, u: &[f64], c: f64) -> Result<SplitResult> {
        if u.len() != 2 * self.ambient_n {
            return Err(Error::AmbientMismatch {
                expected: 2 * self.ambient_n,
                found: u.len(),
            });
        }
        let s: Vec<f64> = self.vertices.iter().map(|v| dot(u, v) - c).collect();
        let eps = self.tol.geom_eps * norm(u) * max_abs(&self.vertices).max(c.abs()).max(1.0);
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut zero = Vec::new();
        for (v, &sv) in self.vertices.iter().zip(&s) {
            if sv >= -eps {
                plus.push(v.clone());
            }
            if sv <= eps {
                minus.push(v.clone());
            }
            if sv.abs() <= eps {
                zero.push(v.clone());
            }
        }
        for e in self.face_ids_of_dim(1) {
            let ids = &self.faces[e].vertex_ids;
            let (a, b) = (ids[0], ids[1]);
            let (sa, sb) = (s[a], s[b]);
            if (sa > eps && sb < -eps) || (sa < -eps && sb > eps) {
                let t = sa / (sa - sb);
                let p: Vec<f64> = self.vertices[a]
                    .iter()
                    .zip(&self.vertices[b])
                    .map(|(x, y)| x + t * (y - x))
                    .collect();
                plus.push(p.clone());
                minus.push(p.clone());
                zero.push(p);
            }
        }
        let build = |pts: Vec<Vec<f64>>| -> Result<Option<Polytope>> {
            if pts.is_empty() {
                Ok(None)
            } else {
                Polytope::hull(self.ambient_n, &pts, &self.tol).map(Some)
            }
        };
        Ok(SplitResult {
            plus: build(plus)?,
            minus: build(minus)?,
            zero: build(zero)?,
        })
    }
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Columns on which the affine hull of rational points projects injectively.
fn exact_pivot_columns(points: &[Vec<BigRational>]) -> Vec<usize> {
    let mut rows: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let cols = points[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone() / pivot_row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Minkowski sum of polytopes in the same `C^n`, with the decomposition of
/// every face of the sum into faces of the summands.
pub fn minkowski_sum(parts: &[Polytope]) -> Result<(Polytope, SummandDecomposition)> {
    let first = parts.first().ok_or(Error::EmptyInput)?;
    let n = first.ambient_n;
    let mut product: usize = 1;
    for p in parts {
        if p.ambient_n != n {
            return Err(Error::AmbientMismatch {
                expected: n,
                found: p.ambient_n,
            });
        }
        product = product.saturating_mul(p.vertices.len());
    }
    if product > VERTEX_PRODUCT_CAP {
        return Err(Error::VertexProductCapExceeded {
            count: product,
            cap: VERTEX_PRODUCT_CAP,
        });
    }
    let tol = first.tol;
    let mut acc = first.vertices.clone();
    for (i, p) in parts.iter().enumerate().skip(1) {
        let mut next = Vec::with_capacity(acc.len() * p.vertices.len());
        for a in &acc {
            for b in &p.vertices {
                next.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        acc = if i + 1 < parts.len() {
            Polytope::hull(n, &next, &tol)?.vertices
        } else {
            next
        };
    }
    let sum = Polytope::hull(n, &acc, &tol)?;
    let summands = sum
        .faces
        .iter()
        .map(|f| parts.iter().map(|p| p.support(&f.witness).1).collect())
        .collect();
    Ok((sum, SummandDecomposition { summands }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{binomial, factorial, RandomStream};
    use num_bigint::BigInt;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// `(±1, ..., ±1)` in the real coordinates of `C^n` (imaginary parts 0).
    fn real_cube(n: usize) -> Polytope {
        let pts: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| {
                let mut p = vec![0.0; 2 * n];
                for i in 0..n {
                    p[2 * i] = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                }
                p
            })
            .collect();
        Polytope::hull(n, &pts, &tol()).unwrap()
    }

    fn cross_polytope(n: usize) -> Polytope {
        let mut pts = Vec::new();
        for i in 0..2 * n {
            for s in [1.0, -1.0] {
                let mut p = vec![0.0; 2 * n];
                p[i] = s;
                pts.push(p);
            }
        }
        Polytope::hull(n, &pts, &tol()).unwrap()
    }

    fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = RandomStream::new(seed, 77).chunk_rng(0);
        (0..count)
            .map(|_| crate::numerics::gaussian_vector(&mut rng, 2 * n))
            .collect()
    }

    #[test]
    fn single_point() {
        let p = Polytope::hull(2, &[vec![1.0, 2.0, 3.0, 4.0]], &tol()).unwrap();
        assert_eq!(p.dim_real, 0);
        assert_eq!(p.faces.len(), 1);
        assert_eq!(p.euler_characteristic(), 0);
    }

    #[test]
    fn errors() {
        assert_eq!(Polytope::hull(2, &[], &tol()).unwrap_err(), Error::EmptyInput);
        assert!(matches!(
            Polytope::hull(5, &[vec![0.0; 10]], &tol()),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn cube_face_counts_and_volumes() {
        for n in 1..=4 {
            let c = real_cube(n);
            assert_eq!(c.dim_real, n);
            let fv = c.f_vector();
            for k in 0..=n {
                assert_eq!(fv[k] as f64, 2f64.powi((n - k) as i32) * binomial(n, k));
                for id in c.face_ids_of_dim(k) {
                    assert!((c.faces[id].volume_k - 2f64.powi(k as i32)).abs() < 1e-9);
                }
            }
            assert_eq!(c.euler_characteristic(), 0);
        }
    }

    #[test]
    fn cross_polytope_face_counts_and_volumes() {
        let t = cross_polytope(2);
        // f_k = 2^{k+1} C(4, k+1)
        for k in 0..4 {
            assert_eq!(t.f_vector()[k] as f64, 2f64.powi(k as i32 + 1) * binomial(4, k + 1));
        }
        assert_eq!(t.f_vector()[2], 32);
        for k in 1..4 {
            for id in t.face_ids_of_dim(k) {
                let expected = ((k + 1) as f64).sqrt() / factorial(k);
                assert!((t.faces[id].volume_k - expected).abs() < 1e-9, "k={k}");
            }
        }
        assert!((t.volume() - 16.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_face_volumes() {
        // Standard simplex conv(e_1, ..., e_4) in R^4; k-faces have volume sqrt(k+1)/k!.
        let pts: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                let mut p = vec![0.0; 4];
                p[i] = 1.0;
                p
            })
            .collect();
        let s = Polytope::hull(2, &pts, &tol()).unwrap();
        assert_eq!(s.dim_real, 3);
        for k in 0..=3 {
            assert_eq!(s.f_vector()[k] as f64, binomial(4, k + 1));
            for id in s.face_ids_of_dim(k) {
                let expected = ((k + 1) as f64).sqrt() / factorial(k);
                assert!((s.faces[id].volume_k - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn support_on_square() {
        let sq = Polytope::hull(
            1,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            &tol(),
        )
        .unwrap();
        let (h, f) = sq.support(&[1.0, 0.0]);
        assert_eq!(h, 1.0);
        assert_eq!(sq.faces[f].k, 0);
        assert_eq!(sq.vertices[sq.faces[f].vertex_ids[0]], vec![1.0, 0.0]);

        let s = 0.5f64.sqrt();
        let (h, f) = sq.support(&[s, s]);
        let brute = sq.vertices.iter().map(|v| v[0] * s + v[1] * s).fold(f64::MIN, f64::max);
        assert!((h - brute).abs() < 1e-15);
        assert_eq!(sq.faces[f].k, 1);

        let (h, f) = sq.support(&[0.0, 0.0]);
        assert_eq!(h, 0.0);
        assert_eq!(f, sq.top_id());
    }

    #[test]
    fn witnesses_select_their_faces() {
        for seed in 0..5 {
            let p = Polytope::hull(2, &random_points(2, 9, seed), &tol()).unwrap();
            assert_eq!(p.euler_characteristic(), 0);
            for (id, f) in p.faces.iter().enumerate() {
                assert_eq!(p.support(&f.witness).1, id);
            }
        }
    }

    #[test]
    fn hull_is_idempotent() {
        let p = Polytope::hull(2, &random_points(2, 12, 3), &tol()).unwrap();
        let q = Polytope::hull(2, &p.vertices, &tol()).unwrap();
        assert_eq!(p.vertices, q.vertices);
        let a: Vec<&Vec<usize>> = p.faces.iter().map(|f| &f.vertex_ids).collect();
        let b: Vec<&Vec<usize>> = q.faces.iter().map(|f| &f.vertex_ids).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn lower_dimensional_inputs() {
        // Octahedron in (x1, y1, x2).
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut p = vec![0.0; 4];
                p[i] = s;
                pts.push(p);
            }
        }
        let o = Polytope::hull(2, &pts, &tol()).unwrap();
        assert_eq!(o.dim_real, 3);
        assert_eq!(o.f_vector(), vec![6, 12, 8, 1]);
        for id in o.face_ids_of_dim(2) {
            assert!((o.faces[id].volume_k - 3f64.sqrt() / 2.0).abs() < 1e-12);
        }
        let seg = Polytope::hull(1, &[vec![0.0, 0.0], vec![3.0, 4.0], vec![1.5, 2.0]], &tol()).unwrap();
        assert_eq!(seg.dim_real, 1);
        assert_eq!(seg.vertices.len(), 2);
        assert!((seg.volume() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exact_hull_agrees() {
        let pts: Vec<Vec<i64>> = vec![
            vec![0, 0, 0, 0],
            vec![2, 0, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, 2, 0],
            vec![1, 1, 1, 0],
            vec![2, 2, 2, 0],
        ];
        let exact: Vec<Vec<BigRational>> = pts
            .iter()
            .map(|p| p.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let float: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect();
        let a = Polytope::hull_exact(2, &exact, &tol()).unwrap();
        let b = Polytope::hull(2, &float, &tol()).unwrap();
        assert_eq!(a.f_vector(), b.f_vector());
        assert!((a.volume() - b.volume()).abs() < 1e-12);
    }

    #[test]
    fn pyramid_formulas() {
        for seed in 0..5 {
            let p = Polytope::hull(2, &random_points(2, 10, 40 + seed), &tol()).unwrap();
            let d = p.dim_real;
            let mut balance = vec![0.0; 4];
            let mut pyramid = 0.0;
            for (f, nrm) in p.facet_normals() {
                let vol = p.faces[f].volume_k;
                balance.iter_mut().zip(&nrm).for_each(|(b, x)| *b += vol * x);
                pyramid += p.support(&nrm).0 * vol;
            }
            assert!(norm(&balance) < 1e-9);
            // Oracle: fan triangulation of the full-dimensional polytope.
            assert!((pyramid / d as f64 - p.volume()).abs() < 1e-9 * p.volume());
            let simplices = crate::volumes::face_volume(&p, p.top_id()).unwrap();
            assert!((simplices - p.volume()).abs() < 1e-9 * p.volume());
        }
    }

    #[test]
    fn scale_and_translate() {
        let sq = real_cube(1);
        let i2 = Polytope::hull(1, &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![-1.0, -1.0]], &tol()).unwrap();
        assert!((i2.scale(2.0).unwrap().volume() - 4.0 * i2.volume()).abs() < 1e-12);
        assert_eq!(i2.scale(1.0).unwrap().vertices, i2.vertices);
        assert_eq!(i2.scale(0.0).unwrap().dim_real, 0);
        let t = sq.translate(&[3.0, -1.0]).unwrap();
        assert_eq!(t.vertices[0], vec![2.0, -1.0]);
        let p = Polytope::hull(2, &random_points(2, 8, 9), &tol()).unwrap();
        let q = p.scale(3.0).unwrap();
        for (a, b) in p.faces.iter().zip(&q.faces) {
            assert_eq!(q.support(&a.witness).1, p.support(&b.witness).1);
        }
    }

    #[test]
    fn minkowski_of_segments() {
        let a = Polytope::hull(1, &[vec![0.0, 0.0], vec![1.0, 0.0]], &tol()).unwrap();
        let b = Polytope::hull(1, &[vec![0.0, 0.0], vec![0.0, 1.0]], &tol()).unwrap();
        let (s, dec) = minkowski_sum(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.vertices.len(), 4);
        assert!((s.volume() - 1.0).abs() < 1e-12);
        for id in s.face_ids_of_dim(1) {
            let ks: Vec<usize> = dec.summands[id]
                .iter()
                .zip([&a, &b])
                .map(|(&f, p)| p.faces[f].k)
                .collect();
            assert_eq!(ks.iter().sum::<usize>(), 1);
        }
        let pt = Polytope::hull(1, &[vec![2.0, 3.0]], &tol()).unwrap();
        let (s, dec) = minkowski_sum(&[a.clone(), pt]).unwrap();
        assert_eq!(s.vertices, vec![vec![2.0, 3.0], vec![3.0, 3.0]]);
        assert!(dec.summands.iter().all(|d| d[1] == 0));
    }

    #[test]
    fn minkowski_summand_spaces() {
        for seed in 0..5 {
            let a = Polytope::hull(2, &random_points(2, 3, 100 + seed), &tol()).unwrap();
            let b = Polytope::hull(2, &random_points(2, 3, 200 + seed), &tol()).unwrap();
            let (s, dec) = minkowski_sum(&[a.clone(), b.clone()]).unwrap();
            assert_eq!(s.euler_characteristic(), 0);
            for (id, f) in s.faces.iter().enumerate() {
                let fa = &a.faces[dec.summands[id][0]];
                let fb = &b.faces[dec.summands[id][1]];
                let mut vs = fa.hull_basis.vectors.clone();
                vs.extend(fb.hull_basis.vectors.clone());
                let span = SubspaceBasis::span(2, &vs, &tol()).unwrap();
                assert_eq!(span.dim(), f.k);
                for v in &f.hull_basis.vectors {
                    assert!(span.residual(v) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn sum_with_reflection_is_symmetric() {
        let p = Polytope::hull(2, &random_points(2, 5, 17), &tol()).unwrap();
        let neg: Vec<Vec<f64>> = p.vertices.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let q = Polytope::hull(2, &neg, &tol()).unwrap();
        let (s, _) = minkowski_sum(&[p, q]).unwrap();
        for v in &s.vertices {
            let m: Vec<f64> = v.iter().map(|x| -x).collect();
            assert!(s.vertices.iter().any(|w| norm(&sub(w, &m)) < 1e-9));
        }
    }

    #[test]
    fn vertex_product_cap() {
        let big = Polytope::hull(2, &random_points(2, 40, 1), &tol()).unwrap();
        let parts = vec![big.clone(); 5];
        let count: usize = parts.iter().map(|p| p.vertices.len()).product();
        if count > VERTEX_PRODUCT_CAP {
            assert!(matches!(minkowski_sum(&parts), Err(Error::VertexProductCapExceeded { .. })));
        }
    }

    #[test]
    fn split_square() {
        let i2 = Polytope::hull(1, &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![-1.0, -1.0]], &tol()).unwrap();
        let r = i2.split(&[1.0, 0.0], 0.0).unwrap();
        assert!((r.plus.as_ref().unwrap().volume() - 2.0).abs() < 1e-12);
        assert!((r.minus.as_ref().unwrap().volume() - 2.0).abs() < 1e-12);
        assert!((r.zero.as_ref().unwrap().volume() - 2.0).abs() < 1e-12);
        let miss = i2.split(&[1.0, 0.0], -5.0).unwrap();
        assert!(miss.minus.is_none() && miss.zero.is_none());
        assert_eq!(miss.plus.unwrap().vertices, i2.vertices);
    }

    #[test]
    fn split_additivity() {
        for seed in 0..10 {
            let pts = random_points(2, 5, 300 + seed);
            let p = Polytope::hull(2, &pts, &tol()).unwrap();
            let mut rng = RandomStream::new(seed, 5).chunk_rng(0);
            let u = crate::numerics::unit_vector(&mut rng, 4);
            let c = dot(&u, &p.faces[p.top_id()].centroid);
            let r = p.split(&u, c).unwrap();
            let total = r.plus.as_ref().unwrap().volume() + r.minus.as_ref().unwrap().volume();
            assert!((total - p.volume()).abs() < 1e-9 * p.volume().max(1.0));
            let mut merged = r.plus.unwrap().vertices;
            merged.extend(r.minus.unwrap().vertices);
            let m = Polytope::hull(2, &merged, &tol()).unwrap();
            assert_eq!(m.vertices.len(), p.vertices.len());
        }
    }
}
