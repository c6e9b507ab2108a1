//! Double description conversion from points to facets, and the face lattice
//! recovered from the facet incidences.
//!
//! The conversion is generic over the scalar field: `f64` with a coincidence
//! tolerance, or `BigRational` for exact lattice inputs.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) trait Scalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Sign with respect to a coincidence tolerance (ignored when exact).
    fn sign(&self, eps: f64) -> i8;
    fn magnitude(&self) -> f64;
    /// Rescales a ray to keep entries bounded; direction is preserved.
    fn normalize(v: &mut [Self]);
}

impl Scalar for f64 {
    fn sign(&self, eps: f64) -> i8 {
        if *self > eps {
            1
        } else if *self < -eps {
            -1
        } else {
            0
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn normalize(v: &mut [Self]) {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
    }
}

impl Scalar for BigRational {
    fn sign(&self, _eps: f64) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn normalize(v: &mut [Self]) {
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return;
        }
        for (slot, i) in v.iter_mut().zip(ints) {
            *slot = BigRational::from_integer(i / &g);
        }
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Picks `rows[0].len()` linearly independent rows by pivoted Gram-Schmidt.
fn independent_rows<S: Scalar>(rows: &[Vec<S>], eps: f64) -> Option<Vec<usize>> {
    let dim = rows[0].len();
    let mut chosen = Vec::with_capacity(dim);
    let mut residuals: Vec<Vec<S>> = rows.to_vec();
    for _ in 0..dim {
        let mut best = None;
        let mut best_size = 0.0;
        for (i, r) in residuals.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let size = dot(r, r).magnitude();
            if size > best_size {
                best_size = size;
                best = Some(i);
            }
        }
        let i = best?;
        if dot(&residuals[i], &residuals[i]).sign(eps * eps) <= 0 {
            return None;
        }
        let b = residuals[i].clone();
        let bb = dot(&b, &b);
        for r in residuals.iter_mut() {
            let c = dot(r, &b) / bb.clone();
            for (x, y) in r.iter_mut().zip(&b) {
                *x = x.clone() - c.clone() * y.clone();
            }
        }
        chosen.push(i);
    }
    Some(chosen)
}

/// Inverse of a square matrix by Gauss-Jordan elimination with pivoting on
/// magnitude.
fn inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))?;
        if a[piv][col].sign(0.0) == 0 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() / p.clone();
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let f = row[col].clone();
            if f.sign(0.0) == 0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Facets of the convex hull of full-dimensional points in `R^m`, each given
/// as the set of input indices lying on it.
///
/// Rows `(1, p_i)` define the cone `{x : <(1, p_i), x> >= 0}` whose extreme
/// rays `(h, -u)` are the facet inequalities `<u, p> <= h`.
pub(crate) fn facets<S: Scalar>(points: &[Vec<S>], eps: f64) -> Option<Vec<Vec<usize>>> {
    let m = points.first()?.len();
    let rows: Vec<Vec<S>> = points
        .iter()
        .map(|p| {
            let mut r = Vec::with_capacity(m + 1);
            r.push(S::one());
            r.extend(p.iter().cloned());
            r
        })
        .collect();
    let total = rows.len();
    let init = independent_rows(&rows, eps)?;
    let a0: Vec<Vec<S>> = init.iter().map(|&i| rows[i].clone()).collect();
    let inv = inverse(&a0)?;

    let mut rays: Vec<Vec<S>> = Vec::new();
    let mut zeros: Vec<FixedBitSet> = Vec::new();
    for j in 0..=m {
        let mut ray: Vec<S> = (0..=m).map(|i| inv[i][j].clone()).collect();
        S::normalize(&mut ray);
        let mut z = FixedBitSet::with_capacity(total);
        for (t, &row) in init.iter().enumerate() {
            if t != j {
                z.insert(row);
            }
        }
        rays.push(ray);
        zeros.push(z);
    }

    let pending: Vec<usize> = (0..total).filter(|i| !init.contains(i)).collect();
    for &r in &pending {
        let a = &rows[r];
        let values: Vec<S> = rays.iter().map(|ray| dot(a, ray)).collect();
        let signs: Vec<i8> = values.iter().map(|v| v.sign(eps)).collect();
        if signs.iter().all(|&s| s >= 0) {
            for (z, &s) in zeros.iter_mut().zip(&signs) {
                if s == 0 {
                    z.insert(r);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| signs[i] < 0).collect();
        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for (p, q) in plus.iter().flat_map(|&p| minus.iter().map(move |&q| (p, q))) {
            let mut common = zeros[p].clone();
            common.intersect_with(&zeros[q]);
            if common.count_ones(..) + 1 < m {
                continue;
            }
            let blocked = (0..rays.len()).any(|o| o != p && o != q && common.is_subset(&zeros[o]));
            if blocked {
                continue;
            }
            let (vp, vq) = (values[p].clone(), values[q].clone());
            let mut ray: Vec<S> = rays[q]
                .iter()
                .zip(&rays[p])
                .map(|(x, y)| vp.clone() * x.clone() - vq.clone() * y.clone())
                .collect();
            S::normalize(&mut ray);
            common.insert(r);
            new_rays.push(ray);
            new_zeros.push(common);
        }
        let mut next_rays = Vec::new();
        let mut next_zeros = Vec::new();
        for i in 0..rays.len() {
            if signs[i] >= 0 {
                let mut z = zeros[i].clone();
                if signs[i] == 0 {
                    z.insert(r);
                }
                next_rays.push(rays[i].clone());
                next_zeros.push(z);
            }
        }
        next_rays.extend(new_rays);
        next_zeros.extend(new_zeros);
        rays = next_rays;
        zeros = next_zeros;
    }

    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for z in zeros {
        let set: Vec<usize> = z.ones().collect();
        if set.len() < m {
            continue;
        }
        if seen.insert(set.clone(), ()).is_none() {
            out.push(set);
        }
    }
    Some(out)
}

/// A face of the lattice as a set of input point indices.
#[derive(Debug, Clone)]
pub(crate) struct LatticeFace {
    pub points: Vec<usize>,
    pub dim: usize,
    /// Indices of the faces one dimension lower contained in this face.
    pub children: Vec<usize>,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    intersect(a, b).len() == a.len()
}

/// Full face lattice by recursive facet descent: the facets of a face `F` are
/// the inclusion-maximal sets `F ∩ H` over global facets `H` not containing
/// `F`. Faces are returned sorted by dimension, the whole polytope last.
pub(crate) fn build_lattice(num_points: usize, dim: usize, facets: &[Vec<usize>]) -> Vec<LatticeFace> {
    let top: Vec<usize> = (0..num_points).collect();
    let mut levels: Vec<Vec<LatticeFace>> = vec![Vec::new(); dim + 1];
    levels[dim].push(LatticeFace {
        points: top,
        dim,
        children: Vec::new(),
    });
    if dim > 0 {
        let mut facet_sets: Vec<Vec<usize>> = facets
            .iter()
            .map(|f| {
                let mut f = f.clone();
                f.sort_unstable();
                f
            })
            .collect();
        facet_sets.sort();
        facet_sets.dedup();
        levels[dim][0].children = (0..facet_sets.len()).collect();
        levels[dim - 1] = facet_sets
            .iter()
            .map(|f| LatticeFace {
                points: f.clone(),
                dim: dim - 1,
                children: Vec::new(),
            })
            .collect();
        for k in (1..dim).rev() {
            let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut lower: Vec<LatticeFace> = Vec::new();
            for face in levels[k].iter_mut() {
                let mut cands: Vec<Vec<usize>> = facet_sets
                    .iter()
                    .filter(|h| !is_subset(&face.points, h))
                    .map(|h| intersect(&face.points, h))
                    .filter(|s| !s.is_empty())
                    .collect();
                cands.sort();
                cands.dedup();
                let maximal: Vec<Vec<usize>> = cands
                    .iter()
                    .filter(|c| !cands.iter().any(|o| o.len() > c.len() && is_subset(c, o)))
                    .cloned()
                    .collect();
                for c in maximal {
                    let id = *index.entry(c.clone()).or_insert_with(|| {
                        lower.push(LatticeFace {
                            points: c,
                            dim: k - 1,
                            children: Vec::new(),
                        });
                        lower.len() - 1
                    });
                    face.children.push(id);
                }
            }
            levels[k - 1] = lower;
        }
    }
    // Flatten with global indices, lowest dimension first.
    let mut offsets = vec![0usize; dim + 2];
    for k in 0..=dim {
        offsets[k + 1] = offsets[k] + levels[k].len();
    }
    let mut out = Vec::with_capacity(offsets[dim + 1]);
    for (k, level) in levels.into_iter().enumerate() {
        for mut f in level {
            if k > 0 {
                f.children = f.children.iter().map(|c| c + offsets[k - 1]).collect();
            }
            out.push(f);
        }
    }
    out
}
