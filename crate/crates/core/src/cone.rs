//! Dual cones of faces and outer angles.
//!
//! The outer angle of a face `Δ` of `Γ` is the fraction of directions `u` in
//! `E_Δ^⊥ ∩ E_Γ` whose supporting hyperplane touches `Γ` exactly in `Δ`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex_linalg::{dot, norm, SubspaceBasis};
use crate::error::Result;
use crate::numerics::{gaussian_vector, RandomStream, Tolerance};
use crate::polytope::Polytope;

pub const DEFAULT_SAMPLES: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: AngleMethod,
}

impl AngleEstimate {
    pub fn exact(value: f64) -> Self {
        AngleEstimate {
            value,
            std_error: 0.0,
            method: AngleMethod::Exact,
        }
    }

    fn from_counts(hits: u64, total: u64) -> Self {
        let p = hits as f64 / total as f64;
        AngleEstimate {
            value: p,
            std_error: (p * (1.0 - p) / total as f64).sqrt(),
            method: AngleMethod::MonteCarlo,
        }
    }
}

/// Sample budget and random stream for outer-angle estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleConfig {
    pub samples: usize,
    pub stream: RandomStream,
}

impl Default for AngleConfig {
    fn default() -> Self {
        AngleConfig {
            samples: DEFAULT_SAMPLES,
            stream: RandomStream::new(42, 0),
        }
    }
}

impl AngleConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        AngleConfig {
            samples,
            stream: RandomStream::new(seed, 0),
        }
    }

    /// Independent configuration for one body among several.
    pub fn for_body(&self, index: u64) -> Self {
        AngleConfig {
            samples: self.samples,
            stream: self.stream.substream(1_000_003 + index),
        }
    }
}

/// The dual cone `K_{Δ,Γ} = lineality + C`, where `lineality = E_Γ^⊥` and `C`
/// is an open polyhedral cone in `space = E_Δ^⊥ ∩ E_Γ` cut out by
/// `<u, w> < 0` for each `w` in `inequalities`.
#[derive(Debug, Clone)]
pub struct DualCone {
    pub face_id: usize,
    pub space: SubspaceBasis,
    pub lineality: SubspaceBasis,
    /// Vectors `v - p` (projected onto `space`) for vertices `v` of the faces
    /// one dimension up that are not in `Δ`.
    pub inequalities: Vec<Vec<f64>>,
}

impl DualCone {
    /// Direction-level membership through the support function.
    pub fn contains(&self, p: &Polytope, u: &[f64]) -> bool {
        p.support(u).1 == self.face_id
    }

    /// Membership through the inequalities, for `u` given in `space`
    /// coordinates.
    pub fn contains_coords(&self, g: &[f64], eps: f64) -> Option<bool> {
        classify(&self.coords_inequalities(), g, eps)
    }

    fn coords_inequalities(&self) -> Vec<Vec<f64>> {
        self.inequalities
            .iter()
            .map(|w| {
                let c = self.space.coordinates(w);
                let l = norm(&c);
                c.iter().map(|x| x / l).collect()
            })
            .collect()
    }
}

/// `Some(true)` strictly inside, `Some(false)` strictly outside, `None` within
/// `eps` of the boundary. The `ws` are unit vectors.
fn classify(ws: &[Vec<f64>], g: &[f64], eps: f64) -> Option<bool> {
    let worst = ws.iter().map(|w| dot(g, w)).fold(f64::NEG_INFINITY, f64::max);
    if ws.is_empty() {
        return Some(true);
    }
    let thr = eps * norm(g);
    if worst < -thr {
        Some(true)
    } else if worst > thr {
        Some(false)
    } else {
        None
    }
}

fn full_space(n: usize) -> SubspaceBasis {
    SubspaceBasis {
        ambient_n: n,
        vectors: (0..2 * n)
            .map(|i| {
                let mut v = vec![0.0; 2 * n];
                v[i] = 1.0;
                v
            })
            .collect(),
    }
}

pub fn dual_cone(p: &Polytope, face_id: usize) -> Result<DualCone> {
    let face = p.face(face_id)?;
    let tol: Tolerance = *p.tolerance();
    let eg = p.affine_basis();
    let lineality = eg.complement_in(&full_space(p.ambient_n), &tol);
    let space = face.hull_basis.complement_in(eg, &tol);
    let base = &p.vertices[face.vertex_ids[0]];
    let mut inequalities = Vec::new();
    for &parent in &face.parents {
        for &v in &p.faces[parent].vertex_ids {
            if face.vertex_ids.binary_search(&v).is_err() {
                let w: Vec<f64> = p.vertices[v].iter().zip(base).map(|(a, b)| a - b).collect();
                inequalities.push(space.project(&w));
            }
        }
    }
    Ok(DualCone {
        face_id,
        space,
        lineality,
        inequalities,
    })
}

/// Fraction of Gaussian directions in `R^dim` strictly inside the cone; the
/// boundary draws are discarded and redrawn.
fn monte_carlo_fraction(ws: &[Vec<f64>], dim: usize, samples: usize, stream: RandomStream, eps: f64) -> AngleEstimate {
    let hits: u64 = stream
        .map_chunks(samples, |rng, _, count| {
            let mut h = 0u64;
            let mut done = 0;
            while done < count {
                let g = gaussian_vector(rng, dim);
                match classify(ws, &g, eps) {
                    Some(true) => {
                        h += 1;
                        done += 1;
                    }
                    Some(false) => done += 1,
                    None => {}
                }
            }
            h
        })
        .into_iter()
        .sum();
    AngleEstimate::from_counts(hits, samples as u64)
}

/// Outer angle `ψ_Γ(Δ)`: exact for `Γ` itself and its facets, Monte Carlo in
/// `E_Δ^⊥ ∩ E_Γ` otherwise.
pub fn outer_angle(p: &Polytope, face_id: usize, samples: usize, stream: RandomStream) -> Result<AngleEstimate> {
    let face = p.face(face_id)?;
    if let Some(v) = face.outer_angle {
        return Ok(AngleEstimate::exact(v));
    }
    outer_angle_monte_carlo(p, face_id, samples, stream)
}

/// Monte Carlo outer angle regardless of closed forms.
pub fn outer_angle_monte_carlo(p: &Polytope, face_id: usize, samples: usize, stream: RandomStream) -> Result<AngleEstimate> {
    let cone = dual_cone(p, face_id)?;
    let dim = cone.space.dim();
    if dim == 0 {
        return Ok(AngleEstimate::exact(1.0));
    }
    let ws = cone.coords_inequalities();
    Ok(monte_carlo_fraction(&ws, dim, samples.max(1), stream, p.tolerance().geom_eps))
}

/// Angles of all vertices from a single pass over the sphere of `E_Γ`.
#[derive(Debug, Clone, Serialize)]
pub struct VertexPartition {
    /// `(face_id, angle)` for every vertex.
    pub angles: Vec<(usize, AngleEstimate)>,
    pub total: f64,
}

pub fn vertex_angle_partition(p: &Polytope, samples: usize, stream: RandomStream) -> Result<VertexPartition> {
    let ids: Vec<usize> = p.face_ids_of_dim(0).collect();
    if p.dim_real == 0 {
        return Ok(VertexPartition {
            angles: vec![(ids[0], AngleEstimate::exact(1.0))],
            total: 1.0,
        });
    }
    let eg = p.affine_basis();
    let d = eg.dim();
    let center = &p.faces[p.top_id()].centroid;
    let coords: Vec<Vec<f64>> = p
        .vertices
        .iter()
        .map(|v| {
            let w: Vec<f64> = v.iter().zip(center).map(|(a, b)| a - b).collect();
            eg.coordinates(&w)
        })
        .collect();
    let scale = coords.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let eps = p.tolerance().geom_eps;
    let samples = samples.max(1);
    let counts: Vec<Vec<u64>> = stream.map_chunks(samples, |rng, _, count| {
        let mut c = vec![0u64; coords.len()];
        let mut done = 0;
        while done < count {
            let g = gaussian_vector(rng, d);
            let thr = eps * norm(&g) * scale;
            let (mut best, mut second, mut arg) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for (i, v) in coords.iter().enumerate() {
                let s = dot(&g, v);
                if s > best {
                    second = best;
                    best = s;
                    arg = i;
                } else if s > second {
                    second = s;
                }
            }
            if best - second > thr {
                c[arg] += 1;
                done += 1;
            }
        }
        c
    });
    let mut totals = vec![0u64; coords.len()];
    for c in counts {
        totals.iter_mut().zip(c).for_each(|(a, b)| *a += b);
    }
    let angles: Vec<(usize, AngleEstimate)> = (0..coords.len())
        .map(|i| {
            let id = p.find_face(&[i]).expect("vertex face");
            (id, AngleEstimate::from_counts(totals[i], samples as u64))
        })
        .collect();
    let total = angles.iter().map(|(_, a)| a.value).sum();
    Ok(VertexPartition { angles, total })
}

/// Outer angles for a set of faces, each from its own substream; vertices
/// share one partition pass.
pub fn angle_table(p: &Polytope, face_ids: &[usize], config: &AngleConfig) -> Result<BTreeMap<usize, AngleEstimate>> {
    let mut out = BTreeMap::new();
    let vertex_count = face_ids.iter().filter(|&&f| p.faces[f].k == 0).count();
    if vertex_count > 1 && p.dim_real >= 2 {
        let part = vertex_angle_partition(p, config.samples, config.stream.substream(u64::MAX))?;
        for (id, a) in part.angles {
            if face_ids.contains(&id) {
                out.insert(id, a);
            }
        }
    }
    for &f in face_ids {
        if out.contains_key(&f) {
            continue;
        }
        out.insert(f, outer_angle(p, f, config.samples, config.stream.substream(f as u64))?);
    }
    Ok(out)
}

/// A point drawn uniformly from the sphere of a subspace.
pub fn random_direction_in<R: Rng + ?Sized>(basis: &SubspaceBasis, rng: &mut R) -> Vec<f64> {
    let g = gaussian_vector(rng, basis.dim());
    let mut u = vec![0.0; basis.real_ambient_dim()];
    for (c, b) in g.iter().zip(&basis.vectors) {
        u.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
    }
    u
}
