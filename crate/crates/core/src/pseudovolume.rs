//! Intrinsic and mixed φ-volumes of polytopes, and the pseudovolume `P_n`
//! and mixed pseudovolume `Q_n` as their `ρ`-weighted instances.

use serde::{Deserialize, Serialize};

use crate::complex_linalg::{rho, SubspaceBasis};
use crate::cone::{angle_table, AngleConfig};
use crate::error::{Error, Result};
use crate::numerics::{binomial, factorial, kappa, Tolerance};
use crate::polytope::{minkowski_sum, Polytope};
use crate::volumes::mixed_volume;

/// A real weight on linear subspaces of `C^n`.
pub trait WeightFunction: Sync {
    fn evaluate(&self, basis: &SubspaceBasis) -> f64;
}

/// The volume distortion coefficient `ρ`, with values below `rank_eps`
/// treated as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct RhoWeight {
    pub tol: Tolerance,
}

impl WeightFunction for RhoWeight {
    fn evaluate(&self, basis: &SubspaceBasis) -> f64 {
        match rho(basis, &self.tol) {
            Ok(r) if r.rho >= self.tol.rank_eps => r.rho,
            _ => 0.0,
        }
    }
}

/// `φ ≡ 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitWeight;

impl WeightFunction for UnitWeight {
    fn evaluate(&self, _basis: &SubspaceBasis) -> f64 {
        1.0
    }
}

/// Wraps a closure as a weight.
pub struct FnWeight<F>(pub F);

impl<F: Fn(&SubspaceBasis) -> f64 + Sync> WeightFunction for FnWeight<F> {
    fn evaluate(&self, basis: &SubspaceBasis) -> f64 {
        (self.0)(basis)
    }
}

/// A value with its Monte Carlo standard error (0 when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }

    pub fn scaled(self, c: f64) -> Self {
        Estimate {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceTerm {
    pub face_id: usize,
    pub vertex_ids: Vec<usize>,
    /// `φ(E_Δ)`; `ρ(Δ)` for the pseudovolume.
    pub weight: f64,
    pub volume: f64,
    pub angle: f64,
    pub angle_std_error: f64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudovolumeReport {
    pub value: f64,
    pub per_face_terms: Vec<FaceTerm>,
    pub mc_std_error: f64,
}

impl PseudovolumeReport {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            std_error: self.mc_std_error,
        }
    }
}

/// Term-by-term `v_k^φ(Γ) = sum_{k-faces} φ(E_Δ) vol_k(Δ) ψ_Γ(Δ)`.
pub fn phi_volume_report(
    p: &Polytope,
    k: usize,
    phi: &dyn WeightFunction,
    angles: &AngleConfig,
) -> Result<PseudovolumeReport> {
    if k == 0 {
        let w = phi.evaluate(&SubspaceBasis::zero(p.ambient_n));
        return Ok(PseudovolumeReport {
            value: w,
            per_face_terms: Vec::new(),
            mc_std_error: 0.0,
        });
    }
    if k > p.dim_real {
        return Ok(PseudovolumeReport {
            value: 0.0,
            per_face_terms: Vec::new(),
            mc_std_error: 0.0,
        });
    }
    let weighted: Vec<(usize, f64)> = p
        .face_ids_of_dim(k)
        .map(|id| (id, phi.evaluate(&p.faces[id].hull_basis)))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let ids: Vec<usize> = weighted.iter().map(|&(id, _)| id).collect();
    let table = angle_table(p, &ids, angles)?;
    let mut terms = Vec::with_capacity(weighted.len());
    let mut value = 0.0;
    let mut err = 0.0;
    for (id, w) in weighted {
        let face = &p.faces[id];
        let a = table[&id];
        let term = w * face.volume_k * a.value;
        value += term;
        err += (w * face.volume_k).abs() * a.std_error;
        terms.push(FaceTerm {
            face_id: id,
            vertex_ids: face.vertex_ids.clone(),
            weight: w,
            volume: face.volume_k,
            angle: a.value,
            angle_std_error: a.std_error,
            term,
        });
    }
    Ok(PseudovolumeReport {
        value,
        per_face_terms: terms,
        mc_std_error: err,
    })
}

/// The `k`-th intrinsic φ-volume; `φ({0})` for `k = 0` and zero for `k > d`.
pub fn intrinsic_phi_volume(
    p: &Polytope,
    k: usize,
    phi: &dyn WeightFunction,
    angles: &AngleConfig,
) -> Result<Estimate> {
    if k > 2 * p.ambient_n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the real dimension {}",
            2 * p.ambient_n
        )));
    }
    Ok(phi_volume_report(p, k, phi, angles)?.estimate())
}

fn check_parts(parts: &[Polytope]) -> Result<usize> {
    let first = parts.first().ok_or(Error::EmptyInput)?;
    for q in parts {
        if q.ambient_n != first.ambient_n {
            return Err(Error::AmbientMismatch {
                expected: first.ambient_n,
                found: q.ambient_n,
            });
        }
    }
    Ok(first.ambient_n)
}

/// Mixed φ-volume `V_k^φ(Γ_1, ..., Γ_k)` summed over the `k`-faces `Δ` of
/// `Γ = sum Γ_l`: `φ(E_Δ) V_k(Δ_1, ..., Δ_k) ψ_Γ(Δ)` with `Δ_l` the summands.
pub fn mixed_phi_volume(parts: &[Polytope], phi: &dyn WeightFunction, angles: &AngleConfig) -> Result<Estimate> {
    check_parts(parts)?;
    let k = parts.len();
    let (sum, dec) = if k == 1 {
        let p = parts[0].clone();
        let summands = (0..p.faces.len()).map(|i| vec![i]).collect();
        (p, crate::polytope::SummandDecomposition { summands })
    } else {
        minkowski_sum(parts)?
    };
    if k > sum.dim_real {
        return Ok(Estimate::exact(0.0));
    }
    let mut contributions = Vec::new();
    for id in sum.face_ids_of_dim(k) {
        let face = &sum.faces[id];
        let w = phi.evaluate(&face.hull_basis);
        if w == 0.0 {
            continue;
        }
        let dims: usize = dec.summands[id]
            .iter()
            .zip(parts)
            .map(|(&f, q)| q.faces[f].k)
            .sum();
        if dims < k {
            continue;
        }
        let faces: Vec<Polytope> = dec.summands[id]
            .iter()
            .zip(parts)
            .map(|(&f, q)| q.face_polytope(f))
            .collect::<Result<_>>()?;
        let v = mixed_volume(&faces, &face.hull_basis)?;
        if v != 0.0 {
            contributions.push((id, w * v));
        }
    }
    let ids: Vec<usize> = contributions.iter().map(|&(id, _)| id).collect();
    let table = angle_table(&sum, &ids, angles)?;
    let mut value = 0.0;
    let mut err = 0.0;
    for (id, wv) in contributions {
        let a = table[&id];
        value += wv * a.value;
        err += wv.abs() * a.std_error;
    }
    Ok(Estimate { value, std_error: err })
}

/// `V_k^φ` by polarization:
/// `(1/k!) sum_{∅≠I} (-1)^{k-|I|} v_k^φ(sum_{l∈I} Γ_l)`.
pub fn mixed_phi_volume_polarized(
    parts: &[Polytope],
    phi: &dyn WeightFunction,
    angles: &AngleConfig,
) -> Result<Estimate> {
    check_parts(parts)?;
    let k = parts.len();
    let mut value = 0.0;
    let mut err = 0.0;
    for mask in 1usize..(1 << k) {
        let chosen: Vec<Polytope> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| parts[i].clone())
            .collect();
        let body = if chosen.len() == 1 {
            chosen.into_iter().next().expect("one body")
        } else {
            minkowski_sum(&chosen)?.0
        };
        let e = intrinsic_phi_volume(&body, k, phi, &angles.for_body(mask as u64))?;
        let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        value += sign * e.value;
        err += e.std_error;
    }
    let f = factorial(k);
    Ok(Estimate {
        value: value / f,
        std_error: err / f,
    })
}

/// `P_n(Γ) = sum over n-faces of ρ(Δ) vol_n(Δ) ψ_Γ(Δ)`.
pub fn pseudovolume(p: &Polytope, angles: &AngleConfig) -> Result<PseudovolumeReport> {
    let phi = RhoWeight { tol: *p.tolerance() };
    phi_volume_report(p, p.ambient_n, &phi, angles)
}

fn rho_weight(parts: &[Polytope]) -> RhoWeight {
    RhoWeight {
        tol: *parts[0].tolerance(),
    }
}

/// `Q_n(Γ_1, ..., Γ_n)` from the faces of the Minkowski sum.
pub fn mixed_pseudovolume(parts: &[Polytope], angles: &AngleConfig) -> Result<Estimate> {
    let n = check_parts(parts)?;
    if parts.len() != n {
        return Err(Error::SizeMismatch(format!("Q_n needs n = {n} bodies, got {}", parts.len())));
    }
    mixed_phi_volume(parts, &rho_weight(parts), angles)
}

/// `Q_n` by polarization of pseudovolumes of subset sums.
pub fn mixed_pseudovolume_polarized(parts: &[Polytope], angles: &AngleConfig) -> Result<Estimate> {
    let n = check_parts(parts)?;
    if parts.len() != n {
        return Err(Error::SizeMismatch(format!("Q_n needs n = {n} bodies, got {}", parts.len())));
    }
    mixed_phi_volume_polarized(parts, &rho_weight(parts), angles)
}

/// `2^{n-k} κ_{2n-k} / κ_n`, the weight of `v_k^ρ` in the ε-expansion.
pub fn ball_coefficient(n: usize, k: usize) -> f64 {
    2f64.powi((n - k) as i32) * kappa(2 * n - k) / kappa(n)
}

/// `Q_n(A_1, ..., A_k, B_{2n}[n-k]) = 2^{n-k} κ_{2n-k} V_k^ρ(A_1..A_k) / (κ_n C(n,k))`.
pub fn mixed_with_ball(parts: &[Polytope], angles: &AngleConfig) -> Result<Estimate> {
    let n = check_parts(parts)?;
    let k = parts.len();
    if k > n {
        return Err(Error::SizeMismatch(format!("at most n = {n} polytopes, got {k}")));
    }
    let v = mixed_phi_volume(parts, &rho_weight(parts), angles)?;
    Ok(v.scaled(ball_coefficient(n, k) / binomial(n, k)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsExpansion {
    /// `coefficients[j]` multiplies `ε^j`.
    pub coefficients: Vec<Estimate>,
    pub epsilon: f64,
    pub value: Estimate,
}

impl EpsExpansion {
    pub fn evaluate(&self, eps: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c.value * eps.powi(j as i32))
            .sum()
    }
}

/// `P_n(Γ + ε B) = sum_k 2^{n-k} κ_{2n-k} / κ_n v_k^ρ(Γ) ε^{n-k}`.
pub fn eps_neighborhood_pseudovolume(p: &Polytope, eps: f64, angles: &AngleConfig) -> Result<EpsExpansion> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be >= 0")));
    }
    let n = p.ambient_n;
    let phi = RhoWeight { tol: *p.tolerance() };
    let mut coefficients = vec![Estimate::exact(0.0); n + 1];
    for k in 0..=n {
        let v = intrinsic_phi_volume(p, k, &phi, &angles.for_body(k as u64))?;
        coefficients[n - k] = v.scaled(ball_coefficient(n, k));
    }
    let value = coefficients.iter().enumerate().fold(Estimate::exact(0.0), |acc, (j, c)| {
        let w = eps.powi(j as i32);
        Estimate {
            value: acc.value + c.value * w,
            std_error: acc.std_error + c.std_error * w,
        }
    });
    Ok(EpsExpansion {
        coefficients,
        epsilon: eps,
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationResidual {
    /// `|P(P+) + P(P-) - P(P) - P(P0)|`.
    pub residual: f64,
    pub combined_std_error: f64,
    /// `[P(P+), P(P-), P(P), P(P0)]`.
    pub terms: [Estimate; 4],
}

/// Valuation identity across the hyperplane `<u, x> = c`.
pub fn valuation_check(p: &Polytope, u: &[f64], c: f64, angles: &AngleConfig) -> Result<ValuationResidual> {
    let split = p.split(u, c)?;
    let pv = |q: &Option<Polytope>, i: u64| -> Result<Estimate> {
        match q {
            Some(q) => Ok(pseudovolume(q, &angles.for_body(i))?.estimate()),
            None => Ok(Estimate::exact(0.0)),
        }
    };
    let plus = pv(&split.plus, 0)?;
    let minus = pv(&split.minus, 1)?;
    let whole = pseudovolume(p, &angles.for_body(2))?.estimate();
    let zero = pv(&split.zero, 3)?;
    let terms = [plus, minus, whole, zero];
    Ok(ValuationResidual {
        residual: (plus.value + minus.value - whole.value - zero.value).abs(),
        combined_std_error: terms.iter().map(|e| e.std_error).sum(),
        terms,
    })
}
