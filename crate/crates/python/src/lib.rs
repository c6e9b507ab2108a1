use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

use pv::cone::AngleConfig;
use pv::complex_linalg::{rho, SubspaceBasis};
use pv::pseudovolume as psv;
use pv::smooth::{self, SupportBody};
use pv::volumes::{self, MixedDiscriminantInput};
use pv::{RandomStream, Tolerance};

const SAMPLES: usize = 2_000_000;
const SEED: u64 = 42;

fn err(e: pv::Error) -> PyErr {
    match e {
        pv::Error::DimensionCapExceeded { .. } | pv::Error::VertexProductCapExceeded { .. } => {
            PyMemoryError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tolerance(tol: Option<f64>) -> PyResult<Tolerance> {
    match tol {
        Some(t) => Tolerance::uniform(t).map_err(err),
        None => Ok(Tolerance::default()),
    }
}

/// Convex polytope in C^n given by points in (re1, im1, re2, im2, ...) coordinates.
#[pyclass(name = "Polytope", module = "pseudovol", from_py_object)]
#[derive(Clone)]
struct PyPolytope {
    inner: pv::polytope::Polytope,
}

#[pymethods]
impl PyPolytope {
    #[new]
    #[pyo3(signature = (n, points, tol = None))]
    fn new(n: usize, points: Vec<Vec<f64>>, tol: Option<f64>) -> PyResult<Self> {
        let inner = pv::polytope::Polytope::hull(n, &points, &tolerance(tol)?).map_err(err)?;
        Ok(PyPolytope { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.ambient_n
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim_real
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices.clone()
    }

    fn f_vector(&self) -> Vec<usize> {
        self.inner.f_vector()
    }

    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    /// Distortion coefficient of the direction space of the affine hull.
    fn rho(&self) -> PyResult<f64> {
        Ok(rho(self.inner.affine_basis(), self.inner.tolerance()).map_err(err)?.rho)
    }

    /// `rho` of every `k`-face, in face order.
    fn face_rhos(&self, k: usize) -> Vec<f64> {
        self.inner.face_ids_of_dim(k).map(|f| self.inner.faces[f].rho).collect()
    }

    /// `(value, std_error)` of the n-pseudovolume.
    #[pyo3(signature = (samples = SAMPLES, seed = SEED))]
    fn pseudovolume(&self, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let r = psv::pseudovolume(&self.inner, &AngleConfig::new(samples, seed)).map_err(err)?;
        Ok((r.value, r.mc_std_error))
    }

    #[pyo3(signature = (k, samples = SAMPLES, seed = SEED))]
    fn intrinsic_volume(&self, k: usize, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let e = volumes::intrinsic_volume(&self.inner, k, &AngleConfig::new(samples, seed)).map_err(err)?;
        Ok((e.value, e.std_error))
    }

    /// Coefficients of `P_n(self + eps B)` in increasing powers of eps.
    #[pyo3(signature = (samples = SAMPLES, seed = SEED))]
    fn eps_coefficients(&self, samples: usize, seed: u64) -> PyResult<Vec<(f64, f64)>> {
        let e = psv::eps_neighborhood_pseudovolume(&self.inner, 1.0, &AngleConfig::new(samples, seed)).map_err(err)?;
        Ok(e.coefficients.iter().map(|c| (c.value, c.std_error)).collect())
    }

    fn scale(&self, factor: f64) -> PyResult<Self> {
        Ok(PyPolytope {
            inner: self.inner.scale(factor).map_err(err)?,
        })
    }

    fn translate(&self, t: Vec<f64>) -> PyResult<Self> {
        Ok(PyPolytope {
            inner: self.inner.translate(&t).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Polytope(n={}, dim={}, vertices={})",
            self.inner.ambient_n,
            self.inner.dim_real,
            self.inner.vertices.len()
        )
    }
}

/// Convex body given by a support function with a complex Hessian.
#[pyclass(name = "SmoothBody", module = "pseudovol", from_py_object)]
#[derive(Clone)]
struct PySmoothBody {
    inner: SupportBody,
}

#[pymethods]
impl PySmoothBody {
    #[staticmethod]
    fn ball(n: usize) -> PyResult<Self> {
        Ok(PySmoothBody {
            inner: SupportBody::ball(n).map_err(err)?,
        })
    }

    /// Unit ball of the real hyperplane `Re z_1 = 0`.
    #[staticmethod]
    fn lower_ball(n: usize) -> PyResult<Self> {
        Ok(PySmoothBody {
            inner: SupportBody::lower_ball(n).map_err(err)?,
        })
    }

    /// `h(x) = sqrt(x^T Q x)` for a positive definite real `2n x 2n` matrix.
    #[staticmethod]
    fn ellipsoid(n: usize, q: Vec<Vec<f64>>) -> PyResult<Self> {
        let d = q.len();
        if q.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("Q must be square"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| q[i][j]);
        Ok(PySmoothBody {
            inner: SupportBody::ellipsoid(n, m).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.ambient_n
    }

    fn support(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != 2 * self.inner.ambient_n {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.inner.support(&x))
    }

    #[pyo3(signature = (samples = SAMPLES, seed = SEED))]
    fn pseudovolume(&self, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let r = smooth::mc_pseudovolume(&self.inner, samples, RandomStream::new(seed, 0)).map_err(err)?;
        Ok((r.value, r.std_error))
    }
}

#[pyfunction]
#[pyo3(signature = (parts, samples = SAMPLES, seed = SEED))]
fn mixed_pseudovolume(parts: Vec<PyPolytope>, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let ps: Vec<_> = parts.into_iter().map(|p| p.inner).collect();
    let e = psv::mixed_pseudovolume(&ps, &AngleConfig::new(samples, seed)).map_err(err)?;
    Ok((e.value, e.std_error))
}

/// Mixed pseudovolume with the remaining `n - len(parts)` slots taken by the unit ball.
#[pyfunction]
#[pyo3(signature = (parts, samples = SAMPLES, seed = SEED))]
fn mixed_with_ball(parts: Vec<PyPolytope>, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let ps: Vec<_> = parts.into_iter().map(|p| p.inner).collect();
    let e = psv::mixed_with_ball(&ps, &AngleConfig::new(samples, seed)).map_err(err)?;
    Ok((e.value, e.std_error))
}

#[pyfunction]
#[pyo3(signature = (bodies, samples = SAMPLES, seed = SEED, method = "interior"))]
fn mixed_smooth(bodies: Vec<PySmoothBody>, samples: usize, seed: u64, method: &str) -> PyResult<(f64, f64)> {
    let refs: Vec<&SupportBody> = bodies.iter().map(|b| &b.inner).collect();
    let stream = RandomStream::new(seed, 0);
    let r = match method {
        "interior" => smooth::mc_mixed_pseudovolume(&refs, samples, stream),
        "boundary" => smooth::boundary_mixed_pseudovolume(&refs, samples, stream),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    Ok((r.value, r.std_error))
}

#[pyfunction]
fn ball_pseudovolume(n: usize) -> f64 {
    smooth::ball_pseudovolume(n)
}

#[pyfunction]
fn lower_ball_pseudovolume(n: usize) -> f64 {
    smooth::lower_ball_pseudovolume(n)
}

/// Distortion coefficient of the real span of `vectors` in C^n.
#[pyfunction]
#[pyo3(signature = (n, vectors, tol = None))]
fn rho_of_span(n: usize, vectors: Vec<Vec<f64>>, tol: Option<f64>) -> PyResult<f64> {
    let tol = tolerance(tol)?;
    let basis = SubspaceBasis::span(n, &vectors, &tol).map_err(err)?;
    Ok(rho(&basis, &tol).map_err(err)?.rho)
}

/// Mixed discriminant of `n` complex `n x n` matrices given as lists of rows.
#[pyfunction]
fn mixed_discriminant(matrices: Vec<Vec<Vec<Complex64>>>) -> PyResult<Complex64> {
    let mut ms = Vec::with_capacity(matrices.len());
    for rows in matrices {
        let r = rows.len();
        if rows.iter().any(|row| row.len() != r) {
            return Err(PyValueError::new_err("matrices must be square"));
        }
        ms.push(DMatrix::from_fn(r, r, |i, j| rows[i][j]));
    }
    let input = MixedDiscriminantInput::new(ms).map_err(err)?;
    volumes::mixed_discriminant(&input).map_err(err)
}

#[pymodule]
fn pseudovol(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPolytope>()?;
    m.add_class::<PySmoothBody>()?;
    m.add_function(wrap_pyfunction!(mixed_pseudovolume, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_with_ball, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(ball_pseudovolume, m)?)?;
    m.add_function(wrap_pyfunction!(lower_ball_pseudovolume, m)?)?;
    m.add_function(wrap_pyfunction!(rho_of_span, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_discriminant, m)?)?;
    Ok(())
}
