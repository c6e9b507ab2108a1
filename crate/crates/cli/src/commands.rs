use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;

use pseudovol::cone::{angle_table, AngleConfig};
use pseudovol::complex_linalg::rho;
use pseudovol::io::{read_body, read_polytope};
use pseudovol::numerics::binomial;
use pseudovol::polytope::Polytope;
use pseudovol::pseudovolume::{
    ball_coefficient, eps_neighborhood_pseudovolume, intrinsic_phi_volume, mixed_phi_volume_polarized,
    mixed_pseudovolume, mixed_pseudovolume_polarized, mixed_with_ball, phi_volume_report, pseudovolume, Estimate,
    RhoWeight, UnitWeight, WeightFunction,
};
use pseudovol::smooth::{
    ball_pseudovolume, boundary_mixed_pseudovolume, lower_ball_pseudovolume, mc_mixed_pseudovolume, mc_pseudovolume,
    mc_pseudovolume_solid, BodyKind, QuadratureResult, SupportBody,
};
use pseudovol::verify::{run_suite, CheckLine, Suite, VerifyConfig};
use pseudovol::volumes::{
    intrinsic_volume, mixed_discriminant, mixed_discriminant_laplace, mixed_discriminant_permutation,
    mixed_discriminant_polarized, pyramid_volume, MixedDiscriminantInput, PERMUTATION_CAP,
};
use pseudovol::{RandomStream, Tolerance};

use crate::report::{FaceRow, NamedValue, RunReport};
use crate::{CliError, Command, GlobalArgs, Method, Phi, SuiteArg};

type Result<T> = std::result::Result<T, CliError>;

struct Ctx<'a> {
    args: &'a GlobalArgs,
    tol: Tolerance,
}

impl Ctx<'_> {
    fn angles(&self) -> AngleConfig {
        AngleConfig::new(self.args.samples, self.args.seed)
    }

    fn stream(&self, id: u64) -> RandomStream {
        RandomStream::new(self.args.seed, id)
    }

    fn polytope(&self, path: &Path) -> Result<Polytope> {
        let file = read_polytope(path)?;
        Ok(file.to_polytope(self.args.exact, &self.tol)?)
    }

    fn polytopes(&self, paths: &[PathBuf]) -> Result<Vec<Polytope>> {
        let parts: Vec<Polytope> = paths.iter().map(|p| self.polytope(p)).collect::<Result<_>>()?;
        if let Some(first) = parts.first() {
            if let Some(bad) = parts.iter().find(|q| q.ambient_n != first.ambient_n) {
                return Err(CliError::Input(format!(
                    "all polytopes must lie in the same C^n: found n = {} and n = {}",
                    first.ambient_n, bad.ambient_n
                )));
            }
        }
        Ok(parts)
    }
}

/// Allowed gap between two independent estimates of one quantity.
fn band(a: Estimate, b: Estimate) -> f64 {
    4.0 * a.std_error.hypot(b.std_error) + 1e-9 * a.value.abs().max(b.value.abs()).max(1.0)
}

fn oracle_line(name: &str, reference: &str, main: Estimate, other: Estimate) -> CheckLine {
    CheckLine::new(name, reference, main.value, other.value, band(main, other))
}

fn face_row(p: &Polytope, id: usize) -> FaceRow {
    let f = &p.faces[id];
    FaceRow {
        face_id: id,
        k: f.k,
        vertex_ids: f.vertex_ids.clone(),
        volume: f.volume_k,
        rho: f.rho,
        angle: None,
        angle_std_error: None,
        term: None,
    }
}

fn quad(q: QuadratureResult) -> Estimate {
    Estimate {
        value: q.value,
        std_error: q.std_error,
    }
}

fn inputs(paths: &[&Path]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

pub fn run(cmd: &Command, args: &GlobalArgs, mut report: RunReport) -> Result<RunReport> {
    let tol = match args.tol {
        Some(t) => Tolerance::uniform(t)?,
        None => Tolerance::default(),
    };
    let ctx = Ctx { args, tol };
    match cmd {
        Command::Rho { file } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let r = rho(p.affine_basis(), &ctx.tol)?;
            report.push(NamedValue::exact("rho", r.rho));
            report.push(NamedValue::exact("dim_real", p.dim_real as f64));
            report.push(NamedValue::exact("cr_dim", r.cr_dim as f64));
            report.push(NamedValue::exact("complex_dim", r.complex_dim as f64));
            if args.oracle {
                let t = pseudovol::complex_linalg::rho_via_t_vectors(p.affine_basis(), &ctx.tol)?;
                report.checks.push(CheckLine::new("rho via t-vectors", "auxiliary-vector route", t, r.rho, 1e-9));
            }
        }
        Command::Faces { file, dim } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            for (k, count) in p.f_vector().iter().enumerate() {
                report.push(NamedValue::exact(format!("f_{k}"), *count as f64));
            }
            report.per_face = (0..p.faces.len())
                .filter(|&id| dim.is_none_or(|d| p.faces[id].k == d))
                .map(|id| face_row(&p, id))
                .collect();
            if args.oracle {
                let chi = p.euler_characteristic();
                report.checks.push(CheckLine::new("Euler characteristic", "sum (-1)^k f_k = 0", chi as f64, 0.0, 0.0));
            }
        }
        Command::Angle { file, dim, face } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let ids: Vec<usize> = if face.is_empty() {
                let d = dim.unwrap_or(0);
                p.face_ids_of_dim(d).collect()
            } else {
                for &f in face {
                    p.face(f)?;
                }
                face.clone()
            };
            let table = angle_table(&p, &ids, &ctx.angles())?;
            let mut total = Estimate::exact(0.0);
            for &id in &ids {
                let a = table[&id];
                let mut row = face_row(&p, id);
                row.angle = Some(a.value);
                row.angle_std_error = Some(a.std_error);
                report.per_face.push(row);
                total.value += a.value;
                total.std_error = total.std_error.hypot(a.std_error);
            }
            report.push(NamedValue::new("angle_sum", total));
            let all_vertices = face.is_empty() && dim.unwrap_or(0) == 0;
            if args.oracle && all_vertices {
                report.checks.push(CheckLine::new(
                    "vertex angles sum to 1",
                    "vertex normal cones tile the space",
                    total.value,
                    1.0,
                    4.0 * total.std_error + 1e-9,
                ));
            }
        }
        Command::Volume { file } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            report.push(NamedValue::exact("volume", p.volume()));
            report.push(NamedValue::exact("dim_real", p.dim_real as f64));
            if args.oracle && p.dim_real >= 1 {
                let v = pyramid_volume(&p);
                report.checks.push(CheckLine::new("pyramid recursion", "facet heights", v, p.volume(), 1e-9 * p.volume().max(1.0)));
            }
        }
        Command::Intrinsic { file, k } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let v = intrinsic_volume(&p, *k, &ctx.angles())?;
            report.push(NamedValue::new(format!("V_{k}"), v));
            if args.oracle {
                let other = if *k == p.dim_real {
                    Estimate::exact(p.volume())
                } else if *k + 1 == p.dim_real {
                    let area: f64 = p.face_ids_of_dim(*k).map(|f| p.faces[f].volume_k).sum();
                    Estimate::exact(area / 2.0)
                } else {
                    intrinsic_volume(&p, *k, &ctx.angles().for_body(1))?
                };
                report.checks.push(oracle_line(&format!("V_{k} independent path"), "volume, half boundary, or reseeded MC", v, other));
            }
        }
        Command::PhiVolume { file, k, phi } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let weight: Box<dyn WeightFunction> = match phi {
                Phi::Rho => Box::new(RhoWeight { tol: ctx.tol }),
                Phi::Unit => Box::new(UnitWeight),
            };
            let r = phi_volume_report(&p, *k, weight.as_ref(), &ctx.angles())?;
            report.push(NamedValue::new(format!("v_{k}"), r.estimate()));
            report.per_face = r
                .per_face_terms
                .iter()
                .map(|t| FaceRow {
                    angle: Some(t.angle),
                    angle_std_error: Some(t.angle_std_error),
                    term: Some(t.term),
                    rho: t.weight,
                    ..face_row(&p, t.face_id)
                })
                .collect();
            if args.oracle {
                let other = intrinsic_phi_volume(&p, *k, weight.as_ref(), &ctx.angles().for_body(1))?;
                report.checks.push(oracle_line(&format!("v_{k} reseeded"), "independent angle samples", r.estimate(), other));
            }
        }
        Command::Pseudovolume { file } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let n = p.ambient_n;
            let r = pseudovolume(&p, &ctx.angles())?;
            report.push(NamedValue::new(format!("P_{n}"), r.estimate()));
            report.per_face = r
                .per_face_terms
                .iter()
                .map(|t| FaceRow {
                    angle: Some(t.angle),
                    angle_std_error: Some(t.angle_std_error),
                    term: Some(t.term),
                    rho: t.weight,
                    ..face_row(&p, t.face_id)
                })
                .collect();
            if args.oracle {
                let copies = vec![p.clone(); n];
                let q = mixed_pseudovolume(&copies, &ctx.angles().for_body(1))?;
                report.checks.push(oracle_line("Q_n(P,...,P)", "diagonal of the mixed pseudovolume", r.estimate(), q));
            }
        }
        Command::Mixed { files, ball } => {
            report.inputs = inputs(&files.iter().map(PathBuf::as_path).collect::<Vec<_>>());
            let parts = ctx.polytopes(files)?;
            let n = parts[0].ambient_n;
            let k = parts.len();
            let balls = ball.unwrap_or(0);
            if k + balls != n {
                return Err(CliError::Input(format!(
                    "mixed pseudovolume in C^{n} needs {n} arguments: got {k} polytopes and {balls} balls"
                )));
            }
            let name = format!("Q_{n}");
            if balls == 0 {
                let q = mixed_pseudovolume(&parts, &ctx.angles())?;
                report.push(NamedValue::new(&name, q));
                if args.oracle {
                    let other = mixed_pseudovolume_polarized(&parts, &ctx.angles().for_body(7))?;
                    report.checks.push(oracle_line("polarization", "inclusion-exclusion over subset sums", q, other));
                }
            } else {
                let q = mixed_with_ball(&parts, &ctx.angles())?;
                report.push(NamedValue::new(&name, q));
                if args.oracle {
                    let v = mixed_phi_volume_polarized(&parts, &RhoWeight { tol: ctx.tol }, &ctx.angles().for_body(7))?;
                    let other = v.scaled(ball_coefficient(n, k) / binomial(n, k));
                    report.checks.push(oracle_line("polarization", "mixed rho-volume by inclusion-exclusion", q, other));
                }
            }
        }
        Command::EpsExpand { file, eps, csv, points } => {
            report.inputs = inputs(&[file]);
            let p = ctx.polytope(file)?;
            let n = p.ambient_n;
            let e = eps_neighborhood_pseudovolume(&p, *eps, &ctx.angles())?;
            for (j, c) in e.coefficients.iter().enumerate() {
                report.push(NamedValue::new(format!("eps^{j}"), *c));
            }
            report.push(NamedValue::new(format!("P_{n}(P + {eps} B)"), e.value));
            if let Some(path) = csv {
                let write = || -> std::io::Result<()> {
                    let mut f = std::fs::File::create(path)?;
                    writeln!(f, "eps,value")?;
                    let m = (*points).max(2);
                    for i in 0..m {
                        let x = eps * i as f64 / (m - 1) as f64;
                        writeln!(f, "{x},{}", e.evaluate(x))?;
                    }
                    Ok(())
                };
                write().map_err(|err| CliError::Input(format!("{}: {err}", path.display())))?;
            }
            if args.oracle {
                report.checks.push(CheckLine::new(
                    format!("eps^{n} coefficient"),
                    "P_n of the unit ball",
                    e.coefficients[n].value,
                    ball_pseudovolume(n),
                    1e-12 * ball_pseudovolume(n),
                ));
            }
        }
        Command::Smooth { bodies, method } => {
            report.inputs = inputs(&bodies.iter().map(PathBuf::as_path).collect::<Vec<_>>());
            let list: Vec<SupportBody> = bodies
                .iter()
                .map(|b| read_body(b).and_then(|d| d.to_body()))
                .collect::<std::result::Result<_, _>>()?;
            smooth(&ctx, &list, *method, &mut report)?;
        }
        Command::Discriminant { file } => {
            report.inputs = inputs(&[file]);
            let input = MixedDiscriminantInput::new(read_matrices(file)?)?;
            let d = mixed_discriminant(&input)?;
            report.push(NamedValue::exact("D.re", d.re));
            report.push(NamedValue::exact("D.im", d.im));
            if args.oracle {
                let scale = d.norm().max(1.0);
                let mut paths = vec![("Laplace expansion", mixed_discriminant_laplace(&input)), ("determinant polarization", mixed_discriminant_polarized(&input))];
                if input.size() <= PERMUTATION_CAP {
                    paths.push(("permutation sum", mixed_discriminant_permutation(&input)?));
                }
                for (name, other) in paths {
                    report.checks.push(CheckLine::new(name, "same multilinear form", (other - d).norm(), 0.0, 1e-10 * scale));
                }
            }
        }
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Tables => Suite::Tables,
                SuiteArg::Invariants => Suite::Invariants,
            };
            let config = VerifyConfig {
                samples: args.samples,
                seed: args.seed,
            };
            report.checks = run_suite(suite, &config)?;
            let passed = report.checks.iter().filter(|c| c.passed).count();
            report.push(NamedValue::exact("passed", passed as f64));
            report.push(NamedValue::exact("failed", (report.checks.len() - passed) as f64));
        }
    }
    Ok(report)
}

fn smooth(ctx: &Ctx, bodies: &[SupportBody], method: Method, report: &mut RunReport) -> Result<()> {
    let n = bodies[0].ambient_n;
    if bodies.iter().any(|b| b.ambient_n != n) {
        return Err(CliError::Input("all bodies must lie in the same C^n".into()));
    }
    let samples = ctx.args.samples;
    if bodies.len() == 1 {
        let b = &bodies[0];
        let r = match method {
            Method::Interior => mc_pseudovolume(b, samples, ctx.stream(0))?,
            Method::Solid => mc_pseudovolume_solid(b, samples, ctx.stream(0))?,
            Method::Boundary => boundary_mixed_pseudovolume(&vec![b; n], samples, ctx.stream(0))?,
        };
        report.push(NamedValue::new(format!("P_{n}"), quad(r)));
        report.push(NamedValue::exact("max_imaginary", r.max_imaginary));
        if ctx.args.oracle {
            let closed = match b.kind {
                BodyKind::Ball2n => Some(ball_pseudovolume(n)),
                BodyKind::Ball2nMinus1 => Some(lower_ball_pseudovolume(n)),
                _ => None,
            };
            let other = match closed {
                Some(v) => Estimate::exact(v),
                None => quad(boundary_mixed_pseudovolume(&vec![b; n], samples, ctx.stream(1))?),
            };
            report.checks.push(oracle_line("independent value", "closed form or boundary formula", quad(r), other));
        }
        return Ok(());
    }
    if bodies.len() != n {
        return Err(CliError::Input(format!("mixed pseudovolume in C^{n} needs 1 or {n} bodies, got {}", bodies.len())));
    }
    let refs: Vec<&SupportBody> = bodies.iter().collect();
    let r = match method {
        Method::Interior => mc_mixed_pseudovolume(&refs, samples, ctx.stream(0))?,
        Method::Boundary => boundary_mixed_pseudovolume(&refs, samples, ctx.stream(0))?,
        Method::Solid => return Err(CliError::Input("--method solid applies to a single body".into())),
    };
    report.push(NamedValue::new(format!("Q_{n}"), quad(r)));
    report.push(NamedValue::exact("max_imaginary", r.max_imaginary));
    if ctx.args.oracle {
        let other = match method {
            Method::Boundary => mc_mixed_pseudovolume(&refs, samples, ctx.stream(1))?,
            _ => boundary_mixed_pseudovolume(&refs, samples, ctx.stream(1))?,
        };
        report.checks.push(oracle_line("other integral formula", "interior vs boundary quadrature", quad(r), quad(other)));
    }
    Ok(())
}

fn entry(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(x) => x.as_f64().map(|re| Complex64::new(re, 0.0)),
        Value::Array(p) if p.len() == 2 => Some(Complex64::new(p[0].as_f64()?, p[1].as_f64()?)),
        _ => None,
    }
}

/// A JSON array of square matrices given as rows; each entry is a number or
/// a `[re, im]` pair.
fn read_matrices(path: &Path) -> Result<Vec<DMatrix<Complex64>>> {
    let bad = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let list = v.as_array().ok_or_else(|| bad("expected an array of matrices".into()))?;
    let mut out = Vec::with_capacity(list.len());
    for (i, m) in list.iter().enumerate() {
        let rows = m.as_array().ok_or_else(|| bad(format!("matrix {i} is not an array of rows")))?;
        let r = rows.len();
        let mut data = Vec::with_capacity(r * r);
        for row in rows {
            let row = row.as_array().filter(|x| x.len() == r).ok_or_else(|| bad(format!("matrix {i} is not square")))?;
            for e in row {
                data.push(entry(e).ok_or_else(|| bad(format!("matrix {i} has a bad entry {e}")))?);
            }
        }
        out.push(DMatrix::from_row_slice(r, r, &data));
    }
    Ok(out)
}
