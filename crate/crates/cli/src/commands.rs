use std::path::Path;

use kahler_cone::algebra::AlgebraAtPoint;
use kahler_cone::geometry::{
    boundary_probe, christoffel, derived_curvatures, halving_schedule, integrate_geodesic,
    pullback_isometry_check, riemann_alt_tensor, riemann_tensor, sectional, split,
    split_metric_report, unsplit, CurvatureTensor,
};
use kahler_cone::report::{matrix_rows, Check};
use kahler_cone::suite::{self, Subject};
use kahler_cone::{catalog, fd, CohClass, ConePoint, Error, IntersectionForm};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::Command;

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Report {
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
    checks: Vec<Check>,
}

impl Report {
    fn new() -> Self {
        Report {
            inputs: Map::new(),
            outputs: Map::new(),
            checks: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, v: impl Serialize) {
        self.inputs.insert(key.into(), to_value(v));
    }

    fn output(&mut self, key: &str, v: impl Serialize) {
        self.outputs.insert(key.into(), to_value(v));
    }

    fn check(&mut self, name: &str, max_dev: f64, tol: f64) {
        self.checks.push(Check::new(0, name, max_dev, tol));
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn matrix(m: &DMatrix<f64>) -> Value {
    to_value(matrix_rows(m))
}

fn tensor(t: &CurvatureTensor) -> Value {
    let m = t.rank();
    let nested: Vec<Vec<Vec<Vec<f64>>>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..m)
                        .map(|k| (0..m).map(|l| t.get(i, j, k, l)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    to_value(nested)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Info { .. } => "info",
        Command::Metric { .. } => "metric",
        Command::Curvature { .. } => "curvature",
        Command::Connection { .. } => "connection",
        Command::Geodesic { .. } => "geodesic",
        Command::Probe { .. } => "probe",
        Command::Algebra { .. } => "algebra",
        Command::Split { .. } => "split",
        Command::Pullback { .. } => "pullback",
        Command::Verify { .. } => "verify",
    }
}

fn form_label(cmd: &Command) -> String {
    match cmd {
        Command::Info { form }
        | Command::Metric { form, .. }
        | Command::Curvature { form, .. }
        | Command::Connection { form, .. }
        | Command::Geodesic { form, .. }
        | Command::Probe { form, .. }
        | Command::Algebra { form, .. }
        | Command::Split { form, .. } => form.clone(),
        Command::Pullback { form_y, form_x, .. } => format!("{form_y} -> {form_x}"),
        Command::Verify { forms } if forms.is_empty() => "catalog".into(),
        Command::Verify { forms } => forms.join(" "),
    }
}

/// Runs a subcommand and returns its JSON report and exit code.
pub(crate) fn run(cmd: Command) -> (Value, u8) {
    let command = command_name(&cmd);
    let form = form_label(&cmd);
    match dispatch(cmd) {
        Ok((form, r)) => {
            let code = if r.checks.iter().all(|c| c.pass) {
                0
            } else {
                3
            };
            let value = json!({
                "command": command,
                "form": form,
                "inputs": r.inputs,
                "outputs": r.outputs,
                "checks": r.checks,
            });
            (value, code)
        }
        Err(Failure::Core(e)) => {
            let code = if e.is_inadmissible() { 2 } else { 1 };
            let value = json!({ "command": command, "form": form, "error": e.kind(), "message": e.to_string() });
            (value, code)
        }
        Err(Failure::Usage(msg)) => {
            let value =
                json!({ "command": command, "form": form, "error": "Usage", "message": msg });
            (value, 1)
        }
    }
}

/// A catalog name, or a path to a manifold file.
fn load(spec: &str) -> Outcome<IntersectionForm> {
    if let Some(e) = catalog::entry(spec) {
        return Ok(e.form());
    }
    let path = Path::new(spec);
    if !path.exists() {
        let names: Vec<&str> = catalog::names().collect();
        return Err(Failure::Usage(format!(
            "{spec:?} is neither a catalog entry ({}) nor a file",
            names.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
    Ok(IntersectionForm::from_json(&text)?)
}

/// The catalog point of a catalog form, when it has one.
fn default_point(form: &IntersectionForm) -> Option<CohClass> {
    catalog::entry(form.name())
        .filter(|e| e.form() == *form)
        .map(|e| e.default_omega())
}

fn point(form: &IntersectionForm, at: Option<CohClass>) -> Outcome<CohClass> {
    at.or_else(|| default_point(form))
        .ok_or_else(|| Failure::Usage("--at is required for forms outside the catalog".into()))
}

fn parse_matrix(s: &str) -> Outcome<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|row| row.parse::<CohClass>().map(|c| c.as_slice().to_vec()))
        .collect::<Result<_, _>>()?;
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Failure::Usage(format!("ragged matrix {s:?}")));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

/// `NAME`, `PATH` or either followed by `@COORDS`.
fn subject(spec: &str) -> Outcome<Subject> {
    let (name, at) = match spec.rsplit_once('@') {
        Some((name, coords)) => (name, Some(coords.parse::<CohClass>()?)),
        None => (spec, None),
    };
    let form = load(name)?;
    let omega = point(&form, at)?;
    Ok(Subject { form, omega })
}

fn dispatch(cmd: Command) -> Outcome<(String, Report)> {
    let mut r = Report::new();
    let form_name = match cmd {
        Command::Info { form } => {
            let f = load(&form)?;
            r.input("form", &form);
            r.output("name", f.name());
            r.output("dim", f.dim());
            r.output("h11", f.rank());
            r.output("labels", f.labels());
            let coeffs: Vec<Value> = f
                .coefficients()
                .map(|(index, value)| json!({ "index": index, "value": value }))
                .collect();
            r.output("intersection", coeffs);
            let default = default_point(&f);
            r.output("catalog", default.is_some());
            if let Some(w) = default {
                let p = ConePoint::new(&f, w)?;
                r.output("default_omega", p.omega());
                r.output("default_volume", p.volume());
            }
            f.name().to_string()
        }
        Command::Metric { form, at } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            r.input("at", p.omega());
            let n = p.dim() as f64;
            let lam: Vec<f64> = (0..p.rank()).map(|i| p.lambda(&p.basis(i))).collect();
            r.output("vol", p.volume());
            r.output("gram", matrix(p.gram()));
            r.output("gram_inv", matrix(p.gram_inv()));
            r.output("lambda", lam);
            r.check(
                "lambda_omega_equals_n",
                (p.lambda(p.omega()) - n).abs(),
                1e-12 * n,
            );
            r.check(
                "omega_norm_sq_equals_n",
                (p.norm_sq(p.omega()) - n).abs(),
                1e-10 * n,
            );
            f.name().to_string()
        }
        Command::Curvature {
            form,
            at,
            sectional: plane,
            ricci,
            scalar,
        } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            r.input("at", p.omega());
            let d = derived_curvatures(&p);
            r.output("riemann", tensor(&d.tensor));
            if let Some(uv) = &plane {
                r.input("sectional", uv);
                r.output("sectional", sectional(&p, &uv[0], &uv[1])?);
            }
            if ricci {
                r.output("ricci", matrix(&d.ricci));
            }
            if scalar {
                r.output("scalar", d.scalar);
            }
            r.check("symmetries", d.tensor.symmetry_report().max(), 1e-12);
            r.check(
                "alternate_formula",
                riemann_tensor(&p).max_abs_diff(&riemann_alt_tensor(&p)),
                1e-10,
            );
            f.name().to_string()
        }
        Command::Connection { form, at, z, u } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            f.check_len(&z)?;
            f.check_len(&u)?;
            r.input("at", p.omega());
            r.input("z", &z);
            r.input("u", &u);
            let g = christoffel(&p, &z, &u);
            r.output("christoffel", &g);
            r.output("lambda_class", p.lambda_class(&u, &z));
            r.check("torsion", (&g - &christoffel(&p, &u, &z)).max_abs(), 0.0);
            r.check(
                "metric_compatibility",
                fd::check_connection(&p, &fd::FdConfig::default())?.relative(),
                1e-6,
            );
            f.name().to_string()
        }
        Command::Geodesic {
            form,
            at,
            v,
            t_end,
            steps,
            csv,
        } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            r.input("at", p.omega());
            r.input("v", &v);
            r.input("T", t_end);
            r.input("steps", steps);
            let path = integrate_geodesic(&p, &v, t_end, steps)?;
            let last = path.samples.last().expect("at least the start");
            r.output("end", &last.point);
            r.output("end_velocity", &last.velocity);
            r.output("speed_sq", path.samples[0].speed_sq);
            r.output("speed_drift", path.speed_drift);
            r.output("length", path.samples[0].speed_sq.sqrt() * t_end.abs());
            r.output("samples", path.samples.len());
            if let Some(file) = csv {
                write_csv(&file, &path)
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", file.display())))?;
                r.input("csv", file.display().to_string());
            }
            f.name().to_string()
        }
        Command::Probe {
            form,
            alpha,
            omega,
            t_max,
            t_min,
            halvings,
        } => {
            let f = load(&form)?;
            r.input("alpha", &alpha);
            r.input("omega", &omega);
            r.input("t_max", t_max);
            r.input("t_min", t_min);
            r.input("halvings", halvings);
            let schedule = halving_schedule(t_max, t_min, halvings);
            let probe = boundary_probe(&f, &alpha, &omega, &schedule)?;
            r.output("classification", probe.classification);
            r.output("tail_variation", probe.tail_variation);
            r.output("min_growth_ratio", probe.min_growth_ratio);
            r.output(
                "total_length",
                probe.steps.last().map(|s| s.cumulative_length),
            );
            r.output("steps", &probe.steps);
            f.name().to_string()
        }
        Command::Algebra {
            form,
            at,
            derivations,
            kn,
            constant_curvature,
        } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            r.input("at", p.omega());
            let a = AlgebraAtPoint::new(p.clone());
            let m = a.rank();
            let s: Vec<Vec<Vec<f64>>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| (0..m).map(|k| a.structure_constant(i, j, k)).collect())
                        .collect()
                })
                .collect();
            r.output("structure", s);
            let st = a.structure_report();
            r.output("structure_report", st);
            r.output("algebra_curvature", tensor(&a.curvature()));
            r.check("x_omega_identity", st.x_omega, 1e-10);
            r.check("omega_omega_identity", st.omega_omega, 1e-10);
            r.check(
                "algebra_curvature_symmetries",
                a.curvature().symmetry_report().max(),
                1e-12,
            );
            if kn {
                let set = a.kn_decompose();
                let (t, q) = a.kn_residual(&set);
                r.output("kn", &set);
                r.output("kn_residual", t);
                r.output("product_reconstruction", q);
                r.check("kn_reconstruction", t.max(q), 1e-10);
            }
            if constant_curvature {
                let full = a.constant_curvature_test();
                let prim = a.constant_curvature_test_primitive();
                r.output("constant_curvature", full);
                r.output("constant_curvature_primitive", prim);
            }
            if derivations {
                let d = a.derivations();
                r.output("derivation_dimension", d.derivations.len());
                r.output("derivations", &d);
                r.check("derivation_system", d.residual, 1e-8);
                r.check("derivation_post_checks", d.max_post_check(), 1e-8);
            }
            f.name().to_string()
        }
        Command::Split { form, at } => {
            let f = load(&form)?;
            let p = ConePoint::new(&f, point(&f, at)?)?;
            r.input("at", p.omega());
            let (t, w1) = split(&p);
            let back = unsplit(&f, t, &w1)?;
            let report = split_metric_report(&p)?;
            r.output("t", t);
            r.output("omega1", &w1);
            r.output("metric", report);
            r.check(
                "round_trip",
                (&back - p.omega()).max_abs() / p.omega().max_abs(),
                1e-12,
            );
            r.check("unit_volume", (f.volume(&w1)? - 1.0).abs(), 1e-10);
            r.check(
                "dt2_coefficient",
                (report.dt2_coeff - report.expected_dt2).abs(),
                1e-8,
            );
            r.check("mixed_terms", report.max_mixed, 1e-8);
            r.check("slice_metric", report.max_slice_dev, 1e-8);
            f.name().to_string()
        }
        Command::Pullback {
            form_y,
            form_x,
            matrix: spec,
            degree,
            at,
        } => {
            let y = load(&form_y)?;
            let x = load(&form_x)?;
            let map = parse_matrix(&spec)?;
            let samples = if at.is_empty() {
                vec![point(&y, None)?]
            } else {
                at
            };
            r.input("matrix", matrix(&map));
            r.input("degree", degree);
            r.input("samples", &samples);
            let rep = pullback_isometry_check(&y, &x, &map, degree, &samples)?;
            r.output("report", rep);
            r.check("volume", rep.max_volume_dev, 1e-10);
            r.check("metric", rep.max_gram_dev, 1e-10);
            format!("{} -> {}", y.name(), x.name())
        }
        Command::Verify { forms } => {
            let subjects = if forms.is_empty() {
                Subject::catalog()
            } else {
                forms
                    .iter()
                    .map(|s| subject(s))
                    .collect::<Outcome<Vec<_>>>()?
            };
            let names: Vec<&str> = subjects.iter().map(|s| s.form.name()).collect();
            r.input("forms", &names);
            let points: Vec<&CohClass> = subjects.iter().map(|s| &s.omega).collect();
            r.input("points", points);
            let rep = suite::run(&subjects)?;
            r.output("total", rep.checks.len());
            r.output("failed", rep.checks.iter().filter(|c| !c.pass).count());
            r.output("findings", &rep.findings);
            r.checks = rep.checks;
            names.join(" ")
        }
    };
    Ok((form_name, r))
}

fn write_csv(
    file: &Path,
    path: &kahler_cone::geometry::GeodesicPath,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_path(file)?;
    let m = path.samples.first().map_or(0, |s| s.point.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("x{i}")));
    header.push("speed".into());
    w.write_record(&header)?;
    for s in &path.samples {
        let mut row = vec![s.t.to_string()];
        row.extend(s.point.as_slice().iter().map(|x| x.to_string()));
        row.push(s.speed_sq.max(0.0).sqrt().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
