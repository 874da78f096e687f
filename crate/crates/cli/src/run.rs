// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations. Each returns `Ok` or a [`Failure`] carrying
//! the process exit code: 1 for input problems, 2 when an analysis
//! refuses to certify (generator, consistency, contour).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use daepl_core::example::{build_example, noninjectivity_witness, verify_resolvent_bound};
use daepl_core::laplace::{laplace_solution, ContourSpec};
use daepl_core::linalg::C64;
use daepl_core::pencil::estimate_index;
use daepl_core::semigroup::{
    build_generator, evolve, injectivity_gap, resolvent_consistency_defect,
    verify_generator_relation, verify_mild, Generator, GeneratorOptions,
};
use daepl_core::trace::relative_l2_discrepancy;
use daepl_core::wong::{
    chain_identity_check, consistent_space, scaled_resolvent_defect, wong_sequence,
};
use daepl_core::{Error, GridSpec, Pencil, SolutionTrace, Subspace, WongResult};

use crate::mm;
use crate::report::{
    to_json, AnalysisReport, BoundSampleReport, CheckReport, ExampleReport, RouteSummary,
    SolveReport, SCHEMA,
};
use crate::{AnalyzeArgs, CheckArgs, ExampleArgs, Route, SolveArgs};

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn refused(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

/// Input-side library failures (bad matrices, singular grids) map to
/// exit 1.
fn input_err(e: Error) -> Failure {
    Failure::input(e.to_string())
}

/// Writes to a sibling temp file first and renames into place, so a
/// failed run never leaves a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), Failure> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| Failure::input(format!("cannot create temp file near {}: {e}", path.display())))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| Failure::input(format!("cannot finalize {}: {e}", path.display())))?;
    Ok(())
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Label derived from the E file name: its stem, with a trailing
/// `_e`/`-e` marker stripped when present so `p1_e.mtx` reads as `p1`.
fn pencil_label(e_path: &Path) -> String {
    let stem = e_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pencil".to_string());
    for suffix in ["_e", "-e", "_E", "-E"] {
        if let Some(t) = stem.strip_suffix(suffix) {
            if !t.is_empty() {
                return t.to_string();
            }
        }
    }
    stem
}

fn load_pencil(e_path: &Path, a_path: &Path) -> Result<Pencil, Failure> {
    let e = mm::read_matrix(e_path).map_err(Failure::input)?;
    let a = mm::read_matrix(a_path).map_err(Failure::input)?;
    if e.nrows() != e.ncols() || a.nrows() != a.ncols() {
        return Err(Failure::input(format!(
            "pencil factors must be square: E is {}x{}, A is {}x{}",
            e.nrows(),
            e.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    if e.nrows() != a.nrows() {
        return Err(Failure::input(format!(
            "dimension mismatch: E is {0}x{0}, A is {1}x{1}",
            e.nrows(),
            a.nrows()
        )));
    }
    Pencil::new(e, a).map_err(input_err)
}

fn grid_spec(decades: u32) -> GridSpec {
    GridSpec {
        decades,
        ..GridSpec::default()
    }
}

/// The shared analyze pipeline: index, chain, consistent space, and a
/// best-effort generator. Certification problems land in `warnings`, not
/// in the error channel; the caller decides the exit code.
struct Analysis {
    pencil: Pencil,
    wong: WongResult,
    u: Subspace,
    report: AnalysisReport,
    generator: Option<Generator>,
}

fn analyze_pencil(
    e_path: &Path,
    a_path: &Path,
    rho0: f64,
    decades: u32,
) -> Result<Analysis, Failure> {
    let pencil = load_pencil(e_path, a_path)?;
    let mut warnings = Vec::new();

    let idx = estimate_index(&pencil, rho0, &grid_spec(decades)).map_err(|e| match e {
        Error::InvalidGrid { .. } | Error::SingularPoint { .. } => {
            Failure::input(format!("resolvent set probe failed: {e}"))
        }
        other => input_err(other),
    })?;
    if idx.ambiguous {
        warnings.push(format!(
            "index fit is ambiguous (fitted exponent {})",
            idx.fitted_exponent
        ));
    }
    if idx.singular_points > 0 {
        warnings.push(format!(
            "{} singular grid points skipped during the index fit",
            idx.singular_points
        ));
    }

    let wong = wong_sequence(&pencil, 0.0, 0).map_err(input_err)?;
    let u = consistent_space(&wong, &idx).map_err(input_err)?.clone();
    let gap = injectivity_gap(&pencil, &u).map_err(input_err)?;

    let generator = match build_generator(&pencil, &u, &wong, &GeneratorOptions::default()) {
        Ok(g) => Some(g),
        Err(e) => {
            warnings.push(format!("generator not certified: {e}"));
            None
        }
    };

    let report = AnalysisReport {
        schema: SCHEMA,
        pencil_label: pencil_label(e_path),
        n: pencil.dim(),
        rho0,
        index: idx.index,
        fitted_exponent: idx.fitted_exponent,
        wong_dims: wong.dims.clone(),
        stabilized_at: wong.stabilized_at,
        u_dim: u.dim(),
        injectivity_gap: gap.is_finite().then_some(gap),
        generator_built: generator.is_some(),
        warnings,
    };
    Ok(Analysis {
        pencil,
        wong,
        u,
        report,
        generator,
    })
}

pub fn run_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let analysis = analyze_pencil(&args.e, &args.a, args.rho0, args.grid_decades)?;
    emit(args.out.as_deref(), &to_json(&analysis.report))?;
    if analysis.generator.is_none() {
        let reason = analysis
            .report
            .warnings
            .last()
            .cloned()
            .unwrap_or_else(|| "generator not certified".to_string());
        return Err(Failure::refused(reason));
    }
    Ok(())
}

fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>, Failure> {
    if !(t_end.is_finite() && t_end > 0.0) || !(dt.is_finite() && dt > 0.0) {
        return Err(Failure::input("t-end and dt must be positive"));
    }
    let steps_f = t_end / dt;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-9 * steps.max(1.0) {
        return Err(Failure::input(format!(
            "dt = {dt} does not divide t-end = {t_end} evenly"
        )));
    }
    let steps = steps as usize;
    if steps == 0 || steps > 1_000_000 {
        return Err(Failure::input("grid must have between 1 and 1e6 steps"));
    }
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

/// `traj.csv` plus route `laplace` gives `traj.laplace.csv`.
fn route_path(base: &Path, route: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    base.with_file_name(format!("{stem}.{route}.{ext}"))
}

fn trace_csv(tr: &SolutionTrace) -> String {
    let n = tr.dim();
    let mut s = String::from("t");
    for i in 1..=n {
        let _ = write!(s, ",x_{i}");
    }
    s.push_str(",residual\n");
    let residuals = tr
        .residual_profile
        .as_ref()
        .expect("solve traces carry a residual profile");
    for (i, t) in tr.times.iter().enumerate() {
        let _ = write!(s, "{t}");
        for j in 0..n {
            let _ = write!(s, ",{}", tr.states[i][j]);
        }
        let _ = writeln!(s, ",{}", residuals[i]);
    }
    s
}

/// Evolution and contour failures that mean "this data refuses this
/// route" map to exit 2; everything else is an input problem.
fn solve_err(e: Error) -> Failure {
    match e {
        Error::InconsistentInitialValue { .. }
        | Error::ContourTruncation { .. }
        | Error::SingularPoint { .. }
        | Error::InjectivityGapTooSmall { .. }
        | Error::DomainDefect { .. } => Failure::refused(e.to_string()),
        other => input_err(other),
    }
}

pub fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let analysis = analyze_pencil(&args.e, &args.a, args.rho0, args.grid_decades)?;
    let p = &analysis.pencil;
    let x0 = mm::read_vector(&args.x0).map_err(Failure::input)?;
    if x0.len() != p.dim() {
        return Err(Failure::input(format!(
            "initial value has length {}, pencil has dimension {}",
            x0.len(),
            p.dim()
        )));
    }
    let times = time_grid(args.t_end, args.dt)?;

    let semigroup_route = matches!(args.route, Route::Semigroup | Route::Both);
    let laplace_route = matches!(args.route, Route::Laplace | Route::Both);
    if args.route == Route::Both && args.out.is_none() {
        return Err(Failure::input("--route both writes two traces and needs --out"));
    }

    let mut routes = Vec::new();
    let mut semi_trace = None;
    let mut laplace_trace = None;

    if semigroup_route {
        let g = analysis.generator.as_ref().ok_or_else(|| {
            Failure::refused(
                analysis
                    .report
                    .warnings
                    .last()
                    .cloned()
                    .unwrap_or_else(|| "generator not certified".to_string()),
            )
        })?;
        let mut tr = evolve(g, &x0, &times, args.tol).map_err(solve_err)?;
        let check = verify_mild(p, &mut tr).map_err(input_err)?;
        routes.push(("semigroup", tr.clone(), check.max_residual));
        semi_trace = Some(tr);
    }

    if laplace_route {
        // The contour route needs the same consistency gate; without it,
        // inconsistent data would silently invert to the projected
        // trajectory.
        let u = &analysis.u;
        let tol = if args.tol > 0.0 { args.tol } else { 1e-8 };
        let rel = if x0.norm() == 0.0 {
            0.0
        } else {
            u.distance(&x0) / x0.norm()
        };
        if rel > tol {
            return Err(Failure::refused(
                Error::InconsistentInitialValue {
                    distance: rel,
                    tol,
                }
                .to_string(),
            ));
        }
        let mut spec = ContourSpec::default_for(p, args.rho0);
        if let Some(rho) = args.contour_rho {
            spec.rho = rho;
        }
        if let Some(omega) = args.contour_omega {
            spec.omega_max = omega;
        }
        if let Some(nodes) = args.contour_nodes {
            spec.n_nodes = nodes;
        }
        let mut tr = laplace_solution(p, &x0, &spec, &times).map_err(solve_err)?;
        let check = verify_mild(p, &mut tr).map_err(input_err)?;
        routes.push(("laplace", tr.clone(), check.max_residual));
        laplace_trace = Some(tr);
    }

    let mut summaries = Vec::new();
    for (route, tr, max_residual) in &routes {
        let path = args.out.as_ref().map(|base| {
            if args.route == Route::Both {
                route_path(base, route)
            } else {
                base.clone()
            }
        });
        let csv = trace_csv(tr);
        match &path {
            Some(p) => write_atomic(p, &csv)?,
            None => print!("{csv}"),
        }
        summaries.push(RouteSummary {
            route: route.to_string(),
            path: path.map(|p| p.display().to_string()),
            samples: tr.len(),
            max_mild_residual: *max_residual,
        });
    }

    let discrepancy = match (&semi_trace, &laplace_trace) {
        (Some(a), Some(b)) => Some(relative_l2_discrepancy(a, b).map_err(input_err)?),
        _ => None,
    };

    if args.out.is_some() {
        let report = SolveReport {
            schema: SCHEMA,
            pencil_label: analysis.report.pencil_label.clone(),
            n: p.dim(),
            t_end: args.t_end,
            dt: args.dt,
            routes: summaries,
            discrepancy,
        };
        print!("{}", to_json(&report));
    }
    Ok(())
}

/// Sample grid for the example's resolvent bound: five abscissae crossed
/// with five ordinates inside |Im z| <= 100.
fn bound_grid() -> Vec<(f64, f64)> {
    let mut zs = Vec::with_capacity(25);
    for re in [0.25, 0.5, 1.0, 2.0, 5.0] {
        for im in [-100.0, -27.0, 0.0, 13.0, 100.0] {
            zs.push((re, im));
        }
    }
    zs
}

pub fn run_example(args: &ExampleArgs) -> Result<(), Failure> {
    let ex = build_example(args.n).map_err(input_err)?;
    let bound = verify_resolvent_bound(&ex, &bound_grid()).map_err(input_err)?;
    let idx = estimate_index(ex.pencil(), args.rho0, &grid_spec(args.grid_decades))
        .map_err(input_err)?;

    let trend_n = vec![args.n, 2 * args.n, 4 * args.n];
    let witness = noninjectivity_witness(&trend_n).map_err(input_err)?;

    let witness_csv = match &args.out {
        Some(path) => {
            let v = ex.witness_vector();
            let chain = ex.first_chain_space().map_err(input_err)?;
            let proj = chain.project(&v);
            let mut csv = String::from("t,witness,projection\n");
            for (i, t) in ex.midpoints().iter().enumerate() {
                let _ = writeln!(csv, "{t},{},{}", v[i], proj[i]);
            }
            write_atomic(path, &csv)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let report = ExampleReport {
        schema: SCHEMA,
        n: args.n,
        index: idx.index,
        bound_check: bound
            .samples
            .iter()
            .map(|s| BoundSampleReport {
                z_re: s.z_re,
                z_im: s.z_im,
                resolvent_norm: s.resolvent_norm,
                bound: s.bound,
                pass: s.pass,
            })
            .collect(),
        bound_all_pass: bound.all_pass,
        trend_n,
        gap_per_n: witness.entries.iter().map(|e| e.injectivity_gap).collect(),
        dist_per_n: witness.entries.iter().map(|e| e.rel_dist).collect(),
        witness_csv,
    };
    print!("{}", to_json(&report));
    Ok(())
}

pub fn run_check(args: &CheckArgs) -> Result<(), Failure> {
    let analysis = analyze_pencil(&args.e, &args.a, args.rho0, args.grid_decades)?;
    let p = &analysis.pencil;
    let w = &analysis.wong;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    // Sample points verified nonsingular for this pencil.
    let candidates = [
        C64::new(4.0, 0.0),
        C64::new(5.0, 2.0),
        C64::new(7.0, -3.0),
        C64::new(9.0, 4.0),
        C64::new(11.0, -5.0),
        C64::new(13.0, 6.0),
    ];
    let mut zs = Vec::new();
    for &z in &candidates {
        if p.resolvent_solver(z).is_ok() {
            zs.push(z);
            if zs.len() == 3 {
                break;
            }
        }
    }
    if zs.is_empty() {
        return Err(Failure::input(
            "no nonsingular sample point found right of the spectrum".to_string(),
        ));
    }

    let identities = chain_identity_check(p, w, &zs, 3, &mut rng).map_err(input_err)?;

    // Decay of the scaled-resolvent defect on the first chain member,
    // fitted over two decades.
    let scaled_defect_slope = match w.spaces.get(1).and_then(|s| s.random_unit(&mut rng)) {
        Some(x) => {
            let s_grid = [100.0, 316.227766017, 1000.0, 3162.27766017, 10000.0];
            let mut ok = true;
            let mut logs = Vec::new();
            for &s in &s_grid {
                match scaled_resolvent_defect(p, s, &x) {
                    Ok(d) if d > 0.0 => logs.push((s.ln(), d.ln())),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            (ok && logs.len() == s_grid.len()).then(|| {
                let n = logs.len() as f64;
                let mx = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
                let my = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
                let num: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
                let den: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
                num / den
            })
        }
        None => None,
    };

    let (generator_relation, resolvent_consistency, mild_residual) = match &analysis.generator {
        Some(g) => {
            let rel = verify_generator_relation(p, g, 20, &mut rng).map_err(input_err)?;
            let cons =
                resolvent_consistency_defect(p, g, C64::new(4.0, 1.5)).map_err(input_err)?;
            let mild = match g.u.random_unit(&mut rng) {
                Some(raw) => {
                    let x0 = &raw / raw.norm();
                    let times: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
                    let mut tr = evolve(g, &x0, &times, 0.0).map_err(input_err)?;
                    Some(verify_mild(p, &mut tr).map_err(input_err)?.max_residual)
                }
                None => Some(0.0), // trivial space: the zero solution is exact
            };
            (Some(rel), Some(cons), mild)
        }
        None => (None, None, None),
    };

    let report = CheckReport {
        schema: SCHEMA,
        pencil_label: analysis.report.pencil_label.clone(),
        n: p.dim(),
        seed: args.seed,
        resolvent_points: zs.iter().map(|z| [z.re, z.im]).collect(),
        commutation_max: identities.commutation_max,
        membership_max: identities.membership_max,
        expansion_max: identities.expansion_max,
        scaled_defect_slope,
        generator_relation,
        resolvent_consistency,
        mild_residual,
    };
    emit(args.out.as_deref(), &to_json(&report))?;
    Ok(())
}
