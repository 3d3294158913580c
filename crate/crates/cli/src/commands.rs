use std::f64::consts::PI;
use std::fmt::Write as _;

use anharmonic::eig::eigenvalues_selfadjoint;
use anharmonic::oscbasis::{axis_omegas, build_hamiltonian, quartic_levels_1d};
use anharmonic::resonance::{find_lowest_resonance, table1_csv, theta_grid, Resonance, ResonanceConfig};
use anharmonic::rpm::{hp_from_int, rpm_eigenvalue, to_decimal_string, HighPrec, Parity, RpmProblem, RpmSolution};
use anharmonic::symmetry::{conjugate_group, default_candidates, detect_group, separating_rotation, SymmetryGroup};
use anharmonic::{BasisSpec, CasePreset, ExactCoeff, OrthogonalMap2, PolynomialPotential};
use serde_json::{json, Value};

use crate::args::{
    CaseArgs, OmegaPolicy, PrecisionArgs, ResonanceArgs, RpmArgs, SpectrumArgs, State, SymmetryArgs, ThetaArgs,
    TransformArgs,
};

const TABLE1_LAMBDAS: [&str; 4] = ["0.10", "0.12", "0.13", "0.14"];
const SEED_BASIS: usize = 60;
const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs; exit status 2.
    Validation(String),
    /// A computation failed; exit status 3.
    Numerical(anharmonic::Error),
}

fn fail<E: Into<anharmonic::Error>>(e: E) -> CliError {
    CliError::Numerical(e.into())
}

/// One artifact in every supported format.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    /// Forces CSV regardless of `--format`.
    pub csv_only: bool,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Self {
            json,
            text,
            csv: None,
            csv_only: false,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn parse_lambda(s: &str) -> Result<ExactCoeff, CliError> {
    ExactCoeff::from_decimal_str(s).map_err(|e| CliError::Validation(e.to_string()))
}

fn preset(case: u8, lambda: &str) -> Result<CasePreset, CliError> {
    CasePreset::new(case, parse_lambda(lambda)?).map_err(|e| CliError::Validation(e.to_string()))
}

fn require_positive(c: &ExactCoeff, what: &str) -> Result<(), CliError> {
    if c.signum() != std::cmp::Ordering::Greater {
        return Err(CliError::Validation(format!("{what} must be positive")));
    }
    Ok(())
}

fn basis_for(poly: &PolynomialPotential, n_max: usize, omega: OmegaPolicy) -> Result<BasisSpec, CliError> {
    let (wx, wy) = match omega {
        OmegaPolicy::Fixed(w) => (w, w),
        OmegaPolicy::Optimal => axis_omegas(poly),
    };
    let basis = BasisSpec::anisotropic(n_max, n_max, wx, wy, 0.0);
    basis.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(basis)
}

fn poly_json(poly: &PolynomialPotential) -> Value {
    serde_json::from_str(&poly.to_json()).expect("polynomial json")
}

fn map_json(map: &OrthogonalMap2) -> Value {
    let entries: Vec<Vec<String>> = map.entries().iter().map(|row| row.iter().map(|c| c.to_string()).collect()).collect();
    json!({ "label": map.label(), "matrix": entries, "display": map.to_string() })
}

fn levels(poly: &PolynomialPotential, basis: &BasisSpec, count: usize) -> Result<Vec<f64>, CliError> {
    let h = build_hamiltonian(poly, basis).map_err(fail)?;
    let mut e = eigenvalues_selfadjoint(&h).map_err(fail)?;
    e.truncate(count);
    Ok(e)
}

fn levels_text(levels: &[f64]) -> String {
    levels.iter().enumerate().map(|(k, e)| format!("  E[{k}] = {e:.12}\n")).collect()
}

fn levels_csv(levels: &[f64]) -> String {
    let mut out = String::from("index,energy\n");
    for (k, e) in levels.iter().enumerate() {
        let _ = writeln!(out, "{k},{e:.12}");
    }
    out
}

/// `(value, multiplicity)` for runs of levels closer than `DEGENERACY_TOL`.
fn multiplets(levels: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &e in levels {
        match out.last_mut() {
            Some((v, m)) if (e - *v).abs() < DEGENERACY_TOL * v.abs().max(1.0) => *m += 1,
            _ => out.push((e, 1)),
        }
    }
    out
}

fn group_json(g: &SymmetryGroup) -> Value {
    serde_json::to_value(g.report()).expect("group report")
}

struct RpmRun {
    problem: RpmProblem,
    solution: RpmSolution,
}

impl RpmRun {
    fn significant_digits(&self) -> usize {
        (self.solution.stabilized_digits.max(1) as usize).min(self.problem.precision_digits as usize)
    }

    fn digits_of(&self, x: &HighPrec) -> String {
        to_decimal_string(x, self.significant_digits())
    }

    fn json(&self) -> Value {
        let mut v = serde_json::to_value(self.solution.report(&self.problem)).expect("trail report");
        let obj = v.as_object_mut().expect("object");
        obj.insert("E".into(), json!(self.digits_of(&self.solution.energy)));
        obj.insert("precision_digits".into(), json!(self.problem.precision_digits));
        obj.insert("working_digits".into(), json!(self.problem.working_digits()));
        obj.insert("non_monotone_trail".into(), json!(self.solution.non_monotone_trail));
        v
    }
}

fn run_rpm(g: &ExactCoeff, parity: Parity, precision: &PrecisionArgs, displacement: usize, seed: Option<f64>) -> Result<RpmRun, CliError> {
    require_positive(g, "g")?;
    if precision.dmax < 3 {
        return Err(CliError::Validation("--dmax must be >= 3".into()));
    }
    if precision.digits < 10 {
        return Err(CliError::Validation("--digits must be >= 10".into()));
    }
    let seed = match seed {
        Some(s) => s,
        None => {
            let idx = parity.index() as usize;
            quartic_levels_1d(g.to_f64(), SEED_BASIS, idx + 1).map_err(CliError::Numerical)?[idx]
        }
    };
    let mut problem = RpmProblem::quartic(g.rational_part().clone(), parity, seed);
    problem.displacement = displacement;
    problem.d_max = precision.dmax;
    problem.precision_digits = precision.digits;
    let solution = rpm_eigenvalue(&problem).map_err(fail)?;
    Ok(RpmRun { problem, solution })
}

fn rpm_text(run: &RpmRun) -> String {
    let s = &run.solution;
    let mut t = format!(
        "E = {}\nstabilized digits: {} (D = {}, working precision {} digits)\n",
        run.digits_of(&s.energy),
        s.stabilized_digits,
        run.problem.d_max,
        run.problem.working_digits()
    );
    if s.non_monotone_trail {
        t.push_str("warning: root differences stopped decreasing before D_max\n");
    }
    t
}

fn rpm_csv(run: &RpmRun) -> String {
    let mut out = String::from("D,E\n");
    for p in &run.solution.trail {
        let _ = writeln!(out, "{},{}", p.dim, to_decimal_string(&p.energy, run.problem.precision_digits as usize));
    }
    out
}

pub fn rpm(args: &RpmArgs) -> Result<Report, CliError> {
    let g = parse_lambda(&args.g)?;
    if !g.is_rational() {
        return Err(CliError::Validation("g must be rational".into()));
    }
    let parity = match args.state {
        State::Even => Parity::Even,
        State::Odd => Parity::Odd,
    };
    let run = run_rpm(&g, parity, &args.precision, args.displacement, args.seed)?;
    Ok(Report::new(run.json(), rpm_text(&run)).with_csv(rpm_csv(&run)))
}

pub fn transform(args: &TransformArgs) -> Result<Report, CliError> {
    let p = preset(args.case, &args.lambda)?;
    let mut text = format!("case {} (lambda = {})\nV = {}\n", p.id, p.lambda, p.potential);
    let json = match p.reference_map() {
        Some(map) => {
            let t = p.potential.apply_linear_map(&map);
            let _ = write!(text, "map {map}\nV' = {t}\nseparable: {}\n", t.is_separable());
            json!({
                "case": p.id,
                "lambda": p.lambda.to_string(),
                "potential": poly_json(&p.potential),
                "map": map_json(&map),
                "transformed": poly_json(&t),
                "transformed_display": t.to_string(),
                "separable": t.is_separable(),
            })
        }
        None => {
            text.push_str("no reference map: the potential is already in its simplest axes\n");
            json!({
                "case": p.id,
                "lambda": p.lambda.to_string(),
                "potential": poly_json(&p.potential),
                "map": Value::Null,
            })
        }
    };
    Ok(Report::new(json, text))
}

fn symmetry_report(p: &CasePreset) -> Result<(Value, String), CliError> {
    let group = detect_group(&p.potential, &default_candidates()).map_err(fail)?;
    let bounded = p.potential.is_bounded_below();
    let qmin = p.potential.quartic_form_min().ok();
    let sep = separating_rotation(&p.potential);
    let mut text = format!(
        "V = {}\npoint group order {}: {}\nbounded below: {:?}\n",
        p.potential,
        group.order(),
        group.labels().join(", "),
        bounded
    );
    if let Some(q) = qmin {
        let _ = writeln!(text, "quartic form minimum on the unit circle: {:.12} at phi = {:.12}", q.min_value, q.direction_angle);
    }
    match &sep {
        Some(s) => {
            let _ = writeln!(text, "separating rotation angle: {:.12}", s.angle);
        }
        None => text.push_str("no separating rotation\n"),
    }
    let mut json = json!({
        "case": p.id,
        "lambda": p.lambda.to_string(),
        "group": group_json(&group),
        "boundedness": format!("{bounded:?}"),
        "quartic_min": qmin.map(|q| json!({ "value": q.min_value, "angle": q.direction_angle })),
        "separating_rotation": sep.as_ref().map(|s| json!({
            "angle": s.angle,
            "map": s.map.as_ref().map(map_json),
        })),
    });
    if let Some(map) = p.reference_map() {
        let t = p.potential.apply_linear_map(&map);
        let t_group = detect_group(&t, &default_candidates()).map_err(fail)?;
        // V' = V∘M carries the group Mᵀ G M.
        let carried = conjugate_group(&group, &map.transpose());
        let consistent = carried.order() == t_group.order() && carried.elements().iter().all(|e| t_group.contains(e));
        let _ = writeln!(
            text,
            "after {}: group order {} ({}), conjugation consistent: {consistent}",
            map.label(),
            t_group.order(),
            t_group.labels().join(", ")
        );
        json["transformed_group"] = group_json(&t_group);
        json["conjugation_consistent"] = json!(consistent);
    }
    Ok((json, text))
}

pub fn symmetry(args: &SymmetryArgs) -> Result<Report, CliError> {
    let p = preset(args.case, &args.lambda)?;
    let (json, text) = symmetry_report(&p)?;
    Ok(Report::new(json, text))
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Report, CliError> {
    let p = preset(args.case, &args.lambda)?;
    let poly = match (args.transformed, p.reference_map()) {
        (true, Some(map)) => p.potential.apply_linear_map(&map),
        (true, None) => return Err(CliError::Validation(format!("case {} has no reference map", p.id))),
        (false, _) => p.potential.clone(),
    };
    let basis = basis_for(&poly, args.nmax, args.omega)?;
    let e = levels(&poly, &basis, args.count)?;
    let bounded = poly.is_bounded_below();
    let mut text = format!("case {} (lambda = {}), basis {}x{}, bounded below: {bounded:?}\n", p.id, p.lambda, args.nmax, args.nmax);
    text.push_str(&levels_text(&e));
    let json = json!({
        "case": p.id,
        "lambda": p.lambda.to_string(),
        "transformed": args.transformed,
        "basis": basis,
        "boundedness": format!("{bounded:?}"),
        "levels": e,
    });
    Ok(Report::new(json, text).with_csv(levels_csv(&e)))
}

fn window(theta: &ThetaArgs) -> Result<((f64, f64), ResonanceConfig), CliError> {
    theta_grid(theta.theta_min, theta.theta_max, theta.theta_steps).map_err(|e| CliError::Validation(e.to_string()))?;
    let config = ResonanceConfig {
        steps: theta.theta_steps,
        ..ResonanceConfig::default()
    };
    Ok(((theta.theta_min, theta.theta_max), config))
}

fn resonance_json(r: &Resonance) -> Value {
    json!({
        "lambda": r.lambda,
        "re_e": r.energy.re,
        "im_e": r.energy.im,
        "theta_star": r.theta_star,
        "theta_star_over_pi": r.theta_star / PI,
        "stability": r.stability,
        "basis_used": r.basis_used,
        "basis_drift": r.basis_drift(),
        "converged": r.converged,
    })
}

fn resonance_text(r: &Resonance) -> String {
    format!(
        "E = {:.10} {:+.10}i at theta = {:.4}pi (|dE/dtheta| = {:.2e}, drift at n+5 = {:.2e}, converged: {})\n",
        r.energy.re,
        r.energy.im,
        r.theta_star / PI,
        r.stability,
        r.basis_drift(),
        r.converged
    )
}

fn resonance_at(p: &CasePreset, n_max: usize, omega: OmegaPolicy, theta: &ThetaArgs) -> Result<Resonance, CliError> {
    let (win, config) = window(theta)?;
    let basis = basis_for(&p.potential, n_max, omega)?;
    let mut r = find_lowest_resonance(&p.potential, &basis, win, &config).map_err(fail)?;
    r.lambda = Some(p.lambda_f64());
    Ok(r)
}

pub fn resonance(args: &ResonanceArgs) -> Result<Report, CliError> {
    let p = preset(args.case, &args.lambda)?;
    let r = resonance_at(&p, args.nmax, args.omega, &args.theta)?;
    let csv = table1_csv(std::slice::from_ref(&r));
    let mut report = Report::new(resonance_json(&r), resonance_text(&r)).with_csv(csv);
    report.csv_only = args.emit_table1;
    Ok(report)
}

pub fn case(args: &CaseArgs) -> Result<Report, CliError> {
    if args.emit_table1 && args.id != 3 {
        return Err(CliError::Validation("--emit-table1 applies to case 3 only".into()));
    }
    match args.id {
        1 | 2 => separable_case(args),
        3 => case3(args),
        4 => case4(args),
        5 => case5(args),
        other => Err(CliError::Validation(format!("unknown case {other} (expected 1..=5)"))),
    }
}

/// Cases 1 and 2: separate, then solve the 1D quartic modes by RPM.
fn separable_case(args: &CaseArgs) -> Result<Report, CliError> {
    let default_lambda = if args.id == 1 { "1" } else { "1000000" };
    let p = preset(args.id, args.lambda.as_deref().unwrap_or(default_lambda))?;
    require_positive(&p.lambda, "lambda")?;
    let map = p.reference_map().expect("separable cases have a map");
    let t = p.potential.apply_linear_map(&map);

    // Case 1 separates into a harmonic x-mode (energy 1) plus p² + y² + 4λy⁴;
    // case 2 into two copies of p² + x² + 2λx⁴.
    let (g, copies) = if args.id == 1 {
        (t.coefficient(0, 4), 1)
    } else {
        (t.coefficient(4, 0), 2)
    };
    let run = run_rpm(&g, Parity::Even, &args.precision, 0, None)?;
    let bits = anharmonic::rpm::bits_for_digits(run.problem.working_digits());
    let energy = if copies == 1 {
        &run.solution.energy + &hp_from_int(1, bits)
    } else {
        &run.solution.energy * &hp_from_int(2, bits)
    };

    let n_var = args.nmax.unwrap_or(if args.id == 1 { 60 } else { 40 });
    let (wx, wy) = match args.omega.unwrap_or(OmegaPolicy::Optimal) {
        OmegaPolicy::Fixed(w) => (w, w),
        OmegaPolicy::Optimal => axis_omegas(&t),
    };
    // The harmonic x-mode of case 1 is exact with two functions.
    let nx = if args.id == 1 { 2 } else { n_var };
    let basis = BasisSpec::anisotropic(nx, n_var, wx, wy, 0.0);
    basis.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    let var = levels(&t, &basis, 1)?[0];

    let e_str = run.digits_of(&energy);
    let text = format!(
        "case {} (lambda = {})\nV = {}\nmap {}\nV' = {}\nE0 (RPM) = {}\nE0 (Rayleigh-Ritz, {}x{}) = {:.15}\n{}",
        p.id,
        p.lambda,
        p.potential,
        map,
        t,
        e_str,
        nx,
        n_var,
        var,
        rpm_text(&run)
    );
    let json = json!({
        "case": p.id,
        "lambda": p.lambda.to_string(),
        "potential": poly_json(&p.potential),
        "map": map_json(&map),
        "transformed": poly_json(&t),
        "separable": t.is_separable(),
        "energy": e_str,
        "rpm": run.json(),
        "variational": { "basis": basis, "energy": var },
    });
    Ok(Report::new(json, text))
}

fn case3(args: &CaseArgs) -> Result<Report, CliError> {
    let n_max = args.nmax.unwrap_or(30);
    let omega = args.omega.unwrap_or(OmegaPolicy::Fixed(1.0));
    if args.emit_table1 {
        let lambdas: Vec<&str> = match &args.lambda {
            Some(l) => vec![l.as_str()],
            None => TABLE1_LAMBDAS.to_vec(),
        };
        let rows = lambdas
            .iter()
            .map(|l| resonance_at(&preset(3, l)?, n_max, omega, &args.theta))
            .collect::<Result<Vec<_>, _>>()?;
        let csv = table1_csv(&rows);
        let json = json!({ "rows": rows.iter().map(resonance_json).collect::<Vec<_>>() });
        return Ok(Report {
            json,
            text: csv.clone(),
            csv: Some(csv),
            csv_only: true,
        });
    }
    let p = preset(3, args.lambda.as_deref().unwrap_or("0.10"))?;
    let (mut json, mut text) = symmetry_report(&p)?;
    let map = p.reference_map().expect("case 3 map");
    let t = p.potential.apply_linear_map(&map);
    let _ = writeln!(text, "V' = {t}");
    json["transformed"] = poly_json(&t);
    let r = resonance_at(&p, n_max, omega, &args.theta)?;
    text.push_str(&resonance_text(&r));
    json["resonance"] = resonance_json(&r);
    let csv = table1_csv(std::slice::from_ref(&r));
    Ok(Report::new(json, text).with_csv(csv))
}

/// Case 4 is case 1 seen through a parity flip: check it exactly and numerically.
fn case4(args: &CaseArgs) -> Result<Report, CliError> {
    let lambda = args.lambda.as_deref().unwrap_or("0.1");
    let p4 = preset(4, lambda)?;
    let p1 = preset(1, lambda)?;
    let exact_x = p4.potential.apply_linear_map(&OrthogonalMap2::flip_x()) == p1.potential;
    let exact_y = p4.potential.apply_linear_map(&OrthogonalMap2::flip_y()) == p1.potential;
    let n_max = args.nmax.unwrap_or(20);
    let omega = args.omega.unwrap_or(OmegaPolicy::Optimal);
    let count = 10;
    let e4 = levels(&p4.potential, &basis_for(&p4.potential, n_max, omega)?, count)?;
    let e1 = levels(&p1.potential, &basis_for(&p1.potential, n_max, omega)?, count)?;
    let max_diff = e4.iter().zip(&e1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut text = format!(
        "case 4 (lambda = {})\nV4 = {}\nV4(-x, y) == V1: {exact_x}\nV4(x, -y) == V1: {exact_y}\n",
        p4.lambda, p4.potential
    );
    let _ = writeln!(text, "lowest {count} levels, basis {n_max}x{n_max}:");
    for (k, (a, b)) in e4.iter().zip(&e1).enumerate() {
        let _ = writeln!(text, "  {k}: case4 {a:.12}  case1 {b:.12}");
    }
    let _ = writeln!(text, "max |difference| = {max_diff:.3e}");
    let json = json!({
        "case": 4,
        "lambda": p4.lambda.to_string(),
        "potential": poly_json(&p4.potential),
        "isospectrality": {
            "exact_flip_x": exact_x,
            "exact_flip_y": exact_y,
            "n_max": n_max,
            "levels_case4": e4,
            "levels_case1": e1,
            "max_abs_difference": max_diff,
        },
    });
    Ok(Report::new(json, text))
}

fn case5(args: &CaseArgs) -> Result<Report, CliError> {
    let p = preset(5, args.lambda.as_deref().unwrap_or("0.01"))?;
    let (mut json, mut text) = symmetry_report(&p)?;
    let n_max = args.nmax.unwrap_or(20);
    let basis = basis_for(&p.potential, n_max, args.omega.unwrap_or(OmegaPolicy::Fixed(1.0)))?;
    let e = levels(&p.potential, &basis, 10)?;
    let _ = writeln!(text, "lowest levels, basis {n_max}x{n_max}:");
    text.push_str(&levels_text(&e));
    json["levels"] = json!(e);
    json["multiplets"] = json!(multiplets(&e).iter().map(|(v, m)| json!({ "energy": v, "multiplicity": m })).collect::<Vec<_>>());
    Ok(Report::new(json, text).with_csv(levels_csv(&e)))
}
