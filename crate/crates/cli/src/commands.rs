//! Subcommand implementations. Each returns a [`Table`] in input order.

use casimir_sso::cp::{cp_energy, CpConfig, Polarizability};
use casimir_sso::cylinder::{cyl_sso_block, mse_t, t_exact, CylinderConfig, CylinderMethod};
use casimir_sso::mse::pairing_defect;
use casimir_sso::plates::{
    casimir_force_per_area, lifshitz_energy_per_area, lifshitz_force_per_area, mse_energy_per_area, PlateConfig,
    PlateResult, Truncation,
};
use casimir_sso::sphere::{sphere_sso_block, SphereConfig, SphereMethod};
use casimir_sso::statics::{static_sphere_eigs, SphereGrid, StaticContrast};
use casimir_sso::types::Inverse;
use casimir_sso::units::{energy_per_area_si, energy_si, ev_to_wavenumber, pressure_si};
use casimir_sso::{EnergyBreakdown, Error, MaterialModel, MediumResponse, Temperature};
use nalgebra::Complex;
use rayon::prelude::*;

use crate::args::*;
use crate::output::{Cell, Table};

/// Input errors exit with 1, numerical failures with 2.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) | CliError::Numerical(s) => f.write_str(s),
        }
    }
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Input(s)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::PerfectConductor
            | Error::StaticLimit(_)
            | Error::NonPositiveSeparation(_)
            | Error::GeometryMismatch => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

type Res<T> = Result<T, CliError>;

fn medium(eps: f64, mu: f64) -> Res<MediumResponse> {
    Ok(MediumResponse::new(eps, mu)?)
}

/// Conversion factor and label for results in `ħc / L^power`.
fn scale(units: Units, power: i32) -> (f64, String) {
    match (units, power) {
        (Units::Dimensionless, p) => (1.0, format!("hbar*c/L^{p}")),
        (Units::Si, 1) => (energy_si(SI_UNIT), "J".into()),
        (Units::Si, 3) => (energy_per_area_si(SI_UNIT), "J/m^2".into()),
        (Units::Si, 4) => (pressure_si(SI_UNIT), "Pa".into()),
        (Units::Si, p) => unreachable!("no SI unit for power {p}"),
    }
}

/// Wavenumber in output units: 1/m in SI mode, 1/L otherwise.
fn wavenumber_out(kappa: f64, units: Units) -> f64 {
    match units {
        Units::Si => kappa / SI_UNIT.in_metres(),
        Units::Dimensionless => kappa,
    }
}

fn body_cells(prefix: &str, b: &Body) -> Vec<(String, Cell)> {
    let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
    vec![
        (prefix.to_string(), Cell::Text(format!("{:?}", b.kind).to_lowercase())),
        (format!("eps_{prefix}"), opt(b.eps)),
        (format!("mu_{prefix}"), Cell::Num(b.mu)),
        (format!("wp_{prefix}"), opt(b.wp)),
        (format!("gamma_{prefix}"), opt(b.gamma)),
    ]
}

fn thermal_cell(t: &Thermal, units: Units) -> (String, Cell) {
    match units {
        Units::Si => ("temperature".into(), Cell::Num(t.temperature.unwrap_or(0.0))),
        Units::Dimensionless => ("tau".into(), Cell::Num(t.tau.unwrap_or(0.0))),
    }
}

fn attach(table: Table, inputs: Vec<(String, Cell)>) -> Table {
    let refs: Vec<(&str, Cell)> = inputs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    table.with_inputs(&refs)
}

/// Rows `n, kappa_n, term, cumulative` with weighted terms, then a total row.
fn breakdown_table(breakdown: Option<&EnergyBreakdown>, tau: f64, total: f64, factor: f64, units: Units) -> Table {
    let mut t = Table::new(["n", "kappa_n", "term", "cumulative"]);
    let mut cumulative = 0.0;
    if let Some(b) = breakdown {
        for term in &b.terms {
            let w = EnergyBreakdown::weight(tau, term.n) * term.value * factor;
            cumulative += w;
            t.push(vec![term.n.into(), wavenumber_out(term.kappa, units).into(), w.into(), cumulative.into()]);
        }
    }
    t.push(vec!["total".into(), Cell::Empty, (total * factor).into(), (total * factor).into()]);
    t
}

struct PlateSetup {
    config: PlateConfig,
    order: Order,
}

fn plate_setup(
    bodies: &TwoBodies,
    distance: f64,
    thermal: &Thermal,
    order: &str,
    symmetric: bool,
    tolerance: &Tolerance,
    units: Units,
) -> Res<PlateSetup> {
    let [b1, b2] = bodies.bodies();
    let mut config =
        PlateConfig::new(b1.model(units, "body1")?, b2.model(units, "body2")?, distance, thermal.resolve(units)?);
    config.medium0 = MaterialModel::fixed(bodies.eps0, bodies.mu0)?;
    config.quadrature = tolerance.quadrature()?;
    config.matsubara = (&config.quadrature).into();
    if symmetric {
        config.truncation = Truncation::Symmetric;
    }
    config.validated()?;
    Ok(PlateSetup { config, order: parse_order(order)? })
}

fn plate_value(s: &PlateSetup, quantity: Quantity) -> Res<PlateResult> {
    Ok(match (s.order, quantity) {
        (Order::Lifshitz, Quantity::Energy) => lifshitz_energy_per_area(&s.config)?,
        (Order::Lifshitz, Quantity::Force) => lifshitz_force_per_area(&s.config)?,
        (Order::Mse(o), Quantity::Energy) => mse_energy_per_area(&s.config, o)?,
        (Order::Mse(o), Quantity::Force) => casimir_force_per_area(&s.config, o)?,
    })
}

fn quantity_power(q: Quantity) -> i32 {
    match q {
        Quantity::Energy => 3,
        Quantity::Force => 4,
    }
}

fn plate_inputs(bodies: &TwoBodies, thermal: &Thermal, order: Order, quantity: Quantity, units: Units) -> Vec<(String, Cell)> {
    let [b1, b2] = bodies.bodies();
    let mut v = vec![
        ("quantity".to_string(), Cell::Text(format!("{quantity:?}").to_lowercase())),
        ("order".to_string(), Cell::Text(order.label())),
    ];
    v.extend(body_cells("body1", &b1));
    v.extend(body_cells("body2", &b2));
    v.push(("eps0".into(), Cell::Num(bodies.eps0)));
    v.push(("mu0".into(), Cell::Num(bodies.mu0)));
    v.push(thermal_cell(thermal, units));
    v.push(("value_unit".into(), Cell::Text(scale(units, quantity_power(quantity)).1)));
    v
}

pub fn plates(a: &PlatesArgs) -> Res<Table> {
    let units = a.common.units;
    let distance_text = match (&a.distance, units) {
        (Some(d), _) => d.clone(),
        (None, Units::Dimensionless) => "1".into(),
        (None, Units::Si) => return Err(CliError::Input("--distance is required in SI mode".into())),
    };
    let distance = parse_length(&distance_text, units)?;
    let setup = plate_setup(&a.bodies, distance, &a.thermal, &a.order, a.symmetric, &a.tolerance, units)?;
    let r = plate_value(&setup, a.quantity)?;
    let tau = match setup.config.temperature {
        Temperature::Thermal(t) => t,
        Temperature::Zero => 0.0,
    };
    let (factor, _) = scale(units, quantity_power(a.quantity));
    let mut t = breakdown_table(r.breakdown.as_ref(), tau, r.value, factor, units);
    t.converged = r.converged;
    let mut inputs = plate_inputs(&a.bodies, &a.thermal, setup.order, a.quantity, units);
    inputs.insert(2, ("distance".into(), Cell::Text(distance_text)));
    inputs.push(("abs_error".into(), Cell::Num(r.abs_error * factor)));
    inputs.push(("converged".into(), Cell::Bool(r.converged)));
    Ok(attach(t, inputs))
}

pub fn plates_sweep(a: &PlatesSweepArgs) -> Res<Table> {
    let units = a.common.units;
    let texts: Vec<String> = parse_list(&a.distances, |s| Ok(s.to_string()))?;
    let distances: Vec<f64> = texts.iter().map(|s| parse_length(s, units)).collect::<Result<_, _>>()?;
    let setups: Vec<PlateSetup> = distances
        .iter()
        .map(|&d| plate_setup(&a.bodies, d, &a.thermal, &a.order, a.symmetric, &a.tolerance, units))
        .collect::<Res<_>>()?;
    // collect() keeps input order regardless of completion order
    let results: Vec<Res<PlateResult>> = setups.par_iter().map(|s| plate_value(s, a.quantity)).collect();
    let (factor, _) = scale(units, quantity_power(a.quantity));
    let mut t = Table::new(["distance", "value", "abs_error", "converged"]);
    for (text, r) in texts.iter().zip(results) {
        let r = r?;
        t.converged &= r.converged;
        t.push(vec![text.as_str().into(), (r.value * factor).into(), (r.abs_error * factor).into(), r.converged.into()]);
    }
    let order = setups[0].order;
    Ok(attach(t, plate_inputs(&a.bodies, &a.thermal, order, a.quantity, units)))
}

fn eigen_columns(first: &[&str]) -> Table {
    let mut cols: Vec<String> = first.iter().map(|s| s.to_string()).collect();
    for i in 1..=4 {
        cols.push(format!("lambda{i}_re"));
        cols.push(format!("lambda{i}_im"));
    }
    cols.extend(["max_modulus", "pairing_defect", "converged"].map(String::from));
    Table::new(cols)
}

fn eigen_cells(ev: &[Complex<f64>; 4], converged: bool) -> Vec<Cell> {
    let mut row = Vec::with_capacity(11);
    for v in ev {
        row.push(v.re.into());
        row.push(v.im.into());
    }
    row.push(ev.iter().map(|v| v.norm()).fold(0.0, f64::max).into());
    row.push(pairing_defect(ev).into());
    row.push(converged.into());
    row
}

fn medium_inputs(eps: f64, mu: f64, eps0: f64, mu0: f64, method: BlockMethod) -> Vec<(String, Cell)> {
    vec![
        ("eps".into(), eps.into()),
        ("mu".into(), mu.into()),
        ("eps0".into(), eps0.into()),
        ("mu0".into(), mu0.into()),
        ("method".into(), Cell::Text(format!("{method:?}").to_lowercase())),
    ]
}

pub fn sphere_eigs(a: &SphereEigsArgs) -> Res<Table> {
    let ls = parse_list(&a.l, parse_usize)?;
    let krs = parse_list(&a.kappa_r, parse_f64)?;
    let cfg = SphereConfig::new(1.0, MaterialModel::fixed(a.eps, a.mu)?, medium(a.eps0, a.mu0)?)?;
    let method = match a.method {
        BlockMethod::Analytic => SphereMethod::AdditionTheorem,
        BlockMethod::Quadrature => SphereMethod::Quadrature,
    };
    let grid: Vec<(usize, f64)> = ls.iter().flat_map(|&l| krs.iter().map(move |&k| (l, k))).collect();
    let blocks: Vec<_> = grid.par_iter().map(|&(l, kr)| sphere_sso_block(l, kr, &cfg, method)).collect();
    let mut t = eigen_columns(&["l", "kappaR"]);
    for (&(l, kr), b) in grid.iter().zip(blocks) {
        let b = b?;
        t.converged &= b.converged;
        let mut row = vec![l.into(), kr.into()];
        row.extend(eigen_cells(&b.block.eigenvalues(), b.converged));
        t.push(row);
    }
    Ok(attach(t, medium_inputs(a.eps, a.mu, a.eps0, a.mu0, a.method)))
}

pub fn cylinder_eigs(a: &CylinderEigsArgs) -> Res<Table> {
    let ms = parse_list(&a.m, parse_usize)?;
    let krs = parse_list(&a.kappa_r, parse_f64)?;
    let kzs = parse_list(&a.kz_r, parse_f64)?;
    let cfg = CylinderConfig::new(1.0, MaterialModel::fixed(a.eps, a.mu)?, medium(a.eps0, a.mu0)?)?;
    let method = match a.method {
        BlockMethod::Analytic => CylinderMethod::Analytic,
        BlockMethod::Quadrature => CylinderMethod::Quadrature,
    };
    let mut grid = Vec::new();
    for &m in &ms {
        for &kr in &krs {
            for &kz in &kzs {
                grid.push((m, kr, kz));
            }
        }
    }
    let blocks: Vec<_> = grid.par_iter().map(|&(m, kr, kz)| cyl_sso_block(m, kr, kz, &cfg, method)).collect();
    let mut t = eigen_columns(&["m", "kappaR", "kzR"]);
    for (&(m, kr, kz), b) in grid.iter().zip(blocks) {
        let b = b?;
        t.converged &= b.converged;
        let mut row = vec![m.into(), kr.into(), kz.into()];
        row.extend(eigen_cells(&b.block.eigenvalues(), b.converged));
        t.push(row);
    }
    Ok(attach(t, medium_inputs(a.eps, a.mu, a.eps0, a.mu0, a.method)))
}

pub fn cylinder_tmatrix(a: &CylinderTmatrixArgs) -> Res<Table> {
    let cfg = CylinderConfig::new(1.0, MaterialModel::fixed(a.eps, a.mu)?, medium(a.eps0, a.mu0)?)?;
    let (tb, method) = match a.neumann {
        None => (t_exact(a.m, a.kappa_r, a.kz_r, &cfg)?, "closed_form".to_string()),
        Some(n) => (mse_t(a.m, a.kappa_r, a.kz_r, &cfg, Inverse::Neumann(n))?, format!("neumann_{n}")),
    };
    let full = tb.value();
    let mut t = Table::new(["m", "kappaR", "kzR", "t_ee", "t_eh", "t_he", "t_hh", "log_scale", "t_ee_scaled", "t_eh_scaled", "t_he_scaled", "t_hh_scaled"]);
    t.push(vec![
        a.m.into(),
        a.kappa_r.into(),
        a.kz_r.into(),
        full[(0, 0)].into(),
        full[(0, 1)].into(),
        full[(1, 0)].into(),
        full[(1, 1)].into(),
        tb.log_scale.into(),
        tb.ee().into(),
        tb.eh().into(),
        tb.he().into(),
        tb.hh().into(),
    ]);
    let mut inputs = medium_inputs(a.eps, a.mu, a.eps0, a.mu0, BlockMethod::Analytic);
    inputs.pop();
    inputs.push(("method".into(), Cell::Text(method)));
    Ok(attach(t, inputs))
}

pub fn cp_plate(a: &CpPlateArgs) -> Res<Table> {
    let units = a.common.units;
    let z0 = parse_length(&a.z0, units)?;
    let resonance = |w: Option<f64>| match (w, units) {
        (None, _) => f64::INFINITY,
        (Some(w), Units::Si) => ev_to_wavenumber(w, SI_UNIT),
        (Some(w), Units::Dimensionless) => w,
    };
    let particle =
        Polarizability { alpha0: a.alpha0, omega_a: resonance(a.omega_a), beta0: a.beta0, omega_b: resonance(a.omega_b) }
            .validated()?;
    let body = Body { kind: a.body, eps: a.eps, mu: a.mu, wp: a.wp, gamma: a.gamma };
    let order = match parse_order(&a.order)? {
        Order::Mse(o) => o,
        Order::Lifshitz => return Err(CliError::Input("cp-plate takes --order exact or K,L".into())),
    };
    let mut cfg = CpConfig::new(z0, body.model(units, "plate")?, a.thermal.resolve(units)?, order);
    cfg.quadrature = a.tolerance.quadrature()?;
    cfg.matsubara = (&cfg.quadrature).into();
    let r = cp_energy(&particle, &cfg)?;
    let tau = match cfg.temperature {
        Temperature::Thermal(t) => t,
        Temperature::Zero => 0.0,
    };
    let (factor, label) = scale(units, 1);
    let mut t = breakdown_table(r.breakdown.as_ref(), tau, r.value, factor, units);
    t.converged = r.converged;
    let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
    let mut inputs = vec![
        ("order".to_string(), Cell::Text(Order::Mse(order).label())),
        ("z0".into(), Cell::Text(a.z0.clone())),
        ("alpha0".into(), a.alpha0.into()),
        ("omega_a".into(), opt(a.omega_a)),
        ("beta0".into(), a.beta0.into()),
        ("omega_b".into(), opt(a.omega_b)),
    ];
    inputs.extend(body_cells("plate", &body));
    inputs.push(thermal_cell(&a.thermal, units));
    inputs.push(("value_unit".into(), Cell::Text(label)));
    inputs.push(("abs_error".into(), Cell::Num(r.abs_error * factor)));
    inputs.push(("converged".into(), Cell::Bool(r.converged)));
    Ok(attach(t, inputs))
}

pub fn static_eigs(a: &StaticEigsArgs) -> Res<Table> {
    let contrast = StaticContrast::new(a.chi_out, a.chi_in)?;
    let grid = SphereGrid::new(1.0, a.n_theta)?;
    let eigs = static_sphere_eigs(a.l_max, contrast, &grid)?;
    let mut t = Table::new(["l", "lambda"]);
    for (l, v) in eigs.iter().enumerate() {
        t.push(vec![l.into(), (*v).into()]);
    }
    Ok(attach(
        t,
        vec![
            ("chi_out".into(), a.chi_out.into()),
            ("chi_in".into(), a.chi_in.into()),
            ("contrast".into(), contrast.value().into()),
            ("n_theta".into(), a.n_theta.into()),
        ],
    ))
}
