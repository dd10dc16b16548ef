//! Drivers behind the command-line subcommands. Each returns a [`Report`]
//! holding the raw data and a verification block.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrsError, Result};
use crate::fock::ed::{ed_point, EdConfig, EdPoint};
use crate::fock::eigen::EigenOptions;
use crate::fock::space::FockSpace;
use crate::gauge::{
    self, linear_grid, map_afrp, map_frp, map_frustrated, qrr_branch_softens, qrr_critical_coupling,
    triple_point, verify_equivalence, GaugeParams, Regime,
};
use crate::meanfield::{self, classify_phase, scaling_exponent, Side};
use crate::model::{self, dominant_branch, ModelParams, MomentumBranch};
use crate::report::{Cell, Report};
use crate::spin::{compare_to_displacements, minimize_spin_energy, SpinBranch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Ed,
    Both,
}

impl Method {
    pub fn uses_ed(self) -> bool {
        !matches!(self, Method::Analytic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if self.steps < 2 {
            return Err(QrsError::InvalidParams(format!("{what}: steps must be at least 2")));
        }
        if !(self.min < self.max) {
            return Err(QrsError::InvalidParams(format!(
                "{what}: range [{}, {}] is not ordered",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Grid nodes snapped to 12 decimals, so decimal ranges print cleanly.
    pub fn points(&self) -> Vec<f64> {
        linear_grid(self.min, self.max, self.steps)
            .into_iter()
            .map(|x| (x * 1e12).round() / 1e12)
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub omega: f64,
    pub qubit_gap: f64,
    /// Single coupling; takes precedence over `lambda`.
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub j1: f64,
    pub j2: f64,
    pub j1_0: f64,
    pub theta: f64,
    pub g_range: Range,
    pub j2_range: Range,
    pub method: Method,
    pub n_c: usize,
    pub seed: u64,
    /// Memory budget for concurrent ED jobs, in MiB.
    pub memory_cap_mb: usize,
    /// Include the zero-point term in superradiant energies.
    pub fluctuation: bool,
    pub window: (f64, f64),
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            qubit_gap: 50.0,
            g: None,
            lambda: None,
            j1: 0.05,
            j2: 0.02,
            j1_0: 0.05,
            theta: FRAC_PI_4,
            g_range: Range::new(0.3, 0.7, 41),
            j2_range: Range::new(0.0, 0.1, 21),
            method: Method::Analytic,
            n_c: 5,
            seed: 1,
            memory_cap_mb: 2048,
            fluctuation: true,
            window: (1e-6, 1e-3),
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams> {
        let lambda = match (self.g, self.lambda) {
            (Some(g), _) => g * (self.omega * self.qubit_gap).sqrt(),
            (None, Some(l)) => l,
            (None, None) => 0.0,
        };
        ModelParams::new(self.omega, self.qubit_gap, lambda, self.j1, self.j2)
    }

    /// The single coupling `g`, from `g` or `lambda`.
    pub fn coupling(&self) -> Result<f64> {
        match (self.g, self.lambda) {
            (Some(g), _) => Ok(g),
            (None, Some(_)) => Ok(self.params()?.g()),
            (None, None) => Err(QrsError::InvalidParams("a coupling (--g or --lambda) is required".into())),
        }
    }

    pub fn gauge(&self) -> Result<GaugeParams> {
        GaugeParams::new(self.j1_0, self.theta)
    }

    pub fn ed(&self) -> EdConfig {
        EdConfig {
            eigen: EigenOptions {
                seed: self.seed,
                ..EigenOptions::default()
            },
            ..EdConfig::new(self.n_c)
        }
    }

    /// Concurrent ED jobs allowed by the memory budget.
    pub fn ed_workers(&self) -> Result<usize> {
        let space = FockSpace::new(self.n_c)?;
        let dim = space.dim();
        let opts = EigenOptions::default();
        // Krylov basis and sparse rows (~30 entries at 24 bytes), or the
        // dense matrix with its eigenvectors
        let bytes = if dim <= opts.dense_threshold {
            3 * 16 * dim * dim
        } else {
            dim * (16 * (opts.max_krylov + 8) + 30 * 24)
        };
        let budget = self.memory_cap_mb.saturating_mul(1 << 20);
        if bytes > budget {
            return Err(QrsError::InvalidParams(format!(
                "one ED job needs about {} MiB, above the {} MiB cap",
                bytes >> 20,
                self.memory_cap_mb
            )));
        }
        Ok((budget / bytes).clamp(1, rayon::current_num_threads()))
    }
}

fn q_cell(q: Option<MomentumBranch>) -> Cell {
    q.map_or(Cell::Empty, |q| q.to_string().into())
}

fn pattern_string(p: &[i8]) -> String {
    p.iter()
        .map(|s| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        })
        .collect()
}

/// Runs `f` over `items` on a pool sized by the ED memory budget; results
/// keep the input order.
fn ed_map<T: Sync, R: Send>(cfg: &RunConfig, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.ed_workers()?)
        .build()
        .map_err(|e| QrsError::InvalidParams(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// Runs a subcommand by name: `critical`, `sweep`, `phase-diagram`,
/// `scaling`, `spin`, `ed-compare` or `gauge <map-afrp|map-frustrated|triple|verify>`.
pub fn run_named(command: &str, cfg: &RunConfig) -> Result<Report> {
    let words: Vec<&str> = command.split_whitespace().collect();
    match words.as_slice() {
        ["critical"] => run_critical(cfg),
        ["sweep"] => run_sweep(cfg),
        ["phase-diagram"] => run_phase_diagram(cfg),
        ["scaling"] => run_scaling(cfg),
        ["spin"] => run_spin(cfg),
        ["ed-compare"] => run_ed_compare(cfg),
        ["gauge", sub] => {
            let cmd = serde_json::from_value(serde_json::Value::String((*sub).to_owned()))
                .map_err(|_| QrsError::InvalidParams(format!("unknown gauge action '{sub}'")))?;
            run_gauge(cfg, cmd)
        }
        _ => Err(QrsError::InvalidParams(format!("unknown command '{command}'"))),
    }
}

/// Critical coupling of every branch and the dominant one.
pub fn run_critical(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let mut r = Report::new(
        "critical",
        cfg,
        &["branch", "q", "four_gc_sq", "g_c", "dominant", "tie"],
    );
    let dom = dominant_branch(&p)?;
    let gcs = MomentumBranch::ALL
        .iter()
        .map(|&q| model::critical_coupling(&p, q))
        .collect::<Result<Vec<f64>>>()?;
    let is_min = |g_c: f64| (g_c - dom.g_c).abs() <= model::TIE_TOLERANCE * dom.g_c;
    let families: Vec<String> = model::FAMILIES
        .iter()
        .filter(|q| is_min(gcs[q.index() as usize]))
        .map(|q| q.to_string())
        .collect();
    let tie = families.len() > 1;
    if tie {
        log::warn!("branches {} share g_c = {}", families.join(", "), dom.g_c);
    }
    for (q, &g_c) in MomentumBranch::ALL.iter().zip(&gcs) {
        r.push(vec![
            q.to_string().into(),
            q.radians().into(),
            model::critical_coupling_sq4(&p, *q).into(),
            g_c.into(),
            is_min(g_c).into(),
            tie.into(),
        ])?;
    }
    Ok(r)
}

/// Smallest excitation energy over all momenta in the phase at `g`.
fn eps_min(p: &ModelParams, g: f64, branch: Option<MomentumBranch>) -> Option<f64> {
    MomentumBranch::ALL
        .iter()
        .map(|&q| match branch {
            None => model::np_excitation_energy(p, g, q),
            Some(q0) => meanfield::srp_excitation_energy(p, g, q0, q),
        })
        .collect::<Result<Vec<f64>>>()
        .ok()
        .map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
}

fn phase_energy(p: &ModelParams, g: f64, branch: Option<MomentumBranch>, fluctuation: bool) -> Result<f64> {
    match branch {
        None if fluctuation => model::np_ground_energy(p, g),
        None => Ok(model::np_constant_energy(p, g)),
        Some(q) => {
            let t = meanfield::srp_energy_terms(p, g, q)?;
            if fluctuation {
                t.total(q)
            } else {
                Ok(t.mean_field())
            }
        }
    }
}

struct SweepRow {
    g: f64,
    phase: Result<(meanfield::PhasePoint, Option<f64>, Option<f64>)>,
    ed: Option<Result<EdPoint>>,
}

/// Ground energy, order parameter and gap along `g`.
pub fn run_sweep(cfg: &RunConfig) -> Result<Report> {
    cfg.g_range.validate("g")?;
    let base = cfg.params()?;
    let dom = dominant_branch(&base)?;
    let mut columns = vec!["g", "phase", "branch_q", "E_g", "abs_alpha", "corr", "eps_min"];
    if cfg.method.uses_ed() {
        columns.extend(["E_g_ed", "abs_alpha_ed", "corr_ed"]);
    }
    if cfg.method == Method::Both {
        columns.extend(["dE", "dalpha_rel"]);
    }
    columns.push("error");
    let mut r = Report::new("sweep", cfg, &columns);

    let gs = cfg.g_range.points();
    let analytic = |g: f64| -> Result<(meanfield::PhasePoint, Option<f64>, Option<f64>)> {
        let p = base.at_g(g);
        let pt = classify_phase(&p, g)?;
        let e = phase_energy(&p, g, pt.branch, cfg.fluctuation).ok();
        Ok((pt.clone(), e, eps_min(&p, g, pt.branch)))
    };
    let mut rows: Vec<SweepRow> = gs
        .par_iter()
        .map(|&g| SweepRow {
            g,
            phase: analytic(g),
            ed: None,
        })
        .collect();
    if cfg.method.uses_ed() {
        let ed_cfg = cfg.ed();
        let eds = ed_map(cfg, &gs, |&g| ed_point(&base.at_g(g), g, &ed_cfg))?;
        for (row, ed) in rows.iter_mut().zip(eds) {
            row.ed = Some(ed);
        }
    }

    let mut worst_alpha: f64 = 0.0;
    let mut worst_np: f64 = 0.0;
    let mut compared = 0;
    for row in &rows {
        let mut cells: Vec<Cell> = vec![row.g.into()];
        let mut errors = Vec::new();
        match &row.phase {
            Ok((pt, e, eps)) => cells.extend([
                pt.label.as_str().into(),
                q_cell(pt.branch),
                (*e).into(),
                pt.abs_alpha.into(),
                pt.corr.into(),
                (*eps).into(),
            ]),
            Err(e) => {
                cells.extend(std::iter::repeat(Cell::Empty).take(6));
                errors.push(e.to_string());
            }
        }
        if let Some(ed) = &row.ed {
            match ed {
                Ok(pt) => {
                    cells.extend([pt.energy_ed.into(), pt.abs_alpha_ed.into(), pt.corr_ed.into()]);
                    if cfg.method == Method::Both {
                        let e_an = row.phase.as_ref().ok().and_then(|x| x.1);
                        cells.push(e_an.map(|e| pt.energy_ed - e).into());
                        let rel = if pt.abs_alpha_analytic > 0.0 {
                            Some((pt.abs_alpha_ed - pt.abs_alpha_analytic) / pt.abs_alpha_analytic)
                        } else {
                            None
                        };
                        cells.push(rel.into());
                        if (row.g - dom.g_c).abs() > 0.05 {
                            compared += 1;
                            match rel {
                                Some(x) => worst_alpha = worst_alpha.max(x.abs()),
                                None => worst_np = worst_np.max(pt.abs_alpha_ed),
                            }
                        }
                    }
                }
                Err(e) => {
                    let n = if cfg.method == Method::Both { 5 } else { 3 };
                    cells.extend(std::iter::repeat(Cell::Empty).take(n));
                    errors.push(format!("ed: {e}"));
                }
            }
        }
        cells.push(errors.join("; ").into());
        r.push(cells)?;
    }
    if cfg.method == Method::Both {
        r.check(
            "abs_alpha_agreement",
            worst_alpha < 0.05,
            format!("max relative |alpha| deviation {worst_alpha:.4e} over {compared} points with |g-g_c|>0.05"),
        );
        r.check(
            "normal_phase_field",
            worst_np < 1e-6,
            format!("max ED |alpha| in the normal phase {worst_np:.3e}"),
        );
    }
    Ok(r)
}

/// `(J2, g)` grid, `J2` outer, with phase labels and a boundary marker.
pub fn run_phase_diagram(cfg: &RunConfig) -> Result<Report> {
    cfg.g_range.validate("g")?;
    cfg.j2_range.validate("j2")?;
    let (tol_j2, tol_g) = (0.5 * cfg.j2_range.step(), 0.5 * cfg.g_range.step());
    let base = cfg.params()?;
    let mut r = Report::new(
        "phase-diagram",
        cfg,
        &["j2", "g", "phase", "branch_q", "abs_alpha", "corr", "g_c", "boundary", "error"],
    );
    let grid: Vec<(f64, f64)> = cfg
        .j2_range
        .points()
        .into_iter()
        .flat_map(|j2| cfg.g_range.points().into_iter().map(move |g| (j2, g)))
        .collect();
    let results: Vec<Result<meanfield::PhasePoint>> = grid
        .par_iter()
        .map(|&(j2, g)| {
            let p = ModelParams { j2, ..base }.at_g(g);
            classify_phase(&p, g)
        })
        .collect();
    let mut labels = std::collections::BTreeSet::new();
    for (&(j2, g), res) in grid.iter().zip(results) {
        match res {
            Ok(pt) => {
                let first_order = (j2 - base.j1.abs()).abs() < tol_j2 && g >= pt.g_c;
                let critical = (g - pt.g_c).abs() < tol_g;
                let boundary = match (first_order, critical) {
                    (true, true) => "triple",
                    (true, false) => "first_order",
                    (false, true) => "critical",
                    (false, false) => "",
                };
                labels.insert(pt.label.as_str());
                r.push(vec![
                    j2.into(),
                    g.into(),
                    pt.label.as_str().into(),
                    q_cell(pt.branch),
                    pt.abs_alpha.into(),
                    pt.corr.into(),
                    pt.g_c.into(),
                    boundary.into(),
                    "".into(),
                ])?;
            }
            Err(e) => r.push(vec![
                j2.into(),
                g.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                e.to_string().into(),
            ])?,
        }
    }
    log::info!("phases present: {labels:?}");
    Ok(r)
}

/// Critical exponent of the gap on both sides of the dominant transition.
pub fn run_scaling(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let dom = dominant_branch(&p)?;
    let mut r = Report::new("scaling", cfg, &["side", "branch_q", "delta", "epsilon"]);
    for (side, name) in [(Side::Normal, "NP"), (Side::Superradiant, "SRP")] {
        let fit = scaling_exponent(&p, dom.branch, side, cfg.window)?;
        for &(d, e) in &fit.samples {
            r.push(vec![name.into(), dom.branch.to_string().into(), d.into(), e.into()])?;
        }
        r.check(
            &format!("exponent_{name}"),
            (fit.exponent - 0.5).abs() <= 0.02,
            format!("slope {} over {} samples (target 0.5 +- 0.02)", crate::report::format_float(fit.exponent), fit.samples.len()),
        );
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeCommand {
    MapAfrp,
    MapFrustrated,
    Triple,
    Verify,
}

/// Points used by `gauge verify` on each side of a ring critical coupling.
pub const GAUGE_GRID: usize = 50;

pub fn run_gauge(cfg: &RunConfig, cmd: GaugeCommand) -> Result<Report> {
    let base = ModelParams { j1: 0.0, j2: 0.0, ..cfg.params()? };
    let gp = cfg.gauge()?;
    match cmd {
        GaugeCommand::MapAfrp => {
            let mut r = Report::new("gauge map-afrp", cfg, &["map", "j1", "j1_0", "theta", "j2"]);
            let (name, j2) = if cfg.j1 < 0.0 {
                ("frp", map_frp(cfg.j1, &gp))
            } else {
                ("afrp", map_afrp(cfg.j1, &gp))
            };
            r.push(vec![name.into(), cfg.j1.into(), gp.j1_0.into(), gp.theta.into(), j2.into()])?;
            Ok(r)
        }
        GaugeCommand::MapFrustrated => {
            cfg.g_range.validate("g")?;
            let q = frustrated_branch(&gp, &base);
            let g_c = qrr_critical_coupling(&gp, &base, q)?;
            let mut r = Report::new(
                "gauge map-frustrated",
                cfg,
                &["g", "regime", "j2", "j2_order_parameter", "error"],
            );
            let j2_op = gauge::map_order_parameter(&gp, &base, cfg.j1, q);
            for g in cfg.g_range.points() {
                let regime = if g < g_c { Regime::Normal } else { Regime::Superradiant(q) };
                let name = if regime.is_normal() { "NP" } else { "SRP" };
                match map_frustrated(&gp, &base, g, regime) {
                    Ok(j2) => r.push(vec![g.into(), name.into(), j2.into(), j2_op.into(), "".into()])?,
                    Err(e) => r.push(vec![g.into(), name.into(), Cell::Empty, j2_op.into(), e.to_string().into()])?,
                }
            }
            let at_c = map_frustrated(&gp, &base, g_c, Regime::Normal)?;
            r.check(
                "critical_value",
                (at_c - j2_op).abs() < 1e-12,
                format!("J2(g_c) = {} vs order-parameter map {}", at_c, j2_op),
            );
            Ok(r)
        }
        GaugeCommand::Triple => {
            let t = triple_point(gp.j1_0)?;
            let mut r = Report::new("gauge triple", cfg, &["j1_0", "theta_c", "j1", "j1_alt"]);
            r.push(vec![gp.j1_0.into(), t.theta_c.into(), t.j1.into(), t.j1_alt.into()])?;
            let afrp = map_afrp(t.j1, &GaugeParams::new(gp.j1_0, t.theta_c)?);
            r.check(
                "consistency",
                (t.j1 - t.j1_alt).abs() < 1e-12 && (afrp - t.j1).abs() < 1e-12,
                format!("2J cos = {}, 4J^2 sin^2 = {}, AFRP map = {}", t.j1, t.j1_alt, afrp),
            );
            Ok(r)
        }
        GaugeCommand::Verify => {
            let mut r = Report::new(
                "gauge verify",
                cfg,
                &["map", "branch_q", "regime", "j2", "residual", "g_prime_mismatch", "samples"],
            );
            let (name, q_hop) = if cfg.j1 < 0.0 {
                ("frp", MomentumBranch::ZERO)
            } else {
                ("afrp", MomentumBranch::PI)
            };
            let q_fr = frustrated_branch(&gp, &base);
            for (map, q) in [(name, q_hop), ("frustrated", q_fr)] {
                let g_c = qrr_critical_coupling(&gp, &base, q)?;
                for (regime, grid) in [
                    (Regime::Normal, linear_grid(0.02 * g_c, 0.98 * g_c, GAUGE_GRID)),
                    (Regime::Superradiant(q), linear_grid(1.02 * g_c, 1.4 * g_c, GAUGE_GRID)),
                ] {
                    let res = verify_equivalence(&gp, &base, cfg.j1, q, regime, &grid)?;
                    let rname = if regime.is_normal() { "NP" } else { "SRP" };
                    r.push(vec![
                        map.into(),
                        q.to_string().into(),
                        rname.into(),
                        res.j2.into(),
                        res.residual.into(),
                        res.g_prime_mismatch.into(),
                        res.samples.into(),
                    ])?;
                    r.check(
                        &format!("{map}_{rname}"),
                        res.residual < 1e-12,
                        format!("max |eps_square - eps_ring| = {:e}", res.residual),
                    );
                }
            }
            Ok(r)
        }
    }
}

/// Member of the paired branch that softens in the ring.
fn frustrated_branch(gp: &GaugeParams, base: &ModelParams) -> MomentumBranch {
    if qrr_branch_softens(gp, base, MomentumBranch::THREE_HALF_PI) {
        MomentumBranch::THREE_HALF_PI
    } else {
        MomentumBranch::HALF_PI
    }
}

/// Spin-model minimiser against the analytic branches and the optical
/// displacement patterns along `g`.
pub fn run_spin(cfg: &RunConfig) -> Result<Report> {
    cfg.g_range.validate("g")?;
    let base = cfg.params()?;
    let mut r = Report::new(
        "spin",
        cfg,
        &[
            "g",
            "spin_branch",
            "spin_tie",
            "x_value",
            "energy_branch",
            "energy_min",
            "converged_starts",
            "spin_pattern",
            "phase",
            "optical_pattern",
            "a2_over_x2",
            "error",
        ],
    );
    let rows: Vec<Result<(f64, crate::spin::ComparisonReport, Option<crate::spin::SpinSolution>, crate::spin::SpinMinimum)>> = cfg
        .g_range
        .points()
        .par_iter()
        .map(|&g| {
            let p = base.at_g(g);
            let cmp = compare_to_displacements(&p, g)?;
            let best = crate::spin::best_spin_branch(&p, g)?.map(|(s, _)| s);
            let min = minimize_spin_energy(&p, g, cfg.seed)?;
            Ok((g, cmp, best, min))
        })
        .collect();
    let mut worst_energy: f64 = 0.0;
    let mut mismatches = Vec::new();
    for (res, g) in rows.into_iter().zip(cfg.g_range.points()) {
        match res {
            Ok((g, cmp, best, min)) => {
                let e_branch = best.as_ref().map_or(-(model::SITES as f64), |s| s.energy);
                worst_energy = worst_energy.max((min.energy - e_branch).abs());
                if !cmp.failures.is_empty() {
                    mismatches.push(format!("g = {g}: {}", cmp.failures.join(", ")));
                }
                r.push(vec![
                    g.into(),
                    cmp.spin_branch.map_or(Cell::Empty, |b: SpinBranch| b.to_string().into()),
                    cmp.spin_tie.map_or(Cell::Empty, |b| b.to_string().into()),
                    best.as_ref().map(|s| s.x_value).into(),
                    e_branch.into(),
                    min.energy.into(),
                    min.converged_starts.into(),
                    pattern_string(&cmp.spin_pattern).into(),
                    cmp.phase.as_str().into(),
                    pattern_string(&cmp.optical_pattern).into(),
                    cmp.a2_over_x2.into(),
                    cmp.failures.join("; ").into(),
                ])?;
            }
            Err(e) => {
                mismatches.push(format!("g = {g}: {e}"));
                let mut cells = vec![g.into()];
                cells.extend(std::iter::repeat(Cell::Empty).take(10));
                cells.push(e.to_string().into());
                r.push(cells)?;
            }
        }
    }
    r.check(
        "minimizer_matches_branch",
        worst_energy <= 1e-8,
        format!("max |E_min - E_branch| = {worst_energy:e}"),
    );
    r.check(
        "patterns_match",
        mismatches.is_empty(),
        if mismatches.is_empty() { "all points".to_string() } else { mismatches.join(" | ") },
    );
    Ok(r)
}

/// Mean-field fidelity, order parameter and energy against displaced-frame
/// ED along `g`.
pub fn run_ed_compare(cfg: &RunConfig) -> Result<Report> {
    cfg.g_range.validate("g")?;
    let base = cfg.params()?;
    let dom = dominant_branch(&base)?;
    let mut r = Report::new(
        "ed-compare",
        cfg,
        &[
            "g",
            "phase",
            "branch_q",
            "infidelity",
            "abs_alpha",
            "abs_alpha_ed",
            "E_g",
            "E_g_mean_field",
            "E_ed",
            "E_variational",
            "residual",
            "error",
        ],
    );
    let gs = cfg.g_range.points();
    let ed_cfg = cfg.ed();
    let points = ed_map(cfg, &gs, |&g| ed_point(&base.at_g(g), g, &ed_cfg))?;
    let mut far_worst: f64 = 0.0;
    let mut far_count = 0;
    let mut peak: Option<(f64, f64)> = None;
    let mut bound_violation = f64::NEG_INFINITY;
    for (&g, res) in gs.iter().zip(points) {
        match res {
            Ok(pt) => {
                if (g - dom.g_c).abs() > 0.1 {
                    far_worst = far_worst.max(pt.infidelity);
                    far_count += 1;
                }
                if peak.map_or(true, |(_, f)| pt.infidelity > f) {
                    peak = Some((g, pt.infidelity));
                }
                bound_violation = bound_violation.max(pt.energy_ed - pt.energy_variational);
                r.push(vec![
                    g.into(),
                    pt.label.as_str().into(),
                    q_cell(pt.branch),
                    pt.infidelity.into(),
                    pt.abs_alpha_analytic.into(),
                    pt.abs_alpha_ed.into(),
                    pt.energy_analytic.into(),
                    pt.energy_analytic_mean_field.into(),
                    pt.energy_ed.into(),
                    pt.energy_variational.into(),
                    pt.residual.into(),
                    "".into(),
                ])?;
            }
            Err(e) => {
                let mut cells = vec![g.into()];
                cells.extend(std::iter::repeat(Cell::Empty).take(10));
                cells.push(e.to_string().into());
                r.push(cells)?;
            }
        }
    }
    r.check(
        "infidelity_far_from_gc",
        far_count > 0 && far_worst < 0.05,
        format!("max infidelity {far_worst:.4e} over {far_count} points with |g-g_c|>0.1"),
    );
    let window = (2.0 * cfg.g_range.step()).max(0.05);
    let (g_peak, f_peak) = peak.unwrap_or((f64::NAN, f64::NAN));
    r.check(
        "infidelity_peak_at_gc",
        (g_peak - dom.g_c).abs() <= window,
        format!("peak {f_peak:.4e} at g = {g_peak}, g_c = {:.6} (window {window:.4})", dom.g_c),
    );
    r.check(
        "variational_bound",
        bound_violation.is_finite() && bound_violation <= 1e-9,
        format!("max E_ed - E_variational = {bound_violation:.4e}"),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn critical_rows() {
        let r = run_critical(&cfg()).unwrap();
        assert_eq!(r.rows.len(), 4);
        let pi = &r.rows[2];
        assert_eq!(pi[0], Cell::Text("pi".into()));
        assert_eq!(pi[4], Cell::Bool(true));
        let tie = run_critical(&RunConfig { j2: 0.05, ..cfg() }).unwrap();
        assert!(tie.rows.iter().all(|row| row[5] == Cell::Bool(true)));
    }

    #[test]
    fn config_from_partial_json() {
        let c: RunConfig = serde_json::from_str(r#"{"j2": 0.07, "method": "both"}"#).unwrap();
        assert_eq!(c.j2, 0.07);
        assert_eq!(c.method, Method::Both);
        assert_eq!(c.qubit_gap, 50.0);
        assert!(run_named("gauge triple", &c).is_ok());
        assert!(run_named("gauge nope", &c).is_err());
        assert!(run_named("plot", &c).is_err());
    }

    #[test]
    fn range_validation() {
        assert!(Range::new(0.0, 1.0, 1).validate("g").is_err());
        assert!(Range::new(1.0, 0.0, 5).validate("g").is_err());
        assert_eq!(Range::new(0.0, 1.0, 5).step(), 0.25);
        assert_eq!(Range::new(0.3, 0.7, 5).points(), vec![0.3, 0.4, 0.5, 0.6, 0.7]);
        assert_eq!(Range::new(0.0, 0.1, 11).points()[3], 0.03);
    }

    #[test]
    fn coupling_from_lambda() {
        let c = RunConfig { lambda: Some(0.6 * 50f64.sqrt()), ..cfg() };
        assert!((c.coupling().unwrap() - 0.6).abs() < 1e-12);
        assert!(cfg().coupling().is_err());
    }

    #[test]
    fn scaling_checks_pass() {
        let r = run_scaling(&cfg()).unwrap();
        assert!(r.all_passed(), "{:?}", r.failed_checks());
        assert_eq!(r.rows.len(), 2 * meanfield::SCALING_SAMPLES);
    }

    #[test]
    fn gauge_verify_passes() {
        let r = run_gauge(&cfg(), GaugeCommand::Verify).unwrap();
        assert!(r.all_passed(), "{:?}", r.failed_checks());
        let neg = run_gauge(&RunConfig { j1: -0.05, theta: 3.0 * FRAC_PI_4, ..cfg() }, GaugeCommand::Verify).unwrap();
        assert!(neg.all_passed(), "{:?}", neg.failed_checks());
    }
}
