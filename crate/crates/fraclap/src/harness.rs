//! Convergence experiments: grid sweeps, least-squares rate fits,
//! saturation detection, and deterministic CSV reports.

use crate::exact::{by_name, obstacle_exact, ExactPair};
use crate::grid::{FarField, Grid, GridFn, TailRule};
use crate::kernel::{InterpOrder, Kernel, KernelParams};
use crate::operator::{apply_cgm, apply_full_fast, default_m};
use crate::solve::{
    solve_dirichlet, truncation_error, DirichletProblem, ExteriorData, ObstacleProblem,
    solve_obstacle,
};
use crate::util::max_abs;
use crate::{Error, Result};
use rayon::prelude::*;
use std::fmt;

/// Error measurement for an accuracy sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorNorm {
    /// Max norm over `|x| <= fraction · L`. The window keeps nodes whose
    /// stencil is dominated by extension values out of the measurement.
    MaxOnWindow { fraction: f64 },
    /// Single-point error at `x = 0` (for pairs whose exact operator is
    /// only known there).
    PointAtZero,
}

impl Default for ErrorNorm {
    fn default() -> Self {
        ErrorNorm::MaxOnWindow { fraction: 0.5 }
    }
}

/// How the accuracy runner supplies far-field information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFieldMode {
    /// Zero outside the grid.
    Zero,
    /// Algebraic tail with the catalog's natural exponent (or an override).
    Algebraic,
    /// Tabulated samples of the exact function on the extension range, tail
    /// rule algebraic with the natural exponent.
    Table,
    /// Terms (I) + (II) only, extension sampled but no (III): the control
    /// arm of the far-field payoff experiment.
    AlgebraicNoTail,
}

/// One convergence experiment: a catalog function swept over kernels,
/// orders, α, domain sizes and spacings.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub function: String,
    pub orders: Vec<InterpOrder>,
    pub alphas: Vec<f64>,
    /// Strictly decreasing spacings.
    pub hs: Vec<f64>,
    pub ls: Vec<f64>,
    pub farfield: FarFieldMode,
    /// Overrides the catalog's natural decay exponent.
    pub beta: Option<f64>,
    pub norm: ErrorNorm,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.hs.len() < 2 {
            return Err(Error::InsufficientData("experiment: need at least 2 spacings".into()));
        }
        if !self.hs.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::Domain("experiment: h list must be strictly decreasing".into()));
        }
        if self.alphas.is_empty() || self.orders.is_empty() || self.ls.is_empty() {
            return Err(Error::Domain("experiment: empty sweep axis".into()));
        }
        Ok(())
    }
}

/// One sweep cell result. `error2` carries the second series where one
/// exists (truncation error for Dirichlet, operator image for the
/// obstacle).
#[derive(Debug, Clone, Copy)]
pub struct ReportRow {
    pub alpha: f64,
    pub order: InterpOrder,
    pub l: f64,
    pub h: f64,
    pub error: f64,
    pub error2: Option<f64>,
    pub saturated: bool,
}

/// Per-(α, order, L) series summary.
#[derive(Debug, Clone)]
pub struct SeriesSummary {
    pub alpha: f64,
    pub order: InterpOrder,
    pub l: f64,
    /// Least-squares rate over the pre-saturation rows, if enough remain.
    pub rate: Option<f64>,
    /// Rate of the second error series, fitted the same way.
    pub rate2: Option<f64>,
    pub saturated: bool,
}

impl fmt::Display for SeriesSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} order={} L={} rate={:?} saturated={}",
            self.alpha,
            self.order.label(),
            self.l,
            self.rate,
            self.saturated
        )
    }
}

/// Collected rows plus fitted rates; `meta` is echoed into the CSV header.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub series: Vec<SeriesSummary>,
    pub meta: String,
}

impl ConvergenceReport {
    pub fn series_for(&self, alpha: f64, order: InterpOrder, l: f64) -> Option<&SeriesSummary> {
        self.series
            .iter()
            .find(|s| s.alpha == alpha && s.order == order && s.l == l)
    }
}

/// Least-squares slope of `log(error)` against `log(h)`. Needs at least
/// three rows with positive errors.
pub fn fit_rate(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit: {} rows, need 3",
            rows.len()
        )));
    }
    if rows.iter().any(|&(h, e)| h <= 0.0 || e <= 0.0) {
        return Err(Error::InsufficientData(
            "rate fit: nonpositive h or error".into(),
        ));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("rate fit: identical spacings".into()));
    }
    Ok(sxy / sxx)
}

/// Saturation threshold: halving h must shrink the error by at least this
/// factor, or the finer row is considered saturated.
const SATURATION_GAIN: f64 = 1.148698354997035; // 2^0.2

/// Flags the trailing rows of an error series (ordered by decreasing h)
/// that no longer improve. Only a contiguous trailing run is flagged.
pub fn mark_saturation(errors: &[f64]) -> Vec<bool> {
    let n = errors.len();
    let mut flags = vec![false; n];
    for i in (1..n).rev() {
        let improving = errors[i - 1] / errors[i] >= SATURATION_GAIN;
        if improving {
            break;
        }
        flags[i] = true;
    }
    flags
}

fn fit_series(hs: &[f64], errors: &[f64]) -> (Vec<bool>, Option<f64>) {
    let flags = mark_saturation(errors);
    let rows: Vec<(f64, f64)> = hs
        .iter()
        .zip(errors)
        .zip(&flags)
        .filter(|&(_, &sat)| !sat)
        .map(|((&h, &e), _)| (h, e))
        .collect();
    (flags, fit_rate(&rows).ok())
}

fn far_field_for(pair: &ExactPair, mode: FarFieldMode, beta_override: Option<f64>, u: &GridFn, m: usize) -> Result<FarField> {
    let beta = beta_override.or(pair.beta);
    match mode {
        FarFieldMode::Zero => Ok(FarField::Zero),
        FarFieldMode::Algebraic | FarFieldMode::AlgebraicNoTail => match beta {
            Some(b) => FarField::algebraic_from(b, u),
            None => Ok(FarField::Zero),
        },
        FarFieldMode::Table => {
            let tail = match beta {
                Some(b) => TailRule::Algebraic {
                    beta: b,
                    u_left: u.left_value(),
                    u_right: u.right_value(),
                },
                None => TailRule::Zero,
            };
            let f = pair.u.clone();
            Ok(FarField::table_from(u.grid(), m, move |x| f(x), tail))
        }
    }
}

fn windowed_error(
    lu: &GridFn,
    pair: &ExactPair,
    norm: ErrorNorm,
) -> Result<f64> {
    let grid = lu.grid();
    match norm {
        ErrorNorm::PointAtZero => {
            let exact = pair
                .lu_at(0.0)
                .ok_or_else(|| Error::Domain(format!("{}: no exact value at 0", pair.name)))?;
            Ok((lu.values()[grid.center()] - exact).abs())
        }
        ErrorNorm::MaxOnWindow { fraction } => {
            let cut = fraction * grid.half_width();
            let mut worst = 0.0f64;
            let mut seen = false;
            for i in 0..lu.len() {
                let x = grid.node(i);
                if x.abs() <= cut {
                    if let Some(exact) = pair.lu_at(x) {
                        worst = worst.max((lu.values()[i] - exact).abs());
                        seen = true;
                    }
                }
            }
            if !seen {
                return Err(Error::Domain(format!(
                    "{}: no exact operator values in the window",
                    pair.name
                )));
            }
            Ok(worst)
        }
    }
}

/// Operator-accuracy sweep: build the kernel, apply the full operator to
/// the catalog function, compare with the exact operator.
pub fn run_accuracy(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &alpha in &spec.alphas {
        let pair = by_name(&spec.function, alpha)?;
        for &order in &spec.orders {
            for &l in &spec.ls {
                let errors: Result<Vec<f64>> = spec
                    .hs
                    .par_iter()
                    .map(|&h| {
                        let grid = Grid::symmetric(l, h)?;
                        let u = pair.sample_u(grid)?;
                        let m = default_m(&grid, order);
                        let kernel = Kernel::new(KernelParams::new(alpha, h, order, m)?)?;
                        let ff = far_field_for(&pair, spec.farfield, spec.beta, &u, m)?;
                        let mut lu = apply_full_fast(&kernel, &u, &ff)?;
                        if spec.farfield == FarFieldMode::AlgebraicNoTail {
                            // control arm: strip term (III) back off
                            if let FarField::AlgebraicTail { beta, .. } = ff {
                                let vals: Result<Vec<f64>> = (0..lu.len())
                                    .map(|i| {
                                        Ok(lu.values()[i]
                                            + crate::operator::term_iii_algebraic(
                                                &kernel,
                                                beta,
                                                u.left_value(),
                                                u.right_value(),
                                                l,
                                                grid.node(i),
                                            )?)
                                    })
                                    .collect();
                                lu = GridFn::new(grid, vals?)?;
                            }
                        }
                        windowed_error(&lu, &pair, spec.norm)
                    })
                    .collect();
                let errors = errors?;
                let (flags, rate) = fit_series(&spec.hs, &errors);
                for ((&h, &e), &sat) in spec.hs.iter().zip(&errors).zip(&flags) {
                    rows.push(ReportRow {
                        alpha,
                        order,
                        l,
                        h,
                        error: e,
                        error2: None,
                        saturated: sat,
                    });
                }
                series.push(SeriesSummary {
                    alpha,
                    order,
                    l,
                    rate,
                    rate2: None,
                    saturated: flags.iter().any(|&s| s),
                });
            }
        }
    }
    Ok(ConvergenceReport {
        rows,
        series,
        meta: format!(
            "accuracy function={} farfield={:?} norm={:?}",
            spec.function, spec.farfield, spec.norm
        ),
    })
}

/// Accuracy sweep for the midpoint comparison scheme (Gaussian point test).
pub fn run_cgm_accuracy(
    alpha: f64,
    l: f64,
    hs: &[f64],
    eps_of_h: impl Fn(f64) -> f64 + Sync,
) -> Result<ConvergenceReport> {
    let pair = by_name("gaussian", alpha)?;
    let errors: Result<Vec<f64>> = hs
        .par_iter()
        .map(|&h| {
            let grid = Grid::symmetric(l, h)?;
            let u = pair.sample_u(grid)?;
            let lu = apply_cgm(alpha, eps_of_h(h), &u)?;
            windowed_error(&lu, &pair, ErrorNorm::PointAtZero)
        })
        .collect();
    let errors = errors?;
    let (flags, rate) = fit_series(hs, &errors);
    let rows = hs
        .iter()
        .zip(&errors)
        .zip(&flags)
        .map(|((&h, &e), &sat)| ReportRow {
            alpha,
            order: InterpOrder::Tent,
            l,
            h,
            error: e,
            error2: None,
            saturated: sat,
        })
        .collect();
    Ok(ConvergenceReport {
        rows,
        series: vec![SeriesSummary {
            alpha,
            order: InterpOrder::Tent,
            l,
            rate,
            rate2: None,
            saturated: flags.iter().any(|&s| s),
        }],
        meta: format!("cgm alpha={alpha} L={l}"),
    })
}

/// Which Dirichlet reference problem a convergence run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirichletCase {
    /// `f ≡ 1`, `g ≡ 0` on `(-1, 1)`: the exit-time solution.
    Getoor,
    /// Manufactured data from the C¹ catalog pair: `f` its forward
    /// function, `g` its restriction outside `(-1, 1)`.
    ManufacturedC1,
}

/// Dirichlet solution convergence: solve per h, compare against the exact
/// solution in the max norm over all grid nodes; `error2` records the
/// truncation-error norm `‖r^h‖_∞` for the same grid.
pub fn run_dirichlet_convergence(
    case: DirichletCase,
    alpha: f64,
    orders: &[InterpOrder],
    hs: &[f64],
) -> Result<ConvergenceReport> {
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &order in orders {
        let cells: Result<Vec<(f64, f64)>> = hs
            .par_iter()
            .map(|&h| dirichlet_cell(case, alpha, order, h))
            .collect();
        let cells = cells?;
        let errors: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let rnorms: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let (flags, rate) = fit_series(hs, &errors);
        let (_, rate2) = fit_series(hs, &rnorms);
        for ((&h, c), &sat) in hs.iter().zip(&cells).zip(&flags) {
            rows.push(ReportRow {
                alpha,
                order,
                l: 1.0,
                h,
                error: c.0,
                error2: Some(c.1),
                saturated: sat,
            });
        }
        series.push(SeriesSummary {
            alpha,
            order,
            l: 1.0,
            rate,
            rate2,
            saturated: flags.iter().any(|&s| s),
        });
    }
    Ok(ConvergenceReport {
        rows,
        series,
        meta: format!("dirichlet case={case:?} alpha={alpha}"),
    })
}

fn dirichlet_cell(
    case: DirichletCase,
    alpha: f64,
    order: InterpOrder,
    h: f64,
) -> Result<(f64, f64)> {
    let a = 1.0;
    let n = (2.0 * a / h).round() as usize - 1;
    let problem = match case {
        DirichletCase::Getoor => DirichletProblem {
            alpha,
            a,
            h,
            order,
            f: vec![1.0; n],
            g: ExteriorData::Zero,
        },
        DirichletCase::ManufacturedC1 => {
            let pair = crate::exact::c1_pair(alpha)?;
            let uf = pair.u.clone();
            let mut p = DirichletProblem {
                alpha,
                a,
                h,
                order,
                f: Vec::new(),
                g: ExteriorData::Zero,
            };
            let m = p.m();
            let beta = pair.beta.expect("c1 pair decays algebraically");
            p.f = (0..n)
                .map(|i| pair.lu_at(p.interior_node(i)).expect("forward function"))
                .collect();
            p.g = ExteriorData::from_fn(
                a,
                h,
                m,
                |x| uf(x),
                TailRule::Algebraic {
                    beta,
                    u_left: uf(-a),
                    u_right: uf(a),
                },
            );
            p
        }
    };
    let exact: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync> = match case {
        DirichletCase::Getoor => crate::exact::getoor_pair(alpha)?.u,
        DirichletCase::ManufacturedC1 => crate::exact::c1_pair(alpha)?.u,
    };
    let sol = solve_dirichlet(&problem)?;
    let grid = sol.u.grid();
    let err = (0..sol.u.len())
        .map(|i| (sol.u.values()[i] - exact(grid.node(i))).abs())
        .fold(0.0f64, f64::max);
    let f_exact = problem.f.clone();
    let r = truncation_error(&problem, |x| exact(x), |x| {
        // reuse the assembled rhs samples pointwise
        let i = ((x + a) / h).round() as usize - 1;
        f_exact[i]
    })?;
    Ok((err, max_abs(&r)))
}

/// Obstacle convergence: two error series per (L, h): solution versus the
/// closed form, and the operator image versus the exact forward function on
/// the coincidence set.
pub fn run_obstacle_convergence(
    alpha: f64,
    order: InterpOrder,
    ls: &[f64],
    hs: &[f64],
    algebraic_tail: bool,
) -> Result<ConvergenceReport> {
    let (phi_f, u_f) = obstacle_exact(alpha)?;
    let f_exact = {
        let p = 1.0 - alpha / 2.0;
        move |x: f64| {
            let s = 1.0 - x * x;
            if s > 0.0 {
                s.powf(p)
            } else {
                0.0
            }
        }
    };
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &l in ls {
        let cells: Result<Vec<(f64, f64)>> = hs
            .par_iter()
            .map(|&h| {
                let grid = Grid::symmetric(l, h)?;
                let phi = GridFn::sample(grid, |x| phi_f(x))?;
                let mut p = ObstacleProblem::new(phi, alpha, order);
                p.dt = Some(h.powf(alpha) / 2.0);
                p.algebraic_tail = algebraic_tail;
                let s = solve_obstacle(&p)?;
                let mut sol_err = 0.0f64;
                let mut op_err = 0.0f64;
                for i in 0..s.u.len() {
                    let x = grid.node(i);
                    sol_err = sol_err.max((s.u.values()[i] - u_f(x)).abs());
                    if x.abs() <= 1.0 {
                        op_err = op_err.max((s.lu.values()[i] - f_exact(x)).abs());
                    }
                }
                Ok((sol_err, op_err))
            })
            .collect();
        let cells = cells?;
        let sol_errors: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let op_errors: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let (flags, rate) = fit_series(hs, &sol_errors);
        let (_, rate2) = fit_series(hs, &op_errors);
        for ((&h, c), &sat) in hs.iter().zip(&cells).zip(&flags) {
            rows.push(ReportRow {
                alpha,
                order,
                l,
                h,
                error: c.0,
                error2: Some(c.1),
                saturated: sat,
            });
        }
        series.push(SeriesSummary {
            alpha,
            order,
            l,
            rate,
            rate2,
            saturated: flags.iter().any(|&s| s),
        });
    }
    Ok(ConvergenceReport {
        rows,
        series,
        meta: format!("obstacle alpha={alpha} order={} tail={algebraic_tail}", order.label()),
    })
}
