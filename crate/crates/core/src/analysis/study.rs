use alloc::vec::Vec;

use super::eoc::{eoc, time_eoc, ConvergenceRecord};
use super::manufactured::{ManufacturedSolution, Profile1d, TimeFactor};
use super::norms::{error_norms, functional_error, ErrorNorms};
use crate::assembly::MortarSpace;
use crate::error::{Error, Result};
use crate::geometry::{MeshSpec, MortarRule, Partition};
use crate::solvers::{backward_euler_run, EllipticOperator, InitialData, TimeStepper};

/// How cell counts are chosen from the mesh parameter `h = 1/n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum MeshLayout {
    /// Subdomains are 2-coloured; colour 0 gets `n` cells per unit length and
    /// colour 1 gets `n + 2`, so neighbouring traces never match.
    #[default]
    Nonmatching,
    /// `n` cells per unit length everywhere.
    Matching,
    /// Fixed meshes, one per subdomain; `n` is ignored.
    Explicit(Vec<MeshSpec>),
}

/// Time step as a function of the mesh parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// `r = h²`
    SquareOfH,
}

impl TimeStep {
    pub fn at(self, h: f64) -> f64 {
        match self {
            TimeStep::Fixed(r) => r,
            TimeStep::SquareOfH => h * h,
        }
    }
}

/// A manufactured-solution experiment on a fixed partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub partition: Partition,
    pub degree: usize,
    pub solution: ManufacturedSolution,
    /// Adds the interface flux of the exact solution to the load.
    pub consistency_flux: bool,
    pub final_time: f64,
    pub initial_data: InitialData,
    pub layout: MeshLayout,
    pub mortar_rule: MortarRule,
}

/// A discrete solution together with the operator that produced it.
#[derive(Debug, Clone)]
pub struct Run {
    pub n: usize,
    /// `1/n`, or the largest cell diameter for explicit meshes.
    pub h: f64,
    pub operator: EllipticOperator,
    /// Reduced coefficients.
    pub solution: Vec<f64>,
    pub time: f64,
    pub r: Option<f64>,
    pub steps: usize,
}

impl Run {
    pub fn full(&self) -> Vec<f64> {
        self.operator.space().prolong(&self.solution)
    }
}

impl Experiment {
    /// L-shape, degree 1, `α = (1, 10, 10)`, nonmatching grids, flux term
    /// on, `T = 1`.
    pub fn table1() -> Result<Self> {
        Ok(Self {
            partition: Partition::lshape()?,
            degree: 1,
            solution: ManufacturedSolution::benchmark(alloc::vec![1.0, 10.0, 10.0]),
            consistency_flux: true,
            final_time: 1.0,
            initial_data: InitialData::Interpolant,
            layout: MeshLayout::Nonmatching,
            mortar_rule: MortarRule::default(),
        })
    }

    /// Unit square split at `x = 1/2`, `α ≡ 1`, smooth non-polynomial
    /// solution, no flux term.
    pub fn smooth(degree: usize) -> Result<Self> {
        Ok(Self {
            partition: Partition::preset("unit-square-2x1")?,
            degree,
            solution: ManufacturedSolution::smooth(alloc::vec![1.0, 1.0]),
            consistency_flux: false,
            final_time: 1.0,
            initial_data: InitialData::Interpolant,
            layout: MeshLayout::Nonmatching,
            mortar_rule: MortarRule::default(),
        })
    }

    /// Smooth preset with a linear time factor and elliptic-projection
    /// initial data, so the final-time error is governed by the spatial
    /// projection error alone.
    pub fn superconvergence(degree: usize) -> Result<Self> {
        let mut e = Self::smooth(degree)?;
        e.solution.time = TimeFactor::Linear;
        e.initial_data = InitialData::EllipticProjection;
        Ok(e)
    }

    /// L-shape benchmark solution at higher degree for time-order studies.
    pub fn time_order(degree: usize) -> Result<Self> {
        let mut e = Self::table1()?;
        e.degree = degree;
        Ok(e)
    }

    /// Polynomial solution that lies in the discrete space on every
    /// subdomain (`x(1-x)y(1-y)`, degree 2, `α ≡ 1`).
    pub fn patch() -> Result<Self> {
        Ok(Self {
            partition: Partition::preset("unit-square-2x1")?,
            degree: 2,
            solution: ManufacturedSolution::new(Profile1d::Bubble, Profile1d::Bubble, TimeFactor::Constant, alloc::vec![1.0, 1.0]),
            consistency_flux: false,
            final_time: 1.0,
            initial_data: InitialData::Interpolant,
            layout: MeshLayout::Nonmatching,
            mortar_rule: MortarRule::default(),
        })
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "table1" => Self::table1(),
            "smooth" => Self::smooth(2),
            "superconvergence" => Self::superconvergence(2),
            "time-order" => Self::time_order(2),
            "patch" => Self::patch(),
            other => Err(Error::UnknownPreset(other.into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.solution.alphas.len() != self.partition.len() {
            return Err(Error::DimensionMismatch {
                expected: self.partition.len(),
                got: self.solution.alphas.len(),
            });
        }
        if self.solution.alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "diffusivities must be positive and finite",
            });
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: "final time must be positive and finite",
            });
        }
        if self.degree == 0 {
            return Err(Error::ZeroDegree);
        }
        Ok(())
    }

    /// Cell counts for `h = 1/n`.
    pub fn mesh_specs(&self, n: usize) -> Result<Vec<MeshSpec>> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "mesh parameter h = 1/n needs n >= 1",
            });
        }
        if let MeshLayout::Explicit(specs) = &self.layout {
            if specs.len() != self.partition.len() {
                return Err(Error::MeshCount {
                    expected: self.partition.len(),
                    got: specs.len(),
                });
            }
            return Ok(specs.clone());
        }
        let colours = self.partition.colouring();
        Ok(self
            .partition
            .subdomains()
            .iter()
            .zip(colours)
            .map(|(r, c)| {
                let m = match (&self.layout, c) {
                    (MeshLayout::Nonmatching, 1) => n + 2,
                    _ => n,
                } as f64;
                let cells = |len: f64| (libm::round(len * m) as usize).max(1);
                MeshSpec {
                    nx: cells(r.width()),
                    ny: cells(r.height()),
                    degree: self.degree,
                }
            })
            .collect())
    }

    pub fn space(&self, n: usize) -> Result<MortarSpace> {
        MortarSpace::new(self.partition.clone(), &self.mesh_specs(n)?, &self.mortar_rule)
    }

    pub fn operator(&self, n: usize) -> Result<EllipticOperator> {
        self.validate()?;
        EllipticOperator::new(self.space(n)?, &self.solution.diffusivities())
    }

    /// Reduced load at time `t`.
    pub fn load(&self, op: &EllipticOperator, t: f64, stationary: bool) -> Result<Vec<f64>> {
        let u = &self.solution;
        let flux = |s: usize, x: f64, y: f64| u.flux(s, x, y, t);
        let flux: Option<&dyn Fn(usize, f64, f64) -> [f64; 2]> = if self.consistency_flux { Some(&flux) } else { None };
        if stationary {
            op.load(&|s, x, y| u.elliptic_source(s, x, y, t), flux)
        } else {
            op.load(&|s, x, y| u.source(s, x, y, t), flux)
        }
    }

    /// Backward Euler from `t = 0` to the final time with step `r`.
    pub fn solve_transient(&self, n: usize, r: f64) -> Result<Run> {
        let op = self.operator(n)?;
        self.solve_transient_with(op, n, r)
    }

    pub fn solve_transient_with(&self, op: EllipticOperator, n: usize, r: f64) -> Result<Run> {
        let steps = self.steps(r)?;
        let u = &self.solution;
        let u0 = op.initial_data(
            self.initial_data,
            &|_, x, y| u.u(x, y, 0.0),
            &|_, x, y| u.grad(x, y, 0.0),
            self.consistency_flux,
        )?;
        let mut st = TimeStepper::new(op.mass(), op.stiffness(), r, u0)?;
        let mut last = Vec::new();
        let traj = backward_euler_run(&mut st, steps, &mut |t| self.load(&op, t, false))?;
        if let Some(v) = traj.into_iter().last() {
            last = v;
        }
        Ok(Run {
            n,
            h: self.mesh_parameter(n, &op),
            operator: op,
            solution: last,
            time: steps as f64 * r,
            r: Some(r),
            steps,
        })
    }

    /// Elliptic problem `-∇·(α∇u) = -αΔu` at `t = 0`.
    pub fn solve_stationary(&self, n: usize) -> Result<Run> {
        let op = self.operator(n)?;
        let b = self.load(&op, 0.0, true)?;
        let solution = op.solve_load(&b)?;
        Ok(Run {
            n,
            h: self.mesh_parameter(n, &op),
            operator: op,
            solution,
            time: 0.0,
            r: None,
            steps: 0,
        })
    }

    fn mesh_parameter(&self, n: usize, op: &EllipticOperator) -> f64 {
        match self.layout {
            MeshLayout::Explicit(_) => op.space().h_max(),
            _ => 1.0 / n as f64,
        }
    }

    /// Number of steps of size `r` reaching the final time exactly.
    pub fn steps(&self, r: f64) -> Result<usize> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: "time step must be positive and finite",
            });
        }
        let n = libm::round(self.final_time / r);
        if n < 1.0 || (n * r - self.final_time).abs() > 1e-9 * self.final_time {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: "final time must be an integer multiple of the time step",
            });
        }
        Ok(n as usize)
    }

    pub fn norms(&self, run: &Run) -> Result<ErrorNorms> {
        let u = &self.solution;
        let t = run.time;
        error_norms(run.operator.space(), &run.full(), &|x, y| (u.u(x, y, t), u.grad(x, y, t)))
    }

    /// `|P_h(u - u_h)|_{-s}` at the run's final time.
    pub fn negative_error(&self, run: &Run, s: u32) -> Result<f64> {
        let u = &self.solution;
        let t = run.time;
        let op = &run.operator;
        let mut g = op.load(&|_, x, y| u.u(x, y, t), None)?;
        for (gi, mi) in g.iter_mut().zip(op.mass().mul_vec(&run.solution)) {
            *gi -= mi;
        }
        op.dual_seminorm(&g, s)
    }

    /// `∫ (u - u_h) w` at the run's final time.
    pub fn functional_error(&self, run: &Run, weight: &dyn Fn(f64, f64) -> f64) -> Result<f64> {
        let u = &self.solution;
        let t = run.time;
        functional_error(run.operator.space(), &run.full(), &|x, y| u.u(x, y, t), weight)
    }

    /// Errors of one run as a table row (orders left empty).
    pub fn record(&self, run: &Run, negative: Option<u32>) -> Result<ConvergenceRecord> {
        let e = self.norms(run)?;
        Ok(ConvergenceRecord {
            h: run.h,
            r: run.r,
            error_l2: e.l2,
            error_x: e.broken_h1,
            error_neg: negative.map(|s| self.negative_error(run, s)).transpose()?,
            ..Default::default()
        })
    }
}

fn check_resolutions(ns: &[usize]) -> Result<()> {
    if ns.len() < 2 {
        return Err(Error::TooFewResolutions);
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneMeshSize);
    }
    Ok(())
}

/// Transient runs at `h = 1/n` for each `n`, with orders.
pub fn spatial_study(exp: &Experiment, ns: &[usize], step: TimeStep, negative: Option<u32>) -> Result<Vec<ConvergenceRecord>> {
    check_resolutions(ns)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let run = exp.solve_transient(n, step.at(1.0 / n as f64))?;
            exp.record(&run, negative)
        })
        .collect::<Result<Vec<_>>>()?;
    eoc(&rows)
}

/// Stationary elliptic solves at `h = 1/n`, with orders.
pub fn stationary_study(exp: &Experiment, ns: &[usize], negative: Option<u32>) -> Result<Vec<ConvergenceRecord>> {
    check_resolutions(ns)?;
    let rows = ns
        .iter()
        .map(|&n| exp.record(&exp.solve_stationary(n)?, negative))
        .collect::<Result<Vec<_>>>()?;
    eoc(&rows)
}

/// Fixed mesh `h = 1/n`, decreasing time steps, with temporal orders.
pub fn temporal_study(exp: &Experiment, n: usize, rs: &[f64]) -> Result<Vec<ConvergenceRecord>> {
    if rs.len() < 2 {
        return Err(Error::TooFewResolutions);
    }
    let op = exp.operator(n)?;
    let rows = rs
        .iter()
        .map(|&r| exp.record(&exp.solve_transient_with(op.clone(), n, r)?, None))
        .collect::<Result<Vec<_>>>()?;
    time_eoc(&rows)
}

/// Negative-seminorm errors of order `s` next to L² errors.
pub fn superconvergence_study(exp: &Experiment, ns: &[usize], step: TimeStep, s: u32) -> Result<Vec<ConvergenceRecord>> {
    if exp.degree < 2 {
        return Err(Error::RegularityRequirement);
    }
    spatial_study(exp, ns, step, Some(s))
}
