//! Discrete elliptic operator on the constrained space, projections,
//! discrete negative seminorms and backward Euler time stepping.

use alloc::vec::Vec;

use crate::assembly::{reduce_matrix, reduce_vector, MortarSpace};
use crate::error::{Error, Result};
use crate::fem::Diffusivity;
use crate::linalg::{dot, Cholesky, SparseSymMatrix};

/// How the discrete initial value is built from the exact one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialData {
    /// Nodal interpolant pushed through the constraints.
    #[default]
    Interpolant,
    /// Elliptic projection: `a(P u, χ) = a(u, χ)` for all constrained `χ`
    /// (less interface flux terms when the flux term is active).
    EllipticProjection,
}

/// Reduced mass `M_c`, stiffness `A_c` and their factorizations.
///
/// The discrete solution operator is `A_c⁻¹ Pᵀ`; its composition with the
/// mass gives `A = A_c⁻¹ M_c`, self-adjoint and positive in the `M_c` inner
/// product.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    space: MortarSpace,
    alphas: Vec<Diffusivity>,
    mass: SparseSymMatrix,
    stiffness: SparseSymMatrix,
    mass_chol: Cholesky,
    stiff_chol: Cholesky,
}

impl EllipticOperator {
    pub fn new(space: MortarSpace, alphas: &[Diffusivity]) -> Result<Self> {
        let (m, a) = space.assemble(alphas)?;
        let mass = reduce_matrix(&m, space.prolongation())?;
        let stiffness = reduce_matrix(&a, space.prolongation())?;
        let mass_chol = Cholesky::factor(&mass)?;
        let stiff_chol = Cholesky::factor(&stiffness)?;
        Ok(Self {
            space,
            alphas: alphas.to_vec(),
            mass,
            stiffness,
            mass_chol,
            stiff_chol,
        })
    }

    pub fn space(&self) -> &MortarSpace {
        &self.space
    }

    pub fn alphas(&self) -> &[Diffusivity] {
        &self.alphas
    }

    pub fn mass(&self) -> &SparseSymMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &SparseSymMatrix {
        &self.stiffness
    }

    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Reduced load `Pᵀ(∫ f φ + flux terms)`.
    pub fn load(
        &self,
        source: &dyn Fn(usize, f64, f64) -> f64,
        flux: Option<&dyn Fn(usize, f64, f64) -> [f64; 2]>,
    ) -> Result<Vec<f64>> {
        reduce_vector(&self.space.assemble_load(source, flux)?, self.space.prolongation())
    }

    /// Solves `A_c u = b` for a reduced load `b`.
    pub fn solve_load(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check(b)?;
        Ok(self.stiff_chol.solve(b))
    }

    /// Discrete solution of `-∇·(α∇u) = f` with homogeneous Dirichlet data.
    pub fn elliptic_solve(&self, f: &dyn Fn(usize, f64, f64) -> f64) -> Result<Vec<f64>> {
        self.solve_load(&self.load(f, None)?)
    }

    /// `A v = A_c⁻¹ M_c v` for a constrained `v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        Ok(self.stiff_chol.solve(&self.mass.mul_vec(v)))
    }

    /// L² projection of a field onto the constrained space.
    pub fn l2_project(&self, f: &dyn Fn(usize, f64, f64) -> f64) -> Result<Vec<f64>> {
        Ok(self.mass_chol.solve(&self.load(f, None)?))
    }

    /// Elliptic projection of `u`, given `∇u(subdomain, x, y)`. With
    /// `flux = true` the interface flux terms of `α∇u` are subtracted, which
    /// makes the projection match the flux-corrected scheme.
    pub fn elliptic_projection(&self, grad_u: &dyn Fn(usize, f64, f64) -> [f64; 2], flux: bool) -> Result<Vec<f64>> {
        let q = |s: usize, x: f64, y: f64| {
            let g = grad_u(s, x, y);
            let a = self.alphas[s].at(x, y);
            [a * g[0], a * g[1]]
        };
        let mut full = self.space.assemble_gradient_load(&q)?;
        if flux {
            self.space.add_interface_flux(&mut full, &q, -1.0)?;
        }
        self.solve_load(&reduce_vector(&full, self.space.prolongation())?)
    }

    /// Discrete initial value for `u0` (with gradient `grad_u0`).
    pub fn initial_data(
        &self,
        mode: InitialData,
        u0: &dyn Fn(usize, f64, f64) -> f64,
        grad_u0: &dyn Fn(usize, f64, f64) -> [f64; 2],
        flux: bool,
    ) -> Result<Vec<f64>> {
        match mode {
            InitialData::Interpolant => Ok(self.space.interpolate(u0)),
            InitialData::EllipticProjection => self.elliptic_projection(grad_u0, flux),
        }
    }

    /// `(v, w)` in L².
    pub fn inner(&self, v: &[f64], w: &[f64]) -> f64 {
        self.mass.bilinear(v, w)
    }

    /// `|v|_{-s} = (A^s v, v)^{1/2}` for a constrained `v`.
    pub fn negative_seminorm(&self, v: &[f64], s: u32) -> Result<f64> {
        self.check(v)?;
        self.dual_seminorm(&self.mass.mul_vec(v), s)
    }

    /// `|P_h e|_{-s}` where `P_h e` is the L² projection onto the
    /// constrained space of a function given only through its moments
    /// `g_i = (e, φ_i)`.
    pub fn dual_seminorm(&self, g: &[f64], s: u32) -> Result<f64> {
        self.check(g)?;
        if s > 2 {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: "negative seminorm order must be 0, 1 or 2",
            });
        }
        // with z = M⁻¹ g, zs[j] = A^{j+1} z; the form is ‖A^m z‖²_M for
        // s = 2m and (A^{m+1} z)ᵀ M A^m z for s = 2m + 1
        let (value, scale) = match s {
            0 => {
                let z0 = self.mass_chol.solve(g);
                (dot(&z0, g), norm(&z0) * norm(g))
            }
            _ => {
                let mut zs = alloc::vec![self.stiff_chol.solve(g)];
                while zs.len() < (s as usize).div_ceil(2) {
                    let next = self.stiff_chol.solve(&self.mass.mul_vec(zs.last().unwrap()));
                    zs.push(next);
                }
                let m = s as usize / 2;
                if s % 2 == 1 {
                    if m == 0 {
                        (dot(&zs[0], g), norm(&zs[0]) * norm(g))
                    } else {
                        let mz = self.mass.mul_vec(&zs[m - 1]);
                        (dot(&zs[m], &mz), norm(&zs[m]) * norm(&mz))
                    }
                } else {
                    let mz = self.mass.mul_vec(&zs[m - 1]);
                    (dot(&zs[m - 1], &mz), norm(&zs[m - 1]) * norm(&mz))
                }
            }
        };
        if value >= 0.0 {
            Ok(libm::sqrt(value))
        } else if value >= -1e-12 * scale {
            Ok(0.0)
        } else {
            Err(Error::NegativeQuadraticForm { value })
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

/// Backward Euler for `M_c U' + A_c U = F_c` with a fixed step `r`:
/// `(M_c + r A_c) Uⁿ = M_c Uⁿ⁻¹ + r F_c(t_n)`, factorized once.
#[derive(Debug, Clone)]
pub struct TimeStepper {
    r: f64,
    mass: SparseSymMatrix,
    system: Cholesky,
    state: Vec<f64>,
    steps: usize,
}

impl TimeStepper {
    pub fn new(mass: &SparseSymMatrix, stiffness: &SparseSymMatrix, r: f64, u0: Vec<f64>) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: "time step must be positive and finite",
            });
        }
        if u0.len() != mass.dim() {
            return Err(Error::DimensionMismatch {
                expected: mass.dim(),
                got: u0.len(),
            });
        }
        let system = Cholesky::factor(&mass.linear_combination(1.0, stiffness, r)?)?;
        Ok(Self {
            r,
            mass: mass.clone(),
            system,
            state: u0,
            steps: 0,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.r
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Time of the current state.
    pub fn time(&self) -> f64 {
        self.steps as f64 * self.r
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn into_state(self) -> Vec<f64> {
        self.state
    }

    /// Advances one step with the reduced load at the new time level.
    pub fn step(&mut self, load: &[f64]) -> Result<&[f64]> {
        if load.len() != self.state.len() {
            return Err(Error::DimensionMismatch {
                expected: self.state.len(),
                got: load.len(),
            });
        }
        let mut rhs = self.mass.mul_vec(&self.state);
        for (b, f) in rhs.iter_mut().zip(load) {
            *b += self.r * f;
        }
        self.state = self.system.solve(&rhs);
        self.steps += 1;
        Ok(&self.state)
    }
}

/// Runs `n_steps` steps; `load(t)` returns the reduced load at time `t`.
/// Returns the trajectory `U⁰ … Uᴺ`.
pub fn backward_euler_run(
    stepper: &mut TimeStepper,
    n_steps: usize,
    load: &mut dyn FnMut(f64) -> Result<Vec<f64>>,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(stepper.state().to_vec());
    for _ in 0..n_steps {
        let t = (stepper.steps() + 1) as f64 * stepper.step_size();
        let f = load(t)?;
        out.push(stepper.step(&f)?.to_vec());
    }
    Ok(out)
}
