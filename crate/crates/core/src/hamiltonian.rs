//! Time-dependent Hamiltonians for controlled adiabatic gate evolutions.
//!
//! The construction is bipartite: orthogonal projectors on a *control*
//! subsystem select which final Hamiltonian drives the *target* subsystem
//! (here always an ancilla qubit), so several adiabatic processes run in
//! parallel, one per projector branch:
//!
//! ```text
//! H(t) = sum_j  P_j (x) [ f1(t) H_b + f2(t) H_f_j ]
//! ```
//!
//! For the gate Hamiltonians every branch is a member of the one-parameter
//! family
//!
//! ```text
//! H_phi(theta) = -cos(theta) sz - sin(theta) (cos(phi) sx + sin(phi) sy),
//! ```
//!
//! i.e. `-n(theta,phi)·sigma` for the Bloch vector at polar angle `theta` and
//! azimuth `phi`. Ramping `theta` from 0 to `theta_f` drags the ancilla ground
//! state from `|0>` to `cos(theta_f/2)|0> + e^{i phi} sin(theta_f/2)|1>` while
//! the spectrum stays exactly `{-1, +1}` — a constant gap of 2.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, identity, pauli_x, pauli_y, pauli_z, CMatrix, HermitianOperator, QuantumState, DIM_LIMIT,
};
use crate::tol::Tolerances;

/// Schedule function of time, shared by the branched Hamiltonian forms.
pub type ScheduleFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Unit vector on the Bloch sphere selecting a gate's rotation axis.
///
/// Constructed by normalizing arbitrary components; only genuinely
/// zero-length input is rejected. Axes at or near the poles need no special
/// casing — the polar-angle formulas remain valid there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAxis {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochAxis {
    /// +x axis.
    pub const X: BlochAxis = BlochAxis {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    /// +y axis.
    pub const Y: BlochAxis = BlochAxis {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    /// +z axis.
    pub const Z: BlochAxis = BlochAxis {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalize `(x, y, z)` into a unit axis.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-9 {
            return Err(Error::InvalidAxis { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Polar angle in [0, pi] and azimuth in (-pi, pi].
    pub fn polar(&self) -> (f64, f64) {
        let vartheta = f64::atan2(self.x.hypot(self.y), self.z);
        let varphi = f64::atan2(self.y, self.x);
        (vartheta, varphi)
    }
}

/// The `|n>`, `|n_perp>` eigenbasis of `n·sigma`.
///
/// The phase convention is fixed once and for all: with `n` at polar angle
/// `vartheta` and azimuth `varphi`,
/// `|n> = cos(vartheta/2)|0> + e^{i varphi} sin(vartheta/2)|1>` and
/// `|n_perp> = sin(vartheta/2)|0> - e^{i varphi} cos(vartheta/2)|1>`.
/// The physics only ever depends on the projectors `(1 ± n·sigma)/2`, but a
/// deterministic vector convention keeps comparisons reproducible.
pub fn axis_states(n: &BlochAxis) -> (QuantumState, QuantumState) {
    let (vartheta, varphi) = n.polar();
    let (half_sin, half_cos) = (vartheta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, varphi);
    let aligned = QuantumState::trusted(vec![c64(half_cos, 0.0), phase * half_sin].into());
    let orthogonal = QuantumState::trusted(vec![c64(half_sin, 0.0), -phase * half_cos].into());
    (aligned, orthogonal)
}

/// Rank-1 projectors `|n><n|` and `|n_perp><n_perp|` onto the axis basis.
pub fn axis_projectors(n: &BlochAxis) -> (CMatrix, CMatrix) {
    let (aligned, orthogonal) = axis_states(n);
    (aligned.density_matrix(), orthogonal.density_matrix())
}

/// Linear ramp `theta(t) = theta_f * t / T` together with a default slicing
/// resolution for the propagator.
///
/// A zero runtime is accepted as a degenerate "already finished" schedule:
/// `theta_at(0)` then reports `theta_f`, which keeps the endpoint Hamiltonian
/// well-defined for instantaneous-quench experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSchedule {
    theta_f: f64,
    runtime: f64,
    steps: usize,
}

/// Default propagator resolution: 200 slices per unit time (`dt = 0.005`
/// where the spectral gap is 2), at least one slice.
pub fn default_steps(runtime: f64) -> usize {
    (200.0 * runtime).ceil().max(1.0) as usize
}

impl LinearSchedule {
    /// Schedule with the default slicing resolution.
    pub fn new(theta_f: f64, runtime: f64) -> Result<Self> {
        Self::with_steps(theta_f, runtime, default_steps(runtime))
    }

    /// Schedule with an explicit slicing resolution.
    pub fn with_steps(theta_f: f64, runtime: f64, steps: usize) -> Result<Self> {
        if !theta_f.is_finite() || !(0.0..=std::f64::consts::PI + 1e-12).contains(&theta_f) {
            return Err(Error::InvalidSchedule {
                reason: format!("final angle {theta_f} outside [0, pi]"),
            });
        }
        if !runtime.is_finite() || runtime < 0.0 {
            return Err(Error::InvalidSchedule {
                reason: format!("runtime {runtime} is not a finite nonnegative time"),
            });
        }
        if steps == 0 {
            return Err(Error::InvalidSchedule {
                reason: "steps must be at least 1".into(),
            });
        }
        Ok(Self {
            theta_f,
            runtime,
            steps,
        })
    }

    pub fn theta_f(&self) -> f64 {
        self.theta_f
    }

    pub fn runtime(&self) -> f64 {
        self.runtime
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Ramp angle at time `t`; exact at both endpoints.
    pub fn theta_at(&self, t: f64) -> Result<f64> {
        let slack = 1e-9 * self.runtime.max(1.0);
        if !t.is_finite() || t < -slack || t > self.runtime + slack {
            return Err(Error::TimeOutOfRange {
                t,
                runtime: self.runtime,
            });
        }
        let progress = if self.runtime > 0.0 {
            (t / self.runtime).clamp(0.0, 1.0)
        } else {
            1.0
        };
        Ok(self.theta_f * progress)
    }
}

/// The branch Hamiltonian `H_phi(theta)`, a traceless 2x2 matrix with
/// eigenvalues exactly ±1 for every `(theta, phi)`.
pub fn branch_hamiltonian(theta: f64, phi: f64) -> HermitianOperator {
    let (sin_t, cos_t) = theta.sin_cos();
    let off = -sin_t * Complex64::from_polar(1.0, phi);
    let m = CMatrix::from_row_slice(2, 2, &[c64(-cos_t, 0.0), off.conj(), off, c64(cos_t, 0.0)]);
    HermitianOperator::new(m).expect("branch Hamiltonian is Hermitian by construction")
}

/// The equatorial member of the branch family, `H_phi(pi/2) =
/// -(cos(phi) sx + sin(phi) sy)`. Together with the driver `-sz` it spans the
/// whole family: `H_phi(theta) = cos(theta)(-sz) + sin(theta) H_phi(pi/2)`.
fn equator_hamiltonian(phi: f64) -> CMatrix {
    pauli_x() * c64(-phi.cos(), 0.0) + pauli_y() * c64(-phi.sin(), 0.0)
}

/// Bipartite controlled-evolution specification: orthogonal projectors on
/// the control subsystem, a shared driver on the target subsystem, one final
/// Hamiltonian per branch, and the two interpolation schedules.
///
/// `f1` should start positive and ramp to zero while `f2` does the reverse so
/// that the evolution begins in the driver's ground state and ends in each
/// branch's final ground state; the default pair `(1 - t/T, t/T)` does this.
/// The endpoint behavior is the caller's responsibility — the gate builders
/// deliberately use `(cos theta(t), sin theta(t))`, whose endpoint values
/// depend on `theta_f`.
pub struct ControlledEvolutionSpec {
    projectors: Vec<CMatrix>,
    driver: CMatrix,
    finals: Vec<CMatrix>,
    f1: ScheduleFn,
    f2: ScheduleFn,
    runtime: f64,
}

impl ControlledEvolutionSpec {
    /// Validate a projector set and branch Hamiltonians; schedules default to
    /// the linear ramp `f1 = 1 - t/T`, `f2 = t/T`.
    pub fn new(
        projectors: Vec<CMatrix>,
        driver: HermitianOperator,
        finals: Vec<HermitianOperator>,
        runtime: f64,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        if !runtime.is_finite() || runtime < 0.0 {
            return Err(Error::InvalidSchedule {
                reason: format!("runtime {runtime} is not a finite nonnegative time"),
            });
        }
        if projectors.is_empty() {
            return Err(Error::InvalidProjectors {
                reason: "projector list is empty".into(),
            });
        }
        if finals.len() != projectors.len() {
            return Err(Error::InvalidProjectors {
                reason: format!(
                    "{} final Hamiltonians for {} projectors",
                    finals.len(),
                    projectors.len()
                ),
            });
        }
        let control_dim = projectors[0].nrows();
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != control_dim || p.ncols() != control_dim {
                return Err(Error::InvalidProjectors {
                    reason: format!("projector {i} is not {control_dim}x{control_dim}"),
                });
            }
            // Hermiticity first; the algebraic checks below assume it.
            HermitianOperator::new(p.clone())?;
        }
        for i in 0..projectors.len() {
            for j in i..projectors.len() {
                let product = &projectors[i] * &projectors[j];
                let expected = if i == j {
                    projectors[i].clone()
                } else {
                    CMatrix::zeros(control_dim, control_dim)
                };
                let dev = (product - expected)
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0f64, f64::max);
                if dev > tol.spectral {
                    let reason = if i == j {
                        format!("projector {i} is not idempotent (deviation {dev:.3e})")
                    } else {
                        format!("projectors {i} and {j} are not orthogonal (deviation {dev:.3e})")
                    };
                    return Err(Error::InvalidProjectors { reason });
                }
            }
        }
        let sum = projectors
            .iter()
            .fold(CMatrix::zeros(control_dim, control_dim), |acc, p| acc + p);
        let dev = (sum - identity(control_dim))
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if dev > tol.spectral {
            return Err(Error::InvalidProjectors {
                reason: format!("projectors do not sum to the identity (deviation {dev:.3e})"),
            });
        }
        let target_dim = driver.dim();
        for (j, h) in finals.iter().enumerate() {
            if h.dim() != target_dim {
                return Err(Error::DimensionMismatch {
                    expected: target_dim,
                    actual: finals[j].dim(),
                });
            }
        }
        let dim = control_dim
            .checked_mul(target_dim)
            .filter(|&d| d <= DIM_LIMIT)
            .ok_or(Error::DimensionLimit {
                dim: usize::MAX,
                limit: DIM_LIMIT,
            })?;
        let _ = dim;
        let ramp = move |t: f64| {
            if runtime > 0.0 {
                (t / runtime).clamp(0.0, 1.0)
            } else {
                1.0
            }
        };
        Ok(Self {
            projectors,
            driver: driver.into_matrix(),
            finals: finals
                .into_iter()
                .map(HermitianOperator::into_matrix)
                .collect(),
            f1: Box::new(move |t| 1.0 - ramp(t)),
            f2: Box::new(ramp),
            runtime,
        })
    }

    /// Replace the default linear schedules.
    pub fn with_schedules(mut self, f1: ScheduleFn, f2: ScheduleFn) -> Self {
        self.f1 = f1;
        self.f2 = f2;
        self
    }

    pub fn runtime(&self) -> f64 {
        self.runtime
    }
}

impl fmt::Debug for ControlledEvolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlledEvolutionSpec")
            .field("branches", &self.projectors.len())
            .field("control_dim", &self.projectors[0].nrows())
            .field("target_dim", &self.driver.nrows())
            .field("runtime", &self.runtime)
            .finish()
    }
}

/// Shared payload of the branched Hamiltonian form.
struct BranchedForm {
    projectors: Vec<CMatrix>,
    driver: CMatrix,
    finals: Vec<CMatrix>,
    f1: ScheduleFn,
    f2: ScheduleFn,
}

#[derive(Clone)]
enum Form {
    /// Arbitrary evaluation rule; validated for Hermiticity on every call.
    Closure(Arc<dyn Fn(f64) -> CMatrix + Send + Sync>),
    /// The structured bipartite form, which additionally exposes its branch
    /// projectors to consumers (dephasing noise, branch diagnostics).
    Branched(Arc<BranchedForm>),
}

/// An evaluation contract `t -> HermitianOperator` on `[0, runtime]`.
///
/// Evaluations at distinct times are independent, and the value is cheap to
/// clone and safe to share across threads.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    dim: usize,
    runtime: f64,
    form: Form,
}

impl TimeDependentHamiltonian {
    /// Wrap an arbitrary evaluation rule. Every `at` call re-validates
    /// Hermiticity, so an ill-behaved closure is caught at evaluation time.
    pub fn from_closure<F>(dim: usize, runtime: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        if dim == 0 || dim > DIM_LIMIT {
            return Err(Error::DimensionLimit {
                dim,
                limit: DIM_LIMIT,
            });
        }
        if !runtime.is_finite() || runtime < 0.0 {
            return Err(Error::InvalidSchedule {
                reason: format!("runtime {runtime} is not a finite nonnegative time"),
            });
        }
        Ok(Self {
            dim,
            runtime,
            form: Form::Closure(Arc::new(f)),
        })
    }

    fn from_branched(runtime: f64, branched: BranchedForm) -> Self {
        let dim = branched.projectors[0].nrows() * branched.driver.nrows();
        Self {
            dim,
            runtime,
            form: Form::Branched(Arc::new(branched)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn runtime(&self) -> f64 {
        self.runtime
    }

    /// Evaluate the Hamiltonian at `t in [0, runtime]`.
    pub fn at(&self, t: f64) -> Result<HermitianOperator> {
        let slack = 1e-9 * self.runtime.max(1.0);
        if !t.is_finite() || t < -slack || t > self.runtime + slack {
            return Err(Error::TimeOutOfRange {
                t,
                runtime: self.runtime,
            });
        }
        let m = match &self.form {
            Form::Closure(f) => f(t),
            Form::Branched(b) => {
                let a1 = c64((b.f1)(t), 0.0);
                let a2 = c64((b.f2)(t), 0.0);
                let mut h = CMatrix::zeros(self.dim, self.dim);
                for (p, hf) in b.projectors.iter().zip(&b.finals) {
                    h += p.kronecker(&(&b.driver * a1 + hf * a2));
                }
                h
            }
        };
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: m.nrows(),
            });
        }
        HermitianOperator::new(m)
    }

    /// Branch projectors on the control subsystem, when this Hamiltonian has
    /// the structured bipartite form.
    pub fn branch_projectors(&self) -> Option<&[CMatrix]> {
        match &self.form {
            Form::Closure(_) => None,
            Form::Branched(b) => Some(&b.projectors),
        }
    }

    /// Branch projector `j` lifted to the full space (`P_j (x) 1`).
    pub fn lifted_projector(&self, j: usize) -> Option<CMatrix> {
        match &self.form {
            Form::Closure(_) => None,
            Form::Branched(b) => {
                let p = b.projectors.get(j)?;
                Some(p.kronecker(&identity(b.driver.nrows())))
            }
        }
    }
}

impl fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match &self.form {
            Form::Closure(_) => "closure".to_string(),
            Form::Branched(b) => format!("branched x{}", b.projectors.len()),
        };
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim)
            .field("runtime", &self.runtime)
            .field("form", &form)
            .finish()
    }
}

/// Single ancilla branch `t -> H_phi(theta(t))` as a 2x2 evolution.
pub fn branch_evolution(phi: f64, sched: &LinearSchedule) -> TimeDependentHamiltonian {
    let s = *sched;
    TimeDependentHamiltonian::from_branched(
        s.runtime(),
        BranchedForm {
            projectors: vec![identity(1)],
            driver: -pauli_z(),
            finals: vec![equator_hamiltonian(phi)],
            f1: Box::new(move |t| s.theta_at(t).map(f64::cos).unwrap_or(f64::NAN)),
            f2: Box::new(move |t| s.theta_at(t).map(f64::sin).unwrap_or(f64::NAN)),
        },
    )
}

/// Both ancilla branches of a gate with relative phase `phi`, labeled for
/// reporting: the reference branch "0" and the phase branch "phi".
pub fn branch_evolutions(
    phi: f64,
    sched: &LinearSchedule,
) -> [(String, TimeDependentHamiltonian); 2] {
    [
        ("0".to_string(), branch_evolution(0.0, sched)),
        ("phi".to_string(), branch_evolution(phi, sched)),
    ]
}

/// 4x4 single-qubit gate Hamiltonian on (input qubit, ancilla):
/// `|n><n| (x) H_0(theta(t)) + |n_perp><n_perp| (x) H_phi(theta(t))`.
///
/// Both branches start from the common driver `-sz` on the ancilla, so the
/// spectrum is `{-1, -1, +1, +1}` at every instant: the ground manifold is
/// doubly degenerate and the within-branch gap stays 2.
pub fn single_qubit_gate_hamiltonian(
    n: &BlochAxis,
    phi: f64,
    sched: &LinearSchedule,
) -> TimeDependentHamiltonian {
    let (p_aligned, p_orthogonal) = axis_projectors(n);
    let s = *sched;
    TimeDependentHamiltonian::from_branched(
        s.runtime(),
        BranchedForm {
            projectors: vec![p_aligned, p_orthogonal],
            driver: -pauli_z(),
            finals: vec![equator_hamiltonian(0.0), equator_hamiltonian(phi)],
            f1: Box::new(move |t| s.theta_at(t).map(f64::cos).unwrap_or(f64::NAN)),
            f2: Box::new(move |t| s.theta_at(t).map(f64::sin).unwrap_or(f64::NAN)),
        },
    )
}

/// 8x8 controlled-gate Hamiltonian on (control, target, ancilla): only the
/// `|1, n_perp>` branch of the two-qubit register picks up the phased
/// evolution `H_phi`; the other three branches share `H_0`.
pub fn controlled_gate_hamiltonian(
    n: &BlochAxis,
    phi: f64,
    sched: &LinearSchedule,
) -> TimeDependentHamiltonian {
    let (p_aligned, p_orthogonal) = axis_projectors(n);
    let zero = QuantumState::basis_state(1, 0)
        .expect("one-qubit basis state")
        .density_matrix();
    let one = QuantumState::basis_state(1, 1)
        .expect("one-qubit basis state")
        .density_matrix();
    // Q0 = |0><0| (x) 1 + |1><1| (x) |n><n| has rank 3; Q1 = |1><1| (x)
    // |n_perp><n_perp| completes it to the 4x4 identity.
    let q_rest = zero.kronecker(&identity(2)) + one.kronecker(&p_aligned);
    let q_active = one.kronecker(&p_orthogonal);
    let s = *sched;
    TimeDependentHamiltonian::from_branched(
        s.runtime(),
        BranchedForm {
            projectors: vec![q_rest, q_active],
            driver: -pauli_z(),
            finals: vec![equator_hamiltonian(0.0), equator_hamiltonian(phi)],
            f1: Box::new(move |t| s.theta_at(t).map(f64::cos).unwrap_or(f64::NAN)),
            f2: Box::new(move |t| s.theta_at(t).map(f64::sin).unwrap_or(f64::NAN)),
        },
    )
}

/// Assemble the generic bipartite controlled evolution
/// `H(t) = sum_j P_j (x) [f1(t) H_b + f2(t) H_f_j]` from a validated spec.
pub fn generic_controlled_evolution(spec: ControlledEvolutionSpec) -> TimeDependentHamiltonian {
    TimeDependentHamiltonian::from_branched(
        spec.runtime,
        BranchedForm {
            projectors: spec.projectors,
            driver: spec.driver,
            finals: spec.finals,
            f1: spec.f1,
            f2: spec.f2,
        },
    )
}
