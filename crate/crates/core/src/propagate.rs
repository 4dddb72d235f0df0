//! Time-dependent Schrödinger propagation and adiabaticity diagnostics.
//!
//! The integrator is a piecewise-constant midpoint rule: each slice
//! `[t, t + dt]` applies `exp(-i H(t + dt/2) dt)` through the spectral
//! decomposition of the midpoint Hamiltonian. Every slice is therefore
//! exactly unitary — norm errors cannot accumulate — the method is exact for
//! constant Hamiltonians, and the global error is second order in `dt`.
//!
//! On top of the integrator this module measures the quantities that
//! characterize an adiabatic gate: instantaneous spectra and gaps, leakage
//! out of the final ground space (diabatic error), dynamic and geometric
//! phases of a branch, Bloch-sphere paths, and a Monte-Carlo demonstration of
//! dephasing noise between the two branches of a gate Hamiltonian.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::TimeDependentHamiltonian;
use crate::linalg::{c64, eigh, identity, CMatrix, CVector, QuantumState};
use crate::tol::Tolerances;

/// A propagated (or instantaneous-eigenstate) path: normalized states at
/// ascending sample times from 0 to the runtime.
#[derive(Debug, Clone)]
pub struct Trajectory {
    sample_times: Vec<f64>,
    states: Vec<QuantumState>,
}

impl Trajectory {
    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at the last sample time (the end of the evolution).
    pub fn final_state(&self) -> &QuantumState {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }
}

/// Dynamic and geometric phase accumulated along one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    /// Integral of the instantaneous ground energy over the evolution.
    pub dynamic_phase: f64,
    /// Open-path geometric phase in (-pi, pi], computed in the
    /// parallel-transport gauge.
    pub geometric_phase: f64,
    /// Which branch this record belongs to (e.g. "0" or "phi").
    pub branch_label: String,
}

/// Instantaneous spectra along an evolution.
#[derive(Debug, Clone)]
pub struct GapProfile {
    times: Vec<f64>,
    eigenvalue_lists: Vec<Vec<f64>>,
    within_branch_gap: Vec<f64>,
}

impl GapProfile {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Ascending eigenvalues at each sample time.
    pub fn eigenvalue_lists(&self) -> &[Vec<f64>] {
        &self.eigenvalue_lists
    }

    /// Per-sample gap between the positive and negative halves of the
    /// spectrum — for the branched gate Hamiltonians this is the gap *within*
    /// each branch, which the degenerate ground manifold would otherwise
    /// hide. Falls back to the full spectral span when the spectrum does not
    /// straddle zero.
    pub fn within_branch_gap(&self) -> &[f64] {
        &self.within_branch_gap
    }
}

fn check_runtime(h: &TimeDependentHamiltonian, runtime: f64) -> Result<()> {
    let slack = 1e-9 * h.runtime().max(1.0);
    if !runtime.is_finite() || runtime < 0.0 || runtime > h.runtime() + slack {
        return Err(Error::TimeOutOfRange {
            t: runtime,
            runtime: h.runtime(),
        });
    }
    Ok(())
}

/// Evenly spaced sample times covering `[0, runtime]` with exact endpoints.
fn sample_times(runtime: f64, samples: usize) -> Vec<f64> {
    if runtime == 0.0 {
        return vec![0.0];
    }
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                runtime
            } else {
                runtime * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Integrate the Schrödinger equation for `psi0` under `h` over
/// `[0, runtime]` with `steps` midpoint slices, recording about `samples`
/// evenly spaced states (clamped to one state per step, always including
/// both endpoints).
///
/// A zero runtime is a valid degenerate evolution: the trajectory holds the
/// initial state only.
pub fn evolve(
    h: &TimeDependentHamiltonian,
    psi0: &QuantumState,
    runtime: f64,
    steps: usize,
    samples: usize,
) -> Result<Trajectory> {
    let tol = Tolerances::default();
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    check_runtime(h, runtime)?;
    if runtime == 0.0 {
        return Ok(Trajectory {
            sample_times: vec![0.0],
            states: vec![psi0.clone()],
        });
    }
    if steps == 0 {
        return Err(Error::InvalidInput {
            reason: "steps must be at least 1".into(),
        });
    }
    let n_samples = samples.clamp(2, steps + 1);
    // Snap sample points to step boundaries; spacing >= 1 step keeps them
    // strictly increasing.
    let sample_steps: Vec<usize> = (0..n_samples)
        .map(|i| ((i * steps) as f64 / (n_samples - 1) as f64).round() as usize)
        .collect();

    let dt = runtime / steps as f64;
    let mut psi: CVector = psi0.amplitudes().clone();
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    let mut record = |k: usize, psi: &CVector| -> Result<()> {
        let t = if k == steps { runtime } else { k as f64 * dt };
        if psi.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput {
                reason: format!("non-finite amplitudes at t = {t}"),
            });
        }
        let deviation = (psi.norm() - 1.0).abs();
        if deviation > tol.norm_drift {
            return Err(Error::NormDrift { deviation });
        }
        times.push(t);
        states.push(QuantumState::trusted(psi.clone()));
        Ok(())
    };

    record(0, &psi)?;
    let mut next_sample = 1usize;
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let spectrum = eigh(&h.at(t_mid)?);
        psi = spectrum.evolve_vector(dt, &psi);
        if next_sample < sample_steps.len() && sample_steps[next_sample] == k + 1 {
            record(k + 1, &psi)?;
            next_sample += 1;
        }
    }
    Ok(Trajectory {
        sample_times: times,
        states,
    })
}

/// Accumulate the full propagator `U(runtime, 0)` of `h` as a dense unitary,
/// using the same midpoint slicing as [`evolve`].
///
/// Useful when one evolution will be applied to many states, or when a small
/// gate Hamiltonian is embedded into a larger register: the embedding of the
/// propagator equals the propagator of the embedded Hamiltonian.
pub fn propagate_unitary(
    h: &TimeDependentHamiltonian,
    runtime: f64,
    steps: usize,
) -> Result<CMatrix> {
    check_runtime(h, runtime)?;
    if runtime == 0.0 {
        return Ok(identity(h.dim()));
    }
    if steps == 0 {
        return Err(Error::InvalidInput {
            reason: "steps must be at least 1".into(),
        });
    }
    let dt = runtime / steps as f64;
    let mut u = identity(h.dim());
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let spectrum = eigh(&h.at(t_mid)?);
        u = spectrum.evolution_operator(dt) * u;
    }
    Ok(u)
}

/// Instantaneous sorted spectra of `h` at `samples` evenly spaced times.
pub fn gap_profile(
    h: &TimeDependentHamiltonian,
    runtime: f64,
    samples: usize,
) -> Result<GapProfile> {
    check_runtime(h, runtime)?;
    if samples < 2 && runtime > 0.0 {
        return Err(Error::InvalidInput {
            reason: "gap profile needs at least 2 samples".into(),
        });
    }
    let times = sample_times(runtime, samples);
    let mut eigenvalue_lists = Vec::with_capacity(times.len());
    let mut within_branch_gap = Vec::with_capacity(times.len());
    for &t in &times {
        let spectrum = eigh(&h.at(t)?);
        let evs = spectrum.eigenvalues().to_vec();
        let highest_negative = evs
            .iter()
            .copied()
            .filter(|&e| e < 0.0)
            .fold(f64::NAN, f64::max);
        let lowest_positive = evs
            .iter()
            .copied()
            .filter(|&e| e >= 0.0)
            .fold(f64::NAN, f64::min);
        let gap = if highest_negative.is_nan() || lowest_positive.is_nan() {
            evs[evs.len() - 1] - evs[0]
        } else {
            lowest_positive - highest_negative
        };
        eigenvalue_lists.push(evs);
        within_branch_gap.push(gap);
    }
    Ok(GapProfile {
        times,
        eigenvalue_lists,
        within_branch_gap,
    })
}

/// Gauge-fixed instantaneous ground states of `h` at `steps + 1` evenly
/// spaced times.
///
/// The eigensolver's per-sample phases are arbitrary, so each state is
/// phase-aligned to have a real positive overlap with its predecessor — the
/// discrete parallel-transport gauge. Errors if the ground state is
/// degenerate (within the degeneracy tolerance) at any sample, or if
/// consecutive ground states become nearly orthogonal (sampling too coarse
/// to track the level).
fn transported_ground_states(
    h: &TimeDependentHamiltonian,
    runtime: f64,
    n_points: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<CVector>)> {
    let tol = Tolerances::default();
    let times = sample_times(runtime, n_points);
    let mut energies = Vec::with_capacity(times.len());
    let mut vectors: Vec<CVector> = Vec::with_capacity(times.len());
    for &t in &times {
        let spectrum = eigh(&h.at(t)?);
        if h.dim() > 1 {
            let gap = spectrum.ground_gap();
            if gap < tol.degeneracy {
                return Err(Error::DegenerateGroundState {
                    t,
                    gap,
                    limit: tol.degeneracy,
                });
            }
        }
        let mut v = spectrum.eigenvector(0);
        if let Some(previous) = vectors.last() {
            let overlap = previous.dotc(&v);
            if overlap.norm() < 1e-6 {
                return Err(Error::InvalidInput {
                    reason: format!(
                        "ground state changes discontinuously near t = {t}; refine the sampling"
                    ),
                });
            }
            v *= overlap.conj() / overlap.norm();
        }
        energies.push(spectrum.ground_energy());
        vectors.push(v);
    }
    Ok((times, energies, vectors))
}

/// Dynamic and geometric phases of one branch evolution.
///
/// The dynamic phase is the trapezoidal integral of the instantaneous ground
/// energy. The geometric phase is the phase of the overlap between the first
/// and last parallel-transported ground states — the open-path (Pancharatnam)
/// value, gauge-independent by construction.
pub fn phases(
    h: &TimeDependentHamiltonian,
    runtime: f64,
    steps: usize,
    branch_label: impl Into<String>,
) -> Result<PhaseRecord> {
    check_runtime(h, runtime)?;
    let label = branch_label.into();
    if runtime == 0.0 {
        return Ok(PhaseRecord {
            dynamic_phase: 0.0,
            geometric_phase: 0.0,
            branch_label: label,
        });
    }
    if steps == 0 {
        return Err(Error::InvalidInput {
            reason: "steps must be at least 1".into(),
        });
    }
    let (times, energies, vectors) = transported_ground_states(h, runtime, steps + 1)?;
    let mut dynamic = 0.0;
    for k in 1..times.len() {
        dynamic += 0.5 * (energies[k] + energies[k - 1]) * (times[k] - times[k - 1]);
    }
    let overlap = vectors[0].dotc(&vectors[vectors.len() - 1]);
    let mut geometric = overlap.arg();
    if geometric <= -std::f64::consts::PI {
        geometric += 2.0 * std::f64::consts::PI;
    }
    Ok(PhaseRecord {
        dynamic_phase: dynamic,
        geometric_phase: geometric,
        branch_label: label,
    })
}

/// The adiabatic reference path: gauge-fixed instantaneous ground states of
/// `h` at `samples` evenly spaced times, packaged as a [`Trajectory`].
///
/// This is the path an infinitely slow evolution would follow; finite-runtime
/// propagated states wobble around it at the diabatic-error scale.
pub fn eigenstate_trajectory(
    h: &TimeDependentHamiltonian,
    runtime: f64,
    samples: usize,
) -> Result<Trajectory> {
    check_runtime(h, runtime)?;
    if samples < 2 && runtime > 0.0 {
        return Err(Error::InvalidInput {
            reason: "eigenstate trajectory needs at least 2 samples".into(),
        });
    }
    let (times, _, vectors) = transported_ground_states(h, runtime, samples)?;
    Ok(Trajectory {
        sample_times: times,
        states: vectors.into_iter().map(QuantumState::trusted).collect(),
    })
}

/// Population leaked out of the ground space of `h(runtime)` after evolving
/// `psi0`: `1 - ||Pi_ground psi(T)||^2`, projecting onto the full (possibly
/// degenerate) ground eigenspace.
pub fn diabatic_error(
    h: &TimeDependentHamiltonian,
    psi0: &QuantumState,
    runtime: f64,
    steps: usize,
) -> Result<f64> {
    let tol = Tolerances::default();
    let trajectory = evolve(h, psi0, runtime, steps, 2)?;
    let psi = trajectory.final_state().amplitudes();
    let spectrum = eigh(&h.at(runtime)?);
    let cluster = spectrum.ground_cluster_size(tol.degeneracy);
    let mut weight = 0.0;
    for k in 0..cluster {
        weight += spectrum.eigenvectors().column(k).dotc(psi).norm_sqr();
    }
    Ok((1.0 - weight).clamp(0.0, 1.0))
}

/// Bloch vector `(x, y, z) = (<sx>, <sy>, <sz>)` at each sample of a
/// single-qubit trajectory.
pub fn bloch_trajectory(trajectory: &Trajectory) -> Result<Vec<[f64; 3]>> {
    trajectory
        .states()
        .iter()
        .map(|state| {
            if state.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: state.dim(),
                });
            }
            let a = state.amplitude(0);
            let b = state.amplitude(1);
            let cross = a.conj() * b;
            Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
        })
        .collect()
}

/// Monte-Carlo dephasing demonstration: interleave the evolution slices with
/// random phase kicks `exp(-i xi D)` where `D` is the difference of the two
/// lifted branch projectors and `xi ~ Normal(0, kick_strength * sqrt(dt))`,
/// then average the final density matrix over `trials` runs.
///
/// This noise commutes with the Hamiltonian at every instant, so it causes no
/// leakage — it scrambles exactly the relative phase between the two
/// degenerate branches, the one degree of freedom the constant gap does not
/// protect. The noise shape is an illustration device, not a physical model
/// of any particular hardware.
///
/// Trials use independent, reproducible random streams derived from `seed`,
/// so results are bit-identical across runs and thread counts.
pub fn dephasing_demo(
    h: &TimeDependentHamiltonian,
    psi0: &QuantumState,
    runtime: f64,
    steps: usize,
    kick_strength: f64,
    trials: usize,
    seed: u64,
) -> Result<CMatrix> {
    let tol = Tolerances::default();
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    check_runtime(h, runtime)?;
    if !kick_strength.is_finite() || kick_strength < 0.0 {
        return Err(Error::InvalidInput {
            reason: format!("kick strength {kick_strength} must be finite and nonnegative"),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidInput {
            reason: "at least one trial is required".into(),
        });
    }
    if steps == 0 && runtime > 0.0 {
        return Err(Error::InvalidInput {
            reason: "steps must be at least 1".into(),
        });
    }
    let projector_count = h.branch_projectors().map_or(0, <[CMatrix]>::len);
    if projector_count != 2 {
        return Err(Error::InvalidInput {
            reason: format!(
                "dephasing demo needs a two-branch Hamiltonian (found {projector_count} branches)"
            ),
        });
    }
    let diff = h.lifted_projector(0).unwrap() - h.lifted_projector(1).unwrap();
    // For a complete orthogonal pair, D^2 = 1; the kick then has the closed
    // form cos(xi) 1 - i sin(xi) D.
    let involution_dev = (&diff * &diff - identity(h.dim()))
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if involution_dev > tol.spectral {
        return Err(Error::InvalidInput {
            reason: format!(
                "branch projector difference is not an involution (deviation {involution_dev:.3e})"
            ),
        });
    }

    let effective_steps = if runtime == 0.0 { 0 } else { steps };
    let dt = if effective_steps == 0 {
        0.0
    } else {
        runtime / effective_steps as f64
    };
    // The slice unitaries do not depend on the noise; compute them once and
    // share them across trials.
    let slice_unitaries: Vec<CMatrix> = (0..effective_steps)
        .map(|k| {
            let t_mid = (k as f64 + 0.5) * dt;
            Ok(eigh(&h.at(t_mid)?).evolution_operator(dt))
        })
        .collect::<Result<Vec<_>>>()?;
    let kick_sigma = kick_strength * dt.sqrt();
    let normal = Normal::new(0.0, kick_sigma).map_err(|e| Error::InvalidInput {
        reason: format!("invalid kick distribution: {e}"),
    })?;

    let densities: Vec<CMatrix> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let mut psi: CVector = psi0.amplitudes().clone();
            for u in &slice_unitaries {
                psi = u * psi;
                let xi: f64 = normal.sample(&mut rng);
                let (sin_xi, cos_xi) = xi.sin_cos();
                psi = &psi * c64(cos_xi, 0.0) + (&diff * &psi) * c64(0.0, -sin_xi);
            }
            let d = psi.len();
            CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
        })
        .collect();
    // Reduce in trial order so the result is bitwise reproducible.
    let sum = densities
        .into_iter()
        .fold(CMatrix::zeros(h.dim(), h.dim()), |acc, rho| acc + rho);
    Ok(sum / c64(trials as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        branch_evolution, branch_evolutions, single_qubit_gate_hamiltonian, BlochAxis,
        LinearSchedule,
    };
    use crate::linalg::{fidelity, pauli_z};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn constant_hamiltonian(m: CMatrix, runtime: f64) -> TimeDependentHamiltonian {
        TimeDependentHamiltonian::from_closure(m.nrows(), runtime, move |_| m.clone()).unwrap()
    }

    /// Closed-form final state of a single branch under the linear ramp,
    /// obtained in the frame co-rotating with the ramp where the Hamiltonian
    /// is constant. This is an integrator-independent oracle.
    fn branch_final_state_exact(phi: f64, theta_f: f64, runtime: f64) -> CVector {
        let omega = theta_f / runtime;
        let big_omega = (1.0 + omega * omega / 4.0).sqrt();
        let (sin_wt, cos_wt) = (big_omega * runtime).sin_cos();
        let chi0 = c64(cos_wt, sin_wt / big_omega);
        let chi1 = -(omega / (2.0 * big_omega)) * sin_wt;
        let c = (theta_f / 2.0).cos();
        let s = (theta_f / 2.0).sin();
        let phase = Complex64::from_polar(1.0, phi);
        CVector::from_vec(vec![
            chi0 * c - c64(s * chi1, 0.0),
            phase * (chi0 * s + c64(c * chi1, 0.0)),
        ])
    }

    /// Closed-form leakage out of the final ground state for a branch ramp.
    fn branch_diabatic_error_exact(theta_f: f64, runtime: f64) -> f64 {
        let omega = theta_f / runtime;
        let big_omega = (1.0 + omega * omega / 4.0).sqrt();
        let s = (big_omega * runtime).sin();
        (omega * omega / (4.0 + omega * omega)) * s * s
    }

    #[test]
    fn stationary_eigenstate_acquires_only_its_energy_phase() {
        let h = constant_hamiltonian(-pauli_z(), 7.3);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let traj = evolve(&h, &zero, 7.3, 400, 5).unwrap();
        let final_state = traj.final_state();
        assert!((fidelity(final_state, &zero).unwrap() - 1.0).abs() < 1e-12);
        // |0> has energy -1 under -sz, so the phase factor is e^{+iT}.
        let expected = Complex64::from_polar(1.0, 7.3);
        assert!((final_state.amplitude(0) - expected).norm() < 1e-10);
    }

    #[test]
    fn branch_ramp_reaches_its_target_state() {
        let sched = LinearSchedule::new(FRAC_PI_2, 500.0).unwrap();
        let h = branch_evolution(0.0, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let traj = evolve(&h, &zero, 500.0, sched.steps(), 2).unwrap();
        let target =
            QuantumState::new(vec![c64((PI / 4.0).cos(), 0.0), c64((PI / 4.0).sin(), 0.0)])
                .unwrap();
        assert!(fidelity(traj.final_state(), &target).unwrap() >= 1.0 - 1e-4);
    }

    #[test]
    fn integrator_matches_the_rotating_frame_solution() {
        for &(phi, theta_f, runtime) in &[
            (0.0, PI, 20.0),
            (FRAC_PI_2, FRAC_PI_2, 20.0),
            (2.2, 2.0 * PI / 3.0, 35.0),
        ] {
            let sched = LinearSchedule::with_steps(theta_f, runtime, 40_000).unwrap();
            let h = branch_evolution(phi, &sched);
            let zero = QuantumState::basis_state(1, 0).unwrap();
            let traj = evolve(&h, &zero, runtime, sched.steps(), 2).unwrap();
            let exact = branch_final_state_exact(phi, theta_f, runtime);
            let worst = (traj.final_state().amplitudes() - exact)
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max);
            assert!(
                worst < 1e-8,
                "phi={phi}, theta_f={theta_f}: deviation {worst:.3e}"
            );
        }
    }

    #[test]
    fn halving_the_step_reduces_the_error_at_second_order() {
        let sched = LinearSchedule::new(PI, 5.0).unwrap();
        let h = branch_evolution(1.3, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let reference = evolve(&h, &zero, 5.0, 10_000, 2).unwrap();
        let error_at = |steps: usize| {
            let traj = evolve(&h, &zero, 5.0, steps, 2).unwrap();
            (traj.final_state().amplitudes() - reference.final_state().amplitudes()).norm()
        };
        let coarse = error_at(50);
        let fine = error_at(100);
        assert!(
            coarse / fine >= 3.0,
            "refinement ratio {:.2} below second-order expectation",
            coarse / fine
        );
    }

    #[test]
    fn evolve_validates_inputs() {
        let h = constant_hamiltonian(-pauli_z(), 1.0);
        let two_qubits = QuantumState::basis_state(2, 0).unwrap();
        assert!(matches!(
            evolve(&h, &two_qubits, 1.0, 10, 2).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        let zero = QuantumState::basis_state(1, 0).unwrap();
        assert!(matches!(
            evolve(&h, &zero, 2.0, 10, 2).unwrap_err(),
            Error::TimeOutOfRange { .. }
        ));
        assert!(matches!(
            evolve(&h, &zero, 1.0, 0, 2).unwrap_err(),
            Error::InvalidInput { .. }
        ));
    }

    #[test]
    fn zero_runtime_evolution_is_the_identity() {
        let sched = LinearSchedule::new(PI, 0.0).unwrap();
        let h = branch_evolution(0.0, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let traj = evolve(&h, &zero, 0.0, 1, 2).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.sample_times(), &[0.0]);
        assert!((fidelity(traj.final_state(), &zero).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sample_times_cover_the_full_window() {
        let sched = LinearSchedule::new(PI, 10.0).unwrap();
        let h = branch_evolution(0.4, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let traj = evolve(&h, &zero, 10.0, 1000, 11).unwrap();
        assert_eq!(traj.len(), 11);
        assert_eq!(traj.sample_times()[0], 0.0);
        assert_eq!(*traj.sample_times().last().unwrap(), 10.0);
        for pair in traj.sample_times().windows(2) {
            assert!(pair[1] > pair[0]);
        }
        for state in traj.states() {
            assert!((state.amplitudes().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn propagate_unitary_agrees_with_state_evolution() {
        let sched = LinearSchedule::new(2.0, 15.0).unwrap();
        let n = BlochAxis::new(0.3, -0.5, 0.8).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, 1.1, &sched);
        let u = propagate_unitary(&h, 15.0, 3000).unwrap();
        // Unitarity.
        let gram = u.adjoint() * &u;
        let dev = (gram - identity(4))
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        assert!(dev < 1e-10);
        // Agreement with evolve on a basis state.
        let psi0 = QuantumState::basis_state(2, 2).unwrap();
        let traj = evolve(&h, &psi0, 15.0, 3000, 2).unwrap();
        let applied = &u * psi0.amplitudes();
        let worst = (traj.final_state().amplitudes() - applied)
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn gap_profile_reports_the_constant_branch_gap() {
        let sched = LinearSchedule::new(2.9, 12.0).unwrap();
        let h = branch_evolution(1.8, &sched);
        let profile = gap_profile(&h, 12.0, 25).unwrap();
        for gap in profile.within_branch_gap() {
            assert!((gap - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_profile_sees_through_the_degenerate_gate_manifold() {
        let n = BlochAxis::new(1.0, 1.0, 0.0).unwrap();
        let sched = LinearSchedule::new(PI, 12.0).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, 2.0, &sched);
        let profile = gap_profile(&h, 12.0, 50).unwrap();
        for (evs, gap) in profile
            .eigenvalue_lists()
            .iter()
            .zip(profile.within_branch_gap())
        {
            for (ev, expected) in evs.iter().zip(&[-1.0, -1.0, 1.0, 1.0]) {
                assert!((ev - expected).abs() < 1e-10);
            }
            assert!((gap - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_profile_for_constant_pauli_z_is_two() {
        let h = constant_hamiltonian(pauli_z(), 3.0);
        let profile = gap_profile(&h, 3.0, 7).unwrap();
        for gap in profile.within_branch_gap() {
            assert!((gap - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn branch_dynamic_phase_is_minus_the_runtime() {
        let sched = LinearSchedule::new(2.0, 50.0).unwrap();
        let h = branch_evolution(0.0, &sched);
        let record = phases(&h, 50.0, 5000, "0").unwrap();
        assert!((record.dynamic_phase + 50.0).abs() < 1e-6);
        assert!(record.geometric_phase.abs() < 1e-9);
    }

    #[test]
    fn both_branches_accumulate_identical_phases() {
        let sched = LinearSchedule::new(2.4, 60.0).unwrap();
        let [(label0, h0), (label1, h1)] = branch_evolutions(1.7, &sched);
        let r0 = phases(&h0, 60.0, 6000, label0).unwrap();
        let r1 = phases(&h1, 60.0, 6000, label1).unwrap();
        assert!((r0.dynamic_phase - r1.dynamic_phase).abs() < 1e-9);
        assert!((r0.geometric_phase - r1.geometric_phase).abs() < 1e-9);
    }

    #[test]
    fn zero_runtime_phases_vanish() {
        let sched = LinearSchedule::new(PI, 0.0).unwrap();
        let h = branch_evolution(0.9, &sched);
        let record = phases(&h, 0.0, 1, "phi").unwrap();
        assert_eq!(record.dynamic_phase, 0.0);
        assert_eq!(record.geometric_phase, 0.0);
    }

    #[test]
    fn phases_reject_degenerate_ground_states() {
        let h = constant_hamiltonian(CMatrix::zeros(2, 2), 1.0);
        assert!(matches!(
            phases(&h, 1.0, 10, "0").unwrap_err(),
            Error::DegenerateGroundState { .. }
        ));
    }

    #[test]
    fn diabatic_error_vanishes_for_a_stationary_state() {
        let h = constant_hamiltonian(-pauli_z(), 10.0);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let error = diabatic_error(&h, &zero, 10.0, 500).unwrap();
        assert!(error < 1e-10);
    }

    #[test]
    fn instant_quench_leaves_the_state_fully_excited() {
        // With zero runtime and theta_f = pi the final Hamiltonian is +sz,
        // whose ground state |1> is orthogonal to the unevolved |0>.
        let sched = LinearSchedule::new(PI, 0.0).unwrap();
        let h = branch_evolution(0.0, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let error = diabatic_error(&h, &zero, 0.0, 1).unwrap();
        assert!((error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diabatic_error_matches_the_closed_form() {
        let zero = QuantumState::basis_state(1, 0).unwrap();
        for &runtime in &[50.0, 100.0, 200.0, 400.0] {
            let sched = LinearSchedule::new(PI, runtime).unwrap();
            let h = branch_evolution(0.0, &sched);
            let measured = diabatic_error(&h, &zero, runtime, sched.steps()).unwrap();
            let predicted = branch_diabatic_error_exact(PI, runtime);
            assert!(
                (measured - predicted).abs() < 1e-9,
                "T={runtime}: measured {measured:.6e} vs predicted {predicted:.6e}"
            );
        }
    }

    #[test]
    fn longer_runtimes_reduce_the_diabatic_error() {
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let error_at = |runtime: f64| {
            let sched = LinearSchedule::new(PI, runtime).unwrap();
            let h = branch_evolution(0.0, &sched);
            diabatic_error(&h, &zero, runtime, sched.steps()).unwrap()
        };
        assert!(error_at(400.0) < error_at(100.0));
    }

    #[test]
    fn bloch_trajectory_starts_at_the_north_pole() {
        let sched = LinearSchedule::new(PI, 30.0).unwrap();
        let h = branch_evolution(1.0, &sched);
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let traj = evolve(&h, &zero, 30.0, 6000, 31).unwrap();
        let points = bloch_trajectory(&traj).unwrap();
        let first = points[0];
        assert!((first[0], first[1], first[2]) == (0.0, 0.0, 1.0));
        for p in &points {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn adiabatic_path_of_the_reference_branch_stays_on_the_meridian() {
        let sched = LinearSchedule::new(PI, 30.0).unwrap();
        let h = branch_evolution(0.0, &sched);
        let path = eigenstate_trajectory(&h, 30.0, 61).unwrap();
        let points = bloch_trajectory(&path).unwrap();
        for p in &points {
            assert!(p[1].abs() < 1e-6, "y = {} off the meridian", p[1]);
            assert!(p[0] >= -1e-12, "x = {} went negative", p[0]);
        }
    }

    #[test]
    fn adiabatic_path_of_the_phase_branch_follows_its_azimuth() {
        let phi = FRAC_PI_2;
        let sched = LinearSchedule::new(PI, 30.0).unwrap();
        let h = branch_evolution(phi, &sched);
        let path = eigenstate_trajectory(&h, 30.0, 61).unwrap();
        let points = bloch_trajectory(&path).unwrap();
        for p in &points {
            if p[0] * p[0] + p[1] * p[1] > 1e-8 {
                assert!((f64::atan2(p[1], p[0]) - phi).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn noiseless_dephasing_demo_reproduces_the_pure_state() {
        let n = BlochAxis::new(0.0, 1.0, 1.0).unwrap();
        let sched = LinearSchedule::new(PI, 10.0).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, 1.2, &sched);
        let psi0 = QuantumState::basis_state(2, 0).unwrap();
        let rho = dephasing_demo(&h, &psi0, 10.0, 2000, 0.0, 3, 7).unwrap();
        let traj = evolve(&h, &psi0, 10.0, 2000, 2).unwrap();
        let pure = traj.final_state().density_matrix();
        let worst = (rho - pure).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(worst < 1e-9);
    }

    #[test]
    fn strong_dephasing_kills_inter_branch_coherence() {
        let n = BlochAxis::X;
        let sched = LinearSchedule::new(PI, 10.0).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, FRAC_PI_2, &sched);
        // |0> has equal weight on both axis branches of the x axis.
        let psi0 = QuantumState::basis_state(2, 0).unwrap();
        let rho = dephasing_demo(&h, &psi0, 10.0, 500, 1.0, 1000, 11).unwrap();
        let p0 = h.lifted_projector(0).unwrap();
        let p1 = h.lifted_projector(1).unwrap();
        let off = &p0 * &rho * &p1;
        let worst = off.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(worst < 0.05, "inter-branch coherence {worst:.3} survived");
    }

    #[test]
    fn inter_branch_coherence_decays_monotonically_with_strength() {
        let n = BlochAxis::X;
        let sched = LinearSchedule::new(PI, 10.0).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, FRAC_PI_2, &sched);
        let psi0 = QuantumState::basis_state(2, 0).unwrap();
        let p0 = h.lifted_projector(0).unwrap();
        let p1 = h.lifted_projector(1).unwrap();
        let coherence = |strength: f64| {
            let rho = dephasing_demo(&h, &psi0, 10.0, 500, strength, 200, 13).unwrap();
            (&p0 * rho * &p1)
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max)
        };
        let weak = coherence(0.05);
        let medium = coherence(0.2);
        let strong = coherence(0.6);
        assert!(
            weak > medium && medium > strong,
            "coherences {weak:.4} / {medium:.4} / {strong:.4} not monotone"
        );
    }

    #[test]
    fn dephasing_demo_is_bitwise_deterministic() {
        let n = BlochAxis::new(0.2, 0.9, -0.1).unwrap();
        let sched = LinearSchedule::new(PI, 8.0).unwrap();
        let h = single_qubit_gate_hamiltonian(&n, 0.8, &sched);
        let psi0 = QuantumState::basis_state(2, 1).unwrap();
        let a = dephasing_demo(&h, &psi0, 8.0, 400, 0.3, 64, 42).unwrap();
        let b = dephasing_demo(&h, &psi0, 8.0, 400, 0.3, 64, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dephasing_demo_validates_inputs() {
        let sched = LinearSchedule::new(PI, 5.0).unwrap();
        let n = BlochAxis::Z;
        let h = single_qubit_gate_hamiltonian(&n, 1.0, &sched);
        let psi0 = QuantumState::basis_state(2, 0).unwrap();
        assert!(matches!(
            dephasing_demo(&h, &psi0, 5.0, 100, -1.0, 10, 0).unwrap_err(),
            Error::InvalidInput { .. }
        ));
        assert!(matches!(
            dephasing_demo(&h, &psi0, 5.0, 100, 0.5, 0, 0).unwrap_err(),
            Error::InvalidInput { .. }
        ));
        // Closure-form Hamiltonians carry no branch structure.
        let opaque = constant_hamiltonian(kron_zz(), 5.0);
        assert!(matches!(
            dephasing_demo(&opaque, &psi0, 5.0, 100, 0.5, 10, 0).unwrap_err(),
            Error::InvalidInput { .. }
        ));
    }

    fn kron_zz() -> CMatrix {
        pauli_z().kronecker(&pauli_z())
    }
}
