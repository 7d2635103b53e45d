"""Cat-code error correction over the lossy SPP channel.

Logical qubits live on even cat states |0L> ~ |a>+|-a>, |1L> ~ |ia>+|-ia>.
Single-excitation loss flips photon parity, so parity checks along the
line detect jumps without reading out the logical content; an end-of-line
recovery flips the erred space back and undoes the i-per-jump phase
accumulated by the logical-one component.  Trajectories are unraveled as
quantum jumps: per micro-step, a jump (apply a, renormalize) occurs with
probability gamma*dt*<n>, otherwise the exact no-jump decay
exp(-gamma*dt*n/2) is applied and renormalized.  The imperfect excitation
stage (|beta| < 1) is itself a pure-loss channel with transmissivity
sin^2|g| and is unraveled the same way before x = 0.

Every trajectory draws from its own deterministic random stream derived
from (seed, input index, trajectory index), so ensembles are reproducible
and order-independent under any parallel chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplerSpec, excite_superposition, normalize_superposition, superposition_vector
from .qstate import StateVector, _coherent_column, annihilation, number, truncation_dimension

SIX_CARDINAL = (
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
    (1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)),
    (1.0 / math.sqrt(2.0), 1j / math.sqrt(2.0)),
    (1.0 / math.sqrt(2.0), -1j / math.sqrt(2.0)),
)


@dataclass(frozen=True)
class CatCode:
    """Code-space description at amplitude alpha in a D-dimensional space."""

    alpha: complex
    dim: int

    def __post_init__(self):
        if self.dim < truncation_dimension(self.alpha):
            raise ValueError("truncation dimension too small for this alpha")

    @property
    def n_plus(self) -> float:
        return 2.0 * (1.0 + math.exp(-2.0 * abs(self.alpha) ** 2))

    @property
    def n_minus(self) -> float:
        return 2.0 * (1.0 - math.exp(-2.0 * abs(self.alpha) ** 2))

    def basis_amplitudes(self, logical: int, parity_sign: int) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients and coherent amplitudes of |logical_(+-)>."""
        a = self.alpha if logical == 0 else 1j * self.alpha
        norm = self.n_plus if parity_sign > 0 else self.n_minus
        c = 1.0 / math.sqrt(norm)
        return np.array([c, parity_sign * c], dtype=complex), np.array([a, -a], dtype=complex)

    def state(self, logical: int, parity_sign: int) -> StateVector:
        coeffs, amps = self.basis_amplitudes(logical, parity_sign)
        vec = sum(c * _coherent_column(a, self.dim) for c, a in zip(coeffs, amps))
        return StateVector(vec).normalized()

    def encode(self, c0: complex, c1: complex) -> StateVector:
        """Normalized c0|0L> + c1|1L> (exact Gram normalization)."""
        amps = [self.alpha, -self.alpha, 1j * self.alpha, -1j * self.alpha]
        return superposition_vector([c0, c0, c1, c1], amps, self.dim)


def code_states(code: CatCode) -> tuple[StateVector, StateVector, StateVector, StateVector]:
    """(|0L+>, |0L->, |1L+>, |1L->)."""
    return (code.state(0, +1), code.state(0, -1), code.state(1, +1), code.state(1, -1))


@dataclass(frozen=True)
class CodeWord:
    """Label of one basis code word: logical in {0, 1}, parity_sign +-1."""

    logical: int
    parity_sign: int


def apply_annihilation(code: CatCode, word: CodeWord) -> tuple[complex, CodeWord]:
    """a|0L+-> = alpha sqrt(N-+/N+-)|0L-+>; a|1L+-> picks an extra factor i.

    Returns the analytic coefficient and the parity-flipped word.
    """
    ratio = (code.n_minus / code.n_plus if word.parity_sign > 0
             else code.n_plus / code.n_minus)
    coeff = code.alpha * math.sqrt(ratio)
    if word.logical == 1:
        coeff *= 1j
    return complex(coeff), CodeWord(word.logical, -word.parity_sign)


def no_jump(state: StateVector, gamma_dt: float) -> StateVector:
    """Exact no-jump evolution exp(-gamma*dt*n/2), renormalized."""
    if gamma_dt < 0.0:
        raise ValueError("gamma_dt must be >= 0")
    n = np.arange(state.dim)
    return StateVector(state.amplitudes * np.exp(-0.5 * gamma_dt * n)).normalized()


def no_jump_norm(state: StateVector, gamma_dt: float) -> float:
    """Norm of exp(-gamma*dt*n/2)|state> before renormalization."""
    n = np.arange(state.dim)
    return float(np.linalg.norm(state.amplitudes * np.exp(-0.5 * gamma_dt * n)))


def kraus_pair(gamma_dt: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """First-order damping Kraus pair E0 = sqrt(gamma dt) a,
    E1 = 1 - (gamma dt/2) n; completeness holds up to (gamma dt)^2 n^2/4."""
    e0 = math.sqrt(gamma_dt) * annihilation(dim)
    e1 = np.eye(dim, dtype=complex) - 0.5 * gamma_dt * number(dim)
    return e0, e1


def kraus_completeness_residual(gamma_dt: float, dim: int) -> float:
    """Operator norm of E0^+E0 + E1^+E1 - 1."""
    e0, e1 = kraus_pair(gamma_dt, dim)
    resid = e0.conj().T @ e0 + e1.conj().T @ e1 - np.eye(dim)
    return float(np.linalg.norm(resid, 2))


def parity_check(state: StateVector, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Born-rule projective parity measurement; returns (+-1, projected state)."""
    probs_even = float(np.sum(np.abs(state.amplitudes[0::2]) ** 2))
    probs_odd = float(np.sum(np.abs(state.amplitudes[1::2]) ** 2))
    total = probs_even + probs_odd
    if total < 1e-14:
        raise ArithmeticError("state norm collapsed in parity projection")
    u = rng.random()
    outcome = 1 if u < probs_even / total else -1
    amps = np.array(state.amplitudes)
    if outcome > 0:
        amps[1::2] = 0.0
    else:
        amps[0::2] = 0.0
    return outcome, StateVector(amps).normalized()


@dataclass(frozen=True)
class QecRunConfig:
    """One error-corrected propagation experiment.

    Distances are expressed through the attenuation factor k0*kappa''
    (1/m) and positions x (m); the jump rate per step is
    gamma*dt = 2*k0*kappa''*dx.  parity_p = 0 keeps only the initial
    post-excitation check; otherwise checks run every dx/p (integer
    schedule, floor(i*p) increments).  dx=None picks the largest step with
    gamma*dt*<n> <= 0.01 at the initial amplitude.
    """

    alpha: complex
    g: complex
    k0_kappa2: float
    x_total: float
    parity_p: float
    dx: float | None = None
    n_trajectories: int = 10_000
    seed: int = 0
    input_set: str = "six"
    haar_samples: int = 6
    initial_check: bool = True
    apply_recovery: bool = True
    n_checkpoints: int = 7

    def __post_init__(self):
        if not 0.0 <= self.parity_p <= 1.0:
            raise ValueError("parity probability must lie in [0, 1]")
        if self.x_total <= 0.0 or self.k0_kappa2 < 0.0:
            raise ValueError("need x_total > 0 and k0_kappa2 >= 0")
        if self.n_trajectories < 1:
            raise ValueError("need at least one trajectory")
        if self.input_set not in ("six", "haar"):
            raise ValueError("input_set must be 'six' or 'haar'")
        nbar = abs(self.alpha_excited) ** 2
        if self.step * 2.0 * self.k0_kappa2 * max(nbar, 1.0) >= 0.05:
            raise ValueError("dx too coarse: per-step jump probability exceeds 0.05")

    @property
    def beta_amp(self) -> complex:
        return CouplerSpec(self.g).beta_amp

    @property
    def alpha_excited(self) -> complex:
        """SPP amplitude right after excitation, -conj(beta)*alpha."""
        return -np.conj(self.beta_amp) * self.alpha

    @property
    def step(self) -> float:
        if self.dx is not None:
            if self.dx <= 0.0:
                raise ValueError("dx must be > 0")
            return self.dx
        nbar = max(abs(self.alpha_excited) ** 2, 1.0)
        if self.k0_kappa2 == 0.0:
            return self.x_total / 100.0
        return 0.01 / (2.0 * self.k0_kappa2 * nbar)

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.x_total / self.step - 1e-9))

    def check_schedule(self) -> np.ndarray:
        """Boolean mask over steps: check after step i when floor(i*p)
        increments (i 1-based), i.e. every dx/p on average."""
        n = self.n_steps
        if self.parity_p == 0.0:
            return np.zeros(n, dtype=bool)
        i = np.arange(1, n + 1)
        return np.floor(i * self.parity_p) > np.floor((i - 1) * self.parity_p)

    def checkpoint_steps(self) -> np.ndarray:
        """Step indices (0..n_steps) where fidelity snapshots are taken."""
        return np.unique(np.linspace(0, self.n_steps, self.n_checkpoints).round().astype(int))

    def input_states(self, rng: np.random.Generator | None = None):
        if self.input_set == "six":
            return list(SIX_CARDINAL)
        rng = rng if rng is not None else np.random.default_rng((self.seed, 0xA11A))
        out = []
        for _ in range(self.haar_samples):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            out.append((complex(v[0]), complex(v[1])))
        return out

    # -- excitation-stage unraveling ------------------------------------
    @property
    def excitation_gamma_t(self) -> float:
        """Total gamma*t of the excitation-equivalent loss channel."""
        eta = abs(self.beta_amp) ** 2
        if eta >= 1.0:
            return 0.0
        if eta <= 0.0:
            raise ValueError("beta = 0: nothing is transferred to the SPP")
        return -math.log(eta)

    @property
    def n_excitation_steps(self) -> int:
        gt = self.excitation_gamma_t
        if gt == 0.0:
            return 0
        nbar = max(abs(self.alpha) ** 2, 1.0)
        return max(1, math.ceil(gt * nbar / 0.01))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of one quantum-jump run."""

    jump_count: int
    parity_outcomes: tuple[int, ...]
    final_state: StateVector
    seed: int
    warn_flag: bool = False


@dataclass(frozen=True)
class QecCurve:
    """Ensemble fidelity versus distance, with the pre-check baseline F0."""

    x: np.ndarray
    f_bar: np.ndarray
    std_err: np.ndarray
    f0: float
    n_trajectories: int


@dataclass(frozen=True)
class OrthogonalityReport:
    x: np.ndarray
    overlap: np.ndarray
    max_overlap: float
    violated: bool


# ---------------------------------------------------------------------------
# deterministic random streams

def trajectory_rng(seed: int, input_index: int, traj_index: int) -> np.random.Generator:
    """Independent stream per (seed, input, trajectory)."""
    return np.random.default_rng((seed, input_index, traj_index))


def _draw_blocks(rng: np.random.Generator, n_exc: int, n_steps: int, n_checks: int):
    """Fixed consumption order: excitation jumps, initial check, step jumps,
    scheduled checks.  Both the reference and vectorized engines use this."""
    return (rng.random(n_exc), rng.random(1), rng.random(n_steps), rng.random(n_checks))


# ---------------------------------------------------------------------------
# single-trajectory reference engine

def _jump(amps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    n = np.arange(1, len(amps))
    out[:-1] = amps[1:] * np.sqrt(n)
    norm = np.linalg.norm(out)
    if norm < 1e-14:
        raise ArithmeticError("jump applied to (near-)vacuum state")
    return out / norm


def _loss_steps(amps: np.ndarray, gamma_dt: float, uniforms: np.ndarray,
                decay: np.ndarray) -> tuple[np.ndarray, int]:
    jumps = 0
    n = np.arange(len(amps))
    for u in uniforms:
        nbar = float(np.sum(n * np.abs(amps) ** 2))
        if u < gamma_dt * nbar:
            amps = _jump(amps)
            jumps += 1
        else:
            amps = amps * decay
            amps /= np.linalg.norm(amps)
    return amps, jumps


def run_trajectory(config: QecRunConfig, input_logical: tuple[complex, complex],
                   rng: np.random.Generator) -> TrajectoryRecord:
    """Reference quantum-jump run for one input state.

    Alternates channel micro-steps with parity checks on the schedule: one
    initial check right after excitation, then every dx/p.  Records every
    parity outcome and the total jump count.
    """
    c0, c1 = input_logical
    dim = truncation_dimension(config.alpha)
    code = CatCode(alpha=config.alpha, dim=dim)
    amps = np.array(code.encode(c0, c1).amplitudes)

    n_exc = config.n_excitation_steps
    n_steps = config.n_steps
    schedule = config.check_schedule()
    exc_u, init_u, step_u, check_u = _draw_blocks(rng, n_exc, n_steps, int(schedule.sum()))

    jumps = 0
    if n_exc:
        g_dt = config.excitation_gamma_t / n_exc
        decay = np.exp(-0.5 * g_dt * np.arange(dim))
        amps, jumps = _loss_steps(amps, g_dt, exc_u, decay)
    # deterministic phase of the excited amplitude: -conj(beta) = r*e^{i phi}
    phi = np.angle(config.alpha_excited / config.alpha) if abs(config.alpha) else 0.0
    amps = amps * np.exp(1j * phi * np.arange(dim))

    outcomes: list[int] = []
    state = StateVector(amps)
    if config.initial_check:
        outcome, state = _parity_with_uniform(state, float(init_u[0]))
        outcomes.append(outcome)

    gamma_dx = 2.0 * config.k0_kappa2 * config.step
    decay = np.exp(-0.5 * gamma_dx * np.arange(dim))
    amps = np.array(state.amplitudes)
    n_op = np.arange(dim)
    check_i = 0
    for i in range(n_steps):
        nbar = float(np.sum(n_op * np.abs(amps) ** 2))
        if step_u[i] < gamma_dx * nbar:
            amps = _jump(amps)
            jumps += 1
        else:
            amps = amps * decay
            amps /= np.linalg.norm(amps)
        if schedule[i]:
            state = StateVector(amps)
            outcome, state = _parity_with_uniform(state, float(check_u[check_i]))
            outcomes.append(outcome)
            amps = np.array(state.amplitudes)
            check_i += 1

    return TrajectoryRecord(jump_count=jumps, parity_outcomes=tuple(outcomes),
                            final_state=StateVector(amps), seed=config.seed)


def _parity_with_uniform(state: StateVector, u: float) -> tuple[int, StateVector]:
    p_even = float(np.sum(np.abs(state.amplitudes[0::2]) ** 2))
    outcome = 1 if u < p_even else -1
    amps = np.array(state.amplitudes)
    if outcome > 0:
        amps[1::2] = 0.0
    else:
        amps[0::2] = 0.0
    norm = np.linalg.norm(amps)
    if norm < 1e-14:
        raise ArithmeticError("parity projection annihilated the state")
    return outcome, StateVector(amps / norm)


# ---------------------------------------------------------------------------
# recovery

def count_flips(outcomes) -> int:
    """Inferred jump count: parity flips relative to the even start."""
    flips = 0
    prev = 1
    for o in outcomes:
        if o != prev:
            flips += 1
        prev = o
    return flips


def recover(record: TrajectoryRecord, code: CatCode) -> tuple[StateVector, bool]:
    """End-of-line correction using the decayed-amplitude code basis.

    If the recorded parity indicates the erred space, the partial isometry
    |0L+><0L-| + |1L+><1L-| + h.c. swaps the parity sectors; the
    accumulated i^k phase on the logical-one component is undone with k
    inferred from the parity-flip count.  Components inconsistent with the
    record are carried into the wrong sector (honest infidelity) rather
    than dropped.  Returns (state, warn) with warn set when the projection
    onto the indicated subspace retains less than half the norm.
    """
    k_hat = count_flips(record.parity_outcomes)
    parity_sign = 1 if (len(record.parity_outcomes) == 0
                        or record.parity_outcomes[-1] > 0) else -1
    psi = record.final_state
    comps = {(lg, s): code.state(lg, s) for lg in (0, 1) for s in (+1, -1)}
    coeff = {key: st.inner(psi) for key, st in comps.items()}
    weight = abs(coeff[(0, parity_sign)]) ** 2 + abs(coeff[(1, parity_sign)]) ** 2
    warn = weight < 0.5
    phase = (-1j) ** (k_hat % 4)
    opp = -parity_sign
    vec = (coeff[(0, parity_sign)] * comps[(0, +1)].amplitudes
           + phase * coeff[(1, parity_sign)] * comps[(1, +1)].amplitudes
           + coeff[(0, opp)] * comps[(0, -1)].amplitudes
           + phase * coeff[(1, opp)] * comps[(1, -1)].amplitudes)
    norm = np.linalg.norm(vec)
    if norm < 1e-8:
        raise ArithmeticError("recovery annihilated the state (outside the code span)")
    return StateVector(vec / norm), warn


# ---------------------------------------------------------------------------
# vectorized ensemble engine

def _ensemble_uniforms(config: QecRunConfig, input_index: int, n_exc: int,
                       n_steps: int, n_checks: int):
    """Per-trajectory streams assembled into (draws, n_traj) blocks."""
    nt = config.n_trajectories
    exc = np.empty((n_exc, nt))
    init = np.empty((1, nt))
    steps = np.empty((n_steps, nt))
    checks = np.empty((n_checks, nt))
    for j in range(nt):
        rng = trajectory_rng(config.seed, input_index, j)
        e, i0, s, c = _draw_blocks(rng, n_exc, n_steps, n_checks)
        exc[:, j] = e
        init[:, j] = i0
        steps[:, j] = s
        checks[:, j] = c
    return exc, init, steps, checks


def _vec_channel_step(states, u, gamma_dt, n_vec, sqrt_n, decay, jumps) -> None:
    """One jump/no-jump micro-step applied in place to all trajectories."""
    prob2 = np.abs(states) ** 2
    nbar = prob2 @ n_vec
    mask = u < gamma_dt * nbar
    pre = states[mask].copy() if np.any(mask) else None
    states *= decay
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    if pre is not None:
        shifted = np.zeros_like(pre)
        shifted[:, :-1] = pre[:, 1:] * sqrt_n
        norms = np.linalg.norm(shifted, axis=1, keepdims=True)
        if np.any(norms < 1e-14):
            raise ArithmeticError("jump applied to (near-)vacuum trajectory")
        states[mask] = shifted / norms
        jumps += mask


def _vec_loss_steps(states, gamma_dt, uniforms, n_vec, sqrt_n, decay, jumps):
    for t in range(uniforms.shape[0]):
        _vec_channel_step(states, uniforms[t], gamma_dt, n_vec, sqrt_n, decay, jumps)
    return jumps


def _vec_parity(states: np.ndarray, uniforms: np.ndarray,
                prev: np.ndarray, flips: np.ndarray) -> np.ndarray:
    p_even = np.sum(np.abs(states[:, 0::2]) ** 2, axis=1)
    outcome = np.where(uniforms < p_even, 1, -1)
    states[outcome > 0, 1::2] = 0.0
    states[outcome < 0, 0::2] = 0.0
    norms = np.linalg.norm(states, axis=1, keepdims=True)
    if np.any(norms < 1e-14):
        raise ArithmeticError("parity projection annihilated a trajectory")
    states /= norms
    flips += (outcome != prev)
    return outcome


def _vec_recover_fidelity(states, parity_now, flips, code_decayed, reference_ref):
    """Recovered-state fidelity per trajectory against the alpha'-encoded
    reference (vectorized form of recover + pure_fidelity)."""
    bases = {(lg, s): code_decayed.state(lg, s).amplitudes
             for lg in (0, 1) for s in (+1, -1)}
    nt = states.shape[0]
    fid = np.empty(nt)
    phase = (-1j) ** (flips % 4)
    ref = reference_ref.amplitudes
    for sign in (+1, -1):
        sel = parity_now == sign
        if not np.any(sel):
            continue
        c = {key: states[sel] @ bases[key].conj() for key in bases}
        ph = phase[sel]
        vec = (c[(0, sign)][:, None] * bases[(0, +1)][None, :]
               + (ph * c[(1, sign)])[:, None] * bases[(1, +1)][None, :]
               + c[(0, -sign)][:, None] * bases[(0, -1)][None, :]
               + (ph * c[(1, -sign)])[:, None] * bases[(1, -1)][None, :])
        norms = np.linalg.norm(vec, axis=1)
        good = norms > 1e-8
        overlap = np.abs(vec @ ref.conj()) ** 2
        fid[sel] = np.where(good, overlap / np.maximum(norms, 1e-300) ** 2, 0.0)
    return fid


def _f0_analytic(config: QecRunConfig, inputs) -> float:
    """Average fidelity of the excited (pre-check) state against the
    matched-amplitude logical reference, from the analytic mixture."""
    a_exc = config.alpha_excited
    total = 0.0
    for c0, c1 in inputs:
        rho = excite_superposition(
            [c0, c0, c1, c1],
            [config.alpha, -config.alpha, 1j * config.alpha, -1j * config.alpha],
            config.g)
        amps_ref = np.array([a_exc, -a_exc, 1j * a_exc, -1j * a_exc])
        coeffs_ref = normalize_superposition([c0, c0, c1, c1], amps_ref)
        total += rho.fidelity_pure(coeffs_ref, amps_ref)
    return total / len(inputs)


def run_ensemble(config: QecRunConfig, input_logical: tuple[complex, complex],
                 input_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized trajectory ensemble for one input state.

    Returns (fidelities, jumps): fidelities has shape
    (n_checkpoints, n_trajectories) holding the recovered fidelity at each
    snapshot; jumps the per-trajectory jump count.
    """
    c0, c1 = input_logical
    dim = truncation_dimension(config.alpha)
    code = CatCode(alpha=config.alpha, dim=dim)
    nt = config.n_trajectories
    n_steps = config.n_steps
    schedule = config.check_schedule()
    n_exc = config.n_excitation_steps
    exc_u, init_u, step_u, check_u = _ensemble_uniforms(
        config, input_index, n_exc, n_steps, int(schedule.sum()))

    states = np.tile(code.encode(c0, c1).amplitudes, (nt, 1)).astype(complex)
    n_vec = np.arange(dim, dtype=float)
    sqrt_n = np.sqrt(np.arange(1, dim, dtype=float))
    jumps = np.zeros(nt, dtype=int)
    flips = np.zeros(nt, dtype=int)
    prev_parity = np.ones(nt, dtype=int)

    if n_exc:
        g_dt = config.excitation_gamma_t / n_exc
        decay = np.exp(-0.5 * g_dt * n_vec)
        jumps = _vec_loss_steps(states, g_dt, exc_u, n_vec, sqrt_n, decay, jumps)
    phi = np.angle(config.alpha_excited / config.alpha) if abs(config.alpha) else 0.0
    states *= np.exp(1j * phi * n_vec)

    if config.initial_check:
        prev_parity = _vec_parity(states, init_u[0], prev_parity, flips)

    checkpoints = config.checkpoint_steps()
    fid = np.empty((len(checkpoints), nt))
    cp_index = {int(s): i for i, s in enumerate(checkpoints)}
    a0 = config.alpha_excited
    gamma_dx = 2.0 * config.k0_kappa2 * config.step
    decay = np.exp(-0.5 * gamma_dx * n_vec)

    def snapshot(step_no: int):
        idx = cp_index.get(step_no)
        if idx is None:
            return
        x = step_no * config.step
        a_x = a0 * math.exp(-config.k0_kappa2 * x)
        amps_ref = np.array([a_x, -a_x, 1j * a_x, -1j * a_x])
        coeffs = normalize_superposition([c0, c0, c1, c1], amps_ref)
        ref = superposition_vector(coeffs, amps_ref, dim)
        if config.apply_recovery:
            code_x = CatCode(alpha=a_x, dim=dim)
            fid[idx] = _vec_recover_fidelity(states, prev_parity, flips, code_x, ref)
        else:
            fid[idx] = np.abs(states @ ref.amplitudes.conj()) ** 2

    snapshot(0)
    check_i = 0
    for i in range(n_steps):
        _vec_channel_step(states, step_u[i], gamma_dx, n_vec, sqrt_n, decay, jumps)
        if schedule[i]:
            prev_parity = _vec_parity(states, check_u[check_i], prev_parity, flips)
            check_i += 1
        snapshot(i + 1)
    return fid, jumps


def average_fidelity(config: QecRunConfig, workers: int = 1) -> QecCurve:
    """Bloch-sphere-averaged recovered fidelity along the line.

    Averages over the configured input set (the six Pauli eigenstates
    form a 2-design, so their mean equals the Haar average) and the
    trajectory ensemble; F0 is the analytic pre-check fidelity at x = 0.
    """
    inputs = config.input_states()
    checkpoints = config.checkpoint_steps()
    x = checkpoints * config.step
    per_input_mean = np.zeros((len(inputs), len(checkpoints)))
    per_input_var = np.zeros_like(per_input_mean)

    def one(idx):
        fid, _ = run_ensemble(config, inputs[idx], idx)
        return idx, fid.mean(axis=1), fid.var(axis=1, ddof=1)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, m, v in pool.map(one, range(len(inputs))):
                per_input_mean[idx] = m
                per_input_var[idx] = v
    else:
        for idx in range(len(inputs)):
            _, per_input_mean[idx], per_input_var[idx] = one(idx)

    f_bar = per_input_mean.mean(axis=0)
    std_err = np.sqrt(per_input_var.sum(axis=0) / config.n_trajectories) / len(inputs)
    f0 = _f0_analytic(config, inputs)
    return QecCurve(x=x, f_bar=f_bar, std_err=std_err, f0=f0,
                    n_trajectories=config.n_trajectories)


def orthogonality_monitor(config: QecRunConfig, n_points: int = 200) -> OrthogonalityReport:
    """Max |<0L'+-|1L'+->| on the decayed code basis along the run; the
    code analysis assumes it stays below 1e-2."""
    x = np.linspace(0.0, config.x_total, n_points)
    a = np.abs(config.alpha_excited) * np.exp(-config.k0_kappa2 * x)
    a_sq = a * a
    n_plus = 2.0 * (1.0 + np.exp(-2.0 * a_sq))
    n_minus = 2.0 * (1.0 - np.exp(-2.0 * a_sq))
    # <0L+-|1L+-> = 4 e^{-a^2} cos(a^2)/N+ (even) or 4i e^{-a^2} sin(a^2)/N- (odd)
    even = np.abs(4.0 * np.exp(-a_sq) * np.cos(a_sq) / n_plus)
    odd = np.abs(4.0 * np.exp(-a_sq) * np.sin(a_sq) / n_minus)
    overlap = np.maximum(even, odd)
    max_overlap = float(overlap.max())
    return OrthogonalityReport(x=x, overlap=overlap, max_overlap=max_overlap,
                               violated=max_overlap > 1e-2)
