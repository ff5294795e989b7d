"""Several senders, one receiver.

Sender i sees its own measurement Z_i of the shared state X plus its own
secret W_i and emits Y_i; the receiver maps the message tuple to an estimate.
Each sender pays the common distortion plus rho times the leakage of its own
secret through its own message; the receiver pays the distortion. The sum of
all leakage terms plus the distortion is an exact potential.

Joint tensors carry axes (x, z_1..z_n, w_1..w_n) and all contractions sum one
sender at a time, so the full policy product is never materialized.
"""
from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from .game import DistortionMatrix, SenderPolicy, _check_blocks
from .prob import (
    FiniteSpace,
    _check_entries,
    _check_mass,
    _freeze,
    _mutual_information,
)
from .solve import (
    DEFAULT_SETTINGS,
    BestResponseResult,
    SolverSettings,
    _minimize_over_blocks,
)
from .dynamics import DynamicsReport, TrajectoryRecord

#: Dense joint tensors larger than this are rejected.
MAX_JOINT_ENTRIES = 10_000_000
#: einsum subscripts limit the sender count well above any desk-scale use.
MAX_SENDERS = 16

_LETTERS = string.ascii_lowercase + string.ascii_uppercase


@dataclass(frozen=True)
class MultiJoint:
    """Joint pmf of (X, Z_1..Z_n, W_1..W_n); every Z_i shares the X alphabet."""

    x_space: FiniteSpace
    w_spaces: tuple[FiniteSpace, ...]
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w_spaces", tuple(self.w_spaces))
        n = len(self.w_spaces)
        if n < 1:
            raise ValueError("need at least one sender")
        if n > MAX_SENDERS:
            raise ValueError(f"sender count {n} exceeds the cap of {MAX_SENDERS}")
        m = self.x_space.size
        shape = (m,) + (m,) * n + tuple(s.size for s in self.w_spaces)
        if int(np.prod(shape)) > MAX_JOINT_ENTRIES:
            raise ValueError(
                f"joint tensor would hold {int(np.prod(shape))} entries, "
                f"over the {MAX_JOINT_ENTRIES} cap"
            )
        arr = np.array(self.p, dtype=float)
        if arr.shape != shape:
            raise ValueError(f"joint shape {arr.shape} does not match spaces {shape}")
        _check_entries(arr, "joint")
        arr = _check_mass(arr, "joint")
        object.__setattr__(self, "p", _freeze(arr))

    @property
    def n(self) -> int:
        return len(self.w_spaces)

    def px(self) -> np.ndarray:
        return self.p.sum(axis=tuple(range(1, self.p.ndim)))

    def pzw(self, j: int) -> np.ndarray:
        """Marginal P{Z_j, W_j} as a matrix."""
        keep = {1 + j, 1 + self.n + j}
        drop = tuple(ax for ax in range(self.p.ndim) if ax not in keep)
        return self.p.sum(axis=drop)


@dataclass(frozen=True)
class SenderPolicySet:
    """One encoder per sender."""

    policies: tuple[SenderPolicy, ...]

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))
        if not self.policies:
            raise ValueError("need at least one sender policy")

    def __len__(self) -> int:
        return len(self.policies)

    def __getitem__(self, i: int) -> SenderPolicy:
        return self.policies[i]

    def replace(self, i: int, policy: SenderPolicy) -> "SenderPolicySet":
        ps = list(self.policies)
        ps[i] = policy
        return SenderPolicySet(tuple(ps))

    @classmethod
    def uniform(cls, y_sizes, z_size: int, w_sizes) -> "SenderPolicySet":
        return cls(
            tuple(
                SenderPolicy.uniform(y, z_size, w)
                for y, w in zip(y_sizes, w_sizes, strict=True)
            )
        )


@dataclass(frozen=True)
class MultiReceiverPolicy:
    """Decoder over message tuples: tensor (xhat, y_1..y_n)."""

    b: np.ndarray

    def __post_init__(self):
        arr = np.array(self.b, dtype=float)
        if arr.ndim < 2:
            raise ValueError("receiver policy needs an estimate axis plus message axes")
        arr = _check_blocks(arr, 0, "receiver policy")
        object.__setattr__(self, "b", _freeze(arr))


@dataclass(frozen=True)
class MultiGameInstance:
    joint: MultiJoint
    distortion: DistortionMatrix
    y_spaces: tuple[FiniteSpace, ...]
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "y_spaces", tuple(self.y_spaces))
        if len(self.y_spaces) != self.joint.n:
            raise ValueError("one message alphabet per sender required")
        if self.distortion.size != self.joint.x_space.size:
            raise ValueError("distortion size does not match the state alphabet")
        if self.rho < 0.0:
            raise ValueError("privacy weight rho must be nonnegative")
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def n(self) -> int:
        return self.joint.n

    def check_policies(self, alphas: SenderPolicySet, beta: MultiReceiverPolicy | None = None):
        if len(alphas) != self.n:
            raise ValueError(f"expected {self.n} sender policies, got {len(alphas)}")
        m = self.joint.x_space.size
        for i, pol in enumerate(alphas.policies):
            want = (self.y_spaces[i].size, m, self.joint.w_spaces[i].size)
            if pol.a.shape != want:
                raise ValueError(f"sender {i + 1} policy shape {pol.a.shape}, expected {want}")
        if beta is not None:
            want_b = (m,) + tuple(s.size for s in self.y_spaces)
            if beta.b.shape != want_b:
                raise ValueError(f"receiver policy shape {beta.b.shape}, expected {want_b}")


def _subscripts(n: int):
    """einsum letters for (x, z_i, w_i, y_i) axes."""
    need = 1 + 3 * n
    if need > len(_LETTERS):
        raise ValueError("too many senders for einsum subscripts")
    x = _LETTERS[0]
    z = _LETTERS[1 : 1 + n]
    w = _LETTERS[1 + n : 1 + 2 * n]
    y = _LETTERS[1 + 2 * n : 1 + 3 * n]
    return x, z, w, y


def _state_message_joint(joint: MultiJoint, alphas: SenderPolicySet) -> np.ndarray:
    """P{X, Y_1..Y_n}: contract every encoder against its own axes."""
    n = joint.n
    x, z, w, y = _subscripts(n)
    lead = x + "".join(z) + "".join(w)
    terms = [lead] + [y[i] + z[i] + w[i] for i in range(n)]
    out = x + "".join(y)
    return np.einsum(
        ",".join(terms) + "->" + out,
        joint.p,
        *[a.a for a in alphas.policies],
        optimize="greedy",
    )


def expected_distortion_multi(
    g: MultiGameInstance, alphas: SenderPolicySet, beta: MultiReceiverPolicy
) -> float:
    g.check_policies(alphas, beta)
    q = _state_message_joint(g.joint, alphas)
    dxy = np.tensordot(g.distortion.d, beta.b, axes=([1], [0]))
    return float((q * dxy).sum())


def leakage_j(g: MultiGameInstance, alphas: SenderPolicySet, j: int) -> float:
    """I(Y_j; W_j) in nats for sender j (0-based)."""
    g.check_policies(alphas)
    jyw = np.einsum("yzw,zw->yw", alphas[j].a, g.joint.pzw(j))
    return _mutual_information(jyw)


def coalition_leakage(g: MultiGameInstance, alphas: SenderPolicySet, j: int) -> float:
    """Diagnostic I(Y_1..Y_n; W_j): what all messages jointly reveal of secret j."""
    g.check_policies(alphas)
    n = g.n
    x, z, w, y = _subscripts(n)
    lead = x + "".join(z) + "".join(w)
    terms = [lead] + [y[i] + z[i] + w[i] for i in range(n)]
    out = "".join(y) + w[j]
    joint = np.einsum(
        ",".join(terms) + "->" + out,
        g.joint.p,
        *[a.a for a in alphas.policies],
        optimize="greedy",
    )
    flat = joint.reshape(-1, joint.shape[-1])
    return _mutual_information(flat)


def sender_cost_multi(
    g: MultiGameInstance, alphas: SenderPolicySet, beta: MultiReceiverPolicy, j: int
) -> float:
    return expected_distortion_multi(g, alphas, beta) + g.rho * leakage_j(g, alphas, j)


def receiver_cost_multi(
    g: MultiGameInstance, alphas: SenderPolicySet, beta: MultiReceiverPolicy
) -> float:
    return expected_distortion_multi(g, alphas, beta)


def potential_multi(
    g: MultiGameInstance, alphas: SenderPolicySet, beta: MultiReceiverPolicy
) -> float:
    """Distortion plus rho times the sum of every sender's own leakage."""
    total = expected_distortion_multi(g, alphas, beta)
    for j in range(g.n):
        total += g.rho * leakage_j(g, alphas, j)
    return total


def _prior_estimate_multi(g: MultiGameInstance) -> int:
    return int(np.argmin(g.distortion.d.T @ g.joint.px()))


def receiver_best_response_multi(
    g: MultiGameInstance, alphas: SenderPolicySet
) -> MultiReceiverPolicy:
    """Per-message-tuple posterior minimizer, prior-optimal on dead tuples."""
    g.check_policies(alphas)
    q = _state_message_joint(g.joint, alphas)
    m = q.shape[0]
    flat = q.reshape(m, -1)
    costs = g.distortion.d.T @ flat
    choice = np.argmin(costs, axis=0)
    dead = flat.sum(axis=0) == 0.0
    if np.any(dead):
        choice = np.where(dead, _prior_estimate_multi(g), choice)
    b = np.zeros_like(costs)
    b[choice, np.arange(flat.shape[1])] = 1.0
    return MultiReceiverPolicy(b.reshape(q.shape))


def _linear_coeffs_multi(
    g: MultiGameInstance, alphas: SenderPolicySet, beta: MultiReceiverPolicy, j: int
) -> np.ndarray:
    """Distortion as a linear functional of encoder j, the others held fixed."""
    n = g.n
    x, z, w, y = _subscripts(n)
    dxy = np.tensordot(g.distortion.d, beta.b, axes=([1], [0]))
    lead = x + "".join(z) + "".join(w)
    terms = [lead, x + "".join(y)]
    args = [g.joint.p, dxy]
    for i in range(n):
        if i == j:
            continue
        terms.append(y[i] + z[i] + w[i])
        args.append(alphas[i].a)
    out = y[j] + z[j] + w[j]
    return np.einsum(",".join(terms) + "->" + out, *args, optimize="greedy")


def sender_best_response_multi(
    g: MultiGameInstance,
    alphas: SenderPolicySet,
    beta: MultiReceiverPolicy,
    j: int,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> BestResponseResult:
    """Best response of sender j with every other player held fixed."""
    g.check_policies(alphas, beta)
    c = _linear_coeffs_multi(g, alphas, beta, j)
    pzw = g.joint.pzw(j)
    a, cost, iterations, converged, gap = _minimize_over_blocks(
        c, pzw, pzw.sum(axis=0), g.rho, settings
    )
    return BestResponseResult(SenderPolicy(a), cost, iterations, converged, gap)


@dataclass(frozen=True)
class MultiEpsilonNashReport:
    member: bool
    receiver_gap: float
    sender_gaps: tuple[float, ...]
    sender_stationarity_gaps: tuple[float, ...]
    epsilon: float


def epsilon_nash_check_multi(
    g: MultiGameInstance,
    alphas: SenderPolicySet,
    beta: MultiReceiverPolicy,
    epsilon: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> MultiEpsilonNashReport:
    """Per-player improvement gaps at a multi-sender strategy state."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    g.check_policies(alphas, beta)
    v = receiver_cost_multi(g, alphas, beta)
    receiver_gap = v - receiver_cost_multi(g, alphas, receiver_best_response_multi(g, alphas))
    gaps, stat = [], []
    for j in range(g.n):
        res = sender_best_response_multi(g, alphas, beta, j, settings)
        gaps.append(sender_cost_multi(g, alphas, beta, j) - res.cost)
        stat.append(res.stationarity_gap)
    member = receiver_gap <= epsilon and all(gap <= epsilon for gap in gaps)
    return MultiEpsilonNashReport(member, receiver_gap, tuple(gaps), tuple(stat), epsilon)


def default_initial_state_multi(
    g: MultiGameInstance,
) -> tuple[SenderPolicySet, MultiReceiverPolicy]:
    """All-uniform encoders plus the constant prior-optimal decoder."""
    alphas = SenderPolicySet.uniform(
        [s.size for s in g.y_spaces],
        g.joint.x_space.size,
        [s.size for s in g.joint.w_spaces],
    )
    m = g.joint.x_space.size
    b = np.zeros((m,) + tuple(s.size for s in g.y_spaces))
    b[_prior_estimate_multi(g), ...] = 1.0
    return alphas, MultiReceiverPolicy(b)


def random_best_response_dynamics(
    g: MultiGameInstance,
    alphas0: SenderPolicySet,
    beta0: MultiReceiverPolicy,
    epsilon: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    max_rounds: int = 1000,
    seed: int = 0,
) -> DynamicsReport:
    """Uniformly random player order with thresholded adoption.

    Each round draws one of the n + 1 players (0 = receiver); the drawn player
    adopts its best response only when that improves its own cost by strictly
    more than epsilon. Play stops once every player has been checked without
    an acceptable improvement since the last adoption.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    g.check_policies(alphas0, beta0)
    want = min(settings.grad_tol, epsilon / 10.0)
    inner = settings if want == settings.grad_tol else SolverSettings(
        settings.max_iters, want, settings.obj_tol, settings.step_init, settings.seed
    )

    rng = np.random.default_rng(seed)
    alphas, beta = alphas0, beta0
    n = g.n

    def snapshot(k, mover, accepted, mover_cost, v):
        psi = potential_multi(g, alphas, beta)
        return TrajectoryRecord(k, mover, psi, mover_cost, v, accepted)

    v0 = receiver_cost_multi(g, alphas, beta)
    records = [snapshot(0, "none", True, potential_multi(g, alphas, beta), v0)]
    frozen: set[int] = set()
    reached = False
    rounds = 0
    for k in range(1, max_rounds + 1):
        rounds = k
        pick = int(rng.integers(0, n + 1))
        mover = "receiver" if pick == 0 else f"sender_{pick}"
        if pick in frozen:
            v = receiver_cost_multi(g, alphas, beta)
            own = v if pick == 0 else sender_cost_multi(g, alphas, beta, pick - 1)
            records.append(snapshot(k, mover, False, own, v))
            continue
        if pick == 0:
            cand_beta = receiver_best_response_multi(g, alphas)
            before = receiver_cost_multi(g, alphas, beta)
            after = receiver_cost_multi(g, alphas, cand_beta)
            gap = before - after
            if gap > epsilon:
                beta = cand_beta
                frozen = {0}
                records.append(snapshot(k, mover, True, after, after))
                continue
        else:
            i = pick - 1
            res = sender_best_response_multi(g, alphas, beta, i, inner)
            before = sender_cost_multi(g, alphas, beta, i)
            gap = before - res.cost
            if gap > epsilon:
                alphas = alphas.replace(i, res.policy)
                frozen = {pick}
                v = receiver_cost_multi(g, alphas, beta)
                records.append(snapshot(k, mover, True, res.cost, v))
                continue
        frozen.add(pick)
        v = receiver_cost_multi(g, alphas, beta)
        own = v if pick == 0 else sender_cost_multi(g, alphas, beta, pick - 1)
        records.append(snapshot(k, mover, False, own, v))
        if len(frozen) == n + 1:
            reached = True
            break

    return DynamicsReport(
        tuple(records), (alphas, beta), epsilon, reached, rounds
    )
