"""Cut-set bounds, compress-forward rates, and quantization optimization.

Upper bounds come from cut rates evaluated under independent Gaussian
inputs; the source (broadcast) cut is the capacity upper bound for this
network class, and non-source cuts are reported as estimates under that
particular input law. Two verification routines cross-check the
independent-input claim on small networks by computing the same mutual
information through two unrelated routes (closed form vs joint-covariance
Schur complements).

The achievable side is compress-forward: each relay forwards a quantized
observation with additive quantization noise Q_j. A quantization vector is
admissible when, for every nonempty relay subset S, the product of its Q
entries is at least the quantized-observation covariance determinant
divided by a product of per-block decoding factors, taken over partitions
of S and receiver assignments. The `forall` quantifier requires the
inequality against every (partition, assignment); `exists` requires one
witness per subset. Since the decoding factors do not depend on Q, their
extremes are cached per subset and reused across feasibility queries.

Rate is strictly decreasing in every Q_j and feasibility margins are
strictly increasing, so the best admissible Q sits on the feasibility
frontier and monotone bisection finds it: uniformly (all Q_j equal) or
per-coordinate (cyclic descent from the uniform solution). A sweep over
the relay power multiplier shows the gap between the two sides collapsing
as relay power grows.

All rates are bits per channel use. Everything here is pure given an
immutable NetworkSpec; subset rows and sweep rows are independent work
units, and diagnostics are emitted in canonical enumeration order so
output is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enumeration import Block, ConstraintInstance, partitions, subsets
from .errors import (
    GuardExceeded,
    Infeasible,
    InvalidAlpha,
    InvalidReceiver,
    NegativePower,
    NonPositiveNoise,
    NonPositiveQ,
    VerificationFailure,
)
from .gaussian import (
    conditional_mi_bits,
    conditional_covariance,
    joint_covariance,
    log2_det,
)
from .topology import NetworkSpec, scaled

_LN2 = math.log(2.0)

#: Full constraint/cut enumeration refuses networks larger than this
#: (Bell-number blowup) unless the caller overrides.
GUARD_MAX_NODES = 10

#: Default relative tolerance for bisection on the feasibility frontier.
BISECT_REL_TOL = 1e-9

#: Bit-domain tolerance for rate comparisons (achievability vs bound).
RATE_TOL_BITS = 1e-9

#: Uniform quantization noise is searched up to this multiple of the
#: largest receiver noise; no feasible point below it means infeasible.
Q_SEARCH_CAP_FACTOR = 1e18

_QUANTIFIERS = ("forall", "exists")
_OPT_MODES = ("uniform_bisection", "coordinate_descent")


def _require_quantifier(quantifier: str) -> None:
    if quantifier not in _QUANTIFIERS:
        raise ValueError(f"quantifier must be one of {_QUANTIFIERS}, got {quantifier!r}")


def _check_guard(net: NetworkSpec, override_guard: bool) -> None:
    if net.num_nodes > GUARD_MAX_NODES and not override_guard:
        raise GuardExceeded(
            f"network has {net.num_nodes} nodes; exhaustive enumeration is "
            f"guarded above {GUARD_MAX_NODES} (set override_guard to force)"
        )


@dataclass(frozen=True)
class CutSpec:
    """Transmitter side of a cut: a node-id set containing the source."""

    tx_side: frozenset[int]

    def __post_init__(self) -> None:
        side = frozenset(int(i) for i in self.tx_side)
        if 1 not in side:
            raise ValueError(f"cut transmitter side must contain the source (1), got {sorted(side)}")
        object.__setattr__(self, "tx_side", side)

    def sorted_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.tx_side))


@dataclass(frozen=True)
class QuantizationVector:
    """Per-relay quantization noise variances, strictly positive.

    Entries are (relay id, variance) pairs kept sorted by id. Zero is the
    unattainable limit and is rejected; drive values small instead.
    """

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((int(i), float(v)) for i, v in self.entries))
        ids = [i for i, _ in cleaned]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate relay ids in quantization vector: {ids}")
        for i, v in cleaned:
            if not (v > 0.0 and math.isfinite(v)):
                raise NonPositiveQ(f"Q_{i} must be a finite positive variance, got {v!r}")
        object.__setattr__(self, "entries", cleaned)

    @classmethod
    def uniform(cls, q: float, relay_ids: tuple[int, ...]) -> "QuantizationVector":
        return cls(entries=tuple((i, float(q)) for i in relay_ids))

    @classmethod
    def per_relay(cls, mapping: dict[int, float]) -> "QuantizationVector":
        return cls(entries=tuple(mapping.items()))

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)

    def get(self, relay_id: int) -> float:
        for i, v in self.entries:
            if i == relay_id:
                return v
        raise KeyError(f"no quantization entry for relay {relay_id}")

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def is_uniform(self, rel_tol: float = 1e-12) -> bool:
        vals = self.values
        if len(vals) <= 1:
            return True
        lo, hi = min(vals), max(vals)
        return hi - lo <= rel_tol * hi

    def scaled_by(self, c: float) -> "QuantizationVector":
        if not c > 0.0:
            raise ValueError(f"scale must be > 0, got {c!r}")
        return QuantizationVector(entries=tuple((i, v * c) for i, v in self.entries))

    def with_value(self, relay_id: int, value: float) -> "QuantizationVector":
        if relay_id not in self.ids:
            raise KeyError(f"no quantization entry for relay {relay_id}")
        return QuantizationVector(
            entries=tuple((i, value if i == relay_id else v) for i, v in self.entries)
        )


@dataclass(frozen=True)
class ConstraintMargin:
    """Tightest constraint for one relay subset with its log2-domain margin.

    margin_log2 = log2(prod Q_i over S) - log2(required floor); >= 0 means
    the subset's constraint is satisfied.
    """

    instance: ConstraintInstance
    margin_log2: float


@dataclass(frozen=True)
class SingleRelayIndependenceReport:
    """Dual-route check that source-relay input correlation only hurts.

    For each correlation coefficient alpha, the closed form
    1/2 log2(1 + (P1 - a^2 P2)/N2 + (P1 - a^2 P2)/N3) is compared against
    the same mutual information computed from the joint covariance of the
    received signals by Schur-complement conditioning. The best grid point
    must be alpha = 0.
    """

    p1: float
    p2: float
    n2: float
    n3: float
    alphas: tuple[float, ...]
    closed_form_bits: tuple[float, ...]
    covariance_bits: tuple[float, ...]
    max_abs_diff_bits: float
    argmax_alpha: float


@dataclass(frozen=True)
class RelayCorrelationInvarianceReport:
    """Check that relay-relay input correlation leaves the source-cut MI
    unchanged: the covariance-route value must match
    1/2 log2(1 + P1 (1/N2 + 1/N3 + 1/N4)) for every coefficient beta."""

    p1: float
    n2: float
    n3: float
    n4: float
    betas: tuple[float, ...]
    mi_bits: tuple[float, ...]
    expected_bits: float
    max_abs_dev_bits: float


@dataclass(frozen=True)
class RateReport:
    """Bound, achievable rate, optimal quantization, and diagnostics."""

    upper_bound_bits: float
    cf_rate_bits: float
    q_star: QuantizationVector
    gap_bits: float
    binding_constraints: tuple[ConstraintMargin, ...]
    min_cut: CutSpec
    min_cut_bits: float
    quantifier: str

    def __post_init__(self) -> None:
        if not self.gap_bits >= -RATE_TOL_BITS:
            raise ValueError(
                f"achievable rate exceeds the bound: gap {self.gap_bits:.3e} bits"
            )
        expected = self.upper_bound_bits - self.cf_rate_bits
        if abs(self.gap_bits - expected) > RATE_TOL_BITS:
            raise ValueError(
                f"inconsistent gap: {self.gap_bits!r} vs bound-rate {expected!r}"
            )


@dataclass(frozen=True)
class SweepRow:
    """One relay-power-scale row of a convergence sweep. On an infeasible
    row the rate, gap, and q columns are NaN and feasible is False."""

    gamma: float
    upper_bound_bits: float
    cf_rate_bits: float
    gap_bits: float
    q_uniform: float
    feasible: bool


def cut_rate(net: NetworkSpec, cut: CutSpec) -> float:
    """Information rate across one cut under independent Gaussian inputs.

    Transmitters are the cut's source side (source plus any relays);
    receivers are everything else at their thermal noise. Receiver-side
    transmitters are conditioned out, which for independent inputs means
    their columns simply do not appear.
    """
    all_ids = set(range(1, net.num_nodes + 1))
    if not cut.tx_side <= all_ids:
        raise ValueError(
            f"cut names nodes {sorted(cut.tx_side - all_ids)} outside the network"
        )
    if net.destination_id in cut.tx_side:
        raise ValueError("cut transmitter side must exclude the destination")
    tx = cut.sorted_ids()
    rx = tuple(sorted(all_ids - cut.tx_side))
    gains = np.array([[math.sqrt(net.gain(i, j)) for i in tx] for j in rx])
    powers = np.array([net.transmit_power(i) for i in tx])
    noises = np.array([net.noise_variance(j) for j in rx])
    return conditional_mi_bits(gains, powers, noises)


def source_cut_bound(net: NetworkSpec) -> float:
    """The capacity upper bound: the rate across the broadcast cut {source}.

    Independent Gaussian inputs attain the true maximum for this cut, so
    unlike other cuts this value needs no input-law caveat.
    """
    return cut_rate(net, CutSpec(tx_side=frozenset({1})))


def cut_rate_table(
    net: NetworkSpec, override_guard: bool = False
) -> tuple[tuple[CutSpec, float], ...]:
    """Rates for every valid cut, in canonical subset order of the relay
    side (source-only cut first)."""
    _check_guard(net, override_guard)
    rows = []
    for extra in subsets(net.relay_ids):
        cut = CutSpec(tx_side=frozenset({1}) | set(extra))
        rows.append((cut, cut_rate(net, cut)))
    return tuple(rows)


def min_cut_bound(
    net: NetworkSpec, override_guard: bool = False
) -> tuple[float, CutSpec]:
    """Minimum cut rate over all 2^(T-2) cuts with its argmin cut.

    Under independent Gaussian inputs this is exact for the source cut and
    an estimate for the others; ties resolve to the earliest cut in
    canonical order.
    """
    best_val: float | None = None
    best_cut: CutSpec | None = None
    for cut, val in cut_rate_table(net, override_guard):
        if best_val is None or val < best_val:
            best_val, best_cut = val, cut
    assert best_val is not None and best_cut is not None
    return best_val, best_cut


def verify_single_relay_independence(
    p1: float,
    p2: float,
    n2: float,
    n3: float,
    alpha_grid: tuple[float, ...],
    tol_bits: float = RATE_TOL_BITS,
) -> SingleRelayIndependenceReport:
    """Dual-route sweep of source-relay correlation on the 3-node network.

    The source input is written X1 = alpha * X2 + W with fresh power
    P_W = P1 - alpha^2 P2 >= 0, so the grid must stay inside
    |alpha| <= sqrt(P1/P2). For each grid point the broadcast-cut MI is
    computed both from the closed form and from the joint covariance of
    (Y2, Y3, X2); the two routes must agree to tol_bits and the maximum
    must sit at alpha = 0 (the grid should contain 0).

    Raises VerificationFailure if the routes disagree or the argmax moves.
    """
    if not (n2 > 0.0 and n3 > 0.0):
        raise NonPositiveNoise(f"noise variances must be > 0, got n2={n2!r}, n3={n3!r}")
    if not (p1 > 0.0 and p2 > 0.0):
        raise NegativePower(f"powers must be > 0 here, got p1={p1!r}, p2={p2!r}")
    alphas = tuple(float(a) for a in alpha_grid)
    if not alphas:
        raise ValueError("alpha grid is empty")
    limit = math.sqrt(p1 / p2)
    for a in alphas:
        if abs(a) > limit * (1.0 + 1e-12):
            raise InvalidAlpha(
                f"alpha={a!r} outside the power-feasible interval [-{limit:g}, {limit:g}]"
            )

    closed: list[float] = []
    cov: list[float] = []
    log2_thermal = math.log2(n2) + math.log2(n3)
    for a in alphas:
        pw = max(p1 - a * a * p2, 0.0)  # exact-extreme rounding guard
        closed.append(0.5 * math.log2(1.0 + pw / n2 + pw / n3))
        # Joint covariance of (Y2, Y3, X2) over independent factors
        # (X2, W, Z2, Z3); the relay transmission enters Y3 and is then
        # conditioned back out, exercising the full Schur-complement path.
        rows = np.array(
            [
                [a, 1.0, 1.0, 0.0],  # Y2 = X1 + Z2
                [a + 1.0, 1.0, 0.0, 1.0],  # Y3 = X1 + X2 + Z3
                [1.0, 0.0, 0.0, 0.0],  # X2
            ]
        )
        sigma = joint_covariance(rows, np.array([p2, pw, n2, n3]))
        given_x2 = conditional_covariance(sigma, keep=[0, 1], given=[2])
        # Given X1 and X2 the residual is exactly the thermal pair (Z2, Z3).
        cov.append(0.5 * (log2_det(given_x2) - log2_thermal))

    diffs = [abs(c - v) for c, v in zip(closed, cov)]
    max_diff = max(diffs)
    if max_diff > tol_bits:
        worst = diffs.index(max_diff)
        raise VerificationFailure(
            f"covariance route disagrees with closed form by {max_diff:.3e} bits "
            f"at alpha={alphas[worst]!r} (p1={p1}, p2={p2}, n2={n2}, n3={n3})"
        )
    argmax = max(range(len(alphas)), key=lambda i: cov[i])
    if abs(alphas[argmax]) > 1e-12:
        raise VerificationFailure(
            f"MI maximum sits at alpha={alphas[argmax]!r}, expected 0 "
            f"(p1={p1}, p2={p2}, n2={n2}, n3={n3})"
        )
    return SingleRelayIndependenceReport(
        p1=p1,
        p2=p2,
        n2=n2,
        n3=n3,
        alphas=alphas,
        closed_form_bits=tuple(closed),
        covariance_bits=tuple(cov),
        max_abs_diff_bits=max_diff,
        argmax_alpha=alphas[argmax],
    )


def verify_relay_correlation_invariance(
    p1: float,
    n2: float,
    n3: float,
    n4: float,
    beta_grid: tuple[float, ...],
    tol_bits: float = RATE_TOL_BITS,
) -> RelayCorrelationInvarianceReport:
    """Sweep relay-relay correlation on the 4-node network and check the
    broadcast-cut MI never moves.

    Relay inputs are coupled as X2 = beta * X3 + W' (unit X3 and W'
    variances; the MI conditions both out, so their scale is irrelevant).
    Every grid point must match 1/2 log2(1 + P1 (1/N2 + 1/N3 + 1/N4)) to
    tol_bits. Raises VerificationFailure otherwise.
    """
    if not (n2 > 0.0 and n3 > 0.0 and n4 > 0.0):
        raise NonPositiveNoise(
            f"noise variances must be > 0, got n2={n2!r}, n3={n3!r}, n4={n4!r}"
        )
    if not p1 > 0.0:
        raise NegativePower(f"source power must be > 0 here, got {p1!r}")
    betas = tuple(float(b) for b in beta_grid)
    if not betas:
        raise ValueError("beta grid is empty")
    expected = 0.5 * math.log2(1.0 + p1 * (1.0 / n2 + 1.0 / n3 + 1.0 / n4))
    log2_thermal = math.log2(n2) + math.log2(n3) + math.log2(n4)

    mis: list[float] = []
    for b in betas:
        # Factors (X1, X3, W', Z2, Z3, Z4); unit-gain channel rows for
        # (Y2, Y3, Y4, X2, X3) with X2 = b*X3 + W'.
        rows = np.array(
            [
                [1.0, 1.0, 0.0, 1.0, 0.0, 0.0],  # Y2 = X1 + X3 + Z2
                [1.0, b, 1.0, 0.0, 1.0, 0.0],  # Y3 = X1 + X2 + Z3
                [1.0, 1.0 + b, 1.0, 0.0, 0.0, 1.0],  # Y4 = X1 + X2 + X3 + Z4
                [0.0, b, 1.0, 0.0, 0.0, 0.0],  # X2
                [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],  # X3
            ]
        )
        sigma = joint_covariance(rows, np.array([p1, 1.0, 1.0, n2, n3, n4]))
        given_inputs = conditional_covariance(sigma, keep=[0, 1, 2], given=[3, 4])
        mis.append(0.5 * (log2_det(given_inputs) - log2_thermal))

    devs = [abs(v - expected) for v in mis]
    max_dev = max(devs)
    if max_dev > tol_bits:
        worst = devs.index(max_dev)
        raise VerificationFailure(
            f"MI moved by {max_dev:.3e} bits at beta={betas[worst]!r} "
            f"(p1={p1}, n2={n2}, n3={n3}, n4={n4}): relay correlation must not matter"
        )
    return RelayCorrelationInvarianceReport(
        p1=p1,
        n2=n2,
        n3=n3,
        n4=n4,
        betas=betas,
        mi_bits=tuple(mis),
        expected_bits=expected,
        max_abs_dev_bits=max_dev,
    )


def _block_snr_sum(net: NetworkSpec, block: Block, r: int) -> float:
    """Sum over block members of lambda_ir P_i, divided by the receiver's
    source-interference-plus-noise floor lambda_1r P1 + N_r."""
    floor = net.gain(1, r) * net.transmit_power(1) + net.noise_variance(r)
    return sum(net.gain(i, r) * net.transmit_power(i) for i in block if i != r) / floor


def block_decode_rate(net: NetworkSpec, block: Block | tuple[int, ...], r: int) -> float:
    """Rate at which receiver r can absorb the forwarded indices of one
    block, treating the source signal as interference:
    1/2 log2(1 + sum_{i in block} lambda_ir P_i / (lambda_1r P1 + N_r)).

    An empty block carries nothing and yields 0 bits.
    """
    block = tuple(block)
    if not 2 <= r <= net.num_nodes:
        raise InvalidReceiver(f"receiver {r} must be a relay or the destination")
    if r in block:
        raise InvalidReceiver(f"receiver {r} lies inside its own block {block}")
    if not block:
        return 0.0
    return 0.5 * math.log1p(_block_snr_sum(net, block, r)) / _LN2


def quantized_covariance_det(
    net: NetworkSpec, s: tuple[int, ...], q: QuantizationVector
) -> float:
    """Determinant of the quantized-observation covariance for relay subset s.

    The matrix has diagonal lambda_1i P1 + N_i + Q_i and off-diagonal
    sqrt(lambda_1i lambda_1k) P1: a positive diagonal plus a rank-one
    source term, always positive definite for Q > 0.
    """
    s = tuple(s)
    if not s:
        raise ValueError("subset must be nonempty")
    return 2.0 ** _log2_quantized_covariance_det(net, s, np.array([q.get(i) for i in s]))


def _log2_quantized_covariance_det(
    net: NetworkSpec, s: tuple[int, ...], q_values: np.ndarray
) -> float:
    p1 = net.transmit_power(1)
    u = np.array([math.sqrt(net.gain(1, i)) for i in s])
    noise = np.array([net.noise_variance(i) for i in s])
    m = np.diag(noise + q_values) + p1 * np.outer(u, u)
    return log2_det(m)


@dataclass(frozen=True)
class _SubsetRow:
    """Q-independent data for one relay subset's constraint."""

    s: tuple[int, ...]
    q_slots: tuple[int, ...]  # positions of s in the sorted relay list
    lam: np.ndarray  # source power gains lambda_1i over s
    noise: np.ndarray  # thermal noise variances over s
    denom_log2: float  # extreme sum of log2(1 + block snr) over the family
    instance: ConstraintInstance  # the attaining (partition, assignment)


class _ConstraintTable:
    """Cached extreme decoding denominators for every nonempty relay subset.

    The per-block factors 1 + snr do not involve Q, so the binding
    (partition, assignment) per subset is computed once; a feasibility
    query for a concrete Q then costs one small log-det per subset. In
    forall mode the binding family member minimizes the denominator
    product (hardest constraint); in exists mode it maximizes it (easiest
    witness). The extreme over assignments factorizes across blocks, so
    only partitions are enumerated.
    """

    def __init__(self, net: NetworkSpec, quantifier: str, override_guard: bool = False):
        _require_quantifier(quantifier)
        _check_guard(net, override_guard)
        self.net = net
        self.quantifier = quantifier
        relays = net.relay_ids
        self.relays = relays
        candidates = tuple(sorted(set(relays) | {net.destination_id}))
        want_min = quantifier == "forall"

        block_best: dict[Block, tuple[float, int]] = {}

        def best_for_block(block: Block) -> tuple[float, int]:
            got = block_best.get(block)
            if got is None:
                val_r: tuple[float, int] | None = None
                for r in candidates:
                    if r in block:
                        continue
                    v = math.log1p(_block_snr_sum(net, block, r)) / _LN2
                    if val_r is None or (v < val_r[0] if want_min else v > val_r[0]):
                        val_r = (v, r)
                assert val_r is not None  # destination is always eligible
                block_best[block] = got = val_r
            return got

        rows: list[_SubsetRow] = []
        slot = {rid: k for k, rid in enumerate(relays)}
        for s in subsets(relays):
            if not s:
                continue
            best: tuple[float, ConstraintInstance] | None = None
            for part in partitions(s):
                total = 0.0
                recv = []
                for block in part:
                    v, r = best_for_block(block)
                    total += v
                    recv.append(r)
                if best is None or (total < best[0] if want_min else total > best[0]):
                    best = (
                        total,
                        ConstraintInstance(s=s, partition=part, assignment=tuple(recv)),
                    )
            assert best is not None
            rows.append(
                _SubsetRow(
                    s=s,
                    q_slots=tuple(slot[i] for i in s),
                    lam=np.array([net.gain(1, i) for i in s]),
                    noise=np.array([net.noise_variance(i) for i in s]),
                    denom_log2=best[0],
                    instance=best[1],
                )
            )
        self.rows = tuple(rows)
        self.p1 = net.transmit_power(1)

    def _margin(self, row: _SubsetRow, q_values: np.ndarray) -> float:
        # log2(prod Q) - log2(det) + denom, rewritten through the rank-one
        # determinant identity as -sum log1p(N/Q) - log1p(P1 sum lam/(N+Q))
        # + denom. Differencing the raw log-dets loses the N/Q term once Q
        # is ~1e16 N (it falls under the ulp), which would misread the
        # powerless-relay constraint Q >= Q + c as satisfiable; the log1p
        # form is exact there. The factorized determinant itself is checked
        # against this identity by the determinant-lemma suite.
        qs = q_values[list(row.q_slots)]
        shrink = float(np.sum(np.log1p(row.noise / qs)))
        source_term = math.log1p(self.p1 * float(np.sum(row.lam / (row.noise + qs))))
        return row.denom_log2 - (shrink + source_term) / _LN2

    def margins(self, q_values: np.ndarray) -> list[ConstraintMargin]:
        """Per-subset tightest margins for Q given as values aligned with
        the sorted relay list."""
        return [
            ConstraintMargin(instance=row.instance, margin_log2=self._margin(row, q_values))
            for row in self.rows
        ]

    def min_margin(self, q_values: np.ndarray) -> float:
        return min(
            (self._margin(row, q_values) for row in self.rows), default=math.inf
        )

    def q_array(self, q: QuantizationVector) -> np.ndarray:
        if q.ids != self.relays:
            raise ValueError(
                f"quantization vector covers relays {q.ids}, network has {self.relays}"
            )
        return np.array(q.values)


def cf_feasible(
    net: NetworkSpec,
    q: QuantizationVector,
    quantifier: str = "forall",
    override_guard: bool = False,
) -> tuple[bool, tuple[ConstraintMargin, ...]]:
    """Whether Q satisfies the whole constraint family, with diagnostics.

    Diagnostics carry, per nonempty relay subset in canonical order, the
    binding (partition, assignment) and its log2 margin; feasibility is
    all margins >= 0. A network with no relays is trivially feasible.
    """
    table = _ConstraintTable(net, quantifier, override_guard)
    if not table.relays:
        return True, ()
    margins = table.margins(table.q_array(q))
    return all(m.margin_log2 >= 0.0 for m in margins), tuple(margins)


def cf_rate(net: NetworkSpec, q: QuantizationVector) -> float:
    """Compress-forward end-to-end rate for quantization vector Q.

    The destination sees the source at thermal noise; each relay
    observation arrives with noise N_j + Q_j. Feasibility of Q is a
    separate question (cf_feasible); this is the rate the destination
    decodes at once the forwarded indices are absorbed.
    """
    relays = net.relay_ids
    if q.ids != relays:
        raise ValueError(
            f"quantization vector covers relays {q.ids}, network has {relays}"
        )
    rx = list(relays) + [net.destination_id]
    gains = np.array([[math.sqrt(net.gain(1, j))] for j in rx])
    powers = np.array([net.transmit_power(1)])
    noises = np.array(
        [net.noise_variance(j) + q.get(j) for j in relays]
        + [net.noise_variance(net.destination_id)]
    )
    return conditional_mi_bits(gains, powers, noises)


def _bisect_frontier(
    feasible_at: "callable", lo: float, hi: float, rel_tol: float
) -> float:
    """Shrink [lo, hi] with feasible_at(lo) False, feasible_at(hi) True,
    geometrically, and return the feasible end."""
    while hi - lo > rel_tol * hi:
        mid = math.sqrt(lo) * math.sqrt(hi)  # geometric, overflow-safe
        if mid <= lo or mid >= hi:  # no representable point left between
            break
        if feasible_at(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _min_feasible_uniform(table: _ConstraintTable, net: NetworkSpec, rel_tol: float) -> float:
    """Smallest uniform q (to rel_tol) whose margins are all nonnegative.

    Margins increase strictly in q, vanish to -inf as q -> 0, so a
    doubling search up from the noise floor brackets the frontier; if even
    the cap is infeasible nothing below it can be.
    """
    noise_cap = max(net.noise_variance(j) for j in table.relays + (net.destination_id,))
    cap = Q_SEARCH_CAP_FACTOR * noise_cap

    def ok(qv: float) -> bool:
        return table.min_margin(np.full(len(table.relays), qv)) >= 0.0

    if not ok(cap):
        raise Infeasible(
            f"no feasible quantization up to q = {cap:.3e}; "
            "relay transmit powers are too small to forward anything"
        )
    hi = noise_cap
    while not ok(hi):
        hi *= 2.0
    lo = hi
    while ok(lo):
        lo *= 0.5
        if lo == 0.0:  # underflow: frontier below representable range
            return hi
    return _bisect_frontier(ok, lo, hi, rel_tol)


def _coordinate_descent(
    table: _ConstraintTable,
    net: NetworkSpec,
    start: QuantizationVector,
    rel_tol: float,
    max_cycles: int = 64,
) -> QuantizationVector:
    """Cyclically shrink each Q_j to its per-coordinate frontier.

    Each move keeps every margin nonnegative and never raises any Q, so
    the rate is nondecreasing; stop when a full cycle improves it by no
    more than rel_tol bits.
    """
    q_values = table.q_array(start).copy()
    rate = cf_rate(net, QuantizationVector(entries=tuple(zip(table.relays, q_values))))
    for _ in range(max_cycles):
        for k in range(len(table.relays)):
            def ok(x: float) -> bool:
                trial = q_values.copy()
                trial[k] = x
                return table.min_margin(trial) >= 0.0

            hi = q_values[k]
            while not ok(hi):  # numerical slack pushed us off the frontier
                hi *= 2.0
                if hi > 1e300:
                    raise Infeasible(
                        f"coordinate search for relay {table.relays[k]} found no "
                        "feasible quantization"
                    )
            lo = hi
            while ok(lo):
                lo *= 0.5
                if lo == 0.0:
                    break
            if lo == 0.0:
                q_values[k] = hi
                continue
            q_values[k] = _bisect_frontier(ok, lo, hi, rel_tol)
        new_rate = cf_rate(
            net, QuantizationVector(entries=tuple(zip(table.relays, q_values)))
        )
        improved = new_rate - rate
        rate = new_rate
        if improved <= rel_tol:
            break
    return QuantizationVector(entries=tuple(zip(table.relays, q_values)))


def optimize_quantization(
    net: NetworkSpec,
    mode: str = "uniform_bisection",
    quantifier: str = "forall",
    tol: float = BISECT_REL_TOL,
    override_guard: bool = False,
) -> tuple[QuantizationVector, float]:
    """Best feasible quantization vector and its rate.

    Rate falls as any Q_j grows, so the optimum sits on the feasibility
    frontier. ``uniform_bisection`` ties all Q_j to one scalar and bisects
    it; ``coordinate_descent`` then shrinks coordinates cyclically, which
    helps asymmetric networks and provably never hurts. Raises Infeasible
    when no quantization works (e.g. powerless relays).
    """
    if mode not in _OPT_MODES:
        raise ValueError(f"mode must be one of {_OPT_MODES}, got {mode!r}")
    table = _ConstraintTable(net, quantifier, override_guard)
    if not table.relays:
        empty = QuantizationVector(entries=())
        return empty, cf_rate(net, empty)
    q_uni = _min_feasible_uniform(table, net, tol)
    q_star = QuantizationVector.uniform(q_uni, table.relays)
    if mode == "coordinate_descent":
        q_star = _coordinate_descent(table, net, q_star, tol)
    return q_star, cf_rate(net, q_star)


def build_rate_report(
    net: NetworkSpec,
    mode: str = "uniform_bisection",
    quantifier: str = "forall",
    tol: float = BISECT_REL_TOL,
    top_k: int = 5,
    override_guard: bool = False,
) -> RateReport:
    """Full analysis: bound, optimized rate, and the tightest constraints."""
    q_star, rate = optimize_quantization(net, mode, quantifier, tol, override_guard)
    bound = source_cut_bound(net)
    _, margins = cf_feasible(net, q_star, quantifier, override_guard)
    binding = tuple(sorted(margins, key=lambda m: m.margin_log2)[: max(top_k, 0)])
    mc_bits, mc = min_cut_bound(net, override_guard)
    return RateReport(
        upper_bound_bits=bound,
        cf_rate_bits=rate,
        q_star=q_star,
        gap_bits=bound - rate,
        binding_constraints=binding,
        min_cut=mc,
        min_cut_bits=mc_bits,
        quantifier=quantifier,
    )


def convergence_sweep(
    net: NetworkSpec,
    gammas: list[float] | tuple[float, ...],
    quantifier: str = "forall",
    tol: float = BISECT_REL_TOL,
    override_guard: bool = False,
) -> tuple[SweepRow, ...]:
    """Bound-vs-rate table as relay power is scaled by each gamma.

    The upper bound never involves relay power, so the column is constant;
    the optimized rate climbs toward it. Quantization is optimized in
    uniform mode so the q column is a single scalar per row. Infeasible
    rows are reported, not fatal.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("gamma list is empty")
    if any(b < a for a, b in zip(gammas, gammas[1:])):
        raise ValueError(f"gammas must be sorted ascending, got {gammas}")
    if any(not g >= 1.0 for g in gammas):
        raise ValueError(f"every gamma must be >= 1, got {gammas}")

    bound = source_cut_bound(net)
    rows: list[SweepRow] = []
    for g in gammas:
        net_g = scaled(net, g)
        try:
            q_star, rate = optimize_quantization(
                net_g, "uniform_bisection", quantifier, tol, override_guard
            )
        except Infeasible:
            rows.append(
                SweepRow(
                    gamma=g,
                    upper_bound_bits=bound,
                    cf_rate_bits=math.nan,
                    gap_bits=math.nan,
                    q_uniform=math.nan,
                    feasible=False,
                )
            )
            continue
        gap = bound - rate
        if not gap >= -RATE_TOL_BITS:
            raise VerificationFailure(
                f"rate {rate!r} exceeds bound {bound!r} at gamma={g!r}"
            )
        q_uni = max(q_star.values) if q_star.values else math.nan
        rows.append(
            SweepRow(
                gamma=g,
                upper_bound_bits=bound,
                cf_rate_bits=rate,
                gap_bits=gap,
                q_uniform=q_uni,
                feasible=True,
            )
        )
    return tuple(rows)
