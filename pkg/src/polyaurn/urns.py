"""Urn engine: model specifications, exact dynamics, simulation, enumeration.

The engine covers balanced affine urns whose replacement rule is "the drawn
color reinforces itself by sigma, and in addition a deterministic amount is
added to the last color at schedule-selected steps".  That shape includes the
two-color periodic models (diagonal phase with a triangular refresh step),
their phase-rotated variants needed for node-level laws in growth processes,
the multicolor variant (refresh feeds the last color), and sequence-driven
two-matrix urns (e.g. Thue-Morse).  A separate "branch" kind carries explicit
replacement matrices with negative entries for the branch-size profile urn.

Totals are deterministic for every supported spec, which is what makes the
exact DP over white-draw counts linear in state.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .rng import spawn_generator

__all__ = [
    "UrnSpec",
    "UrnState",
    "Pmf",
    "polya_young",
    "triangular",
    "multicolor_polya_young",
    "sequence_urn",
    "branch_urn",
    "thue_morse_index",
    "total_balls",
    "totals_list",
    "ell_at",
    "immigration_at",
    "apply_draw",
    "draw_color",
    "step",
    "simulate",
    "simulate_white_batch",
    "simulate_counts_batch",
    "exact_pmf_dp",
    "enumerate_histories",
    "spec_to_json",
    "spec_from_json",
]


def _num(x):
    """Numeric coercion: ints/strings become Fractions (exact); floats stay floats."""
    if isinstance(x, bool):
        raise TypeError("bool is not a valid urn parameter")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise TypeError(f"unsupported numeric parameter {x!r}")


def _num_tuple(xs) -> tuple:
    return tuple(_num(x) for x in xs)


def _is_exact(x) -> bool:
    return isinstance(x, Fraction)


def _json_num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


_SEQUENCES: dict[str, Callable[[int], int]] = {}


def thue_morse_index(n: int) -> int:
    """Index b_n in {1,2} of the matrix applied at step n: b_n = t_n + 1 where
    t is the Thue-Morse sequence (t_0 = 0, t_{2n} = t_n, t_{2n+1} = 1 - t_n)."""
    if n < 0:
        raise ValueError("sequence index must be >= 0")
    return (bin(n).count("1") & 1) + 1


_SEQUENCES["thue_morse"] = thue_morse_index


@dataclass(frozen=True)
class UrnSpec:
    """Immutable urn model description.

    kind "py_like": drawn color gains sigma; the last color additionally
    gains ell_at(i) at step i; color 0 may receive a deterministic
    immigration amount per step (white_immigration, periodic).
    kind "branch": explicit replacement matrices; the last color gains
    ell at steps that are multiples of the period.
    """

    kind: str
    family: str
    colors: int
    period: int
    initial: tuple
    sigma: object = None
    phase_ells: tuple | None = None  # ell applied at step i is phase_ells[(i-1) % period]
    sequence_name: str | None = None
    sequence_ells: tuple | None = None
    white_immigration: tuple | None = None  # per-phase additions to color 0
    matrices: tuple | None = None  # branch kind: row tuples
    ell: object | None = None  # canonical parameters for asymptotics
    ell1: object | None = None
    ell2: object | None = None
    offset: int = 0  # refresh applied at steps i = offset (mod period); 0 is the standard phase

    @property
    def is_exact(self) -> bool:
        vals = list(self.initial)
        if self.sigma is not None:
            vals.append(self.sigma)
        for group in (self.phase_ells, self.sequence_ells, self.white_immigration):
            if group is not None:
                vals.extend(group)
        if self.matrices is not None:
            for row in self.matrices:
                vals.extend(row)
        if self.ell is not None:
            vals.append(self.ell)
        return all(_is_exact(v) for v in vals)

    @property
    def total_initial(self):
        return sum(self.initial)

    def validate(self) -> None:
        if self.colors != len(self.initial):
            raise ValueError("initial counts length must equal number of colors")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if self.kind == "py_like":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("sigma must be positive")
            if not self.initial[0] > 0:
                raise ValueError("color 0 must start positive")
            if any(c < 0 for c in self.initial):
                raise ValueError("initial counts must be non-negative")
            groups = self.phase_ells if self.phase_ells is not None else self.sequence_ells
            if groups is None or any(e < 0 for e in groups):
                raise ValueError("schedule additions must be non-negative")
        elif self.kind == "branch":
            if self.matrices is None or len(self.matrices) != self.colors:
                raise ValueError("branch urns need one matrix row per color")
        else:
            raise ValueError(f"unknown urn kind {self.kind!r}")


def polya_young(p: int, sigma, ell, w0, b0, offset: int = 0) -> UrnSpec:
    """Two-color periodic urn: diagonal steps plus an off-diagonal refresh of
    size ell into the black column at steps = offset (mod p)."""
    if p < 1:
        raise ValueError("period must be a positive integer")
    sigma, ell, w0, b0 = _num(sigma), _num(ell), _num(w0), _num(b0)
    phase = [sigma * 0] * p
    phase[(offset - 1) % p] = ell
    spec = UrnSpec(
        kind="py_like", family="polya_young", colors=2, period=p,
        initial=(w0, b0), sigma=sigma, phase_ells=tuple(phase),
        ell=ell, offset=offset % p,
    )
    spec.validate()
    return spec


def triangular(p: int, sigma, ell1, ell2, w0, b0, offset: int = 0) -> UrnSpec:
    """Two-color periodic triangular urn: off-diagonal ell1 at ordinary steps,
    ell2 at steps = offset (mod p)."""
    if p < 1:
        raise ValueError("period must be a positive integer")
    sigma, ell1, ell2, w0, b0 = map(_num, (sigma, ell1, ell2, w0, b0))
    phase = [ell1] * p
    phase[(offset - 1) % p] = ell2
    spec = UrnSpec(
        kind="py_like", family="triangular", colors=2, period=p,
        initial=(w0, b0), sigma=sigma, phase_ells=tuple(phase),
        ell1=ell1, ell2=ell2, offset=offset % p,
    )
    spec.validate()
    return spec


def multicolor_polya_young(p: int, sigma, ell, initial) -> UrnSpec:
    """t-color periodic urn: drawn color gains sigma; the last color gains ell
    at steps that are multiples of p."""
    if p < 1:
        raise ValueError("period must be a positive integer")
    sigma, ell = _num(sigma), _num(ell)
    initial = _num_tuple(initial)
    phase = [sigma * 0] * p
    phase[p - 1] = ell
    spec = UrnSpec(
        kind="py_like", family="multicolor", colors=len(initial), period=p,
        initial=initial, sigma=sigma, phase_ells=tuple(phase), ell=ell,
    )
    spec.validate()
    return spec


def sequence_urn(sequence: str, sigma, ells, w0, b0) -> UrnSpec:
    """Two-color urn driven by a named {1,2}-valued sequence: step i applies
    the matrix with off-diagonal ells[b_i - 1]."""
    if sequence not in _SEQUENCES:
        raise ValueError(f"unknown sequence {sequence!r}; known: {sorted(_SEQUENCES)}")
    sigma, w0, b0 = _num(sigma), _num(w0), _num(b0)
    ells = _num_tuple(ells)
    if len(ells) != 2:
        raise ValueError("sequence urns take exactly two off-diagonal values")
    spec = UrnSpec(
        kind="py_like", family="sequence", colors=2, period=1,
        initial=(w0, b0), sigma=sigma, sequence_name=sequence, sequence_ells=ells,
    )
    spec.validate()
    return spec


def with_white_immigration(spec: UrnSpec, per_phase: Sequence) -> UrnSpec:
    """Attach deterministic per-phase additions to color 0 (applied at every
    step i with amount per_phase[(i-1) % period], after the draw)."""
    if spec.kind != "py_like" or spec.colors != 2:
        raise ValueError("white immigration is defined for two-color py_like specs")
    amounts = _num_tuple(per_phase)
    if len(amounts) != spec.period:
        raise ValueError("need one immigration amount per phase")
    return replace(spec, white_immigration=amounts, family="custom")


def branch_urn(alpha, p: int, ell, max_size: int) -> UrnSpec:
    """Urn tracking the connectivity mass of root branches by size.

    Colors: 0 = root connectivity, m = branches of size m (1 <= m <= max_size,
    connectivity weight m(alpha+1)-1 each), last = everything larger plus all
    other nodes.  Drawing color 0 grows the root degree and creates a size-1
    branch; drawing color m upgrades one size-m branch to size m+1; at steps
    that are multiples of p the last color gains ell (immigration).
    """
    alpha, ell = _num(alpha), _num(ell)
    t = max_size + 2
    one = alpha * 0 + 1
    rows = []
    row0 = [one * 0] * t
    row0[0] = one
    row0[1] = alpha
    rows.append(tuple(row0))
    for m in range(1, max_size + 1):
        row = [one * 0] * t
        row[m] = -(m * (alpha + 1) - 1)
        dest = m + 1 if m < max_size else t - 1
        row[dest] = row[dest] + ((m + 1) * (alpha + 1) - 1)
        rows.append(tuple(row))
    last = [one * 0] * t
    last[t - 1] = one + alpha
    rows.append(tuple(last))
    initial = [ell] + [ell * 0] * (t - 1)
    spec = UrnSpec(
        kind="branch", family="branch", colors=t, period=p,
        initial=tuple(initial), matrices=tuple(rows), ell=ell,
    )
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# per-step schedule resolution and totals


def ell_at(spec: UrnSpec, i: int):
    """Off-diagonal addition applied at step i (1-based)."""
    if i < 1:
        raise ValueError("steps are 1-based")
    if spec.sequence_name is not None:
        return spec.sequence_ells[_SEQUENCES[spec.sequence_name](i) - 1]
    if spec.kind == "branch":
        zero = spec.ell * 0
        return spec.ell if i % spec.period == 0 else zero
    return spec.phase_ells[(i - 1) % spec.period]


def immigration_at(spec: UrnSpec, i: int):
    if spec.white_immigration is None:
        return 0
    return spec.white_immigration[(i - 1) % spec.period]


def _row_sum(spec: UrnSpec, color: int, i: int):
    """Total added to the urn at step i when `color` is drawn (deterministic
    by balance: independent of color for every supported spec)."""
    if spec.kind == "branch":
        return sum(spec.matrices[color]) + ell_at(spec, i)
    return spec.sigma + ell_at(spec, i) + immigration_at(spec, i)


def total_balls(spec: UrnSpec, N: int):
    """Total mass T_N after N steps (T_0 = sum of initial counts)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    total = spec.total_initial
    if spec.kind == "branch":
        base = sum(spec.matrices[0])
        return total + N * base + (N // spec.period) * spec.ell
    if spec.sequence_name is not None:
        extra = sum(ell_at(spec, i) for i in range(1, N + 1))
        return total + N * spec.sigma + extra
    p = spec.period
    n, k = divmod(N, p)
    cycle = sum(spec.phase_ells)
    head = sum(spec.phase_ells[:k])
    total = total + N * spec.sigma + n * cycle + head
    if spec.white_immigration is not None:
        total = total + n * sum(spec.white_immigration) + sum(spec.white_immigration[:k])
    return total


def totals_list(spec: UrnSpec, N: int) -> list:
    """[T_0, T_1, ..., T_{N-1}]: the totals seen by steps 1..N."""
    out = []
    total = spec.total_initial
    for i in range(1, N + 1):
        out.append(total)
        total = total + _row_sum(spec, 0, i)
    return out


# ---------------------------------------------------------------------------
# states, draws, simulation


@dataclass(frozen=True)
class UrnState:
    time: int
    counts: tuple


def draw_color(counts: Sequence, total, u: float) -> int:
    """Color selected by a single uniform u in [0,1): the smallest c with
    cumulative(counts[0..c]) >= u*total, zero-count colors skipped.  Boundary
    values (u*total equal to a cumulative sum) resolve to the lower index.
    The comparison is done in float space."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform draw outside [0,1): {u}")
    x = u * float(total)
    acc = 0.0
    last_nonzero = -1
    for c, w in enumerate(counts):
        wf = float(w)
        if wf < 0:
            raise ValueError(f"negative count for color {c}")
        if wf == 0.0:
            continue
        acc += wf
        last_nonzero = c
        if x <= acc:
            return c
    if last_nonzero < 0:
        raise ValueError("cannot draw from an empty urn")
    return last_nonzero  # u*total landed above acc by rounding


def apply_draw(spec: UrnSpec, counts: Sequence, i: int, color: int) -> tuple:
    """Counts after step i given that `color` was drawn."""
    counts = list(counts)
    if spec.kind == "branch":
        row = spec.matrices[color]
        for c in range(spec.colors):
            counts[c] = counts[c] + row[c]
        counts[-1] = counts[-1] + ell_at(spec, i)
        if any(c < 0 for c in counts):
            raise ValueError(f"urn became untenable at step {i} drawing color {color}")
        return tuple(counts)
    counts[color] = counts[color] + spec.sigma
    counts[-1] = counts[-1] + ell_at(spec, i)
    counts[0] = counts[0] + immigration_at(spec, i)
    return tuple(counts)


def step(spec: UrnSpec, state: UrnState, u: float) -> UrnState:
    i = state.time + 1
    color = draw_color(state.counts, sum(state.counts), u)
    return UrnState(i, apply_draw(spec, state.counts, i, color))


def simulate(spec: UrnSpec, N: int, seed: int, record: bool = False):
    """Single trajectory driven by PCG64(seed); returns the final UrnState, or
    the full list of states when record=True."""
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    state = UrnState(0, tuple(spec.initial))
    states = [state]
    for _ in range(N):
        state = step(spec, state, float(rng.random()))
        if record:
            states.append(state)
    return states if record else state


def simulate_white_batch(
    spec: UrnSpec, checkpoints: Sequence[int], n_reps: int, seed: int
) -> list[np.ndarray]:
    """Vectorized two-color simulation of n_reps independent trajectories.

    Returns the array of white counts at each checkpoint time (ascending).
    Uses the same single-uniform draw rule as `step` (white iff u*T <= W).
    """
    if spec.kind != "py_like" or spec.colors != 2:
        raise ValueError("white-batch simulation needs a two-color py_like spec")
    checkpoints = sorted(set(int(c) for c in checkpoints))
    N = checkpoints[-1]
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    sigma = float(spec.sigma)
    W = np.full(n_reps, float(spec.initial[0]))
    total = float(spec.total_initial)
    out = []
    if checkpoints and checkpoints[0] == 0:
        out.append(W.copy())
        checkpoints = checkpoints[1:]
    pending = list(checkpoints)
    for i in range(1, N + 1):
        u = rng.random(n_reps)
        W += sigma * (u * total <= W)
        imm = immigration_at(spec, i)
        if imm:
            W += float(imm)
        total += float(_row_sum(spec, 0, i))
        if pending and i == pending[0]:
            out.append(W.copy())
            pending.pop(0)
    return out


def simulate_counts_batch(spec: UrnSpec, N: int, n_reps: int, seed: int) -> np.ndarray:
    """Vectorized multicolor simulation; returns counts array (n_reps, colors)."""
    if spec.kind == "py_like":
        rows = None
    else:
        rows = np.array([[float(v) for v in row] for row in spec.matrices])
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    counts = np.tile([float(c) for c in spec.initial], (n_reps, 1))
    total = float(spec.total_initial)
    sigma = float(spec.sigma) if spec.sigma is not None else 0.0
    idx = np.arange(n_reps)
    for i in range(1, N + 1):
        u = rng.random(n_reps)
        x = (u * total)[:, None]
        cum = np.cumsum(counts, axis=1)
        color = (cum < x).sum(axis=1)
        color = np.minimum(color, spec.colors - 1)
        if rows is None:
            counts[idx, color] += sigma
            ell = float(ell_at(spec, i))
            if ell:
                counts[:, -1] += ell
            imm = float(immigration_at(spec, i))
            if imm:
                counts[:, 0] += imm
        else:
            counts += rows[color]
            ell = float(ell_at(spec, i))
            if ell:
                counts[:, -1] += ell
            if counts.min() < -1e-9:
                raise ValueError(f"urn became untenable at step {i}")
        total += float(_row_sum(spec, 0, i))
    return counts


# ---------------------------------------------------------------------------
# exact distributions


@dataclass(frozen=True)
class Pmf:
    """Finite probability mass function with ordered support."""

    support: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support/probs length mismatch")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.probs)

    def check_total(self, tol: float = 1e-12) -> None:
        total = sum(self.probs)
        if self.is_exact:
            if total != 1:
                raise AssertionError(f"exact pmf sums to {total}")
        elif abs(float(total) - 1.0) > tol:
            raise AssertionError(f"pmf sums to {float(total)}")

    def map_support(self, fn) -> "Pmf":
        return Pmf(tuple(fn(x) for x in self.support), self.probs)

    def mean(self):
        return sum(p * x for x, p in zip(self.support, self.probs))

    def moment(self, s: int):
        return sum(p * x**s for x, p in zip(self.support, self.probs))

    def expect(self, fn):
        return sum(p * fn(x) for x, p in zip(self.support, self.probs))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))

    def tv_distance(self, other: "Pmf") -> float:
        mine = self.as_dict()
        theirs = other.as_dict()
        keys = set(mine) | set(theirs)
        return 0.5 * float(sum(abs(float(mine.get(k, 0)) - float(theirs.get(k, 0))) for k in keys))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["value", "probability"])
        for x, p in zip(self.support, self.probs):
            if isinstance(p, Fraction):
                writer.writerow([x, f"{p.numerator}/{p.denominator}"])
            else:
                writer.writerow([x, repr(p)])
        return buf.getvalue()


def empirical_pmf(samples: Iterable) -> Pmf:
    counts: dict = {}
    n = 0
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
        n += 1
    support = sorted(counts)
    return Pmf(tuple(support), tuple(Fraction(counts[s], n) for s in support))


def _resolve_mode(spec: UrnSpec, N: int, mode: str) -> bool:
    """True = exact rational arithmetic."""
    if mode == "exact":
        if not spec.is_exact:
            raise ValueError("exact mode requires rational spec parameters")
        return True
    if mode == "float":
        return False
    if mode == "auto":
        return spec.is_exact and N <= 10_000
    raise ValueError(f"unknown mode {mode!r}")


def exact_pmf_dp(spec: UrnSpec, N: int, mode: str = "auto") -> Pmf:
    """Law of the color-0 count after N steps, by dynamic programming over the
    number of color-0 draws.  Needs deterministic totals and a color-0
    increment of sigma exactly on color-0 draws, which holds for every
    two-color py_like spec (including immigration variants).

    Exact mode keeps all probabilities as Fractions and the result sums to 1
    exactly; float mode is noted on the Pmf by its float probabilities.
    """
    if spec.kind != "py_like" or spec.colors != 2:
        raise ValueError("exact_pmf_dp supports two-color py_like specs")
    exact = _resolve_mode(spec, N, mode)
    one = Fraction(1) if exact else 1.0
    w0 = spec.initial[0] if exact else float(spec.initial[0])
    sigma = spec.sigma if exact else float(spec.sigma)
    probs = [one]
    total = spec.total_initial if exact else float(spec.total_initial)
    imm_acc = w0 * 0
    for i in range(1, N + 1):
        nxt = [one * 0] * (len(probs) + 1)
        for k, pk in enumerate(probs):
            if pk == 0:
                continue
            white = w0 + k * sigma + imm_acc
            pw = white / total
            nxt[k + 1] += pk * pw
            nxt[k] += pk * (1 - pw)
        probs = nxt
        imm = immigration_at(spec, i)
        imm_acc = imm_acc + (imm if exact else float(imm))
        total = total + (_row_sum(spec, 0, i) if exact else float(_row_sum(spec, 0, i)))
    # unreachable counts (e.g. "all draws black" when the black side starts
    # empty) carry probability exactly 0 in both arithmetic modes; drop them
    kept = [(w0 + k * sigma + imm_acc, q) for k, q in enumerate(probs) if q != 0]
    pmf = Pmf(tuple(w for w, _ in kept), tuple(q for _, q in kept))
    pmf.check_total(tol=1e-9)
    return pmf


def enumerate_histories(spec: UrnSpec, N: int, guard: int = 10_000_000) -> Pmf:
    """Joint law of the count vector after N steps by brute-force enumeration
    of all color sequences.  Exact when the spec is; the cost guard rejects
    colors**N above `guard`."""
    if spec.colors**N > guard:
        raise ValueError(f"enumeration of {spec.colors}**{N} histories exceeds guard {guard}")
    exact = spec.is_exact
    one = Fraction(1) if exact else 1.0
    acc: dict[tuple, object] = {}

    def recurse(i: int, counts: tuple, prob):
        if i > N:
            acc[counts] = acc.get(counts, one * 0) + prob
            return
        total = sum(counts)
        for color in range(spec.colors):
            w = counts[color]
            if w == 0:
                continue
            p = (w / total) if exact else float(w) / float(total)
            recurse(i + 1, apply_draw(spec, counts, i, color), prob * p)

    recurse(1, tuple(spec.initial), one)
    support = sorted(acc)
    pmf = Pmf(tuple(support), tuple(acc[s] for s in support))
    pmf.check_total(tol=1e-9)
    return pmf


def marginal_pmf(joint: Pmf, index: int) -> Pmf:
    """Marginal of one coordinate of a tuple-supported Pmf."""
    acc: dict = {}
    for x, p in zip(joint.support, joint.probs):
        key = x[index]
        acc[key] = acc.get(key, p * 0) + p
    support = sorted(acc)
    return Pmf(tuple(support), tuple(acc[s] for s in support))


# ---------------------------------------------------------------------------
# serialization


def spec_to_json(spec: UrnSpec) -> str:
    payload = {
        "kind": spec.kind,
        "family": spec.family,
        "colors": spec.colors,
        "period": spec.period,
        "initial": [_json_num(v) for v in spec.initial],
        "offset": spec.offset,
    }
    if spec.sigma is not None:
        payload["sigma"] = _json_num(spec.sigma)
    if spec.phase_ells is not None:
        payload["phase_ells"] = [_json_num(v) for v in spec.phase_ells]
    if spec.sequence_name is not None:
        payload["sequence"] = spec.sequence_name
        payload["sequence_ells"] = [_json_num(v) for v in spec.sequence_ells]
    if spec.white_immigration is not None:
        payload["white_immigration"] = [_json_num(v) for v in spec.white_immigration]
    if spec.matrices is not None:
        payload["matrices"] = [[_json_num(v) for v in row] for row in spec.matrices]
    for name in ("ell", "ell1", "ell2"):
        v = getattr(spec, name)
        if v is not None:
            payload[name] = _json_num(v)
    return json.dumps(payload, indent=2, sort_keys=True)


def spec_from_json(text: str) -> UrnSpec:
    data = json.loads(text)
    def opt_num(key):
        return _num(data[key]) if key in data else None
    def opt_tuple(key):
        return _num_tuple(data[key]) if key in data else None
    spec = UrnSpec(
        kind=data["kind"],
        family=data["family"],
        colors=int(data["colors"]),
        period=int(data["period"]),
        initial=_num_tuple(data["initial"]),
        sigma=opt_num("sigma"),
        phase_ells=opt_tuple("phase_ells"),
        sequence_name=data.get("sequence"),
        sequence_ells=opt_tuple("sequence_ells"),
        white_immigration=opt_tuple("white_immigration"),
        matrices=tuple(_num_tuple(row) for row in data["matrices"]) if "matrices" in data else None,
        ell=opt_num("ell"),
        ell1=opt_num("ell1"),
        ell2=opt_num("ell2"),
        offset=int(data.get("offset", 0)),
    )
    spec.validate()
    return spec
