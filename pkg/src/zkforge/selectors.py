"""Heuristics that steer inputs and mutations toward likely bugs."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace

from .compiler import CompiledCircuit
from .executor import OUT_OF_RANGE, evaluate_expr, run_prefix
from .field import PrimeField
from .ir import Binary, NonPolynomial, Poly, Slot, expr_slots, to_poly

DEFAULT_BANDS = (0.15, 0.34, 0.50, 0.01)
ARRAY_GUARD_THRESHOLD = 8


# -- skewed sampling ------------------------------------------------------------

class _Intervals:
    """Uniform draws over a union of disjoint closed integer intervals."""

    def __init__(self, intervals):
        self.intervals = sorted(intervals)
        self.starts, self.offsets = [], []
        total = 0
        for lo, hi in self.intervals:
            self.starts.append(lo)
            self.offsets.append(total)
            total += hi - lo + 1
        self.size = total

    def draw(self, rng) -> int:
        r = rng.randrange(self.size)
        i = bisect.bisect_right(self.offsets, r) - 1
        return self.intervals[i][0] + (r - self.offsets[i])

    def __contains__(self, v) -> bool:
        return any(lo <= v <= hi for lo, hi in self.intervals)


def _complement(intervals, lo, hi):
    out, cur = [], lo
    for a, b in sorted(intervals):
        if a > cur:
            out.append((cur, a - 1))
        cur = max(cur, b + 1)
    if cur <= hi:
        out.append((cur, hi))
    return out


class SkewedSampler:
    """Banded distribution: {0,1}, [2,10], [q-100, q-1] and everything else.

    For small moduli the near-top band starts no lower than 2, overlapping
    bands are merged (their masses add), empty bands are dropped and the
    remaining masses are renormalised.
    """

    def __init__(self, field: PrimeField, probabilities=DEFAULT_BANDS):
        q = field.modulus
        self.field = field
        p_bin, p_small, p_top, p_other = probabilities
        named = [
            ("binary", 0, min(1, q - 1), p_bin),
            ("small", 2, min(10, q - 1), p_small),
            ("near-top", max(2, q - 100), q - 1, p_top),
        ]
        named = [b for b in named if b[1] <= b[2]]
        merged: list = []
        for name, lo, hi, p in sorted(named, key=lambda b: b[1]):
            if merged and lo <= merged[-1][2]:
                pname, plo, phi, pp = merged[-1]
                merged[-1] = (f"{pname}+{name}", plo, max(phi, hi), pp + p)
            else:
                merged.append((name, lo, hi, p))
        bands = [(name, _Intervals([(lo, hi)]), p) for name, lo, hi, p in merged]
        rest = _complement([(lo, hi) for _, lo, hi, _ in merged], 0, q - 1)
        if rest:
            bands.append(("other", _Intervals(rest), p_other))
        bands = [b for b in bands if b[2] > 0]
        total = sum(p for _, _, p in bands)
        self.bands = [(name, iv, p / total) for name, iv, p in bands]
        acc, self._cum = 0.0, []
        for _, _, p in self.bands:
            acc += p
            self._cum.append(acc)
        self._cum[-1] = 1.0
        self._fast = []
        for j, (_, iv, p) in enumerate(self.bands):
            single = len(iv.intervals) == 1 and iv.size <= 1 << 32
            width = self._cum[j] - (self._cum[j - 1] if j else 0.0)
            self._fast.append((iv.intervals[0][0] if single else None, width, iv.size, iv))

    def band_names(self) -> list:
        return [name for name, _, _ in self.bands]

    def band_probabilities(self) -> dict:
        return {name: p for name, _, p in self.bands}

    def band_of(self, v: int) -> str:
        for name, iv, _ in self.bands:
            if v in iv:
                return name
        raise ValueError(v)

    def draw(self, rng) -> int:
        r = rng.random()
        i = bisect.bisect_left(self._cum, r)
        if i >= len(self.bands):
            i = len(self.bands) - 1
        lo, width, size, iv = self._fast[i]
        if lo is None:
            return iv.draw(rng)
        # Reuse the position of r inside its band as the offset; exact
        # enough for bands far smaller than the float mantissa.
        off = int((r - (self._cum[i - 1] if i else 0.0)) / width * size)
        return lo + (off if off < size else size - 1)


@dataclass(frozen=True)
class ArrayGuardState:
    count: int = 0
    cap: int | None = None
    min_dim: int | None = None  # None when the circuit declares no arrays
    threshold: int = ARRAY_GUARD_THRESHOLD

    @classmethod
    def for_circuit(cls, circuit: CompiledCircuit, threshold: int = ARRAY_GUARD_THRESHOLD):
        dims = [d for d in circuit.array_dims if d > 0]
        return cls(min_dim=min(dims) if dims else None, threshold=threshold)


def observe_abort(guard: ArrayGuardState, reason) -> ArrayGuardState:
    """Count consecutive out-of-range aborts; any other reason resets."""
    if reason is None:
        return guard
    if reason.kind != OUT_OF_RANGE:
        return guard if guard.count == 0 else replace(guard, count=0)
    count = guard.count + 1
    cap = guard.cap
    if cap is None and guard.min_dim is not None and count >= guard.threshold:
        cap = guard.min_dim
    return replace(guard, count=count, cap=cap)


def sample_input(sampler: SkewedSampler, n, guard: ArrayGuardState | None, rng) -> tuple:
    """Draw ``n`` values (``n`` may also be a layout); uniform over [0, cap]
    once the array guard is active."""
    n = getattr(n, "n_inputs", n)
    if guard is not None and guard.cap is not None:
        cap = min(guard.cap, sampler.field.modulus - 1)
        return tuple(rng.randint(0, cap) for _ in range(n))
    draw = sampler.draw
    return tuple(draw(rng) for _ in range(n))


# -- zero-division solving ---------------------------------------------------------

@dataclass(frozen=True)
class ZeroDivTarget:
    """A numerator or denominator of a division in a weak assignment, as a
    polynomial over input slots."""

    instruction: int
    poly: Poly
    role: str  # "numerator" or "denominator"

    def variables(self) -> list:
        """Inputs in which the polynomial has degree 1 or 2."""
        return sorted(self.poly.slots())


def find_zero_div_targets(circuit: CompiledCircuit) -> list:
    targets = []
    n = circuit.n
    for idx, ins in enumerate(circuit.instructions):
        if ins.kind != "weak":
            continue
        stack = [ins.expr]
        while stack:
            e = stack.pop()
            if isinstance(e, Binary):
                if e.op in ("/", "\\", "%"):
                    for role, side in (("numerator", e.left), ("denominator", e.right)):
                        try:
                            poly = to_poly(side, circuit.field)
                        except NonPolynomial:
                            continue
                        if poly.is_constant() or poly.degree > 2 or any(s >= n for s in poly.slots()):
                            continue
                        targets.append(ZeroDivTarget(idx, poly, role))
                stack += (e.left, e.right)
            else:
                stack.extend(getattr(e, f) for f in ("operand", "cond", "then", "other", "index")
                             if hasattr(e, f))
                stack.extend(getattr(e, "items", ()))
    return targets


def univariate(poly: Poly, var: int, env) -> tuple:
    """Coefficients (a, b, c) of the polynomial in ``var`` after fixing all
    other slots from ``env``."""
    q = poly.modulus
    coeffs = [0, 0, 0]
    for mono, c in poly.terms.items():
        power = 0
        for s in mono:
            if s == var:
                power += 1
            else:
                c = c * env[s] % q
        coeffs[power] += c
    return (coeffs[2] % q, coeffs[1] % q, coeffs[0] % q)


def solve_quadratic(a: int, b: int, c: int, field: PrimeField) -> int | None:
    """A root of a*x^2 + b*x + c over the field, or None."""
    q = field.modulus
    a, b, c = a % q, b % q, c % q
    if q == 2:
        for x in (0, 1):
            if (a * x * x + b * x + c) % 2 == 0:
                return x
        return None
    if a == 0:
        if b == 0:
            return None
        return field.div(field.neg(c), b)
    disc = (b * b - 4 * a * c) % q
    r = field.sqrt(disc)
    if r is None:
        return None
    return field.div((r - b) % q, 2 * a % q)


def solve_zero(target: ZeroDivTarget, coeff_env, field: PrimeField, var: int | None = None) -> int | None:
    """A value for input ``var`` (default: the lowest input the target uses)
    that makes the target vanish, other inputs taken from ``coeff_env``.
    None when there is no root or the polynomial is constant in ``var``."""
    if var is None:
        vars_ = target.variables()
        if not vars_:
            return None
        var = vars_[0]
    a, b, c = univariate(target.poly, var, coeff_env)
    if a == 0 and b == 0:
        return None
    root = solve_quadratic(a, b, c, field)
    if root is not None:
        q = field.modulus
        assert (a * root * root + b * root + c) % q == 0
    return root


# -- hash-check patching ----------------------------------------------------------

@dataclass(frozen=True)
class HashCheckTarget:
    instruction: int
    input_slot: int
    value_expr: object


def find_hash_check_targets(circuit: CompiledCircuit) -> list:
    """``A === B`` checks where A is a main input no earlier instruction reads."""
    n = circuit.n
    read: set = set()
    targets = []
    for idx, ins in enumerate(circuit.instructions):
        if ins.kind == "eq":
            for a, b in ((ins.expr, ins.other), (ins.other, ins.expr)):
                if (isinstance(a, Slot) and a.index < n and a.index not in read
                        and a.index not in expr_slots(b)):
                    targets.append(HashCheckTarget(idx, a.index, b))
                    break
        read |= ins.reads()
    return targets


def patch_hash_check(circuit: CompiledCircuit, x, rng, probability: float, targets=None) -> dict | None:
    """With the given probability, pick a target and return {input slot:
    value of the other side} computed from a partial run on ``x``."""
    if targets is None:
        targets = find_hash_check_targets(circuit)
    if not targets or probability <= 0 or rng.random() >= probability:
        return None
    t = targets[rng.randrange(len(targets))]
    values = run_prefix(circuit, x, t.instruction)
    if values is None:
        return None
    v = evaluate_expr(circuit, t.value_expr, values)
    if v is None:
        return None
    return {t.input_slot: v}
