"""Classical (Kolmogorovian) embeddability and frame-function checks.

A scenario of ``k`` two-outcome experiments is embeddable when one probability
distribution over the ``2**k`` deterministic outcome assignments reproduces
every stated probability.  Scenarios whose numbers are all exact rationals go
through an exact simplex, so an infeasible verdict carries a Farkas
certificate in exact arithmetic.  Anything containing floats is solved with
HiGHS at tolerance 1e-9.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from ._rng import stream_key
from ._simplex import feasible_point
from .core import UnitVector3

MAX_EXPERIMENTS = 10
TABLE_TOL = 1e-9
LP_TOL = 1e-9


class ScenarioError(ValueError):
    """Malformed or unsupported scenario."""


class InvariantViolation(RuntimeError):
    """A result failed an independent post-check."""


# --- scenarios ---------------------------------------------------------------

@dataclass(frozen=True)
class Experiment:
    name: str
    outcomes: tuple[str, str] = ("+", "-")

    def __post_init__(self):
        if len(self.outcomes) != 2 or self.outcomes[0] == self.outcomes[1]:
            raise ScenarioError(f"experiment {self.name!r} needs two distinct outcomes")


@dataclass(frozen=True)
class Joint:
    """Joint table of experiments ``a`` and ``b``, row-major over (a_out, b_out)."""

    a: str
    b: str
    table: tuple


@dataclass(frozen=True)
class Conditional:
    """P(then_exp = then_out | given_exp = given_out) = p; outcomes are indices."""

    given_exp: str
    given_out: int
    then_exp: str
    then_out: int
    p: object


@dataclass(frozen=True)
class Marginal:
    exp: str
    out: int
    p: object


def _is_exact(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


@dataclass(frozen=True)
class ConditionalScenario:
    experiments: tuple[Experiment, ...]
    joints: tuple[Joint, ...] = ()
    conditionals: tuple[Conditional, ...] = ()
    marginals: tuple[Marginal, ...] = ()

    def __post_init__(self):
        names = [e.name for e in self.experiments]
        if len(set(names)) != len(names):
            raise ScenarioError("duplicate experiment names")
        if not names:
            raise ScenarioError("scenario declares no experiments")
        known = set(names)

        def check_exp(n):
            if n not in known:
                raise ScenarioError(f"undeclared experiment {n!r}")

        def check_p(v):
            if not (_is_exact(v) or isinstance(v, float)) or not 0 <= v <= 1:
                raise ScenarioError(f"probability {v!r} not a number in [0, 1]")

        for j in self.joints:
            check_exp(j.a)
            check_exp(j.b)
            if j.a == j.b:
                raise ScenarioError("joint table needs two different experiments")
            if len(j.table) != 4:
                raise ScenarioError("joint table needs 4 entries")
            for v in j.table:
                check_p(v)
            if abs(float(sum(j.table)) - 1.0) > TABLE_TOL:
                raise ScenarioError(f"joint table {j.a}/{j.b} does not sum to 1")
        for m in self.marginals:
            check_exp(m.exp)
            check_p(m.p)
        for c in self.conditionals:
            check_exp(c.given_exp)
            check_exp(c.then_exp)
            check_p(c.p)
            stated = self.stated_probability(c.given_exp, c.given_out)
            if stated is None:
                raise ScenarioError(
                    f"conditioning event {c.given_exp}={c.given_out} has no stated probability"
                )
            if stated == 0:
                raise ScenarioError(f"conditioning event {c.given_exp}={c.given_out} has probability 0")

    @property
    def k(self) -> int:
        return len(self.experiments)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.experiments]

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def exact(self) -> bool:
        values = [v for j in self.joints for v in j.table]
        values += [c.p for c in self.conditionals] + [m.p for m in self.marginals]
        return all(_is_exact(v) for v in values)

    def stated_probability(self, exp: str, out: int):
        """First stated value of P(exp = out), from marginals or joint tables."""
        for m in self.marginals:
            if m.exp == exp and m.out == out:
                return m.p
        for j in self.joints:
            t = j.table
            if j.a == exp:
                return t[2 * out] + t[2 * out + 1]
            if j.b == exp:
                return t[out] + t[2 + out]
        return None

    def assignments(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=self.k))


@dataclass(frozen=True)
class Facet:
    """Inequality valid for every classical model, violated by the data by ``margin``."""

    name: str
    margin: float
    coefficients: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    witness: dict | None = None
    violated_facet: Facet | None = None
    exact: bool = False


def constraint_system(s: ConditionalScenario):
    """Rows ``(label, coeffs, rhs)`` over assignments in :meth:`assignments` order."""
    lams = s.assignments()
    one = Fraction(1) if s.exact else 1.0
    zero = 0 * one
    rows = [("normalization", [one] * len(lams), one)]
    for j in s.joints:
        ia, ib = s.index(j.a), s.index(j.b)
        for oa, ob in itertools.product((0, 1), repeat=2):
            coeffs = [one if (lam[ia] == oa and lam[ib] == ob) else zero for lam in lams]
            rows.append((f"P({j.a}={oa},{j.b}={ob})", coeffs, j.table[2 * oa + ob]))
    for m in s.marginals:
        i = s.index(m.exp)
        rows.append((f"P({m.exp}={m.out})", [one if lam[i] == m.out else zero for lam in lams], m.p))
    for c in s.conditionals:
        ia, ib = s.index(c.given_exp), s.index(c.then_exp)
        coeffs = []
        for lam in lams:
            given = lam[ia] == c.given_out
            both = given and lam[ib] == c.then_out
            coeffs.append((one if both else zero) - (c.p if given else zero))
        rows.append((f"P({c.then_exp}={c.then_out}|{c.given_exp}={c.given_out})", coeffs, zero))
    return rows


def check_witness(s: ConditionalScenario, witness: dict) -> float:
    """Largest deviation of ``witness`` from any stated probability.

    Evaluates events directly from the assignment labels; shares no code with
    the solver.
    """
    names = s.names
    pts = []
    for key, w in witness.items():
        outs = {n: s.experiments[i].outcomes.index(o) for i, (n, o) in enumerate(zip(names, key))}
        pts.append((outs, float(w)))
    if any(w < -LP_TOL for _, w in pts):
        return math.inf

    def prob(pred):
        return sum(w for outs, w in pts if pred(outs))

    worst = abs(prob(lambda o: True) - 1.0)
    for j in s.joints:
        for oa in (0, 1):
            for ob in (0, 1):
                p = prob(lambda o: o[j.a] == oa and o[j.b] == ob)
                worst = max(worst, abs(p - float(j.table[2 * oa + ob])))
    for m in s.marginals:
        worst = max(worst, abs(prob(lambda o: o[m.exp] == m.out) - float(m.p)))
    for c in s.conditionals:
        pg = prob(lambda o: o[c.given_exp] == c.given_out)
        pb = prob(lambda o: o[c.given_exp] == c.given_out and o[c.then_exp] == c.then_out)
        worst = max(worst, abs(pb - float(c.p) * pg))
    return worst


def kolmogorov_embeddable(s: ConditionalScenario) -> LPResult:
    if s.k > MAX_EXPERIMENTS:
        raise ScenarioError(f"at most {MAX_EXPERIMENTS} experiments supported, got {s.k}")
    rows = constraint_system(s)
    labels = [r[0] for r in rows]
    A = [r[1] for r in rows]
    b = [r[2] for r in rows]
    lams = s.assignments()
    exact = s.exact

    if exact:
        res = feasible_point(A, b)
        x, farkas = res.x, res.farkas
    else:
        x, farkas = _float_feasibility(np.array(A, dtype=float), np.array(b, dtype=float))

    if x is not None:
        witness = {_label(s, lam): w for lam, w in zip(lams, x) if w != 0}
        if check_witness(s, witness) > LP_TOL:
            raise InvariantViolation("LP witness does not reproduce the scenario")
        return LPResult(True, witness, None, exact)

    facet = _chsh_facet(s) or _farkas_facet(labels, farkas, b)
    return LPResult(False, None, facet, exact)


def _label(s: ConditionalScenario, lam) -> tuple[str, ...]:
    return tuple(e.outcomes[o] for e, o in zip(s.experiments, lam))


def _float_feasibility(A: np.ndarray, b: np.ndarray):
    m, n = A.shape
    eye = np.eye(m)
    cost = np.concatenate([np.zeros(n), np.ones(2 * m)])
    res = linprog(cost, A_eq=np.hstack([A, eye, -eye]), b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise InvariantViolation(f"HiGHS failed: {res.message}")
    if res.fun <= LP_TOL:
        x = np.clip(res.x[:n], 0.0, None)
        x /= x.sum()
        return [float(v) for v in x], None
    return None, [-float(y) for y in res.eqlin.marginals]


def _farkas_facet(labels, z, b) -> Facet:
    scale = max(abs(float(v)) for v in z) or 1.0
    coeffs = {lab: float(v) / scale for lab, v in zip(labels, z) if v != 0}
    margin = -float(sum(zi * bi for zi, bi in zip(z, b))) / scale
    return Facet("farkas", margin, coeffs)


def _correlation_from_table(t) -> float:
    t = [float(v) for v in t]
    return t[0] + t[3] - t[1] - t[2]


def _chsh_facet(s: ConditionalScenario) -> Facet | None:
    """Most violated CHSH inequality among 4-cycles of joint tables, if any."""
    corr = {}
    for j in s.joints:
        e = _correlation_from_table(j.table)
        corr[(j.a, j.b)] = e
        corr[(j.b, j.a)] = e
    best = None
    for a0, a1 in itertools.combinations(s.names, 2):
        for b0, b1 in itertools.combinations(s.names, 2):
            if {a0, a1} & {b0, b1}:
                continue
            pairs = [(a0, b0), (a0, b1), (a1, b0), (a1, b1)]
            if not all(p in corr for p in pairs):
                continue
            es = [corr[p] for p in pairs]
            for k, (x, y) in enumerate(pairs):
                val = sum(es) - 2 * es[k]
                if best is None or abs(val) > best[0]:
                    best = (abs(val), f"CHSH[{a0},{a1};{b0},{b1}] minus on E({x},{y})", val)
    if best is None or best[0] <= 2 + LP_TOL:
        return None
    return Facet(best[1], best[0] - 2.0, {"S": best[2]})


# --- JSON schema ---------------------------------------------------------------

def _parse_number(v):
    if isinstance(v, bool):
        raise ScenarioError(f"not a number: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"bad number {v!r}") from exc
    raise ScenarioError(f"not a number: {v!r}")


def scenario_from_dict(d: dict) -> ConditionalScenario:
    """Build a scenario from the JSON layout.

    JSON integers and strings ("1/4", "0.25") are exact; JSON decimals are floats.
    """
    try:
        exps = tuple(Experiment(e["name"], tuple(e.get("outcomes", ("+", "-")))) for e in d["experiments"])
        outs = {e.name: e.outcomes for e in exps}

        def out_index(exp, o):
            if exp not in outs:
                raise ScenarioError(f"undeclared experiment {exp!r}")
            if o not in outs[exp]:
                raise ScenarioError(f"unknown outcome {o!r} of {exp!r}")
            return outs[exp].index(o)

        joints = tuple(
            Joint(j["a"], j["b"], tuple(_parse_number(v) for v in j["table"])) for j in d.get("joints", ())
        )
        conds = tuple(
            Conditional(
                c["given"]["exp"],
                out_index(c["given"]["exp"], c["given"]["outcome"]),
                c["then"]["exp"],
                out_index(c["then"]["exp"], c["then"]["outcome"]),
                _parse_number(c["p"]),
            )
            for c in d.get("conditionals", ())
        )
        margs = tuple(
            Marginal(m["exp"], out_index(m["exp"], m["outcome"]), _parse_number(m["p"]))
            for m in d.get("marginals", ())
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc!r}") from exc
    return ConditionalScenario(exps, joints, conds, margs)


def _dump_number(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def scenario_to_dict(s: ConditionalScenario) -> dict:
    outs = {e.name: e.outcomes for e in s.experiments}
    return {
        "experiments": [{"name": e.name, "outcomes": list(e.outcomes)} for e in s.experiments],
        "joints": [{"a": j.a, "b": j.b, "table": [_dump_number(v) for v in j.table]} for j in s.joints],
        "conditionals": [
            {
                "given": {"exp": c.given_exp, "outcome": outs[c.given_exp][c.given_out]},
                "then": {"exp": c.then_exp, "outcome": outs[c.then_exp][c.then_out]},
                "p": _dump_number(c.p),
            }
            for c in s.conditionals
        ],
        "marginals": [
            {"exp": m.exp, "outcome": outs[m.exp][m.out], "p": _dump_number(m.p)} for m in s.marginals
        ],
    }


def load_scenario(path) -> ConditionalScenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


BUNDLED_DIR = Path(__file__).parent / "scenarios"


def bundled_scenario_path(name: str) -> Path:
    return BUNDLED_DIR / f"{name}.json"


# --- Bell / CHSH ---------------------------------------------------------------

@dataclass(frozen=True)
class BellScenario:
    """Correlations for settings (a, a') on one side and (b, b') on the other."""

    e_ab: float
    e_abp: float
    e_apb: float
    e_apbp: float
    settings: tuple | None = None

    def __post_init__(self):
        for e in self.correlations:
            if not -1.0 <= e <= 1.0:
                raise ValueError(f"correlation {e} outside [-1, 1]")

    @property
    def correlations(self) -> tuple[float, float, float, float]:
        return (self.e_ab, self.e_abp, self.e_apb, self.e_apbp)

    @classmethod
    def from_settings(cls, a, ap, b, bp, correlation=None) -> BellScenario:
        if correlation is None:
            from .hilbert import correlation
        return cls(correlation(a, b), correlation(a, bp), correlation(ap, b), correlation(ap, bp), (a, ap, b, bp))

    def to_conditional_scenario(self) -> ConditionalScenario:
        """Joint tables with uniform marginals: P(x, y) = (1 + xyE)/4 for x, y = +-1."""
        exps = tuple(Experiment(n) for n in ("a", "a'", "b", "b'"))
        pairs = [("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'")]
        joints = []
        for (x, y), e in zip(pairs, self.correlations):
            same = (1.0 + e) / 4.0
            diff = (1.0 - e) / 4.0
            joints.append(Joint(x, y, (same, diff, diff, same)))
        return ConditionalScenario(exps, tuple(joints))


def chsh_score(b: BellScenario) -> float:
    return b.e_ab + b.e_abp + b.e_apb - b.e_apbp


def chsh_variants(b: BellScenario) -> list[float]:
    """The four CHSH expressions (minus sign on each term in turn).

    Together with their negatives these are the eight CHSH combinations.
    """
    es = b.correlations
    total = sum(es)
    return [total - 2.0 * e for e in es]


def max_chsh(b: BellScenario) -> float:
    return max(abs(v) for v in chsh_variants(b))


def fine_consistency(b: BellScenario) -> bool:
    return max_chsh(b) <= 2.0 + 1e-12


# --- frame functions -----------------------------------------------------------

def _vec(u) -> np.ndarray:
    if isinstance(u, UnitVector3):
        return u.as_array()
    return np.asarray(u, dtype=float)


class FrameRule:
    """Transition weight w(u, v) from reference ray u to test ray v."""

    name = "rule"

    def __call__(self, u, v):
        return self.weight(np.einsum("...i,...i->...", _vec(u), _vec(v)))

    def weight(self, overlap):
        raise NotImplementedError


@dataclass(frozen=True)
class BornSquared(FrameRule):
    @property
    def name(self) -> str:
        return "born2"

    def weight(self, overlap):
        return np.square(overlap)


@dataclass(frozen=True)
class AbsPower(FrameRule):
    power: float

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")

    @property
    def name(self) -> str:
        return f"abspow:{self.power:g}"

    def weight(self, overlap):
        return np.minimum(np.abs(overlap), 1.0) ** self.power


@dataclass(frozen=True)
class Mixture(FrameRule):
    rules: tuple
    weights: tuple

    @property
    def name(self) -> str:
        return "mix:" + "+".join(f"{w:g}*{r.name}" for r, w in zip(self.rules, self.weights))

    def weight(self, overlap):
        return sum(w * r.weight(overlap) for r, w in zip(self.rules, self.weights))


def mixture_rule(rules, weights) -> Mixture:
    rules, weights = tuple(rules), tuple(float(w) for w in weights)
    if not rules or len(rules) != len(weights):
        raise ValueError("need one weight per rule")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError("weights must be non-negative and sum to 1")
    return Mixture(rules, weights)


def parse_rule(text: str) -> FrameRule:
    """``born2``, ``abspow:P`` or ``mix:W1*RULE1+W2*RULE2...``."""
    text = text.strip()
    if text == "born2":
        return BornSquared()
    if text.startswith("abspow:"):
        try:
            return AbsPower(float(text.split(":", 1)[1]))
        except ValueError as exc:
            raise ValueError(f"bad rule {text!r}") from exc
    if text.startswith("mix:"):
        rules, weights = [], []
        for term in text[4:].split("+"):
            w, _, r = term.partition("*")
            if not r:
                raise ValueError(f"bad mixture term {term!r}")
            weights.append(float(w))
            rules.append(parse_rule(r))
        return mixture_rule(rules, weights)
    raise ValueError(f"unknown rule {text!r}")


def _check_triad(triad: np.ndarray, tol: float = 1e-10) -> None:
    gram = triad @ triad.T
    if np.max(np.abs(gram - np.eye(3))) > tol:
        raise ValueError("triad is not orthonormal")


def frame_defect(rule: FrameRule, u, triad) -> float:
    t = np.array([_vec(x) for x in triad], dtype=float)
    _check_triad(t)
    return float(abs(np.sum(rule(_vec(u), t)) - 1.0))


def random_rotations(trials: int, seed: int) -> np.ndarray:
    """Uniform rotations from unit quaternions (Shoemake's subgroup method)."""
    d = _kernels.uniforms(stream_key(seed, 0), 0, 3 * trials).reshape(trials, 3)
    u1, u2, u3 = d[:, 0], 2 * np.pi * d[:, 1], 2 * np.pi * d[:, 2]
    a, b = np.sqrt(1 - u1), np.sqrt(u1)
    w, x, y, z = a * np.sin(u2), a * np.cos(u2), b * np.sin(u3), b * np.cos(u3)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
            np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
            np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
        ],
        axis=1,
    )


def random_triads(trials: int, seed: int) -> np.ndarray:
    """``out[t, i]`` is the image of the i-th standard axis under rotation t."""
    return np.swapaxes(random_rotations(trials, seed), 1, 2)


def worst_triad(rule: FrameRule, u, trials: int, seed: int) -> tuple[float, np.ndarray]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    triads = random_triads(trials, seed)
    sums = rule(_vec(u)[None, None, :], triads).sum(axis=1)
    defects = np.abs(sums - 1.0)
    i = int(np.argmax(defects))
    return float(defects[i]), triads[i]


def max_frame_defect(rule: FrameRule, u, trials: int, seed: int) -> float:
    return worst_triad(rule, u, trials, seed)[0]
