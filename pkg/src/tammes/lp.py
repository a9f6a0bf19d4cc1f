"""Dense bounded-variable simplex for the relaxation feasibility tests.

Eliminations are the proof-critical outcome of the pipeline, so every
infeasibility is double-checked: the phase-1 multipliers are turned into
a Farkas certificate and verified arithmetically before Infeasible is
returned.  Anything numerically doubtful becomes NumericalFailure, never
Infeasible.

Box constraints are handled natively (nonbasic variables rest at either
bound); inequality rows get slack columns whose upper bounds come from
interval arithmetic over the box, so the working system is Ax = b with
finite bounds everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"

FEAS_TOL = 1e-9
CERT_GAP = 1e-7
_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 80


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: float = math.nan
    witness: np.ndarray = None     # over the relaxation's own variables
    certificate: np.ndarray = None  # Farkas multipliers, one per row (eq then ub)
    certificate_gap: float = math.nan
    iterations: int = 0


@dataclass(frozen=True)
class TightenOutcome:
    status: str
    iterations: int = 0
    failures: int = 0              # solves that ended in numerical failure
    certificate: np.ndarray = None
    certificate_gap: float = math.nan


def solve(relax, objective, sense="min") -> LpOutcome:
    """Optimize objective (coefficient vector over the relaxation's
    variables) over the relaxation's feasible set."""
    obj = np.asarray(objective, float)
    if obj.shape != (relax.n_vars,):
        raise ValueError(f"objective length {obj.shape} != {relax.n_vars} vars")
    if sense not in ("min", "max"):
        raise ValueError(f"sense {sense!r}")
    if relax.infeasible_box:
        return LpOutcome(status=INFEASIBLE, certificate=np.zeros(0),
                         certificate_gap=math.inf)

    A, b, lo, hi, n = _standardize(relax)
    c = np.concatenate([obj if sense == "min" else -obj,
                        np.zeros(A.shape[1] - n)])
    out = _two_phase(A, b, lo, hi, c)
    if out.status == OPTIMAL:
        x = out.witness[:n]
        if not _witness_ok(relax, x):
            return replace(out, status=NUMERICAL_FAILURE, witness=None)
        val = float(obj @ x)
        return replace(out, value=val, witness=x)
    if out.status == INFEASIBLE:
        y = out.certificate
        gap = _certificate_gap(A, b, lo, hi, y)
        if gap < CERT_GAP:
            return replace(out, status=NUMERICAL_FAILURE, certificate=None)
        return replace(out, certificate_gap=gap)
    return out


def certificate_gap(relax, y) -> float:
    """Farkas margin of y for the relaxation: positive proves that no
    point of the box satisfies the rows.  Recomputed from scratch so a
    stored certificate can be audited independently of the solve."""
    A, b, lo, hi, _ = _standardize(relax)
    return _certificate_gap(A, b, lo, hi, np.asarray(y, float))


def tighten_box(relax):
    """Replace the box with per-variable LP minima/maxima.

    The system is standardized once and the feasibility phase runs once;
    all 2n objective solves then share the warm simplex state, so each
    costs only the phase-2 pivots.  Every new bound is outer-rounded so
    the true extremum stays inside; numerical failures leave that
    variable's bound unchanged and are counted, not raised.
    """
    if relax.infeasible_box:
        return relax, TightenOutcome(status=INFEASIBLE,
                                     certificate=np.zeros(0),
                                     certificate_gap=math.inf)
    A, b, lo_s, hi_s, n = _standardize(relax)
    m, nn = A.shape

    st, status, y = _phase1(A, b, lo_s, hi_s)
    iterations = st.iters
    if status == INFEASIBLE:
        gap = _certificate_gap(A, b, lo_s, hi_s, y)
        if gap >= CERT_GAP:
            return relax, TightenOutcome(
                status=INFEASIBLE, iterations=iterations,
                certificate=y, certificate_gap=gap)
        return relax, TightenOutcome(status=NUMERICAL_FAILURE,
                                     iterations=iterations, failures=1)
    if status != OPTIMAL:
        return relax, TightenOutcome(status=NUMERICAL_FAILURE,
                                     iterations=iterations, failures=1)

    new_lo = relax.lo.copy()
    new_hi = relax.hi.copy()
    failures = 0
    for j in range(n):
        for sense, arr, pick, sign in (("min", new_lo, max, 1.0),
                                       ("max", new_hi, min, -1.0)):
            c = np.zeros(nn + m)
            c[j] = sign
            before = st.iters
            ok = st.run(c)
            iterations += st.iters - before
            good = False
            if ok and not st.unbounded:
                x = st.refreshed_x()[:n]
                if not _witness_ok(relax, x):
                    # drifted inverse: refresh once and re-read
                    if st._refactor():
                        x = st.refreshed_x()[:n]
                if _witness_ok(relax, x):
                    v = float(x[j])
                    pad = FEAS_TOL * (1.0 + abs(v))
                    arr[j] = pick(arr[j], v - pad if sense == "min"
                                  else v + pad)
                    good = True
            if not good:
                failures += 1
                # witness drift alone keeps the basis usable; rebuild only
                # when the run itself broke (cap hit or singular inverse)
                if not ok or st.binv is None:
                    st, status, _ = _phase1(A, b, lo_s, hi_s)
                    iterations += st.iters
                    if status != OPTIMAL:
                        # no usable state left; keep remaining bounds as-is
                        return relax.with_box(new_lo, new_hi), TightenOutcome(
                            status=NUMERICAL_FAILURE, iterations=iterations,
                            failures=failures)
    status = OPTIMAL if failures == 0 else NUMERICAL_FAILURE
    return relax.with_box(new_lo, new_hi), TightenOutcome(
        status=status, iterations=iterations, failures=failures)


# ---------------------------------------------------------------------------
# standard form


def _standardize(relax):
    """Slack out the inequality rows: A x = b with finite boxes."""
    n = relax.n_vars
    m_eq = len(relax.b_eq)
    m_ub = len(relax.b_ub)
    m = m_eq + m_ub
    A = np.zeros((m, n + m_ub))
    b = np.empty(m)
    if m_eq:
        A[:m_eq, :n] = relax.a_eq
        b[:m_eq] = relax.b_eq
    lo = np.concatenate([relax.lo, np.zeros(m_ub)])
    hi = np.concatenate([relax.hi, np.zeros(m_ub)])
    for k in range(m_ub):
        row = relax.a_ub[k]
        A[m_eq + k, :n] = row
        A[m_eq + k, n + k] = 1.0
        b[m_eq + k] = relax.b_ub[k]
        # slack upper bound from the box; a negative value means the row
        # cannot be satisfied, which phase 1 then certifies properly
        span = relax.b_ub[k] - np.sum(np.minimum(row * relax.lo,
                                                 row * relax.hi))
        hi[n + k] = max(0.0, span)
    return A, b, lo, hi, n


def _witness_ok(relax, x, tol=1e-8):
    if np.any(x < relax.lo - tol) or np.any(x > relax.hi + tol):
        return False
    if len(relax.b_eq) and np.max(np.abs(relax.a_eq @ x - relax.b_eq)) > tol:
        return False
    if len(relax.b_ub) and np.max(relax.a_ub @ x - relax.b_ub) > tol:
        return False
    return True


def _certificate_gap(A, b, lo, hi, y):
    if y is None or y.shape != (A.shape[0],):
        return -math.inf
    w = y @ A
    return float(y @ b - np.sum(np.maximum(w * lo, w * hi)))


# ---------------------------------------------------------------------------
# two-phase bounded simplex


def _phase1(A, b, lo, hi):
    """Feasibility phase: drive the artificial column values to zero.

    Returns (state, status, y).  On OPTIMAL the state is ready for
    phase-2 runs (artificials pinned at zero); on INFEASIBLE y carries
    the Farkas multipliers in original row order and sign.
    """
    m, nn = A.shape
    # start every structural variable at the bound nearer zero
    at_upper0 = np.abs(hi) < np.abs(lo)
    x0 = np.where(at_upper0, hi, lo)
    r = b - A @ x0
    flip = np.where(r < 0, -1.0, 1.0)
    Af = np.hstack([A * flip[:, None], np.eye(m)])
    bf = b * flip
    rf = r * flip
    loa = np.concatenate([lo, np.zeros(m)])
    hia = np.concatenate([hi, rf])

    st = _State(Af, bf, loa, hia, list(range(nn, nn + m)),
                np.concatenate([at_upper0, np.zeros(m, bool)]))
    c1 = np.concatenate([np.zeros(nn), np.ones(m)])
    if not st.run(c1):
        return st, NUMERICAL_FAILURE, None
    if st.objective(c1) > FEAS_TOL * (1.0 + abs(bf).max() if m else 1.0):
        y = (c1[st.basis] @ st.binv) * flip
        return st, INFEASIBLE, y
    st.hi[nn:] = 0.0
    st.lo[nn:] = 0.0
    return st, OPTIMAL, None


def _two_phase(A, b, lo, hi, c):
    st, status, y = _phase1(A, b, lo, hi)
    if status == INFEASIBLE:
        return LpOutcome(status=INFEASIBLE, certificate=y, iterations=st.iters)
    if status != OPTIMAL:
        return LpOutcome(status=NUMERICAL_FAILURE, iterations=st.iters)
    c2 = np.concatenate([c, np.zeros(A.shape[0])])
    ok = st.run(c2)
    if not ok:
        return LpOutcome(status=NUMERICAL_FAILURE, iterations=st.iters)
    if st.unbounded:
        return LpOutcome(status=UNBOUNDED, iterations=st.iters)
    x = st.refreshed_x()
    return LpOutcome(status=OPTIMAL, witness=x, value=float(c2 @ x),
                     iterations=st.iters)


class _State:
    """Revised simplex state with an explicit basis inverse."""

    def __init__(self, A, b, lo, hi, basis, at_upper):
        self.A = A
        self.b = b
        self.lo = lo
        self.hi = hi
        self.m, self.n = A.shape
        self.basis = basis
        self.at_upper = at_upper  # meaningful for nonbasic variables only
        self.is_basic = np.zeros(self.n, bool)
        self.is_basic[basis] = True
        self.iters = 0
        self.unbounded = False
        self.binv = None
        self._since_refactor = 0
        self._refactor()

    def _refactor(self):
        try:
            self.binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError:
            self.binv = None
            return False
        self._since_refactor = 0
        return np.isfinite(self.binv).all()

    def _nonbasic_x(self):
        x = np.where(self.at_upper, self.hi, self.lo)
        x[self.is_basic] = 0.0
        return x

    def refreshed_x(self):
        x = self._nonbasic_x()
        xb = self.binv @ (self.b - self.A @ x)
        x[self.basis] = xb
        return x

    def objective(self, c):
        return float(c @ self.refreshed_x())

    def run(self, c, max_iter=None):
        """Pivot until optimal for costs c. True on clean termination
        (optimal or unbounded), False on numerical failure."""
        if self.binv is None:
            return False
        self.unbounded = False
        if max_iter is None:
            max_iter = 50 * (self.m + self.n)
        dantzig_budget = 10 * (self.m + self.n)
        x = self.refreshed_x()
        start = self.iters
        while True:
            if self.iters - start >= max_iter:
                return False
            bland = self.iters - start >= dantzig_budget
            y = c[self.basis] @ self.binv
            red = c - y @ self.A
            red[self.is_basic] = 0.0
            free = self.hi > self.lo
            cand_lo = (~self.is_basic) & (~self.at_upper) & free & (red < -FEAS_TOL)
            cand_up = (~self.is_basic) & self.at_upper & free & (red > FEAS_TOL)
            cand = np.nonzero(cand_lo | cand_up)[0]
            if cand.size == 0:
                return True
            if bland:
                e = int(cand[0])
            else:
                e = int(cand[np.argmax(np.abs(red[cand]))])
            sigma = -1.0 if self.at_upper[e] else 1.0
            w = self.binv @ self.A[:, e]
            t, leave, lands_upper = self._ratio(e, sigma, w, x, bland)
            if t is None:
                # tiny pivots everywhere: refresh and retry once per iter
                if self._since_refactor == 0:
                    return False
                if not self._refactor():
                    return False
                x = self.refreshed_x()
                continue
            if math.isinf(t):
                self.unbounded = True
                return True
            if (leave is not None and abs(w[leave]) < 1e-7
                    and self._since_refactor > 0):
                # unstable pivot on a stale inverse: refresh, redo the pick
                if not self._refactor():
                    return False
                x = self.refreshed_x()
                continue
            self.iters += 1
            x[e] += sigma * t
            x[self.basis] -= sigma * t * w
            if leave is None:
                self.at_upper[e] = not self.at_upper[e]
                x[e] = self.hi[e] if self.at_upper[e] else self.lo[e]
                continue
            out = self.basis[leave]
            self.is_basic[out] = False
            self.at_upper[out] = lands_upper
            x[out] = self.hi[out] if lands_upper else self.lo[out]
            self.basis[leave] = e
            self.is_basic[e] = True
            self._update_binv(leave, w)
            self._since_refactor += 1
            if self._since_refactor >= _REFACTOR_EVERY:
                if not self._refactor():
                    return False
                x = self.refreshed_x()

    def _ratio(self, e, sigma, w, x, bland):
        """Largest step for the entering variable; returns (t, leaving
        basis position or None for a bound flip, lands_upper)."""
        best_t = self.hi[e] - self.lo[e]
        leave = None
        lands_upper = False
        for i in range(self.m):
            delta = -sigma * w[i]
            v = self.basis[i]
            xi = x[v]
            if delta > _PIVOT_TOL:
                ti = (self.hi[v] - xi) / delta
                up = True
            elif delta < -_PIVOT_TOL:
                ti = (xi - self.lo[v]) / (-delta)
                up = False
            else:
                continue
            ti = max(ti, 0.0)
            if ti < best_t - 1e-12 or (
                    leave is not None and abs(ti - best_t) <= 1e-12
                    and (v < self.basis[leave] if bland
                         else abs(w[i]) > abs(w[leave]))):
                best_t = ti
                leave = i
                lands_upper = up
        if leave is not None and abs(w[leave]) < 1e-11:
            return None, None, False
        return best_t, leave, lands_upper

    def _update_binv(self, p, w):
        piv = w[p]
        self.binv[p] /= piv
        rest = np.arange(self.m) != p
        self.binv[rest] -= np.outer(w[rest], self.binv[p])
