"""Conic program representation and solver backends.

A :class:`ConeProgram` holds real decision variables, a linear objective and
a list of constraints ``G x + h in C`` where ``C`` is one of the zero cone,
the nonnegative orthant, a second-order cone or a real symmetric PSD cone.
Complex Hermitian linear matrix inequalities are mapped to real ones through
:func:`hermitian_psd_embed` before they reach a backend.

Affine expressions (:class:`Expr`) carry a sparse coefficient matrix over the
real variables and a constant array; complex coefficients are allowed so that
complex beamformers and Hermitian matrices can be written naturally.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Expr",
    "Constraint",
    "ConeProgram",
    "SolveResult",
    "Tolerance",
    "InvalidProgram",
    "hermitian_psd_embed",
    "concat",
    "bmat",
    "solve",
    "register_backend",
    "available_backends",
    "cone_violation",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"
ITERATION_LIMIT = "iteration_limit"

CONES = ("zero", "nonneg", "soc", "psd")


class InvalidProgram(ValueError):
    """Raised for malformed expressions, cones or programs."""


def _absmax(coef):
    return float(abs(coef).max()) if coef.nnz else 0.0


def _pad(coef, n):
    if coef.shape[1] == n:
        return coef
    if coef.shape[1] > n:
        raise InvalidProgram("coefficient matrix wider than requested width")
    return sp.csr_matrix((coef.data, coef.indices, coef.indptr), shape=(coef.shape[0], n))


class Expr:
    """Affine expression ``coef @ x + const`` reshaped to ``shape``.

    ``x`` is the (real) variable vector of the owning program. Arrays are
    flattened in C order, so row ``r`` of ``coef`` is entry ``const.flat[r]``.
    """

    __array_ufunc__ = None

    def __init__(self, coef, const):
        const = np.asarray(const)
        if const.dtype.kind not in "fc":
            const = const.astype(float)
        coef = sp.csr_matrix(coef)
        if coef.shape[0] != const.size:
            raise InvalidProgram("coefficient rows do not match expression size")
        self.coef = coef
        self.const = const

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, width=0):
        value = np.asarray(value)
        return cls(sp.csr_matrix((value.size, width), dtype=value.dtype if value.dtype.kind == "c" else float), value)

    @property
    def shape(self):
        return self.const.shape

    @property
    def size(self):
        return self.const.size

    @property
    def width(self):
        return self.coef.shape[1]

    @property
    def is_complex(self):
        return self.const.dtype.kind == "c" or self.coef.dtype.kind == "c"

    def __repr__(self):
        kind = "complex" if self.is_complex else "real"
        return f"Expr(shape={self.shape}, {kind}, nnz={self.coef.nnz})"

    # -- arithmetic ---------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Expr):
            return other
        return Expr.constant(np.broadcast_to(np.asarray(other), self.shape).copy(), self.width)

    def __add__(self, other):
        other = self._lift(other)
        if other.shape != self.shape:
            if other.size == 1:
                other = other.broadcast(self.shape)
            elif self.size == 1:
                return self.broadcast(other.shape) + other
            else:
                raise InvalidProgram(f"shape mismatch {self.shape} vs {other.shape}")
        n = max(self.width, other.width)
        return Expr(_pad(self.coef, n) + _pad(other.coef, n), self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self.coef, -self.const)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, Expr) or np.ndim(scalar) != 0:
            raise InvalidProgram("expressions may only be scaled by constants")
        return Expr(self.coef * scalar, self.const * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def broadcast(self, shape):
        if self.size != 1:
            raise InvalidProgram("only scalar expressions broadcast")
        m = int(np.prod(shape))
        rows = sp.csr_matrix(np.ones((m, 1)))
        return Expr(rows @ self.coef, np.broadcast_to(self.const.reshape(()), shape).copy())

    # -- structure ----------------------------------------------------
    def __getitem__(self, key):
        idx = np.arange(self.size).reshape(self.shape)[key]
        idx = np.asarray(idx)
        return Expr(self.coef[idx.ravel()], self.const[key].reshape(idx.shape))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Expr(self.coef, self.const.reshape(shape))

    def ravel(self):
        return self.reshape((self.size,))

    @property
    def T(self):
        if self.const.ndim < 2:
            return self
        m, n = self.shape
        perm = np.arange(self.size).reshape(m, n).T.ravel()
        return Expr(self.coef[perm], self.const.T.copy())

    def conj(self):
        return Expr(self.coef.conj(), self.const.conj())

    @property
    def H(self):
        return self.T.conj()

    @property
    def real(self):
        return Expr(sp.csr_matrix(self.coef.real), np.real(self.const).copy())

    @property
    def imag(self):
        return Expr(sp.csr_matrix(self.coef.imag), np.imag(self.const).copy())

    def sum(self):
        ones = sp.csr_matrix(np.ones((1, self.size)))
        return Expr(ones @ self.coef, np.asarray(self.const.sum()))

    def trace(self):
        m, n = self.shape
        if m != n:
            raise InvalidProgram("trace of a non-square expression")
        return self[np.arange(m), np.arange(m)].sum()

    def __matmul__(self, other):
        B = np.asarray(other)
        if self.const.ndim == 1:
            if B.ndim == 1:  # x @ b
                M = sp.csr_matrix(B[None, :])
                return Expr(M @ self.coef, np.asarray(self.const @ B))
            M = sp.csr_matrix(B.T)  # x @ B
            return Expr(M @ self.coef, self.const @ B)
        m, p = self.shape
        if B.ndim == 1:  # X @ b
            M = sp.kron(sp.identity(m, format="csr"), sp.csr_matrix(B[None, :]), format="csr")
            return Expr(M @ self.coef, self.const @ B)
        M = sp.kron(sp.identity(m, format="csr"), sp.csr_matrix(B.T), format="csr")
        return Expr(M @ self.coef, self.const @ B)

    def __rmatmul__(self, other):
        B = np.asarray(other)
        if self.const.ndim == 1:
            if B.ndim == 1:  # b @ x
                M = sp.csr_matrix(B[None, :])
                return Expr(M @ self.coef, np.asarray(B @ self.const))
            return Expr(sp.csr_matrix(B) @ self.coef, B @ self.const)  # B @ x
        p, q = self.shape
        if B.ndim == 1:  # b @ X
            M = sp.kron(sp.csr_matrix(B[None, :]), sp.identity(q, format="csr"), format="csr")
            return Expr(M @ self.coef, B @ self.const)
        M = sp.kron(sp.csr_matrix(B), sp.identity(q, format="csr"), format="csr")
        return Expr(M @ self.coef, B @ self.const)

    def times(self, M):
        """Scalar expression times a constant array ``M`` (e.g. ``lam * I``)."""
        if self.size != 1:
            raise InvalidProgram("times() needs a scalar expression")
        M = np.asarray(M)
        return Expr(sp.csr_matrix(M.reshape(-1, 1)) @ self.coef, M * self.const.reshape(()))

    def congruence(self, A):
        """Return ``A^H X A`` for a square expression ``X`` and constant ``A``."""
        A = np.asarray(A)
        return (A.conj().T @ self) @ A

    # -- evaluation ---------------------------------------------------
    def value(self, x):
        x = np.asarray(x, dtype=float)
        n = self.width
        out = self.coef @ x[:n] if n else np.zeros(self.size, dtype=self.coef.dtype)
        return (out + self.const.ravel()).reshape(self.shape)


def _as_expr(item, width=0):
    if isinstance(item, Expr):
        return item
    return Expr.constant(np.asarray(item), width)


def concat(*items):
    """Flatten and concatenate expressions or constants into one vector."""
    exprs = [_as_expr(it).ravel() for it in items]
    n = max(e.width for e in exprs)
    coef = sp.vstack([_pad(e.coef, n) for e in exprs], format="csr")
    const = np.concatenate([e.const.ravel() for e in exprs])
    return Expr(coef, const)


def bmat(blocks):
    """Assemble a block matrix from a nested list of expressions/constants.

    Scalars are allowed for 1x1 blocks; every block must be 2-D otherwise.
    """
    grid = [[_as_expr(b) for b in row] for row in blocks]
    grid = [[b.reshape(1, 1) if b.const.ndim == 0 else b for b in row] for row in grid]
    heights = [row[0].shape[0] for row in grid]
    widths = [b.shape[1] for b in grid[0]]
    for r, row in enumerate(grid):
        for c, b in enumerate(row):
            if b.shape != (heights[r], widths[c]):
                raise InvalidProgram("inconsistent block shapes in bmat")
    R, C = sum(heights), sum(widths)
    n = max(b.width for row in grid for b in row)
    coefs, targets = [], []
    const = np.zeros((R, C), dtype=complex if any(b.is_complex for row in grid for b in row) else float)
    r0 = 0
    for r, row in enumerate(grid):
        c0 = 0
        for c, b in enumerate(row):
            h, w = b.shape
            ii, jj = np.meshgrid(np.arange(h) + r0, np.arange(w) + c0, indexing="ij")
            targets.append((ii * C + jj).ravel())
            coefs.append(_pad(b.coef, n))
            const[r0:r0 + h, c0:c0 + w] = b.const
            c0 += w
        r0 += heights[r]
    stacked = sp.vstack(coefs, format="csr")
    order = np.concatenate(targets)
    perm = sp.csr_matrix((np.ones(R * C), (order, np.arange(R * C))), shape=(R * C, R * C))
    return Expr(perm @ stacked, const)


def hermitian_psd_embed(H, tol=1e-9):
    """Real symmetric embedding ``[[Re H, -Im H], [Im H, Re H]]``.

    Accepts a constant complex matrix or a complex :class:`Expr`. Each
    eigenvalue of ``H`` appears twice in the embedding, so ``H >= 0`` exactly
    when the embedding is PSD.
    """
    if isinstance(H, Expr):
        m, n = H.shape
        if m != n:
            raise InvalidProgram("Hermitian embedding needs a square expression")
        diff = H - H.H
        if _absmax(diff.coef) > tol or np.abs(diff.const).max(initial=0.0) > tol:
            raise InvalidProgram("expression is not Hermitian")
        re, im = H.real, H.imag
        return bmat([[re, -im], [im, re]])
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidProgram("Hermitian embedding needs a square matrix")
    if np.abs(H - H.conj().T).max(initial=0.0) > tol:
        raise InvalidProgram("matrix is not Hermitian")
    re, im = H.real, H.imag
    return np.block([[re, -im], [im, re]])


@dataclass
class Constraint:
    """``expr in cone``; ``field_dim`` is the dimension as written over C.

    For a complex Hermitian LMI of size d the real PSD block has size 2d and
    ``field_dim`` is d; for a norm cone over complex entries each complex
    entry counts once.
    """

    cone: str
    expr: Expr
    dim: int
    field_dim: int
    tag: str = ""


@dataclass(frozen=True)
class Tolerance:
    feas: float = 1e-8
    gap: float = 1e-8


@dataclass
class SolveResult:
    status: str
    objective: float = float("nan")
    primal: dict = field(default_factory=dict)
    solve_time: float = 0.0
    x: np.ndarray | None = None
    max_violation: float = float("nan")
    backend: str = ""

    @property
    def optimal(self):
        return self.status == OPTIMAL


class ConeProgram:
    """A linear objective over real variables subject to conic constraints."""

    def __init__(self, name=""):
        self.name = name
        self.n_vars = 0
        self.variables: dict[str, Expr] = {}
        self.constraints: list[Constraint] = []
        self.objective: Expr = Expr.constant(0.0)

    # -- variables ----------------------------------------------------
    def _new_columns(self, m):
        start = self.n_vars
        self.n_vars += m
        return start

    def _register(self, name, expr):
        if name in self.variables:
            raise InvalidProgram(f"duplicate variable name {name!r}")
        self.variables[name] = expr
        return expr

    def variable(self, name, shape=()):
        m = int(np.prod(shape))
        start = self._new_columns(m)
        coef = sp.csr_matrix((np.ones(m), (np.arange(m), start + np.arange(m))), shape=(m, self.n_vars))
        return self._register(name, Expr(coef, np.zeros(shape)))

    def complex_vector(self, name, n):
        start = self._new_columns(2 * n)
        rows = np.concatenate([np.arange(n), np.arange(n)])
        cols = start + np.arange(2 * n)
        vals = np.concatenate([np.ones(n), 1j * np.ones(n)])
        coef = sp.csr_matrix((vals, (rows, cols)), shape=(n, self.n_vars))
        return self._register(name, Expr(coef, np.zeros(n, dtype=complex)))

    def hermitian(self, name, n):
        """Hermitian n x n matrix parameterised by n^2 real variables."""
        iu, ju = np.triu_indices(n, 1)
        n_off = iu.size
        start = self._new_columns(n + 2 * n_off)
        diag_cols = start + np.arange(n)
        re_cols = start + n + np.arange(n_off)
        im_cols = start + n + n_off + np.arange(n_off)
        rows = np.concatenate([np.arange(n) * (n + 1), iu * n + ju, iu * n + ju, ju * n + iu, ju * n + iu])
        cols = np.concatenate([diag_cols, re_cols, im_cols, re_cols, im_cols])
        vals = np.concatenate([np.ones(n), np.ones(n_off), 1j * np.ones(n_off), np.ones(n_off), -1j * np.ones(n_off)])
        coef = sp.csr_matrix((vals.astype(complex), (rows, cols)), shape=(n * n, self.n_vars))
        return self._register(name, Expr(coef, np.zeros((n, n), dtype=complex)))

    # -- constraints --------------------------------------------------
    def _real(self, expr, what):
        expr = _as_expr(expr)
        if expr.is_complex:
            if _absmax(expr.coef.imag) > 1e-12 or np.abs(np.imag(expr.const)).max(initial=0.0) > 1e-12:
                raise InvalidProgram(f"{what} constraint needs a real expression")
            expr = expr.real
        return expr

    def add(self, cone, expr, field_dim=None, tag=""):
        if cone not in CONES:
            raise InvalidProgram(f"unknown cone {cone!r}")
        expr = self._real(expr, cone)
        if cone == "psd":
            if expr.const.ndim != 2 or expr.shape[0] != expr.shape[1]:
                raise InvalidProgram("psd constraint needs a square matrix expression")
            d = expr.shape[0]
            asym = expr - expr.T
            if _absmax(asym.coef) > 1e-10 or np.abs(asym.const).max(initial=0.0) > 1e-10:
                raise InvalidProgram("psd constraint expression is not symmetric")
        else:
            expr = expr.ravel()
            d = expr.size
            if cone == "soc" and d < 1:
                raise InvalidProgram("empty second-order cone")
        c = Constraint(cone, expr, d, d if field_dim is None else field_dim, tag)
        self.constraints.append(c)
        return c

    def zero(self, expr, tag=""):
        return self.add("zero", expr, tag=tag)

    def nonneg(self, expr, tag=""):
        return self.add("nonneg", expr, tag=tag)

    def soc(self, t, x, tag=""):
        """``||x|| <= t``; complex entries of ``x`` count once in ``field_dim``."""
        x = _as_expr(x).ravel()
        n_field = x.size + 1
        if x.is_complex:
            x = concat(x.real, x.imag)
        return self.add("soc", concat(t, x), field_dim=n_field, tag=tag)

    def hyperbolic(self, u, v, w, tag=""):
        """``u * v >= w^2`` with ``u, v >= 0`` as ``||(2w, u - v)|| <= u + v``."""
        return self.soc(_as_expr(u) + v, concat(2 * _as_expr(w), _as_expr(u) - v), tag=tag)

    def psd(self, expr, tag=""):
        return self.add("psd", expr, tag=tag)

    def lmi(self, H, tag=""):
        """Complex Hermitian LMI ``H >= 0`` stored through its real embedding."""
        d = H.shape[0]
        return self.add("psd", hermitian_psd_embed(H), field_dim=d, tag=tag)

    def minimize(self, expr):
        expr = self._real(expr, "objective")
        if expr.size != 1:
            raise InvalidProgram("objective must be scalar")
        self.objective = expr.reshape(())

    # -- inspection ---------------------------------------------------
    def census(self):
        """Counter of ``(cone, field_dim)`` over all constraints."""
        return Counter((c.cone, c.field_dim) for c in self.constraints)

    def count(self, cone, tag=None):
        return sum(1 for c in self.constraints if c.cone == cone and (tag is None or c.tag == tag))

    def extract(self, x):
        return {name: e.value(x) for name, e in self.variables.items()}

    def dumps(self):
        """Sparse text dump: one section per cone block, triplets ``row col value``."""
        lines = [f"# cone program {self.name}", f"n_vars {self.n_vars}"]
        obj = _pad(self.objective.coef, self.n_vars).tocoo()
        lines.append(f"objective const {float(np.real(self.objective.const)):.17g}")
        for col, v in zip(obj.col, obj.data):
            lines.append(f"  {col} {float(np.real(v)):.17g}")
        for i, c in enumerate(self.constraints):
            G = _pad(c.expr.coef, self.n_vars).tocoo()
            lines.append(f"[{i}] {c.cone} dim={c.dim} field_dim={c.field_dim} tag={c.tag or '-'}")
            lines.append("  offset " + " ".join(f"{v:.17g}" for v in np.real(c.expr.const).ravel()))
            for r, col, v in zip(G.row, G.col, G.data):
                lines.append(f"  {r} {col} {float(np.real(v)):.17g}")
        return "\n".join(lines) + "\n"


def cone_violation(cone, s):
    """Distance-like violation of a cone element (0 when inside)."""
    s = np.asarray(s, dtype=float)
    if cone == "zero":
        return float(np.abs(s).max(initial=0.0))
    if cone == "nonneg":
        return float(max(0.0, -s.min(initial=0.0)))
    if cone == "soc":
        return float(max(0.0, np.linalg.norm(s.ravel()[1:]) - s.ravel()[0]))
    if cone == "psd":
        S = 0.5 * (s + s.T)
        return float(max(0.0, -np.linalg.eigvalsh(S)[0]))
    raise InvalidProgram(f"unknown cone {cone!r}")


def max_violation(prog, x):
    worst = 0.0
    for c in prog.constraints:
        worst = max(worst, cone_violation(c.cone, c.expr.value(x)))
    return worst


# -- backends ------------------------------------------------------------

def _svec_rows(d):
    """Rows of the d*d matrix, in Clarabel's packed upper-triangle order."""
    rows, scale = [], []
    for j in range(d):
        for i in range(j + 1):
            rows.append(i * d + j)
            scale.append(1.0 if i == j else np.sqrt(2.0))
    return np.array(rows), np.array(scale)


def _clarabel_backend(prog, tol):
    import clarabel

    n = prog.n_vars
    blocks, rhs, cones = [], [], []
    for c in prog.constraints:
        G = _pad(c.expr.coef, n)
        h = np.real(c.expr.const).ravel()
        G = sp.csr_matrix(G.real) if G.dtype.kind == "c" else G
        if c.cone == "psd":
            rows, scale = _svec_rows(c.dim)
            D = sp.diags(scale)
            G = D @ G[rows]
            h = scale * h[rows]
            cones.append(clarabel.PSDTriangleConeT(c.dim))
        elif c.cone == "zero":
            cones.append(clarabel.ZeroConeT(c.dim))
        elif c.cone == "nonneg":
            cones.append(clarabel.NonnegativeConeT(c.dim))
        else:
            cones.append(clarabel.SecondOrderConeT(c.dim))
        blocks.append(-G)
        rhs.append(h)
    A = sp.vstack(blocks, format="csc") if blocks else sp.csc_matrix((0, n))
    b = np.concatenate(rhs) if rhs else np.zeros(0)
    q = np.real(_pad(prog.objective.coef, n).toarray()).ravel()
    P = sp.csc_matrix((n, n))
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_feas = tol.feas
    settings.tol_gap_abs = tol.gap
    settings.tol_gap_rel = tol.gap
    settings.max_iter = 200
    settings.max_threads = 1
    solver = clarabel.DefaultSolver(P, q, A, b, cones, settings)
    sol = solver.solve()
    name = str(sol.status)
    x = np.array(sol.x) if len(sol.x) else None
    if name.endswith("AlmostSolved"):
        status = "almost"
    elif name.endswith("Solved"):
        status = OPTIMAL
    elif "PrimalInfeasible" in name:
        status = INFEASIBLE
    elif "DualInfeasible" in name:
        status = UNBOUNDED
    elif "MaxIterations" in name or "MaxTime" in name:
        status = ITERATION_LIMIT
    else:
        status = NUMERICAL_FAILURE
    return status, x


def _cvxpy_backend(prog, tol, solver="CVXOPT"):
    import cvxpy as cp

    n = prog.n_vars
    x = cp.Variable(n)
    cons = []
    for c in prog.constraints:
        G = sp.csr_matrix(np.real(_pad(c.expr.coef, n).toarray()))
        h = np.real(c.expr.const).ravel()
        s = G @ x + h
        if c.cone == "zero":
            cons.append(s == 0)
        elif c.cone == "nonneg":
            cons.append(s >= 0)
        elif c.cone == "soc":
            cons.append(cp.SOC(s[0], s[1:]))
        else:
            S = cp.reshape(s, (c.dim, c.dim), order="C")
            cons.append(0.5 * (S + S.T) >> 0)
    q = np.real(_pad(prog.objective.coef, n).toarray()).ravel()
    problem = cp.Problem(cp.Minimize(q @ x), cons)
    kwargs = {"abstol": tol.gap, "reltol": tol.gap, "feastol": tol.feas} if solver == "CVXOPT" else {}
    problem.solve(solver=solver, **kwargs)
    st = problem.status
    if st == cp.OPTIMAL:
        return OPTIMAL, np.asarray(x.value)
    if st == cp.OPTIMAL_INACCURATE:
        return "almost", np.asarray(x.value)
    if st in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return INFEASIBLE, None
    if st in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        return UNBOUNDED, None
    return NUMERICAL_FAILURE, None


_BACKENDS: dict[str, Callable] = {
    "clarabel": _clarabel_backend,
    "cvxopt": _cvxpy_backend,
}
DEFAULT_BACKEND = "clarabel"
# designs are re-checked against exact worst-case errors afterwards, so a
# slightly inaccurate interior point is still useful
ALMOST_TOL = 1e-5


def register_backend(name, fn):
    """Register ``fn(prog, tol) -> (status, x)``; ``status`` as in SolveResult."""
    _BACKENDS[name] = fn


def available_backends():
    return sorted(_BACKENDS)


def _validate(prog):
    if not isinstance(prog, ConeProgram):
        raise InvalidProgram("solve expects a ConeProgram")
    for c in prog.constraints:
        if c.expr.width > prog.n_vars:
            raise InvalidProgram("constraint refers to unknown variables")
        if c.cone == "psd" and c.expr.shape != (c.dim, c.dim):
            raise InvalidProgram("psd block dimension mismatch")
        if c.cone != "psd" and c.expr.size != c.dim:
            raise InvalidProgram("cone dimension mismatch")
    if prog.objective.width > prog.n_vars:
        raise InvalidProgram("objective refers to unknown variables")


def solve(prog, tol=None, backend=None):
    """Solve ``prog`` and return a :class:`SolveResult`.

    Backend failures never raise; they come back as ``numerical_failure``.
    A backend answer flagged as only approximately solved is accepted when
    the primal point violates no cone by more than ``ALMOST_TOL``.
    """
    tol = tol or Tolerance()
    _validate(prog)
    name = backend or DEFAULT_BACKEND
    fn = _BACKENDS[name]
    t0 = time.perf_counter()
    try:
        status, x = fn(prog, tol)
    except Exception:  # backend crash is reported, not propagated
        status, x = NUMERICAL_FAILURE, None
    elapsed = time.perf_counter() - t0
    if x is not None and status in (OPTIMAL, "almost"):
        viol = max_violation(prog, x)
        if status == "almost":
            status = OPTIMAL if viol <= ALMOST_TOL else NUMERICAL_FAILURE
        if status == OPTIMAL:
            obj = float(np.real(prog.objective.value(x)))
            return SolveResult(OPTIMAL, obj, prog.extract(x), elapsed, x, viol, name)
    return SolveResult(status, float("nan"), {}, elapsed, None, float("nan"), name)
