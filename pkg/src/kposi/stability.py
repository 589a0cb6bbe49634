"""Schur tests, Stein certificates, and k-diagonal stability construction.

A square matrix A is diagonally stable in discrete time when some
positive diagonal D satisfies A^T D A < D (as quadratic forms); it is
k-diagonally stable when the same holds for its k-th multiplicative
compound.  For entrywise-nonnegative Schur matrices the certificate is
constructive: xi = (I-A)^{-1} x and z = (I-A^T)^{-1} y give
D = diag(z_i / xi_i).  The module also provides the principal-minor
necessary conditions that rule diagonal stability out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .compound import mult_compound
from .errors import CapacityError, DomainError, NumericError, PreconditionError
from .matcore import (
    LexIndexSet,
    det_stack,
    as_square,
    as_vector,
    is_positive_definite,
    lex_array,
    lex_index_sets,
    spectral_report,
    zero_tol,
)
from .signreg import MinorWitness

NOT_SIGN_REGULAR = "NOT_SIGN_REGULAR"
COMPOUND_NOT_SCHUR = "COMPOUND_NOT_SCHUR"

CAYLEY_DT = "CAYLEY_DT"
NEGATE_CT = "NEGATE_CT"

# Principal-minor screens sweep all 2^n - 1 subsets; keep n sane.
_SCREEN_DIM_LIMIT = 20


def diag_entries(D, name: str = "D", positive: bool = True) -> np.ndarray:
    """Accept a 1-D diagonal-entry vector or a square diagonal matrix."""
    arr = np.asarray(D, dtype=float)
    if arr.ndim == 2:
        sq = as_square(arr, name)
        off = sq - np.diag(np.diag(sq))
        if np.any(off != 0.0):
            raise PreconditionError(f"{name} must be diagonal")
        arr = np.diag(sq)
    d = as_vector(arr, name)
    if positive and np.any(d <= 0.0):
        raise PreconditionError(f"{name} must have strictly positive diagonal entries")
    return d


class SchurCheck(NamedTuple):
    ok: bool
    spectral_radius: float


def is_schur(A, tol: float | None = None) -> SchurCheck:
    """True iff the spectral radius is below 1 - tol."""
    rho = spectral_report(A).spectral_radius
    return SchurCheck(ok=rho < 1.0 - zero_tol(tol), spectral_radius=rho)


class SteinCheck(NamedTuple):
    ok: bool
    margin: float


def stein_holds(A, D, tol: float | None = None) -> SteinCheck:
    """Whether D - A^T D A is positive definite for positive diagonal D.

    The margin is the smallest eigenvalue of the (symmetrized) difference.
    """
    A = as_square(A)
    d = diag_entries(D)
    if d.size != A.shape[0]:
        raise PreconditionError(
            f"D has {d.size} diagonal entries but A is {A.shape[0]}x{A.shape[0]}"
        )
    gap = np.diag(d) - A.T @ (d[:, None] * A)
    check = is_positive_definite(gap, tol)
    return SteinCheck(ok=check.ok, margin=check.margin)


class DlfConstruction(NamedTuple):
    d: np.ndarray
    xi: np.ndarray
    z: np.ndarray
    stein_margin: float
    sign_flipped: bool


def construct_dlf_nonneg(A, x=None, y=None, tol: float | None = None) -> DlfConstruction:
    """Constructive diagonal Stein certificate for a nonnegative Schur matrix.

    Solves xi = (I-A)^{-1} x and z = (I-A^T)^{-1} y (defaults x = y = 1)
    and returns D = diag(z_i / xi_i).  An entrywise-nonpositive A is
    handled by negating it first, which leaves A^T D A unchanged.  The
    Stein inequality is asserted on the original A before returning.
    """
    A = as_square(A)
    n = A.shape[0]
    t = zero_tol(tol)
    scale = max(1.0, float(np.max(np.abs(A))))
    sign_flipped = False
    M = A
    if np.min(A) < -t * scale:
        if np.max(A) <= t * scale:
            M = -A
            sign_flipped = True
        else:
            raise PreconditionError(
                "matrix has entries of both signs; use certify_k_diag_stability "
                "to certify through a compound of definite sign"
            )
    schur = is_schur(A, tol)
    if not schur.ok:
        raise PreconditionError(
            f"matrix is not Schur (spectral radius {schur.spectral_radius:.6g}); "
            "no diagonal Stein certificate exists"
        )
    x = np.ones(n) if x is None else as_vector(x, "x")
    y = np.ones(n) if y is None else as_vector(y, "y")
    if x.size != n or y.size != n:
        raise DomainError(f"x and y must have dimension {n}")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise PreconditionError("x and y must be strictly positive")
    eye = np.eye(n)
    try:
        xi = np.linalg.solve(eye - M, x)
        z = np.linalg.solve(eye - M.T, y)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"(I - A) solve failed: {exc}") from exc
    if np.any(xi <= 0.0) or np.any(z <= 0.0):
        raise NumericError("construction produced nonpositive xi or z entries")
    d = z / xi
    check = stein_holds(A, d)
    margin = check.margin
    if not check.ok:
        raise NumericError(
            f"constructed D failed the Stein check (margin {margin:.3g})"
        )
    return DlfConstruction(d=d, xi=xi, z=z, stein_margin=margin, sign_flipped=sign_flipped)


@dataclass(frozen=True)
class KDiagCertificate:
    """Diagonal Stein certificate for the k-th compound of a matrix.

    xi and z are the positive vectors with M xi << xi and M^T z << z for
    the (sign-normalized) compound M; xi_gap / z_gap store the worst
    componentwise slack, normalized as gap / (1 + |rhs|).
    """

    k: int
    r: int
    d: np.ndarray
    xi: np.ndarray
    z: np.ndarray
    stein_margin: float
    compound_spectral_radius: float
    sign_flipped: bool
    xi_gap: float
    z_gap: float


@dataclass(frozen=True)
class CertificationFailure:
    """Structured negative verdict from certify_k_diag_stability."""

    k: int
    r: int
    reason: str
    witness: MinorWitness | None = None
    compound_spectral_radius: float | None = None


def certify_k_diag_stability(
    A, k: int, tol: float | None = None, x=None, y=None
) -> KDiagCertificate | CertificationFailure:
    """Build a diagonal Stein certificate for A^(k), or explain why not.

    Pipeline: form M = A^(k); if M is entrywise nonpositive flip its sign
    (recorded on the certificate; the Stein form is unchanged by the
    flip).  M must then be entrywise nonnegative, else the verdict is
    NOT_SIGN_REGULAR with the offending minor.  M must be Schur, else
    COMPOUND_NOT_SCHUR with its spectral radius.  The certificate D, xi,
    z come from the nonnegative construction with defaults x = y = 1.
    """
    A = as_square(A)
    n = A.shape[0]
    if not 1 <= k <= n - 1:
        raise DomainError(f"order k={k} must satisfy 1 <= k <= n-1={n - 1}")
    t = zero_tol(tol)
    M = mult_compound(A, k)
    r = M.shape[0]
    scale = max(1.0, float(np.max(np.abs(M))))
    sign_flipped = False
    if np.max(M) <= t * scale and np.min(M) < -t * scale:
        M = -M
        sign_flipped = True
    if np.min(M) < -t * scale:
        # only reachable without a flip: a flipped compound is nonnegative
        rows = lex_index_sets(k, n)
        i, j = divmod(int(np.argmin(M)), r)
        return CertificationFailure(
            k=k,
            r=r,
            reason=NOT_SIGN_REGULAR,
            witness=MinorWitness(rows=rows[i], cols=rows[j], value=float(M[i, j])),
        )
    rho = spectral_report(M).spectral_radius
    if not rho < 1.0 - t:
        return CertificationFailure(
            k=k, r=r, reason=COMPOUND_NOT_SCHUR, compound_spectral_radius=rho
        )
    built = construct_dlf_nonneg(M, x=x, y=y, tol=tol)
    # Margin reported against the original compound; the flip leaves
    # M^T D M invariant so the value is identical either way.
    xi_image = M @ built.xi
    z_image = M.T @ built.z
    xi_gap = float(np.min((built.xi - xi_image) / (1.0 + np.abs(built.xi))))
    z_gap = float(np.min((built.z - z_image) / (1.0 + np.abs(built.z))))
    return KDiagCertificate(
        k=k,
        r=r,
        d=built.d,
        xi=built.xi,
        z=built.z,
        stein_margin=built.stein_margin,
        compound_spectral_radius=rho,
        sign_flipped=sign_flipped,
        xi_gap=xi_gap,
        z_gap=z_gap,
    )


def dlf_compound(P, k: int) -> np.ndarray:
    """Diagonal entries of the k-th compound of a positive diagonal matrix.

    Entry s is the product of the p_i over the s-th lexicographic k-subset.
    """
    p = diag_entries(P, "P")
    n = p.size
    sets = lex_array(k, n)
    return np.prod(p[sets], axis=1)


def solve_top_compound_diagonal(D) -> np.ndarray:
    """Positive diagonal P with P^(n-1) = D, solved in closed form.

    The s-th lexicographic (n-1)-subset omits exactly one index j(s), and
    log p_s = (sum_q log d_q)/(n-1) - log d_{j(s)}.  Computed in the log
    domain to tolerate extreme entry ranges; the round trip is asserted
    to 1e-10 relative error before returning.
    """
    d = diag_entries(D, "D")
    n = d.size
    if n < 2:
        raise PreconditionError("need n >= 2 to invert the top-order compound")
    logd = np.log(d)
    # lex (n-1)-subsets omit indices n, n-1, ..., 1 in that order
    missing = (n - 1) - np.arange(n)
    p = np.exp(logd.sum() / (n - 1) - logd[missing])
    recon = dlf_compound(p, n - 1)
    rel = float(np.max(np.abs(recon - d) / d))
    if rel > 1e-10:
        raise NumericError(f"compound round-trip error {rel:.3g} exceeds 1e-10")
    return p


def cayley(A, tol: float | None = None) -> np.ndarray:
    """The transform B = -(A + I)(A - I)^{-1}.

    Bridges the Stein and Lyapunov inequality necessary conditions; A must
    not have 1 as an eigenvalue.
    """
    A = as_square(A)
    n = A.shape[0]
    eye = np.eye(n)
    M = A - eye
    scale = max(1.0, float(np.max(np.abs(M)))) ** n
    if abs(float(np.linalg.det(M))) <= zero_tol(tol) * scale:
        raise DomainError("A - I is singular (1 is an eigenvalue); transform undefined")
    return np.linalg.solve(M.T, -(A + eye).T).T


@dataclass(frozen=True)
class NecessaryConditionReport:
    passed: bool
    failing_minor: tuple[LexIndexSet, float] | None
    transform_used: str


def _principal_minor_screen(B: np.ndarray, tol: float):
    n = B.shape[0]
    if n > _SCREEN_DIM_LIMIT:
        raise CapacityError(
            f"principal-minor screen sweeps 2^{n} subsets; refusing n > {_SCREEN_DIM_LIMIT}"
        )
    for k in range(1, n + 1):
        sets = lex_array(k, n)
        stack = B[sets[:, :, None], sets[:, None, :]]
        values = det_stack(np.ascontiguousarray(stack))
        bad = np.nonzero(~(values > tol))[0]
        if bad.size:
            i = int(bad[0])
            kappa = LexIndexSet(n, tuple(int(q) + 1 for q in sets[i]))
            return False, (kappa, float(values[i]))
    return True, None


def necessary_dt_diag(A, tol: float = 0.0) -> NecessaryConditionReport:
    """Necessary screen for discrete-time diagonal stability.

    If some positive diagonal D satisfies A^T D A < D, then every
    principal minor of -(A + I)(A - I)^{-1} is positive.  Reports the
    first failing minor in (order, lexicographic) scan order.
    """
    B = cayley(A)
    passed, failing = _principal_minor_screen(B, tol)
    return NecessaryConditionReport(passed=passed, failing_minor=failing, transform_used=CAYLEY_DT)


def necessary_ct_diag(A, tol: float = 0.0) -> NecessaryConditionReport:
    """Necessary screen for continuous-time diagonal stability.

    If some positive diagonal D satisfies D A + A^T D < 0, then every
    principal minor of -A is positive.
    """
    A = as_square(A)
    passed, failing = _principal_minor_screen(-A, tol)
    return NecessaryConditionReport(passed=passed, failing_minor=failing, transform_used=NEGATE_CT)
