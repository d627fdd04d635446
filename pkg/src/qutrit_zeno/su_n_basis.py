"""Generalized Gell-Mann generators and Bloch-vector <-> density-matrix maps.

Generator order for N levels: for k = 2..N, the pairs (u_jk, v_jk) for
j = 1..k-1, followed by w_{k-1}.  For N = 3 this is

    u12, v12, w1, u13, v13, u23, v23, w2

and every coordinate index in the package (x1..x8) refers to that order.

Two coordinate systems are used for a qutrit:

* Bloch coordinates ``x_i = Tr[rho x_i]`` with
  ``rho = I/N + (1/2) sum_i x_i X_i``.
* Flow coordinates, the layout of the explicit qutrit matrix in which the
  shelving equations of motion are written.  They agree with the Bloch
  coordinates for i = 1..7, while the eighth one is half the Bloch value:
  ``rho_33 = 1/3 - 2 y8 / sqrt(3)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ALGEBRA_TOL = 1e-12
POSITIVITY_TOL = 1e-10

SQRT3 = np.sqrt(3.0)


class UnphysicalStateError(ValueError):
    """Raised when coordinates or a matrix do not describe a density matrix."""


class UnphysicalStateWarning(UserWarning):
    pass


def _check_levels(n: int) -> int:
    if int(n) != n or n < 2:
        raise ValueError(f"number of levels must be an integer >= 2, got {n!r}")
    return int(n)


@lru_cache(maxsize=None)
def _generators(n: int) -> np.ndarray:
    mats = []
    for k in range(1, n):
        for j in range(k):
            u = np.zeros((n, n), dtype=complex)
            u[j, k] = u[k, j] = 1.0
            v = np.zeros((n, n), dtype=complex)
            v[j, k] = -1j
            v[k, j] = 1j
            mats += [u, v]
        # w_l with l = k
        l = k
        diag = np.zeros(n)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(diag).astype(complex))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def generators(n: int) -> np.ndarray:
    """Return the N^2 - 1 generators as an array of shape (N^2-1, N, N).

    The returned array is read-only.  For n = 2 it is (X, Y, Z).
    """
    return _generators(_check_levels(n))


def levels_from_dim(num_coords: int) -> int:
    n = int(round(np.sqrt(num_coords + 1)))
    if n * n - 1 != num_coords or n < 2:
        raise ValueError(f"{num_coords} coordinates do not form an SU(N) Bloch vector")
    return n


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(rho).min())


def bloch_to_density(x, n: int | None = None, *, allow_unphysical: bool = False) -> np.ndarray:
    """Density matrix ``I/N + (1/2) sum_i x_i X_i``.

    Raises :class:`UnphysicalStateError` if the result has an eigenvalue below
    ``-1e-10``.  With ``allow_unphysical=True`` such matrices are returned
    with an :class:`UnphysicalStateWarning` instead.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("Bloch vector must be one-dimensional")
    if n is None:
        n = levels_from_dim(x.size)
    n = _check_levels(n)
    if x.size != n * n - 1:
        raise ValueError(f"expected {n * n - 1} coordinates for N={n}, got {x.size}")
    rho = np.eye(n, dtype=complex) / n + 0.5 * np.tensordot(x, generators(n), axes=1)
    lam = min_eigenvalue(rho)
    if lam < -POSITIVITY_TOL:
        msg = f"Bloch vector gives a non-positive matrix (min eigenvalue {lam:.3e})"
        if not allow_unphysical:
            raise UnphysicalStateError(msg)
        warnings.warn(msg, UnphysicalStateWarning, stacklevel=2)
    return rho


def density_to_bloch(rho) -> np.ndarray:
    """Coordinates ``x_i = Tr[rho X_i]`` of a Hermitian matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    n = _check_levels(rho.shape[0])
    if np.abs(rho - rho.conj().T).max() > ALGEBRA_TOL:
        raise ValueError("matrix is not Hermitian")
    return np.real(np.einsum("ij,kji->k", rho, generators(n)))


def validate_density(rho, tol: float = ALGEBRA_TOL) -> None:
    """Raise :class:`UnphysicalStateError` unless ``rho`` is a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho) - 1.0) > tol:
        raise UnphysicalStateError(f"trace {np.trace(rho).real:.15g} != 1")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise UnphysicalStateError("matrix is not Hermitian")
    lam = min_eigenvalue(rho)
    if lam < -POSITIVITY_TOL:
        raise UnphysicalStateError(f"negative eigenvalue {lam:.3e}")
    purity = np.real(np.trace(rho @ rho))
    if purity > 1.0 + tol:
        raise UnphysicalStateError(f"purity {purity:.15g} exceeds 1")


def is_pure(rho, tol: float = ALGEBRA_TOL) -> bool:
    rho = np.asarray(rho)
    return abs(np.real(np.trace(rho @ rho)) - 1.0) <= tol


@dataclass(frozen=True)
class StructureConstants:
    """``[X_i, X_j] = 2i f_ijk X_k`` and ``{X_i, X_j} = (4/N) d_ij I + 2 g_ijk X_k``."""

    n: int
    f: np.ndarray
    g: np.ndarray


@lru_cache(maxsize=None)
def _structure_constants(n: int) -> StructureConstants:
    X = generators(n)
    prod = np.einsum("iab,jbc->ijac", X, X)
    comm = prod - prod.transpose(1, 0, 2, 3)
    anti = prod + prod.transpose(1, 0, 2, 3)
    f = np.real(np.einsum("ijab,kba->ijk", comm, X) / 4j)
    g = np.real(np.einsum("ijab,kba->ijk", anti, X) / 4)
    f.setflags(write=False)
    g.setflags(write=False)
    return StructureConstants(n, f, g)


def structure_constants(n: int) -> StructureConstants:
    """Antisymmetric ``f`` and symmetric ``g`` tensors of the generator set."""
    return _structure_constants(_check_levels(n))


@dataclass(frozen=True)
class BlochLengthCheck:
    ok: bool
    length: float
    bound: float

    def __bool__(self) -> bool:
        return self.ok


def bloch_length_bound(n: int) -> float:
    n = _check_levels(n)
    return float(np.sqrt(2.0 * (n - 1) / n))


def bloch_length_check(x, n: int) -> BlochLengthCheck:
    """Compare ``|x|`` to ``sqrt(2(N-1)/N)``.

    The bound is necessary but, for N >= 3, not sufficient for positivity.
    """
    length = float(np.linalg.norm(np.asarray(x, dtype=float)))
    bound = bloch_length_bound(n)
    return BlochLengthCheck(length <= bound + ALGEBRA_TOL, length, bound)


# ---------------------------------------------------------------------------
# qutrit flow coordinates

def flow_to_bloch(y) -> np.ndarray:
    x = np.array(y, dtype=float)
    if x.shape[-1] != 8:
        raise ValueError("qutrit coordinates have 8 components")
    x[..., 7] *= 2.0
    return x


def bloch_to_flow(x) -> np.ndarray:
    y = np.array(x, dtype=float)
    if y.shape[-1] != 8:
        raise ValueError("qutrit coordinates have 8 components")
    y[..., 7] *= 0.5
    return y


def qutrit_density(y) -> np.ndarray:
    """The explicit 3x3 qutrit matrix written entry by entry in flow coordinates."""
    y1, y2, y3, y4, y5, y6, y7, y8 = np.asarray(y, dtype=float)
    return np.array(
        [
            [1 / 3 + y3 / 2 + y8 / SQRT3, (y1 - 1j * y2) / 2, (y4 - 1j * y5) / 2],
            [(y1 + 1j * y2) / 2, 1 / 3 - y3 / 2 + y8 / SQRT3, (y6 - 1j * y7) / 2],
            [(y4 + 1j * y5) / 2, (y6 + 1j * y7) / 2, 1 / 3 - 2 * y8 / SQRT3],
        ]
    )


def qutrit_flow_coords(rho) -> np.ndarray:
    return bloch_to_flow(density_to_bloch(rho))


# ---------------------------------------------------------------------------
# initial state of the shelving figures

CAPTION_ODD = 0.3
CAPTION_EVEN = 0.5


def canonical_initial_state(odd: float = CAPTION_ODD, even: float = CAPTION_EVEN,
                            x8_rule: str = "completion") -> np.ndarray:
    """Initial coordinates x1=x3=x5=x7=odd, x2=x4=x6=even, plus a completed x8.

    ``x8_rule``:

    * ``"completion"``: ``x8 = sqrt(4/3 - sum x_i^2)``.
    * ``"caption-sum"``: ``x8 = sqrt((4/3)^2 - (sum x_i)^2)``, the literal
      figure-caption form.  Raises ``ValueError`` when the radicand is negative,
      which it is for the default values.
    * ``"caption-squares"``: ``x8 = sqrt((4/3)^2 - sum x_i^2)``.

    The vector is returned as-is and is meant to be read in flow coordinates.
    Positivity is checked and an :class:`UnphysicalStateWarning` is issued
    when the resulting qutrit matrix has a negative eigenvalue (the case for
    the default values).
    """
    x = np.array([odd, even, odd, even, odd, even, odd, 0.0])
    head = x[:7]
    if x8_rule == "completion":
        rad = 4.0 / 3.0 - np.sum(head**2)
    elif x8_rule == "caption-sum":
        rad = (4.0 / 3.0) ** 2 - np.sum(head) ** 2
    elif x8_rule == "caption-squares":
        rad = (4.0 / 3.0) ** 2 - np.sum(head**2)
    else:
        raise ValueError(f"unknown x8 rule {x8_rule!r}")
    if rad < 0:
        raise ValueError(f"x8 rule {x8_rule!r} has a negative radicand ({rad:.6g})")
    x[7] = np.sqrt(rad)
    lam = min_eigenvalue(qutrit_density(x))
    if lam < -POSITIVITY_TOL:
        warnings.warn(
            f"canonical initial state is not positive (min eigenvalue {lam:.4f})",
            UnphysicalStateWarning,
            stacklevel=2,
        )
    return x
