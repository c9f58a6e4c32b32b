"""Numeric line-packing layer: signature matrices, Grams, ETF
certification, Welch bound, Naimark complements, and two-graphs.

Everything here is floating point; the exact layers live upstream.
Tolerances are pinned as module constants.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

SIG_TOL = 1e-12
ETF_TOL = 1e-9
EIG_CLUSTER_RTOL = 1e-6
PSD_TOL = 1e-9
REAL_TOL = 1e-9


class LinesError(ValueError):
    pass


class SignatureAxiomError(LinesError):
    def __init__(self, message: str, cell: Optional[tuple] = None):
        super().__init__(message)
        self.cell = cell


def check_signature(S: np.ndarray, tol: float = SIG_TOL) -> np.ndarray:
    """Validate S1 (zero diagonal), S2 (unimodular off-diagonal), S3 (Hermitian)."""
    S = np.asarray(S, dtype=complex)
    n = S.shape[0]
    if S.shape != (n, n):
        raise SignatureAxiomError("signature matrix must be square")
    for i in range(n):
        if abs(S[i, i]) > tol:
            raise SignatureAxiomError(f"nonzero diagonal at ({i},{i})", cell=(i, i))
    for i in range(n):
        for j in range(n):
            if i != j and abs(abs(S[i, j]) - 1) > tol:
                raise SignatureAxiomError(f"non-unimodular entry at ({i},{j})", cell=(i, j))
            if abs(S[i, j] - S[j, i].conjugate()) > tol:
                raise SignatureAxiomError(f"not Hermitian at ({i},{j})", cell=(i, j))
    return S


@dataclass
class LineGram:
    """Unit-diagonal PSD Gram of n unit vectors spanning dimension d."""

    n: int
    d: int
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, G: np.ndarray, rtol: float = EIG_CLUSTER_RTOL) -> "LineGram":
        G = np.asarray(G, dtype=complex)
        n = G.shape[0]
        w = np.linalg.eigvalsh(G)
        if w[0] < -PSD_TOL * max(1.0, w[-1]):
            raise LinesError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
        if np.max(np.abs(np.diag(G) - 1)) > ETF_TOL:
            raise LinesError("Gram diagonal is not all ones")
        d = int((w > rtol * w[-1]).sum())
        return cls(n, d, G)

    def factor(self) -> np.ndarray:
        """A d x n matrix Phi with Phi* Phi equal to the Gram."""
        w, V = np.linalg.eigh(self.matrix)
        keep = w > EIG_CLUSTER_RTOL * w[-1]
        return (np.sqrt(w[keep])[:, None] * V[:, keep].conj().T)


def gram_from_signature(S: np.ndarray) -> tuple[LineGram, np.ndarray]:
    """Scale by the least eigenvalue: G = -S/lambda_min + I is a unit
    diagonal PSD Gram; returns it with unit-norm factor vectors."""
    S = check_signature(S)
    w = np.linalg.eigvalsh(S)
    lam = w[0]
    if lam >= 0:
        raise LinesError("least eigenvalue must be negative (trace is zero)")
    G = np.eye(S.shape[0]) - S / lam
    gram = LineGram.from_matrix(G)
    return gram, gram.factor()


@dataclass
class ETFCertificate:
    """Numeric report for a candidate equiangular tight frame."""

    n: int
    d: int
    mu: float
    tightness_residual: float
    equiangularity_residual: float
    welch_equality: bool
    real: bool
    degenerate: bool = False

    @property
    def passed(self) -> bool:
        return (
            not self.degenerate
            and self.welch_equality
            and self.tightness_residual < ETF_TOL
            and self.equiangularity_residual < ETF_TOL
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "mu": self.mu,
            "tightness_residual": self.tightness_residual,
            "equiangularity_residual": self.equiangularity_residual,
            "welch_equality": self.welch_equality,
            "real": self.real,
            "degenerate": self.degenerate,
            "passed": self.passed,
        }


def welch_bound(n: int, d: int) -> float:
    return math.sqrt((n - d) / (d * (n - 1)))


def verify_etf(data) -> ETFCertificate:
    """Certify an ETF from either a LineGram or a d x n matrix of columns.

    Residuals: tightness is measured on the Gram as |G^2 - (n/d) G|_max
    (equivalently the frame operator being (n/d) I), equiangularity as
    the spread of off-diagonal moduli.
    """
    if isinstance(data, LineGram):
        gram = data
    elif isinstance(data, np.ndarray) and data.ndim == 2 and data.shape[0] != data.shape[1]:
        Phi = np.asarray(data, dtype=complex)
        norms = np.linalg.norm(Phi, axis=0)
        if np.max(np.abs(norms - 1)) > ETF_TOL:
            raise LinesError("columns must be unit-norm")
        gram = LineGram.from_matrix(Phi.conj().T @ Phi)
    else:
        gram = LineGram.from_matrix(np.asarray(data, dtype=complex))
    n, d, G = gram.n, gram.d, gram.matrix
    off = ~np.eye(n, dtype=bool)
    mods = np.abs(G[off])
    mu = float(np.max(mods)) if n > 1 else 0.0
    equiang = float(np.max(mods) - np.min(mods)) if n > 1 else 0.0
    tight = float(np.max(np.abs(G @ G - (n / d) * G)))
    if n == d:
        return ETFCertificate(n, d, mu, tight, equiang, False, True, degenerate=True)
    welch = welch_bound(n, d)
    welch_eq = abs(mu - welch) < ETF_TOL
    real = False
    if mu > 0 and equiang < ETF_TOL:
        S = (G - np.eye(n)) / mu
        try:
            real = is_real_line_sequence(S)
        except SignatureAxiomError:
            real = False
    return ETFCertificate(n, d, mu, tight, equiang, welch_eq, real)


def min_chordal_distance(gram: LineGram) -> float:
    """Minimum over pairs of sqrt(1 - |<phi_i, phi_j>|^2)."""
    n, G = gram.n, gram.matrix
    best = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            c = min(1.0, abs(G[i, j]) ** 2)
            best = min(best, math.sqrt(1 - c))
    return best


def naimark_complement(gram: LineGram) -> LineGram:
    """The (n-d)-dimensional partner Gram n/(n-d) (I - (d/n) G)."""
    n, d, G = gram.n, gram.d, gram.matrix
    if n == d:
        raise LinesError("no complement when n = d")
    tight = float(np.max(np.abs(G @ G - (n / d) * G)))
    if tight > ETF_TOL:
        raise LinesError(f"input Gram is not tight (residual {tight:.3e})")
    comp = (n / (n - d)) * (np.eye(n) - (d / n) * G)
    out = LineGram.from_matrix(comp)
    if out.d != n - d:
        raise LinesError("complement rank mismatch")
    return out


def normalized_signature(S: np.ndarray) -> np.ndarray:
    """The switching-equivalent signature with first row and column all ones."""
    S = check_signature(S)
    n = S.shape[0]
    d = S[0].conjugate().copy()
    d[0] = 1.0
    return S * (d[None, :] / d[:, None])


def is_real_line_sequence(S: np.ndarray, tol: float = REAL_TOL) -> bool:
    """Real lines iff the normalized signature matrix is real-valued."""
    return bool(np.max(np.abs(normalized_signature(S).imag)) < tol)


@dataclass(frozen=True)
class TwoGraph:
    """A set of 3-subsets of [n] in which every 4-subset holds an even count."""

    n: int
    triples: frozenset

    def __post_init__(self):
        for t in self.triples:
            if len(t) != 3 or not all(0 <= v < self.n for v in t):
                raise LinesError(f"bad triple {sorted(t)}")

    def check_parity(self, exhaustive_cap: int = 30) -> None:
        """Every 4-subset must contain an even number of triples
        (exhaustive for n <= exhaustive_cap)."""
        if self.n > exhaustive_cap:
            return
        for quad in itertools.combinations(range(self.n), 4):
            count = sum(
                1 for t in itertools.combinations(quad, 3) if frozenset(t) in self.triples
            )
            if count % 2:
                raise LinesError(f"4-subset {quad} contains {count} triples")

    def to_json(self) -> dict:
        return {"n": self.n, "triples": sorted(sorted(t) for t in self.triples)}

    @classmethod
    def from_json(cls, data: dict) -> "TwoGraph":
        return cls(int(data["n"]), frozenset(frozenset(t) for t in data["triples"]))


def two_graph_from_lines(S: np.ndarray, tol: float = REAL_TOL) -> TwoGraph:
    """Triples with signature triple product -1 (real lines only).

    Triple products are independent of the choice of representatives, so
    they are read off the signature matrix directly.
    """
    S = check_signature(S)
    if not is_real_line_sequence(S, tol):
        raise LinesError("two-graphs require a real line sequence")
    n = S.shape[0]
    triples = set()
    for i, j, k in itertools.combinations(range(n), 3):
        prod = (S[i, j] * S[j, k] * S[k, i]).real
        if abs(abs(prod) - 1) > 1e-6:
            raise LinesError("triple product is not unimodular")
        if prod < 0:
            triples.add(frozenset((i, j, k)))
    tg = TwoGraph(n, frozenset(triples))
    tg.check_parity()
    return tg


def signature_from_two_graph(tg: TwoGraph) -> np.ndarray:
    """The normalized signature: row/column 0 all ones, S_ij = -1 iff
    {0,i,j} is a triple."""
    tg.check_parity()
    n = tg.n
    S = np.ones((n, n), dtype=complex)
    np.fill_diagonal(S, 0)
    for i in range(1, n):
        for j in range(1, n):
            if i != j and frozenset((0, i, j)) in tg.triples:
                S[i, j] = -1
    return S


def two_graph_regularity(tg: TwoGraph) -> dict:
    """Eigenvalue test: regular iff the signature has two distinct values.

    When regular, ``d`` is the dimension spanned by the associated lines
    under the least-eigenvalue Gram convention, i.e. the multiplicity
    n*(-l2)/(l1 - l2) of the positive eigenvalue (the other multiplicity
    is the Naimark-complement dimension).
    """
    S = signature_from_two_graph(tg)
    w = np.linalg.eigvalsh(S)
    scale = max(1.0, float(np.max(np.abs(w))))
    clusters: list[list[float]] = []
    for val in w:
        if clusters and abs(val - clusters[-1][-1]) < EIG_CLUSTER_RTOL * scale:
            clusters[-1].append(float(val))
        else:
            clusters.append([float(val)])
    values = [float(np.mean(c)) for c in clusters]
    regular = len(values) == 2 and values[0] < 0 < values[1]
    out = {"regular": regular, "eigenvalues": values}
    if regular:
        l2, l1 = values
        out["d"] = tg.n * (-l2) / (l1 - l2)
        out["lambda1"] = l1
        out["lambda2"] = l2
    return out


def triple_transitive_guard(n: int, d: int) -> bool:
    """Whether (n, d) is consistent with a triply transitive symmetry
    group, i.e. d is 1 or n-1."""
    return d in (1, n - 1)
