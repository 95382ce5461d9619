"""Square-root machinery on the block algebra.

A nonzero intertwiner (a x = x b) embeds into a block upper-triangular square
root of the diagonal embedding of (a^2, b^2) that is similar to the embedding
of (a, -b); conversely every such nonprimary root exposes an intertwiner in
its similarity matrix.  The same mechanics solve the quadratic block equation
Y B Y = T for B, T the companion-coupled embeddings built from the problem
data; unipotent solutions [[I, q], [0, I]] certify solvability of the
original equation through q b - a q = r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchCutError, GateError, PreconditionError
from .blockalg import (BlockMatrix, block_inverse, block_mul,
                       commutes_with_diag_pair, diag_embed)
from .gate import spectra_intersect, default_intersection_tolerance
from .numerics import (RANK_CUTOFF_FACTOR, as_complex_matrix, eigenvalues, frob,
                       principal_sqrt, unvec)
from .oracle import oracle_solve
from .regular import companion_solve_direct, compute_offset
from .singular import DEFAULT_TOL, SylvesterProblem

UNIPOTENT_TOL = 1e-7


@dataclass
class RootCandidate:
    """A candidate square root of the (a^2, b^2) diagonal embedding."""

    root: BlockMatrix
    is_square_root: bool
    is_primary: bool
    similarity: BlockMatrix | None  # U with U^-1 (a, -b)-embedding U = root
    residuals: dict = field(default_factory=dict)


@dataclass
class QuadraticSolveResult:
    """Solutions of the quadratic block equation Y base Y = target."""

    base: BlockMatrix
    target: BlockMatrix
    base_coupler: np.ndarray    # e with a e + e b = -s
    target_coupler: np.ndarray  # e with a e + e b = -s - r
    base_roots: list
    y_solutions: list
    q_values: list
    notes: list = field(default_factory=list)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0:
        return v
    idx = np.argmax(np.abs(v) > 1e-12 * norm)
    pivot = v[idx]
    if pivot == 0:
        return v
    return v * (abs(pivot) / pivot)


def homogeneous_nullspaces(p: SylvesterProblem):
    """Orthonormal bases for the solution spaces of a x = x b (n x m side)
    and b y = y a (m x n side), ordered deterministically."""
    a, b = p.a, p.b
    n, m = p.n, p.m
    k_hom = np.kron(np.eye(m), a) - np.kron(b.T, np.eye(n))
    k_adj = np.kron(np.eye(n), b) - np.kron(a.T, np.eye(m))

    def nullspace(K, rows, cols):
        _, s, Vh = np.linalg.svd(K)
        sigma_max = float(s[0]) if s.size else 0.0
        cutoff = RANK_CUTOFF_FACTOR * max(K.shape) * sigma_max
        rank = int(np.sum(s > cutoff))
        vectors = [_phase_fix(Vh[i].conj()) for i in range(rank, K.shape[1])]
        return [unvec(v, rows, cols) for v in vectors]

    return nullspace(k_hom, n, m), nullspace(k_adj, m, n)


def _check_intertwiner(a, b, x, side: str, tol: float) -> None:
    if side == "upper":
        residual = frob(a @ x - x @ b)
    else:
        residual = frob(b @ x - x @ a)
    scale = (frob(a) + frob(b)) * frob(x) + 1e-300
    if residual > tol * scale:
        raise PreconditionError(
            f"{side}-side intertwining residual {residual:.3g} exceeds {tol:.1g} * {scale:.3g}")


def similarity_root_from_intertwiner(p: SylvesterProblem, x, side: str = "upper",
                                     tol: float = DEFAULT_TOL) -> RootCandidate:
    """Embed a verified intertwiner into a square root of the (a^2, b^2)
    embedding, together with the similarity that conjugates the (a, -b)
    embedding into it.

    For the upper side the root is [[a, x], [0, -b]] and the similarity is
    [[I, t], [0, I]] where t solves a t + t b = x; the lower side mirrors it.
    A nonzero intertwiner yields a nonprimary root.
    """
    a, b = p.a, p.b
    x = as_complex_matrix(x, "x")
    if side not in ("upper", "lower"):
        raise PreconditionError(f"side must be 'upper' or 'lower', got {side!r}")
    expected = (p.n, p.m) if side == "upper" else (p.m, p.n)
    if x.shape != expected:
        raise PreconditionError(f"{side}-side intertwiner must be {expected[0]}x{expected[1]}")
    _check_intertwiner(a, b, x, side, tol)

    d_minus = diag_embed(a, -b)
    d_square = diag_embed(a @ a, b @ b)
    if side == "upper":
        coupled = companion_solve_direct(a, b, x, check_gate=False).solution
        root = BlockMatrix.upper(a, x, -b)
        similarity = BlockMatrix.upper(np.eye(p.n), coupled, np.eye(p.m))
    else:
        coupled = companion_solve_direct(b, a, x, check_gate=False).solution
        root = BlockMatrix.lower(a, x, -b)
        similarity = BlockMatrix.lower(np.eye(p.n), -coupled, np.eye(p.m))

    square_residual = (block_mul(root, root) - d_square).norm()
    conjugated = block_mul(block_mul(block_inverse(similarity), d_minus), similarity)
    similarity_residual = (conjugated - root).norm()
    scale = max(d_square.norm(), 1e-300)
    is_root = square_residual <= tol * scale
    is_primary = frob(x) <= tol * max(root.norm(), 1e-300)
    return RootCandidate(
        root=root,
        is_square_root=is_root,
        is_primary=is_primary,
        similarity=similarity,
        residuals={"square": square_residual, "similarity": similarity_residual},
    )


def homogeneous_equivalence(p: SylvesterProblem, tol: float = DEFAULT_TOL):
    """Evaluate the three equivalent statements for the homogeneous equation:

    (a) a nonzero intertwiner exists,
    (b) a nonprimary square root of the (a^2, b^2) embedding similar to the
        (a, -b) embedding can be constructed from it,
    (c) a non-block-diagonal member of the triangular commutant commutes with
        the (a, b) embedding.

    Requires intersecting spectra in the open right half-plane.
    """
    sa = eigenvalues(p.a)
    sb = eigenvalues(p.b)
    if min(sa.min_real_part, sb.min_real_part) <= 0:
        raise GateError("spectra must lie in the open right half-plane")
    itol = default_intersection_tolerance(p.a, p.b)
    if not spectra_intersect(sa, sb, itol):
        raise PreconditionError("spectra do not intersect; the equation is regular")

    x_basis, _ = homogeneous_nullspaces(p)
    a_holds = len(x_basis) > 0
    if not a_holds:
        return False, False, False

    x = x_basis[0]
    candidate = similarity_root_from_intertwiner(p, x, "upper", tol)
    b_holds = (candidate.is_square_root and not candidate.is_primary
               and candidate.residuals["similarity"] <= tol * max(candidate.root.norm(), 1.0))

    commutant = BlockMatrix.upper(np.eye(p.n), x, np.eye(p.m))
    c_holds = commutes_with_diag_pair(commutant, p.a, p.b, tol)
    return a_holds, b_holds, c_holds


def _couplers(p: SylvesterProblem, companion: np.ndarray, offset: np.ndarray):
    e1 = companion_solve_direct(p.a, p.b, -companion, check_gate=False).solution
    e2 = companion_solve_direct(p.a, p.b, -(companion + offset), check_gate=False).solution
    return e1, e2


def block_roots(p: SylvesterProblem, companion=None, tol: float = DEFAULT_TOL):
    """The four sign-branch square roots of the base matrix
    [[a, -s], [0, -b]], each verified to square back to it.

    Every branch is the coupling conjugation of the diagonal
    ((-1)^k1 sqrt(a), (-1)^k2 i sqrt(b)), enumerated in (k1, k2) order.
    """
    a, b = p.a, p.b
    if companion is None:
        companion = companion_solve_direct(a, b, p.c, check_gate=False).solution
    else:
        companion = as_complex_matrix(companion, "companion")
    e1 = companion_solve_direct(a, b, -companion, check_gate=False).solution
    base = BlockMatrix.upper(a, -companion, -b)

    sqrt_a = principal_sqrt(a)
    sqrt_b = principal_sqrt(b)
    left = BlockMatrix.upper(np.eye(p.n), -e1, np.eye(p.m))
    right = BlockMatrix.upper(np.eye(p.n), e1, np.eye(p.m))

    roots = []
    for k1 in (0, 1):
        for k2 in (0, 1):
            inner = diag_embed(((-1) ** k1) * sqrt_a, ((-1) ** k2) * 1j * sqrt_b)
            root = block_mul(block_mul(left, inner), right)
            residual = (block_mul(root, root) - base).norm()
            if residual > tol * max(base.norm(), 1.0):
                raise PreconditionError(
                    f"branch ({k1},{k2}) failed to square to the base matrix "
                    f"(residual {residual:.3g})")
            roots.append(root)
    return roots


def _blockwise_principal_root(P: BlockMatrix):
    """Principal square root of a block upper-triangular P, computed blockwise
    so the result stays exactly upper-triangular."""
    z11 = principal_sqrt(P.a11)
    z22 = principal_sqrt(P.a22)
    z12 = companion_solve_direct(z11, z22, P.a12, check_gate=False).solution
    return BlockMatrix.upper(z11, z12, z22)


def solve_unipotent_quadratic(p: SylvesterProblem, companion=None, offset=None,
                              tol: float = DEFAULT_TOL,
                              unipotent_tol: float = UNIPOTENT_TOL) -> QuadraticSolveResult:
    """Solve Y base Y = target over the enumerated root family and extract
    the unipotent solutions.

    For each branch root R of the base matrix, candidates Z for the square
    root of P = R target R are the blockwise principal root, its negative,
    and the four diagonal-sign variants [[d1, d1 s - s d2], [0, d2]] with
    d1 in {a, -a}, d2 in {b, -b}, available when the singular coupling
    equation a^2 s - s b^2 = P_12 is consistent.  Absence of a unipotent
    solution here means none exists in the enumerated family; the (u, v)
    system remains the authoritative verdict.
    """
    a, b = p.a, p.b
    if companion is None:
        companion = companion_solve_direct(a, b, p.c, check_gate=False).solution
    else:
        companion = as_complex_matrix(companion, "companion")
    if offset is None:
        offset = compute_offset(a, b, companion)
    else:
        offset = as_complex_matrix(offset, "offset")

    e1, e2 = _couplers(p, companion, offset)
    base = BlockMatrix.upper(a, -companion, -b)
    target = BlockMatrix.upper(a, -(companion + offset), -b)
    roots = block_roots(p, companion, tol)

    notes: list = []
    y_solutions: list = []
    q_values: list = []
    a2 = a @ a
    b2 = b @ b

    for index, root in enumerate(roots):
        root_inv = block_inverse(root)
        P = block_mul(block_mul(root, target), root)

        candidates = []
        try:
            principal = _blockwise_principal_root(P)
            candidates.append(principal)
            candidates.append(-principal)
        except BranchCutError as exc:
            notes.append(f"branch {index}: principal root skipped ({exc})")

        coupling = oracle_solve("sylvester", a2, b2, P.a12, tol=tol)
        if coupling.consistent:
            s = coupling.solution
            for d1 in (a, -a):
                for d2 in (b, -b):
                    candidates.append(BlockMatrix.upper(d1, d1 @ s - s @ d2, d2))
        else:
            notes.append(f"branch {index}: coupling equation inconsistent "
                         f"(residual {coupling.residual:.3g})")

        for z in candidates:
            y = block_mul(block_mul(root_inv, z), root_inv)
            residual = (block_mul(block_mul(y, base), y) - target).norm()
            scale = base.norm() * (1.0 + y.norm()) ** 2 + target.norm()
            if residual > tol * scale:
                continue
            if any((y - seen).norm() <= 1e-8 * (1.0 + y.norm()) for seen in y_solutions):
                continue
            y_solutions.append(y)
            if (frob(y.a11 - np.eye(p.n)) <= unipotent_tol * np.sqrt(p.n)
                    and frob(y.a22 - np.eye(p.m)) <= unipotent_tol * np.sqrt(p.m)
                    and frob(y.a21) <= unipotent_tol * np.sqrt(p.n * p.m) * (1.0 + y.norm())):
                q_values.append(y.a12)

    return QuadraticSolveResult(base=base, target=target, base_coupler=e1,
                                target_coupler=e2, base_roots=roots,
                                y_solutions=y_solutions, q_values=q_values,
                                notes=notes)


def verify_unipotent_identity(q, p: SylvesterProblem, companion=None, offset=None,
                              tol: float = DEFAULT_TOL) -> bool:
    """Check that [[I, q], [0, I]] conjugates the base matrix into the target,
    in both its block form and the reduced form q b - a q = r; the two
    residuals must agree."""
    a, b = p.a, p.b
    q = as_complex_matrix(q, "q")
    if companion is None:
        companion = companion_solve_direct(a, b, p.c, check_gate=False).solution
    if offset is None:
        offset = compute_offset(a, b, companion)
    base = BlockMatrix.upper(a, -companion, -b)
    target = BlockMatrix.upper(a, -(companion + offset), -b)
    y = BlockMatrix.upper(np.eye(p.n), q, np.eye(p.m))
    block_residual = (block_mul(block_mul(y, base), y) - target).norm()
    reduced_residual = frob(q @ b - a @ q - offset)
    scale = frob(offset) + (frob(a) + frob(b)) * frob(q) + 1e-300
    if abs(block_residual - reduced_residual) > 1e-9 * scale + 1e-12:
        raise PreconditionError(
            "block and reduced residuals disagree; inconsistent evaluation")
    return reduced_residual <= tol * scale
