"""Wall-style assembly of a total complex from columnwise resolutions.

Given a bounded complex of modules over a finite-dimensional algebra,
together with a free resolution of each term, the builder constructs
connecting maps

    d(k): X[q, j] -> X[q - k, j + k - 1],    0 <= k <= q,

one anti-diagonal at a time, so that for every spot the alternating
composites sum to zero, the summed total differential squares to zero,
and the total complex has the same homology as the base complex.  All
arithmetic is exact and every claimed identity can be re-checked from
the stored matrices alone.

Column lengths need to leave room for the maps to land: the receiving
column q - k must extend to degree j + k - 1 whenever X[q, j] is
nonzero.  Giving the degree-q column length d + (q_max - q) always
suffices; shorter columns are accepted as long as the obstructions
happen to vanish where there is no room.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from wallforge.complexes import (
    CertificateError,
    ChainComplex,
    ChainMap,
    cohomology_dims,
    hom_constrained,
    homology_dims,
    mapping_cone,
    truncate_canonical,
)
from wallforge.groupalg import (
    AlgebraPresentation,
    FreeResolution,
    ModulePresentation,
    _free_action_matrices,
    ext_dims,
)
from wallforge.linalg import (
    RationalMatrix,
    rank_kernel_image,
    solve_in_subspace,
    solve_matrix,
    unvec,
)


# ---------------------------------------------------------------------------
# columns and the assembled object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WallColumn:
    """One column of the assembly: a finite augmented resolution.

    ``dims[j]`` is the vector-space dimension of the degree-j term,
    ``free_ranks[j]`` its rank as a free module (None for spots that are
    only modules, e.g. the top of a canonical truncation), ``actions[j]``
    the action matrices of the algebra basis, ``diffs[j-1]`` the column
    map into degree j-1, and ``augmentation`` the map from degree 0 onto
    the resolved module.
    """

    dims: tuple
    free_ranks: tuple
    actions: tuple
    diffs: tuple
    augmentation: RationalMatrix

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def dim(self, j: int) -> int:
        return self.dims[j] if 0 <= j <= self.length else 0

    def diff(self, j: int) -> RationalMatrix:
        if 1 <= j <= self.length:
            return self.diffs[j - 1]
        return RationalMatrix.zeros(self.dim(j - 1), self.dim(j))

    def complex(self) -> ChainComplex:
        dims = {j: d for j, d in enumerate(self.dims)}
        diffs = {j: self.diffs[j - 1] for j in range(1, self.length + 1)}
        return ChainComplex(dims, diffs)

    def augmented_complex(self, module_dim: int) -> ChainComplex:
        dims = {j: d for j, d in enumerate(self.dims)}
        diffs = {j: self.diffs[j - 1] for j in range(1, self.length + 1)}
        if module_dim:
            dims[-1] = module_dim
            diffs[0] = self.augmentation
        return ChainComplex(dims, diffs)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "free_ranks": list(self.free_ranks),
            "actions": [[m.to_json() for m in acts] for acts in self.actions],
            "diffs": [m.to_json() for m in self.diffs],
            "augmentation": self.augmentation.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "WallColumn":
        return cls(
            dims=tuple(int(d) for d in data["dims"]),
            free_ranks=tuple(
                None if r is None else int(r) for r in data["free_ranks"]
            ),
            actions=tuple(
                tuple(RationalMatrix.from_json(m) for m in acts)
                for acts in data["actions"]
            ),
            diffs=tuple(RationalMatrix.from_json(m) for m in data["diffs"]),
            augmentation=RationalMatrix.from_json(data["augmentation"]),
        )


class WallAssembly:
    """A completed assembly: base data, columns, and the connecting maps.

    ``connecting[(k, q, j)]`` holds d(k) out of X[q, j] for k >= 1; the
    k = 0 maps are the column differentials.  ``map`` zero-fills anything
    out of range so bookkeeping loops stay uniform.
    """

    __slots__ = ("algebra", "base_modules", "base_maps", "columns", "connecting", "order")

    def __init__(
        self,
        algebra: AlgebraPresentation,
        base_modules: Sequence[ModulePresentation],
        base_maps: Sequence[RationalMatrix],
        columns: Sequence[WallColumn],
        connecting: Dict[Tuple[int, int, int], RationalMatrix],
        order: str = "forward",
    ):
        if len(base_modules) != len(columns):
            raise ValueError("one column per base degree")
        if len(base_maps) != max(len(columns) - 1, 0):
            raise ValueError(f"expected {len(columns) - 1} base maps, got {len(base_maps)}")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "base_modules", tuple(base_modules))
        object.__setattr__(self, "base_maps", tuple(base_maps))
        object.__setattr__(self, "columns", tuple(columns))
        object.__setattr__(self, "connecting", dict(connecting))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("WallAssembly is immutable")

    @property
    def q_max(self) -> int:
        return len(self.columns) - 1

    def column(self, q: int) -> WallColumn:
        return self.columns[q]

    def spot_dim(self, q: int, j: int) -> int:
        if q < 0 or q > self.q_max:
            return 0
        return self.columns[q].dim(j)

    def base_map(self, q: int) -> RationalMatrix:
        """The degree-q differential of the base complex."""
        if 1 <= q <= self.q_max:
            return self.base_maps[q - 1]
        tgt = self.base_modules[q - 1].dim if 0 <= q - 1 <= self.q_max else 0
        src = self.base_modules[q].dim if 0 <= q <= self.q_max else 0
        return RationalMatrix.zeros(tgt, src)

    def map(self, k: int, q: int, j: int) -> RationalMatrix:
        """d(k) out of X[q, j]; zero-shaped when absent or out of range."""
        if k == 0:
            if 0 <= q <= self.q_max:
                return self.columns[q].diff(j)
            return RationalMatrix.zeros(0, 0)
        M = self.connecting.get((k, q, j))
        if M is not None:
            return M
        return RationalMatrix.zeros(self.spot_dim(q - k, j + k - 1), self.spot_dim(q, j))

    def top_degree(self) -> int:
        return max(q + col.length for q, col in enumerate(self.columns))

    def __repr__(self) -> str:
        lengths = tuple(col.length for col in self.columns)
        return (
            f"WallAssembly(q_max={self.q_max}, column_lengths={lengths}, "
            f"connecting_maps={len(self.connecting)})"
        )

    def to_json(self) -> dict:
        entries = [
            {"k": k, "q": q, "j": j, "matrix": M.to_json()}
            for (k, q, j), M in sorted(self.connecting.items())
        ]
        return {
            "kind": "wall-assembly",
            "algebra": self.algebra.to_json(),
            "base_modules": [m.to_json() for m in self.base_modules],
            "base_maps": [m.to_json() for m in self.base_maps],
            "columns": [col.to_json() for col in self.columns],
            "connecting": entries,
            "order": self.order,
        }


def wall_from_json(data: dict) -> WallAssembly:
    """Rebuild an assembly from its dump; module axioms are re-validated."""
    algebra = AlgebraPresentation.from_json(data["algebra"])
    base_modules = [
        ModulePresentation(algebra, [RationalMatrix.from_json(m) for m in entry["actions"]])
        for entry in data["base_modules"]
    ]
    base_maps = [RationalMatrix.from_json(m) for m in data["base_maps"]]
    columns = [WallColumn.from_json(c) for c in data["columns"]]
    connecting = {
        (int(e["k"]), int(e["q"]), int(e["j"])): RationalMatrix.from_json(e["matrix"])
        for e in data["connecting"]
    }
    return WallAssembly(
        algebra, base_modules, base_maps, columns, connecting,
        order=data.get("order", "forward"),
    )


# ---------------------------------------------------------------------------
# hom bases between spots
# ---------------------------------------------------------------------------


def _free_source_hom_basis(
    A: AlgebraPresentation,
    rank: int,
    tgt_actions: Sequence[RationalMatrix],
    tgt_dim: int,
) -> List[RationalMatrix]:
    """Basis of the module maps A**rank -> N, one per (generator, N-basis) pair."""
    da = A.dim
    out = []
    for u in range(rank):
        for w in range(tgt_dim):
            wvec = tuple(1 if a == w else 0 for a in range(tgt_dim))
            grid = [[Fraction(0)] * (rank * da) for _ in range(tgt_dim)]
            for k in range(da):
                col = tgt_actions[k].apply(wvec)
                for a, val in enumerate(col):
                    if val:
                        grid[a][u * da + k] = val
            out.append(RationalMatrix(grid, ncols=rank * da))
    return out


def module_hom_basis(
    A: AlgebraPresentation,
    src_actions: Sequence[RationalMatrix],
    src_dim: int,
    tgt_actions: Sequence[RationalMatrix],
    tgt_dim: int,
) -> List[RationalMatrix]:
    """Basis of the module-linear maps between two presented modules.

    Solves the commutation constraints X rho_M(b) = rho_N(b) X for every
    algebra basis element b, as one kernel computation on the flattened
    unknown.  Used for spots that are not free, where the cheap
    generator-by-generator basis is unavailable.
    """
    if src_dim == 0 or tgt_dim == 0:
        return []
    ident_t = RationalMatrix.identity(tgt_dim)
    ident_s = RationalMatrix.identity(src_dim)
    blocks = []
    for i in range(A.dim):
        blocks.append(
            ident_t.kron(src_actions[i].transpose()) - tgt_actions[i].kron(ident_s)
        )
    _, kernel, _ = rank_kernel_image(RationalMatrix.vstack(blocks))
    return [unvec(v, (tgt_dim, src_dim)) for v in kernel]


def _hom_basis_between(
    A: AlgebraPresentation,
    src_col: WallColumn,
    js: int,
    tgt_col: WallColumn,
    jt: int,
) -> List[RationalMatrix]:
    sdim = src_col.dim(js)
    tdim = tgt_col.dim(jt)
    if sdim == 0 or tdim == 0:
        return []
    rank = src_col.free_ranks[js]
    if rank is not None:
        return _free_source_hom_basis(A, rank, tgt_col.actions[jt], tdim)
    return module_hom_basis(A, src_col.actions[js], sdim, tgt_col.actions[jt], tdim)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _same_algebra(a: AlgebraPresentation, b: AlgebraPresentation) -> bool:
    return a is b or (a.dim == b.dim and a.unit == b.unit and a.products == b.products)


def _validate_base(
    algebra: AlgebraPresentation,
    base_modules: Sequence[ModulePresentation],
    base_maps: Sequence[RationalMatrix],
) -> None:
    if not base_modules:
        raise ValueError("need at least one base degree")
    if len(base_maps) != len(base_modules) - 1:
        raise ValueError(
            f"expected {len(base_modules) - 1} base maps for "
            f"{len(base_modules)} base degrees, got {len(base_maps)}"
        )
    for q, mod in enumerate(base_modules):
        if not _same_algebra(mod.algebra, algebra):
            raise ValueError(f"base module {q} lives over a different algebra")
    for q in range(1, len(base_modules)):
        d = base_maps[q - 1]
        want = (base_modules[q - 1].dim, base_modules[q].dim)
        if d.shape != want:
            raise ValueError(f"base map {q} has shape {d.shape}, expected {want}")
        for i in range(algebra.dim):
            if d @ base_modules[q].actions[i] != base_modules[q - 1].actions[i] @ d:
                raise ValueError(f"base map {q} is not module-linear (basis element {i})")
    for q in range(2, len(base_modules)):
        if not (base_maps[q - 2] @ base_maps[q - 1]).is_zero():
            raise ValueError(f"base maps do not compose to zero at degree {q}")


def _validate_columns(
    algebra: AlgebraPresentation,
    base_modules: Sequence[ModulePresentation],
    columns: Sequence[WallColumn],
) -> None:
    for q, (mod, col) in enumerate(zip(base_modules, columns)):
        if col.augmentation.shape != (mod.dim, col.dim(0)):
            raise ValueError(f"column {q} augmentation has shape {col.augmentation.shape}")
        for j in range(col.length + 1):
            acts = col.actions[j]
            if len(acts) != algebra.dim:
                raise ValueError(f"column {q} degree {j} needs {algebra.dim} action matrices")
            for m in acts:
                if m.shape != (col.dim(j), col.dim(j)):
                    raise ValueError(f"column {q} degree {j} action has shape {m.shape}")
            rank = col.free_ranks[j]
            if rank is not None and rank * algebra.dim != col.dim(j):
                raise ValueError(f"column {q} degree {j} rank disagrees with its dimension")
        for j in range(1, col.length + 1):
            d = col.diff(j)
            if d.shape != (col.dim(j - 1), col.dim(j)):
                raise ValueError(f"column {q} differential {j} has shape {d.shape}")
            for i in range(algebra.dim):
                if d @ col.actions[j][i] != col.actions[j - 1][i] @ d:
                    raise ValueError(
                        f"column {q} differential {j} is not module-linear (basis element {i})"
                    )
        for i in range(algebra.dim):
            if col.augmentation @ col.actions[0][i] != mod.actions[i] @ col.augmentation:
                raise ValueError(f"column {q} augmentation is not module-linear (basis element {i})")
        aug = col.augmented_complex(mod.dim)
        aug.require_valid()
        hom = homology_dims(aug)
        for n in range(-1, col.length):
            if hom.get(n, 0):
                raise ValueError(f"column {q} fails exactness at degree {n}")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _column_from_resolution(res: FreeResolution) -> WallColumn:
    A = res.algebra
    da = A.dim
    ranks = res.ranks
    dims = tuple(r * da for r in ranks)
    actions = tuple(tuple(_free_action_matrices(A, r)) for r in ranks)
    diffs = tuple(res.complex.diff(j) for j in range(1, len(ranks)))
    return WallColumn(
        dims=dims,
        free_ranks=tuple(ranks),
        actions=actions,
        diffs=diffs,
        augmentation=res.augmentation,
    )


def _assemble(
    algebra: AlgebraPresentation,
    base_modules: Sequence[ModulePresentation],
    base_maps: Sequence[RationalMatrix],
    columns: Sequence[WallColumn],
    order: str,
) -> WallAssembly:
    _validate_base(algebra, base_modules, base_maps)
    _validate_columns(algebra, base_modules, columns)
    q_max = len(columns) - 1
    connecting: Dict[Tuple[int, int, int], RationalMatrix] = {}

    def spot_dim(q: int, j: int) -> int:
        if q < 0 or q > q_max:
            return 0
        return columns[q].dim(j)

    def get_map(k: int, q: int, j: int) -> RationalMatrix:
        if k == 0:
            return columns[q].diff(j)
        M = connecting.get((k, q, j))
        if M is not None:
            return M
        return RationalMatrix.zeros(spot_dim(q - k, j + k - 1), spot_dim(q, j))

    top = max(q + col.length for q, col in enumerate(columns))
    for n in range(1, top + 1):
        for k in range(1, min(n, q_max) + 1):
            for q in range(k, min(n, q_max) + 1):
                j = n - q
                if j < 0 or j > columns[q].length:
                    continue
                src_dim = columns[q].dim(j)
                if src_dim == 0:
                    continue
                tgt_dim = spot_dim(q - k, j + k - 1)
                if k == 1 and j == 0:
                    rhs = base_maps[q - 1] @ columns[q].augmentation
                    if tgt_dim == 0:
                        if not rhs.is_zero():
                            raise CertificateError(
                                f"image containment fails at (q={q}, j=0, k=1): "
                                "the base map cannot lift into an empty cover"
                            )
                        continue
                    basis = _hom_basis_between(algebra, columns[q], 0, columns[q - 1], 0)
                    lift = solve_in_subspace(
                        columns[q - 1].augmentation, rhs, basis, side="right", order=order
                    )
                    if lift is None:
                        raise CertificateError(f"lifting system inconsistent at (q={q}, j=0, k=1)")
                    if not lift.is_zero():
                        connecting[(1, q, 0)] = lift
                    continue
                obstruction = RationalMatrix.zeros(spot_dim(q - k, j + k - 2), src_dim)
                for h in range(k):
                    if h == 0 and j == 0:
                        continue
                    left = get_map(k - h, q - h, j + h - 1)
                    right = get_map(h, q, j)
                    if not (left.is_zero() or right.is_zero()):
                        obstruction = obstruction + left @ right
                if tgt_dim == 0:
                    if not obstruction.is_zero():
                        raise CertificateError(
                            f"image containment fails at (q={q}, j={j}, k={k}): the "
                            f"obstruction is nonzero but column {q - k} has no degree "
                            f"{j + k - 1} term to receive it; extend the lower columns"
                        )
                    continue
                target_diff = columns[q - k].diff(j + k - 1)
                rhs = -obstruction
                if solve_matrix(target_diff, rhs) is None:
                    raise CertificateError(
                        f"image containment fails at (q={q}, j={j}, k={k}): "
                        "im(del) is not inside im(d0)"
                    )
                basis = _hom_basis_between(algebra, columns[q], j, columns[q - k], j + k - 1)
                lift = solve_in_subspace(target_diff, rhs, basis, side="right", order=order)
                if lift is None:
                    raise CertificateError(f"lifting system inconsistent at (q={q}, j={j}, k={k})")
                if not lift.is_zero():
                    connecting[(k, q, j)] = lift

    W = WallAssembly(algebra, base_modules, base_maps, columns, connecting, order=order)
    bad = verify_induction_identities(W)
    if bad:
        raise CertificateError("construction self-check failed: " + "; ".join(bad))
    return W


def build_wall(
    resolutions: Sequence[FreeResolution],
    base_maps: Sequence[RationalMatrix],
    order: str = "forward",
) -> WallAssembly:
    """Assemble the connecting maps over a base complex.

    ``resolutions[q]`` resolves the degree-q base module (which it carries
    as ``.module``) and ``base_maps[q-1]`` is the base differential from
    degree q into degree q-1, a module-linear matrix.  Maps are produced
    in increasing total degree, then increasing k: first the lift of the
    base differential through the augmentations, then for every higher
    spot the accumulated obstruction is checked to land in the image of
    the column differential and a module-linear preimage is chosen by a
    deterministic constrained solve.  ``order`` picks the pivot scan
    direction of that solve; "reversed" generally yields different but
    equally valid maps.
    """
    if not resolutions:
        raise ValueError("need at least one resolution")
    algebra = resolutions[0].algebra
    for res in resolutions:
        if not _same_algebra(res.algebra, algebra):
            raise ValueError("resolutions live over different algebras")
    base_modules = tuple(res.module for res in resolutions)
    columns = tuple(_column_from_resolution(res) for res in resolutions)
    return _assemble(algebra, base_modules, tuple(base_maps), columns, order)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_induction_identities(W: WallAssembly) -> List[str]:
    """Brute-force re-check of every composite identity; empty means good.

    For each spot and each k the sum of d(k-h) after d(h) is recomputed
    from the stored matrices and compared with zero, without trusting
    anything the builder did.  The augmentation squares and the vanishing
    of augmentation composed with the first column map are included.
    """
    msgs = []
    for q in range(W.q_max + 1):
        col = W.column(q)
        if q >= 1:
            left = W.column(q - 1).augmentation @ W.map(1, q, 0)
            right = W.base_map(q) @ col.augmentation
            if left != right:
                msgs.append(f"augmentation square fails at q={q}")
        if col.length >= 1 and not (col.augmentation @ col.diff(1)).is_zero():
            msgs.append(f"augmentation does not kill boundaries in column {q}")
        for j in range(col.length + 1):
            for k in range(1, q + 1):
                total = RationalMatrix.zeros(W.spot_dim(q - k, j + k - 2), col.dim(j))
                for h in range(k + 1):
                    left = W.map(k - h, q - h, j + h - 1)
                    right = W.map(h, q, j)
                    if left.nrows and left.ncols and right.nrows and right.ncols:
                        total = total + left @ right
                if not total.is_zero():
                    msgs.append(f"identity fails at (q={q}, j={j}, k={k})")
    return msgs


def base_complex(W: WallAssembly) -> ChainComplex:
    dims = {q: mod.dim for q, mod in enumerate(W.base_modules)}
    diffs = {q: W.base_maps[q - 1] for q in range(1, W.q_max + 1)}
    return ChainComplex(dims, diffs)


def _spot_offsets(W: WallAssembly, n: int) -> List[Tuple[int, int, int]]:
    """(q, j, column offset) for the spots of total degree n, q ascending."""
    out = []
    offset = 0
    for q in range(W.q_max + 1):
        j = n - q
        if 0 <= j <= W.column(q).length:
            out.append((q, j, offset))
            offset += W.column(q).dim(j)
    return out


def total_complex(W: WallAssembly) -> ChainComplex:
    """The direct sum over q + j = n with the summed differential; validated."""
    top = W.top_degree()
    dims = {}
    for n in range(top + 1):
        dims[n] = sum(W.spot_dim(q, n - q) for q in range(W.q_max + 1))
    diffs = {}
    for n in range(1, top + 1):
        if dims.get(n, 0) == 0 or dims.get(n - 1, 0) == 0:
            continue
        tgt_offsets = {(q, j): off for q, j, off in _spot_offsets(W, n - 1)}
        grid = [[Fraction(0)] * dims[n] for _ in range(dims[n - 1])]
        for q, j, col_off in _spot_offsets(W, n):
            start = 0 if j >= 1 else 1
            for k in range(start, q + 1):
                key = (q - k, j + k - 1)
                if key not in tgt_offsets:
                    continue
                M = W.map(k, q, j)
                if M.is_zero():
                    continue
                row_off = tgt_offsets[key]
                for a, row in enumerate(M.rows):
                    for b, val in enumerate(row):
                        if val:
                            grid[row_off + a][col_off + b] = val
        diffs[n] = RationalMatrix(grid, ncols=dims[n])
    T = ChainComplex(dims, diffs)
    T.require_valid()
    return T


@dataclass(frozen=True)
class WallHomologyCertificate:
    """Cone and homology bookkeeping for the augmentation comparison."""

    cone_homology: Dict[int, int]
    total_homology: Dict[int, int]
    base_homology: Dict[int, int]

    @property
    def is_quasi_iso(self) -> bool:
        return all(v == 0 for v in self.cone_homology.values())

    @property
    def betti_match(self) -> bool:
        left = {n: v for n, v in self.total_homology.items() if v}
        right = {n: v for n, v in self.base_homology.items() if v}
        return left == right

    def to_json(self) -> dict:
        return {
            "cone_homology": {str(n): v for n, v in sorted(self.cone_homology.items())},
            "total_homology": {str(n): v for n, v in sorted(self.total_homology.items())},
            "base_homology": {str(n): v for n, v in sorted(self.base_homology.items())},
            "is_quasi_iso": self.is_quasi_iso,
            "betti_match": self.betti_match,
        }


def augmentation_quasi_iso(W: WallAssembly) -> Tuple[ChainMap, WallHomologyCertificate]:
    """The collapse onto the base, certified as a quasi-isomorphism.

    The map is the augmentation on every (q, 0) spot and zero elsewhere.
    It commutes with the differentials because of the augmentation squares
    and because augmentations kill column boundaries; the certificate then
    computes the homology of its mapping cone, which must vanish.

    The homology identity needs complete columns: a finite column whose
    top differential still has a kernel is only an initial segment of a
    resolution, and that kernel pollutes the top total degree unless the
    base happens to cancel it.  Truncate first (``truncated_wall``) when
    the columns were cut off raw.
    """
    T = total_complex(W)
    S = base_complex(W)
    components = {}
    for n in range(W.q_max + 1):
        if S.dim(n) == 0 or T.dim(n) == 0:
            continue
        grid = [[Fraction(0)] * T.dim(n) for _ in range(S.dim(n))]
        for q, j, off in _spot_offsets(W, n):
            if j != 0 or q != n:
                continue
            aug = W.column(q).augmentation
            for a, row in enumerate(aug.rows):
                for b, val in enumerate(row):
                    if val:
                        grid[a][off + b] = val
        components[n] = RationalMatrix(grid, ncols=T.dim(n))
    eps = ChainMap(T, S, components)
    eps.require_chain_map()
    cone = mapping_cone(eps)
    cert = WallHomologyCertificate(
        cone_homology=homology_dims(cone),
        total_homology=homology_dims(T),
        base_homology=homology_dims(S),
    )
    if not cert.is_quasi_iso:
        raise CertificateError(
            "mapping cone of the augmentation is not exact: "
            f"cone homology {cert.cone_homology}, total {cert.total_homology}, "
            f"base {cert.base_homology}"
        )
    return eps, cert


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


def truncated_wall(W: WallAssembly, d_bound: int) -> WallAssembly:
    """Cut every column at d_bound canonically and rebuild the maps.

    Columns no longer than the bound are kept as they are; longer ones are
    replaced by their canonical truncation, whose top degree is a quotient
    module presented on a subset of the original coordinates.  Connecting
    maps are rebuilt from scratch since maps out of a quotient spot do not
    simply restrict.  The total complex of the result vanishes above
    q_max + d_bound.
    """
    if d_bound < 0:
        raise ValueError("truncation bound must be nonnegative")
    if all(col.length <= d_bound for col in W.columns):
        return W
    algebra = W.algebra
    new_columns = []
    for q, col in enumerate(W.columns):
        if col.length <= d_bound:
            new_columns.append(col)
            continue
        C = col.complex()
        hom = homology_dims(C)
        for j in range(d_bound + 1, col.length):
            if hom.get(j, 0):
                raise ValueError(
                    f"column {q} has homology in degree {j}, above the bound {d_bound}"
                )
        truncated, data = truncate_canonical(C, d_bound, with_data=True)
        if data is None:
            # the column was already zero above the bound; just drop the tail
            new_columns.append(
                WallColumn(
                    dims=col.dims[: d_bound + 1],
                    free_ranks=col.free_ranks[: d_bound + 1],
                    actions=col.actions[: d_bound + 1],
                    diffs=col.diffs[:d_bound],
                    augmentation=col.augmentation,
                )
            )
            continue
        top_actions = tuple(
            data.projection @ act @ data.inclusion for act in col.actions[d_bound]
        )
        dims = col.dims[:d_bound] + (truncated.dim(d_bound),)
        diffs = tuple(truncated.diff(j) for j in range(1, d_bound + 1))
        augmentation = col.augmentation
        if d_bound == 0:
            augmentation = col.augmentation @ data.inclusion
        new_columns.append(
            WallColumn(
                dims=dims,
                free_ranks=col.free_ranks[:d_bound] + (None,),
                actions=col.actions[:d_bound] + (top_actions,),
                diffs=diffs,
                augmentation=augmentation,
            )
        )
    return _assemble(algebra, W.base_modules, W.base_maps, tuple(new_columns), W.order)


# ---------------------------------------------------------------------------
# Ext through the total complex
# ---------------------------------------------------------------------------


def ext_via_wall(W: WallAssembly, N: ModulePresentation, n_max: int) -> List[int]:
    """Ext dimensions computed as cohomology of maps from the total complex.

    Requires the base complex to be exact in positive degrees, so the total
    complex resolves V = H_0 of the base.  The answer is checked against an
    independently built direct resolution of V; a mismatch raises.  Keep
    n_max below the top total degree when a column is a raw initial segment
    of a longer resolution, or truncate the assembly first; past that edge
    the stored complex simply ends and its cohomology is meaningless.  With
    a truncated assembly agreement holds whenever Ext vanishes beyond the
    truncation range (true in the semisimple configurations this runs on).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if not _same_algebra(N.algebra, W.algebra):
        raise ValueError("coefficient module lives over a different algebra")
    S = base_complex(W)
    hom = homology_dims(S)
    for qd in range(1, W.q_max + 1):
        if hom.get(qd, 0):
            raise ValueError(
                f"base complex is not a resolution: homology {hom.get(qd)} in degree {qd}"
            )
    if W.q_max == 0 or S.hi == 0:
        V = W.base_modules[0]
    else:
        _, data = truncate_canonical(S, 0, with_data=True)
        if data is None:
            V = W.base_modules[0]
        else:
            acts = [
                data.projection @ act @ data.inclusion
                for act in W.base_modules[0].actions
            ]
            V = ModulePresentation(W.algebra, acts)
    T = total_complex(W)
    hom_bases: Dict[int, List[RationalMatrix]] = {}
    for n in range(T.hi + 1):
        total_dim = T.dim(n)
        basis: List[RationalMatrix] = []
        if total_dim and N.dim:
            for q, j, off in _spot_offsets(W, n):
                col = W.column(q)
                sdim = col.dim(j)
                if sdim == 0:
                    continue
                rank = col.free_ranks[j]
                if rank is not None:
                    spot_basis = _free_source_hom_basis(W.algebra, rank, N.actions, N.dim)
                else:
                    spot_basis = module_hom_basis(
                        W.algebra, col.actions[j], sdim, N.actions, N.dim
                    )
                pads = (
                    RationalMatrix.zeros(N.dim, off),
                    RationalMatrix.zeros(N.dim, total_dim - off - sdim),
                )
                for B in spot_basis:
                    basis.append(RationalMatrix.hstack([pads[0], B, pads[1]]))
        hom_bases[n] = basis
    cochain = hom_constrained(T, hom_bases, N.dim)
    coh = cohomology_dims(cochain)
    dims = [coh.get(n, 0) for n in range(n_max + 1)]
    direct = ext_dims(W.algebra, V, N, n_max)
    if dims != direct:
        raise CertificateError(
            f"total-complex Ext dims {dims} disagree with the direct resolution {direct}"
        )
    return dims
