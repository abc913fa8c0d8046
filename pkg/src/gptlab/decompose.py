"""Direct-sum structure: irreducible components and classical subsystems.

A state space decomposes when its vertex set splits into blocks with
linearly independent spans; the finest such partition (the components of the
vector matroid on the vertices) is computed by a span-merge fixpoint.  A
nontrivial decomposition is exactly a classical degree of freedom, and for
transitive spaces it upgrades to a full classical subsystem: the space
factors as a simplex tensor one component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import DEFAULT_BUDGETS, Budgets
from .dynamics import SymmetryGroup, _VertexGeometry, _map_matrix, _search_vertex_maps, is_transitive
from .linalg import Matrix, dot, independent_subset, veq
from .statespace import Effect, StateSpace, _assemble, min_tensor, simplex


class NotTransitiveError(ValueError):
    """The classical-subsystem factorization requires a transitive space."""


@dataclass(frozen=True)
class Component:
    """One irreducible summand: vertex block, span basis, extracted space."""

    indices: tuple          # vertex indices of the owning space
    basis: Matrix           # ambient_dim x dim, echelon basis of the span
    space: StateSpace       # the block in its own subspace coordinates

    @property
    def dim(self) -> int:
        return self.basis.ncols


@dataclass(frozen=True)
class Decomposition:
    space: StateSpace
    components: tuple

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def is_trivial(self) -> bool:
        return self.n == 1

    def block_of_vertex(self, vertex_index: int) -> int:
        for k, comp in enumerate(self.components):
            if vertex_index in comp.indices:
                return k
        raise ValueError(f"vertex {vertex_index} not covered by any block")

    def blocks(self) -> list:
        return [list(c.indices) for c in self.components]

    def verify(self) -> bool:
        """Blocks partition the vertices and their spans are independent."""
        covered = sorted(i for c in self.components for i in c.indices)
        if covered != list(range(self.space.nvertices)):
            return False
        verts = self.space.vertices
        total = Matrix.from_rows(verts, self.space.ctx).rank()
        ranks = sum(
            Matrix.from_rows([verts[i] for i in c.indices], self.space.ctx).rank()
            for c in self.components
        )
        return ranks == total


def irreducible_components(space: StateSpace) -> Decomposition:
    """Finest partition of the vertices into blocks with additive span ranks.

    This is the connected-component partition of the vector matroid on the
    vertex vectors, computed through fundamental circuits: fix a basis among
    the vertices; every non-basis vertex ties itself to the support of its
    unique representation.  Merging those supports (union-find) yields
    exactly the matroid components.  Pairwise span-intersection merging is
    NOT enough here: a circuit of length >= 3 (e.g. the four square
    vertices) crosses blocks whose spans intersect trivially in pairs.
    """
    ctx = space.ctx
    verts = space.vertices
    n = len(verts)
    basis_idx = independent_subset(verts, ctx)
    basis_mat = Matrix.from_cols([verts[i] for i in basis_idx], ctx)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    basis_set = set(basis_idx)
    for e in range(n):
        if e in basis_set:
            continue
        x = basis_mat.solve(verts[e])
        support = [basis_idx[k] for k in range(len(basis_idx)) if not ctx.is_zero(x[k])]
        for b in support:
            union(e, b)

    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    components = [_extract(space, tuple(sorted(b))) for b in groups.values()]
    components.sort(key=lambda c: (c.dim, len(c.indices), c.indices))
    return Decomposition(space, tuple(components))


def _extract(space: StateSpace, indices: tuple) -> Component:
    """Pull a vertex block out into its own subspace coordinates."""
    ctx = space.ctx
    rows = [space.vertices[i] for i in indices]
    red, pivots = Matrix.from_rows(rows, ctx).rref()
    basis_rows = [red.rows[k] for k in range(len(pivots))]
    basis = Matrix.from_cols(basis_rows, ctx)  # ambient x dim
    coords = [basis.solve(v) for v in rows]
    sub_u = basis.transpose().apply(space.u)  # u restricted: u(B c) = (B^T u) . c
    label = f"{space.label}#{','.join(str(i) for i in indices)}"
    sub = _assemble(label, coords, sub_u, ctx)
    return Component(indices, basis, sub)


def has_classical_dof(space: StateSpace) -> bool:
    """Definition of a classical degree of freedom: a nontrivial direct sum."""
    return irreducible_components(space).n >= 2


# -- isomorphism -------------------------------------------------------------


@dataclass(frozen=True)
class Isomorphism:
    """Invertible u-preserving linear map matching two vertex sets."""

    source: StateSpace
    target: StateSpace
    matrix: Matrix
    vertex_map: tuple  # source vertex i -> target vertex vertex_map[i]

    def verify(self) -> bool:
        src, dst, ctx = self.source, self.target, self.source.ctx
        if sorted(self.vertex_map) != list(range(dst.nvertices)):
            return False
        for i, v in enumerate(src.vertices):
            if not veq(self.matrix.apply(v), dst.vertices[self.vertex_map[i]], ctx):
                return False
        # u_target o L = u_source; literal when the source span is full,
        # and on the span it already holds because vertices map to vertices.
        pulled = self.matrix.transpose().apply(dst.u)
        if Matrix.from_rows(src.vertices, ctx).rank() == src.ambient_dim:
            return veq(pulled, src.u, ctx)
        return all(
            ctx.eq(dot(pulled, v), ctx.one()) for v in src.vertices
        )


def spaces_isomorphic(s1: StateSpace, s2: StateSpace,
                      budgets: Budgets = DEFAULT_BUDGETS) -> Optional[Isomorphism]:
    """Search for a u-preserving linear bijection of vertex sets."""
    if s1.nvertices != s2.nvertices:
        return None
    g1, g2 = _VertexGeometry(s1), _VertexGeometry(s2)
    perms = _search_vertex_maps(g1, g2, budgets.group_nodes, find_all=False)
    if not perms:
        return None
    sigma = perms[0]
    return Isomorphism(s1, s2, _map_matrix(g1, g2, sigma), sigma)


# -- classical subsystem (simplex factorization) -----------------------------


@dataclass(frozen=True)
class ClassicalSubsystem:
    """Verified factorization: space == simplex(N) tensor component."""

    space: StateSpace
    n_levels: int            # N: the simplex index, one less than block count
    component: StateSpace
    iso: Isomorphism         # from simplex(N) (x) component onto the space
    decomposition: Decomposition


def classical_subsystem(space: StateSpace, group: SymmetryGroup,
                        budgets: Budgets = DEFAULT_BUDGETS) -> Optional[ClassicalSubsystem]:
    """Factor a transitive decomposable space as simplex(N) (x) C.

    Returns None when the space is irreducible; raises NotTransitiveError
    when the provided group does not act transitively (a precondition
    violation, not a negative answer).
    """
    if group.space is not space:
        raise ValueError("group was computed for a different space")
    if not is_transitive(space, group):
        raise NotTransitiveError(f"{space.label!r} is not transitive")
    decomp = irreducible_components(space)
    if decomp.n == 1:
        return None

    ctx = space.ctx
    comp0 = decomp.components[0]
    c_space = comp0.space
    maps = []
    for k, comp in enumerate(decomp.components):
        if comp.dim != comp0.dim or len(comp.indices) != len(comp0.indices):
            raise RuntimeError("transitive space with non-isomorphic components")
        iso = spaces_isomorphic(c_space, comp.space, budgets)
        if iso is None:
            raise RuntimeError("transitive space with non-isomorphic components")
        maps.append(iso)

    n = decomp.n
    delta = simplex(n - 1, ctx)
    composite = min_tensor(delta, c_space)
    dc = c_space.ambient_dim

    # Column (i, m) of the big map: embed component-i image of basis vector m.
    cols = []
    for i in range(n):
        embed = decomp.components[i].basis @ maps[i].matrix  # ambient x dc
        for m in range(dc):
            cols.append(embed.col(m))
    big = Matrix.from_cols(cols, ctx)

    lookup = {tuple(ctx.key(x) for x in v): k for k, v in enumerate(space.vertices)}
    vertex_map = []
    for v in composite.vertices:
        image = big.apply(v)
        k = lookup.get(tuple(ctx.key(x) for x in image))
        if k is None:
            raise RuntimeError("factorization image missed the vertex set")
        vertex_map.append(k)
    iso = Isomorphism(composite, space, big, tuple(vertex_map))
    if not iso.verify():
        raise RuntimeError("classical-subsystem isomorphism failed verification")
    return ClassicalSubsystem(space, n - 1, c_space, iso, decomp)


# -- component indicator effects ---------------------------------------------


def component_indicator_effects(space: StateSpace,
                                decomp: Optional[Decomposition] = None) -> list:
    """Effects reading out the classical label: 1 on one block, 0 on the rest.

    They always form a complete measurement (they sum to u).
    """
    ctx = space.ctx
    if decomp is None:
        decomp = irreducible_components(space)
    cols = []
    owners = []
    for k, comp in enumerate(decomp.components):
        for m in range(comp.dim):
            cols.append(comp.basis.col(m))
            owners.append(k)
    d = space.ambient_dim
    for j in range(d):
        e = tuple(ctx.one() if t == j else ctx.zero() for t in range(d))
        if len(independent_subset(cols + [e], ctx)) > len(cols):
            cols.append(e)
            owners.append(None)  # complement of the span: annihilated
    full = Matrix.from_cols(cols, ctx)
    inv = full.inverse()

    effects = []
    one, zero = ctx.one(), ctx.zero()
    for k, comp in enumerate(decomp.components):
        selector = tuple(one if owners[t] == k else zero for t in range(d))
        # e_k = u o P_k with P_k the projector onto block k along the rest.
        proj_rows = [tuple(selector[t] * inv.rows[t][j] for j in range(d)) for t in range(d)]
        proj = full @ Matrix(tuple(proj_rows), ctx)
        covector = proj.transpose().apply(space.u)
        values = tuple(one if i in comp.indices else zero for i in range(space.nvertices))
        effects.append(Effect(space, tuple(covector), values))
    for eff in effects:
        for i, v in enumerate(space.vertices):
            if not ctx.eq(dot(eff.covector, v), eff.values[i]):
                raise RuntimeError("indicator effect failed verification")
    return effects
