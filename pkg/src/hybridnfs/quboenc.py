"""Multiplication-table QUBO encoding of integer splitting.

The target h is written as a long multiplication f*g in base 2 with both
factors forced odd (their low bits are hardwired to 1). Table columns are
grouped into blocks; every block contributes a balance polynomial K_i that
must vanish, with explicit carry bits linking adjacent blocks. Each K_i is
linearized by replacing variable pair products with penalized auxiliary
bits, then squared, so the sum of squares plus penalties is a quadratic
form whose zero set is exactly the set of valid factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import TextIO

__all__ = [
    "Infeasible",
    "BinaryPoly",
    "VarRegistry",
    "BlockLayout",
    "QuboProblem",
    "MultTableEncoding",
    "plan_layout",
    "layout_var_count",
    "block_polys",
    "linearize",
    "assemble_qubo",
    "encode_split",
    "direct_qubo",
    "decode",
    "penalty_poly",
    "write_qubo",
    "read_qubo",
]


class Infeasible(Exception):
    """h cannot fit in the product of the requested bit widths."""


class VarRegistry:
    """Assigns dense variable ids and remembers a name and role for each."""

    def __init__(self) -> None:
        self.names: list[str] = []
        self.roles: list[str] = []

    def new(self, name: str, role: str) -> int:
        self.names.append(name)
        self.roles.append(role)
        return len(self.names) - 1

    @property
    def num_vars(self) -> int:
        return len(self.names)


class BinaryPoly:
    """Multilinear integer polynomial over 0/1 variables.

    Monomials are frozensets of variable ids (x**2 collapses to x for
    binary variables, so sets are enough); the empty set is the constant.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[frozenset[int], int] | None = None) -> None:
        self.terms = dict(terms) if terms else {}

    @staticmethod
    def constant(c: int) -> "BinaryPoly":
        return BinaryPoly({frozenset(): c} if c else {})

    @staticmethod
    def var(i: int, coeff: int = 1) -> "BinaryPoly":
        return BinaryPoly({frozenset((i,)): coeff} if coeff else {})

    def copy(self) -> "BinaryPoly":
        return BinaryPoly(self.terms)

    def _iadd(self, mono: frozenset[int], coeff: int) -> None:
        c = self.terms.get(mono, 0) + coeff
        if c:
            self.terms[mono] = c
        else:
            self.terms.pop(mono, None)

    def __add__(self, other: "BinaryPoly | int") -> "BinaryPoly":
        out = self.copy()
        if isinstance(other, int):
            out._iadd(frozenset(), other)
            return out
        for mono, c in other.terms.items():
            out._iadd(mono, c)
        return out

    def __sub__(self, other: "BinaryPoly | int") -> "BinaryPoly":
        return self + (other * -1 if isinstance(other, BinaryPoly) else -other)

    def __mul__(self, other: "BinaryPoly | int") -> "BinaryPoly":
        if isinstance(other, int):
            if other == 0:
                return BinaryPoly()
            return BinaryPoly({m: c * other for m, c in self.terms.items()})
        out = BinaryPoly()
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out._iadd(m1 | m2, c1 * c2)
        return out

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryPoly) and self.terms == other.terms

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def abs_coeff_sum(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def evaluate(self, bits) -> int:
        total = 0
        for mono, c in self.terms.items():
            v = c
            for i in mono:
                if not bits[i]:
                    v = 0
                    break
            total += v
        return total

    def substitute_pair(self, u: int, v: int, aux: int, min_len: int) -> "BinaryPoly":
        out = BinaryPoly()
        for mono, c in self.terms.items():
            if len(mono) >= min_len and u in mono and v in mono:
                out._iadd((mono - {u, v}) | {aux}, c)
            else:
                out._iadd(mono, c)
        return out

    def __repr__(self) -> str:
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return "BinaryPoly(" + " + ".join(f"{c}*{sorted(m)}" for m, c in items) + ")"


@dataclass(frozen=True)
class BlockLayout:
    """Column grouping and carry budget for one multiplication table."""

    tau_f: int
    tau_g: int
    h: int
    block_width: int
    widths: tuple[int, ...]
    starts: tuple[int, ...]
    carry_counts: tuple[int, ...]  # entry i: carry bits entering block i; last entry feeds the final check
    num_columns: int

    @property
    def num_blocks(self) -> int:
        return len(self.widths)


def _column_terms(tau_f: int, tau_g: int, k: int) -> int:
    lo = max(0, k - tau_g)
    hi = min(tau_f, k)
    return max(0, hi - lo + 1)


def plan_layout(tau_f: int, tau_g: int, h: int, block_width: int = 2) -> BlockLayout:
    """Partition the product columns into blocks and size the carry registers.

    Block 0 is always the single column 0 (pinned by the odd target). The
    carry register entering block i+1 holds the largest value block i can
    spill, so the budget is bitlength(max attainable block value) minus the
    block width.
    """
    if tau_f < 1 or tau_g < 1:
        raise ValueError("factor widths must be >= 1")
    if block_width < 1:
        raise ValueError("block width must be >= 1")
    if h < 1 or h % 2 == 0:
        raise ValueError("h must be odd and positive")
    if h.bit_length() > tau_f + tau_g + 2:
        raise Infeasible(f"h needs {h.bit_length()} bits, widths allow {tau_f + tau_g + 2}")
    num_columns = tau_f + tau_g + 1
    widths = [1]
    col = 1
    while col < num_columns:
        w = min(block_width, num_columns - col)
        widths.append(w)
        col += w
    starts = [0]
    for w in widths[:-1]:
        starts.append(starts[-1] + w)
    carry_counts = [0]
    for i, w in enumerate(widths):
        max_block = sum(
            (1 << (k - starts[i])) * _column_terms(tau_f, tau_g, k)
            for k in range(starts[i], starts[i] + w)
        )
        max_val = max_block + (1 << carry_counts[i]) - 1
        carry_counts.append(max(0, max_val.bit_length() - w))
    return BlockLayout(
        tau_f=tau_f,
        tau_g=tau_g,
        h=h,
        block_width=block_width,
        widths=tuple(widths),
        starts=tuple(starts),
        carry_counts=tuple(carry_counts),
        num_columns=num_columns,
    )


def layout_var_count(layout: BlockLayout) -> int:
    """Variable count of the assembled table problem, without building it.

    Factor bits plus carry registers plus one auxiliary per (f_i, g_j)
    product pair; each pair lives in exactly one column, so the auxiliary
    census is the full tau_f * tau_g grid.
    """
    return (
        layout.tau_f
        + layout.tau_g
        + sum(layout.carry_counts)
        + layout.tau_f * layout.tau_g
    )


@dataclass
class _TableVars:
    f_ids: list[int]
    g_ids: list[int]
    carry_ids: list[list[int]]  # aligned with layout.carry_counts


def _make_table_vars(layout: BlockLayout, registry: VarRegistry) -> _TableVars:
    f_ids = [registry.new(f"f{i}", "f") for i in range(1, layout.tau_f + 1)]
    g_ids = [registry.new(f"g{j}", "g") for j in range(1, layout.tau_g + 1)]
    carry_ids: list[list[int]] = []
    for boundary, count in enumerate(layout.carry_counts):
        carry_ids.append(
            [registry.new(f"c{boundary}_{j}", "carry") for j in range(count)]
        )
    return _TableVars(f_ids, g_ids, carry_ids)


def _bit_poly(ids: list[int], position: int) -> BinaryPoly:
    # position 0 is the hardwired 1-bit; positions 1.. map to variables
    if position == 0:
        return BinaryPoly.constant(1)
    return BinaryPoly.var(ids[position - 1])


def block_polys(layout: BlockLayout, registry: VarRegistry | None = None) -> tuple[list[BinaryPoly], _TableVars, VarRegistry]:
    """Balance polynomials K_0..K_L; all must vanish iff f*g == h with valid carries.

    The list has one entry per block plus a final entry equating the last
    carry register with the high bits of h above the top product column.
    """
    registry = registry or VarRegistry()
    tv = _make_table_vars(layout, registry)
    polys = []
    for i, w in enumerate(layout.widths):
        start = layout.starts[i]
        k_poly = BinaryPoly()
        for k in range(start, start + w):
            weight = 1 << (k - start)
            lo = max(0, k - layout.tau_g)
            hi = min(layout.tau_f, k)
            for u in range(lo, hi + 1):
                term = _bit_poly(tv.f_ids, u) * _bit_poly(tv.g_ids, k - u)
                k_poly = k_poly + term * weight
        for j, cid in enumerate(tv.carry_ids[i]):
            k_poly = k_poly + BinaryPoly.var(cid, 1 << j)
        for j, cid in enumerate(tv.carry_ids[i + 1]):
            k_poly = k_poly - BinaryPoly.var(cid, (1 << w) * (1 << j))
        n_i = (layout.h >> start) & ((1 << w) - 1)
        polys.append(k_poly - n_i)
    final = BinaryPoly()
    for j, cid in enumerate(tv.carry_ids[-1]):
        final = final + BinaryPoly.var(cid, 1 << j)
    polys.append(final - (layout.h >> layout.num_columns))
    return polys, tv, registry


def _most_frequent_pair(poly: BinaryPoly, min_len: int) -> tuple[int, int] | None:
    counts: dict[tuple[int, int], int] = {}
    for mono in poly.terms:
        if len(mono) < min_len:
            continue
        for pair in combinations(sorted(mono), 2):
            counts[pair] = counts.get(pair, 0) + 1
    if not counts:
        return None
    best = max(counts.items(), key=lambda kv: (kv[1], [-x for x in kv[0]]))
    return best[0]


def penalty_poly(u: int, v: int, aux: int) -> BinaryPoly:
    """2(uv - 2*aux*(u+v) + 3*aux): zero iff aux == u*v, at least 2 otherwise."""
    return BinaryPoly(
        {
            frozenset((u, v)): 2,
            frozenset((aux, u)): -4,
            frozenset((aux, v)): -4,
            frozenset((aux,)): 6,
        }
    )


def linearize(
    poly: BinaryPoly,
    registry: VarRegistry,
    target_degree: int = 1,
) -> tuple[BinaryPoly, list[BinaryPoly], list[tuple[int, int, int]]]:
    """Reduce poly to the target degree by pair substitution.

    Repeatedly picks the pair of variables occurring together in the most
    monomials above the target degree (ties broken toward the lowest ids),
    replaces the pair with a fresh auxiliary bit, and accumulates one
    unweighted penalty polynomial per substitution.
    """
    if target_degree < 1:
        raise ValueError("target degree must be >= 1")
    work = poly.copy()
    penalties: list[BinaryPoly] = []
    aux_defs: list[tuple[int, int, int]] = []
    while work.degree() > target_degree:
        pair = _most_frequent_pair(work, target_degree + 1)
        if pair is None:
            break
        u, v = pair
        aux = registry.new(f"a{registry.num_vars}", "aux")
        work = work.substitute_pair(u, v, aux, target_degree + 1)
        penalties.append(penalty_poly(u, v, aux))
        aux_defs.append((aux, u, v))
    return work, penalties, aux_defs


@dataclass(frozen=True)
class QuboProblem:
    """Quadratic form sum(beta_i u_i) + sum(delta_ij u_i u_j) + offset."""

    num_vars: int
    linear: dict[int, int]
    quadratic: dict[tuple[int, int], int]
    offset: int
    var_names: tuple[str, ...] = ()
    var_roles: tuple[str, ...] = ()

    def max_abs_coeff(self) -> int:
        vals = [abs(v) for v in self.linear.values()]
        vals += [abs(v) for v in self.quadratic.values()]
        return max(vals, default=0)


def _poly_to_qubo(q_poly: BinaryPoly, registry: VarRegistry) -> QuboProblem:
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    offset = 0
    for mono, c in q_poly.terms.items():
        if len(mono) == 0:
            offset = c
        elif len(mono) == 1:
            (i,) = mono
            linear[i] = c
        elif len(mono) == 2:
            i, j = sorted(mono)
            quadratic[(i, j)] = c
        else:
            raise ValueError("polynomial is not quadratic")
    return QuboProblem(
        num_vars=registry.num_vars,
        linear=linear,
        quadratic=quadratic,
        offset=offset,
        var_names=tuple(registry.names),
        var_roles=tuple(registry.roles),
    )


def _assemble(
    blocks: list[BinaryPoly], registry: VarRegistry
) -> tuple[QuboProblem, list[BinaryPoly], list[tuple[int, int, int]], list[int]]:
    q_poly = BinaryPoly()
    lin_blocks: list[BinaryPoly] = []
    aux_defs: list[tuple[int, int, int]] = []
    weights: list[int] = []
    for k_poly in blocks:
        lin, pens, defs = linearize(k_poly, registry, target_degree=1)
        # a violated penalty must cost more than the squared block can gain
        rho = lin.abs_coeff_sum() ** 2 + 1
        lin_blocks.append(lin)
        aux_defs.extend(defs)
        weights.append(rho)
        q_poly = q_poly + lin * lin
        for pen in pens:
            q_poly = q_poly + pen * rho
    return _poly_to_qubo(q_poly, registry), lin_blocks, aux_defs, weights


def assemble_qubo(blocks: list[BinaryPoly], registry: VarRegistry) -> QuboProblem:
    """Sum of squared linearized blocks plus weighted consistency penalties."""
    problem, _, _, _ = _assemble(blocks, registry)
    return problem


@dataclass
class MultTableEncoding:
    """A built table QUBO together with enough structure to invert it."""

    qubo: QuboProblem
    layout: BlockLayout
    blocks: list[BinaryPoly]
    f_ids: list[int]
    g_ids: list[int]
    carry_ids: list[list[int]]
    aux_defs: list[tuple[int, int, int]]
    lin_blocks: list[BinaryPoly] = field(default_factory=list)
    penalty_weights: list[int] = field(default_factory=list)

    @property
    def f_max(self) -> int:
        return (1 << (self.layout.tau_f + 1)) - 1

    @property
    def g_max(self) -> int:
        return (1 << (self.layout.tau_g + 1)) - 1

    def factor_pairs(self) -> list[tuple[int, int]]:
        """All (f, g) with f*g == h inside the encoded widths, f ascending."""
        h = self.layout.h
        out = []
        f = 1
        while f <= min(self.f_max, h):
            if h % f == 0 and h // f <= self.g_max:
                out.append((f, h // f))
            f += 2
        return out

    def complete(self, f: int, g: int) -> tuple[int, ...]:
        """Assignment with the given factor bits, arithmetic carries, and
        consistent auxiliaries. Energy is 0 exactly when f*g == h."""
        if f % 2 == 0 or g % 2 == 0 or f < 1 or g < 1:
            raise ValueError("factors must be odd and positive")
        if f > self.f_max or g > self.g_max:
            raise ValueError("factor exceeds encoded width")
        bits = [0] * self.qubo.num_vars
        for i, vid in enumerate(self.f_ids):
            bits[vid] = (f >> (i + 1)) & 1
        for j, vid in enumerate(self.g_ids):
            bits[vid] = (g >> (j + 1)) & 1
        layout = self.layout
        carry_in = 0
        for i, w in enumerate(layout.widths):
            start = layout.starts[i]
            block_val = 0
            for k in range(start, start + w):
                lo = max(0, k - layout.tau_g)
                hi = min(layout.tau_f, k)
                col = sum(
                    ((f >> u) & 1) * ((g >> (k - u)) & 1) for u in range(lo, hi + 1)
                )
                block_val += col << (k - start)
            n_i = (layout.h >> start) & ((1 << w) - 1)
            t = block_val + carry_in - n_i
            carry_out = t >> w if t > 0 else 0
            cap = (1 << layout.carry_counts[i + 1]) - 1
            carry_out = min(carry_out, cap)
            for j, vid in enumerate(self.carry_ids[i + 1]):
                bits[vid] = (carry_out >> j) & 1
            carry_in = carry_out
        for aux, u, v in self.aux_defs:
            bits[aux] = bits[u] * bits[v]
        return tuple(bits)

    def decode(self, assignment) -> tuple[int, int]:
        f = 1
        for i, vid in enumerate(self.f_ids):
            f += assignment[vid] << (i + 1)
        g = 1
        for j, vid in enumerate(self.g_ids):
            g += assignment[vid] << (j + 1)
        return f, g


def encode_split(h: int, tau_f: int, tau_g: int, block_width: int = 2) -> MultTableEncoding:
    """Full encoding flow: layout, block polynomials, linearize, assemble."""
    layout = plan_layout(tau_f, tau_g, h, block_width)
    registry = VarRegistry()
    blocks, tv, registry = block_polys(layout, registry)
    problem, lin_blocks, aux_defs, weights = _assemble(blocks, registry)
    return MultTableEncoding(
        qubo=problem,
        layout=layout,
        blocks=blocks,
        f_ids=tv.f_ids,
        g_ids=tv.g_ids,
        carry_ids=tv.carry_ids,
        aux_defs=aux_defs,
        lin_blocks=lin_blocks,
        penalty_weights=weights,
    )


def direct_qubo(n: int, tau_p: int, tau_q: int) -> QuboProblem:
    """Whole-number encoding (n - p*q)^2 quadratized by pair substitution.

    Sizes grow with n^2, so this route is only sensible for small n; the
    table encoding above is the scalable one.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    if tau_p < 1 or tau_q < 1:
        raise ValueError("factor widths must be >= 1")
    if tau_p + tau_q + 2 < n.bit_length():
        raise Infeasible(f"n needs {n.bit_length()} bits, widths allow {tau_p + tau_q + 2}")
    registry = VarRegistry()
    p_ids = [registry.new(f"f{i}", "f") for i in range(1, tau_p + 1)]
    q_ids = [registry.new(f"g{j}", "g") for j in range(1, tau_q + 1)]
    p_poly = BinaryPoly.constant(1)
    for i, vid in enumerate(p_ids):
        p_poly = p_poly + BinaryPoly.var(vid, 1 << (i + 1))
    q_poly = BinaryPoly.constant(1)
    for j, vid in enumerate(q_ids):
        q_poly = q_poly + BinaryPoly.var(vid, 1 << (j + 1))
    diff = BinaryPoly.constant(n) - p_poly * q_poly
    squared = diff * diff
    quad, pens, _ = linearize(squared, registry, target_degree=2)
    rho = quad.abs_coeff_sum() ** 2 + 1
    total = quad.copy()
    for pen in pens:
        total = total + pen * rho
    return _poly_to_qubo(total, registry)


def decode(assignment, var_names: tuple[str, ...]) -> tuple[int, int]:
    """Read the factor values out of any assignment using variable names."""
    f, g = 1, 1
    for vid, name in enumerate(var_names):
        if not assignment[vid]:
            continue
        if name.startswith("f"):
            f += 1 << int(name[1:])
        elif name.startswith("g"):
            g += 1 << int(name[1:])
    return f, g


def write_qubo(problem: QuboProblem, out: TextIO) -> None:
    """Plain text dump: header, then one line per linear and quadratic term."""
    out.write(
        f"qubo {problem.num_vars} {len(problem.linear)} "
        f"{len(problem.quadratic)} {problem.offset}\n"
    )
    for i, name in enumerate(problem.var_names):
        role = problem.var_roles[i] if problem.var_roles else "?"
        out.write(f"# var {i} {name} {role}\n")
    for i in sorted(problem.linear):
        out.write(f"{i} {i} {problem.linear[i]}\n")
    for i, j in sorted(problem.quadratic):
        out.write(f"{i} {j} {problem.quadratic[(i, j)]}\n")


def read_qubo(src: TextIO) -> QuboProblem:
    header = None
    names: dict[int, str] = {}
    roles: dict[int, str] = {}
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    for line in src:
        line = line.strip()
        if not line:
            continue
        if line.startswith("# var "):
            _, _, idx, name, role = line.split()
            names[int(idx)] = name
            roles[int(idx)] = role
            continue
        if line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "qubo":
            header = [int(x) for x in parts[1:]]
            continue
        i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
        if i == j:
            linear[i] = v
        else:
            quadratic[(min(i, j), max(i, j))] = v
    if header is None:
        raise ValueError("missing qubo header line")
    num_vars, n_lin, n_quad, offset = header
    if len(linear) != n_lin or len(quadratic) != n_quad:
        raise ValueError("term counts disagree with header")
    return QuboProblem(
        num_vars=num_vars,
        linear=linear,
        quadratic=quadratic,
        offset=offset,
        var_names=tuple(names.get(i, f"u{i}") for i in range(num_vars)),
        var_roles=tuple(roles.get(i, "?") for i in range(num_vars)),
    )
