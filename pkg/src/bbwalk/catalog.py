"""Named test groups and group specs used by experiments and tests."""

from __future__ import annotations

from typing import Callable

from .groups import (
    GeneratorList,
    cyclic,
    dihedral4,
    elementary_abelian_2,
    load_table,
    make_permutation_group,
    perm_from_cycles,
    quaternion8,
    symmetric3,
)
from .pauli import FunctionOracle, PauliReducedGroup, usc_instance


def _extend(factory, extra: Callable):
    """Append products of existing generators to a catalog list."""
    def build():
        g, gens = factory()
        more = [g.mul(*(gens[i] for i in idx)) for idx in extra]
        return g, GeneratorList(g, list(gens) + more)
    return build


def _z4_all():
    g, _ = cyclic(4)
    return g, GeneratorList(g, [g.element(i) for i in range(4)])


def _z2z2():
    g, gens = elementary_abelian_2(2)
    return g, GeneratorList(g, list(gens) + [g.mul(gens[1], gens[2])])


def _s3x():
    return make_permutation_group(3, [perm_from_cycles(3, [(1, 2)]), perm_from_cycles(3, [(1, 2, 3)]),
                                      perm_from_cycles(3, [(2, 3)])], name="S3")


CATALOG: dict[str, Callable] = {
    "Z4": _z4_all,
    "Z2xZ2": _z2z2,
    "Z2^3": lambda: elementary_abelian_2(3),
    "S3": symmetric3,
    "S3x": _s3x,
    "D4": dihedral4,
    "D4x": _extend(dihedral4, [(1, 2)]),
    "Q8": quaternion8,
    "Q8x": _extend(quaternion8, [(1, 2)]),
}

GENERATOR_NOTES = {
    "Z4": "(0, 1, 2, 3)",
    "Z2xZ2": "(e, a, b, ab)",
    "Z2^3": "(e, a, b, c)",
    "S3": "(e, (12), (123))",
    "S3x": "(e, (12), (123), (23))",
    "D4": "(e, r, s)",
    "D4x": "(e, r, s, rs)",
    "Q8": "(1, i, j)",
    "Q8x": "(1, i, j, ij)",
}


def pauli_group(k: int, kind: str, seed: int, pad_to: int | None = None):
    """Pauli reduction group with generators ``(e, 0, ..., k-1)``.

    ``pad_to`` appends products of consecutive generator pairs until the list
    has that length (used to fit a ``k = 2`` instance into a 4-generator walk).
    """
    group = PauliReducedGroup(usc_instance(k, kind, seed))
    gens = list(group.generators())
    i = 1
    while pad_to is not None and len(gens) < pad_to:
        gens.append(group.mul(gens[i], gens[i + 1]))
        i += 1
    return group, GeneratorList(group, gens)


def build_group(spec):
    """Resolve a group spec.

    Accepted forms: a catalog name; ``{"type": "catalog", "name": ...}``;
    ``{"type": "table", "path": ...}`` (identity is prepended to all elements
    as the generator list); ``{"type": "permutation", "degree": m,
    "cycles": [[[1, 2]], ...]}``; ``{"type": "pauli", "k": .., "kind": ..,
    "seed": .., "pad_to": ..}`` or ``{"type": "pauli", "values": [...]}``.
    """
    if isinstance(spec, str):
        spec = {"type": "catalog", "name": spec}
    kind = spec.get("type", "catalog")
    if kind == "catalog":
        try:
            return CATALOG[spec["name"]]()
        except KeyError:
            raise ValueError(f"unknown catalog group {spec['name']!r}; known: {sorted(CATALOG)}") from None
    if kind == "table":
        g = load_table(spec["path"])
        return g, GeneratorList(g, g.elements())
    if kind == "permutation":
        m = spec["degree"]
        perms = [perm_from_cycles(m, [tuple(c) for c in cyc]) for cyc in spec["cycles"]]
        return make_permutation_group(m, perms)
    if kind == "pauli":
        if "values" in spec:
            group = PauliReducedGroup(FunctionOracle(spec["values"]))
            return group, group.generators()
        return pauli_group(spec["k"], spec["kind"], spec["seed"], spec.get("pad_to"))
    raise ValueError(f"invalid group spec {spec!r}")
