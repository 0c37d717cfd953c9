"""Gate gadgets for the hardness construction.

A gadget is a small set of firms and workers whose local equilibrium
behaves like a logic gate. Signals travel on workers: an input worker that
is already matched when the gadget's first firm moves reads as FALSE, one
that is still free reads as TRUE. Outputs are firms outside the gadget that
list a gadget worker first.

Each blueprint records internal preference lists (sockets appear as
placeholders) and the firm order the gadget needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

OR, AND, NOT, BRANCHING = "OR", "AND", "NOT", "BRANCHING"

# socket placeholders inside templates
IN1, IN2, OUT1, OUT2 = "<q>", "<q'>", "<p>", "<p'>"

# Templates: (firm lists, worker lists, firm order). Names are local symbols.
_TEMPLATES: dict[str, tuple[dict[str, list[str]], dict[str, list[str]], list[str], tuple[str, ...], tuple[str, ...]]] = {
    OR: (
        {"Ah1": [IN1, "a1"], "Ah2": [IN2, "a2"], "Ah3": ["a1", "a2", "a3"]},
        {"a1": ["Ah1", "Ah3"], "a2": ["Ah2", "Ah3"], "a3": ["Ah3", OUT1]},
        ["Ah1", "Ah2", "Ah3"],
        (IN1, IN2),
        (OUT1,),
    ),
    AND: (
        {"Bh1": [IN1, "b1"], "Bh2": [IN2, "b1"], "Bh3": ["b1", "b2"]},
        {"b1": ["Bh1", "Bh2", "Bh3"], "b2": ["Bh3", OUT1]},
        ["Bh1", "Bh2", "Bh3"],
        (IN1, IN2),
        (OUT1,),
    ),
    NOT: (
        {
            "Gh1": [IN1, "g1"],
            "Gh2": ["g3", "g4"],
            "Gh3": ["g2"],
            "Gh4": ["g1", "g2", "g3"],
            "Gh5": ["g3", "g1"],
        },
        {"g1": ["Gh1", "Gh5", "Gh4"], "g2": ["Gh4", "Gh3"], "g3": ["Gh4", "Gh2", "Gh5"], "g4": ["Gh2", OUT1]},
        ["Gh1", "Gh2", "Gh3", "Gh4", "Gh5"],
        (IN1,),
        (OUT1,),
    ),
    BRANCHING: (
        {
            "Dh1": [IN1, "d1"],
            "Dh2": ["d5", "d2"],
            "Dh3": ["d3"],
            "Dh4": ["d5", "d3", "d4"],
            "Dh5": ["d4", "d1", "d5"],
        },
        {
            "d1": ["Dh1", "Dh5", OUT1],
            "d2": ["Dh2", OUT2],
            "d3": ["Dh4", "Dh3"],
            "d4": ["Dh4", "Dh5"],
            "d5": ["Dh5", "Dh2", "Dh4"],
        },
        ["Dh1", "Dh2", "Dh3", "Dh4", "Dh5"],
        (IN1,),
        (OUT1, OUT2),
    ),
}


def gate_value(kind: str, free_inputs: tuple[bool, ...]) -> bool:
    """Whether the output firms take their gadget workers (the output reads TRUE)."""
    if kind == OR:
        return any(free_inputs)
    if kind == AND:
        return all(free_inputs)
    if kind == NOT:
        return not free_inputs[0]
    if kind == BRANCHING:
        return free_inputs[0]
    raise GadgetError(f"unknown gadget kind {kind!r}")


@dataclass(frozen=True)
class GadgetBlueprint:
    """One placed gadget: concrete agent names plus the lists it contributes.

    ``firm_lists`` / ``worker_lists`` cover the gadget's own agents only.
    ``socket_entries`` says what each socket agent must add to its own list
    (input workers list the gadget's first firm; output firms list a gadget
    worker). ``firm_order`` is the required relative order of gadget firms;
    output firms must come after all of them.
    """

    kind: str
    index: str
    firm_lists: dict[str, list[str]]
    worker_lists: dict[str, list[str]]
    firm_order: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    socket_entries: dict[str, str] = field(default_factory=dict)
    names: dict[str, str] = field(default_factory=dict)

    @property
    def firms(self) -> tuple[str, ...]:
        return tuple(self.firm_lists)

    @property
    def workers(self) -> tuple[str, ...]:
        return tuple(self.worker_lists)

    def name(self, sym: str) -> str:
        """Concrete name of a template symbol such as ``"Gh4"`` or ``"d1"``."""
        return self.names[sym]

    def output_worker(self, out: str) -> str:
        return self.socket_entries[out]


class GadgetError(ValueError):
    pass


def build_gadget(kind: str, index: str, inputs: tuple[str, ...], outputs: tuple[str, ...]) -> GadgetBlueprint:
    """Instantiate ``kind`` with agent names ``<symbol>_<index>`` and the given sockets."""
    if kind not in _TEMPLATES:
        raise GadgetError(f"unknown gadget kind {kind!r}")
    flists, wlists, order, in_syms, out_syms = _TEMPLATES[kind]
    if len(inputs) != len(in_syms) or len(outputs) != len(out_syms):
        raise GadgetError(f"{kind} takes {len(in_syms)} inputs and {len(out_syms)} outputs")
    prefix = kind.lower()
    names: dict[str, str] = {}
    for sym in list(flists) + list(wlists):
        names[sym] = f"{prefix}_{sym}_{index}"
    for sym, real in zip(in_syms, inputs):
        names[sym] = real
    for sym, real in zip(out_syms, outputs):
        names[sym] = real
    f = {names[p]: [names[q] for q in lst] for p, lst in flists.items()}
    w = {names[q]: [names[p] for p in lst] for q, lst in wlists.items()}
    entries: dict[str, str] = {}
    for sym in in_syms:
        owner = next(p for p, lst in flists.items() if sym in lst)
        entries[names[sym]] = names[owner]
    for sym in out_syms:
        owner = next(q for q, lst in wlists.items() if sym in lst)
        entries[names[sym]] = names[owner]
    return GadgetBlueprint(
        kind, index, f, w, tuple(names[x] for x in order), tuple(inputs), tuple(outputs), entries, names
    )


def gadget_sizes(kind: str) -> tuple[int, int]:
    flists, wlists, *_ = _TEMPLATES[kind]
    return len(flists), len(wlists)


# -- standalone harness -----------------------------------------------------


def harness(kind: str, free_inputs: tuple[bool, ...], output_order: tuple[int, ...] | None = None):
    """Embed one gadget with stub sockets; return (instance, position order, blueprint).

    A free input is a worker whose only acceptable firm is the gadget's.
    A matched input is simply absent: it was contracted before the gadget
    moves. Each output firm lists its gadget worker, then a private stub
    worker that accepts only it.
    """
    from ..model import make_instance

    n_in = len(_TEMPLATES[kind][3])
    n_out = len(_TEMPLATES[kind][4])
    if len(free_inputs) != n_in:
        raise GadgetError(f"{kind} has {n_in} inputs")
    ins = tuple(f"in{i + 1}" for i in range(n_in))
    outs = tuple(f"out{i + 1}" for i in range(n_out))
    g = build_gadget(kind, "0", ins, outs)
    fl = {p: list(v) for p, v in g.firm_lists.items()}
    wl = {q: list(v) for q, v in g.worker_lists.items()}
    for q, free in zip(ins, free_inputs):
        if free:
            wl[q] = [g.socket_entries[q]]
        else:
            for lst in fl.values():
                if q in lst:
                    lst.remove(q)
    for i, p in enumerate(outs):
        fl[p] = [g.socket_entries[p], f"stub{i + 1}"]
        wl[f"stub{i + 1}"] = [p]
    order = output_order if output_order is not None else tuple(range(n_out))
    pi = tuple(g.firm_order) + tuple(outs[i] for i in order)
    return make_instance(fl, wl, firms=pi), pi, g


def local_outcome(mu, g: GadgetBlueprint) -> set[tuple[str, str]]:
    own = set(g.firms) | set(g.workers)
    return {(p, q) for p, q in mu.pairs if p in own or q in own}
