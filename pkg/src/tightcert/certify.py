"""Tightness certificates: emission and independent verification.

A certificate is an ordered list of rule applications over a small graph of
contact surgery presentations (nodes) and single (+1)-surgery moves between
them (edges).  Every datum a rule consumes is recorded in the certificate,
and ``check_certificate`` re-derives each one — homology orders by Smith
normal form, rank facts by re-running the propagation engine, injectivity
by re-solving the cited triangle, surgery edges by cancellation and exact
diagram isomorphism — so a verifier needs no trust in the emitter.

The rule set
------------

stein_nonzero        Stein fillable structures have nonvanishing class.
overtwisted_zero     Overtwisted structures have vanishing class (present
                     for completeness; certificates never apply it).
nonzero_tight        A nonvanishing class forces tightness.
plus_one_pullback    The surgery map carries the source class to the result
                     class, so a nonzero result class forces a nonzero
                     source class.
plus_one_pushforward When the surgery map is injective (exact-triangle
                     ranks), a nonzero source class maps to a nonzero
                     result class.
all_minus_one_stein  A presentation whose coefficients are all -1 is Stein
                     fillable (vacuously, the empty presentation).
cancel_equivalent    Cancelling a (-1)-knot against its unstabilized (+1)
                     pushoff preserves the presented structure, so the
                     class transfers between presentations with the same
                     cancelled form.
same_diagram         Isomorphic presentations carry the same class.
h1_consistency       Audit rule: the presentation's first homology matches
                     the declared manifold.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CalculusError
from .rationals import (
    SurgeryCoeff,
    coeff as _coerce_coeff,
    min_split_count,
    neg_continued_fraction,
    pushoff_coeff_from_slope,
    residual_coeff,
)
from .diagrams import (
    PUSHOFF,
    ContactDiagram,
    add_unknot,
    cancel_pushoff_pairs,
    contact_pushoff,
    diagram_iso,
    empty_diagram,
    normalize_diagram,
    remove_component,
    set_coeff,
    tower_diagram,
    trefoil_surgery_diagram,
)
from .topology import HomologyResult, Manifold, h1
from .floer import (
    TriangleInstance,
    base_facts,
    propagate,
    tower_triangles,
    triangle_solve,
    unknot_triangle,
)

RULES = {
    "stein_nonzero": "a Stein fillable structure has nonvanishing contact class",
    "overtwisted_zero": "an overtwisted structure has vanishing contact class",
    "nonzero_tight": "a structure whose contact class does not vanish is tight",
    "plus_one_pullback": (
        "a contact (+1)-surgery maps the source class to the result class, "
        "so a nonzero result class forces a nonzero source class"
    ),
    "plus_one_pushforward": (
        "when the (+1)-surgery map is injective by the cited exact-triangle "
        "ranks, a nonzero source class maps to a nonzero result class"
    ),
    "all_minus_one_stein": (
        "a surgery presentation all of whose contact coefficients are -1 "
        "presents a Stein fillable structure"
    ),
    "cancel_equivalent": (
        "presentations with the same fully cancelled form present the same "
        "contact structure, so the class transfers"
    ),
    "same_diagram": "isomorphic presentations carry the same contact class",
    "h1_consistency": (
        "the first homology computed from the presentation matches the "
        "declared manifold"
    ),
}


def rules() -> dict[str, str]:
    """The fixed rule set: id -> statement."""
    return dict(RULES)


# ---------------------------------------------------------------------------
# Certificate data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContactNode:
    """A contact structure under discussion: an id, the manifold it lives
    on, and (when available) a surgery presentation of it."""

    nid: str
    manifold: Manifold
    diagram: ContactDiagram | None = None


@dataclass(frozen=True)
class SurgeryEdge:
    """A single contact (+1)-surgery from node ``src`` to node ``dst``.

    ``witness`` names the surgered knot: "pushoff:<cid>" for a fresh
    contact pushoff of component cid of the source diagram, or "unknot"
    for a fresh standard (tb -1, rot 0) Legendrian unknot.
    """

    eid: str
    src: str
    dst: str
    witness: str


@dataclass(frozen=True)
class Step:
    """One rule application.  ``refs`` are typed references into the
    certificate ((kind, value) pairs: node, edge, triangle index, order);
    ``gives`` is the derived fact (fact kind, node id)."""

    rule: str
    refs: tuple[tuple[str, str], ...]
    gives: tuple[str, str]

    def ref(self, kind: str) -> str:
        for k, v in self.refs:
            if k == kind:
                return v
        raise CalculusError(f"step {self.rule} carries no {kind} reference")


@dataclass
class Certificate:
    """A self-contained, machine-checkable tightness derivation."""

    slope: SurgeryCoeff
    conclusion: tuple[str, str]
    engine_stage: int
    nodes: dict[str, ContactNode]
    edges: dict[str, SurgeryEdge]
    rank_facts: dict[str, int]
    triangles: tuple[TriangleInstance, ...]
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of an independent check; ``step`` indexes the first failing
    step when the failure is attributable to one."""

    ok: bool
    step: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Shared construction helpers
# ---------------------------------------------------------------------------


def _group_text(group: HomologyResult) -> str:
    """Canonical "free:torsion" form, e.g. "0:5" or "1:" or "0:2,4"."""
    return f"{group.free_rank}:{','.join(str(t) for t in group.torsion)}"


def _h1_step(nid: str, diagram: ContactDiagram) -> Step:
    return Step(
        "h1_consistency",
        (("node", nid), ("group", _group_text(h1(diagram)))),
        ("h1", nid),
    )


@dataclass
class TowerChain:
    """The tower ladder used by every positive-branch certificate: nodes
    for the empty presentation, the circle bundle, and tower stages
    1..max_stage+1; the (+1)-edges between them; the exact rank facts; the
    triangle instances; and the steps deriving a nonzero class at every
    stage up to max_stage."""

    stage: int
    nodes: list[ContactNode]
    edges: list[SurgeryEdge]
    rank_facts: dict[str, int]
    triangles: tuple[TriangleInstance, ...]
    steps: list[Step]

    def top(self) -> str:
        return f"v{self.stage}"


def build_tower_chain(max_stage: int) -> TowerChain:
    """Assemble the ladder of tower presentations with a verified nonzero
    class at every stage 1..max_stage.

    Stage 1 cancels to the empty presentation (Stein route); each later
    stage is reached by (+1)-surgery on a fresh pushoff of the trefoil,
    with injectivity supplied by the consecutive-stage triangle at exact
    ranks.  The circle-bundle edge from the empty presentation is included
    and checked as well: it is the template the stage maps follow.
    """
    if not isinstance(max_stage, int) or max_stage < 1:
        raise CalculusError(f"tower depth must be a positive integer, got {max_stage!r}")
    triangles = (unknot_triangle(),) + tuple(tower_triangles(max_stage))
    run = propagate(base_facts(), triangles)
    if not run.consistent:
        raise CalculusError(f"rank engine contradiction: {run.contradiction.detail}")

    rank_facts: dict[str, int] = {}
    for m in (Manifold.s3(), Manifold.s1xs2(), Manifold.poincare()):
        rank_facts[m.text()] = run.db.exact_value(m)
    for k in range(1, max_stage + 1):
        m = Manifold.neg_tower(k)
        rank_facts[m.text()] = run.db.exact_value(m)

    nodes = [
        ContactNode("std", Manifold.s3(), empty_diagram()),
        ContactNode("eta", Manifold.s1xs2(), _circle_bundle_diagram()),
    ]
    edges = [SurgeryEdge("e_eta", "std", "eta", "unknot")]
    towers = {k: tower_diagram(k) for k in range(1, max_stage + 2)}
    for k in range(1, max_stage + 2):
        nodes.append(ContactNode(f"v{k}", Manifold.tower(k), towers[k]))
    for k in range(1, max_stage + 1):
        edges.append(SurgeryEdge(f"ev{k}", f"v{k}", f"v{k + 1}", "pushoff:c1"))

    steps = [
        Step("all_minus_one_stein", (("node", "std"),), ("stein", "std")),
        Step("stein_nonzero", (("node", "std"),), ("c_nonzero", "std")),
        Step(
            "plus_one_pushforward",
            (("edge", "e_eta"), ("triangle", "0")),
            ("c_nonzero", "eta"),
        ),
        Step(
            "cancel_equivalent",
            (("node", "v1"), ("node", "std")),
            ("c_nonzero", "v1"),
        ),
    ]
    for k in range(1, max_stage):
        steps.append(
            Step(
                "plus_one_pushforward",
                (("edge", f"ev{k}"), ("triangle", str(k))),
                ("c_nonzero", f"v{k + 1}"),
            )
        )
    return TowerChain(max_stage, nodes, edges, rank_facts, triangles, steps)


def _circle_bundle_diagram() -> ContactDiagram:
    d, _ = add_unknot(empty_diagram(), coeff=SurgeryCoeff(1))
    return d


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def certify_tight(r) -> Certificate:
    """Produce a tightness certificate for r-surgery on the right trefoil.

    Slope 1 is excluded (no tight extension exists there).  Companion
    coefficients that are negative or infinite give the direct Stein-
    fillability derivation; positive ones are split into unit pushoffs,
    reduced along the (-1)-chain, and bridged to the tower ladder.
    """
    r = _coerce_coeff(r)
    rp = pushoff_coeff_from_slope(r)  # raises for the excluded slope 1
    root_manifold = Manifold.trefoil_surgery(r)
    diagram = normalize_diagram(trefoil_surgery_diagram(r))

    if rp.is_infinite or rp < 0:
        nodes = {"y0": ContactNode("y0", root_manifold, diagram)}
        steps = (
            _h1_step("y0", diagram),
            Step("all_minus_one_stein", (("node", "y0"),), ("stein", "y0")),
            Step("stein_nonzero", (("node", "y0"),), ("c_nonzero", "y0")),
            Step("nonzero_tight", (("node", "y0"),), ("tight", "y0")),
        )
        return Certificate(
            slope=r,
            conclusion=("tight", "y0"),
            engine_stage=0,
            nodes=nodes,
            edges={},
            rank_facts={},
            triangles=(),
            steps=steps,
        )

    # Positive branch: k unit pushoffs, then a residual (-1)-chain of
    # length m (m = 0 exactly when rp is a unit fraction).
    if rp.num == 1:
        stage = rp.den
        chain_ids: list[str] = []
    else:
        stage = min_split_count(rp)
        # The chain knots are the (-1)-components other than the trefoil,
        # in creation order: the original pushoff first, then the knots
        # appended by the conversion.
        chain_ids = [
            c.cid
            for c in diagram.components
            if c.kind == PUSHOFF and c.coeff == SurgeryCoeff(-1)
        ]
        expected_len = len(neg_continued_fraction(residual_coeff(rp, stage)))
        assert len(chain_ids) == expected_len

    chain = build_tower_chain(stage)
    nodes = {n.nid: n for n in chain.nodes}
    edges = {e.eid: e for e in chain.edges}

    path_nodes = [ContactNode("y0", root_manifold, diagram)]
    path_edges = []
    cur = diagram
    for i, cid in enumerate(reversed(chain_ids), start=1):
        cur = remove_component(cur, cid)
        path_nodes.append(
            ContactNode(
                f"y{i}",
                Manifold.opaque(f"reduction stage {i} of trefoil surgery {r}"),
                cur,
            )
        )
        path_edges.append(
            SurgeryEdge(f"ey{i}", f"y{i - 1}", f"y{i}", f"pushoff:{cid}")
        )
    m = len(path_edges)
    for n in path_nodes:
        nodes[n.nid] = n
    for e in path_edges:
        edges[e.eid] = e

    steps = list(chain.steps)
    steps.append(
        Step(
            "same_diagram",
            (("node", f"y{m}"), ("node", chain.top())),
            ("c_nonzero", f"y{m}"),
        )
    )
    for i in range(m, 0, -1):
        steps.append(
            Step(
                "plus_one_pullback",
                (("edge", f"ey{i}"),),
                ("c_nonzero", f"y{i - 1}"),
            )
        )
    steps.append(Step("nonzero_tight", (("node", "y0"),), ("tight", "y0")))

    audit = [_h1_step(n.nid, n.diagram) for n in nodes.values() if n.diagram is not None]
    return Certificate(
        slope=r,
        conclusion=("tight", "y0"),
        engine_stage=stage,
        nodes=nodes,
        edges=edges,
        rank_facts=chain.rank_facts,
        triangles=chain.triangles,
        steps=tuple(audit) + tuple(steps),
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def check_certificate(cert: Certificate) -> VerificationResult:
    """Re-derive every claim in a certificate; reports the first failure.

    Structural checks first (slope binding, known triangle instances,
    engine-verified rank facts, validity of every recorded edge), then the
    steps in order under the premise discipline, then the final conclusion.
    """
    try:
        return _check(cert)
    except CalculusError as exc:
        return VerificationResult(False, None, f"structural error: {exc}")


def _fail(step, reason):
    return VerificationResult(False, step, reason)


def _check(cert: Certificate) -> VerificationResult:
    if cert.conclusion[0] != "tight":
        return _fail(None, f"unsupported conclusion kind {cert.conclusion[0]!r}")
    root = cert.nodes.get(cert.conclusion[1])
    if root is None:
        return _fail(None, f"conclusion names unknown node {cert.conclusion[1]!r}")

    # The header must be bound to the content: the conclusion node carries
    # the named trefoil surgery and the canonical presentation of the slope.
    if root.manifold != Manifold.trefoil_surgery(cert.slope):
        return _fail(None, "conclusion node does not carry the declared slope")
    expected = normalize_diagram(trefoil_surgery_diagram(cert.slope))
    if root.diagram is None or not diagram_iso(root.diagram, expected):
        return _fail(
            None, "conclusion presentation does not match the declared slope"
        )

    # Triangle instances must come from the engine's known families.
    known = [unknot_triangle()]
    if cert.engine_stage >= 1:
        known += tower_triangles(cert.engine_stage)
    for tri in cert.triangles:
        if tri not in known:
            return _fail(None, f"unknown triangle instance {tri.a.text()} -> "
                         f"{tri.b.text()} -> {tri.c.text()}")

    # Rank facts must be reproduced exactly by a fresh propagation run.
    if cert.rank_facts:
        if cert.engine_stage < 1:
            return _fail(None, "rank facts cited without an engine stage")
        run = propagate(
            base_facts(), (unknot_triangle(),) + tuple(tower_triangles(cert.engine_stage))
        )
        if not run.consistent:
            return _fail(None, f"rank engine contradiction: {run.contradiction.detail}")
        for text, value in cert.rank_facts.items():
            m = Manifold.parse(text)
            got = run.db.fact(m)
            if not got.is_exact or got.lo != value:
                return _fail(
                    None,
                    f"rank fact {text} = {value} is not engine-verified (engine: {got})",
                )

    # Every recorded edge must be a valid single (+1)-surgery.
    for eid in cert.edges:
        problem = _edge_problem(cert, eid)
        if problem:
            return _fail(None, f"edge {eid}: {problem}")

    # Replay the steps.
    have: set[tuple[str, str]] = set()
    for idx, step in enumerate(cert.steps):
        verdict = _check_step(cert, step, have)
        if verdict is not None:
            return _fail(idx, verdict)
        have.add(step.gives)

    if not cert.steps or cert.steps[-1].gives != cert.conclusion:
        return _fail(None, "final step does not establish the conclusion")
    return VerificationResult(True)


def _edge_problem(cert, eid):
    edge = cert.edges[eid]
    src = cert.nodes.get(edge.src)
    dst = cert.nodes.get(edge.dst)
    if src is None or dst is None:
        return "endpoints not present"
    if src.diagram is None or dst.diagram is None:
        return "endpoints carry no presentations"
    d = src.diagram
    if edge.witness == "unknot":
        d, wid = add_unknot(d, tb=-1, rot=0)
    elif edge.witness.startswith("pushoff:"):
        cid = edge.witness[len("pushoff:"):]
        if cid not in d:
            return f"witness parent {cid!r} missing from the source"
        d, wid = contact_pushoff(d, cid)
    else:
        return f"unknown witness {edge.witness!r}"
    d = set_coeff(d, wid, SurgeryCoeff(1))
    if not diagram_iso(cancel_pushoff_pairs(d), cancel_pushoff_pairs(dst.diagram)):
        return "surgered source does not cancel to the target presentation"
    return None


def _check_step(cert, step, have):
    rule = step.rule
    if rule not in RULES:
        return f"rule {rule!r} is not in the rule set"
    if rule == "overtwisted_zero":
        return "rule derives a vanishing class; no tightness certificate may use it"

    if rule == "h1_consistency":
        node = cert.nodes.get(step.ref("node"))
        if node is None or node.diagram is None:
            return "node has no presentation to audit"
        group = h1(node.diagram)
        recorded = step.ref("group")
        if _group_text(group) != recorded:
            return (
                f"presentation has h1 {_group_text(group)}, "
                f"certificate says {recorded}"
            )
        declared = node.manifold.expected_h1_order()
        if declared is not None and group.cyclic_order() != declared:
            return (
                f"declared manifold {node.manifold.text()} has cyclic h1 of "
                f"order {declared}, presentation gives {_group_text(group)}"
            )
        if step.gives != ("h1", node.nid):
            return "derived fact does not match the audited node"
        return None

    if rule == "all_minus_one_stein":
        node = cert.nodes.get(step.ref("node"))
        if node is None or node.diagram is None:
            return "node has no presentation"
        for c in node.diagram.components:
            if c.coeff != SurgeryCoeff(-1):
                return f"component {c.cid} carries {c.coeff}, not -1"
        if step.gives != ("stein", node.nid):
            return "derived fact does not match the node"
        return None

    if rule == "stein_nonzero":
        nid = step.ref("node")
        if ("stein", nid) not in have:
            return f"premise stein({nid}) not yet derived"
        if step.gives != ("c_nonzero", nid):
            return "derived fact does not match the node"
        return None

    if rule == "nonzero_tight":
        nid = step.ref("node")
        if ("c_nonzero", nid) not in have:
            return f"premise c_nonzero({nid}) not yet derived"
        if step.gives != ("tight", nid):
            return "derived fact does not match the node"
        return None

    if rule == "plus_one_pullback":
        edge = cert.edges.get(step.ref("edge"))
        if edge is None:
            return "edge not present"
        if ("c_nonzero", edge.dst) not in have:
            return f"premise c_nonzero({edge.dst}) not yet derived"
        if step.gives != ("c_nonzero", edge.src):
            return "derived fact does not match the edge source"
        return None

    if rule == "plus_one_pushforward":
        edge = cert.edges.get(step.ref("edge"))
        if edge is None:
            return "edge not present"
        if ("c_nonzero", edge.src) not in have:
            return f"premise c_nonzero({edge.src}) not yet derived"
        try:
            tri = cert.triangles[int(step.ref("triangle"))]
        except (IndexError, ValueError):
            return "cited triangle not present"
        if tri.informational:
            return "informational triangle instances cannot justify injectivity"
        src = cert.nodes[edge.src]
        dst = cert.nodes[edge.dst]
        try:
            if tri.a != src.manifold.mirror() or tri.b != dst.manifold.mirror():
                return "triangle vertices do not match the edge endpoints"
        except CalculusError as exc:
            return str(exc)
        ranks = []
        for m in (tri.a, tri.b, tri.c):
            value = cert.rank_facts.get(m.text())
            if value is None:
                return f"rank fact for {m.text()} not in the certificate"
            ranks.append(value)
        sol = triangle_solve(*ranks)
        if not sol.f_injective:
            return f"triangle ranks {tuple(ranks)} do not make the map injective"
        if step.gives != ("c_nonzero", edge.dst):
            return "derived fact does not match the edge target"
        return None

    if rule in ("cancel_equivalent", "same_diagram"):
        target_id = step.refs[0][1]
        source_id = step.refs[1][1]
        target = cert.nodes.get(target_id)
        source = cert.nodes.get(source_id)
        if target is None or source is None:
            return "nodes not present"
        if target.diagram is None or source.diagram is None:
            return "nodes carry no presentations"
        if ("c_nonzero", source_id) not in have:
            return f"premise c_nonzero({source_id}) not yet derived"
        if rule == "same_diagram":
            same = diagram_iso(target.diagram, source.diagram)
        else:
            same = diagram_iso(
                cancel_pushoff_pairs(target.diagram),
                cancel_pushoff_pairs(source.diagram),
            )
        if not same:
            return "presentations do not match"
        if step.gives != ("c_nonzero", target_id):
            return "derived fact does not match the target node"
        return None

    return f"rule {rule!r} has no checker"
