"""Command line surface and JSON documents for fans, fan maps and verification runs.

All JSON is written with sorted keys and integers or strings only, so two runs
on the same inputs give byte-identical files (verification reports differ
only in their ``timing_ms`` fields).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import intlinalg as il
from .charlat import (DIVISIBILITY, PSI_RELATIONS, TorsionError, build_N, check_psi_relation,
                      d4_span_check, dn_relation_check)
from .complexes import build_R, simplex_orbits
from .fancore import (FanData, FanError, build_F, build_G, convex_disjoint_certificate,
                      dual_basis_certificate, intersection_fan_certificate, is_fan,
                      is_fan_modulo_symmetry, sampled_is_fan, strict_simpliciality_report)
from .fanmaps import (UnsupportedMap, bisector_configurations, case_counts, eckhart_cones,
                      fiber_fan_E7, flatness_check, minimality_certificate, projection_map,
                      ray_image_table, refine_E6, refinement_volumes, union_of_cones_check)
from .rootsys import RootSystem, UnsupportedSystem, parse_system, root_label
from .subsys import enumerate_subsystems, subsystem_classes, d4_catalog
from . import units_eval as ue

SCHEMA_VERSION = 1
SYSTEMS = ["D3", "D4", "D5", "D6", "D7", "D8", "E6", "E7"]
TARGETS = ["R", "F", "G", "Ftilde"]
CHECKS = ["rank-table", "table1-relations", "messy-surjectivity", "strict-simplicial",
          "fan-pairwise", "intersection-fan", "convex-disjoint", "dual-basis", "ray-images",
          "flatness", "refinement", "eckhart", "eval-identities"]

RANK_TABLE = {"D4": 2, "D5": 5, "D6": 9, "D7": 14, "D8": 20, "E6": 15, "E7": 35}
DEFAULT_TARGET = {"D5": "D4", "D6": "D5", "D7": "D6", "D8": "D7", "E6": "D5", "E7": "E6"}
EXPECTED_VERDICT = {("E7", "E6"): "NOT FLAT"}
ZERO_RAYS = {("E6", "D5"): 16, ("E7", "E6"): 27}

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad arguments: reported with exit code 2."""


# ---------------------------------------------------------------- JSON helpers


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": "), allow_nan=False) + "\n"


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as ex:
        raise UsageError(f"not an exact rational: {s!r}") from ex


def _no_floats(obj: Any) -> None:
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in documents")
    if isinstance(obj, dict):
        for v in obj.values():
            _no_floats(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _no_floats(v)


def write_output(obj: Any, out: Optional[str]) -> None:
    _no_floats(obj)
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- cache


def cache_dir() -> Optional[Path]:
    d = os.environ.get("FANS_CACHE_DIR")
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cached(name: str, compute: Callable[[], Any]) -> Any:
    """JSON value memoized under FANS_CACHE_DIR (keyed by package version), if set."""
    d = cache_dir()
    if d is None:
        return compute()
    path = d / f"{name}-v{__version__}.json"
    if path.exists():
        return json.loads(path.read_text())
    value = compute()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(dumps(value))
    tmp.replace(path)
    return json.loads(dumps(value))


def orbit_table(sys: RootSystem) -> List[Dict[str, Any]]:
    """W-orbits of maximal simplices of R: representative and size."""
    def compute():
        cx = build_R(sys)
        return [{"representative": list(o[0]), "size": len(o)} for o in simplex_orbits(cx, cx.maximal)]
    return cached(f"orbits-{sys.name}", compute)


# ---------------------------------------------------------------- fan documents


@dataclass
class FanDocument:
    system: Dict[str, Any]
    lattice_rank: int
    target: str
    rays: List[Dict[str, Any]]
    cones: List[Any]
    provenance: Dict[str, Any]
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {"schema_version": self.schema_version, "system": self.system,
                "lattice_rank": self.lattice_rank, "target": self.target, "rays": self.rays,
                "cones": self.cones, "provenance": self.provenance}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "FanDocument":
        doc = FanDocument(d["system"], d["lattice_rank"], d["target"], d["rays"], d["cones"],
                          d["provenance"], d["schema_version"])
        doc.validate()
        return doc

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @staticmethod
    def loads(text: str) -> "FanDocument":
        return FanDocument.from_dict(json.loads(text))

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unknown schema version {self.schema_version}")
        npos = self.system["positive_roots"]
        for r in self.rays:
            if "vector" in r:
                v = r["vector"]
                if len(v) != self.lattice_rank or il.content(v) != 1:
                    raise ValueError(f"ray {v} is not primitive of length {self.lattice_rank}")
            if any(not 0 <= a < npos for a in r["roots"]):
                raise ValueError("root index out of range")
        for c in self.cones:
            idx = c if isinstance(c, list) else c.get("sigma", [])
            if any(not 0 <= i < len(self.rays) for i in idx):
                raise ValueError("cone index out of range")


def system_descriptor(sys: RootSystem) -> Dict[str, Any]:
    return {"name": sys.name, "kind": sys.kind, "rank": sys.rank, "positive_roots": len(sys),
            "roots": [list(v) for v in sys.positive_roots]}


def _ray_entries(fd: FanData, with_vectors: bool = True) -> List[Dict[str, Any]]:
    out = []
    for v, lab, s in zip(fd.rays, fd.labels, fd.subsystems):
        e = {"label": lab, "roots": sorted(s)}
        if with_vectors:
            e["vector"] = list(v)
        out.append(e)
    return out


def _diagram_dict(sys: RootSystem, dg) -> Dict[str, Any]:
    return {"kind": dg.kind, "roots": [root_label(sys, r) for r in dg.roots],
            "edges": [list(e) for e in dg.edges],
            "edge_roots": [root_label(sys, r) for r in dg.edge_roots],
            "extra": None if dg.extra is None else root_label(sys, dg.extra)}


def _require_nontrivial(sys: RootSystem) -> None:
    if sys.kind == "A" or build_N(sys).rank == 0:
        raise UsageError(f"{sys.name}: the unit lattice M is zero, so there is no fan to build")


def _ftilde_e7_cones(sys: RootSystem) -> Tuple[List[Any], Dict[str, Any]]:
    F = build_F(sys)
    rep = fiber_fan_E7()
    cones = []
    for sr in rep.sigmas:
        Z = F.cone_matrix(sr.sigma)
        for piece in sr.pieces:
            from .fanmaps import PolyCone
            pc = PolyCone.from_generators(piece.rays, len(sr.sigma))
            gens = [[sum(r[i] * Z[i][c] for i in range(len(Z))) for c in range(F.rank)] for r in piece.rays]
            facets = []
            for h in pc.facets().ineqs:
                f = il.solve_rational(Z, list(h))
                facets.append([int(x) for x in f])
            cones.append({"sigma": list(sr.sigma), "orbit_size": sr.orbit_size,
                          "generators": gens, "facets": sorted(facets)})
    prov = {"construction": "preimages of Ftilde(E6) chambers inside cones of F(E7)",
            "orbit_representatives": True, "orbits": rep.orbits, "cones_total": rep.cones_total,
            "pieces_total": rep.pieces_total}
    return cones, prov


def cmd_build(system: str, target: str) -> FanDocument:
    sys_ = load_system(system)
    _require_nontrivial(sys_)
    if target == "R":
        cx = build_R(sys_)
        fd = build_F(sys_)
        return FanDocument(system_descriptor(sys_), fd.rank, "R", _ray_entries(fd, False),
                           [list(s) for s in cx.maximal],
                           {"construction": "pairwise orthogonal-or-nested families"
                            + (" without Fano simplices" if sys_.name == "E7" else "")})
    if target == "F":
        fd = build_F(sys_)
        return FanDocument(system_descriptor(sys_), fd.rank, "F", _ray_entries(fd),
                           [list(c) for c in fd.cones], {"construction": "cones over simplices of R"})
    if target == "G":
        fd = build_G(sys_)
        dg = fd.meta["representative"]
        return FanDocument(system_descriptor(sys_), fd.rank, fd.name, _ray_entries(fd),
                           [list(c) for c in fd.cones],
                           {"construction": f"{dg.kind} diagrams", "diagram": _diagram_dict(sys_, dg),
                            "diagrams": fd.meta["diagrams"]})
    if target == "Ftilde":
        if sys_.name == "E6":
            sd = refine_E6(sys_)
            fd = sd.fan
            return FanDocument(system_descriptor(sys_), fd.rank, "Ftilde", _ray_entries(fd),
                               [list(c) for c in fd.cones],
                               {"construction": "barycentric subdivision of A1 faces of F(E6)",
                                "added_rays": list(sd.added), "parent_of": list(sd.parent_of)})
        if sys_.name == "E7":
            fd = build_F(sys_)
            cones, prov = _ftilde_e7_cones(sys_)
            return FanDocument(system_descriptor(sys_), fd.rank, "Ftilde", _ray_entries(fd), cones, prov)
        raise UsageError("Ftilde is defined for E6 and E7 only")
    raise UsageError(f"unknown target {target!r}")


def load_system(name: str) -> RootSystem:
    if name not in SYSTEMS:
        raise UsageError(f"unsupported system {name!r}; choose from {', '.join(SYSTEMS)}")
    try:
        return parse_system(name)
    except UnsupportedSystem as ex:
        raise UsageError(str(ex)) from ex


# ---------------------------------------------------------------- verification


@dataclass
class CheckRecord:
    check: str
    anchor: str
    status: str                     # pass, fail or skipped
    witnesses: Dict[str, Any] = field(default_factory=dict)
    timing_ms: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "anchor": self.anchor, "status": self.status,
                "witnesses": self.witnesses, "timing_ms": self.timing_ms}


@dataclass
class VerificationReport:
    system: str
    records: List[CheckRecord]
    schema_version: int = SCHEMA_VERSION

    @property
    def status(self) -> str:
        return "fail" if any(r.status == "fail" for r in self.records) else "pass"

    @property
    def first_failure(self) -> Optional[CheckRecord]:
        return next((r for r in self.records if r.status == "fail"), None)

    def to_dict(self) -> Dict[str, Any]:
        ff = self.first_failure
        return {"schema_version": self.schema_version, "system": self.system, "status": self.status,
                "first_failure": ff.check if ff else None,
                "records": [r.to_dict() for r in self.records]}


ANCHORS = {
    "rank-table": "rank of the unit lattice M equals the number of three-legged positive roots",
    "table1-relations": "linear relations and divisibility among psi of subsystems",
    "messy-surjectivity": "D4 units span M; N embeds in the product of the N(D4)",
    "strict-simplicial": "maximal cones are generated by part of a lattice basis",
    "fan-pairwise": "maximal cones meet along common faces",
    "intersection-fan": "each cone is cut out by its images in the D4 fans",
    "convex-disjoint": "cones form a convexly disjoint family",
    "dual-basis": "every ray of a maximal G cone has a dual D4 unit",
    "ray-images": "projection sends each ray to zero, a ray, or an interior point as tabulated",
    "flatness": "toric flatness and reducedness of the projection",
    "refinement": "refinements cover parent cones exactly and make the projection flat",
    "eckhart": "cones containing three orthogonal horizontal A1 rays",
    "eval-identities": "root-product units equal cross-ratios at exact rational points",
}


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _check_rank_table(sys: RootSystem, ctx: "Context") -> CheckRecord:
    try:
        N = build_N(sys)
    except TorsionError as ex:
        return CheckRecord("rank-table", "", "fail", {"error": str(ex)})
    tl = len(N.data.three_legged())
    want = RANK_TABLE.get(sys.name)
    ok = N.rank == tl and all(d == 1 for d in N.phi_divisors) and len(N.phi_divisors) == len(N.phi[0])
    if want is not None:
        ok = ok and N.rank == want
    return CheckRecord("rank-table", "", _status(ok),
                       {"rank_M": N.rank, "expected": want, "three_legged_roots": tl,
                        "phi_divisors_all_one": all(d == 1 for d in N.phi_divisors)})


def _check_table1(sys: RootSystem, ctx: "Context") -> CheckRecord:
    w: Dict[str, Any] = {}
    ok = True
    if sys.kind == "E":
        N = build_N(sys)
        rels = {}
        for rel in PSI_RELATIONS:
            if rel.system == sys.name:
                r = check_psi_relation(sys, rel)
                rels[rel.text] = {"ok": r.ok, "subsystems": r.representatives, "detail": r.detail}
                ok = ok and r.ok
        w["relations"] = rels
        divs = {}
        for name, label, d in DIVISIBILITY:
            if name == sys.name:
                subs = enumerate_subsystems(sys, label)
                m = 0
                for s in subs:
                    m = _gcd(m, il.content(N.psi_set(s)))
                divs[label] = {"claimed_divisor": d, "computed_divisibility": m}
                ok = ok and m % d == 0
        w["divisibility"] = divs
    elif sys.kind == "D" and sys.rank >= 4:
        r = dn_relation_check(sys)
        w["dn_relations"] = r
        ok = r
    else:
        return CheckRecord("table1-relations", "", "skipped", {"reason": "no relations tabulated"})
    return CheckRecord("table1-relations", "", _status(ok), w)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _check_messy(sys: RootSystem, ctx: "Context") -> CheckRecord:
    if sys.rank < 5 and sys.kind == "D":
        return CheckRecord("messy-surjectivity", "", "skipped", {"reason": "needs D5 or larger"})
    r = d4_span_check(sys)
    return CheckRecord("messy-surjectivity", "", _status(r.ok),
                       {"d4_subsystems": r.num_d4, "rank": r.rank,
                        "cokernel_trivial": all(d == 1 for d in r.cokernel_divisors)
                        and len(r.cokernel_divisors) == r.rank,
                        "kernel_rank": r.kernel_rank})


def _fans_for(sys: RootSystem, ctx: "Context") -> List[FanData]:
    fans = []
    if ctx.target in (None, "F", "R"):
        fans.append(build_F(sys))
    if ctx.target in (None, "G"):
        fans.append(build_G(sys))
    if ctx.target == "Ftilde":
        if sys.name != "E6":
            raise UsageError("strict-simplicial with --target Ftilde is available for E6")
        fans.append(refine_E6(sys).fan)
    return fans


def _check_strict(sys: RootSystem, ctx: "Context") -> CheckRecord:
    w = {}
    ok = True
    for fd in _fans_for(sys, ctx):
        r = strict_simpliciality_report(fd)
        w[fd.name] = {"cones": r.cones, "failures": r.failures[:10]}
        ok = ok and r.ok
    return CheckRecord("strict-simplicial", "", _status(ok), w)


def _check_pairwise(sys: RootSystem, ctx: "Context") -> CheckRecord:
    fd = build_F(sys)
    if ctx.exhaustive:
        r, mode = is_fan(fd), "all pairs"
    elif sys.name == "E7":
        r, mode = sampled_is_fan(fd, 100000, ctx.seed), "100000 sampled pairs"
    else:
        r, mode = is_fan_modulo_symmetry(fd, sys), "orbit representatives against all cones"
    w = {"mode": mode, "pairs_checked": r.pairs_checked,
         "witness": None if r.witness is None else list(r.witness)}
    return CheckRecord("fan-pairwise", "", _status(r.ok), w)


def _intersection(sys: RootSystem, ctx: "Context"):
    key = (sys.name, ctx.exhaustive)
    if key not in ctx.memo:
        fd = build_F(sys)
        if ctx.exhaustive and ctx.jobs > 1:
            ctx.memo[key] = _parallel_certificate(fd, sys, ctx.jobs)
        else:
            ctx.memo[key] = intersection_fan_certificate(fd, sys, exhaustive=ctx.exhaustive)
    return ctx.memo[key]


def _cert_chunk(args):
    name, cones = args
    sys_ = parse_system(name)
    return intersection_fan_certificate(build_F(sys_), sys_, cones=cones)


def _parallel_certificate(fd: FanData, sys: RootSystem, jobs: int):
    from concurrent.futures import ProcessPoolExecutor
    from .fancore import IntersectionFanReport
    idx = list(range(len(fd.cones)))
    chunks = [idx[k::jobs] for k in range(jobs)]
    with ProcessPoolExecutor(jobs) as ex:
        parts = list(ex.map(_cert_chunk, [(sys.name, c) for c in chunks]))
    failures = sorted(f for p in parts for f in p.failures)
    return IntersectionFanReport(sum(p.cones_checked for p in parts), sum(p.faces_checked for p in parts),
                                 False, len(fd.cones), failures)


def _check_intersection(sys: RootSystem, ctx: "Context") -> CheckRecord:
    if sys.kind == "D" and sys.rank < 5:
        return CheckRecord("intersection-fan", "", "skipped", {"reason": "F(D4) is the base case"})
    r = _intersection(sys, ctx)
    return CheckRecord("intersection-fan", "", _status(r.ok),
                       {"cones_checked": r.cones_checked, "faces_checked": r.faces_checked,
                        "orbit_representatives": r.orbit_representatives, "total_cones": r.total_cones,
                        "failures": [[k, list(c), msg] for k, c, msg in r.failures[:10]]})


def _check_convex(sys: RootSystem, ctx: "Context") -> CheckRecord:
    if sys.kind == "D" and sys.rank < 5:
        return CheckRecord("convex-disjoint", "", "skipped", {"reason": "F(D4) is the base case"})
    r = convex_disjoint_certificate(build_F(sys), sys, _intersection(sys, ctx))
    return CheckRecord("convex-disjoint", "", _status(r.premise_ok and r.certificate_ok),
                       {"verdict": r.verdict, "computed": r.computed, "schema": r.schema,
                        "d4_ray_images": [list(v) for v in r.premise_rays]})


def _check_dual(sys: RootSystem, ctx: "Context") -> CheckRecord:
    G = build_G(sys)
    dg = G.meta["representative"]
    cone = G.cones[0]
    r = dual_basis_certificate(G, sys, cone)
    ws = []
    for wt in r.witnesses:
        ws.append({"ray": wt.ray, "label": G.labels[wt.ray],
                   "roots": [root_label(sys, a) for a in sorted(G.subsystems[wt.ray])],
                   "plus": [root_label(sys, a) for a in sorted(wt.record.fourtuples[wt.i - 1])],
                   "minus": [root_label(sys, a) for a in sorted(wt.record.fourtuples[wt.j - 1])]})
    return CheckRecord("dual-basis", "", _status(r.ok),
                       {"cone": list(cone), "diagram": _diagram_dict(sys, dg), "units": ws,
                        "failures": [list(f) for f in r.failures]})


def _map_target(sys: RootSystem, ctx: "Context") -> Optional[RootSystem]:
    name = ctx.to or DEFAULT_TARGET.get(sys.name)
    return None if name is None else load_system(name)


def _check_ray_images(sys: RootSystem, ctx: "Context") -> CheckRecord:
    tgt = _map_target(sys, ctx)
    if tgt is None:
        return CheckRecord("ray-images", "", "skipped", {"reason": "no smaller system in the chain"})
    doc = map_document(sys, tgt, with_table=False)
    ok = doc["all_agree"]
    zero = ZERO_RAYS.get((sys.name, tgt.name))
    if zero is not None:
        ok = ok and doc["zero_rays"] == zero
    if (sys.name, tgt.name) == ("E7", "E6"):
        conf = bisector_configurations(limit=1)
        doc["bisector_configuration"] = None if not conf else {
            "sigma": list(conf[0].sigma), "target": list(conf[0].target),
            "bisector_ray": conf[0].bisector_ray, "pieces": conf[0].pieces}
        ok = ok and bool(conf) and conf[0].pieces > 1 and len(doc["kinds"]) == 3
    return CheckRecord("ray-images", "", _status(ok), doc)


def _check_flatness(sys: RootSystem, ctx: "Context") -> CheckRecord:
    tgt = _map_target(sys, ctx)
    if tgt is None:
        return CheckRecord("flatness", "", "skipped", {"reason": "no smaller system in the chain"})
    pi = _projection(sys, tgt)
    F, Ft = build_F(sys), build_F(tgt)
    r = flatness_check(pi, F, Ft)
    expected = EXPECTED_VERDICT.get((sys.name, tgt.name), "FLAT+REDUCED")
    off = [{"ray": i, "label": F.labels[i], "roots": sorted(F.subsystems[i])} for i in r.off_rays]
    w = {"verdict": r.verdict, "expected": expected, "off_rays": len(r.off_rays),
         "off_ray_labels": sorted({o["label"] for o in off}), "nonreduced_rays": len(r.nonreduced_rays),
         "bad_cones": len(r.bad_cones), "cones_checked": r.cones_checked,
         "first_off_rays": off[:5]}
    return CheckRecord("flatness", "", _status(r.verdict == expected), w)


def _check_refinement(sys: RootSystem, ctx: "Context") -> CheckRecord:
    if sys.name == "E6":
        sd = refine_E6(sys)
        vols = refinement_volumes(sd)
        ss = strict_simpliciality_report(sd.fan)
        mins = minimality_certificate()
        ok = (all(v == 1 for v in vols.values()) and len(vols) == len(sd.parent.cones)
              and ss.ok and all(m.minimal and m.consistent for m in mins))
        w = {"rays": len(sd.fan.rays), "added_rays": len(sd.added), "cones": len(sd.fan.cones),
             "parent_cones_covered": len(vols), "volumes_all_one": all(v == 1 for v in vols.values()),
             "strictly_simplicial": ss.ok,
             "minimality": [{"cone": list(m.cone), "forced": len(m.forced),
                             "refinement_rays": len(m.refinement_rays), "minimal": m.minimal,
                             "consistent": m.consistent} for m in mins]}
        return CheckRecord("refinement", "", _status(ok), w)
    if sys.name == "E7":
        u = union_of_cones_check()
        r = fiber_fan_E7()
        ok = u.ok and r.volumes_ok and r.flat and r.reduced and r.fan_ok
        w = {"union_of_cones_patterns": u.patterns, "union_of_cones_ok": u.ok,
             "orbits": r.orbits, "cones_total": r.cones_total, "refined_orbits": r.refined_orbits,
             "pieces_total": r.pieces_total, "simplicial_pieces": r.simplicial_pieces,
             "nonsimplicial_pieces": r.nonsimplicial_pieces, "volumes_all_one": r.volumes_ok,
             "verdict": "FLAT+REDUCED" if r.flat and r.reduced else ("FLAT" if r.flat else "NOT FLAT"),
             "pieces_meet_in_faces": r.fan_ok}
        return CheckRecord("refinement", "", _status(ok), w)
    return CheckRecord("refinement", "", "skipped", {"reason": "the projection is already flat"})


def _check_eckhart(sys: RootSystem, ctx: "Context") -> CheckRecord:
    if sys.name != "E7":
        return CheckRecord("eckhart", "", "skipped", {"reason": "defined over E7 -> E6"})
    r = eckhart_cones()
    F = build_F(sys)
    ok = r.orthogonal and r.nonflat_triples_found and len(r.triples) > 0
    return CheckRecord("eckhart", "", _status(ok),
                       {"triples": len(r.triples), "pairwise_orthogonal": r.orthogonal,
                        "maximal_cones_with_triple": r.cones_with_triple,
                        "triples_from_nonflat_rays": r.from_nonflat,
                        "example": [[root_label(sys, a) for a in sorted(F.subsystems[i])] for i in r.triples[0]]})


def _check_eval(sys: RootSystem, ctx: "Context") -> CheckRecord:
    rng = random.Random(ctx.seed)
    if sys.kind == "E":
        choices = ue.sample_index_choices(sys.rank, 10, rng)
        pts = [ue.random_point(sys, rng) for _ in range(100)]
        bad = [(list(c), [frac_str(q) for q in p.coords]) for c in choices for p in pts
               if not ue.cross_ratio_pullback_check(sys, c, p)]
        unit = ue.projection_unit(sys, choices[0])
        identity = "determinant cross-ratio = root product"
    elif sys.kind == "D" and sys.rank >= 4:
        import itertools
        allc = list(itertools.permutations(range(1, sys.rank + 1), 4))
        choices = rng.sample(allc, min(10, len(allc)))
        pts = [ue.random_point(sys, rng) for _ in range(100)]
        bad = [(list(c), [frac_str(q) for q in p.coords]) for c in choices for p in pts
               if not ue.forgetful_check(sys, c, p)]
        unit = ue.forgetful_unit(sys, choices[0])
        identity = "cross-ratio of squares = root product"
    else:
        return CheckRecord("eval-identities", "", "skipped", {"reason": "no identities for this system"})
    consts = []
    for _ in range(5):
        word = [rng.randrange(sys.rank) for _ in range(12)]
        wr = ue.weyl_ratio_check(sys, unit, word, pts[:20])
        consts.append(None if wr.constant is None else frac_str(wr.constant))
    ok = not bad and None not in consts
    return CheckRecord("eval-identities", "", _status(ok),
                       {"identity": identity, "points": len(pts), "index_choices": len(choices),
                        "mismatches": bad[:5], "weyl_ratio_constants": consts})


CHECK_FUNCS: Dict[str, Callable[[RootSystem, "Context"], CheckRecord]] = {
    "rank-table": _check_rank_table,
    "table1-relations": _check_table1,
    "messy-surjectivity": _check_messy,
    "strict-simplicial": _check_strict,
    "fan-pairwise": _check_pairwise,
    "intersection-fan": _check_intersection,
    "convex-disjoint": _check_convex,
    "dual-basis": _check_dual,
    "ray-images": _check_ray_images,
    "flatness": _check_flatness,
    "refinement": _check_refinement,
    "eckhart": _check_eckhart,
    "eval-identities": _check_eval,
}

# unambiguous leading words accepted as short forms
CHECK_ALIASES = {c.split("-")[0]: c for c in CHECKS
                 if sum(1 for d in CHECKS if d.split("-")[0] == c.split("-")[0]) == 1 and "-" in c}


@dataclass
class Context:
    target: Optional[str] = None
    to: Optional[str] = None
    exhaustive: bool = False
    seed: int = 0
    jobs: int = 1
    memo: Dict[Any, Any] = field(default_factory=dict)


def cmd_verify(system: str, checks: Sequence[str], ctx: Optional[Context] = None,
               documents: Sequence[FanDocument] = ()) -> VerificationReport:
    if not checks:
        raise UsageError("give at least one --check")
    checks = [CHECK_ALIASES.get(c, c) for c in checks]
    unknown = [c for c in checks if c not in CHECK_FUNCS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}")
    sys_ = load_system(system)
    _require_nontrivial(sys_)
    ctx = ctx or Context()
    records = []
    for doc in documents:
        records.append(_check_document(sys_, doc))
    for c in dict.fromkeys(checks):
        t0 = time.perf_counter()
        rec = CHECK_FUNCS[c](sys_, ctx)
        rec.anchor = ANCHORS[c]
        rec.timing_ms = int(1000 * (time.perf_counter() - t0))
        records.append(rec)
    return VerificationReport(sys_.name, records)


def _check_document(sys: RootSystem, doc: FanDocument) -> CheckRecord:
    """The document matches a fresh build."""
    ok = doc.system.get("name") == sys.name
    if ok and doc.target in ("F", "G", "G'", "R") or (ok and doc.target == "Ftilde" and sys.name == "E6"):
        fresh = cmd_build(sys.name, "G" if doc.target.startswith("G") else doc.target)
        ok = fresh.to_dict() == doc.to_dict()
    return CheckRecord("document", "input document agrees with a fresh build", _status(ok),
                       {"target": doc.target, "rays": len(doc.rays), "cones": len(doc.cones)})


# ---------------------------------------------------------------- maps


def _projection(sys: RootSystem, tgt: RootSystem):
    try:
        return projection_map(sys, tgt)
    except (UnsupportedMap, KeyError, ValueError, FanError) as ex:
        raise UsageError(f"unsupported map {sys.name} -> {tgt.name}: {ex}") from ex


SUPPORTED_MAPS = {("D5", "D4"), ("D6", "D5"), ("D7", "D6"), ("D8", "D7"), ("E6", "D5"), ("E7", "E6")}


def map_document(sys: RootSystem, tgt: RootSystem, with_table: bool = True) -> Dict[str, Any]:
    if (sys.name, tgt.name) not in SUPPORTED_MAPS and sys.name != tgt.name:
        raise UsageError(f"unsupported map {sys.name} -> {tgt.name}")
    _require_nontrivial(sys)
    pi = _projection(sys, tgt)
    F, Ft = build_F(sys), build_F(tgt)
    table = ray_image_table(pi)
    fl = flatness_check(pi, F, Ft)
    kinds: Dict[str, int] = {}
    for rec in table:
        kinds[rec.kind] = kinds.get(rec.kind, 0) + 1
    doc: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION, "source": sys.name, "target": tgt.name,
        "matrix": [list(r) for r in pi.matrix],
        "subsystem": sorted(pi.sub),
        "zero_rays": kinds.get("zero", 0), "kinds": dict(sorted(kinds.items())),
        "case_counts": case_counts(table), "all_agree": all(r.agrees for r in table),
        "fixed_rays": sum(1 for i, r in enumerate(table) if r.kind == "ray" and sys.name == tgt.name
                          and r.targets == (i,) and r.coeffs == (1,)),
        "verdict": fl.verdict,
    }
    if with_table:
        doc["rays"] = [{"ray": r.ray, "label": r.label, "roots": sorted(F.subsystems[r.ray]),
                        "kind": r.kind, "targets": list(r.targets), "coefficients": list(r.coeffs),
                        "case": r.case, "agrees": r.agrees} for r in table]
    return doc


def cmd_map(source: str, target: str) -> Dict[str, Any]:
    return map_document(load_system(source), load_system(target))


def cmd_refine(system: str) -> Dict[str, Any]:
    sys_ = load_system(system)
    rec = _check_refinement(sys_, Context())
    if rec.status == "skipped":
        raise UsageError("refine is defined for E6 and E7")
    return {"schema_version": SCHEMA_VERSION, "system": sys_.name, "status": rec.status,
            "summary": rec.witnesses}


# ---------------------------------------------------------------- eval and catalog


def _parse_ints(s: str) -> List[int]:
    try:
        return [int(x) for x in s.replace(" ", "").split(",") if x]
    except ValueError as ex:
        raise UsageError(f"expected comma-separated integers, got {s!r}") from ex


def cmd_eval(system: str, unit: str, point: Optional[str], seed: int) -> Dict[str, Any]:
    """Evaluate a named unit at an exact rational point (random admissible point if none given)."""
    sys_ = load_system(system)
    kind, _, arg = unit.partition(":")
    idx = _parse_ints(arg)
    if kind == "projection":
        if sys_.kind != "E" or len(idx) != 5 or len(set(idx)) != 5 or not all(1 <= i <= sys_.rank for i in idx):
            raise UsageError("projection:a,b,c,d,e needs E6/E7 and five distinct indices")
        m = ue.projection_unit(sys_, idx)
    elif kind == "forgetful":
        if sys_.kind != "D" or len(idx) != 4 or len(set(idx)) != 4 or not all(1 <= i <= sys_.rank for i in idx):
            raise UsageError("forgetful:i,j,k,l needs a D system and four distinct indices")
        m = ue.forgetful_unit(sys_, idx)
    elif kind == "exponents":
        if len(idx) != len(sys_):
            raise UsageError(f"exponents needs {len(sys_)} integers")
        m = idx
    else:
        raise UsageError("unit must be projection:..., forgetful:... or exponents:...")
    if point:
        vals = [parse_frac(s) for s in point.split(",")]
        if len(vals) != sys_.rank:
            raise UsageError(f"{sys_.name} needs {sys_.rank} coordinates")
        x = ue.ConfigPoint.of(sys_, vals)
    else:
        x = ue.random_point(sys_, random.Random(seed))
    bad = ue.offending_roots(sys_, x)
    if bad:
        raise UsageError(f"point lies on the hyperplane of root {root_label(sys_, bad[0])}")
    value = ue.evaluate_unit(sys_, m, x)
    out: Dict[str, Any] = {"system": sys_.name, "unit": unit, "point": [frac_str(q) for q in x.coords],
                           "value": frac_str(value), "in_M": bool(_member(sys_, m))}
    if kind == "projection":
        cr = ue.projection_cross_ratio(x.coords, idx)
        out["cross_ratio"] = frac_str(cr)
        out["orientation_sign"] = ue.orientation_sign(idx)
        out["agrees"] = cr == ue.orientation_sign(idx) * value
    elif kind == "forgetful":
        cr = ue.forgetful_cross_ratio(x.coords, idx)
        out["cross_ratio"] = frac_str(cr)
        out["orientation_sign"] = ue.orientation_sign(idx)
        out["agrees"] = cr == ue.orientation_sign(idx) * value
    return out


def _member(sys: RootSystem, m: Sequence[int]) -> bool:
    from .charlat import member_M
    return member_M(sys, m)


def cmd_catalog(system: str) -> Dict[str, Any]:
    sys_ = load_system(system)
    out: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "system": sys_.name,
                           "positive_roots": len(sys_), "subsystem_classes": subsystem_classes(sys_)}
    if sys_.kind == "D" and sys_.rank < 4:
        out["rank_M"] = 0
        return out
    N = build_N(sys_)
    cx = build_R(sys_)
    F = build_F(sys_)
    labels: Dict[str, int] = {}
    for lab in F.labels:
        labels[lab] = labels.get(lab, 0) + 1
    orbits = orbit_table(sys_)
    digest = hashlib.sha256(dumps([list(c) for c in F.cones]).encode()).hexdigest()
    out.update({"rank_M": N.rank, "d4_subsystems": len(d4_catalog(sys_)), "rays": len(F.rays),
                "ray_types": dict(sorted(labels.items())), "maximal_cones": len(cx.maximal),
                "maximal_cone_orbits": orbits, "cones_sha256": digest})
    return out


# ---------------------------------------------------------------- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adefans", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, system_required=True):
        sp.add_argument("--system", required=system_required, help=f"one of {', '.join(SYSTEMS)}")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)

    b = sub.add_parser("build", help="write a fan document")
    common(b)
    b.add_argument("--target", choices=TARGETS, default="F")

    v = sub.add_parser("verify", help="run checks, exit 0 iff all pass")
    common(v)
    v.add_argument("--check", action="append", default=[], metavar="ID", help=", ".join(CHECKS))
    v.add_argument("--target", choices=TARGETS)
    v.add_argument("--to")
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--input", action="append", default=[], metavar="PATH", help="fan document to compare")

    m = sub.add_parser("map", help="ray images and flatness of a projection")
    m.add_argument("--from", dest="source", required=True)
    m.add_argument("--to", required=True)
    m.add_argument("--out", metavar="PATH")
    m.add_argument("--jobs", type=int, default=1)

    r = sub.add_parser("refine", help="flattening refinements over E6")
    common(r)

    e = sub.add_parser("eval", help="evaluate a unit at an exact rational point")
    common(e)
    e.add_argument("--unit", required=True, help="projection:a,b,c,d,e | forgetful:i,j,k,l | exponents:...")
    e.add_argument("--point", help="comma-separated rationals such as 1/2,-3,5")

    c = sub.add_parser("catalog", help="subsystem and cone census")
    common(c)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be positive")
        if args.verb == "build":
            doc = cmd_build(args.system, args.target)
            write_output(doc.to_dict(), args.out)
            return EXIT_PASS
        if args.verb == "verify":
            docs = [FanDocument.loads(Path(p).read_text()) for p in args.input]
            ctx = Context(args.target, args.to, args.exhaustive, args.seed, args.jobs)
            rep = cmd_verify(args.system, args.check, ctx, docs)
            write_output(rep.to_dict(), args.out)
            for rec in rep.records:
                sys.stderr.write(f"{rec.status.upper():7s} {rec.check}\n")
            ff = rep.first_failure
            if ff is not None:
                sys.stderr.write(f"first failure: {ff.check}\n")
                return EXIT_FAIL
            return EXIT_PASS
        if args.verb == "map":
            write_output(cmd_map(args.source, args.to), args.out)
            return EXIT_PASS
        if args.verb == "refine":
            out = cmd_refine(args.system)
            write_output(out, args.out)
            return EXIT_PASS if out["status"] == "pass" else EXIT_FAIL
        if args.verb == "eval":
            out = cmd_eval(args.system, args.unit, args.point, args.seed)
            write_output(out, args.out)
            return EXIT_PASS if out.get("agrees", True) else EXIT_FAIL
        if args.verb == "catalog":
            write_output(cmd_catalog(args.system), args.out)
            return EXIT_PASS
    except UsageError as ex:
        sys.stderr.write(f"adefans: error: {ex}\n")
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as ex:
        if args.verb == "verify" and args.input:
            sys.stderr.write(f"adefans: error: bad input document: {ex}\n")
            return EXIT_USAGE
        raise
    except (FanError, TorsionError) as ex:
        sys.stderr.write(f"adefans: check failure: {ex}\n")
        return EXIT_FAIL
    return EXIT_USAGE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
