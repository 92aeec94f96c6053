"""JSON, CSV and OBJ formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .duality import DualComplex
from .forms import DESITTER2, SPHERE2, Kind, conformal_chart, conformal_chart_inverse, ModelPoint
from .hipped import HippedData, Mesh, build
from .holonomy import Generator, IsometryMatrix, Representation
from .killing import KillingGenerator
from .polygons import Polygon
from .solvers import FREE, Fixed, PatternSpec, Shared, Sweep

MODELS = {"sphere": SPHERE2, "desitter": DESITTER2}


class FormatError(ValueError):
    pass


def model_from_name(name: str):
    try:
        return MODELS[name]
    except KeyError:
        raise FormatError(f"unknown model {name!r}") from None


def model_name(model) -> str:
    return "sphere" if model.kind is Kind.SPHERE2 else "desitter"


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def _floats(x):
    return np.asarray(x, float).tolist()


def polygon_to_json(p: Polygon) -> dict:
    return {"model": model_name(p.model), "vertices": _floats(p.vertices)}


def polygon_from_json(obj) -> Polygon:
    try:
        return Polygon(model_from_name(obj["model"]), np.asarray(obj["vertices"], float))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad polygon JSON: {exc}") from None


def hipped_to_json(hd: HippedData) -> dict:
    return {"space": hd.space, "d": hd.d, "polygon": polygon_to_json(hd.polygon)}


def hipped_from_json(obj) -> HippedData:
    try:
        return build(obj["space"], int(obj["d"]), polygon_from_json(obj["polygon"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad hipped JSON: {exc}") from None


def representation_to_json(rep: Representation) -> dict:
    return {"signature": list(rep.signature),
            "generators": [{"label": g.label, "matrix": _floats(g.matrix.entries),
                            "mask": bool(g.mask)} for g in rep.generators]}


def representation_from_json(obj) -> Representation:
    try:
        sig = tuple(int(v) for v in obj["signature"])
        gens = tuple(Generator(str(g["label"]), IsometryMatrix(np.asarray(g["matrix"], float), sig),
                               bool(g.get("mask", False)), bool(g.get("hypersurface", False)))
                     for g in obj["generators"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad representation JSON: {exc}") from None
    return Representation(sig, gens)


def dual_complex_to_json(dc: DualComplex) -> dict:
    return {"vertices": [_floats(v.coords) for v in dc.vertices],
            "edge_lengths": _floats(dc.edge_lengths),
            "face_signature": list(dc.face_signature),
            "degenerate": dc.degenerate}


def killing_to_json(u: KillingGenerator) -> dict:
    return {"d": u.d, "matrix": _floats(u.u)}


def killing_from_json(obj) -> KillingGenerator:
    try:
        return KillingGenerator(np.asarray(obj["matrix"], float), int(obj["d"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad Killing JSON: {exc}") from None


def _entry_from_json(e):
    if e == "free":
        return FREE
    if isinstance(e, dict) and len(e) == 1:
        if "fixed" in e:
            return Fixed(float(e["fixed"]))
        if "shared" in e:
            return Shared(str(e["shared"]))
    raise FormatError(f"bad pattern entry {e!r}")


def _entry_to_json(e):
    if isinstance(e, Fixed):
        return {"fixed": e.value}
    if isinstance(e, Shared):
        return {"shared": e.group}
    return "free"


def spec_from_json(obj) -> PatternSpec:
    try:
        return PatternSpec(model_from_name(obj["model"]), int(obj["k"]),
                           tuple(_entry_from_json(e) for e in obj["lengths"]),
                           tuple(_entry_from_json(e) for e in obj["angles"]),
                           bool(obj.get("symmetry", False)))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad spec JSON: {exc}") from None


def spec_to_json(spec: PatternSpec) -> dict:
    return {"model": model_name(spec.model), "k": spec.k,
            "lengths": [_entry_to_json(e) for e in spec.lengths],
            "angles": [_entry_to_json(e) for e in spec.angles],
            "symmetry": spec.symmetry}


def write_sweep_csv(sweep: Sweep, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "length", "angle"])
        for r in sweep.rows:
            w.writerow([f"{r.alpha:.17g}", f"{r.length:.17g}", f"{r.angle:.17g}"])


def read_sweep_csv(path) -> list[tuple[float, float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["alpha"]), float(r["length"]), float(r["angle"])) for r in rows]


# --- OBJ ---------------------------------------------------------------------

def project_vertex(space: str, x: np.ndarray) -> np.ndarray:
    """3D display coordinates of a point of a d = 2 build.

    Hyperbolic points go to the Klein ball.  AdS points go through the
    inverse conformal chart to (y_1, y_2, theta), where y is the Klein
    (gnomonic) image x_{1,2}/x_0 of the hemisphere point and theta lies in
    (-pi, pi].
    """
    if space == "hyp":
        return x[:3] / x[3]
    theta, xs = conformal_chart_inverse(ModelPoint(x, _ads3()))
    theta = theta - 2 * np.pi if theta > np.pi else theta
    return np.array([xs[1] / xs[0], xs[2] / xs[0], theta])


def lift_vertex(space: str, y: np.ndarray) -> np.ndarray:
    """Inverse of project_vertex."""
    y = np.asarray(y, float)
    if space == "hyp":
        return np.concatenate([y, [1.0]]) / np.sqrt(1 - y @ y)
    x = np.array([1.0, y[0], y[1]]) / np.sqrt(1 + y[0] ** 2 + y[1] ** 2)
    return conformal_chart(y[2], x).coords


def _ads3():
    from .forms import anti_de_sitter
    return anti_de_sitter(3)


def export_mesh_obj(mesh: Mesh, hd: HippedData, path) -> int:
    if hd.d != 2:
        raise ValueError("OBJ export needs a d = 2 build")
    if len(mesh.vertices) == 0 or not mesh.faces:
        raise ValueError("mesh is empty")
    lines = []
    for x in mesh.vertices:
        y = project_vertex(hd.space, x)
        lines.append("v %.17g %.17g %.17g" % tuple(y))
    for f in mesh.faces:
        lines.append("f " + " ".join(str(i + 1) for i in f))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return len(mesh.vertices)


def read_obj(path) -> tuple[np.ndarray, list]:
    verts, faces = [], []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "f":
            faces.append(tuple(int(v.split("/")[0]) - 1 for v in parts[1:]))
    return np.array(verts), faces
