"""The ``az`` command line tool.

Subcommands: build, invert, probs, arctic, heightmap, tropical, shuffle,
verify.  All randomness is seeded; identical configurations produce
byte-identical CSV/JSON outputs.  Errors exit with status 1 and a
structured JSON message on stdout.  The environment variable AZ_THREADS
caps worker parallelism for embarrassingly parallel fills (default 1).
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import random
import sys
import time
from fractions import Fraction
from typing import Dict, Optional

import numpy as np


def _json_complex(z: complex) -> Dict[str, str]:
    return {"re": f"{z.real:.17g}", "im": f"{z.imag:.17g}"}


def _parse_angle(spec) -> complex:
    if isinstance(spec, dict):
        return complex(float(spec["re"]), float(spec["im"]))
    if isinstance(spec, str) and spec.startswith("exp("):
        # exp(i*2*pi*k/m)
        inner = spec[4:-1]
        inner = inner.replace("i*", "").replace("*i", "")
        val = eval(inner, {"__builtins__": {}}, {"pi": math.pi})  # noqa: S307
        return cmath.exp(1j * val)
    raise ValueError(f"cannot parse angle {spec!r}")


def _load_graph(args):
    from . import presets

    if args.preset:
        return presets.get_preset(args.preset)
    from .lattice import build_torus_graph

    with open(args.graph) as fh:
        return build_torus_graph(json.load(fh))


def _selection(args, az_sides: int) -> Dict[int, Fraction]:
    from . import presets

    if args.c:
        out = {}
        for part in args.c.split(","):
            key, val = part.split("=")
            out[int(key.lstrip("e")) - 1] = Fraction(val)
        return out
    if args.preset == "square1x1" or args.order:
        return presets.aztec_selection(args.order or 1)
    return presets.preset_selection(args.preset)


def _angles(args, az):
    from .kasteleyn import AngleAssignment, evenly_spaced_angles, random_angles

    if args.angles and args.angles.startswith("even"):
        return evenly_spaced_angles(az)
    if args.angles and args.angles.startswith("random"):
        rng = random.Random(args.seed)
        return random_angles(az, rng)
    if args.angles:
        with open(args.angles) as fh:
            doc = json.load(fh)
        by = {int(k): _parse_angle(v) for k, v in doc.items()}
        return AngleAssignment(by_strand=by)
    return evenly_spaced_angles(az)


def cmd_build(args) -> dict:
    from .azgraph import check_admissibility, construct_az_graph
    from .lattice import torus_graph_to_json

    g = _load_graph(args)
    az = construct_az_graph(g, _selection(args, 0))
    adm, deg = check_admissibility(az)
    out = {
        "preset": args.preset,
        "whites": len(az.whites),
        "blacks": len(az.blacks),
        "edges": len(az.edges),
        "admissible": adm,
        "deg_D_beta": deg,
        "colors": {f"e{e + 1}": ("black" if c > 0 else "white")
                   for e, c in sorted(az.colors.items())},
        "selection": {f"e{e + 1}": str(c) for e, c in sorted(az.selection.items())},
    }
    if args.out:
        doc = {
            "graph": torus_graph_to_json(g),
            "selection": {str(e): str(c) for e, c in az.selection.items()},
            "vertices": {
                "white": [list(map(str, v)) for v in az.whites],
                "black": [list(map(str, v)) for v in az.blacks],
            },
            "D_beta": {
                f"{sid}:{idx}": c for (sid, idx), c in sorted(az.D_beta.coeffs.items())
            },
            "admissible": adm,
        }
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
    if args.svg:
        from .render import render_az_graph

        render_az_graph(az, args.svg)
    return out


def cmd_invert(args) -> dict:
    from .azgraph import construct_az_graph
    from .kasteleyn import (
        Numeric,
        inverse_entry_quadrature,
        inverse_matrix,
        kasteleyn_matrix,
        verify_inverse,
    )

    g = _load_graph(args)
    az = construct_az_graph(g, _selection(args, 0))
    ang = _angles(args, az)
    K = kasteleyn_matrix(az, ang)
    t0 = time.time()
    if args.method == "lu":
        Kinv = np.linalg.inv(K)
    else:
        Kinv = inverse_matrix(az, ang)
    d1, d2 = verify_inverse(K, Kinv)
    out = {
        "method": args.method,
        "size": K.shape[0],
        "kk_inv_defect": max(d1, d2),
        "seconds": round(time.time() - t0, 3),
    }
    if args.method == "quadrature":
        b, w = az.blacks[0], az.whites[0]
        out["quadrature_spot_defect"] = abs(
            inverse_entry_quadrature(az, ang, b, w) - Kinv[0, 0]
        )
    if args.out:
        doc = {
            "blacks": [list(map(str, v)) for v in az.blacks],
            "whites": [list(map(str, v)) for v in az.whites],
            "entries": [
                [_json_complex(Kinv[i, j]) for j in range(Kinv.shape[1])]
                for i in range(Kinv.shape[0])
            ],
        }
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
    return out


def cmd_probs(args) -> dict:
    from .azgraph import construct_az_graph
    from .kasteleyn import edge_probabilities, enumerate_matchings, inverse_matrix, kasteleyn_matrix

    g = _load_graph(args)
    az = construct_az_graph(g, _selection(args, 0))
    ang = _angles(args, az)
    Kinv = inverse_matrix(az, ang)
    idxs = (
        [int(s) for s in args.edges.split(",")] if args.edges
        else list(range(len(az.edges)))
    )
    probs = {
        str(k): edge_probabilities(az, ang, [az.edges[k]], Kinv=Kinv)
        for k in idxs
    }
    out = {"marginals": probs}
    nv = len(az.whites) + len(az.blacks)
    if nv <= 32:
        cnt, Z, marg = enumerate_matchings(az, ang)
        out["covers"] = cnt
        out["max_marginal_defect"] = max(
            abs(probs[str(k)] - marg[k]) for k in idxs
        )
    return out


def _appendix_action_data():
    """The tropical pentagon configuration of the appendix."""
    from . import presets
    from .asymptotics import ActionData

    prims = [(1, 0), (1, 1), (-1, 1), (-1, -1), (0, -1)]
    cs = [
        Fraction(3, 14), Fraction(5, 42), Fraction(-1, 2),
        Fraction(-1, 6), Fraction(1, 3),
    ]
    names = ["alpha", "beta", "gamma", "delta", "epsilon"]
    ang = presets.tropical_pentagon_angles()
    recs = [
        (ang[names[e]], prims[e][0], prims[e][1], float(cs[e]))
        for e in range(5)
    ]
    return ActionData(recs)


def _action_data(args):
    from .asymptotics import ActionData

    if args.polygon == "appendix-pentagon" or args.polygon is None:
        return _appendix_action_data()
    with open(args.polygon) as fh:
        poly = json.load(fh)
    with open(args.c) as fh:
        cs = json.load(fh)
    with open(args.angles) as fh:
        angs = json.load(fh)
    recs = []
    for rec in poly["sides"]:
        e = rec["index"]
        for aname in rec["strands"]:
            recs.append(
                (_parse_angle(angs[aname]), rec["a"], rec["b"], float(cs[str(e)]))
            )
    return ActionData(recs)


def cmd_arctic(args) -> dict:
    from .asymptotics import polyline_is_simple, sample_arctic_curve
    from .render import curve_csv, render_arctic_curve

    data = _action_data(args)
    samples = sample_arctic_curve(data, args.samples)
    out = {
        "samples": len(samples),
        "simple": polyline_is_simple(samples),
        "turning_points": sum(1 for s in samples if s.is_turning_point),
        "cusps": sum(1 for s in samples if s.cusp),
    }
    if args.csv:
        curve_csv(samples, args.csv)
    if args.svg:
        render_arctic_curve(samples, data.domain(), args.svg)
    return out


def cmd_heightmap(args) -> dict:
    from .render import render_heightmap

    data = _action_data(args)
    render_heightmap(data, args.u0, args.grid, args.png)
    return {"grid": args.grid, "png": args.png}


def cmd_tropical(args) -> dict:
    from . import presets
    from .tropical import (
        check_balancing,
        check_harmonic,
        harmonic_form,
        tropical_char_poly,
        tropical_curve,
        tropical_image,
    )

    if args.preset != "square2x3":
        raise ValueError("the tropical pipeline ships with the square2x3 preset")
    g, tags = presets.square2x3()
    energies = {
        k: (Fraction(-tag[1]) if tag[0] == "exp" else Fraction(0))
        for k, tag in tags.items()
    }
    P = tropical_char_poly(g, energies)
    curve = tropical_curve(P)
    outflows = []
    for (v, prim, wt) in curve.rays:
        if prim == (-1, 0):
            outflows.append(Fraction(-1, 3))
        elif prim == (0, 1):
            outflows.append(Fraction(1, 2))
        else:
            outflows.append(Fraction(0))
    form = harmonic_form(curve, outflows)
    vres, cres = check_harmonic(form)
    img = tropical_image(curve, form)
    cells = [
        {
            "vertex": i,
            "primitives": rec.cell_primitives,
            "c": [str(c) for c in rec.cell_c],
        }
        for i, rec in enumerate(img)
        if rec.cell_primitives
    ]
    out = {
        "support": [list(p) for p in P.support()],
        "vertices": [[str(x), str(y)] for (x, y) in curve.vertices],
        "edge_lengths": sorted(str(ln) for (_v1, _v2, _p, ln, _w) in curve.edges),
        "balanced": check_balancing(curve),
        "harmonic_residuals": [str(vres), str(cres)],
        "interior_values": sorted(
            {str(abs(v)) for v in form.edge_values}
        ),
        "cells": cells,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=1, sort_keys=True)
    return out


def cmd_shuffle(args) -> dict:
    from .shuffle import (
        frozen_boundary_points,
        hausdorff_to_circle,
        shuffle_sample,
        square2x3_weights,
        uniform_weights,
    )

    rng = random.Random(args.seed)
    if args.preset == "square2x3":
        weights = square2x3_weights(args.n, args.tau)
    else:
        weights = uniform_weights(args.n)
    matching = shuffle_sample(args.n, weights, rng)
    out = {"n": args.n, "dominoes": len(matching), "seed": args.seed}
    if args.preset != "square2x3":
        pts = frozen_boundary_points(matching, args.n)
        out["arctic_circle_hausdorff"] = hausdorff_to_circle(pts, args.n)
    if args.png:
        overlay = None
        transform = tuple(float(t) for t in args.overlay_transform.split(","))
        if args.overlay:
            overlay = []
            with open(args.overlay) as fh:
                next(fh)
                for line in fh:
                    parts = line.strip().split(",")
                    overlay.append((float(parts[1]), float(parts[2])))
        from .render import render_shuffle

        render_shuffle(matching, args.n, args.png, overlay, transform)
        out["png"] = args.png
    return out


def cmd_verify(args) -> dict:
    from .azgraph import check_admissibility, construct_az_graph
    from .kasteleyn import (
        enumerate_matchings,
        edge_probabilities,
        inverse_matrix,
        kasteleyn_matrix,
        verify_inverse,
    )

    g = _load_graph(args)
    az = construct_az_graph(g, _selection(args, 0))
    ang = _angles(args, az)
    K = kasteleyn_matrix(az, ang)
    Kinv = inverse_matrix(az, ang)
    d1, d2 = verify_inverse(K, Kinv)
    out = {
        "preset": args.preset,
        "admissible": check_admissibility(az)[0],
        "kk_inv_defect": max(d1, d2),
        "lu_defect": float(np.abs(Kinv - np.linalg.inv(K)).max()),
    }
    nv = len(az.whites) + len(az.blacks)
    if nv <= 32:
        cnt, Z, marg = enumerate_matchings(az, ang)
        out["covers"] = cnt
        out["detK_vs_Z_rel"] = abs(abs(np.linalg.det(K)) - Z) / Z
        out["marginal_defect"] = max(
            abs(edge_probabilities(az, ang, [le], Kinv=Kinv) - marg[k])
            for k, le in enumerate(az.edges)
        )
    return out


def main(argv: Optional[list] = None) -> int:
    ap = argparse.ArgumentParser(prog="az")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--preset", default=None)
        p.add_argument("--graph", default=None)
        p.add_argument("--c", default=None,
                       help="boundary selection, e.g. e1=-0.5,e2=-0.5,...")
        p.add_argument("--order", type=int, default=None,
                       help="Aztec diamond order for square1x1")
        p.add_argument("--angles", default=None,
                       help="'even', 'random', or a JSON file")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("build")
    common(p)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("invert")
    common(p)
    p.add_argument("--method", choices=["residues", "quadrature", "lu"],
                   default="residues")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("probs")
    common(p)
    p.add_argument("--edges", default=None)
    p.set_defaults(fn=cmd_probs)

    p = sub.add_parser("arctic")
    p.add_argument("--polygon", default=None,
                   help="'appendix-pentagon' (default) or a polygon JSON")
    p.add_argument("--c", default=None)
    p.add_argument("--angles", default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--svg", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=cmd_arctic)

    p = sub.add_parser("heightmap")
    p.add_argument("--polygon", default=None)
    p.add_argument("--c", default=None)
    p.add_argument("--angles", default=None)
    p.add_argument("--u0", type=int, default=0)
    p.add_argument("--grid", type=int, default=120)
    p.add_argument("--png", required=True)
    p.set_defaults(fn=cmd_heightmap)

    p = sub.add_parser("tropical")
    p.add_argument("--preset", default="square2x3")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_tropical)

    p = sub.add_parser("shuffle")
    p.add_argument("--preset", default="uniform")
    p.add_argument("--tau", type=float, default=4.0)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--png", default=None)
    p.add_argument("--overlay", default=None)
    p.add_argument("--overlay-transform", default="1,0,1,0",
                   help="sx,tx,sy,ty affine overlay transform")
    p.set_defaults(fn=cmd_shuffle)

    p = sub.add_parser("verify")
    common(p)
    p.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    try:
        out = args.fn(args)
    except Exception as err:  # structured error JSON, exit 1
        print(json.dumps({"error": type(err).__name__, "message": str(err)}))
        return 1
    print(json.dumps(out, indent=1, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
