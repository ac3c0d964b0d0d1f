"""Command-line entry point: run verification suites and emit JSON reports.

Every command writes one JSON report (to ``--out`` or stdout). Reports are
byte-identical for identical arguments; wall-clock timings go to a sidecar
file ``<out>.timing.json`` instead. Exit status is 0 when every residual is
within tolerance, 1 when a check fails (the report is still written) and 2
on input errors.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import time

import numpy as np

from . import __version__
from .algebras import BUILTIN_NAMES, load_algebra
from .bicross import mirror_bicrossproduct
from .errors import BikitaevError
from .hopf import axiom_residuals, dual, haar_checks, haar_integral, pairing_residuals, random_element
from .lattice import load_graph

COMMANDS = ("axioms", "bicross", "theorem32", "lemma33", "projectors", "spectrum",
            "groundspace", "tnstate", "trace")

DEFAULT_TOL = {
    "axioms": 1e-12, "bicross": 1e-12, "theorem32": 1e-10, "lemma33": 1e-10,
    "projectors": 1e-10, "spectrum": 1e-9, "groundspace": 1e-9, "tnstate": 1e-10, "trace": 1e-12,
}

GRAPH_COMMANDS = {"theorem32", "lemma33", "projectors", "spectrum", "groundspace", "tnstate", "trace"}


def _num(x):
    """JSON-ready scalar: floats stay floats, complex values become ``[re, im]``."""
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)] if x.imag else float(x.real)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _num(obj)


# ---------------------------------------------------------------------------
# pipelines; each returns (results, residuals) with residuals a flat dict
# ---------------------------------------------------------------------------

def run_axioms(H, g, args, rng):
    res = {f"hopf {k}": v for k, v in axiom_residuals(H).items()}
    D, _ = dual(H)
    res.update({f"dual {k}": v for k, v in axiom_residuals(D).items()})
    res.update({f"pairing {k}": v for k, v in pairing_residuals(D, H, np.eye(H.dim)).items()})
    for name, A in (("H", H), ("dual", D)):
        l = haar_integral(A).coeffs
        res.update({f"haar {name} {k}": v for k, v in haar_checks(A, l).items()})
    return {"dim": H.dim}, res


def run_bicross(H, g, args, rng):
    from .siteops import triangle_relations

    B = mirror_bicrossproduct(H)
    res = {f"mirror {k}": v for k, v in B.residuals.items()}
    res.update({f"triangle {k}": v for k, v in triangle_relations(B, rng, samples=args.labels or 50).items()})
    return {"dim": B.mh.dim}, res


def run_theorem32(H, g, args, rng):
    from .siteops import check_theorem_32

    B = mirror_bicrossproduct(H)
    sites = g.sites or g.vertex_sites()
    per = []
    for s in sites:
        worst = 0.0
        for _ in range(args.labels or 2):
            h, a = random_element(H, rng), random_element(B.cop, rng)
            worst = max(worst, check_theorem_32(g, s, h, a, B, rng=rng, samples=args.samples,
                                                dense_cap=args.dense_cap))
        per.append({"vertex": s.vertex, "corner": s.corner_half, "start": s.start_half, "residual": worst})
    res = {"max residual": max(p["residual"] for p in per)}
    return {"sites": per, "protocol": "dense" if H.dim ** g.n_edges <= args.dense_cap else "random"}, res


def run_lemma33(H, g, args, rng):
    from .siteops import disjoint_site_report

    B = mirror_bicrossproduct(H)
    rep = disjoint_site_report(g, B, rng=rng, samples=args.samples, dense_cap=args.dense_cap)
    pairs = rep.pop("pairs")
    return {"pairs": pairs}, rep


def run_projectors(H, g, args, rng):
    from .hamiltonian import model, projectors

    m = model(g, H)
    _, _, rep = projectors(m, strict=False, rng=rng, samples=args.samples, dense_cap=args.dense_cap)
    return {"vertices": len(m.vertex_sites), "faces": len(m.face_sites)}, rep


def run_spectrum(H, g, args, rng):
    from .hamiltonian import RANK_CUTOFF, ground_space, integrality_residual, model, spectrum

    m = model(g, H)
    ev, herm = spectrum(m, dense_cap=args.dense_cap)
    rank, _ = ground_space(m, dense_cap=args.dense_cap, rng=rng)
    zero = int(np.sum(np.abs(ev) < 1e-6))
    ev_out = [float(x) for x in np.real(ev)] if not np.any(np.imag(ev)) else [_num(complex(x)) for x in ev]
    results = {"eigenvalues": ev_out, "zero multiplicity": zero, "ground_dim": rank, "rank cutoff": RANK_CUTOFF}
    res = {"integrality": integrality_residual(ev), "hermiticity": herm,
           "zero multiplicity mismatch": float(abs(zero - rank))}
    return results, res


def run_groundspace(H, g, args, rng):
    from .hamiltonian import ground_space, model

    m = model(g, H)
    rank, _ = ground_space(m, dense_cap=args.dense_cap, rng=rng)
    return {"ground_dim": rank, "state_dim": m.dim,
            "method": "dense" if m.dim <= args.dense_cap else "probing"}, {}


def run_tnstate(H, g, args, rng):
    from .hamiltonian import ground_space, metric_inner, model
    from .tensornet import ground_state, ground_state_report

    m = model(g, H)
    psi = ground_state(m)
    rep = ground_state_report(m, psi)
    results = {"norm": rep.pop("norm")}
    if m.dim <= args.dense_cap:
        _, basis = ground_space(m, dense_cap=args.dense_cap, rng=rng)
        coeffs = [metric_inner(m, b, psi.coeffs) for b in basis]
        results["ground space coefficients"] = [_num(complex(np.round(c, 12))) for c in coeffs]
    return results, rep


def run_trace(H, g, args, rng):
    from .tensornet import load_spec, make_spec, tensor_trace_boundary, tensor_trace_bruteforce

    if args.spec:
        with open(args.spec) as fh:
            spec = load_spec(fh.read(), H, graph=g if args.graph else None)
    else:
        b = "haar" if g.boundary else None
        spec = make_spec(g, H, boundary_edge_labels=b, boundary_face_labels=b)
    value = tensor_trace_boundary(spec)
    results = {"trace": _num(complex(value))}
    res = {}
    terms = (spec.dual.dim ** 2) ** spec.graph.n_edges
    if terms <= 10**6:
        brute = tensor_trace_bruteforce(spec)
        res["oracle"] = abs(value - brute)
    results["oracle terms"] = terms
    return results, res


PIPELINES = {
    "axioms": run_axioms, "bicross": run_bicross, "theorem32": run_theorem32, "lemma33": run_lemma33,
    "projectors": run_projectors, "spectrum": run_spectrum, "groundspace": run_groundspace,
    "tnstate": run_tnstate, "trace": run_trace,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bikitaev", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--algebra", default="z2-group",
                   help=f"builtin name ({', '.join(BUILTIN_NAMES)}) or JSON file")
    p.add_argument("--graph", default=None, help="builtin fixture (e.g. torus-2x1) or JSON file")
    p.add_argument("--tolerance", type=float, default=None, help="override the pass threshold")
    p.add_argument("--samples", type=int, default=20, help="random vectors per residual")
    p.add_argument("--labels", type=int, default=None, help="random label draws per check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--dense-cap", type=int, default=4096, help="largest dense state space")
    p.add_argument("--spec", default=None, help="tensor network spec file for 'trace'")
    return p


def _write(report: dict, out):
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args) -> int:
    """Execute one command; returns the process exit code."""
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()
    tol = args.tolerance if args.tolerance is not None else DEFAULT_TOL[args.command]
    report = {"command": args.command, "seed": args.seed, "tolerance": tol, "version": __version__,
              "samples": args.samples, "dense_cap": args.dense_cap}
    code = 0
    try:
        H = load_algebra(args.algebra)
        report["algebra"] = {"source": args.algebra, "label": H.label, "fingerprint": H.fingerprint()}
        g = None
        if args.command in GRAPH_COMMANDS:
            g = load_graph(args.graph or ("minimal" if args.command == "theorem32" else "torus-1x1"))
            report["graph"] = {"source": args.graph, "name": g.name, "edges": g.n_edges,
                               "vertices": len(g.vertices), "faces": len(g.faces)}
        rng = np.random.default_rng(args.seed)
        results, residuals = PIPELINES[args.command](H, g, args, rng)
        residuals = {k: float(v) for k, v in residuals.items()}
        failed = sorted(k for k, v in residuals.items() if not v <= tol)
        report.update({"results": results, "residuals": residuals,
                       "max residual": max(residuals.values(), default=0.0),
                       "failed": failed, "pass": not failed})
        code = 0 if not failed else 1
    except BikitaevError as exc:
        report.update({"error": {"type": type(exc).__name__, "message": str(exc)}, "pass": False})
        code = 2
    except (OSError, ValueError) as exc:
        report.update({"error": {"type": type(exc).__name__, "message": str(exc)}, "pass": False})
        code = 2
    _write(report, args.out)
    if args.out:
        with open(args.out + ".timing.json", "w") as fh:
            json.dump({"started": started, "seconds": time.perf_counter() - t0}, fh, indent=2)
            fh.write("\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
