"""Compare the compiled and NumPy site-tensor kernels.

Times one full operator application (all chain sites) on a batch of random
states, for real vertex and face operators and for a dense synthetic site
tensor, and checks that both backends agree.

Usage::

    python3 benchmarks/bench_kernels.py --algebra s3-group --graph seven_edge --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bikitaev import kernels
from bikitaev.algebras import load_algebra
from bikitaev.bicross import mirror_bicrossproduct
from bikitaev.hopf import haar_integral, random_element
from bikitaev.lattice import load_graph
from bikitaev.siteops import face_operator, vertex_operator


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_operator(name, op, batch, repeat):
    rows = []
    vecs = batch.reshape(batch.shape[0], -1)
    fills = [W.fill for _, W in op.chain]
    t_np, r_np = _time(lambda: op.apply(vecs, backend="numpy"), repeat)
    if kernels._compiled is not None:
        t_cy, r_cy = _time(lambda: op.apply(vecs, backend="cython"), repeat)
        err = float(np.max(np.abs(r_np - r_cy)))
    else:
        t_cy, err = float("nan"), float("nan")
    rows.append((name, len(op.chain), max(fills), t_np, t_cy, err))
    return rows


def bench_dense(d, bond, P, Q, repeat, rng):
    W = kernels.SiteTensor(rng.normal(size=(bond, d, d, bond)) + 0j)
    phi = rng.normal(size=(bond, P, d, Q)) + 0j
    t_np, r_np = _time(lambda: kernels.apply_site(W, phi, "numpy"), repeat)
    if kernels._compiled is not None:
        t_cy, r_cy = _time(lambda: kernels.apply_site(W, phi, "cython"), repeat)
        err = float(np.max(np.abs(r_np - r_cy)))
    else:
        t_cy, err = float("nan"), float("nan")
    return [(f"dense site d={d} bond={bond}", 1, W.fill, t_np, t_cy, err)]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--algebra", default="s3-group")
    p.add_argument("--graph", default="seven_edge")
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    H = load_algebra(args.algebra)
    g = load_graph(args.graph)
    B = mirror_bicrossproduct(H)
    dim = B.dual.dim ** g.n_edges
    batch = rng.normal(size=(args.batch, dim)) + 1j * rng.normal(size=(args.batch, dim))

    site = (g.sites or g.vertex_sites())[0]
    rows = []
    rows += bench_operator("vertex projector", vertex_operator(g, site, haar_integral(H), B), batch, args.repeat)
    rows += bench_operator("vertex, random label", vertex_operator(g, site, random_element(H, rng), B),
                           batch, args.repeat)
    rows += bench_operator("face projector", face_operator(g, site, haar_integral(B.cop), B), batch, args.repeat)
    rows += bench_dense(B.dual.dim, 16, 256, 64, args.repeat, rng)

    print(f"compiled kernel available: {kernels._compiled is not None}; default backend: {kernels.BACKEND}")
    print(f"{args.algebra} on {args.graph}: state dim {dim}, batch {args.batch}")
    print(f"{'case':28s} {'sites':>5s} {'fill':>7s} {'numpy s':>9s} {'cython s':>9s} {'speedup':>8s} {'max diff':>9s}")
    for name, n, fill, t_np, t_cy, err in rows:
        print(f"{name:28s} {n:5d} {fill:7.3f} {t_np:9.4f} {t_cy:9.4f} {t_np / t_cy:8.2f} {err:9.1e}")


if __name__ == "__main__":
    main()
