"""Hot-loop kernels with a compiled backend and a NumPy fallback.

The backend is chosen at import: the Cython extension ``_kernels`` is used
when it was built, unless the environment variable ``BIKITAEV_KERNEL`` is
set to ``numpy``. Both backends compute

    out[b', p, j, q] = sum_{b, i} W[b, j, i, b'] * phi[b, p, i, q]

The compiled backend walks the nonzeros of ``W`` (site tensors of group
and function algebras are very sparse); the fallback uses a dense
``tensordot``.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - depends on the build
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

SPARSE_FILL = 0.2

BACKEND = "cython" if _compiled is not None and os.environ.get("BIKITAEV_KERNEL") != "numpy" else "numpy"


class SiteTensor:
    """A site tensor ``W[b, out, in, b']`` with a cached sparse view.

    The sparse view lists nonzeros grouped by the input pair ``(b, in)``
    in CSR fashion, which is the order the compiled kernel consumes.
    """

    __slots__ = ("dense", "ptr", "jo", "br", "val", "fill")

    def __init__(self, W):
        self.dense = np.ascontiguousarray(W, dtype=complex)
        bl, d, _, _ = self.dense.shape
        # reorder to (b, in, out, b') so nonzeros come out grouped by (b, in)
        t = self.dense.transpose(0, 2, 1, 3)
        nz = np.nonzero(t)
        group = nz[0] * d + nz[1]
        self.ptr = np.ascontiguousarray(
            np.searchsorted(group, np.arange(bl * d + 1)), dtype=np.intc
        )
        self.jo = np.ascontiguousarray(nz[2], dtype=np.intc)
        self.br = np.ascontiguousarray(nz[3], dtype=np.intc)
        self.val = np.ascontiguousarray(t[nz])
        self.fill = self.val.size / max(self.dense.size, 1)

    @property
    def shape(self):
        return self.dense.shape


def apply_site_numpy(W: SiteTensor, phi: np.ndarray) -> np.ndarray:
    out = np.tensordot(W.dense, phi, axes=([0, 2], [0, 2]))  # [j, b', p, q]
    return np.ascontiguousarray(out.transpose(1, 2, 0, 3))


def apply_site_cython(W: SiteTensor, phi: np.ndarray) -> np.ndarray:
    _, P, d, Q = phi.shape
    out = np.zeros((W.shape[3], P, d, Q), dtype=complex)
    src = np.ascontiguousarray(phi, dtype=complex).reshape(-1)
    _compiled.apply_site_sparse(W.ptr, W.jo, W.br, W.val, src, out.reshape(-1), W.shape[0], P, d, Q)
    return out


def apply_site(W: SiteTensor, phi: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Contract one site tensor into a state block (see module docstring).

    With the default backend the compiled sparse path is taken only when
    the site tensor's fill fraction is at most ``SPARSE_FILL``; denser
    tensors go to BLAS. Passing ``backend`` forces one path.
    """
    if backend is None:
        backend = BACKEND
        if backend == "cython" and W.fill > SPARSE_FILL:
            backend = "numpy"
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return apply_site_cython(W, phi)
    return apply_site_numpy(W, phi)
