"""Unitary elementary transformations on row-list matrices.

Both classes act in place on ``list[list[mpc]]`` storage (``MPMatrix.data``)
and only touch the index ranges they are given.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from typing import Any

from src.precision import MPComplex

Rows = list[list[MPComplex]]


class Givens:
    """Complex plane rotation ``G = [[c, s], [-conj(s), c]]`` with real ``c``.

    ``G @ [f, g] = [r, 0]``. Row application rotates rows ``(p, q)``;
    column application mixes columns ``(p, q)`` so that the entry in column
    ``q`` of the pivot row is annihilated. In both cases index ``p`` keeps
    ``r``.
    """

    __slots__ = ("c", "s", "sc", "r", "is_identity")

    def __init__(self, f: MPComplex, g: MPComplex, mp: Any) -> None:
        if not g:
            self.c = mp.one
            self.s = mp.mpc(0)
            self.r = f
            self.is_identity = True
        elif not f:
            ag = abs(g)
            self.c = mp.zero
            self.s = g.conjugate() / ag
            self.r = mp.mpc(ag)
            self.is_identity = False
        else:
            af = abs(f)
            norm = mp.hypot(af, abs(g))
            phase = f / af
            self.c = af / norm
            self.s = phase * g.conjugate() / norm
            self.r = phase * norm
            self.is_identity = False
        self.sc = self.s.conjugate()

    def rotate_rows(self, data: Rows, p: int, q: int, cols: Iterable[int]) -> None:
        if self.is_identity:
            return
        c, s, sc = self.c, self.s, self.sc
        rp, rq = data[p], data[q]
        for k in cols:
            x, y = rp[k], rq[k]
            rp[k] = c * x + s * y
            rq[k] = c * y - sc * x

    def rotate_columns(self, data: Rows, p: int, q: int, rows: Iterable[int]) -> None:
        if self.is_identity:
            return
        c, s, sc = self.c, self.s, self.sc
        for i in rows:
            row = data[i]
            x, y = row[p], row[q]
            row[p] = c * x + s * y
            row[q] = c * y - sc * x


class House:
    """Householder reflector ``I - tau v v^H`` mapping ``x`` to ``alpha e_1``.

    ``alpha = -phase(x_0) ||x||`` (``phase(0) = 1``). When ``x`` is already a
    multiple of ``e_1`` the reflector is the identity and ``alpha = x_0``.
    """

    __slots__ = ("v", "tau", "alpha", "is_identity", "_mp")

    def __init__(self, x: Sequence[MPComplex], mp: Any) -> None:
        self._mp = mp
        gamma = x[0]
        sigma2 = mp.fsum(t.real * t.real + t.imag * t.imag for t in x[1:])
        if not sigma2:
            self.v: list[MPComplex] = []
            self.tau = mp.zero
            self.alpha = gamma
            self.is_identity = True
            return
        agamma = abs(gamma)
        xnorm = mp.sqrt(agamma * agamma + sigma2)
        phase = gamma / agamma if agamma else mp.mpc(1)
        v0 = gamma + phase * xnorm
        self.v = [v0, *x[1:]]
        self.tau = 2 / (v0.real * v0.real + v0.imag * v0.imag + sigma2)
        self.alpha = -phase * xnorm
        self.is_identity = False

    def reflect_rows(self, data: Rows, start: int, cols: Iterable[int]) -> None:
        """Apply the reflector to rows ``start .. start+len(v)-1``."""
        if self.is_identity:
            return
        v, tau, fdot = self.v, self.tau, self._mp.fdot
        block = data[start : start + len(v)]
        for j in cols:
            w = tau * fdot([row[j] for row in block], v, conjugate=True)
            if not w:
                continue
            for i, row in enumerate(block):
                row[j] -= w * v[i]
