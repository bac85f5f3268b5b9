"""Convention flags threaded through the higher-level solvers.

Two points of the underlying theory are genuinely convention-dependent and
both defaults are the strict readings:

* ``paper_conventions`` -- when set, the outer-automorphism computation
  treats conjugation-trivial inner automorphisms as trivial (no quotient of
  the per-edge h-component) and restricts the static matrix family to its
  positively-oriented branch.  This reproduces the published example values;
  the strict quotient is always reported alongside.
* ``reversing_hol_inverse`` -- orientation-reversing holonomy isomorphisms
  intertwine hol by default; with the flag they intertwine hol^{-1} instead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Conventions:
    paper_conventions: bool = False
    reversing_hol_inverse: bool = False
    search_height: int = 8


DEFAULT = Conventions()
