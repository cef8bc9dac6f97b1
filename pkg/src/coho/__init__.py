"""Exact verification of the mod-2 cohomology of the order-512 group 4^3:D8.

Everything here is exact arithmetic over F2 (or exact integer series
arithmetic); there are no tolerances anywhere.  The subpackages split the
work into:

- ``f2linalg``: dense bit-packed linear algebra over F2.
- ``groups``: the group 4^3:D8 and its named subgroups, plus the
  elementary-abelian census.
- ``modrep``: modules over F2[G], symmetric powers, socles, hom spaces.
- ``resolution``: minimal free resolutions, Betti numbers, cup products.
- ``series``: rational Poincare series and the spectral-sequence E2 total.
- ``ringcalc``: the 17-generator/79-relation presentation and its Hilbert
  data.
- ``detection``: restriction to the nine detecting subgroups.
- ``swclasses``: Stiefel-Whitney classes of the explicit real
  representations.
- ``steenrod``: Steenrod squares on the detecting rings and the identity
  checks.
- ``cli``: the ``coho`` command-line entry point.
"""

__version__ = "0.1.0"
