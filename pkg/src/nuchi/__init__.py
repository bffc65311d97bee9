"""Non-abelian tensor squares and weak commutativity groups of small p-groups.

Groups are realised by Todd-Coxeter enumeration as regular permutation
groups; the constructions nu(G) and chi(G), their distinguished subgroups and
the powerful/potent structure checks all run on those.
"""

from .constructions import GroupInput, build_chi, build_nu, cross_checks, realize_group
from .corpus import corpus, lookup
from .enumeration import enumerate_group, todd_coxeter
from .perm import RegularGroup, Subgroup, fingerprint
from .presentation import Presentation, parse_presentation

__version__ = "0.1.0"

__all__ = [
    "GroupInput", "Presentation", "RegularGroup", "Subgroup",
    "build_chi", "build_nu", "corpus", "cross_checks", "enumerate_group",
    "fingerprint", "lookup", "parse_presentation", "realize_group", "todd_coxeter",
]
