"""Iwasawa invariants of branched Z_p-cover towers over links in S^3."""

from .cohomology import CyclicGModule, herbrand_quotient, permutation_module, tate
from .iwasawa import LambdaElement, LambdaModuleNF, weierstrass_prepare
from .kida import TowerMorphism, kida_check
from .links import LinkPresentation, TauMap, load_link
from .padic import PAdicInt, hensel_root
from .smith import AbelianGroup, smith_normal_form
from .tower import TowerSpec, iwasawa_invariants, load_tower

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup", "CyclicGModule", "LambdaElement", "LambdaModuleNF", "LinkPresentation",
    "PAdicInt", "TauMap", "TowerMorphism", "TowerSpec", "hensel_root", "herbrand_quotient",
    "iwasawa_invariants", "kida_check", "load_link", "load_tower", "permutation_module",
    "smith_normal_form", "tate", "weierstrass_prepare",
]
