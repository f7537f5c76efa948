"""Recursive towers of projective lines built from a Singer-subgroup cover."""

from .ffield import FieldCtx, FieldElem, make_field_tower, prime_field
from .projline import Mobius, P1Point, RatMap
from .singer import SingerData, build_singer
from .towergen import TowerSpec, q5_instance, standard_family, validate_spec
from .toweranalysis import genus_ladder, limit_report

__all__ = [
    "FieldCtx", "FieldElem", "make_field_tower", "prime_field",
    "Mobius", "P1Point", "RatMap",
    "SingerData", "build_singer",
    "TowerSpec", "q5_instance", "standard_family", "validate_spec",
    "genus_ladder", "limit_report",
]
