"""Weak tensor products of finite simple closure spaces."""

from .catalog import mo, power_set, projective
from .core import ClosureSpace, GroundSet, Status, Verdict, has_covering_property, loads, validate
from .products import (
    LazyTopProduct,
    ProductContext,
    aerts_product,
    box_product,
    circ_product,
    enumerate_top,
    separated_product,
    top_join,
    top_membership,
)

__version__ = "0.1.0"

__all__ = [
    "ClosureSpace", "GroundSet", "LazyTopProduct", "ProductContext", "Status", "Verdict", "aerts_product",
    "box_product", "circ_product", "enumerate_top", "has_covering_property", "loads", "mo", "power_set",
    "projective", "separated_product", "top_join", "top_membership", "validate",
]
