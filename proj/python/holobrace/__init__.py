"""Regular subgroups of holomorphs of finite abelian groups and their left braces."""

from ._core import (
    aut_order,
    braces,
    group_order,
    hol_order,
    layer_stats,
    oracle_class_count,
    regular_class_count,
    verify_brace_table,
)

__all__ = [
    "aut_order",
    "braces",
    "group_order",
    "hol_order",
    "layer_stats",
    "oracle_class_count",
    "regular_class_count",
    "verify_brace_table",
]
