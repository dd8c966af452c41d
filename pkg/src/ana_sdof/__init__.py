"""Secrecy degrees of freedom of the two-user MIMO broadcast channel with delayed CSIT."""

from .sdof_theory import (
    AntennaConfig,
    CsitMode,
    OutOfRangeError,
    SdofRegion,
    bc_dof_region_delayed,
    bcc_region_delayed,
    bcc_region_perfect,
    bcc_sum_point,
    region_contains,
    sdof_wiretap,
    sdof_wiretap_delayed,
    sdof_wiretap_partial,
)

__version__ = "0.1.0"
