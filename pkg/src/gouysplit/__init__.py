"""Gouy-phase self-splitting beams and their transfer into SPDC photon-pair
correlations."""

__version__ = "0.1.0"
