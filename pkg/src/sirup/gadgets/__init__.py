"""Hardness-reduction gadgets and their verifiers."""
from ..model import SirupError


class GadgetError(SirupError):
    pass
