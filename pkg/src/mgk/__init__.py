"""Finite loops and metagroups: classification, central quotients and
smashed / wreath product constructions, with brute-force cross-checks."""
from .core import MagmaTable, StructureReport, classify, verify_core_identities
from .errors import MgkError
from .generators import cayley_dickson, cyclic, from_spec, quaternion8, sym3

__all__ = ["MagmaTable", "StructureReport", "classify", "verify_core_identities", "MgkError",
           "cayley_dickson", "cyclic", "from_spec", "quaternion8", "sym3"]
__version__ = "0.1.0"
