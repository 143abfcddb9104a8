"""rclab: exact dimension counts for rational curves on hypersurfaces.

Integer formula engine plus a finite-field verification stack: local
dimensions of spaces of degree-e rational curves on degree-d hypersurfaces
in P^n are certified by Jacobian ranks over F_p and cross-checked by brute
enumeration over tiny fields.
"""

__version__ = "0.1.0"
