"""Sheaves of commutative DG rings on finite T0 spaces: resolutions, derived tensor products
and derived intersections with exact arithmetic over Q and F_p."""

from .coeffs import GF, QQ, CoeffField
from .derived import (ClosedSubspaceDatum, cotangent_complex, derived_intersection, derived_tensor,
                      intersection_oracle_check, koszul_tor_oracle, one_point_affine_comparison)
from .dgmodule import DGModuleSheaf, base_change, window_acyclic
from .dgring import (DGRingSheaf, RingedSpace, SheafHom, StructureError, check_d_squared, compose,
                     constant_sheaf, extend_derivation, extend_hom, fiber_product, identity, polynomial_sheaf,
                     quotient, restrict_to_open, structure_map, tensor_over_A)
from .errors import CertificationError, PreconditionError
from .groebner import buchberger, normal_form, syzygy_kernel
from .homology import WindowError, cohomology, is_quasi_iso
from .modules import ModulePresentation, module_iso_test
from .parsing import ParseError
from .poly import Poly, PolyRing
from .pseudofree import (Generator, GeneratorSpec, PsfModule, PsfRing, flatness_check, graded_slice,
                         local_index_set, multiply)
from .resolution import (FactorizationError, HomotopyWitness, certify, check_homotopy_witness,
                         check_quasi_homotopy_witness, factorize, ore_square, resolve)
from .space import FiniteSpace, OpenSet, SpaceError, intersect, minimal_open, validate

__version__ = "0.1.0"
