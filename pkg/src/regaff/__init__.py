"""Regular subgroups of affine groups meeting the translations in a prescribed subgroup."""

from .affine import (AffineElem, closure, conjugate, direct_product, identity, is_translation,
                     is_unipotent, make_affine, permutation_affine, project_pi, translation)
from .construct import RegularSubgroupDesc, admissibility, build_rw, hegedus_agl32
from .errors import (DimensionError, FieldMismatchError, FormatError, InadmissibleError, RegaffError,
                     SingularMatrixError)
from .field import QQ, FieldValue, FiniteField, arith, field_of_order, make_field
from .linalg import Mat, mat_ops
from .quadform import AdditiveHom, QuadraticForm, SubspaceBasis, builtin, check_additive, with_kernel
from .search import existence_table, naive_oracle, search_regular
from .verify import check_closed, check_regular, full_suite, translation_subgroup, verify_elements

__version__ = "0.1.0"
