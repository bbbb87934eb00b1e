"""Numerical ranges of quaternionic matrices: bild, star-center and convexity."""

from .ellipse import EllipseModel, st_center, st_derivatives, st_ellipse
from .geometry import (BoundaryFunctions, CenterRegion, Line, TangentPair, boundary_functions,
                       center_full, center_membership_W, center_upper, is_convex,
                       left_derivatives, line_interior_test, tangent_lines)
from .qmatrix import (EmptyRealPart, QMatrix, RealPoint, SkewDiagonalization, complex_adjoint,
                      diagonalize_skew, from_complex_adjoint, hermitian_skew_split, real_point)
from .quat import (Quaternion, SimilarityClass, UpperPoint, hamilton_product, rotate_to_slice,
                   similar, similarity_class, upper_representative)
from .sampler import (BildEstimate, RangeSample, evaluate_form, membership, range_sample,
                      sample_sphere, support_upper_bild, upper_hull)
from .verify import (PropertyReport, brute_center, check_convexity_equivalence,
                     check_star_shaped)

__version__ = "0.1.0"
