"""Exact symbolic integration on q-deformed Euclidean space."""

from .coeff import ONE, ZERO, QScalar, eval_numeric, expand_at_one, q
from .forms import epsilon, exterior_d, integrate_annulus, integrate_form_over_space, integrate_form_over_sphere, omega
from .invint import euclid_integrate, invariant_tensor, invariant_tensor_solve, sphere_integrate
from .ncalg import NCPoly, check_confluence, derive_rules, normalize, rules_for
from .parse import parse, parse_poly, parse_scalar, to_text
from .radial import Form, R0Poly, RadialFunctional, RadialProfile
from .soq import SoqData, build, verify_structure
from .tensor import LabeledTensor

__version__ = "0.1.0"

__all__ = [
    "ONE", "ZERO", "QScalar", "q", "eval_numeric", "expand_at_one",
    "LabeledTensor", "SoqData", "build", "verify_structure",
    "NCPoly", "derive_rules", "rules_for", "normalize", "check_confluence",
    "invariant_tensor", "invariant_tensor_solve", "sphere_integrate", "euclid_integrate",
    "Form", "R0Poly", "RadialFunctional", "RadialProfile",
    "epsilon", "omega", "exterior_d", "integrate_form_over_sphere", "integrate_form_over_space", "integrate_annulus",
    "parse", "parse_poly", "parse_scalar", "to_text",
]
