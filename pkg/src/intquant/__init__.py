"""Exact symbolic engine for interval-indexed quantum groups on rational
grids: PBW rewriting for five presentations, Hopf-structure verification,
Borel pairing, semiclassical limits, and Drinfeld-subalgebra membership."""

from .intervals import (CoeffTable, ConfigError, EulerData, Grid, Interval,
                        decompositions, euler, iv, odiff, osum, serre_pairs,
                        strict_intersection, strict_union)
from .scalars import (LaurentQ, PoleAtQ1, PrecisionError, SeriesH, eval_q1,
                      expand_q, qint)
from .ncalg import (CLASSICAL, PRESENTATIONS, UH, UHT, UQ, UQT, AlgebraSpec,
                    DomainError, FuelExhausted, Generator, NCExpr, TensorExpr,
                    coeff_extract, is_pbw_shape, mult, normal_form, relations,
                    tensor_normal_form, unordered_pairs)
from .hopf import (BorelPairing, antipode, antipode_series, coproduct, counit,
                   iterated_coproduct, select_pairing_convention)
from .classical import (CobracketValue, DivisibilityError, LieElem, bracket,
                        cobracket, first_order_bracket, first_order_cobracket,
                        limit_q1)
from .qdp import (MembershipReport, commutativity_check, delta_n,
                  dual_group_shape_check, kminus_certificate, membership)
from .parser import ParseError, parse_expr
from .suites import RunConfig, run_suite

__version__ = "0.1.0"
