"""Exact engine for parametric rank-one discrete valuations of Q((X1..Xn))."""

from .errors import (ContractError, EngineError, InconclusiveError,
                     IndeterminateError, KernelSuspicionError, NotAUnitError,
                     PoleError, PrecisionCeilingError,
                     RepresentativeMissingError, SpecParseError,
                     StructuralError)
from .kfield import KElem, TruncatedXSeries, XPoly, kelem_arith, parse_kelem, random_form
from .ratfunc import (Poly, RatFunc, canonical_string, evaluate,
                      parse_ratfunc, partial_derivative, poly_arith, poly_gcd,
                      ratfunc_arith)
from .tseries import TSeries, Value, ord_of, ts_arith
from .valuation import (ResidueDatum, ValuationSpec, eval_psi, initial_datum,
                        make_spec, raise_precision, residue, value)
from .transforms import (CoordChange, Monoidal, Permute, TransformLog,
                         apply_coord_change, apply_monoidal,
                         apply_permutation, parse_log, pullback)
from .algorithms import (AlgebraicTower, ImplicitGenerator, OrderCheck,
                         OrderExtensionReport, ResidueFieldReport,
                         Transcendental, UniformizerResult,
                         build_residue_field, check_order_function,
                         extend_to_order_function, find_uniformizer,
                         first_transcendental_residue, gcd_normalize,
                         implicit_ideal, is_algebraic_over)
from .cli import RamifyDirective, SpecSource, parse_spec, ramify, run_command

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
