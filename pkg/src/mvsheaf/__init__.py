"""Finite MV-algebras, their prime spectra, McNaughton functions and locales."""
from .algebra import (FiniteMvAlgebra, ProductAlgebra, make_chain, make_trivial, product,
                      product_of, validate_axioms, find_isomorphism)
from .errors import (MvError, PreconditionError, ResourceLimitError, TrivialAlgebraError,
                     InternalInconsistencyError, TermSyntaxError)
from .terms import parse, to_text, eval_term, eval_unit
from .ideals import enumerate_ideals, enumerate_primes, enumerate_maximals, quotient
from .spectrum import build_spectrum, enumerate_global_sections, verify_representation, glue
from .mcnaughton import compile_term, pwl_equal, glue_fp, glue_cover, truncation_term

__version__ = "0.1.0"
