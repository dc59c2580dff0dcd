"""A toolchain for a higher-order effect handler calculus in System F-omega.

Modules: ``syntax`` (core AST and substitution), ``parser`` (surface syntax
and printer), ``checker`` (kinds and types), ``evaluator`` (fuelled
reference semantics), ``extract`` (CPS extraction to untyped lambda terms),
``lam`` (the lambda runtime), ``stdlib`` (prelude and effect builders) and
``cli`` (the ``fha`` command).
"""

__version__ = "0.1.0"
