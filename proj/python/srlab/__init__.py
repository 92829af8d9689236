from ._srlab import (
    closure_search,
    commands,
    eval_expr,
    kappa,
    martinet_distance,
    parse,
    reeb,
    run,
)

__all__ = [
    "closure_search",
    "commands",
    "eval_expr",
    "kappa",
    "martinet_distance",
    "parse",
    "reeb",
    "run",
]
