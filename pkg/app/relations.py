"""Hardcoded class tables: named generators of H*F(2) and H*F(3), e_3 products and the relations of H*F(3)"""
import re
from typing import Any, Dict, List, Tuple

from sympy import Rational

# Expressions are written with offsets relative to a cyclic index i in Z/3:
#   "1/3 e4(1) g(0) - 2/3 e4(0) k(0)"  means  (1/3)e_{4,i+1}g_i - (2/3)e_{4,i}k_i
# Symbols without an offset (rho, xi, 1) do not depend on i.
# Degrees are recorded as (s, (c0, c1, c2), M) with t = q(c0 p^i + c1 p^{i+1} + c2 p^{i+2}).

SYMBOLS = ("1", "rho", "xi", "h1", "h2", "h3", "e3", "e4", "g", "k", "c", "mu", "nu", "theta", "eta")

_FACTOR = re.compile(r"(rho|xi|theta|eta|mu|nu|h[123]|e[34]|g|k|c)(?:\((\d)\))?(?:\^(\d+))?")
_COEFFICIENT = re.compile(r"^(\d+(?:/\d+)?)")

Factor = Tuple[str, int, int]


# Module M with H*F(3) = E[rho] ⊗ M
# {
#   "name": str,         # display name with offsets
#   "expr": str,         # product of named factors
#   "degree": tuple,     # stated (s, t-coefficients, M)
#   "cyclic": bool       # one class per i in Z/3, else a single class at i = 0
# }
F3_MODULE: List[Dict[str, Any]] = [
    {"name": "1", "expr": "1", "degree": (0, (0, 0, 0), 0), "cyclic": False},
    {"name": "h_{1,i}", "expr": "h1(0)", "degree": (1, (1, 0, 0), 1), "cyclic": True},
    {"name": "e_{4,i}", "expr": "e4(0)", "degree": (2, (1, 0, 0), 6), "cyclic": True},
    {"name": "g_i", "expr": "g(0)", "degree": (2, (2, 1, 0), 4), "cyclic": True},
    {"name": "k_i", "expr": "k(0)", "degree": (2, (1, 2, 0), 4), "cyclic": True},
    {"name": "e_{4,i}h_{1,i}", "expr": "e4(0) h1(0)", "degree": (3, (2, 0, 0), 7), "cyclic": True},
    {"name": "e_{4,i}h_{1,i+1}", "expr": "e4(0) h1(1)", "degree": (3, (1, 1, 0), 7), "cyclic": True},
    {"name": "g_ih_{1,i+1}", "expr": "g(0) h1(1)", "degree": (3, (2, 2, 0), 5), "cyclic": True},
    {"name": "mu_i", "expr": "mu(0)", "degree": (3, (2, 1, 0), 9), "cyclic": True},
    {"name": "nu_i", "expr": "nu(0)", "degree": (3, (0, 1, 2), 9), "cyclic": True},
    {"name": "xi", "expr": "xi", "degree": (3, (0, 0, 0), 9), "cyclic": False},
    {"name": "e_{4,i}^2", "expr": "e4(0)^2", "degree": (4, (2, 0, 0), 12), "cyclic": True},
    {"name": "e_{4,i}e_{4,i+1}", "expr": "e4(0) e4(1)", "degree": (4, (1, 1, 0), 12), "cyclic": True},
    {"name": "e_{4,i}g_{i+1}", "expr": "e4(0) g(1)", "degree": (4, (0, 1, 0), 10), "cyclic": True},
    {"name": "e_{4,i}g_{i+2}", "expr": "e4(0) g(2)", "degree": (4, (2, 0, 2), 10), "cyclic": True},
    {"name": "e_{4,i}k_i", "expr": "e4(0) k(0)", "degree": (4, (2, 2, 0), 10), "cyclic": True},
    {"name": "theta_i", "expr": "theta(0)", "degree": (4, (2, 0, 0), 12), "cyclic": True},
    {"name": "e_{4,i}^2h_{1,i+1}", "expr": "e4(0)^2 h1(1)", "degree": (5, (2, 1, 0), 13), "cyclic": True},
    {"name": "e_{4,i}^2h_{1,i+2}", "expr": "e4(0)^2 h1(2)", "degree": (5, (2, 0, 1), 13), "cyclic": True},
    {"name": "e_{4,0}e_{4,1}h_{1,2}", "expr": "e4(0) e4(1) h1(2)", "degree": (5, (0, 0, 0), 13), "cyclic": False},
    {"name": "e_{4,i}mu_{i+2}", "expr": "e4(0) mu(2)", "degree": (5, (2, 0, 2), 15), "cyclic": True},
    {"name": "e_{4,i}nu_i", "expr": "e4(0) nu(0)", "degree": (5, (0, 0, 1), 15), "cyclic": True},
    {"name": "eta_i", "expr": "eta(0)", "degree": (5, (2, 0, 0), 17), "cyclic": True},
    {"name": "e_{4,i}^2e_{4,i+1}", "expr": "e4(0)^2 e4(1)", "degree": (6, (2, 1, 0), 18), "cyclic": True},
    {"name": "e_{4,i}^2e_{4,i+2}", "expr": "e4(0)^2 e4(2)", "degree": (6, (2, 0, 1), 18), "cyclic": True},
    {"name": "e_{4,i}e_{4,i+1}g_{i+2}", "expr": "e4(0) e4(1) g(2)", "degree": (6, (1, 0, 1), 16), "cyclic": True},
    {"name": "e_{4,i}e_{4,i+1}mu_{i+2}", "expr": "e4(0) e4(1) mu(2)", "degree": (7, (1, 0, 1), 21), "cyclic": True},
    {"name": "e_{4,0}^2e_{4,2}g_1", "expr": "e4(0)^2 e4(2) g(1)", "degree": (8, (0, 0, 0), 22), "cyclic": False},
]

# Products stated to coincide with a single-listed class, for every i
F3_COINCIDENCES: List[Dict[str, Any]] = [
    {"id": "coincide_e4e4h1", "left": "e4(0) e4(1) h1(2)", "right": "e4(1) e4(2) h1(0)"},
    {"id": "coincide_e4e4e4g", "left": "e4(0)^2 e4(2) g(1)", "right": "e4(1)^2 e4(0) g(2)"},
]

F3_RHO = {"name": "rho", "expr": "rho", "degree": (1, (0, 0, 0), 5)}

# Named generators of H*F(2); "indices" lists the values of i kept in the basis
F2_CLASSES: List[Dict[str, Any]] = [
    {"name": "1", "expr": "1", "indices": (0,)},
    {"name": "h_{1,i}", "expr": "h1(0)", "indices": (0, 1, 2)},
    {"name": "g_i", "expr": "g(0)", "indices": (0, 1, 2)},
    {"name": "k_i", "expr": "k(0)", "indices": (0, 1, 2)},
    {"name": "e_{3,i}", "expr": "e3(0)", "indices": (0, 1)},
    {"name": "c_i", "expr": "c(0)", "indices": (0, 1, 2)},
    {"name": "h_{2,i}h_{2,i+1}h_{1,i+1}", "expr": "h2(0) h2(1) h1(1)", "indices": (0, 1, 2)},
    {"name": "g_ih_{1,i+1}", "expr": "g(0) h1(1)", "indices": (0, 1, 2)},
    {"name": "e_{3,i}h_{1,i}", "expr": "e3(0) h1(0)", "indices": (0, 1, 2)},
    {"name": "e_{3,i+1}g_i", "expr": "e3(1) g(0)", "indices": (0, 1, 2)},
    {"name": "e_{3,i}k_i", "expr": "e3(0) k(0)", "indices": (0, 1, 2)},
    {"name": "e_{3,i}^2", "expr": "e3(0)^2", "indices": (0, 1)},
    {"name": "e_{3,i}c_i", "expr": "e3(0) c(0)", "indices": (0, 1, 2)},
    {"name": "e_{3,i}^2e_{3,i+1}", "expr": "e3(0)^2 e3(1)", "indices": (0,)},
]

# Statements about H*F(2) from the generator list; kind "equal" is a cochain
# identity, "cohomologous" an identity of classes
F2_STATEMENTS: List[Dict[str, Any]] = [
    {"id": "f2_sum_e3", "left": "e3(0) + e3(1) + e3(2)", "right": "0", "kind": "equal"},
    {"id": "f2_sum_e3_squared", "left": "e3(0)^2 + e3(1)^2 + e3(2)^2", "right": "0", "kind": "cohomologous"},
    {"id": "f2_top_class", "left": "e3(0)^2 e3(1)", "right": "-2 h2(0) h2(1) h2(2) h1(0) h1(1) h1(2)", "kind": "cohomologous"},
    {"id": "f2_top_class_shift", "left": "e3(0)^2 e3(1)", "right": "e3(1)^2 e3(2)", "kind": "cohomologous"},
]

# Product relations with e_{3,i} in H*F(2)
E3_PRODUCTS: List[Dict[str, Any]] = [
    {"id": "t31_dim3_1", "dim": 3, "left": "e3(1)", "right": "h1(0)", "result": "e3(0) h1(0)"},
    {"id": "t31_dim3_2", "dim": 3, "left": "e3(2)", "right": "h1(0)", "result": "-2 e3(0) h1(0)"},
    {"id": "t31_dim4_1", "dim": 4, "left": "e3(0)", "right": "e3(1)", "result": "e3(2)^2"},
    {"id": "t31_dim4_2", "dim": 4, "left": "e3(0)", "right": "g(0)", "result": "0"},
    {"id": "t31_dim4_3", "dim": 4, "left": "e3(2)", "right": "g(0)", "result": "-e3(1) g(0)"},
    {"id": "t31_dim4_4", "dim": 4, "left": "e3(1)", "right": "k(0)", "result": "-e3(0) k(0)"},
    {"id": "t31_dim4_5", "dim": 4, "left": "e3(2)", "right": "k(0)", "result": "0"},
    {"id": "t31_dim5_1", "dim": 5, "left": "e3(0)", "right": "e3(0) h1(0)", "result": "0"},
    {"id": "t31_dim5_2", "dim": 5, "left": "e3(1)", "right": "e3(0) h1(0)", "result": "0"},
    {"id": "t31_dim5_3", "dim": 5, "left": "e3(2)", "right": "e3(0) h1(0)", "result": "0"},
    {"id": "t31_dim5_4", "dim": 5, "left": "e3(0)", "right": "g(0) h1(1)", "result": "0"},
    {"id": "t31_dim5_5", "dim": 5, "left": "e3(1)", "right": "g(0) h1(1)", "result": "0"},
    {"id": "t31_dim5_6", "dim": 5, "left": "e3(2)", "right": "g(0) h1(1)", "result": "0"},
    {"id": "t31_dim5_7", "dim": 5, "left": "e3(0)", "right": "h2(0) h2(1) h1(1)", "result": "0"},
    {"id": "t31_dim5_8", "dim": 5, "left": "e3(1)", "right": "h2(0) h2(1) h1(1)", "result": "0"},
    {"id": "t31_dim5_9", "dim": 5, "left": "e3(2)", "right": "h2(0) h2(1) h1(1)", "result": "0"},
    {"id": "t31_dim5_10", "dim": 5, "left": "e3(1)", "right": "c(0)", "result": "-2 e3(0) c(0)"},
    {"id": "t31_dim5_11", "dim": 5, "left": "e3(2)", "right": "c(0)", "result": "e3(0) c(0)"},
    {"id": "t31_dim6_1", "dim": 6, "left": "e3(0)", "right": "e3(0)^2", "result": "0"},
    {"id": "t31_dim6_2", "dim": 6, "left": "e3(0)", "right": "e3(1)^2", "result": "-e3(1)^2 e3(2)"},
    {"id": "t31_dim6_3", "dim": 6, "left": "e3(0)", "right": "e3(1) g(0)", "result": "0"},
    {"id": "t31_dim6_4", "dim": 6, "left": "e3(1)", "right": "e3(1) g(0)", "result": "0"},
    {"id": "t31_dim6_5", "dim": 6, "left": "e3(2)", "right": "e3(1) g(0)", "result": "0"},
    {"id": "t31_dim6_6", "dim": 6, "left": "e3(0)", "right": "e3(0) k(0)", "result": "0"},
    {"id": "t31_dim6_7", "dim": 6, "left": "e3(1)", "right": "e3(0) k(0)", "result": "0"},
    {"id": "t31_dim6_8", "dim": 6, "left": "e3(2)", "right": "e3(0) k(0)", "result": "0"},
]

# Nonzero products of two generators of H*F(3); every listed relation holds for all i.
# Printed misprints read as: e_{4,+1} -> e_{4,i+1}, v_j -> nu_j.
# "result" is the printed right-hand side. Rows whose printed side contradicts the
# representatives carry "corrected", the side that holds, and a "note".
F3_RELATIONS: List[Dict[str, Any]] = [
    {"id": "a_dim3_1", "dim": 3, "left": "e4(0)", "right": "h1(2)", "result": "e4(2) h1(0)"},
    {"id": "a_dim3_2", "dim": 3, "left": "k(0)", "right": "h1(0)", "result": "-g(0) h1(1)"},
    {"id": "a_dim4_1", "dim": 4, "left": "e4(0)", "right": "k(1)", "result": "e4(1) g(2)"},
    {"id": "a_dim4_2", "dim": 4, "left": "mu(0)", "right": "h1(2)", "result": "-1/3 e4(2) g(0)"},
    {"id": "a_dim4_3", "dim": 4, "left": "mu(0)", "right": "h1(1)",
     "result": "1/3 e4(1) g(0) - 2/3 e4(0) k(0) + 1/3 rho g(0) h1(1)"},
    {"id": "a_dim4_4", "dim": 4, "left": "nu(0)", "right": "h1(0)", "result": "1/3 e4(1) g(2)"},
    {"id": "a_dim4_5", "dim": 4, "left": "nu(0)", "right": "h1(1)",
     "result": "2/3 e4(2) g(1) - 1/3 e4(1) k(1) - 1/3 rho g(1) h1(2)"},
    {"id": "a_dim4_6", "dim": 4, "left": "xi", "right": "h1(0)", "result": "-e4(2) g(0)"},
    {"id": "a_dim5_1", "dim": 5, "left": "e4(0) e4(1)", "right": "h1(0)", "result": "e4(0)^2 h1(1)"},
    {"id": "a_dim5_2", "dim": 5, "left": "e4(0) e4(1)", "right": "h1(1)", "result": "e4(1)^2 h1(0)"},
    {"id": "a_dim5_3", "dim": 5, "left": "theta(0)", "right": "h1(2)", "result": "-1/2 e4(0)^2 h1(2)"},
    {"id": "a_dim5_4", "dim": 5, "left": "e4(0) h1(0)", "right": "e4(1)", "result": "e4(0)^2 h1(1)"},
    {"id": "a_dim5_5", "dim": 5, "left": "e4(0) h1(0)", "right": "e4(2)", "result": "e4(0)^2 h1(2)"},
    {"id": "a_dim5_6", "dim": 5, "left": "e4(0) h1(1)", "right": "e4(1)", "result": "e4(1)^2 h1(0)"},
    {"id": "a_dim5_7", "dim": 5, "left": "e4(0) h1(1)", "right": "e4(2)", "result": "e4(2) e4(0) h1(1)"},
    {"id": "a_dim5_8", "dim": 5, "left": "e4(0)", "right": "mu(1)", "result": "2/3 rho e4(0) g(1) - e4(2) nu(2)"},
    {"id": "a_dim5_9", "dim": 5, "left": "mu(0)", "right": "g(1)", "result": "1/2 e4(1)^2 h1(0)"},
    {"id": "a_dim5_10", "dim": 5, "left": "mu(0)", "right": "g(2)", "result": "-1/2 e4(0)^2 h1(2)"},
    {"id": "a_dim5_11", "dim": 5, "left": "mu(0)", "right": "k(1)", "result": "1/6 e4(0) e4(1) h1(2)"},
    {"id": "a_dim5_12", "dim": 5, "left": "nu(0)", "right": "e4(1)",
     "result": "-e4(2) mu(1) + 1/3 rho e4(2) g(1) + 1/3 rho e4(1) k(1)"},
    {"id": "a_dim5_13", "dim": 5, "left": "nu(0)", "right": "g(0)", "result": "1/6 e4(0) e4(1) h1(2)"},
    {"id": "a_dim5_14", "dim": 5, "left": "nu(0)", "right": "k(0)", "result": "1/2 e4(1)^2 h1(2)"},
    {"id": "a_dim5_15", "dim": 5, "left": "nu(0)", "right": "k(2)", "result": "-1/2 e4(2)^2 h1(0)"},
    {"id": "a_dim5_16", "dim": 5, "left": "xi", "right": "e4(0)", "result": "rho e4(2) g(0) - 3 e4(1) nu(1)"},
    {"id": "a_dim5_17", "dim": 5, "left": "xi", "right": "g(0)", "result": "-1/2 e4(0)^2 h1(1)",
     "corrected": "1/2 e4(0)^2 h1(1)", "note": "sign"},
    {"id": "a_dim5_18", "dim": 5, "left": "xi", "right": "k(0)", "result": "1/2 e4(1)^2 h1(0)",
     "corrected": "-1/2 e4(1)^2 h1(0)", "note": "sign"},
    {"id": "a_dim6_1", "dim": 6, "left": "e4(0) h1(0)", "right": "mu(1)", "result": "1/3 e4(1) e4(2) g(0)"},
    {"id": "a_dim6_2", "dim": 6, "left": "e4(0) h1(0)", "right": "nu(0)", "result": "-1/3 e4(0) e4(1) g(2)"},
    {"id": "a_dim6_3", "dim": 6, "left": "e4(0) h1(1)", "right": "mu(2)", "result": "1/3 e4(1) e4(0) g(2)"},
    {"id": "a_dim6_4", "dim": 6, "left": "e4(0) h1(1)", "right": "nu(0)", "result": "-1/3 e4(2) e4(0) g(1)"},
    {"id": "a_dim6_5", "dim": 6, "left": "mu(0)", "right": "mu(1)",
     "result": "-1/3 rho e4(1)^2 h1(0) - 1/6 e4(1)^2 e4(0)"},
    {"id": "a_dim6_6", "dim": 6, "left": "mu(0)", "right": "xi",
     "result": "1/6 rho e4(0)^2 h1(1) + 1/6 e4(0)^2 e4(1)"},
    {"id": "a_dim6_7", "dim": 6, "left": "nu(0)", "right": "nu(1)",
     "result": "1/3 rho e4(2)^2 h1(0) - 1/6 e4(2)^2 e4(0)"},
    {"id": "a_dim6_8", "dim": 6, "left": "nu(0)", "right": "xi",
     "result": "1/6 e4(2)^2 e4(1) - 1/6 rho e4(2)^2 h1(1)"},
    {"id": "a_dim6_9", "dim": 6, "left": "e4(0) k(0)", "right": "e4(2)", "result": "e4(1) e4(2) g(0)"},
    {"id": "a_dim6_10", "dim": 6, "left": "e4(0)^2", "right": "g(1)", "result": "e4(1) e4(2) g(0)"},
    {"id": "a_dim6_11", "dim": 6, "left": "e4(0)^2", "right": "k(1)", "result": "e4(0) e4(1) g(2)"},
    {"id": "a_dim6_12", "dim": 6, "left": "e4(0) e4(1)", "right": "k(1)", "result": "e4(2) e4(0) g(1)"},
    {"id": "a_dim6_13", "dim": 6, "left": "e4(0) g(1)", "right": "e4(0)", "result": "e4(1) e4(2) g(0)"},
    {"id": "a_dim6_14", "dim": 6, "left": "theta(0)", "right": "e4(1)",
     "result": "1/3 rho e4(0)^2 h1(1) + 1/3 e4(0)^2 e4(1)",
     "corrected": "-1/3 rho e4(0)^2 h1(1) - 1/3 e4(0)^2 e4(1)", "note": "sign"},
    {"id": "a_dim6_15", "dim": 6, "left": "theta(0)", "right": "e4(2)",
     "result": "-1/3 rho e4(0)^2 h1(2) - 1/6 e4(0)^2 e4(2)"},
    {"id": "a_dim6_16", "dim": 6, "left": "theta(0)", "right": "g(1)", "result": "-1/6 e4(1) e4(2) g(0)"},
    {"id": "a_dim6_17", "dim": 6, "left": "theta(0)", "right": "k(1)", "result": "1/3 e4(0) e4(1) g(2)",
     "corrected": "-1/3 e4(0) e4(1) g(2)", "note": "sign"},
    {"id": "a_dim6_18", "dim": 6, "left": "e4(0) mu(2)", "right": "h1(1)", "result": "-1/3 e4(0) e4(1) g(2)"},
    {"id": "a_dim6_19", "dim": 6, "left": "e4(0) nu(0)", "right": "h1(0)", "result": "1/3 e4(0) e4(1) g(2)"},
    {"id": "a_dim6_20", "dim": 6, "left": "e4(0) nu(0)", "right": "h1(1)", "result": "1/3 e4(2) e4(0) g(1)"},
    {"id": "a_dim6_21", "dim": 6, "left": "eta(0)", "right": "h1(1)",
     "result": "1/6 rho e4(0)^2 h1(1) + 1/6 e4(0)^2 e4(1)"},
    {"id": "a_dim6_22", "dim": 6, "left": "eta(0)", "right": "h1(2)",
     "result": "1/6 rho e4(0)^2 h1(2) - 1/6 e4(0)^2 e4(2)"},
    {"id": "a_dim7_1", "dim": 7, "left": "e4(0)^2", "right": "mu(1)", "result": "e4(1) e4(2) mu(0)"},
    {"id": "a_dim7_2", "dim": 7, "left": "e4(0)^2", "right": "nu(0)",
     "result": "2/3 rho e4(0) e4(1) g(2) - e4(0) e4(1) mu(2)"},
    {"id": "a_dim7_3", "dim": 7, "left": "e4(0) e4(1)", "right": "nu(0)",
     "result": "-e4(0) e4(1) mu(2) + 2/3 rho e4(2) e4(0) g(1)"},
    {"id": "a_dim7_4", "dim": 7, "left": "e4(0) e4(1)", "right": "xi",
     "result": "-rho e4(1) e4(2) g(0) + 3 e4(1) e4(2) mu(0)"},
    {"id": "a_dim7_5", "dim": 7, "left": "theta(0)", "right": "mu(1)", "result": "1/2 e4(1) e4(2) mu(0)",
     "corrected": "-1/2 e4(1) e4(2) mu(0)", "note": "sign"},
    {"id": "a_dim7_6", "dim": 7, "left": "e4(0) nu(0)", "right": "e4(0)",
     "result": "2/3 rho e4(0) e4(1) g(2) - e4(0) e4(1) mu(2)"},
    {"id": "a_dim7_7", "dim": 7, "left": "e4(0) nu(0)", "right": "e4(1)",
     "result": "-e4(2) e4(0) mu(1) + 2/3 rho e4(2) e4(0) g(2)",
     "corrected": "-e4(2) e4(0) mu(1) + 2/3 rho e4(2) e4(0) g(1)",
     "note": "index: e_{4,i+2}g_{i+2} = 0, read g_{i+1}"},
    {"id": "a_dim7_8", "dim": 7, "left": "eta(0)", "right": "e4(1)", "result": "1/6 rho e4(0)^2 e4(1)"},
    {"id": "a_dim7_9", "dim": 7, "left": "eta(0)", "right": "e4(2)", "result": "1/6 rho e4(1)^2 e4(0)"},
    {"id": "a_dim7_10", "dim": 7, "left": "eta(0)", "right": "g(1)", "result": "1/2 e4(1) e4(2) mu(0)"},
    {"id": "a_dim7_11", "dim": 7, "left": "eta(0)", "right": "k(1)",
     "result": "-1/2 e4(0) e4(1) mu(2) + 1/3 rho e4(0) e4(1) g(2)"},
    {"id": "a_dim8_1", "dim": 8, "left": "e4(0)^2", "right": "e4(1) k(1)", "result": "e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_2", "dim": 8, "left": "e4(0)^2 h1(1)", "right": "nu(0)", "result": "-1/3 e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_3", "dim": 8, "left": "e4(0) e4(1) h1(2)", "right": "xi", "result": "e4(1)^2 e4(0) g(2)"},
    {"id": "a_dim8_4", "dim": 8, "left": "e4(0) mu(2)", "right": "e4(1) h1(1)",
     "result": "-1/3 e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_5", "dim": 8, "left": "e4(0) nu(0)", "right": "e4(0) h1(1)",
     "result": "1/3 e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_6", "dim": 8, "left": "eta(0)", "right": "g(1) h1(2)", "result": "-1/6 e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_7", "dim": 8, "left": "e4(0)^2 e4(1)", "right": "k(1)", "result": "e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim8_8", "dim": 8, "left": "e4(0) e4(1) mu(2)", "right": "h1(1)",
     "result": "-1/3 e4(1)^2 e4(0) g(2)"},
    {"id": "a_dim9_1", "dim": 9, "left": "e4(0) mu(2)", "right": "e4(1)^2",
     "result": "1/3 rho e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim9_2", "dim": 9, "left": "e4(0) mu(2)", "right": "theta(1)",
     "result": "1/6 rho e4(0)^2 e4(2) g(1)",
     "corrected": "-1/6 rho e4(0)^2 e4(2) g(1)", "note": "sign"},
    {"id": "a_dim9_3", "dim": 9, "left": "e4(0) nu(0)", "right": "e4(0) e4(1)",
     "result": "1/3 rho e4(2) e4(0)^2 g(1)"},
    {"id": "a_dim9_4", "dim": 9, "left": "eta(0)", "right": "e4(2) g(1)", "result": "1/6 rho e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim9_5", "dim": 9, "left": "eta(0)", "right": "e4(1) k(1)", "result": "1/6 rho e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim9_6", "dim": 9, "left": "e4(0)^2 e4(1)", "right": "nu(0)",
     "result": "1/6 rho e4(0)^2 e4(2) g(1)",
     "corrected": "1/3 rho e4(0)^2 e4(2) g(1)", "note": "coefficient: same product as a_dim9_3"},
    {"id": "a_dim9_7", "dim": 9, "left": "e4(0)^2 e4(2)", "right": "mu(1)",
     "result": "1/3 rho e4(0)^2 e4(2) g(1)"},
    {"id": "a_dim9_8", "dim": 9, "left": "e4(0) e4(1) mu(2)", "right": "e4(1)",
     "result": "1/3 rho e4(0)^2 e4(2) g(1)"},
]


def parse_monomial(text: str) -> List[Factor]:
    """
    Parse a product of named factors into (symbol, offset, power) triples.

    Raises:
        ValueError: unknown token
    """
    text = text.strip()
    if text in ("", "1"):
        return []
    factors: List[Factor] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _FACTOR.match(text, pos)
        if not match:
            raise ValueError(f"Cannot parse class expression at: {text[pos:]!r}")
        symbol, offset, power = match.groups()
        factors.append((symbol, int(offset or 0), int(power or 1)))
        pos = match.end()
    return factors


def parse_expression(text: str) -> List[Tuple[Rational, List[Factor]]]:
    """Parse "c_1 m_1 ± c_2 m_2 ..." into (coefficient, factors) terms; "0" is the empty sum"""
    text = text.strip()
    if text == "0":
        return []
    terms = []
    for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", text):
        body = body.strip()
        coefficient = Rational(1)
        match = _COEFFICIENT.match(body)
        if match:
            coefficient = Rational(match.group(1))
            body = body[match.end():].strip()
        if sign == "-":
            coefficient = -coefficient
        terms.append((coefficient, parse_monomial(body)))
    return terms


_INDEX = re.compile(r"(?<=[,_{])i(?:\+(\d))?")


def label_for(name: str, i: int) -> str:
    """Substitute a concrete index into a display name: e_{4,i+1} at i = 2 is e_{4,0}"""
    return _INDEX.sub(lambda m: str((i + int(m.group(1) or 0)) % 3), name)


def module_classes() -> List[Dict[str, Any]]:
    """Expand F3_MODULE into its 76 individual classes"""
    out = []
    for entry in F3_MODULE:
        for i in (range(3) if entry["cyclic"] else (0,)):
            out.append({**entry, "i": i, "label": label_for(entry["name"], i)})
    return out


def get_relations(table: str = "f3") -> List[Dict[str, Any]]:
    """Get a relation table by name"""
    tables = {"f3": F3_RELATIONS, "e3_products": E3_PRODUCTS, "f2": F2_STATEMENTS, "coincidences": F3_COINCIDENCES}
    if table not in tables:
        raise ValueError(f"Relation table not found: {table}")
    return tables[table]


def get_relation_by_id(relation_id: str) -> Dict[str, Any]:
    """Get a specific relation by ID"""
    for table in (F3_RELATIONS, E3_PRODUCTS, F2_STATEMENTS, F3_COINCIDENCES):
        for relation in table:
            if relation["id"] == relation_id:
                return relation
    raise ValueError(f"Relation not found: {relation_id}")
