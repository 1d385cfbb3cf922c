"""LTLf / LDLf syntax, parsing, printing and normal forms."""
from .parser import FormulaSyntaxError, ParseError, parse, parse_path
from .printer import path_to_text, to_text
from .syntax import (
    ATOMIC, BINARY, FF, KEYWORDS, PFALSE, PTRUE, RESERVED, TT, UNARY, Always, And, BoolLit,
    Box, Check, Concat, Diamond, End, Eventually, FMark, Formula, Last, Next, Not, NotProp,
    Or, PAnd, PConst, PNot, POr, PVar, PathExpr, PropAtom, PropFormula, PropTest, Release,
    Star, TMark, Union, Until, WeakNext, check_prop_name, children, from_prop_formula,
    is_propositional, props_of, size, to_prop_formula, walk,
)
from .transform import expand_sugar, holds_at_end, is_nnf, to_nnf

pretty_print = to_text

__all__ = [
    "FormulaSyntaxError", "ParseError", "parse", "parse_path", "path_to_text", "to_text",
    "pretty_print", "expand_sugar", "holds_at_end", "is_nnf", "to_nnf",
    "ATOMIC", "BINARY", "FF", "KEYWORDS", "PFALSE", "PTRUE", "RESERVED", "TT", "UNARY",
    "Always", "And", "BoolLit", "Box", "Check", "Concat", "Diamond", "End", "Eventually",
    "FMark", "Formula", "Last", "Next", "Not", "NotProp", "Or", "PAnd", "PConst", "PNot",
    "POr", "PVar", "PathExpr", "PropAtom", "PropFormula", "PropTest", "Release", "Star",
    "TMark", "Union", "Until", "WeakNext", "check_prop_name", "children",
    "from_prop_formula", "is_propositional", "props_of", "size", "to_prop_formula", "walk",
]
