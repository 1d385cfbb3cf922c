"""Compile LTLf/LDLf reward specifications into automata and Markovian MDPs."""

__version__ = "0.1.0"
