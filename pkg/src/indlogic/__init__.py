"""Exact-arithmetic workbench for inductive (probabilistic) logic on finite languages.

Modules:

* ``formula``, ``parser`` — formulas, signatures, signature permutations, parsing
* ``semantics`` — strict models, events and propositional entailment
* ``measure`` — set families, finite probability and Dynkin spaces
* ``ratlp`` — exact rational linear programming
* ``inductive`` — inductive statements, rule checking, consistency and derivation
* ``fostruct`` — finite first-order structures and models
* ``indifference`` — the principle of indifference over bounded universes
* ``bertrand`` — Bertrand's chord problem
* ``problem``, ``commands``, ``registry``, ``report``, ``cli`` — problem files and the front end
"""

__version__ = "0.1.0"
