""" Discrete wave equation operators """

from bvwave.fem.wave import FemOperators, assemble
