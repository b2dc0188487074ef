"""Exact symbolic layer: graded bases, coproducts, characters, assumptions.

Builds the shipped one-noise structure, inspects its coproducts and the
derivative operator on the plus side, and exercises the character group with
exact rational values.
"""
import random
from fractions import Fraction

from regpara import Character, PlusMonomial, structure

S = structure("toy")
print(f"structure {S.name}: cutoff {S.cutoff}")
print("base generators:")
for name, h in sorted(S.base_gens.items(), key=lambda kv: kv[1]):
    print(f"  {h!s:>6}  {name}")
print("plus generators:")
for name, h in sorted(S.plus_gens.items(), key=lambda kv: kv[1]):
    print(f"  {h!s:>6}  {name}")

# Coproducts are stored per generator and extended multiplicatively.
neg = min((n for n in S.base_gens if n != "1"), key=lambda n: S.base_gens[n])
from regpara import BaseSymbol

print(f"\ncoproduct of the most singular symbol {neg}:")
print("  ", S.delta(BaseSymbol(neg, (0,))))

# The derivative operator reads off polynomial slots of the coproduct.
x2 = PlusMonomial.of_poly((2,))
print(f"\ncoproduct of X^2: {S.delta_plus(x2)}")
print(f"D^1 X^2 = {S.d_op((1,), x2)}  (factorial normalisation)")

# Assumption report: shapes, quotients, generator orbits, polynomial terms.
rep = S.check_assumptions()
print(f"\nassumptions: A={rep.a_ok} B={rep.b_ok} C={rep.c_ok} D={rep.d_ok}")
print("free generator set of the plus side (orbit roots):")
for r in rep.c_generators:
    print("  ", r)

# Characters with exact rational values: convolution group laws hold exactly.
rng = random.Random(0)
g1 = Character(S, (Fraction(1, 4),),
               {n: Fraction(rng.randint(-4, 4), 4) for n in S.plus_gens})
gi = g1.invert()
eps = Character.counit(S)
probe = S.plus_monomials(S.cutoff + Fraction(5, 8))
exact = all(g1.convolve(gi).of_monomial(m) == eps.of_monomial(m) for m in probe)
print(f"\ng * g^-1 = counit on {len(probe)} monomials: {exact}")
