"""Decorated trees and the basis change that repairs the polynomial-term
obstruction.

The canonical tree basis of the heavier-noise example contains an integrated
tree whose coproduct has a right factor that is a bare polynomial - the
obstruction to the simple coefficient formula for modelled distributions.
Replacing grafts of polynomial-decorated trees by polynomial-shifted graft
operators removes every such term.
"""
from regpara import FreeVector, basis, serialize
from regpara.rules import check_d_canonical, check_stronger_claim

tb = basis("bhz")
print(f"rule {tb.rule.name}: |B.| = {len(tb.b_dot)}, companion basis "
      f"|B~.| = {len(tb.b_dot_tilde)}, plus side {len(tb.plus_trees)}")

print("\ncanonical basis:")
for t in tb.b_dot:
    print(f"  {tb.homog(t)!s:>6}  {serialize(t)}")

ok, witness = check_d_canonical(tb)
print(f"\npolynomial-right scan on the canonical basis: {'clean' if ok else 'obstructed'}")
print(f"  witness: {witness}")

print("\ncompanion basis (f-decorated edges):")
for t in tb.b_dot_tilde:
    print(f"  {tb.homog(t)!s:>6}  {serialize(t)}")

ok2, w2 = check_stronger_claim(tb)
print(f"\npolynomial-right scan on the companion basis: {'clean' if ok2 else w2}")

# The change of basis is exact and unitriangular up to signs.
alg = tb.algebra
print("\nexpansions of canonical elements over the companion basis:")
for t in tb.b_dot:
    v = alg.to_noncanonical(t)
    if len(v) > 1:
        print(f"  {serialize(t)} = {v}")
errs = 0
for t in tb.b_dot:
    back = FreeVector.zero()
    for ft, c in alg.to_noncanonical(t).items():
        back = back + alg.to_canonical(ft).scale(c)
    errs += back != FreeVector.single(t)
print(f"\nround-trip failures: {errs}")
