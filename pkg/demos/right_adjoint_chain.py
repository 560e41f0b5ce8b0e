"""Right adjoints to exponentiation over the chain 0 <= m <= 1.

Every representable of the chain is atomic. This prints X_T for T = y_m and a
few X, then checks the adjunction and the points of 2_T.
"""

from atomtopos import atomic as at
from atomtopos import cohesion as co
from atomtopos import diagram as dg
from atomtopos.sites import builtin


def main():
    C = builtin("chain3").category
    T = dg.representable(C, "m")
    print("T = y_m atomic:", at.is_atomic(T).atomic)
    for name, X in [("2", dg.two(C)), ("Omega", dg.omega(C)), ("y_0", dg.representable(C, "0"))]:
        R = at.right_adjoint(T, X)
        sizes = {a: R.obj.size(a) for a in C.objects}
        ok = all(R.check_adjunction(Y)["bijective"] for _, Y in dg.test_family(C))
        print(f"  X = {name}: X_T sizes {sizes}, adjunction {ok}, "
              f"triangles {all(at.triangle_identities(T, X).values())}")
    two_T = at.right_adjoint(T, dg.two(C)).obj
    print("2_T iso to 2:", dg.iso_search(two_T, dg.two(C)) is not None,
          "with", len(co.gamma(two_T)), "points")


if __name__ == "__main__":
    main()
