"""Sets with an idempotent: only the one-point set is atomic.

Run with ``python3 demos/setE_no_atoms.py``.
"""

from atomtopos import atomic as at
from atomtopos import diagram as dg
from atomtopos.sites import builtin


def main():
    C = builtin("E-op").category
    pres = dg.enumerate_presheaves(C, 4)
    print(f"{len(pres)} isomorphism classes with at most 4 elements")
    for X in pres:
        v = at.is_atomic(X)
        fixed = sum(1 for i, j in enumerate(X.action["e"]) if i == j)
        tag = "atomic" if v.atomic else "refuted"
        print(f"  |X| = {X.size('*')}, fixed points {fixed}: {tag}")

    # the free one: y_* x y_* is not a retract of y_*, and the candidate
    # right adjoint fails an exact count
    T = dg.representable(C, "*")
    R = at.right_adjoint(T, T)
    tests = sorted(dg.enumerate_presheaves(C, 3), key=lambda Y: Y.total_size())
    fail = R.adjunction_failure(tests)
    print(f"candidate (y_*)_(y_*): |Nat(Y^T, X)| = {fail['left']} "
          f"but |Nat(Y, X_T)| = {fail['right']}")


if __name__ == "__main__":
    main()
