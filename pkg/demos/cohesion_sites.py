"""Cohesion diagnostics for every builtin site."""

from atomtopos import cohesion as co
from atomtopos.sites import builtin_sites


def main():
    for s in builtin_sites():
        rep = co.mclarty_report(s.category, 3)
        verdict = "McLarty" if rep.mclarty else "fails " + ", ".join(rep.failing())
        print(f"{s.id:16} {verdict}")
        for c in rep.checks:
            if not c.passed:
                print(f"{'':18}{c.name}: {c.detail}")


if __name__ == "__main__":
    main()
