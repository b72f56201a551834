"""Feasibility rate (%) versus the error radius."""

from sweep_common import run

if __name__ == "__main__":
    run(2, "feasibility_pct", "Feasibility rate (%)", __doc__)
