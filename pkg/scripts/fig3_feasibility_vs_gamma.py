"""Feasibility rate (%) versus the SINR target."""

from sweep_common import run

if __name__ == "__main__":
    run(3, "feasibility_pct", "Feasibility rate (%)", __doc__)
