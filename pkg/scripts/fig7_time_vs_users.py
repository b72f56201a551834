"""Mean solve time (s) versus the number of users."""

from sweep_common import run

if __name__ == "__main__":
    run(7, "mean_solve_seconds", "Mean solve time (s)", __doc__)
