"""Mean worst-user SINR (dB) versus the SINR target."""

from sweep_common import run

if __name__ == "__main__":
    run(5, "mean_worst_sinr_db", "Mean worst-user SINR (dB)", __doc__)
