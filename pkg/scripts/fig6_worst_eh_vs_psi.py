"""Mean worst-user harvested power (dBm) versus the EH target."""

from sweep_common import run

if __name__ == "__main__":
    run(6, "mean_worst_eh_dbm", "Mean worst-user harvested power (dBm)", __doc__)
