"""Mean transmit power (dBm) versus the SINR target."""

from sweep_common import run

if __name__ == "__main__":
    run(4, "mean_power_dbm", "Mean transmit power (dBm)", __doc__)
