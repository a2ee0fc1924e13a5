"""Independent high-precision reference values frozen into the unit tests.

Run with `python3 tests/oracles/derive.py`; every printed value appears verbatim in tests/unit.
"""
import mpmath as mp

mp.mp.dps = 40


def green(a, lam, t, x, y):
    pre = mp.e ** (lam * t) / mp.sqrt(4 * mp.pi * a * t)
    return pre * (mp.e ** (-(x - y) ** 2 / (4 * a * t)) - mp.e ** (-(x + y) ** 2 / (4 * a * t)))


def show(name, value):
    print(f"{name} = {mp.nstr(value, 17)}")


show("heat_kernel_1d_D1_t1_x0", 1 / mp.sqrt(4 * mp.pi))
show("heat_kernel_1d_D2_t3_x1", mp.e ** (-mp.mpf(1) / 24) / mp.sqrt(24 * mp.pi))
show("green_a1_l0_t1_x1_y1", green(1, 0, 1, 1, 1))
show("green_a2_l05_t15_x2_y07", green(2, mp.mpf("0.5"), mp.mpf("1.5"), 2, mp.mpf("0.7")))
show("green_t_a1_l1_t2_x3_y1", mp.diff(lambda t: green(1, 1, t, 3, 1), 2))
show("green_t_a1_l1_t3_x5_y1", mp.diff(lambda t: green(1, 1, t, 5, 1), 3))
show("t0_rate1", 1 / mp.mpf(2) + mp.e / (mp.e - 1))
show("t0_rate2", (1 / mp.mpf(2) + mp.e / (mp.e - 1)) / 2)
show("tau_threshold_sigma09_N1", mp.mpf("0.81") / mp.mpf("0.19"))
show("ratio_tau4_N1", mp.sqrt(mp.mpf(4) / 5))
show("logistic_ode_u05_t5", 1 / (1 + mp.e ** (-5)))
# Heat flow of a Gaussian with variance s0^2 = 1 at t = 2: variance 1 + 2t = 5.
show("heat_gaussian_var5_x1", mp.e ** (-mp.mpf(1) / 10) / mp.sqrt(2 * mp.pi * 5))
