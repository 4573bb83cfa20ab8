"""Regenerate the 50-digit reference values frozen in test_bogoliubov.py.

Evaluates the direct formulas with mpmath; no log-domain tricks.
Run: python tests/oracles/extended_precision.py
"""
import mpmath as mp

mp.mp.dps = 50


def reference(eps, rho, m, k):
    eps, rho, m, k = map(mp.mpf, (eps, rho, m, k))
    mo = m * (1 + 2 * eps)
    wi, wo = mp.sqrt(k * k + m * m), mp.sqrt(k * k + mo * mo)
    wp, wm = (wo + wi) / 2, (wo - wi) / 2
    me, a = m * eps, mp.pi / rho
    pre = (wm + me) * (wp + me) / ((wm - me) * (wp - me))
    sh = mp.sinh(a * (wm - me)) * mp.sinh(a * (wm + me)) / (mp.sinh(a * (wp + me)) * mp.sinh(a * (wp - me)))
    g_f = abs(pre * sh) * k * k / (wo + mo) ** 2

    def boson(wb2):
        c = mp.cosh(a * mp.sqrt(wb2)) if wb2 >= 0 else mp.cos(a * mp.sqrt(-wb2))
        return (c + mp.cosh(2 * a * wm)) / (c + mp.cosh(2 * a * wp))

    return g_f, boson(m * m * (2 * eps + 1) ** 2 - rho * rho), boson(4 * m * m * eps * eps - rho * rho)


if __name__ == "__main__":
    for point in [(1, 1, 1, 1), (2, 0.5, 1, 0.7), (1, 5, 2, 1)]:
        print(point, [mp.nstr(v, 20) for v in reference(*point)])
