"""Reference values for the pricing and implied-volatility unit tests.

Black-Scholes prices come from the normal CDF, the derivative operators from
mpmath numerical differentiation of that price, and D(tau) from the defining
integral in kernel_oracle. The first-order formulas are then assembled here
term by term at 40 digits.
"""
import mpmath as mp

from kernel_oracle import d_fun

mp.mp.dps = 40


def bs(x, k, s, tau):
    d1 = (mp.log(x / k) + s * s * tau / 2) / (s * mp.sqrt(tau))
    return x * mp.ncdf(d1) - k * mp.ncdf(d1 - s * mp.sqrt(tau))


def ops(x, k, s, tau):
    gamma = lambda y: y * y * mp.diff(lambda u: bs(u, k, s, tau), y, 2)
    skew = x * mp.diff(gamma, x)
    return gamma(x), skew


def main():
    out = {}
    for x, k, s, tau in [(1, 1, 0.2, 1), (1, 0.8, 0.3, 0.5), (100, 120, 0.25, 2), (1, 1.5, 0.1, 0.05)]:
        x, k, s, tau = map(mp.mpf, (x, k, s, tau))
        out[f"bs {x} {k} {s} {tau}"] = bs(x, k, s, tau)
        g, sk = ops(x, k, s, tau)
        out[f"gamma {x} {k} {s} {tau}"] = g
        out[f"skew {x} {k} {s} {tau}"] = sk
    # fSV first-order price and implied vol: H=0.3, a=1, sigma_bar=0.2,
    # delta=0.1, rho=-0.5, t=0.25, T=1.25, x=1, K=1.1, phi=0.03
    h, a, sb, dl, rho = mp.mpf("0.3"), mp.mpf(1), mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("-0.5")
    x, k, tau, phi = mp.mpf(1), mp.mpf("1.1"), mp.mpf(1), mp.mpf("0.03")
    d = d_fun(h, a, tau)
    q0 = bs(x, k, sb, tau)
    g, sk = ops(x, k, sb, tau)
    out["fsv D"] = d
    out["fsv q0"] = q0
    out["fsv random"] = dl * sb * phi * g
    out["fsv skew"] = dl * rho * sb ** 2 * sk * d
    out["fsv total"] = q0 + dl * sb * phi * g + dl * rho * sb ** 2 * sk * d
    out["fsv iv"] = sb + dl * phi / tau + dl * rho * d * (sb / (2 * tau) + mp.log(k / x) / (sb * tau ** 2))
    # slow model: sigma = 0.05 + 0.15(1 + tanh z), z0 = 0.3, delta = 0.04,
    # H = 0.3, rho = -0.5, tau = 0.5, x = 1, K = 0.95, phi^delta = -0.01
    smin, c, z0, dl = mp.mpf("0.05"), mp.mpf("0.15"), mp.mpf("0.3"), mp.mpf("0.04")
    s0 = smin + c * (1 + mp.tanh(z0))
    p0 = c / mp.cosh(z0) ** 2
    tau, k, phi = mp.mpf("0.5"), mp.mpf("0.95"), mp.mpf("-0.01")
    g, sk = ops(x, k, s0, tau)
    q0 = bs(x, k, s0, tau)
    rnd = s0 * p0 * phi * g
    skw = dl ** h * rho * p0 * s0 ** 2 * sk * tau ** (h + mp.mpf(3) / 2) / mp.gamma(h + mp.mpf(5) / 2)
    out["slow q0"] = q0
    out["slow random"] = rnd
    out["slow skew"] = skw
    out["slow total"] = q0 + rnd + skw
    t0 = 2 / s0 ** 2
    out["slow iv"] = (s0 + p0 * phi / tau + dl ** h * p0 * rho * t0 ** h / (mp.sqrt(2) * mp.gamma(h + mp.mpf(5) / 2))
                      * ((tau / t0) ** (h + mp.mpf(1) / 2) + (tau / t0) ** (h - mp.mpf(1) / 2) * mp.log(k / x)))
    for key, v in out.items():
        print(f"{key:32s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    main()
