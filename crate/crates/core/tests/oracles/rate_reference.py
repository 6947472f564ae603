# Reference values for the exact rate and Lamb-shift integrals.
# Regenerate with: python3 rate_reference.py
import mpmath as mp

mp.mp.dps = 30


def kernels(p, eta):
    s = 2 * p + 1

    def f(tau):
        q = 1 / eta + 1j * tau
        if p == 0:
            return -(2 * mp.digamma(q) + 1 / q) / eta
        return eta ** (-s) * (2 * mp.zeta(s, q) - q ** (-s))

    f0 = f(0)

    def q12(tau):
        q1 = mp.im((1 - 1j * eta * tau) ** (-s)) / (s * eta)
        q2 = mp.re(f0 - f(tau)) / (s * eta)
        return q1, q2

    q0 = mp.re(f0) / (s * eta) if p > 0 else None
    return q12, q0


def rate(p, eta, a, y):
    q12, q0 = kernels(p, eta)
    c = mp.exp(-y * q0) if q0 is not None else mp.mpf(0)

    def amp(tau):
        q1, q2 = q12(tau)
        return mp.cos(y * q1) * mp.exp(-y * q2) - c

    g = mp.quadosc(lambda t: mp.cos(a * t) * amp(t), [0, mp.inf], omega=abs(a))
    x = mp.quadosc(lambda t: mp.sin(a * t) * amp(t), [0, mp.inf], omega=abs(a)) + c / a
    return g, x


CASES = [
    # p, eta, a, y
    (0.5, 0.1, 4.0, 1.0),
    (0.5, 0.1, 2.0, 3.0),
    (0.5, 1.0, 3.0, 0.5),
    (0.5, 1.0, 1.0, 2.0),
    (1.5, 1.0, 2.0, 1.0),
    (1.5, 3.0, 0.5, 4.0),
    (0.0, 1.0, 2.0, 1.5),
    (-0.25, 1.0, 2.0, 1.0),
    (0.5, 5.0, -1.5, 0.8),
]

for p, eta, a, y in CASES:
    g, x = rate(mp.mpf(p), mp.mpf(eta), mp.mpf(a), mp.mpf(y))
    print(f"({p}, {eta}, {a}, {y}, {mp.nstr(g, 17)}, {mp.nstr(x, 17)}),")
