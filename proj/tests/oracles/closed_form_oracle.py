"""Exact rational evaluation of the closed-form SINR terms and LSF bounds.

Prints the values frozen in tests/test_closed_form.cpp and
tests/test_stochastic_bounds.cpp. Run: python3 closed_form_oracle.py
"""
from fractions import Fraction as F
import random


def terms(inst, scheme):
    cell, bc, bs, rho_d, rho_p, sig2, M, tau_p, tau_c, t = (
        inst[k] for k in ("cell", "bc", "bs", "rho_d", "rho_p", "sig2", "M", "tau_p", "tau_c", "t"))
    U = len(cell)
    p = [rho_d / b for b in bs]
    q = [rho_p / b for b in bs]
    psi = [cell[a] != cell[t] for a in range(U)]
    p0, q0, b0 = p[t], q[t], bc[t]
    w = [bc[a] ** 2 / (q0 * b0) for a in range(U)]
    out = {"coherent_gain": M * p0 * b0, "pilot_contamination": F(0), "extra_coherent": F(0),
           "non_coherent": F(0), "noise_term": F(0)}
    if scheme == "rp":
        tau = tau_p
        g = q0 * tau * b0 / (q0 * tau * b0 + sum(q[a] * bc[a] for a in range(U) if psi[a]) + sig2)
        out["gamma"] = g
        out["pilot_contamination"] = F(M, tau) * sum(p[a] * q[a] * w[a] for a in range(U) if psi[a])
        out["non_coherent"] = sum(p[a] * bc[a] for a in range(U)) / g
        out["noise_term"] = sig2 / g
    else:
        tau = tau_c
        g = q0 * tau * b0 / (q0 * tau * b0 + sum(q[a] * bc[a] for a in range(U) if psi[a])
                             + sum(p[a] * bc[a] for a in range(U)) + sig2)
        out["gamma"] = g
        if scheme == "sp":
            out["pilot_contamination"] = F(M, tau) * sum(
                (p[a] + (1 - F(1, tau)) * q[a]) * q[a] * w[a] for a in range(U) if psi[a])
            out["extra_coherent"] = F(M, tau) * sum((p[a] + q[a]) * p[a] * w[a] for a in range(U))
            out["non_coherent"] = (F(2, tau) * p0 * b0
                                   + F(2, tau * tau) * sum(q[a] * p[a] * w[a] for a in range(U) if psi[a])
                                   + F(1, tau * tau) * sum(p[a] ** 2 * w[a] for a in range(U))
                                   + sum((q[a] + p[a]) * bc[a] for a in range(U)) / g)
        else:
            out["pilot_contamination"] = F(M, tau) * sum(p[a] * q[a] * w[a] for a in range(U) if psi[a])
            out["extra_coherent"] = F(M, tau) * sum(p[a] ** 2 * w[a] for a in range(U))
            out["non_coherent"] = (F(1, tau * tau) * sum(p[a] ** 2 * w[a] for a in range(U))
                                   + sum(p[a] * bc[a] for a in range(U)) / g)
        out["noise_term"] = sig2 / g
    den = out["pilot_contamination"] + out["extra_coherent"] + out["non_coherent"] + out["noise_term"]
    out["sinr"] = out["coherent_gain"] / den
    return out


def lb_rp(M, K, tau_p, a, snr):
    ns = 1 / snr
    den = (M * K / (tau_p * (a - 1)) + K * K / (tau_p * (a - 1))
           + (1 + F(K) / tau_p * 2 / (a - 2) + ns / tau_p) * (a * K / (a - 2) + ns))
    return M / den


def lb_sp(M, K, tc, d, a, snr):
    ns = 1 / snr
    den = (M * K / (tc * (a - 1)) * (1 - d / tc) + F(M * K, tc) * (1 - d) * a / (d * (a - 1))
           + 2 * (1 - d) / tc * (1 + K / (tc * (a - 1)))
           + K * (1 - d) ** 2 * a / (tc * tc * d * (a - 1)) + K * K / (tc * d * (a - 1))
           + (1 + K / (tc * d) * (2 / (a - 2) + (1 - d)) + ns / (d * tc)) * (K * a / (a - 2) + ns))
    return M * (1 - d) / den


def lb_sp_ub(M, K, tc, d, a, snr):
    ns = 1 / snr
    den = (M * K * (1 - d) / (tc * (a - 1)) + M * K * (1 - d) ** 2 * a / (tc * d * (a - 1))
           + K * (1 - d) ** 2 * a / (tc * tc * d * (a - 1)) + K * K * (1 - d) / (tc * d * (a - 1))
           + (1 + K / (tc * d) * (2 / (a - 2) + (1 - d)) + ns / (d * tc)) * (K * (1 - d) * a / (a - 2) + ns))
    return M * (1 - d) / den


def hand():
    return {"cell": [0, 0, 1, 1], "bc": [F(1), F(1, 2), F(1, 5), F(1, 10)],
            "bs": [F(1), F(1, 2), F(3, 4), F(2, 5)], "rho_d": F(3, 5), "rho_p": F(2, 5),
            "sig2": F(1, 2), "M": 8, "tau_p": 4, "tau_c": 8, "t": 0}


def random_instance(rng):
    ncell = rng.randint(2, 4)
    K = rng.randint(1, 3)
    cell = [l for l in range(ncell) for _ in range(K)]
    t = rng.randrange(K)
    bs = [F(rng.randint(1, 40), 20) for _ in cell]
    bc = [bs[a] if cell[a] == 0 else bs[a] * F(rng.randint(1, 19), 20) for a in range(len(cell))]
    tau_c = rng.randint(4, 16)
    return {"cell": cell, "bc": bc, "bs": bs, "rho_d": F(rng.randint(1, 9), 10),
            "rho_p": F(rng.randint(1, 9), 10), "sig2": F(rng.randint(1, 20), 10),
            "M": rng.randint(2, 32), "tau_p": rng.randint(K, tau_c), "tau_c": tau_c, "t": t}


def show(name, inst):
    print(f"// {name}: {inst}")
    for s in ("rp", "sp", "sp_ub"):
        o = terms(inst, s)
        vals = ", ".join(f"{float(o[k]):.17g}" for k in
                         ("gamma", "coherent_gain", "pilot_contamination", "extra_coherent",
                          "non_coherent", "noise_term", "sinr"))
        print(f"  {s}: {{{vals}}}")


if __name__ == "__main__":
    show("hand", hand())
    rng = random.Random(20240611)
    for i in range(3):
        show(f"random{i}", random_instance(rng))
    a = F(94, 25)
    snr = F(1, 4)
    print("lb_rp M=100 K=10 tau_p=40:", f"{float(lb_rp(100, 10, 40, a, snr)):.17g}")
    print("lb_sp M=100 K=10 tau_c=200 d=0.36:", f"{float(lb_sp(100, 10, 200, F(9, 25), a, snr)):.17g}")
    print("lb_sp_ub M=100 K=10 tau_c=200 d=0.6:", f"{float(lb_sp_ub(100, 10, 200, F(3, 5), a, snr)):.17g}")
