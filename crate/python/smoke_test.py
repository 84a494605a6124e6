"""Smoke test for the pyesrad extension module.

Build and install first:
    pip install --no-build-isolation ./crates/py
"""

import math

import pyesrad


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    cfg = pyesrad.SystemConfig(delta=1.0, v=0.5)
    p = cfg.params()
    assert close(p.omega_rabi, math.sqrt(2.0), 1e-12), p
    assert close(p.c1**2 + abs(p.c2) ** 2, 1.0, 1e-12)
    lower, carrier, upper = p.sidebands
    assert close(upper - carrier, carrier - lower, 1e-12)
    print("params:", p)

    resonant = pyesrad.SystemConfig(delta=0.0, v=1.0).params()
    assert math.isinf(resonant.alpha)

    rows = pyesrad.SystemConfig(delta=1.0, alpha=0.7, phi_field=0.3).dipoles(basis="sudden")
    rayleigh = [r for r in rows if r["element"] == "D12" and r["line"] == "omega" and r["part"] == "emission"]
    assert rayleigh and rayleigh[0]["coherence"] == "noncoherent"
    print("sudden components:", len(rows))

    table = pyesrad.SystemConfig(delta=1.0, alpha=0.1).rate_table(n=0.0)
    assert not any(r["active"] and r["direction"] == "absorption" for r in table)
    a1 = next(r for r in table if r["regime"] == "small_alpha" and r["transition"] == "Phi1->Phi1")
    assert close(a1["spont_coeff"], 0.01 / 4 * 0.99, 1e-15)

    gamma = pyesrad.SystemConfig(delta=1.0, alpha=1.0).linewidth(1.0)
    assert close(gamma, 0.1464466, 1e-7), gamma

    sudden = pyesrad.SystemConfig(delta=1.0, alpha=0.5).oracle(profile="tanh", delta_tau=0.001)
    assert sudden["limit"] == "sudden"
    assert sudden["max_norm_drift"] < 1e-9
    for c in sudden["components"]:
        if c["sudden"] > 1e-12:
            assert abs(abs(c["amp"]) - c["sudden"]) < 0.02 * c["sudden"], c
    print("oracle: sudden limit reproduced,", len(sudden["components"]), "components")

    coh = cfg.ensemble_scaling(selector="coherent", trials=500, seed=4)
    non = cfg.ensemble_scaling(selector="noncoherent", trials=2000, seed=4)
    assert close(coh["exponent"], 2.0, 0.05) and close(non["exponent"], 1.0, 0.1)
    print("ensemble exponents:", coh["exponent"], non["exponent"])

    findings = pyesrad.audit()
    assert len(findings) >= 4
    print("audit findings:", [f["id"] for f in findings])

    try:
        pyesrad.SystemConfig(delta=0.0, v=0.0)
    except ValueError as e:
        print("rejected degenerate config:", e)
    else:
        raise AssertionError("degenerate dressing accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
