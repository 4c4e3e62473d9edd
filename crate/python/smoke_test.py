"""Smoke test for the lossqfi extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math

import lossqfi


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    r = lossqfi.qfi("fock:n=2", 0.6, runs=100)
    assert close(r.qfi, 8.0, 1e-8), r
    assert close(r.crlb_variance, 1.0 / 800.0, 1e-8)
    assert close(r.qfi, r.qfi_trace_route, 1e-8)

    p = lossqfi.Probe.qubit(0.5)
    assert p.family == "qubit"
    assert p == lossqfi.Probe(str(p))
    amps = p.amplitudes()
    assert close(sum(abs(a) ** 2 for a in amps), 1.0, 1e-12)

    phi = 0.4
    want = 4 * 0.5 * (1 - 0.5 * math.cos(phi) ** 2)
    assert close(lossqfi.qfi(p, phi).qfi, want, 1e-9)
    assert close(lossqfi.closed_form_qfi("qubit:nbar=0.5", phi), want, 1e-12)

    proj = lossqfi.optimal_measurement("coherent:alpha=1", 0.7)
    assert proj and all(len(v) == len(proj[0][1]) for _, v in proj)

    q = lossqfi.optimize_qutrit(0.5, math.pi / 4)
    g = lossqfi.optimize_gaussian(0.5, math.pi / 4)
    assert q.best_qfi >= g.best_qfi - 1e-9, (q, g)
    assert q.probe.family == "qutrit"
    s = lossqfi.optimize_superposition(3, 0.5, math.pi / 4, seed=1)
    assert s.best_qfi >= q.best_qfi - 1e-6

    pts = lossqfi.region_map([0.5, 1.0], [-0.3, 0.3])
    assert len(pts) == 4

    e = lossqfi.simulate_fock_estimation(1, math.pi / 4, runs=10_000, repetitions=200, seed=7)
    assert 0.8 < e.normalized_variance < 1.2, e.normalized_variance

    z = lossqfi.loss_reparametrize(math.pi / 4, "phi", "z")
    assert close(z, 1.0, 1e-12)

    try:
        lossqfi.qfi("fock:n=1", 1e-5)
    except lossqfi.LossQfiError:
        pass
    else:
        raise AssertionError("guard band not enforced")

    print("smoke test ok")


if __name__ == "__main__":
    main()
