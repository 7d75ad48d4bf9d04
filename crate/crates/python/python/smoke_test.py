"""Smoke test for the zeno_sdc extension module.

Build and install first, e.g. `maturin develop --release` in crates/python.
"""

import math

import zeno_sdc as z


def main():
    assert z.ANALYZERS == ["dqz", "ifm", "qz"]
    assert abs(z.r_analytic("dqz", 7) - 1.678) < 5e-4
    assert abs(z.p_survival("qz", 2) - 0.0625) < 1e-15

    assert [z.min_n_for_target(k, 1.8) for k in ("qz", "ifm", "dqz")] == [71, 24, 12]
    assert z.min_n_for_target("dqz", z.EXPERIMENTAL_BENCHMARK_R) == 7
    assert z.resource_counts("ifm", 24) == (96, False)

    curve = z.efficiency_curve("dqz", 1, 3)
    assert [n for n, _ in curve] == [1, 2, 3]
    assert abs(curve[1][1] - 1.125) < 1e-15

    assert z.encode("11") == "psi-"
    assert z.decode("D2·D3") == ("phi+", "00")
    assert z.decode("D2*D3", analyzer="ifm") == ("psi+", "01")

    probs = z.analyze("dqz", "phi-", 12)
    assert abs(probs["photon_lost"] - (1 - z.p_survival("dqz", 12))) < 1e-12
    assert abs(probs["D1·D3"] - z.p_survival("dqz", 12)) < 1e-12

    amps = z.qz_collapsed_state("phi+")
    assert all(abs(a - 1 / math.sqrt(3)) < 1e-12 for a in amps[:3]) and amps[3] == 0.0

    est = z.simulate("dqz", 12, 100_000, seed=42)
    assert est.decode_errors == 0
    assert est.ci95[0] <= est.r_hat <= est.ci95[1]
    assert abs(est.r_hat - z.r_analytic("dqz", 12)) < 0.01
    assert z.simulate("dqz", 12, 100_000, seed=42).r_hat == est.r_hat

    try:
        z.min_n_for_target("dqz", 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("target 2.0 must be rejected")

    print("zeno_sdc smoke test passed:", est)


if __name__ == "__main__":
    main()
