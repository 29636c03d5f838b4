"""Smoke test for the cat_teleport extension module."""

import math

import cat_teleport as ct


def main() -> None:
    report = ct.teleport(1.0, 1.0, 1.0, sign="minus")
    assert abs(report["success_probability"] - 0.5) < 1e-9, report["success_probability"]
    classes = {o["class"] for o in report["outcomes"]}
    assert classes == {"perfect_success", "corrected_success", "failure"}, classes

    plus = ct.teleport(1.0, sign="plus")
    assert abs(plus["success_probability"] - ct.success_prob_closed_form("plus", 1.0)) < 1e-9

    fock = ct.teleport(0.8, 0.3, 0.6 + 0.4j, engine="fock")
    assert abs(fock["success_probability"] - 0.5) < 1e-6

    channel = ct.build_channel("minus", 1.0)
    made = ct.prepare_channel_via_bs(1.0)
    assert abs(abs(made.overlap(channel)) ** 2 - 1.0) < 1e-10

    alpha = 0.7
    plus_channel = ct.build_channel("plus", alpha)
    assert abs(plus_channel.concurrence([0]) - math.tanh(4 * alpha * alpha)) < 1e-9

    ecs = ct.build_ecs(1.0, -1.0, 0.5)
    assert ecs.modes == 2 and abs(ecs.norm_sqr() - 1.0) < 1e-12
    assert abs(ecs.balanced_bs(1, 0).balanced_bs(1, 0).overlap(ecs) - 1.0) < 1e-12

    small = ct.small_alpha_teleport(0.6, 0.8j)
    assert abs(small["success_probability"] - 0.5) < 1e-12
    assert ct.channel_limit_fidelity(1e-3) >= 0.999999

    even, odd = ct.parity_probabilities(ct.FockState.basis([8], [5]))
    assert odd == 1.0 or abs(odd - 1.0) < 1e-12, (even, odd)

    try:
        ct.build_ecs(0, 0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("zero amplitudes accepted")

    try:
        ct.build_channel("minus", 0.0)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("vanishing channel accepted")

    print("cat_teleport smoke test passed")


if __name__ == "__main__":
    main()
