#!/usr/bin/env python3
"""Generate the frozen CVSS v3.1 base-score oracle table.

Transcribes the published v3.1 base-score equations (metric weights,
impact/exploitability sub-scores, scope branch, Roundup) and emits one
CSV row per valid base vector in canonical enumeration order:

    vector,base_score

The checked-in CSV (tests/fixtures/cvss_oracle.csv) is the source of
truth for the scoring tests; regenerate only if the table is suspected
to be wrong, and diff carefully.
"""

import math
import sys

AV = [("N", 0.85), ("A", 0.62), ("L", 0.55), ("P", 0.20)]
AC = [("L", 0.77), ("H", 0.44)]
PR = [("N", (0.85, 0.85)), ("L", (0.62, 0.68)), ("H", (0.27, 0.50))]  # (unchanged, changed)
UI = [("N", 0.85), ("R", 0.62)]
S = ["U", "C"]
CIA = [("N", 0.0), ("L", 0.22), ("H", 0.56)]


def roundup(x: float) -> float:
    i = int(round(x * 100000))
    if i % 10000 == 0:
        return i / 100000.0
    return (i // 10000 + 1) / 10.0


def base_score(av, ac, pr_u, pr_c, ui, scope, c, i, a) -> float:
    iss = 1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a)
    if scope == "U":
        impact = 6.42 * iss
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
    if impact <= 0.0:
        return 0.0
    pr = pr_u if scope == "U" else pr_c
    exploitability = 8.22 * av * ac * pr * ui
    if scope == "U":
        return roundup(min(impact + exploitability, 10.0))
    return roundup(min(1.08 * (impact + exploitability), 10.0))


def main() -> None:
    out = sys.stdout
    for av_l, av_w in AV:
        for ac_l, ac_w in AC:
            for pr_l, (pr_u, pr_c) in PR:
                for ui_l, ui_w in UI:
                    for s_l in S:
                        for c_l, c_w in CIA:
                            for i_l, i_w in CIA:
                                for a_l, a_w in CIA:
                                    vec = (
                                        f"CVSS:3.1/AV:{av_l}/AC:{ac_l}/PR:{pr_l}"
                                        f"/UI:{ui_l}/S:{s_l}/C:{c_l}/I:{i_l}/A:{a_l}"
                                    )
                                    score = base_score(
                                        av_w, ac_w, pr_u, pr_c, ui_w, s_l, c_w, i_w, a_w
                                    )
                                    out.write(f"{vec},{score:.1f}\n")


if __name__ == "__main__":
    main()
