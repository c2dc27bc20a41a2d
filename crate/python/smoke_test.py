"""Smoke test for the Python bindings.

    pip install --no-build-isolation -e crates/py
    python python/smoke_test.py
"""

import json
import math

import oddwalk


def edge_list(n, edges):
    return f"n {n}\n" + "".join(f"{u} {v}\n" for u, v in edges)


def cycle(n):
    return edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def main():
    n, edges = oddwalk.parse(cycle(5))
    assert n == 5 and len(edges) == 5

    assert oddwalk.odd_girth(cycle(7)) == 7
    assert oddwalk.odd_girth(cycle(6)) is None

    k4 = complete(4)
    verdict = oddwalk.are_homotopic(k4, [0, 1, 2, 0], [0, 1, 3, 0])
    assert verdict["status"] == "HOMOTOPIC", verdict
    assert oddwalk.are_homotopic(cycle(5), [0], [0, 1, 2, 3, 4, 0])["status"] == "NOT_HOMOTOPIC"

    assert oddwalk.hom_exists(cycle(7), cycle(5))["status"] == "FOUND"
    assert oddwalk.hom_exists(complete(3), cycle(5))["status"] == "NONE"

    assert oddwalk.h1(complete(3)) == "Z"
    assert oddwalk.h1(complete(4)) == "0"

    assert abs(oddwalk.cap_measure(3, math.pi / 2) - 0.5) < 1e-10

    text, ratio = oddwalk.gen_borsuk(2, math.pi / 5, 200, 1)
    assert text.startswith("n 400\n") and 0 < ratio < 1
    assert oddwalk.odd_girth(text) >= 7

    code, out, _ = oddwalk.run_cli(["--json", "odd-girth", "--graph", "petersen"])
    assert code == 0, out
    assert json.loads(out)["result"]["odd_girth"] == 5

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
